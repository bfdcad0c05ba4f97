#!/usr/bin/env python3
"""A scripted stand-in for an external patch synthesizer.

Reads one repair-request document from stdin and answers on stdout in
the patch wire format.  It proposes three candidates for the first
`ensures` clause it finds: the full bounds guard, a weaker partial
guard, and a two-hunk variant that also marks the first assignment to
`odd`.  Deliberately stdlib-only, so the subprocess protocol gets
exercised exactly the way a third-party tool would drive it.
"""
import sys

MARKER = "// pr {:trusted}"
GUARD = "0 <= odd && odd < arr.Length"
REQUIRED_FIELDS = ("filename", "k", "program", "error_trace", "error",
                   "trace_assertions", "context", "priority")


def parse_fields(text):
    """The request is a sequence of `name <<<` ... `>>>` blocks."""
    fields = {}
    lines = text.split("\n")
    i = 0
    while i < len(lines):
        if lines[i].endswith(" <<<"):
            name = lines[i][: -len(" <<<")]
            body = []
            i += 1
            while i < len(lines) and lines[i] != ">>>":
                body.append(lines[i])
                i += 1
            if i == len(lines):
                raise SystemExit("mock_synth: unterminated field %r" % name)
            fields[name] = "\n".join(body)
        i += 1
    return fields


def first_line_starting(program, prefix):
    for line in program.split("\n"):
        stripped = line.lstrip()
        if stripped.startswith("//"):
            continue
        if stripped.startswith(prefix):
            return line
    return None


def hunk(number, filename, original, patched):
    return ("# modification %d\n"
            "<file>\n%s\n</file>\n"
            "<original>\n%s\n</original>\n"
            "<patched>\n%s\n</patched>\n"
            % (number, filename, original, patched))


def main():
    req = parse_fields(sys.stdin.read())
    missing = [f for f in REQUIRED_FIELDS if f not in req]
    if missing:
        raise SystemExit("mock_synth: missing fields %s" % ", ".join(missing))
    program = req["program"]
    filename = req["filename"]
    target = first_line_starting(program, "ensures")
    if target is None:
        raise SystemExit("mock_synth: no ensures clause to patch")
    indent = target[: len(target) - len(target.lstrip())]
    expr = target.lstrip()[len("ensures "):]
    full = "%sensures %s ==> %s %s" % (indent, GUARD, expr, MARKER)
    partial = "%sensures 0 <= odd ==> %s %s" % (indent, expr, MARKER)
    blocks = [
        hunk(1, filename, target, full),
        hunk(2, filename, target, partial),
    ]
    assignment = first_line_starting(program, "odd :=")
    if assignment is not None:
        blocks.append(hunk(3, filename, target, full))
        blocks.append(hunk(3, filename, assignment,
                           "%s %s" % (assignment, MARKER)))
    sys.stdout.write("\n".join(blocks))


if __name__ == "__main__":
    main()
