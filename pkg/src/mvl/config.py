"""Tool configuration: a small key=value file merged under CLI flags.

Recognized keys:

    solver.cmd            external SMT solver command (default: builtin)
    solver.timeout_ms     per-query timeout for the external solver
    synth.cmd             external synthesizer command (default: builtin)
    synth.builtin         builtin synthesizer name (enumerative)
    domain.int_lo         bounded-domain integer lower bound
    domain.int_hi         bounded-domain integer upper bound
    domain.max_array_len  bounded-domain maximum array length

Lines starting with `#` and blank lines are ignored.  CLI flags take
precedence over file values, which take precedence over defaults.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from typing import Dict, Optional

from .errors import ShapeError
from .solver import BoundedDomain


@dataclass
class ToolConfig:
    solver_cmd: Optional[str] = None
    solver_timeout_ms: int = 5000
    synth_cmd: Optional[str] = None
    synth_builtin: str = "enumerative"
    domain_int_lo: int = -4
    domain_int_hi: int = 4
    domain_max_array_len: int = 3

    def domain(self) -> BoundedDomain:
        return BoundedDomain(self.domain_int_lo, self.domain_int_hi,
                             self.domain_max_array_len)


_KEYS = {
    "solver.cmd": ("solver_cmd", str),
    "solver.timeout_ms": ("solver_timeout_ms", int),
    "synth.cmd": ("synth_cmd", str),
    "synth.builtin": ("synth_builtin", str),
    "domain.int_lo": ("domain_int_lo", int),
    "domain.int_hi": ("domain_int_hi", int),
    "domain.max_array_len": ("domain_max_array_len", int),
}


def parse_config(text: str, source: str = "<config>") -> ToolConfig:
    values: Dict[str, object] = {}
    for no, raw in enumerate(text.split("\n"), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ShapeError("%s:%d: expected key=value, got %r"
                             % (source, no, raw))
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _KEYS:
            raise ShapeError("%s:%d: unknown config key %r" % (source, no, key))
        attr, conv = _KEYS[key]
        try:
            values[attr] = conv(value)
        except ValueError:
            raise ShapeError("%s:%d: bad value %r for %s" % (source, no, value, key))
    return ToolConfig(**values)


def load_config(path: str) -> ToolConfig:
    with open(path) as fh:
        return parse_config(fh.read(), source=path)


def merge_overrides(config: ToolConfig, **overrides: object) -> ToolConfig:
    """Apply non-None overrides (CLI flags) on top of the config."""
    names = {f.name for f in fields(ToolConfig)}
    clean = {k: v for k, v in overrides.items() if v is not None and k in names}
    return replace(config, **clean)


__all__ = ["ToolConfig", "parse_config", "load_config", "merge_overrides"]
