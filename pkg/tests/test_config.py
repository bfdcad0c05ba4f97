"""Configuration file parsing and flag precedence."""
import pytest

from mvl.config import ToolConfig, load_config, merge_overrides, parse_config
from mvl.errors import ShapeError


class TestDefaults:
    def test_builtin_everything(self):
        cfg = ToolConfig()
        assert cfg.solver_cmd is None
        assert cfg.synth_cmd is None
        assert cfg.synth_builtin == "enumerative"
        assert cfg.solver_timeout_ms == 5000

    def test_default_domain(self):
        d = ToolConfig().domain()
        assert (d.int_lo, d.int_hi, d.max_array_len) == (-4, 4, 3)


class TestParsing:
    def test_full_file(self):
        cfg = parse_config(
            "solver.cmd = z3 -in\n"
            "solver.timeout_ms = 900\n"
            "synth.cmd = ./synth.sh\n"
            "synth.builtin = enumerative\n"
            "domain.int_lo = -2\n"
            "domain.int_hi = 2\n"
            "domain.max_array_len = 2\n")
        assert cfg.solver_cmd == "z3 -in"
        assert cfg.solver_timeout_ms == 900
        assert cfg.synth_cmd == "./synth.sh"
        assert cfg.domain().int_lo == -2
        assert cfg.domain().max_array_len == 2

    def test_comments_and_blanks_skipped(self):
        cfg = parse_config("# solver setup\n\n  # indented comment\n"
                           "domain.int_hi = 6\n")
        assert cfg.domain_int_hi == 6
        assert cfg.domain_int_lo == -4

    def test_unknown_key(self):
        with pytest.raises(ShapeError) as e:
            parse_config("solver.args = -T:5\n", source="tool.cfg")
        assert "tool.cfg:1" in str(e.value)
        assert "unknown config key" in str(e.value)

    def test_bad_int_value(self):
        with pytest.raises(ShapeError) as e:
            parse_config("domain.int_hi = four\n")
        assert "bad value" in str(e.value)

    def test_missing_equals(self):
        with pytest.raises(ShapeError) as e:
            parse_config("solver.cmd z3\n")
        assert "expected key=value" in str(e.value)

    def test_load_from_disk(self, tmp_path):
        path = tmp_path / "mvl.cfg"
        path.write_text("solver.timeout_ms = 123\n")
        cfg = load_config(str(path))
        assert cfg.solver_timeout_ms == 123
        with pytest.raises(ShapeError) as e:
            path.write_text("nope = 1\n")
            load_config(str(path))
        assert str(path) in str(e.value)


class TestPrecedence:
    def test_flags_beat_file_beats_defaults(self):
        cfg = parse_config("domain.int_hi = 6\nsolver.timeout_ms = 900\n")
        merged = merge_overrides(cfg, domain_int_hi=8, synth_builtin=None)
        assert merged.domain_int_hi == 8          # flag wins
        assert merged.solver_timeout_ms == 900    # file wins
        assert merged.synth_builtin == "enumerative"  # default survives

    def test_none_overrides_are_ignored(self):
        cfg = ToolConfig(solver_cmd="z3")
        merged = merge_overrides(cfg, solver_cmd=None)
        assert merged.solver_cmd == "z3"

    def test_unknown_override_names_are_dropped(self):
        merged = merge_overrides(ToolConfig(), not_a_field=17)
        assert merged == ToolConfig()
