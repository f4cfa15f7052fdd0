"""Configuration parsing, precedence and error messages."""

import pytest

from plap.config import INTEGER, REAL, STRING, Key, parse_config, parse_text
from plap.errors import ConfigError

SCHEMA = {
    "preset": Key(STRING, choices=("small",)),
    "p": Key(REAL, required=True),
    "n": Key(INTEGER, required=True),
    "kind": Key(STRING, default="interval", choices=("interval", "radial")),
    "T": Key(REAL, default=1.0),
}
PRESETS = {"small": {"p": 1.5, "n": 33}}


def _write(tmp_path, text):
    path = tmp_path / "run.cfg"
    path.write_text(text)
    return path


def test_values_comments_and_defaults(tmp_path):
    cfg = parse_config(_write(tmp_path, "# header\np = 3   # slow\n\nn = 65\n"), None, SCHEMA)
    assert cfg.real("p") == 3.0 and cfg.integer("n") == 65
    assert cfg.get("kind") == "interval" and cfg.get("T") == 1.0


def test_override_beats_file(tmp_path):
    cfg = parse_config(_write(tmp_path, "p = 3\nn = 65\n"), {"n": 129, "p": None}, SCHEMA)
    assert cfg.integer("n") == 129 and cfg.real("p") == 3.0


def test_type_mismatch_names_key_and_line(tmp_path):
    with pytest.raises(ConfigError, match=r"'n'.*integer.*run.cfg:2"):
        parse_config(_write(tmp_path, "p = 3\nn = many\n"), None, SCHEMA)


def test_override_type_mismatch_names_key():
    with pytest.raises(ConfigError, match="'p'"):
        parse_config(None, {"p": "x", "n": 5}, SCHEMA)


def test_duplicate_key_names_line():
    with pytest.raises(ConfigError, match=r"line 3: duplicate key 'p' \(first set on line 1\)"):
        parse_text("p = 1\nn = 2\np = 3\n", SCHEMA)


def test_unknown_key_and_malformed_line():
    with pytest.raises(ConfigError, match="unknown key 'q'"):
        parse_text("q = 1\n", SCHEMA)
    with pytest.raises(ConfigError, match="line 1: expected"):
        parse_text("p 1\n", SCHEMA)
    with pytest.raises(ConfigError, match="unknown key 'q'"):
        parse_config(None, {"q": 1}, SCHEMA)


def test_missing_required_keys():
    with pytest.raises(ConfigError, match="missing required keys: p, n"):
        parse_config(None, None, SCHEMA)


def test_enum_choice_checked():
    with pytest.raises(ConfigError, match="'kind' expects one of interval, radial"):
        parse_config(None, {"p": 2, "n": 5, "kind": "torus"}, SCHEMA)


def test_preset_fills_only_absent_keys(tmp_path):
    cfg = parse_config(_write(tmp_path, "preset = small\nn = 9\n"), None, SCHEMA, PRESETS)
    assert cfg.real("p") == 1.5 and cfg.integer("n") == 9
    cfg = parse_config(None, {"preset": "small", "p": 2.5}, SCHEMA, PRESETS)
    assert cfg.real("p") == 2.5 and cfg.integer("n") == 33


def test_unreadable_file(tmp_path):
    with pytest.raises(ConfigError, match="cannot read config"):
        parse_config(tmp_path / "absent.cfg", None, SCHEMA)
