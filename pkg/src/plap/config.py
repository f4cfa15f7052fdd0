"""Plain ``key = value`` configuration with typed accessors.

Lines are ``key = value``; ``#`` starts a comment. Each subcommand declares
a schema (key -> type); unknown keys, duplicates and type mismatches raise
ConfigError. Flag overrides take precedence over file values.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Optional

from .errors import ConfigError

REAL, INTEGER, STRING = "real", "integer", "string"


@dataclass(frozen=True)
class Key:
    type: str
    required: bool = False
    default: object = None
    choices: Optional[tuple] = None  # enum values for string keys


@dataclass
class Config:
    values: Dict[str, str]
    schema: Dict[str, Key]
    source: Optional[str] = None
    lines: Dict[str, int] = field(default_factory=dict)

    def _raw(self, key):
        if key not in self.schema:
            raise ConfigError(f"unknown key {key!r}")
        if key in self.values:
            return self.values[key]
        return None

    def _where(self, key):
        if key in self.lines and self.source:
            return f" ({self.source}:{self.lines[key]})"
        return ""

    def real(self, key):
        raw = self._raw(key)
        if raw is None:
            return self.schema[key].default
        try:
            return float(raw)
        except ValueError:
            raise ConfigError(f"key {key!r} expects a real number, got {raw!r}{self._where(key)}") from None

    def integer(self, key):
        raw = self._raw(key)
        if raw is None:
            return self.schema[key].default
        try:
            return int(raw)
        except ValueError:
            raise ConfigError(f"key {key!r} expects an integer, got {raw!r}{self._where(key)}") from None

    def string(self, key):
        raw = self._raw(key)
        return self.schema[key].default if raw is None else raw

    def enum(self, key):
        val = self.string(key)
        choices = self.schema[key].choices
        if val is not None and choices and val not in choices:
            raise ConfigError(f"key {key!r} expects one of {', '.join(choices)}, got {val!r}{self._where(key)}")
        return val

    def get(self, key):
        k = self.schema[key]
        if k.type == REAL:
            return self.real(key)
        if k.type == INTEGER:
            return self.integer(key)
        return self.enum(key) if k.choices else self.string(key)

    def validate(self):
        """Check types of every present key and that required keys are present."""
        for key in self.values:
            self.get(key)
        missing = [k for k, spec in self.schema.items() if spec.required and k not in self.values]
        if missing:
            raise ConfigError(f"missing required keys: {', '.join(missing)}")
        return self


def parse_text(text, schema: Dict[str, Key], source=None):
    values, lines = {}, {}
    for no, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {no}: expected 'key = value', got {line!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in schema:
            raise ConfigError(f"line {no}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {no}: duplicate key {key!r} (first set on line {lines[key]})")
        values[key], lines[key] = val, no
    return Config(values, schema, source, lines)


def parse_config(path=None, overrides: Optional[dict] = None, schema: Optional[Dict[str, Key]] = None,
                 presets: Optional[Dict[str, dict]] = None) -> Config:
    """Read path (if any), fill preset defaults, then apply non-None overrides; validate the result.

    A ``preset`` key, when present in the schema and set, supplies values for
    keys absent from both the file and the overrides.
    """
    schema = schema or {}
    if path is not None:
        try:
            with open(path) as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        cfg = parse_text(text, schema, str(path))
    else:
        cfg = Config({}, schema)
    for key, val in (overrides or {}).items():
        if val is None:
            continue
        if key not in schema:
            raise ConfigError(f"unknown key {key!r}")
        cfg.values[key] = str(val)
        cfg.lines.pop(key, None)
    preset = cfg.values.get("preset")
    if preset is not None and presets is not None:
        if preset not in presets:
            raise ConfigError(f"key 'preset' expects one of {', '.join(presets)}, got {preset!r}")
        for key, val in presets[preset].items():
            cfg.values.setdefault(key, str(val))
    return cfg.validate()
