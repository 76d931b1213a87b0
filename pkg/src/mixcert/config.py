"""key=value configuration files."""

from __future__ import annotations

from pathlib import Path

from .errors import MixcertError

KEYS = {
    "threshold": str,
    "t_max": int,
    "backend": str,
    "threads": int,
    "eig_tol": float,
    "restarts": int,
    "seed": int,
    "mode": str,
    "timing": lambda s: s.strip().lower() in ("1", "true", "yes", "on"),
}


class ConfigError(MixcertError, ValueError):
    pass


def parse_config(text: str) -> dict:
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in KEYS:
            raise ConfigError(f"unknown configuration key {key!r}")
        try:
            out[key] = KEYS[key](value)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key}: {exc}") from None
    if out.get("backend", "auto") not in ("auto", "exact", "float"):
        raise ConfigError(f"unknown backend {out['backend']!r}")
    return out


def load_config(path) -> dict:
    return parse_config(Path(path).read_text())
