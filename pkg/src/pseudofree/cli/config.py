"""Run configuration: defaults, a key=value file, and command-line overrides.

The file named by ``$PSEUDOFREE_CONFIG`` holds lines like ``order_cap = 500``;
blank lines and ``#`` comments are ignored.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace

from ..errors import InvalidParameters

CONFIG_ENV = "PSEUDOFREE_CONFIG"
FORMATS = ("text", "json")


@dataclass(frozen=True)
class RunConfig:
    order_cap: int = 2000
    oracle_degree_cap: int = 12
    search_cap: int = 10**7
    format: str = "text"
    parallelism: int = 1

    def __post_init__(self):
        for name in ("order_cap", "oracle_degree_cap", "search_cap", "parallelism"):
            v = getattr(self, name)
            if not isinstance(v, int) or isinstance(v, bool) or v <= 0:
                raise InvalidParameters(f"{name} must be a positive integer, got {v!r}")
        if self.format not in FORMATS:
            raise InvalidParameters(f"format must be one of {FORMATS}, got {self.format!r}")

    def with_overrides(self, **kw) -> RunConfig:
        return replace(self, **{k: v for k, v in kw.items() if v is not None})

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def parse_config_text(text: str) -> dict:
    known = {f.name: f.type for f in fields(RunConfig)}
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidParameters(f"config line {lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in known:
            raise InvalidParameters(f"config line {lineno}: unknown key {key!r}")
        if key == "format":
            out[key] = value
        else:
            try:
                out[key] = int(value.replace("_", ""))
            except ValueError:
                raise InvalidParameters(f"config line {lineno}: {key} must be an integer") from None
    return out


def load_config(path: str | None = None, env=None) -> RunConfig:
    """Defaults, updated from ``path`` or else from the file named in the environment."""
    env = os.environ if env is None else env
    path = path or env.get(CONFIG_ENV)
    if not path:
        return RunConfig()
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InvalidParameters(f"cannot read config file {path}: {exc}") from None
    return RunConfig(**parse_config_text(text))
