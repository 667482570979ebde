"""Flat ``key = value`` run configuration.

Built-in defaults < config file < command-line flags. The effective
configuration is written next to every output in the same format, so it
can be fed back with ``--config`` to repeat a run.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Mapping


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    # synonym derivation
    threshold: float = 12.0
    empty_threshold: float = 1000.0
    max_normalized_distance: float = 0.34
    min_word_length: int = 4
    # lexicon
    max_tokens: int = 3
    synonym_penalty: float = 0.9
    # pagerank / co-occurrence
    damping: float = 0.85
    tol: float = 1e-8
    max_iter: int = 100
    min_count: int = 2
    since_year: int = 2000
    # corpus priors
    smoothing: float = 0.0
    # ranking
    policy: str = "cascade"
    window: int = 10
    w_link_prob: float = 10.0
    w_corpus_freq: float = 3.0
    w_pagerank: float = 1.0
    w_context: float = 1.0

    def weights(self) -> dict[str, float]:
        return {
            "link_prob": self.w_link_prob,
            "corpus_freq": self.w_corpus_freq,
            "pagerank": self.w_pagerank,
            "context": self.w_context,
        }

    def updated(self, values: Mapping[str, object]) -> "RunConfig":
        known = {f.name: f.type for f in fields(self)}
        unknown = sorted(set(values) - set(known))
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        coerced = {}
        for key, raw in values.items():
            default = getattr(self, key)
            try:
                coerced[key] = raw if isinstance(raw, type(default)) else type(default)(raw)
            except (TypeError, ValueError):
                raise ConfigError(f"{key}: cannot parse {raw!r} as {type(default).__name__}") from None
        return replace(self, **coerced)

    def to_dict(self) -> dict:
        return asdict(self)

    def dumps(self) -> str:
        return "".join(f"{k} = {v!r}\n" if isinstance(v, float) else f"{k} = {v}\n" for k, v in self.to_dict().items())


def parse_config(text: str, source: str = "<config>") -> dict[str, str]:
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key] = value
    return out


def load_config(path=None, overrides: Mapping[str, object] | None = None) -> RunConfig:
    cfg = RunConfig()
    if path is not None:
        cfg = cfg.updated(parse_config(Path(path).read_text(encoding="utf-8"), str(path)))
    if overrides:
        cfg = cfg.updated({k: v for k, v in overrides.items() if v is not None})
    return cfg
