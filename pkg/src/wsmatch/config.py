"""Tool configuration: lexicon path, weights, threshold, data directory.

Values come from an optional JSON config file overridden by CLI flags
(flags win). Config keys: ``lexicon``, ``weights`` ([p1, p2, p3] or an
object with p1/p2/p3), ``threshold``, ``dataDir``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path

from wsmatch.engine import Weights
from wsmatch.errors import WsMatchError
from wsmatch.lexicon import Lexicon, load_lexicon
from wsmatch.relations import DEFAULT_THRESHOLD
from wsmatch.textsim import SimilarityCalculator


@dataclass(frozen=True)
class ToolConfig:
    lexicon_path: str | None = None
    weights: Weights = Weights()
    threshold: float = DEFAULT_THRESHOLD
    data_dir: str = "wsmatch-data"

    def load_lexicon(self) -> Lexicon | None:
        if self.lexicon_path is None:
            return None
        return load_lexicon(self.lexicon_path)

    def calculator(self) -> SimilarityCalculator:
        return SimilarityCalculator(self.load_lexicon())


def load_config(
    config_path: str | None = None,
    *,
    lexicon: str | None = None,
    weights: tuple[float, float, float] | None = None,
    threshold: float | None = None,
    data_dir: str | None = None,
) -> ToolConfig:
    """Build the effective configuration; keyword overrides win over the file."""
    cfg = ToolConfig()
    if config_path is not None:
        cfg = _from_file(config_path)
    if lexicon is not None:
        cfg = replace(cfg, lexicon_path=lexicon)
    if weights is not None:
        cfg = replace(cfg, weights=Weights(*weights))
    if threshold is not None:
        cfg = replace(cfg, threshold=threshold)
    if data_dir is not None:
        cfg = replace(cfg, data_dir=data_dir)
    return cfg


def _from_file(path: str) -> ToolConfig:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise WsMatchError(f"unreadable config {path}: {exc}") from exc
    weights = Weights()
    raw_weights = data.get("weights")
    if isinstance(raw_weights, list):
        weights = Weights(*[float(w) for w in raw_weights])
    elif isinstance(raw_weights, dict):
        weights = Weights(
            float(raw_weights.get("p1", 1.0)),
            float(raw_weights.get("p2", 1.0)),
            float(raw_weights.get("p3", 2.0)),
        )
    return ToolConfig(
        lexicon_path=data.get("lexicon"),
        weights=weights,
        threshold=float(data.get("threshold", DEFAULT_THRESHOLD)),
        data_dir=str(data.get("dataDir", "wsmatch-data")),
    )
