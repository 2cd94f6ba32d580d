"""Item-statistic containers shared across the psychometric routines."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional


@dataclass
class OptionStat:
    option_id: str
    prop: float                 # selection proportion among included responses
    option_r: Optional[float]   # option-selected indicator vs rest score
    is_key: bool


@dataclass
class ItemStatistics:
    """Per-item summary; None means the value could not be computed
    (no responses, zero variance, no bank value, ...)."""
    item_id: str
    b: Optional[float] = None
    p: Optional[float] = None
    r: Optional[float] = None
    mean_time: Optional[float] = None
    n: int = 0
    infit: Optional[float] = None
    outfit: Optional[float] = None
    drift_magnitude: Optional[float] = None
    drift_flag: int = 0
    option_stats: list[OptionStat] = field(default_factory=list)
