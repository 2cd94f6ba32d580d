"""Threshold rules turning item statistics into review flags."""
from __future__ import annotations

from dataclasses import dataclass

from .stats_types import ItemStatistics


@dataclass(frozen=True)
class FlagRuleConfig:
    p_min: float = 0.20
    p_max: float = 0.95
    r_min: float = 0.10
    drift_threshold: float = 0.5
    fit_min: float = 0.7
    fit_max: float = 1.3

    def __post_init__(self) -> None:
        if not self.p_min < self.p_max:
            raise ValueError("p_min must be below p_max")
        if not -1.0 < self.r_min < 1.0:
            raise ValueError("r_min must be inside (-1, 1)")


# reason emission order; stable so reports are reproducible
REASONS = ("too_easy", "too_hard", "low_discrimination", "drift",
           "misfit", "keyed_option_suspect")


def statistical_flags(stats: dict[str, ItemStatistics],
                      config: FlagRuleConfig = FlagRuleConfig(),
                      ) -> dict[str, list[str]]:
    out: dict[str, list[str]] = {}
    for iid, st in stats.items():
        reasons = []
        if st.p is not None and st.p > config.p_max:
            reasons.append("too_easy")
        if st.p is not None and st.p < config.p_min:
            reasons.append("too_hard")
        if st.r is not None and st.r < config.r_min:
            reasons.append("low_discrimination")
        if st.drift_flag == 1:
            reasons.append("drift")
        misfit = any(
            v is not None and not (config.fit_min <= v <= config.fit_max)
            for v in (st.infit, st.outfit)
        )
        if misfit:
            reasons.append("misfit")
        key_r = next((o.option_r for o in st.option_stats if o.is_key), None)
        if key_r is not None and any(
            (not o.is_key) and o.option_r is not None and o.option_r > key_r
            for o in st.option_stats
        ):
            reasons.append("keyed_option_suspect")
        out[iid] = reasons
    return out
