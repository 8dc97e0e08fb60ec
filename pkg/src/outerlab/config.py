"""Size caps and other tunables.

``OUTERLAB_MAX_ORDER`` in the environment overrides the analysis cap; the
construction cap is raised to match when it would otherwise be smaller.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Config:
    max_group_order: int = 48
    max_analysis_order: int = 24
    # Full-bijection self-test for automorphism enumeration.
    brute_force_aut_order: int = 12
    # Outer groups larger than this are counted but not tabled.
    max_materialized_order: int = 256


def load_config() -> Config:
    cfg = Config()
    raw = os.environ.get("OUTERLAB_MAX_ORDER")
    if raw:
        try:
            cap = int(raw)
        except ValueError:
            return cfg
        if cap > 0:
            cfg = replace(
                cfg,
                max_analysis_order=cap,
                max_group_order=max(cfg.max_group_order, cap),
            )
    return cfg
