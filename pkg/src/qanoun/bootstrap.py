"""Percentile bootstrap confidence intervals with a seedable random source."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import UsageError

DEFAULT_REPLICATES = 200_000
_CHUNK = 20_000  # resampling block size; bounds peak memory


@dataclass(frozen=True)
class BootstrapCI:
    point_estimate: float
    lower: float
    upper: float
    level: float
    replicates: int

    def __post_init__(self):
        if not self.lower <= self.point_estimate <= self.upper:
            raise ValueError(
                f"interval [{self.lower}, {self.upper}] excludes point "
                f"estimate {self.point_estimate}"
            )


def bootstrap_ci(
    samples: Sequence[float],
    statistic: str = "mean",
    replicates: int = DEFAULT_REPLICATES,
    level: float = 0.95,
    seed: int | None = None,
) -> BootstrapCI:
    """Percentile bootstrap interval for the mean; deterministic given seed."""
    if len(samples) == 0:
        raise UsageError("bootstrap_ci requires a nonempty sample")
    if replicates < 1:
        raise UsageError("bootstrap_ci requires replicates >= 1")
    if statistic != "mean":
        raise UsageError(f"unsupported statistic {statistic!r}")
    if not 0 < level < 1:
        raise UsageError(f"confidence level must be in (0, 1), got {level}")

    data = np.asarray(samples, dtype=np.float64)
    n = data.size
    rng = np.random.default_rng(seed)
    means = np.empty(replicates, dtype=np.float64)
    done = 0
    while done < replicates:
        block = min(_CHUNK, replicates - done)
        idx = rng.integers(0, n, size=(block, n))
        means[done : done + block] = data[idx].mean(axis=1)
        done += block

    alpha = (1.0 - level) / 2.0
    lower, upper = np.quantile(means, [alpha, 1.0 - alpha])
    point = float(data.mean())
    # Clamp so lower <= point <= upper holds even for tiny replicate counts.
    return BootstrapCI(
        point_estimate=point,
        lower=min(float(lower), point),
        upper=max(float(upper), point),
        level=level,
        replicates=replicates,
    )
