"""Legal clock-frequency sets and nearest-level projection."""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from typing import Iterable


@dataclass(frozen=True)
class FrequencySet:
    """Finite ordered set of legal clock frequencies, in GHz.

    Levels are strictly increasing and positive. Instances are immutable and
    safe to share.
    """

    levels: tuple[float, ...]

    def __post_init__(self) -> None:
        if not self.levels:
            raise ValueError("frequency set must not be empty")
        for v in self.levels:
            if not math.isfinite(v) or v <= 0.0:
                raise ValueError(f"frequency level must be finite and positive, got {v!r}")
        if any(b <= a for a, b in zip(self.levels, self.levels[1:])):
            raise ValueError("frequency levels must be strictly increasing")

    @classmethod
    def from_list(cls, values: Iterable[float]) -> "FrequencySet":
        """Build a set from raw values: sorted ascending, duplicates dropped."""
        vals = [float(v) for v in values]
        if not vals:
            raise ValueError("frequency set must not be empty")
        for v in vals:
            if not math.isfinite(v) or v <= 0.0:
                raise ValueError(f"frequency level must be finite and positive, got {v!r}")
        return cls(tuple(sorted(set(vals))))

    def __len__(self) -> int:
        return len(self.levels)

    def __iter__(self):
        return iter(self.levels)

    def __contains__(self, value: float) -> bool:
        return value in self.levels

    @property
    def min_level(self) -> float:
        return self.levels[0]

    @property
    def max_level(self) -> float:
        return self.levels[-1]

    def project(self, u: float) -> float:
        """Map a real-valued frequency command to the nearest legal level.

        When two levels are equidistant from u the lower one wins. Commands
        outside the range clamp to the nearest endpoint.
        """
        if not math.isfinite(u):
            raise ValueError(f"cannot project non-finite frequency {u!r}")
        levels = self.levels
        i = bisect.bisect_left(levels, u)
        if i == 0:
            return levels[0]
        if i == len(levels):
            return levels[-1]
        lo, hi = levels[i - 1], levels[i]
        # ties resolve to the lower level
        return lo if u - lo <= hi - u else hi


# The 16-level ladder used as the default configuration (GHz).
DEFAULT_LEVELS = (
    0.8, 1.0, 1.1, 1.3, 1.5, 1.7, 1.8, 2.0,
    2.2, 2.4, 2.5, 2.7, 2.9, 3.1, 3.2, 3.4,
)

DEFAULT_OMEGA = FrequencySet(DEFAULT_LEVELS)
