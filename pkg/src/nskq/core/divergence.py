"""Divergence detection for Picard iteration.

The monitor tracks the most recent fixed-point residuals or iterate norms and reports
divergence when the value grows for a configurable number of consecutive
iterations, or stops being finite. Divergence is data: the solver stops
iterating and returns the partial iterates with a non-convergence status.
"""

import logging
import math
from collections import deque

logger = logging.getLogger(__name__)


class DivergenceMonitor:
    """Consecutive-growth detector for iteration residuals.

    Detection:
    1. Track the last ``history_size`` residuals
    2. Count consecutive strict increases ending at the latest residual
    3. Report divergence once the count reaches ``consecutive_threshold``
       or a residual is NaN/Inf

    Example:
        >>> monitor = DivergenceMonitor(consecutive_threshold=2)
        >>> [monitor.record(r) for r in (1.0, 2.0, 4.0)]
        [False, False, True]

    Args:
        history_size: Number of recent residuals to keep (default: 10)
        consecutive_threshold: Consecutive increases that mark divergence (default: 5)
        enabled: Whether detection is active (default: True)

    """

    def __init__(
        self,
        history_size: int = 10,
        consecutive_threshold: int = 5,
        enabled: bool = True,
    ) -> None:
        """Initialize the monitor."""
        if consecutive_threshold < 1:
            raise ValueError(f"consecutive_threshold must be positive, got {consecutive_threshold}.")
        self.history_size = max(history_size, consecutive_threshold + 1)
        self.consecutive_threshold = consecutive_threshold
        self.enabled = enabled
        self._history: deque[float] = deque(maxlen=self.history_size)
        self._diverged = False

        logger.debug(
            f"Divergence monitor initialized: history_size={self.history_size}, "
            f"consecutive_threshold={consecutive_threshold}, enabled={enabled}"
        )

    @property
    def diverged(self) -> bool:
        """Whether divergence has been reported."""
        return self._diverged

    @property
    def history(self) -> list[float]:
        """Recorded residuals, oldest first."""
        return list(self._history)

    def reset(self) -> None:
        """Clear state before a new iteration."""
        self._history.clear()
        self._diverged = False

    def _count_consecutive_growth(self) -> int:
        values = list(self._history)
        count = 0
        for older, newer in zip(reversed(values[:-1]), reversed(values[1:]), strict=True):
            if newer > older:
                count += 1
            else:
                break
        return count

    def record(self, residual: float) -> bool:
        """Add a residual and return whether the iteration diverges.

        Args:
            residual: Latest fixed-point residual

        Returns:
            True once divergence has been detected

        """
        if not self.enabled:
            return False
        self._history.append(residual)
        if not math.isfinite(residual):
            logger.warning(f"Divergence detected: residual is {residual}")
            self._diverged = True
            return True
        growth = self._count_consecutive_growth()
        if growth >= self.consecutive_threshold:
            logger.warning(
                f"Divergence detected: residual grew {growth} times in a row "
                f"(threshold: {self.consecutive_threshold}), latest {residual:.3e}"
            )
            self._diverged = True
        return self._diverged
