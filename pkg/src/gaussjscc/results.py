from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class SchemeResult:
    """Outcome of evaluating one coding scheme at one operating point.

    ``rates`` are the per-user rates actually used (bits/sample) and
    ``slack`` holds ``capacity - required`` for each rate constraint; all
    entries are >= 0 (up to solver tolerance) for a feasible design.
    """

    scheme: str
    D1: float
    D2: float
    powers: tuple[float, float]
    rates: tuple[float, float] = (0.0, 0.0)
    slack: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    @property
    def D_sum(self) -> float:
        return self.D1 + self.D2

    @property
    def feasible(self) -> bool:
        return all(s >= -1e-9 for s in self.slack.values())

    def weighted(self, beta1: float = 1.0, beta2: float = 1.0) -> float:
        return beta1 * self.D1 + beta2 * self.D2
