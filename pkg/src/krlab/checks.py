"""Structured pass/fail records shared by the verification modules."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

PASS = "pass"
FAIL = "fail"
NOT_APPLICABLE = "not_applicable"


@dataclass(frozen=True, eq=False)
class KrCheck:
    """One verified assertion: deterministic status plus its evidence.

    A failing check always carries a witness vector or a numeric residual in
    ``data``; ``tolerances`` records every knob the decision used.
    """

    name: str
    status: str
    detail: str = ""
    witness: object = None  # vector, scalar, complex, or None
    tolerances: dict = field(default_factory=dict)
    data: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.status not in (PASS, FAIL, NOT_APPLICABLE):
            raise ValueError(f"unknown status {self.status!r}")

    @property
    def passed(self) -> bool:
        return self.status == PASS

    @property
    def failed(self) -> bool:
        return self.status == FAIL


@dataclass(eq=False)
class KrReport:
    """Verification report: ordered checks plus the principal eigenpair.

    The principal eigenvector, when present, has Euclidean norm 1 and its
    largest-magnitude entry is positive.
    """

    theorem: str
    checks: list[KrCheck]
    seed: int
    principal: dict | None = None  # {value, eigenvector, alg_mult, geo_mult}
    bounds: dict | None = None
    annotations: list[str] = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    def check(self, name: str) -> KrCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def failing(self) -> list[KrCheck]:
        return [c for c in self.checks if c.failed]

    def all_passed(self) -> bool:
        return not self.failing()


def sign_fix(v: np.ndarray) -> np.ndarray:
    """Normalize to unit norm with the largest-magnitude entry positive."""
    v = np.asarray(v, dtype=np.float64)
    n = np.linalg.norm(v)
    if n == 0.0:
        return v.copy()
    v = v / n
    j = int(np.argmax(np.abs(v)))
    return -v if v[j] < 0.0 else v
