"""Cones with exact membership predicates and LP-certified subspace tests.

Three cone kinds are supported:

* ``orthant``      - componentwise-nonnegative vectors of R^n;
* ``icecream``     - { x : x_n >= ||(x_1..x_{n-1})|| } (solid for n >= 2);
* ``gridfunction`` - orthant on the marked active coordinates, with the
  inactive coordinates pinned to zero (grid functions whose eliminated
  boundary values vanish).

All cones here are total in their ambient space; orthant and gridfunction
cones are solid on their active coordinates.  At desk scale the ambient
space and its closure coincide, so no separate closed-cone object exists.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, IterationLimit, UnsupportedCone
from .matrix import Subspace

ORTHANT = "orthant"
ICECREAM = "icecream"
GRIDFUNCTION = "gridfunction"

INTERIOR = "interior"
BOUNDARY = "boundary"
OUTSIDE = "outside"

#: Default membership tolerance (one order above eigensolver residuals).
MEMBERSHIP_TOL = 1e-9
#: Default witness-margin tolerance for subspace searches.
WITNESS_TOL = 1e-7

LP_FEAS_TOL = 1e-9
LP_NONNEG_TOL = 1e-12
LP_MAX_PIVOTS = 10_000


@dataclass(frozen=True, eq=False)
class Cone:
    kind: str
    dim: int
    mask: np.ndarray | None = None  # bool mask of active coords (gridfunction)

    def __post_init__(self):
        if self.kind not in (ORTHANT, ICECREAM, GRIDFUNCTION):
            raise ValueError(f"unknown cone kind {self.kind!r}")
        if self.dim < 1:
            raise ValueError("cone dimension must be >= 1")
        if self.kind == ICECREAM and self.dim < 2:
            raise ValueError("ice-cream cone needs dimension >= 2")
        if self.kind == GRIDFUNCTION:
            mask = self.mask
            if mask is None:
                mask = np.ones(self.dim, dtype=bool)
            mask = np.asarray(mask, dtype=bool)
            if mask.shape != (self.dim,):
                raise ValueError("active-node mask length must equal dim")
            object.__setattr__(self, "mask", mask)
        elif self.mask is not None:
            raise ValueError("only gridfunction cones carry a mask")

    @property
    def active(self) -> np.ndarray:
        if self.kind == GRIDFUNCTION:
            return self.mask
        return np.ones(self.dim, dtype=bool)

    @property
    def orthant_like(self) -> bool:
        return self.kind in (ORTHANT, GRIDFUNCTION)


def orthant(n: int) -> Cone:
    return Cone(ORTHANT, n)


def icecream(n: int) -> Cone:
    return Cone(ICECREAM, n)


def gridfunction(mask) -> Cone:
    mask = np.asarray(mask, dtype=bool)
    return Cone(GRIDFUNCTION, int(mask.shape[0]), mask)


@dataclass(frozen=True, eq=False)
class ConeWitness:
    """Membership verdict for a point.

    Margin conventions: orthant/gridfunction - smallest active coordinate
    (negated largest inactive magnitude when an inactive coordinate is
    violated); ice-cream - x_n minus the norm of the head coordinates.
    Positive margins mean interior, near-zero boundary, negative outside.
    """

    point: np.ndarray
    location: str
    margin: float


def classify(cone: Cone, x, tol: float = MEMBERSHIP_TOL) -> ConeWitness:
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    if x.shape[0] != cone.dim:
        raise DimensionMismatch(
            f"point has dim {x.shape[0]}, cone has dim {cone.dim}")
    if cone.kind == ICECREAM:
        s = float(x[-1] - np.linalg.norm(x[:-1]))
        if s > tol:
            loc = INTERIOR
        elif abs(s) <= tol and x[-1] >= -tol:
            loc = BOUNDARY
        else:
            loc = OUTSIDE
        return ConeWitness(x.copy(), loc, s)
    active = cone.active
    if not np.all(active):
        off = float(np.max(np.abs(x[~active]))) if np.any(~active) else 0.0
        if off > tol:
            return ConeWitness(x.copy(), OUTSIDE, -off)
    xa = x[active]
    if xa.size == 0:
        return ConeWitness(x.copy(), BOUNDARY, 0.0)
    m = float(np.min(xa))
    if m > tol:
        loc = INTERIOR
    elif m >= -tol:
        loc = BOUNDARY
    else:
        loc = OUTSIDE
    return ConeWitness(x.copy(), loc, m)


# ---------------------------------------------------------------------------
# Phase-1 simplex (Bland's rule) for equality-form feasibility
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class LpResult:
    feasible: bool
    x: np.ndarray | None
    phase1_objective: float
    pivots: int


def lp_feasible(a_eq, b_eq, nonneg_vars, max_pivots: int = LP_MAX_PIVOTS) -> LpResult:
    """Decide feasibility of ``a_eq @ x = b_eq`` with masked variables >= 0.

    Runs a phase-1 simplex with Bland's anti-cycling rule.  Free variables
    (mask False) are split into positive parts internally.  Feasible results
    carry an x with residual below LP_FEAS_TOL and masked entries above
    -LP_NONNEG_TOL; infeasible means the phase-1 optimum exceeds LP_FEAS_TOL.
    """
    a = np.asarray(a_eq, dtype=np.float64)
    b = np.asarray(b_eq, dtype=np.float64).reshape(-1)
    if a.ndim != 2 or a.shape[0] != b.shape[0]:
        raise ValueError("inconsistent LP dimensions")
    m, nvars = a.shape
    mask = np.asarray(nonneg_vars, dtype=bool).reshape(-1)
    if mask.shape[0] != nvars:
        raise ValueError("nonneg mask length must match variable count")

    # split free variables x_j = p_j - q_j
    cols = []
    back = []  # (var index, sign)
    for j in range(nvars):
        cols.append(a[:, j])
        back.append((j, 1.0))
        if not mask[j]:
            cols.append(-a[:, j])
            back.append((j, -1.0))
    amat = np.column_stack(cols) if cols else np.zeros((m, 0))
    nsplit = amat.shape[1]

    rhs = b.copy()
    neg = rhs < 0.0
    amat[neg, :] *= -1.0
    rhs[neg] *= -1.0

    # tableau: [A | I | rhs]; basis starts as the artificial columns
    tab = np.hstack([amat, np.eye(m), rhs.reshape(-1, 1)])
    basis = np.arange(nsplit, nsplit + m)
    # phase-1 reduced costs: structural j -> -sum_i a_ij ; artificials -> 0
    cost = np.zeros(nsplit + m + 1)
    cost[:nsplit] = -np.sum(amat, axis=0)
    cost[-1] = -np.sum(rhs)

    pivots = 0
    while True:
        enter = -1
        for j in range(nsplit + m):
            if cost[j] < -1e-10:
                enter = j
                break
        if enter < 0:
            break
        # ratio test; Bland tie-break on the smallest basic variable index
        best_ratio = np.inf
        leave = -1
        for i in range(m):
            aij = tab[i, enter]
            if aij > 1e-12:
                ratio = tab[i, -1] / aij
                if ratio < best_ratio - 1e-15 or (
                        abs(ratio - best_ratio) <= 1e-15
                        and (leave < 0 or basis[i] < basis[leave])):
                    best_ratio = ratio
                    leave = i
        if leave < 0:
            # phase-1 objective is bounded below; treat as numerical trouble
            raise IterationLimit("phase-1 column with no positive pivot")
        pivots += 1
        if pivots > max_pivots:
            raise IterationLimit(f"simplex exceeded {max_pivots} pivots")
        piv = tab[leave, enter]
        tab[leave, :] /= piv
        for i in range(m):
            if i != leave and tab[i, enter] != 0.0:
                tab[i, :] -= tab[i, enter] * tab[leave, :]
        if cost[enter] != 0.0:
            cost -= cost[enter] * tab[leave, :]
        basis[leave] = enter

    objective = -cost[-1]
    if objective > LP_FEAS_TOL:
        return LpResult(False, None, float(objective), pivots)

    xsplit = np.zeros(nsplit)
    for i in range(m):
        if basis[i] < nsplit:
            xsplit[basis[i]] = tab[i, -1]
    x = np.zeros(nvars)
    for value, (j, sign) in zip(xsplit, back):
        x[j] += sign * value
    resid = float(np.max(np.abs(a @ x - b))) if m else 0.0
    if resid > LP_FEAS_TOL * max(1.0, float(np.max(np.abs(b))) if m else 1.0):
        raise IterationLimit(f"simplex verification residual {resid:.2e}")
    return LpResult(True, x, float(objective), pivots)


# ---------------------------------------------------------------------------
# Subspace-vs-cone certification
# ---------------------------------------------------------------------------

def _icecream_margin(x: np.ndarray) -> float:
    return float(x[-1] - np.linalg.norm(x[:-1]))


def _icecream_search(cone: Cone, v: Subspace, refine: int = 60):
    """Maximize the cone margin over unit vectors of v (dim <= 3).

    Dense angular grid plus local golden-section/coordinate refinement.
    Returns (best margin, argmax vector).
    """
    d = v.dim
    b = v.basis
    if d > 3:
        raise UnsupportedCone(
            "ice-cream subspace search supports dim <= 3 only")
    if d == 1:
        cands = [b[:, 0], -b[:, 0]]
        margins = [_icecream_margin(c) for c in cands]
        i = int(np.argmax(margins))
        return margins[i], cands[i]
    if d == 2:
        def point(phi):
            return np.cos(phi) * b[:, 0] + np.sin(phi) * b[:, 1]

        grid = np.linspace(0.0, 2.0 * np.pi, 721)[:-1]
        vals = np.array([_icecream_margin(point(p)) for p in grid])
        j = int(np.argmax(vals))
        lo = grid[j] - 2.0 * np.pi / 720.0
        hi = grid[j] + 2.0 * np.pi / 720.0
        gr = (np.sqrt(5.0) - 1.0) / 2.0
        x1 = hi - gr * (hi - lo)
        x2 = lo + gr * (hi - lo)
        f1 = _icecream_margin(point(x1))
        f2 = _icecream_margin(point(x2))
        for _ in range(refine):
            if f1 < f2:
                lo, x1, f1 = x1, x2, f2
                x2 = lo + gr * (hi - lo)
                f2 = _icecream_margin(point(x2))
            else:
                hi, x2, f2 = x2, x1, f1
                x1 = hi - gr * (hi - lo)
                f1 = _icecream_margin(point(x1))
        phi = 0.5 * (lo + hi)
        best = point(phi)
        return _icecream_margin(best), best
    # d == 3: Fibonacci sphere then shrinking coordinate refinement
    count = 4000
    k = np.arange(count)
    ga = np.pi * (3.0 - np.sqrt(5.0))
    zs = 1.0 - 2.0 * (k + 0.5) / count
    rr = np.sqrt(np.maximum(0.0, 1.0 - zs * zs))
    pts = np.column_stack([rr * np.cos(ga * k), rr * np.sin(ga * k), zs])
    vals = np.array([_icecream_margin(b @ p) for p in pts])
    j = int(np.argmax(vals))
    c = pts[j]
    step = 2.0 / np.sqrt(count)
    best_val = vals[j]
    for _ in range(refine):
        improved = False
        for axis in range(3):
            for sign in (-1.0, 1.0):
                cand = c.copy()
                cand[axis] += sign * step
                cn = np.linalg.norm(cand)
                if cn == 0.0:
                    continue
                cand /= cn
                val = _icecream_margin(b @ cand)
                if val > best_val:
                    best_val, c = val, cand
                    improved = True
        if not improved:
            step *= 0.5
    best = b @ c
    return best_val, best


def _one_dim_sign_test(xa: np.ndarray, strict: bool):
    """Orthant fast path for a line: one-signed iff it meets the cone."""
    scale = float(np.max(np.abs(xa))) if xa.size else 0.0
    if scale == 0.0:
        return None
    if strict:
        if float(np.min(xa)) > 0.0:
            return 1.0
        if float(np.max(xa)) < 0.0:
            return -1.0
        return None
    tiny = 1e-12 * scale
    if float(np.min(xa)) >= -tiny:
        return 1.0
    if float(np.max(xa)) <= tiny:
        return -1.0
    return None


def _orthant_lp(cone: Cone, v: Subspace, strict: bool):
    """LP certificate: find c with (basis c) >= 0 (or >= 1) on active coords."""
    active = cone.active
    b = v.basis
    d = v.dim
    n_active = int(np.sum(active))
    rows = []
    rhs = []
    # active rows: (Bc)_i - s_i = target
    target = 1.0 if strict else 0.0
    act_idx = np.where(active)[0]
    inact_idx = np.where(~active)[0]
    nslack = n_active
    for r, i in enumerate(act_idx):
        row = np.zeros(d + nslack)
        row[:d] = b[i, :]
        row[d + r] = -1.0
        rows.append(row)
        rhs.append(target)
    for i in inact_idx:
        row = np.zeros(d + nslack)
        row[:d] = b[i, :]
        rows.append(row)
        rhs.append(0.0)
    if not strict:
        # normalization: sum over active of (Bc) = 1
        row = np.zeros(d + nslack)
        row[:d] = np.sum(b[act_idx, :], axis=0)
        rows.append(row)
        rhs.append(1.0)
    a_eq = np.vstack(rows)
    mask = np.zeros(d + nslack, dtype=bool)
    mask[d:] = True  # slacks nonnegative, coefficients free
    res = lp_feasible(a_eq, np.array(rhs), mask)
    if not res.feasible:
        return None
    x = b @ res.x[:d]
    nx = np.linalg.norm(x)
    if nx == 0.0:
        return None
    return x / nx


def subspace_meets_cone(cone: Cone, v: Subspace, tol: float = WITNESS_TOL,
                        method: str = "auto"):
    """Return a normalized witness of V meeting K away from 0, or None.

    Orthant-type cones use an LP certificate (with an exact sign test on
    lines when method="auto"); ice-cream cones use the angular grid search.
    """
    if v.ambient_dim != cone.dim:
        raise DimensionMismatch("subspace and cone dimensions differ")
    if v.dim == 0:
        return None
    if cone.orthant_like:
        active = cone.active
        if method == "auto" and v.dim == 1:
            x = v.basis[:, 0]
            if np.any(~active):
                off = float(np.max(np.abs(x[~active])))
                scale = float(np.max(np.abs(x)))
                if off > 1e-12 * max(scale, 1e-300):
                    return None
            sgn = _one_dim_sign_test(x[active], strict=False)
            if sgn is None:
                return None
            w = sgn * x
            return w / np.linalg.norm(w)
        return _orthant_lp(cone, v, strict=False)
    margin, best = _icecream_search(cone, v)
    if margin >= tol:
        return best / np.linalg.norm(best)
    return None


def subspace_meets_interior(cone: Cone, v: Subspace, tol: float = WITNESS_TOL,
                            method: str = "auto"):
    """Return a normalized witness of V meeting the interior of K, or None."""
    if v.ambient_dim != cone.dim:
        raise DimensionMismatch("subspace and cone dimensions differ")
    if v.dim == 0:
        return None
    if cone.orthant_like:
        active = cone.active
        if method == "auto" and v.dim == 1:
            x = v.basis[:, 0]
            if np.any(~active):
                off = float(np.max(np.abs(x[~active])))
                scale = float(np.max(np.abs(x)))
                if off > 1e-12 * max(scale, 1e-300):
                    return None
            sgn = _one_dim_sign_test(x[active], strict=True)
            if sgn is None:
                return None
            w = sgn * x
            return w / np.linalg.norm(w)
        return _orthant_lp(cone, v, strict=True)
    margin, best = _icecream_search(cone, v)
    if margin > tol:
        return best / np.linalg.norm(best)
    return None


def sample_cone_points(cone: Cone, rng: np.random.Generator, count: int,
                       mode: str = "mixed") -> np.ndarray:
    """Seeded sample of cone points, one per row.

    ``mode`` is "boundary", "interior", or "mixed" (boundary-biased).
    """
    n = cone.dim
    out = np.empty((count, n))
    for i in range(count):
        on_boundary = (mode == "boundary") or (mode == "mixed" and rng.random() < 0.6)
        scale = float(np.exp(rng.uniform(-1.0, 1.0)))
        if cone.kind == ICECREAM:
            head = rng.standard_normal(n - 1)
            hn = np.linalg.norm(head)
            if hn == 0.0:
                head[0] = 1.0
                hn = 1.0
            head = head / hn * scale
            z = scale if on_boundary else scale / rng.uniform(0.05, 0.95)
            out[i, :n - 1] = head
            out[i, -1] = z
        else:
            active = cone.active
            x = np.zeros(n)
            na = int(np.sum(active))
            xa = (np.abs(rng.standard_normal(na)) + 0.05) * scale
            if on_boundary and na > 1:
                # keep at least one strictly positive coordinate
                nzero = int(rng.integers(1, na))
                idx = rng.choice(na, size=nzero, replace=False)
                xa[idx] = 0.0
            x[active] = xa
            out[i] = x
    return out
