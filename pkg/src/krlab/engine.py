"""Positivity/irreducibility checks, hypothesis suites, and verification
reports for the bounded and the sectorial principal-eigenvalue theorems.

Every report is deterministic given (inputs, seed): sampling flows from a
seeded generator recorded in the report, and checks are assembled in a fixed
order.  A Fail on a conclusion whose hypotheses all passed is annotated
"investigate tolerances" rather than presented as a refutation.
"""

from __future__ import annotations

import numpy as np

from . import cones as cn
from . import matrix as mx
from . import spectral as sp
from .checks import FAIL, NOT_APPLICABLE, PASS, KrCheck, KrReport, sign_fix
from .cones import Cone
from .errors import (NoConvergence, SingularMatrix, SingularResolvent,
                     UnsupportedCone)
from .spectral import OperatorModel

POSITIVE = "positive"
STRONGLY_POSITIVE = "strongly_positive"
WEAKLY_IRREDUCIBLE = "weakly_irreducible"

ENTRY_TOL = 1e-12      # exact entrywise positivity threshold
GAP_TOL = 1e-10        # strict spectral gap margin |mu| < r - GAP_TOL
SIMPLE_TOL = 1e-8      # kernel tolerance for geometric multiplicities
A5_SAMPLES = 64        # sampled points of each nontrivial cone slice


def _entrywise_nonneg(m: np.ndarray, active: np.ndarray):
    """Exact positivity test on the active block; inactive coupling must
    vanish for the cone (inactive coordinates pinned at 0) to be invariant."""
    sub = m[np.ix_(active, active)]
    off = m[np.ix_(~active, active)]
    viol = None
    if sub.size and float(np.min(sub)) < -ENTRY_TOL:
        i, j = np.unravel_index(int(np.argmin(sub)), sub.shape)
        viol = ("entry", int(i), int(j), float(sub[i, j]))
    elif off.size and float(np.max(np.abs(off))) > ENTRY_TOL:
        i, j = np.unravel_index(int(np.argmax(np.abs(off))), off.shape)
        viol = ("inactive-coupling", int(i), int(j), float(off[i, j]))
    return viol


def _entrywise_strict(m: np.ndarray, active: np.ndarray):
    sub = m[np.ix_(active, active)]
    if sub.size and float(np.min(sub)) <= ENTRY_TOL:
        i, j = np.unravel_index(int(np.argmin(sub)), sub.shape)
        return ("entry", int(i), int(j), float(sub[i, j]))
    return _entrywise_nonneg(m, active)


def _sampled_positive(m: np.ndarray, cone: Cone, rng, samples: int,
                      strict: bool, tol: float = cn.MEMBERSHIP_TOL):
    """Sampled positivity: cone points must map into K; for the strict test,
    nonzero boundary points must map into the interior."""
    mode = "boundary" if strict else "mixed"
    pts = cn.sample_cone_points(cone, rng, samples, mode=mode)
    for x in pts:
        y = m @ x
        loc = cn.classify(cone, y, tol).location
        if strict:
            if loc != cn.INTERIOR:
                return x
        elif loc == cn.OUTSIDE:
            return x
    return None


def check_positivity(op: OperatorModel, cone: Cone, mode: str,
                     samples: int = 256, seed: int = 0) -> KrCheck:
    """Positivity / strong positivity / weak irreducibility of A on K.

    Orthant-type cones are decided exactly from the matrix entries; the
    ice-cream cone is sampled (seeded, boundary-biased).  Weak irreducibility
    certifies that the boundary of K carries no eigenvectors for nonnegative
    real eigenvalues.
    """
    if op.dim != cone.dim:
        raise ValueError("operator and cone dimensions differ")
    rng = np.random.default_rng(seed)
    a = op.a
    name = f"positivity[{mode}]"
    tols = {"entry_tol": ENTRY_TOL, "membership_tol": cn.MEMBERSHIP_TOL}

    if mode == POSITIVE:
        if cone.orthant_like:
            viol = _entrywise_nonneg(a, cone.active)
            if viol is None:
                return KrCheck(name, PASS, "all entries >= -entry_tol",
                               tolerances=tols)
            return KrCheck(name, FAIL, f"violating {viol[0]} at "
                           f"({viol[1]},{viol[2]}) = {viol[3]:.3e}",
                           witness=np.array(viol[1:3], dtype=float),
                           tolerances=tols, data={"value": viol[3]})
        bad = _sampled_positive(a, cone, rng, samples, strict=False)
        if bad is None:
            return KrCheck(name, PASS, f"{samples} sampled cone points map into K",
                           tolerances=tols, data={"samples": samples})
        return KrCheck(name, FAIL, "sampled cone point leaves K",
                       witness=bad, tolerances=tols)

    if mode == STRONGLY_POSITIVE:
        if cone.orthant_like:
            viol = _entrywise_strict(a, cone.active)
            if viol is None:
                return KrCheck(name, PASS, "all entries > entry_tol",
                               tolerances=tols)
            return KrCheck(name, FAIL, f"non-positive {viol[0]} at "
                           f"({viol[1]},{viol[2]}) = {viol[3]:.3e}",
                           witness=np.array(viol[1:3], dtype=float),
                           tolerances=tols, data={"value": viol[3]})
        bad = _sampled_positive(a, cone, rng, samples, strict=True)
        if bad is None:
            return KrCheck(name, PASS,
                           f"{samples} boundary points map into the interior",
                           tolerances=tols, data={"samples": samples})
        return KrCheck(name, FAIL, "boundary point not mapped to the interior",
                       witness=bad, tolerances=tols)

    if mode == WEAKLY_IRREDUCIBLE:
        spec = op.spectrum()
        tol = spec.cluster_tol
        targets = [e for e in spec.entries if e[1] == 0.0 and e[0] >= -tol]
        for re, _, _ in targets:
            space = sp.eigenspace(op, complex(re, 0.0), SIMPLE_TOL)
            if space.dim == 0:
                continue
            w = _boundary_eigenvector(cone, space)
            if w is not None:
                return KrCheck(
                    name, FAIL,
                    f"eigenvector on the cone boundary at eigenvalue {re:.6g}",
                    witness=w, tolerances=tols, data={"eigenvalue": re})
        return KrCheck(name, PASS,
                       "no boundary eigenvectors for nonnegative real "
                       "eigenvalues", tolerances=tols,
                       data={"eigenvalues_checked": [e[0] for e in targets]})

    raise ValueError(f"unknown positivity mode {mode!r}")


def _boundary_eigenvector(cone: Cone, space):
    """A unit vector of `space` lying on the cone boundary away from 0."""
    if cone.orthant_like:
        active = cone.active
        act_idx = np.where(active)[0]
        b = space.basis
        d = space.dim
        for i in act_idx:
            # x in space, x >= 0 on active, inactive pinned, sum = 1, x_i = 0
            rows, rhs = [], []
            nslack = act_idx.size
            for r, j in enumerate(act_idx):
                row = np.zeros(d + nslack)
                row[:d] = b[j, :]
                row[d + r] = -1.0
                rows.append(row)
                rhs.append(0.0)
            for j in np.where(~active)[0]:
                row = np.zeros(d + nslack)
                row[:d] = b[j, :]
                rows.append(row)
                rhs.append(0.0)
            row = np.zeros(d + nslack)
            row[:d] = np.sum(b[act_idx, :], axis=0)
            rows.append(row)
            rhs.append(1.0)
            row = np.zeros(d + nslack)
            row[:d] = b[i, :]
            rows.append(row)
            rhs.append(0.0)
            mask = np.zeros(d + nslack, dtype=bool)
            mask[d:] = True
            res = cn.lp_feasible(np.vstack(rows), np.array(rhs), mask)
            if res.feasible:
                x = b @ res.x[:d]
                nx = np.linalg.norm(x)
                if nx > 0.0:
                    return x / nx
        return None
    if space.dim > 3:
        raise UnsupportedCone(
            "weak irreducibility on the ice-cream cone needs eigenspace "
            "dimension <= 3")
    # boundary hit: margin ~ 0 with nonnegative axis coordinate
    best_margin, best = cn._icecream_search(cone, space)
    if best_margin < -cn.MEMBERSHIP_TOL:
        return None  # eigenspace misses the cone entirely
    if abs(best_margin) <= cn.MEMBERSHIP_TOL:
        return best / np.linalg.norm(best)
    # the eigenspace reaches the interior; scan for a boundary crossing
    # along the great circle through the best point (dim >= 2 only)
    if space.dim == 1:
        return None
    b = space.basis
    c = b.T @ best
    c /= np.linalg.norm(c)
    u = np.zeros_like(c)
    u[0] = 1.0
    if abs(c[0]) > 0.9:
        u[:] = 0.0
        u[1] = 1.0
    u -= (u @ c) * c
    u /= np.linalg.norm(u)
    lo, hi = 0.0, np.pi
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        x = b @ (np.cos(mid) * c + np.sin(mid) * u)
        m = cn._icecream_margin(x)
        if m > 0.0:
            lo = mid
        else:
            hi = mid
    x = b @ (np.cos(lo) * c + np.sin(lo) * u)
    w = cn.classify(cone, x)
    if w.location == cn.BOUNDARY:
        return x / np.linalg.norm(x)
    return None


# ---------------------------------------------------------------------------
# Hypothesis suite (A1)-(A5)
# ---------------------------------------------------------------------------

def default_lambda_samples(op: OperatorModel) -> list[float]:
    """Resolvent sample points above the spectral bound.

    No constructive threshold exists for "large enough", so the suite samples
    spb + {1, 10, 100}; callers may override."""
    spb = sp.bounds(op).spb
    return [spb + 1.0, spb + 10.0, spb + 100.0]


def _rank_of(chain_op, g, mult, tol=1e-10):
    """Smallest k with (A - mu)^k g = 0, capped at the multiplicity."""
    bnorm = float(np.linalg.norm(chain_op))
    scale = float(np.linalg.norm(g))
    cur = g
    for k in range(1, mult + 1):
        prev = max(float(np.linalg.norm(cur)), 1e-300)
        cur = chain_op @ cur
        if np.linalg.norm(cur) <= tol * max(bnorm * prev, scale):
            return k
    return mult


def ge_semiflow(op: OperatorModel, ge: sp.GenEigenspace, g: np.ndarray,
                t: float) -> np.ndarray:
    """Evolve g in GE_mu under the semigroup via the finite nilpotent series
    e^{mu t} sum_{j<k} t^j/j! (A - mu)^j, truncated at k = rank(g).

    For complex mu the real point is lifted to xi with g = 2 Re(xi) in the
    complex generalized eigenspace, evolved there, and projected back.
    """
    mu = ge.mu
    n = op.dim
    if abs(mu.imag) == 0.0:
        b = op.a - mu.real * np.eye(n)
        k = _rank_of(b, g, ge.alg_mult)
        acc = np.zeros_like(g)
        term = g.astype(np.float64)
        fact = 1.0
        for j in range(k):
            if j > 0:
                term = b @ term
                fact *= j
            acc = acc + (t ** j / fact) * term
        return float(np.exp(mu.real * t)) * acc
    w = ge.complex_basis
    m = w.shape[1]
    lift = np.hstack([2.0 * w.real, -2.0 * w.imag])
    coef, *_ = np.linalg.lstsq(lift, g, rcond=None)
    z = coef[:m] + 1j * coef[m:]
    xi = w @ z
    b = op.a.astype(np.complex128) - mu * np.eye(n, dtype=np.complex128)
    k = _rank_of(b, xi, ge.alg_mult)
    acc = np.zeros(n, dtype=np.complex128)
    term = xi
    fact = 1.0
    for j in range(k):
        if j > 0:
            term = b @ term
            fact *= j
        acc = acc + (t ** j / fact) * term
    return 2.0 * np.real(np.exp(mu * t) * acc)


def _sample_cone_slice(cone: Cone, space, witness: np.ndarray, rng,
                       count: int) -> list[np.ndarray]:
    """Seeded unit points of (space intersect K) \\ {0}, witness included."""
    pts = [witness / np.linalg.norm(witness)]
    b = space.basis
    d = space.dim
    attempts = 0
    while len(pts) < count and attempts < 50 * count:
        attempts += 1
        c = rng.standard_normal(d)
        x = b @ c
        nx = np.linalg.norm(x)
        if nx == 0.0:
            continue
        x /= nx
        if cn.classify(cone, x).location != cn.OUTSIDE:
            pts.append(x)
    return pts


def check_hypotheses(op: OperatorModel, cone: Cone,
                     lambda_samples=None, t_samples=(0.1, 1.0),
                     seed: int = 0, samples: int = 256) -> list[KrCheck]:
    """The five standing hypotheses, each as one deterministic check.

    A2 and A3 are automatic at finite dimension (empty essential spectrum,
    every generalized eigenspace already lives in the ambient space); they
    are reported as such rather than computed.
    """
    if lambda_samples is None:
        lambda_samples = default_lambda_samples(op)
    rng = np.random.default_rng(seed)
    spb = sp.bounds(op).spb
    for lam in lambda_samples:
        if lam <= spb:
            raise ValueError("lambda samples must exceed the spectral bound")
    checks: list[KrCheck] = []
    tols = {"entry_tol": ENTRY_TOL, "membership_tol": cn.MEMBERSHIP_TOL}

    # A1: resolvent positivity at each sampled lambda
    fail = None
    for lam in lambda_samples:
        r = sp.resolvent(op, lam)
        if cone.orthant_like:
            viol = _entrywise_nonneg(r, cone.active)
            if viol is not None:
                fail = (lam, f"resolvent entry {viol[3]:.3e} at "
                        f"({viol[1]},{viol[2]})", None)
                break
        else:
            bad = _sampled_positive(r, cone, rng, samples, strict=False)
            if bad is not None:
                fail = (lam, "sampled cone point leaves K under the resolvent",
                        bad)
                break
    if fail is None:
        checks.append(KrCheck("A1", PASS,
                              f"resolvent positive at lambda in "
                              f"{[round(l, 6) for l in lambda_samples]}",
                              tolerances=tols,
                              data={"lambda_samples": list(lambda_samples)}))
    else:
        checks.append(KrCheck("A1", FAIL,
                              f"resolvent not positive at lambda={fail[0]}: "
                              f"{fail[1]}", witness=fail[2], tolerances=tols,
                              data={"lambda": fail[0]}))

    checks.append(KrCheck(
        "A2", PASS,
        "empty essential spectrum at finite dimension: spb_e = -inf < spb "
        f"= {spb:.6g} by convention", data={"spb": spb, "r_e": op.r_e}))
    checks.append(KrCheck(
        "A3", PASS,
        "generalized eigenspaces lie in the ambient space at finite "
        "dimension; nothing to verify"))

    # A4: strong resolvent positivity at each sampled lambda
    fail = None
    for lam in lambda_samples:
        r = sp.resolvent(op, lam)
        if cone.orthant_like:
            viol = _entrywise_strict(r, cone.active)
            if viol is not None:
                wv = np.zeros(op.dim)
                wv[viol[2] if viol[0] == "entry" else 0] = 1.0
                fail = (lam, f"resolvent {viol[0]} {viol[3]:.3e} at "
                        f"({viol[1]},{viol[2]})", wv)
                break
        else:
            bad = _sampled_positive(r, cone, rng, samples, strict=True)
            if bad is not None:
                fail = (lam, "boundary point not mapped into the interior",
                        bad)
                break
    if fail is None:
        checks.append(KrCheck("A4", PASS,
                              "resolvent strongly positive at all sampled "
                              "lambda", tolerances=tols,
                              data={"lambda_samples": list(lambda_samples)}))
    else:
        checks.append(KrCheck("A4", FAIL,
                              f"strong positivity fails at lambda={fail[0]}: "
                              f"{fail[1]}", witness=fail[2], tolerances=tols,
                              data={"lambda": fail[0]}))

    # A5: semigroup pushes each nontrivial cone slice of GE_mu into int K
    spec = op.spectrum()
    vacuous, checked = [], []
    fail = None
    for re, im, _ in spec.entries:
        if im < 0.0:
            continue
        mu = complex(re, im)
        ge = sp.gen_eigenspace(op, mu)
        w = cn.subspace_meets_cone(cone, ge.real_space)
        if w is None:
            vacuous.append([re, im])
            continue
        checked.append([re, im])
        pts = _sample_cone_slice(cone, ge.real_space, w, rng, A5_SAMPLES)
        for g in pts:
            for t in t_samples:
                u = ge_semiflow(op, ge, g, float(t))
                if t > 0 and cn.classify(cone, u).location != cn.INTERIOR:
                    fail = (mu, t, g, u)
                    break
            if fail:
                break
        if fail:
            break
    if fail is None:
        detail = (f"checked {len(checked)} nontrivial slice(s); "
                  f"{len(vacuous)} vacuous (GE meets K only at 0)")
        checks.append(KrCheck("A5", PASS, detail, tolerances=tols,
                              data={"vacuous": vacuous, "checked": checked,
                                    "t_samples": list(t_samples),
                                    "slice_samples": A5_SAMPLES}))
    else:
        mu, t, g, u = fail
        checks.append(KrCheck(
            "A5", FAIL,
            f"semigroup image of a cone point of GE_mu at mu={mu:.6g}, "
            f"t={t} is not interior", witness=u, tolerances=tols,
            data={"mu": [mu.real, mu.imag], "t": t, "start": list(map(float, g)),
                  "vacuous": vacuous, "checked": checked}))
    return checks


# ---------------------------------------------------------------------------
# Theorem reports
# ---------------------------------------------------------------------------

def _principal_payload(value: float, vec: np.ndarray, alg: int, geo: int):
    return {"value": float(value), "eigenvector": sign_fix(vec),
            "alg_mult": int(alg), "geo_mult": int(geo)}


def kr_bounded_report(op: OperatorModel, cone: Cone, seed: int = 0,
                      samples: int = 256) -> KrReport:
    """Verification report for the bounded positive-operator theorems
    (theorem ids 2.1/2.2): principal eigenvalue at the spectral radius,
    multiplicity structure, and cone-exclusion of the other eigenspaces.

    Hypothesis checks (positivity, weak irreducibility, strong positivity)
    are embedded; conclusions whose hypotheses fail are NotApplicable.
    """
    checks: list[KrCheck] = []
    bnd = sp.bounds(op)
    spec = op.spectrum()
    tol = spec.cluster_tol
    r = bnd.r

    pos = check_positivity(op, cone, POSITIVE, samples=samples, seed=seed)
    checks.append(pos)
    principal = None

    if r <= tol:
        checks.append(KrCheck("radius-positive", NOT_APPLICABLE,
                              f"spectral radius {r:.3e} is not above the "
                              "cluster tolerance; r_e < r fails"))
        return KrReport("2.1/2.2", checks, seed, bounds=_bounds_dict(bnd))
    checks.append(KrCheck("radius-positive", PASS,
                          f"r = {r:.9g} > 0; r_e = {op.r_e} by convention"))

    hyp_ok = pos.passed

    # (1) r is an eigenvalue whose eigenspace meets K
    real_at_r = [e for e in spec.entries
                 if e[1] == 0.0 and abs(abs(e[0]) - r) <= tol and e[0] > 0.0]
    witness = None
    if real_at_r:
        mu_r = real_at_r[0][0]
        espace = sp.eigenspace(op, complex(mu_r, 0.0), SIMPLE_TOL)
        witness = cn.subspace_meets_cone(cone, espace)
    if not hyp_ok:
        checks.append(KrCheck("principal-in-cone", NOT_APPLICABLE,
                              "operator is not positive on K"))
    elif witness is not None:
        alg = real_at_r[0][2]
        geo = sp.geometric_multiplicity(op, complex(mu_r, 0.0), SIMPLE_TOL)
        principal = _principal_payload(mu_r, witness, alg, geo)
        checks.append(KrCheck("principal-in-cone", PASS,
                              f"r = {mu_r:.9g} is an eigenvalue with a cone "
                              "eigenvector", witness=sign_fix(witness),
                              tolerances={"cluster_tol": tol}))
    else:
        checks.append(KrCheck("principal-in-cone", FAIL,
                              "no real eigenvalue at |mu| = r with an "
                              "eigenvector in K"
                              + ("" if not pos.passed else
                                 " (hypotheses passed: investigate tolerances)"),
                              tolerances={"cluster_tol": tol},
                              data={"r": r}))

    # (2) interior principal eigenvector forces alg = geo
    if principal is not None and hyp_ok:
        loc = cn.classify(cone, principal["eigenvector"]).location
        if loc == cn.INTERIOR:
            ok = principal["alg_mult"] == principal["geo_mult"]
            checks.append(KrCheck(
                "interior-implies-semisimple", PASS if ok else FAIL,
                f"principal eigenvector interior; alg={principal['alg_mult']}"
                f" geo={principal['geo_mult']}"
                + ("" if ok else " (hypotheses passed: investigate tolerances)"),
                data={"alg_mult": principal["alg_mult"],
                      "geo_mult": principal["geo_mult"]}))
        else:
            checks.append(KrCheck("interior-implies-semisimple", NOT_APPLICABLE,
                                  f"principal eigenvector is {loc}, not "
                                  "interior"))
    else:
        checks.append(KrCheck("interior-implies-semisimple", NOT_APPLICABLE,
                              "no principal eigenpair available"))

    # (3) complex eigenvalues with |mu| > r_e: GE meets K only at 0
    # (4) eigenvectors of mu != r with |mu| > r_e avoid the interior
    if hyp_ok:
        bad3 = bad4 = None
        for re, im, _ in spec.entries:
            mu = complex(re, im)
            if im < 0.0 or abs(mu) <= op.r_e:
                continue
            if im > 0.0:
                ge = sp.gen_eigenspace(op, mu)
                w = cn.subspace_meets_cone(cone, ge.real_space)
                if w is not None and bad3 is None:
                    bad3 = (mu, w)
            if principal is not None and abs(mu - principal["value"]) <= tol:
                continue
            espace = sp.eigenspace_fast(op, mu, SIMPLE_TOL)
            w = cn.subspace_meets_interior(cone, espace)
            if w is not None and bad4 is None:
                bad4 = (mu, w)
        if bad3 is None:
            checks.append(KrCheck("complex-ge-trivial", PASS,
                                  "GE of every complex eigenvalue meets K "
                                  "only at 0"))
        else:
            checks.append(KrCheck("complex-ge-trivial", FAIL,
                                  f"GE at mu={bad3[0]:.6g} meets K "
                                  "(hypotheses passed: investigate tolerances)",
                                  witness=bad3[1],
                                  data={"mu": [bad3[0].real, bad3[0].imag]}))
        if bad4 is None:
            checks.append(KrCheck("non-principal-noninterior", PASS,
                                  "no non-principal eigenvector reaches the "
                                  "interior of K"))
        else:
            checks.append(KrCheck("non-principal-noninterior", FAIL,
                                  f"eigenvector at mu={bad4[0]:.6g} lies in "
                                  "the interior "
                                  "(hypotheses passed: investigate tolerances)",
                                  witness=bad4[1],
                                  data={"mu": [bad4[0].real, bad4[0].imag]}))
    else:
        checks.append(KrCheck("complex-ge-trivial", NOT_APPLICABLE,
                              "operator is not positive on K"))
        checks.append(KrCheck("non-principal-noninterior", NOT_APPLICABLE,
                              "operator is not positive on K"))

    # weak irreducibility extras: r simple with an interior eigenvector
    wi = check_positivity(op, cone, WEAKLY_IRREDUCIBLE, samples=samples,
                          seed=seed)
    checks.append(wi)
    if wi.passed and hyp_ok and principal is not None:
        ok = principal["alg_mult"] == 1
        checks.append(KrCheck("principal-simple", PASS if ok else FAIL,
                              f"alg_mult = {principal['alg_mult']}"
                              + ("" if ok else
                                 " (hypotheses passed: investigate tolerances)"),
                              data={"alg_mult": principal["alg_mult"]}))
        loc = cn.classify(cone, principal["eigenvector"]).location
        checks.append(KrCheck("principal-interior",
                              PASS if loc == cn.INTERIOR else FAIL,
                              f"principal eigenvector classifies {loc}",
                              witness=principal["eigenvector"]))
    else:
        reason = ("weak irreducibility fails" if not wi.passed
                  else "no principal eigenpair")
        checks.append(KrCheck("principal-simple", NOT_APPLICABLE, reason))
        checks.append(KrCheck("principal-interior", NOT_APPLICABLE, reason))

    # strong positivity extra: strict spectral gap
    sp_check = check_positivity(op, cone, STRONGLY_POSITIVE, samples=samples,
                                seed=seed)
    checks.append(sp_check)
    if sp_check.passed and hyp_ok and principal is not None:
        worst = None
        for re, im, _ in spec.entries:
            mu = complex(re, im)
            if abs(mu - principal["value"]) <= tol and im == 0.0:
                continue
            if worst is None or abs(mu) > worst:
                worst = abs(mu)
        ok = worst is None or worst < r - GAP_TOL
        checks.append(KrCheck(
            "strict-spectral-gap", PASS if ok else FAIL,
            f"max non-principal |mu| = {worst if worst is not None else 0:.9g}"
            f" vs r - gap_tol = {r - GAP_TOL:.9g}"
            + ("" if ok else " (hypotheses passed: investigate tolerances)"),
            tolerances={"gap_tol": GAP_TOL},
            data={"max_other_modulus": worst, "r": r}))
    else:
        checks.append(KrCheck("strict-spectral-gap", NOT_APPLICABLE,
                              "strong positivity fails or no principal "
                              "eigenpair"))

    return KrReport("2.1/2.2", checks, seed, principal=principal,
                    bounds=_bounds_dict(bnd))


def _bounds_dict(bnd: sp.SpectralBounds) -> dict:
    return {"spb": bnd.spb, "r": bnd.r, "r_e": bnd.r_e,
            "sigma_b": [list(e) for e in bnd.sigma_b]}


def kr_sectorial_report(op: OperatorModel, cone: Cone, lambda_samples=None,
                        t_samples=(0.1, 1.0), seed: int = 0,
                        samples: int = 256) -> KrReport:
    """Verification report for the sectorial-operator theorems (ids
    3.1/3.2/3.3): principal eigenvalue at the spectral bound, eigenspace
    exclusions, simplicity under strong resolvent positivity, and the
    boundary-spectrum singleton under the semigroup interior-mapping
    hypothesis.

    The (A1)-(A5) checks run first and gate the conclusion checks: the 3.2
    block requires A4, the 3.3 block requires A5.  Sectoriality itself is
    automatic for matrices and recorded as a vacuous pass.
    """
    checks: list[KrCheck] = [KrCheck(
        "sectorial", PASS,
        "every matrix generates an analytic semigroup; recorded, not "
        "computed")]
    hyp = check_hypotheses(op, cone, lambda_samples=lambda_samples,
                           t_samples=t_samples, seed=seed, samples=samples)
    checks.extend(hyp)
    a1 = next(c for c in hyp if c.name == "A1")
    a4 = next(c for c in hyp if c.name == "A4")
    a5 = next(c for c in hyp if c.name == "A5")

    bnd = sp.bounds(op)
    spec = op.spectrum()
    tol = spec.cluster_tol
    s = bnd.spb
    principal = None

    if not a1.passed:
        for name in ("principal-at-spb", "interior-implies-semisimple",
                     "non-principal-noninterior", "complex-ge-trivial",
                     "principal-simple", "principal-interior",
                     "ge-trivial-all", "boundary-spectrum-singleton"):
            checks.append(KrCheck(name, NOT_APPLICABLE, "A1 failed"))
        return KrReport("3.1/3.2/3.3", checks, seed,
                        bounds=_bounds_dict(bnd))

    # 3.1(1): the spectral bound is an eigenvalue with a cone eigenvector
    real_at_s = [e for e in spec.entries
                 if e[1] == 0.0 and abs(e[0] - s) <= tol]
    witness = None
    if real_at_s:
        espace = sp.eigenspace(op, complex(real_at_s[0][0], 0.0), SIMPLE_TOL)
        witness = cn.subspace_meets_cone(cone, espace)
    if witness is not None:
        alg = real_at_s[0][2]
        geo = sp.geometric_multiplicity(op, complex(real_at_s[0][0], 0.0),
                                        SIMPLE_TOL)
        principal = _principal_payload(real_at_s[0][0], witness, alg, geo)
        checks.append(KrCheck("principal-at-spb", PASS,
                              f"s = {real_at_s[0][0]:.9g} admits a cone "
                              "eigenvector", witness=sign_fix(witness),
                              tolerances={"cluster_tol": tol}))
    else:
        checks.append(KrCheck("principal-at-spb", FAIL,
                              "no real eigenvalue at the spectral bound with "
                              "a cone eigenvector "
                              "(hypotheses passed: investigate tolerances)",
                              tolerances={"cluster_tol": tol},
                              data={"spb": s}))

    # 3.1(2)
    if principal is not None:
        loc = cn.classify(cone, principal["eigenvector"]).location
        if loc == cn.INTERIOR:
            ok = principal["alg_mult"] == principal["geo_mult"]
            checks.append(KrCheck(
                "interior-implies-semisimple", PASS if ok else FAIL,
                f"alg={principal['alg_mult']} geo={principal['geo_mult']}"
                + ("" if ok else " (hypotheses passed: investigate tolerances)"),
                data={"alg_mult": principal["alg_mult"],
                      "geo_mult": principal["geo_mult"]}))
        else:
            checks.append(KrCheck("interior-implies-semisimple",
                                  NOT_APPLICABLE,
                                  f"principal eigenvector is {loc}"))
    else:
        checks.append(KrCheck("interior-implies-semisimple", NOT_APPLICABLE,
                              "no principal eigenpair"))

    # 3.1(3): non-principal eigenvectors avoid the interior
    # 3.1(4): complex GEs meet K only at 0
    bad3 = bad4 = None
    for re, im, _ in spec.entries:
        if im < 0.0 or re <= op.spb_e:
            continue
        mu = complex(re, im)
        is_principal = principal is not None and im == 0.0 and \
            abs(re - principal["value"]) <= tol
        if not is_principal:
            espace = sp.eigenspace_fast(op, mu, SIMPLE_TOL)
            w = cn.subspace_meets_interior(cone, espace)
            if w is not None and bad3 is None:
                bad3 = (mu, w)
        if im > 0.0 and bad4 is None:
            ge = sp.gen_eigenspace(op, mu)
            w = cn.subspace_meets_cone(cone, ge.real_space)
            if w is not None:
                bad4 = (mu, w)
    if bad3 is None:
        checks.append(KrCheck("non-principal-noninterior", PASS,
                              "no non-principal eigenvector reaches int K"))
    else:
        checks.append(KrCheck("non-principal-noninterior", FAIL,
                              f"eigenvector at mu={bad3[0]:.6g} in the "
                              "interior "
                              "(hypotheses passed: investigate tolerances)",
                              witness=bad3[1],
                              data={"mu": [bad3[0].real, bad3[0].imag]}))
    if bad4 is None:
        checks.append(KrCheck("complex-ge-trivial", PASS,
                              "complex GEs meet K only at 0"))
    else:
        checks.append(KrCheck("complex-ge-trivial", FAIL,
                              f"GE at mu={bad4[0]:.6g} meets K "
                              "(hypotheses passed: investigate tolerances)",
                              witness=bad4[1],
                              data={"mu": [bad4[0].real, bad4[0].imag]}))

    # 3.2 block (requires A4): s simple, interior eigenvector, all other
    # GEs (real or complex) meet K only at 0
    if a4.passed and principal is not None:
        ok = principal["alg_mult"] == 1
        checks.append(KrCheck("principal-simple", PASS if ok else FAIL,
                              f"alg_mult = {principal['alg_mult']}"
                              + ("" if ok else
                                 " (hypotheses passed: investigate tolerances)"),
                              data={"alg_mult": principal["alg_mult"]}))
        loc = cn.classify(cone, principal["eigenvector"]).location
        checks.append(KrCheck(
            "principal-interior", PASS if loc == cn.INTERIOR else FAIL,
            f"normalized principal eigenvector classifies {loc} "
            "(normalization: Euclidean norm 1, oriented into K)",
            witness=principal["eigenvector"]))
        bad = None
        for re, im, _ in spec.entries:
            if im < 0.0 or re <= op.spb_e:
                continue
            if im == 0.0 and abs(re - principal["value"]) <= tol:
                continue
            ge = sp.gen_eigenspace(op, complex(re, im))
            w = cn.subspace_meets_cone(cone, ge.real_space)
            if w is not None:
                bad = (complex(re, im), w)
                break
        if bad is None:
            checks.append(KrCheck("ge-trivial-all", PASS,
                                  "GE of every non-principal eigenvalue "
                                  "meets K only at 0"))
        else:
            checks.append(KrCheck("ge-trivial-all", FAIL,
                                  f"GE at mu={bad[0]:.6g} meets K "
                                  "(hypotheses passed: investigate "
                                  "tolerances)", witness=bad[1],
                                  data={"mu": [bad[0].real, bad[0].imag]}))
    else:
        reason = "A4 failed" if not a4.passed else "no principal eigenpair"
        for name in ("principal-simple", "principal-interior",
                     "ge-trivial-all"):
            checks.append(KrCheck(name, NOT_APPLICABLE, reason))

    # 3.3 block (requires A5): the boundary spectrum is the singleton {s}
    if a5.passed:
        nb = len(bnd.sigma_b)
        ok = nb == 1
        vac = a5.data.get("vacuous", [])
        detail = (f"sigma_b has {nb} clustered element(s) at Re = spb")
        if not ok and vac:
            detail += ("; A5 was vacuous at " +
                       ", ".join(f"{v[0]:.4g}{v[1]:+.4g}i" for v in vac) +
                       " (GE meets K only at 0), so the singleton conclusion "
                       "is not numerically forced there")
        checks.append(KrCheck("boundary-spectrum-singleton",
                              PASS if ok else FAIL, detail,
                              data={"sigma_b": [list(e) for e in bnd.sigma_b],
                                    "a5_vacuous": vac}))
    else:
        checks.append(KrCheck("boundary-spectrum-singleton", NOT_APPLICABLE,
                              "A5 failed"))

    return KrReport("3.1/3.2/3.3", checks, seed, principal=principal,
                    bounds=_bounds_dict(bnd))


# ---------------------------------------------------------------------------
# Principal eigenpair iteration
# ---------------------------------------------------------------------------

def inverse_power_iteration(op: OperatorModel, lam: float, x0,
                            tol: float = 1e-12, maxit: int = 500):
    """Shifted inverse power iteration for the spectral-bound eigenpair.

    Iterates x <- normalize((lam I - A)^{-1} x); converges when successive
    Rayleigh quotients of the resolvent differ by less than ``tol``.
    Returns (s, eigenvector, iterations) with s = lam - 1/rho.
    """
    x = np.asarray(x0, dtype=np.float64).reshape(-1).copy()
    if x.shape[0] != op.dim:
        raise ValueError("start vector length does not match the operator")
    nx = np.linalg.norm(x)
    if nx == 0.0:
        raise ValueError("start vector must be nonzero")
    x /= nx
    n = op.dim
    try:
        lu, piv = mx.lu_factor(lam * np.eye(n) - op.a)
    except SingularMatrix as exc:
        raise SingularResolvent(str(exc)) from exc
    rho_prev = None
    for it in range(1, maxit + 1):
        y = mx.lu_solve_factored(lu, piv, x)
        rho = float(x @ y)
        ny = np.linalg.norm(y)
        if ny == 0.0:
            raise NoConvergence("resolvent annihilated the iterate")
        x = y / ny
        if rho_prev is not None and abs(rho - rho_prev) < tol * max(1.0, abs(rho)):
            s = lam - 1.0 / rho
            return s, sign_fix(x), it
        rho_prev = rho
    raise NoConvergence(f"no Rayleigh convergence in {maxit} iterations")
