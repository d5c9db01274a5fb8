"""Dense real/complex linear algebra: solves, nonsymmetric eigendecomposition,
matrix exponential, and subspace utilities.

Matrices are plain ``numpy.ndarray`` values (row-major, float64).  All
functions are pure: inputs are never mutated.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import NoConvergence, OverflowRisk, SingularMatrix

#: Relative pivot threshold below which LU reports a singular matrix.
PIVOT_RTOL = 1e-13

#: Default eigenvalue clustering tolerance, relative to the Frobenius norm.
CLUSTER_RTOL = 1e-8

#: Largest ||tA||_1 accepted by matrix_exp before raising OverflowRisk.
EXP_NORM_BOUND = 2.0 ** 20

#: Largest matrix dimension accepted by eigen().
EIGEN_MAX_DIM = 4096

_EPS = np.finfo(np.float64).eps


def as_square(a) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix contains non-finite entries")
    return a


def fro_norm(a) -> float:
    return float(np.sqrt(np.sum(np.asarray(a, dtype=np.float64) ** 2)))


# ---------------------------------------------------------------------------
# LU solves
# ---------------------------------------------------------------------------

def lu_factor(a: np.ndarray):
    """Factor a copy of ``a`` with partial pivoting.

    Returns ``(lu, piv)``; raises SingularMatrix when a pivot falls below
    PIVOT_RTOL times the largest entry magnitude.
    """
    a = as_square(a)
    lu = a.copy()
    piv = np.zeros(a.shape[0], dtype=np.int64)
    minpiv = _kernels.lu_factor_inplace(lu, piv)
    scale = float(np.max(np.abs(a)))
    if minpiv <= PIVOT_RTOL * max(scale, _EPS):
        raise SingularMatrix(
            f"pivot {minpiv:.3e} under threshold {PIVOT_RTOL * scale:.3e}")
    return lu, piv


def lu_solve_factored(lu, piv, b) -> np.ndarray:
    b = np.asarray(b, dtype=np.float64)
    rhs = b.reshape(-1, 1).copy() if b.ndim == 1 else b.copy()
    _kernels.lu_solve_inplace(lu, piv, rhs)
    return rhs[:, 0] if b.ndim == 1 else rhs


def lu_solve(a, b) -> np.ndarray:
    """Solve ``a @ x = b`` by partially pivoted LU."""
    lu, piv = lu_factor(a)
    if np.asarray(b).shape[0] != lu.shape[0]:
        raise ValueError("right-hand side length does not match matrix")
    return lu_solve_factored(lu, piv, b)


def inverse(a) -> np.ndarray:
    a = as_square(a)
    return lu_solve(a, np.eye(a.shape[0]))


# ---------------------------------------------------------------------------
# Spectrum type and the dense eigensolver
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Spectrum:
    """Clustered eigenvalues of a real matrix.

    ``entries`` holds (re, im, multiplicity) triples, conjugate-closed and
    ordered by descending real part, then descending imaginary part.  ``raw``
    keeps the unclustered eigenvalues in the same order as the eigenvectors
    returned by :func:`eigen`; ``cluster_of[i]`` maps raw index i to its
    entry index.
    """

    entries: tuple[tuple[float, float, int], ...]
    cluster_tol: float
    raw: np.ndarray = field(repr=False)
    cluster_of: tuple[int, ...] = field(repr=False)

    @property
    def dim(self) -> int:
        return int(self.raw.shape[0])

    def values(self) -> np.ndarray:
        """Clustered eigenvalues as a complex array (one per entry)."""
        return np.array([complex(re, im) for re, im, _ in self.entries])

    def multiplicities(self) -> np.ndarray:
        return np.array([m for _, _, m in self.entries], dtype=int)

    def find(self, mu: complex) -> int | None:
        """Index of the entry within cluster_tol of ``mu``, or None."""
        tol = max(self.cluster_tol, 64.0 * _EPS)
        best, bestd = None, np.inf
        for i, (re, im, _) in enumerate(self.entries):
            d = abs(complex(re, im) - complex(mu))
            if d < bestd:
                best, bestd = i, d
        return best if bestd <= tol else None


def _schur(a: np.ndarray):
    """Real Schur decomposition a = q @ t @ q.T via the compiled kernels."""
    n = a.shape[0]
    t = a.copy()
    q = np.eye(n)
    if n > 2:
        _kernels.hessenberg_inplace(t, q)
    sweeps = _kernels.real_schur_inplace(t, q, 50 * max(n, 2))
    if sweeps < 0:
        raise NoConvergence(f"QR iteration exceeded {50 * n} sweeps")
    return t, q


def _rsf2csf(t: np.ndarray, q: np.ndarray):
    """Convert a real Schur form to a complex upper-triangular Schur form."""
    n = t.shape[0]
    tc = t.astype(np.complex128)
    qc = q.astype(np.complex128)
    for k in range(n - 1):
        if tc[k + 1, k] != 0.0:
            a_, b_ = t[k, k], t[k, k + 1]
            c_, d_ = t[k + 1, k], t[k + 1, k + 1]
            half = 0.5 * (a_ - d_)
            disc = half * half + b_ * c_
            im = np.sqrt(max(-disc, 0.0))
            mu = complex(0.5 * (a_ + d_), im)
            x1 = mu - d_
            r = np.hypot(abs(x1), c_)
            cs = x1 / r
            sn = c_ / r
            g = np.array([[np.conj(cs), sn], [-sn, cs]], dtype=np.complex128)
            tc[k:k + 2, k:] = g @ tc[k:k + 2, k:]
            tc[:k + 2, k:k + 2] = tc[:k + 2, k:k + 2] @ g.conj().T
            qc[:, k:k + 2] = qc[:, k:k + 2] @ g.conj().T
            tc[k + 1, k] = 0.0
    return tc, qc


def _triangular_eigvecs(tc: np.ndarray, qc: np.ndarray) -> np.ndarray:
    """Eigenvectors of the original matrix from its complex Schur form.

    Column k is a unit eigenvector for tc[k, k]; back-substitution guards
    repeated diagonal entries with an eps-scale denominator.
    """
    n = tc.shape[0]
    tnorm = max(float(np.max(np.abs(tc))), _EPS)
    vecs = np.empty((n, n), dtype=np.complex128)
    for k in range(n):
        y = np.zeros(n, dtype=np.complex128)
        y[k] = 1.0
        lam = tc[k, k]
        for i in range(k - 1, -1, -1):
            num = tc[i, i + 1:k + 1] @ y[i + 1:k + 1]
            den = tc[i, i] - lam
            if abs(den) < _EPS * tnorm:
                den = complex(_EPS * tnorm, 0.0)
            y[i] = -num / den
        v = qc[:, :k + 1] @ y[:k + 1]
        v /= np.linalg.norm(v)
        j = int(np.argmax(np.abs(v)))
        phase = v[j] / abs(v[j])
        vecs[:, k] = v * np.conj(phase)
    return vecs


def _eigvals_from_quasi_triangular(t: np.ndarray) -> np.ndarray:
    n = t.shape[0]
    vals = np.empty(n, dtype=np.complex128)
    k = 0
    while k < n:
        if k + 1 < n and t[k + 1, k] != 0.0:
            a_, b_ = t[k, k], t[k, k + 1]
            c_, d_ = t[k + 1, k], t[k + 1, k + 1]
            half = 0.5 * (a_ - d_)
            disc = half * half + b_ * c_
            m = 0.5 * (a_ + d_)
            if disc < 0.0:
                im = np.sqrt(-disc)
                vals[k] = complex(m, im)
                vals[k + 1] = complex(m, -im)
            else:  # defensive: split should have caught this
                sq = np.sqrt(disc)
                vals[k] = complex(m + sq, 0.0)
                vals[k + 1] = complex(m - sq, 0.0)
            k += 2
        else:
            vals[k] = complex(t[k, k], 0.0)
            k += 1
    return vals


def _cluster_eigenvalues(raw: np.ndarray, tol: float):
    """Greedy transitive clustering, conjugate-symmetric by construction."""
    n = raw.shape[0]
    re = raw.real.copy()
    im = raw.imag.copy()
    im[np.abs(im) <= tol] = 0.0

    def cluster_group(idx):
        groups = []
        for i in idx:
            placed = False
            for g in groups:
                for j in g:
                    if abs(complex(re[i], im[i]) - complex(re[j], im[j])) <= tol:
                        g.append(i)
                        placed = True
                        break
                if placed:
                    break
            if not placed:
                groups.append([i])
        # transitive closure: merge groups that touch
        merged = True
        while merged:
            merged = False
            for x in range(len(groups)):
                for yidx in range(x + 1, len(groups)):
                    close = any(
                        abs(complex(re[i], im[i]) - complex(re[j], im[j])) <= tol
                        for i in groups[x] for j in groups[yidx])
                    if close:
                        groups[x].extend(groups[yidx])
                        del groups[yidx]
                        merged = True
                        break
                if merged:
                    break
        return groups

    real_idx = [i for i in range(n) if im[i] == 0.0]
    upper_idx = [i for i in range(n) if im[i] > 0.0]
    lower_idx = [i for i in range(n) if im[i] < 0.0]

    entries = []
    cluster_of = np.full(n, -1, dtype=int)
    for g in cluster_group(real_idx):
        val = float(np.mean(re[g]))
        entries.append((val, 0.0, len(g), tuple(sorted(g))))
    for g in cluster_group(upper_idx):
        rm = float(np.mean(re[g]))
        imm = float(np.mean(im[g]))
        entries.append((rm, imm, len(g), tuple(sorted(g))))
        # mirror cluster among the conjugates
        mirror = []
        for i in g:
            cand = [j for j in lower_idx
                    if abs(re[j] - re[i]) <= tol and abs(im[j] + im[i]) <= tol
                    and cluster_of[j] == -1]
            # conjugates are exact by construction; take the first match
            if cand:
                mirror.append(cand[0])
                cluster_of[cand[0]] = -2  # reserve
        entries.append((rm, -imm, len(g), tuple(sorted(mirror))))

    entries.sort(key=lambda e: (-e[0], -e[1]))
    final = []
    for ei, (rm, imm, mult, members) in enumerate(entries):
        final.append((rm, imm, mult))
        for i in members:
            cluster_of[i] = ei
    return tuple(final), tuple(int(c) for c in cluster_of)


def eigen(a, cluster_tol: float | None = None):
    """Full nonsymmetric eigendecomposition.

    Returns ``(Spectrum, eigenvectors)`` where ``eigenvectors[i]`` is a unit
    complex eigenvector for ``spectrum.raw[i]``.  Raw eigenvalues are sorted
    by descending real part, then descending imaginary part, and occur in
    exact conjugate pairs for complex values.
    """
    a = as_square(a)
    n = a.shape[0]
    if n > EIGEN_MAX_DIM:
        raise ValueError(f"dimension {n} exceeds the dense cap {EIGEN_MAX_DIM}")
    if cluster_tol is None:
        cluster_tol = CLUSTER_RTOL * fro_norm(a)
    t, q = _schur(a)
    raw = _eigvals_from_quasi_triangular(t)
    tc, qc = _rsf2csf(t, q)
    vecs = _triangular_eigvecs(tc, qc)
    order = np.lexsort((-raw.imag, -raw.real))
    raw = raw[order]
    vecs = vecs[:, order]
    entries, cluster_of = _cluster_eigenvalues(raw, cluster_tol)
    spec = Spectrum(entries=entries, cluster_tol=float(cluster_tol),
                    raw=raw, cluster_of=cluster_of)
    return spec, [vecs[:, i].copy() for i in range(n)]


# ---------------------------------------------------------------------------
# Matrix exponential: scaling and squaring with a diagonal Pade core
# ---------------------------------------------------------------------------

_PADE_COEFFS = {
    3: (120.0, 60.0, 12.0, 1.0),
    5: (30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0),
    7: (17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0,
        56.0, 1.0),
    9: (17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
        2162160.0, 110880.0, 3960.0, 90.0, 1.0),
    13: (64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
         1187353796428800.0, 129060195264000.0, 10559470521600.0,
         670442572800.0, 33522128640.0, 1323241920.0, 40840800.0,
         960960.0, 16380.0, 182.0, 1.0),
}

_PADE_THETA = ((3, 1.495585217958292e-2), (5, 2.539398330063230e-1),
               (7, 9.504178996162932e-1), (9, 2.097847961257068),
               (13, 5.371920351148152))


def _pade_uv(a: np.ndarray, m: int):
    b = _PADE_COEFFS[m]
    n = a.shape[0]
    ident = np.eye(n)
    a2 = a @ a
    if m == 13:
        a4 = a2 @ a2
        a6 = a2 @ a4
        u = a @ (a6 @ (b[13] * a6 + b[11] * a4 + b[9] * a2)
                 + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * ident)
        v = (a6 @ (b[12] * a6 + b[10] * a4 + b[8] * a2)
             + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * ident)
        return u, v
    powers = {0: ident, 2: a2}
    for p in range(4, m, 2):
        powers[p] = powers[p - 2] @ a2
    u_inner = b[1] * ident
    v = b[0] * ident
    for p in range(2, m + 1, 2):
        u_inner = u_inner + b[p + 1] * powers[p]
        v = v + b[p] * powers[p]
    return a @ u_inner, v


def matrix_exp(a, t: float = 1.0) -> np.ndarray:
    """Compute ``exp(t a)`` by scaling and squaring with a Pade core.

    Relative accuracy is ~1e-13 for ||t a||_1 <= 100.  Raises OverflowRisk
    when ||t a||_1 exceeds EXP_NORM_BOUND (2**20): beyond that the squaring
    depth would erase the accuracy budget.
    """
    a = as_square(a)
    if t < 0.0:
        raise ValueError("t must be nonnegative")
    ta = t * a
    nrm = float(np.max(np.sum(np.abs(ta), axis=0))) if ta.size else 0.0
    if nrm > EXP_NORM_BOUND:
        raise OverflowRisk(f"||tA||_1 = {nrm:.3e} exceeds {EXP_NORM_BOUND:.3e}")
    if nrm == 0.0:
        return np.eye(a.shape[0])
    for m, theta in _PADE_THETA:
        if nrm <= theta:
            u, v = _pade_uv(ta, m)
            return _pade_solve(u, v)
    s = int(np.ceil(np.log2(nrm / _PADE_THETA[-1][1])))
    scaled = ta / (2.0 ** s)
    u, v = _pade_uv(scaled, 13)
    e = _pade_solve(u, v)
    for _ in range(s):
        e = e @ e
    return e


def _pade_solve(u, v):
    lu, piv = lu_factor(v - u)
    return lu_solve_factored(lu, piv, v + u)


# ---------------------------------------------------------------------------
# Subspaces
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Subspace:
    """A subspace given by an orthonormal basis (columns of ``basis``)."""

    ambient_dim: int
    basis: np.ndarray  # shape (ambient_dim, dim)

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=np.float64)
        if b.ndim != 2 or b.shape[0] != self.ambient_dim:
            raise ValueError("basis shape inconsistent with ambient dimension")
        if b.shape[1] > 0:
            g = b.T @ b - np.eye(b.shape[1])
            if float(np.max(np.abs(g))) > 1e-12:
                raise ValueError("basis columns are not orthonormal")
        object.__setattr__(self, "basis", b)

    @property
    def dim(self) -> int:
        return int(self.basis.shape[1])

    def project(self, x: np.ndarray) -> np.ndarray:
        return self.basis @ (self.basis.T @ x)

    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.T


def orthonormal_basis(vectors, tol: float = 1e-10) -> Subspace:
    """Column-pivoted Gram-Schmidt basis of the span of ``vectors``.

    Columns whose residual norm falls to ``tol`` times the largest input
    column norm are dropped.  Empty input yields the zero subspace.
    """
    cols = [np.asarray(v, dtype=np.float64).reshape(-1) for v in vectors]
    if not cols:
        raise ValueError("ambient dimension unknown for empty input")
    n = cols[0].shape[0]
    if any(c.shape[0] != n for c in cols):
        raise ValueError("vectors share no common ambient dimension")
    w = np.column_stack(cols)
    norms = np.sqrt(np.sum(w * w, axis=0))
    maxnorm = float(np.max(norms)) if norms.size else 0.0
    if maxnorm == 0.0:
        return Subspace(n, np.zeros((n, 0)))
    basis = []
    work = w.copy()
    for _ in range(work.shape[1]):
        if len(basis) == n:
            break
        norms = np.sqrt(np.sum(work * work, axis=0))
        j = int(np.argmax(norms))
        if norms[j] <= tol * maxnorm:
            break
        u = work[:, j] / norms[j]
        # re-orthogonalize against the accepted basis for 1e-15 orthogonality
        for b in basis:
            u -= (b @ u) * b
        un = np.linalg.norm(u)
        if un <= tol:
            work[:, j] = 0.0
            continue
        u /= un
        basis.append(u)
        work -= np.outer(u, u @ work)
    mat = np.column_stack(basis) if basis else np.zeros((n, 0))
    return Subspace(n, mat)


def principal_angles(u: Subspace, v: Subspace) -> np.ndarray:
    """Principal angles between two subspaces, ascending, in [0, pi/2]."""
    if u.ambient_dim != v.ambient_dim:
        raise ValueError("subspaces live in different ambient spaces")
    if u.dim == 0 or v.dim == 0:
        return np.zeros(0)
    g = u.basis.T @ v.basis
    sig = np.linalg.svd(g, compute_uv=False)
    sig = np.clip(sig, -1.0, 1.0)
    return np.sort(np.arccos(sig))


def subspaces_equal(u: Subspace, v: Subspace, tol: float = 1e-8) -> bool:
    if u.dim != v.dim:
        return False
    if u.dim == 0:
        return True
    ang = principal_angles(u, v)
    return float(ang[-1]) < tol


def kernel(a, tol: float = 1e-10) -> Subspace:
    """Orthonormal basis of the numerical null space of ``a``.

    Singular directions with sigma <= tol * sigma_max are included; works for
    rectangular and complex input (complex input yields the complex kernel
    as returned by :func:`complex_kernel`).
    """
    a = np.asarray(a)
    if np.iscomplexobj(a):
        raise ValueError("use complex_kernel for complex matrices")
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2:
        raise ValueError("kernel expects a matrix")
    m, n = a.shape
    if np.all(a == 0.0):
        return Subspace(n, np.eye(n))
    _, sig, vt = np.linalg.svd(a)
    smax = sig[0] if sig.size else 0.0
    ncols = int(np.sum(sig <= tol * smax))
    ncols += max(0, n - m)  # trailing rows of vt beyond rank(m)
    ncols = min(ncols, n)
    if ncols == 0:
        return Subspace(n, np.zeros((n, 0)))
    return Subspace(n, vt[n - ncols:, :].T.copy())


def complex_kernel(a, tol: float = 1e-10) -> np.ndarray:
    """Orthonormal complex null-space basis (columns), via SVD."""
    a = np.asarray(a, dtype=np.complex128)
    m, n = a.shape
    if np.all(a == 0.0):
        return np.eye(n, dtype=np.complex128)
    _, sig, vh = np.linalg.svd(a)
    smax = sig[0] if sig.size else 0.0
    ncols = int(np.sum(sig <= tol * smax)) + max(0, n - m)
    ncols = min(ncols, n)
    return vh[n - ncols:, :].conj().T.copy()
