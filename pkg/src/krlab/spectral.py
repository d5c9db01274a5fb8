"""Resolvents, generalized eigenspaces, spectral splits and bounds.

Finite-dimensional conventions: the essential spectrum is empty, so the
essential spectral bound is -inf and the essential spectral radius is 0.
Both are stored on the operator and reported rather than silently assumed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import matrix as mx
from .checks import FAIL, PASS, KrCheck
from .errors import LambdaInSpectrum, MuNotInSpectrum, ThresholdOnEigenvalue
from .matrix import Spectrum, Subspace


class OperatorModel:
    """A dense operator with cached spectral data.

    The matrix is copied and frozen at construction; the eigendecomposition
    is computed once on first use and shared by all subsequent queries.
    """

    def __init__(self, a, cluster_tol: float | None = None,
                 spb_e: float = float("-inf"), r_e: float = 0.0):
        a = mx.as_square(a).copy()
        a.setflags(write=False)
        self.a = a
        self.spb_e = float(spb_e)
        self.r_e = float(r_e)
        self.norm = mx.fro_norm(a)
        self._cluster_tol = cluster_tol
        self._spectrum: Spectrum | None = None
        self._eigvecs: list[np.ndarray] | None = None

    @property
    def dim(self) -> int:
        return int(self.a.shape[0])

    @property
    def cluster_tol(self) -> float:
        if self._cluster_tol is None:
            self._cluster_tol = mx.CLUSTER_RTOL * self.norm
        return self._cluster_tol

    def spectrum(self) -> Spectrum:
        if self._spectrum is None:
            self._spectrum, self._eigvecs = mx.eigen(self.a, self.cluster_tol)
        return self._spectrum

    def eigvecs(self) -> list[np.ndarray]:
        self.spectrum()
        return self._eigvecs


class SpectralBounds(NamedTuple):
    spb: float
    sigma_b: list[tuple[float, float, int]]
    r: float
    r_e: float


def bounds(op: OperatorModel) -> SpectralBounds:
    """Spectral bound, boundary spectrum, spectral radius, essential radius.

    sigma_b collects the clustered eigenvalues whose real part lies within
    the cluster tolerance of the spectral bound.
    """
    spec = op.spectrum()
    res = np.array([e[0] for e in spec.entries])
    spb = float(np.max(res))
    tol = spec.cluster_tol
    sigma_b = [e for e in spec.entries if abs(e[0] - spb) <= tol]
    r = float(np.max(np.abs(spec.values())))
    return SpectralBounds(spb, sigma_b, r, op.r_e)


def resolvent(op: OperatorModel, lam: float) -> np.ndarray:
    """(lam I - A)^{-1} via LU; lam must stay clear of the spectrum."""
    spec = op.spectrum()
    dist = float(np.min(np.abs(spec.raw - complex(lam))))
    guard = 1e-8 * max(op.norm, np.finfo(float).eps)
    if dist <= guard:
        raise LambdaInSpectrum(
            f"lambda={lam} is {dist:.3e} from the spectrum (guard {guard:.3e})")
    n = op.dim
    shifted = lam * np.eye(n) - op.a
    return mx.lu_solve(shifted, np.eye(n))


@dataclass(frozen=True, eq=False)
class GenEigenspace:
    """Real form of a generalized eigenspace.

    ``real_space`` spans {Re xi : xi in the complex generalized eigenspace};
    its dimension is alg_mult for real mu and 2 alg_mult for complex mu.
    ``max_rank`` is the smallest power k at which the kernel chain of
    (A - mu I)^k stops growing.  ``complex_basis`` holds an orthonormal
    complex basis (columns) of the complex generalized eigenspace.
    """

    mu: complex
    real_space: Subspace
    alg_mult: int
    max_rank: int
    complex_basis: np.ndarray
    invariance_residual: float


def _kernel_chain(b: np.ndarray, mult: int, tol: float):
    """Nested kernels of b^k for k = 1..mult without forming explicit powers.

    kernel(b^{k+1}) = kernel(P_k b) where P_k projects off kernel(b^k);
    each step is one SVD, re-orthonormalized by construction.
    """
    complex_mode = np.iscomplexobj(b)
    kern = mx.complex_kernel if complex_mode else (
        lambda m, t: mx.kernel(m, t).basis)
    bases = []
    current = kern(b, tol)
    bases.append(current)
    for _ in range(1, mult):
        if current.shape[1] >= mult:
            break
        proj = current @ current.conj().T if complex_mode else current @ current.T
        reduced = b - proj @ b
        nxt = kern(reduced, tol)
        if nxt.shape[1] <= current.shape[1]:
            break
        current = nxt
        bases.append(current)
    return bases


def gen_eigenspace(op: OperatorModel, mu: complex, tol: float = 1e-8) -> GenEigenspace:
    """Generalized eigenspace of the clustered eigenvalue nearest ``mu``.

    For simple eigenvalues the Schur eigenvector is used directly; clusters
    with multiplicity > 1 fall back to the kernel chain of (A - mu I)^k in
    (complex) arithmetic.
    """
    spec = op.spectrum()
    idx = spec.find(mu)
    if idx is None:
        raise MuNotInSpectrum(f"mu={mu} not within cluster_tol of the spectrum")
    re, im, mult = spec.entries[idx]
    mu_star = complex(re, im)
    a = op.a
    n = op.dim

    if mult == 1:
        positions = [i for i, c in enumerate(spec.cluster_of) if c == idx]
        vecs = [op.eigvecs()[i] for i in positions]
        w = np.column_stack(vecs)
        max_rank = 1
    else:
        if im == 0.0:
            b = a - mu_star.real * np.eye(n)
        else:
            b = a.astype(np.complex128) - mu_star * np.eye(n, dtype=np.complex128)
        bases = _kernel_chain(b, mult, tol)
        w = bases[-1].astype(np.complex128)
        max_rank = len(bases)

    if im == 0.0:
        cols = [w[:, j].real for j in range(w.shape[1])]
        if np.max(np.abs(w.imag)) > 1e-8 * max(1.0, np.max(np.abs(w.real))):
            cols += [w[:, j].imag for j in range(w.shape[1])]
    else:
        cols = [w[:, j].real for j in range(w.shape[1])]
        cols += [w[:, j].imag for j in range(w.shape[1])]
    space = mx.orthonormal_basis(cols, tol=1e-10)
    v = space.basis
    if v.shape[1]:
        av = a @ v
        resid = float(np.linalg.norm(av - v @ (v.T @ av)))
    else:
        resid = 0.0
    return GenEigenspace(mu=mu_star, real_space=space, alg_mult=mult,
                         max_rank=max_rank, complex_basis=w,
                         invariance_residual=resid)


def geometric_multiplicity(op: OperatorModel, mu: complex,
                           tol: float = 1e-8) -> int:
    n = op.dim
    if abs(mu.imag) == 0.0:
        b = op.a - mu.real * np.eye(n)
        return mx.kernel(b, tol).dim
    b = op.a.astype(np.complex128) - mu * np.eye(n, dtype=np.complex128)
    return mx.complex_kernel(b, tol).shape[1]


def eigenspace(op: OperatorModel, mu: complex, tol: float = 1e-8) -> Subspace:
    """Real form of the geometric eigenspace at ``mu``."""
    n = op.dim
    if abs(mu.imag) == 0.0:
        return mx.kernel(op.a - mu.real * np.eye(n), tol)
    b = op.a.astype(np.complex128) - mu * np.eye(n, dtype=np.complex128)
    w = mx.complex_kernel(b, tol)
    cols = [w[:, j].real for j in range(w.shape[1])]
    cols += [w[:, j].imag for j in range(w.shape[1])]
    return mx.orthonormal_basis(cols, tol=1e-10)


def eigenspace_fast(op: OperatorModel, mu: complex, tol: float = 1e-8) -> Subspace:
    """Geometric eigenspace, reusing the cached Schur eigenvector for simple
    eigenvalues (no extra SVD); clusters fall back to :func:`eigenspace`."""
    spec = op.spectrum()
    idx = spec.find(mu)
    if idx is None:
        raise MuNotInSpectrum(f"mu={mu} not within cluster_tol of the spectrum")
    re, im, mult = spec.entries[idx]
    if mult > 1:
        return eigenspace(op, complex(re, im), tol)
    return gen_eigenspace(op, complex(re, im), tol).real_space


@dataclass(frozen=True, eq=False)
class SpectralSplit:
    """Invariant decomposition by a real-part threshold.

    sigma1 holds the clustered eigenvalues with Re >= threshold and x1 the
    direct sum of their generalized eigenspaces (real forms); sigma0/x0 the
    complement.  realized_gap is the smallest |Re mu - threshold|.
    """

    threshold: float
    sigma1: list[tuple[float, float, int]]
    sigma0: list[tuple[float, float, int]]
    x1: Subspace
    x0: Subspace
    realized_gap: float


def spectral_split(op: OperatorModel, t: float) -> SpectralSplit:
    spec = op.spectrum()
    tol = spec.cluster_tol
    gaps = [abs(e[0] - t) for e in spec.entries]
    if min(gaps) <= tol:
        raise ThresholdOnEigenvalue(
            f"threshold {t} within cluster_tol of an eigenvalue real part")
    sigma1 = [e for e in spec.entries if e[0] >= t]
    sigma0 = [e for e in spec.entries if e[0] < t]

    def stack(entries):
        cols = []
        for re, im, _ in entries:
            if im < 0.0:
                continue  # the conjugate entry contributes the same real form
            ge = gen_eigenspace(op, complex(re, im))
            for j in range(ge.real_space.dim):
                cols.append(ge.real_space.basis[:, j])
        if not cols:
            return Subspace(op.dim, np.zeros((op.dim, 0)))
        return mx.orthonormal_basis(cols, tol=1e-10)

    return SpectralSplit(threshold=float(t), sigma1=sigma1, sigma0=sigma0,
                         x1=stack(sigma1), x0=stack(sigma0),
                         realized_gap=float(min(gaps)))


def verify_ge_resolvent_identity(op: OperatorModel, mu: complex, lam: float,
                                 tol: float = 1e-8) -> KrCheck:
    """Check that the resolvent maps GE_mu onto itself and that GE_mu equals
    the generalized eigenspace of the resolvent at 1/(lam - mu).

    Pass requires pairwise equality of the three subspaces (matching
    dimensions, principal angles below tol).  Failures carry conditioning
    diagnostics: the eigenvalue gaps around mu and around 1/(lam - mu).
    """
    g1 = gen_eigenspace(op, mu)
    r = resolvent(op, lam)
    image_cols = [r @ g1.real_space.basis[:, j]
                  for j in range(g1.real_space.dim)]
    g2 = mx.orthonormal_basis(image_cols, tol=1e-12) if image_cols else g1.real_space

    r_op = OperatorModel(r)
    nu = 1.0 / (lam - g1.mu)
    spec_r = r_op.spectrum()
    idx = spec_r.find(nu)
    if idx is None:
        return KrCheck(
            name=f"resolvent-ge-identity(mu={mu}, lam={lam})",
            status=FAIL,
            detail="1/(lam-mu) not found in the resolvent spectrum",
            data={"nu": (nu.real, nu.imag)},
            tolerances={"angle_tol": tol})
    g3 = gen_eigenspace(r_op, nu)

    dims = (g1.real_space.dim, g2.dim, g3.real_space.dim)
    angles = []
    for ua, ub in ((g1.real_space, g2), (g1.real_space, g3.real_space),
                   (g2, g3.real_space)):
        if ua.dim == ub.dim and ua.dim > 0:
            ang = mx.principal_angles(ua, ub)
            angles.append(float(ang[-1]) if ang.size else 0.0)
        else:
            angles.append(np.pi / 2)
    max_angle = max(angles) if angles else 0.0

    raw = op.spectrum().raw
    others = raw[np.abs(raw - g1.mu) > op.spectrum().cluster_tol]
    gap_a = float(np.min(np.abs(others - g1.mu))) if others.size else np.inf
    raw_r = spec_r.raw
    others_r = raw_r[np.abs(raw_r - nu) > spec_r.cluster_tol]
    gap_r = float(np.min(np.abs(others_r - nu))) if others_r.size else np.inf

    ok = dims[0] == dims[1] == dims[2] and max_angle < tol
    return KrCheck(
        name=f"resolvent-ge-identity(mu={complex(g1.mu):.6g}, lam={lam:.6g})",
        status=PASS if ok else FAIL,
        detail=("subspaces agree" if ok else
                "subspace mismatch; see conditioning diagnostics in data"),
        data={"dims": dims, "max_angle": max_angle,
              "eig_gap_operator": gap_a, "eig_gap_resolvent": gap_r,
              "nu": (nu.real, nu.imag)},
        tolerances={"angle_tol": tol})
