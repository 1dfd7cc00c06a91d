"""Exact reference for the three-modes Hamiltonian on the symmetric pair sector.

The sector is spanned by occupation states |k> with k particles in each
of the two opposite-momentum modes and N-2k in the condensate mode,
k = 0..N/2.  On this basis the Hamiltonian is a real symmetric
tridiagonal matrix:

    d_k = 2k * (eps*phi + phi*(N-2k)/N)
    t_k = (phi/N) * sqrt((N-2k)(N-2k-1)) * (k+1)      (couples k and k+1)

Both formulas follow from the ladder-operator action of the pair
creation/annihilation terms; dense_crosscheck re-derives them by brute
force on the full three-mode occupation basis for small N.

Eigenvalues come from Sturm-sequence bisection with Gershgorin brackets,
eigenvectors from inverse iteration (LAPACK dgtsv, partial pivoting),
with a Rayleigh-quotient polish for the lowest pair.  No part of this
module looks at the flow; it is the independent side of every
equivalence check.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg.lapack import dgtsv

from . import _kernels
from .model import ModelParams


@dataclass(frozen=True)
class TridiagonalHamiltonian:
    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        if self.diag.ndim != 1 or self.offdiag.ndim != 1:
            raise ValueError("diag and offdiag must be 1-D")
        if self.offdiag.shape[0] != self.diag.shape[0] - 1:
            raise ValueError("offdiag must have length len(diag) - 1")

    @property
    def size(self) -> int:
        return int(self.diag.shape[0])

    def norm_inf(self) -> float:
        """Maximum absolute row sum."""
        d, e = np.abs(self.diag), np.abs(self.offdiag)
        row = d.copy()
        row[:-1] += e
        row[1:] += e
        return float(row.max()) if row.size else 0.0

    def matvec(self, v: np.ndarray) -> np.ndarray:
        out = self.diag * v
        if self.offdiag.size:
            out[:-1] += self.offdiag * v[1:]
            out[1:] += self.offdiag * v[:-1]
        return out

    def to_csv(self, path) -> None:
        """Write columns k,d_k,t_k (empty t on the last row)."""
        lines = ["k,d_k,t_k"]
        for k in range(self.size):
            t = repr(float(self.offdiag[k])) if k < self.size - 1 else ""
            lines.append(f"{k},{float(self.diag[k])!r},{t}")
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")


def build_sector_hamiltonian(params: ModelParams) -> TridiagonalHamiltonian:
    n = params.n_particles
    phi = params.phi
    k2 = params.kinetic
    k = np.arange(n // 2 + 1, dtype=np.float64)
    free = n - 2.0 * k
    diag = 2.0 * k * (k2 + phi * free / n)
    kk = k[:-1]
    offdiag = (phi / n) * np.sqrt((n - 2.0 * kk) * (n - 2.0 * kk - 1.0)) * (kk + 1.0)
    return TridiagonalHamiltonian(diag=diag, offdiag=offdiag)


def dense_crosscheck(params: ModelParams) -> float:
    """Max deviation between the tridiagonal elements and a brute-force build.

    Enumerates the full occupation basis (n0, n+, n-) with n0+n+ +n- = N,
    applies the Hamiltonian through explicit ladder-operator action, and
    projects onto the symmetric sector.  Only feasible for small N.
    """
    n = params.n_particles
    if n > 12:
        raise ValueError("dense crosscheck only supported for N <= 12")
    phi, k2 = params.phi, params.kinetic

    states = []
    index = {}
    for n0 in range(n + 1):
        for npl in range(n - n0 + 1):
            nmi = n - n0 - npl
            index[(n0, npl, nmi)] = len(states)
            states.append((n0, npl, nmi))
    dim = len(states)
    h = np.zeros((dim, dim))

    for idx, (n0, npl, nmi) in enumerate(states):
        h[idx, idx] += (k2 + phi * n0 / n) * (npl + nmi)
        # pair annihilation: (n0, n+, n-) -> (n0+2, n+-1, n--1)
        if npl >= 1 and nmi >= 1:
            amp = phi / n * math.sqrt((n0 + 1) * (n0 + 2)) * math.sqrt(npl * nmi)
            h[index[(n0 + 2, npl - 1, nmi - 1)], idx] += amp
        # pair creation: (n0, n+, n-) -> (n0-2, n++1, n-+1)
        if n0 >= 2:
            amp = phi / n * math.sqrt(n0 * (n0 - 1)) * math.sqrt((npl + 1) * (nmi + 1))
            h[index[(n0 - 2, npl + 1, nmi + 1)], idx] += amp

    sector = [index[(n - 2 * k, k, k)] for k in range(n // 2 + 1)]
    projected = h[np.ix_(sector, sector)]

    tri = build_sector_hamiltonian(params)
    dense_tri = np.diag(tri.diag)
    if tri.offdiag.size:
        dense_tri += np.diag(tri.offdiag, 1) + np.diag(tri.offdiag, -1)
    deviation = float(np.max(np.abs(projected - dense_tri)))

    # the sector must be exactly invariant: no coupling out of it
    mask = np.ones(dim, dtype=bool)
    mask[sector] = False
    leakage = float(np.max(np.abs(h[np.ix_(mask, sector)]))) if mask.any() else 0.0
    return max(deviation, leakage)


def sturm_count(tri: TridiagonalHamiltonian, z: float) -> int:
    """Number of eigenvalues strictly below z."""
    e2 = np.ascontiguousarray(tri.offdiag * tri.offdiag)
    return int(_kernels.sturm_count(np.ascontiguousarray(tri.diag), e2, float(z)))


def _gershgorin(tri: TridiagonalHamiltonian):
    d, e = tri.diag, np.abs(tri.offdiag)
    radius = np.zeros_like(d)
    if e.size:
        radius[:-1] += e
        radius[1:] += e
    return float(np.min(d - radius)), float(np.max(d + radius))


def _eigenvalue_by_index(tri, index, tol):
    d = np.ascontiguousarray(tri.diag)
    e2 = np.ascontiguousarray(tri.offdiag * tri.offdiag)
    lo, hi = _gershgorin(tri)
    lo, hi = _kernels.bisect_eigenvalue(d, e2, lo - tol, hi + tol, index, tol)
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class EigenPair:
    value: float
    vector: np.ndarray
    residual: float


class ConvergenceError(RuntimeError):
    pass


def _inverse_iteration(tri, shift, sweeps=3):
    m = tri.size
    v = np.full(m, 1.0 / math.sqrt(m))
    scale = tri.norm_inf() or 1.0
    lam = shift
    for _ in range(sweeps):
        dl = np.ascontiguousarray(tri.offdiag)
        du = np.ascontiguousarray(tri.offdiag)
        dd = np.ascontiguousarray(tri.diag - lam)
        _, _, _, x, info = dgtsv(dl, dd, du, v)
        if info != 0:
            # shift sits exactly on an eigenvalue of a leading block; nudge
            lam += 16.0 * np.finfo(float).eps * scale
            continue
        nrm = np.linalg.norm(x)
        if not np.isfinite(nrm) or nrm == 0.0:
            raise ConvergenceError("inverse iteration produced a degenerate vector")
        v = x / nrm
        lam = float(v @ tri.matvec(v))
    return lam, v


def lowest_eigenpair(
    tri: TridiagonalHamiltonian, tol: float = 1e-13, max_iter: int = 200
) -> EigenPair:
    """Smallest eigenvalue and eigenvector.

    Bisection localizes the eigenvalue to tol * norm_inf; inverse
    iteration plus a Rayleigh-quotient update then polishes both to
    machine precision.  The vector is unit norm with its first nonzero
    component positive.
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    m = tri.size
    scale = tri.norm_inf() or 1.0
    if m == 1 or not np.any(tri.offdiag):
        k = int(np.argmin(tri.diag))
        vec = np.zeros(m)
        vec[k] = 1.0
        return EigenPair(value=float(tri.diag[k]), vector=vec, residual=0.0)

    lam0 = _eigenvalue_by_index(tri, 0, tol * scale)
    lam, v = _inverse_iteration(tri, lam0)
    nz = np.nonzero(v)[0]
    if nz.size and v[nz[0]] < 0.0:
        v = -v
    residual = float(np.linalg.norm(tri.matvec(v) - lam * v))
    if residual > 1e-10 * scale:
        raise ConvergenceError(f"eigenpair residual {residual:.3e} exceeds 1e-10*norm")
    return EigenPair(value=lam, vector=v, residual=residual)


def low_spectrum(tri: TridiagonalHamiltonian, m: int, tol: float = 1e-13) -> np.ndarray:
    """The m smallest eigenvalues, ascending, each bisected to tol*norm."""
    if not 1 <= m <= tri.size:
        raise ValueError("m out of range")
    scale = tri.norm_inf() or 1.0
    if not np.any(tri.offdiag):
        return np.sort(tri.diag)[:m].astype(float)
    vals = [_eigenvalue_by_index(tri, j, tol * scale) for j in range(m)]
    vals[0] = lowest_eigenpair(tri, tol).value
    return np.array(sorted(vals))


def schur_complement(tri: TridiagonalHamiltonian, z: float) -> float:
    """(T - z) folded onto the first basis entry, nested fraction evaluated
    directly from the matrix elements:  d0 - z - t0^2/(d1 - z - t1^2/(...)).
    """
    d = np.ascontiguousarray(tri.diag)
    e2 = np.ascontiguousarray(tri.offdiag * tri.offdiag)
    return float(_kernels.schur_eta(d, e2, float(z)))
