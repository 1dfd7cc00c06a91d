"""Hot scalar recursions, JIT-compiled when numba is available.

Every kernel here is a plain sequential recurrence over a 1-D float64
array; they are the only loops in the package that matter for runtime.
The pure-Python fallbacks compute identical values (division by an exact
zero is guarded the same way), just slower.
"""

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(f):
            return f

        return wrap


_TINY = 1e-300  # replaces an exact zero pivot/denominator


@njit(cache=True, nogil=True)
def flow_recursion(w, g):
    """Fill g[j] = 1/(1 - w[j]*g[j-1]) for j >= 1; g[0] is the start value.

    Returns the first index where the geometric-series condition
    0 <= w*g < 1 fails, or -1 if it holds everywhere.  Values past a
    failure are still produced (with a guarded denominator) so callers
    can inspect the table, but they carry no meaning.
    """
    first_bad = -1
    for j in range(1, w.shape[0]):
        q = w[j] * g[j - 1]
        if q >= 1.0 or q < 0.0:
            if first_bad < 0:
                first_bad = j
        den = 1.0 - q
        if den == 0.0:
            den = -_TINY
        g[j] = 1.0 / den
    return first_bad


@njit(cache=True, nogil=True)
def sturm_count(d, e2, z):
    """Number of eigenvalues of the symmetric tridiagonal matrix below z.

    d is the diagonal, e2 the squared off-diagonal.  Standard LDL^T sign
    count; an exact zero pivot is nudged to keep the recurrence defined.
    """
    count = 0
    q = d[0] - z
    if q < 0.0:
        count += 1
    for k in range(1, d.shape[0]):
        if q == 0.0:
            q = _TINY
        q = d[k] - z - e2[k - 1] / q
        if q < 0.0:
            count += 1
    return count


@njit(cache=True, nogil=True)
def bisect_eigenvalue(d, e2, lo, hi, index, tol):
    """Bisect for the eigenvalue of given index (0 = smallest).

    Invariant: count(lo) <= index < count(hi).  Stops when the bracket
    width drops below tol and returns (lo, hi).
    """
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if sturm_count(d, e2, mid) >= index + 1:
            hi = mid
        else:
            lo = mid
    return lo, hi


@njit(cache=True, nogil=True)
def schur_eta(d, e2, z):
    """Schur complement of (T - z) onto the first entry, evaluated directly.

    T is the symmetric tridiagonal matrix with diagonal d and squared
    off-diagonal e2.  The nested fraction is evaluated bottom-up:
    x_{m-1} = d[m-1] - z,  x_k = d[k] - z - e2[k]/x_{k+1}, and the result
    is d[0] - z - e2[0]/x_1.
    """
    m = d.shape[0]
    if m == 1:
        return d[0] - z
    x = d[m - 1] - z
    for k in range(m - 2, 0, -1):
        if x == 0.0:
            x = _TINY
        x = d[k] - z - e2[k] / x
    if x == 0.0:
        x = _TINY
    return d[0] - z - e2[0] / x


@njit(cache=True, nogil=True)
def rational_chain(dfac, x):
    """Fill x[j] = 1 - 1/(4*dfac[j]*x[j-1]) for j >= 1; x[0] preset.

    Shared by every auxiliary comparison sequence (they differ only in
    the denominator factors dfac and the iteration direction, which the
    caller encodes by ordering dfac).  Returns the first index with a
    nonpositive value, or -1.
    """
    first_bad = -1
    for j in range(1, x.shape[0]):
        den = 4.0 * dfac[j] * x[j - 1]
        if den == 0.0:
            den = _TINY
        x[j] = 1.0 - 1.0 / den
        if x[j] <= 0.0 and first_bad < 0:
            first_bad = j
    return first_bad


@njit(cache=True, nogil=True)
def x_chain_streaming(n, a, b, c, sqrt_eta_a, xi):
    """Majorant chain without materializing arrays: terminal value, the
    minimum margin over the analytic lower bound, and the first index
    with a nonpositive entry (-1 if none).  O(1) memory for any N.
    """
    x = 1.0
    min_margin = x - 0.5 * (1.0 + sqrt_eta_a - (b / sqrt_eta_a) / (n - xi))
    first_bad = -1
    for t in range(1, n // 2):
        m = n - 2.0 * t + 1.0
        dfac = 1.0 + a - 2.0 * b / m - (1.0 - c) / (m * m)
        den = 4.0 * dfac * x
        if den == 0.0:
            den = _TINY
        x = 1.0 - 1.0 / den
        if x <= 0.0 and first_bad < 0:
            first_bad = t
        bound = 0.5 * (1.0 + sqrt_eta_a - (b / sqrt_eta_a) / (n - 2.0 * t - xi))
        margin = x - bound
        if margin < min_margin:
            min_margin = margin
    return x, min_margin, first_bad


def warmup():
    """Force JIT compilation of all kernels on tiny inputs."""
    d = np.array([0.0, 1.0, 2.0])
    e2 = np.array([0.1, 0.1])
    w = np.array([0.0, 0.1])
    g = np.ones(2)
    flow_recursion(w, g)
    sturm_count(d, e2, -1.0)
    bisect_eigenvalue(d, e2, -5.0, 5.0, 0, 1e-3)
    schur_eta(d, e2, -1.0)
    x = np.ones(3)
    rational_chain(np.ones(3), x)
    x_chain_streaming(8, 0.02, 0.14, 0.0, 0.14, 0.3)
