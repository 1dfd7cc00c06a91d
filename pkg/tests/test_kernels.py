"""The pure-Python kernel fallbacks must be bit-identical to the JIT
versions: load the module a second time with numba blocked and compare.
"""

import importlib.util
import sys
from pathlib import Path

import numpy as np

from bogoflow import _kernels as kern_jit

KERNEL_PATH = Path(kern_jit.__file__)


def _load_fallback():
    sys.modules["numba"] = None  # force ImportError inside the module
    try:
        spec = importlib.util.spec_from_file_location("kern_fallback", KERNEL_PATH)
        module = importlib.util.module_from_spec(spec)
        spec.loader.exec_module(module)
    finally:
        del sys.modules["numba"]
    assert not module.HAVE_NUMBA
    return module


def test_fallback_matches_jit_bitwise():
    kern_py = _load_fallback()
    rng = np.random.default_rng(0)
    d = np.sort(rng.uniform(0.0, 5.0, 200))
    e2 = rng.uniform(0.0, 1.0, 199)
    w = np.concatenate(([0.0], rng.uniform(0.0, 0.24, 99)))

    for z in (-3.0, -0.5, 1.7):
        assert kern_py.sturm_count(d, e2, z) == kern_jit.sturm_count(d, e2, z)
        assert kern_py.schur_eta(d, e2, z) == kern_jit.schur_eta(d, e2, z)

    g1, g2 = np.ones(w.size), np.ones(w.size)
    assert kern_py.flow_recursion(w, g1) == kern_jit.flow_recursion(w, g2)
    np.testing.assert_array_equal(g1, g2)

    dfac = 1.0 + rng.uniform(0.01, 0.3, 50)
    x1, x2 = np.ones(50), np.ones(50)
    assert kern_py.rational_chain(dfac, x1) == kern_jit.rational_chain(dfac, x2)
    np.testing.assert_array_equal(x1, x2)

    args = (1000, 0.0804, 0.3565, 0.0172, 0.2698, 0.4472)
    assert kern_py.x_chain_streaming(*args) == kern_jit.x_chain_streaming(*args)


def test_bisect_eigenvalue_agrees():
    kern_py = _load_fallback()
    d = np.array([0.0, 1.0, 2.5, 4.0])
    e2 = np.array([0.3, 0.2, 0.5])
    got_py = kern_py.bisect_eigenvalue(d, e2, -5.0, 10.0, 1, 1e-12)
    got_jit = kern_jit.bisect_eigenvalue(d, e2, -5.0, 10.0, 1, 1e-12)
    assert got_py == got_jit
