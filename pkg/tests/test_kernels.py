"""Both kernel backends must agree: same values, same maximizers."""
import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tnlab import _core_py
from tnlab.kernels import available_backends

BACKENDS = available_backends()
INF = np.inf
RS = [1.0, 1.5, 2.0, 3.0, INF]


def test_compiled_backend_builds():
    # the compiled core is part of the package; a missing build is a packaging error
    assert "cython" in BACKENDS


def other_backends():
    return [b for name, b in BACKENDS.items() if name != "python"]


def sym(a):
    perms = list(itertools.permutations(range(a.ndim)))
    return sum(np.transpose(a, p) for p in perms) / len(perms)


@pytest.mark.parametrize("backend", other_backends(), ids=lambda b: b.BACKEND)
@settings(max_examples=60, deadline=None)
@given(m=st.integers(1, 5), n=st.integers(1, 4), seed=st.integers(0, 2**32 - 1))
def test_contractions_agree(backend, m, n, seed):
    rng = np.random.default_rng(seed)
    b = rng.normal(size=(m,) * n)
    zs = rng.normal(size=(n, m))
    assert np.isclose(backend.contract(b, zs), _core_py.contract(b, zs), rtol=1e-12, atol=1e-12)
    for skip in range(n):
        assert np.allclose(backend.partial_contract(b, zs, skip), _core_py.partial_contract(b, zs, skip),
                           rtol=1e-12, atol=1e-12)
    assert np.isclose(backend.poly(b, zs[0]), _core_py.poly(b, zs[0]), rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize("backend", other_backends(), ids=lambda b: b.BACKEND)
@pytest.mark.parametrize("r", RS)
@pytest.mark.parametrize("positive", [False, True])
def test_linear_max_and_project_agree(backend, r, positive):
    rng = np.random.default_rng(7)
    for _ in range(50):
        g = rng.normal(size=5) * rng.choice([0.0, 1.0], size=5)
        v1, z1 = backend.linear_max(g, r, positive)
        v2, z2 = _core_py.linear_max(g, r, positive)
        assert np.isclose(v1, v2, rtol=1e-12, atol=1e-15) and np.allclose(z1, z2, atol=1e-12)
        x = rng.normal(size=5) * 2
        assert np.allclose(backend.project(x, r, positive), _core_py.project(x, r, positive), atol=1e-12)


@pytest.mark.parametrize("backend", other_backends(), ids=lambda b: b.BACKEND)
@pytest.mark.parametrize("r", RS)
def test_alternating_ascent_agrees(backend, r):
    rng = np.random.default_rng(11)
    for n in (2, 3):
        b = rng.normal(size=(4,) * n)
        z0 = rng.uniform(-1, 1, size=(n, 4)) / 4
        out1 = backend.alternating_ascent(b, z0, r, False, 1e-12, 500, 2)
        out2 = _core_py.alternating_ascent(b, z0, r, False, 1e-12, 500, 2)
        assert np.isclose(out1[0], out2[0], rtol=1e-10)
        assert out1[2] == out2[2] and out1[3] == out2[3]


@pytest.mark.parametrize("backend", other_backends(), ids=lambda b: b.BACKEND)
@pytest.mark.parametrize("r", [1.0, 2.0, 3.0, INF])
@pytest.mark.parametrize("positive", [False, True])
def test_sym_ascent_agrees(backend, r, positive):
    rng = np.random.default_rng(13)
    for n in (2, 3):
        b = sym(rng.normal(size=(4,) * n))
        z0 = rng.uniform(-1, 1, size=4) / 4
        out1 = backend.sym_ascent(b, z0, r, positive, 1.0, 1e-12, 500, 2)
        out2 = _core_py.sym_ascent(b, z0, r, positive, 1.0, 1e-12, 500, 2)
        assert np.isclose(out1[0], out2[0], rtol=1e-9, atol=1e-12)


@pytest.mark.parametrize("backend", other_backends(), ids=lambda b: b.BACKEND)
@settings(max_examples=60, deadline=None)
@given(m=st.integers(1, 4), n=st.integers(1, 4), seed=st.integers(0, 2**32 - 1),
       cube=st.booleans(), positive=st.booleans())
def test_enumerate_agrees(backend, m, n, seed, cube, positive):
    rng = np.random.default_rng(seed)
    b = rng.normal(size=(m,) * n)
    if cube:
        r, V = INF, np.array(list(itertools.product((1.0, 0.0) if positive else (1.0, -1.0), repeat=m)))
    else:
        r, V = 1.0, (np.eye(m) if positive else np.vstack([np.eye(m), -np.eye(m)]))
    v1, z1 = backend.enumerate_multilinear(b, V, r, positive)
    v2, z2 = _core_py.enumerate_multilinear(b, V, r, positive)
    assert np.isclose(v1, v2, rtol=1e-12, atol=1e-12)
    assert np.isclose(_core_py.contract(b, z1), v1, rtol=1e-9, atol=1e-12)


def test_ascent_is_monotone_from_start():
    rng = np.random.default_rng(3)
    for _ in range(20):
        b = rng.normal(size=(3, 3, 3))
        z0 = rng.uniform(-1, 1, size=(3, 3))
        start = _core_py.contract(b, z0)
        assert _core_py.alternating_ascent(b, z0, INF, False, 1e-12, 500, 2)[0] >= start - 1e-12
        s = sym(b)
        start = _core_py.poly(s, z0[0])
        assert _core_py.sym_ascent(s, z0[0], INF, False, 1.0, 1e-12, 500, 2)[0] >= start - 1e-12
