import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from parastab.algcore import is_square_mod
from parastab.liestable import (
    DegenerateFormError,
    FinLieAlgebra,
    ParabolicDataError,
    lie_algebra,
    orbit_indicator,
    parabolic_compositions,
    res_lie,
    vanishing_check_lie,
)


@pytest.fixture(scope="module")
def sl2_3():
    return lie_algebra(2, 3)


@pytest.fixture(scope="module")
def sl2_5():
    return lie_algebra(2, 5)


def trace_pairing_ft(g: FinLieAlgebra, f: np.ndarray) -> np.ndarray:
    """FT straight from tr(XY) on matrices, with no orthogonal basis."""
    M = g.matrices
    pair = np.einsum("aij,bji->ab", M, M) % g.p
    K = np.exp(2j * np.pi * pair / g.p)
    return K @ f / math.sqrt(g.size)


def rand(g, seed):
    rng = np.random.default_rng(seed)
    return rng.normal(size=g.size) + 1j * rng.normal(size=g.size)


@pytest.mark.parametrize("p", [3, 5])
def test_ft_against_trace_form(p):
    g = lie_algebra(2, p)
    f = rand(g, p)
    np.testing.assert_allclose(g.ft(f), trace_pairing_ft(g, f), atol=1e-10)
    np.testing.assert_allclose(g.ft(f), g.ft_naive(f), atol=1e-10)


@given(st.integers(0, 10**6), st.sampled_from([3, 5]))
def test_ft_laws(seed, p):
    g = lie_algebra(2, p)
    f, h = rand(g, seed), rand(g, seed + 1)
    # FT(f * h) = FT(f) FT(h); FT(fh) = FT(f) * FT(h); FT^2 f = f(-X); Plancherel
    np.testing.assert_allclose(g.ft(g.convolve(f, h)), g.ft(f) * g.ft(h), atol=1e-8)
    np.testing.assert_allclose(g.ft(f * h), g.convolve(g.ft(f), g.ft(h)), atol=1e-8)
    np.testing.assert_allclose(g.ft(g.ft(f)), g.negate(f), atol=1e-8)
    assert np.vdot(g.ft(f), g.ft(h)) == pytest.approx(np.vdot(f, h), abs=1e-8)


def test_convolution_against_naive(sl2_3):
    f, h = rand(sl2_3, 1), rand(sl2_3, 2)
    np.testing.assert_allclose(sl2_3.convolve(f, h), sl2_3.convolve_naive(f, h), atol=1e-10)


def test_ft_of_constants(sl2_3):
    g = sl2_3
    one = np.ones(g.size)
    delta = np.zeros(g.size)
    delta[int(g.index_of(np.zeros(g.dim, dtype=np.int64)))] = 1
    np.testing.assert_allclose(g.ft(one), math.sqrt(g.size) * delta, atol=1e-12)
    np.testing.assert_allclose(g.ft(delta), one / math.sqrt(g.size), atol=1e-12)


@pytest.mark.parametrize("p", [3, 5, 7])
def test_chevalley_fibers_sl2(p):
    g = lie_algebra(2, p)
    assert g.chart_points == [(c,) for c in range(p)]
    sizes = np.bincount(g.chart_index, minlength=p)
    for c in range(p):
        # char poly x^2 + det; roots exist iff -det is a square
        if c == 0:
            want = p * p
        elif is_square_mod(-c % p, p):
            want = p * (p + 1)
        else:
            want = p * (p - 1)
        assert sizes[c] == want
    M = g.matrices
    det = (M[:, 0, 0] * M[:, 1, 1] - M[:, 0, 1] * M[:, 1, 0]) % p
    assert np.array_equal(det, g.chart_index)


def test_chart_of_sl3_f5():
    g = lie_algebra(3, 5)
    assert len(g.chart_points) == 25
    assert g.chart_image_is_full()
    assert g.chevalley(np.zeros(g.dim, dtype=np.int64)) == (0, 0)


def test_sl3_f3_form_is_degenerate():
    with pytest.raises(DegenerateFormError):
        lie_algebra(3, 3)
    g = FinLieAlgebra(3, 3, None, allow_degenerate=True)
    assert g.degenerate and len(g.chart_points) == 9


@pytest.mark.parametrize("p", [3, 5])
def test_stable_basis_idempotents(p):
    g = lie_algebra(2, p)
    basis = g.stable_basis()
    assert len(basis) == p
    for i, a in enumerate(basis):
        for j, b in enumerate(basis):
            want = a if i == j else np.zeros_like(a)
            np.testing.assert_allclose(g.convolve(a, b), want, atol=1e-9)
        assert g.is_stable(a)
        assert g.is_invariant(a)
    # the stable unit is the point mass at 0 times sqrt|g|
    unit = sum(basis)
    assert np.abs(unit).max() == pytest.approx(math.sqrt(g.size))


def test_regular_nilpotent_orbit_is_not_stable(sl2_3):
    g = sl2_3
    e = g.from_matrix(np.array([[0, 1], [0, 0]]))
    f = orbit_indicator(g, e)
    # nonzero nilpotents split into two SL2 orbits of size (p^2 - 1) / 2
    assert f.sum() == 4
    assert g.is_invariant(f)
    assert not g.is_stable(f)
    rep = vanishing_check_lie(f, g, (1, 1))
    assert not rep.passed and rep.witness is not None


@pytest.mark.parametrize("n,p", [(2, 3), (2, 5), (3, 5)])
def test_stable_functions_vanish_off_parabolics(n, p):
    g = lie_algebra(n, p)
    for comp in parabolic_compositions(n):
        for f in g.stable_basis()[:6]:
            assert vanishing_check_lie(f, g, comp).max_abs < 1e-8


def test_parabolic_compositions():
    assert parabolic_compositions(2) == [(1, 1)]
    assert sorted(parabolic_compositions(3)) == [(1, 1, 1), (1, 2), (2, 1)]


def test_res_basics(sl2_5):
    g = sl2_5
    t = FinLieAlgebra(2, 5, (1, 1))
    assert t.dim == 1
    np.testing.assert_allclose(res_lie(np.ones(g.size), g, t), 1.0)
    delta = np.zeros(g.size)
    delta[int(g.index_of(np.zeros(g.dim, dtype=np.int64)))] = 1
    r = res_lie(delta, g, t)
    assert r[0] == pytest.approx(1 / 5) and np.count_nonzero(r) == 1
    with pytest.raises(ParabolicDataError):
        res_lie(np.ones(t.size), t, g)


def test_res_commutes_with_ft_on_torus(sl2_5):
    g = sl2_5
    t = FinLieAlgebra(2, 5, (1, 1))
    f = g.stable_basis()[2]
    lhs = t.ft(res_lie(f, g, t))
    idx = t.chart_to_ambient(g)
    z = np.eye(5)[2]
    # FT(Res f_z) is z pulled back along the torus chart, scaled by |n|^{-1/2}
    rhs = z[idx][t.chart_index] / math.sqrt(5)
    np.testing.assert_allclose(lhs, rhs, atol=1e-9)
