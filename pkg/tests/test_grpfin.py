import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from parastab.grpfin import (
    CapacityError,
    ClassFunction,
    StructureError,
    block_parabolic,
    character_table,
    convolve,
    convolve_naive,
    enumerate_group,
    gamma_scalar,
    inner,
    orthogonality_residual,
    parabolic_res_group,
    sl_order,
    table_csv,
)


@pytest.fixture(scope="module")
def sl2f3():
    return enumerate_group(2, 3)


@pytest.mark.parametrize(
    "args,order,classes,degrees",
    [
        ((2, 3), 24, 7, [1, 1, 1, 2, 2, 2, 3]),
        ((2, 5), 120, 9, [1, 2, 2, 3, 3, 4, 4, 5, 6]),
        ((2, 7), 336, 11, [1, 3, 3, 4, 4, 6, 6, 6, 7, 8, 8]),
        ((3, 3), 5616, 12, [1, 12, 13, 16, 16, 16, 16, 26, 26, 26, 27, 39]),
    ],
)
def test_tables(args, order, classes, degrees):
    G = enumerate_group(*args)
    assert G.order == order == sl_order(*args)
    assert G.num_classes == classes
    assert int(G.class_sizes.sum()) == order
    chars = character_table(G)
    assert sorted(c.degree for c in chars) == degrees
    assert orthogonality_residual(chars) < 1e-9


def test_residue_ring_group():
    G = enumerate_group(2, 3, 2)
    assert G.order == 648 == sl_order(2, 3, 2)
    assert G.num_classes == 25
    chars = character_table(G)
    assert sum(c.degree**2 for c in chars) == 648
    assert orthogonality_residual(chars) < 1e-9


def test_capacity_guard():
    with pytest.raises(CapacityError):
        enumerate_group(2, 3, 3, capacity=1000)


def test_lookup_and_products(sl2f3):
    G = sl2f3
    ids = np.arange(G.order)
    assert np.array_equal(G.index(G.elements), ids)
    assert np.all(G.mul(ids, G.inv(ids)) == G.identity)
    assert G.index(np.array([1, 1, 1, 1])).item() == -1  # det 0
    assert G.exponent == 12


@given(st.integers(0, 23), st.integers(0, 23), st.integers(0, 23))
def test_associativity(a, b, c):
    G = enumerate_group(2, 3)
    assert G.mul(G.mul(a, b), c) == G.mul(a, G.mul(b, c))
    # classes are conjugation invariant
    assert G.class_of[G.mul(G.mul(b, a), G.inv(b))] == G.class_of[a]


def random_cf(G, seed):
    rng = np.random.default_rng(seed)
    return ClassFunction(G, rng.normal(size=G.num_classes) + 1j * rng.normal(size=G.num_classes))


@given(st.integers(0, 10**6))
def test_convolution_matches_naive(seed):
    G = enumerate_group(2, 3)
    f, g = random_cf(G, seed), random_cf(G, seed + 1)
    np.testing.assert_allclose(convolve(f, g).expand(), convolve_naive(f, g), atol=1e-10)


@given(st.integers(0, 10**6))
def test_gamma_is_multiplicative(seed):
    G = enumerate_group(2, 3)
    chars = character_table(G)
    f, g = random_cf(G, seed), random_cf(G, seed + 7)
    fg = convolve(f, g)
    for chi in chars:
        assert abs(gamma_scalar(fg, chi) - gamma_scalar(f, chi) * gamma_scalar(g, chi)) < 1e-8


def test_characters_are_central_idempotents(sl2f3):
    G = sl2f3
    chars = character_table(G)
    for chi in chars:
        e = chi.values * (chi.degree / G.order)
        np.testing.assert_allclose(convolve(e, e).values, e.values, atol=1e-12)
        assert abs(inner(chi.values, chi.values) - 1) < 1e-12
    delta = ClassFunction.point_mass(G)
    f = random_cf(G, 3)
    np.testing.assert_allclose(convolve(delta, f).values, f.values, atol=1e-12)
    for chi in chars:
        assert abs(gamma_scalar(delta, chi) - 1) < 1e-12


def test_exact_values_agree(sl2f3):
    for chi in character_table(sl2f3):
        np.testing.assert_allclose([complex(v) for v in chi.exact], chi.values.values, atol=1e-9)


def test_from_elements_rejects_non_class_functions(sl2f3):
    vals = np.zeros(sl2f3.order)
    vals[1] = 1.0
    if sl2f3.class_sizes[sl2f3.class_of[1]] > 1:
        with pytest.raises(StructureError):
            ClassFunction.from_elements(sl2f3, vals)
    with pytest.raises(ValueError):
        ClassFunction(sl2f3, np.zeros(3))


def test_parabolic_restriction(sl2f3):
    G = sl2f3
    B = block_parabolic(G, (1, 1))
    B.check()
    assert len(B.levi) == 2 and len(B.unipotent) == 3
    ids = np.arange(G.order)
    ones = parabolic_res_group(np.ones(G.order), ids, B)
    np.testing.assert_allclose(ones, 1.0)
    delta = ClassFunction.point_mass(G).expand()
    res = parabolic_res_group(delta, ids, B)
    e = list(B.levi).index(G.identity)
    assert res[e] == pytest.approx(1 / 3)
    assert np.count_nonzero(res) == 1
    with pytest.raises(StructureError):
        block_parabolic(G, (1, 2))


def test_table_csv(sl2f3):
    text = table_csv(character_table(sl2f3))
    rows = text.strip().splitlines()
    assert len(rows) == 1 + 7
    assert rows[0].startswith("class_rep,size,")
    assert table_csv(character_table(sl2f3, seed=5)) == text
