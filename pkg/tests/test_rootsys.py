from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from parastab.rootsys import (
    AffineRoot,
    AffineWeylElement,
    ParahoricLabel,
    PreconditionError,
    RootDatumMismatch,
    bruhat_leq,
    enumerator,
    filtration_member,
    inversion_set,
    jw,
    lower_closure,
    reduced,
    s_set,
    simple_affine_root,
    standard_parahorics,
    verify_decomposition_roots,
    y_of,
)

W = AffineWeylElement


def words(label):
    top = 1 if label == "A1" else 2
    return st.lists(st.integers(0, top), max_size=8)


@given(st.sampled_from(["A1", "A2"]), st.data())
def test_group_laws(label, data):
    a = W.from_word(label, data.draw(words(label)))
    b = W.from_word(label, data.draw(words(label)))
    c = W.from_word(label, data.draw(words(label)))
    assert ((a * b) * c).key == (a * (b * c)).key
    assert (a * a.inverse()).is_identity()
    assert a.length() == a.inverse().length()
    assert a.length() <= len(a.word)
    assert a.length() % 2 == len(a.word) % 2
    assert (a * b).length() <= a.length() + b.length()


@given(st.sampled_from(["A1", "A2"]), st.data())
def test_length_counts_inversions(label, data):
    w = W.from_word(label, data.draw(words(label)))
    assert w.length() == len(inversion_set(w))
    r = reduced(w)
    assert r.key == w.key and len(r.word) == w.length()


@given(st.sampled_from(["A1", "A2"]), st.data())
def test_action_is_a_homomorphism(label, data):
    a = W.from_word(label, data.draw(words(label)))
    b = W.from_word(label, data.draw(words(label)))
    for i in (0, 1):
        beta = simple_affine_root(a.datum, i).shift(data.draw(st.integers(-2, 2)))
        assert (a * b).act(beta) == a.act(b.act(beta))
        assert a.inverse().act(a.act(beta)) == beta


def test_simple_reflections():
    a1 = AffineRoot((1,), 0, "A1")
    assert W.simple("A1", 0).act(a1) == AffineRoot((-1,), 2, "A1")
    assert W.simple("A1", 1).act(a1) == -a1
    for label, top in (("A1", 1), ("A2", 2)):
        for i in range(top + 1):
            s = W.simple(label, i)
            assert (s * s).is_identity()
            assert s.length() == 1
    # braid relation in affine A2
    assert W.from_word("A2", [0, 1, 0]).key == W.from_word("A2", [1, 0, 1]).key
    with pytest.raises(ValueError):
        W.simple("A1", 2)
    with pytest.raises(RootDatumMismatch):
        W.simple("A1", 0) * W.simple("A2", 0)


def test_shell_sizes():
    # affine A1 is infinite dihedral; affine A2 has 3k elements of length k >= 1
    assert [len(enumerator("A1").shell(k)) for k in range(6)] == [1, 2, 2, 2, 2, 2]
    assert [len(enumerator("A2").shell(k)) for k in range(6)] == [1, 3, 6, 9, 12, 15]


def brute_shells(label, top, depth):
    gens = [W.simple(label, i) for i in range(top + 1)]
    seen = {W.identity(label).key: 0}
    frontier = [W.identity(label)]
    for k in range(1, depth + 1):
        nxt = []
        for w in frontier:
            for s in gens:
                v = w * s
                if v.key not in seen:
                    seen[v.key] = k
                    nxt.append(v)
        frontier = nxt
    return seen


@pytest.mark.parametrize("label,top", [("A1", 1), ("A2", 2)])
def test_shells_match_word_bfs(label, top):
    bfs = brute_shells(label, top, 5)
    for k in range(6):
        assert {w.key for w in enumerator(label).shell(k)} == {key for key, d in bfs.items() if d == k}


def test_jw():
    assert jw(W.identity("A2")) == frozenset({0, 1, 2})
    assert jw(W.from_word("A1", [1, 0])) == frozenset({1})
    assert jw(W.simple("A1", 0)) == frozenset({1})


def test_bruhat():
    s1, sts = W.from_word("A1", [1]), W.from_word("A1", [0, 1, 0])
    assert bruhat_leq(s1, sts)
    assert not bruhat_leq(sts, s1)
    assert not bruhat_leq(W.from_word("A1", [0, 1]), W.from_word("A1", [1, 0]))


@given(st.sampled_from(["A1", "A2"]), st.data())
def test_bruhat_partial_order(label, data):
    v = W.from_word(label, data.draw(words(label)))
    w = W.from_word(label, data.draw(words(label)))
    assert bruhat_leq(W.identity(label), w)
    assert bruhat_leq(w, w)
    if bruhat_leq(v, w) and bruhat_leq(w, v):
        assert v.key == w.key
    if bruhat_leq(v, w):
        assert v.length() <= w.length()


def test_facet_points():
    names = {P.name(): P.facet_point for P in standard_parahorics("A1")}
    assert names == {"I": (Fraction(1, 2),), "P{0}": (Fraction(1),), "P{1}": (Fraction(0),)}
    assert len(standard_parahorics("A2")) == 7
    for P in standard_parahorics("A2"):
        vals = P.simple_values()
        assert sum(vals) == 1
        assert all((v == 0) == (i in P.J) for i, v in enumerate(vals))
    with pytest.raises(ValueError):
        ParahoricLabel("A1", frozenset({0, 1}))


@pytest.mark.parametrize("label", ["A1", "A2"])
def test_s_set_of_plus_is_trivial(label):
    for P in standard_parahorics(label):
        res = s_set(P, 0)
        assert res.size == 1 and res.elements[0].is_identity()
        assert res.status == "saturated"


def a1_oracle(x: Fraction, n: int) -> int:
    """Count w in affine A1 acting on the line by t -> e*t + 2k with w^{-1}x in [1-n, n]."""
    count = 1 if not (1 - n <= x <= n) else 0
    for e in (1, -1):
        for k in range(-n - 3, n + 4):
            y = e * x + 2 * k
            if 1 - n <= y <= n:
                count += 1
    return count


@pytest.mark.parametrize("n", range(5))
def test_s_set_sizes_a1_against_line_model(n):
    for P in standard_parahorics("A1"):
        res = s_set(P, n)
        assert res.status == "saturated"
        assert res.size == a1_oracle(P.facet_point[0], n), (P.name(), n)


def test_s_set_sizes_a2_frozen():
    sizes = {P.name(): [s_set(P, n).size for n in range(3)] for P in standard_parahorics("A2")}
    assert sizes["I"] == [1, 4, 25]
    assert sizes["P{1}"] == [1, 6, 30]
    assert sizes["P{1,2}"] == [1, 12, 42]


def test_s_set_flags_short_bound():
    I = ParahoricLabel("A2", frozenset())
    assert s_set(I, 2, length_bound=2).status == "unsaturated"
    with pytest.raises(PreconditionError):
        s_set(I, -1)


@pytest.mark.parametrize("label", ["A1", "A2"])
def test_y_is_lower_set(label):
    for P in standard_parahorics(label):
        for n in range(3):
            Y = y_of(P, n)
            assert Y.is_lower_set()
            assert s_set(P, n).keys() <= Y.keys()


def test_lower_closure():
    Y = lower_closure([W.from_word("A1", [0, 1])])
    assert len(Y) == 4
    assert W.simple("A1", 1) in Y


def test_decomposition_preconditions():
    I = ParahoricLabel("A1", frozenset())
    e = W.identity("A1")
    with pytest.raises(PreconditionError):
        verify_decomposition_roots(e, 0, {0}, I, 1, 0)
    with pytest.raises(PreconditionError):
        verify_decomposition_roots(e, 0, {1}, I, 1, 0)
    with pytest.raises(PreconditionError):
        verify_decomposition_roots(e, 0, set(), I, 1, 0)
    assert verify_decomposition_roots(e, 0, set(), I, 0, 1)
    P1 = ParahoricLabel("A1", frozenset({1}))
    assert verify_decomposition_roots(e, 0, set(), P1, 0, 0)
    assert verify_decomposition_roots(e, 1, set(), I, 0, 0)


def test_decomposition_grid_a1_holds():
    from parastab.checks import decomposition_grid

    rows = list(decomposition_grid("A1", 4, 2, 1))
    assert len(rows) > 50
    assert all(ok for *_, ok in rows)


def test_jw_follows_positivity_definition():
    # s0 s1 sends alpha_0 to 3 alpha_0 + 2 alpha_1 > 0 and alpha_1 to -(alpha_1 + 2 alpha_0) < 0
    w = W.from_word("A1", [0, 1])
    assert jw(w) == frozenset({0})
    assert all((i in jw(w)) == w.act(simple_affine_root(w.datum, i)).is_positive() for i in (0, 1))


@pytest.mark.parametrize("label,depth", [("A1", 8), ("A2", 5)])
def test_jw_is_everything_only_at_identity(label, depth):
    full = frozenset(range(3 if label == "A2" else 2))
    for w in enumerator(label).up_to(depth):
        assert (jw(w) == full) == w.is_identity()


def test_filtration_membership():
    a1 = AffineRoot((1,), 0, "A1")
    P1, P0 = ParahoricLabel("A1", frozenset({1})), ParahoricLabel("A1", frozenset({0}))
    assert not filtration_member(a1, P1, 0, strict=True)
    assert filtration_member(a1, P1, 0, strict=False)
    assert filtration_member(a1, P0, 0, strict=True)
    assert not filtration_member(a1.shift(1), P1, 1, strict=True)
    assert filtration_member(a1.shift(1), P1, 0, strict=True)
