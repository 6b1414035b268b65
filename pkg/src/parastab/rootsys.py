"""Affine root systems of types A1 and A2, their affine Weyl groups, and parahoric combinatorics.

Finite roots are integer coefficient vectors in the simple-root basis.  An
affine Weyl element is stored canonically as ``t_lam * u`` with ``u`` an
integer matrix acting on root coordinates and ``lam`` in the coroot lattice
(identified with the root lattice, all types here being simply laced).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Iterable, Iterator

import numpy as np

SATURATION_MARGIN = 3


class RootDatumMismatch(ValueError):
    """Objects from different root data were combined."""


class PreconditionError(ValueError):
    """A documented precondition of an operation does not hold."""


class UnsaturatedError(RuntimeError):
    """An S-set enumeration could not be certified complete."""


# ---------------------------------------------------------------------------
# Finite and affine roots


@dataclass(frozen=True)
class FiniteRootDatum:
    label: str
    cartan_matrix: tuple[tuple[int, ...], ...]
    positive_roots: tuple[tuple[int, ...], ...]
    marks: tuple[int, ...]  # a_0, a_1, ..., a_l

    @property
    def rank(self) -> int:
        return len(self.cartan_matrix)

    @cached_property
    def C(self) -> np.ndarray:
        return np.array(self.cartan_matrix, dtype=np.int64)

    @cached_property
    def highest_root(self) -> tuple[int, ...]:
        return max(self.positive_roots, key=sum)

    @cached_property
    def roots(self) -> tuple[tuple[int, ...], ...]:
        return self.positive_roots + tuple(tuple(-a for a in r) for r in self.positive_roots)

    @property
    def affine_nodes(self) -> tuple[int, ...]:
        return tuple(range(self.rank + 1))

    def pair(self, alpha: Iterable[int], lam: Iterable[int]) -> int:
        """<alpha, lam^vee> for lam in the coroot lattice written in root coordinates."""
        a = np.asarray(tuple(alpha), dtype=np.int64)
        l = np.asarray(tuple(lam), dtype=np.int64)
        return int(a @ self.C @ l)

    def is_positive(self, alpha: tuple[int, ...]) -> bool:
        return alpha in self.positive_roots


@lru_cache(maxsize=None)
def root_datum(label: str) -> FiniteRootDatum:
    """Root data loadable by a plain type label: 'A1' or 'A2'."""
    label = label.strip().upper()
    if label == "A1":
        return FiniteRootDatum("A1", ((2,),), ((1,),), (1, 1))
    if label == "A2":
        return FiniteRootDatum("A2", ((2, -1), (-1, 2)), ((1, 0), (0, 1), (1, 1)), (1, 1, 1))
    raise ValueError(f"unsupported root datum {label!r}; v1 covers A1 and A2")


@dataclass(frozen=True, order=True)
class AffineRoot:
    finite_part: tuple[int, ...]
    level: int
    datum_label: str = "A1"

    def __post_init__(self) -> None:
        if self.finite_part not in root_datum(self.datum_label).roots:
            raise ValueError(f"{self.finite_part} is not a root of {self.datum_label}")

    @property
    def datum(self) -> FiniteRootDatum:
        return root_datum(self.datum_label)

    def is_positive(self) -> bool:
        return self.level > 0 or (self.level == 0 and self.datum.is_positive(self.finite_part))

    def evaluate(self, point: tuple[Fraction, ...]) -> Fraction:
        """beta(x) where point lists alpha_1(x), ..., alpha_l(x)."""
        return sum((a * c for a, c in zip(self.finite_part, point)), Fraction(0)) + self.level

    def shift(self, k: int) -> AffineRoot:
        return AffineRoot(self.finite_part, self.level + k, self.datum_label)

    def __neg__(self) -> AffineRoot:
        return AffineRoot(tuple(-a for a in self.finite_part), -self.level, self.datum_label)


def simple_affine_root(datum: FiniteRootDatum, i: int) -> AffineRoot:
    if i == 0:
        return AffineRoot(tuple(-a for a in datum.highest_root), 1, datum.label)
    e = [0] * datum.rank
    e[i - 1] = 1
    return AffineRoot(tuple(e), 0, datum.label)


# ---------------------------------------------------------------------------
# Affine Weyl group


def _reflection_matrix(datum: FiniteRootDatum, root: tuple[int, ...]) -> np.ndarray:
    l = datum.rank
    cols = []
    for j in range(l):
        e = np.zeros(l, dtype=np.int64)
        e[j] = 1
        cols.append(e - datum.pair(e, root) * np.asarray(root, dtype=np.int64))
    return np.stack(cols, axis=1)


@dataclass(frozen=True)
class AffineWeylElement:
    datum_label: str
    u: tuple[tuple[int, ...], ...]
    lam: tuple[int, ...]
    word: tuple[int, ...] = field(default=(), compare=False, hash=False)

    @property
    def datum(self) -> FiniteRootDatum:
        return root_datum(self.datum_label)

    @property
    def key(self) -> tuple:
        return (self.u, self.lam)

    @cached_property
    def _u(self) -> np.ndarray:
        return np.array(self.u, dtype=np.int64)

    @classmethod
    def identity(cls, label: str) -> AffineWeylElement:
        l = root_datum(label).rank
        return cls(label, tuple(tuple(int(i == j) for j in range(l)) for i in range(l)), (0,) * l, ())

    @classmethod
    def simple(cls, label: str, i: int) -> AffineWeylElement:
        d = root_datum(label)
        if i == 0:
            m, lam = _reflection_matrix(d, d.highest_root), d.highest_root
        elif 1 <= i <= d.rank:
            e = tuple(int(j == i - 1) for j in range(d.rank))
            m, lam = _reflection_matrix(d, e), (0,) * d.rank
        else:
            raise ValueError(f"no simple reflection s_{i} in affine {label}")
        return cls(label, tuple(map(tuple, m.tolist())), tuple(lam), (i,))

    @classmethod
    def from_word(cls, label: str, word: Iterable[int]) -> AffineWeylElement:
        w = cls.identity(label)
        for i in word:
            w = w * cls.simple(label, i)
        return w

    def _check(self, other: AffineWeylElement | AffineRoot) -> None:
        if other.datum_label != self.datum_label:
            raise RootDatumMismatch(f"{self.datum_label} vs {other.datum_label}")

    def __mul__(self, other: AffineWeylElement) -> AffineWeylElement:
        self._check(other)
        u = self._u @ other._u
        lam = self._u @ np.asarray(other.lam, dtype=np.int64) + np.asarray(self.lam, dtype=np.int64)
        return AffineWeylElement(self.datum_label, tuple(map(tuple, u.tolist())), tuple(lam.tolist()), self.word + other.word)

    def inverse(self) -> AffineWeylElement:
        ui = np.round(np.linalg.inv(self._u)).astype(np.int64)
        lam = -(ui @ np.asarray(self.lam, dtype=np.int64))
        return AffineWeylElement(self.datum_label, tuple(map(tuple, ui.tolist())), tuple(lam.tolist()), self.word[::-1])

    def act(self, beta: AffineRoot) -> AffineRoot:
        """w(alpha + n delta) = u(alpha) + (n - <u alpha, lam>) delta."""
        self._check(beta)
        ua = tuple((self._u @ np.asarray(beta.finite_part, dtype=np.int64)).tolist())
        return AffineRoot(ua, beta.level - self.datum.pair(ua, self.lam), self.datum_label)

    def length(self) -> int:
        """Number of positive affine roots sent to negative ones (closed formula)."""
        d = self.datum
        total = 0
        for alpha in d.roots:
            ua = tuple((self._u @ np.asarray(alpha, dtype=np.int64)).tolist())
            n_min = 0 if d.is_positive(alpha) else 1
            total += max(0, d.pair(ua, self.lam) + (0 if d.is_positive(ua) else 1) - n_min)
        return total

    def is_identity(self) -> bool:
        return self.key == AffineWeylElement.identity(self.datum_label).key

    def __repr__(self) -> str:
        w = "".join(f"s{i}" for i in self.word) or "e"
        return f"W[{self.datum_label}]({w})"


def act(w: AffineWeylElement, beta: AffineRoot) -> AffineRoot:
    return w.act(beta)


def inversion_set(w: AffineWeylElement) -> list[AffineRoot]:
    """N(w) by direct search; levels are bounded by the translation part."""
    d = w.datum
    bound = 2 + sum(abs(x) for x in w.lam) * 4
    out = []
    for alpha in d.roots:
        for n in range(0 if d.is_positive(alpha) else 1, bound + 1):
            beta = AffineRoot(alpha, n, d.label)
            if not w.act(beta).is_positive():
                out.append(beta)
    return out


def jw(w: AffineWeylElement) -> frozenset[int]:
    """Indices of affine simple roots alpha with w(alpha) > 0."""
    return frozenset(i for i in w.datum.affine_nodes if w.act(simple_affine_root(w.datum, i)).is_positive())


class WeylEnumerator:
    """Length-shell enumeration with a cached reduced word per element."""

    def __init__(self, label: str):
        self.label = label
        self.datum = root_datum(label)
        self._shells: list[list[AffineWeylElement]] = [[AffineWeylElement.identity(label)]]
        self._simples = [AffineWeylElement.simple(label, i) for i in self.datum.affine_nodes]
        self._alphas = [simple_affine_root(self.datum, i) for i in self.datum.affine_nodes]

    def shell(self, k: int) -> list[AffineWeylElement]:
        while len(self._shells) <= k:
            seen: dict[tuple, AffineWeylElement] = {}
            for w in self._shells[-1]:
                for i, s in enumerate(self._simples):
                    if w.act(self._alphas[i]).is_positive():
                        ws = w * s
                        seen.setdefault(ws.key, ws)
            self._shells.append(sorted(seen.values(), key=lambda x: x.word))
        return self._shells[k]

    def up_to(self, length: int) -> Iterator[AffineWeylElement]:
        for k in range(length + 1):
            yield from self.shell(k)


@lru_cache(maxsize=None)
def enumerator(label: str) -> WeylEnumerator:
    return WeylEnumerator(label)


def reduced(w: AffineWeylElement) -> AffineWeylElement:
    """Same element carrying the canonical reduced word of the enumerator."""
    for v in enumerator(w.datum_label).shell(w.length()):
        if v.key == w.key:
            return v
    raise AssertionError("element missing from its length shell")


def lower_interval(w: AffineWeylElement) -> frozenset[tuple]:
    """Keys of all v <= w, as subword products of a reduced word."""
    w = reduced(w) if w.length() != len(w.word) else w
    acc = {AffineWeylElement.identity(w.datum_label).key: AffineWeylElement.identity(w.datum_label)}
    for i in w.word:
        s = AffineWeylElement.simple(w.datum_label, i)
        for v in list(acc.values()):
            vs = v * s
            acc.setdefault(vs.key, vs)
    return frozenset(acc)


def bruhat_leq(v: AffineWeylElement, w: AffineWeylElement) -> bool:
    if v.datum_label != w.datum_label:
        raise RootDatumMismatch("Bruhat comparison across root data")
    return v.key in lower_interval(w)


# ---------------------------------------------------------------------------
# Parahoric labels and filtrations


@dataclass(frozen=True)
class ParahoricLabel:
    datum_label: str
    J: frozenset[int]

    def __post_init__(self) -> None:
        nodes = set(root_datum(self.datum_label).affine_nodes)
        if not set(self.J) < nodes:
            raise ValueError(f"J={sorted(self.J)} must be a proper subset of {sorted(nodes)}")
        object.__setattr__(self, "J", frozenset(self.J))

    @property
    def datum(self) -> FiniteRootDatum:
        return root_datum(self.datum_label)

    @cached_property
    def facet_point(self) -> tuple[Fraction, ...]:
        """alpha_i(x_J), i = 1..l, with equal weight on the nodes outside J."""
        d = self.datum
        outside = sum(d.marks[i] for i in d.affine_nodes if i not in self.J)
        return tuple(Fraction(0) if i in self.J else Fraction(1, outside) for i in range(1, d.rank + 1))

    def simple_values(self) -> tuple[Fraction, ...]:
        """alpha_i(x_J) for every affine node i = 0..l."""
        return tuple(simple_affine_root(self.datum, i).evaluate(self.facet_point) for i in self.datum.affine_nodes)

    @property
    def rank(self) -> int:
        return len(self.J)

    def name(self) -> str:
        if not self.J:
            return "I"
        return "P{" + ",".join(str(i) for i in sorted(self.J)) + "}"


def standard_parahorics(label: str) -> list[ParahoricLabel]:
    nodes = root_datum(label).affine_nodes
    out = []
    for k in range(len(nodes)):
        for J in itertools.combinations(nodes, k):
            out.append(ParahoricLabel(label, frozenset(J)))
    return out


def filtration_member(beta: AffineRoot, P: ParahoricLabel, m: int, strict: bool) -> bool:
    """U_beta in (P_J)_m^+ (strict) or in (P_J)_m (non-strict)."""
    if m < 0:
        raise PreconditionError("m must be nonnegative")
    if beta.datum_label != P.datum_label:
        raise RootDatumMismatch("root and parahoric over different data")
    v = beta.evaluate(P.facet_point)
    return v > m if strict else v >= m


# ---------------------------------------------------------------------------
# S-sets and their saturation certificate


def _solve(rows: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction] | None:
    n = len(rows)
    m = [list(r) + [b] for r, b in zip(rows, rhs)]
    for c in range(n):
        piv = next((i for i in range(c, n) if m[i][c] != 0), None)
        if piv is None:
            return None
        m[c], m[piv] = m[piv], m[c]
        for i in range(n):
            if i != c and m[i][c] != 0:
                f = m[i][c] / m[c][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[c])]
    return [m[i][n] / m[i][i] for i in range(n)]


def domain_vertices(datum: FiniteRootDatum, n: int) -> list[tuple[Fraction, ...]]:
    """Vertices of D_n = {y : alpha_i(y) <= n for all affine simple alpha_i}."""
    funcs = [simple_affine_root(datum, i) for i in datum.affine_nodes]
    verts = []
    for idx in itertools.combinations(range(len(funcs)), datum.rank):
        rows = [[Fraction(a) for a in funcs[i].finite_part] for i in idx]
        rhs = [Fraction(n - funcs[i].level) for i in idx]
        y = _solve(rows, rhs)
        if y is not None and all(f.evaluate(tuple(y)) <= n for f in funcs):
            verts.append(tuple(y))
    return sorted(set(verts))


def length_certificate(datum: FiniteRootDatum, n: int) -> int:
    """L* bounding the length of every element satisfying the S-condition at level n."""
    verts = domain_vertices(datum, n)
    if not verts:
        return 0
    centre = ParahoricLabel(datum.label, frozenset()).facet_point
    total = 0
    for alpha in datum.positive_roots:
        root = AffineRoot(alpha, 0, datum.label)
        c = root.evaluate(centre)
        total += int(max(abs(root.evaluate(v) - c) for v in verts)) + 1
    return total


def _s_condition(w: AffineWeylElement, Q: ParahoricLabel, n: int) -> bool:
    x = Q.facet_point
    return all(w.act(simple_affine_root(Q.datum, i)).evaluate(x) <= n for i in Q.datum.affine_nodes)


@dataclass(frozen=True)
class SSetResult:
    elements: tuple[AffineWeylElement, ...]
    status: str  # "saturated" | "unsaturated"
    length_bound: int
    certificate_length: int
    margin: int
    facet_point: tuple[Fraction, ...]

    @property
    def size(self) -> int:
        return len(self.elements)

    def keys(self) -> frozenset[tuple]:
        return frozenset(w.key for w in self.elements)


def s_set(Q: ParahoricLabel, n: int, length_bound: int | None = None, margin: int = SATURATION_MARGIN) -> SSetResult:
    """{w : U_{w(alpha)} not in Q_n^+ for every affine simple alpha} union {1}, with a certificate.

    Saturated means every member has length at most the certificate L* <= length_bound
    and no member occurs in the last ``margin`` shells.
    """
    if n < 0:
        raise PreconditionError("n must be nonnegative")
    L = length_certificate(Q.datum, n)
    if length_bound is None:
        length_bound = L + margin
    if length_bound < 1:
        raise PreconditionError("length_bound must be at least 1")
    en = enumerator(Q.datum_label)
    members = [AffineWeylElement.identity(Q.datum_label)]
    tail_hits = 0
    for k in range(length_bound + 1):
        for w in en.shell(k):
            if _s_condition(w, Q, n):
                if not w.is_identity():
                    members.append(w)
                if k > length_bound - margin:
                    tail_hits += 1
    status = "saturated" if (length_bound >= L and tail_hits == 0) else "unsaturated"
    return SSetResult(tuple(members), status, length_bound, L, margin, Q.facet_point)


@dataclass(frozen=True)
class LowerSetY:
    elements: tuple[AffineWeylElement, ...]

    def keys(self) -> frozenset[tuple]:
        return frozenset(w.key for w in self.elements)

    def __contains__(self, w: AffineWeylElement) -> bool:
        return w.key in self.keys()

    def __len__(self) -> int:
        return len(self.elements)

    def is_lower_set(self) -> bool:
        ks = self.keys()
        return all(lower_interval(w) <= ks for w in self.elements)


def lower_closure(ws: Iterable[AffineWeylElement]) -> LowerSetY:
    ws = list(ws)
    label = None
    keys: set[tuple] = set()
    for w in ws:
        label = w.datum_label
        keys |= lower_interval(w)
    if label is None:
        raise ValueError("empty generating set")
    top = max((w.length() for w in ws), default=0)
    elems = [v for v in enumerator(label).up_to(top) if v.key in keys]
    return LowerSetY(tuple(elems))


def y_of(Q: ParahoricLabel, n: int, length_bound: int | None = None) -> LowerSetY:
    res = s_set(Q, n, length_bound)
    if res.status != "saturated":
        raise UnsaturatedError(f"S-set for {Q.name()} at n={n} unsaturated at bound {res.length_bound} (L*={res.certificate_length})")
    return lower_closure(res.elements)


# ---------------------------------------------------------------------------
# Root-level decomposition claim


def verify_decomposition_roots(
    w: AffineWeylElement, alpha: int, J: Iterable[int], Q: ParahoricLabel, n: int, r: int
) -> bool:
    """Every beta with U_beta in (P_J)_r^+ but not (P_J')_r^+ has w(beta)(x_Q) > n + r."""
    d = w.datum
    J = frozenset(J)
    nodes = frozenset(d.affine_nodes)
    if Q.datum_label != w.datum_label:
        raise RootDatumMismatch("w and Q over different data")
    Jw = jw(w)
    if alpha not in Jw or alpha in J:
        raise PreconditionError("alpha must lie in J_w minus J")
    if not J <= Jw - {alpha}:
        raise PreconditionError("J must be contained in J_w minus {alpha}")
    if not filtration_member(w.act(simple_affine_root(d, alpha)), Q, n, strict=True):
        raise PreconditionError("U_{w(alpha)} must lie in Q_n^+")
    if J == nodes - {alpha}:
        raise PreconditionError("J must differ from the complement of {alpha}")
    if n < 0 or r < 0:
        raise PreconditionError("n and r must be nonnegative")
    xJ = ParahoricLabel(d.label, J).facet_point
    xJp = ParahoricLabel(d.label, J | {alpha}).facet_point
    xQ = Q.facet_point
    for a in d.roots:
        base = AffineRoot(a, 0, d.label)
        lo, hi = r - base.evaluate(xJ), r - base.evaluate(xJp)
        k = math.floor(lo) + 1
        while k <= hi:
            beta = base.shift(k)
            if w.act(beta).evaluate(xQ) <= n + r:
                return False
            k += 1
    return True
