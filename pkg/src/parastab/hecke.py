"""A desk-scale model of SL_2(Q_p): compact open subgroups, coset functions and their
exact convolution, truncated limit elements and the averaging operators [A^Y_h].

Elements of SL_2(Z[1/p]) are stored as ``(e, a, b, c, d)`` with integer entries,
meaning the matrix [[a, b], [c, d]] / p^e.  A compact open subgroup is a threshold
descriptor B = {val(a-1) >= lt, val(b) >= lb, val(c) >= lc, val(d-1) >= lt}, possibly
conjugated.  The coset xB is keyed by the pair of affine lattices
(x e1 + x M1, x e2 + x M2), each put in a canonical Hermite form over Z_p.
All values are exact elements of Q(zeta_E).
"""

from __future__ import annotations

import itertools
import json
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Iterable, Mapping

import numpy as np

from .algcore import Cyc, primitive_root_mod_p2
from .dlstable import dual_chart, sl2_data
from .grpfin import CapacityError, ClassFunction, StructureError, enumerate_group, gamma_scalar
from .rootsys import AffineWeylElement, LowerSetY, ParahoricLabel, jw, lower_closure, reduced, y_of

ORBIT_CAP = 200_000
_INF = 1 << 30

PARAHORICS = ("I", "hs0", "hs1")  # hs1 = G(O) (J = {1}), hs0 = its conjugate by diag(1, p) (J = {0})
_J = {"I": (), "hs0": (0,), "hs1": (1,)}
_SIGN = {"I": -1, "hs0": 1, "hs1": 1}  # (-1)^{r(G) - r(P)} for SL_2


class ArgumentError(ValueError):
    """A precondition on the input of a Hecke-window operation failed."""


# ---------------------------------------------------------------------------
# Exact elements of SL_2(Z[1/p])

PMat = tuple[int, int, int, int, int]


def _vp(n: int, p: int) -> int:
    if n == 0:
        return _INF
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


def _normalize(m: PMat, p: int) -> PMat:
    e, a, b, c, d = m
    while e > 0 and a % p == 0 and b % p == 0 and c % p == 0 and d % p == 0:
        a, b, c, d, e = a // p, b // p, c // p, d // p, e - 1
    return (e, a, b, c, d)


def pm_mul(x: PMat, y: PMat, p: int) -> PMat:
    e1, a1, b1, c1, d1 = x
    e2, a2, b2, c2, d2 = y
    return _normalize((e1 + e2, a1 * a2 + b1 * c2, a1 * b2 + b1 * d2, c1 * a2 + d1 * c2, c1 * b2 + d1 * d2), p)


def pm_inv(x: PMat) -> PMat:
    e, a, b, c, d = x
    return (e, d, -b, -c, a)


def pm_conj(y: PMat, x: PMat, p: int) -> PMat:
    """y x y^{-1}."""
    return pm_mul(pm_mul(y, x, p), pm_inv(y), p)


def pm_from(entries: Iterable[Fraction | int], p: int) -> PMat:
    """From four rationals with p-power denominators."""
    fr = [Fraction(v) for v in entries]
    e = 0
    for v in fr:
        den = v.denominator
        k = _vp(den, p)
        if den != p**k:
            raise ArgumentError("denominators must be powers of p")
        e = max(e, k)
    ints = [int(v * p**e) for v in fr]
    m = _normalize((e, *ints), p)
    if m[1] * m[4] - m[2] * m[3] != p ** (2 * m[0]):
        raise ArgumentError("determinant must be 1")
    return m


def pm_entries(x: PMat, p: int) -> tuple[Fraction, ...]:
    e = x[0]
    return tuple(Fraction(v, p**e) for v in x[1:])


def identity() -> PMat:
    return (0, 1, 0, 0, 1)


def upper(t: Fraction | int, p: int) -> PMat:
    return pm_from((1, t, 0, 1), p)


def lower(t: Fraction | int, p: int) -> PMat:
    return pm_from((1, 0, t, 1), p)


def s1_matrix() -> PMat:
    return (0, 0, 1, -1, 0)


def s0_matrix(p: int) -> PMat:
    return pm_from((0, Fraction(-1, p), p, 0), p)


def weyl_matrix(w: AffineWeylElement, p: int) -> PMat:
    m = identity()
    for i in reduced(w).word:
        m = pm_mul(m, s0_matrix(p) if i == 0 else s1_matrix(), p)
    return m


def root_element(i: int, t: int, p: int) -> PMat:
    """x_{alpha_i}(t): u(t) for alpha_1, v(p t) for alpha_0 = -alpha_1 + delta."""
    return upper(t, p) if i == 1 else lower(p * t, p)


def d_conj_inverse(x: PMat, p: int) -> tuple[Fraction, ...]:
    """Entries of diag(1,p)^{-1} x diag(1,p) = [[a, p b], [c / p, d]]."""
    a, b, c, d = pm_entries(x, p)
    return (a, b * p, c / p, d)


def mod_entries(entries: Iterable[Fraction], p: int, k: int) -> tuple[int, ...]:
    """Reduce p-integral rationals mod p^k."""
    m = p**k
    out = []
    for v in entries:
        if v.denominator % p == 0:
            raise ArgumentError("entry is not p-integral")
        out.append(v.numerator * pow(v.denominator, -1, m) % m)
    return tuple(out)


# ---------------------------------------------------------------------------
# Canonical keys of affine lattices


def _affine_key(v0: int, v1: int, c1: tuple[int, int], c2: tuple[int, int], s: int, p: int) -> tuple:
    """Canonical form of (v + span_{Z_p}(c1, c2)) / p^s for integer data."""
    a0, a1 = _vp(c1[0], p), _vp(c2[0], p)
    c = c1 if a0 <= a1 else c2
    alpha = min(a0, a1)
    D = _vp(c1[0] * c2[1] - c2[0] * c1[1], p)
    beta = D - alpha
    pa, pb = p**alpha, p**beta
    u = c[0] // pa
    x = (c[1] * pow(u, -1, pb)) % pb if beta > 0 else 0
    v0r = v0 % pa
    k = (v0 - v0r) // pa
    v1r = (v1 - k * x) % pb
    m = min(alpha, beta, _vp(x, p), _vp(v0r, p), _vp(v1r, p))
    if m:
        pm = p**m
        return (alpha - m, beta - m, x // pm, v0r // pm, v1r // pm, s - m)
    return (alpha, beta, x, v0r, v1r, s)


# ---------------------------------------------------------------------------
# Subgroups


@dataclass(frozen=True)
class Descriptor:
    """Thresholds (lt, lb, lc): val(a-1), val(d-1) >= lt, val(b) >= lb, val(c) >= lc."""

    lt: int
    lb: int
    lc: int

    def measure(self, p: int) -> Fraction:
        """Haar measure normalized by mu(I^+) = 1."""
        s = self.lb + self.lc
        if s == 0 and self.lt == 0:
            return Fraction(p * p - 1)
        if s >= 1 and s >= self.lt >= 0:
            tor = Fraction(p - 1) if self.lt == 0 else Fraction(p) ** (1 - self.lt)
            return Fraction(p) ** (1 - s) * tor
        raise StructureError(f"unsupported descriptor {self}")

    def contains(self, x: PMat, p: int) -> bool:
        e, a, b, c, d = x
        pe = p**e
        return (
            _vp(a - pe, p) >= self.lt + e
            and _vp(d - pe, p) >= self.lt + e
            and _vp(b, p) >= self.lb + e
            and _vp(c, p) >= self.lc + e
        )

    def generators(self, p: int) -> list[PMat]:
        tau = primitive_root_mod_p2(p) if self.lt == 0 else 1 + p**self.lt
        s = self.lb + self.lc
        if s == 0:
            dd, gamma = 1, tau - 1
        else:
            dd = pow(tau, -1, p**s)
            gamma = (tau * dd - 1) // p**s
        b = Fraction(p) ** self.lb
        c = Fraction(p) ** self.lc * gamma
        return [upper(b, p), lower(Fraction(p) ** self.lc, p), pm_from((tau, b, c, dd), p)]

    def key(self, y: PMat, p: int) -> tuple:
        e, A, B, C, D = y
        m = min(self.lt, self.lb, self.lc, 0)
        s = e - m
        sh = lambda l: p ** (l - m)  # noqa: E731
        f0 = p ** (-m)
        k1 = _affine_key(f0 * A, f0 * C, (sh(self.lt) * A, sh(self.lt) * C), (sh(self.lc) * B, sh(self.lc) * D), s, p)
        k2 = _affine_key(f0 * B, f0 * D, (sh(self.lb) * A, sh(self.lb) * C), (sh(self.lt) * B, sh(self.lt) * D), s, p)
        return (k1, k2)

    def check(self, p: int) -> None:
        """Generators lie in the set, preserve the column lattices and multiply inside it."""
        gens = self.generators(p)
        for g in gens:
            if not self.contains(g, p):
                raise StructureError(f"generator {g} not in {self}")
            if self.key(g, p) != self.key(identity(), p):
                raise StructureError(f"{self}: generator moves the base coset")
        for g, h in itertools.product(gens, repeat=2):
            if not self.contains(pm_mul(g, h, p), p) or not self.contains(pm_mul(g, pm_inv(h), p), p):
                raise StructureError(f"{self} is not closed under products")


@dataclass(frozen=True)
class Level:
    """The compact open subgroup g B g^{-1}."""

    desc: Descriptor
    conj: PMat = (0, 1, 0, 0, 1)
    p: int = 3

    def key(self, x: PMat) -> tuple:
        return self.desc.key(pm_mul(x, self.conj, self.p), self.p)

    def contains(self, x: PMat) -> bool:
        return self.desc.contains(pm_mul(pm_mul(pm_inv(self.conj), x, self.p), self.conj, self.p), self.p)

    @cached_property
    def generators(self) -> list[PMat]:
        return [pm_conj(self.conj, g, self.p) for g in self.desc.generators(self.p)]

    def measure(self) -> Fraction:
        return self.desc.measure(self.p)

    def conjugate(self, y: PMat) -> Level:
        return Level(self.desc, pm_mul(y, self.conj, self.p), self.p)


@lru_cache(maxsize=None)
def _orbit_cached(acting: Level, target: Level, start: PMat) -> tuple[PMat, ...]:
    """Representatives of the acting-orbit of the coset start*target, in BFS order."""
    seen = {target.key(start): start}
    queue = deque([start])
    gens = acting.generators
    p = acting.p
    while queue:
        x = queue.popleft()
        for g in gens:
            y = pm_mul(g, x, p)
            k = target.key(y)
            if k not in seen:
                seen[k] = y
                queue.append(y)
                if len(seen) > ORBIT_CAP:
                    raise CapacityError(f"orbit exceeds {ORBIT_CAP} cosets")
    return tuple(seen.values())


def orbit(acting: Level, target: Level, start: PMat | None = None) -> tuple[PMat, ...]:
    return _orbit_cached(acting, target, identity() if start is None else start)


def coset_reps(big: Level, small: Level) -> tuple[PMat, ...]:
    """Representatives of big/small for small a subgroup of big."""
    return orbit(big, small)


# ---------------------------------------------------------------------------
# Coset functions


@dataclass
class CosetFunction:
    """sum over keys of value * 1_{rep * level}; right-invariant under ``level``."""

    level: Level
    E: int
    terms: dict[tuple, tuple[PMat, Cyc]] = field(default_factory=dict)

    @property
    def p(self) -> int:
        return self.level.p

    def add_term(self, rep: PMat, value: Cyc) -> None:
        k = self.level.key(rep)
        if k in self.terms:
            r0, v0 = self.terms[k]
            v = v0 + value
            if v.is_zero():
                del self.terms[k]
            else:
                self.terms[k] = (r0, v)
        elif not value.is_zero():
            self.terms[k] = (rep, value)

    @classmethod
    def indicator(cls, level: Level, E: int, scale: Fraction | int = 1) -> CosetFunction:
        f = cls(level, E)
        f.add_term(identity(), Cyc.rational(E, Fraction(scale)))
        return f

    @classmethod
    def delta(cls, level: Level, E: int) -> CosetFunction:
        """mu(K)^{-1} 1_K."""
        return cls.indicator(level, E, 1 / level.measure())

    def __call__(self, x: PMat) -> Cyc:
        k = self.level.key(x)
        return self.terms[k][1] if k in self.terms else Cyc.zero(self.E)

    def _same_level(self, other: CosetFunction) -> None:
        if other.level.desc != self.level.desc or self.level.key(other.level.conj) != self.level.key(self.level.conj):
            raise ArgumentError("coset functions live on different levels")

    def __add__(self, other: CosetFunction) -> CosetFunction:
        out = self.copy()
        if other.level != self.level:
            self._same_level(other)
        for rep, v in other.terms.values():
            out.add_term(rep, v)
        return out

    def __sub__(self, other: CosetFunction) -> CosetFunction:
        return self + other.scale(-1)

    def scale(self, c: Fraction | int | Cyc) -> CosetFunction:
        out = CosetFunction(self.level, self.E)
        for rep, v in self.terms.values():
            out.add_term(rep, v * c if isinstance(c, Cyc) else v.scale(Fraction(c)))
        return out

    def copy(self) -> CosetFunction:
        return CosetFunction(self.level, self.E, dict(self.terms))

    def ad(self, y: PMat) -> CosetFunction:
        """Ad_y(h)(x) = h(y^{-1} x y)."""
        lev = self.level.conjugate(y)
        out = CosetFunction(lev, self.E)
        for rep, v in self.terms.values():
            out.add_term(pm_conj(y, rep, self.p), v)
        return out

    def left_translate(self, g: PMat) -> CosetFunction:
        """x -> h(g^{-1} x)."""
        out = CosetFunction(self.level, self.E)
        for rep, v in self.terms.values():
            out.add_term(pm_mul(g, rep, self.p), v)
        return out

    def is_zero(self) -> bool:
        return not self.terms

    def equals(self, other: CosetFunction) -> bool:
        """Exact equality (both re-keyed on self.level)."""
        if other.level.desc != self.level.desc:
            return False
        mine = {k: v for k, (_, v) in self.terms.items()}
        theirs: dict[tuple, Cyc] = {}
        for rep, v in other.terms.values():
            k = self.level.key(rep)
            theirs[k] = theirs.get(k, Cyc.zero(self.E)) + v
        theirs = {k: v for k, v in theirs.items() if not v.is_zero()}
        return mine == theirs

    def max_abs_difference(self, other: CosetFunction) -> float:
        diff = self - other
        return max((abs(complex(v)) for _, v in diff.terms.values()), default=0.0)

    def to_json(self) -> dict:
        def fr(x: Fraction) -> str:
            return f"{x.numerator}/{x.denominator}"

        rows = []
        for rep, v in sorted(self.terms.values(), key=lambda t: repr(self.level.key(t[0]))):
            z = complex(v)
            rows.append({"rep": [fr(x) for x in pm_entries(rep, self.p)], "re": z.real, "im": z.imag})
        d = self.level.desc
        return {
            "descriptor": {"lt": d.lt, "lb": d.lb, "lc": d.lc},
            "conjugator": [fr(x) for x in pm_entries(self.level.conj, self.p)],
            "p": self.p,
            "support": rows,
        }


def convolve(h: CosetFunction, f: CosetFunction) -> CosetFunction:
    """Exact h * f; the result is right-invariant under f.level.

    1_{xA} * 1_{gB} = mu(A cap gBg^{-1}) sum_{a in A/(A cap gBg^{-1})} 1_{x a g B}.
    """
    A, B = h.level, f.level
    out = CosetFunction(B, h.E)
    muA = A.measure()
    for g, d in f.terms.values():
        reps = orbit(A, B, g)
        w = muA / len(reps)
        for x, c in h.terms.values():
            cd = (c * d).scale(w)
            for a in reps:
                out.add_term(pm_mul(x, a, h.p), cd)
    return out


# ---------------------------------------------------------------------------
# The model: parahorics, filtrations and measures


def parahoric_descriptor(P: str, r: int, plus: bool) -> Descriptor:
    """P_r (plus=False) or P_r^+ (plus=True) at integral depth r >= 0."""
    if P == "I":
        return Descriptor(r + 1, r, r + 1) if plus else Descriptor(r, r, r + 1)
    if P == "hs1":
        return Descriptor(r + 1, r + 1, r + 1) if plus else Descriptor(r, r, r)
    if P == "hs0":
        return Descriptor(r + 1, r, r + 2) if plus else Descriptor(r, r - 1, r + 1)
    raise ArgumentError(f"unknown parahoric {P!r}")


def parahoric_label(P: str) -> ParahoricLabel:
    return ParahoricLabel("A1", _J[P])


@dataclass(frozen=True)
class HeckeWindow:
    """SL_2(Q_p) at depths <= r with every descriptor threshold at most N - 1."""

    p: int = 3
    r: int = 0
    N: int | None = None

    def __post_init__(self) -> None:
        if self.p not in (3, 5):
            raise ArgumentError("p must be 3 or 5")
        if self.r not in (0, 1):
            raise ArgumentError("r must be 0 or 1")
        if self.N is None:
            object.__setattr__(self, "N", self.r + 3)

    @property
    def E(self) -> int:
        return sl2_data(self.p).G.exponent

    def level(self, P: str, depth: int, plus: bool) -> Level:
        d = parahoric_descriptor(P, depth, plus)
        top = max(d.lt, d.lb, d.lc)
        if top > self.N - 1:
            raise CapacityError(f"{P} at depth {depth}{'+' if plus else ''} needs window level {top + 1} > N = {self.N}")
        return Level(d, identity(), self.p)

    def plus(self, P: str, depth: int | None = None) -> Level:
        return self.level(P, self.r if depth is None else depth, True)

    def group(self, P: str, depth: int = 0) -> Level:
        return self.level(P, depth, False)

    def measure(self, P: str, depth: int, plus: bool) -> Fraction:
        return self.level(P, depth, plus).measure()

    def delta(self, P: str, depth: int | None = None) -> CosetFunction:
        return CosetFunction.delta(self.plus(P, depth), self.E)

    def c_mu(self, P: str, r: int | None = None) -> float:
        """mu(P_r^+) |g_{P_r}|^{1/2}."""
        r = self.r if r is None else r
        size = self.p if P == "I" else self.p**3
        return float(parahoric_descriptor(P, r, True).measure(self.p)) * size**0.5

    def c_mu_squared(self, P: str, r: int | None = None) -> Fraction:
        r = self.r if r is None else r
        size = self.p if P == "I" else self.p**3
        return parahoric_descriptor(P, r, True).measure(self.p) ** 2 * size


class WindowQuotient:
    """SL_2(Z/p^N) with the reduction map from p-integral elements."""

    def __init__(self, p: int, N: int):
        self.p, self.N = p, N
        self.group = enumerate_group(2, p, N)

    def reduce(self, x: PMat) -> int:
        return int(self.group.index(np.array(mod_entries(pm_entries(x, self.p), self.p, self.N)))[0])

    def count(self, desc: Descriptor) -> int:
        """Size of the image of a descriptor group with thresholds in [0, N]."""
        p, el = self.p, self.group.elements.astype(np.int64)
        lt, lb, lc = desc.lt, desc.lb, desc.lc
        if min(lt, lb, lc) < 0 or max(lt, lb, lc) > self.N:
            raise CapacityError(f"{desc} does not fit the window of level {self.N}")
        ok = (
            ((el[:, 0] - 1) % p**lt == 0)
            & ((el[:, 3] - 1) % p**lt == 0)
            & (el[:, 1] % p**lb == 0)
            & (el[:, 2] % p**lc == 0)
        )
        return int(ok.sum())


def measure_by_window(desc: Descriptor, p: int, N: int) -> Fraction:
    """Index count inside SL_2(Z/p^N) relative to I^+ (conjugating into SL_2(Z_p) if needed)."""
    if desc.lb < 0:  # conjugate by diag(1, p): b gains one valuation, c loses one
        desc = Descriptor(desc.lt, desc.lb + 1, desc.lc - 1)
    W = _window(p, N)
    return Fraction(W.count(desc), W.count(Descriptor(1, 0, 1)))


@lru_cache(maxsize=None)
def _window(p: int, N: int) -> WindowQuotient:
    return WindowQuotient(p, N)


# ---------------------------------------------------------------------------
# Reductions P_r -> finite quotients


def reduce_depth0(P: str, x: PMat, p: int) -> tuple[int, ...]:
    """Image of x in G_P^F: SL_2(F_p) entries for hyperspecials, a mod p for I."""
    if P == "hs1":
        return mod_entries(pm_entries(x, p), p, 1)
    if P == "hs0":
        return mod_entries(d_conj_inverse(x, p), p, 1)
    return mod_entries(pm_entries(x, p)[:1], p, 1)


def reduce_depth(P: str, x: PMat, p: int, r: int) -> tuple[int, ...]:
    """Image of x in g_{P_r}: (x - 1)/p^r mod p, as (a, b, c) or (a,) for I."""
    ents = pm_entries(x, p) if P != "hs0" else d_conj_inverse(x, p)
    a, b, c, _ = ents
    pr = Fraction(p) ** r
    if P == "I":
        return mod_entries(((a - 1) / pr,), p, 1)
    return mod_entries(((a - 1) / pr, b / pr, c / pr), p, 1)


# ---------------------------------------------------------------------------
# Depth-zero images of stable functions


def _psi_sum(E: int, p: int, counts: Mapping[int, int]) -> Cyc:
    """sum_t counts[t] * psi(t) with psi(t) = zeta_p^t inside Q(zeta_E)."""
    step = E // p
    return Cyc.from_exponents(E, {(t % p) * step: Fraction(c) for t, c in counts.items()})


def torus_stable_exact(p: int, theta: int, E: int) -> list[Cyc]:
    """sum_{lambda + lambda^{-1} = theta} conj(lambda(t)) / |T| for t = g^j, j = 0..p-2."""
    data = sl2_data(p)
    g = data.g
    out = []
    step = E // (p - 1)
    for j in range(p - 1):
        acc = {}
        for k in range(p - 1):
            lam = pow(g, k, p)
            if (lam + pow(lam, -1, p)) % p == theta:
                e = (-k * j * step) % E
                acc[e] = acc.get(e, 0) + Fraction(1, p - 1)
        out.append(Cyc.from_exponents(E, acc))
    return out


def limit_depth0(win: HeckeWindow, theta: int) -> dict[str, CosetFunction]:
    """{iota_P j_P(f_theta)}_P: the components of xi^0(f_theta)."""
    p, E = win.p, win.E
    data = sl2_data(p)
    f_exact = data.f_theta_exact(theta)
    G = data.G
    out: dict[str, CosetFunction] = {}
    for P in ("hs1", "hs0"):
        plus = win.plus(P, 0)
        h = CosetFunction(plus, E)
        inv_mu = 1 / plus.measure()
        for x in coset_reps(win.group(P, 0), plus):
            red = reduce_depth0(P, x, p)
            idx = int(G.index(np.array([red]))[0])
            h.add_term(x, f_exact[int(G.class_of[idx])].scale(inv_mu))
        out[P] = h
    plus = win.plus("I", 0)
    tvals = torus_stable_exact(p, theta, E)
    log = {pow(data.g, j, p): j for j in range(p - 1)}
    h = CosetFunction(plus, E)
    for x in coset_reps(win.group("I", 0), plus):
        a = reduce_depth0("I", x, p)[0]
        h.add_term(x, tvals[log[a]].scale(1 / plus.measure()))
    out["I"] = h
    return out


def lie_chart(P: str, X: tuple[int, ...], p: int) -> int:
    """t_P(chi_P(X)) in the det coordinate of sl_2: det X, or -a^2 on the torus."""
    if P == "I":
        return (-X[0] * X[0]) % p
    a, b, c = X
    return (-a * a - b * c) % p


def lie_pairing(P: str, X: tuple[int, ...], Y: tuple[int, ...], p: int) -> int:
    """Trace form on g_{P_r}: 2aa' + bc' + cb', or 2aa' on the torus."""
    if P == "I":
        return 2 * X[0] * Y[0] % p
    return (2 * X[0] * Y[0] + X[1] * Y[2] + X[2] * Y[1]) % p


def lie_elements(P: str, p: int) -> list[tuple[int, ...]]:
    dim = 1 if P == "I" else 3
    return list(itertools.product(range(p), repeat=dim))


def j_lie_exact(win: HeckeWindow, P: str, z: Mapping[int, Fraction | int], r: int) -> dict[tuple[int, ...], Cyc]:
    """j_{P_r}(f_z)(X) = mu(P_r^+)^{-1} |g_P|^{-1} sum_Y psi(<X,Y>) z(t chi(Y))."""
    p, E = win.p, win.E
    els = lie_elements(P, p)
    pref = 1 / (win.measure(P, r, True) * len(els))
    out = {}
    for X in els:
        counts: dict[int, Fraction] = {}
        for Y in els:
            w = Fraction(z.get(lie_chart(P, Y, p), 0))
            if w:
                t = lie_pairing(P, X, Y, p)
                counts[t] = counts.get(t, 0) + w
        out[X] = _psi_sum(E, p, counts).scale(pref)
    return out


def limit_depth_r(win: HeckeWindow, z: Mapping[int, Fraction | int], r: int | None = None) -> dict[str, CosetFunction]:
    """{iota_{P_r} j_{P_r}(f_z)}_P: the components of xi^r(f_z), r >= 1."""
    r = win.r if r is None else r
    if r < 1:
        raise ArgumentError("depth must be positive")
    out = {}
    for P in PARAHORICS:
        plus = win.plus(P, r)
        vals = j_lie_exact(win, P, z, r)
        h = CosetFunction(plus, win.E)
        for x in coset_reps(win.group(P, r), plus):
            h.add_term(x, vals[reduce_depth(P, x, win.p, r)])
        out[P] = h
    return out


def delta_family(win: HeckeWindow, r: int | None = None) -> dict[str, CosetFunction]:
    return {P: win.delta(P, r) for P in PARAHORICS}


def chart_indicator(point: int) -> dict[int, int]:
    return {point: 1}


def chart_unit(p: int) -> dict[int, int]:
    return {c: 1 for c in range(p)}


# ---------------------------------------------------------------------------
# Maps between truncated algebras


_SUBS = (("I", "hs1"), ("I", "hs0"))  # proper inclusions P subset Q in Par


def phi(h: CosetFunction, win: HeckeWindow, P: str, depth: int) -> CosetFunction:
    """phi_{P,Q}(h) = h * delta_{P_r^+}."""
    return convolve(h, win.delta(P, depth))


def check_invariance(h: CosetFunction, win: HeckeWindow, Q: str, depth: int) -> bool:
    """Left Q_r^+-invariance and Q-conjugation invariance, checked on generators."""
    for g in win.plus(Q, depth).generators:
        if not h.equals(h.left_translate(g)):
            return False
    for g in win.group(Q, 0).generators:
        if not h.equals(h.ad(g)):
            return False
    return True


def phi_checked(h: CosetFunction, win: HeckeWindow, P: str, Q: str, depth: int) -> CosetFunction:
    if h.level.desc != win.plus(Q, depth).desc or not check_invariance(h, win, Q, depth):
        raise ArgumentError(f"input is not in M^{depth}_{Q}")
    if (P, Q) not in _SUBS and P != Q:
        raise ArgumentError(f"{P} is not contained in {Q}")
    return phi(h, win, P, depth)


def compatibility_report(h: Mapping[str, CosetFunction], win: HeckeWindow, depth: int) -> dict[str, bool]:
    """h_Q * delta_{P_r^+} == h_P for every proper inclusion."""
    return {f"{P}<{Q}": phi(h[Q], win, P, depth).equals(h[P]) for P, Q in _SUBS}


# ---------------------------------------------------------------------------
# Lower sets and representatives of Y_P


def digit_reps(w: AffineWeylElement, p: int) -> list[PMat]:
    """x_{i1}(t1) s_{i1} ... x_{il}(tl) s_{il} for all digits t in {0..p-1}."""
    word = reduced(w).word
    out = []
    for digits in itertools.product(range(p), repeat=len(word)):
        m = identity()
        for i, t in zip(word, digits):
            m = pm_mul(m, root_element(i, t, p), p)
            m = pm_mul(m, s0_matrix(p) if i == 0 else s1_matrix(), p)
        out.append(m)
    return out


def y_reps(Y: LowerSetY, P: str, win: HeckeWindow) -> list[PMat]:
    """Representatives of Y_P = image of Y in G/P, via digit factorization.

    Raises StructureError if two representatives coincide or a cell has the wrong size.
    """
    J = set(_J[P])
    lev = win.group(P, 0)
    seen: dict[tuple, PMat] = {}
    for w in sorted(Y.elements, key=lambda u: (u.length(), reduced(u).word)):
        if not J <= set(jw(w)):
            continue
        reps = digit_reps(w, win.p)
        keys = {lev.key(y) for y in reps}
        if len(keys) != win.p ** w.length():
            raise StructureError(f"|I w P/P| != q^l(w) for w = {reduced(w).word}")
        for y, k in zip(reps, (lev.key(y) for y in reps)):
            if k in seen:
                raise StructureError("Y_P representatives overlap")
            seen[k] = y
    return list(seen.values())


def cell_oracle(w: AffineWeylElement, P: str, win: HeckeWindow) -> set[tuple]:
    """Keys of I w P / P by orbit enumeration under generators of I."""
    lev = win.group(P, 0)
    return {lev.key(x) for x in orbit(win.group("I", 0), lev, weyl_matrix(w, win.p))}


def lower_set_chain(max_length: int) -> list[LowerSetY]:
    """Add elements of the affine Weyl group of A1 one at a time in (length, word) order."""
    els = [AffineWeylElement.identity("A1")]
    for k in range(1, max_length + 1):
        for start in (0, 1):
            word = [(start + i) % 2 for i in range(k)]
            els.append(AffineWeylElement.from_word("A1", word))
    return [lower_closure(els[: i + 1]) for i in range(len(els))]


def eval_chain() -> list[LowerSetY]:
    """{e}, {e,s0}, {e,s1}, {e,s0,s1}."""
    e = AffineWeylElement.identity("A1")
    s0, s1 = AffineWeylElement.simple("A1", 0), AffineWeylElement.simple("A1", 1)
    return [lower_closure(ws) for ws in ([e], [e, s0], [e, s1], [e, s0, s1])]


# ---------------------------------------------------------------------------
# The averaged element [A^Y_h] and its products


def averaged_times(h: Mapping[str, CosetFunction], Y: LowerSetY, f: CosetFunction, win: HeckeWindow) -> CosetFunction:
    """[A^Y_h] * f = sum_P (-1)^{r(G)-r(P)} sum_{y in Y_P} Ad_y(h_P) * f."""
    out = CosetFunction(f.level, f.E)
    for P in PARAHORICS:
        for y in y_reps(Y, P, win):
            term = convolve(h[P].ad(y), f)
            out = out + (term if _SIGN[P] > 0 else term.scale(-1))
    return out


@dataclass
class EvalReport:
    parahoric: str
    lower_set: tuple[tuple[int, ...], ...]
    holds: bool
    residual: float


def verify_eval(h: Mapping[str, CosetFunction], win: HeckeWindow, depth: int, chain: list[LowerSetY] | None = None) -> list[EvalReport]:
    """[A^Y_h] * delta_{P_r^+} == h_P for every P and Y in the chain."""
    chain = eval_chain() if chain is None else chain
    out = []
    for Y in chain:
        for P in PARAHORICS:
            val = averaged_times(h, Y, win.delta(P, depth), win)
            ok = val.equals(h[P])
            words = tuple(sorted(tuple(reduced(w).word) for w in Y.elements))
            out.append(EvalReport(P, words, ok, 0.0 if ok else val.max_abs_difference(h[P])))
    return out


@dataclass
class StabilizationReport:
    n: int
    depth: int
    target: tuple[tuple[int, ...], ...]  # Y(I_n^+)
    chain_sizes: list[int]
    stabilized_at: int | None  # index into the chain from which all terms agree
    target_index: int | None
    status: str  # "stable" | "unstable" | "inconclusive"


def verify_stabilization(
    h: Mapping[str, CosetFunction],
    win: HeckeWindow,
    n: int,
    depth: int,
    chain: list[LowerSetY] | None = None,
    f: CosetFunction | None = None,
) -> StabilizationReport:
    """Compute [A^Y_h] * f along a chain of lower sets; f defaults to delta_{I_{n+r}^+}.

    f must be left I_{n+r}^+-invariant (checked on generators).
    """
    target = y_of(parahoric_label("I"), n)
    chain = lower_set_chain(2) if chain is None else chain
    f = win.delta("I", n + depth) if f is None else f
    for g in win.plus("I", n + depth).generators:
        if not f.equals(f.left_translate(g)):
            raise ArgumentError(f"f is not left I_{n + depth}^+-invariant")
    values = [averaged_times(h, Y, f, win) for Y in chain]
    tkeys = target.keys()
    t_index = next((i for i, Y in enumerate(chain) if tkeys <= Y.keys()), None)
    stab = len(values) - 1
    while stab > 0 and values[stab - 1].equals(values[-1]):
        stab -= 1
    words = tuple(sorted(tuple(reduced(w).word) for w in target.elements))
    if t_index is None:
        status = "inconclusive"
    else:
        status = "stable" if all(values[i].equals(values[t_index]) for i in range(t_index, len(values))) else "unstable"
    return StabilizationReport(n, depth, words, [len(Y) for Y in chain], stab, t_index, status)


def principal_congruence(m: int, p: int) -> Level:
    return Level(Descriptor(m, m, m), identity(), p)


def refine(f: CosetFunction, fine: Level) -> CosetFunction:
    """The same function written on the finer level (fine must lie in f.level)."""
    for g in fine.generators:
        if not f.level.contains(g):
            raise ArgumentError("target level is not contained in the source level")
    out = CosetFunction(fine, f.E)
    reps = coset_reps(f.level, fine)
    for x, v in f.terms.values():
        for a in reps:
            out.add_term(pm_mul(x, a, f.p), v)
    return out


def build_A_Y(h: Mapping[str, CosetFunction], Y: LowerSetY, win: HeckeWindow, depth: int | None = None) -> CosetFunction:
    """[A^Y_h] as one coset function on a principal congruence level inside every term."""
    depth = win.r if depth is None else depth
    top = max((w.length() for w in Y.elements), default=0)
    fine = principal_congruence(depth + 2 + top, win.p)
    out = CosetFunction(fine, win.E)
    for P in PARAHORICS:
        for y in y_reps(Y, P, win):
            term = refine(h[P].ad(y), fine)
            out = out + (term if _SIGN[P] > 0 else term.scale(-1))
    return out


def phi_map(h: CosetFunction, win: HeckeWindow, P: str, Q: str, depth: int) -> CosetFunction:
    """phi^r_{P,Q} with its invariance preconditions checked."""
    return phi_checked(h, win, P, Q, depth)


def iota_and_j(win: HeckeWindow, P: str, param: int | Mapping[int, Fraction | int], depth: int) -> CosetFunction:
    """The P-component of the limit element of a stable function.

    depth 0: param is a chart coordinate theta (the basis function f_theta);
    depth > 0: param maps det-coordinates to weights (the function z).
    """
    if depth == 0:
        if not isinstance(param, int):
            raise ArgumentError("depth 0 takes a chart coordinate")
        return limit_depth0(win, param)[P]
    if isinstance(param, int):
        param = chart_indicator(param)
    return limit_depth_r(win, param, depth)[P]


def j_section(h: Mapping[str, CosetFunction], win: HeckeWindow) -> dict[str, CosetFunction]:
    """j_r(h)_P = [A^{Y(P_1^+)}_h] * delta_{P_{r+1}^+}, for h at depth r = win.r."""
    out = {}
    for P in PARAHORICS:
        Y = y_of(parahoric_label(P), 1)
        out[P] = averaged_times(h, Y, win.delta(P, win.r + 1), win)
    return out


def e_map(h: Mapping[str, CosetFunction], win: HeckeWindow, depth: int) -> dict[str, CosetFunction]:
    """e_{r+1}(h)_P = h_P * delta_{P_r^+}."""
    return {P: convolve(h[P], win.delta(P, depth)) for P in PARAHORICS}


# ---------------------------------------------------------------------------
# Product identities of delta functions


def product_identity_cases() -> list[tuple[str, str, str]]:
    """(P_J, P_J', P) with U_alpha in P^+, J' = J + {alpha}, J a proper subset of the other node."""
    return [("I", "hs1", "I"), ("I", "hs0", "I"), ("I", "hs0", "hs1"), ("I", "hs1", "hs0")]


def verify_delta_products(win: HeckeWindow, depth: int) -> list[tuple[str, bool]]:
    """delta_{(P_J)_r^+} * delta_{P_r^+} == delta_{(P_J')_r^+} * delta_{P_r^+}."""
    out = []
    for PJ, PJp, P in product_identity_cases():
        lhs = convolve(win.delta(PJ, depth), win.delta(P, depth))
        rhs = convolve(win.delta(PJp, depth), win.delta(P, depth))
        out.append((f"{PJ}*{P}={PJp}*{P}", lhs.equals(rhs)))
    return out


def verify_delta_lemma(win: HeckeWindow, w: AffineWeylElement, J: tuple[int, ...], alpha: int, Q: str, n: int, depth: int) -> bool:
    """delta_{(P_J')_r^+} * delta_{w^{-1} Q_{n+r}^+ w} == delta_{(P_J)_r^+} * delta_{w^{-1} Q_{n+r}^+ w}."""
    name = {(): "I", (0,): "hs0", (1,): "hs1"}
    Jp = tuple(sorted(set(J) | {alpha}))
    if Jp not in name:
        raise ArgumentError("J' must be a proper subset of the affine simple roots")
    wm = weyl_matrix(w, win.p)
    target = win.plus(Q, n + depth).conjugate(pm_inv(wm))
    dt = CosetFunction.delta(target, win.E)
    lhs = convolve(win.delta(name[Jp], depth), dt)
    rhs = convolve(win.delta(name[tuple(J)], depth), dt)
    return lhs.equals(rhs)


# ---------------------------------------------------------------------------
# Scalars on K-types


def xi_scalar_lie(h_P: CosetFunction, P: str, Y: tuple[int, ...], win: HeckeWindow, r: int) -> Cyc:
    """mu(P_r^+) sum_{x in g_{P_r}} j_{P_r}(f)(x) chi_Y(x), chi_Y(x) = psi(<Y, x>)."""
    p, E = win.p, win.E
    acc = Cyc.zero(E)
    for rep, v in h_P.terms.values():
        X = reduce_depth(P, rep, p, r)
        acc = acc + v * Cyc.root(E, lie_pairing(P, Y, X, p) * (E // p))
    return acc.scale(h_P.level.measure())


@dataclass(frozen=True)
class MinimalKType:
    parahoric: str
    r: int
    chi: tuple[int, ...]  # r > 0: dual element Y; r = 0: index of an irreducible of G_P^F
    nondegenerate: bool


def ktype(P: str, r: int, chi: tuple[int, ...], p: int) -> MinimalKType:
    if r > 0:
        nondeg = lie_chart(P, tuple((-v) % p for v in chi), p) != 0 if P != "I" else chi[0] % p != 0
        return MinimalKType(P, r, chi, nondeg)
    return MinimalKType(P, r, chi, True)


def theta_of_ktype(k: MinimalKType, p: int) -> int:
    """r > 0: t_{P_r}(chi(-Y)); r = 0: t_P(L_P(sigma))."""
    if k.r > 0:
        return lie_chart(k.parahoric, tuple((-v) % p for v in k.chi), p)
    if k.parahoric == "I":
        data = sl2_data(p)
        lam = pow(data.g, k.chi[0], p)
        return (lam + pow(lam, -1, p)) % p
    return sl2_data(p).L_map(k.chi[0])


def xi_scalar_group(h_P: CosetFunction, P: str, sigma: int, win: HeckeWindow) -> complex:
    """mu(P^+) gamma_{j_P(f)}(sigma) for sigma an irreducible of G_P^F."""
    p = win.p
    data = sl2_data(p)
    mu = float(h_P.level.measure())
    if P == "I":
        g = data.g
        log = {pow(g, j, p): j for j in range(p - 1)}
        acc = 0j
        for rep, v in h_P.terms.values():
            a = reduce_depth0("I", rep, p)[0]
            acc += complex(v) * np.exp(2j * np.pi * sigma * log[a] / (p - 1))
        return mu * acc
    G = data.G
    vals = np.zeros(G.order, dtype=complex)
    for rep, v in h_P.terms.values():
        red = reduce_depth0(P, rep, p)
        vals[int(G.index(np.array([red]))[0])] = complex(v)
    f = ClassFunction.from_elements(G, vals)
    chi = data.chars[sigma]
    return mu * gamma_scalar(f, chi)


# ---------------------------------------------------------------------------
# Perpendicular lattices


def verify_perp(P: str, scale: int = 1, p: int = 3) -> bool:
    """Lie(P)^perp == Lie(P^+) for the form scale * tr(XY), at the threshold level.

    Coordinates (h, e, f) of [[h, e], [f, -h]]; Lie(P) has thresholds (lt, lb, lc).
    The pairing matrix is read off from traces of basis products.
    """
    lie = parahoric_descriptor(P, 0, False)
    lie_plus = parahoric_descriptor(P, 0, True)
    basis = [((1, 0), (0, -1)), ((0, 1), (0, 0)), ((0, 0), (1, 0))]

    def tr(X, Y):
        return scale * sum(X[i][k] * Y[k][i] for i in range(2) for k in range(2))

    thresholds = (lie.lt, lie.lb, lie.lc)
    gram = [[tr(X, Y) for Y in basis] for X in basis]
    perp = []
    for i in range(3):
        need = -_INF
        for j in range(3):
            if gram[i][j]:
                need = max(need, 1 - thresholds[j] - _vp(gram[i][j], p))
        perp.append(need)
    return tuple(perp) == (lie_plus.lt, lie_plus.lb, lie_plus.lc)
