"""Deligne-Lusztig data for SL_2(F_q) at the level of characters.

Split-torus characters R_T^theta are induced from the Borel.  Nonsplit ones are
recovered as the unique short integer vectors in the span of Irr(G) meeting the
norm, orthogonality, degree, central-character and character-formula
constraints.  Chart points are coordinates lambda + lambda^{-1} in F_q.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache

import numpy as np

from .algcore import Cyc, Fq2, fq2_generator, is_square_mod, unit_group_generator
from .grpfin import (
    ClassFunction,
    GroupTable,
    IrreducibleCharacter,
    StructureError,
    character_table,
    enumerate_group,
    inner,
)

class ConstraintError(RuntimeError):
    """The constraint system for a virtual character has no unique solution."""


@dataclass(frozen=True)
class ChartPoint:
    coordinate: int  # lambda + lambda^{-1} in F_q
    split: bool
    order: int  # multiplicative order of lambda


def _lambda_order(c: int, q: int) -> tuple[bool, int]:
    split = is_square_mod(c * c - 4, q)
    if split:
        lam = next(x for x in range(1, q) if (x * x - c * x + 1) % q == 0)
        k, y = 1, lam
        while y != 1:
            y = y * lam % q
            k += 1
        return True, k
    for a in range(q):
        for b in range(1, q):
            x = Fq2(a, b, q)
            # x + x^q = 2a is the trace; x is a root of t^2 - c t + 1 iff 2a = c and norm 1
            if (2 * a - c) % q == 0 and x.norm() == 1:
                return False, x.order()
    raise AssertionError("no root of t^2 - c t + 1 found in F_{q^2}")


@lru_cache(maxsize=None)
def dual_chart(q: int) -> tuple[ChartPoint, ...]:
    """All q chart points, split ones first, then by order of lambda."""
    pts = []
    for c in range(q):
        split, order = _lambda_order(c, q)
        pts.append(ChartPoint(c, split, order))
    return tuple(sorted(pts, key=lambda pt: (not pt.split, pt.order, pt.coordinate)))


# ---------------------------------------------------------------------------
# Tori and virtual characters


@dataclass(frozen=True)
class DLVirtualCharacter:
    torus_type: str  # "split" | "nonsplit"
    k: int  # theta = theta_k in the fixed generator convention
    lam: tuple[int, int]  # lambda = g^k (split, second entry 0) or h^k as (a, b) in F_q[sqrt(eps)]
    point: int  # chart coordinate
    values: ClassFunction
    coefficients: tuple[int, ...]  # in the sorted irreducible basis

    def degree(self) -> float:
        return float(self.values(self.values.group.identity).real)


class SL2Data:
    """SL_2(F_q) with its character table, tori and DL characters."""

    def __init__(self, q: int, seed: int = 0):
        if q not in (3, 5, 7):
            raise ValueError("q must be 3, 5 or 7")
        self.q = q
        self.G: GroupTable = enumerate_group(2, q)
        self.chars: list[IrreducibleCharacter] = character_table(self.G, seed)
        self.g = unit_group_generator(q).value
        x = fq2_generator(q)
        self.h: Fq2 = x ** (q - 1)  # generates the norm-one subgroup mu_{q+1}

    # -- tori ------------------------------------------------------------------

    @cached_property
    def borel_mask(self) -> np.ndarray:
        return self.G.elements[:, 2] % self.q == 0

    @cached_property
    def unipotent_ids(self) -> np.ndarray:
        q = self.q
        return self.G.index(np.array([[1, b, 0, 1] for b in range(q)]))

    @cached_property
    def split_torus_ids(self) -> np.ndarray:
        q = self.q
        return self.G.index(np.array([[pow(self.g, j, q), 0, 0, pow(self.g, -j, q)] for j in range(q - 1)]))

    def nonsplit_element(self, j: int) -> np.ndarray:
        x = self.h**j
        eps = self.h.eps
        return np.array([x.a, x.b * eps, x.b, x.a]) % self.q

    @cached_property
    def nonsplit_torus_ids(self) -> np.ndarray:
        return self.G.index(np.stack([self.nonsplit_element(j) for j in range(self.q + 1)]))

    # -- split DL characters: induction from the Borel --------------------------

    def induced_from_borel(self, k: int) -> ClassFunction:
        G, q = self.G, self.q
        n = q - 1
        log = {pow(self.g, j, q): j for j in range(n)}
        out = np.zeros(G.num_classes, dtype=complex)
        all_ids = np.arange(G.order)
        inv_ids = G.inv(all_ids)
        for c, x in enumerate(G.class_reps):
            conj = G.mul(G.mul(all_ids, np.full(G.order, x)), inv_ids)
            els = G.elements[conj]
            inB = els[:, 2] % q == 0
            a = els[inB, 0]
            out[c] = np.sum(np.exp(2j * np.pi * k * np.array([log[int(v)] for v in a]) / n))
        borel_order = q * (q - 1)
        return ClassFunction(G, out / borel_order)

    def decompose(self, f: ClassFunction) -> np.ndarray:
        return np.array([inner(f, ch.values) for ch in self.chars])

    @cached_property
    def split_characters(self) -> list[DLVirtualCharacter]:
        q = self.q
        out = []
        for k in range(q - 1):
            vals = self.induced_from_borel(k)
            coeffs = self.decompose(vals)
            ints = np.round(coeffs.real).astype(int)
            if np.max(np.abs(coeffs - ints)) > 1e-6:
                raise StructureError("induced character is not an integer combination")
            lam = pow(self.g, k, q)
            point = (lam + pow(lam, -1, q)) % q
            out.append(DLVirtualCharacter("split", k, (lam, 0), point, vals, tuple(map(int, ints))))
        return out

    # -- nonsplit DL characters: constraint solving ---------------------------------

    def _theta_nonsplit(self, k: int, j: int) -> complex:
        return complex(np.exp(2j * np.pi * k * j / (self.q + 1)))

    def nonsplit_constraints(self, k: int) -> tuple[int, list[tuple[str, np.ndarray, complex]]]:
        """Target norm and linear constraints (label, row over Irr, value) for theta'_k."""
        q, G = self.q, self.G
        X = np.array([ch.values.values for ch in self.chars])  # chars x classes
        rows: list[tuple[str, np.ndarray, complex]] = []
        norm = 2 if (2 * k) % (q + 1) == 0 else 1
        e = G.identity
        rows.append(("degree", X[:, G.class_of[e]], complex(-(q - 1))))
        minus = int(G.index(np.array([q - 1, 0, 0, q - 1]))[0])
        rows.append(("central", X[:, G.class_of[minus]], self._theta_nonsplit(k, (q + 1) // 2) * -(q - 1)))
        for split in self.split_characters:
            rows.append((f"orth-split-{split.k}", np.array(split.coefficients, dtype=complex), 0j))
        for j in range(q + 1):
            if (2 * j) % (q + 1) == 0:
                continue  # +-1 are central, not regular
            s = int(self.nonsplit_torus_ids[j])
            val = self._theta_nonsplit(k, j) + self._theta_nonsplit(k, -j)
            rows.append((f"elliptic-h^{j}", X[:, G.class_of[s]], val))
        u = int(self.unipotent_ids[1])
        rows.append(("unipotent", X[:, G.class_of[u]], 1 + 0j))
        for j in range(1, q - 1):
            t = int(self.split_torus_ids[j])
            if (2 * j) % (q - 1) == 0:
                continue
            rows.append((f"split-regular-{j}", X[:, G.class_of[t]], 0j))
        return norm, rows

    def solve_nonsplit(self, k: int) -> np.ndarray:
        norm, rows = self.nonsplit_constraints(k)
        r = len(self.chars)
        sols = []
        for support in itertools.combinations(range(r), norm):
            for signs in itertools.product((1, -1), repeat=norm):
                v = np.zeros(r, dtype=int)
                v[list(support)] = signs
                if all(abs(complex(np.dot(v, row)) - val) < 1e-6 for _, row, val in rows):
                    sols.append(v)
        if len(sols) != 1:
            raise ConstraintError(f"nonsplit theta_{k}: {len(sols)} solutions of the constraint system (need exactly one)")
        return sols[0]

    @cached_property
    def nonsplit_characters(self) -> list[DLVirtualCharacter]:
        q = self.q
        out = []
        X = np.array([ch.values.values for ch in self.chars])
        for k in range(q + 1):
            v = self.solve_nonsplit(k)
            lam = self.h**k
            point = (2 * lam.a) % q
            vals = ClassFunction(self.G, v @ X)
            out.append(DLVirtualCharacter("nonsplit", k, (lam.a, lam.b), point, vals, tuple(map(int, v))))
        return out

    @property
    def dl_characters(self) -> list[DLVirtualCharacter]:
        return self.split_characters + self.nonsplit_characters

    # -- series -----------------------------------------------------------------------

    @cached_property
    def series_partition(self) -> dict[int, tuple[int, ...]]:
        """Chart coordinate -> indices (into chars) of the series."""
        owner: dict[int, int] = {}
        for R in self.dl_characters:
            for i, c in enumerate(R.coefficients):
                if c:
                    if owner.get(i, R.point) != R.point:
                        raise StructureError(f"character {i} lies in two series")
                    owner[i] = R.point
        if len(owner) != len(self.chars):
            raise StructureError("some irreducible character lies in no DL character")
        blocks: dict[int, list[int]] = {pt.coordinate: [] for pt in dual_chart(self.q)}
        for i, c in sorted(owner.items()):
            blocks[c].append(i)
        return {c: tuple(v) for c, v in blocks.items()}

    def L_map(self, i: int) -> int:
        """Chart coordinate of the series containing the i-th irreducible character."""
        for c, block in self.series_partition.items():
            if i in block:
                return c
        raise KeyError(i)

    def block_sizes(self) -> list[int]:
        return [len(self.series_partition[pt.coordinate]) for pt in dual_chart(self.q)]

    # -- stable functions --------------------------------------------------------------

    def f_s(self, c: int) -> ClassFunction:
        acc = np.zeros(self.G.num_classes, dtype=complex)
        for i in self.series_partition[c]:
            acc += self.chars[i].degree * self.chars[i].values.values
        return ClassFunction(self.G, acc)

    def f_theta(self, c: int) -> ClassFunction:
        """The class function with gamma = indicator of the series at c."""
        acc = np.zeros(self.G.num_classes, dtype=complex)
        for i in self.series_partition[c]:
            acc += self.chars[i].degree * np.conj(self.chars[i].values.values)
        return ClassFunction(self.G, acc / self.G.order)

    def f_theta_exact(self, c: int) -> tuple[Cyc, ...]:
        E = self.G.exponent
        acc = [Cyc.zero(E) for _ in range(self.G.num_classes)]
        for i in self.series_partition[c]:
            ch = self.chars[i]
            acc = [a + v.conj().scale(ch.degree) for a, v in zip(acc, ch.exact)]
        return tuple(a.scale(Fraction(1, self.G.order)) for a in acc)

    def torus_characters(self) -> list[tuple[int, int, np.ndarray]]:
        """(k, lambda = g^k, values on split_torus_ids) for every character of T(F_q)."""
        q = self.q
        j = np.arange(q - 1)
        return [(k, pow(self.g, k, q), np.exp(2j * np.pi * k * j / (q - 1))) for k in range(q - 1)]

    def vanishing_check_group(self, f: ClassFunction) -> tuple[float, int, int | None]:
        """max over x outside B of |sum_{u in U} f(x u)|, number of sites, witness id."""
        G = self.G
        outside = np.flatnonzero(~self.borel_mask)
        U = self.unipotent_ids
        prods = G.mul(np.repeat(outside, len(U)), np.tile(U, len(outside)))
        sums = f.values[G.class_of[prods]].reshape(len(outside), len(U)).sum(axis=1)
        k = int(np.argmax(np.abs(sums)))
        return float(np.abs(sums[k])), len(outside), int(outside[k])

    def res_to_torus(self, f: ClassFunction) -> np.ndarray:
        """Unnormalized restriction: t -> sum_{u in U} f(t u) on split_torus_ids."""
        G = self.G
        T, U = self.split_torus_ids, self.unipotent_ids
        prods = G.mul(np.repeat(T, len(U)), np.tile(U, len(T)))
        return f.values[G.class_of[prods]].reshape(len(T), len(U)).sum(axis=1)

    def torus_stable(self, c: int) -> np.ndarray:
        """sum over lambda in T-hat with lambda + lambda^{-1} = c of conj(lambda)/|T|, on split_torus_ids."""
        q = self.q
        acc = np.zeros(q - 1, dtype=complex)
        for k, lam, vals in self.torus_characters():
            if (lam + pow(lam, -1, q)) % q == c:
                acc += np.conj(vals) / (q - 1)
        return acc


@lru_cache(maxsize=None)
def sl2_data(q: int, seed: int = 0) -> SL2Data:
    return SL2Data(q, seed)


def is_idempotent_family(data: SL2Data, tol: float = 1e-6) -> float:
    """Max deviation of gamma_{f_theta}(pi) from the series indicator."""
    from .grpfin import gamma_scalar

    worst = 0.0
    for pt in dual_chart(data.q):
        f = data.f_theta(pt.coordinate)
        for i, ch in enumerate(data.chars):
            target = 1.0 if i in data.series_partition[pt.coordinate] else 0.0
            worst = max(worst, abs(gamma_scalar(f, ch) - target))
    return worst


def expected_dl_inner(R: DLVirtualCharacter, S: DLVirtualCharacter, q: int) -> int:
    """#{w in W(T, T')^F : w theta = theta'}, with W of order 2 acting by inversion."""
    if R.torus_type != S.torus_type:
        return 0
    m = q - 1 if R.torus_type == "split" else q + 1
    return int((R.k - S.k) % m == 0) + int((R.k + S.k) % m == 0)


def dl_orthogonality_residual(data: SL2Data) -> tuple[float, float]:
    """Max |<R, R'> - expected| and max distance of <R, R'> from an integer."""
    Rs = data.dl_characters
    dev = frac = 0.0
    for R in Rs:
        for S in Rs:
            v = inner(R.values, S.values)
            dev = max(dev, abs(v - expected_dl_inner(R, S, data.q)))
            frac = max(frac, abs(v - round(v.real)))
    return dev, frac


def nonstable_witness(data: SL2Data) -> tuple[int, float, int | None]:
    """First irreducible whose character fails the Borel vanishing, with the residual and site."""
    for i, ch in enumerate(data.chars):
        res, _, site = data.vanishing_check_group(ch.values)
        if res > 1e-6:
            return i, res, site
    raise StructureError("every irreducible character satisfies the vanishing property")


def series_csv(data: SL2Data) -> str:
    lines = ["coordinate,split,order,characters,degrees"]
    for pt in dual_chart(data.q):
        block = data.series_partition[pt.coordinate]
        ids = " ".join(map(str, block))
        degs = " ".join(str(data.chars[i].degree) for i in block)
        lines.append(f"{pt.coordinate},{int(pt.split)},{pt.order},{ids},{degs}")
    return "\n".join(lines) + "\n"


def f_theta_csv(data: SL2Data) -> str:
    G = data.G
    head = ",".join(f"class{c}" for c in range(G.num_classes))
    lines = [f"coordinate,{head}"]
    for pt in dual_chart(data.q):
        vals = data.f_theta(pt.coordinate).values * G.order
        cells = ",".join(f"{v.real:.12g}{v.imag:+.12g}j" for v in vals)
        lines.append(f"{pt.coordinate},{cells}")
    return "\n".join(lines) + "\n"
