"""Finite matrix groups over Z/p^N: enumeration, classes, class functions, character tables.

Elements are stored as flattened integer matrices; each element gets an integer
code (base-m digits of its entries) and tables are kept sorted by code.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .algcore import Cyc, is_prime, multiplicative_order

CAPACITY = 10**6
MAX_DIXON_ATTEMPTS = 8


class CapacityError(RuntimeError):
    """A requested object exceeds the configured size bound."""


class StructureError(ValueError):
    """Inconsistent group-theoretic input data."""


def sl_order(n: int, p: int, N: int = 1) -> int:
    """|SL_n(Z/p^N)|."""
    prod = 1
    for k in range(2, n + 1):
        prod *= p**k - 1
    field_order = prod * p ** (n * (n - 1) // 2)
    return field_order * p ** ((n * n - 1) * (N - 1))


def _matmul_mod(a: np.ndarray, b: np.ndarray, n: int, m: int) -> np.ndarray:
    """Row-wise products of flattened n x n matrices mod m."""
    A = a.reshape(-1, n, n)
    B = b.reshape(-1, n, n)
    return (np.einsum("kij,kjl->kil", A, B) % m).reshape(-1, n * n)


def _inverse_mod(a: np.ndarray, n: int, m: int) -> np.ndarray:
    """Inverses of determinant-one matrices via the adjugate."""
    A = a.reshape(-1, n, n)
    if n == 1:
        out = np.array([[pow(int(x), -1, m)] for x in A[:, 0, 0]], dtype=np.int64)
        return out.reshape(-1, 1)
    if n == 2:
        out = np.stack([A[:, 1, 1], -A[:, 0, 1], -A[:, 1, 0], A[:, 0, 0]], axis=1)
        return out % m
    if n == 3:
        adj = np.empty_like(A)
        for i in range(3):
            for j in range(3):
                r = [x for x in range(3) if x != j]
                c = [x for x in range(3) if x != i]
                minor = A[:, r][:, :, c]
                adj[:, i, j] = (-1) ** (i + j) * (minor[:, 0, 0] * minor[:, 1, 1] - minor[:, 0, 1] * minor[:, 1, 0])
        return (adj % m).reshape(-1, 9)
    raise ValueError("n must be 1, 2 or 3")


def _det_mod(a: np.ndarray, n: int, m: int) -> np.ndarray:
    A = a.reshape(-1, n, n)
    if n == 1:
        return A[:, 0, 0] % m
    if n == 2:
        return (A[:, 0, 0] * A[:, 1, 1] - A[:, 0, 1] * A[:, 1, 0]) % m
    return (
        A[:, 0, 0] * (A[:, 1, 1] * A[:, 2, 2] - A[:, 1, 2] * A[:, 2, 1])
        - A[:, 0, 1] * (A[:, 1, 0] * A[:, 2, 2] - A[:, 1, 2] * A[:, 2, 0])
        + A[:, 0, 2] * (A[:, 1, 0] * A[:, 2, 1] - A[:, 1, 1] * A[:, 2, 0])
    ) % m


class GroupTable:
    """A finite group of n x n matrices over Z/m, with conjugacy classes."""

    def __init__(self, elements: np.ndarray, n: int, m: int, name: str = "", generators: np.ndarray | None = None):
        elements = np.asarray(elements, dtype=np.int64) % m
        codes = self._encode(elements, n, m)
        order = np.argsort(codes, kind="stable")
        self.elements = elements[order]
        self.codes = codes[order]
        if len(np.unique(self.codes)) != len(self.codes):
            raise StructureError("duplicate elements")
        self.n, self.m, self.name = n, m, name
        self._generators = generators
        self._classes()

    # -- encoding and lookup -------------------------------------------------

    @staticmethod
    def _encode(elements: np.ndarray, n: int, m: int) -> np.ndarray:
        weights = m ** np.arange(n * n - 1, -1, -1, dtype=np.int64)
        return (elements.astype(np.int64) % m) @ weights

    def index(self, mats: np.ndarray) -> np.ndarray:
        """Element ids of the given flattened matrices; -1 when absent."""
        mats = np.asarray(mats, dtype=np.int64).reshape(-1, self.n * self.n)
        codes = self._encode(mats, self.n, self.m)
        pos = np.searchsorted(self.codes, codes)
        pos = np.minimum(pos, len(self.codes) - 1)
        return np.where(self.codes[pos] == codes, pos, -1)

    def mul(self, i: np.ndarray, j: np.ndarray) -> np.ndarray:
        i, j = np.broadcast_arrays(np.asarray(i), np.asarray(j))
        out = self.index(_matmul_mod(self.elements[i.ravel()], self.elements[j.ravel()], self.n, self.m))
        if np.any(out < 0):
            raise StructureError("product left the table")
        return out.reshape(i.shape)

    def inv(self, i: np.ndarray) -> np.ndarray:
        i = np.asarray(i)
        return self.index(_inverse_mod(self.elements[i.ravel()], self.n, self.m)).reshape(i.shape)

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def identity(self) -> int:
        return int(self.index(np.eye(self.n, dtype=np.int64).ravel())[0])

    def __len__(self) -> int:
        return self.order

    # -- conjugacy classes ---------------------------------------------------

    def conjugators(self) -> np.ndarray:
        if self._generators is not None:
            return np.asarray(self._generators, dtype=np.int64)
        return self.elements

    def _classes(self) -> None:
        G = self.order
        ids = np.arange(G)
        rows, cols = [], []
        for g in self.conjugators():
            gi = np.broadcast_to(g, (G, self.n * self.n))
            ginv = _inverse_mod(g[None, :], self.n, self.m)
            ginv = np.broadcast_to(ginv, (G, self.n * self.n))
            conj = self.index(_matmul_mod(_matmul_mod(gi, self.elements, self.n, self.m), ginv, self.n, self.m))
            if np.any(conj < 0):
                raise StructureError("conjugation left the table; not a group")
            rows.append(ids)
            cols.append(conj)
        r, c = np.concatenate(rows), np.concatenate(cols)
        graph = coo_matrix((np.ones(len(r), dtype=np.int8), (r, c)), shape=(G, G))
        _, labels = connected_components(graph, directed=True, connection="weak")
        # relabel classes by smallest member id, identity class first
        first = np.full(labels.max() + 1, G)
        np.minimum.at(first, labels, ids)
        order = np.argsort(first, kind="stable")
        relabel = np.empty_like(order)
        relabel[order] = np.arange(len(order))
        cls = relabel[labels]
        e_cls = cls[self.identity]
        if e_cls != 0:
            swap = {0: e_cls, e_cls: 0}
            cls = np.array([swap.get(int(x), int(x)) for x in cls])
        self.class_of = cls
        self.class_sizes = np.bincount(cls)
        reps = np.full(len(self.class_sizes), G)
        np.minimum.at(reps, cls, ids)
        self.class_reps = reps

    @property
    def num_classes(self) -> int:
        return len(self.class_sizes)

    @cached_property
    def inverse_class(self) -> np.ndarray:
        return self.class_of[self.inv(self.class_reps)]

    @cached_property
    def element_orders(self) -> np.ndarray:
        G = self.order
        orders = np.zeros(G, dtype=np.int64)
        cur = np.arange(G)
        e = self.identity
        k = 1
        while np.any(orders == 0):
            hit = (cur == e) & (orders == 0)
            orders[hit] = k
            cur = self.mul(cur, np.arange(G))
            k += 1
            if k > G + 1:
                raise StructureError("element order search diverged")
        return orders

    @cached_property
    def exponent(self) -> int:
        return math.lcm(*map(int, np.unique(self.element_orders)))

    def power_class(self, c: int, k: int) -> int:
        g = int(self.class_reps[c])
        x = self.identity
        for _ in range(k % int(self.element_orders[g])):
            x = int(self.mul(x, g))
        return int(self.class_of[x])


def enumerate_group(n: int, p: int, N: int = 1, capacity: int = CAPACITY) -> GroupTable:
    """SL_n(Z/p^N) with elementary-matrix generators."""
    if n not in (2, 3):
        raise ValueError("n must be 2 or 3")
    if not is_prime(p):
        raise ValueError("p must be prime")
    size = sl_order(n, p, N)
    if size > capacity:
        raise CapacityError(f"|SL_{n}(Z/{p}^{N})| = {size} exceeds the capacity bound {capacity}")
    m = p**N
    if n == 2:
        a, c = np.meshgrid(np.arange(m), np.arange(m), indexing="ij")
        a, c = a.ravel(), c.ravel()
        keep = (a % p != 0) | (c % p != 0)
        a, c = a[keep], c[keep]
        # particular solution of a d - b c = 1
        b0 = np.zeros_like(a)
        d0 = np.zeros_like(a)
        unit_a = a % p != 0
        d0[unit_a] = [pow(int(x), -1, m) for x in a[unit_a]]
        b0[~unit_a] = [(-pow(int(x), -1, m)) % m for x in c[~unit_a]]
        t = np.arange(m)
        A = np.repeat(a, m)
        C = np.repeat(c, m)
        T = np.tile(t, len(a))
        B = (np.repeat(b0, m) + T * A) % m
        D = (np.repeat(d0, m) + T * C) % m
        elems = np.stack([A, B, C, D], axis=1)
    else:
        grids = np.stack(np.meshgrid(*[np.arange(m)] * 9, indexing="ij"), axis=-1).reshape(-1, 9)
        elems = grids[_det_mod(grids, 3, m) == 1]
    gens = []
    for i, j in itertools.permutations(range(n), 2):
        e = np.eye(n, dtype=np.int64)
        e[i, j] = 1
        gens.append(e.ravel())
    G = GroupTable(elems, n, m, name=f"SL{n}(Z/{m})", generators=np.array(gens))
    if G.order != size:
        raise StructureError(f"enumerated {G.order} elements, expected {size}")
    return G


def subgroup_table(G: GroupTable, ids: np.ndarray, name: str = "") -> GroupTable:
    """Table of a subgroup given by element ids of G (all elements used as conjugators)."""
    return GroupTable(G.elements[np.asarray(ids)], G.n, G.m, name=name)


# ---------------------------------------------------------------------------
# Class functions


@dataclass
class ClassFunction:
    group: GroupTable
    values: np.ndarray  # complex, indexed by class id

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=np.complex128)
        if self.values.shape != (self.group.num_classes,):
            raise ValueError("one value per conjugacy class expected")

    def expand(self) -> np.ndarray:
        return self.values[self.group.class_of]

    def __call__(self, element_id: int) -> complex:
        return complex(self.values[self.group.class_of[element_id]])

    def _same(self, other: ClassFunction) -> None:
        if other.group is not self.group:
            raise StructureError("class functions on different groups")

    def __add__(self, other: ClassFunction) -> ClassFunction:
        self._same(other)
        return ClassFunction(self.group, self.values + other.values)

    def __sub__(self, other: ClassFunction) -> ClassFunction:
        self._same(other)
        return ClassFunction(self.group, self.values - other.values)

    def __mul__(self, c: complex) -> ClassFunction:
        return ClassFunction(self.group, self.values * c)

    __rmul__ = __mul__

    def conj(self) -> ClassFunction:
        return ClassFunction(self.group, np.conj(self.values))

    @classmethod
    def point_mass(cls, G: GroupTable) -> ClassFunction:
        v = np.zeros(G.num_classes, dtype=complex)
        v[G.class_of[G.identity]] = 1
        return cls(G, v)

    @classmethod
    def constant(cls, G: GroupTable, c: complex = 1.0) -> ClassFunction:
        return cls(G, np.full(G.num_classes, c, dtype=complex))

    @classmethod
    def from_elements(cls, G: GroupTable, values: np.ndarray, tol: float = 1e-9) -> ClassFunction:
        values = np.asarray(values, dtype=complex)
        out = values[G.class_reps]
        if np.max(np.abs(values - out[G.class_of]), initial=0.0) > tol:
            raise StructureError("function is not constant on conjugacy classes")
        return cls(G, out)


def inner(f: ClassFunction, g: ClassFunction) -> complex:
    """(1/|G|) sum_x f(x) conj(g(x))."""
    f._same(g)
    G = f.group
    return complex(np.sum(G.class_sizes * f.values * np.conj(g.values)) / G.order)


def convolve(f: ClassFunction, g: ClassFunction) -> ClassFunction:
    """(f * g)(x) = sum_y f(x y^{-1}) g(y), evaluated at class representatives."""
    f._same(g)
    G = f.group
    all_ids = np.arange(G.order)
    inv_ids = G.inv(all_ids)
    gvals = g.expand()
    out = np.empty(G.num_classes, dtype=complex)
    for c, x in enumerate(G.class_reps):
        prod = G.mul(np.full(G.order, x), inv_ids)
        out[c] = np.sum(f.values[G.class_of[prod]] * gvals)
    return ClassFunction(G, out)


def convolve_naive(f: ClassFunction, g: ClassFunction) -> np.ndarray:
    """Element-indexed double loop; oracle for convolve on small groups."""
    G = f.group
    fe, ge = f.expand(), g.expand()
    out = np.zeros(G.order, dtype=complex)
    for x in range(G.order):
        for y in range(G.order):
            out[x] += fe[int(G.mul(x, G.inv(y)))] * ge[y]
    return out


# ---------------------------------------------------------------------------
# Character table via class-multiplication coefficients mod a prime


@dataclass
class IrreducibleCharacter:
    values: ClassFunction
    exact: tuple[Cyc, ...]  # values in Q(zeta_e), e the group exponent
    degree: int

    def fingerprint(self) -> tuple:
        return (self.degree,) + tuple((round(v.real, 6) + 0.0, round(v.imag, 6) + 0.0) for v in self.values.values)


def class_coefficients(G: GroupTable) -> np.ndarray:
    """a[i, j, k] = #{x in C_i : x^{-1} z_k in C_j} for the fixed representative z_k."""
    r = G.num_classes
    a = np.zeros((r, r, r), dtype=np.int64)
    members = [np.flatnonzero(G.class_of == i) for i in range(r)]
    for k, z in enumerate(G.class_reps):
        for i in range(r):
            xs = members[i]
            ys = G.mul(G.inv(xs), np.full(len(xs), z))
            a[i, :, k] = np.bincount(G.class_of[ys], minlength=r)
    return a


def _dixon_prime(e: int, order: int) -> int:
    P = e + 1
    while not (is_prime(P) and P > 2 * math.isqrt(order) + 2):
        P += e
    return P


def _primitive_root(P: int) -> int:
    return next(g for g in range(2, P) if multiplicative_order(g, P) == P - 1)


def nullspace_mod(A: np.ndarray, P: int) -> np.ndarray:
    """Basis (rows) of {v : A v = 0} over F_P by Gaussian elimination."""
    A = np.array(A, dtype=np.int64) % P
    rows, cols = A.shape
    pivots = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if A[i, c]), None)
        if piv is None:
            continue
        A[[r, piv]] = A[[piv, r]]
        A[r] = A[r] * pow(int(A[r, c]), -1, P) % P
        for i in range(rows):
            if i != r and A[i, c]:
                A[i] = (A[i] - A[i, c] * A[r]) % P
        pivots.append(c)
        r += 1
        if r == rows:
            break
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        v = np.zeros(cols, dtype=np.int64)
        v[f] = 1
        for i, c in enumerate(pivots):
            v[c] = (-A[i, f]) % P
        basis.append(v)
    return np.array(basis, dtype=np.int64).reshape(len(basis), cols)


def _restrict(M: np.ndarray, V: np.ndarray, P: int) -> np.ndarray:
    """Matrix of M on the invariant subspace spanned by rows of V, in that basis."""
    d = len(V)
    img = (V @ M.T) % P  # rows: M v
    # solve coeffs * V = img
    aug = np.concatenate([V.T % P, img.T % P], axis=1)
    nrow = aug.shape[0]
    r = 0
    piv_cols = []
    for c in range(d):
        piv = next((i for i in range(r, nrow) if aug[i, c]), None)
        if piv is None:
            raise StructureError("subspace basis is degenerate")
        aug[[r, piv]] = aug[[piv, r]]
        aug[r] = aug[r] * pow(int(aug[r, c]), -1, P) % P
        for i in range(nrow):
            if i != r and aug[i, c]:
                aug[i] = (aug[i] - aug[i, c] * aug[r]) % P
        piv_cols.append(c)
        r += 1
    return aug[:d, d:] % P  # column j = coordinates of M v_j


def _split(V: np.ndarray, mats: list[np.ndarray], P: int, rng: np.random.Generator) -> list[np.ndarray]:
    if len(V) == 1:
        return [V[0]]
    for _ in range(4 * len(mats) + 8):
        coeffs = rng.integers(0, P, size=len(mats))
        M = sum(int(c) * m for c, m in zip(coeffs, mats)) % P
        A = _restrict(M, V, P)
        d = len(V)
        eig = [lam for lam in range(P) if len(nullspace_mod((A - lam * np.eye(d, dtype=np.int64)) % P, P))]
        if len(eig) < 2:
            continue
        out = []
        for lam in eig:
            K = nullspace_mod((A - lam * np.eye(d, dtype=np.int64)) % P, P)
            W = (K @ V) % P
            out.extend(_split(W, mats, P, rng))
        return out
    raise StructureError("eigenspace splitting did not converge")


def character_table(G: GroupTable, seed: int = 0) -> list[IrreducibleCharacter]:
    """All irreducible characters, sorted by degree then by value fingerprint."""
    last: Exception | None = None
    for attempt in range(MAX_DIXON_ATTEMPTS):
        try:
            return _dixon(G, seed + attempt)
        except StructureError as exc:  # seed bump and retry
            last = exc
    raise StructureError(f"character table failed after {MAX_DIXON_ATTEMPTS} seeds: {last}")


def _dixon(G: GroupTable, seed: int) -> list[IrreducibleCharacter]:
    r = G.num_classes
    e = G.exponent
    P = _dixon_prime(e, G.order)
    rng = np.random.default_rng(seed)
    a = class_coefficients(G)
    mats = [a[i] % P for i in range(r)]  # (M_i)_{jk} = a_ijk
    vecs = _split(np.eye(r, dtype=np.int64), mats, P, rng)
    if len(vecs) != r:
        raise StructureError(f"found {len(vecs)} eigenvectors for {r} classes")
    z = pow(_primitive_root(P), (P - 1) // e, P)  # maps to exp(2 pi i / e)
    sizes = G.class_sizes
    inv_cls = G.inverse_class
    orders = G.element_orders[G.class_reps]
    powers = {(c, k): G.power_class(c, k) for c in range(r) for k in range(int(orders[c]))}
    chars = []
    for v in vecs:
        v = v * pow(int(v[0]), -1, P) % P  # omega(C_identity) = 1
        s = sum(int(v[i]) * int(v[inv_cls[i]]) * pow(int(sizes[i]), -1, P) for i in range(r)) % P
        d2 = G.order * pow(s, -1, P) % P
        deg = next((d for d in range(1, math.isqrt(G.order) + 1) if d * d % P == d2), None)
        if deg is None:
            raise StructureError("no integer degree matches")
        chi_mod = [deg * int(v[i]) * pow(int(sizes[i]), -1, P) % P for i in range(r)]
        exact, numeric = [], []
        for c in range(r):
            o = int(orders[c])
            zo = pow(z, e // o, P)
            counts = {}
            for s_ in range(o):
                m = sum(chi_mod[powers[(c, k)]] * pow(zo, (-s_ * k) % o, P) for k in range(o)) * pow(o, -1, P) % P
                if m > deg:
                    raise StructureError("eigenvalue multiplicity out of range")
                if m:
                    counts[s_ * (e // o)] = m
            exact.append(Cyc.from_exponents(e, counts))
            numeric.append(sum(m * np.exp(2j * np.pi * k / e) for k, m in counts.items()))
        chars.append(IrreducibleCharacter(ClassFunction(G, np.array(numeric)), tuple(exact), deg))
    chars.sort(key=lambda ch: ch.fingerprint())
    if sum(ch.degree**2 for ch in chars) != G.order:
        raise StructureError("sum of squared degrees differs from |G|")
    return chars


def gamma_scalar(f: ClassFunction, chi: IrreducibleCharacter) -> complex:
    """gamma_f(pi) = (1/pi(1)) sum_g f(g) chi_pi(g)."""
    f._same(chi.values)
    G = f.group
    return complex(np.sum(G.class_sizes * f.values * chi.values.values) / chi.degree)


def orthogonality_residual(chars: Sequence[IrreducibleCharacter]) -> float:
    """Max deviation in both orthogonality relations."""
    G = chars[0].values.group
    X = np.array([ch.values.values for ch in chars])
    row = (X * G.class_sizes) @ np.conj(X).T / G.order
    col = np.conj(X).T @ X
    col_expected = np.diag(G.order / G.class_sizes)
    return float(max(np.max(np.abs(row - np.eye(len(chars)))), np.max(np.abs(col - col_expected))))


def table_csv(chars: Sequence[IrreducibleCharacter]) -> str:
    G = chars[0].values.group
    head = ["class_rep", "size"] + [f"chi{i}_deg{ch.degree}" for i, ch in enumerate(chars)]
    lines = [",".join(head)]
    for c in range(G.num_classes):
        rep = " ".join(map(str, G.elements[G.class_reps[c]]))
        vals = [f"{ch.values.values[c].real:.10f}{ch.values.values[c].imag:+.10f}j" for ch in chars]
        lines.append(",".join([rep, str(G.class_sizes[c])] + vals))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Parabolic restriction


@dataclass
class ParabolicData:
    """Levi L and unipotent radical U inside an ambient table, as element ids."""

    ambient: GroupTable
    levi: np.ndarray
    unipotent: np.ndarray
    composition: tuple[int, ...] = field(default=())

    def check(self) -> None:
        A = self.ambient
        U = set(map(int, self.unipotent))
        for u in self.unipotent:
            if not set(map(int, A.mul(np.full(len(self.unipotent), u), self.unipotent))) <= U:
                raise StructureError("U is not closed under products")
        for l in self.levi:
            li = int(A.inv(l))
            conj = A.mul(A.mul(np.full(len(self.unipotent), l), self.unipotent), np.full(len(self.unipotent), li))
            if set(map(int, conj)) != U:
                raise StructureError("U is not normalized by L")


def _block_index(composition: Sequence[int]) -> np.ndarray:
    return np.repeat(np.arange(len(composition)), composition)


def block_parabolic(ambient: GroupTable, composition: Sequence[int], within: Sequence[int] | None = None) -> ParabolicData:
    """Standard parabolic of block type ``composition``, optionally inside the Levi of ``within``.

    With ``within`` given (a coarsening of ``composition``) the data describe the
    parabolic of the Levi L_within: L is block-diagonal for ``composition`` and U
    is block-unipotent for ``composition`` but block-diagonal for ``within``.
    """
    n = ambient.n
    if sum(composition) != n:
        raise StructureError("composition does not sum to n")
    blk = _block_index(composition)
    outer = _block_index(within) if within is not None else np.zeros(n, dtype=int)
    M = ambient.elements.reshape(-1, n, n)
    diag_mask = blk[:, None] == blk[None, :]
    lower = blk[:, None] > blk[None, :]
    upper_out = blk[:, None] < blk[None, :]
    same_outer = outer[:, None] == outer[None, :]
    is_levi = np.all((M[:, ~diag_mask]) == 0, axis=1)
    ident_blocks = np.all(M[:, diag_mask] == np.eye(n, dtype=np.int64)[diag_mask], axis=1)
    no_lower = np.all(M[:, lower] == 0, axis=1)
    off_outer = upper_out & ~same_outer
    stays_inside = np.all(M[:, off_outer] == 0, axis=1) if off_outer.any() else np.ones(len(M), bool)
    unip = np.flatnonzero(ident_blocks & no_lower & stays_inside)
    levi = np.flatnonzero(is_levi)
    data = ParabolicData(ambient, levi, unip, tuple(composition))
    return data


def parabolic_res_group(f_values: np.ndarray, source_ids: np.ndarray, data: ParabolicData) -> np.ndarray:
    """Res(f)(l) = |U|^{-1} sum_u f(l u) for l in data.levi.

    ``f_values[k]`` is the value of f at ambient element ``source_ids[k]``;
    elements outside ``source_ids`` are an error.
    """
    A = data.ambient
    lookup = np.full(A.order, -1, dtype=np.int64)
    lookup[np.asarray(source_ids)] = np.arange(len(source_ids))
    L, U = data.levi, data.unipotent
    prods = A.mul(np.repeat(L, len(U)), np.tile(U, len(L)))
    pos = lookup[prods]
    if np.any(pos < 0):
        raise StructureError("l*u left the domain of f")
    vals = np.asarray(f_values)[pos].reshape(len(L), len(U))
    return vals.sum(axis=1) / len(U)
