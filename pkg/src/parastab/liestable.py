"""Finite Lie algebras sl_n(F_p), their Fourier transform, Chevalley map and stable functions.

Elements are coordinate vectors over a subset of the standard basis of sl_n
(off-diagonal E_ij, then H_k = E_kk - E_{k+1,k+1}); functions are flat complex
arrays in C order over those coordinates.  Levi subalgebras of block parabolics
reuse the same basis vectors, so restriction is a reshape-and-average.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .algcore import TOL, psi_array, unit_group_generator


class DegenerateFormError(ValueError):
    """The trace form is degenerate on the requested algebra."""


class ParabolicDataError(ValueError):
    """Block data do not define a parabolic of the algebra."""


def standard_basis(n: int) -> tuple[list[np.ndarray], list[str]]:
    mats, labels = [], []
    for i, j in itertools.permutations(range(n), 2):
        m = np.zeros((n, n), dtype=np.int64)
        m[i, j] = 1
        mats.append(m)
        labels.append(f"E{i + 1}{j + 1}")
    for k in range(n - 1):
        m = np.zeros((n, n), dtype=np.int64)
        m[k, k], m[k + 1, k + 1] = 1, -1
        mats.append(m)
        labels.append(f"H{k + 1}")
    return mats, labels


def orthogonalize(gram: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray]:
    """S, diag with S^T gram S = diag(diag) mod p (columns of S are the new basis)."""
    d = len(gram)
    G = np.array(gram, dtype=np.int64) % p
    vecs = [np.eye(d, dtype=np.int64)[i] for i in range(d)]
    out, diag = [], []

    def form(u: np.ndarray, v: np.ndarray) -> int:
        return int(u @ G @ v % p)

    pool = vecs
    while pool:
        pick = next((v for v in pool if form(v, v)), None)
        if pick is None:
            pair = next(((u, v) for u, v in itertools.combinations(pool, 2) if form(u, v)), None)
            if pair is None:  # remaining span lies in the radical
                out.extend(pool)
                diag.extend([0] * len(pool))
                break
            pick = (pair[0] + pair[1]) % p
            pool = [v for v in pool if v is not pair[0]]
        else:
            pool = [v for v in pool if v is not pick]
        q = form(pick, pick)
        qi = pow(q, -1, p)
        pool = [(v - form(v, pick) * qi * pick) % p for v in pool]
        out.append(pick)
        diag.append(q)
    S = np.stack(out, axis=1) % p
    return S, np.array(diag, dtype=np.int64)


def _inv_mod_matrix(S: np.ndarray, p: int) -> np.ndarray:
    d = len(S)
    aug = np.concatenate([S % p, np.eye(d, dtype=np.int64)], axis=1)
    for c in range(d):
        piv = next(i for i in range(c, d) if aug[i, c] % p)
        aug[[c, piv]] = aug[[piv, c]]
        aug[c] = aug[c] * pow(int(aug[c, c]), -1, p) % p
        for i in range(d):
            if i != c and aug[i, c]:
                aug[i] = (aug[i] - aug[i, c] * aug[c]) % p
    return aug[:, d:]


def charpoly_coeffs(M: np.ndarray, p: int) -> np.ndarray:
    """(c_1, ..., c_k) with det(t - M) = t^k + c_1 t^{k-1} + ... + c_k, batched over M[..., k, k]."""
    k = M.shape[-1]
    tr = np.trace(M, axis1=-2, axis2=-1)
    if k == 1:
        return (-M[..., 0, 0] % p)[..., None]
    if k == 2:
        det = M[..., 0, 0] * M[..., 1, 1] - M[..., 0, 1] * M[..., 1, 0]
        return np.stack([-tr, det], axis=-1) % p
    if k == 3:
        m2 = sum(M[..., i, i] * M[..., j, j] - M[..., i, j] * M[..., j, i] for i, j in ((0, 1), (0, 2), (1, 2)))
        det = (
            M[..., 0, 0] * (M[..., 1, 1] * M[..., 2, 2] - M[..., 1, 2] * M[..., 2, 1])
            - M[..., 0, 1] * (M[..., 1, 0] * M[..., 2, 2] - M[..., 1, 2] * M[..., 2, 0])
            + M[..., 0, 2] * (M[..., 1, 0] * M[..., 2, 1] - M[..., 1, 1] * M[..., 2, 0])
        )
        return np.stack([-tr, m2, -det], axis=-1) % p
    raise ValueError("block size must be 1, 2 or 3")


def _polymul(a: Sequence[int], b: Sequence[int], p: int) -> tuple[int, ...]:
    """Monic polynomials given by their non-leading coefficients."""
    A, B = (1,) + tuple(a), (1,) + tuple(b)
    out = [0] * (len(A) + len(B) - 1)
    for i, x in enumerate(A):
        for j, y in enumerate(B):
            out[i + j] = (out[i + j] + x * y) % p
    return tuple(out[1:])


def _block_index(composition: Sequence[int]) -> np.ndarray:
    return np.repeat(np.arange(len(composition)), composition)


class FinLieAlgebra:
    """A Levi subalgebra of sl_n(F_p) for a block composition (the whole of sl_n for (n,))."""

    def __init__(self, n: int, p: int, composition: Sequence[int] | None = None, allow_degenerate: bool = False):
        if p == 2:
            raise ValueError("p must be odd")
        self.n, self.p = n, p
        self.composition = tuple(composition) if composition is not None else (n,)
        if sum(self.composition) != n:
            raise ParabolicDataError("composition must sum to n")
        mats, labels = standard_basis(n)
        blk = _block_index(self.composition)
        keep = []
        for idx, lab in enumerate(labels):
            if lab.startswith("E"):
                i, j = int(lab[1]) - 1, int(lab[2]) - 1
                if blk[i] != blk[j]:
                    continue
            keep.append(idx)
        self.ambient_basis = tuple(keep)  # indices into the sl_n standard basis
        self.basis = [mats[i] for i in keep]
        self.labels = [labels[i] for i in keep]
        self.dim = len(keep)
        self.size = p**self.dim
        self.shape = (p,) * self.dim
        B = np.stack(self.basis)
        self.gram = np.einsum("aij,bji->ab", B, B) % p
        self.S, self.diag = orthogonalize(self.gram, p)
        self.degenerate = bool(np.any(self.diag == 0))
        if self.degenerate and not allow_degenerate:
            raise DegenerateFormError(
                f"trace form on {self.name} is degenerate (radical dimension {int(np.sum(self.diag == 0))})"
            )
        self.S_inv = _inv_mod_matrix(self.S, p)

    @property
    def name(self) -> str:
        if self.composition == (self.n,):
            return f"sl{self.n}(F{self.p})"
        return f"l{self.composition}<sl{self.n}(F{self.p})"

    @property
    def is_full(self) -> bool:
        return self.composition == (self.n,)

    # -- elements --------------------------------------------------------------

    @cached_property
    def coords(self) -> np.ndarray:
        """All elements as coordinate rows, in C order."""
        grids = np.indices(self.shape, dtype=np.int64).reshape(self.dim, -1).T
        return grids

    def to_matrix(self, coords: np.ndarray) -> np.ndarray:
        c = np.asarray(coords, dtype=np.int64)
        return np.einsum("...a,aij->...ij", c, np.stack(self.basis)) % self.p

    def from_matrix(self, M: np.ndarray) -> np.ndarray:
        M = np.asarray(M, dtype=np.int64) % self.p
        out = []
        for lab in self.labels:
            if lab.startswith("E"):
                i, j = int(lab[1]) - 1, int(lab[2]) - 1
                out.append(M[..., i, j])
            else:
                k = int(lab[1])
                out.append(sum(M[..., t, t] for t in range(k)))
        return np.stack(out, axis=-1) % self.p

    def index_of(self, coords: np.ndarray) -> np.ndarray:
        c = np.asarray(coords, dtype=np.int64) % self.p
        w = self.p ** np.arange(self.dim - 1, -1, -1, dtype=np.int64)
        return c @ w

    @cached_property
    def matrices(self) -> np.ndarray:
        return self.to_matrix(self.coords)

    def pairing(self, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
        return np.einsum("...a,ab,...b->...", np.asarray(X), self.gram, np.asarray(Y)) % self.p

    # -- invariants --------------------------------------------------------------

    def group_generators(self) -> list[np.ndarray]:
        """Generators of the Levi subgroup of SL_n(F_p) acting by conjugation."""
        n, p = self.n, self.p
        blk = _block_index(self.composition)
        gens = []
        for i, j in itertools.permutations(range(n), 2):
            if blk[i] == blk[j]:
                g = np.eye(n, dtype=np.int64)
                g[i, j] = 1
                gens.append(g)
        g0 = unit_group_generator(p).value
        for b in range(len(self.composition) - 1):
            i = int(np.flatnonzero(blk == b)[0])
            j = int(np.flatnonzero(blk == b + 1)[0])
            t = np.eye(n, dtype=np.int64)
            t[i, i], t[j, j] = g0, pow(g0, -1, p)
            gens.append(t)
        return gens

    @cached_property
    def adjoint_perms(self) -> list[np.ndarray]:
        out = []
        for g in self.group_generators():
            ginv = _inv_mod_matrix(g, self.p)
            conj = np.einsum("ij,kjl,lm->kim", g, self.matrices, ginv) % self.p
            out.append(self.index_of(self.from_matrix(conj)))
        return out

    def is_invariant(self, f: np.ndarray, tol: float = TOL) -> bool:
        return all(np.max(np.abs(f[perm] - f)) < tol for perm in self.adjoint_perms)

    def form_is_invariant(self) -> bool:
        X = self.coords
        base = self.pairing(X[:, None, :], X[None, :, :]) if self.size <= 729 else None
        if base is None:
            rng = np.random.default_rng(0)
            idx = rng.integers(0, self.size, size=(400, 2))
            for perm in self.adjoint_perms:
                a = self.pairing(X[idx[:, 0]], X[idx[:, 1]])
                b = self.pairing(X[perm[idx[:, 0]]], X[perm[idx[:, 1]]])
                if np.any(a != b):
                    return False
            return True
        for perm in self.adjoint_perms:
            if np.any(self.pairing(X[perm][:, None, :], X[perm][None, :, :]) != base):
                return False
        return True

    # -- Chevalley map -------------------------------------------------------------

    @cached_property
    def block_charpolys(self) -> np.ndarray:
        """Per-element concatenated characteristic-polynomial coefficients of the diagonal blocks."""
        M = self.matrices
        parts, start = [], 0
        for k in self.composition:
            parts.append(charpoly_coeffs(M[:, start : start + k, start : start + k], self.p))
            start += k
        return np.concatenate(parts, axis=1)

    @cached_property
    def _chart(self) -> tuple[list[tuple[int, ...]], np.ndarray]:
        if self.is_full:
            # (c_2, ..., c_n): the trace coefficient vanishes on sl_n
            keys = self.block_charpolys[:, 1:]
            pts = list(itertools.product(range(self.p), repeat=self.n - 1))
            w = self.p ** np.arange(self.n - 2, -1, -1, dtype=np.int64)
            return pts, keys @ w
        uniq, inv = np.unique(self.block_charpolys, axis=0, return_inverse=True)
        return [tuple(map(int, r)) for r in uniq], inv.ravel()

    @property
    def chart_points(self) -> list[tuple[int, ...]]:
        return self._chart[0]

    @property
    def chart_index(self) -> np.ndarray:
        """Chart label (index into chart_points) of every element."""
        return self._chart[1]

    def chevalley(self, X: np.ndarray) -> tuple[int, ...]:
        return self.chart_points[int(self.chart_index[int(self.index_of(X))])]

    def chart_to_ambient(self, ambient: FinLieAlgebra) -> np.ndarray:
        """Index map from this Levi's chart to the chart of the ambient sl_n."""
        out = []
        for pt in self.chart_points:
            poly: tuple[int, ...] = ()
            start = 0
            for k in self.composition:
                poly = _polymul(poly, pt[start : start + k], self.p)
                start += k
            out.append(ambient.chart_points.index(tuple(poly[1:])))
        return np.array(out, dtype=np.int64)

    def chart_image_is_full(self) -> bool:
        return len(np.unique(self.chart_index)) == len(self.chart_points)

    # -- Fourier transform ------------------------------------------------------------

    @cached_property
    def orth_perm(self) -> np.ndarray:
        """orth_perm[i] = C-order index, in orthogonal coordinates, of element i."""
        y = (self.coords @ self.S_inv.T) % self.p
        return self.index_of(y)

    @cached_property
    def _axis_mats(self) -> list[np.ndarray]:
        a = np.arange(self.p)
        return [psi_array(int(d) * np.outer(a, a), self.p) for d in self.diag]

    def ft(self, f: np.ndarray) -> np.ndarray:
        """|g|^{-1/2} sum_Y psi(<X,Y>) f(Y), axis by axis in orthogonal coordinates."""
        f = np.asarray(f, dtype=np.complex128)
        F = np.empty_like(f)
        F[self.orth_perm] = f
        F = F.reshape(self.shape)
        for ax, M in enumerate(self._axis_mats):
            F = np.moveaxis(np.tensordot(M, F, axes=([1], [ax])), 0, ax)
        return F.reshape(-1)[self.orth_perm] / math.sqrt(self.size)

    def ft_naive(self, f: np.ndarray) -> np.ndarray:
        X = self.coords
        K = psi_array(self.pairing(X[:, None, :], X[None, :, :]), self.p)
        return K @ np.asarray(f, dtype=np.complex128) / math.sqrt(self.size)

    def convolve(self, f: np.ndarray, g: np.ndarray) -> np.ndarray:
        """|g|^{-1/2} sum_Y f(X - Y) g(Y), via the FFT on (Z/p)^dim."""
        F = np.fft.fftn(np.asarray(f, dtype=np.complex128).reshape(self.shape))
        G = np.fft.fftn(np.asarray(g, dtype=np.complex128).reshape(self.shape))
        return np.fft.ifftn(F * G).reshape(-1) / math.sqrt(self.size)

    def convolve_naive(self, f: np.ndarray, g: np.ndarray) -> np.ndarray:
        X = self.coords
        out = np.zeros(self.size, dtype=complex)
        for y in range(self.size):
            out += f[self.index_of(X - X[y])] * g[y]
        return out / math.sqrt(self.size)

    def negate(self, f: np.ndarray) -> np.ndarray:
        return np.asarray(f)[self.index_of(-self.coords)]

    # -- stable functions ---------------------------------------------------------------

    def pullback(self, z: np.ndarray) -> np.ndarray:
        return np.asarray(z, dtype=np.complex128)[self.chart_index]

    def stable_from_param(self, z: np.ndarray) -> np.ndarray:
        """f_z = FT(chi^* z)."""
        return self.ft(self.pullback(z))

    def stable_basis(self) -> list[np.ndarray]:
        k = len(self.chart_points)
        return [self.stable_from_param(np.eye(k)[t]) for t in range(k)]

    def fiber_deviation(self, f: np.ndarray) -> float:
        """Max spread of FT(f) inside Chevalley fibers."""
        F = self.ft(f)
        idx = self.chart_index
        k = len(self.chart_points)
        worst = 0.0
        for part in (F.real, F.imag):
            hi = np.full(k, -np.inf)
            lo = np.full(k, np.inf)
            np.maximum.at(hi, idx, part)
            np.minimum.at(lo, idx, part)
            worst = max(worst, float(np.max(hi - lo)))
        return worst

    def is_stable(self, f: np.ndarray, tol: float = TOL) -> bool:
        return self.fiber_deviation(f) < tol


def lie_algebra(n: int, p: int, allow_degenerate: bool = False) -> FinLieAlgebra:
    return FinLieAlgebra(n, p, None, allow_degenerate)


CONFIGURED_ALGEBRAS = ((2, 3), (3, 3), (2, 5), (2, 7), (3, 5))


# ---------------------------------------------------------------------------
# Parabolic restriction and vanishing


def parabolic_compositions(n: int) -> list[tuple[int, ...]]:
    """Compositions of n with at least two parts (standard proper parabolics)."""
    out = []
    for k in range(2, n + 1):
        for cuts in itertools.combinations(range(1, n), k - 1):
            bounds = (0,) + cuts + (n,)
            out.append(tuple(b - a for a, b in zip(bounds, bounds[1:])))
    return out


@dataclass(frozen=True)
class _Split:
    levi_axes: tuple[int, ...]
    nil_axes: tuple[int, ...]
    opp_axes: tuple[int, ...]


def _split_axes(source: FinLieAlgebra, target: FinLieAlgebra) -> _Split:
    """Axes of source coordinates lying in l_target, n_target and the opposite radical."""
    if target.n != source.n or target.p != source.p:
        raise ParabolicDataError("algebras over different sl_n")
    if not set(target.ambient_basis) <= set(source.ambient_basis):
        raise ParabolicDataError("target Levi is not contained in source")
    blk = _block_index(target.composition)
    levi, nil, opp = [], [], []
    for ax, lab in enumerate(source.labels):
        if lab.startswith("H"):
            levi.append(ax)
            continue
        i, j = int(lab[1]) - 1, int(lab[2]) - 1
        if blk[i] == blk[j]:
            levi.append(ax)
        elif blk[i] < blk[j]:
            nil.append(ax)
        else:
            opp.append(ax)
    return _Split(tuple(levi), tuple(nil), tuple(opp))


def res_lie(f: np.ndarray, source: FinLieAlgebra, target: FinLieAlgebra) -> np.ndarray:
    """Res(f)(v) = |n|^{-1} sum_{n} f(v + n) for v in the target Levi."""
    sp = _split_axes(source, target)
    F = np.asarray(f).reshape(source.shape)
    index = tuple(0 if ax in sp.opp_axes else slice(None) for ax in range(source.dim))
    F = F[index]
    remaining = [ax for ax in range(source.dim) if ax not in sp.opp_axes]
    nil_pos = tuple(remaining.index(ax) for ax in sp.nil_axes)
    if nil_pos:
        F = F.mean(axis=nil_pos)
    return F.reshape(-1)


@dataclass(frozen=True)
class VanishingReport:
    algebra: str
    composition: tuple[int, ...]
    max_abs: float
    witness: tuple[tuple[int, ...], ...] | None
    sites: int

    @property
    def passed(self) -> bool:
        return self.max_abs < TOL


def vanishing_check_lie(f: np.ndarray, g: FinLieAlgebra, composition: Sequence[int]) -> VanishingReport:
    """max over X outside p of |sum_{n in n_P} f(X + n)|, with a witness."""
    target = FinLieAlgebra(g.n, g.p, composition, allow_degenerate=True)
    sp = _split_axes(g, target)
    F = np.asarray(f).reshape(g.shape)
    S = F.sum(axis=sp.nil_axes) if sp.nil_axes else F
    keep = [ax for ax in range(g.dim) if ax not in sp.nil_axes]
    opp_pos = [keep.index(ax) for ax in sp.opp_axes]
    grid = np.indices(S.shape).reshape(len(keep), -1).T
    outside = np.any(grid[:, opp_pos] != 0, axis=1)
    vals = np.abs(S.reshape(-1))[outside]
    if vals.size == 0:
        return VanishingReport(g.name, tuple(composition), 0.0, None, 0)
    k = int(np.argmax(vals))
    coords = np.zeros(g.dim, dtype=np.int64)
    coords[keep] = grid[outside][k]
    witness = tuple(map(tuple, g.to_matrix(coords).tolist()))
    sites = int(outside.sum()) * g.p ** len(sp.nil_axes)
    return VanishingReport(g.name, tuple(composition), float(vals[k]), witness, sites)


def orbit_indicator(g: FinLieAlgebra, X: np.ndarray) -> np.ndarray:
    """Indicator of the adjoint orbit of X (closure under the generators)."""
    start = int(g.index_of(X))
    seen = {start}
    frontier = [start]
    perms = g.adjoint_perms
    while frontier:
        nxt = []
        for x in frontier:
            for perm in perms:
                y = int(perm[x])
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    f = np.zeros(g.size)
    f[list(seen)] = 1.0
    return f
