"""Verification suites, one per acceptance criterion, each returning structured reports."""

from __future__ import annotations

import itertools
import time
from dataclasses import asdict, dataclass, field
from typing import Any, Callable

import numpy as np

from . import hecke as hk
from .algcore import TOL, primitive_root_mod_p2, unit_group_generator
from .dlstable import ConstraintError, dl_orthogonality_residual, dual_chart, is_idempotent_family, nonstable_witness, sl2_data
from .grpfin import CapacityError, ClassFunction, StructureError, block_parabolic, enumerate_group, parabolic_res_group
from .liestable import FinLieAlgebra, orbit_indicator, parabolic_compositions, res_lie, vanishing_check_lie
from .rootsys import (
    AffineWeylElement,
    ParahoricLabel,
    PreconditionError,
    enumerator,
    jw,
    root_datum,
    s_set,
    standard_parahorics,
    verify_decomposition_roots,
)

VERSION = "1"
WINDOW_COUNT_MAX = 4  # |SL_2(Z/3^4)| = 472392 is the largest table we count in


@dataclass
class CheckReport:
    id: str
    params: dict[str, Any]
    status: str  # "pass" | "fail" | "inconclusive"
    residual: float
    witnesses: list[Any] = field(default_factory=list)
    details: dict[str, Any] = field(default_factory=dict)
    environment: dict[str, Any] = field(default_factory=dict)
    elapsed_ms: int | None = None

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


def _r(x: float) -> float:
    """Residuals rounded to three significant digits so reports are stable."""
    return float(f"{float(x):.3e}")


def environment(p: int, seed: int = 0) -> dict[str, Any]:
    return {
        "p": p,
        "psi": "t -> exp(2 pi i t / p)",
        "generator": unit_group_generator(p).value,
        "generator_mod_p2": primitive_root_mod_p2(p),
        "mu": "mu(I+) = 1",
        "seed": seed,
    }


def _timed(fn: Callable[..., CheckReport]) -> Callable[..., CheckReport]:
    def run(*args: Any, timings: bool = False, **kw: Any) -> CheckReport:
        t0 = time.perf_counter()
        rep = fn(*args, **kw)
        if timings:
            rep.elapsed_ms = int(1000 * (time.perf_counter() - t0))
        return rep

    run.__name__ = fn.__name__
    run.__doc__ = fn.__doc__
    return run


def _status(ok: bool) -> str:
    return "pass" if ok else "fail"


def _algebra(n: int, q: int) -> FinLieAlgebra:
    return FinLieAlgebra(n, q, None, allow_degenerate=True)


def _random_functions(g: FinLieAlgebra, seed: int, k: int) -> list[np.ndarray]:
    rng = np.random.default_rng(seed)
    return [rng.normal(size=g.size) + 1j * rng.normal(size=g.size) for _ in range(k)]


# ---------------------------------------------------------------------------
# 1. Fourier transform


@_timed
def check_ft(n: int, q: int, seed: int = 0) -> CheckReport:
    """Multiplicativity, the convolution dual, FT^2 = f^-, FT o Res = Res o FT, Plancherel."""
    g = _algebra(n, q)
    f1, f2 = _random_functions(g, seed, 2)
    F1, F2 = g.ft(f1), g.ft(f2)
    res = {
        "ft_of_convolution": float(np.max(np.abs(g.ft(g.convolve(f1, f2)) - F1 * F2))),
        "ft_of_product": float(np.max(np.abs(g.ft(f1 * f2) - g.convolve(F1, F2)))),
        "ft_squared": float(np.max(np.abs(g.ft(F1) - g.negate(f1)))),
        "plancherel": float(abs(np.sum(np.abs(f1) ** 2) - np.sum(np.abs(F1) ** 2)) / g.size),
    }
    worst_res = 0.0
    for comp in parabolic_compositions(n):
        levi = FinLieAlgebra(n, q, comp, allow_degenerate=True)
        worst_res = max(worst_res, float(np.max(np.abs(levi.ft(res_lie(f1, g, levi)) - res_lie(F1, g, levi)))))
    res["ft_res_commute"] = worst_res
    if g.size <= 400:
        res["fast_vs_naive"] = float(np.max(np.abs(F1 - g.ft_naive(f1))))
        res["fft_convolution_vs_naive"] = float(np.max(np.abs(g.convolve(f1, f2) - g.convolve_naive(f1, f2))))
    tol = {"fast_vs_naive": 1e-10}
    failing = [k for k, v in res.items() if v >= tol.get(k, TOL)]
    details = {k: _r(v) for k, v in res.items()}
    details["degenerate_form"] = g.degenerate
    return CheckReport(
        "ft", {"algebra": f"sl{n}", "q": q}, _status(not failing), _r(max(res.values())), failing, details, environment(q, seed)
    )


# ---------------------------------------------------------------------------
# 2. Stable algebra


@_timed
def check_stable_algebra(n: int, q: int, seed: int = 0) -> CheckReport:
    """f_theta * f_theta' = [theta = theta'] f_theta and dim C^st = q^{n-1}."""
    g = _algebra(n, q)
    basis = g.stable_basis()
    k = len(basis)
    spectra = [np.fft.fftn(b.reshape(g.shape)) for b in basis]
    scale = np.sqrt(g.size)
    worst, witness = 0.0, []
    for i in range(k):
        for j in range(i, k):
            prod = np.fft.ifftn(spectra[i] * spectra[j]).reshape(-1) / scale
            target = basis[i] if i == j else 0.0
            d = float(np.max(np.abs(prod - target)))
            if d > worst:
                worst = d
            if d >= TOL and len(witness) < 5:
                witness.append([list(g.chart_points[i]), list(g.chart_points[j])])
    rank = int(np.linalg.matrix_rank(np.stack(basis), tol=1e-6))
    stable_dev = max(g.fiber_deviation(b) for b in basis)
    expected = q ** (n - 1)
    ok = worst < TOL and rank == expected and k == expected and stable_dev < TOL
    details = {"chart_size": k, "rank": rank, "expected_dim": expected, "product_residual": _r(worst), "fiber_deviation": _r(stable_dev)}
    return CheckReport("stable-algebra", {"algebra": f"sl{n}", "q": q}, _status(ok), _r(worst), witness, details, environment(q, seed))


# ---------------------------------------------------------------------------
# 3. Lie vanishing


@_timed
def check_vanishing_lie(n: int, q: int, seed: int = 0) -> CheckReport:
    """sum over n_P of f(X + n) vanishes off p for stable f; a non-stable f must fail."""
    g = _algebra(n, q)
    basis = g.stable_basis()
    worst, witness, sites = 0.0, [], 0
    for comp in parabolic_compositions(n):
        for t, f in enumerate(basis):
            rep = vanishing_check_lie(f, g, comp)
            sites += rep.sites
            if rep.max_abs > worst:
                worst = rep.max_abs
            if not rep.passed and len(witness) < 5:
                witness.append({"composition": list(comp), "chart": list(g.chart_points[t]), "X": [list(r) for r in rep.witness]})
    X = np.zeros((n, n), dtype=np.int64)
    X[0, 1] = 1
    counter = vanishing_check_lie(orbit_indicator(g, g.from_matrix(X)), g, (1,) * n)
    found = counter.max_abs > 1e-6
    ok = worst < TOL and found
    details = {
        "sites": sites,
        "counterexample_found": found,
        "counterexample_value": _r(counter.max_abs),
        "counterexample_X": [list(r) for r in counter.witness] if counter.witness else None,
    }
    return CheckReport("vanishing-lie", {"algebra": f"sl{n}", "q": q}, _status(ok), _r(worst), witness, details, environment(q, seed))


# ---------------------------------------------------------------------------
# 4. Restriction diagrams


@_timed
def check_res_diagram_lie(n: int, q: int, seed: int = 0) -> CheckReport:
    """Res(f_z) = f^L_{res z} on every standard Levi, plus transitivity through intermediate Levis."""
    g = _algebra(n, q)
    rng = np.random.default_rng(seed)
    z = rng.normal(size=len(g.chart_points)) + 1j * rng.normal(size=len(g.chart_points))
    fz = g.stable_from_param(z)
    worst, witness = 0.0, []
    levis = {comp: FinLieAlgebra(n, q, comp, allow_degenerate=True) for comp in parabolic_compositions(n)}
    for comp, levi in levis.items():
        pulled = z[levi.chart_to_ambient(g)]
        d = float(np.max(np.abs(res_lie(fz, g, levi) - levi.stable_from_param(pulled))))
        worst = max(worst, d)
        if d >= TOL:
            witness.append({"composition": list(comp), "residual": _r(d)})
    trans = 0.0
    f = _random_functions(g, seed + 1, 1)[0]
    for small, big in itertools.permutations(levis, 2):
        if levis[small].ambient_basis != levis[big].ambient_basis and set(levis[small].ambient_basis) <= set(levis[big].ambient_basis):
            two = res_lie(res_lie(f, g, levis[big]), levis[big], levis[small])
            trans = max(trans, float(np.max(np.abs(two - res_lie(f, g, levis[small])))))
    ok = worst < TOL and trans < TOL
    details = {"diagram_residual": _r(worst), "transitivity_residual": _r(trans)}
    return CheckReport("res-diagram", {"side": "lie", "algebra": f"sl{n}", "q": q}, _status(ok), _r(max(worst, trans)), witness, details, environment(q, seed))


@_timed
def check_res_diagram_group(q: int, seed: int = 0) -> CheckReport:
    """res to the torus of f_theta equals the torus idempotent at theta; Res transitivity on SL_3(F_3)."""
    data = sl2_data(q, seed)
    worst = 0.0
    for pt in dual_chart(q):
        d = float(np.max(np.abs(data.res_to_torus(data.f_theta(pt.coordinate)) - data.torus_stable(pt.coordinate))))
        worst = max(worst, d)
    trans = 0.0
    if q == 3:
        A = enumerate_group(3, 3)
        rng = np.random.default_rng(seed)
        f = ClassFunction(A, rng.normal(size=A.num_classes)).expand()
        ids = np.arange(A.order)
        direct = parabolic_res_group(f, ids, block_parabolic(A, (1, 1, 1)))
        for mid in ((2, 1), (1, 2)):
            outer = block_parabolic(A, mid)
            on_levi = parabolic_res_group(f, ids, outer)
            inner_data = block_parabolic(A, (1, 1, 1), within=mid)
            if not np.array_equal(inner_data.levi, block_parabolic(A, (1, 1, 1)).levi):
                raise StructureError("torus ids differ between parabolic data")
            two = parabolic_res_group(on_levi, outer.levi, inner_data)
            trans = max(trans, float(np.max(np.abs(two - direct))))
    ok = worst < TOL and trans < TOL
    details = {"torus_diagram_residual": _r(worst), "sl3_transitivity_residual": _r(trans)}
    return CheckReport("res-diagram", {"side": "group", "q": q}, _status(ok), _r(max(worst, trans)), [], details, environment(q, seed))


# ---------------------------------------------------------------------------
# 5. Group side


EXPECTED_BLOCKS = {3: [2, 4, 1], 5: [2, 4, 1, 1, 1], 7: [2, 4, 1, 1, 1, 1, 1]}


@_timed
def check_series(q: int, seed: int = 0) -> CheckReport:
    """Chart size, series block sizes and gamma_{f_theta} in {0, 1}."""
    data = sl2_data(q, seed)
    chart = dual_chart(q)
    blocks = data.block_sizes()
    gamma_dev = is_idempotent_family(data)
    ok = len(chart) == q and sorted(blocks) == sorted(EXPECTED_BLOCKS[q]) and gamma_dev < 1e-6
    details = {
        "chart": [pt.coordinate for pt in chart],
        "block_sizes": blocks,
        "gamma_deviation": _r(gamma_dev),
        "covers_irr": sum(blocks) == len(data.chars),
    }
    return CheckReport("series", {"q": q}, _status(ok), _r(gamma_dev), [], details, environment(q, seed))


@_timed
def check_vanishing_group(q: int, seed: int = 0) -> CheckReport:
    """Borel vanishing for every f_theta and f_s, and a non-stable witness."""
    data = sl2_data(q, seed)
    worst, sites = 0.0, 0
    for pt in dual_chart(q):
        for f in (data.f_theta(pt.coordinate), data.f_s(pt.coordinate)):
            res, n, _ = data.vanishing_check_group(f)
            worst, sites = max(worst, res), sites + n
    try:
        idx, wres, site = nonstable_witness(data)
        found = {"character": idx, "residual": _r(wres), "element": data.G.elements[site].tolist()}
    except StructureError:
        found = None
    ok = worst < TOL and found is not None
    details = {"sites": sites, "nonstable_witness": found}
    return CheckReport("vanishing-group", {"q": q}, _status(ok), _r(worst), [], details, environment(q, seed))


# ---------------------------------------------------------------------------
# 6. DL constraints


@_timed
def check_dl_constraints(q: int, seed: int = 0) -> CheckReport:
    """Recovered R's: integral inner products matching Weyl counts, degrees q+1 and -(q-1)."""
    data = sl2_data(q, seed)
    try:
        Rs = data.dl_characters
    except ConstraintError as exc:
        return CheckReport("dl-constraints", {"q": q}, "fail", float("inf"), [str(exc)], {}, environment(q, seed))
    dev, frac = dl_orthogonality_residual(data)
    bad_deg = [
        {"torus": R.torus_type, "k": R.k, "degree": R.degree()}
        for R in Rs
        if R.degree() != (q + 1 if R.torus_type == "split" else -(q - 1))
    ]
    covered = set()
    for R in Rs:
        covered |= {i for i, c in enumerate(R.coefficients) if c}
    ok = dev < TOL and frac < TOL and not bad_deg and len(covered) == len(data.chars)
    details = {
        "count": len(Rs),
        "inner_product_residual": _r(dev),
        "integrality_residual": _r(frac),
        "surjective": len(covered) == len(data.chars),
    }
    return CheckReport("dl-constraints", {"q": q}, _status(ok), _r(max(dev, frac)), bad_deg, details, environment(q, seed))


# ---------------------------------------------------------------------------
# 7. Root combinatorics


def decomposition_grid(label: str, max_length: int = 6, n_max: int = 2, r_max: int = 1):
    """Yield (w, alpha, J, Q, n, r, holds) over every precondition-valid tuple."""
    d = root_datum(label)
    nodes = d.affine_nodes
    Qs = standard_parahorics(label)
    for w in enumerator(label).up_to(max_length):
        for alpha in nodes:
            for k in range(len(nodes)):
                for J in itertools.combinations(nodes, k):
                    for Q in Qs:
                        for n in range(n_max + 1):
                            for r in range(r_max + 1):
                                try:
                                    ok = verify_decomposition_roots(w, alpha, J, Q, n, r)
                                except PreconditionError:
                                    continue
                                yield w, alpha, J, Q, n, r, ok


@_timed
def check_root_claims(label: str, length_max: int = 6, n_max: int = 2, seed: int = 0) -> CheckReport:
    """S(P^+) = {1}; saturated S(Q_n^+) for n <= n_max; the decomposition claim on the grid."""
    e = AffineWeylElement.identity(label)
    bad_s, sizes = [], {}
    for Q in standard_parahorics(label):
        res0 = s_set(Q, 0)
        if res0.status != "saturated" or [w.key for w in res0.elements] != [e.key]:
            bad_s.append({"Q": Q.name(), "n": 0})
        for n in range(1, n_max + 1):
            res = s_set(Q, n)
            sizes[f"{Q.name()}:{n}"] = res.size
            if res.status != "saturated":
                bad_s.append({"Q": Q.name(), "n": n, "status": res.status})
    valid = passed = 0
    failures = []
    for w, alpha, J, Q, n, r, ok in decomposition_grid(label, length_max, n_max, 1):
        valid += 1
        passed += ok
        if not ok and len(failures) < 5:
            failures.append({"w": list(w.word), "alpha": alpha, "J": list(J), "Q": Q.name(), "n": n, "r": r})
    ok = not bad_s and valid > 0 and passed == valid
    details = {"s_set_sizes": sizes, "grid_valid": valid, "grid_passed": passed, "s_set_failures": bad_s}
    rate = passed / valid if valid else 0.0
    return CheckReport(
        "root-claims", {"type": label, "length_max": length_max, "n_max": n_max}, _status(ok), _r(1 - rate), failures, details, {"seed": seed}
    )


# ---------------------------------------------------------------------------
# 8. Hecke window


_NAME = {frozenset(): "I", frozenset({0}): "hs0", frozenset({1}): "hs1"}


def _stable_families(win: hk.HeckeWindow, depth: int) -> list[tuple[str, dict[str, hk.CosetFunction]]]:
    out = [("delta", hk.delta_family(win, depth))]
    if depth == 0:
        out += [(f"f_theta={pt.coordinate}", hk.limit_depth0(win, pt.coordinate)) for pt in dual_chart(win.p)]
    else:
        out += [(f"f_z=1[{c}]", hk.limit_depth_r(win, {c: 1}, depth)) for c in range(win.p)]
    return out


@_timed
def check_hecke(p: int = 3, r: int = 0, window: int | None = None, seed: int = 0) -> CheckReport:
    """Exact identities in the window: delta products, comp squares, eval, stabilization, e o j, c_mu."""
    win = hk.HeckeWindow(p, r, window)
    deep = hk.HeckeWindow(p, r, (window or r + 3) + 1)  # objects at depth r + 1
    parts: dict[str, bool] = {}
    witnesses: list[Any] = []

    # measures: closed formula against index counts at two window levels
    ok = True
    for P in hk.PARAHORICS:
        for depth in (r, r + 1):
            for plus in (False, True):
                d = hk.parahoric_descriptor(P, depth, plus)
                d.check(p)
                low = max(d.lt, d.lb + 1, d.lc - 1, 1) if d.lb < 0 else max(d.lt, d.lb, d.lc, 1)
                levels = [N for N in (low, low + 1) if N <= WINDOW_COUNT_MAX]
                ok &= bool(levels) and {hk.measure_by_window(d, p, N) for N in levels} == {d.measure(p)}
    parts["measure"] = ok

    prods = hk.verify_delta_products(win, r)
    parts["delta_products"] = all(v for _, v in prods)
    witnesses += [name for name, v in prods if not v]

    # delta-lemma on precondition-valid tuples (A1, length <= 2, n <= 1)
    lemma_ok, lemma_count = True, 0
    for w, alpha, J, Q, n, rr, _ in decomposition_grid("A1", 2, 1, 0):
        lemma_count += 1
        held = hk.verify_delta_lemma(deep, w, J, alpha, _NAME[Q.J], n, r)
        lemma_ok &= held
        if not held:
            witnesses.append({"delta_lemma": {"w": list(w.word), "alpha": alpha, "J": list(J), "Q": _NAME[Q.J], "n": n}})
    parts["delta_lemma"] = lemma_ok and lemma_count > 0

    fams = _stable_families(win, r)
    parts["comp"] = all(all(hk.compatibility_report(h, win, r).values()) for _, h in fams)
    ev = True
    for name, h in fams:
        for rep in hk.verify_eval(h, win, r):
            if not rep.holds:
                ev = False
                witnesses.append({"eval": name, "P": rep.parahoric, "Y": [list(t) for t in rep.lower_set]})
    parts["eval"] = ev

    stab = [hk.verify_stabilization(fams[0][1], win, 1, r), hk.verify_stabilization(fams[1][1], win, 1, r)]
    if r == 0:
        stab.append(hk.verify_stabilization(hk.delta_family(deep, 0), deep, 2, 0))
    parts["stabilization"] = all(s.status == "stable" and s.stabilized_at is not None and s.stabilized_at <= s.target_index for s in stab)

    if r == 0:
        ej = True
        for name, h in [("delta", hk.delta_family(deep, 0))] + [
            (f"f_theta={pt.coordinate}", hk.limit_depth0(deep, pt.coordinate)) for pt in dual_chart(p)
        ]:
            j = hk.j_section(h, deep)
            e = hk.e_map(j, deep, 0)
            ej &= all(e[P].equals(h[P]) for P in hk.PARAHORICS) and all(hk.compatibility_report(j, deep, 1).values())
        parts["e_after_j"] = ej

    parts["c_mu"] = win.c_mu_squared("I", 1) == win.c_mu_squared("hs1", 1) == win.c_mu_squared("hs0", 1)
    parts["perp"] = all(hk.verify_perp(P, s, p) for P in hk.PARAHORICS for s in (1, 2))

    oracle = True
    for w in list(enumerator("A1").up_to(2)):
        for P in hk.PARAHORICS:
            lev = win.group(P, 0)
            if frozenset(hk._J[P]) <= jw(w):
                keys = {lev.key(y) for y in hk.digit_reps(w, p)}
                oracle &= keys == hk.cell_oracle(w, P, win) and len(keys) == p ** w.length()
    parts["cell_oracle"] = oracle

    ok = all(parts.values())
    details = {
        "parts": parts,
        "delta_lemma_tuples": lemma_count,
        "stabilization": [
            {"n": s.n, "target": [list(t) for t in s.target], "stabilized_at": s.stabilized_at, "target_index": s.target_index, "status": s.status}
            for s in stab
        ],
        "c_mu_1": _r(win.c_mu("I", 1)),
        "window": win.N,
    }
    return CheckReport("hecke", {"p": p, "r": r}, _status(ok), 0.0 if ok else 1.0, witnesses[:10], details, environment(p, seed))


# ---------------------------------------------------------------------------
# 9. Depth-r parameters of minimal K-types


@_timed
def check_ktype_params(p: int = 3, r: int = 1, seed: int = 0) -> CheckReport:
    """xi_scalar(z, chi) = z(theta(chi)) on every K-type and chart basis element."""
    win = hk.HeckeWindow(p, r)
    worst, witness, count = 0.0, [], 0
    nondeg_ok = True
    if r >= 1:
        fams = {c: hk.limit_depth_r(win, {c: 1}, r) for c in range(p)}
        unit = hk.limit_depth_r(win, hk.chart_unit(p), r)
        for P in hk.PARAHORICS:
            for Y in hk.lie_elements(P, p):
                k = hk.ktype(P, r, Y, p)
                theta = hk.theta_of_ktype(k, p)
                if k.nondegenerate and theta == 0:
                    nondeg_ok = False
                    witness.append({"P": P, "chi": list(Y)})
                for c, h in fams.items():
                    v = complex(hk.xi_scalar_lie(h[P], P, Y, win, r))
                    d = abs(v - (1.0 if theta == c else 0.0))
                    count += 1
                    if d > worst:
                        worst = d
                worst = max(worst, abs(complex(hk.xi_scalar_lie(unit[P], P, Y, win, r)) - 1.0))
    else:
        data = sl2_data(p, seed)
        fams = {pt.coordinate: hk.limit_depth0(win, pt.coordinate) for pt in dual_chart(p)}
        for c, h in fams.items():
            for P in ("hs1", "hs0"):
                for s in range(len(data.chars)):
                    theta = hk.theta_of_ktype(hk.ktype(P, 0, (s,), p), p)
                    worst = max(worst, abs(hk.xi_scalar_group(h[P], P, s, win) - (1.0 if theta == c else 0.0)))
                    count += 1
            for s in range(p - 1):
                theta = hk.theta_of_ktype(hk.ktype("I", 0, (s,), p), p)
                worst = max(worst, abs(hk.xi_scalar_group(h["I"], "I", s, win) - (1.0 if theta == c else 0.0)))
                count += 1
    ok = worst < 1e-6 and nondeg_ok
    details = {"evaluations": count, "nondegenerate_nonzero": nondeg_ok}
    return CheckReport("ktype-params", {"p": p, "r": r}, _status(ok), _r(worst), witness, details, environment(p, seed))


# ---------------------------------------------------------------------------
# Default suite

LIE_FT = ((2, 3), (2, 5), (2, 7), (3, 3))
LIE_STABLE = ((2, 3), (3, 3), (2, 5), (2, 7), (3, 5))
LIE_VANISHING = ((2, 3), (2, 5), (3, 3))


def default_suite() -> list[tuple[int, str, Callable[..., CheckReport], dict[str, Any]]]:
    """(criterion, label, check, kwargs) in declared order."""
    out: list[tuple[int, str, Callable[..., CheckReport], dict[str, Any]]] = []
    out += [(1, f"ft sl{n}(F{q})", check_ft, {"n": n, "q": q}) for n, q in LIE_FT]
    out += [(2, f"stable-algebra sl{n}(F{q})", check_stable_algebra, {"n": n, "q": q}) for n, q in LIE_STABLE]
    out += [(3, f"vanishing-lie sl{n}(F{q})", check_vanishing_lie, {"n": n, "q": q}) for n, q in LIE_VANISHING]
    out += [(4, f"res-diagram sl{n}(F{q})", check_res_diagram_lie, {"n": n, "q": q}) for n, q in LIE_STABLE]
    out += [(4, f"res-diagram SL2(F{q})", check_res_diagram_group, {"q": q}) for q in (3, 5)]
    out += [(5, f"series SL2(F{q})", check_series, {"q": q}) for q in (3, 5)]
    out += [(5, f"vanishing-group SL2(F{q})", check_vanishing_group, {"q": q}) for q in (3, 5)]
    out += [(6, f"dl-constraints SL2(F{q})", check_dl_constraints, {"q": q}) for q in (3, 5, 7)]
    out += [(7, f"root-claims {t}", check_root_claims, {"label": t}) for t in ("A1", "A2")]
    out += [(8, f"hecke p=3 r={r}", check_hecke, {"p": 3, "r": r}) for r in (0, 1)]
    out += [(9, f"ktype-params p=3 r={r}", check_ktype_params, {"p": 3, "r": r}) for r in (1, 0)]
    return out


def run_suite(seed: int = 0, timings: bool = False, select: Callable[[int], bool] | None = None) -> list[CheckReport]:
    reports = []
    for crit, _label, fn, kw in default_suite():
        if select is not None and not select(crit):
            continue
        try:
            rep = fn(**kw, seed=seed, timings=timings)
        except CapacityError as exc:
            rep = CheckReport(fn.__name__.removeprefix("check_").replace("_", "-"), kw, "inconclusive", float("inf"), [str(exc)])
        rep.details["criterion"] = crit
        reports.append(rep)
    return reports
