from __future__ import annotations

from collections import defaultdict

from hypothesis import HealthCheck, settings

settings.register_profile(
    "parastab", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("parastab")

# criterion -> [(instance label, passed, residual)]
ACCEPTANCE: dict[int, list[tuple[str, bool, float]]] = defaultdict(list)

TITLES = {
    1: "FT property suite",
    2: "stable-algebra isomorphism",
    3: "Lie vanishing",
    4: "restriction diagrams",
    5: "group side SL2(F3), SL2(F5)",
    6: "DL character constraints",
    7: "root combinatorics",
    8: "Hecke window suite",
    9: "depth-r parameters",
    10: "determinism and total runtime",
}


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for crit in sorted(ACCEPTANCE):
        rows = ACCEPTANCE[crit]
        ok = sum(1 for _, passed, _ in rows if passed)
        verdict = "PASS" if ok == len(rows) else "FAIL"
        worst = max((res for _, _, res in rows), default=0.0)
        failing = ", ".join(label for label, passed, _ in rows if not passed)
        line = f"criterion {crit:>2} {verdict}  {TITLES.get(crit, '')}: {ok}/{len(rows)} instances, max residual {worst:.3g}"
        if failing:
            line += f"  [failing: {failing}]"
        tr.write_line(line)
