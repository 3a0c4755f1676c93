"""Acceptance criteria, one test each.

Each test records a PASS/FAIL line; the lines are printed in the terminal
summary (and by ``python tests/test_acceptance.py``).
"""

import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from groupess import GroupGame, GroupWeights, InvasionGrid, Kind, PayoffMatrix2
from groupess import find_all_gess, fully_mixed_gess, grid_search_equilibria, strict_group_nash_check
from groupess import symmetric_ess, verify_gess_definition
from groupess.config import from_dict
from groupess.mac import MacParams, mac_brackets, mac_find_gess, mac_fully_mixed, mac_thresholds, success_probability
from groupess.report import intervals, run_scenario
from groupess.solver import brackets

BRACKET_ZERO = 1e-9
GRID_RES = 0.01
SET_DISTANCE = 0.02
BOUNDARY_EPS = 1e-9
POINT_TOL = 1e-6
GAMMA_BAR_TOL = 1e-3
PS_TOL = 1e-9
INVARIANCE_TOL = 1e-9

HD = PayoffMatrix2.hawk_dove(2, 3)
SH = PayoffMatrix2(2, 0, 1, 1)
PD = PayoffMatrix2(2, 0, 3, 1)

RESULTS: dict[int, str] = {}


def record(n, ok, detail):
    RESULTS[n] = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    assert ok, RESULTS[n]


@pytest.fixture(scope="module", autouse=True)
def report_lines(request):
    yield
    tr = request.config.pluginmanager.get_plugin("terminalreporter")
    if tr is not None:
        tr.write_line("")
        for n in sorted(RESULTS):
            tr.write_line(RESULTS[n])


def weights(rng, n):
    w = rng.uniform(0.05, 1.0, n)
    w /= w.sum()
    w[-1] = 1.0 - w[:-1].sum()
    return GroupWeights(tuple(float(x) for x in w))


def labels_at(m, alpha):
    return {r.label: r for r in find_all_gess(GroupGame.two_groups(alpha, m))}


def test_1_closed_form_consistency():
    rng = np.random.default_rng(1)
    found = bad = 0
    grid = InvasionGrid()
    for k in range(1000):
        n = (2, 3, 5)[k % 3]
        while True:
            m = PayoffMatrix2(*rng.uniform(-1, 1, 4))
            if m.delta < 0:
                break
        g = GroupGame(weights(rng, n), m)
        fm = fully_mixed_gess(g)
        if fm is None:
            continue
        found += 1
        if np.max(np.abs(brackets(fm.first, g))) > BRACKET_ZERO or not verify_gess_definition(fm, g, grid).passed:
            bad += 1
    record(1, bad == 0 and found > 0, f"{found} fully mixed profiles, {bad} failures")


def test_2_oracle_completeness():
    rng = np.random.default_rng(2)
    mismatched = 0
    for _ in range(200):
        g = GroupGame(weights(rng, 2), PayoffMatrix2(*rng.uniform(-1, 1, 4)))
        sol = [r.q for r in find_all_gess(g)]
        cl = grid_search_equilibria(g, GRID_RES)
        ok = all(any(c.distance(q) <= SET_DISTANCE for c in cl) for q in sol)
        ok &= all(any(c.distance(q) <= SET_DISTANCE for q in sol) for c in cl)
        mismatched += not ok
    record(2, mismatched == 0, f"{mismatched}/200 games disagree")


def test_3_hawk_dove():
    checks = []
    checks.append("AB" in labels_at(HD, 0.25 - BOUNDARY_EPS) and labels_at(HD, 0.25 - BOUNDARY_EPS)["AB"].kind is Kind.STRONG)
    above = labels_at(HD, 0.25 + BOUNDARY_EPS)
    checks.append("AB" not in above or above["AB"].kind is not Kind.STRONG)
    strong = intervals(lambda a: any(r.label == "AB" and r.kind is Kind.STRONG for r in find_all_gess(GroupGame.two_groups(a, HD))), tol=1e-10)
    checks.append(len(strong) == 1 and strong[0][0] == 0 and abs(strong[0][1] - 0.25) < 1e-6)
    for a in (0.25 + BOUNDARY_EPS, 0.3, 1 / 3 - BOUNDARY_EPS):
        r = labels_at(HD, a).get("MB")
        checks.append(r is not None and abs(r.q[0] - (1 - a) / (3 * a)) < 1e-9)
    for a in (0.25 - BOUNDARY_EPS, 1 / 3 + BOUNDARY_EPS):
        checks.append("MB" not in labels_at(HD, a))
    fm = fully_mixed_gess(GroupGame.two_groups(0.4, HD)).first
    checks.append(np.allclose(fm, [0.44444, 0.074074], atol=POINT_TOL))
    rep = run_scenario(from_dict({"game": "hawk-dove", "weights": [0.4, 0.6]}))
    flagged = " ".join(c["claim"] for c in rep["reference_claims"] if c["status"] == "discrepancy")
    checks.append("(H,q_2)" in flagged and "0.37" in flagged)
    record(3, all(checks), f"{sum(checks)}/{len(checks)} checks; fully mixed at 0.4 = ({fm[0]:.6f}, {fm[1]:.6f})")


def test_4_stag_hunt():
    alphas = np.round(np.arange(0.01, 1.0, 0.01), 2)
    checks = []
    for a in alphas:
        found = labels_at(SH, a)
        checks.append(found["AA"].kind is Kind.STRONG and found["BB"].kind is Kind.STRONG)
        checks.append(not any("M" in lab for lab in found))
    sh = intervals(lambda a: "AB" in labels_at(SH, a), tol=1e-10)
    checks.append(len(sh) == 1 and abs(sh[0][0] - 0.25) < 1e-6 and abs(sh[0][1] - 0.5) < 1e-6)
    checks.append("AB" in labels_at(SH, 0.25 + BOUNDARY_EPS) and "AB" not in labels_at(SH, 0.25 - BOUNDARY_EPS))
    checks.append("AB" in labels_at(SH, 0.5 - BOUNDARY_EPS) and "AB" not in labels_at(SH, 0.5 + BOUNDARY_EPS))
    checks.append(fully_mixed_gess(GroupGame.two_groups(0.4, SH)) is None)
    record(4, all(checks), f"(S,H) window {sh}, {sum(checks)}/{len(checks)} checks")


def test_5_prisoners_dilemma():
    checks = []
    for a in np.round(np.arange(0.01, 1.0, 0.01), 2):
        found = labels_at(PD, a)
        g = GroupGame.two_groups(a, PD)
        if a > 0.5:
            checks.append(set(found) == {"AB"} and strict_group_nash_check((1.0, 0.0), g))
        elif a < 0.5:
            checks.append(set(found) == {"BA"} and strict_group_nash_check((0.0, 1.0), g))
        else:
            checks.append("AB" not in found and not strict_group_nash_check((1.0, 0.0), g))
    rep = run_scenario(from_dict({"game": "prisoners-dilemma", "weights": [0.3, 0.7]}))
    flagged = [c["claim"] for c in rep["reference_claims"] if c["status"] == "discrepancy"]
    checks.append(any("(C,C)" in c for c in flagged) and any("(D,D)" in c for c in flagged))
    record(5, all(checks), f"{sum(checks)}/{len(checks)} checks; flagged: {len(flagged)} claims")


def test_6_ess_is_gess():
    rng = np.random.default_rng(6)
    tested = bad = 0
    grid = InvasionGrid()
    for k in range(500):
        a, b, d = rng.uniform(-1, 1, 3)
        m = PayoffMatrix2(a, b, b, d)
        n = 2 + k % 2
        g = GroupGame(weights(rng, n), m)
        for rep in symmetric_ess(m):
            tested += 1
            bad += not verify_gess_definition([rep.candidate.first] * n, g, grid).passed
    record(6, bad == 0 and tested >= 500, f"{tested} replicated ESS profiles, {bad} failures")


def test_7_mac():
    p = MacParams(0.2, 0.0, 1.0, GroupWeights((0.4, 0.6)))
    th = mac_thresholds(p)
    checks = [abs(th.gamma_bar - 0.5349) <= GAMMA_BAR_TOL]
    for gm in np.round(np.arange(0.0, 1.0, 0.01), 2).tolist() + [th.gamma_bar - 1e-9, th.gamma_bar + 1e-9]:
        has_tt = any(e.label == "TT" for e in mac_find_gess(p.with_gamma(gm)))
        checks.append(has_tt == (gm >= th.gamma_bar))
    fm = mac_fully_mixed(p.with_gamma(0.1))
    checks.append(np.allclose(fm.first, [0.70556, 0.60370], atol=POINT_TOL))
    checks.append(np.max(np.abs(mac_brackets(fm, p.with_gamma(0.1)))) <= BRACKET_ZERO)
    rng = np.random.default_rng(7)
    all_s = 0
    for delta in rng.uniform(0.01, 0.99, 10):
        for gamma in rng.uniform(0.0, 0.99, 10):
            for _ in range(10):
                q = MacParams(float(delta), float(gamma), 1.0, weights(rng, int(rng.integers(2, 5))))
                all_s += any(set(e.label) == {"S"} for e in mac_find_gess(q))
    checks.append(all_s == 0)
    ps = success_probability((0.5, 0.5), p.with_gamma(0.2))
    checks.append(abs(ps - 0.404) <= PS_TOL)
    record(7, all(checks), f"gamma_bar={th.gamma_bar:.4f}, q*(0.1)=({fm.first[0]:.5f}, {fm.first[1]:.5f}), p_S={ps:.6f}, all-S hits {all_s}")


def _as_set(results):
    return sorted((r.label, tuple(r.q)) for r in results)


def _same(a, b):
    return len(a) == len(b) and all(x[0] == y[0] and np.allclose(x[1], y[1], atol=INVARIANCE_TOL) for x, y in zip(a, b))


def test_8_invariances():
    rng = np.random.default_rng(8)
    affine = perm_ok = mu_ok = 0
    for _ in range(200):
        n = int(rng.integers(2, 4))
        m = PayoffMatrix2(*rng.uniform(-1, 1, 4))
        g = GroupGame(weights(rng, n), m)
        s, t = rng.uniform(0.1, 10), rng.uniform(-5, 5)
        affine += _same(_as_set(find_all_gess(g)), _as_set(find_all_gess(GroupGame(g.weights, m.affine(s, t)))))
        order = rng.permutation(n)
        gp = GroupGame(GroupWeights(tuple(g.alpha[order])), m)
        want = sorted(tuple(r.q[order]) for r in find_all_gess(g))
        got = sorted(tuple(r.q) for r in find_all_gess(gp))
        perm_ok += len(want) == len(got) and all(np.allclose(x, y, atol=INVARIANCE_TOL) for x, y in zip(want, got))
        p = MacParams(rng.uniform(0.05, 0.95), rng.uniform(0, 0.95), 1.0, g.weights)
        pm = MacParams(p.delta, p.gamma, rng.uniform(0.1, 10), g.weights)
        mu_ok += _same(_as_set(mac_find_gess(p)), _as_set(mac_find_gess(pm))) and mac_thresholds(p) == mac_thresholds(pm)
    record(8, affine == perm_ok == mu_ok == 200, f"affine {affine}/200, permutation {perm_ok}/200, mu-scaling {mu_ok}/200")


def test_9_determinism(tmp_path):
    same = []
    for preset in ("hawk-dove", "mac"):
        outs = []
        for run in ("a", "b"):
            out = tmp_path / f"{preset}-{run}"
            subprocess.run([sys.executable, "-m", "groupess", "figures", preset, "--out", str(out)], check=True, capture_output=True)
            outs.append({p.name: p.read_bytes() for p in sorted(out.glob("*.csv"))})
        same.append(bool(outs[0]) and outs[0] == outs[1])
    record(9, all(same), f"hawk-dove identical={same[0]}, mac identical={same[1]}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
