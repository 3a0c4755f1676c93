"""Scenario runs, sweeps, figure datasets and the reference-claims check."""

from __future__ import annotations

import csv
import io
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from . import mac as macmod
from .config import ScenarioConfig, Sweep
from .game import GroupGame, GroupWeights, PayoffMatrix2
from .oracle import InvasionGrid, strict_group_nash_check, verify_conditions, verify_gess_definition
from .solver import find_all_gess

log = logging.getLogger(__name__)

DISCREPANCY = "discrepancy"


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    x = float(x)
    if x == 0:
        return "0"
    return f"{x:.10g}"


@dataclass(frozen=True)
class SweepRow:
    value: float
    n_equilibria: int
    eq_index: Optional[int]
    kind: str
    q: tuple[float, ...]
    aggregate: Optional[float]
    p_s: Optional[float]
    oracle_margin: Optional[float]


def _equilibria_gess(cfg: ScenarioConfig) -> list[dict]:
    g = cfg.group_game()
    out = []
    for k, r in enumerate(find_all_gess(g, cfg.tolerance)):
        d = verify_gess_definition(r.profile, g, cfg.grid)
        c = verify_conditions(r.profile, g, cfg.grid)
        passed = d.passed and c.passed
        out.append(
            {
                "index": k,
                "support": r.label,
                "kind": r.kind.value if passed else f"{r.kind.value}:{DISCREPANCY}",
                "profile": [float(x) for x in r.q],
                "aggregate": float(r.y),
                "brackets": list(r.brackets),
                "delta": r.delta,
                "strict_group_nash": strict_group_nash_check(r.profile, g, cfg.grid.deviation_resolution),
                "oracle": {
                    "passed": passed,
                    "definition_margin": d.worst_violation,
                    "conditions_margin": c.worst_violation,
                    "ties": d.ties,
                },
                "oracle_margin": d.worst_violation,
                "p_S": None,
                "notes": list(r.notes),
            }
        )
    return out


def _equilibria_mac(cfg: ScenarioConfig) -> list[dict]:
    p = cfg.mac_params()
    res_dev = cfg.grid.deviation_resolution
    out = []
    for k, e in enumerate(macmod.mac_find_gess(p, cfg.tolerance)):
        margin = macmod.mac_verify_conditions(e.profile, p, res_dev)
        passed = margin > -1e-7
        out.append(
            {
                "index": k,
                "support": e.label,
                "kind": e.kind if passed else f"{e.kind}:{DISCREPANCY}",
                "profile": [float(x) for x in e.q],
                "aggregate": float(p.alpha @ e.q),
                "brackets": list(e.brackets),
                "oracle": {"passed": passed, "conditions_margin": margin},
                "oracle_margin": margin,
                "p_S": e.success_prob,
                "notes": list(e.notes),
            }
        )
    return out


def run_scenario(cfg: ScenarioConfig, claims: bool = True) -> dict:
    """Solve one instance and verify every equilibrium it reports."""
    if cfg.sweep is not None:
        raise ValueError("run_scenario needs a single instance; use sweep() for swept configs")
    report = {"scenario": cfg.name, "game": cfg.game, "weights": list(cfg.weights)}
    if cfg.is_mac:
        p = cfg.mac_params()
        th = macmod.mac_thresholds(p)
        report["mac"] = {"delta": p.delta, "gamma": p.gamma, "mu": p.mu}
        report["thresholds"] = {
            "gamma_under_formula": th.gamma_under_formula,
            "gamma_under_numeric": th.gamma_under_numeric,
            "gamma_bar": th.gamma_bar,
        }
        report["q_std"] = macmod.standard_reference_strategy(p)
        report["equilibria"] = _equilibria_mac(cfg)
    else:
        m = cfg.payoff
        report["payoff"] = {"a": m.a, "b": m.b, "c": m.c, "d": m.d, "delta": m.delta}
        report["equilibria"] = _equilibria_gess(cfg)
    report["all_verified"] = all(e["oracle"]["passed"] for e in report["equilibria"])
    if claims:
        report["reference_claims"] = reference_claims(cfg)
    return report


def _rows_for(args) -> list[SweepRow]:
    cfg, value = args
    rep = run_scenario(cfg.swept(value), claims=False)
    eqs = rep["equilibria"]
    if not eqs:
        return [SweepRow(value, 0, None, "none", (), None, None, None)]
    return [
        SweepRow(value, len(eqs), e["index"], e["kind"], tuple(e["profile"]), e["aggregate"], e["p_S"], e["oracle_margin"])
        for e in eqs
    ]


def sweep(cfg: ScenarioConfig, jobs: int = 1) -> list[SweepRow]:
    """Evaluate the scenario at every swept value; rows ascend in the swept value."""
    if cfg.sweep is None:
        raise ValueError("config has no sweep section")
    tasks = [(cfg, v) for v in cfg.sweep.values()]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_rows_for, tasks))
    else:
        chunks = [_rows_for(t) for t in tasks]
    return [row for chunk in chunks for row in chunk]


def rows_to_csv(rows: list[SweepRow], n_groups: int) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["swept_var", "eq_index", "kind"] + [f"q_{i + 1}" for i in range(n_groups)] + ["aggregate", "p_S", "oracle_margin"])
    for r in rows:
        qs = [fmt(x) for x in r.q] + [""] * (n_groups - len(r.q))
        idx = "" if r.eq_index is None else str(r.eq_index)
        w.writerow([fmt(r.value), idx, r.kind] + qs + [fmt(r.aggregate), fmt(r.p_s), fmt(r.oracle_margin)])
    return buf.getvalue()


def table_to_csv(header: list[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(x) if not isinstance(x, str) else x for x in r])
    return buf.getvalue()


def dump_json(obj) -> str:
    return json.dumps(_clean(obj), indent=2, sort_keys=True) + "\n"


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return float(fmt(x)) if np.isfinite(x) else str(x)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


# --- reference claims -------------------------------------------------------


def intervals(pred: Callable[[float], bool], lo: float = 0.0, hi: float = 1.0, step: float = 0.005, tol: float = 1e-7) -> list[list[float]]:
    """Maximal sub-intervals of (lo, hi) where pred holds, edges bisected to tol."""
    xs = np.arange(lo + step / 2, hi, step)
    vals = [bool(pred(float(x))) for x in xs]
    out = []

    def edge(a, b, va):
        while abs(b - a) > tol:
            mid = 0.5 * (a + b)
            if bool(pred(mid)) == va:
                a = mid
            else:
                b = mid
        return 0.5 * (a + b)

    k = 0
    while k < len(xs):
        if not vals[k]:
            k += 1
            continue
        start = lo if k == 0 else edge(float(xs[k]), float(xs[k - 1]), True)
        j = k
        while j + 1 < len(xs) and vals[j + 1]:
            j += 1
        stop = hi if j == len(xs) - 1 else edge(float(xs[j]), float(xs[j + 1]), True)
        out.append([round(start, 6), round(stop, 6)])
        k = j + 1
    return out


def _has(payoff: PayoffMatrix2, label: str, kind: Optional[str] = None) -> Callable[[float], bool]:
    def pred(alpha):
        g = GroupGame.two_groups(alpha, payoff)
        return any(r.label == label and (kind is None or r.kind.value == kind) for r in find_all_gess(g))

    return pred


def _claim(statement: str, computed, reproduced: Optional[bool], detail: str = "") -> dict:
    status = "noted" if reproduced is None else "reproduced" if reproduced else DISCREPANCY
    return {"claim": statement, "computed": computed, "status": status, "detail": detail}


def _close(iv: list[list[float]], want: list[list[float]], tol: float = 2e-3) -> bool:
    return len(iv) == len(want) and all(abs(a - c) <= tol and abs(b - d) <= tol for (a, b), (c, d) in zip(iv, want))


def _covers(iv: list[list[float]], lo: float, hi: float) -> bool:
    return any(a <= lo and hi <= b for a, b in iv)


def hawk_dove_claims(payoff: PayoffMatrix2) -> list[dict]:
    strong_hd = intervals(_has(payoff, "AB", "strong"))
    h_mixer = intervals(_has(payoff, "AM"))
    mixer_d = intervals(_has(payoff, "MB"))
    full = intervals(_has(payoff, "MM"))
    return [
        _claim("(H,D) is a strong GESS for 0 < alpha < 0.25", strong_hd, _close(strong_hd, [[0.0, 0.25]])),
        _claim(
            "(H,q_2) is a weak GESS for 0.25 < alpha < 0.37",
            h_mixer,
            bool(h_mixer),
            f"no (H, mixer) equilibrium exists; (q_1, D) with q_1 = (1-alpha)/(3 alpha) holds on {mixer_d}",
        ),
        _claim(
            "regime boundary at alpha = 0.37",
            [iv[1] for iv in mixer_d],
            False,
            "the (q_1, D) window closes at alpha = 1/3 where the fully mixed GESS appears",
        ),
        _claim(
            "(q_1*, q_2*) is the GESS for 0.37 < alpha < 0.5",
            full,
            _covers(full, 0.37, 0.5),
            "holds on the stated interval; the fully mixed window itself starts at 1/3",
        ),
    ]


def stag_hunt_claims(payoff: PayoffMatrix2) -> list[dict]:
    ss = intervals(_has(payoff, "AA", "strong"))
    hh = intervals(_has(payoff, "BB", "strong"))
    sh = intervals(_has(payoff, "AB", "strong"))
    mixed = [iv for lab in ("AM", "MA", "BM", "MB", "MM") for iv in intervals(_has(payoff, lab))]
    return [
        _claim("(S,S) and (H,H) are strong GESSs for 0 < alpha < 0.5", {"SS": ss, "HH": hh}, _close(ss, [[0, 1]]) and _close(hh, [[0, 1]]), "both hold for every alpha in (0, 1)"),
        _claim("(S,H) is a strong GESS for 0.25 < alpha < 0.5", sh, _close(sh, [[0.25, 0.5]])),
        _claim("no mixed GESS", mixed, not mixed),
        _claim("cooperation plotted as a function of an undefined variable x", None, None, "only the alpha sweep is emitted"),
    ]


def prisoners_dilemma_claims(payoff: PayoffMatrix2) -> list[dict]:
    cc = intervals(_has(payoff, "AA"))
    dd = intervals(_has(payoff, "BB"))
    cd = intervals(_has(payoff, "AB"))
    dc = intervals(_has(payoff, "BA"))

    def cd_strict(alpha):
        g = GroupGame.two_groups(alpha, payoff)
        return strict_group_nash_check((1.0, 0.0), g)

    cd_nash = intervals(cd_strict)
    mixed = [iv for lab in ("AM", "MA", "BM", "MB", "MM") for iv in intervals(_has(payoff, lab))]
    return [
        _claim("(C,C) is a GESS and strict NE for every alpha", cc, bool(cc) and _close(cc, [[0, 1]]), "fails the first-order condition for every alpha"),
        _claim("(D,D) is a GESS for every alpha", dd, bool(dd) and _close(dd, [[0, 1]]), "fails the first-order condition for every alpha"),
        _claim("(C,D) is a GESS and strict NE for 0.5 < alpha < 1", {"gess": cd, "strict_nash": cd_nash}, _close(cd, [[0.5, 1]]) and _close(cd_nash, [[0.5, 1]])),
        _claim("(D,C) is a GESS for 0 < alpha < 0.5", dc, _close(dc, [[0, 0.5]])),
        _claim("no mixed GESS", mixed, not mixed),
    ]


def mac_claims(delta: float = 0.2, alpha: float = 0.4, mu: float = 1.0) -> list[dict]:
    p = macmod.MacParams(delta, 0.0, mu, GroupWeights.two(alpha))
    th = macmod.mac_thresholds(p)
    full = intervals(lambda g: macmod.mac_fully_mixed(p.with_gamma(g)) is not None, 0.0, 1.0)
    tt = intervals(lambda g: any(e.label == "TT" for e in macmod.mac_find_gess(p.with_gamma(g))), 0.0, 1.0)
    pm = macmod.MacParams(delta, 0.0, mu, GroupWeights((0.15, 0.85)))
    pure_mixed = intervals(lambda g: any(e.label == "TM" for e in macmod.mac_find_gess(pm.with_gamma(g))), 0.0, 1.0)
    return [
        _claim(
            "fully mixed GESS for gamma < 0.3",
            {"formula_threshold": th.gamma_under_formula, "numeric_threshold": th.gamma_under_numeric, "window": full},
            False,
            "stated value, closed-form threshold and the exact validity window disagree",
        ),
        _claim("(T,T) is the GESS for gamma >= gamma_bar > 0.53", {"gamma_bar": th.gamma_bar, "window": tt}, th.gamma_bar > 0.53 and bool(tt) and abs(tt[0][0] - th.gamma_bar) < 1e-3),
        _claim(
            "pure-mixed (T, q_2) exists only for 0 <= gamma < 0.4 (group sizes 0.15 / 0.85)",
            pure_mixed,
            _close(pure_mixed, [[0.0, 0.4]]),
            "computed with the smaller group transmitting; the larger group cannot mix while the smaller one is silent",
        ),
        _claim("(S,...,S) is never a GESS", "all-S bracket 1-delta+(1-gamma) alpha_i (1-delta) > 0", True),
    ]


def reference_claims(cfg: ScenarioConfig) -> list[dict]:
    """Stated results for the preset games, checked against the solver.

    Only attached when the preset keeps its standard parameters.
    """
    if cfg.game == "hawk-dove" and cfg.payoff == PayoffMatrix2.hawk_dove():
        return hawk_dove_claims(cfg.payoff)
    if cfg.game == "stag-hunt" and cfg.payoff == PayoffMatrix2.stag_hunt():
        return stag_hunt_claims(cfg.payoff)
    if cfg.game == "prisoners-dilemma" and cfg.payoff == PayoffMatrix2.prisoners_dilemma():
        return prisoners_dilemma_claims(cfg.payoff)
    if cfg.is_mac and cfg.mac.get("delta", 0.2) == 0.2:
        return mac_claims(0.2, 0.4, cfg.mac.get("mu", 1.0))
    return []


# --- figure datasets --------------------------------------------------------

PRESET_FILES = {
    "hawk-dove": "hawk_dove_aggressiveness.csv",
    "stag-hunt": "stag_hunt_cooperation.csv",
    "prisoners-dilemma": "prisoners_dilemma_collaboration.csv",
}


def preset_config(preset: str, tol: float = 1e-9, grid: InvasionGrid = InvasionGrid()) -> ScenarioConfig:
    if preset in PRESET_FILES:
        payoff = {
            "hawk-dove": PayoffMatrix2.hawk_dove(),
            "stag-hunt": PayoffMatrix2.stag_hunt(),
            "prisoners-dilemma": PayoffMatrix2.prisoners_dilemma(),
        }[preset]
        return ScenarioConfig(game=preset, name=preset, payoff=payoff, sweep=Sweep("alpha", 0.01, 0.99, 0.01), tolerance=tol, grid=grid)
    if preset == "mac":
        return ScenarioConfig(
            game="mac-aloha",
            name="mac",
            weights=(0.4, 0.6),
            mac={"delta": 0.2, "mu": 1.0},
            sweep=Sweep("gamma", 0.0, 0.99, 0.01),
            tolerance=tol,
            grid=grid,
        )
    raise ValueError(f"unknown preset {preset!r}; choose from {sorted(PRESET_FILES) + ['mac']}")


def figure_data(preset: str, tol: float = 1e-9, grid: InvasionGrid = InvasionGrid()) -> dict[str, str]:
    """File name -> contents for the preset's figure datasets and report."""
    cfg = preset_config(preset, tol, grid)
    files = {}
    rows = sweep(cfg)
    n = 2
    if preset in PRESET_FILES:
        files[PRESET_FILES[preset]] = rows_to_csv(rows, n)
        files[f"{preset.replace('-', '_')}_report.json"] = dump_json(
            {"preset": preset, "all_verified": _all_ok(rows), "reference_claims": reference_claims(replace(cfg, sweep=None, weights=(0.5, 0.5)))}
        )
        return files

    files["mac_equilibria.csv"] = rows_to_csv(rows, n)
    gammas = cfg.sweep.values()
    p = cfg.mac_params(gamma=0.0)
    fm_rows, ps_rows = [], []
    for gm in gammas:
        pg = p.with_gamma(gm)
        fm = macmod.mac_fully_mixed(pg)
        q = fm.first if fm is not None else [None, None]
        fm_rows.append([gm, q[0], q[1], macmod.standard_reference_strategy(pg)])
        ps_rows.append([gm, macmod.success_probability(fm, pg) if fm is not None else None])
    files["mac_fully_mixed.csv"] = table_to_csv(["gamma", "q_1", "q_2", "q_std"], fm_rows)
    files["mac_success_probability.csv"] = table_to_csv(["gamma", "p_S"], ps_rows)

    pm = macmod.MacParams(0.2, 0.0, 1.0, GroupWeights((0.15, 0.85)))
    pm_rows = []
    for gm in gammas:
        pg = pm.with_gamma(gm)
        eq = [e for e in macmod.mac_find_gess(pg, tol) if e.label == "TM"]
        pm_rows.append([gm, eq[0].q[1] if eq else None, macmod.standard_reference_strategy(pg)])
    files["mac_pure_mixed.csv"] = table_to_csv(["gamma", "q_2", "q_std"], pm_rows)

    th = macmod.mac_thresholds(p)
    files["mac_report.json"] = dump_json(
        {
            "preset": "mac",
            "all_verified": _all_ok(rows),
            "thresholds": {
                "gamma_under_formula": th.gamma_under_formula,
                "gamma_under_numeric": th.gamma_under_numeric,
                "gamma_bar": th.gamma_bar,
            },
            "reference_claims": mac_claims(),
        }
    )
    return files


def _all_ok(rows: list[SweepRow]) -> bool:
    return not any(r.kind.endswith(DISCREPANCY) for r in rows)


def write_files(files: dict[str, str], out_dir) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for name, text in sorted(files.items()):
        path = out / name
        path.write_text(text)
        paths.append(path)
        log.info("wrote %s", path)
    return paths
