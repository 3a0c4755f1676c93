"""All GESS of an N-group two-strategy game.

For two actions the first-order GESS condition of group i factors as

    F_i(p_i, q) = (q_i - p_i) * B_i(q),
    B_i(q) = alpha_i (J(q_i,1) - J(q_i,0)) + sum_j alpha_j (J(1,q_j) - J(0,q_j))
           = alpha_i (q_i delta + c - d) + (b - d) + delta * y,    y = sum_j alpha_j q_j.

A group playing A needs B_i >= 0, a group playing B needs B_i <= 0 and a mixer
needs B_i = 0. Whenever one of these holds with equality the second-order term
(p_i - q_i)^2 delta must be negative, i.e. delta < 0.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .game import GroupGame, GroupProfile, PayoffMatrix2, as_profile, pairwise_payoff

BRACKET_TOL = 1e-9
MAX_GROUPS = 12


class Label(str, enum.Enum):
    A = "A"
    B = "B"
    MIXER = "M"


class Kind(str, enum.Enum):
    STRONG = "strong"
    WEAK = "weak"
    FULLY_MIXED = "fully-mixed"


SupportProfile = tuple  # tuple[Label, ...], one label per group


class DegenerateGameError(ValueError):
    """a == c and b == d: the closed-form strong/weak split is not informative."""


class SingularSupportError(ArithmeticError):
    pass


@dataclass(frozen=True)
class GessResult:
    profile: GroupProfile
    kind: Kind
    support: SupportProfile
    brackets: tuple[float, ...]
    delta: float
    y: float
    oracle_verdict: object = None
    notes: tuple[str, ...] = ()
    diagnostics: dict = field(default_factory=dict, compare=False)

    @property
    def q(self) -> np.ndarray:
        return self.profile.first

    @property
    def label(self) -> str:
        return "".join(lab.value for lab in self.support)


def support_of(q: Sequence[float]) -> SupportProfile:
    return tuple(Label.A if x == 1.0 else Label.B if x == 0.0 else Label.MIXER for x in q)


def bracket(i: int, profile, g: GroupGame) -> float:
    """B_i(q), evaluated from pairwise payoffs."""
    if not 0 <= i < g.n_groups:
        raise IndexError(f"group index {i} out of range for {g.n_groups} groups")
    m = g.require_two_actions()
    q = as_profile(profile).first
    qi = q[i]
    own = g.alpha[i] * (pairwise_payoff(qi, 1.0, m) - pairwise_payoff(qi, 0.0, m))
    rest = sum(a * (pairwise_payoff(1.0, qj, m) - pairwise_payoff(0.0, qj, m)) for a, qj in zip(g.alpha, q))
    return float(own + rest)


def brackets(q, g: GroupGame) -> np.ndarray:
    """All B_i at once from the expanded two-action form."""
    m = g.require_two_actions()
    q = np.asarray(as_profile(q).first if isinstance(q, GroupProfile) else q, dtype=float)
    alpha = g.alpha
    y = float(alpha @ q)
    return alpha * (q * m.delta + m.c - m.d) + (m.b - m.d) + m.delta * y


def fully_mixed_candidate(g: GroupGame) -> Optional[np.ndarray]:
    """Closed-form interior point (without the existence checks), None if delta == 0."""
    m = g.require_two_actions()
    if m.delta == 0:
        return None
    n = g.n_groups
    alpha = g.alpha
    return (m.d - m.b + ((1 + n) * alpha - 1) * (m.d - m.c)) / ((n + 1) * alpha * m.delta)


def fully_mixed_gess(g: GroupGame) -> Optional[GroupProfile]:
    m = g.require_two_actions()
    if not m.concave:
        return None
    q = fully_mixed_candidate(g)
    if np.all((q > 0) & (q < 1)):
        return GroupProfile.from_first(q)
    return None


def _pure_diagnostics(m: PayoffMatrix2, alpha: np.ndarray, q: np.ndarray, direct_ok: bool) -> dict:
    """Closed-form strong-GESS conditions next to the direct sign test."""
    in_a = q == 1.0
    h = float(alpha[in_a].sum() * (m.a - m.c) + alpha[~in_a].sum() * (m.b - m.d))
    diag = {"H": h}
    if in_a.all():
        diag["cond_i"] = bool(m.a - m.c > alpha.max() * (m.b - m.a))
    elif not in_a.any():
        diag["cond_ii"] = bool(m.b - m.d < alpha.min() * (m.d - m.c))
    else:
        # all-groups form: alpha_i (d-c) > H > alpha_i (b-a) for every group
        literal = bool(np.all((alpha * (m.d - m.c) > h) & (h > alpha * (m.b - m.a))))
        # per-label form implied by the bracket: A groups need H > alpha_i (b-a),
        # B groups need H < alpha_i (d-c)
        per_label = bool(
            np.all(h > alpha[in_a] * (m.b - m.a)) and np.all(h < alpha[~in_a] * (m.d - m.c))
        )
        diag["cond_iii_literal"] = literal
        diag["cond_iii_per_label"] = per_label
    closed = [v for k, v in diag.items() if k.startswith("cond_") and k != "cond_iii_literal"]
    diag["closed_form_agrees"] = bool(closed[0] == direct_ok) if closed else None
    return diag


def _reference_mixer_aggregate(m: PayoffMatrix2, alpha: np.ndarray, support: SupportProfile) -> Optional[float]:
    """Reference closed form of y for (n_A, n_B, mixers) supports, kept as a diagnostic."""
    if m.delta == 0:
        return None
    labels = np.array([lab.value for lab in support])
    k = int((labels == "M").sum())
    a_mass = float(alpha[labels == "A"].sum())
    m_mass = float(alpha[labels == "M"].sum())
    return (k * (m.d - m.b - a_mass) + (m.d - m.c) * m_mass) / (m.delta * (k + 1))


def solve_support(g: GroupGame, support: SupportProfile) -> np.ndarray:
    """Profile with pure groups fixed and every mixer bracket set to zero.

    Summing the mixer equations gives the mixer share of the aggregate,
    Z = -(alpha_M (c-d) + k (b-d) + k delta y_A) / ((k+1) delta),
    after which q_i = (d - b + alpha_i (d-c) - delta y) / (delta alpha_i).
    """
    m = g.require_two_actions()
    alpha = g.alpha
    q = np.array([1.0 if lab is Label.A else 0.0 for lab in support])
    mix = np.array([lab is Label.MIXER for lab in support])
    k = int(mix.sum())
    if k == 0:
        return q
    if m.delta == 0:
        raise SingularSupportError("mixer equations are singular when delta == 0")
    y_pure = float(alpha @ q)
    denom = (k + 1) * m.delta
    z = -(alpha[mix].sum() * (m.c - m.d) + k * (m.b - m.d) + k * m.delta * y_pure) / denom
    y = y_pure + z
    q[mix] = (m.d - m.b + alpha[mix] * (m.d - m.c) - m.delta * y) / (m.delta * alpha[mix])
    if not np.all(np.isfinite(q)):
        raise SingularSupportError(f"non-finite solution for support {support}")
    return q


def classify(g: GroupGame, support: SupportProfile, q: np.ndarray, tol: float = BRACKET_TOL) -> Optional[GessResult]:
    """Check a candidate against the bracket sign conditions; None if it fails."""
    m = g.require_two_actions()
    alpha = g.alpha
    mix = np.array([lab is Label.MIXER for lab in support])
    is_a = np.array([lab is Label.A for lab in support])
    is_b = ~mix & ~is_a
    if np.any(mix & ~((q > 0) & (q < 1))):
        return None
    br = brackets(q, g)
    if np.any(br[is_a] < -tol) or np.any(br[is_b] > tol):
        return None
    ties = (~mix) & (np.abs(br) <= tol)
    binding = bool(mix.any() or ties.any())
    if binding and not m.concave:
        return None
    notes = []
    if ties.any():
        notes.append("boundary: pure-group bracket is zero within tolerance")
    if mix.all():
        kind = Kind.FULLY_MIXED
    elif binding:
        kind = Kind.WEAK
    else:
        kind = Kind.STRONG
    diagnostics = {}
    if not mix.any():
        diagnostics = _pure_diagnostics(m, alpha, q, direct_ok=True)
        if diagnostics.get("closed_form_agrees") is False:
            notes.append("closed-form strong condition disagrees with the direct sign test")
        if diagnostics.get("cond_iii_literal") is False:
            notes.append("all-groups mixed-label strong condition fails; per-label form used")
    else:
        diagnostics["mixer_residual"] = float(np.max(np.abs(br[mix])))
        if not mix.all():
            ref = _reference_mixer_aggregate(m, alpha, support)
            diagnostics["y_reference"] = ref
            diagnostics["y_reference_matches"] = bool(ref is not None and abs(ref - alpha @ q) < 1e-9)
    return GessResult(
        profile=GroupProfile.from_first(q),
        kind=kind,
        support=support,
        brackets=tuple(float(x) for x in br),
        delta=m.delta,
        y=float(alpha @ q),
        notes=tuple(notes),
        diagnostics=diagnostics,
    )


def _check_nondegenerate(m: PayoffMatrix2):
    if m.a == m.c and m.b == m.d:
        raise DegenerateGameError("a == c and b == d: every pure profile is tied")


def strong_gess_all(g: GroupGame, tol: float = BRACKET_TOL) -> list[GessResult]:
    m = g.require_two_actions()
    _check_nondegenerate(m)
    out = []
    for labels in itertools.product((Label.A, Label.B), repeat=g.n_groups):
        q = np.array([1.0 if lab is Label.A else 0.0 for lab in labels])
        res = classify(g, labels, q, tol)
        if res is not None and res.kind is Kind.STRONG:
            out.append(res)
    return out


def mixed_support_solve(g: GroupGame, s: SupportProfile, tol: float = BRACKET_TOL) -> Optional[GessResult]:
    m = g.require_two_actions()
    s = tuple(Label(x) for x in s)
    if len(s) != g.n_groups:
        raise ValueError("support length must equal the number of groups")
    if Label.MIXER not in s:
        raise ValueError("support must contain at least one mixer")
    if not m.concave:
        return None
    q = solve_support(g, s)
    return classify(g, s, q, tol)


def _sort_key(res: GessResult):
    return (res.label, tuple(res.q))


def find_all_gess(g: GroupGame, tol: float = BRACKET_TOL) -> list[GessResult]:
    m = g.require_two_actions()
    n = g.n_groups
    if n > MAX_GROUPS:
        raise ValueError(f"support enumeration limited to {MAX_GROUPS} groups, got {n}")
    _check_nondegenerate(m)
    found = list(strong_gess_all(g, tol))

    # pure profiles that only hold with a binding equality
    for labels in itertools.product((Label.A, Label.B), repeat=n):
        q = np.array([1.0 if lab is Label.A else 0.0 for lab in labels])
        res = classify(g, labels, q, tol)
        if res is not None and res.kind is Kind.WEAK:
            found.append(res)

    fm = fully_mixed_gess(g)
    if fm is not None:
        res = classify(g, (Label.MIXER,) * n, fm.first, tol)
        if res is not None:
            found.append(res)

    if m.concave:
        for labels in itertools.product((Label.A, Label.B, Label.MIXER), repeat=n):
            if Label.MIXER in labels and len(set(labels) - {Label.MIXER}) > 0:
                res = mixed_support_solve(g, labels, tol)
                if res is not None:
                    found.append(res)

    found.sort(key=_sort_key)
    out: list[GessResult] = []
    for res in found:
        if any(np.max(np.abs(res.q - prev.q)) <= 10 * tol for prev in out):
            continue
        out.append(res)
    return out
