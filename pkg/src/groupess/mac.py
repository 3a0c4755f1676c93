"""Group-based slotted-Aloha game.

Mobiles either transmit (T, the first action) or stay silent (S). A mobile is
alone at its receiver with probability gamma, its receiver is in range with
probability mu, and a transmission costs delta. Interactions inside a group
use the payoff matrix [[-2 delta, 1-delta], [1-delta, 0]] (any success counts
for the group), interactions across groups use [[-delta, 1-delta], [0, 0]].

Group i's GESS condition is (q_i - p_i) * bracket_i(q) >= 0 for all p_i with

    bracket_i = 1 - delta + (1 - gamma) (alpha_i (1 - delta - 2 q_i) - Y),
    Y = sum_j alpha_j q_j,

the derivative of the throughput expression in its own q_i with the aggregate
Y held fixed. The second-order term (p_i - q_i)^2 (1 - gamma) alpha_i is
positive whenever gamma < 1, so ties never disqualify a profile.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .game import GroupProfile, GroupWeights, as_profile
from .solver import Kind as _Kind  # noqa: F401  (shared vocabulary)
from .solver import Label

BRACKET_TOL = 1e-9
MAX_GROUPS = 12

PURE_MIXED = "pure-mixed"


@dataclass(frozen=True)
class MacParams:
    delta: float
    gamma: float
    mu: float
    weights: GroupWeights

    def __post_init__(self):
        if not 0.0 < self.delta < 1.0:
            raise ValueError(f"delta={self.delta!r} must lie in (0, 1)")
        if not 0.0 <= self.gamma < 1.0:
            raise ValueError(f"gamma={self.gamma!r} must lie in [0, 1)")
        if not self.mu > 0.0:
            raise ValueError(f"mu={self.mu!r} must be positive")
        if not isinstance(self.weights, GroupWeights):
            object.__setattr__(self, "weights", GroupWeights(tuple(self.weights)))

    @property
    def alpha(self) -> np.ndarray:
        return self.weights.array

    @property
    def n_groups(self) -> int:
        return len(self.weights)

    def with_gamma(self, gamma: float) -> "MacParams":
        return MacParams(self.delta, gamma, self.mu, self.weights)


@dataclass(frozen=True)
class Thresholds:
    gamma_under_formula: float
    gamma_under_numeric: float
    gamma_bar: float


@dataclass(frozen=True)
class MacEquilibrium:
    profile: GroupProfile
    kind: str
    support: tuple
    brackets: tuple[float, ...]
    thresholds: Thresholds
    success_prob: float
    notes: tuple[str, ...] = ()
    oracle_margin: Optional[float] = field(default=None, compare=False)

    def __post_init__(self):
        if self.success_prob < -1e-12:
            raise ValueError("success probability must be non-negative")

    @property
    def q(self) -> np.ndarray:
        return self.profile.first

    @property
    def label(self) -> str:
        return "".join("T" if lab is Label.A else "S" if lab is Label.B else "M" for lab in self.support)


def intra_payoff(q: float, p: MacParams) -> float:
    """K(q, q): payoff against a member of one's own group playing the same q."""
    return p.mu * q * ((1 - p.delta) * (2 - p.gamma) - 2 * (1 - p.gamma) * q)


def inter_payoff(qi: float, qj: float, p: MacParams) -> float:
    """J(q_i, q_j): payoff against a member of another group."""
    return p.mu * qi * (1 - p.delta - (1 - p.gamma) * qj)


def _first(profile) -> np.ndarray:
    if isinstance(profile, GroupProfile):
        return profile.first
    return np.asarray(as_profile(profile).first)


def mac_group_throughput(i: int, profile, p: MacParams) -> float:
    q = _first(profile)
    if not 0 <= i < len(q):
        raise IndexError(f"group index {i} out of range for {len(q)} groups")
    a = p.alpha
    y = float(a @ q)
    return float(p.mu * q[i] * (1 - p.delta + (1 - p.gamma) * (a[i] * (1 - p.delta - q[i]) - y)))


def mac_group_throughput_split(i: int, profile, p: MacParams) -> float:
    """alpha_i K(q_i, q_i) + sum_{j != i} alpha_j J(q_i, q_j)."""
    q = _first(profile)
    a = p.alpha
    out = a[i] * intra_payoff(q[i], p)
    for j in range(len(q)):
        if j != i:
            out += a[j] * inter_payoff(q[i], q[j], p)
    return float(out)


def mac_brackets(profile, p: MacParams) -> np.ndarray:
    q = _first(profile)
    a = p.alpha
    y = float(a @ q)
    return 1 - p.delta + (1 - p.gamma) * (a * (1 - p.delta - 2 * q) - y)


def mac_bracket(i: int, profile, p: MacParams) -> float:
    q = _first(profile)
    if not 0 <= i < len(q):
        raise IndexError(f"group index {i} out of range for {len(q)} groups")
    # second condition: (p_i - q_i)^2 (1 - gamma) alpha_i > 0
    assert (1 - p.gamma) * p.alpha[i] > 0
    return float(mac_brackets(q, p)[i])


def mac_total_gradient(profile, p: MacParams) -> np.ndarray:
    """d U_i / d q_i when the aggregate also moves with q_i (diagnostic only)."""
    q = _first(profile)
    a = p.alpha
    return p.mu * (mac_brackets(q, p) - (1 - p.gamma) * a * q)


def mac_thresholds(p: MacParams) -> Thresholds:
    a = p.alpha
    n = p.n_groups
    d = p.delta
    k = a * (n + 2) * (1 + d)
    formula = float(np.min((k - (1 - d)) / (k + (1 + d))))
    # q_i* < 1  <=>  gamma < (k_i - (1-d)) / (k_i + (1-d))
    numeric = float(np.min((k - (1 - d)) / (k + (1 - d))))
    bar = float(np.max(1 - (1 - d) / (a * (1 + d) + 1)))
    return Thresholds(formula, numeric, bar)


def mac_fully_mixed_candidate(p: MacParams) -> np.ndarray:
    a = p.alpha
    n = p.n_groups
    g = p.gamma
    return (1 - p.delta) * (1 + g + (1 - g) * (n + 2) * a) / (2 * (n + 2) * (1 - g) * a)


def mac_fully_mixed(p: MacParams) -> Optional[GroupProfile]:
    if p.gamma >= 1:
        return None
    q = mac_fully_mixed_candidate(p)
    if np.all((q > 0) & (q < 1)):
        return GroupProfile.from_first(q)
    return None


def mac_aggregate_closed_form(p: MacParams) -> float:
    n = p.n_groups
    return (1 - p.delta) * (n + 1 - p.gamma) / ((1 - p.gamma) * (n + 2))


def _solve_support(p: MacParams, support) -> np.ndarray:
    """Pure groups fixed; every mixer bracket set to zero.

    bracket_i = 0  <=>  2 alpha_i q_i + Z = (1-delta)/(1-gamma) + alpha_i (1-delta) - Y_T
    where Z is the mixers' share of Y; summing over the k mixers gives Z.
    """
    a = p.alpha
    q = np.array([1.0 if lab is Label.A else 0.0 for lab in support])
    mix = np.array([lab is Label.MIXER for lab in support])
    k = int(mix.sum())
    if k == 0:
        return q
    rhs = (1 - p.delta) / (1 - p.gamma) + a[mix] * (1 - p.delta) - float(a @ q)
    z = rhs.sum() / (k + 2)
    q[mix] = (rhs - z) / (2 * a[mix])
    return q


def monotone_supports(p: MacParams):
    """Supports consistent with the ordering of equilibria by group size.

    A group transmitting forces every group no larger than it to transmit, a
    silent group forces every group no larger to stay silent; so the pure
    groups are the smallest ones (whole size classes at a time) and all share
    one label.
    """
    a = p.alpha
    sizes = sorted(set(a.tolist()))
    for cut in range(len(sizes) + 1):
        small = a <= sizes[cut - 1] if cut else np.zeros(len(a), dtype=bool)
        pure_labels = (Label.A, Label.B) if cut else (None,)
        for lab in pure_labels:
            yield tuple(lab if s else Label.MIXER for s in small)


def all_supports(p: MacParams):
    return itertools.product((Label.A, Label.B, Label.MIXER), repeat=p.n_groups)


def _classify(p: MacParams, support, q: np.ndarray, th: Thresholds, tol: float) -> Optional[MacEquilibrium]:
    mix = np.array([lab is Label.MIXER for lab in support])
    is_t = np.array([lab is Label.A for lab in support])
    is_s = ~mix & ~is_t
    if np.any(mix & ~((q > 0) & (q < 1))):
        return None
    br = mac_brackets(q, p)
    if np.any(br[is_t] < -tol) or np.any(br[is_s] > tol):
        return None
    ties = (~mix) & (np.abs(br) <= tol)
    if mix.all():
        kind = _Kind.FULLY_MIXED.value
    elif mix.any():
        kind = PURE_MIXED
    elif ties.any():
        kind = _Kind.WEAK.value
    else:
        kind = _Kind.STRONG.value
    notes = []
    if ties.any():
        notes.append("boundary: pure-group bracket is zero within tolerance")
    half = (1 - p.delta) / 2
    for i in np.flatnonzero(mix):
        smaller = (p.alpha < p.alpha[i]) & ~mix
        if smaller.any():
            want = Label.A if q[i] > half else Label.B
            if any(support[j] is not want for j in np.flatnonzero(smaller)):
                notes.append(f"group {i + 1}: smaller pure groups do not follow the (1-delta)/2 rule")
    grad = mac_total_gradient(q, p)
    if mix.any():
        notes.append(f"total-derivative residual at mixers: {float(np.max(np.abs(grad[mix]))):.3g}")
    return MacEquilibrium(
        profile=GroupProfile.from_first(q),
        kind=kind,
        support=tuple(support),
        brackets=tuple(float(x) for x in br),
        thresholds=th,
        success_prob=success_probability(q, p),
        notes=tuple(notes),
    )


def mac_find_gess(p: MacParams, tol: float = BRACKET_TOL, prune: bool = True) -> list[MacEquilibrium]:
    if p.n_groups > MAX_GROUPS:
        raise ValueError(f"support enumeration limited to {MAX_GROUPS} groups, got {p.n_groups}")
    th = mac_thresholds(p)
    supports = monotone_supports(p) if prune else all_supports(p)
    found = []
    for s in supports:
        res = _classify(p, s, _solve_support(p, s), th, tol)
        if res is not None:
            found.append(res)
    found.sort(key=lambda r: (r.label, tuple(r.q)))
    out: list[MacEquilibrium] = []
    for r in found:
        if not any(np.max(np.abs(r.q - o.q)) <= 10 * tol for o in out):
            out.append(r)
    return out


def mac_verify_conditions(profile, p: MacParams, resolution: float = 0.01, tol: float = 1e-7) -> float:
    """Worst margin of (q_i - p_i) g_i over a deviation grid.

    g_i is a central difference of the throughput in q_i with the aggregate
    frozen at its profile value (exact up to rounding: the throughput is
    quadratic in q_i), so this does not reuse :func:`mac_brackets`.
    Where g_i vanishes the margin is minus the second difference instead, so
    a tie only passes on strict concavity. Margins are per unit deviation
    (per squared deviation at ties); below -tol fails.
    """
    q = _first(profile).astype(float)
    a = p.alpha
    y = float(a @ q)
    h = 1e-3

    def frozen(i, x):
        return x * (1 - p.delta + (1 - p.gamma) * (a[i] * (1 - p.delta - x) - y))

    devs = np.arange(int(round(1 / resolution)) + 1) * resolution
    worst = np.inf
    for i in range(len(q)):
        up, mid, down = frozen(i, q[i] + h), frozen(i, q[i]), frozen(i, q[i] - h)
        slope = (up - down) / (2 * h)
        if abs(slope) <= tol:
            worst = min(worst, float(-(up - 2 * mid + down) / (2 * h * h)))
            continue
        d = devs[np.abs(devs - q[i]) > 1e-12]
        m = (q[i] - d) * slope / np.abs(q[i] - d)
        worst = min(worst, float(m.min()))
    return worst


def success_probability(profile, p: MacParams) -> float:
    """Probability of a successful transmission under the pairing model.

    Alone (probability gamma): success iff the mobile transmits. Paired: each
    same-group pair type counts 2 alpha_i^2 q_i (1 - q_i), each cross-group
    pair type {i, j} counts alpha_i alpha_j (q_i (1-q_j) + q_j (1-q_i)); for two
    groups this is the usual closed form.
    """
    q = _first(profile)
    a = p.alpha
    alone = float(a @ q)
    paired = 0.0
    for i, j in itertools.combinations_with_replacement(range(len(q)), 2):
        if i == j:
            paired += 2 * a[i] ** 2 * q[i] * (1 - q[i])
        else:
            paired += a[i] * a[j] * (q[i] * (1 - q[j]) + q[j] * (1 - q[i]))
    return float(p.mu * (p.gamma * alone + (1 - p.gamma) * paired))


def success_probability_two_groups(p1: float, p2: float, alpha: float, gamma: float, mu: float) -> float:
    return mu * (
        gamma * (alpha * p1 + (1 - alpha) * p2)
        + (1 - gamma)
        * (
            2 * alpha**2 * p1 * (1 - p1)
            + alpha * (1 - alpha) * ((1 - p2) * p1 + (1 - p1) * p2)
            + 2 * (1 - alpha) ** 2 * p2 * (1 - p2)
        )
    )


def standard_reference_strategy(p: MacParams) -> float:
    """Transmit probability where a single-population mobile is indifferent."""
    if p.gamma >= 1:
        raise ValueError("gamma must be below 1")
    return min(1.0, (1 - p.delta) / (1 - p.gamma))
