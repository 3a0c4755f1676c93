"""Problem-instance types and the payoff/utility primitives.

Strategies in the two-action case are stored as the probability of the first
listed action (A). The general M-action vector form is accepted everywhere a
strategy is consumed, so the definitional checks in :mod:`groupess.oracle`
also work for larger action sets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

SUM_TOL = 1e-12


@dataclass(frozen=True)
class MixedStrategy:
    """Probability vector over the actions; ``probs[0]`` is action A."""

    probs: tuple[float, ...]

    def __post_init__(self):
        probs = tuple(float(x) for x in self.probs)
        if len(probs) < 2:
            raise ValueError("a mixed strategy needs at least two actions")
        for x in probs:
            if not (0.0 <= x <= 1.0):
                raise ValueError(f"probability {x!r} outside [0, 1]")
        if abs(sum(probs) - 1.0) > SUM_TOL:
            raise ValueError(f"probabilities sum to {sum(probs)!r}, not 1")
        object.__setattr__(self, "probs", probs)

    @classmethod
    def from_first(cls, p: float) -> "MixedStrategy":
        p = float(p)
        return cls((p, 1.0 - p))

    @property
    def first(self) -> float:
        return self.probs[0]

    @property
    def n_actions(self) -> int:
        return len(self.probs)

    def as_array(self) -> np.ndarray:
        return np.array(self.probs)


StrategyLike = Union[MixedStrategy, float, Sequence[float], np.ndarray]


def as_vector(s: StrategyLike) -> np.ndarray:
    """Coerce a strategy (object, first-action probability, or vector)."""
    if isinstance(s, MixedStrategy):
        return s.as_array()
    arr = np.asarray(s, dtype=float)
    if arr.ndim == 0:
        p = float(arr)
        return np.array([p, 1.0 - p])
    return arr


def blend(p: StrategyLike, q: StrategyLike, eps: float) -> np.ndarray:
    """eps*p + (1-eps)*q as a probability vector."""
    return eps * as_vector(p) + (1.0 - eps) * as_vector(q)


@dataclass(frozen=True)
class PayoffMatrix2:
    """Row player's payoffs, rows/columns ordered A then B::

        | a  b |
        | c  d |
    """

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        for name in "abcd":
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ValueError(f"payoff entry {name}={v!r} is not finite")
            object.__setattr__(self, name, v)

    @property
    def delta(self) -> float:
        return (self.a - self.c) - (self.b - self.d)

    @property
    def concave(self) -> bool:
        """delta < 0 beyond roundoff relative to the payoff scale."""
        return self.delta < -1e-12 * self.scale

    @property
    def array(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]])

    @property
    def n_actions(self) -> int:
        return 2

    @property
    def scale(self) -> float:
        s = max(abs(self.a), abs(self.b), abs(self.c), abs(self.d))
        return s if s > 0 else 1.0

    def affine(self, s: float, t: float) -> "PayoffMatrix2":
        return PayoffMatrix2(s * self.a + t, s * self.b + t, s * self.c + t, s * self.d + t)

    @classmethod
    def hawk_dove(cls, V: float = 2.0, C: float = 3.0) -> "PayoffMatrix2":
        return cls(0.5 * (V - C), V, 0.0, V / 2)

    @classmethod
    def stag_hunt(cls) -> "PayoffMatrix2":
        return cls(2.0, 0.0, 1.0, 1.0)

    @classmethod
    def prisoners_dilemma(cls) -> "PayoffMatrix2":
        return cls(2.0, 0.0, 3.0, 1.0)


@dataclass(frozen=True)
class PayoffMatrix:
    """General square payoff matrix for M actions (definitional checks only)."""

    rows: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        arr = np.asarray(self.rows, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 2:
            raise ValueError("payoff matrix must be square with at least two actions")
        if not np.all(np.isfinite(arr)):
            raise ValueError("payoff entries must be finite")
        object.__setattr__(self, "rows", tuple(tuple(float(x) for x in r) for r in arr))

    @property
    def array(self) -> np.ndarray:
        return np.array(self.rows)

    @property
    def n_actions(self) -> int:
        return len(self.rows)

    @property
    def scale(self) -> float:
        s = float(np.max(np.abs(self.array)))
        return s if s > 0 else 1.0


Payoff = Union[PayoffMatrix2, PayoffMatrix]


@dataclass(frozen=True)
class GroupWeights:
    """Normalized group sizes; strictly positive, summing to one."""

    alpha: tuple[float, ...]

    def __post_init__(self):
        alpha = tuple(float(x) for x in self.alpha)
        if not alpha:
            raise ValueError("at least one group is required")
        for x in alpha:
            if not (math.isfinite(x) and x > 0):
                raise ValueError(f"group weight {x!r} must be strictly positive")
        if abs(sum(alpha) - 1.0) > SUM_TOL:
            raise ValueError(f"group weights sum to {sum(alpha)!r}, not 1")
        object.__setattr__(self, "alpha", alpha)

    @classmethod
    def two(cls, alpha: float) -> "GroupWeights":
        return cls((alpha, 1.0 - alpha))

    def __len__(self):
        return len(self.alpha)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.alpha)


@dataclass(frozen=True)
class GroupGame:
    weights: GroupWeights
    payoff: Payoff

    def __post_init__(self):
        if not isinstance(self.weights, GroupWeights):
            object.__setattr__(self, "weights", GroupWeights(tuple(self.weights)))

    @classmethod
    def two_groups(cls, alpha: float, payoff: Payoff) -> "GroupGame":
        return cls(GroupWeights.two(alpha), payoff)

    @property
    def n_groups(self) -> int:
        return len(self.weights)

    @property
    def alpha(self) -> np.ndarray:
        return self.weights.array

    def require_two_actions(self) -> PayoffMatrix2:
        if not isinstance(self.payoff, PayoffMatrix2):
            raise TypeError("closed-form analysis needs a 2x2 payoff matrix")
        return self.payoff


@dataclass(frozen=True)
class GroupProfile:
    """One mixed strategy per group."""

    strategies: tuple[MixedStrategy, ...]

    def __post_init__(self):
        strategies = tuple(
            s if isinstance(s, MixedStrategy) else _strategy_from(s) for s in self.strategies
        )
        if not strategies:
            raise ValueError("empty profile")
        object.__setattr__(self, "strategies", strategies)

    @classmethod
    def from_first(cls, qs: Sequence[float]) -> "GroupProfile":
        return cls(tuple(MixedStrategy.from_first(q) for q in qs))

    def __len__(self):
        return len(self.strategies)

    def __getitem__(self, i):
        return self.strategies[i]

    @property
    def first(self) -> np.ndarray:
        return np.array([s.first for s in self.strategies])

    def as_array(self) -> np.ndarray:
        return np.array([s.probs for s in self.strategies])

    def replace(self, i: int, s: StrategyLike) -> "GroupProfile":
        new = list(self.strategies)
        new[i] = _strategy_from(s)
        return GroupProfile(tuple(new))


def _strategy_from(s: StrategyLike) -> MixedStrategy:
    if isinstance(s, MixedStrategy):
        return s
    vec = as_vector(s)
    # blends of valid vectors can drift off [0, 1] by an ulp
    return MixedStrategy(tuple(np.clip(vec, 0.0, 1.0)))


def as_profile(q) -> GroupProfile:
    if isinstance(q, GroupProfile):
        return q
    arr = np.asarray(q, dtype=float)
    if arr.ndim == 1:
        return GroupProfile.from_first(arr)
    return GroupProfile(tuple(MixedStrategy(tuple(r)) for r in arr))


def _check_profile(profile: GroupProfile, g: GroupGame):
    if len(profile) != g.n_groups:
        raise ValueError(f"profile has {len(profile)} groups, game has {g.n_groups}")


def _check_index(i: int, g: GroupGame):
    if not 0 <= i < g.n_groups:
        raise IndexError(f"group index {i} out of range for {g.n_groups} groups")


def pairwise_payoff(p: StrategyLike, q: StrategyLike, m: Payoff) -> float:
    """Bilinear payoff p' A q of a p-player meeting a q-player."""
    return float(as_vector(p) @ m.array @ as_vector(q))


def group_utility(i: int, profile, g: GroupGame) -> float:
    """Sum_j alpha_j J(q_i, q_j), self term included."""
    _check_index(i, g)
    profile = as_profile(profile)
    _check_profile(profile, g)
    Q = profile.as_array()
    qi = Q[i]
    return float(np.dot(g.alpha, Q @ g.payoff.array.T @ qi))


def omega(p: StrategyLike, q: StrategyLike, m: Payoff) -> float:
    """J(p,p) - J(p,q) - J(q,p) + J(q,q)."""
    return (
        pairwise_payoff(p, p, m)
        - pairwise_payoff(p, q, m)
        - pairwise_payoff(q, p, m)
        + pairwise_payoff(q, q, m)
    )


def post_mutation_utility(i: int, mutant: StrategyLike, profile, eps: float, g: GroupGame) -> float:
    """Utility of group i once its strategy drifts to eps*mutant + (1-eps)*q_i."""
    if not 0.0 < eps <= 1.0:
        raise ValueError(f"eps={eps!r} must lie in (0, 1]")
    profile = as_profile(profile)
    _check_profile(profile, g)
    return group_utility(i, profile.replace(i, blend(mutant, profile[i], eps)), g)


def mutation_expansion(i: int, mutant: StrategyLike, profile, eps: float, g: GroupGame) -> float:
    """Quadratic-in-eps expansion of :func:`post_mutation_utility`.

    U_i(q) + eps^2 alpha_i Omega(p, q_i)
           + eps [alpha_i (J(p,q_i) + J(q_i,p) - 2 J(q_i,q_i))
                  + sum_{j != i} alpha_j (J(p,q_j) - J(q_i,q_j))]
    """
    profile = as_profile(profile)
    _check_profile(profile, g)
    m = g.payoff
    alpha = g.alpha
    qi = profile[i]
    first = alpha[i] * (
        pairwise_payoff(mutant, qi, m) + pairwise_payoff(qi, mutant, m) - 2 * pairwise_payoff(qi, qi, m)
    )
    for j, qj in enumerate(profile.strategies):
        if j != i:
            first += alpha[j] * (pairwise_payoff(mutant, qj, m) - pairwise_payoff(qi, qj, m))
    return group_utility(i, profile, g) + eps**2 * alpha[i] * omega(mutant, qi, m) + eps * first
