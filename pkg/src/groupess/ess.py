"""Classical single-population Nash/ESS analysis for symmetric 2x2 games."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .game import MixedStrategy, PayoffMatrix2, StrategyLike, as_vector, pairwise_payoff

TIE_TOL = 1e-9


@dataclass(frozen=True)
class EssReport:
    candidate: MixedStrategy
    is_nash: bool
    is_ess: bool
    strict: bool = False
    witness: Optional[float] = None
    note: str = ""

    def __post_init__(self):
        if self.is_ess and not self.is_nash:
            raise ValueError("an ESS must be a Nash equilibrium")


def _first(q: StrategyLike) -> float:
    return float(as_vector(q)[0])


def is_nash_symmetric(q: StrategyLike, m: PayoffMatrix2, tol: float = TIE_TOL) -> bool:
    """J(q,q) >= J(p,q) for every p; only the two pure replies need checking."""
    qq = pairwise_payoff(q, q, m)
    best = max(pairwise_payoff(1.0, q, m), pairwise_payoff(0.0, q, m))
    return qq >= best - tol


def is_ess(q: StrategyLike, m: PayoffMatrix2, tol: float = TIE_TOL) -> EssReport:
    q1 = _first(q)
    cand = MixedStrategy.from_first(q1)
    gain_a = pairwise_payoff(1.0, q1, m) - pairwise_payoff(0.0, q1, m)
    if not is_nash_symmetric(q1, m, tol):
        # the better pure reply is the deviation that breaks the condition
        return EssReport(cand, False, False, witness=1.0 if gain_a > 0 else 0.0, note="not a best reply to itself")

    if abs(gain_a) > tol:
        # unique best reply is q itself (must be pure to pass the Nash test)
        return EssReport(cand, True, True, strict=True, note="strict Nash")

    # Every p is an alternative best reply; J(p,p) - J(q,p) = (p-q)^2 * delta.
    tied_boundary = q1 in (0.0, 1.0)
    if m.concave:
        note = "non-strict: boundary tie resolved by stability" if tied_boundary else "interior, stable"
        return EssReport(cand, True, True, strict=False, note=note)
    witness = 0.0 if q1 >= 0.5 else 1.0
    return EssReport(cand, True, False, witness=witness, note="alternative best reply invades (delta >= 0)")


def ess_candidates_2x2(m: PayoffMatrix2) -> list[MixedStrategy]:
    """Pure strategies plus the interior indifference point (d-b)/delta when it exists."""
    out = [MixedStrategy.from_first(0.0), MixedStrategy.from_first(1.0)]
    if m.delta != 0:
        q = (m.d - m.b) / m.delta
        if 0.0 < q < 1.0:
            out.append(MixedStrategy.from_first(q))
    return out


def symmetric_ess(m: PayoffMatrix2, tol: float = TIE_TOL) -> list[EssReport]:
    return [r for r in (is_ess(c, m, tol) for c in ess_candidates_2x2(m)) if r.is_ess]
