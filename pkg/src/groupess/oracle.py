"""Definition-level GESS checks and a brute-force grid search.

Nothing here uses the bracket factorization of :mod:`groupess.solver`; every
quantity is rebuilt from the pairwise payoff matrix, so the two modules can be
used to check each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np
from scipy import ndimage

from .game import GroupGame, GroupProfile, as_profile

REL_TOL = 1e-7
MAX_GRID_GROUPS = 3


@dataclass(frozen=True)
class InvasionGrid:
    eps_values: tuple[float, ...] = tuple(np.geomspace(1e-4, 0.2, 20))
    deviation_resolution: float = 0.01

    def __post_init__(self):
        eps = tuple(sorted(float(e) for e in self.eps_values))
        if not eps or not all(0.0 < e < 1.0 for e in eps):
            raise ValueError("eps values must lie strictly inside (0, 1)")
        if not 0.0 < self.deviation_resolution <= 0.5:
            raise ValueError("deviation resolution must lie in (0, 0.5]")
        object.__setattr__(self, "eps_values", eps)

    def deviations(self, n_actions: int = 2) -> np.ndarray:
        """Lattice of mutant strategies on the simplex, shape (K, n_actions)."""
        steps = max(1, int(round(1.0 / self.deviation_resolution)))
        if n_actions == 2:
            p = np.arange(steps + 1) / steps
            return np.column_stack([p, 1.0 - p])
        pts = [c for c in _compositions(steps, n_actions)]
        return np.array(pts, dtype=float) / steps


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


@dataclass(frozen=True)
class Witness:
    group: int
    mutant: tuple[float, ...]
    eps: Optional[float] = None


@dataclass(frozen=True)
class Verdict:
    passed: bool
    worst_violation: float
    witness: Optional[Witness] = None
    tolerance: float = 0.0
    ties: int = 0
    notes: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if self.passed != (self.worst_violation > -self.tolerance):
            raise ValueError("verdict inconsistent with its worst violation")


def default_tolerance(g: GroupGame) -> float:
    return REL_TOL * g.payoff.scale


def _profile_matrix(q, g: GroupGame) -> np.ndarray:
    Q = as_profile(q).as_array()
    if Q.shape != (g.n_groups, g.payoff.n_actions):
        raise ValueError(f"profile shape {Q.shape} does not match the game")
    return Q


def _own_utility(alpha, i, A, X, Q):
    """U_i with group i's strategy replaced by each row of X (..., M)."""
    others = Q @ A.T  # (N, M): A q_j per group
    cross = np.tensordot(X, others.T, axes=(-1, 0))  # (..., N): J(x, q_j)
    self_term = np.einsum("...m,ml,...l->...", X, A, X)
    return alpha[i] * self_term + cross @ alpha - alpha[i] * cross[..., i]


def verify_gess_definition(q, g: GroupGame, grid: InvasionGrid = InvasionGrid(), tol: Optional[float] = None) -> Verdict:
    """Direct invasion test: U_i(eps p + (1-eps) q_i, q_-i) < U_i(q).

    Margins are reported per unit of eps and of deviation size, so they are
    comparable with the first-order condition. A mutant passes when the margin
    is positive on a prefix of the eps grid that contains the smallest eps.
    """
    tol = default_tolerance(g) if tol is None else tol
    A = g.payoff.array
    alpha = g.alpha
    Q = _profile_matrix(q, g)
    eps = np.array(grid.eps_values)
    P = grid.deviations(A.shape[0])
    worst, witness, ties = math.inf, None, 0
    for i in range(g.n_groups):
        qi = Q[i]
        size = np.max(np.abs(P - qi), axis=1)
        keep = size > 1e-12
        Pi, size = P[keep], size[keep]
        base = _own_utility(alpha, i, A, qi[None, :], Q)[0]
        mixed = eps[:, None, None] * Pi[None] + (1 - eps)[:, None, None] * qi  # (E, K, M)
        margin = (base - _own_utility(alpha, i, A, mixed, Q)) / (eps[:, None] * size[None, :])
        ok = margin > -tol
        first_bad = np.where(ok.all(axis=0), len(eps), np.argmin(ok, axis=0))
        m0 = margin[0]
        ties += int(np.sum(np.abs(m0) <= tol))
        k = int(np.argmin(m0))
        if m0[k] < worst:
            worst = float(m0[k])
            thr = float(eps[first_bad[k] - 1]) if first_bad[k] > 0 else None
            witness = Witness(i, tuple(float(x) for x in Pi[k]), thr if m0[k] > -tol else float(eps[0]))
    return Verdict(worst > -tol, worst, witness, tol, ties)


def _bilinear2(A: np.ndarray, p, q):
    """p' A q for two-action strategies given as first-action probabilities."""
    return A[0, 0] * p * q + A[0, 1] * p * (1 - q) + A[1, 0] * (1 - p) * q + A[1, 1] * (1 - p) * (1 - q)


def _condition_margins(Q: np.ndarray, alpha: np.ndarray, A: np.ndarray, P: np.ndarray, tol: float, slack: np.ndarray):
    """Margins of the factored conditions for many profiles at once.

    Q: (G, N, M) profiles, P: (K, M) deviations, slack: (G, N).
    Returns margins (G, N, K); +inf where the deviation equals q_i.
    """
    a = alpha[None, :, None]
    if A.shape == (2, 2):
        q = Q[..., 0]  # (G, N)
        p = P[:, 0]
        J_pq = _bilinear2(A, p[None, None, :], q[:, :, None])  # J(p, q_j)
        J_qp = _bilinear2(A, q[:, :, None], p[None, None, :])  # J(q_i, p)
        J_pp = _bilinear2(A, p, p)
        J_qq = _bilinear2(A, q[:, :, None], q[:, None, :])  # J(q_i, q_j)
        size = np.abs(p[None, None, :] - q[:, :, None])
    else:
        AQ = Q @ A.T
        J_pq = np.einsum("km,gnm->gnk", P, AQ)
        J_qp = np.einsum("gnm,km->gnk", Q @ A, P)
        J_pp = np.einsum("km,ml,kl->k", P, A, P)
        J_qq = np.einsum("gim,gjm->gij", Q, AQ)
        size = np.max(np.abs(P[None, None, :, :] - Q[:, :, None, :]), axis=-1)
    diag_qq = np.einsum("gii->gi", J_qq)
    s_pq = np.einsum("n,gnk->gk", alpha, J_pq)

    # F_i = alpha_i Omega(p, q_i) - U_i(p, q_-i) + U_i(q_i, q_-i)
    omega = J_pp[None, None, :] - J_pq - J_qp + diag_qq[:, :, None]
    u_p = a * J_pp[None, None, :] + s_pq[:, None, :] - a * J_pq
    u_q = (J_qq @ alpha)[:, :, None]
    F = a * omega - u_p + u_q

    with np.errstate(divide="ignore", invalid="ignore"):
        slope = F / size
        omega_n = omega / size**2
    band = tol + slack[:, :, None]
    vanish = np.abs(slope) <= band
    margin = np.where(vanish, -omega_n - 2 * tol, slope + slack[:, :, None])
    return np.where(size > 1e-12, margin, np.inf)


def verify_conditions(q, g: GroupGame, grid: InvasionGrid = InvasionGrid(), tol: Optional[float] = None, slack: Optional[Sequence[float]] = None) -> Verdict:
    """F_i(p, q) >= 0 on the deviation grid; where F_i vanishes, Omega < 0.

    Margins are F_i per unit deviation; where that is within tolerance the
    margin becomes -Omega per squared deviation (less twice the tolerance), so
    a tie only passes when Omega is negative.
    """
    tol = default_tolerance(g) if tol is None else tol
    A = g.payoff.array
    Q = _profile_matrix(q, g)
    P = grid.deviations(A.shape[0])
    sl = np.zeros((1, g.n_groups)) if slack is None else np.asarray(slack, dtype=float).reshape(1, -1)
    margin = _condition_margins(Q[None], g.alpha, A, P, tol, sl)[0]
    i, k = np.unravel_index(np.argmin(margin), margin.shape)
    worst = float(margin[i, k])
    ties = int(np.sum(np.abs(margin) <= tol))
    return Verdict(worst > -tol, worst, Witness(int(i), tuple(float(x) for x in P[k])), tol, ties)


def strict_group_nash_check(q, g: GroupGame, resolution: float = 0.01, tol: Optional[float] = None) -> bool:
    """U_i(q_i, q_-i) > U_i(p, q_-i) for every grid p != q_i (whole-group switch)."""
    tol = default_tolerance(g) if tol is None else tol
    A = g.payoff.array
    Q = _profile_matrix(q, g)
    P = InvasionGrid(deviation_resolution=resolution).deviations(A.shape[0])
    for i in range(g.n_groups):
        keep = np.max(np.abs(P - Q[i]), axis=1) > 1e-12
        here = _own_utility(g.alpha, i, A, Q[i][None, :], Q)[0]
        there = _own_utility(g.alpha, i, A, P[keep], Q)
        # differences shrink with the deviation, so compare per unit deviation
        size = np.max(np.abs(P[keep] - Q[i]), axis=1)
        if np.any((here - there) / size <= tol):
            return False
    return True


@dataclass(frozen=True)
class GridCluster:
    """Connected set of grid profiles that pass the conditions."""

    profile: GroupProfile
    members: np.ndarray = field(compare=False, repr=False)
    margin: float = 0.0
    degenerate: bool = False

    def distance(self, q) -> float:
        q = np.asarray(q, dtype=float)
        return float(np.min(np.max(np.abs(self.members - q), axis=1)))


def _discretization_slack(G: np.ndarray, alpha: np.ndarray, delta: float, res: float) -> np.ndarray:
    """How far a bracket can move between an equilibrium and its nearest grid point.

    Coordinates that may be off-grid contribute |delta| alpha_j res/2 to every
    bracket and the group's own coordinate contributes it twice. With
    delta >= 0 no equilibrium has an interior coordinate, so only interior
    grid coordinates count.
    """
    if delta < 0:
        loose = np.ones_like(G, dtype=bool)
    else:
        loose = (G > 0) & (G < 1)
    w = loose * alpha[None, :]
    tot = w.sum(axis=1, keepdims=True)
    return abs(delta) * 0.5 * res * (tot + w)


def _grid_margins(G: np.ndarray, g: GroupGame, P: np.ndarray, tol: float, delta: float, res: float, chunk: int) -> np.ndarray:
    best = np.empty(len(G))
    A = g.payoff.array
    for start in range(0, len(G), chunk):
        part = G[start:start + chunk]
        Q = np.stack([part, 1.0 - part], axis=-1)
        slack = _discretization_slack(part, g.alpha, delta, res)
        best[start:start + chunk] = _condition_margins(Q, g.alpha, A, P, tol, slack).min(axis=(1, 2))
    return best


def grid_search_equilibria(
    g: GroupGame,
    resolution: float = 0.01,
    tol: Optional[float] = None,
    deviation_resolution: float = 0.05,
    refine: int = 10,
    chunk: int = 4096,
) -> list[GridCluster]:
    """Brute-force discovery of equilibria on the grid over [0,1]^N.

    Each grid profile is run through the same margins as
    :func:`verify_conditions`, widened by the bracket drift a true equilibrium
    can show at its nearest grid point. A hit survives only if its cell, resampled
    ``refine`` times finer with the correspondingly tighter widening, still
    contains a passing point; this removes the long slivers that otherwise
    appear around badly conditioned mixed equilibria. Survivors are merged into
    clusters of grid neighbours (diagonals included).
    """
    n = g.n_groups
    if n > MAX_GRID_GROUPS:
        raise ValueError(f"grid search limited to {MAX_GRID_GROUPS} groups, got {n}")
    A = g.payoff.array
    if A.shape != (2, 2):
        raise ValueError("grid search covers two-action games only")
    tol = default_tolerance(g) if tol is None else tol
    steps = int(round(1.0 / resolution))
    axis = np.arange(steps + 1) / steps
    mesh = np.stack(np.meshgrid(*([axis] * n), indexing="ij"), axis=-1).reshape(-1, n)

    if np.all(A == A[0, 0]):
        centre = GroupProfile.from_first(np.full(n, axis[steps // 2]))
        return [GridCluster(centre, mesh, 0.0, degenerate=True)]

    delta = float(A[0, 0] - A[0, 1] - A[1, 0] + A[1, 1])
    P = InvasionGrid(deviation_resolution=deviation_resolution).deviations(2)
    best = _grid_margins(mesh, g, P, tol, delta, resolution, chunk)
    hit = best > -tol

    if refine > 1:
        fine_res = resolution / refine
        offs = (np.arange(refine + 1) - refine / 2) * fine_res
        cell = np.stack(np.meshgrid(*([offs] * n), indexing="ij"), axis=-1).reshape(-1, n)
        for k in np.flatnonzero(hit):
            pts = np.unique(np.clip(mesh[k] + cell, 0.0, 1.0).round(12), axis=0)
            if not np.any(_grid_margins(pts, g, P, tol, delta, fine_res, chunk) > -tol):
                hit[k] = False

    labels, count = ndimage.label(hit.reshape((steps + 1,) * n), structure=np.ones((3,) * n))
    flat = labels.reshape(-1)
    out = []
    for c in range(1, count + 1):
        idx = np.flatnonzero(flat == c)
        k = idx[np.argmax(best[idx])]
        out.append(GridCluster(GroupProfile.from_first(mesh[k]), mesh[idx], float(best[k])))
    out.sort(key=lambda c: tuple(c.profile.first))
    return out


def attach_verdicts(results, g: GroupGame, grid: InvasionGrid = InvasionGrid()):
    """Fill ``oracle_verdict`` on solver results with the definitional test."""
    return [replace(r, oracle_verdict=verify_gess_definition(r.profile, g, grid)) for r in results]


def verify_random_mutants(q, g: GroupGame, rng: np.random.Generator, n: int = 200, tol: Optional[float] = None) -> Verdict:
    """Definitional test on ``n`` random mutants per group with random small eps."""
    tol = default_tolerance(g) if tol is None else tol
    A = g.payoff.array
    Q = _profile_matrix(q, g)
    worst, witness = math.inf, None
    for i in range(g.n_groups):
        P = rng.dirichlet(np.ones(A.shape[0]), size=n)
        eps = 10.0 ** rng.uniform(-4, -2, size=n)
        size = np.max(np.abs(P - Q[i]), axis=1)
        keep = size > 1e-9
        P, eps, size = P[keep], eps[keep], size[keep]
        base = _own_utility(g.alpha, i, A, Q[i][None, :], Q)[0]
        mixed = eps[:, None] * P + (1 - eps)[:, None] * Q[i]
        margin = (base - _own_utility(g.alpha, i, A, mixed, Q)) / (eps * size)
        if margin.size and margin.min() < worst:
            k = int(np.argmin(margin))
            worst = float(margin[k])
            witness = Witness(i, tuple(float(x) for x in P[k]), float(eps[k]))
    return Verdict(worst > -tol, worst, witness, tol)
