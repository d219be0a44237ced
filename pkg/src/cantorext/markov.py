"""Markov factors: how fast differentiation grows on polynomials over a set.

M_n(K) is the best constant in |P'| <= M |P| over degree-n polynomials in the
sup norm of K.  For the Cantor-type sets the dyadic degrees satisfy
M_{2^k} ~ 2/delta_k, and monotonicity brackets every degree:
1/delta_k < M_n < 4/delta_{k+1} for 2^k <= n < 2^{k+1}.

The numeric estimator solves, per candidate extremum x*, the linear program
max P'(x*) over |P(x_i)| <= 1 on a grid, in the Chebyshev basis of the grid's
hull (scipy HiGHS, a dual-simplex/active-set exchange with anti-cycling); the
maximum over candidates estimates M_n of the grid.  An independent lower-bound
witness comes from the level polynomial P_{2^s} + r_s/2, which maps the level
domain onto [-r_s/2, r_s/2].
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import mpmath as mp
import numpy as np
from numpy.polynomial import chebyshev as C
from scipy.optimize import linprog

from .errors import DegreeError, HorizonError, ParameterError
from .gamma import GammaModel, profile as make_profile
from .geometry import CantorTree
from .logreal import LogReal

LN2 = math.log(2.0)


# ---------------------------------------------------------------------------
# closed-form brackets
# ---------------------------------------------------------------------------

@dataclass
class MarkovEstimate:
    n: int
    k: int                    # floor(log2 n)
    lower: LogReal            # 1/delta_k
    upper: LogReal            # 4/delta_{k+1}
    point: Optional[LogReal]  # 2/delta_k when n = 2^k
    numeric: Optional[float] = None

    def bracket_contains_ln(self, ln_value: float) -> bool:
        return self.lower.ln_mag <= ln_value <= self.upper.ln_mag


def markov_bounds(model: GammaModel, n: int) -> MarkovEstimate:
    """The dyadic bracket (1/delta_k, 4/delta_{k+1}) for 2^k <= n < 2^{k+1}."""
    if n < 2:
        raise ParameterError("the bracket needs degree n >= 2")
    k = n.bit_length() - 1
    if k + 1 > model.k_max:
        raise HorizonError(f"bracket for n={n} needs delta_{k + 1}, horizon {model.k_max}")
    prof = make_profile(model)
    lower = prof.delta[k].inv()
    upper = prof.delta[k + 1].inv().mul(LogReal.from_float(4.0))
    point = None
    if n == 2 ** k:
        point = prof.delta[k].inv().mul(LogReal.from_float(2.0))
    return MarkovEstimate(n=n, k=k, lower=lower, upper=upper, point=point)


# ---------------------------------------------------------------------------
# numeric estimator
# ---------------------------------------------------------------------------

@dataclass
class NumericMarkov:
    n: int
    value: float
    grid_size: int
    stalled: bool            # some candidate LP did not converge
    refined_value: Optional[float] = None  # on a doubled grid, if requested


def chebyshev_grid(atoms: Sequence[tuple], points_per_atom: int) -> np.ndarray:
    """Chebyshev-distributed points (endpoints included) inside each atom."""
    xs = []
    m = max(points_per_atom, 2)
    nodes = (1.0 + np.cos(np.pi * np.arange(m) / (m - 1))) / 2.0
    for lo, hi in atoms:
        xs.append(lo + (hi - lo) * nodes[::-1])
    return np.unique(np.concatenate(xs))


def _lp_value(V: np.ndarray, dV: np.ndarray, idx: int) -> tuple:
    """max P'(x_idx) subject to |P(x_i)| <= 1; returns (value, converged)."""
    G, m = V.shape
    c = -dV[idx]
    A_ub = np.vstack([V, -V])
    b_ub = np.ones(2 * G)
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, bounds=[(None, None)] * m,
                  method="highs")
    if res.status != 0 or res.x is None:
        return (-math.inf, False)
    return (float(-res.fun), True)


def markov_numeric(atoms: Sequence[tuple], n: int, points_per_atom: int = 16,
                   extra_candidates: int = 24, seed: int = 0,
                   refine: bool = False, workers: int = 1) -> NumericMarkov:
    """Estimate M_n of the grid over the atoms by per-candidate LPs.

    Candidates where |P'| can peak are all grid points of the two extreme
    atoms plus a seeded stratified sample elsewhere; by symmetry of the
    feasible set one maximization per candidate suffices.  Candidate LPs are
    independent; ``workers`` threads them (the reduction by max is
    order-free, so the result stays deterministic).
    """
    if n > 32:
        raise DegreeError("numeric estimator supports degrees up to 32")
    if n < 1:
        raise DegreeError("degree must be >= 1")
    atoms = sorted((float(a), float(b)) for a, b in atoms)
    grid = chebyshev_grid(atoms, points_per_atom)
    if len(grid) < 4 * n:
        raise ParameterError(f"grid of {len(grid)} points is below 4n = {4 * n}")
    lo, hi = grid[0], grid[-1]
    y = (2.0 * grid - (lo + hi)) / (hi - lo)
    V = C.chebvander(y, n)
    dmat = np.zeros((n + 1, n + 1))
    for j_ in range(n + 1):
        e = np.zeros(n + 1)
        e[j_] = 1.0
        d = C.chebder(e)
        dmat[j_, :len(d)] = d
    dV = np.column_stack(
        [C.chebval(y, dmat[j_]) for j_ in range(n + 1)]) * (2.0 / (hi - lo))

    first = np.where(grid <= atoms[0][1])[0]
    last = np.where(grid >= atoms[-1][0])[0]
    cand = set(first.tolist()) | set(last.tolist())
    rng = np.random.default_rng(seed)
    if extra_candidates and len(grid) > len(cand):
        rest = np.setdiff1d(np.arange(len(grid)), np.array(sorted(cand)))
        take = min(extra_candidates, len(rest))
        strata = np.array_split(rest, take)
        cand |= {int(rng.choice(s)) for s in strata if len(s)}
    order = sorted(cand)
    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda i: _lp_value(V, dV, i), order))
    else:
        results = [_lp_value(V, dV, idx) for idx in order]
    best = max((val for val, _ in results), default=-math.inf)
    stalled = any(not ok for _, ok in results)
    refined = None
    if refine:
        refined = markov_numeric(atoms, n, points_per_atom * 2,
                                 extra_candidates, seed, refine=False,
                                 workers=workers).value
    return NumericMarkov(n=n, value=best, grid_size=len(grid), stalled=stalled,
                         refined_value=refined)


def tree_atom_bounds(tree: CantorTree, level: Optional[int] = None) -> list:
    return [(float(iv.left), float(iv.right)) for iv in tree.atoms(level)]


def certificate_lower_bound(tree: CantorTree, s: int,
                            points_per_atom: int = 8) -> float:
    """ln of a direct M_{2^s} witness: the scaled level polynomial.

    Q = (P_{2^s} + r_s/2) / (r_s/2) has |Q| <= 1 on the level-s domain, so
    max |Q'| over the grid is a true lower bound for the grid's M_{2^s}.
    """
    if s > tree.depth:
        raise HorizonError("certificate level beyond tree depth")
    best = -mp.inf
    with mp.workprec(tree.bits):
        rs = tree.r_mpf[s]
        for iv in tree.atoms(s):
            width = iv.right - iv.left
            for i in range(points_per_atom):
                x = iv.left + width * mp.mpf(i) / (points_per_atom - 1)
                # P'_{2^{i+1}} = P'_{2^i} (2 P_{2^i} + r_i)
                v = x * (x - 1)
                dv = 2 * x - 1
                for lev in range(1, s):
                    dv = dv * (2 * v + tree.r_mpf[lev])
                    v = v * (v + tree.r_mpf[lev])
                best = max(best, abs(dv) * 2 / rs)
        return float(mp.log(best))


# ---------------------------------------------------------------------------
# the crossover table
# ---------------------------------------------------------------------------

@dataclass
class RatioRow:
    k: int
    j: int                 # dip index with k_j <= k+1 < k_{j+1}
    branch: str            # "interior" (k <= k_{j+1}-2) or "handoff" (k = k_{j+1}-1)
    ln_bound: float        # ln 4 + ln delta_k^(1) - ln delta_{k+1}^(2)


@dataclass
class RatioTable:
    rows: list
    decreasing_negative_from: Optional[int]  # first k from which rows strictly decrease and stay < 0


def ratio_table(model1: GammaModel, model2: GammaModel,
                k_range: Sequence[int]) -> RatioTable:
    """Markov-factor crossover bounds M_n(K_2)/M_n(K_1) < 4 delta_k^(1)/delta_{k+1}^(2).

    model1 must be the constant-weight family with B > 1 (so its factors grow
    strictly faster); model2 the dip family.  The bound is reported per k in
    exact log arithmetic, with the dip-branch label.
    """
    if model1.family != "example1" or model1.params.get("B", 0) <= 1.0:
        raise ParameterError("crossover table needs the constant-weight family with B > 1")
    if model2.family != "example2":
        raise ParameterError("model2 must be the dip family")
    p1, p2 = make_profile(model1), make_profile(model2)
    kj = model2.meta["kj"]
    rows = []
    for k in k_range:
        if k + 1 > min(model1.k_max, model2.k_max):
            raise HorizonError(f"k={k} beyond built horizons")
        j = max(i + 1 for i, v in enumerate(kj) if v <= k + 1)
        branch = "handoff" if kj[j - 1] == k + 1 else "interior"
        ln_bound = float(LN2 * 2) + float(-p1.ln_inv_delta(k) + p2.ln_inv_delta(k + 1))
        rows.append(RatioRow(k=k, j=j, branch=branch, ln_bound=ln_bound))
    start = None
    for i in range(len(rows)):
        tail = rows[i:]
        if len(tail) >= 2 and all(r.ln_bound < 0 for r in tail) and \
                all(a.ln_bound > b.ln_bound for a, b in zip(tail, tail[1:])):
            start = rows[i].k
            break
    return RatioTable(rows=rows, decreasing_negative_from=start)
