"""Hausdorff contents, level sums and lower densities of Cantor-type sets.

Contents are computed at atom resolution: a set is presented as finitely many
disjoint closed intervals (deepest-level basic intervals of a tree, or the
truncated island family of the isolated-point example), and the optimal
covering by closed intervals is found exactly.  Since a dimension function is
nondecreasing, any covering interval may shrink to the hull of the atoms it
covers, so the optimum is over partitions into consecutive runs and a
quadratic DP finds it.

All lengths travel as ln(1/length): tree atoms at depth D can be shorter than
exp(-1000), far below the double range, while their h-costs are moderate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import mpmath as mp
import numpy as np

from .errors import DepthError, DomainError, ParameterError
from .dimension import LogPower
from .geometry import CantorTree

LN2 = math.log(2.0)


# ---------------------------------------------------------------------------
# atom providers
# ---------------------------------------------------------------------------

class FloatAtoms:
    """Plain double-precision atoms (tests, synthetic sets)."""

    def __init__(self, intervals: Sequence[tuple]):
        ivs = sorted((float(a), float(b)) for a, b in intervals)
        if not ivs:
            raise ParameterError("need at least one atom")
        for (a1, b1), (a2, b2) in zip(ivs, ivs[1:]):
            if b1 >= a2:
                raise ParameterError("atoms must be disjoint and sorted")
        if any(a >= b for a, b in ivs):
            raise ParameterError("atoms must have positive length")
        self.lefts = np.array([a for a, _ in ivs])
        self.rights = np.array([b for _, b in ivs])

    @property
    def count(self) -> int:
        return len(self.lefts)

    def ln_inv_span_starts(self, j: int) -> np.ndarray:
        return -np.log(self.rights[j] - self.lefts[:j + 1])

    def clip(self, lo: float, hi: float) -> Optional["FloatAtoms"]:
        keep = [(max(a, lo), min(b, hi))
                for a, b in zip(self.lefts, self.rights) if b > lo and a < hi]
        keep = [(a, b) for a, b in keep if a < b]
        return FloatAtoms(keep) if keep else None


class TreeAtoms:
    """Deepest-level basic intervals of a tree, spans at full precision.

    Pairwise span logs are memoized on the root provider so clipped views of
    the same tree reuse them.
    """

    def __init__(self, tree: CantorTree, level: Optional[int] = None,
                 within: Optional[tuple] = None,
                 _pairs: Optional[tuple] = None, _memo: Optional[dict] = None):
        self.bits = tree.bits
        if _pairs is not None:
            self.lefts, self.rights = _pairs
        else:
            ivs = tree.atoms(level)
            if within is not None:
                j, s = within
                base = tree.interval(j, s)
                ivs = [iv for iv in ivs
                       if base.left <= iv.left and iv.right <= base.right]
            self.lefts = [iv.left for iv in ivs]
            self.rights = [iv.right for iv in ivs]
        self._memo = _memo if _memo is not None else {}

    @property
    def count(self) -> int:
        return len(self.lefts)

    def ln_inv_span_starts(self, j: int) -> np.ndarray:
        out = np.empty(j + 1)
        with mp.workprec(self.bits):
            R = self.rights[j]
            for i in range(j + 1):
                key = (self.lefts[i], R)
                v = self._memo.get(key)
                if v is None:
                    v = float(-mp.log(R - self.lefts[i]))
                    self._memo[key] = v
                out[i] = v
        return out

    def clip(self, lo, hi) -> Optional["TreeAtoms"]:
        with mp.workprec(self.bits):
            lefts, rights = [], []
            for a, b in zip(self.lefts, self.rights):
                if b <= lo or a >= hi:
                    continue
                lefts.append(a if a >= lo else lo)
                rights.append(b if b <= hi else hi)
        if not lefts:
            return None
        view = object.__new__(TreeAtoms)
        view.bits = self.bits
        view.lefts = lefts
        view.rights = rights
        view._memo = self._memo
        return view


def q_rule_constant(Q: float) -> Callable[[int], float]:
    return lambda k: float(Q)


def q_rule_log() -> Callable[[int], float]:
    return lambda k: max(2.0, math.log(k))


@dataclass
class IslandFamily:
    """The isolated-point family: K = {0} + union I_k, I_k = [a_k, b_k].

    b_k = e^-k and |I_k| = b_k^{Q_k} with Q_k >= 2 nondecreasing.  Truncation
    keeps islands k <= k_max plus the residual atom [0, b_{k_max+1}], whose
    one-interval cost equals the exact tail content.
    """

    q_rule: Callable[[int], float]
    k_max: int

    def Q(self, k: int) -> float:
        q = float(self.q_rule(k))
        if q < 2.0:
            raise ParameterError("island exponents need Q_k >= 2")
        return q

    def b(self, k: int) -> float:
        return math.exp(-k)

    def a(self, k: int) -> float:
        return self.b(k) - math.exp(-k * self.Q(k))

    def atoms(self, k_from: int = 1) -> "IslandAtoms":
        return IslandAtoms(self, k_from=k_from, residual=True)

    def island_pair(self, k: int) -> "IslandAtoms":
        return IslandAtoms(self, k_from=k, k_to=k + 1, residual=False)


class IslandAtoms:
    """Atom provider over an island family, spans by closed form.

    Atom order is ascending position: the residual [0, b_{K+1}] first, then
    I_K, ..., I_{k_from}.  Span logs are exact in the exponents (log1p/expm1),
    so islands far below the double range still cost correctly.
    """

    def __init__(self, fam: IslandFamily, k_from: int = 1,
                 k_to: Optional[int] = None, residual: bool = True,
                 left_override: Optional[float] = None,
                 right_override: Optional[float] = None,
                 ks: Optional[list] = None):
        self.fam = fam
        if ks is not None:
            self.ks = ks
        else:
            k_hi = k_to if k_to is not None else fam.k_max
            self.ks = ([fam.k_max + 1] if residual else []) \
                + list(range(k_hi, k_from - 1, -1))
        self.residual = residual and (ks is None)
        self.left_override = left_override    # replaces left of atom 0
        self.right_override = right_override  # replaces right of last atom
        if not self.ks:
            raise ParameterError("empty atom set")

    @property
    def count(self) -> int:
        return len(self.ks)

    def _is_residual(self, i: int) -> bool:
        return self.residual and i == 0

    def left(self, i: int) -> float:
        if i == 0 and self.left_override is not None:
            return self.left_override
        return 0.0 if self._is_residual(i) else self.fam.a(self.ks[i])

    def right(self, i: int) -> float:
        if i == len(self.ks) - 1 and self.right_override is not None:
            return self.right_override
        # the residual atom is [0, b_{ks[0]}] with ks[0] = k_max + 1
        return self.fam.b(self.ks[i])

    def _ln_inv_span(self, i: int, j: int) -> float:
        # ln(1/(right(j) - left(i))), closed form in the exponents
        overridden = (i == 0 and self.left_override is not None) or \
                     (j == len(self.ks) - 1 and self.right_override is not None)
        if overridden:
            span = self.right(j) - self.left(i)
            if span <= 0:
                raise DomainError("clipped span collapsed at double precision")
            return -math.log(span)
        kj = self.ks[j]
        if self._is_residual(i):
            return float(kj)  # span = b_{kj} - 0
        ki = self.ks[i]
        kiq = ki * self.fam.Q(ki)
        if i == j:
            return kiq  # span = |I_ki|
        # span = e^-kj - e^-ki + e^-ki*Qki = e^-kj (1 - e^-(ki-kj) + e^-(kiq-kj))
        rest = -math.exp(-(ki - kj)) + math.exp(-(kiq - kj))
        return kj - math.log1p(rest)

    def ln_inv_span_starts(self, j: int) -> np.ndarray:
        return np.array([self._ln_inv_span(i, j) for i in range(j + 1)])

    def clip(self, lo: float, hi: float) -> Optional["IslandAtoms"]:
        keep, l_ov, r_ov = [], None, None
        for i in range(len(self.ks)):
            a, b = self.left(i), self.right(i)
            if b <= lo or a >= hi:
                continue
            keep.append((i, self.ks[i]))
        if not keep:
            return None
        i0, i1 = keep[0][0], keep[-1][0]
        if self.left(i0) < lo:
            l_ov = lo
        if self.right(i1) > hi:
            r_ov = hi
        view = IslandAtoms(self.fam, residual=False,
                           ks=[k for _, k in keep],
                           left_override=l_ov, right_override=r_ov)
        view.residual = self.residual and keep[0][0] == 0
        return view


# ---------------------------------------------------------------------------
# contents
# ---------------------------------------------------------------------------

@dataclass
class ContentResult:
    value: float
    runs: list  # [(i, j)] covering runs, inclusive atom indices


def content_dp(atoms, h) -> ContentResult:
    """Exact optimal covering cost of the atoms under h, with the covering.

    cost(j) = min_{i <= j} cost(i-1) + h(right_j - left_i): any covering
    interval shrinks onto the hull of the atoms it covers (h nondecreasing),
    so consecutive-run partitions exhaust the optima.
    """
    m = atoms.count
    cost = np.zeros(m + 1)
    back = np.zeros(m, dtype=int)
    for j in range(m):
        vals = cost[:j + 1] + h.h_ln(atoms.ln_inv_span_starts(j))
        i = int(np.argmin(vals))
        cost[j + 1] = float(vals[i])
        back[j] = i
    runs = []
    j = m - 1
    while j >= 0:
        i = int(back[j])
        runs.append((i, j))
        j = i - 1
    runs.reverse()
    return ContentResult(value=float(cost[m]), runs=runs)


def content_exhaustive(atoms, h) -> float:
    """Brute-force optimum over all run partitions (oracle, <= ~16 atoms)."""
    m = atoms.count
    if m > 16:
        raise ParameterError("exhaustive oracle limited to 16 atoms")
    spans = [h.h_ln(atoms.ln_inv_span_starts(j)) for j in range(m)]
    best = math.inf
    for mask in range(1 << (m - 1)):
        total, start = 0.0, 0
        for j in range(m):
            if j == m - 1 or (mask >> j) & 1:
                total += float(spans[j][start])
                start = j + 1
        best = min(best, total)
    return best


# ---------------------------------------------------------------------------
# level sums
# ---------------------------------------------------------------------------

@dataclass
class LevelSum:
    level: int
    value: float
    lower: float   # 1, by h(delta_k) = 2^-k and l > delta_k
    upper: float   # 2^k h(C0 delta_k)


def lambda_level_estimate(tree: CantorTree, h, k: int) -> LevelSum:
    """sum_j h(l_{j,k}) with its bracketing constants."""
    if k > tree.depth:
        raise DepthError(f"level {k} beyond tree depth {tree.depth}")
    if k == 0:
        # single interval of length 1: boundary case reported raw
        return LevelSum(level=0, value=1.0, lower=1.0, upper=1.0)
    vals = np.array([-iv.ln_length.ln_mag for iv in tree.levels[k]])
    total = float(np.sum(h.h_ln(vals)))
    L_k = float(tree.profile.ln_inv_delta(k))
    upper = 2.0 ** k * h.h_ln(L_k - math.log(tree.model.c0))
    return LevelSum(level=k, value=total, lower=1.0, upper=float(upper))


# ---------------------------------------------------------------------------
# densities
# ---------------------------------------------------------------------------

@dataclass
class DensityRow:
    ln_inv_r: float
    x_label: str
    phi: float


@dataclass
class DensityPoint:
    ln_inv_r: float
    inf_phi: float
    ratio: float     # inf_phi / h(2r)


@dataclass
class DensityTable:
    """Ratios phi(r)/h(2r) over the radius grid, r decreasing along per_r.

    ``liminf_estimate`` is the running minimum restricted to the deepest half
    of the radii: a liminf concerns r -> 0 only, so ratios at the shallow end
    of the grid (where clamped prefixes distort the geometry) must not pin the
    estimate.  It remains exactly that, an estimate at the horizon.
    """

    rows: list            # DensityRow (optionally thinned)
    per_r: list           # DensityPoint, r decreasing
    liminf_estimate: float
    analytic_limit: Optional[float] = None

    def running_min(self) -> list:
        out, cur = [], math.inf
        for p in self.per_r:
            cur = min(cur, p.ratio)
            out.append(cur)
        return out


def _scan(clipper, h, r_items, x_items, analytic_limit, keep_rows) -> DensityTable:
    rows, per_r = [], []
    for ln_inv_r, r_native in r_items:
        phis = []
        for label, x in x_items:
            atoms = clipper(x, r_native)
            if atoms is None:
                continue
            phi = content_dp(atoms, h).value
            phis.append(phi)
            if keep_rows:
                rows.append(DensityRow(ln_inv_r=ln_inv_r, x_label=label, phi=phi))
        if not phis:
            continue
        inf_phi = min(phis)
        ratio = inf_phi / h.h_ln(ln_inv_r - LN2)
        per_r.append(DensityPoint(ln_inv_r=ln_inv_r, inf_phi=inf_phi, ratio=ratio))
    per_r.sort(key=lambda p: p.ln_inv_r)  # r decreasing = ln(1/r) increasing
    tail = per_r[len(per_r) // 2:]
    liminf = min((p.ratio for p in tail), default=math.nan)
    return DensityTable(rows=rows, per_r=per_r, liminf_estimate=liminf,
                        analytic_limit=analytic_limit)


def density_scan_tree(tree: CantorTree, h, k_range: Sequence[int],
                      analytic_limit: Optional[float] = None,
                      keep_rows: bool = False) -> DensityTable:
    """Density table of a Cantor-type set at the extremal radii.

    Radii r_k = (7/8) delta_{k-1} cover exactly one level-k basic interval
    around any x in the set and stop inside the adjacent gaps; x runs over the
    deepest-level atom endpoints.
    """
    atoms = TreeAtoms(tree)
    with mp.workprec(tree.bits):
        r_items = []
        for k in k_range:
            if not 1 <= k <= tree.depth:
                raise DepthError(f"k={k} outside tree depth")
            r = mp.mpf(7) / 8 * tree.delta_mpf(k - 1)
            r_items.append((float(-mp.log(r)), r))
        x_items = [(f"atom{i}", a) for i, a in enumerate(atoms.lefts)]

        def clipper(x, r):
            return atoms.clip(x - r, x + r)

        return _scan(clipper, h, r_items, x_items, analytic_limit, keep_rows)


def density_scan_islands(fam: IslandFamily, h, k_list: Sequence[int],
                         analytic_limit: Optional[float] = None,
                         keep_rows: bool = False) -> DensityTable:
    """Density table of the island family at radii r_k = b_k - b_{k+1}."""
    atoms = fam.atoms()
    r_items = []
    for k in k_list:
        if not 1 <= k < fam.k_max:
            raise DomainError(f"k={k} outside island horizon")
        r = fam.b(k) - fam.b(k + 1)
        r_items.append((-math.log(r), r))
    xs = [("origin", 0.0)]
    for k in range(1, fam.k_max + 1):
        xs.append((f"a{k}", fam.a(k)))
        xs.append((f"b{k}", fam.b(k)))

    def clipper(x, r):
        return atoms.clip(x - r, x + r)

    return _scan(clipper, h, r_items, xs, analytic_limit, keep_rows)


# ---------------------------------------------------------------------------
# the k-th-root extension test and order comparison
# ---------------------------------------------------------------------------

@dataclass
class RootTest:
    k_values: list
    a_values: list
    horizon_value: float
    analytic_limit: float
    verdict: str      # "yes" / "no"
    rule: str


def ep_root_test(h: LogPower, k_values: Sequence[int]) -> RootTest:
    """a_k = (ln 1/h^{-1}(2^-k))^{1/k} and the induced-set verdict.

    The verdict comes from the closed form of the family (the limit equals
    2^{1/alpha0}); a_k itself converges only at triple-log speed for the
    corrected exponents, so the horizon value is a diagnostic, not a decision.
    """
    a_vals = []
    for k in k_values:
        w = h.inverse_lnln(k * LN2)
        a_vals.append(math.exp(w / k))
    return RootTest(k_values=list(k_values), a_values=a_vals,
                    horizon_value=a_vals[-1], analytic_limit=h.root_limit,
                    verdict=h.ep_case,
                    rule=f"limit of a_k is 2^(1/alpha0) = {h.root_limit:.6g}; "
                         "extension operator exists iff that limit is 2")


@dataclass
class OrderReport:
    lnt_grid: list
    eta_diff: list       # eta1 - eta2
    classification: str  # "h1 << h2" | "h2 << h1" | "equivalent" | "incomparable-at-horizon"

    @property
    def verdict(self) -> str:
        return self.classification


def compare_dimension_functions(h1, h2, lnt_grid: Sequence[float]) -> OrderReport:
    """Order h1 vs h2 from eta traces on the grid.

    h1 << h2 means h1 = o(h2), i.e. eta1 - eta2 -> +infinity.  Finite data
    only supports a trend call, so bounded oscillation classifies as
    equivalent and everything unclear as incomparable-at-horizon.
    """
    grid = sorted(float(v) for v in lnt_grid)
    d = [float(h1.eta_ln(v) - h2.eta_ln(v)) for v in grid]
    third = max(1, len(d) // 3)
    early = sum(d[:third]) / third
    late = sum(d[-third:]) / third
    trend = late - early
    spread = max(d) - min(d)
    if abs(trend) <= 0.75 and spread <= 4.0:
        cls = "equivalent"
    elif trend > 1.5:
        cls = "h1 << h2"
    elif trend < -1.5:
        cls = "h2 << h1"
    else:
        cls = "incomparable-at-horizon"
    return OrderReport(lnt_grid=grid, eta_diff=d, classification=cls)


def check_two_scale_gap(h, prof, C: float, k_range: Sequence[int]) -> bool:
    """h(C delta_k) < 2 h(delta_{k+1}) over the range (one-interval optimality)."""
    for k in k_range:
        L_k = float(prof.ln_inv_delta(k))
        L_k1 = float(prof.ln_inv_delta(k + 1))
        if not h.h_ln(L_k - math.log(C)) < 2.0 * h.h_ln(L_k1):
            return False
    return True
