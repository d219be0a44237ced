"""Cantor-type set geometry: basic intervals, endpoints, nodes.

The set is the nested intersection of E_s = {x : P_{2^{s+1}}(x) <= 0} where
P_2(x) = x(x-1) and P_{2^{s+1}} = P_{2^s}(P_{2^s} + r_s).  Each level-s basic
interval I_{j,s} carries P_{2^s} monotonically from 0 (at the endpoint shared
with its parent) to -r_s (at the endpoint created at level s), so every
endpoint is the exact preimage of a chain of quadratic equations

    v_{i}^2 + r_i v_i = v_{i+1},        v_s = -r_s,

solved downward with the cancellation-free root formula; the branch at each
step is determined by the interval's binary address.  This is exact algebra
(no iteration), so endpoints carry the full working precision minus a few ulps
per level.

Geometry facts verified here: delta_s < l_{j,s} < C0 delta_s for the lengths,
and the central gap h_{j,s} > (1 - 4 gamma_{s+1}) l_{j,s} >= (7/8) l_{j,s}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import mpmath as mp

from .errors import BracketError, DepthError, PrecisionError
from .gamma import GammaModel, profile
from .logreal import LogReal

LEFT, RIGHT = 0, 1

#: extra mantissa bits beyond log2(1/delta_D) kept as length headroom
GUARD_BITS = 96


def required_bits(model: GammaModel, depth: int) -> int:
    """Mantissa bits needed to resolve level-``depth`` lengths."""
    if depth == 0:
        return GUARD_BITS
    ln_inv_delta = sum(model.ln_inv_gamma[:depth], Fraction(0))
    try:
        bits = float(ln_inv_delta) / math.log(2.0)
    except OverflowError:
        return 1 << 62
    return int(bits) + GUARD_BITS


def max_depth_for_bits(model: GammaModel, bits: int, cap: int = 10) -> int:
    d = 0
    while d < min(cap, model.k_max) and required_bits(model, d + 1) <= bits:
        d += 1
    return d


@dataclass
class BasicInterval:
    """One basic interval, endpoints at tree precision.

    ``addr`` is the left/right path from the root; ``left_type``/``right_type``
    are the levels at which the endpoints were created (their point types).
    """

    level: int
    index: int              # 1-based within the level
    left: mp.mpf
    right: mp.mpf
    addr: tuple
    left_type: int
    right_type: int
    ln_length: LogReal = None
    gap_to_sibling: LogReal = None  # distance to the sibling sharing the parent
    central_gap: LogReal = None     # gap between this interval's two children


@dataclass
class Node:
    x: mp.mpf
    type: int


@dataclass
class NodeSet:
    """Interpolation nodes on a basic interval, ordered by increasing type.

    The first 2^n entries (for any 2^n <= N) are exactly the zeros of
    P_{2^{s+n}} inside the interval; the remaining entries have type s+n.
    """

    interval: tuple  # (j, s)
    nodes: list      # of Node

    def points(self) -> list:
        return [n.x for n in self.nodes]


class CantorTree:
    """Depth-D tree of basic intervals for a gamma model."""

    def __init__(self, model: GammaModel, depth: int, bits: int,
                 levels: list, r_mpf: list):
        self.model = model
        self.profile = profile(model)
        self.depth = depth
        self.bits = bits
        self.levels = levels          # levels[s][j-1] -> BasicInterval
        self.r_mpf = r_mpf            # r_0..r_depth at tree precision
        acc = Fraction(0)
        self._ln_inv_delta = [acc]    # exact ln(1/delta_k), k = 0..depth
        for k in range(1, depth + 1):
            acc += model.ln_inv_gamma[k - 1]
            self._ln_inv_delta.append(acc)

    def interval(self, j: int, s: int) -> BasicInterval:
        if not (0 <= s <= self.depth):
            raise DepthError(f"level {s} outside built depth {self.depth}")
        if not (1 <= j <= 2 ** s):
            raise DepthError(f"index {j} invalid at level {s}")
        return self.levels[s][j - 1]

    def children(self, iv: BasicInterval) -> tuple:
        if iv.level >= self.depth:
            raise DepthError(f"no children below level {self.depth}")
        below = self.levels[iv.level + 1]
        return below[2 * iv.index - 2], below[2 * iv.index - 1]

    def atoms(self, level: Optional[int] = None) -> list:
        """The basic intervals of the given (default deepest) level."""
        return list(self.levels[self.depth if level is None else level])

    def endpoints(self, level: int) -> list:
        """All endpoints at the given level, ascending (the Y_level point set)."""
        out = []
        for iv in self.levels[level]:
            out.append((iv.left, iv.left_type))
            out.append((iv.right, iv.right_type))
        return out

    def delta_mpf(self, k: int) -> mp.mpf:
        """delta_k at full tree precision (exact dyadic log, rounded once)."""
        if k > self.depth:
            fr = sum(self.model.ln_inv_gamma[self.depth:k],
                     self._ln_inv_delta[self.depth])
        else:
            fr = self._ln_inv_delta[k]
        with mp.workprec(self.bits):
            return mp.exp(-mp.mpf(fr.numerator) / fr.denominator)

    def gamma_sum(self) -> float:
        return self.model.gamma_sum

    def c0(self) -> float:
        return self.model.c0


def _gamma_mpf(model: GammaModel, k: int) -> mp.mpf:
    fr = model.ln_inv_gamma[k - 1]
    return mp.exp(-mp.mpf(fr.numerator) / fr.denominator)


def _point_from_address(addr: Sequence[int], r: list) -> mp.mpf:
    """The type-s point whose level-s interval has the given address.

    Solves P_{2^s}(x) = -r_s by inverting the quadratic chain with the
    cancellation-free root at each level; the branch is "outer" exactly when
    the address repeats its previous bit.
    """
    s = len(addr)
    v = -r[s]
    for i in range(s - 1, 0, -1):
        disc_sq = r[i] * r[i] / 4 + v
        if disc_sq < 0:
            raise BracketError(
                f"negative discriminant at level {i}: invalid gamma sequence")
        disc = mp.sqrt(disc_sq)
        if addr[i] == addr[i - 1]:       # outer side of the parent
            v = v / (r[i] / 2 + disc)
        else:
            v = -r[i] / 2 - disc
    disc_sq = mp.mpf(1) / 4 + v
    if disc_sq < 0:
        raise BracketError("negative discriminant at the root level")
    disc = mp.sqrt(disc_sq)
    if addr[0] == LEFT:
        return -v / (mp.mpf(1) / 2 + disc)
    return mp.mpf(1) / 2 + disc


def eval_P(s: int, x, model: GammaModel, bits: int = 256,
           r_mpf: Optional[list] = None, strict: bool = False):
    """P_{2^s}(x) by the quadratic recursion (s >= 1), at ``bits`` precision.

    With ``strict=True`` a PrecisionError is raised when an intermediate sum
    v + r_i cancels below the mantissa budget, i.e. when the RELATIVE accuracy
    of the value is gone.  The default tolerates that: residual measurements at
    endpoints evaluate exactly there, where the tiny result is the point.
    """
    if s < 1:
        raise ValueError("levels start at P_2 (s = 1)")
    with mp.workprec(bits):
        if r_mpf is None:
            r_mpf = [mp.mpf(1)]
            for k in range(1, s):
                r_mpf.append(_gamma_mpf(model, k) * r_mpf[k - 1] ** 2)
        x = mp.mpf(x) if not isinstance(x, mp.mpf) else x
        v = x * (x - 1)
        for i in range(1, s):
            w = v + r_mpf[i]
            if strict and v != 0 and w != 0 \
                    and abs(w) < abs(v) * mp.mpf(2) ** (-bits + 8):
                raise PrecisionError(
                    f"cancellation at level {i} exceeds the {bits}-bit budget")
            v = v * w
        return v


def build_tree(model: GammaModel, depth: Optional[int] = None,
               bits: int = 512) -> CantorTree:
    """Materialize the basic-interval tree to the requested depth.

    ``depth=None`` picks the largest depth (up to 10) whose level lengths are
    resolvable at ``bits``; an explicit depth beyond that budget raises
    DepthError.
    """
    if depth is None:
        depth = max_depth_for_bits(model, bits)
    if depth > model.k_max:
        raise DepthError(f"depth {depth} exceeds model horizon {model.k_max}")
    need = required_bits(model, depth)
    if need > bits:
        raise DepthError(
            f"depth {depth} needs ~{need} mantissa bits, have {bits}")
    with mp.workprec(bits):
        r = [mp.mpf(1)]
        for k in range(1, depth + 1):
            r.append(_gamma_mpf(model, k) * r[k - 1] ** 2)
        root = BasicInterval(level=0, index=1, left=mp.mpf(0), right=mp.mpf(1),
                             addr=(), left_type=0, right_type=0)
        levels = [[root]]
        for s in range(1, depth + 1):
            cur = []
            for iv in levels[s - 1]:
                c = _point_from_address(iv.addr + (LEFT,), r)
                d = _point_from_address(iv.addr + (RIGHT,), r)
                if not (iv.left < c < d < iv.right):
                    raise PrecisionError(
                        f"level-{s} points out of order inside I_{iv.index},{s - 1}; "
                        "raise the mantissa budget")
                gap = LogReal.from_mpf(d - c)
                cur.append(BasicInterval(
                    level=s, index=2 * iv.index - 1, left=iv.left, right=c,
                    addr=iv.addr + (LEFT,), left_type=iv.left_type, right_type=s,
                    gap_to_sibling=gap))
                cur.append(BasicInterval(
                    level=s, index=2 * iv.index, left=d, right=iv.right,
                    addr=iv.addr + (RIGHT,), left_type=s, right_type=iv.right_type,
                    gap_to_sibling=gap))
                iv.central_gap = gap
            levels.append(cur)
        for lvl in levels:
            for iv in lvl:
                iv.ln_length = LogReal.from_mpf(iv.right - iv.left)
    tree = CantorTree(model=model, depth=depth, bits=bits, levels=levels,
                      r_mpf=r)
    # the nesting/length/gap invariants are checked at build time and the
    # report travels with the tree; admissibility exceptions (delta-form
    # prefixes) legitimately fail some levels, so no exception is raised here
    tree.geometry = verify_geometry(tree)
    return tree


def select_nodes(tree: CantorTree, interval: tuple, N: int) -> NodeSet:
    """N interpolation nodes on I_{j,s}, ordered by increasing type.

    Start from the interval's endpoints (older endpoint first); each pass
    appends, for every existing point in order, the opposite endpoint of the
    point's current-level basic subinterval.  Truncating to any shorter N is a
    prefix of the same sequence.
    """
    j, s = interval
    iv = tree.interval(j, s)
    if N < 1:
        raise ValueError("need at least one node")
    if iv.left_type <= iv.right_type:
        pts = [Node(iv.left, iv.left_type), Node(iv.right, iv.right_type)]
    else:
        pts = [Node(iv.right, iv.right_type), Node(iv.left, iv.left_type)]
    containers = [iv, iv]
    if N <= 2:
        return NodeSet(interval=interval, nodes=pts[:N])
    level = s
    while len(pts) < N:
        level += 1
        if level > tree.depth:
            raise DepthError(
                f"{N} nodes on I_{j},{s} need point types up to {level}, "
                f"tree depth is {tree.depth}")
        count = len(pts)
        for i in range(count):
            child_l, child_r = tree.children(containers[i])
            if pts[i].x == child_l.left:
                child, partner, ptype = child_l, child_l.right, level
            else:
                child, partner, ptype = child_r, child_r.left, level
            containers[i] = child
            if len(pts) < N:
                pts.append(Node(partner, ptype))
                containers.append(child)
            elif i >= count - 1:
                break
    return NodeSet(interval=interval, nodes=pts)


@dataclass
class LevelGeometry:
    level: int
    min_ln_l_over_delta: float
    max_ln_l_over_delta: float
    min_gap_over_len: float          # min over parents of h/l
    sharp_gap_bound: float           # 1 - 4 gamma_{s+1} (for the parents)
    length_bounds_ok: bool           # delta_s < l < C0 delta_s
    gap_bound_ok: bool               # h >= (7/8) l
    sharp_gap_ok: bool               # h > (1 - 4 gamma_{s+1}) l


@dataclass
class GeometryReport:
    levels: list
    all_ok: bool


def verify_geometry(tree: CantorTree) -> GeometryReport:
    """Check the two-sided length bounds and the gap bounds, per level.

    The strict inequalities have margins as small as gamma_{s+1} (doubly
    exponential in s), so the pass/fail flags are decided at full tree
    precision; the reported ratio statistics are double-grade.
    """
    out = []
    ln_c0 = 16.0 * tree.model.gamma_sum
    with mp.workprec(tree.bits):
        for s in range(1, tree.depth + 1):
            delta = tree.delta_mpf(s)
            lo_m, hi_m = mp.inf, -mp.inf
            for iv in tree.levels[s]:
                ln_ratio = mp.log((iv.right - iv.left) / delta)
                lo_m = min(lo_m, ln_ratio)
                hi_m = max(hi_m, ln_ratio)
            parents = tree.levels[s - 1]
            g_m = mp.inf
            for iv in parents:
                cl, cr = tree.children(iv)
                g_m = min(g_m, (cr.left - cl.right) / (iv.right - iv.left))
            fr = tree.model.ln_inv_gamma[s - 1]
            gamma_s = mp.exp(-mp.mpf(fr.numerator) / fr.denominator)
            sharp = 1 - 4 * gamma_s
            out.append(LevelGeometry(
                level=s,
                min_ln_l_over_delta=float(lo_m), max_ln_l_over_delta=float(hi_m),
                min_gap_over_len=float(g_m), sharp_gap_bound=float(sharp),
                length_bounds_ok=bool(lo_m > 0) and bool(hi_m < ln_c0),
                gap_bound_ok=bool(g_m >= mp.mpf(7) / 8),
                sharp_gap_ok=bool(g_m > sharp)))
    return GeometryReport(levels=out, all_ok=all(
        l.length_bounds_ok and l.gap_bound_ok and l.sharp_gap_ok for l in out))


def endpoint_residuals(tree: CantorTree) -> list:
    """max_j |P_{2^{s+1}}(endpoint)| / r_s^2 per level s (both endpoints).

    All endpoints of level-s intervals are zeros of P_{2^{s+1}}; the residual
    is normalized by r_s^2, the natural scale of P_{2^{s+1}} on E_s.
    """
    out = []
    with mp.workprec(tree.bits):
        for s in range(1, tree.depth + 1):
            rs = tree.r_mpf[s]
            worst = mp.mpf(0)
            seen = set()
            for iv in tree.levels[s]:
                for x in (iv.left, iv.right):
                    key = id(x)
                    if key in seen:
                        continue
                    seen.add(key)
                    res = abs(eval_P(s + 1, x, tree.model, bits=tree.bits,
                                     r_mpf=tree.r_mpf))
                    worst = max(worst, res / (rs * rs))
            out.append((s, float(mp.log(worst, 2)) if worst > 0 else -mp.inf))
    return out


def refine_endpoint_bisection(tree: CantorTree, iv: BasicInterval,
                              n_iter: int = 0) -> tuple:
    """Re-derive the inner endpoint of ``iv`` by plain sign bisection.

    Independent cross-check for the algebraic chain: bisects
    P_{2^s}(x) + r_s = 0 between the parent's outer endpoint (value +r_s) and
    the middle of the central gap (value < 0), driven purely by signs of the
    forward evaluation.  Returns (value, |difference to the stored endpoint|).
    """
    s = iv.level
    if s < 1:
        raise ValueError("the root has no inner endpoint")
    with mp.workprec(tree.bits):
        parent = tree.interval((iv.index + 1) // 2, s - 1)
        child_l, child_r = tree.children(parent)
        gap_mid = (child_l.right + child_r.left) / 2

        def f(x):
            return eval_P(s, x, tree.model, bits=tree.bits,
                          r_mpf=tree.r_mpf) + tree.r_mpf[s]

        if iv.addr[-1] == LEFT:
            a, b, inner = parent.left, gap_mid, iv.right
        else:
            a, b, inner = gap_mid, parent.right, iv.left
        fa = f(a)
        n_iter = n_iter or tree.bits // 2 + s * 8
        for _ in range(n_iter):
            mid = (a + b) / 2
            if mid == a or mid == b:
                break
            fm = f(mid)
            if fm == 0:
                a = b = mid
                break
            if (fm > 0) == (fa > 0):
                a, fa = mid, fm
            else:
                b = mid
        x = (a + b) / 2
        return x, abs(x - inner)
