"""Smooth cutoff functions around unions of closed intervals.

u(., t, E) is 1 on E, 0 wherever dist(x, E) > t, with |u^(p)| <= c_p t^-p.
E arrives as disjoint atoms; atoms whose gaps are <= t/3 merge into plateau
components, and each component gets C-infinity shoulders built from the
classic exp(-1/y) step, rising over [lo - 2t/3, lo - t/3] and falling
symmetrically.  The cutoff is assembled as u = 1 - prod_c (1 - bump_c), which
stays in [0, 1] when shoulder zones of nearby components overlap.

The shoulder constants c_p are not canonical; they are measured on a fine grid
per cutoff (normalized by t, so they depend only on the component layout) and
are used by the derivative-bound checks, nothing else.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence

import mpmath as mp
import numpy as np

P_MAX = 3


@lru_cache(maxsize=None)
def _step_derivative_funcs():
    """Analytic formulas for the smooth step and its first three derivatives."""
    import sympy as sp

    y = sp.Symbol("y", positive=True)
    g = sp.exp(-1 / y)
    g1 = sp.exp(-1 / (1 - y))
    S = g / (g + g1)
    exprs = [S]
    for _ in range(P_MAX):
        exprs.append(sp.diff(exprs[-1], y))
    simple = [sp.simplify(e) for e in exprs]
    f_float = [sp.lambdify(y, e, modules="math") for e in simple]
    f_mpf = [sp.lambdify(y, e, modules="mpmath") for e in simple]
    return f_float, f_mpf


def step_series(y: float, order: int = P_MAX) -> tuple:
    """Taylor coefficients (f, f', f''/2!, f'''/3!) of the step at y (floats).

    Evaluated through mpmath: the analytic formulas hold exp(+1/y)-sized
    factors that cancel, which overflows plain float evaluation near the
    edges even though the results are tiny there.
    """
    if y <= 1e-9:
        return (0.0,) + (0.0,) * order
    if y >= 1 - 1e-9:
        return (1.0,) + (0.0,) * order
    funcs = _step_derivative_funcs()[1]
    out = []
    fact = 1.0
    with mp.workprec(120):
        ym = mp.mpf(y)
        for p in range(order + 1):
            if p:
                fact *= p
            out.append(float(funcs[p](ym)) / fact)
    return tuple(out)


def step_value_mpf(y):
    """The smooth step at mpf precision."""
    if y <= 0:
        return mp.mpf(0)
    if y >= 1:
        return mp.mpf(1)
    g = mp.exp(-1 / y)
    g1 = mp.exp(-1 / (1 - y))
    return g / (g + g1)


def _series_mul(a: tuple, b: tuple) -> tuple:
    order = len(a) - 1
    return tuple(sum(a[i] * b[k - i] for i in range(k + 1))
                 for k in range(order + 1))


@dataclass
class BumpSpec:
    """A built cutoff: merged components plus the scale t.

    Positions may be mpf (tree atoms) or floats; ``bits`` sets the working
    precision for mpf evaluation.
    """

    t: object                  # mpf or float
    components: list           # [(lo, hi)] merged plateaus
    bits: int = 53
    _cp: Optional[tuple] = None

    @property
    def margin(self):
        return self.t / 3

    def value(self, x):
        """u(x) as an mpf at the cutoff's working precision."""
        with mp.workprec(self.bits):
            m = mp.mpf(self.t) / 3
            prod = None
            for lo, hi in self.components:
                if lo <= x <= hi:
                    return mp.mpf(1)
                if x <= lo - 2 * m or x >= hi + 2 * m:
                    continue
                rise = step_value_mpf((x - (lo - 2 * m)) / m)
                fall = step_value_mpf(((hi + 2 * m) - x) / m)
                prod = (1 - rise * fall) if prod is None \
                    else prod * (1 - rise * fall)
            if prod is None:
                return mp.mpf(0)
            return 1 - prod

    def support_hit(self, x) -> bool:
        """Whether u(x) can be nonzero (x within the shoulder zones)."""
        for lo, hi in self.components:
            if lo - self.t < x < hi + self.t:
                return True
        return False

    def series(self, x: float, order: int = P_MAX) -> tuple:
        """Taylor coefficients of u at x, float precision (for p <= 3 checks)."""
        m = float(self.t) / 3.0
        prod = (1.0,) + (0.0,) * order
        any_active = False
        for lo, hi in self.components:
            lo, hi = float(lo), float(hi)
            if x <= lo - 2 * m or x >= hi + 2 * m:
                continue
            any_active = True
            rise = step_series((x - (lo - 2 * m)) / m, order)
            fall = step_series(((hi + 2 * m) - x) / m, order)
            # chain rule for the linear arguments: d/dx = (1/m) d/dy, -(1/m) d/dy
            rise = tuple(c / m ** i for i, c in enumerate(rise))
            fall = tuple(c * (-1 / m) ** i for i, c in enumerate(fall))
            b = _series_mul(rise, fall)
            one_minus = tuple((1.0 if i == 0 else 0.0) - c for i, c in enumerate(b))
            prod = _series_mul(prod, one_minus)
        if not any_active:
            return (0.0,) + (0.0,) * order
        return tuple((1.0 if i == 0 else 0.0) - c for i, c in enumerate(prod))

    def derivative(self, x: float, p: int) -> float:
        coeffs = self.series(x, max(p, 1))
        return coeffs[p] * math.factorial(p)

    @property
    def c_p_table(self) -> tuple:
        """Empirical sup |u^(p)| t^p for p = 0..3, clamped monotone in p."""
        if self._cp is None:
            t = float(self.t)
            xs = []
            m = t / 3.0
            for lo, hi in self.components:
                lo, hi = float(lo), float(hi)
                xs.append(np.linspace(lo - 2 * m, lo - m, 400))
                xs.append(np.linspace(hi + m, hi + 2 * m, 400))
            grid = np.concatenate(xs)
            sup = [0.0] * (P_MAX + 1)
            for x in grid:
                ser = self.series(float(x))
                fact = 1.0
                for p in range(P_MAX + 1):
                    if p:
                        fact *= p
                    sup[p] = max(sup[p], abs(ser[p] * fact) * t ** p)
            cp = []
            cur = 1.0
            for p in range(P_MAX + 1):
                cur = max(cur, sup[p])
                cp.append(cur)
            self._cp = tuple(cp)
        return self._cp


def merge_atoms(atom_bounds: Sequence[tuple], t, bits: int = 53) -> list:
    """Merge sorted disjoint atoms whose gaps are <= t/3."""
    with mp.workprec(bits):
        margin = t / mp.mpf(3) if bits > 53 else t / 3.0
        comps = []
        for lo, hi in atom_bounds:
            if comps and lo - comps[-1][1] <= margin:
                comps[-1] = (comps[-1][0], hi)
            else:
                comps.append((lo, hi))
    return comps


def bump_for_interval(tree, j: int, s: int, t) -> BumpSpec:
    """Cutoff around I_{j,s} intersected with the set, at tree resolution."""
    base = tree.interval(j, s)
    atoms = [(iv.left, iv.right) for iv in tree.atoms()
             if base.left <= iv.left and iv.right <= base.right]
    comps = merge_atoms(atoms, t, bits=tree.bits)
    return BumpSpec(t=t, components=comps, bits=tree.bits)


def bump_for_set(tree, t) -> BumpSpec:
    """Cutoff around the whole set at tree resolution."""
    atoms = [(iv.left, iv.right) for iv in tree.atoms()]
    comps = merge_atoms(atoms, t, bits=tree.bits)
    return BumpSpec(t=t, components=comps, bits=tree.bits)
