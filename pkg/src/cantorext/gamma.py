"""Gamma-sequence families and their derived profiles.

A model is a sequence gamma = (gamma_k)_{k>=1} with 0 < gamma_k < 1/4.  It
drives the quadratic recursion r_0 = 1, r_s = gamma_s r_{s-1}^2 whose level
sets produce a Cantor-type set; the derived quantities are

    delta_s = gamma_1 * ... * gamma_s          (length scale of level s)
    B_k     = 2^{-k-1} * ln(1/delta_k)         (potential-theoretic weights)
    beta_k  = ln(B_k) / k                      (growth exponents)

The Robin constant of the set is sum_k B_k; the set is non-polar exactly when
that series converges.  Admissibility asks gamma_k <= 1/32 with a summable
tail; closed-form families whose formula exceeds 1/32 on a prefix get that
prefix clamped to exactly 1/32.

The extension-property classifier encodes the closed-form criterion for each
family: a weight sequence B_k that is monotone convergent, or divergent of
subexponential growth (beta_k -> 0), admits the extension operator; regular
sequences with beta_k -> beta > 0 and the irregular dip families do not.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

from scipy.special import polygamma, zeta

from .errors import HorizonError, ParameterError, ValidationError
from .logreal import ONE, LogReal, log_mul_pow

LN32 = math.log(32.0)

POWER_LAW = "power_law"
EXPONENTIAL = "exponential"
DOUBLY_EXP = "doubly_exp"
EXAMPLE1 = "example1"
EXAMPLE2 = "example2"
EXAMPLE3 = "example3"
DELTA_FORM = "delta_form"
FROM_DIMENSION_FUNCTION = "from_dimension_function"
CUSTOM = "custom"

FAMILIES = (POWER_LAW, EXPONENTIAL, DOUBLY_EXP, EXAMPLE1, EXAMPLE2, EXAMPLE3,
            DELTA_FORM, FROM_DIMENSION_FUNCTION, CUSTOM)

POLAR = "polar"
NONPOLAR = "nonpolar"
UNDETERMINED = "undetermined-at-horizon"


def _lr_from_ln_fraction(ln_value: Fraction, sign: int = 1) -> LogReal:
    """LogReal with exactly rational ln magnitude."""
    q = math.floor(ln_value)
    return LogReal.from_parts(sign, q, float(ln_value - q))


@dataclass(frozen=True)
class GammaModel:
    """A validated gamma sequence up to horizon ``k_max``.

    ``ln_inv_gamma[k-1]`` is ln(1/gamma_k) as an exact dyadic Fraction, so
    delta products stay exact in the log domain.  ``clamp_prefix`` is the
    number of leading indices overridden to gamma_k = 1/32; ``eq2_exceptions``
    lists indices deliberately left above 1/32 (only the delta-form family
    does this, to keep its B_k closed form exact).
    """

    family: str
    params: dict
    k_max: int
    ln_inv_gamma: tuple  # of Fraction
    clamp_prefix: int = 0
    eq2_exceptions: tuple = ()
    gamma_sum: float = 0.0  # sum_{k=1}^inf gamma_k (analytic tail included)
    gamma_sum_exact: bool = True
    meta: dict = field(default_factory=dict)

    def gamma(self, k: int) -> LogReal:
        """gamma_k as a log-domain scalar (k is 1-based)."""
        self._check_k(k)
        return _lr_from_ln_fraction(-self.ln_inv_gamma[k - 1])

    def ln_inv_gamma_float(self, k: int) -> float:
        self._check_k(k)
        return float(self.ln_inv_gamma[k - 1])

    def gamma_float(self, k: int) -> float:
        self._check_k(k)
        v = self.ln_inv_gamma[k - 1]
        return math.exp(-float(v)) if v < 700 else 0.0

    def _check_k(self, k: int):
        if not 1 <= k <= self.k_max:
            raise HorizonError(f"k={k} outside horizon 1..{self.k_max}")

    @property
    def c0(self) -> float:
        """The length-comparison constant exp(16 * sum gamma_k)."""
        return math.exp(16.0 * self.gamma_sum)

    def describe(self) -> dict:
        return {
            "family": self.family,
            "params": {k: v for k, v in self.params.items() if not callable(v)},
            "k_max": self.k_max,
            "clamp_prefix": self.clamp_prefix,
            "eq2_exceptions": list(self.eq2_exceptions),
            "gamma_sum": self.gamma_sum,
            "c0": self.c0,
        }


def _clamp_and_validate(family: str, params: dict, k_max: int,
                        ln_inv: list, gamma_sum_tail: Callable[[int], float],
                        allow_eq2_exceptions: bool = False,
                        meta: Optional[dict] = None) -> GammaModel:
    """Apply the 1/32 prefix clamp and check admissibility.

    ``ln_inv[k-1]`` = ln(1/gamma_k) as Fraction from the family formula.
    ``gamma_sum_tail(p)`` = analytic sum_{k>p} gamma_k of the unclamped formula.
    """
    ln32 = Fraction(LN32)
    violations = [k for k in range(1, k_max + 1) if ln_inv[k - 1] < ln32]
    exceptions: tuple = ()
    prefix = 0
    if violations:
        if allow_eq2_exceptions:
            # keep the formula, record indices exceeding 1/32
            for k in violations:
                if ln_inv[k - 1] <= 0 or float(ln_inv[k - 1]) < math.log(4.0):
                    raise ValidationError(
                        f"{family}: gamma_{k} >= 1/4, construction undefined")
            exceptions = tuple(violations)
        else:
            prefix = max(violations)
            if violations != list(range(1, prefix + 1)):
                raise ValidationError(
                    f"{family}: gamma exceeds 1/32 at non-prefix indices {violations}")
            if prefix >= k_max:
                raise ValidationError(
                    f"{family}: no finite clamp prefix makes gamma_k <= 1/32 by k={k_max}")
            for k in range(1, prefix + 1):
                ln_inv[k - 1] = ln32
    total = prefix / 32.0 + gamma_sum_tail(prefix)
    return GammaModel(family=family, params=params, k_max=k_max,
                      ln_inv_gamma=tuple(ln_inv), clamp_prefix=prefix,
                      eq2_exceptions=exceptions, gamma_sum=total,
                      meta=meta or {})


def _kj_sequence(rule, k_max: int) -> list:
    """Dip positions k_1 < k_2 < ... up to k_max (plus one beyond, for sums)."""
    if callable(rule):
        out, j = [], 1
        while True:
            k = int(rule(j))
            out.append(k)
            if k > k_max:
                break
            j += 1
        return out
    return [int(k) for k in rule]


def build_model(family: str, k_max: int = 40, **params) -> GammaModel:
    """Build and validate a gamma model.

    Families and parameters:
      power_law(a):      gamma_k = k^-a, a > 1
      exponential(a):    gamma_k = a^-k, a > 1
      doubly_exp(a):     gamma_k = exp(-a^k), a > 1
      example1(B):       gamma_1 = exp(-4B), gamma_k = exp(-2^k B), B >= ln(32)/4
      example2(variant, kj): quadratic-decay sequence with dips at k_j
                         (variant "A": A_j = 2^{k_j}; "B": A_j = 2^{k_j - j})
      example3(m):       B_k = exp(k / log_(m) k) on its increasing branch
      delta_form(b):     delta_k = exp(-b^k) exactly, b > ln 4
      from_dimension_function(h): gamma_k = h^{-1}(2^-k)/h^{-1}(2^{-k+1})
      custom(gammas):    explicit list, must satisfy gamma_k <= 1/32 as given
    """
    if k_max < 1:
        raise ParameterError("k_max must be >= 1")
    if family == POWER_LAW:
        a = float(params.get("a", 2.0))
        if a <= 1.0:
            raise ValidationError("power_law needs a > 1 for a summable tail")
        ln_inv = [Fraction(a * math.log(k)) for k in range(1, k_max + 1)]

        def tail(p):
            return float(zeta(a)) - sum(k ** -a for k in range(1, p + 1))

        return _clamp_and_validate(family, {"a": a}, k_max, ln_inv, tail)

    if family == EXPONENTIAL:
        a = float(params.get("a", 2.0))
        if a <= 1.0:
            raise ValidationError("exponential needs a > 1")
        ln_inv = [Fraction(k) * Fraction(math.log(a)) for k in range(1, k_max + 1)]

        def tail(p):
            return a ** -(p + 1) / (1.0 - 1.0 / a)

        return _clamp_and_validate(family, {"a": a}, k_max, ln_inv, tail)

    if family == DOUBLY_EXP:
        a = float(params.get("a", 2.0))
        if a <= 1.0:
            raise ValidationError("doubly_exp needs a > 1")
        ln_inv = [Fraction(a) ** k if a == int(a) else Fraction(a ** k)
                  for k in range(1, k_max + 1)]

        def tail(p):
            s, k = 0.0, p + 1
            while True:
                t = math.exp(-(a ** k)) if a ** k < 700 else 0.0
                if t == 0.0:
                    return s
                s += t
                k += 1

        return _clamp_and_validate(family, {"a": a}, k_max, ln_inv, tail)

    if family == EXAMPLE1:
        B = float(params.get("B", 1.0))
        if B <= 0:
            raise ParameterError("example1 needs B > 0")
        ln_inv = [Fraction(B) * (4 if k == 1 else 2 ** k) for k in range(1, k_max + 1)]

        def tail(p):
            s = math.exp(-4.0 * B) if p < 1 else 0.0
            for k in range(max(2, p + 1), 800):
                if 2 ** k * B > 700:
                    break
                s += math.exp(-(2 ** k) * B)
            return s

        return _clamp_and_validate(family, {"B": B}, k_max, ln_inv, tail)

    if family == EXAMPLE2:
        variant = str(params.get("variant", "A"))
        if variant not in ("A", "B"):
            raise ParameterError("example2 variant must be 'A' or 'B'")
        rule = params.get("kj", lambda j: j * j)
        kj = _kj_sequence(rule, k_max)
        if kj != sorted(set(kj)) or kj[0] < 1:
            raise ValidationError("example2 needs strictly increasing k_j >= 1")
        # A_j = 2^{k_j} (variant A) or 2^{k_j - j} (variant B), exact dyadics
        A = []
        for j, k in enumerate(kj, start=1):
            ex = k if variant == "A" else k - j
            A.append(Fraction(2) ** ex)
        ln_inv = []
        jpos = {k: j for j, k in enumerate(kj, start=1)}
        for k in range(1, k_max + 1):
            base = Fraction(2 * math.log(k + 5))
            if k in jpos:
                j = jpos[k]
                dA = A[j - 1] - (A[j - 2] if j >= 2 else 0)
                base += dA
            ln_inv.append(base)

        def tail(p):
            # sum (k+5)^-2 minus the dip corrections (1 - eps_j)(k_j+5)^-2
            s = float(polygamma(1, p + 6))
            for j, k in enumerate(kj, start=1):
                if k <= p:
                    continue
                dA = float(A[j - 1] - (A[j - 2] if j >= 2 else 0))
                eps_j = math.exp(-dA) if dA < 700 else 0.0
                s -= (1.0 - eps_j) * (k + 5) ** -2
            if callable(rule):
                j = len(kj) + 1
                while True:
                    k = int(rule(j))
                    if k > 10 ** 4:
                        break
                    s -= (k + 5) ** -2
                    j += 1
            return s

        meta = {"kj": kj, "A": A, "variant": variant}
        return _clamp_and_validate(family, {"variant": variant, "kj": kj},
                                   k_max, ln_inv, tail, meta=meta)

    if family == EXAMPLE3:
        m = int(params.get("m", 3))
        if m < 3:
            raise ParameterError("example3 needs m >= 3 (smaller m reduces to the logarithmic measure)")

        def log_iter(x: float, times: int) -> float:
            for _ in range(times):
                if x <= 0:
                    return math.nan
                x = math.log(x)
            return x

        def B_of(k: int) -> float:
            d = log_iter(float(k), m)
            if not (d > 0) or k / d > 700.0:
                return math.nan
            return math.exp(k / d)

        # onset: first k on the increasing branch of k / log_(m) k
        k_start = None
        prev = math.nan
        for k in range(3, k_max + 5000):
            cur = B_of(k)
            if not math.isnan(cur) and not math.isnan(prev) and cur > prev:
                k_start = k
                break
            prev = cur
        if k_start is None or k_start > k_max:
            raise ValidationError(
                f"example3(m={m}): increasing branch starts beyond k_max={k_max}")
        ln_inv = []
        prev_lndelta = Fraction(0)
        for k in range(1, k_max + 1):
            if k < k_start:
                lndelta = Fraction(LN32) * k
            else:
                b = B_of(k)
                if math.isnan(b):
                    raise HorizonError(
                        f"example3: B_{k} overflows doubles; lower k_max")
                lndelta = Fraction(b) * 2 ** (k + 1)
            ln_inv.append(lndelta - prev_lndelta)
            prev_lndelta = lndelta

        def tail(p):
            s = 0.0
            for k in range(p + 1, k_max + 1):
                v = float(ln_inv[k - 1])
                s += math.exp(-v) if v < 700 else 0.0
            return s

        meta = {"m": m, "k_start": k_start}
        return _clamp_and_validate(family, {"m": m}, k_max, ln_inv, tail, meta=meta)

    if family == DELTA_FORM:
        b = float(params.get("b", 2.0))
        if b <= math.log(4.0):
            raise ValidationError("delta_form needs b > ln 4 so that gamma_1 < 1/4")
        bq = Fraction(b) if b != int(b) else Fraction(int(b))
        # ln(1/delta_k) = b^k exactly: gamma_1 = e^-b, gamma_k = e^{-b^{k-1}(b-1)}
        ln_inv = [bq if k == 1 else bq ** (k - 1) * (bq - 1)
                  for k in range(1, k_max + 1)]

        def tail(p):
            s = 0.0
            for k in range(p + 1, 10 ** 4):
                e = b if k == 1 else b ** (k - 1) * (b - 1)
                if e > 700:
                    break
                s += math.exp(-e)
            return s

        # keep delta_k = exp(-b^k) exact: record sub-1/32 prefix instead of clamping
        return _clamp_and_validate(family, {"b": b}, k_max, ln_inv, tail,
                                   allow_eq2_exceptions=True)

    if family == FROM_DIMENSION_FUNCTION:
        h = params.get("h")
        if h is None or not hasattr(h, "inverse_ln"):
            raise ParameterError(
                "from_dimension_function needs h with an inverse_ln(ln_inv_tau) method")
        L = [0.0]  # L_k = ln(1/h^{-1}(2^-k)); L_0 from tau = 1
        for k in range(0, k_max + 1):
            L_k = h.inverse_ln(k * math.log(2.0))
            if k > 0 and L_k <= L[k - 1]:
                raise ValidationError("dimension function inverse is not expanding")
            if k == 0:
                L[0] = L_k
            else:
                L.append(L_k)
        ln_inv = [Fraction(L[k] - L[k - 1]) for k in range(1, k_max + 1)]

        def tail(p):
            s = 0.0
            for k in range(p + 1, k_max + 1):
                v = float(ln_inv[k - 1])
                s += math.exp(-v) if v < 700 else 0.0
            return s

        return _clamp_and_validate(family, {"h": h}, k_max, ln_inv, tail,
                                   meta={"L": L})

    if family == CUSTOM:
        gammas = [float(g) for g in params.get("gammas", ())]
        if not gammas:
            raise ParameterError("custom needs a nonempty gamma list")
        k_max = len(gammas)
        for k, g in enumerate(gammas, start=1):
            if not 0.0 < g <= 1.0 / 32.0:
                raise ValidationError(
                    f"custom: gamma_{k}={g} violates 0 < gamma <= 1/32 "
                    "(declared-exact lists are not clamped)")
        ln_inv = [-Fraction(math.log(g)) for g in gammas]
        total = math.fsum(gammas)
        return GammaModel(family=family, params={"gammas": gammas}, k_max=k_max,
                          ln_inv_gamma=tuple(ln_inv), clamp_prefix=0,
                          eq2_exceptions=(), gamma_sum=total,
                          gamma_sum_exact=False)

    raise ParameterError(f"unknown family {family!r}; expected one of {FAMILIES}")


# ---------------------------------------------------------------------------
# profiles
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Profile:
    """Derived sequences of a model up to its horizon.

    Index convention: entry k is the k-th term; delta[0] = r[0] = 1 and
    B[0] = beta[0] = nan (the weights start at k = 1).
    """

    model: GammaModel
    delta: tuple  # LogReal, len k_max+1
    r: tuple      # LogReal, len k_max+1
    B: tuple      # float, len k_max+1, [0] = nan
    beta: tuple   # float, len k_max+1, [0] = nan
    robin_partial: tuple  # float, len k_max+1, [0] = 0
    polar_verdict: str

    def ln_inv_delta(self, k: int) -> Fraction:
        d = self.delta[k]
        return -(Fraction(d.hi) + Fraction(d.lo))


def _polar_verdict(model: GammaModel) -> str:
    f, p = model.family, model.params
    if f == EXAMPLE1:
        return POLAR  # constant weights, divergent Robin series
    if f in (POWER_LAW, EXPONENTIAL):
        return NONPOLAR  # B_k decays geometrically in k
    if f == DOUBLY_EXP:
        return NONPOLAR if p["a"] < 2.0 else POLAR
    if f == EXAMPLE2:
        # variant A: B_{k_j} ~ 1/2 infinitely often; variant B: summable
        return POLAR if p["variant"] == "A" else NONPOLAR
    if f == EXAMPLE3:
        return POLAR  # B_k -> infinity
    if f == DELTA_FORM:
        return NONPOLAR if p["b"] < 2.0 else POLAR
    if f == FROM_DIMENSION_FUNCTION:
        # h >= h_0 puts the set in the finite-logarithmic-measure zone
        return POLAR
    return UNDETERMINED


def profile(model: GammaModel) -> Profile:
    """delta/r/B/beta/Robin sequences, exact in the log domain."""
    k_max = model.k_max
    deltas = [ONE]
    rs = [ONE]
    cum = Fraction(0)
    r_ln = Fraction(0)
    for k in range(1, k_max + 1):
        cum += model.ln_inv_gamma[k - 1]
        deltas.append(_lr_from_ln_fraction(-cum))
        r_ln = r_ln * 2 + model.ln_inv_gamma[k - 1]
        rs.append(_lr_from_ln_fraction(-r_ln))
    B = [math.nan]
    beta = [math.nan]
    robin = [0.0]
    acc = 0.0
    cum = Fraction(0)
    for k in range(1, k_max + 1):
        cum += model.ln_inv_gamma[k - 1]
        b_hi = cum / 2 ** (k + 1)
        b = float(b_hi)
        B.append(b)
        beta.append(math.log(b) / k if 0 < b < math.inf else math.nan)
        acc += b
        robin.append(acc)
    return Profile(model=model, delta=tuple(deltas), r=tuple(rs), B=tuple(B),
                   beta=tuple(beta), robin_partial=tuple(robin),
                   polar_verdict=_polar_verdict(model))


# ---------------------------------------------------------------------------
# finite-horizon condition diagnostics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DiagnosticsRow:
    s: int
    n: int
    ratio_uniform: float        # B_{s+n} / sum_{k=s}^{s+n} B_k
    block_lhs: float            # B_{s+n-m} + ... + B_{s+n}
    block_rhs: float            # eps * (B_s + ... + B_{s+n-m-1})
    block_holds: bool
    recent_lhs: float           # B_{s+n}
    recent_rhs: float           # eps * (B_{s+n-m} + ... + B_{s+n-1})
    recent_holds: bool
    product_margin_scaled: float  # [sum_{i=1..m} B_{s+n-i} - 2M B_{s+n}] * 2^{s+n+1}... stored per-2^{s+n+1}
    product_holds: bool
    consistent: bool


@dataclass(frozen=True)
class DiagnosticsReport:
    eps: float
    m: int
    M: float
    rows: tuple
    all_consistent: bool
    heuristic: bool = False  # custom sequences: finite data, no closed form


def condition_diagnostics(prof: Profile, s_grid: Sequence[int],
                          n_grid: Sequence[int], eps: float, m: int,
                          M: Optional[float] = None) -> DiagnosticsReport:
    """Evaluate the finite-horizon forms of the uniform-smallness conditions.

    For each grid point (s, n) the report carries the uniform ratio
    B_{s+n}/sum, the block and most-recent-window inequalities at (eps, m),
    and the delta-product inequality at exponent M (default 1/(2 eps), which
    makes it the exact log-domain translation of the window form).  The
    ``consistent`` flag asserts the provable pointwise implications between
    them; it is a cross-check of the implementation, not of the model.
    """
    if M is None:
        M = 1.0 / (2.0 * eps)
    B = prof.B
    k_max = prof.model.k_max
    if m < 0:
        raise ParameterError("m must be >= 0")
    rows = []
    for s in s_grid:
        for n in n_grid:
            if s < 1 or s + n > k_max:
                raise HorizonError(f"grid point (s={s}, n={n}) beyond horizon {k_max}")
            if m > n:
                raise ParameterError(f"window m={m} exceeds n={n}")
            total = math.fsum(B[s:s + n + 1])
            ratio = B[s + n] / total
            block_lhs = math.fsum(B[s + n - m:s + n + 1])
            block_rhs = eps * math.fsum(B[s:s + n - m])
            recent_lhs = B[s + n]
            recent_rhs = eps * math.fsum(B[s + n - m:s + n]) if m else 0.0
            # delta-product inequality, exact translation:
            #   prod_{i=1..m} delta_{s+n-i}^{2^{i-1}} < delta_{s+n}^M
            #   <=> sum_{i=1..m} B_{s+n-i} > 2 M B_{s+n}
            window = math.fsum(B[s + n - m:s + n])
            margin_scaled = window - 2.0 * M * B[s + n]
            product_holds = margin_scaled > 0.0
            # cross-check in exact log-domain arithmetic when M is integral
            if M == int(M) and int(M) >= 1:
                lhs = log_mul_pow(
                    [(prof.delta[s + n - i], 2 ** (i - 1)) for i in range(1, m + 1)])
                rhs = prof.delta[s + n].pow(int(M))
                exact_holds = lhs < rhs
            else:
                exact_holds = product_holds
            recent_holds = recent_lhs < recent_rhs
            block_holds = block_lhs < block_rhs
            uniform_holds_at_eps = B[s + n] < eps * total
            consistent = (exact_holds == product_holds)
            # pointwise implications (hold for any B >= 0)
            if recent_holds and not uniform_holds_at_eps:
                consistent = False
            if block_holds and not uniform_holds_at_eps:
                consistent = False
            if abs(M - 1.0 / (2.0 * eps)) < 1e-12 and m and (recent_holds != product_holds):
                consistent = False
            rows.append(DiagnosticsRow(
                s=s, n=n, ratio_uniform=ratio,
                block_lhs=block_lhs, block_rhs=block_rhs, block_holds=block_holds,
                recent_lhs=recent_lhs, recent_rhs=recent_rhs, recent_holds=recent_holds,
                product_margin_scaled=margin_scaled, product_holds=product_holds,
                consistent=consistent))
    return DiagnosticsReport(eps=eps, m=m, M=M, rows=tuple(rows),
                             all_consistent=all(r.consistent for r in rows),
                             heuristic=(prof.model.family == CUSTOM))


# ---------------------------------------------------------------------------
# extension-property classifier
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EPVerdict:
    ep: str      # "yes" | "no" | "undetermined"
    rule: str


def _example2_checks(model: GammaModel, prof: Profile) -> tuple[bool, str]:
    """Verify the dip-family hypotheses at the horizon.

    Checks that k_{j+1}^2 / A_j is decreasing toward 0 and that each dip block
    satisfies B_{k_j} + ... + B_{k_{j+1}-1} < 3 B_{k_j} for the last few j in
    range.
    """
    kj = model.meta["kj"]
    A = model.meta["A"]
    ratios = []
    for j in range(1, len(kj)):
        if float(A[j - 1]) == math.inf:
            break
        ratios.append(kj[j] ** 2 / float(A[j - 1]))
    shrinking = len(ratios) >= 2 and ratios[-1] < ratios[0] and ratios[-1] < 1.0
    block_ok = True
    checked = 0
    for j in range(len(kj) - 1, 0, -1):
        s, e = kj[j - 1], kj[j]
        if e > model.k_max or checked >= 2:
            continue
        block = math.fsum(prof.B[s:e])
        if not block < 3.0 * prof.B[s]:
            block_ok = False
        checked += 1
    return (shrinking and block_ok and checked > 0,
            f"dip blocks verified for last {checked} j; k_{{j+1}}^2/A_j shrinking: {shrinking}")


def classify_ep(model: GammaModel, prof: Optional[Profile] = None) -> EPVerdict:
    """Closed-form extension-property verdict for the built-in families.

    The uniform-smallness condition on the weights B_k is a limit statement,
    undecidable from a finite horizon, so verdicts come only from per-family
    closed forms; custom sequences get "undetermined".
    """
    f, p = model.family, model.params
    if f == POWER_LAW:
        return EPVerdict("yes", "B_k ~ 2^-k-1 a k ln k is monotone convergent (to 0)")
    if f == EXPONENTIAL:
        return EPVerdict("yes", "B_k ~ 2^-k-2 k^2 ln a is monotone convergent (to 0)")
    if f == DOUBLY_EXP:
        a = p["a"]
        if a <= 2.0:
            return EPVerdict("yes", f"B_k ~ (a/2)^k+1/(a-1) with a={a} <= 2: "
                                    "monotone convergent or constant")
        return EPVerdict("no", f"beta_k -> ln(a/2) > 0 for a={a}: "
                               "regular, not of subexponential growth")
    if f == EXAMPLE1:
        return EPVerdict("yes", "constant weights B_k = B are monotone convergent")
    if f == EXAMPLE2:
        if prof is None:
            prof = profile(model)
        ok, detail = _example2_checks(model, prof)
        if ok:
            return EPVerdict("no", "irregular dips: a fixed fraction of the Robin "
                                   f"mass concentrates at single k ({detail})")
        return EPVerdict("undetermined", f"dip hypotheses failed at horizon ({detail})")
    if f == EXAMPLE3:
        return EPVerdict("yes", "beta_k = 1/log_(m) k decreases to 0: "
                                "divergent of subexponential growth")
    if f == DELTA_FORM:
        b = p["b"]
        if b <= 2.0:
            return EPVerdict("yes", f"B_k = (b/2)^k/2 with b={b} <= 2: monotone convergent")
        return EPVerdict("no", f"beta_k -> ln(b/2) > 0 for b={b}")
    if f == FROM_DIMENSION_FUNCTION:
        h = p["h"]
        case = getattr(h, "ep_case", None)
        if case == "yes":
            return EPVerdict("yes", "k-th root of ln(1/h^{-1}(2^-k)) tends to 2")
        if case == "no":
            return EPVerdict("no", "k-th root of ln(1/h^{-1}(2^-k)) does not tend to 2")
        return EPVerdict("undetermined", "dimension function outside the classified cases")
    return EPVerdict("undetermined", "custom sequence: finite data cannot decide a limit")
