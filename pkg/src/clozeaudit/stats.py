"""Statistical battery: location tests, effect sizes, multiplicity control,
resampling, correlation, and concordance.

Conventions shared by everything here: midranks for ties; exact enumeration
whenever the enumeration count fits under ``EXACT_ENUMERATION_LIMIT`` (else
the documented approximation); seeded resampling is bit-reproducible. scipy
supplies only distribution functions (t and normal CDFs); the test logic
itself is implemented directly.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from itertools import combinations
from math import comb, erf, exp, log, sqrt
from typing import Callable, Sequence

import numpy as np
from scipy import stats as _dist

from .errors import DegenerateDataError

TWO_SIDED = "two_sided"
GREATER = "one_sided_greater"
LESS = "one_sided_less"
_SIDES = (TWO_SIDED, GREATER, LESS)

EXACT_ENUMERATION_LIMIT = 1_000_000


@dataclass(frozen=True)
class TestResult:
    statistic: float
    p_value: float
    sidedness: str
    n1: int
    n2: int
    method: str = ""

    def to_json_obj(self) -> dict:
        return {
            "statistic": self.statistic,
            "p_value": self.p_value,
            "sidedness": self.sidedness,
            "n1": self.n1,
            "n2": self.n2,
            "method": self.method,
        }


@dataclass(frozen=True)
class EffectSize:
    kind: str
    value: float
    auxiliary: float | None = None  # AUC for cliffs_delta


@dataclass(frozen=True)
class IntervalEstimate:
    lower: float
    upper: float
    level: float
    method: str


def _check_side(sidedness: str) -> str:
    if sidedness not in _SIDES:
        raise ValueError(f"sidedness must be one of {_SIDES}, got {sidedness!r}")
    return sidedness


def _midranks(values: Sequence[float]) -> list[float]:
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[order[j + 1]] == values[order[i]]:
            j += 1
        avg = (i + j) / 2.0 + 1.0
        for k in range(i, j + 1):
            ranks[order[k]] = avg
        i = j + 1
    return ranks


def _tie_groups(values: Sequence[float]) -> list[int]:
    counts: dict[float, int] = {}
    for v in values:
        counts[v] = counts.get(v, 0) + 1
    return [c for c in counts.values() if c > 1]


def _norm_sf(x: float) -> float:
    return 0.5 * (1.0 - erf(x / sqrt(2.0)))


# ---------------------------------------------------------------------------
# Location tests
# ---------------------------------------------------------------------------

def welch_t(a: Sequence[float], b: Sequence[float], sidedness: str = TWO_SIDED) -> TestResult:
    """Welch's unequal-variance t test with Satterthwaite degrees of freedom."""
    _check_side(sidedness)
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    n1, n2 = len(a), len(b)
    if n1 < 2 or n2 < 2:
        raise DegenerateDataError("welch_t needs at least 2 observations per sample")
    v1 = float(np.var(a, ddof=1))
    v2 = float(np.var(b, ddof=1))
    se2 = v1 / n1 + v2 / n2
    if se2 == 0.0:
        if float(np.mean(a)) == float(np.mean(b)):
            # all values identical in both samples: no evidence of difference
            return TestResult(0.0, 1.0, sidedness, n1, n2, method="welch-degenerate")
        raise DegenerateDataError("welch_t undefined: zero variance in both samples")
    t = (float(np.mean(a)) - float(np.mean(b))) / sqrt(se2)
    df = se2 ** 2 / ((v1 / n1) ** 2 / (n1 - 1) + (v2 / n2) ** 2 / (n2 - 1))
    if sidedness == TWO_SIDED:
        p = 2.0 * float(_dist.t.sf(abs(t), df))
    elif sidedness == GREATER:
        p = float(_dist.t.sf(t, df))
    else:
        p = float(_dist.t.cdf(t, df))
    return TestResult(t, min(p, 1.0), sidedness, n1, n2, method=f"welch df={df:.4g}")


def mann_whitney_u(a: Sequence[float], b: Sequence[float], sidedness: str = TWO_SIDED,
                   exact_limit: int = EXACT_ENUMERATION_LIMIT) -> TestResult:
    """Mann-Whitney U with midrank ties.

    Exact p by enumerating rank assignments when there are no ties and
    C(n1+n2, n1) <= exact_limit; otherwise the normal approximation with tie
    and continuity corrections. The statistic is U for the first sample.
    """
    _check_side(sidedness)
    a = [float(x) for x in a]
    b = [float(x) for x in b]
    n1, n2 = len(a), len(b)
    if n1 == 0 or n2 == 0:
        raise DegenerateDataError("mann_whitney_u needs nonempty samples")
    combined = a + b
    ranks = _midranks(combined)
    r1 = sum(ranks[:n1])
    u1 = r1 - n1 * (n1 + 1) / 2.0
    ties = _tie_groups(combined)

    if not ties and comb(n1 + n2, n1) <= exact_limit:
        # Enumerate which ranks (1..N) the first sample occupies.
        base = n1 * (n1 + 1) / 2.0
        ge = le = total = 0
        for subset in combinations(range(1, n1 + n2 + 1), n1):
            u = sum(subset) - base
            total += 1
            if u >= u1:
                ge += 1
            if u <= u1:
                le += 1
        if sidedness == GREATER:
            p = ge / total
        elif sidedness == LESS:
            p = le / total
        else:
            p = min(1.0, 2.0 * min(ge, le) / total)
        return TestResult(u1, p, sidedness, n1, n2, method="exact-enumeration")

    n = n1 + n2
    mean = n1 * n2 / 2.0
    tie_term = sum(t ** 3 - t for t in ties)
    var = n1 * n2 / 12.0 * ((n + 1) - tie_term / (n * (n - 1)))
    if var <= 0.0:
        return TestResult(u1, 1.0, sidedness, n1, n2, method="normal-degenerate")
    sd = sqrt(var)
    if sidedness == GREATER:
        p = _norm_sf((u1 - mean - 0.5) / sd)
    elif sidedness == LESS:
        p = 1.0 - _norm_sf((u1 - mean + 0.5) / sd)
    else:
        z = (abs(u1 - mean) - 0.5) / sd
        p = min(1.0, 2.0 * _norm_sf(max(z, 0.0)))
    return TestResult(u1, min(max(p, 0.0), 1.0), sidedness, n1, n2,
                      method="normal-approx")


def ks_test_right(a: Sequence[float], b: Sequence[float]) -> TestResult:
    """One-sided two-sample KS: D+ = sup_x (F_b(x) - F_a(x)), testing whether
    the first sample is stochastically larger; p = exp(-2 m n D+^2 / (m+n))."""
    a = np.sort(np.asarray(a, dtype=np.float64))
    b = np.sort(np.asarray(b, dtype=np.float64))
    m, n = len(a), len(b)
    if m == 0 or n == 0:
        raise DegenerateDataError("ks_test_right needs nonempty samples")
    grid = np.concatenate([a, b])
    fa = np.searchsorted(a, grid, side="right") / m
    fb = np.searchsorted(b, grid, side="right") / n
    d_plus = float(np.max(fb - fa))
    d_plus = max(d_plus, 0.0)
    p = min(1.0, exp(-2.0 * m * n * d_plus ** 2 / (m + n)))
    return TestResult(d_plus, p, GREATER, m, n, method="asymptotic")


def permutation_mean_test(a: Sequence[float], b: Sequence[float], iterations: int = 10_000,
                          seed: int = 0, sidedness: str = GREATER,
                          exact_limit: int = EXACT_ENUMERATION_LIMIT) -> TestResult:
    """Permutation test on the difference of means.

    Full enumeration of group assignments when C(n1+n2, n1) <= exact_limit
    (p = count/total); otherwise Monte Carlo with the add-one rule
    p = (1 + #{permuted >= observed}) / (1 + iterations).
    """
    _check_side(sidedness)
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    n1, n2 = len(a), len(b)
    if n1 == 0 or n2 == 0:
        raise DegenerateDataError("permutation_mean_test needs nonempty samples")
    pooled = np.concatenate([a, b])
    observed = float(np.mean(a) - np.mean(b))

    def extreme(stat: float) -> bool:
        if sidedness == GREATER:
            return stat >= observed
        if sidedness == LESS:
            return stat <= observed
        return abs(stat) >= abs(observed)

    if comb(n1 + n2, n1) <= exact_limit:
        hits = total = 0
        idx = range(n1 + n2)
        for subset in combinations(idx, n1):
            mask = np.zeros(n1 + n2, dtype=bool)
            mask[list(subset)] = True
            stat = float(pooled[mask].mean() - pooled[~mask].mean())
            total += 1
            if extreme(stat):
                hits += 1
        return TestResult(observed, hits / total, sidedness, n1, n2,
                          method="exact-enumeration")

    rng = np.random.default_rng(seed)
    hits = 0
    for _ in range(iterations):
        perm = rng.permutation(pooled)
        stat = float(perm[:n1].mean() - perm[n1:].mean())
        if extreme(stat):
            hits += 1
    p = (1 + hits) / (1 + iterations)
    return TestResult(observed, p, sidedness, n1, n2,
                      method=f"monte-carlo seed={seed} iters={iterations}")


# ---------------------------------------------------------------------------
# Multiplicity control
# ---------------------------------------------------------------------------

def holm_adjust(p_values: Sequence[float]) -> list[float]:
    """Step-down Holm adjustment, returned in input order."""
    ps = [float(p) for p in p_values]
    for p in ps:
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"p-value {p} outside [0, 1]")
    m = len(ps)
    order = sorted(range(m), key=lambda i: ps[i])
    adjusted = [0.0] * m
    running = 0.0
    for rank, idx in enumerate(order):
        running = max(running, min(1.0, (m - rank) * ps[idx]))
        adjusted[idx] = running
    return adjusted


# ---------------------------------------------------------------------------
# Resampling
# ---------------------------------------------------------------------------

def bootstrap_ci(data, statistic_fn: Callable[[np.ndarray], float], level: float = 0.95,
                 method: str = "bca", iterations: int = 2000, seed: int = 0,
                 ) -> IntervalEstimate:
    """Bootstrap confidence interval; ``data`` rows are resampled jointly, so a
    2-D array bootstraps pairs. BCa falls back to percentile (with a warning)
    when the bootstrap distribution or the statistic is degenerate."""
    if method not in ("percentile", "bca"):
        raise ValueError("method must be 'percentile' or 'bca'")
    if iterations < 100:
        raise ValueError("iterations must be >= 100")
    data = np.asarray(data, dtype=np.float64)
    n = data.shape[0]
    if n < 2:
        raise DegenerateDataError("bootstrap needs at least 2 observations")
    rng = np.random.default_rng(seed)
    theta = float(statistic_fn(data))
    boots = np.empty(iterations)
    for i in range(iterations):
        idx = rng.integers(0, n, size=n)
        boots[i] = statistic_fn(data[idx])

    alpha = 1.0 - level
    if method == "percentile":
        lo, hi = np.quantile(boots, [alpha / 2.0, 1.0 - alpha / 2.0])
        return IntervalEstimate(float(lo), float(hi), level, "percentile")

    prop_below = float(np.mean(boots < theta))
    if prop_below in (0.0, 1.0):
        warnings.warn("degenerate bootstrap distribution; falling back to percentile")
        lo, hi = np.quantile(boots, [alpha / 2.0, 1.0 - alpha / 2.0])
        return IntervalEstimate(float(lo), float(hi), level, "percentile")
    z0 = float(_dist.norm.ppf(prop_below))
    jack = np.empty(n)
    for i in range(n):
        jack[i] = statistic_fn(np.delete(data, i, axis=0))
    jmean = jack.mean()
    num = float(np.sum((jmean - jack) ** 3))
    den = float(np.sum((jmean - jack) ** 2)) ** 1.5
    accel = 0.0 if den == 0.0 else num / (6.0 * den)
    z_lo = float(_dist.norm.ppf(alpha / 2.0))
    z_hi = float(_dist.norm.ppf(1.0 - alpha / 2.0))
    a1 = float(_dist.norm.cdf(z0 + (z0 + z_lo) / (1.0 - accel * (z0 + z_lo))))
    a2 = float(_dist.norm.cdf(z0 + (z0 + z_hi) / (1.0 - accel * (z0 + z_hi))))
    lo, hi = np.quantile(boots, [min(a1, a2), max(a1, a2)])
    return IntervalEstimate(float(lo), float(hi), level, "bca")


# ---------------------------------------------------------------------------
# Effect sizes
# ---------------------------------------------------------------------------

def hedges_g(a: Sequence[float], b: Sequence[float]) -> EffectSize:
    """Pooled-SD standardized mean difference with the small-sample correction
    J = 1 - 3 / (4(n1+n2) - 9)."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    n1, n2 = len(a), len(b)
    if n1 < 2 or n2 < 2:
        raise DegenerateDataError("hedges_g needs at least 2 observations per sample")
    pooled_var = ((n1 - 1) * np.var(a, ddof=1) + (n2 - 1) * np.var(b, ddof=1)) / (n1 + n2 - 2)
    if pooled_var == 0.0:
        raise DegenerateDataError("hedges_g undefined: zero pooled variance")
    j = 1.0 - 3.0 / (4.0 * (n1 + n2) - 9.0)
    g = j * float(np.mean(a) - np.mean(b)) / sqrt(float(pooled_var))
    return EffectSize(kind="hedges_g", value=g)


def cliffs_auc(delta: float) -> float:
    return (delta + 1.0) / 2.0


def cliffs_delta(a: Sequence[float], b: Sequence[float]) -> EffectSize:
    """delta = (#{a_i > b_j} - #{a_i < b_j}) / (n1 n2); AUC = (delta+1)/2."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    n1, n2 = len(a), len(b)
    if n1 == 0 or n2 == 0:
        raise DegenerateDataError("cliffs_delta needs nonempty samples")
    gt = int(np.sum(a[:, None] > b[None, :]))
    lt = int(np.sum(a[:, None] < b[None, :]))
    delta = (gt - lt) / (n1 * n2)
    return EffectSize(kind="cliffs_delta", value=delta, auxiliary=cliffs_auc(delta))


# ---------------------------------------------------------------------------
# Correlation and concordance
# ---------------------------------------------------------------------------

def spearman_rho(x: Sequence[float], y: Sequence[float]) -> tuple[float, float]:
    """Pearson correlation of midranks; two-sided p via the t approximation."""
    if len(x) != len(y):
        raise ValueError("x and y must have equal length")
    n = len(x)
    if n < 3:
        raise DegenerateDataError("spearman_rho needs length >= 3")
    if len(set(map(float, x))) < 2 or len(set(map(float, y))) < 2:
        raise DegenerateDataError("spearman_rho undefined for constant input")
    rx = np.asarray(_midranks([float(v) for v in x]))
    ry = np.asarray(_midranks([float(v) for v in y]))
    rx -= rx.mean()
    ry -= ry.mean()
    rho = float(np.dot(rx, ry) / sqrt(np.dot(rx, rx) * np.dot(ry, ry)))
    rho = max(-1.0, min(1.0, rho))
    if abs(rho) == 1.0:
        return rho, 0.0
    t = rho * sqrt((n - 2) / (1.0 - rho ** 2))
    p = 2.0 * float(_dist.t.sf(abs(t), n - 2))
    return rho, min(p, 1.0)


def kendall_w(rankings) -> float:
    """Kendall's concordance W over k judges x n items, midranks for ties,
    tie-corrected: W = 12 S / (k^2 (n^3 - n) - k T)."""
    matrix = np.asarray(rankings, dtype=np.float64)
    if matrix.ndim != 2:
        raise ValueError("rankings must be a k x n matrix")
    k, n = matrix.shape
    if k < 2 or n < 2:
        raise ValueError("kendall_w needs k >= 2 judges and n >= 2 items")
    ranks = np.array([_midranks(list(row)) for row in matrix])
    totals = ranks.sum(axis=0)
    s = float(np.sum((totals - totals.mean()) ** 2))
    tie_term = 0.0
    for row in matrix:
        tie_term += sum(t ** 3 - t for t in _tie_groups(list(row)))
    denom = k ** 2 * (n ** 3 - n) - k * tie_term
    if denom <= 0:
        return 0.0
    w = 12.0 * s / denom
    return max(0.0, min(1.0, w))


# ---------------------------------------------------------------------------
# Paired battery
# ---------------------------------------------------------------------------

def sign_test(a: Sequence[float], b: Sequence[float], sidedness: str = TWO_SIDED) -> TestResult:
    """Binomial sign test on paired differences; zero differences are dropped."""
    _check_side(sidedness)
    diffs = [float(x) - float(y) for x, y in zip(a, b)]
    pos = sum(1 for d in diffs if d > 0)
    neg = sum(1 for d in diffs if d < 0)
    n = pos + neg
    if n == 0:
        raise DegenerateDataError("sign test undefined: all differences are zero")
    def binom_cdf(k: int) -> float:
        return sum(comb(n, i) for i in range(k + 1)) / 2.0 ** n
    if sidedness == GREATER:
        p = 1.0 - binom_cdf(pos - 1) if pos > 0 else 1.0
    elif sidedness == LESS:
        p = binom_cdf(pos)
    else:
        p = min(1.0, 2.0 * binom_cdf(min(pos, neg)))
    return TestResult(float(pos), p, sidedness, len(diffs), len(diffs),
                      method=f"binomial n={n} dropped={len(diffs) - n}")


def wilcoxon_signed_rank(a: Sequence[float], b: Sequence[float],
                         sidedness: str = TWO_SIDED,
                         exact_limit: int = EXACT_ENUMERATION_LIMIT) -> TestResult:
    """Wilcoxon signed-rank on paired differences (zeros dropped, midranks on
    |d|). Exact sign-flip enumeration when 2^n <= exact_limit, else normal
    approximation with tie correction and continuity correction. The statistic
    is W+ (rank sum of the positive differences)."""
    _check_side(sidedness)
    diffs = [float(x) - float(y) for x, y in zip(a, b)]
    nonzero = [d for d in diffs if d != 0.0]
    n = len(nonzero)
    if n == 0:
        raise DegenerateDataError("wilcoxon undefined: all differences are zero")
    abs_d = [abs(d) for d in nonzero]
    ranks = _midranks(abs_d)
    w_plus = sum(r for r, d in zip(ranks, nonzero) if d > 0)

    if 2 ** n <= exact_limit:
        ge = le = 0
        total = 2 ** n
        for mask in range(total):
            w = sum(ranks[i] for i in range(n) if (mask >> i) & 1)
            if w >= w_plus:
                ge += 1
            if w <= w_plus:
                le += 1
        if sidedness == GREATER:
            p = ge / total
        elif sidedness == LESS:
            p = le / total
        else:
            p = min(1.0, 2.0 * min(ge, le) / total)
        return TestResult(w_plus, p, sidedness, len(diffs), len(diffs),
                          method="exact-enumeration")

    mean = n * (n + 1) / 4.0
    tie_term = sum(t ** 3 - t for t in _tie_groups(abs_d))
    var = n * (n + 1) * (2 * n + 1) / 24.0 - tie_term / 48.0
    if var <= 0:
        return TestResult(w_plus, 1.0, sidedness, len(diffs), len(diffs),
                          method="normal-degenerate")
    sd = sqrt(var)
    if sidedness == GREATER:
        p = _norm_sf((w_plus - mean - 0.5) / sd)
    elif sidedness == LESS:
        p = 1.0 - _norm_sf((w_plus - mean + 0.5) / sd)
    else:
        z = (abs(w_plus - mean) - 0.5) / sd
        p = min(1.0, 2.0 * _norm_sf(max(z, 0.0)))
    return TestResult(w_plus, min(max(p, 0.0), 1.0), sidedness,
                      len(diffs), len(diffs), method="normal-approx")


@dataclass(frozen=True)
class PairedSuiteResult:
    mean_diff: float
    positive_fraction: float
    n: int
    n_zero_dropped: int
    paired_t: TestResult
    wilcoxon: TestResult
    sign: TestResult
    mean_diff_ci: IntervalEstimate

    def to_json_obj(self) -> dict:
        return {
            "mean_diff": self.mean_diff,
            "positive_fraction": self.positive_fraction,
            "n": self.n,
            "n_zero_dropped": self.n_zero_dropped,
            "paired_t": self.paired_t.to_json_obj(),
            "wilcoxon": self.wilcoxon.to_json_obj(),
            "sign": self.sign.to_json_obj(),
            "mean_diff_ci": {
                "lower": self.mean_diff_ci.lower,
                "upper": self.mean_diff_ci.upper,
                "level": self.mean_diff_ci.level,
                "method": self.mean_diff_ci.method,
            },
        }


def paired_suite(a: Sequence[float], b: Sequence[float], *, level: float = 0.95,
                 iterations: int = 2000, seed: int = 0) -> PairedSuiteResult:
    """Two-sided paired t, Wilcoxon signed-rank, sign test, and a bootstrap CI
    on the mean difference. Raises DegenerateDataError when every difference
    is zero (the rank tests are undefined there)."""
    if len(a) != len(b):
        raise ValueError("paired samples must have equal length")
    n = len(a)
    if n < 2:
        raise DegenerateDataError("paired_suite needs at least 2 pairs")
    diffs = np.asarray([float(x) - float(y) for x, y in zip(a, b)])
    if np.all(diffs == 0.0):
        raise DegenerateDataError("all paired differences are zero")
    mean_diff = float(diffs.mean())
    sd = float(diffs.std(ddof=1))
    if sd == 0.0:
        # identical nonzero shifts: t is infinite, p -> 0
        t_res = TestResult(float("inf") if mean_diff > 0 else float("-inf"),
                           0.0, TWO_SIDED, n, n, method="paired-t-degenerate")
    else:
        t = mean_diff / (sd / sqrt(n))
        p = 2.0 * float(_dist.t.sf(abs(t), n - 1))
        t_res = TestResult(t, min(p, 1.0), TWO_SIDED, n, n, method="paired-t")
    pos = int(np.sum(diffs > 0))
    neg = int(np.sum(diffs < 0))
    return PairedSuiteResult(
        mean_diff=mean_diff,
        positive_fraction=pos / (pos + neg),
        n=n,
        n_zero_dropped=n - pos - neg,
        paired_t=t_res,
        wilcoxon=wilcoxon_signed_rank(a, b, TWO_SIDED),
        sign=sign_test(a, b, TWO_SIDED),
        mean_diff_ci=bootstrap_ci(diffs, lambda d: float(np.mean(d)), level=level,
                                  method="percentile", iterations=iterations, seed=seed),
    )
