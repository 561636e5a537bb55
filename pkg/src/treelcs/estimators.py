"""Monte-Carlo estimators for the quantitative behaviour of common
subtrees of critical trees: the proportionality constant c = E[rooted
LCS of root-biased pairs], tail curves and exponents, the height-vs-LCS
event, the Many-to-One identity, big-jump bounds, and the star lower
bound for the heavy-tail family.

Heavy tails rule out naive normal intervals for c: the rooted-LCS tail
index is 2/(1+eps), so the mean exists but the variance barely does;
c is therefore reported as a median of block means.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import errors
from ._kernels import (bigjump_pareto_sums, bigjump_table_sums,
                       height_samples, lcs_pair_survey, m2o_lhs_survey,
                       m2o_spine_f_survey, p_eps_survey)
from ._rng import Rng
from .offspring import (OffspringLaw, expected_truncated_height,
                        height_survival, size_probabilities)

DEFAULT_NODE_CAP = 5 * 10 ** 6
DEFAULT_PAIR_BUDGET = 10 ** 8
_NO_TABLE = (np.empty(1, dtype=np.float64), np.empty(1, dtype=np.int64))

# built-in bounded functionals for the Many-to-One check
BUILTIN_F = (("one",), ("cut_size", 12))
BUILTIN_G = (("one",), ("height", 5))
M2O_LEVELS = (1, 2, 3, 4)


@dataclass(frozen=True)
class EstimateResult:
    point: float
    ci_low: float
    ci_high: float
    n_samples: int
    n_censored: int
    method: str
    seed: int

    def __post_init__(self):
        if not (self.ci_low <= self.point <= self.ci_high):
            raise errors.TreeLcsError("CI must bracket the point estimate")
        if self.n_censored > self.n_samples:
            raise errors.TreeLcsError("censored count exceeds sample count")

    def to_dict(self):
        return {"point": self.point, "ci_low": self.ci_low,
                "ci_high": self.ci_high, "n_samples": self.n_samples,
                "n_censored": self.n_censored, "method": self.method,
                "seed": self.seed}


@dataclass(frozen=True)
class EmpiricalDistribution:
    """Sorted sample vector with uniform weights."""

    samples: np.ndarray = field()

    def __post_init__(self):
        s = np.sort(np.asarray(self.samples).ravel())
        object.__setattr__(self, "samples", s)
        s.setflags(write=False)
        if s.size == 0:
            raise errors.Empty("empirical distribution needs samples")

    @property
    def n(self):
        return int(self.samples.size)

    def cdf(self, x):
        return np.searchsorted(self.samples, x, side="right") / self.n

    def survival(self, x):
        """P(X > x)."""
        return 1.0 - self.cdf(x)

    def survival_geq(self, x):
        """P(X >= x)."""
        return 1.0 - np.searchsorted(self.samples, x, side="left") / self.n


def ks_distance(a: EmpiricalDistribution, b: EmpiricalDistribution) -> float:
    """Two-sample Kolmogorov-Smirnov statistic sup_x |F_a - F_b|."""
    grid = np.concatenate([a.samples, b.samples])
    return float(np.abs(a.cdf(grid) - b.cdf(grid)).max())


def wasserstein1(a: EmpiricalDistribution, b: EmpiricalDistribution) -> float:
    """First Wasserstein distance = integral of |F_a - F_b|."""
    grid = np.sort(np.concatenate([a.samples, b.samples]))
    if grid.size == 1:
        return 0.0
    diffs = np.abs(a.cdf(grid[:-1]) - b.cdf(grid[:-1]))
    return float(np.sum(diffs * np.diff(grid)))


def _median_of_means(values, n_blocks):
    """(point, ci_low, ci_high): median of block means with a
    distribution-free order-statistic interval (normal approx to the
    binomial at level ~95%)."""
    values = np.asarray(values, dtype=np.float64)
    n = values.size
    n_blocks = max(1, min(n_blocks, n))
    bounds = np.linspace(0, n, n_blocks + 1).astype(np.int64)
    means = np.array([values[bounds[i]:bounds[i + 1]].mean()
                      for i in range(n_blocks)])
    means.sort()
    point = float(np.median(means))
    half = 0.98 * math.sqrt(n_blocks)
    lo = max(0, int(math.floor(n_blocks / 2 - half)))
    hi = min(n_blocks - 1, int(math.ceil(n_blocks / 2 + half)))
    return point, float(means[lo]), float(means[hi])


# ---------------------------------------------------------------------------
# c = E[LCS_rooted(root-biased pair)]
# ---------------------------------------------------------------------------

def estimate_c(law: OffspringLaw, law2: OffspringLaw, samples: int, rng: Rng,
               cap: int = DEFAULT_NODE_CAP,
               value_clip: int = 1024) -> EstimateResult:
    """Mean rooted LCS over i.i.d. pairs of root-biased trees.

    Values are computed exactly up to ``value_clip`` (the tail index ~2
    makes the clip bias O(1/value_clip)); clipped or capped pairs are
    counted as censored and contribute their lower bound.
    """
    if samples < 1:
        raise errors.TreeLcsError("estimate_c needs samples >= 1")
    k0, k1 = rng.child("c").kernel_key()
    pA, aA = law.sampler_table()
    rA_p, rA_a = law.root_biased_table()
    pB, aB = law2.sampler_table()
    rB_p, rB_a = law2.root_biased_table()
    values, flags, _ = lcs_pair_survey(
        k0, k1, np.uint64(0), np.int64(samples), np.int64(value_clip),
        np.int64(value_clip), pA, aA, rA_p, rA_a, True,
        pB, aB, rB_p, rB_a, True, np.int64(cap),
        np.int64(DEFAULT_PAIR_BUDGET))
    vals = values.astype(np.float64)
    vals[flags >= 2] = float(value_clip)  # lower-bound contribution
    n_censored = int(np.sum(flags >= 1))
    n_blocks = max(1, math.ceil(samples ** (1.0 / 3.0)))
    point, lo, hi = _median_of_means(vals, n_blocks)
    return EstimateResult(point=point, ci_low=lo, ci_high=hi,
                          n_samples=samples, n_censored=n_censored,
                          method="median_of_means", seed=rng.master_seed)


# ---------------------------------------------------------------------------
# survival curves and tail slopes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SurvivalCurve:
    h_grid: np.ndarray
    survival: np.ndarray      # P(statistic > h) per grid point
    counts: np.ndarray
    n_samples: int
    n_censored: int
    slope: float              # weighted LS slope of log P vs log h
    slope_defined: bool
    distribution: EmpiricalDistribution


def _loglog_slope(h, p, counts):
    mask = (p > 0) & (h > 0)
    if mask.sum() < 2:
        return float("nan"), False
    x = np.log(h[mask])
    y = np.log(p[mask])
    w = np.sqrt(counts[mask].astype(np.float64))
    coef = np.polyfit(x, y, 1, w=w)
    return float(coef[0]), True


def survival_curve(statistic: str, law: OffspringLaw,
                   law2: OffspringLaw | None, h_grid, samples: int,
                   rng: Rng, cap: int = DEFAULT_NODE_CAP) -> SurvivalCurve:
    """Empirical tail of one of the built-in statistics.

    statistic: "height" (Ht of a single tree), "lcs_rooted_pair"
    (rooted LCS of an unconditioned pair), or "lcs_rooted_biased_pair"
    (rooted LCS of a root-biased pair).  Samples are clipped just above
    the largest grid point, which leaves every reported survival value
    exact.
    """
    h_grid = np.asarray(h_grid, dtype=np.float64)
    if h_grid.size == 0 or np.any(np.diff(h_grid) <= 0):
        raise errors.TreeLcsError("h_grid must be increasing and nonempty")
    hmax = int(math.floor(h_grid.max()))
    k0, k1 = rng.child("tail", statistic).kernel_key()
    n_censored = 0
    if statistic == "height":
        vals = height_samples(k0, k1, np.uint64(0), np.int64(samples),
                              np.int64(hmax + 1), *law.sampler_table())
    elif statistic in ("lcs_rooted_pair", "lcs_rooted_biased_pair"):
        law2 = law2 if law2 is not None else law
        biased = statistic == "lcs_rooted_biased_pair"
        pA, aA = law.sampler_table()
        pB, aB = law2.sampler_table()
        fA = law.root_biased_table() if biased else _NO_TABLE
        fB = law2.root_biased_table() if biased else _NO_TABLE
        values, flags, _ = lcs_pair_survey(
            k0, k1, np.uint64(0), np.int64(samples), np.int64(hmax + 1),
            np.int64(hmax + 1), pA, aA, fA[0], fA[1], biased,
            pB, aB, fB[0], fB[1], biased, np.int64(cap),
            np.int64(DEFAULT_PAIR_BUDGET))
        n_censored = int(np.sum(flags >= 2))
        vals = values[flags < 2]
    else:
        raise errors.TreeLcsError(f"unknown statistic {statistic!r}")
    dist = EmpiricalDistribution(vals)
    surv = dist.survival(h_grid)
    counts = np.round(surv * dist.n).astype(np.int64)
    slope, defined = _loglog_slope(h_grid, surv, counts)
    return SurvivalCurve(h_grid=h_grid, survival=surv, counts=counts,
                         n_samples=samples, n_censored=n_censored,
                         slope=slope, slope_defined=defined,
                         distribution=dist)


def exact_height_survival_curve(law: OffspringLaw, h_grid) -> np.ndarray:
    """Exact P(Ht > h) on a grid (oracle for the height statistic)."""
    h_grid = np.asarray(h_grid, dtype=np.float64)
    hmax = int(math.floor(h_grid.max()))
    surv = height_survival(law, hmax + 1)
    return np.array([surv[int(math.floor(h)) + 1] for h in h_grid])


# ---------------------------------------------------------------------------
# height-vs-LCS closeness (the p_eps curve)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PEpsCurve:
    h_grid: np.ndarray
    p_hat: np.ndarray
    counts: np.ndarray
    n_samples: int
    n_censored: int


def estimate_p_eps(law: OffspringLaw, law2: OffspringLaw, eps: float,
                   h_grid, samples: int, rng: Rng,
                   cap: int = DEFAULT_NODE_CAP) -> PEpsCurve:
    """Frequency of {min(Ht, Ht') <= h and LCS_rooted > h^eps (min+1)}
    for an unconditioned pair, per grid point."""
    if eps <= 0:
        raise errors.TreeLcsError("eps must be positive")
    h_grid = np.asarray(h_grid, dtype=np.float64)
    k0, k1 = rng.child("p_eps").kernel_key()
    counts, n_cens = p_eps_survey(
        k0, k1, np.uint64(0), np.int64(samples), float(eps), h_grid,
        *law.sampler_table(), *law2.sampler_table(),
        np.int64(cap), np.int64(DEFAULT_PAIR_BUDGET))
    return PEpsCurve(h_grid=h_grid, p_hat=counts / samples, counts=counts,
                     n_samples=samples, n_censored=int(n_cens))


# ---------------------------------------------------------------------------
# Many-to-One identity
# ---------------------------------------------------------------------------

def _f_label(spec):
    return spec[0] if spec[0] == "one" else f"{spec[0]}<= {spec[1]}"


def many_to_one_check(law: OffspringLaw, n: int, f_spec, g_spec,
                      samples: int, rng: Rng):
    """(lhs, rhs, rel_error) for the level-n Many-to-One identity.

    lhs: Monte-Carlo E[sum over |u| = n of F(Cut_u tree, u) G(theta_u
    tree)] over plain samples.  rhs: m^n * E[F at the spine tip] * E[G],
    with the G factor computed exactly from the height recursion.
    F in {1, min(S, #Cut_u)}; G in {1, min(H, Ht(theta_u))}.
    """
    if f_spec[0] not in ("one", "cut_size") or g_spec[0] not in ("one",
                                                                 "height"):
        raise errors.TreeLcsError(f"unknown functional {f_spec}/{g_spec}")
    S = int(f_spec[1]) if f_spec[0] == "cut_size" else 12
    H = int(g_spec[1]) if g_spec[0] == "height" else 5
    combo = (2 if f_spec[0] == "cut_size" else 0) + \
            (1 if g_spec[0] == "height" else 0)
    k0, k1 = rng.child("m2o", n, S, H).kernel_key()
    sums, n_cens = m2o_lhs_survey(k0, k1, np.uint64(0), np.int64(samples),
                                  np.int64(n), np.int64(H), np.int64(S),
                                  *law.sampler_table(),
                                  np.int64(DEFAULT_NODE_CAP))
    lhs = float(sums[n - 1, combo] / samples)
    if f_spec[0] == "one":
        f_mean = 1.0
    else:
        s0, s1 = rng.child("m2o_spine", n, S, H).kernel_key()
        _, f_mean = m2o_spine_f_survey(s0, s1, np.uint64(0),
                                       np.int64(samples), np.int64(n),
                                       np.int64(S),
                                       *law.size_biased_table(),
                                       *law.sampler_table())
    g_mean = 1.0 if g_spec[0] == "one" else expected_truncated_height(law, H)
    rhs = (law.mean ** n) * f_mean * g_mean
    rel = abs(lhs - rhs) / max(abs(rhs), 1e-12)
    return lhs, rhs, rel


# ---------------------------------------------------------------------------
# big jumps
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BigJumpCurve:
    t_grid: np.ndarray
    exceedance: np.ndarray
    counts: np.ndarray
    n_samples: int
    decay_rate: float        # fitted rate r in P ~ exp(-r t)
    rate_defined: bool


def big_jumps_check(alpha: float, s: float, m: int, t_grid, step_law,
                    samples: int, rng: Rng) -> BigJumpCurve:
    """Exceedance curve of the capped sum S_m = sum_i min(X_i, s m^(1/a)).

    ``step_law`` is {"kind": "pareto"} (symmetrized, P(|X|>x) = x^-alpha,
    centred by symmetry) or {"kind": "tree_size", "law": OffspringLaw}
    (total progeny; the alpha = 1/2 case of the size law).
    """
    if not (0 < alpha < 1 or 1 < alpha < 2):
        raise errors.InvalidAlpha(f"alpha must be in (0,1) u (1,2), "
                                  f"got {alpha}")
    if s < 1:
        raise errors.TreeLcsError("the cap scale s must be >= 1")
    t_grid = np.asarray(t_grid, dtype=np.float64)
    scale = float(m) ** (1.0 / alpha)
    cutoff = s * scale
    k0, k1 = rng.child("bigjump").kernel_key()
    kind = step_law.get("kind")
    if kind == "pareto":
        sums = bigjump_pareto_sums(k0, k1, np.uint64(0), np.int64(samples),
                                   np.int64(m), float(alpha), float(cutoff))
    elif kind == "tree_size":
        law = step_law["law"]
        if abs(alpha - 0.5) > 1e-12:
            raise errors.InvalidAlpha(
                "tree-size steps realize alpha = 1/2 only")
        q = size_probabilities(law, int(math.ceil(cutoff)) + 1)
        cdf = np.cumsum(q[1:])
        sums = bigjump_table_sums(k0, k1, np.uint64(0), np.int64(samples),
                                  np.int64(m), float(cutoff), cdf)
    else:
        raise errors.TreeLcsError(f"unknown step law {step_law!r}")
    thresholds = t_grid * scale
    counts = np.array([(sums >= thr).sum() for thr in thresholds],
                      dtype=np.int64)
    exceed = counts / samples
    mask = counts > 0
    if mask.sum() >= 2:
        w = np.sqrt(counts[mask].astype(np.float64))
        coef = np.polyfit(t_grid[mask], np.log(exceed[mask]), 1, w=w)
        rate, defined = float(-coef[0]), True
    else:
        rate, defined = float("nan"), False
    return BigJumpCurve(t_grid=t_grid, exceedance=exceed, counts=counts,
                        n_samples=samples, decay_rate=rate,
                        rate_defined=defined)


def exceedance_closed_form(step_law, cutoff, thresholds) -> np.ndarray:
    """P(min(X, cutoff) >= t) for a single step, for the m = 1 check."""
    thresholds = np.asarray(thresholds, dtype=np.float64)
    kind = step_law.get("kind")
    out = np.empty(thresholds.size)
    if kind == "pareto":
        alpha = step_law["alpha"]
        for i, t in enumerate(thresholds):
            if t > cutoff:
                out[i] = 0.0
            elif t <= -cutoff:
                out[i] = 1.0
            else:
                a = abs(t)
                base = 0.5 * min(1.0, a ** -alpha)
                out[i] = base if t > 0 else 1.0 - base
        return out
    if kind == "tree_size":
        q = size_probabilities(step_law["law"], int(math.ceil(cutoff)) + 1)
        sizes = np.arange(q.size)
        capped = np.minimum(sizes, cutoff)
        for i, t in enumerate(thresholds):
            out[i] = q[capped >= t].sum() + max(0.0, 1.0 - q.sum())
        return out
    raise errors.TreeLcsError(f"unknown step law {step_law!r}")


# ---------------------------------------------------------------------------
# star lower bound (heavy-tail family)
# ---------------------------------------------------------------------------

def star_lower_bound(law: OffspringLaw, delta: int, samples: int,
                     rng: Rng) -> EstimateResult:
    """Certified LCS lower bound for two stars of delta i.i.d. subtrees:
    sum over h >= 1 of min(N_h, N'_h) where N_h counts subtrees of
    height >= h -- equivalently sum_i min(h_i, h'_i) over the descending
    rearrangements of the two height samples.

    Heights are drawn from the exact height law (inverse CDF on the
    generating-function recursion), which matches growing the subtrees
    and reading off their heights.
    """
    if delta < 1:
        raise errors.TreeLcsError("delta must be >= 1")
    h_table = max(1000, 4 * delta)
    surv = height_survival(law, h_table)
    rev = surv[::-1]  # ascending
    gen = rng.child("star").generator()
    vals = np.empty(samples)
    for i in range(samples):
        u = gen.random(size=(2, delta))
        idx = np.searchsorted(rev, u, side="right")
        hts = (surv.size - idx) - 1  # = min(Ht, h_table)
        a = np.sort(hts[0])[::-1]
        b = np.sort(hts[1])[::-1]
        vals[i] = np.minimum(a, b).sum()
    point = float(vals.mean())
    se = float(vals.std(ddof=1) / math.sqrt(samples)) if samples > 1 else 0.0
    return EstimateResult(point=point, ci_low=point - 1.96 * se,
                          ci_high=point + 1.96 * se, n_samples=samples,
                          n_censored=0, method="mean", seed=rng.master_seed)


def star_heights_to_bound(heights_a, heights_b) -> int:
    """The rearranged-minimum bound from two explicit height samples."""
    a = np.sort(np.asarray(heights_a))[::-1]
    b = np.sort(np.asarray(heights_b))[::-1]
    return int(np.minimum(a, b).sum())
