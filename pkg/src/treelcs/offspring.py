"""Offspring distributions: construction, validation, and exact analysis.

A law is stored as a finite pmf vector (infinite supports are truncated
where the cumulative residual drops below 1e-12, renormalized, and
mean-recentred by adjusting pmf[1] so criticality holds to float
precision -- the cycle-lemma sampler needs the mean to be exactly 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import errors
from ._rng import build_alias

MASS_TOL = 1e-9
TRUNCATION_RESIDUAL = 1e-12

STANDARD_KINDS = ("geometric_half", "poisson_one", "binary_half", "d_ary",
                  "logtail", "custom")


@dataclass(frozen=True, eq=False)
class OffspringLaw:
    """A probability law on the nonnegative integers with cached analysis.

    ``variance`` is the offspring variance in the branching sense,
    sum_k (k-1)^2 pmf[k], which equals Var(X) when the mean is 1.
    """

    pmf: np.ndarray
    support_gcd: int
    mean: float
    variance: float
    tail_truncation: int
    critical: bool
    name: str
    spec: dict = field(default_factory=dict)
    # asymptotic tail annotation for moment divergence tests:
    # None (finite support / superpolynomial decay) or ("logtail", lam)
    tail: tuple | None = None
    _tables: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.pmf.setflags(write=False)

    # -- sampling tables ---------------------------------------------------

    def sampler_table(self):
        """Alias tables (prob, alias) for the offspring law itself."""
        if "self" not in self._tables:
            self._tables["self"] = build_alias(self.pmf)
        return self._tables["self"]

    def root_biased_table(self):
        """Alias tables for the root law (k+1) mu(k+1) of root-biased trees."""
        if "root" not in self._tables:
            k = np.arange(1, self.pmf.size)
            law = k * self.pmf[1:]
            total = law.sum()
            if not self.critical:
                raise errors.NotCritical(
                    "root-biased trees need a critical law")
            self._tables["root"] = build_alias(law / total)
        return self._tables["root"]

    def size_biased_table(self):
        """Alias tables for the spine offspring law k mu(k) / m."""
        if "sbias" not in self._tables:
            k = np.arange(self.pmf.size)
            law = k * self.pmf
            self._tables["sbias"] = build_alias(law / law.sum())
        return self._tables["sbias"]

    def generating_function(self, s):
        """phi(s) = sum_k pmf[k] s^k (scalar, Horner form)."""
        acc = 0.0
        for p in self.pmf[::-1]:
            acc = acc * s + p
        return acc


def _support_gcd(pmf):
    g = 0
    for k in range(1, pmf.size):
        if pmf[k] > 0.0:
            g = math.gcd(g, k)
    return g if g > 0 else 1


def _finalize(raw, name, spec, tail=None, recenter=True):
    pmf = np.asarray(raw, dtype=np.float64)
    if np.any(pmf < 0):
        raise errors.NegativeMass(f"negative pmf entry in {name}")
    total = pmf.sum()
    if not np.isfinite(total) or total <= 0:
        raise errors.NonSummable(f"pmf of {name} does not sum to a finite "
                                 "positive mass")
    # truncate where the cumulative residual is below threshold
    resid = total - np.cumsum(pmf)
    keep = int(np.searchsorted(resid < TRUNCATION_RESIDUAL, True)) + 1
    keep = max(keep, 2)
    pmf = pmf[:keep].copy()
    pmf /= pmf.sum()
    mean = float(np.arange(pmf.size) @ pmf)
    if recenter and abs(mean - 1.0) < 1e-6:
        # nudge pmf[1] so the first moment is exactly 1
        pmf[1] += 1.0 - mean
        if pmf[1] < 0:
            raise errors.Infeasible(f"cannot recentre {name} at pmf[1]")
        mean = float(np.arange(pmf.size) @ pmf)
    variance = float(((np.arange(pmf.size) - 1.0) ** 2) @ pmf)
    critical = abs(mean - 1.0) <= MASS_TOL and pmf[0] > 0
    return OffspringLaw(pmf=pmf, support_gcd=_support_gcd(pmf), mean=mean,
                        variance=variance, tail_truncation=pmf.size - 1,
                        critical=critical, name=name, spec=spec, tail=tail)


def make_standard_law(kind, d=None, pmf=None) -> OffspringLaw:
    """Build one of the named laws, or validate a custom pmf.

    geometric_half: mu(k) = 2^-(k+1)   (uniform plane trees when conditioned)
    poisson_one:    mu(k) = e^-1 / k!  (uniform labelled trees)
    binary_half:    mu = {0: 1/2, 2: 1/2}
    d_ary:          mu = {0: 1 - 1/d, d: 1/d}, d >= 2
    custom:         arbitrary nonnegative summable pmf; the criticality
                    flag is set iff its mean is 1 within tolerance.
    """
    if kind == "geometric_half":
        k = np.arange(64)
        return _finalize(0.5 ** (k + 1), kind, {"kind": kind})
    if kind == "poisson_one":
        lg = np.array([math.lgamma(i + 1) for i in range(64)])
        return _finalize(np.exp(-1.0 - lg), kind, {"kind": kind})
    if kind == "binary_half":
        return _finalize([0.5, 0.0, 0.5], kind, {"kind": kind})
    if kind == "d_ary":
        if d is None or d < 2:
            raise errors.TreeLcsError("d_ary law needs d >= 2")
        raw = np.zeros(d + 1)
        raw[0] = 1.0 - 1.0 / d
        raw[d] = 1.0 / d
        return _finalize(raw, f"d_ary({d})", {"kind": kind, "d": int(d)})
    if kind == "custom":
        if pmf is None:
            raise errors.TreeLcsError("custom law needs a pmf")
        return _finalize(pmf, "custom", {"kind": kind,
                                         "pmf": [float(x) for x in pmf]},
                         recenter=False)
    raise errors.TreeLcsError(f"unknown law kind {kind!r}")


def make_logtail_law(lam: float) -> OffspringLaw:
    """Critical law with tail mu(k) = w k^-3 (ln k)^-lam for k >= 2.

    The weight w and the atoms at 0 and 1 are solved from the two linear
    constraints (total mass 1, mean 1) with positivity; w is halved until
    both atoms are positive.  Finite variance needs 1 < lam < 2, which is
    also when the law escapes every (2+kappa)-th moment.
    """
    if not (1.0 < lam < 2.0):
        raise errors.Infeasible(f"logtail law needs lambda in (1,2), "
                                f"got {lam}")
    kmax = 1 << 17
    while True:
        k = np.arange(2, kmax, dtype=np.float64)
        tail = k ** -3.0 * np.log(k) ** -lam
        # analytic bound on the omitted mass beyond kmax
        resid = kmax ** -2.0 / (2.0 * math.log(kmax) ** lam)
        if resid < TRUNCATION_RESIDUAL:
            break
        kmax *= 2
    s0 = tail.sum()
    s1 = (k * tail).sum()
    w = 1.0
    while w > 1e-12:
        p1 = 1.0 - w * s1
        p0 = w * (s1 - s0)
        if p0 > 0 and p1 > 0:
            raw = np.concatenate(([p0, p1], w * tail))
            return _finalize(raw, f"logtail({lam})",
                             {"kind": "logtail", "lambda": float(lam)},
                             tail=("logtail", float(lam)))
        w *= 0.5
    raise errors.Infeasible("no positive solution for the logtail atoms")


def law_from_spec(spec: dict) -> OffspringLaw:
    """Build a law from its JSON harness spec, e.g. {"kind": "d_ary", "d": 3}."""
    kind = spec.get("kind")
    if kind == "logtail":
        return make_logtail_law(spec["lambda"])
    if kind == "custom":
        return make_standard_law("custom", pmf=spec["pmf"])
    if kind == "d_ary":
        return make_standard_law("d_ary", d=spec["d"])
    return make_standard_law(kind)


# ---------------------------------------------------------------------------
# exact size law (Kemperman)
# ---------------------------------------------------------------------------

def exact_size_law(law: OffspringLaw, n_max: int) -> np.ndarray:
    """P(#tree = n) for 1 <= n <= n_max via P(#tree=n) = P(Y_n = -1)/n.

    Index 0 of the returned vector is unused (kept 0).  The walk step is
    X - 1, so P(Y_n = -1) is the n-fold convolution of the offspring law
    evaluated at n - 1; values of X above n_max - 1 cannot contribute,
    which keeps every convolution at length n_max.
    """
    if n_max > 64:
        raise errors.Overflow("exact_size_law is an oracle for n_max <= 64")
    out = np.zeros(n_max + 1)
    step = law.pmf[:n_max].copy()
    conv = step.copy()
    if n_max >= 1:
        out[1] = conv[0]  # P(X_1 = 0)
    for n in range(2, n_max + 1):
        conv = np.convolve(conv, step)[:n_max]
        out[n] = conv[n - 1] / n
    if np.any(~np.isfinite(out)):
        raise errors.Overflow("size-law convolution lost precision")
    return out


def size_probabilities(law: OffspringLaw, cap: int) -> np.ndarray:
    """P(#tree = n) for n up to ``cap`` (closed forms for the named laws).

    Used by samplers and estimators that need the size law far beyond the
    64-term oracle range of :func:`exact_size_law`.
    """
    name = law.name
    out = np.zeros(cap + 1)
    if name == "geometric_half":
        # uniform plane trees: q_n = Catalan(n-1) 2^(1-2n)
        for i in range(1, cap + 1):
            lc = math.lgamma(2 * i - 1) - 2 * math.lgamma(i) - math.log(i)
            out[i] = math.exp(lc + (1 - 2 * i) * math.log(2.0))
        return out
    if name == "poisson_one":
        # Borel distribution: q_n = e^-n n^(n-1) / n!
        for i in range(1, cap + 1):
            out[i] = math.exp(-i + (i - 1) * math.log(i)
                              - math.lgamma(i + 1))
        return out
    if name == "binary_half" or name.startswith("d_ary"):
        d = 2 if name == "binary_half" else law.spec["d"]
        p_d = float(law.pmf[d])
        p_0 = float(law.pmf[0])
        for i in range(1, cap + 1):
            if (i - 1) % d != 0:
                continue
            j = (i - 1) // d
            lb = (math.lgamma(i + 1) - math.lgamma(j + 1)
                  - math.lgamma(i - j + 1))
            out[i] = math.exp(lb + j * math.log(p_d)
                              + (i - j) * math.log(p_0)) / i
        return out
    if cap <= 64:
        return exact_size_law(law, cap)
    raise errors.Overflow(f"no closed-form size law for {name} at cap={cap}")


# ---------------------------------------------------------------------------
# moments
# ---------------------------------------------------------------------------

def p_moment(law: OffspringLaw, p: float) -> float:
    """sum_k k^p pmf[k], guarded by a tail-summability test.

    For laws with an annotated polynomial tail the test is analytic; for
    long numeric supports the fitted log-log slope of k^p pmf[k] over the
    top decade must fall below -1.  Raises Diverged otherwise.
    """
    if law.tail is not None and law.tail[0] == "logtail":
        lam = law.tail[1]
        # sum k^(p-3) (ln k)^-lam converges iff p < 2, or p == 2 and lam > 1
        if p > 2.0 or (p == 2.0 and lam <= 1.0):
            raise errors.Diverged(
                f"moment p={p} diverges for the logtail({lam}) law")
    k = np.arange(law.pmf.size, dtype=np.float64)
    terms = np.where(k > 0, k ** p, 0.0) * law.pmf
    if law.pmf.size > 256:
        hi = law.pmf.size - 1
        lo = max(2, hi // 10)
        ks = np.arange(lo, hi + 1, dtype=np.float64)
        ts = terms[lo:hi + 1]
        mask = ts > 0
        if mask.sum() > 10:
            slope = np.polyfit(np.log(ks[mask]), np.log(ts[mask]), 1)[0]
            if slope >= -1.0:
                raise errors.Diverged(
                    f"tail index check failed for p={p}: fitted slope "
                    f"{slope:.3f} >= -1")
    return float(terms.sum())


def moments(law: OffspringLaw):
    """(mean, variance, {p: p-th moment for p = 1..4}, truncation bound).

    Individual p-moments that fail the tail test are reported as None;
    ask :func:`p_moment` directly to get the Diverged error.
    """
    ms = {}
    for p in (1, 2, 3, 4):
        try:
            ms[p] = p_moment(law, p)
        except errors.Diverged:
            ms[p] = None
    trunc_bound = float(max(0.0, 1.0 - law.pmf.sum()) + TRUNCATION_RESIDUAL)
    return law.mean, law.variance, ms, trunc_bound


# ---------------------------------------------------------------------------
# exact height law
# ---------------------------------------------------------------------------

@lru_cache(maxsize=64)
def height_survival(law: OffspringLaw, h_max: int) -> np.ndarray:
    """Exact P(Ht(tree) >= h) for h = 0..h_max via x_h = phi(x_{h-1}).

    This is the independent oracle for every height statistic: survival
    curves, the 2/sigma^2 tail limit, and E[min(Ht, H)] in the
    Many-to-One checks.
    """
    surv = np.empty(h_max + 1)
    surv[0] = 1.0
    x = 0.0
    for h in range(1, h_max + 1):
        x = law.generating_function(x)
        surv[h] = 1.0 - x
    surv.setflags(write=False)
    return surv


def expected_truncated_height(law: OffspringLaw, H: int) -> float:
    """E[min(Ht, H)] = sum_{h<H} P(Ht > h), exact."""
    surv = height_survival(law, H)
    # P(Ht > h) = P(Ht >= h+1)
    return float(surv[1:H + 1].sum())
