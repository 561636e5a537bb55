import math

import numpy as np
import pytest

from treelcs import errors, exact_size_law, make_logtail_law, \
    make_standard_law, moments, p_moment
from treelcs._kernels import alias_draw_many
from treelcs.offspring import (expected_truncated_height, height_survival,
                               law_from_spec, size_probabilities)

from conftest import rng


def test_geometric_half_pmf_and_moments(geometric):
    k = np.arange(geometric.pmf.size)
    assert np.allclose(geometric.pmf, 0.5 ** (k + 1), atol=1e-12)
    assert abs(geometric.mean - 1.0) < 1e-9
    # sigma^2 = sum (k-1)^2 2^-(k+1) = 2; the mass-residual truncation at
    # 1e-12 costs ~1.5e-9 in the second moment, hence the 1e-8 tolerance
    direct = sum((i - 1.0) ** 2 * 2.0 ** -(i + 1) for i in range(200))
    assert abs(direct - 2.0) < 1e-12
    assert abs(geometric.variance - 2.0) < 1e-8
    assert geometric.critical and geometric.support_gcd == 1


def test_binary_half(binary):
    assert binary.pmf[0] == 0.5 and binary.pmf[2] == 0.5
    assert binary.variance == 1.0
    assert binary.support_gcd == 2
    assert binary.mean == 1.0


def test_poisson_one(poisson):
    assert abs(poisson.variance - 1.0) < 1e-9
    assert abs(poisson.mean - 1.0) < 1e-9
    mean, var, ms, bound = moments(poisson)
    assert abs(ms[2] - 2.0) < 1e-8  # E X^2 = lambda + lambda^2
    assert bound < 1e-10


def test_d_ary():
    for d in (2, 3, 5):
        law = make_standard_law("d_ary", d=d)
        assert abs(law.mean - 1.0) < 1e-12
        assert law.support_gcd == d
        assert abs(law.variance - (d - 1.0)) < 1e-12
    with pytest.raises(errors.TreeLcsError):
        make_standard_law("d_ary", d=1)


def test_custom_law_validation():
    with pytest.raises(errors.NegativeMass):
        make_standard_law("custom", pmf=[0.5, -0.1, 0.6])
    with pytest.raises(errors.NonSummable):
        make_standard_law("custom", pmf=[0.0, 0.0])
    law = make_standard_law("custom", pmf=[0.7, 0.1, 0.2])
    assert not law.critical  # mean 0.5
    sub = make_standard_law("custom", pmf=[0.25, 0.5, 0.25])
    assert sub.critical


def test_logtail_law(logtail):
    assert abs(logtail.mean - 1.0) < 1e-9
    assert logtail.pmf[0] > 0 and logtail.pmf[1] > 0
    assert logtail.critical
    assert np.isfinite(logtail.variance)
    # second moment finite (lambda > 1), any 2+kappa moment diverges
    assert p_moment(logtail, 2.0) < np.inf
    with pytest.raises(errors.Diverged):
        p_moment(logtail, 2.5)
    mean, var, ms, _ = moments(logtail)
    assert ms[3] is None and ms[4] is None and ms[2] is not None
    for lam in (0.5, 1.0, 2.0, 2.5):
        with pytest.raises(errors.Infeasible):
            make_logtail_law(lam)


def test_logtail_tail_shape(logtail):
    # the stored tail really is w k^-3 (ln k)^-lam
    k = np.arange(100, 2000)
    ratio = logtail.pmf[k] / (k ** -3.0 * np.log(k) ** -1.5)
    assert np.allclose(ratio, ratio[0], rtol=1e-9)


def test_exact_size_law_examples(binary, geometric):
    qb = exact_size_law(binary, 9)
    assert qb[1] == 0.5
    assert qb[2] == 0.0
    assert abs(qb[3] - 0.125) < 1e-15
    assert all(qb[n] == 0 for n in (2, 4, 6, 8))
    assert all(qb[n] > 0 for n in (1, 3, 5, 7, 9))
    qg = exact_size_law(geometric, 9)
    # pmf[1] carries the 1e-11-scale mean recentring, hence 1e-9 here
    assert abs(qg[2] - 1 / 8) < 1e-9
    assert abs(qg[4] - 5 / 128) < 1e-9
    assert qg[1:].sum() <= 1.0 + 1e-12
    with pytest.raises(errors.Overflow):
        exact_size_law(binary, 65)


def test_size_probabilities_closed_forms(binary, geometric, poisson):
    # dual route: closed forms vs the convolution oracle
    for law in (binary, geometric, poisson,
                make_standard_law("d_ary", d=3)):
        conv = exact_size_law(law, 60)
        closed = size_probabilities(law, 60)
        mask = conv > 0
        assert np.allclose(closed[:61][mask], conv[mask], rtol=1e-8)


def test_law_from_spec_roundtrip(geometric):
    law = law_from_spec({"kind": "geometric_half"})
    assert law.name == "geometric_half"
    law = law_from_spec({"kind": "d_ary", "d": 4})
    assert law.support_gcd == 4
    law = law_from_spec({"kind": "logtail", "lambda": 1.3})
    assert law.tail == ("logtail", 1.3)
    law = law_from_spec({"kind": "custom", "pmf": [0.5, 0.5]})
    assert law.pmf[1] == 0.5


def test_height_survival_exact(binary, geometric):
    # geometric: P(Ht >= h) = 1/(h+1) exactly
    s = height_survival(geometric, 200)
    assert np.allclose(s, 1.0 / (np.arange(201) + 1.0), atol=1e-12)
    # binary: hand-computed first values
    sb = height_survival(binary, 3)
    assert sb[0] == 1.0 and sb[1] == 0.5 and abs(sb[2] - 0.375) < 1e-15
    # E[min(Ht, H)] equals the direct sum of survivals
    e = expected_truncated_height(binary, 5)
    sb5 = height_survival(binary, 5)
    assert abs(e - sb5[1:6].sum()) < 1e-15


def test_alias_sampler_tv(geometric):
    # total variation on {0..50} below 0.002 at 1e6 draws
    prob, alias = geometric.sampler_table()
    k0, k1 = rng("alias-tv").kernel_key()
    draws = alias_draw_many(k0, k1, np.uint64(0), np.int64(10 ** 6),
                            prob, alias)
    emp = np.bincount(draws[draws <= 50], minlength=51) / draws.size
    pmf = np.zeros(51)
    pmf[:geometric.pmf.size] = geometric.pmf
    tv = 0.5 * np.abs(emp - pmf).sum()
    assert tv < 0.002


def test_moment_tail_guard_only_for_long_supports(binary):
    # finite-support laws never spuriously diverge
    for p in (1.0, 2.0, 3.0, 4.0):
        assert np.isfinite(p_moment(binary, p))
