import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from s2irt.latent import (
    ExtractionIntegrityError,
    InfeasibleParametersError,
    assign_group,
    boundary_margin,
    build_grouping,
    center_distance,
    choose_elements,
    regroup_recovered,
    sample_pool,
)
from s2irt.latent import probit

mpmath.mp.dps = 30


def phi_oracle(x):
    return float(mpmath.ncdf(x))


# sqrt(2) * erfinv(2p - 1) at p = 0.975, evaluated with mpmath at 40 digits
PROBIT_0975 = 1.959963984540054


def test_probit_median():
    assert probit(0.5) == 0.0


def test_probit_975():
    assert abs(probit(0.975) - PROBIT_0975) < 1e-9


@pytest.mark.parametrize("x", [-1.5, 0.3, 1.9])
def test_probit_inverts_phi(x):
    assert abs(probit(phi_oracle(x)) - x) < 1e-8


@given(st.floats(1e-12, 1 - 1e-12))
def test_probit_against_mpmath(p):
    expected = float(mpmath.sqrt(2) * mpmath.erfinv(2 * mpmath.mpf(p) - 1))
    assert abs(probit(p) - expected) <= 1e-9 * max(1.0, abs(expected))


@pytest.mark.parametrize("p", [0.0, 1.0, -0.1, 1.5])
def test_probit_domain(p):
    with pytest.raises(ValueError):
        probit(p)


def test_grouping_k2():
    spec = build_grouping(2, 1)
    assert np.allclose(spec.boundaries, [-2, 0, 2], atol=1e-15)


def test_grouping_k4_symmetric():
    spec = build_grouping(4, 1)
    assert abs(spec.boundaries[1] + spec.boundaries[3]) < 1e-12
    assert abs(spec.boundaries[2]) < 1e-12


def test_grouping_k3_equal_mass_oracle():
    b = build_grouping(3, 1).boundaries
    masses = [phi_oracle(b[i + 1]) - phi_oracle(b[i]) for i in range(3)]
    assert max(masses) - min(masses) < 1e-9


@pytest.mark.parametrize("K", [2, 3, 5, 8, 17, 64, 128])
def test_grouping_invariants(K):
    spec = build_grouping(K, 1)
    b, c = spec.boundaries, spec.centers
    assert b[0] == -2 and b[-1] == 2
    assert np.all(np.diff(b) > 0)
    masses = np.diff(stats.norm.cdf(b))
    assert masses.max() - masses.min() < 1e-9
    assert np.all((b[:-1] < c) & (c < b[1:]))


def test_grouping_config_errors():
    with pytest.raises(InfeasibleParametersError):
        build_grouping(1, 4)
    with pytest.raises(InfeasibleParametersError):
        build_grouping(4, 0)


def test_assign_group_conventions():
    spec = build_grouping(2, 1)
    assert assign_group(0.0, spec) == 1
    assert assign_group(-3.0, spec) == 0
    assert assign_group(5.0, spec) == 1
    spec8 = build_grouping(8, 1)
    assert assign_group(spec8.boundaries[3], spec8) == 3
    assert assign_group(2.0, spec8) == 7


@given(st.lists(st.floats(-10, 10), min_size=2, max_size=50), st.integers(2, 40))
def test_assign_group_total_and_monotone(vs, K):
    spec = build_grouping(K, 1)
    vs = sorted(vs)
    groups = [assign_group(v, spec) for v in vs]
    assert all(0 <= g < K for g in groups)
    assert groups == sorted(groups)


def test_sample_pool_deterministic():
    spec = build_grouping(8, 32)
    a, b = sample_pool(spec, 3072, 7), sample_pool(spec, 3072, 7)
    assert np.array_equal(a.values, b.values)
    assert np.array_equal(a.chosen, b.chosen)
    assert not np.array_equal(a.values, sample_pool(spec, 3072, 8).values)


def test_sample_pool_group_counts_over_seeds():
    spec = build_grouping(8, 32)
    for seed in range(200):
        pool = sample_pool(spec, 3072, seed)
        counts = np.bincount(pool.group_of, minlength=8)
        assert counts.min() >= 32
        assert np.all(assign_group(pool.values[pool.chosen], spec) == np.arange(8)[:, None])


def test_chosen_are_nearest_to_center():
    spec = build_grouping(8, 32)
    pool = sample_pool(spec, 3072, 3)
    dist = center_distance(pool.values, pool.group_of, spec)
    chosen = set(pool.chosen.ravel().tolist())
    for g in range(8):
        members = np.flatnonzero(pool.group_of == g)
        worst_chosen = dist[pool.chosen[g]].max()
        rest = [i for i in members if i not in chosen]
        assert worst_chosen <= dist[rest].min()
        # rows are ordered nearest first
        assert np.all(np.diff(dist[pool.chosen[g]]) >= 0)


def test_out_of_range_never_chosen():
    spec = build_grouping(4, 2)
    values = np.array([-3.0, -2.5, 2.5, 3.0] + list(np.linspace(-1.9, 1.9, 40)))
    pool = choose_elements(values, spec)
    assert not set(pool.chosen.ravel().tolist()) & {0, 1, 2, 3}


def test_chosen_ties_broken_by_index():
    spec = build_grouping(2, 1)
    c = spec.centers[0]
    values = np.array([c, c, spec.centers[1], 0.5])
    pool = choose_elements(values, spec)
    assert pool.chosen[0, 0] == 0


def test_sample_pool_infeasible():
    spec = build_grouping(64, 32)
    with pytest.raises(InfeasibleParametersError):
        sample_pool(spec, 3072, 0)


def test_deficient_group_named():
    spec = build_grouping(2, 3)
    values = np.array([-1.0, -0.5, -0.2, 0.5, 0.7])
    with pytest.raises(InfeasibleParametersError, match="group 1"):
        choose_elements(values, spec)


def test_chosen_values_pass_truncated_normal_ks():
    spec = build_grouping(8, 32)
    lo, hi = -2.0, 2.0
    truncated = stats.truncnorm(lo, hi)
    for seed in range(100):
        pool = sample_pool(spec, 3072, seed)
        assert stats.kstest(pool.values[pool.chosen.ravel()], truncated.cdf).pvalue > 0.01


def test_pool_values_pass_normal_ks():
    pool = sample_pool(build_grouping(8, 32), 3072, 11)
    assert stats.kstest(pool.values, "norm").pvalue > 0.01


def test_chosen_margins_positive():
    spec = build_grouping(8, 32)
    pool = sample_pool(spec, 3072, 0)
    v = pool.values[pool.chosen.ravel()]
    assert boundary_margin(v, assign_group(v, spec), spec).min() > 0.04


def _constructed(spec, seed):
    pool = sample_pool(spec, spec.K * spec.n * 12, seed)
    rng = np.random.default_rng(seed)
    groups = np.repeat(np.arange(spec.K), spec.n)
    rng.shuffle(groups)
    values = np.empty(spec.K * spec.n)
    for g in range(spec.K):
        values[groups == g] = pool.values[pool.chosen[g]]
    return values, groups


def test_regroup_unperturbed_is_exact():
    spec = build_grouping(8, 32)
    for seed in range(20):
        values, groups = _constructed(spec, seed)
        assert np.array_equal(regroup_recovered(values, spec), groups)


def test_regroup_repairs_single_nudge():
    spec = build_grouping(8, 32)
    values, groups = _constructed(spec, 1)
    idx = int(np.flatnonzero(groups == 3)[0])
    values[idx] = spec.boundaries[4] + 1e-3  # pushed just into group 4
    out = regroup_recovered(values, spec)
    assert np.all(np.bincount(out, minlength=8) == 32)
    assert np.array_equal(out, groups)


def test_regroup_all_zeros_k2():
    spec = build_grouping(2, 2)
    out = regroup_recovered(np.zeros(4), spec)
    assert out.tolist() == [0, 0, 1, 1]


@settings(max_examples=50)
@given(st.lists(st.floats(-4, 4), min_size=12, max_size=12))
def test_regroup_always_balanced(vs):
    spec = build_grouping(3, 4)
    out = regroup_recovered(np.array(vs), spec)
    assert np.all(np.bincount(out, minlength=3) == 4)


def test_regroup_rejects_bad_input():
    spec = build_grouping(2, 2)
    with pytest.raises(ExtractionIntegrityError):
        regroup_recovered(np.array([0.0, np.nan, 1.0, 2.0]), spec)
    with pytest.raises(ExtractionIntegrityError):
        regroup_recovered(np.zeros(5), spec)
