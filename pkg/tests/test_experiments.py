import csv
import io

import numpy as np
import pytest

from s2irt.attacks import AttackSpec
from s2irt.codec import StegParams
from s2irt.experiments import (
    SWEEP_COLUMNS,
    make_mapper,
    parse_grid,
    run_cell,
    run_trial,
    sweep,
    to_csv,
)
from s2irt.mapper import LogisticMapper, NoiseChannelMapper, ToyCouplingFlow

KEY = bytes(range(32))


@pytest.fixture(scope="module")
def noise_sweep():
    return sweep(["s2irt", "se"], [2, 4, 8, 16], [4, 16, 32], 3072, KEY, NoiseChannelMapper(3072, 0.05), trials=10)


def by_cell(results):
    return {(r.scheme, r.K, r.n): r for r in results}


def test_make_mapper():
    assert isinstance(make_mapper("toy", 64), ToyCouplingFlow)
    assert isinstance(make_mapper("identity", 64), LogisticMapper)
    m = make_mapper("noise:0.25", 64)
    assert isinstance(m, NoiseChannelMapper) and m.sigma == 0.25
    with pytest.raises(ValueError):
        make_mapper("glow", 64)


def test_parse_grid():
    assert parse_grid("2,4,8 x 16,32") == ([2, 4, 8], [16, 32])
    assert parse_grid("8x32") == ([8], [32])
    with pytest.raises(ValueError):
        parse_grid("2,4")


def test_infeasible_cells_kept(noise_sweep):
    cells = by_cell(noise_sweep)
    assert len(cells) == 2 * 4 * 3
    assert cells[("s2irt", 2, 4)].status == "infeasible"
    assert cells[("s2irt", 8, 32)].status == "ok"
    assert run_cell("s2irt", 64, 64, 3072, KEY, LogisticMapper(3072), 1).status == "infeasible"


def test_rows_sorted(noise_sweep):
    keys = [(r.scheme, r.K, r.n) for r in noise_sweep]
    assert keys == sorted(keys)


def test_capacity_monotone_in_k_and_n(noise_sweep):
    cells = by_cell(noise_sweep)
    for scheme in ("s2irt", "se"):
        for n in (4, 16, 32):
            caps = [cells[(scheme, K, n)].capacity_bits for K in (2, 4, 8, 16)]
            assert caps == sorted(caps)
        for K in (2, 4, 8, 16):
            caps = [cells[(scheme, K, n)].capacity_bits for n in (4, 16, 32)]
            assert caps == sorted(caps)


def test_accuracy_falls_with_k_under_noise(noise_sweep):
    for scheme in ("s2irt", "se"):
        means = []
        for K in (2, 4, 8, 16):
            vals = [r.ie_mean for r in noise_sweep if r.scheme == scheme and r.K == K and r.status == "ok"]
            if vals:
                means.append(np.mean(vals))
        assert all(a >= b for a, b in zip(means, means[1:]))
        assert means[-1] < 1.0


def test_se_at_least_s2irt_under_noise(noise_sweep):
    cells = by_cell(noise_sweep)
    se, s2 = [], []
    for (scheme, K, n), r in cells.items():
        if scheme == "se" and r.status == "ok":
            se.append(r.ie_mean)
            s2.append(cells[("s2irt", K, n)].ie_mean)
            # with only a few blocks a single SE flip spoils a large share of bits
            if n >= 16:
                assert r.ie_mean >= cells[("s2irt", K, n)].ie_mean
    assert np.mean(se) >= np.mean(s2)


def test_csv_header_and_rows(noise_sweep):
    text = to_csv(noise_sweep)
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == SWEEP_COLUMNS
    assert len(rows) == 1 + len(noise_sweep)
    infeasible = [r for r in rows[1:] if r[-1] == "infeasible"]
    assert infeasible and all(r[5] == "" for r in infeasible)


def test_attack_error_monotone_in_magnitude():
    grids = {
        "intensity-change": [0, 0.02, 0.05, 0.1],
        "contrast-enhancement": [0, 0.02, 0.05, 0.1],
        "salt-pepper": [0, 0.005, 0.01, 0.02],
        "gaussian-noise": [0, 0.001, 0.005, 0.01],
    }
    flow = ToyCouplingFlow(3072)
    params = StegParams(8, 32, 3072, KEY, "s2irt")
    for kind, mags in grids.items():
        errors = [
            1 - np.mean([run_trial(params, flow, t, AttackSpec(kind, m, 1000)) for t in range(50)]) for m in mags
        ]
        assert all(a <= b for a, b in zip(errors, errors[1:])), (kind, errors)
