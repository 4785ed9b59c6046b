"""Seeded trials, (K, n) sweeps and scheme comparisons."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, replace
from typing import Callable, Iterable, Sequence

import numpy as np

from .attacks import AttackSpec, apply
from .codec import HEADER_BITS, Scheme, StegParams, capacity_bits, extract, hide
from .latent import InfeasibleParametersError, build_grouping, check_feasible
from .mapper import InvertibleMapper, LogisticMapper, NoiseChannelMapper, ToyCouplingFlow
from .metrics import bpp, ie_accuracy

SWEEP_COLUMNS = ["scheme", "K", "n", "capacity_bits", "bpp", "ie_mean", "ie_min", "status"]


def make_mapper(choice: str, dimension: int, seed: int = 0) -> InvertibleMapper:
    """``toy``, ``identity`` or ``noise:SIGMA``."""
    if choice == "toy":
        return ToyCouplingFlow(dimension, seed=seed)
    if choice == "identity":
        return LogisticMapper(dimension)
    if choice.startswith("noise:"):
        return NoiseChannelMapper(dimension, float(choice.split(":", 1)[1]), seed=seed)
    raise ValueError(f"unknown mapper {choice!r}; expected toy, identity or noise:SIGMA")


def random_bits(rng: np.random.Generator, length: int) -> str:
    return "".join("1" if b else "0" for b in rng.integers(0, 2, length))


def feasibility_problem(params: StegParams) -> str | None:
    try:
        check_feasible(build_grouping(params.K, params.n), params.n_total)
    except InfeasibleParametersError as exc:
        return str(exc)
    if capacity_bits(params) < HEADER_BITS:
        return f"capacity {capacity_bits(params)} bits is below the {HEADER_BITS}-bit header"
    return None


def run_trial(
    params: StegParams,
    mapper: InvertibleMapper,
    seed: int,
    attack: AttackSpec | None = None,
    payload_bits: int | None = None,
) -> float:
    """Hide a random full-capacity message, optionally attack, extract; return IE_A."""
    rng = np.random.default_rng([seed, 0x5EC7])
    length = capacity_bits(params) - HEADER_BITS if payload_bits is None else payload_bits
    message = random_bits(rng, length)
    img = hide(message, params, mapper, seed)
    if attack is not None:
        img = apply(img, replace(attack, seed=attack.seed + seed))
    return ie_accuracy(message, extract(img, params, mapper).payload)


@dataclass(frozen=True)
class CellResult:
    scheme: str
    K: int
    n: int
    capacity_bits: int | None
    bpp: float | None
    ie_mean: float | None
    ie_min: float | None
    status: str

    def row(self) -> list:
        return [self.scheme, self.K, self.n, self.capacity_bits, self.bpp, self.ie_mean, self.ie_min, self.status]


def run_cell(
    scheme: Scheme | str,
    K: int,
    n: int,
    n_total: int,
    key: bytes,
    mapper: InvertibleMapper,
    trials: int,
    attack: AttackSpec | None = None,
    seed: int = 0,
) -> CellResult:
    scheme = Scheme(scheme)
    try:
        params = StegParams(K, n, n_total, key, scheme)
    except ValueError:
        return CellResult(scheme.value, K, n, None, None, None, None, "infeasible")
    cap = capacity_bits(params)
    if feasibility_problem(params):
        return CellResult(scheme.value, K, n, cap, bpp(cap, n_total, 1, 1), None, None, "infeasible")
    scores = [run_trial(params, mapper, seed + t, attack) for t in range(trials)]
    return CellResult(
        scheme.value, K, n, cap, bpp(cap, n_total, 1, 1), float(np.mean(scores)), float(np.min(scores)), "ok"
    )


def sweep(
    schemes: Iterable[Scheme | str],
    Ks: Sequence[int],
    ns: Sequence[int],
    n_total: int,
    key: bytes,
    mapper: InvertibleMapper,
    trials: int,
    attack: AttackSpec | None = None,
    seed: int = 0,
    progress: Callable[[CellResult], None] | None = None,
) -> list[CellResult]:
    results = []
    for scheme in schemes:
        for K in Ks:
            for n in ns:
                cell = run_cell(scheme, K, n, n_total, key, mapper, trials, attack, seed)
                if progress:
                    progress(cell)
                results.append(cell)
    return sorted(results, key=lambda c: (c.scheme, c.K, c.n))


def to_csv(results: Iterable[CellResult]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    for cell in results:
        writer.writerow(["" if v is None else v for v in cell.row()])
    return buf.getvalue()


def parse_grid(text: str) -> tuple[list[int], list[int]]:
    """``"2,4,8 x 16,32"`` -> ([2, 4, 8], [16, 32])."""
    parts = text.lower().split("x")
    if len(parts) != 2:
        raise ValueError(f"grid must look like 'K1,K2,.. x n1,n2,..', got {text!r}")
    Ks, ns = ([int(v) for v in p.replace(" ", "").split(",") if v] for p in parts)
    if not Ks or not ns:
        raise ValueError("grid needs at least one K and one n")
    return Ks, ns


def compare_schemes(
    K: int,
    n: int,
    n_total: int,
    key: bytes,
    mapper: InvertibleMapper,
    attack: AttackSpec | None,
    trials: int,
    seed: int = 0,
) -> dict[str, float]:
    """Mean IE_A per scheme over the same seeds."""
    out = {}
    for scheme in Scheme:
        params = StegParams(K, n, n_total, key, scheme)
        out[scheme.value] = float(np.mean([run_trial(params, mapper, seed + t, attack) for t in range(trials)]))
    return out
