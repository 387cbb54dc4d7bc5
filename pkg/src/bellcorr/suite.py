"""A quick self-check battery: analytic values the library must reproduce."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .algebra import diagonal_pair, qubit_pair
from .bell import OptimizerOptions, brute_force_beta, candidate_diagnostics, horodecki_beta, maximize_bell
from .cluster import (SHORT_DISTANCE_LIMIT, clustering_bound, exponential_cluster_bound,
                      short_distance_bound, verify_cluster_bound)
from .invariant import InvariantOptions, minimax_interval
from .states import random_product_state, random_state, singlet, werner

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class SuiteRow:
    name: str
    value: float
    expected: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(abs(self.value - self.expected) <= self.tolerance)


def run_suite(seed: int = 0, opts: OptimizerOptions | None = None) -> list[SuiteRow]:
    opts = opts or OptimizerOptions(seed=seed)
    A, B = qubit_pair()
    rows = []

    rep = maximize_bell(singlet(), A, B, opts)
    rows.append(SuiteRow("singlet_beta", rep.beta, SQRT2, 1e-5))
    rows.append(SuiteRow("singlet_brute_force", brute_force_beta(singlet(), A, B, 128), SQRT2, 5e-3))
    rows.append(SuiteRow("singlet_structure_residual", candidate_diagnostics(rep.candidate).max_residual(),
                         0.0, 1e-4))

    for w in (0.5, 0.8, 1.0):
        rows.append(SuiteRow(f"werner_{w:g}", maximize_bell(werner(w), A, B, opts).beta,
                             max(1.0, w * SQRT2), 1e-6))

    rng = np.random.default_rng(seed)
    gap = 0.0
    for _ in range(5):
        phi = random_state(4, int(rng.integers(2 ** 32)))
        gap = max(gap, abs(maximize_bell(phi, A, B, opts).beta - horodecki_beta(phi)))
    rows.append(SuiteRow("random_vs_closed_form", gap, 0.0, 1e-6))

    DA, DB = diagonal_pair()
    worst = 0.0
    for _ in range(5):
        phi = random_state(4, int(rng.integers(2 ** 32)))
        worst = max(worst, abs(maximize_bell(phi, DA, DB, opts).beta - 1.0))
    rows.append(SuiteRow("abelian_side_classical", worst, 0.0, 1e-9))

    prod = random_product_state((2, 2), int(rng.integers(2 ** 32)))
    rows.append(SuiteRow("product_state_classical", maximize_bell(prod, A, B, opts).beta, 1.0, 1e-6))

    chk = verify_cluster_bound(werner(0.8), A, B, 0.8, opts)
    rows.append(SuiteRow("werner_cluster_bound_slack", max(chk.beta - chk.bound, 0.0), 0.0, 1e-6))

    rows.append(SuiteRow("exponential_bound_at_ln2", exponential_cluster_bound(1.0, math.log(2.0)), 2.0, 0.0))
    rows.append(SuiteRow("short_distance_at_contact", short_distance_bound(1.0, 0.0), SQRT2, 1e-12))
    rows.append(SuiteRow("short_distance_limit", short_distance_bound(1.0, 60.0), SHORT_DISTANCE_LIMIT, 1e-9))
    rows.append(SuiteRow("clustering_bound_gamma0", clustering_bound(0.0), 1.0, 1e-12))
    rows.append(SuiteRow("clustering_bound_gamma1", clustering_bound(1.0), SQRT2, 1e-12))

    star, inf = minimax_interval(A, B, InvariantOptions(bell=opts, seed=seed))
    rows.append(SuiteRow("qubit_invariant_lower", star.value, 1.0, 2e-3))
    rows.append(SuiteRow("qubit_minimax_gap", inf.value - star.value, 0.0, 2e-3))
    return rows
