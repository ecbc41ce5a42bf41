"""The seeded randomized property suite behind the selftest command."""

import random

from supergeo.selfcheck import (
    BUDGET,
    DEFAULT_SEED,
    random_elem,
    random_supermatrix,
    random_unit,
    run_all,
)


def test_generators_respect_parity():
    rng = random.Random(3)
    for _ in range(50):
        assert random_elem(rng, parity=0).is_even()
        assert random_elem(rng, parity=1).is_odd()
        u = random_unit(rng, parity=0)
        assert u.is_even()
        assert len(u.body().terms) == 1
        random_supermatrix(rng)  # construction itself asserts block parity


def test_run_all_small_budget_passes():
    rep = run_all(seed=11, total_cases=350)
    assert rep["ok"] is True
    assert {p["name"] for p in rep["properties"]} == set(BUDGET)
    assert all(p["failures"] == [] for p in rep["properties"])


def test_run_all_is_deterministic():
    a = run_all(seed=DEFAULT_SEED, total_cases=350)
    b = run_all(seed=DEFAULT_SEED, total_cases=350)
    a.pop("elapsed_seconds")
    b.pop("elapsed_seconds")
    assert a == b
