import itertools

import numpy as np
from hypothesis import given, strategies as st
from scipy import stats

from gacpd.core import Chromosome, GaConfig, validate
from gacpd.operators import (
    ParentPair, mutate, rank_probabilities, repair_spacing, selection_linear_rank, uniform_crossover,
)
from gacpd.population import initialize_population, random_taus


def test_rank_probabilities_closed_form():
    p = rank_probabilities(np.array([5.0, 1.0, 3.0, 2.0]))
    # worst (5.0) -> 0, then 3.0 -> 1/6, 2.0 -> 2/6, best 1.0 -> 3/6
    np.testing.assert_allclose(p, [0, 3 / 6, 1 / 6, 2 / 6])


def test_rank_ties_are_stable_and_degenerate_is_uniform():
    p = rank_probabilities(np.array([2.0, 2.0, 1.0]))
    np.testing.assert_allclose(p, [0, 1 / 3, 2 / 3])
    np.testing.assert_allclose(rank_probabilities(np.array([4.0, 4.0 + 1e-9, 4.0]), tol=1e-5), [1 / 3] * 3)
    inf_first = rank_probabilities(np.array([np.inf, 1.0, 2.0]))
    assert inf_first[0] == 0 and inf_first[1] > inf_first[2]


def test_two_members_always_pick_the_fitter_one(rng):
    members = [Chromosome(n=50, taus=(10,)), Chromosome(n=50, taus=(20,))]
    fit = np.array([3.0, 1.0])
    for _ in range(200):
        pair = selection_linear_rank(members, fit, rng)
        assert pair.dad == members[1]
        assert pair.fitness_dad <= pair.fitness_mom


def test_selection_frequencies_match_ranks(rng):
    members = [Chromosome(n=100, taus=(t,)) for t in range(10, 20)]
    fit = rng.permutation(10).astype(float)
    p = rank_probabilities(fit)
    counts = np.zeros(10)
    draws = 50_000
    for _ in range(draws):
        pair = selection_linear_rank(members, fit, rng)
        counts[pair.mom.taus[0] - 10] += 1
        counts[pair.dad.taus[0] - 10] += 1
    n = 2 * draws
    sd = np.sqrt(n * p * (1 - p)) + 1e-12
    assert np.all(np.abs(counts - n * p) <= 4 * sd)
    assert counts[np.argmax(fit)] == 0


def _pair(a, b, fa=2.0, fb=1.0, n=1000, orders=((), ())):
    return ParentPair(Chromosome(n=n, taus=a, orders=orders[0]), Chromosome(n=n, taus=b, orders=orders[1]), fa, fb)


def test_crossover_copy_branch_returns_dad(rng):
    cfg = GaConfig(n=1000, pcrossover=0.0)
    pair = _pair((100, 500), (300,))
    assert all(uniform_crossover(pair, cfg, rng) == pair.dad for _ in range(20))


def test_crossover_identical_parents_gives_subset(rng):
    cfg = GaConfig(n=1000, pcrossover=1.0)
    pair = _pair((250, 750), (250, 750))
    seen = {uniform_crossover(pair, cfg, rng).taus for _ in range(400)}
    assert seen == {(), (250,), (750,), (250, 750)}


def test_crossover_repair_never_keeps_close_pair(rng):
    cfg = GaConfig(n=1000, pcrossover=1.0, min_dist=5)
    pair = _pair((100, 500), (102, 500))
    for _ in range(500):
        t = uniform_crossover(pair, cfg, rng).taus
        assert not (100 in t and 102 in t)
        assert validate(Chromosome(n=1000, taus=t), cfg)


def test_repair_enumeration():
    # all 16 inclusion patterns of (100, 102, 500, 503) with minDist 5: earlier point wins
    union = (100, 102, 500, 503)
    for pattern in itertools.product([0, 1], repeat=4):
        chosen = [t for t, k in zip(union, pattern) if k]
        out = repair_spacing(chosen, 5, 10)
        expect = []
        for t in chosen:
            if not expect or t - expect[-1] >= 5:
                expect.append(t)
        assert out == tuple(expect)
    assert repair_spacing([10, 20, 30, 40], 1, 2) == (10, 20)


def test_crossover_orders_come_from_parents(rng):
    cfg = GaConfig(n=200, pcrossover=1.0, prange=((0, 3), (0, 3)), option="both")
    pair = _pair((50,), (80,), n=200, orders=((0, 3), (2, 1)))
    seen = {uniform_crossover(pair, cfg, rng).orders for _ in range(300)}
    assert seen == {(0, 3), (0, 1), (2, 3), (2, 1)}


def test_mutation_identity_when_disabled(rng):
    cfg = GaConfig(n=300, pmutation=0.0)
    c = Chromosome(n=300, taus=(50, 90))
    assert all(mutate(c, cfg, rng) is c for _ in range(20))


def test_mutation_degenerate_order_range(rng):
    cfg = GaConfig(n=300, pmutation=1.0, prange=((1, 1),), option="both")
    c = Chromosome(n=300, taus=(50,), orders=(1,))
    assert all(mutate(c, cfg, rng).orders == (1,) for _ in range(50))


def test_mutation_regeneration_matches_initializer(rng):
    cfg = GaConfig(n=500, pmutation=1.0, pchangepoint=0.01)
    c = Chromosome(n=500, taus=(123, 321))
    regenerated = [len(m.taus) for m in (mutate(c, cfg, rng) for _ in range(20_000)) if m.taus != c.taus]
    fresh = [len(random_taus(cfg, rng)) for _ in range(len(regenerated))]
    assert abs(len(regenerated) / 20_000 - 0.5) < 0.02
    assert stats.ks_2samp(regenerated, fresh).pvalue > 1e-3


@given(st.integers(0, 2**31), st.integers(1, 6), st.floats(0.0, 1.0), st.floats(0.0, 1.0))
def test_operators_preserve_validity(seed, min_dist, pc, pm):
    rng = np.random.default_rng(seed)
    cfg = GaConfig(n=150, pop_size=8, min_dist=min_dist, mmax=6, pchangepoint=0.05, pcrossover=pc,
                   pmutation=pm, prange=((0, 2), (0, 3)), option="both")
    pop = initialize_population(cfg, rng=rng)
    fit = rng.normal(size=len(pop))
    for _ in range(20):
        pair = selection_linear_rank(pop.members, fit, rng)
        assert pair.fitness_dad <= pair.fitness_mom
        child = mutate(uniform_crossover(pair, cfg, rng), cfg, rng)
        assert validate(child, cfg)
