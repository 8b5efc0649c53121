"""Non-dominated sorting, crowding, variation operators and survival."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from noisymoea import (
    ConfigError,
    NoiseModel,
    Nsga2Config,
    bitwise_mutation,
    crowding_distances,
    non_dominated_sort,
    nsga2_generation,
    nsga2_init,
    one_point_crossover,
    survival_select,
    uniform_crossover,
)
from noisymoea.nsga2 import (
    assign_crowding,
    brute_force_layers,
    front_coverage,
    make_offspring,
    tournament_winners,
)
from noisymoea.objectives import ObjectiveId

INF = np.inf

fitness_arrays = st.integers(1, 64).flatmap(
    lambda m: st.lists(
        st.tuples(st.integers(0, 8), st.integers(0, 8)), min_size=m, max_size=m
    )
)


class TestNonDominatedSort:
    def test_single_front(self):
        f = np.array([[0, 3], [1, 2], [3, 0]])
        assert list(non_dominated_sort(f)) == [1, 1, 1]

    def test_chain(self):
        f = np.array([[3, 3], [2, 2], [1, 1]])
        assert list(non_dominated_sort(f)) == [1, 2, 3]

    def test_duplicates_share_rank(self):
        f = np.array([[2, 2], [2, 2], [1, 1]])
        assert list(non_dominated_sort(f)) == [1, 1, 2]

    def test_empty(self):
        assert non_dominated_sort(np.empty((0, 2))).size == 0

    @given(fitness_arrays)
    @settings(max_examples=200, deadline=None)
    def test_matches_brute_force(self, vs):
        f = np.array(vs)
        np.testing.assert_array_equal(non_dominated_sort(f), brute_force_layers(f))

    def test_matches_brute_force_random_batches(self):
        rng = np.random.default_rng(42)
        for _ in range(300):
            m = int(rng.integers(1, 65))
            f = rng.integers(0, 12, size=(m, 2))
            np.testing.assert_array_equal(non_dominated_sort(f), brute_force_layers(f))

    @given(fitness_arrays)
    @settings(max_examples=100, deadline=None)
    def test_layer_structure(self, vs):
        f = np.array(vs)
        ranks = non_dominated_sort(f)
        assert ranks.min() == 1
        # consecutive layer indices only
        assert set(np.unique(ranks)) == set(range(1, ranks.max() + 1))


class TestCrowdingDistances:
    def test_three_point_fixture(self):
        d = crowding_distances(np.array([[0, 4], [1, 2], [3, 0]]))
        assert d[0] == INF and d[2] == INF
        assert d[1] == pytest.approx(2.0, abs=1e-12)

    def test_small_layers_all_infinite(self):
        assert list(crowding_distances(np.array([[1, 1]]))) == [INF]
        assert list(crowding_distances(np.array([[1, 2], [2, 1]]))) == [INF, INF]

    def test_degenerate_all_equal_layer(self):
        d = crowding_distances(np.array([[3, 3]] * 5))
        assert np.isinf(d).sum() == 2 or np.isinf(d).sum() == 1
        finite = d[~np.isinf(d)]
        np.testing.assert_allclose(finite, 0.0, atol=1e-12)

    def test_interior_duplicates_get_zero(self):
        layer = np.array([[0, 4], [2, 2], [2, 2], [2, 2], [4, 0]])
        d = crowding_distances(layer)
        assert d[0] == INF and d[4] == INF
        # only the block-boundary copies can pick up positive gaps
        assert (d[1:4] > 0).sum() <= 2
        assert d[1:4].min() == 0.0

    def test_contributions_bounded_for_distinct_values(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            m = int(rng.integers(3, 12))
            f1 = rng.permutation(20)[:m]
            f2 = rng.permutation(20)[:m]
            d = crowding_distances(np.stack([f1, f2], axis=1))
            finite = d[~np.isinf(d)]
            assert (finite >= 0).all()
            assert (finite <= 2.0 + 1e-12).all()

    def test_distinct_vector_has_positive_member(self):
        # within a layer every distinct fitness vector keeps at least one
        # representative with positive crowding
        rng = np.random.default_rng(9)
        for _ in range(100):
            m = int(rng.integers(2, 40))
            k = int(rng.integers(2, 8))
            base = np.stack([np.arange(k), k - 1 - np.arange(k)], axis=1)
            layer = base[rng.integers(0, k, size=m)]
            if np.unique(layer, axis=0).shape[0] < 2:
                continue
            d = crowding_distances(layer)
            for vec in np.unique(layer, axis=0):
                members = (layer == vec).all(axis=1)
                assert d[members].max() > 0

    def test_assign_crowding_layerwise(self):
        f = np.array([[0, 4], [1, 2], [3, 0], [0, 0]])
        ranks = non_dominated_sort(f)
        d = assign_crowding(f, ranks)
        assert d[3] == INF
        assert d[1] == pytest.approx(2.0)


class TestTournament:
    def test_lower_rank_wins(self):
        ranks = np.array([1, 2])
        crowd = np.array([0.0, 99.0])
        comp = np.array([[0, 1], [1, 0]])
        out = tournament_winners(ranks, crowd, comp, np.array([0.9, 0.9]))
        assert list(out) == [0, 0]

    def test_crowding_breaks_rank_tie(self):
        ranks = np.array([1, 1])
        crowd = np.array([INF, 0.5])
        comp = np.array([[0, 1], [1, 0]])
        out = tournament_winners(ranks, crowd, comp, np.array([0.9, 0.9]))
        assert list(out) == [0, 0]

    def test_full_tie_coin_is_fair(self):
        trials = 10_000
        ranks = np.array([1, 1])
        crowd = np.array([1.0, 1.0])
        comp = np.tile([0, 1], (trials, 1))
        coins = np.random.default_rng(21).random(trials)
        wins_a = (tournament_winners(ranks, crowd, comp, coins) == 0).mean()
        assert abs(wins_a - 0.5) <= 0.02


class TestVariation:
    def test_one_point_structure(self):
        rng = np.random.default_rng(5)
        a = np.ones(12, dtype=np.uint8)
        b = np.zeros(12, dtype=np.uint8)
        for _ in range(50):
            c1, c2 = one_point_crossover(a, b, rng)
            cut = int(c1.sum())
            assert 1 <= cut <= 11
            assert (c1[:cut] == 1).all() and (c1[cut:] == 0).all()
            np.testing.assert_array_equal(c1 ^ c2, np.ones(12, dtype=np.uint8))

    def test_one_point_length_one(self):
        rng = np.random.default_rng(6)
        c1, c2 = one_point_crossover([1], [0], rng)
        assert (c1[0], c2[0]) == (1, 0)

    def test_uniform_children_complementary(self):
        rng = np.random.default_rng(7)
        a = np.ones(16, dtype=np.uint8)
        b = np.zeros(16, dtype=np.uint8)
        c1, c2 = uniform_crossover(a, b, rng)
        np.testing.assert_array_equal(c1 ^ c2, np.ones(16, dtype=np.uint8))

    def test_crossover_length_mismatch(self):
        rng = np.random.default_rng(8)
        with pytest.raises(ValueError):
            one_point_crossover([1, 0], [1], rng)

    def test_mutation_rate_extremes(self):
        rng = np.random.default_rng(9)
        x = np.array([1, 0, 1, 1], dtype=np.uint8)
        np.testing.assert_array_equal(bitwise_mutation(x, 0.0, rng), x)
        np.testing.assert_array_equal(bitwise_mutation(x, 1.0, rng), 1 - x)

    def test_mutation_flip_mean(self):
        n = 20
        rng = np.random.default_rng(10)
        x = np.zeros(n, dtype=np.uint8)
        flips = sum(int(bitwise_mutation(x, 1.0 / n, rng).sum()) for _ in range(100_000))
        assert abs(flips / 100_000 - 1.0) <= 0.05

    def test_mutation_bad_rate(self):
        with pytest.raises(ValueError):
            bitwise_mutation([1, 0], 1.5, np.random.default_rng(0))


class TestMakeOffspring:
    def test_offspring_count_and_shape(self):
        rng = np.random.default_rng(11)
        genos = rng.integers(0, 2, size=(10, 8), dtype=np.uint8)
        ranks = np.ones(10, dtype=np.int64)
        crowd = np.zeros(10)
        cfg = Nsga2Config(mu=10)
        off = make_offspring(genos, ranks, crowd, cfg, rng)
        assert off.shape == genos.shape
        assert set(np.unique(off)) <= {0, 1}

    def test_pc_zero_offspring_are_single_parent_mutants(self):
        rng = np.random.default_rng(12)
        # distinct constant rows so every offspring's source is identifiable
        genos = np.repeat(np.arange(6, dtype=np.uint8)[:, None] % 2, 30, axis=1)
        ranks = np.ones(6, dtype=np.int64)
        crowd = np.zeros(6)
        cfg = Nsga2Config(mu=6, pc=0.0, mutation_rate=0.0)
        off = make_offspring(genos, ranks, crowd, cfg, rng)
        for child in off:
            assert any((child == parent).all() for parent in genos)

    def test_pc_one_children_mix_parents(self):
        rng = np.random.default_rng(24)
        genos = np.vstack([np.ones(20, dtype=np.uint8), np.zeros(20, dtype=np.uint8)] * 3)
        ranks = np.ones(6, dtype=np.int64)
        crowd = np.zeros(6)
        cfg = Nsga2Config(mu=6, pc=1.0, mutation_rate=0.0)
        off = make_offspring(genos, ranks, crowd, cfg, rng)
        # a one-point child of an all-ones and an all-zeros parent has at
        # most one block boundary
        for child in off:
            assert np.abs(np.diff(child.astype(int))).sum() <= 1


class TestSurvivalSelect:
    def test_single_layer_top_by_crowding(self):
        # one front, distinct crowding: survivors are exactly the widest spread
        f = np.array([[0, 100], [1, 99], [3, 91], [6, 64], [10, 0]])
        rng = np.random.default_rng(13)
        keep, ranks, crowd = survival_select(f, 3, rng)
        assert (ranks == 1).all()
        assert set(keep.tolist()) == {0, 4, 3}  # two endpoints plus widest interior gap

    def test_boundary_tie_fair(self):
        # rank-1 pair always survives; the remaining slot is a coin flip
        # between two identical rank-2 candidates
        f = np.array([[3, 3], [4, 2], [1, 1], [1, 1]])
        counts = {2: 0, 3: 0}
        for seed in range(4000):
            keep, _, _ = survival_select(f, 3, np.random.default_rng(seed))
            (slot,) = set(keep.tolist()) - {0, 1}
            counts[slot] += 1
        frac = counts[2] / 4000
        assert abs(frac - 0.5) <= 0.05

    def test_noisy_individuals_form_top_layer(self):
        # mu=8: four offset-boosted candidates dominate twelve clean ones
        n = 10
        rng = np.random.default_rng(14)
        clean = np.array([[i, n - i] for i in range(12)])
        noisy = clean[:4] + (n + 1)
        r = np.vstack([noisy, clean])
        keep, ranks, _ = survival_select(r, 8, rng)
        assert (ranks[:4] == 1).all()
        assert set(range(4)) <= set(keep.tolist())

    def test_never_drops_rank1_inf_for_worse_rank(self):
        rng = np.random.default_rng(15)
        for _ in range(200):
            f = rng.integers(0, 6, size=(20, 2))
            keep, ranks, crowd = survival_select(f, 8, rng)
            kept = np.zeros(20, dtype=bool)
            kept[keep] = True
            protected = (ranks == 1) & np.isinf(crowd)
            if (protected & ~kept).any():
                assert (ranks[kept] == 1).all()

    def test_too_few_candidates(self):
        with pytest.raises(ValueError):
            survival_select(np.array([[1, 1]]), 2, np.random.default_rng(0))


class TestGenerationLoop:
    def test_init_counts_and_shapes(self):
        cfg = Nsga2Config(mu=12)
        state = nsga2_init(8, cfg, ObjectiveId.LOTZ, np.random.default_rng(16))
        assert state.genos.shape == (12, 8)
        assert state.evaluations == 12
        assert state.generation == 0

    def test_config_validation(self):
        with pytest.raises(ConfigError):
            nsga2_init(8, Nsga2Config(mu=7), ObjectiveId.LOTZ, np.random.default_rng(0))
        with pytest.raises(ConfigError):
            nsga2_init(8, Nsga2Config(mu=4, pc=1.5), ObjectiveId.LOTZ, np.random.default_rng(0))
        with pytest.raises(ConfigError):
            nsga2_init(0, Nsga2Config(mu=4), ObjectiveId.LOTZ, np.random.default_rng(0))

    def test_evaluations_increase_by_two_mu(self):
        cfg = Nsga2Config(mu=10)
        rng = np.random.default_rng(17)
        state = nsga2_init(8, cfg, ObjectiveId.OMM, rng)
        for g in range(5):
            state, metrics = nsga2_generation(
                state, ObjectiveId.OMM, NoiseModel.none(), cfg, rng
            )
            assert state.evaluations == 10 + 20 * (g + 1)
            assert metrics.evaluations == state.evaluations
            assert state.generation == g + 1

    def test_fixed_seed_reproduces_trace(self):
        cfg = Nsga2Config(mu=8)
        traces = []
        for _ in range(2):
            rng = np.random.default_rng(18)
            state = nsga2_init(10, cfg, ObjectiveId.LOTZ, rng)
            trace = []
            for _ in range(10):
                state, m = nsga2_generation(
                    state, ObjectiveId.LOTZ, NoiseModel.bernoulli(11, 0.3), cfg, rng
                )
                trace.append((m.coverage, state.genos.tobytes()))
            traces.append(trace)
        assert traces[0] == traces[1]

    def test_noise_free_lotz_max_sum_monotone(self):
        # with a large enough population the best LO+TZ value never drops
        n = 8
        cfg = Nsga2Config(mu=4 * (n + 1))
        rng = np.random.default_rng(19)
        state = nsga2_init(n, cfg, ObjectiveId.LOTZ, rng)
        best = int((state.true_f[:, 0] + state.true_f[:, 1]).max())
        for _ in range(40):
            state, _ = nsga2_generation(
                state, ObjectiveId.LOTZ, NoiseModel.none(), cfg, rng
            )
            new_best = int((state.true_f[:, 0] + state.true_f[:, 1]).max())
            assert new_best >= best
            best = new_best

    def test_front_coverage_counts(self):
        f = np.array([[0, 6], [0, 6], [2, 4], [1, 1], [6, 0]])
        assert front_coverage(f, 6) == 3
        assert front_coverage(np.array([[1, 1]]), 6) == 0

    def test_keep_r_stats_payload(self):
        cfg = Nsga2Config(mu=6)
        rng = np.random.default_rng(20)
        state = nsga2_init(6, cfg, ObjectiveId.OMM, rng)
        _, m = nsga2_generation(
            state, ObjectiveId.OMM, NoiseModel.bernoulli(7, 0.5), cfg, rng, keep_r_stats=True
        )
        assert m.r_noisy.shape == (12, 2)
        assert m.r_ranks.shape == (12,)
        assert m.r_crowding.shape == (12,)
        assert m.r_noise_flags.shape == (12,)
