import math

import numpy as np
import pytest

from cbce.betting import kt_potential
from cbce.sleeping import SleepingCoinBetting, sleeping_regret_bound


def random_masks(rng, horizon, n_experts):
    """Awake masks, nonempty each round, each expert awake at least once."""
    masks = rng.random((horizon, n_experts)) < rng.uniform(0.2, 0.9)
    for t in range(horizon):
        if not masks[t].any():
            masks[t, rng.integers(n_experts)] = True
    for i in range(n_experts):
        if not masks[:, i].any():
            masks[rng.integers(horizon), i] = True
    return masks


class TestDecide:
    def test_single_awake_expert_gets_point_mass(self):
        engine = SleepingCoinBetting(n_experts=3)
        p = engine.decide(awake=[1])
        assert p[1] == 1.0 and p[0] == 0.0 and p[2] == 0.0

    def test_cold_start_falls_back_to_prior(self):
        engine = SleepingCoinBetting(n_experts=2)
        assert np.allclose(engine.decide(), [0.5, 0.5])

    def test_nonuniform_prior_fallback(self):
        engine = SleepingCoinBetting(n_experts=2, prior=[3.0, 1.0])
        assert np.allclose(engine.decide(), [0.75, 0.25])

    def test_hand_traced_second_round(self):
        # Round 1: both cold, uniform; losses (0, 1) with learner loss 0.5
        # give expert 0 coin 0.5 and expert 1 coin 0, so round 2 puts all
        # mass on expert 0.
        engine = SleepingCoinBetting(n_experts=2)
        p1 = engine.decide()
        assert np.allclose(p1, [0.5, 0.5])
        engine.update(np.array([0.0, 1.0]), learner_loss=0.5)
        p2 = engine.decide()
        assert np.allclose(p2, [1.0, 0.0])

    def test_empty_awake_set_rejected(self):
        engine = SleepingCoinBetting(n_experts=2)
        with pytest.raises(ValueError):
            engine.decide(awake=[])

    def test_no_experts_rejected(self):
        with pytest.raises(ValueError):
            SleepingCoinBetting().decide()

    def test_sleeping_support_is_zero(self):
        rng = np.random.default_rng(5)
        engine = SleepingCoinBetting(n_experts=6)
        for _ in range(60):
            mask = random_masks(rng, 1, 6)[0]
            p = engine.decide(awake=mask)
            assert np.all(p[~mask] == 0.0)
            assert p.sum() == pytest.approx(1.0, abs=1e-12)
            assert np.all(p >= 0.0)
            losses = rng.random(6)
            engine.update(losses, learner_loss=float(p @ losses), awake=mask)


class TestUpdate:
    def test_positive_bet_uses_signed_coin(self):
        engine = SleepingCoinBetting(n_experts=1)
        engine.update(np.array([0.0]), learner_loss=0.5)  # coin clamps to 0.5
        before = engine.bettor(0)
        assert before.w > 0
        engine.update(np.array([0.9]), learner_loss=0.5)  # w > 0, coin -0.4
        after = engine.bettor(0)
        assert after.z == pytest.approx(before.z - 0.4)
        assert after.wealth == pytest.approx(before.wealth - 0.4 * before.w)

    def test_nonpositive_bet_clamps_coin(self):
        engine = SleepingCoinBetting(n_experts=1)
        before = engine.bettor(0)
        assert before.w == 0.0
        engine.update(np.array([0.7]), learner_loss=0.3)  # [0.3 - 0.7]_+ = 0
        after = engine.bettor(0)
        assert after.z == before.z and after.wealth == before.wealth
        assert after.s == before.s + 1

    def test_sleeping_expert_untouched(self):
        engine = SleepingCoinBetting(n_experts=2)
        engine.update({0: 0.2}, learner_loss=0.6, awake=[0])
        sleeping = engine.bettor(1)
        assert sleeping.s == 1 and sleeping.z == 0.0 and sleeping.wealth == 1.0

    def test_loss_out_of_range_rejected(self):
        engine = SleepingCoinBetting(n_experts=2)
        with pytest.raises(ValueError):
            engine.update(np.array([0.5, 1.2]), learner_loss=0.5)
        with pytest.raises(ValueError):
            engine.update(np.array([0.5, 0.5]), learner_loss=1.5)

    def test_missing_awake_loss_rejected(self):
        engine = SleepingCoinBetting(n_experts=2)
        with pytest.raises(ValueError):
            engine.update({0: 0.5}, learner_loss=0.5)

    def test_out_of_range_sleeping_loss_ignored(self):
        engine = SleepingCoinBetting(n_experts=2)
        engine.update({0: 0.5, 1: 7.0}, learner_loss=0.5, awake=[0])


class TestDynamicExpertSet:
    def test_grow_and_shrink(self):
        engine = SleepingCoinBetting()
        engine.add_expert("a", 1.0)
        engine.add_expert("b", 2.0)
        assert engine.expert_ids == ("a", "b")
        p = engine.decide()
        assert engine.as_dict(p) == {"a": pytest.approx(1 / 3), "b": pytest.approx(2 / 3)}
        engine.update({"a": 0.1, "b": 0.9}, learner_loss=0.5)
        engine.add_expert("c", 1.0)
        fresh = engine.bettor("c")
        assert fresh.s == 1 and fresh.z == 0.0 and fresh.wealth == 1.0
        engine.remove_expert("a")
        assert engine.expert_ids == ("b", "c")
        engine.decide()

    def test_duplicate_and_bad_weight(self):
        engine = SleepingCoinBetting()
        engine.add_expert("a")
        with pytest.raises(ValueError):
            engine.add_expert("a")
        with pytest.raises(ValueError):
            engine.add_expert("b", 0.0)


class TestAggregateInvariants:
    def test_prior_weighted_coin_flow_nonpositive(self):
        # With learner_loss equal to the decision's own expected loss, the
        # prior-weighted sum of coin * bet over awake experts never gains.
        rng = np.random.default_rng(11)
        n = 5
        engine = SleepingCoinBetting(n_experts=n)
        prior = np.full(n, 1.0 / n)
        for _ in range(200):
            mask = random_masks(rng, 1, n)[0]
            p = engine.decide(awake=mask)
            losses = rng.random(n)
            learner_loss = float(p @ losses)
            bets = np.array([engine.bettor(i).w for i in range(n)])
            coins = learner_loss - losses
            coins = np.where(bets > 0, coins, np.maximum(coins, 0.0))
            flow = float(np.sum(prior * mask * coins * bets))
            assert flow <= 1e-12
            engine.update(losses, learner_loss=learner_loss, awake=mask)

    def test_coin_sum_bounded_by_awake_rounds(self):
        # |z| can never exceed the number of coins seen, which is s - 1.
        rng = np.random.default_rng(13)
        n = 5
        engine = SleepingCoinBetting(n_experts=n)
        for _ in range(150):
            mask = random_masks(rng, 1, n)[0]
            p = engine.decide(awake=mask)
            losses = rng.random(n)
            engine.update(losses, learner_loss=float(p @ losses), awake=mask)
            for i in range(n):
                state = engine.bettor(i)
                assert abs(state.z) <= state.s - 1 + 1e-12

    def test_prior_weighted_potential_at_most_one(self):
        rng = np.random.default_rng(12)
        n = 4
        horizon = 300
        engine = SleepingCoinBetting(n_experts=n)
        masks = random_masks(rng, horizon, n)
        for t in range(horizon):
            p = engine.decide(awake=masks[t])
            losses = rng.random(n)
            engine.update(losses, learner_loss=float(p @ losses), awake=masks[t])
        total = 0.0
        for i in range(n):
            state = engine.bettor(i)
            total += (1.0 / n) * kt_potential(state.s - 1, state.z)
        assert total <= 1.0 + 1e-9


class TestRegretBound:
    def test_realized_regret_within_bound(self):
        rng = np.random.default_rng(21)
        for _ in range(15):
            n = int(rng.integers(2, 9))
            horizon = int(rng.integers(20, 300))
            masks = random_masks(rng, horizon, n)
            losses = rng.random((horizon, n))
            engine = SleepingCoinBetting(n_experts=n)
            regrets = np.zeros(n)
            awake_before = np.zeros(n)
            clocks = np.zeros(n)
            for t in range(horizon):
                p = engine.decide(awake=masks[t])
                learner_loss = float(p @ losses[t])
                regrets += masks[t] * (learner_loss - losses[t])
                if t < horizon - 1:
                    awake_before += masks[t]
                clocks = 1 + awake_before  # matches the bound's round clock
                engine.update(losses[t], learner_loss=learner_loss, awake=masks[t])
            prior = {i: 1.0 for i in range(n)}
            counts = {i: int(clocks[i]) for i in range(n)}
            for j in range(n):
                bound = sleeping_regret_bound({j: 1.0}, counts, prior, horizon)
                assert regrets[j] <= bound + 1e-9


class TestBoundEvaluator:
    def test_single_expert_uniform_prior(self):
        n, horizon = 16, 128
        bound = sleeping_regret_bound(
            {3: 1.0}, {3: horizon}, {i: 1.0 for i in range(n)}, horizon
        )
        expected = math.sqrt(2 * horizon * (math.log(n) + 0.5 * math.log(horizon) + 2))
        assert bound == pytest.approx(expected, rel=1e-12)

    def test_comparator_equal_to_prior_kills_kl(self):
        prior = {0: 0.25, 1: 0.75}
        s = 37
        bound = sleeping_regret_bound(prior, {0: s, 1: s}, prior, 64)
        expected = math.sqrt(2 * s * (0.5 * math.log(64) + 2))
        assert bound == pytest.approx(expected, rel=1e-12)

    def test_plugin_arithmetic(self):
        # sqrt(2 * 10 * (ln(4/3) + ln(16)/2 + 2)), recomputed from scratch.
        bound = sleeping_regret_bound({0: 1.0}, {0: 10}, {0: 0.75, 1: 0.25}, 16)
        expected = math.sqrt(2 * 10 * (math.log(4 / 3) + 0.5 * math.log(16) + 2))
        assert bound == pytest.approx(expected, rel=1e-12)

    def test_zero_prior_mass_rejected(self):
        with pytest.raises(ValueError):
            sleeping_regret_bound({0: 1.0}, {0: 5}, {1: 1.0}, 16)
