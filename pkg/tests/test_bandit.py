import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from banditabc.bandit import (
    PHASE_EXPLOITATION,
    PHASE_EXPLORATION,
    ArmRank,
    BanditConfig,
    RewardLedger,
    exploration_budget,
    rank_arms,
    select_arm,
    select_with_phase,
)
from banditabc.errors import (
    ConfigError,
    ContractViolationError,
    SelectionError,
    StateError,
)


def ledger_with_means(means, pulls=4):
    """A ledger whose per-arm means are exactly the given values."""
    ledger = RewardLedger(len(means))
    for it in range(pulls):
        ledger.record(it, {arm: m for arm, m in enumerate(means)}, PHASE_EXPLORATION)
    return ledger


def eps_first(budget, seed=0, epsilon=0.5):
    return BanditConfig(
        strategy="epsilon_first", epsilon=epsilon, exploration_budget=budget, seed=seed
    )


class TestExplorationBudget:
    @pytest.mark.parametrize(
        "epsilon,n,expected",
        [(0.5, 100, 50), (0.0, 100, 0), (1.0, 7, 7), (0.1, 30, 3), (0.34, 10, 4), (0.01, 20, 1)],
    )
    def test_values(self, epsilon, n, expected):
        assert exploration_budget(epsilon, n) == expected

    def test_float_product_does_not_round_up(self):
        # 0.1 * 30 is 3.0000000000000004 in binary; the budget must stay 3
        assert exploration_budget(0.1, 30) == 3

    def test_validation(self):
        with pytest.raises(ConfigError):
            exploration_budget(1.5, 10)
        with pytest.raises(ConfigError):
            exploration_budget(-0.1, 10)
        with pytest.raises(ConfigError):
            exploration_budget(0.5, -1)


class TestBanditConfig:
    def test_rejects_unknown_strategy(self):
        with pytest.raises(ConfigError):
            BanditConfig(strategy="ucb", epsilon=0.5, exploration_budget=5, seed=0)

    def test_rejects_epsilon_out_of_range(self):
        with pytest.raises(ConfigError):
            BanditConfig(strategy="epsilon_greedy", epsilon=1.2, exploration_budget=0, seed=0)

    def test_epsilon_first_needs_budget(self):
        with pytest.raises(ConfigError):
            BanditConfig(strategy="epsilon_first", epsilon=0.5, exploration_budget=0, seed=0)
        # epsilon zero with zero budget is a legal degenerate config
        BanditConfig(strategy="epsilon_first", epsilon=0.0, exploration_budget=0, seed=0)

    def test_rejects_unknown_tie_break(self):
        with pytest.raises(ConfigError):
            BanditConfig(
                strategy="epsilon_first", epsilon=0.5, exploration_budget=5, seed=0,
                tie_break="random",
            )


class TestLedger:
    def test_record_and_means(self):
        ledger = RewardLedger(2)
        ledger.record(0, {0: -0.2}, PHASE_EXPLORATION)
        means = ledger.arm_means()
        assert means[0] == -0.2
        assert np.isnan(means[1])
        assert list(ledger.pull_counts) == [1, 0]

    def test_multi_arm_row(self):
        ledger = RewardLedger(3)
        ledger.record(0, {0: -0.1, 1: -0.5, 2: -0.9}, PHASE_EXPLORATION)
        assert list(ledger.pull_counts) == [1, 1, 1]
        assert np.allclose(ledger.arm_means(), [-0.1, -0.5, -0.9])

    def test_iteration_order_enforced(self):
        ledger = RewardLedger(2)
        ledger.record(0, {0: -0.1}, PHASE_EXPLORATION)
        with pytest.raises(ContractViolationError):
            ledger.record(2, {0: -0.1}, PHASE_EXPLORATION)
        with pytest.raises(ContractViolationError):
            ledger.record(0, {0: -0.1}, PHASE_EXPLORATION)

    def test_reward_range_enforced(self):
        ledger = RewardLedger(2)
        with pytest.raises(ContractViolationError):
            ledger.record(0, {0: 0.1}, PHASE_EXPLORATION)
        with pytest.raises(ContractViolationError):
            ledger.record(0, {0: -1.5}, PHASE_EXPLORATION)
        with pytest.raises(ContractViolationError):
            ledger.record(0, {0: float("nan")}, PHASE_EXPLORATION)

    def test_arm_index_and_phase_enforced(self):
        ledger = RewardLedger(2)
        with pytest.raises(ContractViolationError):
            ledger.record(0, {5: -0.1}, PHASE_EXPLORATION)
        with pytest.raises(ContractViolationError):
            ledger.record(0, {0: -0.1}, "warmup")
        with pytest.raises(ContractViolationError):
            ledger.record(0, {}, PHASE_EXPLORATION)

    def test_hundred_row_oracle(self):
        rng = np.random.default_rng(8)
        K = 6
        ledger = RewardLedger(K)
        sums = np.zeros(K)
        counts = np.zeros(K, dtype=int)
        for it in range(100):
            arms = rng.choice(K, size=rng.integers(1, K + 1), replace=False)
            rewards = {int(a): float(-rng.random()) for a in arms}
            ledger.record(it, rewards, PHASE_EXPLORATION)
            for a, r in rewards.items():
                sums[a] += r
                counts[a] += 1
        assert np.array_equal(ledger.pull_counts, counts)
        assert np.allclose(ledger.running_sums, sums, atol=1e-12)
        assert np.allclose(ledger.arm_means(), sums / counts, atol=1e-12)

    @given(
        st.lists(
            st.dictionaries(
                st.integers(min_value=0, max_value=3),
                st.floats(min_value=-1.0, max_value=0.0),
                min_size=1,
                max_size=4,
            ),
            min_size=1,
            max_size=30,
        )
    )
    @settings(max_examples=60, deadline=None)
    def test_running_tallies_match_rows(self, reward_dicts):
        ledger = RewardLedger(4)
        for it, rewards in enumerate(reward_dicts):
            ledger.record(it, rewards, PHASE_EXPLORATION)
        sums = np.zeros(4)
        counts = np.zeros(4, dtype=int)
        for row in ledger.rows:
            for a, r in row.rewards.items():
                sums[a] += r
                counts[a] += 1
        assert np.array_equal(ledger.pull_counts, counts)
        assert np.allclose(ledger.running_sums, sums, atol=1e-12)


class TestSelection:
    def test_exploitation_picks_best_mean(self):
        ledger = ledger_with_means([-0.2, -0.5, -0.1])
        arm, phase = select_with_phase(ledger, eps_first(budget=2), iteration=5)
        assert (arm, phase) == (2, PHASE_EXPLOITATION)

    def test_tie_breaks_to_lowest_index(self):
        ledger = ledger_with_means([-0.3, -0.3, -0.7])
        assert select_arm(ledger, eps_first(budget=1), iteration=9) == 0

    def test_unpulled_arms_never_win_exploitation(self):
        ledger = RewardLedger(3)
        ledger.record(0, {2: -0.9}, PHASE_EXPLORATION)
        assert select_arm(ledger, eps_first(budget=1), iteration=1) == 2

    def test_exploitation_without_pulls_raises(self):
        cfg = BanditConfig(strategy="epsilon_first", epsilon=0.0, exploration_budget=0, seed=0)
        with pytest.raises(SelectionError):
            select_arm(RewardLedger(3), cfg, iteration=0)

    def test_negative_iteration_rejected(self):
        with pytest.raises(ConfigError):
            select_arm(RewardLedger(2), eps_first(budget=1), iteration=-1)

    def test_epsilon_first_phase_split(self):
        ledger = ledger_with_means([-0.5, -0.2])
        cfg = eps_first(budget=3)
        phases = [select_with_phase(ledger, cfg, m)[1] for m in range(6)]
        assert phases == [PHASE_EXPLORATION] * 3 + [PHASE_EXPLOITATION] * 3

    @given(st.integers(min_value=1, max_value=20), st.integers(min_value=0, max_value=40))
    @settings(max_examples=80, deadline=None)
    def test_phase_boundary_property(self, budget, iteration):
        ledger = ledger_with_means([-0.4, -0.6], pulls=2)
        cfg = eps_first(budget=budget)
        _, phase = select_with_phase(ledger, cfg, iteration)
        expected = PHASE_EXPLORATION if iteration < budget else PHASE_EXPLOITATION
        assert phase == expected

    def test_uniform_random_never_exploits(self):
        ledger = ledger_with_means([-0.1, -0.9])
        cfg = BanditConfig(strategy="uniform_random", epsilon=0.0, exploration_budget=0, seed=3)
        for m in range(20):
            _, phase = select_with_phase(ledger, cfg, m)
            assert phase == PHASE_EXPLORATION

    def test_exploration_frequency_is_uniform(self):
        K = 10
        n = 100_000
        cfg = BanditConfig(strategy="uniform_random", epsilon=0.0, exploration_budget=0, seed=11)
        ledger = RewardLedger(K)
        counts = np.zeros(K, dtype=int)
        for m in range(n):
            counts[select_arm(ledger, cfg, m)] += 1
        freqs = counts / n
        assert np.all(freqs >= 0.09)
        assert np.all(freqs <= 0.11)

    def test_selection_is_pure_in_its_inputs(self):
        ledger = ledger_with_means([-0.5, -0.5, -0.5])
        cfg = BanditConfig(strategy="uniform_random", epsilon=0.0, exploration_budget=0, seed=21)
        first = select_arm(ledger, cfg, 7)
        np.random.default_rng().random(1000)  # unrelated draws must not matter
        np.random.seed(0)
        assert select_arm(ledger, cfg, 7) == first
        # appending rows must not change an exploration choice either
        ledger.record(4, {0: -0.9}, PHASE_EXPLORATION)
        assert select_arm(ledger, cfg, 7) == first

    def test_different_iterations_vary(self):
        ledger = RewardLedger(10)
        cfg = BanditConfig(strategy="uniform_random", epsilon=0.0, exploration_budget=0, seed=5)
        arms = {select_arm(ledger, cfg, m) for m in range(50)}
        assert len(arms) > 1

    def test_epsilon_greedy_explores_empty_ledger(self):
        # even with epsilon 0 the first step cannot exploit an empty ledger
        cfg = BanditConfig(strategy="epsilon_greedy", epsilon=0.0, exploration_budget=0, seed=0)
        _, phase = select_with_phase(RewardLedger(3), cfg, 0)
        assert phase == PHASE_EXPLORATION

    def test_epsilon_greedy_exploits_with_epsilon_zero(self):
        ledger = ledger_with_means([-0.9, -0.1])
        cfg = BanditConfig(strategy="epsilon_greedy", epsilon=0.0, exploration_budget=0, seed=0)
        for m in range(10):
            arm, phase = select_with_phase(ledger, cfg, m)
            assert (arm, phase) == (1, PHASE_EXPLOITATION)

    def test_epsilon_decreasing_always_explores_first_step(self):
        ledger = ledger_with_means([-0.9, -0.1])
        for seed in range(20):
            cfg = BanditConfig(
                strategy="epsilon_decreasing", epsilon=1.0, exploration_budget=0, seed=seed
            )
            _, phase = select_with_phase(ledger, cfg, 0)
            assert phase == PHASE_EXPLORATION

    def test_epsilon_decreasing_mostly_exploits_late(self):
        ledger = ledger_with_means([-0.9, -0.1])
        cfg = BanditConfig(
            strategy="epsilon_decreasing", epsilon=1.0, exploration_budget=0, seed=17
        )
        phases = [select_with_phase(ledger, cfg, m)[1] for m in range(1000, 1100)]
        assert phases.count(PHASE_EXPLOITATION) >= 95


class TestRanking:
    def test_orders_by_mean_reward(self):
        ledger = ledger_with_means([-0.2, -0.5, -0.1])
        assert [e.arm for e in rank_arms(ledger)] == [2, 0, 1]

    def test_tie_breaks_by_pulls_then_index(self):
        ledger = RewardLedger(3)
        ledger.record(0, {0: -0.3, 1: -0.3, 2: -0.3}, PHASE_EXPLORATION)
        ledger.record(1, {1: -0.3}, PHASE_EXPLORATION)
        ranking = rank_arms(ledger)
        assert [e.arm for e in ranking] == [1, 0, 2]
        assert ranking[0].pulls == 2

    def test_unpulled_arms_trail_in_index_order(self):
        ledger = RewardLedger(4)
        ledger.record(0, {2: -0.4}, PHASE_EXPLORATION)
        ranking = rank_arms(ledger)
        assert [e.arm for e in ranking] == [2, 0, 1, 3]
        assert ranking[0].pulls == 1
        for entry in ranking[1:]:
            assert entry.pulls == 0
            assert np.isnan(entry.mean_reward)

    def test_empty_ledger_raises(self):
        with pytest.raises(StateError):
            rank_arms(RewardLedger(3))

    def test_random_ledger_against_sort_oracle(self):
        rng = np.random.default_rng(31)
        K = 8
        ledger = RewardLedger(K)
        for it in range(60):
            arms = rng.choice(K, size=rng.integers(1, 4), replace=False)
            ledger.record(it, {int(a): float(-rng.random()) for a in arms}, PHASE_EXPLORATION)
        means = ledger.arm_means()
        pulled = [i for i in range(K) if ledger.pull_counts[i] > 0]
        expected = sorted(
            pulled, key=lambda i: (-means[i], -ledger.pull_counts[i], i)
        ) + [i for i in range(K) if ledger.pull_counts[i] == 0]
        assert [e.arm for e in rank_arms(ledger)] == expected

    def test_positive_scaling_preserves_order(self):
        # rewards on an exact binary grid so scaling cannot create new ties
        rng = np.random.default_rng(13)
        base = [
            {int(a): -float(rng.integers(0, 9)) / 8.0 for a in rng.choice(5, size=3, replace=False)}
            for _ in range(40)
        ]
        for scale in (0.25, 0.5, 1.0):
            plain, scaled = RewardLedger(5), RewardLedger(5)
            for it, rewards in enumerate(base):
                plain.record(it, rewards, PHASE_EXPLORATION)
                scaled.record(it, {a: r * scale for a, r in rewards.items()}, PHASE_EXPLORATION)
            assert [e.arm for e in rank_arms(plain)] == [e.arm for e in rank_arms(scaled)]
            # scaling also leaves every exploitation choice unchanged
            assert select_arm(plain, eps_first(budget=1), 50) == select_arm(
                scaled, eps_first(budget=1), 50
            )

    def test_rank_entries_expose_fields(self):
        ledger = ledger_with_means([-0.4, -0.2], pulls=3)
        top = rank_arms(ledger)[0]
        assert isinstance(top, ArmRank)
        assert top.arm == 1
        assert top.mean_reward == pytest.approx(-0.2)
        assert top.pulls == 3


class TestLedgerCsv:
    def test_round_trip(self, tmp_path):
        ledger = RewardLedger(3)
        ledger.record(0, {0: -0.25, 1: -0.5, 2: -1.0}, PHASE_EXPLORATION)
        ledger.record(1, {2: -0.125}, PHASE_EXPLOITATION)
        ledger.record(2, {0: -1 / 3}, PHASE_EXPLOITATION)
        path = tmp_path / "ledger.csv"
        ledger.to_csv(path)

        again = RewardLedger.from_csv(path, n_arms=3)
        assert again.n_rows == ledger.n_rows
        for a, b in zip(again.rows, ledger.rows):
            assert a.iteration == b.iteration
            assert a.phase == b.phase
            assert a.rewards == b.rewards  # repr round-trips floats exactly
        assert np.array_equal(again.pull_counts, ledger.pull_counts)
        assert np.allclose(again.arm_means(), ledger.arm_means(), equal_nan=True)

    def test_header_checked(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("a,b,c\n1,2,3\n")
        with pytest.raises(ConfigError):
            RewardLedger.from_csv(path, n_arms=2)

    def test_csv_contains_one_line_per_observed_arm(self, tmp_path):
        ledger = RewardLedger(4)
        ledger.record(0, {0: -0.1, 1: -0.2, 2: -0.3, 3: -0.4}, PHASE_EXPLORATION)
        ledger.record(1, {1: -0.6}, PHASE_EXPLOITATION)
        path = tmp_path / "ledger.csv"
        ledger.to_csv(path)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "iteration,arm_id,reward,phase"
        assert len(lines) == 1 + 4 + 1
