from fractions import Fraction

import pytest
from hypothesis import given, settings as hsettings
from hypothesis import strategies as st

from flowgame.errors import ConfigError, OutOfTree
from flowgame.game.state import GameConfig, MoveDelta, Player, apply_move, best_leaf, make_state
from flowgame.game.tree import iter_nodes
from flowgame.measures import (
    DiscreteSemimeasure,
    TreeMeasure,
    iter_random_semimeasures,
    max_path_ratio,
    max_path_ratio_sum,
    proportion_identity_holds,
    proportional_split,
    subtree_mass,
)

THIRD = Fraction(1, 3)


def example_measure() -> DiscreteSemimeasure:
    return DiscreteSemimeasure.of(2, {"0": "1/4", "10": "1/4", "11": "1/4"})


class TestDiscreteSemimeasure:
    def test_zero_weights_dropped(self):
        m = DiscreteSemimeasure.of(1, {"0": Fraction(1, 2), "1": 0})
        assert m.weights == {"0": Fraction(1, 2)}
        assert m.total == Fraction(1, 2)
        assert m.weight("1") == 0

    def test_rejects_negative_and_excess_mass(self):
        with pytest.raises(ConfigError):
            DiscreteSemimeasure.of(1, {"0": Fraction(-1, 2)})
        with pytest.raises(ConfigError):
            DiscreteSemimeasure.of(1, {"0": Fraction(3, 4), "1": Fraction(1, 2)})
        with pytest.raises(ConfigError):
            DiscreteSemimeasure.of(-1, {})

    def test_rejects_nodes_below_height(self):
        with pytest.raises(OutOfTree):
            DiscreteSemimeasure.of(1, {"00": Fraction(1, 4)})

    def test_subtree_mass(self):
        m = example_measure()
        assert subtree_mass(m, "") == Fraction(3, 4)
        assert subtree_mass(m, "1") == Fraction(1, 2)
        assert subtree_mass(m, "01") == 0


class TestProportionalSplit:
    def test_split_follows_subtree_mass(self):
        split = proportional_split(example_measure())
        assert split.value("") == 1
        assert split.value("0") == THIRD
        assert split.value("1") == 2 * THIRD
        assert split.value("10") == THIRD
        # no mass below "0": its flow is halved
        assert split.value("00") == THIRD / 2
        assert split.is_additive()

    def test_path_sum_bound_is_tight_at_total_mass(self):
        m = example_measure()
        split = proportional_split(m)
        assert max_path_ratio(m, split) == ("00", Fraction(3, 4))
        assert max_path_ratio_sum(m, split) <= 1
        assert proportion_identity_holds(m, split)

    def test_taller_tree_and_scaled_root(self):
        m = example_measure()
        split = proportional_split(m, height=4, root_value=Fraction(1, 2))
        assert split.value("000") == Fraction(1, 24)
        assert max_path_ratio_sum(m, split) == Fraction(3, 2)

    def test_height_below_support(self):
        with pytest.raises(ConfigError):
            proportional_split(example_measure(), height=1)

    def test_empty_measure_splits_evenly(self):
        split = proportional_split(DiscreteSemimeasure.of(2, {}))
        assert split.value("01") == Fraction(1, 4)
        assert max_path_ratio_sum(DiscreteSemimeasure.of(2, {}), split) == 0

    def test_flow_updates_are_a_legal_adversary_move(self):
        m = example_measure()
        split = proportional_split(m)
        updates = split.flow_updates()
        assert [len(x) for x, _ in updates] == sorted(len(x) for x, _ in updates)
        assert all(x for x, _ in updates)
        state = apply_move(make_state(GameConfig.unit(2, 1)), MoveDelta.of(Player.A, updates))
        state = apply_move(state, MoveDelta.of(Player.M, m.weights))
        _, total = best_leaf(state)
        assert total == Fraction(3, 4)

    def test_non_additive_measure_detected(self):
        measure = TreeMeasure(height=1, explicit={"": Fraction(1), "0": Fraction(1), "1": Fraction(1)})
        assert not measure.is_additive()


NODES = list(iter_nodes(3))


class TestProportionalSplitProperties:
    @hsettings(max_examples=150, deadline=None)
    @given(st.dictionaries(st.sampled_from(NODES), st.integers(min_value=1, max_value=20), max_size=10), st.integers(min_value=0, max_value=40))
    def test_every_path_sum_at_most_one(self, raw, slack):
        denom = sum(raw.values()) + slack
        m = DiscreteSemimeasure.of(3, {x: Fraction(n, denom) for x, n in raw.items()})
        split = proportional_split(m)
        assert split.is_additive()
        assert proportion_identity_holds(m, split)
        total = max_path_ratio_sum(m, split)
        assert total <= 1
        # the bound is attained: the best path collects the whole mass
        assert total == m.total

    def test_random_sweep_is_reproducible(self):
        first = [m.weights for m in iter_random_semimeasures(7, 20, 6)]
        second = [m.weights for m in iter_random_semimeasures(7, 20, 6)]
        assert first == second
        assert len(first) == 20

    def test_random_sweep_respects_bound(self):
        for m in iter_random_semimeasures(11, 40, 8):
            assert m.total <= 1
            split = proportional_split(m)
            assert max_path_ratio_sum(m, split) <= 1
            assert proportion_identity_holds(m, split)
