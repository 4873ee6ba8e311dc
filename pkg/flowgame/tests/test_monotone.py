from fractions import Fraction
from functools import lru_cache

import pytest

from flowgame.certificates.cert import StrategyCert, ladder
from flowgame.errors import ConfigError, MonotonicityViolation
from flowgame.game.state import GameConfig
from flowgame.harness.match import run_match
from flowgame.harness.replay import parse_trace, verify_trace
from flowgame.monotone.branch import (
    MarkedBranch,
    MarkRecord,
    RootKind,
    dominates,
    is_dominance_chain,
    place_subgame_root,
    watermark,
)
from flowgame.monotone.builder import ce_builder
from flowgame.monotone.strategy import (
    MonotoneLayeredDriver,
    MonotoneRecursiveStrategy,
    monotone_recursive_strategy,
)
from flowgame.schemas import EnumEvent
from flowgame.strategies.adversaries import (
    greedy_all,
    proportional_online,
    random_adversary,
    silent,
    threshold_dodger,
    uniform_once,
)
from flowgame.strategies.layered import LayeredDriver

QUARTER = Fraction(1, 4)


@lru_cache(maxsize=None)
def first_rung() -> StrategyCert:
    return ladder(Fraction(17, 16)).top


def base_layers_config() -> GameConfig:
    # two trivial layers with quotas 1/2 and 1/4, each aiming for 1/4
    return GameConfig(height=0, root_flow=Fraction(1), budget=Fraction(1), target=Fraction(1, 2))


class TestMarkedBranch:
    def test_from_node_and_prefix(self):
        branch = MarkedBranch.from_node("0110")
        assert branch.ones == {1, 2}
        assert branch.prefix(5) == "01100"
        assert watermark(branch) == 2
        assert watermark(MarkedBranch()) == -1

    def test_of_rejects_negative_positions(self):
        with pytest.raises(ConfigError):
            MarkedBranch.of([-1])
        assert MarkedBranch.of([3, 1]).union(MarkedBranch.of([2])).ones == {1, 2, 3}

    def test_dominates(self):
        assert dominates(MarkedBranch.of([1]), MarkedBranch.of([1, 4]))
        assert not dominates(MarkedBranch.of([1, 4]), MarkedBranch.of([4]))
        assert dominates(MarkedBranch(), MarkedBranch())

    def test_dominance_chain(self):
        assert is_dominance_chain(["00", "010", "0110", "111"])
        assert not is_dominance_chain(["011", "001"])
        assert is_dominance_chain([])


class TestPlaceSubgameRoot:
    def test_left(self):
        assert place_subgame_root(RootKind.LEFT, MarkedBranch()) == "00"
        assert place_subgame_root(RootKind.LEFT, MarkedBranch.of([1, 2]), previous=1) == "0110"
        assert place_subgame_root(RootKind.LEFT, MarkedBranch(), previous=3) == "011110"

    def test_threat(self):
        assert place_subgame_root(RootKind.THREAT, MarkedBranch()) == "1"
        assert place_subgame_root(RootKind.THREAT, MarkedBranch.of([1, 2])) == "1111"

    def test_layer_restart(self):
        assert place_subgame_root(RootKind.LAYER_RESTART, MarkedBranch(), anchor="01") == "011"
        assert place_subgame_root(RootKind.LAYER_RESTART, MarkedBranch.of([5]), anchor="01") == "011111"
        assert place_subgame_root(RootKind.LAYER_RESTART, MarkedBranch(), previous=8, anchor="01") == "01111111"
        with pytest.raises(ConfigError):
            place_subgame_root(RootKind.LAYER_RESTART, MarkedBranch())


class TestMarkRecord:
    def test_marks_must_dominate(self):
        record = MarkRecord()
        record.mark("00")
        record.mark("00")
        record.mark("010")
        assert record.history == ["00", "010"]
        assert record.changes == 1
        assert record.branch().ones == {1}
        with pytest.raises(MonotonicityViolation):
            record.mark("000")

    def test_empty(self):
        record = MarkRecord()
        assert record.marked is None
        assert record.changes == 0
        assert record.branch() == MarkedBranch()


class TestMonotoneRecursiveStrategy:
    def test_roots_match_the_plain_placement_for_trivial_children(self):
        cert = first_rung()
        strategy = monotone_recursive_strategy(cert)
        assert isinstance(strategy, MonotoneRecursiveStrategy)
        trace = run_match(strategy, threshold_dodger(cert), GameConfig.unit(cert.mono_height, cert.guarantee))
        assert trace.footer.verdict == "MWins"
        lefts = [root for kind, root in strategy.roots if kind == "left"]
        assert lefts == [cert.z(i) for i in range(1, len(lefts) + 1)]
        assert len(lefts) > 1

    def test_marks_only_gain_ones(self):
        cert = first_rung()
        config = GameConfig.unit(cert.mono_height, cert.guarantee)
        for adversary in (greedy_all(), uniform_once(), proportional_online(), *(random_adversary(s) for s in range(3))):
            strategy = monotone_recursive_strategy(cert)
            trace = run_match(strategy, adversary, config)
            assert trace.footer.verdict == "MWins", (adversary.name, trace.footer)
            assert is_dominance_chain(strategy.record.history)

    def test_threat_root_covers_the_claim(self):
        cert = first_rung()
        strategy = monotone_recursive_strategy(cert)
        run_match(strategy, greedy_all(), GameConfig.unit(cert.mono_height, cert.guarantee))
        assert strategy.threatened
        assert strategy.roots[-1] == ("threat", "1")


class TestLayeredDriver:
    @pytest.mark.parametrize(
        "exponents, layer_sum",
        [([], QUARTER), ([-1], QUARTER), ([0, 1], QUARTER), ([1, 2], 0)],
    )
    def test_rejects_bad_layouts(self, exponents, layer_sum):
        with pytest.raises(ConfigError):
            LayeredDriver(exponents, layer_sum=layer_sum)

    def test_base_layers_need_no_ladder(self):
        driver = LayeredDriver([1, 2], layer_sum=QUARTER)
        assert driver.ladder is None
        assert [layer.quota for layer in driver.layers] == [Fraction(1, 2), QUARTER]
        assert all(layer.cert.is_base for layer in driver.layers)

    def test_second_layer_sits_below_the_first_claim(self):
        driver = LayeredDriver([1, 2], layer_sum=QUARTER)
        trace = run_match(driver, silent(), base_layers_config())
        assert trace.footer.verdict == "MWins"
        assert [layer.root for layer in driver.layers] == ["", "0"]
        assert driver.claim == "0"
        assert trace.events[0].height == 1
        assert driver.layer_sums() == [Fraction(1, 2), float("inf")]
        assert driver.unstarted() == []

    def test_first_rung_layers_respect_the_budget(self):
        driver = LayeredDriver([2, 2], layer_sum=Fraction(17, 64))
        assert driver.layers[0].cert == first_rung()
        trace = run_match(driver, greedy_all(), GameConfig.unit(0, Fraction(17, 32)))
        assert trace.footer.verdict == "MWins"
        assert driver.restarts == 1
        assert driver.layers[1].root == "1" + "0" * 8
        assert not any(e.status != "ok" for e in trace.events)


class TestMonotoneLayeredDriver:
    def test_layer_root_pads_with_ones(self):
        driver = MonotoneLayeredDriver([1, 2], layer_sum=QUARTER)
        run_match(driver, silent(), base_layers_config())
        assert [layer.root for layer in driver.layers] == ["", "1"]
        assert driver.branch().ones == {0}

    def test_restart_below_the_threat(self):
        build = ce_builder(greedy_all(), quota_exponents=[2, 2], layer_sum=Fraction(17, 64))
        report = build.report
        assert report.verdict == "Settled"
        assert report.dominance_ok
        # layer 1 first hangs right below the claimed leaf of layer 0, then restarts under the threat
        assert report.enumerated == [0, 1, 2, 3, 4]
        assert report.branch == "11111" + "00"
        assert [(e.round, e.position) for e in build.events] == [(1, 2), (2, 0), (2, 1), (2, 3), (2, 4)]
        assert build.report.reason is None
        assert verify_trace(build.trace).verdict == "MWins"

    def test_deep_ladders_stay_shallow(self):
        build = ce_builder(proportional_online(), quota_exponents=[1, 1], layer_sum=1, round_cap=30)
        assert build.report.verdict in ("Settled", "Undecided")
        assert all(e.status == "ok" for e in build.trace.events)
        assert build.trace.header.config.height == 0
        assert max(e.height or 0 for e in build.trace.events) < 10_000
        assert build.report.dominance_ok
        assert verify_trace(parse_trace(build.trace.to_jsonl())).events == len(build.trace.events)


class TestCEBuilder:
    def test_against_silent(self):
        build = ce_builder(silent(), layers=2, layer_sum=QUARTER)
        report = build.report
        assert report.verdict == "Settled"
        assert report.branch == "1"
        assert report.layer_sums == ["1/2", "inf"]
        assert report.total_sum == "inf"
        assert report.enumerated == [0]
        assert report.dominance_ok
        assert build.events == [EnumEvent(round=1, position=0)]

    def test_against_proportional_online(self):
        report = ce_builder(proportional_online(), layers=2, layer_sum=QUARTER).report
        assert report.verdict == "Settled"
        assert report.layer_sums == ["1/2", "1/4"]
        assert report.total_sum == "3/4"

    def test_on_enum_callback_and_stream(self, tmp_path):
        seen = []
        build = ce_builder(silent(), layers=2, layer_sum=QUARTER, on_enum=seen.append)
        assert seen == build.events
        out = tmp_path / "enum.jsonl"
        build.write_events(out)
        assert out.read_text(encoding="utf-8") == '{"round":1,"set":0}\n'

    @pytest.mark.parametrize("seed", range(3))
    def test_random_adversaries_never_break_dominance(self, seed):
        build = ce_builder(random_adversary(seed), quota_exponents=[2, 2], layer_sum=Fraction(17, 64), round_cap=200)
        assert build.report.dominance_ok
        m_events = [e for e in build.trace.events if e.player == "M"]
        assert all(e.status == "ok" for e in m_events)
        positions = [e.position for e in build.events]
        assert len(positions) == len(set(positions))
        assert set(build.report.enumerated) <= MarkedBranch.from_node(build.report.branch).ones

    def test_crashing_driver_is_reported(self, monkeypatch):
        def explode(self, view, event):
            raise RuntimeError("no room")

        monkeypatch.setattr(MonotoneLayeredDriver, "respond", explode)
        build = ce_builder(silent(), layers=2, layer_sum=QUARTER)
        assert build.report.verdict == "Failed"
        assert build.report.reason == "M resigned (RuntimeError)"
        assert build.trace.events[0].error == "RuntimeError"
        assert build.events == []

    @pytest.mark.parametrize("seed", range(3))
    def test_traces_replay_and_repeat(self, seed):
        def build():
            return ce_builder(random_adversary(seed), quota_exponents=[2, 2], layer_sum=Fraction(17, 64), round_cap=200)

        first, second = build(), build()
        assert first.trace.to_jsonl() == second.trace.to_jsonl()
        assert first.events == second.events
        report = verify_trace(parse_trace(first.trace.to_jsonl()))
        assert report.verdict == first.trace.footer.verdict
