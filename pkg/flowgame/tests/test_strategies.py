from fractions import Fraction
from functools import lru_cache

import pytest

from flowgame.certificates.cert import BASE_CERT, StrategyCert, build_cert, ladder
from flowgame.errors import ConfigError, StrategyNotFound
from flowgame.game.rationals import parse_ext, parse_rat
from flowgame.game.state import GameConfig, MoveDelta, Player, apply_move, make_state
from flowgame.game.view import identity_view, scale_view
from flowgame.harness.match import run_match
from flowgame.harness.replay import parse_trace, verify_trace
from flowgame.schemas import TraceEvent, UpdateEntry
from flowgame.strategies.adversaries import (
    FlowPlan,
    default_dodger_delta,
    greedy_all,
    pour,
    proportional_online,
    random_adversary,
    scripted,
    silent,
    threshold_dodger,
    uniform_once,
)
from flowgame.strategies.base import Response, YourTurn, hypothetical_best
from flowgame.strategies.mathematician import (
    OneShotStrategy,
    RecursiveStrategy,
    ToyStrategy,
    TrivialStrategy,
    one_shot_strategy,
    recursive_strategy,
    scaled,
    strategy_for_cert,
    toy_policy,
)
from flowgame.strategies.registry import StrategyRegistry, a_registry, get_a_strategy, get_m_strategy, m_registry

QUARTER = Fraction(1, 4)
HALF = Fraction(1, 2)


@lru_cache(maxsize=None)
def first_rung() -> StrategyCert:
    return ladder(Fraction(17, 16)).top


def state_with(height, m=None, a=None):
    state = make_state(GameConfig.unit(height, 1))
    if a:
        state = apply_move(state, MoveDelta.of(Player.A, a))
    if m:
        state = apply_move(state, MoveDelta.of(Player.M, m))
    return state


class TestTrivialAndScaled:
    def test_trivial_spends_once(self):
        strategy = TrivialStrategy()
        view = identity_view(state_with(2))
        first = strategy.respond(view, YourTurn())
        assert first.updates == {"": 1}
        assert first.claim == ""
        second = strategy.respond(view, YourTurn())
        assert second.updates == {}
        assert second.claim == ""

    def test_scaled_places_in_subtree(self):
        strategy = scaled(TrivialStrategy(), "1", HALF, HALF)
        response = strategy.respond(identity_view(state_with(1)), YourTurn())
        assert response.updates == {"1": HALF}
        assert strategy.claim == "1"

    def test_strategy_for_cert(self):
        assert isinstance(strategy_for_cert(BASE_CERT), TrivialStrategy)
        assert isinstance(strategy_for_cert(first_rung()), RecursiveStrategy)
        with pytest.raises(ConfigError):
            RecursiveStrategy(BASE_CERT)

    def test_one_shot_claims_best_leaf(self):
        strategy = one_shot_strategy({"1": QUARTER, "10": QUARTER})
        state = state_with(2, a={"1": HALF, "10": QUARTER})
        response = strategy.respond(identity_view(state), YourTurn())
        assert response.updates == {"1": QUARTER, "10": QUARTER}
        # 1/4 / 1/2 + 1/4 / 1/4
        assert response.claim == "10"
        assert isinstance(strategy, OneShotStrategy)

    def test_hypothetical_best_stays_in_view(self):
        state = state_with(2, a={"0": HALF, "1": HALF})
        view = scale_view(state, "1", HALF, 1)
        leaf, total = hypothetical_best(view, {"0": QUARTER, "11": QUARTER})
        assert leaf == "11"
        assert total == float("inf")


class TestToyPolicy:
    def test_opening(self):
        assert toy_policy(lambda x: Fraction(0), lambda x: Fraction(0), Fraction(9, 8)) == {"0": QUARTER, "00": QUARTER}

    def test_commits_to_vertex_one_under_pressure(self):
        weights = {"0": QUARTER, "00": QUARTER}
        flows = {"0": Fraction(3, 4)}
        shares = toy_policy(lambda x: weights.get(x, Fraction(0)), lambda x: flows.get(x, Fraction(0)), Fraction(9, 8))
        assert shares == {"1": HALF}

    def test_commits_to_01_when_that_wins(self):
        weights = {"0": QUARTER, "00": QUARTER}
        flows = {"": Fraction(1), "0": QUARTER, "00": QUARTER}
        shares = toy_policy(lambda x: weights.get(x, Fraction(0)), lambda x: flows.get(x, Fraction(0)), Fraction(9, 8))
        assert shares == {"01": HALF}

    def test_final_half_is_spent_once(self):
        weights = {"0": QUARTER, "00": QUARTER, "1": HALF}
        assert toy_policy(lambda x: weights.get(x, Fraction(0)), lambda x: Fraction(0), Fraction(9, 8)) == {}

    def test_strategy_needs_height_two(self):
        with pytest.raises(ConfigError):
            ToyStrategy(Fraction(9, 8)).respond(identity_view(state_with(1)), YourTurn())

    def test_beats_a_silent_adversary(self):
        trace = run_match(ToyStrategy(), silent(), GameConfig.unit(2, Fraction(9, 8)))
        assert trace.footer.verdict == "MWins"
        assert trace.events[0].claim == "00"

    def test_strategy_reads_target_from_config(self):
        strategy = ToyStrategy()
        response = strategy.respond(identity_view(make_state(GameConfig.unit(2, Fraction(9, 8)))), YourTurn())
        assert response.updates == {"0": QUARTER, "00": QUARTER}
        assert response.claim == "00"


class TestFlowPlan:
    def test_pour_borrows_from_ancestors(self):
        state = state_with(2)
        assert pour(state, "00", HALF) == {"0": HALF, "00": HALF}

    def test_pour_respects_top(self):
        state = state_with(2)
        assert pour(state, "00", 1, top="0") == {}
        state = state_with(2, a={"0": HALF})
        assert pour(state, "00", 1, top="0") == {"00": HALF}

    def test_capacity(self):
        state = state_with(2, a={"0": HALF, "1": QUARTER})
        plan = FlowPlan(state)
        assert plan.capacity("00") == HALF + QUARTER
        assert plan.capacity("") == 0
        assert plan.capacity("000") == 0

    def test_updates_are_legal(self):
        state = state_with(2, a={"0": HALF, "00": QUARTER})
        plan = FlowPlan(state)
        plan.raise_by("01", 1)
        plan.raise_by("11", 1)
        apply_move(state, MoveDelta.of(Player.A, plan.updates()))


class TestAdversaries:
    def test_silent(self):
        assert silent().respond(identity_view(state_with(1, m={"0": HALF})), YourTurn()).updates == {}

    def test_greedy_all_floods_weighted_nodes(self):
        state = state_with(1, m={"0": HALF})
        assert greedy_all().respond(identity_view(state), YourTurn()).updates == {"0": 1}

    def test_proportional_online_follows_mass(self):
        state = state_with(1, m={"0": HALF})
        assert proportional_online().respond(identity_view(state), YourTurn()).updates == {"0": 1}
        state = state_with(1, m={"0": QUARTER, "1": Fraction(3, 4)})
        assert proportional_online().respond(identity_view(state), YourTurn()).updates == {"0": QUARTER, "1": Fraction(3, 4)}

    def test_proportional_online_waits_for_weights(self):
        assert proportional_online().respond(identity_view(state_with(2)), YourTurn()).updates == {}

    def test_uniform_once(self):
        adversary = uniform_once()
        view = identity_view(state_with(2, m={"01": QUARTER}))
        first = adversary.respond(view, YourTurn())
        assert first.updates == {"0": HALF, "1": HALF, "00": QUARTER, "01": QUARTER}
        assert adversary.respond(view, YourTurn()).updates == {}

    def test_random_is_seeded_and_legal(self):
        state = state_with(3, m={"0": QUARTER, "01": QUARTER, "110": QUARTER})
        for seed in range(10):
            first = random_adversary(seed).respond(identity_view(state), YourTurn()).updates
            again = random_adversary(seed).respond(identity_view(state), YourTurn()).updates
            assert first == again
            apply_move(state, MoveDelta.of(Player.A, first))

    def test_random_grain(self):
        with pytest.raises(ConfigError):
            random_adversary(0, grain=0)

    def test_scripted_from_trace_events(self):
        events = [
            TraceEvent(index=0, player="M", updates=[UpdateEntry(node="", value="1")], winning=True),
            TraceEvent(index=1, player="A", updates=[UpdateEntry(node="0", value="1/2")], winning=True),
            TraceEvent(index=3, player="A", updates=[], winning=True, status="resigned"),
        ]
        adversary = scripted(events)
        view = identity_view(state_with(1))
        assert adversary.respond(view, YourTurn()).updates == {"0": HALF}
        assert adversary.respond(view, YourTurn()).updates == {}

    def test_scripted_from_deltas(self):
        adversary = scripted([MoveDelta.of(Player.M, {"": 1}), MoveDelta.of(Player.A, {"1": QUARTER})])
        assert adversary.respond(identity_view(state_with(1)), YourTurn()).updates == {"1": QUARTER}

    def test_dodger_needs_a_real_certificate(self):
        with pytest.raises(ConfigError):
            threshold_dodger(BASE_CERT)
        with pytest.raises(ConfigError):
            threshold_dodger(first_rung(), delta=0)
        assert 0 < default_dodger_delta(first_rung()) < first_rung().aq[-1]

    def test_dodger_stops_short_of_triggers(self):
        cert = first_rung()
        dodger = threshold_dodger(cert)
        state = state_with(cert.height, m={"0": cert.eps, "00": (1 - cert.eps) / cert.n})
        updates = dodger.respond(identity_view(state), YourTurn()).updates
        assert updates["0"] == cert.d[0] - dodger.delta
        assert updates["00"] == cert.aq[0] - dodger.delta


# ---------------------------------------------------------------------------
# Recursive strategy against the suite
# ---------------------------------------------------------------------------


def adversaries_for(cert):
    return [
        silent(),
        greedy_all(),
        proportional_online(),
        uniform_once(),
        threshold_dodger(cert),
        *(random_adversary(seed) for seed in range(4)),
    ]


class TestRecursiveStrategy:
    def test_opening_move(self):
        cert = first_rung()
        strategy = recursive_strategy(cert)
        response = strategy.respond(identity_view(state_with(cert.height)), YourTurn())
        assert response.updates == {"0": cert.eps, "00": (1 - cert.eps) / cert.n}
        assert response.claim == "00"
        assert strategy.roots == [("left", "00")]

    def test_next_subgame_when_quota_filled(self):
        cert = first_rung()
        strategy = recursive_strategy(cert)
        state = state_with(cert.height)
        state = apply_move(state, MoveDelta.of(Player.M, strategy.respond(identity_view(state), YourTurn()).updates))
        state = apply_move(state, MoveDelta.of(Player.A, {"0": cert.aq[0], "00": cert.aq[0]}))
        response = strategy.respond(identity_view(state), YourTurn())
        assert strategy.subgame == 2
        assert response.claim == cert.z(2)

    def test_threat_when_vertex_zero_crosses_threshold(self):
        cert = first_rung()
        strategy = recursive_strategy(cert)
        state = state_with(cert.height)
        state = apply_move(state, MoveDelta.of(Player.M, strategy.respond(identity_view(state), YourTurn()).updates))
        state = apply_move(state, MoveDelta.of(Player.A, {"0": cert.d[0]}))
        response = strategy.respond(identity_view(state), YourTurn())
        assert strategy.threatened
        assert response.claim == "1"
        assert response.updates == {"1": (1 - cert.eps) * (1 - Fraction(1, cert.n))}

    def test_wins_against_every_adversary(self):
        cert = first_rung()
        config = GameConfig.unit(cert.height, cert.guarantee)
        for adversary in adversaries_for(cert):
            trace = run_match(recursive_strategy(cert), adversary, config)
            assert trace.footer.verdict == "MWins", (adversary.name, trace.footer)
            assert all(e.winning for e in trace.events if e.player == "M")

    def test_dodger_trace_replays(self):
        cert = first_rung()
        trace = run_match(recursive_strategy(cert), threshold_dodger(cert), GameConfig.unit(cert.height, cert.guarantee))
        report = verify_trace(trace)
        assert report.verdict == "MWins"
        assert report.events == len(trace.events)


@lru_cache(maxsize=None)
def rung(index: int) -> StrategyCert:
    cert = BASE_CERT
    for _ in range(index):
        cert = build_cert(cert)
    return cert


def smallest_gap(cert: StrategyCert) -> Fraction:
    gaps = [b - a for a, b in zip(cert.d, cert.d[1:])] + list(cert.aq) + [cert.d[0]]
    return min(gaps)


SUITE = {
    "silent": lambda cert: silent(),
    "greedy_all": lambda cert: greedy_all(),
    "proportional_online": lambda cert: proportional_online(),
    "uniform_once": lambda cert: uniform_once(),
    "dodger_1/100": lambda cert: threshold_dodger(cert, smallest_gap(cert) / 100),
    "dodger_1/1000": lambda cert: threshold_dodger(cert, smallest_gap(cert) / 1000),
}


def assert_recursive_win(cert: StrategyCert, adversary) -> None:
    trace = run_match(recursive_strategy(cert), adversary, GameConfig.unit(cert.height, cert.guarantee))
    footer = trace.footer
    assert footer.verdict == "MWins", (adversary.name, footer)
    assert parse_ext(footer.sum) >= cert.guarantee
    m_moves = [e for e in trace.events if e.player == "M" and e.updates]
    assert len(m_moves) <= cert.steps


class TestRecursiveSuite:
    def test_rungs(self):
        assert rung(1) == first_rung()
        assert rung(2).child == rung(1)
        assert rung(2).guarantee > rung(1).guarantee

    @pytest.mark.parametrize("index", [1, 2])
    @pytest.mark.parametrize("name", sorted(SUITE))
    def test_beats_the_named_adversaries(self, index, name):
        cert = rung(index)
        assert_recursive_win(cert, SUITE[name](cert))

    @pytest.mark.parametrize("index", [1, 2])
    def test_beats_a_hundred_random_adversaries(self, index):
        cert = rung(index)
        for seed in range(100):
            assert_recursive_win(cert, random_adversary(seed))

    def test_same_seed_gives_the_same_bytes(self):
        cert = rung(1)
        config = GameConfig.unit(cert.height, cert.guarantee)
        first = run_match(recursive_strategy(cert), random_adversary(11), config, seed=11)
        second = run_match(recursive_strategy(cert), random_adversary(11), config, seed=11)
        assert first.to_jsonl() == second.to_jsonl()
        assert verify_trace(parse_trace(first.to_jsonl())).verdict == "MWins"


def entries(event: TraceEvent):
    return {u.node: parse_rat(u.value) for u in event.updates}


class TestScalingEquivalence:
    def test_subtree_match_mirrors_the_unit_match(self):
        cert = first_rung()
        base = run_match(recursive_strategy(cert), threshold_dodger(cert), GameConfig.unit(cert.height, cert.guarantee))
        assert all(e.status == "ok" for e in base.events)
        moves = [{"1" + x: v / 2 for x, v in entries(e).items()} for e in base.events if e.player == "A"]
        moves[0] = {"1": HALF, **moves[0]}
        inner = scaled(recursive_strategy(cert), "1", HALF, HALF)
        mirrored = run_match(inner, scripted(moves), GameConfig.unit(cert.height + 1, cert.guarantee))

        assert len(mirrored.events) == len(base.events)
        for b, s in zip(base.events, mirrored.events):
            assert (s.player, s.winning, s.status) == (b.player, b.winning, b.status)
            if b.player == "M":
                assert entries(s) == {"1" + x: v / 2 for x, v in entries(b).items()}
                assert s.claim == (None if b.claim is None else "1" + b.claim)
        assert (mirrored.footer.verdict, mirrored.footer.rounds) == (base.footer.verdict, base.footer.rounds)
        assert mirrored.footer.leaf == "1" + base.footer.leaf
        assert parse_ext(mirrored.footer.sum) == parse_ext(base.footer.sum)


class TestRegistry:
    def test_resolves_aliases(self):
        assert isinstance(get_m_strategy("trivial"), TrivialStrategy)
        assert get_a_strategy("silent", seed=3, cert=None).name == "silent"
        assert get_a_strategy("random", seed=5).seed == 5
        assert isinstance(get_m_strategy("recursive", cert=first_rung()), RecursiveStrategy)

    def test_known_aliases(self):
        assert "monotone_layered" in m_registry.aliases()
        assert "threshold_dodger" in a_registry.aliases()

    def test_missing_options(self):
        with pytest.raises(ConfigError):
            get_m_strategy("recursive")
        with pytest.raises(ConfigError):
            get_a_strategy("threshold_dodger")

    def test_unknown_alias(self):
        with pytest.raises(StrategyNotFound):
            get_m_strategy("clairvoyant")

    def test_custom_registration_and_usage(self):
        registry = StrategyRegistry({})
        registry.register("always_pass", module="unused", factory_name="unused", factory=lambda: _Passer())
        strategy = registry.get("always_pass", seed=1)
        assert isinstance(strategy, _Passer)
        registry.get("always_pass")
        assert registry.get_usage_stats() == {"always_pass": 2}


class _Passer(TrivialStrategy):
    def respond(self, view, event):
        return Response()
