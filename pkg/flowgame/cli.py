"""
Command-line surface.

Exit codes: 0 success, 1 a property or verdict failed, 2 usage error.
"""

import json
from fractions import Fraction
from pathlib import Path
from typing import List, Optional

import typer
from pydantic import ValidationError
from typing_extensions import Annotated

from flowgame.app_logging import configure_logging, logger
from flowgame.certificates.cert import StrategyCert, cert_hash, ladder, ladder_from_document, rung_table, validate_cert
from flowgame.errors import ConfigError, FlowGameError, StrategyNotFound
from flowgame.game.rationals import format_rat, parse_rat
from flowgame.game.state import GameConfig
from flowgame.harness.match import run_match
from flowgame.harness.replay import read_trace, verify_trace
from flowgame.measures import (
    DiscreteSemimeasure,
    iter_random_semimeasures,
    max_path_ratio,
    proportion_identity_holds,
    proportional_split,
)
from flowgame.monotone.builder import ce_builder
from flowgame.schemas import LadderDocument, SemimeasureDocument, canonical_json
from flowgame.settings import settings
from flowgame.strategies.registry import get_a_strategy, get_m_strategy
from flowgame.strategies.solver import GridSolver, toy_guarantee

app = typer.Typer(add_completion=False, help="Mathematician vs Adversary weight/flow games.")

USAGE_ERRORS = (ConfigError, StrategyNotFound, ValidationError)
HANDLED = (FlowGameError, ValidationError)


def _abort(exc: Exception) -> None:
    typer.echo(f"error: {exc}", err=True)
    raise typer.Exit(2 if isinstance(exc, USAGE_ERRORS) else 1)


def _load_ladder_cert(path: Path, rung: Optional[int]) -> StrategyCert:
    doc = LadderDocument.model_validate_json(path.read_text(encoding="utf-8"))
    rungs = ladder_from_document(doc).rungs
    try:
        return rungs[rung if rung is not None else -1]
    except IndexError as exc:
        raise ConfigError(f"ladder has {len(rungs)} rungs, no rung {rung}") from exc


@app.command()
def certify(
    k_target: Annotated[str, typer.Option("--k-target", help="Target guarantee as p/q")],
    out: Annotated[Optional[Path], typer.Option("--out", help="Write the ladder document here")] = None,
    max_rungs: Annotated[Optional[int], typer.Option("--max-rungs", help="Rung cap")] = None,
) -> None:
    """Build and validate the certificate ladder up to a target."""
    try:
        built = ladder(parse_rat(k_target), max_rungs=max_rungs)
        for rung in built.rungs:
            validate_cert(rung)
    except HANDLED as exc:
        _abort(exc)
        return
    for row in rung_table(built.rungs):
        typer.echo(json.dumps(row, sort_keys=True))
    if out is not None:
        out.write_text(canonical_json(built.to_document()) + "\n", encoding="utf-8")
        logger.info("ladder_written", path=str(out), rungs=len(built.rungs))


@app.command()
def play(
    m: Annotated[str, typer.Option("--m", help="Mathematician strategy alias")],
    a: Annotated[str, typer.Option("--a", help="Adversary strategy alias")],
    cert: Annotated[Optional[Path], typer.Option("--cert", help="Ladder document from `certify --out`")] = None,
    rung: Annotated[Optional[int], typer.Option("--rung", help="Rung index in the ladder (default: top)")] = None,
    k_target: Annotated[Optional[str], typer.Option("--k-target", help="Build the certificate for this target instead of reading --cert")] = None,
    k: Annotated[Optional[str], typer.Option("--k", help="Game target (default: the certificate's guarantee, else 1)")] = None,
    height: Annotated[Optional[int], typer.Option("--height", help="Tree height (default from the strategy)")] = None,
    rounds: Annotated[Optional[int], typer.Option("--rounds", help="Round cap")] = None,
    grace: Annotated[Optional[int], typer.Option("--grace", help="Non-restoring Adversary turns before M wins")] = None,
    seed: Annotated[int, typer.Option("--seed", help="Seed for random adversaries")] = 0,
    delta: Annotated[Optional[str], typer.Option("--delta", help="threshold_dodger margin as p/q")] = None,
    script: Annotated[Optional[Path], typer.Option("--script", help="Trace whose A moves a scripted adversary replays")] = None,
    layers: Annotated[int, typer.Option("--layers", help="Layer count for layered drivers")] = 2,
    trace: Annotated[Optional[Path], typer.Option("--trace", help="Write the match trace (JSONL) here")] = None,
) -> None:
    """Play one match and print its footer."""
    try:
        certificate: Optional[StrategyCert] = None
        if cert is not None:
            certificate = _load_ladder_cert(cert, rung)
        elif k_target is not None:
            wanted = parse_rat(k_target)
            certificate = ladder(wanted).for_target(wanted)
        game_k = parse_rat(k) if k is not None else None
        m_strategy = get_m_strategy(
            m,
            cert=certificate,
            k=game_k,
            quota_exponents=list(range(1, layers + 1)),
        )
        a_strategy = get_a_strategy(
            a,
            cert=certificate,
            seed=seed,
            delta=parse_rat(delta) if delta is not None else None,
            trace=read_trace(script).events if script is not None else None,
        )
        if certificate is not None:
            target = game_k if game_k is not None else certificate.guarantee
            default_height = certificate.mono_height if m.startswith("monotone") else certificate.height
        else:
            target = game_k if game_k is not None else Fraction(1)
            default_height = 2 if m == "toy" else 0
        config = GameConfig.unit(height if height is not None else default_height, target)
        result = run_match(
            m_strategy,
            a_strategy,
            config,
            grace=grace,
            max_rounds=rounds,
            seed=seed,
            cert_hash=cert_hash(certificate) if certificate is not None else None,
        )
    except HANDLED as exc:
        _abort(exc)
        return
    if trace is not None:
        result.write(trace)
    typer.echo(canonical_json(result.footer))
    if result.footer.verdict != "MWins":
        raise typer.Exit(1)


@app.command()
def verify(
    trace: Annotated[Path, typer.Option("--trace", help="Trace file (JSONL)")],
) -> None:
    """Replay a trace and check every event and the footer."""
    try:
        report = verify_trace(trace)
    except HANDLED as exc:
        _abort(exc)
        return
    typer.echo(json.dumps({"events": report.events, "verdict": report.verdict, "rounds": report.rounds, "ok": True}))


@app.command()
def prop1(
    measure: Annotated[Optional[Path], typer.Option("--measure", help="Semimeasure document")] = None,
    random: Annotated[int, typer.Option("--random", help="Number of random semimeasures")] = 0,
    height: Annotated[int, typer.Option("--height", help="Maximum height of random semimeasures")] = 8,
    seed: Annotated[int, typer.Option("--seed", help="Seed for random semimeasures")] = 0,
) -> None:
    """Check that the proportional split keeps every path sum at most 1."""
    if measure is None and random <= 0:
        _abort(ConfigError("give --measure or --random"))
        return
    if height > settings.PROP1_MAX_HEIGHT:
        _abort(ConfigError(f"height {height} exceeds {settings.PROP1_MAX_HEIGHT}"))
        return
    measures: List[DiscreteSemimeasure] = []
    try:
        if measure is not None:
            doc = SemimeasureDocument.model_validate_json(measure.read_text(encoding="utf-8"))
            weights = {w.node: parse_rat(w.weight) for w in doc.weights}
            doc_height = doc.height if doc.height is not None else max((len(x) for x in weights), default=0)
            measures.append(DiscreteSemimeasure.of(doc_height, weights))
        measures.extend(iter_random_semimeasures(seed, random, height))
    except HANDLED as exc:
        _abort(exc)
        return
    failures = 0
    worst = None
    for idx, m in enumerate(measures):
        split = proportional_split(m)
        leaf, total = max_path_ratio(m, split)
        if worst is None or total > worst:
            worst = total
        if total > 1 or not proportion_identity_holds(m, split):
            failures += 1
            logger.warning("prop1_violation", index=idx, leaf=leaf, total=format_rat(total))
    typer.echo(json.dumps({"checked": len(measures), "failures": failures, "max_sum": format_rat(worst or 0)}))
    if failures:
        raise typer.Exit(1)


@app.command()
def search(
    height: Annotated[int, typer.Option("--height", help="Tree height")] = 1,
    k: Annotated[str, typer.Option("--k", help="Target as p/q")] = "1",
    grain: Annotated[int, typer.Option("--grain", help="Weights and flows are multiples of 1/grain")] = 4,
    plies: Annotated[Optional[int], typer.Option("--plies", help="Ply cap")] = None,
    toy: Annotated[bool, typer.Option("--toy", help="Fix M to the toy strategy")] = False,
    guarantee: Annotated[bool, typer.Option("--toy-guarantee", help="Scan k for the toy strategy's guarantee")] = False,
) -> None:
    """Solve a tiny game exhaustively."""
    ply_cap = plies if plies is not None else settings.SOLVER_MAX_PLIES
    try:
        if guarantee:
            report = toy_guarantee(height=height, grain=grain, plies=ply_cap)
            typer.echo(
                json.dumps(
                    {
                        "k_star": format_rat(report.k_star) if report.k_star is not None else None,
                        "lost_at": format_rat(report.lost_at) if report.lost_at is not None else None,
                        "reference": format_rat(report.reference),
                        "results": report.results,
                    },
                    sort_keys=True,
                )
            )
            return
        result = GridSolver(height, parse_rat(k), grain, ply_cap, toy=toy).solve()
    except HANDLED as exc:
        _abort(exc)
        return
    pv = [{"player": player.value, "move": {x: format_rat(v) for x, v in move.items()}} for player, move in result.pv]
    typer.echo(json.dumps({"winner": result.winner.value, "positions": result.positions, "pv": pv}, sort_keys=True))


@app.command("ce-build")
def ce_build(
    a: Annotated[str, typer.Option("--a", help="Adversary strategy alias")],
    layers: Annotated[int, typer.Option("--layers", help="Number of layers")] = 2,
    rounds: Annotated[Optional[int], typer.Option("--rounds", help="Round cap")] = None,
    layer_sum: Annotated[Optional[str], typer.Option("--layer-sum", help="Per-layer target as p/q")] = None,
    seed: Annotated[int, typer.Option("--seed", help="Seed for random adversaries")] = 0,
    out: Annotated[Optional[Path], typer.Option("--out", help="Write enumeration events (JSONL) here")] = None,
    report: Annotated[Optional[Path], typer.Option("--report", help="Write the final report here")] = None,
) -> None:
    """Run the monotone layered driver and enumerate its branch."""
    try:
        adversary = get_a_strategy(a, seed=seed)
        build = ce_builder(
            adversary,
            layers=layers,
            layer_sum=parse_rat(layer_sum) if layer_sum is not None else None,
            round_cap=rounds,
        )
    except HANDLED as exc:
        _abort(exc)
        return
    if out is not None:
        build.write_events(out)
    text = canonical_json(build.report)
    if report is not None:
        report.write_text(text + "\n", encoding="utf-8")
    typer.echo(text)
    if build.report.verdict != "Settled" or not build.report.dominance_ok:
        raise typer.Exit(1)


def main() -> None:
    configure_logging()
    app()


if __name__ == "__main__":
    main()
