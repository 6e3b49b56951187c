import asyncio
from collections.abc import Callable, Iterator
from contextlib import contextmanager
from dataclasses import dataclass
from functools import wraps
from logging import getLogger
from pathlib import Path
from typing import Any

import typer
from rich.console import Console
from rich.markup import escape

from .services.cover import CoverPiece, cover_piece_data, split_at_edge, uac_plan
from .services.errors import ConsistencyError, InputError
from .services.formats import parse_plumbing, parse_splice_json, serialize_splice_json, splice_to_dot
from .services.formatter import format_fuzz_report, format_splice, format_verdict, show_progress
from .services.fuzz import SUITES, FuzzParameters, run_fuzz
from .services.invariants import decomposition_graph
from .services.plumbing import PlumbingDiagram, require_nonsingular, require_normal_form
from .services.presentation import HomologyPresentation
from .services.reports import (
    DecompositionReport,
    PieceDataReport,
    Report,
    SplitReport,
    VerdictReport,
    edge_determinants,
    input_digest,
    splice_section,
    uac_report,
)
from .services.singularity import is_singularity_link, splice_condition
from .services.splice import OrbifoldDecoration, SpliceDiagram, splice_from_plumbing
from .settings import get_fuzz_settings, settings

app = typer.Typer()
logger = getLogger(__name__)
console = Console(stderr=True)

EXIT_INPUT = 1
EXIT_CONSISTENCY = 2
EXIT_NOT_A_LINK = 3


def syncify(f: Callable[..., Any]) -> Callable[..., Any]:
    """This simple decorator converts an async function into a sync function,
    allowing it to work with Typer.
    """

    @wraps(f)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        return asyncio.run(f(*args, **kwargs))

    return wrapper


@contextmanager
def handle_errors(action: str) -> Iterator[None]:
    """Map failures onto exit codes: 1 for bad input, 2 for cross-check disagreement."""
    try:
        yield
    except typer.Exit:
        raise
    except ConsistencyError as e:
        logger.warning("consistency failure during %s: %s", action, e)
        console.print(f"[red]Consistency failure:[/red] {escape(str(e))}")
        raise typer.Exit(EXIT_CONSISTENCY)
    except (ValueError, OSError) as e:
        console.print(f"[red]Error:[/red] {escape(str(e))}")
        raise typer.Exit(EXIT_INPUT)
    except Exception as e:
        logger.exception("Unexpected error during %s", action)
        console.print(f"[red]Error:[/red] {escape(str(e))}")
        raise typer.Exit(EXIT_INPUT)


@dataclass(frozen=True)
class LoadedInput:
    text: str
    plumbing: PlumbingDiagram | None = None
    splice: SpliceDiagram | None = None
    decoration: OrbifoldDecoration | None = None

    @property
    def digest(self) -> str:
        return input_digest(self.text)

    def require_plumbing(self, command: str) -> PlumbingDiagram:
        if self.plumbing is None:
            raise InputError(f"{command} needs a plumbing file, not a splice diagram")
        return self.plumbing


def _load(path: Path) -> LoadedInput:
    text = path.read_text(encoding="utf-8")
    if path.suffix == ".json":
        splice, decoration = parse_splice_json(text)
        return LoadedInput(text, splice=splice, decoration=decoration)
    plumbing = parse_plumbing(text)
    require_normal_form(plumbing)
    return LoadedInput(text, plumbing=plumbing)


def _parse_orbifold(values: list[str] | None) -> dict[str, int]:
    degrees: dict[str, int] = {}
    for value in values or []:
        leaf, sep, degree = value.partition("=")
        if not sep or not leaf:
            raise InputError(f"--orbifold expects LEAF=DEGREE, got {value!r}")
        try:
            degrees[leaf] = int(degree)
        except ValueError:
            raise InputError(f"Orbifold degree {degree!r} of {leaf} is not an integer") from None
    return dict(sorted(degrees.items()))


def _parse_edge(value: str) -> tuple[str, str]:
    a, sep, b = value.partition("-")
    if not sep or not a or not b:
        raise InputError(f"--edge expects NODE-NODE, got {value!r}")
    return a, b


def _emit(report: Report) -> None:
    typer.echo(report.to_json(indent=settings.json_indent))


FileArgument = typer.Argument(..., help="Plumbing file (line grammar) or splice diagram (.json)")
OrbifoldOption = typer.Option(None, "--orbifold", help="Orbifold degree of a plumbing leaf as LEAF=DEGREE (repeatable)")


@app.command(help=f"Display the current installed version of {settings.project_name}.")
def version() -> None:
    from . import __version__

    typer.echo(f"{settings.project_name} - {__version__}")


@app.command(help="Derive the splice diagram of a plumbing and its edge determinants.")
def derive(
    path: Path = FileArgument,
    orbifold: list[str] | None = OrbifoldOption,
    dot: bool = typer.Option(False, "--dot", help="Emit the splice diagram as DOT instead of JSON"),
    pretty: bool = typer.Option(False, "--pretty", help="Also print rich tables on stderr"),
) -> None:
    """Derive the splice diagram of a plumbing and its edge determinants."""
    with handle_errors("derive"):
        loaded = _load(path)
        plumbing = loaded.require_plumbing("derive")
        degrees = _parse_orbifold(orbifold)
        require_nonsingular(plumbing)
        splice = splice_from_plumbing(plumbing, degrees).splice
        decoration = OrbifoldDecoration(degrees)
        if not splice.atomic:
            decoration.validate(splice)
        if pretty:
            format_splice(splice, console)
        if dot:
            typer.echo(splice_to_dot(splice, settings.dot_graph_name, decoration), nl=False)
            return
        _emit(
            Report(
                input_digest=loaded.digest,
                h1_order=abs(HomologyPresentation.from_plumbing(plumbing, degrees).det()),
                splice=splice_section(splice, decoration),
                edge_determinants=edge_determinants(splice),
            )
        )


@app.command(help="Decide whether the manifold is a singularity link.")
def check(
    path: Path = FileArgument,
    strict: bool = typer.Option(False, "--strict", help="Exit with code 3 when the verdict is false"),
    pretty: bool = typer.Option(False, "--pretty", help="Also print rich tables on stderr"),
) -> None:
    """Decide whether the manifold is a singularity link.

    Plumbing inputs run all three routes; splice diagrams run the splice condition only.
    """
    with handle_errors("check"):
        loaded = _load(path)
        if loaded.plumbing is not None:
            verdict = is_singularity_link(loaded.plumbing)
            h1_order: int | None = abs(require_nonsingular(loaded.plumbing))
        else:
            assert loaded.splice is not None
            verdict = splice_condition(loaded.splice)
            h1_order = None
        if pretty:
            format_verdict(verdict, console)
        _emit(Report(input_digest=loaded.digest, h1_order=h1_order, singularity=VerdictReport.of(verdict)))
    if not verdict.route_agreement:
        raise typer.Exit(EXIT_CONSISTENCY)
    if strict and not verdict.verdict:
        raise typer.Exit(EXIT_NOT_A_LINK)


@app.command(help="Build the decomposition graph and the reduced plumbing matrix.")
def decomp(
    path: Path = FileArgument,
    order: int | None = typer.Option(None, "--order", help="|H_1|; required for splice diagram inputs"),
) -> None:
    """Build the decomposition graph and the reduced plumbing matrix."""
    with handle_errors("decomp"):
        loaded = _load(path)
        if loaded.plumbing is not None:
            d = abs(require_nonsingular(loaded.plumbing))
            if order is not None and order != d:
                raise InputError(f"--order {order} contradicts |H_1| = {d} of the plumbing")
            splice = splice_from_plumbing(loaded.plumbing).splice
        else:
            if order is None:
                raise InputError("decomp needs --order for a splice diagram input")
            assert loaded.splice is not None
            splice, d = loaded.splice, order
        graph, reduced = decomposition_graph(splice, d)
        _emit(Report(input_digest=loaded.digest, h1_order=d, decomposition=DecompositionReport.of(graph, reduced)))


@app.command(help="Split the cover computation along one node-edge.")
def cover(
    path: Path = FileArgument,
    edge: str = typer.Option(..., "--edge", help="Node-edge to cut, as NODE-NODE"),
    orbifold: list[str] | None = OrbifoldOption,
) -> None:
    """Split the cover computation along one node-edge."""
    with handle_errors("cover"):
        loaded = _load(path)
        a, b = _parse_edge(edge)
        piece = CoverPiece.from_plumbing(loaded.require_plumbing("cover"), _parse_orbifold(orbifold))
        split = split_at_edge(piece, a, b)
        pieces = [PieceDataReport.of(cover_piece_data(piece, a, b)), PieceDataReport.of(cover_piece_data(piece, b, a))]
        _emit(Report(input_digest=loaded.digest, h1_order=piece.order, split=SplitReport.of(split), pieces=pieces))


@app.command(help="Plan the universal abelian cover recursively.")
def uac(
    path: Path = FileArgument,
    orbifold: list[str] | None = OrbifoldOption,
    edge: str | None = typer.Option(None, "--edge", help="Node-edge cut first, as NODE-NODE"),
) -> None:
    """Plan the universal abelian cover recursively."""
    with handle_errors("uac"):
        loaded = _load(path)
        first_edge = _parse_edge(edge) if edge else None
        plan = uac_plan(loaded.require_plumbing("uac"), _parse_orbifold(orbifold), first_edge)
        _emit(Report(input_digest=loaded.digest, h1_order=plan.degree, cover=uac_report(plan)))


@app.command(help="Render a splice diagram as DOT (or as splice JSON with --json).")
def render(
    path: Path = FileArgument,
    orbifold: list[str] | None = OrbifoldOption,
    dot: bool = typer.Option(True, "--dot/--json", help="Emit DOT (default) or splice JSON"),
    name: str | None = typer.Option(None, "--name", help="DOT graph name"),
) -> None:
    """Render a splice diagram as DOT (or as splice JSON with --json)."""
    with handle_errors("render"):
        loaded = _load(path)
        if loaded.plumbing is not None:
            require_nonsingular(loaded.plumbing)
            degrees = _parse_orbifold(orbifold)
            splice = splice_from_plumbing(loaded.plumbing, degrees).splice
            decoration = OrbifoldDecoration(degrees)
        else:
            assert loaded.splice is not None
            splice, decoration = loaded.splice, loaded.decoration or OrbifoldDecoration()
        if splice.atomic:
            raise InputError("Lens spaces have no splice diagram to render")
        if dot:
            typer.echo(splice_to_dot(splice, name or settings.dot_graph_name, decoration), nl=False)
        else:
            typer.echo(serialize_splice_json(splice, decoration, indent=settings.json_indent))


@app.command(help="Cross-validate invariants on seeded random plumbings.")
@syncify
async def fuzz(
    seeds: int | None = typer.Option(None, "--seeds", min=1, help="Number of seeds (default from settings)"),
    max_vertices: int | None = typer.Option(None, "--max-vertices", min=1, help="Largest generated tree"),
    suite: list[str] | None = typer.Option(None, "--suite", help=f"Suite to run (repeatable): {', '.join(SUITES)}"),
    concurrency: int | None = typer.Option(None, "--concurrency", min=1, help="Worker processes"),
    pretty: bool = typer.Option(False, "--pretty", help="Show a spinner and a summary table on stderr"),
) -> None:
    """Cross-validate invariants on seeded random plumbings.

    Exits 2 when any seed fails; the failing seeds and their plumbing files are in the JSON summary.
    """
    with handle_errors("fuzz"):
        fuzz_settings = get_fuzz_settings()
        suites = suite or list(SUITES)
        unknown = [name for name in suites if name not in SUITES]
        if unknown:
            raise InputError(f"Unknown fuzz suite(s): {', '.join(unknown)}")
        parameters = FuzzParameters(
            max_vertices=max_vertices or fuzz_settings.fuzz_max_vertices,
            node_weights=(fuzz_settings.fuzz_min_node_weight, fuzz_settings.fuzz_max_node_weight),
            string_weights=(fuzz_settings.fuzz_min_string_weight, -2),
        )
        count = seeds or fuzz_settings.fuzz_seeds
        workers = concurrency or fuzz_settings.fuzz_concurrency
        if pretty:
            with show_progress(f"Running {len(suites)} suite(s) over {count} seeds...", console):
                report = await run_fuzz(suites, count, parameters, workers)
            format_fuzz_report(report, console)
        else:
            report = await run_fuzz(suites, count, parameters, workers)
        typer.echo(report.model_dump_json(indent=settings.json_indent or None))
    if not report.ok:
        raise typer.Exit(EXIT_CONSISTENCY)
