"""Randomized cross-validation over seeded normal-form plumbings.

Each suite checks, seed by seed, that independent routes to the same invariant agree
exactly. Seeds are independent; with concurrency above 1 they are sharded over a
process pool and merged back in seed order.
"""

import asyncio
import random
from collections.abc import Callable, Iterable
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from logging import getLogger
from math import gcd

from pydantic import BaseModel, Field

from .cover import (
    BrieskornCover,
    CoverPiece,
    PlanSummary,
    cover_piece_data,
    plan_leaves,
    split_at_edge,
    uac_plan,
    zhs_check,
)
from .formats import serialize_plumbing
from .invariants import euler_number, fiber_pairing, fiber_pairing_routes, linking_number
from .plumbing import PlumbingDiagram, det_plumbing, node_euler_from_plumbing, random_normal_form, string_between
from .singularity import is_singularity_link
from .splice import (
    OrbifoldDecoration,
    SpliceDiagram,
    edge_determinant,
    linking_product,
    orbifold_adjust,
    splice_from_plumbing,
)

logger = getLogger(__name__)


@dataclass(frozen=True)
class FuzzParameters:
    max_vertices: int = 12
    node_weights: tuple[int, int] = (-5, -1)
    string_weights: tuple[int, int] = (-5, -2)

    def diagram(self, seed: int) -> PlumbingDiagram:
        return random_normal_form(
            seed,
            max_vertices=self.max_vertices,
            node_weights=self.node_weights,
            string_weights=self.string_weights,
        )


class SeedSkipped(Exception):
    """The seed's diagram is outside the suite's domain."""


class SeedFailure(BaseModel):
    suite: str
    seed: int
    messages: list[str]
    reproduction: str


class SuiteSummary(BaseModel):
    suite: str
    checked: int = 0
    skipped: int = 0
    failed: int = 0


class FuzzReport(BaseModel):
    seeds: int
    max_vertices: int
    suites: list[SuiteSummary] = Field(default_factory=list)
    failures: list[SeedFailure] = Field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


@dataclass(frozen=True)
class SeedResult:
    suite: str
    seed: int
    skipped: bool = False
    messages: tuple[str, ...] = ()
    reproduction: str = ""

    @property
    def failed(self) -> bool:
        return bool(self.messages)


def _sign(x: int) -> int:
    return -1 if x < 0 else 1


def _require_nodes(diagram: PlumbingDiagram, count: int = 1) -> SpliceDiagram:
    splice = splice_from_plumbing(diagram).splice
    if splice.atomic or len(splice.nodes) < count:
        raise SeedSkipped()
    return splice


def check_identities(diagram: PlumbingDiagram) -> list[str]:
    """Edge-determinant equation, sign normalization, linking identity and Euler numbers."""
    splice = _require_nodes(diagram)
    problems = []
    det = det_plumbing(diagram)
    _, unnormalized, _ = splice_from_plumbing(diagram)
    for (v, x), w in unnormalized.weights.items():
        if splice.weights[(v, x)] != abs(w):
            problems.append(f"weight at {v} toward {x}: {splice.weights[(v, x)]} != |{w}|")
    for v in splice.nodes:
        expected = _sign(det)
        for x in unnormalized.neighbors(v):
            expected *= _sign(unnormalized.weight(v, x))
        if splice.sign(v) != expected:
            problems.append(f"sign of {v} is {splice.sign(v)}, normalization gives {expected}")
        e_splice = euler_number(splice, abs(det), v)
        e_plumbing = node_euler_from_plumbing(diagram, v)
        if e_splice != e_plumbing:
            problems.append(f"e({v}) is {e_splice} from the splice diagram, {e_plumbing} from the plumbing")
    for a, b in splice.node_edges():
        tilde = edge_determinant(unnormalized, a, b)
        routes = fiber_pairing_routes(diagram, a, b)
        if det * routes.string != tilde:
            problems.append(f"det * p_string = {det * routes.string} but D~ = {tilde} on {a}-{b}")
        if not routes.agree():
            problems.append(f"fiber pairing routes disagree on {a}-{b}: {routes}")
        signs = _sign(unnormalized.weight(a, b)) * _sign(unnormalized.weight(b, a))
        if edge_determinant(splice, a, b) != signs * tilde:
            problems.append(f"D != sign(r~0) sign(r~1) D~ on {a}-{b}")
    pairs = [(v, v) for v in splice.nodes] + list(combinations(splice.nodes, 2))
    for v, w in pairs:
        lk = linking_number(diagram, v, w)
        expected_lk = Fraction(linking_product(unnormalized, v, w), det)
        if lk != expected_lk:
            problems.append(f"lk({v}, {w}) = {lk}, splice diagram gives {expected_lk}")
    return problems


def check_verdict_routes(diagram: PlumbingDiagram) -> list[str]:
    _require_nodes(diagram)
    verdict = is_singularity_link(diagram)
    if not verdict.route_agreement:
        return [f"singularity routes disagree: {dict(verdict.routes)}"]
    return []


def _string_path(diagram: PlumbingDiagram, a: str, b: str) -> list[str]:
    return [a, *string_between(diagram, a, b), b]


def check_cover(diagram: PlumbingDiagram) -> list[str]:
    """Splits along every node-edge, the piece data and plan invariants across first edges."""
    splice = _require_nodes(diagram, 2)
    piece = CoverPiece.from_plumbing(diagram)
    problems = []
    for a, b in splice.node_edges():
        split = split_at_edge(piece, a, b)
        if not split.derived_weights_agree:
            problems.append(f"piece weights recomputed after splitting {a}-{b} differ from the divided weights")
        path = _string_path(diagram, a, b)
        forward = {piece.presentation.ideal_generator(x, y) for x, y in zip(path, path[1:])}
        backward = {piece.presentation.ideal_generator(y, x) for x, y in zip(path, path[1:])}
        if len(forward) != 1 or len(backward) != 1:
            problems.append(f"ideal generator varies along the string {a}-{b}: {forward}, {backward}")
        for v, other in ((a, b), (b, a)):
            data = cover_piece_data(piece, v, other)
            if data.fiber_degree != data.meridian_order:
                problems.append(f"f({v}) = {data.fiber_degree} but the meridian of {v} has order {data.meridian_order}")
            if data.euler is not None and data.cover_euler * data.fiber_degree != data.base_degree * data.euler:
                problems.append(f"cover Euler number of {v} breaks e~ f = base * e")
    summaries = {edge: PlanSummary.of(uac_plan(diagram, first_edge=edge)) for edge in splice.node_edges()}
    if len(set(summaries.values())) != 1:
        problems.append(f"plans differ across first edges: {summaries}")
    return problems


def check_orbifold(diagram: PlumbingDiagram, seed: int) -> list[str]:
    """Random orbifold degrees on plumbing leaves: derived diagram versus weight adjustment."""
    splice = _require_nodes(diagram)
    rng = random.Random(seed)
    leaves = [v for v in diagram.vertices if diagram.valence(v) == 1]
    degrees = {leaf: rng.randint(2, 3) for leaf in leaves if rng.random() < 0.5}
    if not degrees:
        raise SeedSkipped()
    decoration = OrbifoldDecoration(degrees)
    adjusted, product = orbifold_adjust(splice, decoration)
    derived = splice_from_plumbing(diagram, degrees).splice
    problems = []
    if derived.weights != adjusted.weights or derived.signs != adjusted.signs:
        problems.append(f"orbifold diagram for {degrees} differs from the adjusted diagram")
    d = abs(det_plumbing(diagram))
    orbifold_order = CoverPiece.from_plumbing(diagram, degrees).order
    if orbifold_order != product * d:
        problems.append(f"|H_1^orb| = {orbifold_order}, expected {product} * {d}")
    for a, b in splice.node_edges():
        if edge_determinant(adjusted, a, b) != product * edge_determinant(splice, a, b):
            problems.append(f"edge determinant on {a}-{b} is not multiplied by {product}")
        if fiber_pairing(adjusted, product * d, a, b) != fiber_pairing(splice, d, a, b):
            problems.append(f"fiber pairing on {a}-{b} changes under orbifold adjustment")
    return problems


def check_zhs(diagram: PlumbingDiagram) -> list[str]:
    """Coprime diagrams: every plan leaf is a Brieskorn sphere with pairwise coprime exponents."""
    splice = _require_nodes(diagram)
    if not zhs_check(splice):
        raise SeedSkipped()
    problems = []
    for leaf in plan_leaves(uac_plan(diagram)):
        if not isinstance(leaf, BrieskornCover):
            problems.append(f"plan leaf at {leaf.node} is not a Brieskorn sphere")
        elif any(gcd(x, y) != 1 for x, y in combinations(leaf.exponents, 2)):
            problems.append(f"Brieskorn exponents {leaf.exponents} at {leaf.node} are not pairwise coprime")
    return problems


SUITES: dict[str, Callable[[PlumbingDiagram, int], list[str]]] = {
    "identities": lambda diagram, seed: check_identities(diagram),
    "verdicts": lambda diagram, seed: check_verdict_routes(diagram),
    "cover": lambda diagram, seed: check_cover(diagram),
    "orbifold": check_orbifold,
    "zhs": lambda diagram, seed: check_zhs(diagram),
}


def reproduction(diagram: PlumbingDiagram, suite: str, seed: int) -> str:
    return f"# suite {suite}, seed {seed}\n" + serialize_plumbing(diagram)


def run_seed(suite: str, seed: int, parameters: FuzzParameters) -> SeedResult:
    """Run one suite on one seed; every exception counts as a failure of that seed."""
    diagram = parameters.diagram(seed)
    try:
        messages = SUITES[suite](diagram, seed)
    except SeedSkipped:
        return SeedResult(suite, seed, skipped=True)
    except Exception as e:
        logger.warning("suite %s raised on seed %s: %s", suite, seed, e)
        messages = [f"{type(e).__name__}: {e}"]
    if messages:
        return SeedResult(suite, seed, messages=tuple(messages), reproduction=reproduction(diagram, suite, seed))
    return SeedResult(suite, seed)


async def run_suite(
    suite: str,
    seeds: Iterable[int],
    parameters: FuzzParameters,
    concurrency: int = 1,
    executor: ProcessPoolExecutor | None = None,
) -> list[SeedResult]:
    """Results of one suite in seed order."""
    if suite not in SUITES:
        raise ValueError(f"Unknown fuzz suite {suite!r}; choose from {', '.join(SUITES)}")
    seeds = sorted(seeds)
    if concurrency <= 1 or executor is None:
        return [run_seed(suite, seed, parameters) for seed in seeds]

    loop = asyncio.get_running_loop()
    semaphore = asyncio.Semaphore(concurrency)

    async def run_with_semaphore(seed: int) -> SeedResult:
        async with semaphore:
            return await loop.run_in_executor(executor, run_seed, suite, seed, parameters)

    results = await asyncio.gather(*[run_with_semaphore(seed) for seed in seeds])
    return sorted(results, key=lambda result: result.seed)


async def run_fuzz(
    suites: Iterable[str],
    seeds: int,
    parameters: FuzzParameters,
    concurrency: int = 1,
) -> FuzzReport:
    """Run the named suites over seeds 0..seeds-1 and merge the results."""
    report = FuzzReport(seeds=seeds, max_vertices=parameters.max_vertices)
    executor = ProcessPoolExecutor(max_workers=concurrency) if concurrency > 1 else None
    try:
        for suite in suites:
            results = await run_suite(suite, range(seeds), parameters, concurrency, executor)
            summary = SuiteSummary(suite=suite)
            for result in results:
                if result.skipped:
                    summary.skipped += 1
                    continue
                summary.checked += 1
                if result.failed:
                    summary.failed += 1
                    report.failures.append(
                        SeedFailure(
                            suite=suite,
                            seed=result.seed,
                            messages=list(result.messages),
                            reproduction=result.reproduction,
                        )
                    )
            logger.info(
                "suite %s: %s checked, %s skipped, %s failed", suite, summary.checked, summary.skipped, summary.failed
            )
            report.suites.append(summary)
    finally:
        if executor is not None:
            executor.shutdown()
    return report
