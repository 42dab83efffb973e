"""UAV placement on plane A: greedy descent, genetic search and the hybrid of both.

The drivers work on the plane-A lattice. A candidate is an (N_u, 2) array of
1-based cell indices; objectives see it as a list of Point3 at altitude h_u.
Objectives are pluggable, so the network planner reuses the same drivers with
a capacity objective.
"""

from __future__ import annotations

import logging
import math
import time
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Any, Literal, Protocol

import numpy as np

from ..config import CACHE_SIZE
from ..exceptions import InvalidQueryError, OccludedEndpointError
from .geometry import Point3, Scene
from .los_engine import CoverageGrid, coverage_matrix, coverage_percent, union_coverage

logger = logging.getLogger(__name__)

# Per-UAV lattice moves in tie-break order: stay, +x, -x, +y, -y.
MOVES = ((0, 0), (1, 0), (-1, 0), (0, 1), (0, -1))


@dataclass(frozen=True)
class ObjectiveResult:
    """Objective value plus optional payload.

    ``positions`` is set by objectives that repair the candidate (the geometric
    planner); population-based drivers write those positions back.
    """

    value: float
    payload: Any = None
    positions: tuple[Point3, ...] | None = None


class ObjectiveFn(Protocol):
    altitude: float

    def __call__(self, positions: Sequence[Point3]) -> ObjectiveResult: ...


@dataclass(frozen=True)
class ProgressEvent:
    algorithm: str
    step: int
    eval_count: int
    best: float
    wall_seconds: float


ProgressCallback = Callable[[ProgressEvent], None]


@dataclass(frozen=True)
class PlacementState:
    positions: tuple[Point3, ...]
    objective: float
    eval_count: int = 0
    steps: int = 0
    payload: Any = None
    trace: tuple[ProgressEvent, ...] = ()


@dataclass(frozen=True)
class GaConfig:
    population: int = 40
    elite: int = 4
    crossover_count: int = 24
    mutation_count: int = 12
    iterations: int = 20
    greedy_descents_per_iter: int = 2
    greedy_pool: int = 8
    rng_seed: int = 0
    mutation: Literal["uniform", "gaussian"] = "uniform"
    mutation_sigma_cells: float = 5.0

    def __post_init__(self) -> None:
        if self.elite + self.crossover_count + self.mutation_count != self.population:
            raise InvalidQueryError("elite + crossover_count + mutation_count must equal population")
        if min(self.population, self.elite, self.iterations) < 1:
            raise InvalidQueryError("population, elite and iterations must be at least 1")
        if min(self.crossover_count, self.mutation_count, self.greedy_descents_per_iter) < 0:
            raise InvalidQueryError("operator counts must be non-negative")
        if not self.elite <= self.greedy_pool <= self.population:
            raise InvalidQueryError("greedy_pool must lie between elite and population")
        if self.greedy_descents_per_iter > self.greedy_pool:
            raise InvalidQueryError("greedy_descents_per_iter cannot exceed greedy_pool")


class CoverageObjective:
    """LoS coverage percentage of the union of per-UAV grids.

    Per-UAV grids are memoised by position: a greedy move changes one UAV, so
    only one new grid is computed per candidate. A UAV lattice point inside a
    block sees nothing and contributes an all-NLoS grid.
    """

    def __init__(self, scene: Scene, altitude: float, cache_size: int = CACHE_SIZE):
        if altitude > scene.h_max:
            raise InvalidQueryError(f"altitude {altitude} exceeds h_max {scene.h_max}")
        self.scene = scene
        self.altitude = altitude
        self._counted = scene.counted_cells()
        self._grid = lru_cache(maxsize=cache_size)(self._grid_at)

    def _grid_at(self, x: float, y: float, z: float) -> CoverageGrid:
        try:
            return coverage_matrix(self.scene, Point3(x, y, z))
        except OccludedEndpointError:
            logger.debug(f"UAV at ({x}, {y}, {z}) is occluded at source")
            return CoverageGrid(np.zeros((self.scene.nx, self.scene.ny), dtype=bool), source="occluded")

    def grids(self, positions: Sequence[Point3]) -> list[CoverageGrid]:
        return [self._grid(p.x, p.y, p.z) for p in positions]

    def __call__(self, positions: Sequence[Point3]) -> ObjectiveResult:
        union = union_coverage(self.grids(positions))
        return ObjectiveResult(coverage_percent(union, self._counted), payload=union)


def greedy_actions(n_uav: int, step_x: float, step_y: float) -> list[np.ndarray]:
    """The 5 * N_u single-UAV action vectors, each an (N_u, 2) displacement in meters."""
    if n_uav < 1:
        raise InvalidQueryError("n_uav must be at least 1")
    actions = []
    for n in range(n_uav):
        for di, dj in MOVES:
            action = np.zeros((n_uav, 2))
            action[n] = (di * step_x, dj * step_y)
            actions.append(action)
    return actions


def cells_to_positions(scene: Scene, cells: np.ndarray, altitude: float) -> tuple[Point3, ...]:
    return tuple(scene.uav_cell_point(int(i), int(j), altitude) for i, j in cells)


def positions_to_cells(scene: Scene, positions: Sequence[Point3]) -> np.ndarray:
    cells = np.array([scene.uav_cell_index(p.x, p.y) for p in positions], dtype=int)
    for i, j in cells:
        if not scene.in_uav_lattice(int(i), int(j)):
            raise InvalidQueryError(f"position cell ({i}, {j}) lies outside plane A")
    return cells


def random_cells(scene: Scene, rng: np.random.Generator, n_uav: int) -> np.ndarray:
    xs = rng.integers(1, scene.nux + 1, size=n_uav)
    ys = rng.integers(1, scene.nuy + 1, size=n_uav)
    return np.stack([xs, ys], axis=1)


def evaluate_batch(
    obj: ObjectiveFn, candidates: Sequence[Sequence[Point3]], workers: int = 1
) -> list[ObjectiveResult]:
    """Evaluate candidates in order; results keep candidate order whatever the worker count."""
    if workers <= 1 or len(candidates) <= 1:
        return [obj(c) for c in candidates]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(obj, candidates))


@dataclass
class _Tracker:
    algorithm: str
    on_progress: ProgressCallback | None
    started: float = field(default_factory=time.perf_counter)
    events: list[ProgressEvent] = field(default_factory=list)

    def emit(self, step: int, eval_count: int, best: float) -> None:
        event = ProgressEvent(self.algorithm, step, eval_count, best, time.perf_counter() - self.started)
        self.events.append(event)
        if self.on_progress is not None:
            self.on_progress(event)


def greedy_descend(
    start: PlacementState,
    obj: ObjectiveFn,
    scene: Scene,
    *,
    workers: int = 1,
) -> PlacementState:
    """Steepest single-UAV ascent until staying put is the best action."""
    cells = positions_to_cells(scene, start.positions)
    n_uav = len(cells)
    eval_count = start.eval_count
    steps = 0
    while True:
        candidates: list[np.ndarray | None] = []
        for n in range(n_uav):
            for di, dj in MOVES:
                moved = cells.copy()
                moved[n, 0] += di
                moved[n, 1] += dj
                feasible = scene.in_uav_lattice(int(moved[n, 0]), int(moved[n, 1]))
                candidates.append(moved if feasible else None)
        feasible_idx = [k for k, c in enumerate(candidates) if c is not None]
        results = evaluate_batch(
            obj, [cells_to_positions(scene, candidates[k], obj.altitude) for k in feasible_idx], workers
        )
        values = np.full(len(candidates), -math.inf)
        by_index = dict(zip(feasible_idx, results, strict=True))
        for k, result in by_index.items():
            values[k] = result.value
        eval_count += 5 * n_uav
        steps += 1
        best = int(np.argmax(values))
        if best % len(MOVES) == 0:
            # A stay action won, so the current placement is a local maximum.
            result = by_index[best]
            return PlacementState(
                positions=cells_to_positions(scene, cells, obj.altitude),
                objective=result.value,
                eval_count=eval_count,
                steps=start.steps + steps,
                payload=result.payload,
            )
        cells = candidates[best]
        assert cells is not None


def greedy_multistart(
    obj: ObjectiveFn,
    scene: Scene,
    n_starts: int,
    rng: np.random.Generator,
    n_uav: int,
    *,
    eval_budget: int | None = None,
    workers: int = 1,
    on_progress: ProgressCallback | None = None,
) -> PlacementState:
    """Best local optimum over uniformly random lattice starts.

    With ``eval_budget`` set, starts continue past ``n_starts`` until the summed
    evaluation count reaches the budget.
    """
    if n_starts < 1:
        raise InvalidQueryError("n_starts must be at least 1")
    tracker = _Tracker("greedy", on_progress)
    best: PlacementState | None = None
    eval_count = 0
    start_index = 0
    while start_index < n_starts or (eval_budget is not None and eval_count < eval_budget):
        start = PlacementState(cells_to_positions(scene, random_cells(scene, rng, n_uav), obj.altitude), math.nan)
        local = greedy_descend(start, obj, scene, workers=workers)
        eval_count += local.eval_count
        if best is None or local.objective > best.objective:
            best = local
        start_index += 1
        tracker.emit(start_index, eval_count, best.objective)
    assert best is not None
    return replace(best, eval_count=eval_count, trace=tuple(tracker.events))


def roulette_weights(fitness: np.ndarray, eps: float = 1e-9) -> np.ndarray:
    """Selection probabilities proportional to min-shifted fitness."""
    shifted = fitness - fitness.min() + eps
    return shifted / shifted.sum()


def _mutate(
    cfg: GaConfig, scene: Scene, parent: np.ndarray, rng: np.random.Generator
) -> np.ndarray:
    child = parent.copy()
    slot = int(rng.integers(len(child)))
    if cfg.mutation == "gaussian":
        step = np.rint(rng.normal(0.0, cfg.mutation_sigma_cells, size=2)).astype(int)
        child[slot, 0] = np.clip(child[slot, 0] + step[0], 1, scene.nux)
        child[slot, 1] = np.clip(child[slot, 1] + step[1], 1, scene.nuy)
    else:
        child[slot] = (rng.integers(1, scene.nux + 1), rng.integers(1, scene.nuy + 1))
    return child


Refiner = Callable[[np.ndarray, np.random.Generator], tuple[int, list[PlacementState]]]


def _evolve(
    algorithm: str,
    cfg: GaConfig,
    obj: ObjectiveFn,
    scene: Scene,
    n_uav: int,
    refine: Refiner | None,
    workers: int,
    on_progress: ProgressCallback | None,
) -> PlacementState:
    rng = np.random.default_rng(cfg.rng_seed)
    tracker = _Tracker(algorithm, on_progress)
    population = np.stack([random_cells(scene, rng, n_uav) for _ in range(cfg.population)])
    eval_count = 0
    best: PlacementState | None = None

    for generation in range(cfg.iterations):
        results = evaluate_batch(
            obj, [cells_to_positions(scene, column, obj.altitude) for column in population], workers
        )
        eval_count += cfg.population
        for k, result in enumerate(results):
            if result.positions is not None:
                population[k] = positions_to_cells(scene, result.positions)
        fitness = np.array([r.value for r in results], dtype=float)
        order = np.argsort(-fitness, kind="stable")
        top = int(order[0])
        if best is None or fitness[top] > best.objective:
            best = PlacementState(
                positions=cells_to_positions(scene, population[top], obj.altitude),
                objective=float(fitness[top]),
                payload=results[top].payload,
            )

        weights = roulette_weights(fitness)
        elite = population[order[: cfg.elite]]
        crossover = []
        for _ in range(cfg.crossover_count):
            p1, p2 = rng.choice(cfg.population, size=2, p=weights)
            take_first = rng.random(n_uav) < 0.5
            crossover.append(np.where(take_first[:, None], population[p1], population[p2]))
        mutation = []
        for _ in range(cfg.mutation_count):
            parent = int(rng.choice(cfg.population, p=weights))
            mutation.append(_mutate(cfg, scene, population[parent], rng))
        population = np.concatenate(
            [elite, np.array(crossover, dtype=int).reshape(-1, n_uav, 2), np.array(mutation, dtype=int).reshape(-1, n_uav, 2)]
        )

        if refine is not None:
            spent, refined = refine(population, rng)
            eval_count += spent
            for state in refined:
                if state.objective > best.objective:
                    best = state
        tracker.emit(generation + 1, eval_count, best.objective)

    assert best is not None
    return replace(best, eval_count=eval_count, trace=tuple(tracker.events))


def ga_search(
    cfg: GaConfig,
    obj: ObjectiveFn,
    scene: Scene,
    n_uav: int,
    *,
    workers: int = 1,
    on_progress: ProgressCallback | None = None,
) -> PlacementState:
    """Elitism + roulette selection + uniform per-UAV crossover + single-slot mutation."""
    return _evolve("ga", cfg, obj, scene, n_uav, None, workers, on_progress)


def hybrid_search(
    cfg: GaConfig,
    obj: ObjectiveFn,
    scene: Scene,
    n_uav: int,
    *,
    workers: int = 1,
    on_progress: ProgressCallback | None = None,
) -> PlacementState:
    """GA whose every generation also runs greedy descents from the top columns.

    Descents start from columns picked among the first ``greedy_pool`` columns of
    the next population (the elite followed by crossover children), and each
    descended placement replaces the column it started from.
    """

    def refine(
        population: np.ndarray, rng: np.random.Generator
    ) -> tuple[int, list[PlacementState]]:
        if cfg.greedy_descents_per_iter == 0:
            return 0, []
        picks = rng.choice(cfg.greedy_pool, size=cfg.greedy_descents_per_iter, replace=False)
        spent = 0
        refined = []
        for idx in picks:
            start = PlacementState(cells_to_positions(scene, population[idx], obj.altitude), math.nan)
            local = greedy_descend(start, obj, scene, workers=workers)
            spent += local.eval_count
            population[idx] = positions_to_cells(scene, local.positions)
            refined.append(replace(local, eval_count=0))
        return spent, refined

    return _evolve("hybrid", cfg, obj, scene, n_uav, refine, workers, on_progress)
