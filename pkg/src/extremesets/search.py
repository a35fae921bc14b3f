"""Hierarchical grid search over unimodular measures on a fixed support.

The first support point carries the fixed mass 1; every other point gets a
phase ``k / mesh`` turns.  A pass scores every candidate, keeps those that
could still refine to something interesting, and the next pass refines the
kept candidates on a finer mesh.  Two objectives are available:

* ``residual``: sum over g != 0 of |Re| + |Im| of (nu * nu~)(g).  It is zero
  exactly at extreme measures.  A candidate is kept while the score is
  inside the Lipschitz window, so an empty window proves non-extremality.
* ``transform``: max |nu^|.  Its infimum over the support is the PSC.

Candidates that do not fit in the memory budget are evicted (worst score
first) and counted as discards.  A "not extreme" verdict is only issued by
a run that never discarded anything.
"""
from __future__ import annotations

import itertools
import json
import logging
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

import numpy as np

from .cyclotomic import exact_extremality_check, snap_turn
from .groups import Element, GroupSpec, format_elements, sub
from .measures import PhaseMeasure

log = logging.getLogger(__name__)

SNAP_TOLERANCE = 1e-6
CHECKPOINT_VERSION = 1


class Objective(str, Enum):
    RESIDUAL = "residual"
    TRANSFORM = "transform"

    @classmethod
    def parse(cls, text: str) -> "Objective":
        aliases = {"findx": cls.RESIDUAL, "findbest": cls.TRANSFORM}
        key = text.lower()
        return aliases.get(key) or cls(key)


@dataclass
class SearchConfig:
    mesh_start: int | None = None
    mesh_max: int = 64
    refinement_factor: int = 2
    precision: float = 1e-7
    memory_budget: int = 1 << 30
    objective: Objective = Objective.RESIDUAL
    refine_radius: int | None = None
    snap_count: int = 64
    chunk_size: int = 1 << 16
    workers: int = 1
    checkpoint: str | None = None

    def __post_init__(self) -> None:
        self.objective = Objective(self.objective)
        if self.mesh_start is not None and self.mesh_start < 2:
            raise ValueError("mesh_start must be >= 2")
        if self.mesh_max < 2:
            raise ValueError("mesh_max must be >= 2")
        if self.refinement_factor < 2:
            raise ValueError("refinement_factor must be >= 2")
        if self.precision <= 0:
            raise ValueError("precision must be positive")

    @property
    def radius(self) -> int:
        return self.refinement_factor // 2 if self.refine_radius is None else self.refine_radius

    def max_candidates(self, n_free: int) -> int:
        per = 4 * max(n_free, 1) + 8
        cap = self.memory_budget // per
        if cap < 1:
            raise ValueError("memory budget is smaller than one candidate")
        return cap


# -- bounds -----------------------------------------------------------------


def window_epsilon(N: int, mesh: int) -> float:
    """Residual change bound between any measure and its nearest grid point."""
    return 2 * N * (N - 1) * 2 * math.pi / mesh


def residual_window(N: int, mesh: int, precision: float = 1e-7) -> float:
    """Largest residual a grid point near an extreme measure can have."""
    return window_epsilon(N, mesh) * math.sqrt(2) + precision


def per_coefficient_bound(N: int, mesh: int) -> float:
    """Change of any single coefficient of nu*nu~ when each non-anchor phase
    moves by at most pi/mesh."""
    if N < 2 or mesh < 2:
        raise ValueError("need N >= 2 and mesh >= 2")
    return (N - 1) * 2 * math.pi / mesh


def transform_lipschitz(N: int, mesh: int) -> float:
    """Change of any transform value when each non-anchor phase moves by at most pi/mesh."""
    return (N - 1) * 2 * math.sin(math.pi / (2 * mesh))


def default_mesh_starts(N: int) -> list[int]:
    """Meshes k >= 2 with k | N or k | N - 1, smallest first."""
    if N <= 2:
        return [2]
    return [k for k in range(2, N + 1) if N % k == 0 or (N - 1) % k == 0]


@dataclass(frozen=True)
class Certificate:
    mesh: int
    epsilon: float
    min_score: float
    threshold: float


def certify_not_extreme(
    min_score: float, mesh: int, N: int, discarded: int, precision: float = 1e-7
) -> Certificate | None:
    if discarded:
        return None
    threshold = residual_window(N, mesh, precision)
    if not min_score > threshold:
        return None
    return Certificate(mesh, window_epsilon(N, mesh), min_score, threshold)


# -- candidate scoring ---------------------------------------------------------


class SupportProblem:
    """Precomputed tables for scoring phase grids on one support set."""

    def __init__(self, G: GroupSpec, E: Iterable[Element]):
        self.group = G
        self.points: list[Element] = sorted({G.reduce(g) for g in E}, key=G.index)
        if not self.points:
            raise ValueError("empty support")
        self.N = len(self.points)
        idx = [G.index(p) for p in self.points]
        self.characters = G.character_matrix[:, idx].T.copy()  # (N, #G)
        diffs: dict[Element, list[tuple[int, int]]] = {}
        for a, x in enumerate(self.points):
            for b, y in enumerate(self.points):
                if a != b:
                    diffs.setdefault(sub(G, x, y), []).append((a, b))
        self.differences = sorted(diffs, key=G.index)
        inc = np.zeros((self.N * self.N, max(len(self.differences), 1)))
        for col, h in enumerate(self.differences):
            for a, b in diffs[h]:
                inc[a * self.N + b, col] = 1.0
        self.incidence = inc
        self.max_multiplicity = max((len(v) for v in diffs.values()), default=0)

    @property
    def n_free(self) -> int:
        return self.N - 1

    def phases(self, K: np.ndarray, mesh: int) -> np.ndarray:
        roots = np.exp(2j * np.pi * np.arange(mesh) / mesh)
        Z = np.ones((len(K), self.N), dtype=np.complex128)
        if self.N > 1:
            Z[:, 1:] = roots[K]
        return Z

    def coefficients(self, Z: np.ndarray) -> np.ndarray:
        """Off-identity coefficients of nu*nu~, one column per difference."""
        outer = (Z[:, :, None] * Z[:, None, :].conj()).reshape(len(Z), -1)
        return outer @ self.incidence

    def residual(self, Z: np.ndarray) -> np.ndarray:
        if self.N == 1:
            return np.zeros(len(Z))
        c = self.coefficients(Z)
        return (np.abs(c.real) + np.abs(c.imag)).sum(axis=1)

    def max_coefficient(self, Z: np.ndarray) -> np.ndarray:
        if self.N == 1:
            return np.zeros(len(Z))
        return np.abs(self.coefficients(Z)).max(axis=1)

    def transform_max(self, Z: np.ndarray) -> np.ndarray:
        return np.abs(Z @ self.characters).max(axis=1)

    def transform_lower_bound(self, Z: np.ndarray, mesh: int) -> tuple[np.ndarray, np.ndarray]:
        """(max |nu^|, a lower bound for max |mu^| over the whole cell of nu).

        For each character, project mu^(gamma) on the direction of nu^(gamma);
        the worst case over the cell is attained coordinate by coordinate.
        """
        half = math.pi / mesh
        terms = Z[:, :, None] * self.characters[None, :, :]
        S = terms.sum(axis=1)
        mags = np.abs(S)
        score = mags.max(axis=1)
        u = np.where(mags > 0, S / np.where(mags > 0, mags, 1.0), 1.0)
        alpha = np.abs(np.angle(terms * u.conj()[:, None, :]))
        shift = np.full(self.N, half)
        shift[0] = 0.0
        proj = np.cos(np.minimum(np.pi, alpha + shift[None, :, None])).sum(axis=1)
        first_order = score - transform_lipschitz(self.N, mesh)
        lb = np.maximum(proj.max(axis=1), first_order) - 1e-12 * self.N
        return score, lb

    def measure(self, K: Sequence[int], mesh: int) -> PhaseMeasure:
        turns = [Fraction(0)] + [Fraction(int(k), mesh) for k in K]
        return PhaseMeasure.unimodular(self.group, self.points, turns)

    def measure_from_turns(self, turns: Sequence[Fraction]) -> PhaseMeasure:
        return PhaseMeasure.unimodular(self.group, self.points, turns)


# -- candidate sets ------------------------------------------------------------


@dataclass
class CandidateSet:
    mesh: int
    turns: np.ndarray  # (K, N-1) int32
    scores: np.ndarray  # (K,)

    def __len__(self) -> int:
        return len(self.scores)

    @classmethod
    def empty(cls, mesh: int, n_free: int) -> "CandidateSet":
        return cls(mesh, np.zeros((0, n_free), dtype=np.int32), np.zeros(0))


def encode(K: np.ndarray, mesh: int) -> np.ndarray | None:
    """One int64 per row (mixed radix), or None if that would overflow."""
    n = K.shape[1]
    if n == 0:
        return np.zeros(len(K), dtype=np.int64)
    if mesh**n >= 2**62:
        return None
    code = np.zeros(len(K), dtype=np.int64)
    for j in range(n):
        code = code * mesh + K[:, j]
    return code


def _dedupe(K: np.ndarray, scores: np.ndarray, mesh: int) -> tuple[np.ndarray, np.ndarray]:
    if len(K) < 2:
        return K, scores
    code = encode(K, mesh)
    if code is None:
        _, first = np.unique(K, axis=0, return_index=True)
    else:
        _, first = np.unique(code, return_index=True)
    return K[first], scores[first]


def _order(K: np.ndarray, scores: np.ndarray, mesh: int) -> np.ndarray:
    """Deterministic order: by score, ties broken by grid position."""
    code = encode(K, mesh)
    if code is None:
        keys = [K[:, j] for j in range(K.shape[1] - 1, -1, -1)]
        return np.lexsort(keys + [scores])
    return np.lexsort((code, scores))


def _evict(K: np.ndarray, scores: np.ndarray, mesh: int, cap: int) -> tuple[np.ndarray, np.ndarray, int]:
    if len(K) <= cap:
        return K, scores, 0
    keep = _order(K, scores, mesh)[:cap]
    keep.sort()
    return K[keep], scores[keep], len(K) - cap


def full_grid_blocks(n_free: int, mesh: int, chunk: int) -> Iterator[np.ndarray]:
    total = mesh**n_free
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        K = np.empty((len(idx), n_free), dtype=np.int32)
        for j in range(n_free - 1, -1, -1):
            idx, K[:, j] = np.divmod(idx, mesh)
        yield K


def refined_blocks(seeds: np.ndarray, factor: int, radius: int, mesh: int, chunk: int) -> Iterator[np.ndarray]:
    n_free = seeds.shape[1]
    offsets = np.array(list(itertools.product(range(-radius, radius + 1), repeat=n_free)), dtype=np.int32)
    per = max(1, chunk // max(len(offsets), 1))
    for start in range(0, len(seeds), per):
        block = seeds[start : start + per].astype(np.int32) * factor
        yield ((block[:, None, :] + offsets[None, :, :]) % mesh).reshape(-1, n_free)


def _blocks(problem: SupportProblem, mesh: int, seeds: CandidateSet | None, config: SearchConfig) -> Iterator[np.ndarray]:
    if seeds is None:
        return full_grid_blocks(problem.n_free, mesh, config.chunk_size)
    factor, rem = divmod(mesh, seeds.mesh)
    if rem or factor < 1:
        raise ValueError(f"mesh {mesh} is not a multiple of the seed mesh {seeds.mesh}")
    radius = config.radius if factor > 1 else 0
    return refined_blocks(seeds.turns, factor, radius, mesh, config.chunk_size)


def _map_blocks(fn, blocks: Iterable[np.ndarray], workers: int) -> Iterator:
    if workers <= 1:
        yield from map(fn, blocks)
        return
    with ThreadPoolExecutor(max_workers=workers) as pool:
        yield from pool.map(fn, blocks)


# -- one pass ------------------------------------------------------------------


@dataclass
class PassResult:
    mesh: int
    kept: CandidateSet
    discarded: int
    evaluated: int
    min_score: float
    best_turns: np.ndarray
    best_scores: np.ndarray
    elapsed: float

    @property
    def best_score(self) -> float:
        return float(self.best_scores[0]) if len(self.best_scores) else math.inf

    def summary(self) -> dict:
        return {
            "mesh": self.mesh,
            "evaluated": self.evaluated,
            "kept": len(self.kept),
            "discarded": self.discarded,
            "min_score": self.min_score,
            "seconds": round(self.elapsed, 3),
        }


def grid_pass(
    G: GroupSpec,
    E: Iterable[Element],
    mesh: int,
    seeds: CandidateSet | None = None,
    config: SearchConfig | None = None,
    problem: SupportProblem | None = None,
) -> PassResult:
    """Score one mesh level and keep the candidates inside the retention window."""
    config = config or SearchConfig()
    if mesh < 2:
        raise ValueError("mesh must be >= 2")
    problem = problem or SupportProblem(G, E)
    cap = config.max_candidates(problem.n_free)
    N = problem.N
    residual = config.objective is Objective.RESIDUAL
    window = residual_window(N, mesh, config.precision)
    slack = transform_lipschitz(N, mesh)
    t0 = time.perf_counter()

    def score(K: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        Z = problem.phases(K, mesh)
        return K, problem.residual(Z) if residual else problem.transform_max(Z)

    kept_K: list[np.ndarray] = []
    kept_s: list[np.ndarray] = []
    pending = 0
    discarded = 0
    evaluated = 0
    running_min = math.inf
    best_K = np.zeros((0, problem.n_free), dtype=np.int32)
    best_s = np.zeros(0)

    def consolidate() -> None:
        nonlocal discarded, pending, kept_K, kept_s
        if not kept_K:
            return
        K = np.concatenate(kept_K)
        s = np.concatenate(kept_s)
        K, s = _dedupe(K, s, mesh)
        if not residual:
            mask = s <= running_min + slack
            K, s = K[mask], s[mask]
        K, s, evicted = _evict(K, s, mesh, cap)
        discarded += evicted
        kept_K, kept_s, pending = [K], [s], len(K)

    for K, s in _map_blocks(score, _blocks(problem, mesh, seeds, config), config.workers):
        evaluated += len(s)
        if len(s) == 0:
            continue
        running_min = min(running_min, float(s.min()))
        mask = s <= window if residual else s <= running_min + slack
        if mask.any():
            kept_K.append(K[mask])
            kept_s.append(s[mask])
            pending += int(mask.sum())
        # track the best few for snapping
        top = min(config.snap_count, len(s))
        part = np.argpartition(s, top - 1)[:top]
        bK = np.concatenate([best_K, K[part]])
        bs = np.concatenate([best_s, s[part]])
        bK, bs = _dedupe(bK, bs, mesh)
        order = _order(bK, bs, mesh)[: config.snap_count]
        best_K, best_s = bK[order], bs[order]
        if pending > 2 * cap or pending > 4 * config.chunk_size * 16:
            consolidate()
    consolidate()
    K = kept_K[0] if kept_K else np.zeros((0, problem.n_free), dtype=np.int32)
    s = kept_s[0] if kept_s else np.zeros(0)
    if len(K):
        code = encode(K, mesh)
        order = np.argsort(code, kind="stable") if code is not None else np.lexsort(K.T[::-1])
        K, s = K[order], s[order]
    return PassResult(
        mesh=mesh,
        kept=CandidateSet(mesh, K.astype(np.int32), s),
        discarded=discarded,
        evaluated=evaluated,
        min_score=running_min,
        best_turns=best_K,
        best_scores=best_s,
        elapsed=time.perf_counter() - t0,
    )


# -- verdicts and reports ------------------------------------------------------


@dataclass(frozen=True)
class ExtremeFound:
    measure: PhaseMeasure
    name = "ExtremeFound"


@dataclass(frozen=True)
class CertifiedNotExtreme:
    lower_bound: float
    epsilon_used: float
    mesh: int
    name = "CertifiedNotExtreme"


@dataclass(frozen=True)
class Inconclusive:
    reason: str
    name = "Inconclusive"


Verdict = ExtremeFound | CertifiedNotExtreme | Inconclusive


@dataclass
class SearchReport:
    group: GroupSpec
    set: list[Element]
    objective: Objective
    best_value: float
    best_measure: PhaseMeasure | None
    kept: int
    discarded: int
    mesh_reached: int
    verdict: Verdict
    passes: list[dict] = field(default_factory=list)

    def to_record(self) -> dict:
        v = self.verdict
        verdict: dict = {"kind": v.name}
        if isinstance(v, ExtremeFound):
            verdict["turns"] = [str(t) for t in v.measure.turns]
        elif isinstance(v, CertifiedNotExtreme):
            verdict.update(lower_bound=v.lower_bound, epsilon=v.epsilon_used, mesh=v.mesh)
        else:
            verdict["reason"] = v.reason
        return {
            "group": self.group.literal(),
            "set": format_elements(self.set),
            "objective": self.objective.value,
            "best_value": self.best_value,
            "best_turns": [str(t) for t in self.best_measure.turns] if self.best_measure else None,
            "kept": self.kept,
            "discarded": self.discarded,
            "mesh_reached": self.mesh_reached,
            "verdict": verdict,
            "passes": self.passes,
        }


def snap_candidates(problem: SupportProblem, K: np.ndarray, mesh: int) -> list[PhaseMeasure]:
    """Exact measures obtained by snapping a grid candidate with several denominator caps."""
    caps = sorted({mesh, 2 * mesh, 3 * mesh, math.lcm(mesh, 12)})
    angles = 2 * math.pi * np.asarray(K, dtype=np.float64) / mesh
    out, seen = [], set()
    for cap in caps:
        turns = (Fraction(0),) + tuple(snap_turn(a, cap) for a in angles)
        if turns not in seen:
            seen.add(turns)
            out.append(problem.measure_from_turns(turns))
    return out


def _try_exact(problem: SupportProblem, result: PassResult) -> PhaseMeasure | None:
    for K, s in zip(result.best_turns, result.best_scores):
        if s > SNAP_TOLERANCE:
            break
        for mu in snap_candidates(problem, K, result.mesh):
            Z = np.exp(2j * np.pi * np.array([float(t) for t in mu.turns]))[None, :]
            if problem.residual(Z)[0] <= SNAP_TOLERANCE and exact_extremality_check(mu):
                return mu
    return None


@dataclass
class _Run:
    """One refinement chain, started at its own coarsest mesh."""

    start: int
    mesh: int
    seeds: CandidateSet | None = None
    discarded: int = 0
    done: bool = False


def run_search(G: GroupSpec, E: Iterable[Element], config: SearchConfig | None = None) -> SearchReport:
    """Refine every start mesh, always advancing the chain with the smallest next mesh.

    Interleaving the chains means a measure with small phase denominators is
    found at the first mesh that contains it, whichever chain reaches it.
    """
    config = config or SearchConfig()
    problem = SupportProblem(G, E)
    N = problem.N
    starts = [config.mesh_start] if config.mesh_start else default_mesh_starts(N)
    starts = [s for s in starts if s <= config.mesh_max] or [min(starts)]
    runs = [_Run(s, s) for s in starts]
    if config.checkpoint:
        _load_checkpoint(config, problem, runs)
    passes: list[dict] = []
    best_value, best_measure = math.inf, None
    total_discarded = sum(r.discarded for r in runs)
    total_kept = 0
    mesh_reached = 0

    def report(verdict: Verdict) -> SearchReport:
        return SearchReport(
            G, problem.points, config.objective, best_value, best_measure,
            total_kept, total_discarded, mesh_reached, verdict, passes,
        )

    while True:
        active = [r for r in runs if not r.done]
        if not active:
            break
        run = min(active, key=lambda r: r.mesh)
        mesh = run.mesh
        result = grid_pass(G, problem.points, mesh, run.seeds, config, problem)
        passes.append({"start": run.start, **result.summary()})
        log.info("pass %s", passes[-1])
        run.discarded += result.discarded
        total_discarded += result.discarded
        total_kept = len(result.kept)
        mesh_reached = max(mesh_reached, mesh)
        if result.best_score < best_value and len(result.best_turns):
            best_value = result.best_score
            best_measure = problem.measure(result.best_turns[0], mesh)
        if config.objective is Objective.RESIDUAL:
            mu = _try_exact(problem, result)
            if mu is not None:
                best_value, best_measure = 0.0, mu
                return report(ExtremeFound(mu))
            cert = certify_not_extreme(result.min_score, mesh, N, run.discarded, config.precision)
            if cert is not None:
                return report(CertifiedNotExtreme(cert.min_score, cert.epsilon, cert.mesh))
        run.seeds = result.kept
        run.mesh = mesh * config.refinement_factor
        run.done = not len(result.kept) or run.mesh > config.mesh_max
        if config.checkpoint:
            _save_checkpoint(config, problem, runs)
    if config.objective is Objective.TRANSFORM:
        return report(Inconclusive(f"transform search; best max|transform| {best_value:.9g}"))
    reason = (
        f"{total_discarded} candidates discarded over budget"
        if total_discarded
        else f"retention window not empty at mesh {mesh_reached}"
    )
    return report(Inconclusive(reason))


def psc_upper_bound(G: GroupSpec, E: Iterable[Element], config: SearchConfig | None = None) -> float:
    """Smallest max |nu^| seen over the evaluated grid measures."""
    config = config or SearchConfig(objective=Objective.TRANSFORM)
    if config.objective is not Objective.TRANSFORM:
        config = SearchConfig(**{**asdict(config), "objective": Objective.TRANSFORM})
    return run_search(G, E, config).best_value


# -- checkpoints ---------------------------------------------------------------


def _checkpoint_header(config: SearchConfig, problem: SupportProblem, starts: list[int]) -> dict:
    return {
        "version": CHECKPOINT_VERSION,
        "group": problem.group.literal(),
        "set": format_elements(problem.points),
        "objective": config.objective.value,
        "refinement_factor": config.refinement_factor,
        "radius": config.radius,
        "precision": config.precision,
        "starts": starts,
    }


def _save_checkpoint(config: SearchConfig, problem: SupportProblem, runs: list[_Run]) -> None:
    header = _checkpoint_header(config, problem, [r.start for r in runs])
    header["runs"] = [
        {"mesh": r.mesh, "seed_mesh": r.seeds.mesh if r.seeds else None, "discarded": r.discarded, "done": r.done}
        for r in runs
    ]
    arrays = {}
    for i, r in enumerate(runs):
        if r.seeds is not None:
            arrays[f"turns_{i}"] = r.seeds.turns
            arrays[f"scores_{i}"] = r.seeds.scores
    tmp = config.checkpoint + ".tmp"
    with open(tmp, "wb") as fh:
        np.savez(fh, header=np.array(json.dumps(header, sort_keys=True)), **arrays)
    os.replace(tmp, config.checkpoint)


def _load_checkpoint(config: SearchConfig, problem: SupportProblem, runs: list[_Run]) -> bool:
    """Restore run state in place; returns False if there is no usable checkpoint."""
    if not os.path.exists(config.checkpoint):
        return False
    with np.load(config.checkpoint, allow_pickle=False) as data:
        header = json.loads(str(data["header"]))
        expected = _checkpoint_header(config, problem, [r.start for r in runs])
        if any(header.get(k) != v for k, v in expected.items()):
            log.warning("checkpoint %s does not match this search; ignoring it", config.checkpoint)
            return False
        for i, (r, saved) in enumerate(zip(runs, header["runs"])):
            r.mesh, r.discarded = saved["mesh"], saved["discarded"]
            if saved["seed_mesh"] is not None:
                r.seeds = CandidateSet(saved["seed_mesh"], data[f"turns_{i}"].astype(np.int32), data[f"scores_{i}"])
            # a chain stopped only by mesh_max can continue under a larger one
            exhausted = r.seeds is not None and not len(r.seeds)
            r.done = exhausted or r.mesh > config.mesh_max
    log.info("resumed from checkpoint %s", config.checkpoint)
    return True


# -- certificates ----------------------------------------------------------------


def _hierarchy(
    problem: SupportProblem,
    meshes: Sequence[int],
    evaluate,
    prune,
    memory_budget: int,
    chunk_size: int,
) -> tuple[list[dict], int, CandidateSet, float]:
    """Refine cells level by level, dropping those ``prune`` rejects.

    ``evaluate(Z, mesh)`` returns (score, bound) arrays; ``prune(score, bound,
    mesh)`` returns a boolean mask of rejected cells.  Returns the pass log,
    the discard count, the surviving cells at the last mesh and the minimum
    bound over every rejected or evicted cell.
    """
    for a, b in zip(meshes, meshes[1:]):
        if b % a or (b // a) % 2 == 0:
            raise ValueError("each mesh must be an odd multiple of the previous one")
    cap = SearchConfig(memory_budget=memory_budget).max_candidates(problem.n_free)
    seeds: CandidateSet | None = None
    passes = []
    discarded = 0
    leaf_min = math.inf
    for mesh in meshes:
        t0 = time.perf_counter()
        if seeds is None:
            blocks = full_grid_blocks(problem.n_free, mesh, chunk_size)
        else:
            factor = mesh // seeds.mesh
            blocks = refined_blocks(seeds.turns, factor, factor // 2, mesh, chunk_size)
        kept_K, kept_b = [], []
        evaluated = 0
        for K in blocks:
            score, bound = evaluate(problem.phases(K, mesh), mesh)
            evaluated += len(K)
            rejected = prune(score, bound, mesh)
            if rejected.any():
                leaf_min = min(leaf_min, float(bound[rejected].min()))
            keep = ~rejected
            kept_K.append(K[keep])
            kept_b.append(bound[keep])
        K = np.concatenate(kept_K) if kept_K else np.zeros((0, problem.n_free), np.int32)
        b = np.concatenate(kept_b) if kept_b else np.zeros(0)
        if len(K) > cap:
            order = _order(K, b, mesh)
            evicted = order[cap:]
            leaf_min = min(leaf_min, float(b[evicted].min()))
            keep = np.sort(order[:cap])
            discarded += len(evicted)
            K, b = K[keep], b[keep]
        seeds = CandidateSet(mesh, K, b)
        passes.append({
            "mesh": mesh,
            "evaluated": evaluated,
            "kept": len(K),
            "discarded": discarded,
            "seconds": round(time.perf_counter() - t0, 3),
        })
        log.info("certificate pass %s", passes[-1])
        if not len(K):
            break
    return passes, discarded, seeds, leaf_min


@dataclass
class CoefficientCertificate:
    """Every grid measure at ``final_mesh`` has some off-identity coefficient
    of nu*nu~ larger than ``bound``, so no extreme measure lives on the set."""

    certified: bool
    final_mesh: int
    bound: float
    survivors: int
    discarded: int
    passes: list[dict]


def coefficient_certificate(
    G: GroupSpec,
    E: Iterable[Element],
    meshes: Sequence[int] = (15, 45, 135),
    memory_budget: int = 1 << 30,
    chunk_size: int = 1 << 16,
) -> CoefficientCertificate:
    problem = SupportProblem(G, E)
    if problem.N < 2:
        raise ValueError("need at least two points")
    final = meshes[-1]
    final_bound = per_coefficient_bound(problem.N, final)

    def evaluate(Z, mesh):
        c = problem.max_coefficient(Z)
        return c, c

    def prune(score, bound, mesh):
        # every final grid point in this cell is within pi/mesh per phase
        slack = 0.0 if mesh == final else per_coefficient_bound(problem.N, mesh)
        return score > slack + final_bound

    passes, discarded, leaves, _ = _hierarchy(problem, meshes, evaluate, prune, memory_budget, chunk_size)
    certified = discarded == 0 and len(leaves) == 0
    return CoefficientCertificate(certified, final, final_bound, len(leaves), discarded, passes)


@dataclass
class PscBound:
    """Rigorous lower bound on max |mu^| over unimodular mu on the set."""

    lower_bound: float
    upper_bound: float
    target: float
    reached_target: bool
    survivors: int
    discarded: int
    passes: list[dict]


def psc_lower_bound(
    G: GroupSpec,
    E: Iterable[Element],
    target: float,
    meshes: Sequence[int] = (15, 45, 135, 405),
    memory_budget: int = 1 << 30,
    chunk_size: int = 1 << 15,
) -> PscBound:
    """Branch and bound on cells of the phase torus.

    A cell is dropped once its bound exceeds ``target``.  The returned
    ``lower_bound`` is the minimum bound over all leaves of the refinement
    tree (dropped, evicted or surviving), so it is valid even when the target
    is not reached.
    """
    problem = SupportProblem(G, E)
    upper = [math.inf]

    def evaluate(Z, mesh):
        score, lb = problem.transform_lower_bound(Z, mesh)
        if len(score):
            upper[0] = min(upper[0], float(score.min()))
        return score, lb

    def prune(score, bound, mesh):
        return bound > target

    passes, discarded, leaves, leaf_min = _hierarchy(problem, meshes, evaluate, prune, memory_budget, chunk_size)
    if len(leaves):
        leaf_min = min(leaf_min, float(leaves.scores.min()))
    return PscBound(leaf_min, upper[0], target, leaf_min >= target, len(leaves), discarded, passes)
