"""Improvement dynamics: random runs, trace replay, two-phase convergence.

A step resolves one local blocking pair.  `run_random` repeatedly resolves a
uniformly chosen pair until the matching is locally stable or a step budget
runs out.  `replay` re-executes a recorded sequence through the reference
semantics and refuses traces that were never valid.  The two-phase routine
constructs a convergent sequence for bipartite games whose social links avoid
one side, using recency memory on that side.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .engine import NO_EDGE, NO_VERTEX, Engine, RunState
from .model import (
    DynamicsState,
    ImprovementStepError,
    Matching,
    MemoryKind,
    MemoryModel,
    NetworkGame,
    Pair,
    apply_step,
    initial_state,
    is_locally_stable,
    local_blocking_pairs,
    pair_of,
)

DEFAULT_MAX_STEPS = 10**6


@dataclass(frozen=True)
class ImprovementSequence:
    """A replayable record: where a run started and which pairs it resolved."""

    initial: Matching
    steps: Tuple[Pair, ...]
    seed: Optional[int] = None


@dataclass(frozen=True, eq=False)
class RunOutcome:
    final: DynamicsState
    steps_taken: int
    converged: bool
    trace: Optional[ImprovementSequence] = None


def run_random(
    game: NetworkGame,
    initial: Optional[Matching] = None,
    memory: MemoryModel = MemoryModel(),
    seed: int = 0,
    max_steps: int = DEFAULT_MAX_STEPS,
    record_trace: bool = False,
) -> RunOutcome:
    """Resolve uniformly random local blocking pairs until none are left.

    `converged` is True only when the final state was verified stable; running
    out of steps never counts as convergence.  The seed fixes both the pair
    choices and the random-memory chain, so reruns are bit-identical.
    """
    if initial is None:
        initial = Matching.empty()
    eng = Engine(game, memory)
    rs = RunState(eng, eng.mask_of(initial), seed=seed)
    rng = random.Random(seed)
    steps: List[Pair] = []
    taken = 0
    blocking = rs.blocking()
    while blocking and taken < max_steps:
        eidx = blocking[rng.randrange(len(blocking))]
        if record_trace:
            steps.append(eng.pair_of_edge(eidx))
        rs.step(eidx)
        taken += 1
        blocking = rs.blocking()

    final = DynamicsState(
        matching=eng.matching_of(rs.mask),
        memory=rs.memory_map(),
        history=rs.history_map(),
        rng_seed=rs.rng_seed,
    )
    trace = (
        ImprovementSequence(initial=initial, steps=tuple(steps), seed=seed)
        if record_trace
        else None
    )
    return RunOutcome(
        final=final, steps_taken=taken, converged=not blocking, trace=trace
    )


def replay(
    game: NetworkGame,
    sequence: ImprovementSequence,
    memory: MemoryModel = MemoryModel(),
) -> RunOutcome:
    """Re-run a recorded sequence through the reference step semantics.

    Raises ImprovementStepError with the offending index if some recorded pair
    is not a local blocking pair in the state it is applied to.
    """
    state = initial_state(game, sequence.initial, seed=sequence.seed or 0)
    for i, step in enumerate(sequence.steps):
        try:
            state = apply_step(game, state, step, memory)
        except ValueError as exc:
            raise ImprovementStepError(f"invalid step at index {i}: {exc}") from None
    return RunOutcome(
        final=state,
        steps_taken=len(sequence.steps),
        converged=is_locally_stable(game, state),
        trace=sequence,
    )


def _bipartite_sides(game: NetworkGame) -> Tuple[Tuple[str, ...], Tuple[str, ...]]:
    tags = game.side_of()
    if tags is None or not game.is_bipartite():
        raise ValueError(
            "two-phase dynamics needs a partition-tagged bipartite game"
        )
    us = tuple(sorted(v for v, s in tags.items() if s == "U"))
    ws = tuple(sorted(v for v, s in tags.items() if s == "W"))
    return us, ws


def two_phase_recency_sequence(
    game: NetworkGame,
    initial: Optional[Matching] = None,
    memory: Optional[MemoryModel] = None,
) -> ImprovementSequence:
    """Build a sequence that provably reaches a locally stable matching.

    Works on partition-tagged bipartite games whose social links never join
    two U-vertices, with recency memory covering all of U.  Phase one lets
    every matched U-vertex climb to its best reachable partner.  Afterwards
    only unmatched U-vertices can sit in blocking pairs; phase two serves them
    one per round, and after each round the partners the active vertex
    displaced are re-matched out of the displaced vertices' memory.  Rounds
    never make a W-vertex worse off, which is also checked at runtime.
    """
    if initial is None:
        initial = Matching.empty()
    us, _ = _bipartite_sides(game)
    uset = frozenset(us)
    tags = game.side_of()
    assert tags is not None
    for a, b in game.links:
        if tags[a] == "U" and tags[b] == "U":
            raise ValueError(
                "precondition violated (links inside U, or U lacks recency memory)"
            )
    if memory is None:
        memory = MemoryModel(MemoryKind.RECENCY, scope=uset)
    else:
        covered = memory.scope is None or uset <= memory.scope
        if memory.kind is not MemoryKind.RECENCY or not covered:
            raise ValueError(
                "precondition violated (links inside U, or U lacks recency memory)"
            )

    eng = Engine(game, memory)
    rs = RunState(eng, eng.mask_of(initial))
    uidx = sorted(eng.index[u] for u in us)
    steps: List[Pair] = []
    cap = _step_cap(len(us), eng.n - len(us))

    def blocking_by_vertex() -> Dict[int, List[int]]:
        per: Dict[int, List[int]] = {}
        for eidx in rs.blocking():
            a, b = eng.edges[eidx]
            per.setdefault(a, []).append(eidx)
            per.setdefault(b, []).append(eidx)
        return per

    def best_for(v: int, eidxs: List[int]) -> int:
        def key(eidx: int) -> Tuple[int, str]:
            a, b = eng.edges[eidx]
            other = b if a == v else a
            r = eng.ua[eidx] if a == v else eng.ub[eidx]
            return (-r, eng.ids[other])

        return min(eidxs, key=key)

    def take(eidx: int) -> None:
        if len(steps) >= cap:
            raise RuntimeError("two-phase run exceeded its proven step bound")
        steps.append(eng.pair_of_edge(eidx))
        rs.step(eidx)

    # Preparation: matched U-vertices climb until none of them blocks.
    while True:
        per = blocking_by_vertex()
        cand = [v for v in uidx if rs.partner[v] != NO_VERTEX and v in per]
        if not cand:
            break
        v = cand[0]
        take(best_for(v, per[v]))

    # Memory phase, one unmatched U-vertex per round.
    while True:
        per = blocking_by_vertex()
        if not per:
            break
        blocked_us = [v for v in uidx if v in per]
        if any(rs.partner[v] != NO_VERTEX for v in blocked_us):
            raise RuntimeError(
                "round invariant broken: a matched U-vertex is in a blocking pair"
            )
        active = blocked_us[0]
        w_rank_before = list(rs.uval)
        displaced: List[Tuple[int, int]] = []
        while True:
            per = blocking_by_vertex()
            if active not in per:
                break
            eidx = best_for(active, per[active])
            a, b = eng.edges[eidx]
            w = b if a == active else a
            old = rs.partner[w]
            if old != NO_VERTEX and old != active:
                displaced.append((old, w))
            take(eidx)
        for old, w in displaced:
            restore = eng.edge_index[(old, w) if old < w else (w, old)]
            if restore in rs.blocking():
                take(restore)
        for w in range(eng.n):
            if w in uidx or w_rank_before[w] == 0:
                continue
            if rs.uval[w] < w_rank_before[w]:
                raise RuntimeError(
                    "round invariant broken: a W-vertex ended a round worse off"
                )

    return ImprovementSequence(initial=initial, steps=tuple(steps), seed=None)


def _step_cap(nu: int, nw: int) -> int:
    """Proven length bound for the two-phase schedule, with no slack."""
    return nu * nw + nu * nw * (nw + nu - 1) if nu and nw else 1
