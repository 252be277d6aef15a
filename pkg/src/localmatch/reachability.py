"""Exhaustive questions about the improvement-step state graph.

Three queries share one breadth first search: can any locally stable matching
be reached from here, can this particular matching be reached, and how many
steps does the nearest stable matching take.  States are matchings, extended
by the memory slots when a recency or quality model is active; the random
model has no deterministic successor relation and is rejected.

Searches carry an explicit node budget.  Hitting the budget never turns into
a "no": the answer is reported as undetermined with `exhausted` set, and the
caller decides what to make of it.

`enumerate_lsm` lists all locally stable matchings of a game by a backtracking
assignment search with two sound prunings, so it stays usable on complete
potential-edge games far beyond naive edge-subset enumeration.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .dynamics import ImprovementSequence
from .engine import NO_EDGE, NO_VERTEX, Engine
from .model import Matching, MemoryKind, MemoryModel, NetworkGame, pair_of

DEFAULT_NODE_LIMIT = 10_000_000


class GuardExceeded(RuntimeError):
    """An exhaustive enumeration outgrew its node budget."""


@dataclass(frozen=True)
class SearchConfig:
    memory: MemoryModel = MemoryModel()
    node_limit: int = DEFAULT_NODE_LIMIT
    record_witness: bool = True


@dataclass(frozen=True, eq=False)
class ReachAnswer:
    """Outcome of a state search.

    `reachable` is True or False when the search settled the question and
    None when the node budget ran out first.  `shortest_length` is the number
    of steps of the witness, which breadth first order makes minimal.
    """

    reachable: Optional[bool]
    witness: Optional[ImprovementSequence]
    shortest_length: Optional[int]
    explored: int
    exhausted: bool


def _check_config(config: SearchConfig) -> None:
    if config.memory.kind is MemoryKind.RANDOM:
        raise ValueError(
            "random memory has no deterministic state graph; "
            "search supports none, recency and quality"
        )


def _search(
    game: NetworkGame,
    initial: Matching,
    config: SearchConfig,
    target: Optional[Matching],
) -> ReachAnswer:
    """Layered BFS from `initial`; the goal is either a specific matching or
    any stable state when `target` is None."""
    _check_config(config)
    eng = Engine(game, config.memory)
    with_mem = config.memory.kind in (MemoryKind.RECENCY, MemoryKind.QUALITY)
    start_mask = eng.mask_of(initial)
    target_mask = eng.mask_of(target) if target is not None else None
    empty_mem = (NO_VERTEX,) * eng.n

    start = (start_mask, empty_mem) if with_mem else start_mask
    visited = {start}
    parent: Dict[object, Tuple[object, int]] = {}
    frontier: List[object] = [start]
    depth = 0
    explored = 0
    exhausted = False
    goal: Optional[object] = None

    while frontier and goal is None and not exhausted:
        next_frontier: List[object] = []
        for state in frontier:
            if with_mem:
                mask, mem = state  # type: ignore[misc]
            else:
                mask, mem = state, None  # type: ignore[assignment]
            explored += 1
            partner, pedge, uval = eng.decode(mask)
            blocking = eng._blocking(mask, partner, uval, mem)
            if target_mask is None:
                if not blocking:
                    goal = state
                    break
            elif mask == target_mask:
                goal = state
                break
            for eidx in blocking:
                if with_mem:
                    succ: object = eng.apply_with_mem(mask, mem, eidx)
                else:
                    a, b = eng.edges[eidx]
                    nxt = mask
                    if pedge[a] != NO_EDGE:
                        nxt &= ~(1 << pedge[a])
                    if pedge[b] != NO_EDGE:
                        nxt &= ~(1 << pedge[b])
                    succ = nxt | (1 << eidx)
                if succ not in visited:
                    if len(visited) >= config.node_limit:
                        exhausted = True
                        break
                    visited.add(succ)
                    if config.record_witness:
                        parent[succ] = (state, eidx)
                    next_frontier.append(succ)
            if exhausted:
                break
        else:
            frontier = next_frontier
            depth += 1
            continue
        break

    if goal is not None:
        witness = None
        if config.record_witness:
            rev = []
            cur = goal
            while cur != start:
                prev, eidx = parent[cur]
                rev.append(eng.pair_of_edge(eidx))
                cur = prev
            witness = ImprovementSequence(
                initial=initial, steps=tuple(reversed(rev)), seed=None
            )
        return ReachAnswer(
            reachable=True,
            witness=witness,
            shortest_length=depth,
            explored=explored,
            exhausted=False,
        )
    if exhausted:
        return ReachAnswer(
            reachable=None,
            witness=None,
            shortest_length=None,
            explored=explored,
            exhausted=True,
        )
    return ReachAnswer(
        reachable=False,
        witness=None,
        shortest_length=None,
        explored=explored,
        exhausted=False,
    )


def decide_reach_any(
    game: NetworkGame,
    initial: Matching,
    config: SearchConfig = SearchConfig(),
) -> ReachAnswer:
    """Is any locally stable matching reachable by improvement steps?"""
    return _search(game, initial, config, target=None)


def decide_reach_target(
    game: NetworkGame,
    initial: Matching,
    target: Matching,
    config: SearchConfig = SearchConfig(),
) -> ReachAnswer:
    """Is this specific matching reachable by improvement steps?"""
    return _search(game, initial, config, target=target)


def shortest_to_stability(
    game: NetworkGame,
    initial: Matching,
    config: SearchConfig = SearchConfig(),
) -> ReachAnswer:
    """Length of a shortest improvement sequence to some stable matching.

    Identical to `decide_reach_any`; the name states the intent and the
    `shortest_length` field carries the answer.
    """
    return _search(game, initial, config, target=None)


UNDECIDED = -2
UNMATCHED = -1


def enumerate_lsm(
    game: NetworkGame, node_limit: int = 2_000_000
) -> List[Matching]:
    """All locally stable matchings, in canonical order.

    Vertices are decided one by one in id order; a decided vertex is either
    matched to a later, previously undecided vertex or finally unmatched.
    Two prunings cut the tree:

    * a pair of decided vertices that already blocks can only stay blocking,
      because both payoffs are final and accessibility only grows with the
      matching;
    * a decided vertex that would strictly improve with some undecided vertex
      it can statically reach blocks for sure once all partners that vertex
      would weakly prefer are spoken for.

    Every surviving leaf is verified from scratch before it is reported.
    Raises GuardExceeded when the search tree outgrows `node_limit` nodes.
    """
    eng = Engine(game)
    n = eng.n
    status = [UNDECIDED] * n
    uval = [0] * n
    # Partners of each vertex, best rank first, for the availability pruning.
    partners_desc: List[List[int]] = []
    for v in range(n):
        ps = [p for p in eng.rank[v]]
        ps.sort(key=lambda p: (-eng.rank[v][p], eng.ids[p]))
        partners_desc.append(ps)

    results: List[Matching] = []
    nodes = 0

    def accessible_now(a: int, b: int, eidx: int) -> bool:
        if eng.static2[eidx]:
            return True
        pb = status[b]
        if pb >= 0 and (eng.lmask[a] >> pb) & 1:
            return True
        pa = status[a]
        return pa >= 0 and bool((eng.lmask[b] >> pa) & 1)

    def blocked_already() -> bool:
        for eidx, (a, b) in enumerate(eng.edges):
            if status[a] == UNDECIDED or status[b] == UNDECIDED:
                continue
            if status[a] == b:
                continue
            if eng.ua[eidx] <= uval[a] or eng.ub[eidx] <= uval[b]:
                continue
            if accessible_now(a, b, eidx):
                return True
        return False

    def doomed() -> bool:
        """Some decided vertex is sure to block with an undecided one."""
        for eidx, (a, b) in enumerate(eng.edges):
            if not eng.static2[eidx]:
                continue
            for x, y in ((a, b), (b, a)):
                if status[x] == UNDECIDED or status[y] != UNDECIDED:
                    continue
                want = eng.rank[x][y]
                if want <= uval[x]:
                    continue
                floor = eng.rank[y][x]
                free = False
                for d in partners_desc[y]:
                    if eng.rank[y][d] < floor:
                        break
                    if status[d] == UNDECIDED and d != x:
                        free = True
                        break
                if not free:
                    return True
        return False

    def assign(v: int, p: int) -> None:
        status[v] = p
        if p >= 0:
            status[p] = v
            uval[v] = eng.rank[v][p]
            uval[p] = eng.rank[p][v]

    def unassign(v: int, p: int) -> None:
        status[v] = UNDECIDED
        if p >= 0:
            status[p] = UNDECIDED
            uval[v] = 0
            uval[p] = 0

    def walk(at: int) -> None:
        nonlocal nodes
        while at < n and status[at] != UNDECIDED:
            at += 1
        if at == n:
            mask = 0
            for v in range(n):
                p = status[v]
                if p > v:
                    mask |= 1 << eng.edge_index[(v, p)]
            if eng.is_stable(mask):
                results.append(eng.matching_of(mask))
            return
        choices = [p for p in partners_desc[at] if status[p] == UNDECIDED]
        choices.sort(key=lambda p: eng.ids[p])
        for p in choices + [UNMATCHED]:
            nodes += 1
            if nodes > node_limit:
                raise GuardExceeded(
                    f"locally stable matching enumeration passed {node_limit} nodes"
                )
            assign(at, p)
            if not blocked_already() and not doomed():
                walk(at + 1)
            unassign(at, p)

    walk(0)
    results.sort(key=lambda m: m.sorted_edges())
    return results
