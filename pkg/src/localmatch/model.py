"""Core types for network matching games with locality.

A game consists of a vertex set, an undirected social link graph L, a set of
potential matching edges E, and preferences of each vertex over its potential
partners.  Preferences come in exactly one of two flavours:

* ranked mode: every vertex carries a strict total order over its E-neighbours,
* weighted mode: every potential edge carries a positive rational benefit that
  both endpoints receive; distinct edges may share a benefit, so a vertex may
  be indifferent between two partners.

Being unmatched is always strictly worse than being matched to any listed
partner.  A pair can only deviate together when the two vertices can find each
other: they must be at hop distance at most two in the graph formed by L plus
the current matching, or one of them must remember the other from an earlier
match.  Matchings without any such reachable strictly improving pair are the
locally stable matchings this package is about.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, Mapping, Optional, Sequence, Tuple, Union

Pair = Tuple[str, str]

CHANNEL_LINK = "link-path"
CHANNEL_MATCHING = "matching-path"
CHANNEL_MEMORY = "memory"


class ImprovementStepError(ValueError):
    """A recorded step was not a local blocking pair when it was applied."""


def pair_of(a: str, b: str) -> Pair:
    """Normalise an unordered vertex pair to (smaller id, larger id)."""
    if a == b:
        raise ValueError(f"self-pair {a!r}")
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True)
class Vertex:
    """A named player; `side` is 'U' or 'W' when the game is partition-tagged."""

    id: str
    side: Optional[str] = None


@dataclass(frozen=True, eq=False)
class NetworkGame:
    """Immutable description of one game instance.

    Exactly one of `rankings` and `weights` is set.  `rankings` maps a vertex
    id to its partners ordered most preferred first.  `weights` maps a
    potential edge to its shared positive benefit.
    """

    name: str
    vertices: Tuple[Vertex, ...]
    links: FrozenSet[Pair]
    potential_edges: FrozenSet[Pair]
    rankings: Optional[Mapping[str, Tuple[str, ...]]] = None
    weights: Optional[Mapping[Pair, Fraction]] = None

    def vertex_ids(self) -> Tuple[str, ...]:
        return tuple(sorted(v.id for v in self.vertices))

    def side_of(self) -> Optional[Dict[str, str]]:
        """Partition tag map, or None unless every vertex is tagged."""
        tags = {v.id: v.side for v in self.vertices}
        if any(side is None for side in tags.values()):
            return None
        return tags  # type: ignore[return-value]

    def is_bipartite(self) -> bool:
        """True when tags are complete and every potential edge crosses them."""
        sides = self.side_of()
        if sides is None:
            return False
        return all(sides[a] != sides[b] for a, b in self.potential_edges)

    def link_neighbors(self, v: str) -> FrozenSet[str]:
        return frozenset(b if a == v else a for a, b in self.links if v in (a, b))

    def edge_neighbors(self, v: str) -> FrozenSet[str]:
        return frozenset(
            b if a == v else a for a, b in self.potential_edges if v in (a, b)
        )


@dataclass(frozen=True)
class Matching:
    """A set of potential edges with no shared endpoints."""

    edges: FrozenSet[Pair]

    @classmethod
    def of(cls, pairs: Iterable[Sequence[str]]) -> "Matching":
        return cls(frozenset(pair_of(a, b) for a, b in pairs))

    @classmethod
    def empty(cls) -> "Matching":
        return cls(frozenset())

    def partner_map(self) -> Dict[str, str]:
        out: Dict[str, str] = {}
        for a, b in self.edges:
            out[a] = b
            out[b] = a
        return out

    def partner(self, v: str) -> Optional[str]:
        for a, b in self.edges:
            if a == v:
                return b
            if b == v:
                return a
        return None

    def sorted_edges(self) -> Tuple[Pair, ...]:
        return tuple(sorted(self.edges))

    def __len__(self) -> int:
        return len(self.edges)

    def __contains__(self, e: Pair) -> bool:
        return e in self.edges

    def __iter__(self):
        return iter(sorted(self.edges))


class MemoryKind(str, Enum):
    NONE = "none"
    RANDOM = "random"
    RECENCY = "recency"
    QUALITY = "quality"


@dataclass(frozen=True)
class MemoryModel:
    """Which single past partner, if any, each vertex keeps in mind.

    `scope` restricts memory to a subset of vertices; None means everyone.
    Capacity is one remembered partner per vertex in every variant.
    """

    kind: MemoryKind = MemoryKind.NONE
    scope: Optional[FrozenSet[str]] = None

    def in_scope(self, v: str) -> bool:
        if self.kind is MemoryKind.NONE:
            return False
        return self.scope is None or v in self.scope


MEMORYLESS = MemoryModel(MemoryKind.NONE)


@dataclass(frozen=True, eq=False)
class DynamicsState:
    """A matching plus everything the memory dynamics needs to continue.

    `memory` holds only vertices that currently remember someone.  `history`
    maps a vertex to every partner that has left it so far; the random variant
    samples from it.  `rng_seed` drives that sampling and is re-derived after
    each step so states are self-contained.
    """

    matching: Matching
    memory: Mapping[str, str] = field(default_factory=dict)
    history: Mapping[str, FrozenSet[str]] = field(default_factory=dict)
    rng_seed: int = 0

    def memory_key(self) -> Tuple[Tuple[str, str], ...]:
        return tuple(sorted(self.memory.items()))


@dataclass(frozen=True)
class BlockingPair:
    """A strictly improving pair together with how the two vertices met."""

    pair: Pair
    channel: str


def initial_state(
    game: NetworkGame,
    matching: Optional[Matching] = None,
    seed: int = 0,
) -> DynamicsState:
    if matching is None:
        matching = Matching.empty()
    return DynamicsState(matching=matching, memory={}, history={}, rng_seed=seed)


def validate_game(game: NetworkGame) -> list[str]:
    """Collect structural problems; an empty list means the game is sound."""
    errors: list[str] = []
    ids = [v.id for v in game.vertices]
    known = set(ids)
    if len(known) != len(ids):
        dupes = sorted({i for i in ids if ids.count(i) > 1})
        errors.append(f"duplicate vertex ids: {', '.join(dupes)}")

    tagged = [v for v in game.vertices if v.side is not None]
    if tagged and len(tagged) != len(game.vertices):
        errors.append("partition tags must cover all vertices or none")
    for v in tagged:
        if v.side not in ("U", "W"):
            errors.append(f"bad partition tag {v.side!r} on vertex {v.id}")

    for name, pairs in (("link", game.links), ("edge", game.potential_edges)):
        for a, b in sorted(pairs):
            if a == b:
                errors.append(f"self-loop {name} at {a}")
                continue
            for x in (a, b):
                if x not in known:
                    errors.append(f"{name} endpoint {x} is not a vertex")
            if a > b:
                errors.append(f"{name} ({a}, {b}) is not in canonical order")

    if (game.rankings is None) == (game.weights is None):
        errors.append("exactly one of rankings and weights must be provided")
        return errors

    enbrs = {v: set() for v in known}
    for a, b in game.potential_edges:
        if a in enbrs and b in enbrs and a != b:
            enbrs[a].add(b)
            enbrs[b].add(a)

    if game.rankings is not None:
        for v in sorted(known):
            row = game.rankings.get(v)
            if row is None:
                if enbrs[v]:
                    errors.append(f"vertex {v} has potential partners but no ranking")
                continue
            seen = set(row)
            if len(seen) != len(row):
                errors.append(f"ranking of {v} repeats a partner")
            extra = seen - enbrs[v]
            if extra:
                errors.append(
                    f"ranking of {v} covers non-neighbor {', '.join(sorted(extra))}"
                )
            missing = enbrs[v] - seen
            if missing:
                errors.append(
                    f"ranking of {v} misses partner {', '.join(sorted(missing))}"
                )
        for v in sorted(set(game.rankings) - known):
            errors.append(f"ranking given for unknown vertex {v}")
    else:
        assert game.weights is not None
        for e in sorted(game.weights):
            if e not in game.potential_edges:
                errors.append(f"weight given for non-edge ({e[0]}, {e[1]})")
            elif game.weights[e] <= 0:
                errors.append(f"non-positive weight on edge ({e[0]}, {e[1]})")
        for e in sorted(game.potential_edges - set(game.weights)):
            errors.append(f"edge ({e[0]}, {e[1]}) has no weight")

    return errors


Utility = Union[int, Fraction]


def utility(game: NetworkGame, v: str, partner: str) -> Utility:
    """Payoff of `v` when matched with `partner`.

    Ranked mode returns the position counted from the bottom of v's list, so
    larger is better and every value is at least 1.  Weighted mode returns the
    edge benefit.  Values are only comparable across partners of the same
    vertex; being unmatched is below every value returned here.
    """
    if game.rankings is not None:
        row = game.rankings.get(v, ())
        try:
            idx = row.index(partner)
        except ValueError:
            raise ValueError(f"{partner} is not a potential partner of {v}") from None
        return len(row) - idx
    assert game.weights is not None
    e = pair_of(v, partner)
    if e not in game.weights:
        raise ValueError(f"{partner} is not a potential partner of {v}")
    return game.weights[e]


def prefers(game: NetworkGame, v: str, a: str, b: Optional[str]) -> bool:
    """Does `v` strictly prefer partner `a` over `b` (None meaning unmatched)?"""
    if b is None:
        return True
    return utility(game, v, a) > utility(game, v, b)


def _within_two_hops(game: NetworkGame, matching: Matching, u: str, v: str) -> Optional[str]:
    """Channel name if u can reach v in at most two hops of L plus M, else None.

    A middle vertex on a two hop path has at most one matching edge, so any
    path of length two uses at least one social link.  That reduces the check
    to three cases: a pure link path, or the partner of one endpoint being a
    link neighbour of the other.
    """
    ln_u = game.link_neighbors(u)
    if v in ln_u:
        return CHANNEL_LINK
    ln_v = game.link_neighbors(v)
    if ln_u & ln_v:
        return CHANNEL_LINK
    pv = matching.partner(v)
    if pv is not None and pv in ln_u:
        return CHANNEL_MATCHING
    pu = matching.partner(u)
    if pu is not None and pu in ln_v:
        return CHANNEL_MATCHING
    if pu is not None and pu == v:
        return CHANNEL_MATCHING
    return None


def accessible(game: NetworkGame, matching: Matching, u: str, v: str) -> bool:
    """Hop distance of u and v in L plus the matching is at most two."""
    if u == v:
        raise ValueError("accessibility of a vertex to itself is not defined")
    return _within_two_hops(game, matching, u, v) is not None


def accessible_with_memory(
    game: NetworkGame, state: DynamicsState, u: str, v: str
) -> bool:
    """Like `accessible`, but a remembered partner also counts.

    Remembering is one-sided in storage yet enough in either direction: if u
    remembers v or v remembers u, the two can find each other.
    """
    if accessible(game, state.matching, u, v):
        return True
    return state.memory.get(u) == v or state.memory.get(v) == u


def _blocking_channel(
    game: NetworkGame,
    state: DynamicsState,
    a: str,
    b: str,
    partners: Mapping[str, str],
) -> Optional[str]:
    e = pair_of(a, b)
    if e in state.matching.edges:
        return None
    if not prefers(game, a, b, partners.get(a)):
        return None
    if not prefers(game, b, a, partners.get(b)):
        return None
    channel = _within_two_hops(game, state.matching, a, b)
    if channel is not None:
        return channel
    if state.memory.get(a) == b or state.memory.get(b) == a:
        return CHANNEL_MEMORY
    return None


def local_blocking_pairs(game: NetworkGame, state: DynamicsState) -> list[BlockingPair]:
    """All reachable strictly improving pairs, sorted by vertex ids.

    The channel records the cheapest way the pair can meet, preferring a pure
    link path over a path through a matching edge over memory.
    """
    partners = state.matching.partner_map()
    out = []
    for a, b in sorted(game.potential_edges):
        channel = _blocking_channel(game, state, a, b, partners)
        if channel is not None:
            out.append(BlockingPair(pair=(a, b), channel=channel))
    return out


def is_locally_stable(game: NetworkGame, state: DynamicsState) -> bool:
    return not local_blocking_pairs(game, state)


def _rank_better(game: NetworkGame, v: str, candidate: str, stored: Optional[str]) -> bool:
    if stored is None:
        return True
    return utility(game, v, candidate) > utility(game, v, stored)


def apply_step(
    game: NetworkGame,
    state: DynamicsState,
    pair: Pair,
    memory: MemoryModel = MEMORYLESS,
) -> DynamicsState:
    """Resolve one blocking pair and return the successor state.

    The pair's edge is added; the at most two edges it conflicts with are
    dropped.  Every vertex that loses a partner has that partner appended to
    its history, and its memory slot is refreshed according to the model:
    recency overwrites with the leaver, quality only keeps the best leaver so
    far, and the random variant resamples all in-scope slots afterwards from
    their histories, in canonical vertex order, advancing the seed chain.
    """
    e = pair_of(*pair)
    blocking = {bp.pair for bp in local_blocking_pairs(game, state)}
    if e not in blocking:
        raise ValueError(f"pair ({e[0]}, {e[1]}) is not a local blocking pair")

    u, v = e
    partners = state.matching.partner_map()
    removed = []
    for x in (u, v):
        p = partners.get(x)
        if p is not None:
            removed.append((x, p))
    new_edges = set(state.matching.edges)
    for x, p in removed:
        new_edges.discard(pair_of(x, p))
    new_edges.add(e)

    new_memory = dict(state.memory)
    new_history = {k: set(s) for k, s in state.history.items()}

    def separate(stayer: str, leaver: str) -> None:
        new_history.setdefault(stayer, set()).add(leaver)
        if not memory.in_scope(stayer):
            return
        if memory.kind is MemoryKind.RECENCY:
            new_memory[stayer] = leaver
        elif memory.kind is MemoryKind.QUALITY:
            if _rank_better(game, stayer, leaver, new_memory.get(stayer)):
                new_memory[stayer] = leaver

    for x, p in removed:
        separate(x, p)
        separate(p, x)

    if memory.kind is MemoryKind.RECENCY:
        # A slot may never point at the current partner.
        for a, b in ((u, v), (v, u)):
            if new_memory.get(a) == b:
                del new_memory[a]

    new_seed = state.rng_seed
    if memory.kind is MemoryKind.RANDOM:
        rng = random.Random(state.rng_seed)
        for x in sorted(vid.id for vid in game.vertices):
            if not memory.in_scope(x):
                continue
            past = sorted(new_history.get(x, ()))
            if past:
                new_memory[x] = past[rng.randrange(len(past))]
            else:
                new_memory.pop(x, None)
        new_seed = rng.getrandbits(64)

    return DynamicsState(
        matching=Matching(frozenset(new_edges)),
        memory=new_memory,
        history={k: frozenset(s) for k, s in new_history.items() if s},
        rng_seed=new_seed,
    )
