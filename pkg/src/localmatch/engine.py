"""Integer-indexed fast core shared by the simulator and the state search.

The readable operations in `model` recompute neighbourhoods on every call,
which is fine for small examples and tests but far too slow for breadth first
search over millions of matchings.  This module compiles a game once into
dense arrays and bitmasks:

* vertices become indices in canonical (sorted id) order,
* potential edges become indices in canonical pair order, and a matching
  becomes an int with one bit per edge,
* utilities become small ints per vertex (dense ranks, ties share a rank),
* the static two-hop test per edge and the link neighbourhoods per vertex are
  precomputed, so the accessibility check per candidate pair is O(1).

The O(1) check leans on a structural fact: a two hop path cannot consist of
two matching edges, because the middle vertex would need two partners.  So a
pair is within two hops of L plus M exactly when it is within two hops of L
alone, or the current partner of one endpoint is a link neighbour of the
other.

Everything here mirrors the semantics of `model` exactly; the test suite
cross-checks the two implementations against each other on random states.
"""

from __future__ import annotations

import random
from typing import Dict, List, Optional, Sequence, Tuple

from .model import (
    Matching,
    MemoryKind,
    MemoryModel,
    NetworkGame,
    Pair,
    pair_of,
    utility,
)

NO_VERTEX = -1
NO_EDGE = -1


class Engine:
    def __init__(self, game: NetworkGame, memory: MemoryModel = MemoryModel()):
        self.game = game
        self.memory = memory
        self.ids: Tuple[str, ...] = tuple(sorted(v.id for v in game.vertices))
        self.index: Dict[str, int] = {v: i for i, v in enumerate(self.ids)}
        self.n = len(self.ids)

        self.edges: List[Tuple[int, int]] = []
        self.edge_pairs: List[Pair] = sorted(game.potential_edges)
        self.edge_index: Dict[Tuple[int, int], int] = {}
        for e in self.edge_pairs:
            a, b = self.index[e[0]], self.index[e[1]]
            key = (a, b) if a < b else (b, a)
            self.edge_index[key] = len(self.edges)
            self.edges.append(key)
        self.m = len(self.edges)

        self.lmask = [0] * self.n
        for a, b in game.links:
            ia, ib = self.index[a], self.index[b]
            self.lmask[ia] |= 1 << ib
            self.lmask[ib] |= 1 << ia

        # Dense per-vertex utility ranks; ties map to the same rank.
        self.rank: List[Dict[int, int]] = [dict() for _ in range(self.n)]
        for v in self.ids:
            iv = self.index[v]
            partners = sorted(game.edge_neighbors(v))
            vals = sorted(set(utility(game, v, p) for p in partners))
            level = {val: r + 1 for r, val in enumerate(vals)}
            for p in partners:
                self.rank[iv][self.index[p]] = level[utility(game, v, p)]

        self.ua = [0] * self.m
        self.ub = [0] * self.m
        self.static2 = [False] * self.m
        for i, (a, b) in enumerate(self.edges):
            self.ua[i] = self.rank[a][b]
            self.ub[i] = self.rank[b][a]
            near = bool((self.lmask[a] >> b) & 1) or bool(self.lmask[a] & self.lmask[b])
            self.static2[i] = near

        self.incident: List[List[int]] = [[] for _ in range(self.n)]
        for i, (a, b) in enumerate(self.edges):
            self.incident[a].append(i)
            self.incident[b].append(i)

        self.scope = [memory.in_scope(v) for v in self.ids]

    # -- conversions ------------------------------------------------------

    def mask_of(self, matching: Matching) -> int:
        mask = 0
        for a, b in matching.edges:
            ia, ib = self.index[a], self.index[b]
            key = (ia, ib) if ia < ib else (ib, ia)
            mask |= 1 << self.edge_index[key]
        return mask

    def matching_of(self, mask: int) -> Matching:
        pairs = []
        while mask:
            low = mask & -mask
            i = low.bit_length() - 1
            a, b = self.edges[i]
            pairs.append(pair_of(self.ids[a], self.ids[b]))
            mask ^= low
        return Matching(frozenset(pairs))

    def pair_of_edge(self, eidx: int) -> Pair:
        a, b = self.edges[eidx]
        return pair_of(self.ids[a], self.ids[b])

    def mem_of(self, memory_map) -> Tuple[int, ...]:
        mem = [NO_VERTEX] * self.n
        for k, v in memory_map.items():
            mem[self.index[k]] = self.index[v]
        return tuple(mem)

    def memory_map_of(self, mem: Sequence[int]) -> Dict[str, str]:
        return {
            self.ids[i]: self.ids[p] for i, p in enumerate(mem) if p != NO_VERTEX
        }

    def decode(self, mask: int) -> Tuple[List[int], List[int], List[int]]:
        """Partner index, matched edge index and current rank per vertex."""
        partner = [NO_VERTEX] * self.n
        pedge = [NO_EDGE] * self.n
        uval = [0] * self.n
        mm = mask
        while mm:
            low = mm & -mm
            i = low.bit_length() - 1
            a, b = self.edges[i]
            partner[a] = b
            partner[b] = a
            pedge[a] = i
            pedge[b] = i
            uval[a] = self.ua[i]
            uval[b] = self.ub[i]
            mm ^= low
        return partner, pedge, uval

    # -- blocking pairs ---------------------------------------------------

    def blocking_edges(
        self, mask: int, mem: Optional[Sequence[int]] = None
    ) -> List[int]:
        """Edge indices of all local blocking pairs, in canonical order."""
        partner, _, uval = self.decode(mask)
        return self._blocking(mask, partner, uval, mem)

    def _blocking(
        self,
        mask: int,
        partner: List[int],
        uval: List[int],
        mem: Optional[Sequence[int]],
    ) -> List[int]:
        out = []
        ua, ub, static2, lmask = self.ua, self.ub, self.static2, self.lmask
        for i, (a, b) in enumerate(self.edges):
            if (mask >> i) & 1:
                continue
            if ua[i] <= uval[a] or ub[i] <= uval[b]:
                continue
            if static2[i]:
                out.append(i)
                continue
            pb = partner[b]
            if pb != NO_VERTEX and (lmask[a] >> pb) & 1:
                out.append(i)
                continue
            pa = partner[a]
            if pa != NO_VERTEX and (lmask[b] >> pa) & 1:
                out.append(i)
                continue
            if mem is not None and (mem[a] == b or mem[b] == a):
                out.append(i)
        return out

    def is_stable(self, mask: int, mem: Optional[Sequence[int]] = None) -> bool:
        return not self.blocking_edges(mask, mem)

    # -- steps ------------------------------------------------------------

    def apply(self, mask: int, eidx: int) -> int:
        """Structural part of a step: add the edge, drop conflicting edges."""
        a, b = self.edges[eidx]
        partner, pedge, _ = self.decode(mask)
        if pedge[a] != NO_EDGE:
            mask &= ~(1 << pedge[a])
        if pedge[b] != NO_EDGE:
            mask &= ~(1 << pedge[b])
        return mask | (1 << eidx)

    def apply_with_mem(
        self, mask: int, mem: Tuple[int, ...], eidx: int
    ) -> Tuple[int, Tuple[int, ...]]:
        """Step including the recency or quality memory update.

        The random variant is deliberately unsupported here: its successor
        depends on a seed, so it has no place in an exhaustive search.
        """
        kind = self.memory.kind
        a, b = self.edges[eidx]
        partner, pedge, _ = self.decode(mask)
        new_mem = list(mem)
        for x, y in ((a, partner[a]), (b, partner[b])):
            if y == NO_VERTEX:
                continue
            mask &= ~(1 << pedge[x])
            for stayer, leaver in ((x, y), (y, x)):
                if not self.scope[stayer]:
                    continue
                if kind is MemoryKind.RECENCY:
                    new_mem[stayer] = leaver
                elif kind is MemoryKind.QUALITY:
                    held = new_mem[stayer]
                    if held == NO_VERTEX or (
                        self.rank[stayer][leaver] > self.rank[stayer][held]
                    ):
                        new_mem[stayer] = leaver
        if kind is MemoryKind.RECENCY:
            if new_mem[a] == b:
                new_mem[a] = NO_VERTEX
            if new_mem[b] == a:
                new_mem[b] = NO_VERTEX
        return mask | (1 << eidx), tuple(new_mem)


class RunState:
    """Mutable simulation state for long runs; one instance per run.

    Keeps the same data as `model.DynamicsState` but in index arrays, updated
    in place.  The random memory variant needs the per-vertex history sets and
    the seed chain, which live here as well.
    """

    def __init__(self, eng: Engine, mask: int, seed: int = 0):
        self.eng = eng
        self.mask = mask
        self.partner, self.pedge, self.uval = eng.decode(mask)
        self.mem = [NO_VERTEX] * eng.n
        self.history: List[set] = [set() for _ in range(eng.n)]
        self.rng_seed = seed

    def blocking(self) -> List[int]:
        mem = self.mem if self.eng.memory.kind is not MemoryKind.NONE else None
        return self.eng._blocking(self.mask, self.partner, self.uval, mem)

    def step(self, eidx: int) -> None:
        eng = self.eng
        kind = eng.memory.kind
        a, b = eng.edges[eidx]
        for x, y in ((a, self.partner[a]), (b, self.partner[b])):
            if y == NO_VERTEX:
                continue
            old_edge = self.pedge[x]
            self.mask &= ~(1 << old_edge)
            self.partner[y] = NO_VERTEX
            self.pedge[y] = NO_EDGE
            self.uval[y] = 0
            for stayer, leaver in ((x, y), (y, x)):
                self.history[stayer].add(leaver)
                if not eng.scope[stayer]:
                    continue
                if kind is MemoryKind.RECENCY:
                    self.mem[stayer] = leaver
                elif kind is MemoryKind.QUALITY:
                    held = self.mem[stayer]
                    if held == NO_VERTEX or (
                        eng.rank[stayer][leaver] > eng.rank[stayer][held]
                    ):
                        self.mem[stayer] = leaver
        self.mask |= 1 << eidx
        self.partner[a] = b
        self.partner[b] = a
        self.pedge[a] = eidx
        self.pedge[b] = eidx
        self.uval[a] = eng.ua[eidx]
        self.uval[b] = eng.ub[eidx]
        if kind is MemoryKind.RECENCY:
            if self.mem[a] == b:
                self.mem[a] = NO_VERTEX
            if self.mem[b] == a:
                self.mem[b] = NO_VERTEX
        elif kind is MemoryKind.RANDOM:
            rng = random.Random(self.rng_seed)
            for x in range(eng.n):
                if not eng.scope[x]:
                    continue
                past = sorted(self.history[x])
                if past:
                    self.mem[x] = past[rng.randrange(len(past))]
                else:
                    self.mem[x] = NO_VERTEX
            self.rng_seed = rng.getrandbits(64)

    def memory_map(self) -> Dict[str, str]:
        return self.eng.memory_map_of(self.mem)

    def history_map(self) -> Dict[str, frozenset]:
        return {
            self.eng.ids[i]: frozenset(self.eng.ids[p] for p in s)
            for i, s in enumerate(self.history)
            if s
        }
