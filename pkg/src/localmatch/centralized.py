"""Centralised views: optima, classical matching, reductions to and from
weighted independent set, and the stability polytope.

Local stability survives two changes of perspective.  An unweighted graph
turns into a job-market game whose largest locally stable matching counts its
largest independent set; conversely any game turns into a vertex-weighted
conflict graph whose maximum weight independent sets are exactly the locally
stable matchings, padded by the unmatched players.  The linear system emitted
here describes matchings by 0/1 incidence vectors; its integral solutions are
exactly the locally stable matchings, while fractional solutions may exist as
well.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

from .io import STAMP
from .model import (
    Matching,
    NetworkGame,
    Pair,
    Vertex,
    pair_of,
    utility,
)
from .reachability import GuardExceeded, enumerate_lsm


@dataclass(frozen=True, eq=False)
class WeightedGraph:
    """Vertex-weighted undirected graph; weights are positive ints."""

    vertices: Mapping[str, int]
    edges: FrozenSet[Pair]

    def validate(self) -> List[str]:
        errors = []
        for v, w in sorted(self.vertices.items()):
            if w <= 0:
                errors.append(f"non-positive weight on vertex {v}")
        for a, b in sorted(self.edges):
            if a == b:
                errors.append(f"self-loop at {a}")
            for x in (a, b):
                if x not in self.vertices:
                    errors.append(f"edge endpoint {x} is not a vertex")
        return errors


def max_lsm_bruteforce(game: NetworkGame, node_limit: int = 2_000_000) -> Matching:
    """A maximum-cardinality locally stable matching, by full enumeration.

    Ties go to the canonically smallest edge set.  Raises ValueError when the
    game has no locally stable matching at all, and GuardExceeded when the
    enumeration is too large to finish.
    """
    cands = enumerate_lsm(game, node_limit=node_limit)
    if not cands:
        raise ValueError("game has no locally stable matching")
    return min(cands, key=lambda m: (-len(m), m.sorted_edges()))


def stable_matching_bipartite(game: NetworkGame) -> Matching:
    """Deferred acceptance on the potential edges, ignoring the link graph.

    U-vertices propose in canonical order.  In weighted games a holder is only
    displaced by a strictly better proposer, ties favouring the incumbent, so
    the result has no strictly improving pair in the classical sense.
    """
    tags = game.side_of()
    if tags is None or not game.is_bipartite():
        raise ValueError("deferred acceptance needs a partition-tagged bipartite game")
    us = sorted(v for v, s in tags.items() if s == "U")

    prefs: Dict[str, List[str]] = {}
    for u in us:
        row = sorted(
            game.edge_neighbors(u),
            key=lambda w: (-utility(game, u, w), w),
        )
        prefs[u] = row
    next_idx = {u: 0 for u in us}
    holder: Dict[str, str] = {}
    matched_u: Dict[str, str] = {}
    free = [u for u in us if prefs[u]]
    while free:
        u = free.pop(0)
        if next_idx[u] >= len(prefs[u]):
            continue
        w = prefs[u][next_idx[u]]
        next_idx[u] += 1
        cur = holder.get(w)
        if cur is None:
            holder[w] = u
            matched_u[u] = w
        elif utility(game, w, u) > utility(game, w, cur):
            holder[w] = u
            matched_u[u] = w
            del matched_u[cur]
            free.insert(0, cur)
            free.sort()
        else:
            free.insert(0, u)
            free.sort()
        free = [x for x in free if next_idx[x] < len(prefs[x])]
    return Matching.of(matched_u.items())


def is_to_jobmarket(
    vertices: Sequence[str], edges: Iterable[Pair], name: str = "is-game"
) -> NetworkGame:
    """Encode an unweighted graph as a job-market game.

    Each graph vertex becomes two isolated proposers and two linked targets;
    the size of a maximum locally stable matching of the game exceeds a
    maximum independent set of the graph by exactly the number of vertices.
    """
    vs = sorted(vertices)
    known = set(vs)
    nbrs: Dict[str, List[str]] = {v: [] for v in vs}
    for a, b in edges:
        if a not in known or b not in known:
            raise ValueError(f"edge endpoint {a if a not in known else b} unknown")
        nbrs[a].append(b)
        nbrs[b].append(a)
    for v in vs:
        nbrs[v] = sorted(set(nbrs[v]))

    verts: List[Vertex] = []
    links = set()
    pot = set()
    rankings: Dict[str, Tuple[str, ...]] = {}
    for v in vs:
        verts += [Vertex(f"u1:{v}", "U"), Vertex(f"u2:{v}", "U")]
        verts += [Vertex(f"w1:{v}", "W"), Vertex(f"w2:{v}", "W")]
    for v in vs:
        for o in nbrs[v]:
            links.add(pair_of(f"w1:{v}", f"w2:{o}"))
            links.add(pair_of(f"w2:{v}", f"w2:{o}"))
        pot.add(pair_of(f"u1:{v}", f"w1:{v}"))
        pot.add(pair_of(f"u1:{v}", f"w2:{v}"))
        for o in nbrs[v]:
            pot.add(pair_of(f"u1:{v}", f"w2:{o}"))
        pot.add(pair_of(f"u2:{v}", f"w2:{v}"))
        rankings[f"u1:{v}"] = tuple(
            [f"w2:{v}"] + [f"w2:{o}" for o in nbrs[v]] + [f"w1:{v}"]
        )
        rankings[f"w2:{v}"] = tuple(
            [f"u1:{v}"] + [f"u1:{o}" for o in nbrs[v]] + [f"u2:{v}"]
        )
        rankings[f"w1:{v}"] = (f"u1:{v}",)
        rankings[f"u2:{v}"] = (f"w2:{v}",)

    return NetworkGame(
        name=name,
        vertices=tuple(verts),
        links=frozenset(links),
        potential_edges=frozenset(pot),
        rankings=rankings,
    )


def _dist2_link(game: NetworkGame, u: str, v: str) -> bool:
    ln_u = game.link_neighbors(u)
    if v in ln_u:
        return True
    return bool(ln_u & game.link_neighbors(v))


def _dist2_with_edge(game: NetworkGame, u: str, v: str, w: str) -> bool:
    """Two-hop test for (u, w) in the link graph plus the single edge {u, v}."""
    if _dist2_link(game, u, w):
        return True
    return w == v or v in game.link_neighbors(w)


def game_to_weighted_is(game: NetworkGame) -> WeightedGraph:
    """Conflict graph whose maximum weight independent sets are the locally
    stable matchings.

    Players weigh n-1 and potential edges 2n-1, so a matched pair always
    beats two unmatched players; a full consistent configuration has weight
    n(n-1) plus the matching size, and conflicts rule out exactly the
    configurations with a local blocking pair.
    """
    n = len(game.vertices)
    ids = sorted(v.id for v in game.vertices)
    vertices: Dict[str, int] = {}
    for v in ids:
        vertices[f"p:{v}"] = n - 1
    edge_list = sorted(game.potential_edges)
    for a, b in edge_list:
        vertices[f"e:{a}:{b}"] = 2 * n - 1

    def evar(e: Pair) -> str:
        return f"e:{e[0]}:{e[1]}"

    conflicts = set()
    incident: Dict[str, List[Pair]] = {v: [] for v in ids}
    for e in edge_list:
        for x in e:
            incident[x].append(e)
    for v in ids:
        inc = incident[v]
        for i, e in enumerate(inc):
            conflicts.add(pair_of(f"p:{v}", evar(e)))
            for e2 in inc[i + 1 :]:
                conflicts.add(pair_of(evar(e), evar(e2)))

    def worse_edges_at(w: str, than: str) -> List[Pair]:
        out = []
        for e2 in incident[w]:
            other = e2[0] if e2[1] == w else e2[1]
            if other == than:
                continue
            if utility(game, w, than) > utility(game, w, other):
                out.append(e2)
        return out

    for e in edge_list:
        for v, w in (e, (e[1], e[0])):
            for e2 in incident[v]:
                wp = e2[0] if e2[1] == v else e2[1]
                if wp == w:
                    continue
                if utility(game, v, wp) <= utility(game, v, w):
                    continue
                if not _dist2_with_edge(game, v, w, wp):
                    continue
                # v matched to w would walk to wp: wp may not be unmatched
                # or matched to anyone it likes less than v.
                conflicts.add(pair_of(evar(e), f"p:{wp}"))
                for e3 in worse_edges_at(wp, v):
                    if e3 != e:
                        conflicts.add(pair_of(evar(e), evar(e3)))

    for v in ids:
        for e2 in incident[v]:
            wp = e2[0] if e2[1] == v else e2[1]
            if not _dist2_link(game, v, wp):
                continue
            # v unmatched always wants wp: same exclusions as above.
            conflicts.add(pair_of(f"p:{v}", f"p:{wp}"))
            for e3 in worse_edges_at(wp, v):
                conflicts.add(pair_of(f"p:{v}", evar(e3)))

    return WeightedGraph(vertices=vertices, edges=frozenset(conflicts))


def max_weighted_is_bruteforce(
    graph: WeightedGraph, node_limit: int = 5_000_000
) -> FrozenSet[str]:
    """Exact maximum weight independent set by branch and bound.

    Deterministic: among equal-weight optima the canonically smallest vertex
    set wins.  Raises GuardExceeded past `node_limit` search nodes.
    """
    problems = graph.validate()
    if problems:
        raise ValueError("invalid graph: " + "; ".join(problems))
    ids = sorted(graph.vertices)
    index = {v: i for i, v in enumerate(ids)}
    nv = len(ids)
    adj = [0] * nv
    for a, b in graph.edges:
        ia, ib = index[a], index[b]
        adj[ia] |= 1 << ib
        adj[ib] |= 1 << ia
    weight = [graph.vertices[v] for v in ids]

    best_w = -1
    best_set: Tuple[str, ...] = ()
    nodes = 0

    def suffix_weight(allowed: int) -> int:
        total = 0
        while allowed:
            low = allowed & -allowed
            total += weight[low.bit_length() - 1]
            allowed ^= low
        return total

    def walk(allowed: int, cur_w: int, chosen: List[str]) -> None:
        nonlocal best_w, best_set, nodes
        nodes += 1
        if nodes > node_limit:
            raise GuardExceeded(
                f"independent set search passed {node_limit} nodes"
            )
        if not allowed:
            cand = tuple(sorted(chosen))
            if cur_w > best_w or (cur_w == best_w and cand < best_set):
                best_w, best_set = cur_w, cand
            return
        if cur_w + suffix_weight(allowed) < best_w:
            return
        low = allowed & -allowed
        i = low.bit_length() - 1
        chosen.append(ids[i])
        walk(allowed & ~adj[i] & ~low, cur_w + weight[i], chosen)
        chosen.pop()
        walk(allowed & ~low, cur_w, chosen)

    walk((1 << nv) - 1, 0, [])
    return frozenset(best_set)


# -- the stability polytope -------------------------------------------------


@dataclass(frozen=True)
class Constraint:
    label: str
    coeffs: Tuple[Tuple[str, Fraction], ...]
    relation: str  # "=" or "<="
    rhs: Fraction


@dataclass(frozen=True, eq=False)
class LinearSystem:
    """Named variables, equality and inequality rows; all variables are
    implicitly nonnegative."""

    variables: Tuple[str, ...]
    constraints: Tuple[Constraint, ...]


def edge_var(e: Pair) -> str:
    return f"x_e:{e[0]}:{e[1]}"


def vertex_var(v: str) -> str:
    return f"x_v:{v}"


def emit_lp(game: NetworkGame) -> LinearSystem:
    """Linear description whose 0/1 solutions are the locally stable
    matchings' incidence vectors.

    One equality per vertex says it is matched once or unmatched.  For every
    way a vertex could reach a strictly better partner, either through its
    own matching edge or while unmatched through the link graph alone, an
    inequality insists that better partner is taken by someone it weakly
    prefers.
    """
    ids = sorted(v.id for v in game.vertices)
    edge_list = sorted(game.potential_edges)
    variables = [edge_var(e) for e in edge_list] + [vertex_var(v) for v in ids]
    incident: Dict[str, List[Pair]] = {v: [] for v in ids}
    for e in edge_list:
        for x in e:
            incident[x].append(e)

    constraints: List[Constraint] = []
    one = Fraction(1)
    for v in ids:
        coeffs = [(edge_var(e), one) for e in incident[v]]
        coeffs.append((vertex_var(v), one))
        constraints.append(
            Constraint(
                label=f"deg:{v}",
                coeffs=tuple(sorted(coeffs)),
                relation="=",
                rhs=one,
            )
        )

    def holders_below(wp: str, v: str) -> List[Pair]:
        out = []
        for e2 in incident[wp]:
            other = e2[0] if e2[1] == wp else e2[1]
            if other != v and utility(game, wp, v) > utility(game, wp, other):
                out.append(e2)
        return out

    for e in edge_list:
        for v, w in (e, (e[1], e[0])):
            for e2 in incident[v]:
                wp = e2[0] if e2[1] == v else e2[1]
                if wp == w or utility(game, v, wp) <= utility(game, v, w):
                    continue
                if not _dist2_with_edge(game, v, w, wp):
                    continue
                coeffs = {edge_var(e): one, vertex_var(wp): one}
                for e3 in holders_below(wp, v):
                    coeffs[edge_var(e3)] = one
                constraints.append(
                    Constraint(
                        label=f"move:{v}:{w}:{wp}",
                        coeffs=tuple(sorted(coeffs.items())),
                        relation="<=",
                        rhs=one,
                    )
                )

    for v in ids:
        for e2 in incident[v]:
            wp = e2[0] if e2[1] == v else e2[1]
            if not _dist2_link(game, v, wp):
                continue
            coeffs = {vertex_var(v): one, vertex_var(wp): one}
            for e3 in holders_below(wp, v):
                coeffs[edge_var(e3)] = one
            constraints.append(
                Constraint(
                    label=f"idle:{v}:{wp}",
                    coeffs=tuple(sorted(coeffs.items())),
                    relation="<=",
                    rhs=one,
                )
            )

    return LinearSystem(variables=tuple(variables), constraints=tuple(constraints))


def incidence_vector(game: NetworkGame, matching: Matching) -> Dict[str, Fraction]:
    point: Dict[str, Fraction] = {}
    matched = set()
    for e in sorted(game.potential_edges):
        inside = e in matching.edges
        point[edge_var(e)] = Fraction(1 if inside else 0)
        if inside:
            matched.update(e)
    for v in sorted(x.id for x in game.vertices):
        point[vertex_var(v)] = Fraction(0 if v in matched else 1)
    return point


def check_feasible(
    system: LinearSystem,
    point: Mapping[str, Fraction],
    tol: Fraction = Fraction(0),
) -> bool:
    """Exact feasibility of a rational point; unnamed variables default to 0.

    Raises ValueError on assignments to variables the system does not have.
    """
    known = set(system.variables)
    for var in point:
        if var not in known:
            raise ValueError(f"assignment for unknown variable {var}")

    def val(var: str) -> Fraction:
        return Fraction(point.get(var, 0))

    for var in system.variables:
        if val(var) < -tol:
            return False
    for c in system.constraints:
        lhs = sum((coeff * val(var) for var, coeff in c.coeffs), Fraction(0))
        if c.relation == "=":
            if abs(lhs - c.rhs) > tol:
                return False
        elif lhs > c.rhs + tol:
            return False
    return True


def _all_matchings(game: NetworkGame, node_limit: int) -> List[Matching]:
    edge_list = sorted(game.potential_edges)
    out: List[Matching] = []
    used: set = set()
    chosen: List[Pair] = []
    nodes = 0

    def walk(i: int) -> None:
        nonlocal nodes
        nodes += 1
        if nodes > node_limit:
            raise GuardExceeded(f"matching enumeration passed {node_limit} nodes")
        if i == len(edge_list):
            out.append(Matching(frozenset(chosen)))
            return
        e = edge_list[i]
        if not (e[0] in used or e[1] in used):
            used.update(e)
            chosen.append(e)
            walk(i + 1)
            chosen.pop()
            used.difference_update(e)
        walk(i + 1)

    walk(0)
    return out


def verify_lp_correspondence(game: NetworkGame, node_limit: int = 2_000_000) -> bool:
    """Do the 0/1 solutions of the emitted system match the locally stable
    matchings exactly, in both directions?"""
    system = emit_lp(game)
    stable = set(enumerate_lsm(game, node_limit=node_limit))
    for m in _all_matchings(game, node_limit):
        point = incidence_vector(game, m)
        if check_feasible(system, point) != (m in stable):
            return False
    return True


def render_lp(system: LinearSystem) -> str:
    """Solver-style text: objective line, one named constraint per line.

    Variable and label names are sanitised for the lp file dialect; the
    original names appear in a comment map when sanitisation changed any.
    """

    def clean(name: str) -> str:
        out = []
        for ch in name:
            out.append(ch if ch.isalnum() or ch == "_" else "_")
        cleaned = "".join(out)
        if cleaned and cleaned[0].isdigit():
            cleaned = "n" + cleaned
        return cleaned

    mapping: Dict[str, str] = {}
    for var in system.variables:
        c = clean(var)
        if c in mapping and mapping[c] != var:
            raise ValueError(f"variable names {mapping[c]} and {var} collide as {c}")
        mapping[c] = var

    lines = [f"/* {STAMP.lstrip('# ')} */", "min: 0;"]
    seen_labels: Dict[str, int] = {}
    for c in system.constraints:
        label = clean(c.label)
        n = seen_labels.get(label, 0)
        seen_labels[label] = n + 1
        if n:
            label = f"{label}_{n}"
        terms = " + ".join(
            (f"{coeff} {clean(var)}" if coeff != 1 else clean(var))
            for var, coeff in c.coeffs
        )
        rel = "=" if c.relation == "=" else "<="
        lines.append(f"{label}: {terms} {rel} {c.rhs};")
    changed = sorted(
        (c, orig) for c, orig in mapping.items() if c != orig
    )
    if changed:
        lines.append("")
        for c, orig in changed:
            lines.append(f"/* {c} = {orig} */")
    return "\n".join(lines) + "\n"
