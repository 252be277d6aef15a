"""Hand-built game families and formula-to-game reductions.

The circling gadget is a twelve-vertex game whose two locally stable
matchings cannot be reached from the empty matching; most other constructions
here bolt it onto an anchor vertex to punish that vertex for ever walking
away from its intended partner.  On top of it sit the satisfiability
reductions (weighted and ranked variants, with and without isolated
proposers), the memory stress gadgets, a family whose shortest stabilising
sequences grow exponentially, and a roommates construction whose locally
stable matchings correspond to satisfying assignments.

All generators are pure: same arguments, same game, byte for byte.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Set, Tuple

from .model import Matching, NetworkGame, Pair, Vertex, pair_of

Clause = Tuple[int, int, int]


@dataclass(frozen=True)
class CnfFormula:
    """A 3-CNF formula; literals are signed 1-based variable indices."""

    num_vars: int
    clauses: Tuple[Clause, ...]

    def __post_init__(self) -> None:
        if self.num_vars < 1:
            raise ValueError("formula needs at least one variable")
        for c in self.clauses:
            if len(c) != 3:
                raise ValueError(f"clause {c} does not have exactly three literals")
            for lit in c:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise ValueError(f"literal {lit} out of range")


def parse_dimacs(text: str) -> CnfFormula:
    num_vars: Optional[int] = None
    num_clauses: Optional[int] = None
    lits: List[int] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            toks = line.split()
            if len(toks) != 4 or toks[1] != "cnf":
                raise ValueError(f"bad problem line {line!r}")
            num_vars, num_clauses = int(toks[2]), int(toks[3])
            continue
        for tok in line.split():
            lits.append(int(tok))
    if num_vars is None or num_clauses is None:
        raise ValueError("missing problem line")
    clauses: List[Clause] = []
    cur: List[int] = []
    for lit in lits:
        if lit == 0:
            if len(cur) != 3:
                raise ValueError(f"clause {tuple(cur)} does not have three literals")
            clauses.append((cur[0], cur[1], cur[2]))
            cur = []
        else:
            cur.append(lit)
    if cur:
        raise ValueError("last clause is not 0-terminated")
    if len(clauses) != num_clauses:
        raise ValueError(
            f"problem line promises {num_clauses} clauses, found {len(clauses)}"
        )
    return CnfFormula(num_vars=num_vars, clauses=tuple(clauses))


def write_dimacs(cnf: CnfFormula) -> str:
    lines = [f"p cnf {cnf.num_vars} {len(cnf.clauses)}"]
    for c in cnf.clauses:
        lines.append(f"{c[0]} {c[1]} {c[2]} 0")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True, eq=False)
class ReductionOutput:
    """A reduction's game plus its intended start and goal matchings.

    `annotations` names the construction role of every vertex, for humans
    poking at emitted files; nothing computational reads it.
    """

    game: NetworkGame
    init: Matching
    target: Optional[Matching]
    annotations: Dict[str, str]


class _Builder:
    """Mutable accumulator for the generators below."""

    def __init__(self, name: str):
        self.name = name
        self.vertices: List[Vertex] = []
        self.links: Set[Pair] = set()
        self.edges: Set[Pair] = set()
        self.prefs: Dict[str, List[str]] = {}
        self.weights: Dict[Pair, Fraction] = {}

    def vertex(self, vid: str, side: Optional[str] = None) -> str:
        self.vertices.append(Vertex(vid, side))
        return vid

    def link(self, a: str, b: str) -> None:
        self.links.add(pair_of(a, b))

    def edge(self, a: str, b: str, weight: Optional[Fraction] = None) -> None:
        e = pair_of(a, b)
        self.edges.add(e)
        if weight is not None:
            self.weights[e] = weight

    def pref(self, v: str, row: Sequence[str]) -> None:
        seen: List[str] = []
        for p in row:
            if p not in seen:
                seen.append(p)
        self.prefs[v] = seen

    def ranked(self) -> NetworkGame:
        return NetworkGame(
            name=self.name,
            vertices=tuple(self.vertices),
            links=frozenset(self.links),
            potential_edges=frozenset(self.edges),
            rankings={v: tuple(row) for v, row in self.prefs.items()},
        )

    def weighted(self) -> NetworkGame:
        return NetworkGame(
            name=self.name,
            vertices=tuple(self.vertices),
            links=frozenset(self.links),
            potential_edges=frozenset(self.edges),
            weights=dict(self.weights),
        )


_CIRCLING_PREFS: Dict[str, Tuple[str, ...]] = {
    "1": ("C", "B", "A", "D"),
    "2": ("D", "C", "B", "A"),
    "3": ("A", "D", "C", "B"),
    "4": ("B", "A", "D", "C"),
    "A": ("4", "1", "3", "2"),
    "B": ("1", "2", "4", "3"),
    "C": ("2", "3", "1", "4"),
    "D": ("3", "4", "2", "1"),
}

_CIRCLING_LINKS: Tuple[Tuple[str, str], ...] = (
    ("A", "b1"),
    ("B", "b2"),
    ("C", "b3"),
    ("D", "b4"),
    ("b1", "1"),
    ("b2", "2"),
    ("b3", "3"),
    ("b4", "4"),
    ("A", "B"),
    ("B", "C"),
    ("C", "D"),
    ("D", "A"),
)


def circling_gadget() -> NetworkGame:
    """Twelve vertices, two locally stable matchings, neither reachable
    from the empty matching."""
    b = _Builder("circling")
    for w in ("1", "2", "3", "4"):
        b.vertex(w, "W")
    for u in ("A", "B", "C", "D", "b1", "b2", "b3", "b4"):
        b.vertex(u, "U")
    for x, y in _CIRCLING_LINKS:
        b.link(x, y)
    for w in ("1", "2", "3", "4"):
        for u in ("A", "B", "C", "D"):
            b.edge(w, u)
    for v, row in _CIRCLING_PREFS.items():
        b.pref(v, row)
    return b.ranked()


def recency_w_only_gadget() -> NetworkGame:
    """The circling gadget with the partition tags swapped.

    With recency memory restricted to the W side, the two stable matchings
    stay unreachable from the empty matching; the exhaustive search confirms
    it.
    """
    base = circling_gadget()
    flip = {"U": "W", "W": "U"}
    return NetworkGame(
        name="recency-w-only",
        vertices=tuple(Vertex(v.id, flip[v.side]) for v in base.vertices),
        links=base.links,
        potential_edges=base.potential_edges,
        rankings=base.rankings,
    )


_ATTACH_ROLES = ("2", "3", "4", "A", "B", "C", "D", "b1", "b2", "b3", "b4")


def attach_circling(game: NetworkGame, anchor: str) -> NetworkGame:
    """Graft a fresh circling gadget onto `anchor`, which plays its vertex 1.

    Adds eleven vertices and twelve links; the anchor gains the gadget's four
    potential partners at the bottom of its existing ranking, so it prefers
    every outside option to circling.  Ranked games only.
    """
    if game.rankings is None:
        raise ValueError("attaching a circling gadget needs a ranked game")
    ids = {v.id for v in game.vertices}
    if anchor not in ids:
        raise ValueError(f"anchor {anchor} is not a vertex")

    sides = {v.id: v.side for v in game.vertices}
    anchor_side = sides[anchor]
    if anchor_side == "U":
        opp = {"U": "W", "W": "U"}
    else:
        opp = {"U": "U", "W": "W"}

    def fresh(role: str) -> str:
        return f"circ:{anchor}:{role}"

    def side_for(role: str) -> Optional[str]:
        if anchor_side is None:
            return None
        base = "U" if role in ("A", "B", "C", "D", "b1", "b2", "b3", "b4") else "W"
        return opp[base]

    def mapped(role: str) -> str:
        return anchor if role == "1" else fresh(role)

    vertices = list(game.vertices)
    for role in _ATTACH_ROLES:
        vid = fresh(role)
        if vid in ids:
            raise ValueError(f"vertex {vid} already exists; gadget attached twice?")
        vertices.append(Vertex(vid, side_for(role)))

    links = set(game.links)
    for x, y in _CIRCLING_LINKS:
        links.add(pair_of(mapped(x), mapped(y)))
    edges = set(game.potential_edges)
    for w in ("1", "2", "3", "4"):
        for u in ("A", "B", "C", "D"):
            edges.add(pair_of(mapped(w), mapped(u)))

    rankings = {v: tuple(row) for v, row in game.rankings.items()}
    for role, row in _CIRCLING_PREFS.items():
        if role == "1":
            old = rankings.get(anchor, ())
            rankings[anchor] = old + tuple(mapped(r) for r in row)
        else:
            rankings[mapped(role)] = tuple(mapped(r) for r in row)

    return NetworkGame(
        name=game.name,
        vertices=tuple(vertices),
        links=frozenset(links),
        potential_edges=frozenset(edges),
        rankings=rankings,
    )


def _lit_id(lit: int) -> str:
    return f"x:{lit}" if lit > 0 else f"nx:{-lit}"


def _lit_role(lit: int) -> str:
    return f"x_{lit}" if lit > 0 else f"~x_{-lit}"


class _SatSkeleton:
    """Common vertex, link and edge layout of the satisfiability reductions."""

    def __init__(self, cnf: CnfFormula, name: str):
        self.cnf = cnf
        self.k = cnf.num_vars
        self.l = len(cnf.clauses)
        self.b = _Builder(name)
        self.notes: Dict[str, str] = {}

        k, l = self.k, self.l
        bb = self.b
        for i in range(1, k + 1):
            self.note(bb.vertex(f"ux:{i}", "U"), f"u_{{x_{i}}}")
        for j in range(1, l + 1):
            self.note(bb.vertex(f"uC:{j}", "U"), f"u_{{C_{j}}}")
        for i in range(1, k + 1):
            self.note(bb.vertex(f"x:{i}", "W"), f"x_{i}")
            self.note(bb.vertex(f"nx:{i}", "W"), f"~x_{i}")
        for i in range(1, k + 1):
            self.note(bb.vertex(f"vx:{i}", "W"), f"v_{{x_{i}}}")
        for j in range(1, l + 1):
            self.note(bb.vertex(f"vC:{j}", "W"), f"v_{{C_{j}}}")
        self.note(bb.vertex("a", "W"), "a")

        for i in range(1, k + 1):
            bb.link("a", f"x:{i}")
            bb.link("a", f"nx:{i}")
            bb.link(f"x:{i}", "vx:1")
            bb.link(f"nx:{i}", "vx:1")
        chain = [f"vx:{i}" for i in range(1, k + 1)]
        chain += [f"vC:{j}" for j in range(1, l + 1)]
        for a, c in zip(chain, chain[1:]):
            bb.link(a, c)

    def note(self, vid: str, role: str) -> str:
        self.notes[vid] = role
        return vid

    def clause_lits(self, j: int) -> Clause:
        return self.cnf.clauses[j - 1]

    def add_edges(self, shift: int) -> None:
        """Potential edges of the skeleton; `shift` offsets the v-benefits.

        The climb structure only needs the benefits to be ordered; the two
        weighted reductions use the same ladder with different base offsets
        to make room for their extra vertices underneath.
        """
        k, l, bb = self.k, self.l, self.b
        base = Fraction(k + l + shift)
        for i in range(1, k + 1):
            u = f"ux:{i}"
            bb.edge(u, "a", Fraction(l + i))
            bb.edge(u, f"x:{i}", base)
            bb.edge(u, f"nx:{i}", base)
            for ip in range(1, i + 1):
                bb.edge(u, f"vx:{ip}", base + ip)
        for j in range(1, l + 1):
            u = f"uC:{j}"
            bb.edge(u, "a", Fraction(j))
            for lit in self.clause_lits(j):
                bb.edge(u, _lit_id(lit), base)
            for i in range(1, k + 1):
                bb.edge(u, f"vx:{i}", base + i)
            for jp in range(1, j + 1):
                bb.edge(u, f"vC:{jp}", base + k + jp)

    def target(self) -> Matching:
        pairs = [(f"ux:{i}", f"vx:{i}") for i in range(1, self.k + 1)]
        pairs += [(f"uC:{j}", f"vC:{j}") for j in range(1, self.l + 1)]
        return Matching.of(pairs)


def threesat_gadget(cnf: CnfFormula) -> NetworkGame:
    """Shared satisfiability skeleton with the plain benefit ladder."""
    sk = _SatSkeleton(cnf, f"threesat-{cnf.num_vars}-{len(cnf.clauses)}")
    sk.add_edges(shift=1)
    return sk.b.weighted()


def _thm1_chain(sk: _SatSkeleton) -> None:
    """Relay vertices b_h and a_1 threading all proposers onto one path."""
    k, l, bb = sk.k, sk.l, sk.b
    for h in range(1, l + k):
        sk.note(bb.vertex(f"b:{h}", "U"), f"b_{h}")
    sk.note(bb.vertex("a1", "W"), "a_1")
    bb.link("a", "a1")
    bb.link("a1", "uC:1")
    for j in range(1, l + 1):
        bb.link(f"uC:{j}", f"b:{j}")
    for j in range(1, l):
        bb.link(f"b:{j}", f"uC:{j + 1}")
    bb.link(f"b:{l}", "ux:1")
    for i in range(1, k):
        bb.link(f"ux:{i}", f"b:{l + i}")
        bb.link(f"b:{l + i}", f"ux:{i + 1}")
    for h in range(1, l + k):
        bb.edge(f"b:{h}", "a", Fraction(2 * h + 1, 2))


def reduction_thm1(cnf: CnfFormula) -> ReductionOutput:
    """Weighted reachability reduction: the target matching is reachable
    from the empty matching exactly when the formula is satisfiable."""
    sk = _SatSkeleton(cnf, f"thm1-{cnf.num_vars}-{len(cnf.clauses)}")
    sk.add_edges(shift=1)
    _thm1_chain(sk)
    return ReductionOutput(
        game=sk.b.weighted(),
        init=Matching.empty(),
        target=sk.target(),
        annotations=dict(sk.notes),
    )


def reduction_cor2(cnf: CnfFormula) -> ReductionOutput:
    """Job-market variant: proposers are isolated in the link graph and
    start matched to a chain of decoy partners instead of empty."""
    sk = _SatSkeleton(cnf, f"cor2-{cnf.num_vars}-{len(cnf.clauses)}")
    sk.add_edges(shift=2)
    k, l, bb = sk.k, sk.l, sk.b
    for i in range(1, k + 1):
        sk.note(bb.vertex(f"ax:{i}", "W"), f"a_{{x_{i}}}")
    for j in range(1, l + 1):
        sk.note(bb.vertex(f"aC:{j}", "W"), f"a_{{C_{j}}}")
    bb.link("a", f"ax:{k}")
    for i in range(k, 1, -1):
        bb.link(f"ax:{i}", f"ax:{i - 1}")
    bb.link("ax:1", f"aC:{l}")
    for j in range(l, 1, -1):
        bb.link(f"aC:{j}", f"aC:{j - 1}")

    proposers = [f"ux:{i}" for i in range(1, k + 1)]
    proposers += [f"uC:{j}" for j in range(1, l + 1)]
    for u in proposers:
        bb.weights[pair_of(u, "a")] = Fraction(l + k + 1)
        for j in range(1, l + 1):
            bb.edge(u, f"aC:{j}", Fraction(j))
        for i in range(1, k + 1):
            bb.edge(u, f"ax:{i}", Fraction(l + i))

    init = Matching.of(
        [(f"ux:{i}", f"ax:{i}") for i in range(1, k + 1)]
        + [(f"uC:{j}", f"aC:{j}") for j in range(1, l + 1)]
    )
    return ReductionOutput(
        game=bb.weighted(),
        init=init,
        target=sk.target(),
        annotations=dict(sk.notes),
    )


def reduction_thm3(cnf: CnfFormula) -> ReductionOutput:
    """Ranked variant asking whether any stable state is reachable at all.

    Every waypoint vertex carries a circling gadget, so parking on a waypoint
    without finishing the climb leads into the unreachable trap; some stable
    state is reachable from empty exactly when the formula is satisfiable.
    """
    sk = _SatSkeleton(cnf, f"thm3-{cnf.num_vars}-{len(cnf.clauses)}")
    k, l, bb = sk.k, sk.l, sk.b
    sk.add_edges(shift=1)
    _thm1_chain(sk)

    prefs: Dict[str, List[str]] = {}
    for i in range(1, k + 1):
        row = [f"vx:{ip}" for ip in range(i, 0, -1)]
        row += [f"x:{i}", f"nx:{i}", "a"]
        prefs[f"ux:{i}"] = row
    for j in range(1, l + 1):
        row = [f"vC:{jp}" for jp in range(j, 0, -1)]
        row += [f"vx:{i}" for i in range(k, 0, -1)]
        row += [_lit_id(lit) for lit in sk.clause_lits(j)]
        row.append("a")
        prefs[f"uC:{j}"] = row

    ladder = [(Fraction(l + i), f"ux:{i}") for i in range(1, k + 1)]
    ladder += [(Fraction(j), f"uC:{j}") for j in range(1, l + 1)]
    ladder += [(Fraction(2 * h + 1, 2), f"b:{h}") for h in range(1, l + k)]
    ladder.sort(key=lambda t: -t[0])
    prefs["a"] = [vid for _, vid in ladder]

    for h in range(1, l + k):
        prefs[f"b:{h}"] = ["a"]
    for i in range(1, k + 1):
        for vid, lit in ((f"x:{i}", i), (f"nx:{i}", -i)):
            row = [f"ux:{i}"]
            row += [
                f"uC:{j}"
                for j in range(1, l + 1)
                if lit in sk.clause_lits(j)
            ]
            prefs[vid] = row
    for i in range(1, k + 1):
        row = [f"uC:{j}" for j in range(l, 0, -1)]
        row += [f"ux:{ip}" for ip in range(k, i - 1, -1)]
        prefs[f"vx:{i}"] = row
    for j in range(1, l + 1):
        prefs[f"vC:{j}"] = [f"uC:{jp}" for jp in range(l, j - 1, -1)]

    bb.weights.clear()
    for v, row in prefs.items():
        bb.pref(v, row)
    game = bb.ranked()

    waypoints = [f"vC:{j}" for j in range(1, l + 1)]
    waypoints += [f"vx:{i}" for i in range(1, k + 1)]
    notes = dict(sk.notes)
    for anchor in waypoints:
        game = attach_circling(game, anchor)
        for role in _ATTACH_ROLES:
            notes[f"circ:{anchor}:{role}"] = f"circ({notes[anchor]}):{role}"
    return ReductionOutput(
        game=game, init=Matching.empty(), target=None, annotations=notes
    )


def quality_reset_gadget() -> NetworkGame:
    """Circling plus a one-shot decoy per original vertex.

    Each vertex's top choice is a decoy that will leave it for a private
    partner after one round.  Under best-quality memory the slot then points
    at the lost decoy forever, so memory never helps with the actual circling
    and the game keeps cycling.
    """
    base = circling_gadget()
    sides = {v.id: v.side for v in base.vertices}
    b = _Builder("quality-reset")
    b.vertices = list(base.vertices)
    b.links = set(base.links)
    b.edges = set(base.potential_edges)
    assert base.rankings is not None
    prefs = {v: list(row) for v, row in base.rankings.items()}

    for w in ("1", "2", "3", "4", "A", "B", "C", "D"):
        other = "U" if sides[w] == "W" else "W"
        u1 = b.vertex(f"u1:{w}", other)
        u2 = b.vertex(f"u2:{w}", other)
        u3 = b.vertex(f"u3:{w}", sides[w])
        b.link(w, u1)
        b.link(u1, u2)
        b.link(w, u3)
        b.edge(w, u2)
        b.edge(u2, u3)
        prefs[w] = [u2] + prefs[w]
        prefs[u2] = [u3, w]
        prefs[u3] = [u2]
        prefs[u1] = []

    for v, row in prefs.items():
        b.pref(v, row)
    return b.ranked()


def exponential_gadget(n: int) -> NetworkGame:
    """Chained rotation gadgets whose stabilisation time doubles per stage.

    Stage i can only rotate its triangle after stage i-1 has rotated twice,
    so the shortest improvement sequence from empty to a stable matching
    grows exponentially in `n`.  Every End vertex carries a circling trap to
    keep shortcuts unstable.
    """
    if n < 1:
        raise ValueError("the construction needs at least one stage")
    b = _Builder(f"exponential-{n}")

    def par(i: int, letter_group: bool) -> str:
        odd = i % 2 == 1
        if letter_group:
            return "U" if odd else "W"
        return "W" if odd else "U"

    b.vertex("A:0", "U")
    b.vertex("Dist:0", "W")
    b.vertex("End:0", "W")
    for i in range(1, n + 1):
        for r in ("A", "B", "C", "End1", "End2"):
            b.vertex(f"{r}:{i}", par(i, True))
        for r in ("D", "1", "E", "2", "F"):
            b.vertex(f"{r}:{i}", par(i, False))

    b.link("A:0", "Dist:0")
    b.link("F:1", "End:0")
    for i in range(1, n + 1):
        b.link("A:0", f"C:{i}")
        b.link("Dist:0", f"D:{i}")
        for x, y in (
            ("A", "B"),
            ("D", "E"),
            ("E", "F"),
            ("F", "D"),
            ("D", "1"),
            ("1", "E"),
            ("E", "2"),
            ("2", "F"),
            ("A", "End1"),
            ("C", "End2"),
        ):
            b.link(f"{x}:{i}", f"{y}:{i}")
        if i >= 2:
            for x, y in (("D", "A"), ("D", "C"), ("F", "B"), ("F", "C")):
                b.link(f"{x}:{i}", f"{y}:{i - 1}")
    b.link(f"A:{n}", f"C:{n}")
    b.link(f"B:{n}", f"C:{n}")

    b.edge("A:0", "End:0")
    for i in range(1, n + 1):
        b.edge("A:0", f"D:{i}")
    for r in ("1", "E", "2", "F"):
        b.edge("A:0", f"{r}:1")
    for i in range(1, n + 1):
        for x, y in (
            ("A", "E"),
            ("A", "F"),
            ("B", "D"),
            ("B", "E"),
            ("C", "F"),
            ("C", "D"),
        ):
            b.edge(f"{x}:{i}", f"{y}:{i}")
        b.edge(f"F:{i}", f"End1:{i}")
        b.edge(f"D:{i}", f"End2:{i}")
        if i >= 2:
            for x in ("D", "1", "E", "2", "F"):
                b.edge(f"{x}:{i}", f"D:{i - 1}")
                b.edge(f"{x}:{i}", f"F:{i - 1}")

    def down(i: int) -> List[str]:
        if i >= 2:
            return [f"D:{i - 1}", f"F:{i - 1}"]
        return ["A:0"]

    def up(i: int) -> List[str]:
        if i < n:
            j = i + 1
            return [f"F:{j}", f"2:{j}", f"E:{j}", f"1:{j}", f"D:{j}"]
        return []

    b.pref(
        "A:0",
        ["End:0", "F:1", "2:1", "E:1", "1:1"] + [f"D:{i}" for i in range(1, n + 1)],
    )
    b.pref("Dist:0", [])
    b.pref("End:0", ["A:0"])
    for i in range(1, n + 1):
        b.pref(f"A:{i}", [f"F:{i}", f"E:{i}"])
        b.pref(f"B:{i}", [f"E:{i}", f"D:{i}"])
        b.pref(f"C:{i}", [f"D:{i}", f"F:{i}"])
        b.pref(
            f"D:{i}",
            [f"End2:{i}", f"B:{i}"] + up(i) + [f"C:{i}"] + down(i) + ["A:0"],
        )
        b.pref(f"E:{i}", [f"A:{i}", f"B:{i}"] + down(i))
        b.pref(
            f"F:{i}",
            [f"End1:{i}", f"C:{i}"] + up(i) + [f"A:{i}"] + down(i)
            + (["A:0"] if i == 1 else []),
        )
        b.pref(f"1:{i}", down(i))
        b.pref(f"2:{i}", down(i))
        b.pref(f"End1:{i}", [f"F:{i}"])
        b.pref(f"End2:{i}", [f"D:{i}"])

    game = b.ranked()
    anchors = ["End:0"]
    for i in range(1, n + 1):
        anchors += [f"End1:{i}", f"End2:{i}"]
    for anchor in anchors:
        game = attach_circling(game, anchor)
    return game


def roommates_existence_reduction(cnf: CnfFormula) -> NetworkGame:
    """Non-bipartite game with complete potential edges; a locally stable
    matching exists exactly when the formula is satisfiable.

    Two mirrored copies of a variable-path and clause-cycle structure; every
    vertex ranks a short meaningful prefix first and everyone else in
    canonical order behind it, own copy before the mirror copy.
    """
    k, l = cnf.num_vars, len(cnf.clauses)
    b = _Builder(f"roommates-{k}-{l}")

    def prime(v: str) -> str:
        return v + "'"

    base_ids: List[str] = []
    for i in range(1, k + 1):
        base_ids += [f"x:{i}", f"nx:{i}"]
        base_ids += [f"{p}x:{i}" for p in range(1, 6)]
    for j in range(1, l + 1):
        base_ids += [f"A:{j}", f"B:{j}", f"C:{j}"]
        base_ids += [f"{p}c:{j}" for p in range(1, 4)]

    for v in base_ids:
        b.vertex(v)
    for v in base_ids:
        b.vertex(prime(v))

    def add_copy_links(tr) -> None:
        for i in range(1, k + 1):
            path = [f"x:{i}"] + [f"{p}x:{i}" for p in range(1, 6)] + [f"nx:{i}"]
            for a, c in zip(path, path[1:]):
                b.link(tr(a), tr(c))
        for j in range(1, l + 1):
            l1, l2, l3 = (_lit_id(t) for t in cnf.clauses[j - 1])
            cyc = [f"A:{j}", f"1c:{j}", l1, f"B:{j}", f"2c:{j}", l2,
                   f"C:{j}", f"3c:{j}", l3]
            for a, c in zip(cyc, cyc[1:] + cyc[:1]):
                if a != c:
                    b.link(tr(a), tr(c))

    add_copy_links(lambda v: v)
    add_copy_links(prime)
    for v in base_ids:
        b.link(v, prime(v))

    all_ids = base_ids + [prime(v) for v in base_ids]
    for idx, a in enumerate(all_ids):
        for c in all_ids[idx + 1 :]:
            b.edge(a, c)

    def prefix_of(v: str) -> List[str]:
        kind, _, rest = v.partition(":")
        if kind == "x" or kind == "nx":
            i = rest
            row = [f"3x:{i}"]
            for j in range(1, l + 1):
                row += [f"A:{j}", f"B:{j}", f"C:{j}"]
            return row
        if kind.endswith("x"):
            p, i = kind[0], rest
            if p == "3":
                return [f"x:{i}", f"nx:{i}", f"1x:{i}", f"5x:{i}",
                        f"2x:{i}", f"4x:{i}"]
            return [f"3x:{i}"]
        if kind in ("A", "B", "C"):
            j = int(rest)
            l1, l2, l3 = (_lit_id(t) for t in cnf.clauses[j - 1])
            return {
                "A": [f"C:{j}", f"B:{j}", l1, f"1c:{j}"],
                "B": [f"A:{j}", f"C:{j}", l2, f"2c:{j}"],
                "C": [f"B:{j}", f"A:{j}", l3, f"3c:{j}"],
            }[kind]
        p, j = kind[0], rest
        return [{"1": "A", "2": "B", "3": "C"}[p] + f":{j}"]

    base_sorted = sorted(base_ids)
    for v in base_ids:
        head = prefix_of(v) + [prime(v)]
        own = [w for w in base_sorted if w != v and w not in head]
        other = [prime(w) for w in base_sorted if prime(w) not in head]
        b.pref(v, head + own + other)

        phead = [prime(w) for w in prefix_of(v)] + [v]
        pown = [prime(w) for w in base_sorted if prime(w) != prime(v) and prime(w) not in phead]
        pother = [w for w in base_sorted if w not in phead]
        b.pref(prime(v), phead + pown + pother)

    return b.ranked()


def complete_potential_edges(game: NetworkGame) -> NetworkGame:
    """Pad the potential edges to all of UxW, or to all pairs when untagged.

    Newly possible partners are appended below each existing ranking in
    canonical order, so nobody's standing choices change.
    """
    if game.rankings is None:
        raise ValueError("completing potential edges needs a ranked game")
    sides = game.side_of()
    ids = sorted(v.id for v in game.vertices)
    full: Set[Pair] = set()
    for idx, a in enumerate(ids):
        for c in ids[idx + 1 :]:
            if game.is_bipartite() and sides is not None and sides[a] == sides[c]:
                continue
            full.add(pair_of(a, c))
    new_edges = full - game.potential_edges
    rankings = {v: list(game.rankings.get(v, ())) for v in ids}
    for a, c in sorted(new_edges):
        rankings[a].append(c)
        rankings[c].append(a)
    return NetworkGame(
        name=game.name,
        vertices=game.vertices,
        links=game.links,
        potential_edges=frozenset(game.potential_edges | new_edges),
        rankings={v: tuple(row) for v, row in rankings.items() if row},
    )


def lp_demo_game() -> NetworkGame:
    """Six-vertex example whose stability polytope has a fractional corner."""
    b = _Builder("lp-demo")
    for u in ("1", "2"):
        b.vertex(u, "U")
    for w in ("A", "B", "C", "D"):
        b.vertex(w, "W")
    b.link("1", "2")
    b.link("A", "B")
    b.link("A", "C")
    b.link("B", "D")
    b.link("C", "D")
    for u in ("1", "2"):
        for w in ("A", "B", "C", "D"):
            b.edge(u, w)
    b.pref("1", ("D", "B", "C", "A"))
    b.pref("2", ("B", "D", "A", "C"))
    b.pref("A", ("2", "1"))
    b.pref("B", ("2", "1"))
    b.pref("C", ("1", "2"))
    b.pref("D", ("1", "2"))
    return b.ranked()
