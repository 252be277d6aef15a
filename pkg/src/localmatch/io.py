"""Line-oriented text formats for games, matchings, traces and graphs.

All formats share the same conventions: UTF-8, one record per line, tokens
separated by whitespace, `#` starting a comment that runs to the end of the
line.  Writers emit records in canonical order and stamp a format version
comment at the top, so identical objects always serialise to identical bytes.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .model import Matching, NetworkGame, Pair, Vertex, pair_of, validate_game

FORMAT_VERSION = 1
STAMP = f"# localmatch format {FORMAT_VERSION}"


def _tokenize(text: str) -> List[Tuple[int, List[str]]]:
    """Meaningful lines as (line number, tokens), comments stripped."""
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append((lineno, line.split()))
    return out


def format_rational(x: Fraction) -> str:
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def parse_rational(token: str, where: str = "") -> Fraction:
    try:
        return Fraction(token)
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"bad rational {token!r}{where}") from None


def write_game(game: NetworkGame) -> str:
    lines = [STAMP, f"game {game.name}"]
    for v in sorted(game.vertices, key=lambda v: v.id):
        lines.append(f"vertex {v.id} {v.side}" if v.side else f"vertex {v.id}")
    for a, b in sorted(game.links):
        lines.append(f"link {a} {b}")
    for a, b in sorted(game.potential_edges):
        if game.weights is not None:
            lines.append(f"edge {a} {b} weight {format_rational(game.weights[(a, b)])}")
        else:
            lines.append(f"edge {a} {b}")
    if game.rankings is not None:
        for v in sorted(game.rankings):
            row = game.rankings[v]
            if row:
                lines.append(f"pref {v} : {' '.join(row)}")
    return "\n".join(lines) + "\n"


def read_game(text: str, validate: bool = True) -> NetworkGame:
    name: Optional[str] = None
    vertices: List[Vertex] = []
    links: set = set()
    edges: set = set()
    weights: Dict[Pair, Fraction] = {}
    rankings: Dict[str, Tuple[str, ...]] = {}
    saw_unweighted_edge = False

    for lineno, toks in _tokenize(text):
        kind = toks[0]
        where = f" at line {lineno}"
        if kind == "game":
            if len(toks) != 2:
                raise ValueError(f"game line needs exactly one name{where}")
            if name is not None:
                raise ValueError(f"second game line{where}")
            name = toks[1]
        elif kind == "vertex":
            if len(toks) == 2:
                vertices.append(Vertex(toks[1]))
            elif len(toks) == 3 and toks[2] in ("U", "W"):
                vertices.append(Vertex(toks[1], toks[2]))
            else:
                raise ValueError(f"bad vertex line{where}")
        elif kind == "link":
            if len(toks) != 3:
                raise ValueError(f"link line needs two vertex ids{where}")
            links.add(pair_of(toks[1], toks[2]))
        elif kind == "edge":
            if len(toks) == 3:
                edges.add(pair_of(toks[1], toks[2]))
                saw_unweighted_edge = True
            elif len(toks) == 5 and toks[3] == "weight":
                e = pair_of(toks[1], toks[2])
                edges.add(e)
                weights[e] = parse_rational(toks[4], where)
            else:
                raise ValueError(f"bad edge line{where}")
        elif kind == "pref":
            if len(toks) < 3 or toks[2] != ":":
                raise ValueError(f"pref line needs '<vertex> : <partners>'{where}")
            v = toks[1]
            if v in rankings:
                raise ValueError(f"second pref line for {v}{where}")
            rankings[v] = tuple(toks[3:])
        else:
            raise ValueError(f"unknown record {kind!r}{where}")

    if name is None:
        raise ValueError("missing game line")
    if weights and saw_unweighted_edge:
        raise ValueError("weighted and unweighted edges are mixed")
    if weights and rankings:
        raise ValueError("pref lines are not allowed in weighted mode")
    if not weights and not rankings and edges:
        raise ValueError("edges need either weights or pref lines")

    game = NetworkGame(
        name=name,
        vertices=tuple(vertices),
        links=frozenset(links),
        potential_edges=frozenset(edges),
        # An edge-free game parses as ranked with an empty table.
        rankings=None if weights else rankings,
        weights=weights or None,
    )
    if validate:
        problems = validate_game(game)
        if problems:
            raise ValueError("invalid game: " + "; ".join(problems))
    return game


def write_matching(matching: Matching) -> str:
    lines = [STAMP]
    for a, b in sorted(matching.edges):
        lines.append(f"match {a} {b}")
    return "\n".join(lines) + "\n"


def read_matching(text: str) -> Matching:
    pairs = set()
    for lineno, toks in _tokenize(text):
        if toks[0] != "match" or len(toks) != 3:
            raise ValueError(f"bad matching line at line {lineno}")
        pairs.add(pair_of(toks[1], toks[2]))
    return Matching(frozenset(pairs))


def write_trace(
    game_name: str,
    initial: Matching,
    steps: Tuple[Pair, ...],
    seed: Optional[int] = None,
) -> str:
    head = f"trace {game_name}"
    if seed is not None:
        head += f" seed {seed}"
    lines = [STAMP, head]
    for a, b in sorted(initial.edges):
        lines.append(f"init {a} {b}")
    for a, b in steps:
        lines.append(f"step {a} {b}")
    return "\n".join(lines) + "\n"


def read_trace(text: str) -> Tuple[str, Matching, Tuple[Pair, ...], Optional[int]]:
    """Returns (game name, initial matching, steps, seed or None)."""
    name: Optional[str] = None
    seed: Optional[int] = None
    init: set = set()
    steps: List[Pair] = []
    for lineno, toks in _tokenize(text):
        kind = toks[0]
        if kind == "trace":
            if len(toks) == 2:
                name = toks[1]
            elif len(toks) == 4 and toks[2] == "seed":
                name = toks[1]
                seed = int(toks[3])
            else:
                raise ValueError(f"bad trace line at line {lineno}")
        elif kind == "init" and len(toks) == 3:
            init.add(pair_of(toks[1], toks[2]))
        elif kind == "step" and len(toks) == 3:
            steps.append(pair_of(toks[1], toks[2]))
        else:
            raise ValueError(f"bad trace record at line {lineno}")
    if name is None:
        raise ValueError("missing trace line")
    return name, Matching(frozenset(init)), tuple(steps), seed


def write_weighted_graph(
    vertices: Dict[str, int], edges: frozenset, name: str = "graph"
) -> str:
    lines = [STAMP, f"graph {name}"]
    for v in sorted(vertices):
        lines.append(f"vertex {v} {vertices[v]}")
    for a, b in sorted(edges):
        lines.append(f"edge {a} {b}")
    return "\n".join(lines) + "\n"


def read_weighted_graph(text: str) -> Tuple[str, Dict[str, int], frozenset]:
    """Returns (name, vertex weights, edges); a missing weight defaults to 1."""
    name = "graph"
    vertices: Dict[str, int] = {}
    edges: set = set()
    for lineno, toks in _tokenize(text):
        kind = toks[0]
        if kind == "graph" and len(toks) == 2:
            name = toks[1]
        elif kind == "vertex" and len(toks) == 2:
            vertices[toks[1]] = 1
        elif kind == "vertex" and len(toks) == 3:
            vertices[toks[1]] = int(toks[2])
        elif kind == "edge" and len(toks) == 3:
            edges.add(pair_of(toks[1], toks[2]))
        else:
            raise ValueError(f"bad graph line at line {lineno}")
    for a, b in sorted(edges):
        for x in (a, b):
            if x not in vertices:
                raise ValueError(f"edge endpoint {x} is not a vertex")
    return name, vertices, frozenset(edges)


def read_point(text: str) -> Dict[str, Fraction]:
    """Variable assignment file: `<variable> <rational>` per line."""
    out: Dict[str, Fraction] = {}
    for lineno, toks in _tokenize(text):
        if len(toks) != 2:
            raise ValueError(f"bad point line at line {lineno}")
        out[toks[0]] = parse_rational(toks[1], f" at line {lineno}")
    return out


def write_point(point: Dict[str, Fraction]) -> str:
    lines = [STAMP]
    for var in sorted(point):
        lines.append(f"{var} {format_rational(point[var])}")
    return "\n".join(lines) + "\n"
