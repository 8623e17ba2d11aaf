"""Planarity, genus lower bounds, and the nine-agent nonplanar profile.

Planarity is decided on the unweighted support graph (weights do not affect
genus). The production test delegates to networkx's left-right planarity
algorithm behind a fast edge-count rejection; an independent brute-force
subdivision search is provided as a slow reference for cross-validation on
small graphs.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import networkx as nx

from .markets import UtilityProfile
from .metric import MetricSpace, Placement, random_connected_space, utilities_from_space
from .ordinal import OrdinalProfile, TieError, TiePolicy, ordinal_from_utility
from .seeding import rng_for

_KURATOWSKI_VERTEX_CAP = 8

# Constrained cells of the nine-agent profile whose every geometric
# realization contains a K_{3,3} minor: tops, second choices, and the third
# choices of the last three agents.
_NINE_TOPS = tuple(range(9))
_NINE_SECONDS = (3, 4, 5, 1, 2, 0, 3, 4, 5)
_NINE_THIRDS = {6: 2, 7: 0, 8: 1}


def _support(space_or_edges) -> tuple[int, list[tuple[int, int]]]:
    if isinstance(space_or_edges, MetricSpace):
        return space_or_edges.n_vertices, space_or_edges.support_edges()
    vertex_count, edges = space_or_edges
    return vertex_count, [(min(a, b), max(a, b)) for a, b in edges]


def is_planar(space_or_edges) -> bool:
    """Planarity of the support graph (genus 0).

    Accepts a :class:`MetricSpace` or a ``(vertex_count, edges)`` pair.
    Dense graphs are rejected by the Euler edge bound E <= 3V - 6 before the
    full test runs.
    """
    vertex_count, edges = _support(space_or_edges)
    if vertex_count >= 3 and len(edges) > 3 * vertex_count - 6:
        return False
    g = nx.Graph()
    g.add_nodes_from(range(vertex_count))
    g.add_edges_from(edges)
    return nx.check_planarity(g, counterexample=False)[0]


def _has_subdivision(
    adj: dict[int, set[int]],
    vertices: list[int],
    branch_sets: list[tuple[tuple[int, ...], tuple[int, ...]]],
) -> bool:
    """Backtracking search for a subdivision with the given branch structure.

    ``branch_sets`` lists (part_a, part_b) choices of branch vertices; the
    required pairs either share an edge or are joined through spare
    vertices, each spare serving at most one pair.
    """
    vertex_set = set(vertices)
    for part_a, part_b in branch_sets:
        branches = set(part_a) | set(part_b)
        spares = sorted(vertex_set - branches)
        if part_a == part_b:  # clique pairs
            pairs = list(itertools.combinations(part_a, 2))
        else:
            pairs = [(u, v) for u in part_a for v in part_b]
        missing = [(u, v) for u, v in pairs if v not in adj[u]]
        if _route_pairs(adj, missing, frozenset(spares)):
            return True
    return False


def _route_pairs(adj, pairs, free_spares) -> bool:
    if not pairs:
        return True
    (u, v), rest = pairs[0], pairs[1:]
    for k in range(1, len(free_spares) + 1):
        for interior in itertools.permutations(sorted(free_spares), k):
            chain = (u, *interior, v)
            if all(chain[i + 1] in adj[chain[i]] for i in range(len(chain) - 1)):
                if _route_pairs(adj, rest, free_spares - set(interior)):
                    return True
    return False


def planar_by_kuratowski(vertex_count: int, edges) -> bool:
    """Slow reference planarity test: no subdivision of K_5 or K_{3,3}.

    Exhaustive over branch-vertex choices with spare vertices as
    subdivision points; only meant for cross-validation, capped at
    8 vertices.
    """
    if vertex_count > _KURATOWSKI_VERTEX_CAP:
        raise ValueError(f"reference search capped at {_KURATOWSKI_VERTEX_CAP} vertices")
    vertices = list(range(vertex_count))
    adj: dict[int, set[int]] = {v: set() for v in vertices}
    for a, b in edges:
        if a != b:
            adj[a].add(b)
            adj[b].add(a)

    if vertex_count >= 5:
        k5 = [(combo, combo) for combo in itertools.combinations(vertices, 5)]
        if _has_subdivision(adj, vertices, k5):
            return False
    if vertex_count >= 6:
        k33 = []
        for six in itertools.combinations(vertices, 6):
            rest = set(six)
            for part_a in itertools.combinations(six, 3):
                if six[0] in part_a:  # fix one side to avoid mirrored splits
                    part_b = tuple(sorted(rest - set(part_a)))
                    k33.append((part_a, part_b))
        if _has_subdivision(adj, vertices, k33):
            return False
    return True


def _is_bipartite(adj: list[list[int]], comp: list[int]) -> bool:
    color = {comp[0]: 0}
    stack = [comp[0]]
    while stack:
        u = stack.pop()
        for v in adj[u]:
            if v not in color:
                color[v] = 1 - color[u]
                stack.append(v)
            elif color[v] == color[u]:
                return False
    return True


def genus_lower_bound(space_or_edges) -> int:
    """Euler-formula lower bound on orientable genus, summed per component.

    Planar components contribute 0. Nonplanar components contribute the
    best of: 1 (nonplanarity itself), ceil((E - 3V + 6) / 6), and for
    bipartite components the sharper ceil((E - 2V + 4) / 4) coming from the
    absence of triangles.
    """
    vertex_count, edges = _support(space_or_edges)
    adj: list[list[int]] = [[] for _ in range(vertex_count)]
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    seen = [False] * vertex_count
    total = 0
    for start in range(vertex_count):
        if seen[start]:
            continue
        comp = []
        stack = [start]
        seen[start] = True
        while stack:
            u = stack.pop()
            comp.append(u)
            for v in adj[u]:
                if not seen[v]:
                    seen[v] = True
                    stack.append(v)
        comp_vertices = set(comp)
        comp_edges = [(a, b) for a, b in edges if a in comp_vertices]
        if not comp_edges or is_planar((vertex_count, comp_edges)):
            continue
        v_count = len(comp)
        e_count = len(comp_edges)
        bound = max(1, math.ceil((e_count - 3 * v_count + 6) / 6))
        if _is_bipartite(adj, comp):
            bound = max(bound, math.ceil((e_count - 2 * v_count + 4) / 4))
        total += bound
    return total


def nonplanar_profile(n: int) -> OrdinalProfile:
    """The nine-agent profile with no planar geometric realization.

    The first nine agents' top choices are the matching alternatives, their
    second choices follow the fixed pattern (3,4,5,1,2,0,3,4,5) and agents
    6, 7, 8 additionally pin their third choices to (2, 0, 1). All
    unconstrained slots, and all agents beyond the ninth, are filled in
    ascending unused-index order; any completion has the same property, so
    callers must not depend on this one.
    """
    if n < 9:
        raise ValueError("profile requires n >= 9")
    rows = []
    for a in range(n):
        if a < 9:
            prefix = [_NINE_TOPS[a], _NINE_SECONDS[a]]
            if a in _NINE_THIRDS:
                prefix.append(_NINE_THIRDS[a])
        else:
            prefix = []
        used = set(prefix)
        rows.append(tuple(prefix + [x for x in range(n) if x not in used]))
    return OrdinalProfile(n, tuple(rows))


def matches_nine_agent_cells(profile: OrdinalProfile) -> bool:
    """True iff the profile agrees with every constrained nine-agent cell."""
    if profile.n < 9:
        return False
    for a in range(9):
        row = profile.ranks[a]
        if row[0] != _NINE_TOPS[a] or row[1] != _NINE_SECONDS[a]:
            return False
        if a in _NINE_THIRDS and row[2] != _NINE_THIRDS[a]:
            return False
    return True


@dataclass(frozen=True)
class RepresentationCandidate:
    space: MetricSpace
    placement: Placement
    utilities: UtilityProfile


def search_planar_representation(
    candidates: int = 10_000, seed: int = 0
) -> RepresentationCandidate | None:
    """Randomized refutation search for a planar realization of the
    nine-agent profile.

    Two candidate families are drawn: sparsified versions of the bipartite
    realization (random edge subsets below the planar edge budget, with
    weights taken from a geometric rank profile realizing the target
    rankings), and fully random small weighted graphs with random agent and
    alternative placements. A candidate refutes the nonplanarity claim only
    if its induced rankings match every constrained cell AND its support is
    planar. Returns the first refutation found, or None (the expected
    outcome, since no planar realization exists).
    """
    profile = nonplanar_profile(9)
    n = 9
    base_weights = [[0.0] * n for _ in range(n)]
    for a in range(n):
        for pos, x in enumerate(profile.ranks[a]):
            base_weights[a][x] = 2.0**pos
    full_edges = [(a, n + x, base_weights[a][x]) for a in range(n) for x in range(n)]

    for t in range(candidates):
        rng = rng_for(seed, t)
        if t % 2 == 0:
            keep = int(rng.integers(17, 49))  # at most the planar budget 3V-6=48
            idx = rng.choice(len(full_edges), size=keep, replace=False)
            edges = [full_edges[int(i)] for i in idx]
            space = MetricSpace(2 * n, edges)
            qm = space.quotient_map
            placement = Placement(
                tuple(qm[a] for a in range(n)), tuple(qm[n + x] for x in range(n))
            )
        else:
            v = int(rng.integers(4, 15))
            extra = int(rng.integers(0, 2 * v))
            space = random_connected_space(v, extra, rng, 0.2, 4.0)
            placement = Placement(
                tuple(int(rng.integers(0, space.n_vertices)) for _ in range(n)),
                tuple(int(rng.integers(0, space.n_vertices)) for _ in range(n)),
            )
        try:
            induced = utilities_from_space(space, placement, n)
            extracted = ordinal_from_utility(induced, TiePolicy.STRICT)
        except (ValueError, TieError):
            continue
        if matches_nine_agent_cells(extracted) and is_planar(space):
            return RepresentationCandidate(space, placement, induced)
    return None
