"""Euclidean embeddings of finite metric spaces and the robustness caps
they induce.

The embedding is the standard constructive Frechet variant: coordinates are
distances to random vertex subsets at geometrically growing sizes. Its
worst-case multiplicative distortion is logarithmic in the number of
vertices, which caps the robustness of any market realized in the space.
Markets realized directly in a normed vector space are capped at 3, probed
here by a multistart local search over placements of the cyclic three-agent
profile.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .metric import MetricSpace
from .ordinal import OrdinalProfile
from .seeding import rng_for

#: The cyclic three-agent profile used for the Euclidean cap: agent i's
#: ranking starts at alternative i and cycles upward.
_CONDORCET_RANKS = ((0, 1, 2), (1, 2, 0), (2, 0, 1))


@dataclass(frozen=True, eq=False)
class EuclideanPlacement:
    dim: int
    points: np.ndarray  # shape (vertices, dim)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        object.__setattr__(self, "points", pts)
        if pts.ndim != 2 or pts.shape[1] != self.dim:
            raise ValueError("points must be a (vertices, dim) array")


@dataclass(frozen=True)
class DistortionReport:
    """Distortion of an embedding after non-contractive normalization.

    ``scale`` is the smallest embedded/original distance ratio. Dividing
    every embedded distance by it makes the embedding non-contractive, so
    each normalized ratio is >= 1 and ``max_expansion`` (the largest
    normalized ratio) is the distortion. ``max_contraction`` records how
    much the raw embedding shrank its worst pair before normalization.
    """

    max_expansion: float
    max_contraction: float
    scale: float


def bourgain_embed(space: MetricSpace, quality: int = 10, seed: int = 0) -> EuclideanPlacement:
    """Distance-to-random-subset embedding into Euclidean space.

    For each scale i = 1..floor(log2 V) and each of q = quality * ceil(ln V)
    repetitions, one coordinate maps v to its distance to a uniformly drawn
    vertex subset of size min(2^i, V - 1); the cap at V - 1 keeps the top
    scale informative (distance to the full vertex set is identically
    zero). Coordinates are divided by sqrt(dim) so the map is non-expansive
    up to that factor; reporting normalizes scale away regardless.
    Deterministic for a fixed seed.
    """
    v_count = space.n_vertices
    if v_count < 2:
        raise ValueError("need at least 2 vertices")
    if not space.is_connected():
        raise ValueError("space must be connected (finite distances)")
    levels = int(math.floor(math.log2(v_count)))
    reps = quality * int(math.ceil(math.log(v_count)))
    reps = max(reps, 1)
    rng = rng_for(seed)
    dmat = space.distance_matrix()
    cols = []
    for i in range(1, levels + 1):
        size = min(2**i, v_count - 1)
        for _ in range(reps):
            subset = rng.choice(v_count, size=size, replace=False)
            cols.append(dmat[:, subset].min(axis=1))
    coords = np.stack(cols, axis=1)
    coords /= math.sqrt(coords.shape[1])
    return EuclideanPlacement(dim=coords.shape[1], points=coords)


def measure_distortion(space: MetricSpace, placement: EuclideanPlacement) -> DistortionReport:
    """All-pairs ratio report for an embedding of a connected space."""
    v_count = space.n_vertices
    if placement.points.shape[0] != v_count:
        raise ValueError("placement does not cover all vertices")
    if not space.is_connected():
        raise ValueError("distortion is only defined for connected spaces")
    dmat = space.distance_matrix()
    pts = placement.points
    sq = np.sum(pts**2, axis=1)
    gram = pts @ pts.T
    emb_sq = np.maximum(sq[:, None] + sq[None, :] - 2.0 * gram, 0.0)
    emb = np.sqrt(emb_sq)
    iu = np.triu_indices(v_count, k=1)
    originals = dmat[iu]
    embedded = emb[iu]
    if np.any((embedded == 0.0) & (originals > 0.0)):
        raise ValueError("distinct vertices embedded to coincident points")
    ratios = embedded / originals
    scale = float(ratios.min())
    max_ratio = float(ratios.max())
    return DistortionReport(
        max_expansion=max_ratio / scale,
        max_contraction=max(1.0, 1.0 / scale),
        scale=scale,
    )


def condorcet_profile() -> OrdinalProfile:
    """The cyclic three-agent profile: (0,1,2), (1,2,0), (2,0,1)."""
    return OrdinalProfile(3, _CONDORCET_RANKS)


def _pairwise_distances(points_alpha, points_beta) -> list[list[float]]:
    d = []
    for a in points_alpha:
        row = []
        for b in points_beta:
            row.append(math.sqrt(sum((float(ai) - float(bi)) ** 2 for ai, bi in zip(a, b))))
        d.append(row)
    return d


def _condorcet_ratio(dists) -> float | None:
    """Min of the six consecutive distance ratios if the cyclic profile is
    realized strictly with nonzero denominators, else None."""
    best = math.inf
    for a, order in enumerate(_CONDORCET_RANKS):
        d0 = dists[a][order[0]]
        d1 = dists[a][order[1]]
        d2 = dists[a][order[2]]
        if not (d0 < d1 < d2):
            return None
        if d0 <= 0.0 or d1 <= 0.0:
            return None
        best = min(best, d1 / d0, d2 / d1)
    return best


def euclidean_profile_robustness(points_alpha, points_beta, max_dim: int = 16) -> float:
    """Inner ratio minimum of the cyclic profile for a Euclidean placement.

    ``points_alpha`` are the three agents, ``points_beta`` the three
    alternatives. The placement must realize the cyclic profile strictly
    (agent i closest to alternative i, then i+1, then i+2, indices mod 3).
    The value is invariant under translation, rotation and positive scaling
    of all six points, and never exceeds 3.
    """
    if len(points_alpha) != 3 or len(points_beta) != 3:
        raise ValueError("need exactly three agent and three alternative points")
    dims = {len(p) for p in points_alpha} | {len(p) for p in points_beta}
    if len(dims) != 1:
        raise ValueError("all points must share one dimension")
    if dims.pop() > max_dim:
        raise ValueError(f"dimension exceeds cap {max_dim}")
    dists = _pairwise_distances(points_alpha, points_beta)
    value = _condorcet_ratio(dists)
    if value is None:
        for a, order in enumerate(_CONDORCET_RANKS):
            if dists[a][order[0]] == 0.0 or dists[a][order[1]] == 0.0:
                raise ValueError("coincident agent/alternative points (zero denominator)")
        raise ValueError("placement does not realize the cyclic profile strictly")
    return value


@dataclass(frozen=True)
class BanachSearchResult:
    best_value: float
    alpha: tuple[tuple[float, ...], ...] | None
    beta: tuple[tuple[float, ...], ...] | None
    feasible_restarts: int
    dim: int
    restarts: int
    iters: int
    seed: int


# Feasible two-dimensional template: alternatives on a triangle, each agent
# pulled a quarter of the way toward the next alternative in the cycle.
_TRIANGLE = ((1.0, 0.0), (-0.5, math.sqrt(3.0) / 2.0), (-0.5, -math.sqrt(3.0) / 2.0))


def _template_points(dim: int, rng: np.random.Generator, jitter: float) -> np.ndarray:
    pts = np.zeros((6, dim))
    for i in range(3):
        b = np.array(_TRIANGLE[i])
        b_next = np.array(_TRIANGLE[(i + 1) % 3])
        a = 0.75 * b + 0.25 * b_next
        pts[i, :2] = a
        pts[3 + i, :2] = b
    pts += jitter * rng.standard_normal((6, dim))
    return pts


def _evaluate(points: np.ndarray) -> float | None:
    rows = points.tolist()  # plain floats; this sits in the search hot loop
    dists = _pairwise_distances(rows[:3], rows[3:])
    return _condorcet_ratio(dists)


def maximize_euclidean_robustness(
    dim: int, restarts: int, iters: int, seed: int
) -> BanachSearchResult:
    """Multistart coordinate search for the most robust Euclidean placement
    of the cyclic profile.

    Each restart draws an initial placement (a jittered feasible template
    when dim >= 2, otherwise pure rejection sampling; one dimension admits
    no strict realization of the cyclic profile, so those restarts come up
    empty) and then hill-climbs: single-coordinate moves of +-step are
    accepted when they stay feasible and improve the ratio minimum, and the
    step is halved after any full sweep without improvement. ``iters``
    counts candidate evaluations per restart, so doubling it extends each
    trajectory and can only improve the result.
    """
    if not (1 <= dim <= 10):
        raise ValueError("dim must lie in 1..10")
    best_value = -math.inf
    best_points = None
    feasible_restarts = 0
    for r in range(restarts):
        rng = rng_for(seed, r)
        points = None
        if dim >= 2:
            for _ in range(40):
                cand = _template_points(dim, rng, float(rng.uniform(0.02, 0.35)))
                if _evaluate(cand) is not None:
                    points = cand
                    break
        if points is None:
            for _ in range(60):
                cand = rng.standard_normal((6, dim))
                if _evaluate(cand) is not None:
                    points = cand
                    break
        if points is None:
            continue
        feasible_restarts += 1
        value = _evaluate(points)
        step = 0.5
        evals = 0
        while evals < iters and step > 1e-12:
            improved = False
            for p in range(6):
                for c in range(dim):
                    for sgn in (1.0, -1.0):
                        if evals >= iters:
                            break
                        evals += 1
                        points[p, c] += sgn * step
                        cand_value = _evaluate(points)
                        if cand_value is not None and cand_value > value:
                            value = cand_value
                            improved = True
                            break
                        points[p, c] -= sgn * step
                    else:
                        continue
                    break
            if not improved:
                step *= 0.5
        if value > best_value:
            best_value = value
            best_points = points.copy()
    if best_points is None:
        return BanachSearchResult(-math.inf, None, None, 0, dim, restarts, iters, seed)
    alpha = tuple(tuple(float(v) for v in row) for row in best_points[:3])
    beta = tuple(tuple(float(v) for v in row) for row in best_points[3:])
    return BanachSearchResult(
        best_value, alpha, beta, feasible_restarts, dim, restarts, iters, seed
    )


def generating_space_size(n: int) -> int:
    """Vertex count of the full bipartite union realization: 2n(n!)^n."""
    return 2 * n * math.factorial(n) ** n


def log_size_robustness_cap(space_size: int, calibration_constant: float) -> float:
    """Logarithmic robustness cap from the space size: c * ln|X|.

    The constant is an empirical calibration value, not a derived one.
    """
    if space_size < 2:
        raise ValueError("space_size >= 2 required")
    return calibration_constant * math.log(space_size)


def worst_case_robustness_cap(n: int, calibration_constant: float) -> float:
    """Same cap evaluated at the worst-case size 2n(n!)^n."""
    return log_size_robustness_cap(generating_space_size(n), calibration_constant)


def log_genus_robustness_cap(genus: int, calibration_constant: float) -> float:
    """Probabilistic robustness cap from the genus: c * ln(1 + g).

    The 1 + g convention keeps the bound defined at genus 1; it is a
    convention of this implementation.
    """
    if genus < 1:
        raise ValueError("genus >= 1 required")
    return calibration_constant * math.log(1 + genus)
