"""Utility profiles, multiplicative perturbations, and market profiles.

A utility profile assigns each (agent, alternative) pair a nonpositive
number. A market profile is a rule mapping every ordinal profile R to a
utility profile whose induced ranking is R again; two such rules, one per
side, form a matching market.

Two representations are supported. Rank-based profiles depend only on rank
position and therefore cover all (n!)^n ordinal profiles implicitly, which
keeps robustness computations tractable for any n. Extensional profiles
store an explicit table and are only practical for n <= 3 (full coverage is
(n!)^n entries).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Mapping, Sequence

import numpy as np

from .ordinal import OrdinalProfile, all_profiles, ordinal_from_utility


@dataclass(frozen=True)
class UtilityProfile:
    """n x n matrix; entry (a, x) is agent a's utility for alternative x, <= 0."""

    n: int
    values: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        object.__setattr__(
            self, "values", tuple(tuple(float(v) for v in row) for row in self.values)
        )
        if self.n < 1:
            raise ValueError("utility profile needs n >= 1")
        if len(self.values) != self.n or any(len(row) != self.n for row in self.values):
            raise ValueError("values must be an n x n matrix")
        for a, row in enumerate(self.values):
            for x, v in enumerate(row):
                if v > 0:
                    raise ValueError(f"utility ({a},{x}) = {v} is positive")

    def to_json_dict(self) -> dict:
        return {"n": self.n, "values": [list(row) for row in self.values]}

    @classmethod
    def from_json_dict(cls, data: dict) -> "UtilityProfile":
        values = tuple(tuple(row) for row in data["values"])
        return cls(n=int(data.get("n", len(values))), values=values)


@dataclass(frozen=True)
class Perturbation:
    """n x n matrix of multiplicative factors, every entry >= 1."""

    n: int
    factors: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        object.__setattr__(
            self, "factors", tuple(tuple(float(v) for v in row) for row in self.factors)
        )
        if len(self.factors) != self.n or any(len(row) != self.n for row in self.factors):
            raise ValueError("factors must be an n x n matrix")
        for a, row in enumerate(self.factors):
            for x, v in enumerate(row):
                if v < 1.0:
                    raise ValueError(f"factor ({a},{x}) = {v} is below 1")

    @classmethod
    def ones(cls, n: int) -> "Perturbation":
        return cls(n, tuple(tuple(1.0 for _ in range(n)) for _ in range(n)))

    @classmethod
    def single_entry(cls, n: int, agent: int, alternative: int, factor: float) -> "Perturbation":
        rows = [[1.0] * n for _ in range(n)]
        rows[agent][alternative] = float(factor)
        return cls(n, tuple(tuple(r) for r in rows))

    def level(self) -> float:
        return max(max(row) for row in self.factors)

    def to_json_dict(self) -> dict:
        return {"n": self.n, "factors": [list(row) for row in self.factors]}


def apply_perturbation(delta: Perturbation, u: UtilityProfile) -> UtilityProfile:
    """Entrywise product. Never raises any utility; zeros stay zero."""
    if delta.n != u.n:
        raise ValueError(f"size mismatch: perturbation n={delta.n}, utilities n={u.n}")
    values = tuple(
        tuple(f * v for f, v in zip(frow, vrow))
        for frow, vrow in zip(delta.factors, u.values)
    )
    return UtilityProfile(u.n, values)


class MarketProfile:
    """Rule mapping ordinal profiles to consistent utility profiles."""

    n: int
    rank_symmetric: bool

    def utilities(self, profile: OrdinalProfile) -> UtilityProfile:
        raise NotImplementedError

    def representable_profiles(self) -> Iterator[OrdinalProfile]:
        raise NotImplementedError


class RankBasedProfile(MarketProfile):
    """Utility depends only on rank position, identically for every agent.

    ``rank_utilities[i]`` is the utility for an agent's i-th ranked
    alternative; the sequence must be strictly decreasing and nonpositive so
    that the induced ranking always recovers the input profile. Because the
    multiset of utility ratios is identical at every ordinal profile, any
    minimum over all profiles collapses to a single representative.
    """

    rank_symmetric = True

    def __init__(self, n: int, rank_utilities: Sequence[float]):
        if n < 1:
            raise ValueError("n >= 1 required")
        ru = tuple(float(v) for v in rank_utilities)
        if len(ru) != n:
            raise ValueError("need one utility per rank")
        if any(v > 0 for v in ru):
            raise ValueError("rank utilities must be nonpositive")
        if any(ru[i] <= ru[i + 1] for i in range(n - 1)):
            raise ValueError("rank utilities must be strictly decreasing")
        self.n = n
        self.rank_utilities = ru

    def utilities(self, profile: OrdinalProfile) -> UtilityProfile:
        if profile.n != self.n:
            raise ValueError("size mismatch")
        rows = []
        for a in range(self.n):
            row = [0.0] * self.n
            for pos, x in enumerate(profile.ranks[a]):
                row[x] = self.rank_utilities[pos]
            rows.append(tuple(row))
        return UtilityProfile(self.n, tuple(rows))

    def representable_profiles(self) -> Iterator[OrdinalProfile]:
        return all_profiles(self.n)

    def representative_profile(self) -> OrdinalProfile:
        return OrdinalProfile(self.n, tuple(tuple(range(self.n)) for _ in range(self.n)))


class ExtensionalProfile(MarketProfile):
    """Explicit ordinal-profile -> utility-profile table.

    Every entry is checked for consistency at construction: the utilities
    stored for R must induce exactly R.
    """

    rank_symmetric = False

    def __init__(self, n: int, table: Mapping[OrdinalProfile, UtilityProfile]):
        if n < 1:
            raise ValueError("n >= 1 required")
        if not table:
            raise ValueError("empty table")
        self.n = n
        self.table = dict(table)
        for r, u in self.table.items():
            if r.n != n or u.n != n:
                raise ValueError("table entry size mismatch")
            if ordinal_from_utility(u) != r:
                raise ValueError(f"inconsistent table entry: utilities do not induce {r.ranks}")

    def utilities(self, profile: OrdinalProfile) -> UtilityProfile:
        try:
            return self.table[profile]
        except KeyError:
            raise ValueError("profile not represented by this extensional market") from None

    def representable_profiles(self) -> Iterator[OrdinalProfile]:
        return iter(self.table.keys())


@dataclass(frozen=True)
class MatchingMarket:
    """Two market profiles, one for each side."""

    men: MarketProfile
    women: MarketProfile

    def __post_init__(self):
        if self.men.n != self.women.n:
            raise ValueError("sides disagree on n")

    @property
    def n(self) -> int:
        return self.men.n

    def side(self, name: str) -> MarketProfile:
        return self.men if name == "men" else self.women


def geometric_market(n: int, base: float) -> MatchingMarket:
    """Rank-based market with consecutive utility ratio ``base`` on both sides."""
    if base <= 1:
        raise ValueError("base must exceed 1")
    ru = tuple(-(base**i) for i in range(n))
    return MatchingMarket(RankBasedProfile(n, ru), RankBasedProfile(n, ru))


def _random_strict_rows(
    n: int, rng: np.random.Generator, lo: float, hi: float
) -> list[list[float]]:
    """Per-agent strictly decreasing utility draws in [lo, hi], lo < hi <= 0."""
    rows = []
    for _ in range(n):
        while True:
            draws = sorted(float(v) for v in rng.uniform(lo, hi, size=n))
            if all(draws[i] < draws[i + 1] for i in range(n - 1)):
                rows.append(draws[::-1])  # best (closest to zero) first
                break
    return rows


def random_extensional_profile(
    n: int, rng: np.random.Generator, lo: float = -10.0, hi: float = -0.1
) -> ExtensionalProfile:
    """Random fully-covered extensional profile; practical for n <= 3 only."""
    table = {}
    for r in all_profiles(n):
        rows = _random_strict_rows(n, rng, lo, hi)
        values = []
        for a in range(n):
            row = [0.0] * n
            for pos, x in enumerate(r.ranks[a]):
                row[x] = rows[a][pos]
            values.append(tuple(row))
        table[r] = UtilityProfile(n, tuple(values))
    return ExtensionalProfile(n, table)


def random_extensional_market(
    n: int, rng: np.random.Generator, lo: float = -10.0, hi: float = -0.1
) -> MatchingMarket:
    return MatchingMarket(
        random_extensional_profile(n, rng, lo, hi),
        random_extensional_profile(n, rng, lo, hi),
    )
