"""Robustness of matching markets to multiplicative utility perturbation.

The central quantity is the supremal factor by which every utility profile
of a market can be scaled entrywise (factors >= 1, never improving any
utility) while both deferred-acceptance outcomes stay fixed for every pair
of ordinal profiles. It equals a double minimum of utility ratios: over
ordinal profiles, and over each agent's consecutive-rank utility pairs on
both sides. This module computes that minimum directly, cross-checks it
with an independent bisection search that perturbs, re-extracts ordinals
and reruns deferred acceptance, and provides the probabilistic spike
construction that separates deterministic from probabilistic robustness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .markets import (
    MarketProfile,
    MatchingMarket,
    Perturbation,
    RankBasedProfile,
    UtilityProfile,
    apply_perturbation,
)
from .ordinal import (
    OrdinalProfile,
    StablePair,
    TiePolicy,
    all_profiles,
    distinguishing_profile,
    ordinal_from_utility_flagged,
    phi,
    uniform_profile,
)
from .seeding import rng_for

EXHAUSTIVE_PROFILE_CAP = 4


class DivisionByZeroUtility(ZeroDivisionError):
    """A zero utility appeared in a ratio denominator."""

    def __init__(self, side: str, profile: OrdinalProfile, agent: int, alternative: int):
        super().__init__(
            f"zero utility in denominator: side={side}, agent={agent}, "
            f"alternative={alternative}"
        )
        self.side = side
        self.profile = profile
        self.agent = agent
        self.alternative = alternative


def _resolve_profiles(side: MarketProfile, profile_set) -> Iterable[OrdinalProfile]:
    """Materialize the ordinal profiles to scan for one market side.

    ``"auto"`` collapses rank-symmetric sides to a single representative
    profile (the ratio multiset is identical at every profile) and uses the
    stored table for extensional sides. ``"exhaustive"`` enumerates all
    (n!)^n profiles and is guarded against combinatorial blowup.
    """
    if profile_set == "auto":
        if side.rank_symmetric:
            return [side.representative_profile()]
        return list(side.representable_profiles())
    if profile_set == "exhaustive":
        if side.n > EXHAUSTIVE_PROFILE_CAP:
            raise ValueError(
                f"exhaustive profile enumeration refused for n={side.n} > "
                f"{EXHAUSTIVE_PROFILE_CAP}"
            )
        return all_profiles(side.n)
    return list(profile_set)


def _sides(market: MatchingMarket, profile_set):
    return (
        ("men", market.men, _resolve_profiles(market.men, profile_set)),
        ("women", market.women, _resolve_profiles(market.women, profile_set)),
    )


def is_c_robust(market: MatchingMarket, c: float, profile_set="auto") -> bool:
    """Strict ratio condition: for every profile and every agent, scaling the
    utility of a preferred alternative by ``c`` keeps it strictly above the
    utility of everything ranked below it."""
    if c < 1.0:
        raise ValueError("c must be >= 1")
    n = market.n
    for _name, side, profiles in _sides(market, profile_set):
        for r in profiles:
            u = side.utilities(r)
            for a in range(n):
                row = u.values[a]
                ranks = r.ranks[a]
                for i in range(n - 1):
                    if not c * row[ranks[i]] > row[ranks[i + 1]]:
                        return False
    return True


def robustness(market: MatchingMarket, profile_set="auto") -> float:
    """The double minimum of consecutive utility ratios over both sides.

    Returns ``inf`` when no comparable pair exists (n = 1, vacuous minimum).
    Raises :class:`DivisionByZeroUtility` when a zero utility would land in
    a denominator; the offending profile, agent and alternative ride along
    on the exception.
    """
    n = market.n
    best = math.inf
    for name, side, profiles in _sides(market, profile_set):
        for r in profiles:
            u = side.utilities(r)
            for a in range(n):
                row = u.values[a]
                ranks = r.ranks[a]
                for i in range(n - 1):
                    denom = row[ranks[i]]
                    if denom == 0.0:
                        raise DivisionByZeroUtility(name, r, a, ranks[i])
                    ratio = row[ranks[i + 1]] / denom
                    if ratio < best:
                        best = ratio
    return best


@dataclass(frozen=True)
class AdversarialWitness:
    """A verified break of robustness at some level c.

    ``perturbation`` is a single-entry matrix with one factor equal to c.
    Applying it to the utilities at ``profile`` changes the extracted
    ordinal profile to ``perturbed_profile``; at ``distinguishing`` on the
    opposite side the deferred-acceptance pairs differ, which is verified
    before the witness is returned.
    """

    side: str
    profile: OrdinalProfile
    perturbation: Perturbation
    perturbed_profile: OrdinalProfile
    distinguishing: OrdinalProfile
    original_pair: StablePair
    perturbed_pair: StablePair
    tie_created: bool


def _adjacent_swap(r: OrdinalProfile, agent: int, position: int) -> OrdinalProfile:
    rows = [list(row) for row in r.ranks]
    rows[agent][position], rows[agent][position + 1] = (
        rows[agent][position + 1],
        rows[agent][position],
    )
    return OrdinalProfile(r.n, tuple(tuple(row) for row in rows))


def _build_witness(
    side_name: str,
    r: OrdinalProfile,
    u: UtilityProfile,
    agent: int,
    position: int,
    c: float,
) -> AdversarialWitness:
    n = r.n
    alt = r.ranks[agent][position]
    delta = Perturbation.single_entry(n, agent, alt, c)
    perturbed = apply_perturbation(delta, u)
    r_tilde, had_ties = ordinal_from_utility_flagged(perturbed, TiePolicy.INDEX)
    if r_tilde == r:
        # The perturbation created an exact tie that index tie-breaking undid.
        # Ties count as a preference change, so resolve the tie against the
        # perturbed entry to exhibit the adjacent flip it licenses.
        r_tilde = _adjacent_swap(r, agent, position)
        had_ties = True
    other = distinguishing_profile(r, r_tilde)
    if side_name == "men":
        original = phi(r, other)
        changed = phi(r_tilde, other)
    else:
        original = phi(other, r)
        changed = phi(other, r_tilde)
    if original == changed:
        raise RuntimeError("witness verification failed; this is a bug")
    return AdversarialWitness(
        side=side_name,
        profile=r,
        perturbation=delta,
        perturbed_profile=r_tilde,
        distinguishing=other,
        original_pair=original,
        perturbed_pair=changed,
        tie_created=had_ties,
    )


def adversarial_witness(
    market: MatchingMarket, c: float, profile_set="auto"
) -> AdversarialWitness | None:
    """Search for a single-entry perturbation at level ``c`` that demonstrably
    changes a deferred-acceptance outcome.

    Only single-entry extremal perturbations are searched: if any
    perturbation with factors <= c flips a comparison, then setting just the
    flipped entry's factor to c flips it too (scaling one utility can only
    sink it; the others were not raised). Returns None when nothing in the
    searched profile set breaks, which for an exhaustive set means the
    market is c-robust.
    """
    if c < 1.0:
        raise ValueError("c must be >= 1")
    n = market.n
    for name, side, profiles in _sides(market, profile_set):
        for r in profiles:
            u = side.utilities(r)
            for a in range(n):
                row = u.values[a]
                ranks = r.ranks[a]
                for i in range(n - 1):
                    if c * row[ranks[i]] <= row[ranks[i + 1]]:
                        return _build_witness(name, r, u, a, i, c)
    return None


def _ordinal_breaks(u: UtilityProfile, r: OrdinalProfile, agent: int, alt: int, c: float) -> bool:
    """Apply a single-entry perturbation and re-extract the agent's ranking.

    Deliberately avoids ratio arithmetic: the perturbed row is sorted and
    compared against the original ranking, with exact ties counting as a
    change. This keeps the bisection search independent of the closed-form
    ratio minimum it is used to cross-check.
    """
    n = u.n
    row = list(u.values[agent])
    row[alt] *= c
    order = sorted(range(n), key=lambda x: (-row[x], x))
    if tuple(order) != r.ranks[agent]:
        return True
    return any(row[order[i]] == row[order[i + 1]] for i in range(n - 1))


def _breakable(market: MatchingMarket, c: float, sides) -> bool:
    n = market.n
    for name, side, profiles in sides:
        for r in profiles:
            u = side.utilities(r)
            for a in range(n):
                for i in range(n):
                    alt = r.ranks[a][i]
                    if _ordinal_breaks(u, r, a, alt, c):
                        # Confirm through deferred acceptance that the ordinal
                        # change really moves a stable pair.
                        _build_witness(name, r, u, a, min(i, n - 2), c)
                        return True
    return False


def robustness_by_search(
    market: MatchingMarket,
    lo: float = 1.0,
    hi: float | None = None,
    tol: float = 1e-6,
    profile_set="auto",
) -> float:
    """Bisection oracle for :func:`robustness`.

    At each candidate level the search applies every single-entry extremal
    perturbation on both sides and every scanned profile, re-extracts the
    ordinal profile and, on any change, verifies through a distinguishing
    opposite-side profile that the deferred-acceptance pair moves. The
    bracket is expanded upward automatically if ``hi`` is not supplied or
    does not break.
    """
    n = market.n
    if n == 1:
        return math.inf
    sides = _sides(market, profile_set)
    # Materialize so the candidate lists survive repeated scans.
    sides = tuple((name, side, list(profiles)) for name, side, profiles in sides)
    lo = max(1.0, lo)
    if _breakable(market, lo, sides):
        return lo
    if hi is None:
        hi = max(2.0, 2.0 * lo)
    while not _breakable(market, hi, sides):
        hi *= 2.0
        if hi > 2.0**80:
            return math.inf
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _breakable(market, mid, sides):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def sufficient_robustness_level(n: int, c: float) -> float:
    """Deterministic robustness level sufficient for probabilistic c-robustness:
    2n(n-1)(c-1) + 1."""
    if n < 1:
        raise ValueError("n >= 1 required")
    if c < 1.0:
        raise ValueError("c must be >= 1")
    return 2.0 * n * (n - 1) * (c - 1.0) + 1.0


def critical_consecutive_ratio(n: int, c: float, eps: float) -> float:
    """Consecutive utility ratio of the critical market: 2n(n-1)((1+eps/2)c-1)+1."""
    return 2.0 * n * (n - 1) * ((1.0 + eps / 2.0) * c - 1.0) + 1.0


def spike_factor(n: int, c: float, eps: float) -> float:
    """Spike factor of the kill distribution: 2n(n-1)((1+eps)c-1)+1."""
    return 2.0 * n * (n - 1) * ((1.0 + eps) * c - 1.0) + 1.0


def critical_market(n: int, c: float, eps: float) -> MatchingMarket:
    """Rank-based market whose every consecutive utility ratio equals
    ``critical_consecutive_ratio(n, c, eps)`` on both sides, top utility -1.

    The ratio strictly exceeds ``sufficient_robustness_level(n, c)``, so the market is
    robust at that level, yet a single random spike of size
    ``spike_factor(n, c, eps)`` placed at a uniform (agent, rank) slot
    always flips one adjacent comparison.
    """
    if n < 2:
        raise ValueError("n >= 2 required")
    if c < 1.0:
        raise ValueError("c must be >= 1")
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    ratio = critical_consecutive_ratio(n, c, eps)
    ru = tuple(-(ratio**i) for i in range(n))
    return MatchingMarket(RankBasedProfile(n, ru), RankBasedProfile(n, ru))


@dataclass(frozen=True)
class PerturbationSample:
    """One joint draw: both ordinal profiles and both factor matrices."""

    men_profile: OrdinalProfile
    women_profile: OrdinalProfile
    men_factors: Perturbation
    women_factors: Perturbation


class AllOnesSampler:
    """Uniform random profiles, identity factors. Level 1."""

    def __init__(self, n: int):
        self.n = n
        self.level = 1.0

    def sample(self, rng: np.random.Generator) -> PerturbationSample:
        ones = Perturbation.ones(self.n)
        return PerturbationSample(
            uniform_profile(self.n, rng), uniform_profile(self.n, rng), ones, ones
        )


class IidUniformFactorSampler:
    """Independent factors uniform on [1, level]; profiles uniform.

    All factors are bounded by ``level`` almost surely, so every draw is an
    ordinary deterministic perturbation at that level and per-entry means
    land at (1 + level) / 2 <= level.
    """

    def __init__(self, n: int, level: float):
        if level < 1.0:
            raise ValueError("level must be >= 1")
        self.n = n
        self.level = level

    def _factors(self, rng) -> Perturbation:
        mat = rng.uniform(1.0, self.level, size=(self.n, self.n))
        return Perturbation(self.n, tuple(tuple(float(v) for v in row) for row in mat))

    def sample(self, rng: np.random.Generator) -> PerturbationSample:
        return PerturbationSample(
            uniform_profile(self.n, rng),
            uniform_profile(self.n, rng),
            self._factors(rng),
            self._factors(rng),
        )


class CriticalSpikeSampler:
    """Joint kill distribution for the critical market.

    Each draw picks one (agent, rank) slot uniformly among the 2n(n-1)
    non-last slots across both sides, samples the spiked side's ordinal
    profile uniformly, and sets exactly that slot's factor to
    ``spike_factor(n, c, eps)`` with every other factor 1. Last-rank
    slots are never spiked (a factor can only lower a utility, and the last
    ranked alternative has nowhere to fall). The opposite side's profile is
    then the distinguishing profile for the pre- and post-spike ordinals,
    so the stable pair changes in every draw, while each non-last slot's
    factor has expectation exactly (1 + eps) * c.
    """

    def __init__(self, market: MatchingMarket, n: int, c: float, eps: float):
        reference = critical_market(n, c, eps)
        for side_name in ("men", "women"):
            side = market.side(side_name)
            ref = reference.side(side_name)
            if not isinstance(side, RankBasedProfile):
                raise ValueError("market is not in critical (rank-based) form")
            if side.n != n or len(side.rank_utilities) != n:
                raise ValueError("market size does not match")
            for got, want in zip(side.rank_utilities, ref.rank_utilities):
                if not math.isclose(got, want, rel_tol=1e-9):
                    raise ValueError("market utilities do not match the critical form")
        self.market = market
        self.n = n
        self.c = c
        self.eps = eps
        self.spike = spike_factor(n, c, eps)
        self.level = (1.0 + eps) * c

    def sample(self, rng: np.random.Generator) -> PerturbationSample:
        n = self.n
        a_star = int(rng.integers(0, 2 * n))
        i_star = int(rng.integers(0, n - 1))
        agent = a_star % n
        side_name = "men" if a_star < n else "women"

        r = uniform_profile(n, rng)
        alt = r.ranks[agent][i_star]
        delta = Perturbation.single_entry(n, agent, alt, self.spike)
        perturbed = apply_perturbation(delta, self.market.side(side_name).utilities(r))
        r_tilde, had_ties = ordinal_from_utility_flagged(perturbed, TiePolicy.INDEX)
        # The spike lies strictly between the consecutive ratio and its
        # square, so the extraction is tie-free and moves the spiked
        # alternative down exactly one position.
        assert not had_ties and r_tilde != r
        other = distinguishing_profile(r, r_tilde)

        ones = Perturbation.ones(n)
        if side_name == "men":
            return PerturbationSample(r, other, delta, ones)
        return PerturbationSample(other, r, ones, delta)


def preservation_probability(
    market: MatchingMarket, sampler, trials: int, seed: int
) -> float:
    """Monte Carlo estimate of the probability that perturbation preserves
    both deferred-acceptance outcomes.

    Each trial draws a joint sample, applies the factors to the true
    utilities, re-extracts ordinal profiles (index tie policy; any tie
    counts as non-preservation) and compares the stable pair before and
    after. Trials use split seeds, so the estimate is independent of
    execution order.
    """
    if trials < 1:
        raise ValueError("trials >= 1 required")
    preserved = 0
    for t in range(trials):
        rng = rng_for(seed, t)
        s = sampler.sample(rng)
        true_pair = phi(s.men_profile, s.women_profile)
        um = apply_perturbation(s.men_factors, market.men.utilities(s.men_profile))
        uw = apply_perturbation(s.women_factors, market.women.utilities(s.women_profile))
        rm, ties_m = ordinal_from_utility_flagged(um, TiePolicy.INDEX)
        rw, ties_w = ordinal_from_utility_flagged(uw, TiePolicy.INDEX)
        if ties_m or ties_w:
            continue
        if phi(rm, rw) == true_pair:
            preserved += 1
    return preserved / trials


def rank_slot_factor_stats(sampler, draws: int, seed: int):
    """Per-slot empirical factor means and standard errors.

    Slots are (agent, rank) positions: rows 0..n-1 are the men's side, rows
    n..2n-1 the women's side, columns the non-last rank positions 0..n-2.
    The factor observed at a slot in one draw is the multiplier applied to
    the alternative that the slot's agent ranks at that position under the
    drawn profile.
    """
    n = sampler.n
    sums = np.zeros((2 * n, n - 1))
    sumsq = np.zeros((2 * n, n - 1))
    for t in range(draws):
        rng = rng_for(seed, t)
        s = sampler.sample(rng)
        for a in range(n):
            for i in range(n - 1):
                f_m = s.men_factors.factors[a][s.men_profile.ranks[a][i]]
                f_w = s.women_factors.factors[a][s.women_profile.ranks[a][i]]
                sums[a, i] += f_m
                sumsq[a, i] += f_m * f_m
                sums[n + a, i] += f_w
                sumsq[n + a, i] += f_w * f_w
    means = sums / draws
    variances = np.maximum(sumsq / draws - means**2, 0.0)
    std_errs = np.sqrt(variances / draws)
    return means, std_errs
