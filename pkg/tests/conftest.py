import itertools

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from matchrobust import OrdinalProfile, UtilityProfile

settings.register_profile(
    "default",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


# ---------------------------------------------------------------------------
# Brute-force oracles. These deliberately re-derive everything from the
# definitions (no calls into the library's algorithms) so that library
# results are checked against an independent route.
# ---------------------------------------------------------------------------

def oracle_is_stable(men: OrdinalProfile, women: OrdinalProfile, pairing) -> bool:
    n = men.n
    inv = [0] * n
    for m, w in enumerate(pairing):
        inv[w] = m
    for m in range(n):
        for w in range(n):
            if w == pairing[m]:
                continue
            m_prefers = men.ranks[m].index(w) < men.ranks[m].index(pairing[m])
            w_prefers = women.ranks[w].index(m) < women.ranks[w].index(inv[w])
            if m_prefers and w_prefers:
                return False
    return True


def oracle_stable_set(men: OrdinalProfile, women: OrdinalProfile):
    return {
        perm
        for perm in itertools.permutations(range(men.n))
        if oracle_is_stable(men, women, perm)
    }


def oracle_male_optimal(men: OrdinalProfile, women: OrdinalProfile):
    """Male-optimal stable pairing by definition: the stable pairing that
    every man weakly prefers to every other stable pairing."""
    stable = oracle_stable_set(men, women)
    for cand in stable:
        if all(
            men.ranks[m].index(cand[m]) <= men.ranks[m].index(other[m])
            for other in stable
            for m in range(men.n)
        ):
            return cand
    raise AssertionError("no male-optimal stable pairing found")


def oracle_female_optimal(men: OrdinalProfile, women: OrdinalProfile):
    stable = oracle_stable_set(men, women)
    for cand in stable:
        inv = [0] * men.n
        for m, w in enumerate(cand):
            inv[w] = m
        ok = True
        for other in stable:
            other_inv = [0] * men.n
            for m, w in enumerate(other):
                other_inv[w] = m
            if any(
                women.ranks[w].index(inv[w]) > women.ranks[w].index(other_inv[w])
                for w in range(men.n)
            ):
                ok = False
                break
        if ok:
            return cand
    raise AssertionError("no female-optimal stable pairing found")


def random_profile(n: int, rng: np.random.Generator) -> OrdinalProfile:
    return OrdinalProfile(n, tuple(tuple(int(v) for v in rng.permutation(n)) for _ in range(n)))


def band_utup(n: int, rng: np.random.Generator, lo=-2.0, hi=-1.0) -> UtilityProfile:
    """Random strictly negative utilities inside a band narrow enough that
    polarity always holds (row differences below any row's magnitude sum)."""
    while True:
        vals = rng.uniform(lo, hi, size=(n, n))
        flat = sorted(vals.flatten().tolist())
        if all(flat[i] < flat[i + 1] for i in range(len(flat) - 1)):
            return UtilityProfile(n, tuple(tuple(float(v) for v in row) for row in vals))


def random_nonpolarized(n: int, rng: np.random.Generator) -> UtilityProfile:
    """Rejection-sample a utility profile violating polarity."""
    from matchrobust import is_polarized

    while True:
        vals = rng.uniform(-10.0, -0.01, size=(n, n))
        u = UtilityProfile(n, tuple(tuple(float(v) for v in row) for row in vals))
        if not is_polarized(u):
            return u


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
