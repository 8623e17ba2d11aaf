"""Decay/hardness function algebra, communication requirements, and bound
tables.

The communication requirement of a market with robustness xi is the
earliest time t at which the perturbation level H(n) / D(t) drops below xi,
which is D^{-1}(H(n) / xi) for a monotone continuous decay D. Whether the
requirement stays bounded along a growing family of markets depends only on
whether H(n) keeps pace with xi_n; that limit question is replaced here by
finite-range trend reports, labeled as such.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

DECAY_FAMILIES = ("linear", "power", "logarithmic", "exponential")
HARDNESS_FAMILIES = ("constant", "log", "polynomial", "quadratic_log")

#: Relative growth of H(n)/xi_n over the sampled range above which the
#: trend is classified as growing.
_GROWTH_THRESHOLD = 1.05


@dataclass(frozen=True)
class InverseResult:
    value: float
    clamped: bool


@dataclass(frozen=True)
class DecayFunction:
    """Monotone increasing, continuous, positive decay with D(t) -> inf.

    Families (scale > 0, exponent > 0):
      linear        D(t) = scale * t
      power         D(t) = scale * t**exponent
      logarithmic   D(t) = scale * ln(1 + t)
      exponential   D(t) = scale * exp(exponent * t), infimum scale at t = 0
    """

    family: str
    scale: float = 1.0
    exponent: float = 1.0

    def __post_init__(self):
        if self.family not in DECAY_FAMILIES:
            raise ValueError(f"unknown decay family {self.family!r}")
        if self.scale <= 0 or self.exponent <= 0:
            raise ValueError("scale and exponent must be positive")

    def value(self, t: float) -> float:
        if t < 0:
            raise ValueError("decay is defined for t >= 0")
        if self.family == "linear":
            return self.scale * t
        if self.family == "power":
            return self.scale * t**self.exponent
        if self.family == "logarithmic":
            return self.scale * math.log1p(t)
        return self.scale * math.exp(self.exponent * t)

    def infimum(self) -> float:
        """Value approached as t -> 0+ (the clamp threshold for inversion)."""
        return self.scale if self.family == "exponential" else 0.0


def decay_inverse(d: DecayFunction, y: float, method: str = "closed") -> InverseResult:
    """Solve D(t) = y for t >= 0.

    Values of y at or below the infimum of D clamp to t = 0 with the flag
    set. Targets whose inverse exceeds the float range come back as inf.
    ``method="bisect"`` ignores the closed forms and solves by bracket
    doubling plus bisection to relative tolerance 1e-10; it exists to
    cross-check the closed forms.
    """
    if y <= 0:
        raise ValueError("y must be positive")
    if y <= d.infimum():
        return InverseResult(0.0, True)
    if method == "bisect":
        return InverseResult(_invert_by_bisection(d, y), False)
    try:
        if d.family == "linear":
            return InverseResult(y / d.scale, False)
        if d.family == "power":
            return InverseResult((y / d.scale) ** (1.0 / d.exponent), False)
        if d.family == "logarithmic":
            return InverseResult(math.expm1(y / d.scale), False)
        return InverseResult(math.log(y / d.scale) / d.exponent, False)
    except OverflowError:
        return InverseResult(math.inf, False)


def _invert_by_bisection(d: DecayFunction, y: float) -> float:
    lo, hi = 0.0, 1.0
    while d.value(hi) < y:
        lo = hi
        hi *= 2.0
        if hi > 1e300:
            return math.inf
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if d.value(mid) < y:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-10 * max(1.0, hi):
            break
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class HardnessFunction:
    """Nondecreasing positive hardness of preference learning.

    Families (scale > 0):
      constant       H(n) = scale
      log            H(n) = scale * ln(1 + n)
      polynomial     H(n) = scale * n**exponent
      quadratic_log  H(n) = scale * n**2 * ln(1 + n)

    The ln(1 + n) convention keeps the log families positive at n = 1.
    """

    family: str
    scale: float = 1.0
    exponent: float = 1.0

    def __post_init__(self):
        if self.family not in HARDNESS_FAMILIES:
            raise ValueError(f"unknown hardness family {self.family!r}")
        if self.scale <= 0:
            raise ValueError("scale must be positive")

    def value(self, n: int) -> float:
        if n < 1:
            raise ValueError("n >= 1 required")
        if self.family == "constant":
            return self.scale
        if self.family == "log":
            return self.scale * math.log1p(n)
        if self.family == "polynomial":
            return self.scale * float(n) ** self.exponent
        return self.scale * n * n * math.log1p(n)


def communication_requirement(
    xi: float, h: HardnessFunction, d: DecayFunction, n: int
) -> float:
    """Earliest time with perturbation level H(n)/D(t) no larger than xi.

    Infinite xi (the sentinel for markets with no comparable pairs) yields
    0, as does any xi already above H(n)/D(0+); negative times never occur
    because the inversion clamps at 0.
    """
    if xi < 1.0:
        raise ValueError("xi must be >= 1")
    if math.isinf(xi):
        return 0.0
    return decay_inverse(d, h.value(n) / xi).value


@dataclass(frozen=True)
class AdmissibilityReport:
    rows: tuple[tuple[int, float, float, float, float], ...]  # (n, xi, H, H/xi, T)
    fitted_exponent: float
    growth_factor: float
    classification: str  # "bounded" | "growing"
    caveat: str = "finite-range trend, not a limit statement"

    def to_text(self) -> str:
        lines = [f"{'n':>8} {'xi':>14} {'H(n)':>14} {'H/xi':>14} {'T':>14}"]
        for n, xi, hn, ratio, t in self.rows:
            lines.append(f"{n:>8} {xi:>14.6g} {hn:>14.6g} {ratio:>14.6g} {t:>14.6g}")
        lines.append(
            f"classification: {self.classification} "
            f"(fitted exponent {self.fitted_exponent:.4f}, "
            f"growth factor {self.growth_factor:.4g}; {self.caveat})"
        )
        return "\n".join(lines) + "\n"


def admissibility_report(
    xi_sequence: Sequence[tuple[int, float]],
    h: HardnessFunction,
    d: DecayFunction,
) -> AdmissibilityReport:
    """Trend report for H(n)/xi_n over a finite range of market sizes.

    Fits the log-log slope of the ratio against n and classifies the trend
    as growing when the ratio increases by more than 5 percent over the
    range (or the fitted exponent is clearly positive), else bounded. This
    is an honest finite-range report, not a limit computation.
    """
    if len(xi_sequence) < 3:
        raise ValueError("need at least 3 sample points")
    rows = []
    ratios = []
    ns = []
    for n, xi in sorted(xi_sequence):
        hn = h.value(n)
        ratio = 0.0 if math.isinf(xi) else hn / xi
        t = communication_requirement(xi, h, d, n)
        rows.append((n, float(xi), hn, ratio, t))
        ns.append(n)
        ratios.append(ratio)
    positive = [(n, r) for n, r in zip(ns, ratios) if r > 0]
    if len(positive) >= 2:
        log_n = np.log([n for n, _ in positive])
        log_r = np.log([r for _, r in positive])
        slope = float(np.polyfit(log_n, log_r, 1)[0])
        growth = positive[-1][1] / positive[0][1]
    else:
        slope = 0.0
        growth = 1.0
    classification = "growing" if (growth > _GROWTH_THRESHOLD or slope > 0.25) else "bounded"
    return AdmissibilityReport(tuple(rows), slope, growth, classification)


@dataclass(frozen=True)
class BoundConstants:
    """Calibration constants for the O() bounds; defaults are 1 and results
    always echo them."""

    size_constant: float = 1.0
    genus_constant: float = 1.0
    market_constant: float = 1.0


@dataclass(frozen=True)
class BoundTable:
    """Lower bounds on the communication requirement, deterministic and
    probabilistic rows, by space size, genus, and market size.

    The genus column carries the n^2 factor only in the deterministic row;
    the size and market-size columns are identical between rows.
    """

    n: int
    space_size: int
    genus: int
    constants: BoundConstants
    deterministic: tuple[float, float, float]  # (by size, by genus, by n)
    probabilistic: tuple[float, float, float]

    def to_csv(self) -> str:
        lines = [
            "requirement,by_space_size,by_genus,by_market_size,"
            "size_constant,genus_constant,market_constant"
        ]
        for name, cells in (
            ("deterministic", self.deterministic),
            ("probabilistic", self.probabilistic),
        ):
            lines.append(
                f"{name},{cells[0]:.10g},{cells[1]:.10g},{cells[2]:.10g},"
                f"{self.constants.size_constant:.10g},"
                f"{self.constants.genus_constant:.10g},"
                f"{self.constants.market_constant:.10g}"
            )
        return "\n".join(lines) + "\n"

    def to_text(self) -> str:
        head = (
            f"{'requirement':<14} {'by |X|':>14} {'by genus':>14} {'by n':>14}"
        )
        rows = [head]
        for name, cells in (
            ("deterministic", self.deterministic),
            ("probabilistic", self.probabilistic),
        ):
            rows.append(
                f"{name:<14} {cells[0]:>14.6g} {cells[1]:>14.6g} {cells[2]:>14.6g}"
            )
        rows.append(
            f"constants: size={self.constants.size_constant:g} "
            f"genus={self.constants.genus_constant:g} "
            f"market={self.constants.market_constant:g}"
        )
        return "\n".join(rows) + "\n"


def bound_table(
    n: int,
    space_size: int,
    genus: int,
    h: HardnessFunction,
    d: DecayFunction,
    constants: BoundConstants = BoundConstants(),
) -> BoundTable:
    """Six communication-requirement lower bounds from the robustness caps.

    Deterministic row: T >= D^{-1}(H(n) / (c1 ln|X|)),
    D^{-1}(H(n) / (c2 n^2 ln(1+g))), D^{-1}(H(n) / (c3 n^2 ln n)).
    Probabilistic row: identical except the genus cell drops the n^2
    factor.
    """
    if n < 2 or space_size < 2 or genus < 1:
        raise ValueError("need n >= 2, space_size >= 2, genus >= 1")
    hn = h.value(n)

    def t_for(bound: float) -> float:
        return decay_inverse(d, hn / bound).value

    size_bound = constants.size_constant * math.log(space_size)
    genus_log = math.log(1 + genus)
    market_bound = constants.market_constant * n * n * math.log(n)
    det = (
        t_for(size_bound),
        t_for(constants.genus_constant * n * n * genus_log),
        t_for(market_bound),
    )
    prob = (
        t_for(size_bound),
        t_for(constants.genus_constant * genus_log),
        t_for(market_bound),
    )
    return BoundTable(n, space_size, genus, constants, det, prob)


def parse_config(text: str) -> dict[str, dict[str, float | str]]:
    """Minimal key-value config parser with [section] headers.

    Values are parsed as int, then float, then bare/quoted string. Lines
    starting with # are comments.
    """
    sections: dict[str, dict] = {}
    current = sections.setdefault("", {})
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            current = sections.setdefault(line[1:-1].strip(), {})
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key = value")
        key, _, value = line.partition("=")
        value = value.strip().strip('"').strip("'")
        parsed: float | str
        try:
            parsed = int(value)
        except ValueError:
            try:
                parsed = float(value)
            except ValueError:
                parsed = value
        current[key.strip()] = parsed
    return sections


def functions_from_config(
    sections: dict[str, dict],
) -> tuple[HardnessFunction, DecayFunction, BoundConstants]:
    hsec = sections.get("hardness", {})
    dsec = sections.get("decay", {})
    csec = sections.get("constants", {})
    h = HardnessFunction(
        family=str(hsec.get("family", "constant")),
        scale=float(hsec.get("scale", 1.0)),
        exponent=float(hsec.get("exponent", 1.0)),
    )
    d = DecayFunction(
        family=str(dsec.get("family", "linear")),
        scale=float(dsec.get("scale", 1.0)),
        exponent=float(dsec.get("exponent", 1.0)),
    )
    constants = BoundConstants(
        size_constant=float(csec.get("size_constant", 1.0)),
        genus_constant=float(csec.get("genus_constant", 1.0)),
        market_constant=float(csec.get("market_constant", 1.0)),
    )
    return h, d, constants
