#!/usr/bin/env python3
"""Finite-range admissibility trends for two canonical market families.

Family A: markets realized in Euclidean space, where robustness is capped
at 3 regardless of size; logarithmic hardness already makes communication
requirements blow up, so only constant hardness is admissible.

Family B: markets whose robustness keeps pace with n^2 log n (the generic
cap from the worst-case generating-space size); matching hardness keeps
requirements flat.

Output is the aligned-text report, one block per (family, hardness).
"""

import math

from matchrobust import DecayFunction, HardnessFunction, admissibility_report

SIZES = (4, 8, 16, 32, 64, 128, 256)


def main():
    decay = DecayFunction("power", exponent=2.0)
    euclid = [(n, 3.0) for n in SIZES]
    generic = [(n, 0.8 * n * n * math.log1p(n)) for n in SIZES]

    for label, seq in (("euclidean-cap", euclid), ("n2log-cap", generic)):
        for hardness in (
            HardnessFunction("constant", scale=2.0),
            HardnessFunction("log"),
            HardnessFunction("quadratic_log"),
        ):
            rep = admissibility_report(seq, hardness, decay)
            print(f"== family={label} hardness={hardness.family} -> {rep.classification}")
            print(rep.to_text())


if __name__ == "__main__":
    main()
