"""Built-in benchmark distributions and their published reference delays.

Three 10^4-peer populations with unit average upload: homogeneous (H0), three
classes spanning a 10x range (H1), and three classes spanning a 100x range
(H2). The reference single-chunk delays are the values the reproduce command
compares against; stream-delay references exist only for the heterogeneous
rows and are informational (the bound formula behind them is not pinned down,
so they are printed next to the computed bounds without being asserted).
"""

from __future__ import annotations

from fractions import Fraction

from .model import ClassSpec

REFERENCE_N = 10_000
REFERENCE_N0 = 5
REFERENCE_C = 4

DISTRIBUTIONS: dict[str, ClassSpec] = {
    "H0": ClassSpec(((1.0, 1.0),)),
    "H1": ClassSpec(
        (
            (Fraction(1, 3), 2.22),
            (Fraction(1, 3), 0.56),
            (Fraction(1, 3), 0.222),
        )
    ),
    "H2": ClassSpec(
        (
            (0.30, 2.92),
            (0.40, 0.292),
            (0.30, 0.0292),
        )
    ),
}

# model key -> reference D(N); "m" = pooled, "1" = single-sender, "c" = 4-way parallel.
SINGLE_CHUNK_REFERENCE: dict[str, dict[str, float]] = {
    "H0": {"m": 7.70, "1": 11.0, "c": 20.0},
    "H1": {"m": 3.72, "1": 5.40, "c": 9.00},
    "H2": {"m": 2.70, "1": 4.11, "c": 6.86},
}

# (distribution, model, rate) -> published stream delay, informational only.
STREAM_REFERENCE: dict[tuple[str, str, float], float] = {
    ("H1", "m", 0.9): 8.16,
    ("H1", "m", 0.5): 9.72,
    ("H1", "1", 0.9): 16.51,
    ("H1", "1", 0.5): 11.40,
    ("H1", "c", 0.9): 53.44,
    ("H1", "c", 0.5): 19.0,
    ("H2", "m", 0.9): 6.04,
    ("H2", "m", 0.5): 6.96,
    ("H2", "1", 0.9): 14.88,
    ("H2", "1", 0.5): 10.11,
    ("H2", "c", 0.9): 51.30,
    ("H2", "c", 0.5): 16.86,
}

STREAM_RATES = (0.9, 0.5)
