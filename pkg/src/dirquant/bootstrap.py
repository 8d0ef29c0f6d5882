"""Bootstrap selection of the intermediate sequence k = k(n).

Two rounds of bootstrap resamples (sizes m1 = floor(n^(1-eps)) and
m2 = floor(m1^2/n)) locate, per marginal, the k minimizing the averaged
squared deviation of the moment relation M2 = 2 M1^2. The two argmins
and an estimated convergence rate combine into the final k(n).

Resamples are drawn with replacement from the full rotated sample, then
rows with any non-positive component are dropped; a resample retaining
fewer rows than a floor is redrawn from the same stream.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import (
    NonFiniteCorrectionWarning,
    ResamplingError,
    SmallSampleWarning,
)
from .evt import log_moment, log_moment_profiles
from .parallel import ordered_map

REDRAW_ATTEMPTS = 100
DEFAULT_MIN_RETAINED = 10
# Floor below which the procedure cannot run at all: the error curve
# needs k = 2, hence at least three positive rows.
HARD_MIN_RETAINED = 3


@dataclass(frozen=True)
class KSelection:
    """Selected k with the per-marginal diagnostics that produced it."""

    k_hat: int
    k_j_m1: Optional[np.ndarray]
    k_j_m2: Optional[np.ndarray]
    pi_j: Optional[np.ndarray]
    m1: int
    m2: int
    epsilon: float
    b1: int
    seed: int
    n: int
    fallback: bool = False

    def __post_init__(self):
        if not (2 <= self.k_hat <= self.n - 1):
            raise ValueError(f"k_hat={self.k_hat} outside [2, n-1] for n={self.n}")
        for name in ("k_j_m1", "k_j_m2", "pi_j"):
            val = getattr(self, name)
            if val is not None:
                arr = np.array(val)
                arr.flags.writeable = False
                object.__setattr__(self, name, arr)

    def to_dict(self) -> dict:
        def listify(a):
            return None if a is None else [x.item() for x in a]

        return {
            "k_hat": int(self.k_hat),
            "k_j_m1": listify(self.k_j_m1),
            "k_j_m2": listify(self.k_j_m2),
            "pi_j": listify(self.pi_j),
            "m1": int(self.m1),
            "m2": int(self.m2),
            "epsilon": float(self.epsilon),
            "b1": int(self.b1),
            "seed": int(self.seed),
            "n": int(self.n),
            "fallback": bool(self.fallback),
        }


def bootstrap_error(sorted_values, k: int) -> float:
    """Squared deviation of the moment relation, (M2 - 2 M1^2)^2, at k."""
    m1 = log_moment(sorted_values, k, 1)
    m2 = log_moment(sorted_values, k, 2)
    return (m2 - 2.0 * m1 * m1) ** 2


def _error_curves(rows: np.ndarray) -> list[np.ndarray]:
    """Per-marginal error curve over k = 2..m-1 for one retained resample.

    Entry [k] is the error at k; entries 0, 1 and >= m-1 are NaN.
    """
    m, d = rows.shape
    curves = []
    for j in range(d):
        s = np.sort(rows[:, j])
        m1, m2 = log_moment_profiles(s)
        curve = np.full(m + 1, np.nan)
        curve[2:m] = ((m2 - 2.0 * m1 * m1) ** 2)[2:m]
        curves.append(curve)
    return curves


def _draw_retained(sample: np.ndarray, m: int, rng, min_retained: int) -> np.ndarray:
    n = sample.shape[0]
    for _ in range(REDRAW_ATTEMPTS):
        rows = sample[rng.integers(0, n, m)]
        keep = rows[(rows > 0).all(axis=1)]
        if keep.shape[0] >= min_retained:
            return keep
    raise ResamplingError(
        f"resamples of size {m} kept fewer than {min_retained} positive rows in "
        f"{REDRAW_ATTEMPTS} attempts; too little mass in the positive orthant"
    )


def _accumulate(sums: np.ndarray, counts: np.ndarray, curves) -> None:
    for j, curve in enumerate(curves):
        valid = ~np.isnan(curve)
        sums[j, : curve.size][valid] += curve[valid]
        counts[j, : curve.size][valid] += 1


def _argmin_per_marginal(sums: np.ndarray, counts: np.ndarray, b: int) -> np.ndarray:
    """Argmin of the averaged error; k needs backing from at least half the
    resamples to be eligible, and np.argmin breaks ties toward the smallest k."""
    quorum = max(1.0, b / 2.0)
    out = np.empty(sums.shape[0], dtype=np.int64)
    for j in range(sums.shape[0]):
        eligible = counts[j] >= quorum
        if not eligible.any():
            raise ResamplingError("no k value is backed by enough resamples")
        avg = np.where(eligible, sums[j] / np.maximum(counts[j], 1.0), np.inf)
        out[j] = int(np.argmin(avg))
    return out


def optimal_k_from_resamples(resamples) -> np.ndarray:
    """Per-marginal argmin of the error averaged over given retained resamples."""
    resamples = [np.atleast_2d(np.asarray(r, dtype=float)) for r in resamples]
    if not resamples:
        raise ValueError("need at least one resample")
    d = resamples[0].shape[1]
    size = max(r.shape[0] for r in resamples) + 2
    sums = np.zeros((d, size))
    counts = np.zeros((d, size))
    for rows in resamples:
        _accumulate(sums, counts, _error_curves(rows))
    return _argmin_per_marginal(sums, counts, len(resamples))


def optimal_k_for_size(
    rotated_sample,
    m: int,
    b: int,
    seed: int,
    stage: int = 1,
    min_retained: int = DEFAULT_MIN_RETAINED,
    workers: int = 1,
) -> np.ndarray:
    """Per-marginal optimal k from b positivity-filtered resamples of size m.

    Each resample owns the RNG stream derived from (seed, stage, index),
    so results are reproducible for any worker count.
    """
    sample = np.atleast_2d(np.asarray(rotated_sample, dtype=float))
    if b < 1:
        raise ValueError(f"need at least one resample, got b={b}")

    def one(idx: int):
        rng = np.random.default_rng([seed, stage, idx])
        rows = _draw_retained(sample, m, rng, min_retained)
        return _error_curves(rows)

    d = sample.shape[1]
    sums = np.zeros((d, m + 2))
    counts = np.zeros((d, m + 2))
    for curves in ordered_map(one, range(b), workers):
        _accumulate(sums, counts, curves)
    return _argmin_per_marginal(sums, counts, b)


def convergence_rate(k_j_m1: int, m1: int) -> float:
    """Estimated marginal convergence rate, negative for k < m1.

    Reads as log k over twice the log ratio log(k/m1); the rate is the
    exponent pi <= 0 governing how fast the optimal fraction shrinks.
    """
    if not (2 <= k_j_m1 <= m1):
        raise ValueError(f"k={k_j_m1} outside [2, m1={m1}]")
    if k_j_m1 == m1:
        raise ZeroDivisionError("k equal to m1 makes the rate undefined")
    return math.log(k_j_m1) / (2.0 * math.log(k_j_m1) - 2.0 * math.log(m1))


def _positive_fraction(sample: np.ndarray) -> float:
    return float((sample > 0).all(axis=1).mean())


def select_k(
    rotated_sample,
    epsilon: float = 0.25,
    b1: int = 1000,
    seed: int = 0,
    workers: int = 1,
) -> KSelection:
    """Full bootstrap selection of k(n) on a pre-rotated sample.

    Falls back to k = floor(sqrt(n)) with a warning for n below
    2000/2^d, where the resample sizes are too small for the two-stage
    procedure to be meaningful.
    """
    sample = np.atleast_2d(np.asarray(rotated_sample, dtype=float))
    n, d = sample.shape
    if not (0.0 < epsilon < 0.5):
        raise ValueError(f"epsilon must lie in (0, 1/2), got {epsilon!r}")
    m1 = int(math.floor(n ** (1.0 - epsilon)))
    m2 = (m1 * m1) // n
    if n < 2000 / 2**d:
        k_hat = int(np.clip(int(math.isqrt(n)), 2, n - 1))
        warnings.warn(
            f"n={n} is too small for the bootstrap selection in dimension {d}; "
            f"falling back to k = floor(sqrt(n)) = {k_hat}",
            SmallSampleWarning,
            stacklevel=2,
        )
        return KSelection(
            k_hat=k_hat, k_j_m1=None, k_j_m2=None, pi_j=None,
            m1=m1, m2=m2, epsilon=epsilon, b1=b1, seed=seed, n=n, fallback=True,
        )
    if m2 < 10:
        raise ValueError(f"m2={m2} below 10; n={n} too small for epsilon={epsilon!r}")

    # The default floor of 10 retained rows applies whenever resamples can
    # realistically reach it; demanding it when the expected retention is
    # lower would reject feasible inputs, so the floor degrades to the hard
    # minimum with a warning.
    frac = _positive_fraction(sample)
    floors = []
    for m in (m1, m2):
        floor = DEFAULT_MIN_RETAINED
        if m * frac < DEFAULT_MIN_RETAINED:
            floor = HARD_MIN_RETAINED
            warnings.warn(
                f"resamples of size {m} are expected to retain only "
                f"{m * frac:.1f} positive rows; lowering the retained-row floor "
                f"to {floor}",
                SmallSampleWarning,
                stacklevel=2,
            )
        floors.append(floor)

    k1 = optimal_k_for_size(sample, m1, b1, seed, stage=1,
                            min_retained=floors[0], workers=workers)
    k2 = optimal_k_for_size(sample, m2, b1, seed, stage=2,
                            min_retained=floors[1], workers=workers)
    pis = np.array([convergence_rate(int(k), m1) for k in k1])
    terms = np.empty(d)
    for j in range(d):
        factor = (1.0 - 1.0 / pis[j]) ** (1.0 / (2.0 * pis[j] - 1.0))
        if not np.isfinite(factor):
            warnings.warn(
                f"marginal {j}: non-finite correction factor; using 1",
                NonFiniteCorrectionWarning,
                stacklevel=2,
            )
            factor = 1.0
        terms[j] = (k1[j] ** 2 / k2[j]) * factor
    k_hat = int(np.clip(round(float(terms.mean())), 2, n - 1))
    return KSelection(
        k_hat=k_hat, k_j_m1=k1, k_j_m2=k2, pi_j=pis,
        m1=m1, m2=m2, epsilon=epsilon, b1=b1, seed=seed, n=n, fallback=False,
    )
