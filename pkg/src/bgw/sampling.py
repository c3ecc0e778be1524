"""Exact simulation of BGW pairs.

Construction: draw K, the trial index of the first success in Bernoulli
trials with success probability theta/i at trial i; then

    X = min(U_1, ..., U_K),   U_i ~ Weibull(a, b1)
    Y = min(V_1, ..., V_K),   V_i ~ Weibull(a, b2)

with the same K for both coordinates.  Weibull draws use the inverse
transform (-ln U / b)^(1/a).

K is heavy-tailed (infinite mean for theta < 1), so trials are capped at
``K_CAP`` per draw; capped draws are counted and reported on the returned
sample.  The batch path draws K by inverting one uniform against the table
of sequential no-success probabilities prod_i (1 - theta/i) -- the same
trial process, collapsed -- and computes each coordinate as the minimum over
its K inverse-transform draws, using min_i (-ln u_i / b)^(1/a)
= (-ln max_i u_i / b)^(1/a) to defer the transform until after the
reduction.  All K uniforms are drawn; no distributional shortcut replaces
the minimum.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .params import BgwParams, BivariateSample

__all__ = ["K_CAP", "RngHandle", "sample_k", "sample_k_batch", "sample_pair", "sample_n"]

K_CAP = 1_000_000


@dataclass
class RngHandle:
    """Seedable, splittable random stream (PCG64 behind a SeedSequence).

    Identical seed implies identical stream.  ``spawn`` derives independent
    child streams, one per parallel replication, so reductions over workers
    stay deterministic regardless of scheduling.
    """

    seed: int | None = None
    _ss: np.random.SeedSequence = field(init=False, repr=False)
    generator: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self):
        self._ss = np.random.SeedSequence(self.seed)
        self.generator = np.random.Generator(np.random.PCG64(self._ss))

    @classmethod
    def _from_seedseq(cls, ss: np.random.SeedSequence) -> "RngHandle":
        obj = cls.__new__(cls)
        obj.seed = None
        obj._ss = ss
        obj.generator = np.random.Generator(np.random.PCG64(ss))
        return obj

    def spawn(self, n: int) -> list["RngHandle"]:
        return [self._from_seedseq(ss) for ss in self._ss.spawn(n)]


def _as_generator(rng) -> np.random.Generator:
    if isinstance(rng, RngHandle):
        return rng.generator
    if isinstance(rng, np.random.Generator):
        return rng
    raise TypeError("rng must be an RngHandle or numpy Generator")


def sample_k(theta: float, rng, cap: int = K_CAP) -> int:
    """One draw of K by literal sequential Bernoulli trials.

    Trial i succeeds with probability theta/i; returns the first success
    index, or ``cap`` if no success occurred within ``cap`` trials.
    """
    if not (0.0 < theta <= 1.0):
        raise ValueError("theta must lie in (0, 1]")
    gen = _as_generator(rng)
    for i in range(1, cap + 1):
        if gen.random() < theta / i:
            return i
    return cap


@lru_cache(maxsize=8)
def _no_success_table(theta: float, cap: int) -> np.ndarray:
    """q[k-1] = P(no success in trials 1..k) = prod_{i<=k} (1 - theta/i)."""
    i = np.arange(1, cap + 1, dtype=float)
    return np.exp(np.cumsum(np.log1p(-theta / i)))


def sample_k_batch(theta: float, n: int, rng, cap: int = K_CAP):
    """n draws of K via one uniform each against the no-success table.

    K = min{k : q_k <= U} has P(K = k) = q_{k-1} - q_k, exactly the
    sequential-trial law; draws with U below q_cap are truncated to ``cap``.
    Returns (k_array, n_truncated).
    """
    if not (0.0 < theta <= 1.0):
        raise ValueError("theta must lie in (0, 1]")
    if n < 1:
        raise ValueError("n must be >= 1")
    gen = _as_generator(rng)
    q = _no_success_table(theta, cap)
    u = gen.random(n)
    # q is decreasing; count entries q > u via searchsorted on the negated array
    k = np.searchsorted(-q, -u, side="right") + 1
    truncated = k > cap
    n_trunc = int(np.count_nonzero(truncated))
    if n_trunc:
        k[truncated] = cap
    return k.astype(np.int64), n_trunc


def sample_pair(p: BgwParams, rng, cap: int = K_CAP):
    """One (x, y) pair: a single K, then plain minima of K draws each."""
    gen = _as_generator(rng)
    k = sample_k(p.theta, gen, cap)
    x = float(np.min((-np.log(gen.random(k)) / p.b1) ** (1.0 / p.a)))
    y = float(np.min((-np.log(gen.random(k)) / p.b2) ** (1.0 / p.a)))
    return x, y


def sample_n(
    p: BgwParams,
    n: int,
    rng,
    cap: int = K_CAP,
    _chunk_draws: int = 1 << 26,
) -> BivariateSample:
    """n i.i.d. pairs; deterministic under a fixed seed.

    Draw totals are Sum_i K_i per coordinate, processed in bounded-memory
    chunks with a segmented reduction.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    gen = _as_generator(rng)
    ks, n_trunc = sample_k_batch(p.theta, n, gen, cap)
    x = np.empty(n)
    y = np.empty(n)
    ends = np.cumsum(ks)
    start = 0
    inv_a = 1.0 / p.a
    while start < n:
        base = ends[start] - ks[start]
        stop = int(np.searchsorted(ends, base + _chunk_draws, side="right"))
        stop = max(stop, start + 1)
        kk = ks[start:stop]
        total = int(ends[stop - 1] - base)
        offsets = np.zeros(kk.size, dtype=np.int64)
        np.cumsum(kk[:-1], out=offsets[1:])
        for arr, b in ((x, p.b1), (y, p.b2)):
            u = gen.random(total)
            u_max = np.maximum.reduceat(u, offsets)
            arr[start:stop] = (-np.log(u_max) / b) ** inv_a
        start = stop
    return BivariateSample(x, y, k_truncated=n_trunc)
