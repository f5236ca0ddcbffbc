"""Seeded generators for ER, two-block SBM, and planted-clique graphs.

Randomness comes from numpy's Philox counter-based generator keyed with two
64-bit words [seed, stream]. Stream 0 supplies one uniform per node pair in
lexicographic order (the pair stream shared by every model), stream 1 the SBM
block membership, stream 2 the planted-clique node subset. Because SBM block
membership never touches the pair stream, ``gen_sbm(n, p, p, seed)`` is
bit-identical to ``gen_er(n, p, seed)``.

All generators enforce min degree >= 1 by the resample policy: an attempt
with an isolated node is discarded and regenerated with seed+1, up to
MAX_RESAMPLE_ATTEMPTS times. Full connectivity is deliberately NOT required.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .graph import Graph, _from_sorted_pairs
from .seeding import philox_rng as _rng

MAX_RESAMPLE_ATTEMPTS = 100

_PAIR_STREAM = 0
_BLOCK_STREAM = 1
_CLIQUE_STREAM = 2


class GenerationError(RuntimeError):
    """Raised when the resample policy runs out of attempts."""


@lru_cache(maxsize=8)
def _pair_index(n: int):
    """Lexicographically ordered strict-upper-triangle pair endpoints."""
    iu = np.triu_indices(n, k=1)
    return iu[0].astype(np.int64), iu[1].astype(np.int64)


def _graph_from_mask(n: int, mask: np.ndarray) -> Graph:
    lo, hi = _pair_index(n)
    return _from_sorted_pairs(n, lo[mask], hi[mask])


def _resample(seed: int, attempt_fn) -> Graph:
    """Run attempt_fn(seed+k) for k = 0..99 until min degree >= 1."""
    for k in range(MAX_RESAMPLE_ATTEMPTS):
        g = attempt_fn(seed + k)
        if g.degrees().min() >= 1:
            return g
    raise GenerationError(
        f"no graph with min degree >= 1 in {MAX_RESAMPLE_ATTEMPTS} attempts "
        f"(seed={seed}); edge probability too small?"
    )


def gen_er(n: int, p: float, seed: int) -> Graph:
    """Erdos-Renyi G(n, p): each of the n(n-1)/2 pairs is an edge w.p. p."""
    _check_prob("p", p)
    if n < 2:
        raise ValueError(f"gen_er requires n >= 2, got {n}")

    def attempt(s: int) -> Graph:
        u = _rng(s, _PAIR_STREAM).random(n * (n - 1) // 2)
        return _graph_from_mask(n, u < p)

    return _resample(seed, attempt)


def sbm_params_from(p: float, delta: float) -> tuple[float, float]:
    """(p_in, p_out) = (p + delta/2, p - delta/2)."""
    p_in, p_out = p + delta / 2.0, p - delta / 2.0
    if not (0.0 <= p_out and p_in <= 1.0):
        raise ValueError(
            f"density p={p} with delta={delta} gives probabilities outside [0, 1]"
        )
    return p_in, p_out


def gen_sbm(n: int, p_in: float, p_out: float, seed: int) -> Graph:
    """Two-block SBM with blocks of size ceil(n/2) and floor(n/2).

    Block membership is a seeded random subset (stream 1), so node labels
    carry no block information; pair edges come from the shared pair stream.
    """
    _check_prob("p_in", p_in)
    _check_prob("p_out", p_out)
    if p_in < p_out:
        raise ValueError(f"convention requires p_in >= p_out, got {p_in} < {p_out}")
    if n < 4:
        raise ValueError(f"gen_sbm requires n >= 4, got {n}")

    def attempt(s: int) -> Graph:
        block1 = _rng(s, _BLOCK_STREAM).permutation(n)[: (n + 1) // 2]
        in_block1 = np.zeros(n, dtype=bool)
        in_block1[block1] = True
        lo, hi = _pair_index(n)
        same = in_block1[lo] == in_block1[hi]
        u = _rng(s, _PAIR_STREAM).random(n * (n - 1) // 2)
        return _graph_from_mask(n, u < np.where(same, p_in, p_out))

    return _resample(seed, attempt)


def planted_clique_nodes(n: int, k: int, seed: int) -> np.ndarray:
    """The k-subset gen_planted_clique(n, p, k, seed) fully interconnects."""
    if not (2 <= k <= n):
        raise ValueError(f"clique size must satisfy 2 <= k <= n, got k={k}, n={n}")
    return np.sort(_rng(seed, _CLIQUE_STREAM).choice(n, size=k, replace=False))


def gen_planted_clique(n: int, p: float, k: int, seed: int) -> Graph:
    """ER(n, p) base graph plus a uniformly random k-subset made a clique.

    The base graph equals gen_er(n, p, seed) (same pair stream, same
    resample policy applied to the base's degrees); the subset is keyed by
    the original seed so it is reproducible independently of resampling.
    """
    _check_prob("p", p)
    if not (2 <= k <= n):
        raise ValueError(f"clique size must satisfy 2 <= k <= n, got k={k}, n={n}")
    clique = planted_clique_nodes(n, k, seed)
    ci, cj = np.triu_indices(k, k=1)
    a, b = clique[ci], clique[cj]
    # strict-upper-triangle flat index of pair (a, b), a < b
    flat = a * n - a * (a + 1) // 2 + (b - a - 1)
    lo, hi = _pair_index(n)
    for t in range(MAX_RESAMPLE_ATTEMPTS):
        u = _rng(seed + t, _PAIR_STREAM).random(n * (n - 1) // 2)
        mask = u < p
        deg = np.bincount(lo[mask], minlength=n) + np.bincount(hi[mask], minlength=n)
        if deg.min() >= 1:
            mask[flat] = True
            return _graph_from_mask(n, mask)
    raise GenerationError(
        f"no base graph with min degree >= 1 in {MAX_RESAMPLE_ATTEMPTS} attempts "
        f"(seed={seed}); edge probability too small?"
    )


def _check_prob(name: str, value: float) -> None:
    if not (0.0 <= value <= 1.0):
        raise ValueError(f"{name} must be in [0, 1], got {value}")


@dataclass(frozen=True)
class ModelParams:
    """Parameters of one generative model variant.

    variant "er" uses (n, p); "sbm" uses (n, p_in, p_out); "clique" uses
    (n, p, k).
    """

    variant: str
    n: int
    p: float | None = None
    p_in: float | None = None
    p_out: float | None = None
    k: int | None = None

    def __post_init__(self):
        if self.variant not in ("er", "sbm", "clique"):
            raise ValueError(f"unknown model variant {self.variant!r}")
        if self.variant == "er":
            if self.p is None:
                raise ValueError("er model requires p")
            _check_prob("p", self.p)
        elif self.variant == "sbm":
            if self.p_in is None or self.p_out is None:
                raise ValueError("sbm model requires p_in and p_out")
            _check_prob("p_in", self.p_in)
            _check_prob("p_out", self.p_out)
            if self.p_in < self.p_out:
                raise ValueError("convention requires p_in >= p_out")
        else:
            if self.p is None or self.k is None:
                raise ValueError("clique model requires p and k")
            _check_prob("p", self.p)
            if not (2 <= self.k <= self.n):
                raise ValueError("clique size must satisfy 2 <= k <= n")

    def generate(self, seed: int) -> Graph:
        if self.variant == "er":
            return gen_er(self.n, self.p, seed)
        if self.variant == "sbm":
            return gen_sbm(self.n, self.p_in, self.p_out, seed)
        return gen_planted_clique(self.n, self.p, self.k, seed)
