"""Randomized winner determination by color coding.

Each pass assigns every ad one of K colors, uniformly over the colorings
that use all K colors, and solves the restricted problem where the chosen
allocation must pick exactly one ad per color.  That restriction shrinks
the search to a subset DP over colors, 2^K states instead of K! orderings.
A pass returns the welfare of a feasible allocation, so it never
overshoots; it matches the optimum whenever the coloring happens to give
the K ads of an optimal allocation distinct colors.  Repeating R
independent passes misses with probability at most (1 - e^-K)^R, about 1/2
at the default R = ceil(e^K * ln 2).
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .model import Allocation, AuctionError, AuctionInstance

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    _HAVE_NUMBA = False

__all__ = [
    "Coloring",
    "NoColoringsError",
    "ColorPassResult",
    "ColoredResult",
    "default_iterations",
    "miss_probability_bound",
    "draw_coloring",
    "draw_colorings",
    "colored_pass",
    "colored_ads",
]

Coloring = tuple[int, ...]


class NoColoringsError(AuctionError):
    """colored_ads was asked to run zero passes."""


@dataclass(frozen=True)
class ColorPassResult:
    """Best allocation consistent with one coloring."""

    value: float
    alloc: Allocation
    coloring: Coloring


@dataclass(frozen=True)
class ColoredResult:
    """Best pass over a seeded sequence of colorings.

    ``iteration`` is the index of the winning pass; ties go to the lowest
    index.  ``iterations_run`` can fall short of the request when a time
    budget interrupts between batches.
    """

    value: float
    alloc: Allocation
    coloring: Coloring
    iteration: int
    iterations_run: int


def default_iterations(num_slots: int) -> int:
    """Pass count bringing the miss probability down to about 1/2."""
    return math.ceil(math.exp(num_slots) * math.log(2))


def miss_probability_bound(num_slots: int, iterations: int) -> float:
    """Upper bound on the probability that no pass saw an optimal set."""
    return (1.0 - math.exp(-num_slots)) ** iterations


@lru_cache(maxsize=None)
def _surjection_table(num_ads: int, num_colors: int) -> tuple[tuple[int, ...], ...]:
    """A[n][u]: colorings of n ads where u marked colors must all appear.

    Inclusion-exclusion over the marked colors that stay absent.  Exact
    integers; only used for modest n (larger draws go through rejection),
    so the bigint-to-float ratios below stay in range.
    """
    k = num_colors
    table = []
    for n in range(num_ads + 1):
        row = []
        for u in range(k + 1):
            total = sum(
                (-1) ** j * math.comb(u, j) * (k - j) ** n for j in range(u + 1)
            )
            row.append(total)
        table.append(tuple(row))
    return tuple(table)


def draw_coloring(num_ads: int, num_colors: int, rng: np.random.Generator) -> np.ndarray:
    """One coloring, uniform over those using every color at least once.

    Small instances are sampled ad by ad with exact conditional
    probabilities from the surjection counts; once n is comfortably above
    the coupon-collector regime, plain rejection is cheaper and draws from
    the same distribution.
    """
    if num_colors < 1:
        raise ValueError("need at least one color")
    if num_ads < num_colors:
        raise ValueError(
            f"cannot color {num_ads} ads onto {num_colors} colors surjectively"
        )

    # past the coupon-collector regime rejection rarely loops
    if num_ads >= 3 * num_colors + 8:
        for _ in range(100):
            colors = rng.integers(1, num_colors + 1, size=num_ads)
            if len(np.unique(colors)) == num_colors:
                return colors.astype(np.int64)
        # astronomically unlikely here; fall through to the exact sampler

    table = _surjection_table(num_ads, num_colors)
    unused = list(range(1, num_colors + 1))
    used: list[int] = []
    colors = np.empty(num_ads, dtype=np.int64)
    for pos in range(num_ads):
        n = num_ads - pos
        u = len(unused)
        p_new = u * table[n - 1][u - 1] / table[n][u] if u else 0.0
        if rng.random() < p_new:
            pick = int(rng.integers(0, u))
            color = unused.pop(pick)
            used.append(color)
        else:
            color = used[int(rng.integers(0, len(used)))]
        colors[pos] = color
    return colors


@lru_cache(maxsize=None)
def _new_color_probabilities(num_ads: int, num_colors: int) -> np.ndarray:
    """P[i, s]: chance ad i gets a fresh color when s colors are in use.

    Same conditional probabilities as draw_coloring, tabulated as floats.
    States with more colors missing than ads left are unreachable; they
    get 1.0 so vectorized gathers stay finite.
    """
    table = _surjection_table(num_ads, num_colors)
    k = num_colors
    probs = np.zeros((num_ads, k + 1), dtype=np.float64)
    for i in range(num_ads):
        m = num_ads - i
        for s in range(k + 1):
            u = k - s
            if u == 0:
                probs[i, s] = 0.0
            elif u > m:
                probs[i, s] = 1.0
            else:
                probs[i, s] = u * table[m - 1][u - 1] / table[m][u]
    return probs


def _draw_colorings_chain(
    num_ads: int, num_colors: int, count: int, rng: np.random.Generator
) -> np.ndarray:
    """Vectorized conditional-chain sampler; one rng, ``count`` rows.

    Which positions introduce a fresh color, and which earlier color a
    repeat copies, have label-free probabilities, so the chain runs on
    counts alone; actual labels then come from one uniform permutation per
    row.  The joint law matches draw_coloring exactly.
    """
    probs = _new_color_probabilities(num_ads, num_colors)
    used = np.zeros(count, dtype=np.int64)
    appearance = np.empty((count, num_ads), dtype=np.int64)
    for i in range(num_ads):
        is_new = rng.random(count) < probs[i, used]
        old_pick = rng.integers(0, np.maximum(used, 1))
        appearance[:, i] = np.where(is_new, used, old_pick)
        used += is_new
    labels = rng.permuted(
        np.tile(np.arange(1, num_colors + 1, dtype=np.int64), (count, 1)), axis=1
    )
    return labels[np.arange(count)[:, None], appearance]


def draw_colorings(
    num_ads: int, num_colors: int, count: int, rng: np.random.Generator
) -> np.ndarray:
    """``count`` independent colorings, each distributed as draw_coloring.

    Batched counterpart used by colored_ads; vectorized rejection in the
    same regime where draw_coloring rejects, the chain sampler otherwise.
    """
    if num_colors < 1:
        raise ValueError("need at least one color")
    if num_ads < num_colors:
        raise ValueError(
            f"cannot color {num_ads} ads onto {num_colors} colors surjectively"
        )
    if count < 0:
        raise ValueError("count must be nonnegative")
    k = num_colors
    if num_ads >= 3 * k + 8:
        out = np.empty((count, num_ads), dtype=np.int64)
        pending = np.arange(count)
        for _ in range(100):
            if pending.size == 0:
                return out
            cand = rng.integers(1, k + 1, size=(pending.size, num_ads))
            present = np.zeros((pending.size, k + 1), dtype=bool)
            present[np.arange(pending.size)[:, None], cand] = True
            ok = present[:, 1:].all(axis=1)
            out[pending[ok]] = cand[ok]
            pending = pending[~ok]
        # astronomically unlikely here; finish the stragglers exactly
        out[pending] = _draw_colorings_chain(num_ads, k, pending.size, rng)
        return out
    return _draw_colorings_chain(num_ads, k, count, rng)


@lru_cache(maxsize=None)
def _subset_order(num_colors: int) -> tuple[np.ndarray, np.ndarray]:
    """Nonempty color subsets in increasing-size order, with their sizes."""
    subsets = sorted(range(1, 1 << num_colors), key=lambda s: s.bit_count())
    order = np.array(subsets, dtype=np.int64)
    sizes = np.array([s.bit_count() for s in subsets], dtype=np.int64)
    return order, sizes


def _lam_by_size(instance: AuctionInstance) -> np.ndarray:
    """Continuation multiplier for the slot a subset of size t starts at."""
    lam_eff = instance.ladder.effective_factors
    k = instance.num_slots
    out = np.zeros(k + 1, dtype=float)
    for t in range(1, k + 1):
        out[t] = lam_eff[k - t]
    return out


def _check_coloring(instance: AuctionInstance, coloring: Sequence[int]) -> np.ndarray:
    k = instance.num_slots
    arr = np.asarray(coloring, dtype=np.int64)
    if arr.shape != (instance.num_ads,):
        raise ValueError(
            f"coloring has {arr.size} entries for {instance.num_ads} ads"
        )
    if arr.min() < 1 or arr.max() > k:
        raise ValueError(f"colors must lie in 1..{k}")
    if len(np.unique(arr)) != k:
        raise ValueError("coloring must use every color at least once")
    return arr


def colored_pass(instance: AuctionInstance, coloring: Sequence[int]) -> ColorPassResult:
    """Best full allocation whose ads carry pairwise distinct colors.

    Subset DP over colors: a state C holds the best welfare for the last
    |C| slots using one ad per color of C.  Every state is reachable
    because the coloring is surjective.
    """
    colors = _check_coloring(instance, coloring)
    k = instance.num_slots
    n = instance.num_ads
    wv, cont = instance.arrays()
    bits = np.left_shift(1, colors - 1)
    lam_by_size = _lam_by_size(instance)
    order, sizes = _subset_order(k)

    memo = np.zeros(1 << k, dtype=float)
    choice = np.full(1 << k, -1, dtype=np.int64)
    for s, t in zip(order.tolist(), sizes.tolist()):
        lam_t = lam_by_size[t]
        best = -math.inf
        best_a = -1
        for a in range(n):
            bit = int(bits[a])
            if s & bit:
                prev = memo[s ^ bit]
                val = wv[a] + (cont[a] * lam_t) * prev
                if val > best:
                    best = val
                    best_a = a
        memo[s] = best
        choice[s] = best_a

    slots = []
    state = (1 << k) - 1
    while state:
        a = int(choice[state])
        slots.append(instance.ads[a].id)
        state ^= int(bits[a])
    alloc = Allocation(tuple(slots))
    return ColorPassResult(value=float(memo[-1]), alloc=alloc, coloring=tuple(int(c) for c in colors))


def _pass_values_loops(wv, cont, colorbits, lam_by_size, order, sizes, out):
    """Batch DP over passes; must mirror colored_pass op for op."""
    rows, n = colorbits.shape
    num_states = len(order) + 1
    for r in range(rows):
        memo = np.zeros(num_states, dtype=np.float64)
        for idx in range(len(order)):
            s = order[idx]
            lam_t = lam_by_size[sizes[idx]]
            best = -np.inf
            for a in range(n):
                bit = colorbits[r, a]
                if s & bit:
                    prev = memo[s ^ bit]
                    val = wv[a] + (cont[a] * lam_t) * prev
                    if val > best:
                        best = val
            memo[s] = best
        out[r] = memo[num_states - 1]


if _HAVE_NUMBA:
    _pass_values_compiled = njit(cache=True)(_pass_values_loops)
else:  # pragma: no cover
    _pass_values_compiled = None


def _pass_values_numpy(wv, cont, colorbits, lam_by_size, order, sizes, out):
    """Vectorized fallback; elementwise ops in the same order as the loops."""
    rows, n = colorbits.shape
    num_states = len(order) + 1
    memo = np.full((rows, num_states), -math.inf, dtype=np.float64)
    memo[:, 0] = 0.0
    row_ix = np.arange(rows)
    with np.errstate(invalid="ignore"):
        for idx in range(len(order)):
            s = int(order[idx])
            lam_t = lam_by_size[sizes[idx]]
            best = np.full(rows, -math.inf)
            for a in range(n):
                bit = colorbits[:, a]
                active = (bit & s) != 0
                prev = memo[row_ix, s ^ bit]
                val = wv[a] + (cont[a] * lam_t) * prev
                np.copyto(best, np.maximum(best, val), where=active)
            memo[:, s] = best
    out[:] = memo[:, num_states - 1]


def _batch_pass_values(instance: AuctionInstance, colorings: np.ndarray) -> np.ndarray:
    wv, cont = instance.arrays()
    bits = np.left_shift(np.int64(1), colorings - 1)
    lam_by_size = _lam_by_size(instance)
    order, sizes = _subset_order(instance.num_slots)
    out = np.empty(len(colorings), dtype=np.float64)
    if _pass_values_compiled is not None:
        _pass_values_compiled(wv, cont, bits, lam_by_size, order, sizes, out)
    else:  # pragma: no cover
        _pass_values_numpy(wv, cont, bits, lam_by_size, order, sizes, out)
    return out


def colored_ads(
    instance: AuctionInstance,
    iterations: int | None = None,
    seed: int = 0,
    time_budget: float | None = None,
    chunk: int = 2048,
) -> ColoredResult:
    """Best of ``iterations`` seeded color-coding passes.

    Batch c draws ``chunk`` colorings from a generator seeded with
    (seed, c), always the full batch, so pass t's coloring depends only on
    (seed, chunk, t): results are reproducible and extending the pass
    count only refines the answer.  A ``time_budget`` in seconds is
    honored between batches; at least one batch always runs.
    """
    if iterations is None:
        iterations = default_iterations(instance.num_slots)
    if iterations <= 0:
        raise NoColoringsError("need at least one pass")
    if chunk <= 0:
        raise ValueError("chunk must be positive")

    n = instance.num_ads
    k = instance.num_slots
    best_value = -math.inf
    best_index = -1
    started = time.perf_counter()
    done = 0
    while done < iterations:
        if time_budget is not None and done > 0:
            if time.perf_counter() - started >= time_budget:
                break
        rng = np.random.default_rng((seed, done // chunk))
        block = draw_colorings(n, k, chunk, rng)
        take = min(chunk, iterations - done)
        values = _batch_pass_values(instance, block[:take])
        j = int(np.argmax(values))
        if values[j] > best_value:
            best_value = float(values[j])
            best_index = done + j
        done += take

    rng = np.random.default_rng((seed, best_index // chunk))
    block = draw_colorings(n, k, chunk, rng)
    winner = block[best_index % chunk]
    result = colored_pass(instance, winner)
    return ColoredResult(
        value=result.value,
        alloc=result.alloc,
        coloring=result.coloring,
        iteration=best_index,
        iterations_run=done,
    )
