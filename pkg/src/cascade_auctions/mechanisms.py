"""Auction mechanisms over the cascade model.

Three mechanisms share an interface: each takes the true instance plus a
bid profile (reported per-click values) and returns the allocation,
per-impression expected payments, and utilities evaluated against the
true model.

* gsp_outcome: generalized second price.  Ranks by bid (optionally by
  quality-weighted bid) and charges each slot the quality-weighted bid of
  the next rank.
* vcg_pdc_outcome: VCG computed in a declared model that ignores ad
  continuation (every ad's effect is quality * bid * slot prominence).
  Payments are independent of the continuation parameters.
* vcg_apdc_outcome: VCG in the full model.  The allocation rule may be
  the exact solver or one of the seeded approximations; because each of
  those maximizes reported welfare over a range of allocations that does
  not depend on any single bid, charging Clarke-style differences makes
  truthful reporting a dominant strategy for every allocator choice.
  Individual rationality and nonnegative payments are only guaranteed
  with the exact allocator.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

from .coloring import colored_ads
from .exact import solve_exact
from .model import Allocation, AuctionInstance, SlotLadder, ctr, social_welfare
from .sorted_dp import multi_order_approx

__all__ = [
    "BidProfile",
    "MechanismOutcome",
    "NashCheck",
    "truthful_profile",
    "gsp_outcome",
    "vcg_pdc_outcome",
    "vcg_apdc_outcome",
    "is_nash",
]

BidProfile = Mapping[int, float]

_APDC_ALLOCATORS = ("exact", "colored", "sorted")


@dataclass(frozen=True)
class MechanismOutcome:
    """Result of running one mechanism on one bid profile.

    Payments are expected amounts per impression.  Utilities and
    ``social_welfare`` are measured under the true instance, whatever was
    bid.
    """

    mechanism: str
    alloc: Allocation
    payments: dict[int, float]
    utilities: dict[int, float]
    revenue: float
    social_welfare: float
    allocator: str | None = None


@dataclass(frozen=True)
class NashCheck:
    """Outcome of a grid deviation search.

    When a profitable deviation exists, the most profitable one found is
    reported.
    """

    is_equilibrium: bool
    agent: int | None = None
    bid: float | None = None
    gain: float = 0.0


def truthful_profile(instance: AuctionInstance) -> dict[int, float]:
    return {ad.id: ad.value for ad in instance.ads}


def _check_bids(instance: AuctionInstance, bids: BidProfile) -> dict[int, float]:
    profile = {}
    for ad in instance.ads:
        if ad.id not in bids:
            raise ValueError(f"bid profile is missing ad {ad.id}")
        b = float(bids[ad.id])
        if not b >= 0.0:
            raise ValueError(f"bid for ad {ad.id} must be nonnegative, got {b}")
        profile[ad.id] = b
    if len(bids) != instance.num_ads:
        extra = set(bids) - set(profile)
        raise ValueError(f"bid profile names unknown ads {sorted(extra)}")
    return profile


def _settle(
    instance: AuctionInstance,
    mechanism: str,
    alloc: Allocation,
    payments: dict[int, float],
    allocator: str | None = None,
) -> MechanismOutcome:
    placed = set(alloc.slots)
    utilities = {}
    for ad in instance.ads:
        clicks = ctr(instance, alloc, ad.id) if ad.id in placed else 0.0
        utilities[ad.id] = ad.value * clicks - payments[ad.id]
    return MechanismOutcome(
        mechanism=mechanism,
        alloc=alloc,
        payments=payments,
        utilities=utilities,
        revenue=sum(payments.values()),
        social_welfare=social_welfare(instance, alloc),
        allocator=allocator,
    )


def gsp_outcome(
    instance: AuctionInstance,
    bids: BidProfile,
    rank_by_quality: bool = False,
) -> MechanismOutcome:
    """Generalized second price under the cascade model.

    Slot s pays the quality-weighted bid of the ad ranked s+1 (zero when
    there is none).  Ties in the ranking go to the smaller ad id.
    """
    profile = _check_bids(instance, bids)
    k = instance.num_slots

    def score(ad) -> float:
        return ad.quality * profile[ad.id] if rank_by_quality else profile[ad.id]

    ranking = sorted(instance.ads, key=lambda ad: (-score(ad), ad.id))
    alloc = Allocation(tuple(ad.id for ad in ranking[:k]))
    payments = {ad.id: 0.0 for ad in instance.ads}
    for pos, ad in enumerate(ranking[:k]):
        if pos + 1 < len(ranking):
            nxt = ranking[pos + 1]
            payments[ad.id] = nxt.quality * profile[nxt.id]
    return _settle(instance, "gsp", alloc, payments)


def vcg_pdc_outcome(instance: AuctionInstance, bids: BidProfile) -> MechanismOutcome:
    """VCG in the declared continuation-free model.

    Declared welfare of an allocation is the sum of quality * bid * slot
    prominence, so the declared optimum just ranks by quality-weighted
    bid.  Clarke payments within that model never involve the
    continuation parameters; utilities of course do.
    """
    profile = _check_bids(instance, bids)
    k = instance.num_slots
    prom = instance.ladder.prominences

    def weight(ad) -> float:
        return ad.quality * profile[ad.id]

    ranking = sorted(instance.ads, key=lambda ad: (-weight(ad), ad.id))
    alloc = Allocation(tuple(ad.id for ad in ranking[:k]))
    declared = {ad.id: weight(ad) * prom[pos] for pos, ad in enumerate(ranking[:k])}

    payments = {ad.id: 0.0 for ad in instance.ads}
    for pos, ad in enumerate(ranking[:k]):
        others = [o for o in ranking if o.id != ad.id]
        without = sum(weight(o) * prom[p] for p, o in enumerate(others[:k]))
        kept = sum(declared.values()) - declared[ad.id]
        payments[ad.id] = without - kept
    return _settle(instance, "vcg-pdc", alloc, payments)


def _truncated(instance: AuctionInstance, drop_id: int) -> AuctionInstance | None:
    """Instance without one ad; the ladder shrinks when slots would exceed ads.

    Cutting trailing slots loses nothing: prominences of the remaining
    slots are unchanged and filling more slots than ads is impossible.
    Returns None when no ad remains.
    """
    ads = tuple(ad for ad in instance.ads if ad.id != drop_id)
    if not ads:
        return None
    k = min(instance.num_slots, len(ads))
    ladder = (
        instance.ladder
        if k == instance.num_slots
        else SlotLadder(instance.ladder.factors[:k])
    )
    return AuctionInstance(ads, ladder)


def vcg_apdc_outcome(
    instance: AuctionInstance,
    bids: BidProfile,
    allocator: str = "exact",
    seed: int = 0,
    iterations: int | None = None,
    order_count: int | None = None,
    budget: int | None = None,
    hard_cap: int = 20,
) -> MechanismOutcome:
    """VCG with the full cascade model as the declared model.

    The chosen allocator maximizes reported welfare over a fixed range of
    allocations; ad a pays the allocator's best reported welfare without a
    minus what the others get under the chosen allocation.  The seeded
    randomness of the approximate allocators depends only on (seed, ad
    set), never on bids, which preserves dominant-strategy truthfulness.
    """
    if allocator not in _APDC_ALLOCATORS:
        raise ValueError(f"allocator must be one of {_APDC_ALLOCATORS}, got {allocator!r}")
    profile = _check_bids(instance, bids)
    reported = instance.with_values(profile)

    def run(inst: AuctionInstance) -> tuple[Allocation, float]:
        if allocator == "exact":
            res = solve_exact(inst, budget=budget, hard_cap=hard_cap)
            return res.best_alloc, res.best_value
        if allocator == "colored":
            res = colored_ads(inst, iterations=iterations, seed=seed)
            return res.alloc, res.value
        res = multi_order_approx(
            inst, order_count=order_count, seed=seed, include_natural=False
        )
        return res.alloc, res.value

    alloc, _ = run(reported)
    total_reported = sum(
        profile[aid] * ctr(reported, alloc, aid) for aid in alloc.slots
    )

    payments = {ad.id: 0.0 for ad in instance.ads}
    for ad in instance.ads:
        reduced = _truncated(reported, ad.id)
        best_without = 0.0
        if reduced is not None:
            _, best_without = run(reduced)
        own = profile[ad.id] * ctr(reported, alloc, ad.id) if ad.id in alloc.slots else 0.0
        payments[ad.id] = best_without - (total_reported - own)
    return _settle(instance, "vcg-apdc", alloc, payments, allocator=allocator)


def is_nash(
    instance: AuctionInstance,
    bids: BidProfile,
    mechanism: Callable[[AuctionInstance, BidProfile], MechanismOutcome],
    grids: Mapping[int, Sequence[float]],
    eps: float = 1e-9,
) -> NashCheck:
    """Checks the profile against unilateral deviations drawn from grids.

    A profile passes when no listed deviation raises the deviator's
    utility by more than eps.  Grid search only: a deviation outside the
    grids is never considered.
    """
    base = mechanism(instance, bids)
    best: NashCheck | None = None
    for agent, candidates in grids.items():
        current = base.utilities[agent]
        for alt in candidates:
            if alt == bids[agent]:
                continue
            trial = dict(bids)
            trial[agent] = alt
            gain = mechanism(instance, trial).utilities[agent] - current
            if gain > eps and (best is None or gain > best.gain):
                best = NashCheck(False, agent=agent, bid=float(alt), gain=float(gain))
    return best if best is not None else NashCheck(True)
