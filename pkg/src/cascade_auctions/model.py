"""Core data model for slot auctions under a cascading attention model.

A user scans the slot list top-down.  After looking at the ad in slot s she
moves on to slot s+1 with probability ``lambda_s * c_a``, where ``lambda_s``
is a property of the slot and ``c_a`` a property of the ad occupying it.
The click-through rate of an allocated ad is therefore the product of its
own quality, the slot prominence (product of the slot factors above it) and
the continuation probabilities of every ad allocated above it.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping

import numpy as np

__all__ = [
    "AuctionError",
    "NotAllocatedError",
    "InvalidAllocationError",
    "InstanceFormatError",
    "InstanceTooLargeError",
    "Ad",
    "SlotLadder",
    "AuctionInstance",
    "Allocation",
    "ctr",
    "social_welfare",
    "slot_positions",
    "instance_to_dict",
    "instance_from_dict",
    "dump_instance",
    "load_instance",
]


class AuctionError(Exception):
    """Base class for errors raised by this package."""


class NotAllocatedError(AuctionError):
    """The requested ad does not appear in the allocation."""


class InvalidAllocationError(AuctionError):
    """The allocation is malformed for the given instance."""


class InstanceFormatError(AuctionError):
    """An instance document violates the on-disk schema."""


class InstanceTooLargeError(AuctionError):
    """The instance exceeds a size cap for an exhaustive computation."""


@dataclass(frozen=True)
class Ad:
    """A single ad with its private value and public user-model parameters.

    Attributes:
        id: Integer identifier, unique within an instance.
        value: Value per click to the advertiser, >= 0.
        quality: Click probability once the ad is looked at, in [0, 1].
        continuation: Probability the user keeps scanning past this ad,
            in [0, 1].
    """

    id: int
    value: float
    quality: float
    continuation: float

    def __post_init__(self) -> None:
        if self.value < 0 or not math.isfinite(self.value):
            raise InstanceFormatError(f"ad {self.id}: value must be finite and >= 0, got {self.value}")
        if not 0.0 <= self.quality <= 1.0:
            raise InstanceFormatError(f"ad {self.id}: quality must be within [0, 1], got {self.quality}")
        if not 0.0 <= self.continuation <= 1.0:
            raise InstanceFormatError(f"ad {self.id}: continuation must be within [0, 1], got {self.continuation}")

    @property
    def weighted_value(self) -> float:
        """Expected value per impression: quality times value."""
        return self.quality * self.value


@dataclass(frozen=True)
class SlotLadder:
    """The slot side of the model: one continuation factor per slot.

    ``factors[s-1]`` is the probability the user moves from slot s to slot
    s+1, before multiplying in the continuation of the ad shown in slot s.
    The factor of the last slot is stored for round-tripping but never
    enters any welfare computation (there is no slot below it to reach).
    """

    factors: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "factors", tuple(self.factors))
        if len(self.factors) == 0:
            raise InstanceFormatError("ladder must have at least one slot")
        for i, f in enumerate(self.factors):
            if not 0.0 <= f <= 1.0:
                raise InstanceFormatError(f"lambdas[{i}]: factor must be within [0, 1], got {f}")

    @classmethod
    def from_factors(cls, factors: Iterable[float], num_slots: int | None = None) -> "SlotLadder":
        """Builds a ladder from either K or K-1 factors.

        When K-1 factors are supplied for K slots the missing last factor is
        set to 0 (the scan cannot continue past the last slot).
        """
        fs = [float(f) for f in factors]
        if num_slots is not None:
            if len(fs) == num_slots - 1:
                fs.append(0.0)
            elif len(fs) != num_slots:
                raise InstanceFormatError(
                    f"lambdas: expected {num_slots} or {num_slots - 1} factors, got {len(fs)}"
                )
        return cls(tuple(fs))

    @property
    def num_slots(self) -> int:
        return len(self.factors)

    @property
    def effective_factors(self) -> tuple[float, ...]:
        """Factors as used in computations: the last one is forced to 0."""
        return self.factors[:-1] + (0.0,)

    @property
    def prominences(self) -> tuple[float, ...]:
        """Probability of reaching each slot through empty slots above it.

        Entry s-1 is the product of the factors of slots 1..s-1; the first
        entry is 1.
        """
        out = [1.0]
        for f in self.factors[:-1]:
            out.append(out[-1] * f)
        return tuple(out)

    @property
    def max_factor(self) -> float:
        """Largest factor of any slot that has a slot below it (0 if K=1)."""
        if self.num_slots == 1:
            return 0.0
        return max(self.factors[:-1])


@dataclass(frozen=True)
class AuctionInstance:
    """A set of ads plus a slot ladder.  Requires at least as many ads as slots."""

    ads: tuple[Ad, ...]
    ladder: SlotLadder
    _index: dict[int, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "ads", tuple(self.ads))
        ids = [ad.id for ad in self.ads]
        if len(set(ids)) != len(ids):
            raise InstanceFormatError("ad ids must be distinct")
        if len(self.ads) < self.ladder.num_slots:
            raise InstanceFormatError(
                f"need at least as many ads as slots, got {len(self.ads)} ads for {self.ladder.num_slots} slots"
            )
        object.__setattr__(self, "_index", {ad.id: i for i, ad in enumerate(self.ads)})

    @property
    def num_ads(self) -> int:
        return len(self.ads)

    @property
    def num_slots(self) -> int:
        return self.ladder.num_slots

    @property
    def ids(self) -> tuple[int, ...]:
        return tuple(ad.id for ad in self.ads)

    def ad(self, ad_id: int) -> Ad:
        try:
            return self.ads[self._index[ad_id]]
        except KeyError:
            raise InvalidAllocationError(f"unknown ad id {ad_id}") from None

    def __contains__(self, ad_id: int) -> bool:
        return ad_id in self._index

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """(weighted_value, continuation) arrays in ad order."""
        wv = np.array([ad.weighted_value for ad in self.ads], dtype=float)
        cont = np.array([ad.continuation for ad in self.ads], dtype=float)
        return wv, cont

    def without(self, ad_id: int) -> "AuctionInstance":
        """Copy of the instance with one ad removed (ladder unchanged)."""
        if ad_id not in self._index:
            raise InvalidAllocationError(f"unknown ad id {ad_id}")
        kept = tuple(ad for ad in self.ads if ad.id != ad_id)
        return AuctionInstance(kept, self.ladder)

    def restricted_to(self, ids: Iterable[int]) -> "AuctionInstance":
        """Copy keeping only the given ad ids, in the original ad order."""
        keep = set(ids)
        kept = tuple(ad for ad in self.ads if ad.id in keep)
        return AuctionInstance(kept, self.ladder)

    def with_values(self, values: Mapping[int, float]) -> "AuctionInstance":
        """Copy with per-click values replaced (used for reported bids)."""
        new_ads = []
        for ad in self.ads:
            v = float(values.get(ad.id, ad.value))
            new_ads.append(Ad(ad.id, v, ad.quality, ad.continuation))
        return AuctionInstance(tuple(new_ads), self.ladder)


@dataclass(frozen=True)
class Allocation:
    """An ordered assignment of ads to slots.

    ``slots`` lists ad ids from the top slot down.  A left-aligned
    allocation of n ads occupies slots 1..n.  A right-aligned one occupies
    the last n slots, leaving the top slots empty (the scan passes through
    empty slots with the bare slot factors).
    """

    slots: tuple[int, ...]
    right_aligned: bool = False

    def __post_init__(self) -> None:
        if len(set(self.slots)) != len(self.slots):
            raise InvalidAllocationError("allocation repeats an ad id")

    def __len__(self) -> int:
        return len(self.slots)


def slot_positions(instance: AuctionInstance, alloc: Allocation) -> tuple[int, ...]:
    """1-based slot index of each allocated ad, in allocation order."""
    n = len(alloc.slots)
    k = instance.num_slots
    if n > k:
        raise InvalidAllocationError(f"allocation has {n} ads but only {k} slots exist")
    first = k - n + 1 if alloc.right_aligned else 1
    return tuple(range(first, first + n))


def ctr(instance: AuctionInstance, alloc: Allocation, ad_id: int) -> float:
    """Click-through rate of one allocated ad under the full cascade model.

    Product of the ad's quality, the prominence of its slot, and the
    continuation probabilities of the ads allocated above it.

    Raises:
        NotAllocatedError: if the ad is not part of the allocation.
    """
    positions = slot_positions(instance, alloc)
    prom = instance.ladder.prominences
    through = 1.0
    for pos, aid in zip(positions, alloc.slots):
        ad = instance.ad(aid)
        if aid == ad_id:
            return ad.quality * prom[pos - 1] * through
        through *= ad.continuation
    raise NotAllocatedError(f"ad {ad_id} is not allocated")


def social_welfare(instance: AuctionInstance, alloc: Allocation) -> float:
    """Expected welfare of an allocation: sum of weighted value times CTR weight."""
    positions = slot_positions(instance, alloc)
    prom = instance.ladder.prominences
    total = 0.0
    through = 1.0
    for pos, aid in zip(positions, alloc.slots):
        ad = instance.ad(aid)
        total += ad.weighted_value * (prom[pos - 1] * through)
        through *= ad.continuation
    return total


# ---------------------------------------------------------------------------
# JSON round-tripping.
#
# Schema:
#   { "K": int, "lambdas": [float, ...], "ads": [ {"id": int, "v": float,
#     "q": float, "c": float}, ... ] }
# "lambdas" may list K or K-1 factors; a missing last factor is stored as 0.
# ---------------------------------------------------------------------------


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise InstanceFormatError(msg)


def instance_from_dict(doc: Any) -> AuctionInstance:
    _require(isinstance(doc, dict), "top-level document must be an object")
    for key in ("K", "lambdas", "ads"):
        _require(key in doc, f"missing required field '{key}'")
    k = doc["K"]
    _require(isinstance(k, int) and not isinstance(k, bool) and k >= 1, f"K: must be an integer >= 1, got {k!r}")
    lambdas = doc["lambdas"]
    _require(isinstance(lambdas, list), "lambdas: must be an array")
    for i, f in enumerate(lambdas):
        _require(isinstance(f, (int, float)) and not isinstance(f, bool), f"lambdas[{i}]: must be a number, got {f!r}")
        _require(0.0 <= float(f) <= 1.0, f"lambdas[{i}]: must be within [0, 1], got {f}")
    ladder = SlotLadder.from_factors(lambdas, num_slots=k)
    raw_ads = doc["ads"]
    _require(isinstance(raw_ads, list), "ads: must be an array")
    ads = []
    seen: set[int] = set()
    for i, entry in enumerate(raw_ads):
        _require(isinstance(entry, dict), f"ads[{i}]: must be an object")
        for fld in ("id", "v", "q", "c"):
            _require(fld in entry, f"ads[{i}]: missing field '{fld}'")
        aid = entry["id"]
        _require(isinstance(aid, int) and not isinstance(aid, bool), f"ads[{i}].id: must be an integer, got {aid!r}")
        _require(aid not in seen, f"ads[{i}].id: duplicate id {aid}")
        seen.add(aid)
        for fld in ("v", "q", "c"):
            val = entry[fld]
            _require(
                isinstance(val, (int, float)) and not isinstance(val, bool),
                f"ads[{i}].{fld}: must be a number, got {val!r}",
            )
        _require(float(entry["v"]) >= 0, f"ads[{i}].v: must be >= 0, got {entry['v']}")
        _require(0.0 <= float(entry["q"]) <= 1.0, f"ads[{i}].q: must be within [0, 1], got {entry['q']}")
        _require(0.0 <= float(entry["c"]) <= 1.0, f"ads[{i}].c: must be within [0, 1], got {entry['c']}")
        ads.append(Ad(aid, float(entry["v"]), float(entry["q"]), float(entry["c"])))
    _require(len(ads) >= k, f"ads: need at least K={k} ads, got {len(ads)}")
    return AuctionInstance(tuple(ads), ladder)


def instance_to_dict(instance: AuctionInstance) -> dict[str, Any]:
    return {
        "K": instance.num_slots,
        "lambdas": [float(f) for f in instance.ladder.factors],
        "ads": [
            {"id": ad.id, "v": ad.value, "q": ad.quality, "c": ad.continuation}
            for ad in instance.ads
        ],
    }


def dump_instance(instance: AuctionInstance) -> str:
    """Canonical JSON serialization; identical instances give identical bytes."""
    return json.dumps(instance_to_dict(instance), sort_keys=True, separators=(",", ":"))


def load_instance(text: str) -> AuctionInstance:
    """Parses the JSON schema, raising InstanceFormatError with a field path
    (or the parser's line/column) on any violation."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return instance_from_dict(doc)
