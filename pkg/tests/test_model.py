"""Core model: ads, ladders, allocations, welfare, JSON round trips."""
from __future__ import annotations

import json
import math

import pytest
from hypothesis import given, strategies as st

from cascade_auctions import (
    Ad,
    Allocation,
    AuctionInstance,
    InstanceFormatError,
    InvalidAllocationError,
    NotAllocatedError,
    SlotLadder,
    ctr,
    dump_instance,
    instance_from_dict,
    instance_to_dict,
    load_instance,
    slot_positions,
    social_welfare,
)
from conftest import two_ad_instance


def test_ad_weighted_value():
    assert Ad(1, 2.0, 0.5, 0.3).weighted_value == 1.0


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(value=-0.1, quality=0.5, continuation=0.5),
        dict(value=math.nan, quality=0.5, continuation=0.5),
        dict(value=math.inf, quality=0.5, continuation=0.5),
        dict(value=1.0, quality=1.5, continuation=0.5),
        dict(value=1.0, quality=-0.1, continuation=0.5),
        dict(value=1.0, quality=0.5, continuation=1.1),
        dict(value=1.0, quality=0.5, continuation=-0.5),
    ],
)
def test_ad_validation(kwargs):
    with pytest.raises(InstanceFormatError):
        Ad(1, **kwargs)


def test_ladder_from_k_minus_one_factors():
    ladder = SlotLadder.from_factors([0.7, 0.6], 3)
    assert ladder.factors == (0.7, 0.6, 0.0)
    assert ladder.num_slots == 3


def test_ladder_last_factor_is_ignored():
    # the stored last factor never influences computations
    a = SlotLadder.from_factors([0.7, 0.9], 2)
    b = SlotLadder.from_factors([0.7, 0.0], 2)
    assert a.effective_factors == b.effective_factors == (0.7, 0.0)
    assert a.prominences == b.prominences == (1.0, 0.7)


def test_ladder_prominences_are_prefix_products():
    ladder = SlotLadder.from_factors([0.5, 0.4, 0.3], 3)
    assert ladder.prominences == (1.0, 0.5, 0.2)


def test_ladder_max_factor():
    assert SlotLadder.from_factors([0.3, 0.9, 0.1], 3).max_factor == 0.9
    # a K=1 ladder has no slot below its only slot
    assert SlotLadder.from_factors([0.9], 1).max_factor == 0.0


@pytest.mark.parametrize("factors", [[], [1.2], [-0.1], [math.nan]])
def test_ladder_validation(factors):
    with pytest.raises(InstanceFormatError):
        SlotLadder.from_factors(factors)


def test_ladder_factor_count_mismatch():
    with pytest.raises(InstanceFormatError):
        SlotLadder.from_factors([0.5], 3)


def test_instance_requires_enough_ads():
    with pytest.raises(InstanceFormatError):
        AuctionInstance(
            ads=(Ad(1, 1.0, 1.0, 0.5),),
            ladder=SlotLadder.from_factors([0.5], 2),
        )


def test_instance_rejects_duplicate_ids():
    with pytest.raises(InstanceFormatError):
        AuctionInstance(
            ads=(Ad(1, 1.0, 1.0, 0.5), Ad(1, 2.0, 1.0, 0.5)),
            ladder=SlotLadder.from_factors([], 1),
        )


def test_instance_lookup_and_views():
    inst = two_ad_instance()
    assert inst.num_ads == 2
    assert inst.num_slots == 2
    assert inst.ids == (1, 2)
    assert inst.ad(2).value == 2.0
    assert 1 in inst and 3 not in inst
    with pytest.raises(InvalidAllocationError):
        inst.ad(3)

    wv, cont = inst.arrays()
    assert wv.tolist() == [1.0, 1.0]
    assert cont.tolist() == [0.8, 0.0]


def test_instance_without_and_restricted():
    inst = AuctionInstance(
        ads=(Ad(1, 1.0, 1.0, 0.5), Ad(2, 2.0, 0.5, 0.0), Ad(3, 1.0, 0.5, 0.5)),
        ladder=SlotLadder.from_factors([0.5], 2),
    )
    assert inst.without(1).ids == (2, 3)
    assert inst.restricted_to([3, 2]).ids == (2, 3)  # keeps original ad order
    with pytest.raises(InvalidAllocationError):
        inst.without(9)
    # dropping below the slot count violates the shape invariant
    with pytest.raises(InstanceFormatError):
        inst.restricted_to([2])


def test_instance_with_values():
    inst = two_ad_instance()
    reported = inst.with_values({1: 3.0})
    assert reported.ad(1).value == 3.0
    assert reported.ad(1).quality == 1.0
    assert reported.ad(2).value == 2.0  # missing ids keep their value
    assert inst.ad(1).value == 1.0  # original untouched


def test_allocation_rejects_repeats():
    with pytest.raises(InvalidAllocationError):
        Allocation((1, 1))


def test_slot_positions_left_and_right_aligned():
    inst = two_ad_instance()
    assert slot_positions(inst, Allocation((1, 2))) == (1, 2)
    assert slot_positions(inst, Allocation((2,))) == (1,)
    assert slot_positions(inst, Allocation((2,), right_aligned=True)) == (2,)
    with pytest.raises(InvalidAllocationError):
        slot_positions(inst, Allocation((1, 2, 3)))


def test_ctr_hand_values():
    inst = two_ad_instance()
    top = Allocation((1, 2))
    # slot 1: quality * prominence 1; slot 2: 0.5 * 0.5 * c_1
    assert ctr(inst, top, 1) == 1.0
    assert ctr(inst, top, 2) == pytest.approx(0.5 * 0.5 * 0.8)
    # ad 2 on top blocks the scan entirely (c = 0)
    assert ctr(inst, Allocation((2, 1)), 1) == 0.0
    with pytest.raises(NotAllocatedError):
        ctr(inst, Allocation((1,)), 2)


def test_social_welfare_hand_values():
    inst = two_ad_instance()
    assert social_welfare(inst, Allocation(())) == 0.0
    assert social_welfare(inst, Allocation((1,))) == 1.0
    assert social_welfare(inst, Allocation((1, 2))) == pytest.approx(1.4)
    assert social_welfare(inst, Allocation((2, 1))) == pytest.approx(1.0)
    # right-aligned single ad sits in slot 2 with prominence 0.5
    assert social_welfare(inst, Allocation((2,), right_aligned=True)) == pytest.approx(0.5)


def test_social_welfare_is_sum_of_value_times_ctr():
    inst = two_ad_instance()
    alloc = Allocation((1, 2))
    total = sum(inst.ad(a).value * ctr(inst, alloc, a) for a in alloc.slots)
    assert social_welfare(inst, alloc) == pytest.approx(total)


ads_strategy = st.lists(
    st.tuples(
        st.floats(min_value=0.0, max_value=10.0),
        st.floats(min_value=0.0, max_value=1.0),
        st.floats(min_value=0.0, max_value=1.0),
    ),
    min_size=2,
    max_size=6,
)


@given(
    ads=ads_strategy,
    factors=st.lists(st.floats(min_value=0.0, max_value=1.0), min_size=1, max_size=5),
)
def test_welfare_sum_identity_random(ads, factors):
    k = min(len(factors), len(ads))
    inst = AuctionInstance(
        ads=tuple(Ad(i + 1, v, q, c) for i, (v, q, c) in enumerate(ads)),
        ladder=SlotLadder.from_factors(factors[: k - 1], k),
    )
    alloc = Allocation(tuple(range(1, k + 1)))
    total = sum(inst.ad(a).value * ctr(inst, alloc, a) for a in alloc.slots)
    assert social_welfare(inst, alloc) == pytest.approx(total, abs=1e-12)


def test_json_round_trip():
    inst = two_ad_instance()
    text = dump_instance(inst)
    again = load_instance(text)
    assert again == inst
    # dict round trip too
    assert instance_from_dict(instance_to_dict(inst)) == inst


def test_json_schema_shape():
    doc = json.loads(dump_instance(two_ad_instance()))
    assert doc["K"] == 2
    assert doc["lambdas"] == [0.5, 0.0]
    assert doc["ads"][0] == {"id": 1, "v": 1.0, "q": 1.0, "c": 0.8}


@pytest.mark.parametrize(
    "doc",
    [
        {},
        {"K": 2, "ads": []},
        {"K": 0, "lambdas": [], "ads": []},
        {"K": 1, "lambdas": [0.5], "ads": [{"id": 1, "v": 1.0, "q": 0.5}]},
        {"K": 1, "lambdas": [0.5], "ads": "nope"},
    ],
)
def test_json_rejects_malformed(doc):
    with pytest.raises(InstanceFormatError):
        instance_from_dict(doc)
