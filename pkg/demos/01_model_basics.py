"""
Cascade auction model basics
============================

Build an auction instance by hand, score allocations under the cascade
user model, and round-trip the instance through JSON.
"""

from cascade_auctions import (
    Ad,
    Allocation,
    AuctionInstance,
    SlotLadder,
    ctr,
    dump_instance,
    load_instance,
    social_welfare,
)

# An ad has a per-click value, a click quality (probability of a click once
# the ad is observed), and a continuation probability (chance the user keeps
# scanning past it after observing it).
ads = [
    Ad(id=1, value=4.0, quality=0.5, continuation=0.5),
    Ad(id=2, value=3.0, quality=1.0, continuation=0.8),
    Ad(id=3, value=1.0, quality=1.0, continuation=0.2),
]

# The slot ladder holds one factor per slot. Factors multiply into prefix
# "prominence" products: the chance the user reaches each slot at all,
# before any ad-dependent effects. The factor of the final slot never
# matters because nobody scans past the last slot.
ladder = SlotLadder.from_factors([0.5], num_slots=2)
print("prominences:", ladder.prominences)

inst = AuctionInstance(ads, ladder)
print("weights (quality * value):", [a.quality * a.value for a in inst.ads])

# Score a specific allocation: ads 1 and 2 in slots 1 and 2.
alloc = Allocation(slots=(1, 2))
print("welfare of (1, 2):", social_welfare(inst, alloc))

# Per-ad click-through rates under that allocation. Ad 2 sits below ad 1,
# so its rate carries ad 1's continuation on top of the slot prominence.
for ad in (1, 2):
    print(f"ctr of ad {ad}:", ctr(inst, alloc, ad))

# Swapping the two ads changes the welfare: order matters because each
# ad gates the traffic reaching everything below it.
print("welfare of (2, 1):", social_welfare(inst, Allocation(slots=(2, 1))))

# Instances serialize to a small JSON document and load back unchanged.
text = dump_instance(inst)
print(text)
assert load_instance(text) == inst
print("JSON round-trip ok")
