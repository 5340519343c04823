"""Envelopes of segments and the visible crossings between two families.

Tangent segments to a parabola all appear on the lower envelope, so m of
them give m - 1 crossings.  Two random families then show that only a
linear number of their mutual crossings survive on both envelopes.
"""
from freespace import (
    cross_envelope_visible, envelope, inverse_ackermann, naive_cross_visible, naive_envelope,
)
from freespace.constructions import hard_envelope_family, random_segments

for m in (4, 16, 64):
    env = envelope(hard_envelope_family(m), "lower")
    print(f"{m} tangents: {len(env.pieces)} pieces, {env.crossing_count} crossings")

segs = random_segments(40, 1)
fast, slow = envelope(segs, "upper"), naive_envelope(segs, "upper")
print("divide and conquer matches the slab oracle:", fast.pieces == slow.pieces)

a = random_segments(30, 2, noncrossing=True)
b = random_segments(30, 3)
visible = cross_envelope_visible(a, "lower", b, "lower")
print(f"visible crossings: {len(visible)} (oracle {len(naive_cross_visible(a, 'lower', b, 'lower'))}),"
      f" bound 12n = {12 * 60}")
print("alpha(10**9) =", inverse_ackermann(10**9))
