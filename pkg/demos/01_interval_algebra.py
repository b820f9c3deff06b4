"""Tour of the interval-list algebra.

Composite activities are represented as lists of maximal [start, end)
intervals over integer ticks; an end of OPEN means "still going on".  This
script walks through the three set constructs and the inertia builder.
"""

from evrec import (
    OPEN,
    clip_before,
    intersect_all,
    make_intervals,
    relative_complement_all,
    union_all,
)

a = [(5, 20), (26, 30)]
b = [(28, 35)]

print("a          =", a)
print("b          =", b)
print("union      =", union_all([a, b]))
print("intersect  =", intersect_all([a, b]))
print("a minus .. =", relative_complement_all(a, [[(1, 4), (18, 22)]]))

# Inertia: an initiation at Ts makes a property hold from Ts+1 until the
# first break strictly after Ts, or indefinitely if none follows.
print()
print("inertia    =", make_intervals([10, 20], [15, 40], now=50))
print("no break   =", make_intervals([10], [], now=50), "(open-ended)")

# Windowing uses clip_before to split histories at a boundary.
prefix, suffix = clip_before([(3, 12), (14, OPEN)], 7)
print()
print("clip at 7  -> prefix", prefix, " suffix", suffix)
