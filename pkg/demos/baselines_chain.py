"""Ten-vertex path with one wrong label: who fixes it?

Vertices 0..4 are truly +1 and 5..9 truly -1. Vertices 0, 1 and 5..9 are
labeled, but vertex 7 carries a wrong +1. A value of -1 at vertex 7 means
the method corrected it.
"""
from siis.bench import CHAIN_ALPHAS, chain_example, chain_sweep

g, labeled, given, truth, bad = chain_example()
print("labeled vertices:", labeled.tolist())
print("given labels:   ", given.tolist())
print("flipped vertex:  ", bad)

print("\nalpha   gtf f[bad]   l2l1 f[bad]  (normalized by max |f|)")
for alpha, f_gtf, f_l2 in chain_sweep(CHAIN_ALPHAS):
    print(f"{alpha:5.2f}   {f_gtf:+.3f}       {f_l2:+.3f}")
# total variation snaps the bad vertex to its neighbours' value for a
# middle range of alpha; the quadratic smoother only pulls it part way
