"""Accuracy of SIIS over an alpha x beta grid at 40% label noise."""
from siis.bench import make_blobs, sweep

pool = make_blobs(n=500, n_classes=4, seed=0)
rows = sweep(pool, alphas=[1, 10, 100], betas=[1, 10, 100], noise_rate=0.4,
             repetitions=3)
for alpha, beta, acc_l, _, acc_u, _ in rows:
    print(f"alpha={alpha:6g} beta={beta:6g}  acc_L={acc_l:.3f}  acc_U={acc_u:.3f}")
