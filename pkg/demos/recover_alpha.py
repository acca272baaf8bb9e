"""Round trip: spectrum at a known uniform coupling, then recover it."""
import time

from qgtrace import (EdgePotential, MatchingScheme, Polynomial, compute_spectrum, constant,
                     cosine, recover_uniform_alpha, star)

g = star([1.0, 1.2, 0.8])
pots = [cosine(1), constant(1.2, 0.5), EdgePotential(0.8, (Polynomial(1, 2),))]

for kind in ("delta", "delta_prime"):
    for alpha in (-1.0, 0.0, 0.5, 1.7):
        t0 = time.perf_counter()
        target = compute_spectrum(g, pots, MatchingScheme.uniform(kind, alpha, g.n_vertices), 60)
        got = recover_uniform_alpha(g, pots, target, (-4.0, 4.0), kind=kind)
        dt = time.perf_counter() - t0
        print(f"{kind:12s} alpha={alpha:5.2f}  recovered={got:+.15f}  "
              f"err={abs(got - alpha):.1e}  {dt:.2f} s")
