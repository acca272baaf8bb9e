"""Secular-determinant eigenvalues of a mixed three-star next to a P1 FEM estimate."""
import math

import numpy as np

from qgtrace import MatchingScheme, compute_spectrum, cosine, constant, piecewise, star
from qgtrace.fem import fem_spectrum

LAMBDA_MAX = 150.0

g = star([1.0, 1.3, 0.7])
pots = [cosine(1), constant(1.3, 1), piecewise(0.7, [0.3], [2.0, -1.0])]
scheme = MatchingScheme("delta", (0.5, -1.0, 0.0, 2.0))

spec = compute_spectrum(g, pots, scheme, LAMBDA_MAX)
fem = fem_spectrum(g, pots, scheme, LAMBDA_MAX, mesh_h=min(0.01, math.sqrt(0.05 / LAMBDA_MAX)))

a, b = spec.with_multiplicity(), fem.with_multiplicity()
n = min(len(a), len(b))
print(f"{'n':>3} {'secular':>20} {'fem':>20} {'rel':>10}")
for k in range(n):
    rel = abs(a[k] - b[k]) / max(1.0, abs(a[k]))
    print(f"{k:3d} {a[k]:20.12f} {b[k]:20.12f} {rel:10.1e}")
print(f"Weyl estimate {g.total_length * math.sqrt(LAMBDA_MAX) / math.pi:.1f}, counted {len(a)}")
