"""Trace identities and determinant ratio for a symmetric isospectral pair,
and for a pair of uniform couplings that are not isospectral."""
from qgtrace import MatchingScheme, all_vertex_asymptotics, check_trace, cosine, star
from qgtrace.trace import det_ratio_scan

g = star([1.0, 1.0, 1.0])
pots = [cosine(1)] * 3
va = all_vertex_asymptotics(g, pots, 2)

a = MatchingScheme("delta", (0.3, 1.0, -0.5, 0.0))
b = MatchingScheme("delta", (0.3, -0.5, 1.0, 0.0))
print("swapped leaf couplings")
print(check_trace(a, b, va, 2).to_json())
for tau, r in det_ratio_scan(g, pots, a, b, [10, 20, 40, 80, 100]):
    print(f"  tau={tau:6.1f}  ratio={r:.17g}")

u = MatchingScheme.uniform("delta", 0.0, g.n_vertices)
v = MatchingScheme.uniform("delta", 0.1, g.n_vertices)
print("uniform 0.0 vs 0.1")
print(check_trace(u, v, va, 2).to_json())
for tau, r in det_ratio_scan(g, pots, u, v, [10, 40, 100]):
    print(f"  tau={tau:6.1f}  ratio={r:.17g}")
