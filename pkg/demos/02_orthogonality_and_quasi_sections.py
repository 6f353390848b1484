"""Walkthrough: the duality between the step-kappa and step-(-kappa) systems.

The Shapovalov form pairs solutions of the two systems. Two facts fall out:
  * orthogonality: the pairing of any step-kappa solution with any
    step-(-kappa) solution (negated arguments) is the zero polynomial when
    0 < d(kappa) < n-1;
  * quasi-sections: when d(kappa) = 0 the flat structure survives as
    rational sections T^ell dual to the step-(-kappa) solutions.

Run:  python3 demos/02_orthogonality_and_quasi_sections.py
"""

from charp_qkz import make_field, make_params
from charp_qkz.ffield import sample_point
from charp_qkz.hypergeo import (
    extract_solutions,
    orthogonality_pairing,
    quasi_sections_at,
)
from charp_qkz.qkz_core import shapovalov

# -- orthogonality ------------------------------------------------------------
p, n, kv = 7, 4, 5
ctx = make_field(p)
params = make_params(ctx, n, kv)
print(f"p={p}, n={n}, kappa={kv}: d(kappa)={params.d}, d(-kappa)={params.minus().d}")

G = orthogonality_pairing(params)
print(f"pairing matrix is {len(G)} x {len(G[0])}; all entries zero polynomials:")
print(" ", all(entry.is_zero() for row in G for entry in row))

# -- quasi-sections at d(kappa) = 0 -------------------------------------------
p, n, kv = 5, 2, 2
ctx = make_field(p)
pctx = make_field(p, 2)
params = make_params(ctx, n, kv)
print(f"\np={p}, n={n}, kappa={kv}: d(kappa)={params.d} (no polynomial solutions)")

dual = extract_solutions(params.minus()).solutions
print(f"the step-(-kappa) system has d(-kappa)={len(dual)} solution(s)")

z = sample_point(pctx, n, rng_seed=6)
(T,) = quasi_sections_at(params, z)
print(f"at z = {[str(v) for v in z]}:")
print(f"  T^1(z) = {[str(v) for v in T]}")

# duality normalization: S(Q(-z; -kappa), T^1(z)) = 1
val = shapovalov(dual[0].eval([-v for v in z]), T)
print(f"  pairing with the dual solution: {val}")
assert val == pctx.one()
