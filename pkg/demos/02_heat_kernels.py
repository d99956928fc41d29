"""Stable heat kernels: closed forms, quadrature, and subordinate families.

Run:  python demos/02_heat_kernels.py
"""

import math

import numpy as np

from fracheat import heat_kernel as hk
from fracheat import subordinator as sub

rng = np.random.default_rng(11)

print("== p_1^{(alpha)}(0) closed form vs E[S^{-d/2}]/(4 pi)^{d/2} ==")
for d in (1, 2, 3):
    for alpha in (0.7, 1.0, 1.6, 2.0):
        closed = hk.kernel_at_zero(d, alpha)
        via_moment = sub.stable_moment(alpha, -d / 2.0) / (4.0 * math.pi) ** (d / 2.0)
        print(f"  d={d} alpha={alpha}: {closed:.10f}  vs  {via_moment:.10f}")

print("\n== d=1, alpha=1 quadrature vs the Cauchy density t/(pi (t^2+x^2)) ==")
for t, x in ((0.1, 0.0), (0.5, 1.0), (0.9, 3.0)):
    q = hk.kernel_value(1, 1.0, t, x)
    c = t / (math.pi * (t * t + x * x))
    print(f"  t={t} x={x}: quadrature {q:.8f}  closed {c:.8f}  diff {abs(q - c):.1e}")

print("\n== subordination route (integral against the 1/2-subordinator density) ==")
for t, x in ((0.5, 0.0), (0.5, 1.5)):
    print(f"  t={t} x={x}: direct {hk.kernel_value(1, 1.0, t, x):.8f}"
          f"  subordination {hk.kernel_value_subordination(1, t, x):.8f}")

print("\n== scaling p_t(x) = t^{-d/alpha} p_1(t^{-1/alpha} x), alpha = 1.4 ==")
for t in (0.3, 0.8):
    lhs = hk.kernel_value(1, 1.4, t, 1.0)
    rhs = t ** (-1 / 1.4) * hk.kernel_value(1, 1.4, 1.0, t ** (-1 / 1.4))
    print(f"  t={t}: {lhs:.8f} vs {rhs:.8f}")

print("\n== relativistic kernel at zero: t^{d/a} p_t(0) e^{-mt} -> p_1(0) ==")
p1 = hk.kernel_at_zero(1, 1.0)
for t in (1e-1, 1e-2, 1e-3):
    est = hk.relativistic_kernel_at_zero(1, 1.0, 1.0, t, 400_000, rng)
    print(f"  t={t:g}: {t * est.value * math.exp(-t):.5f}  ->  p_1(0) = {p1:.5f}")

print("\n== mixed kernel at zero: p_t(0) t^{d/beta} flattens as t -> 0 ==")
for t in (1e-1, 1e-2, 1e-3, 1e-4):
    est = hk.mixed_kernel_at_zero(2, 0.8, 1.6, 1.0, t, 400_000, rng)
    print(f"  t={t:g}: ratio {est.value * t ** (2 / 1.6):.5f}"
          f"  (limit p_1^{{(beta)}}(0) = {hk.kernel_at_zero(2, 1.6):.5f})")
