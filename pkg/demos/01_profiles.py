"""One-dimensional building blocks: the front, the unbalanced speed and the
two-layer interaction energy.

Run with ``python demos/01_profiles.py``.
"""
import numpy as np

from acwave.potentials import make_potential
from acwave.profiles1d import energy_curve, front_speed, heteroclinic, two_layer

P = make_potential("quartic")
g = heteroclinic(P)
x = np.linspace(-8, 8, 4001)
print(f"quartic: beta = {P.beta:.12f}, mu = {P.mu:.6f}")
print(f"  front vs tanh(x/sqrt2): {np.max(np.abs(g(x) - np.tanh(x / np.sqrt(2)))):.2e}")

# Two layers at distance 2l attract; the excess energy decays like exp(-2 mu l).
for l in (2.0, 3.0, 4.0):
    tl = two_layer(P, -l, l)
    print(f"  l = {l}: hump height m = {tl.m:.6f}, excess energy E_l = {tl.E_l:.3e}")
cur = energy_curve(P)
print(f"  fitted rate {cur.rate:.4f} (2 mu = {2 * P.mu:.4f}), A_eff = {cur.A_eff:.4f}")

T = make_potential("tilted-quartic", a=0.3)
print(f"tilted quartic a = 0.3: front speed c0 = {front_speed(T):.9f}")
