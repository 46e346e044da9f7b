"""The reduced layer system and its logarithmic asymptote.

The half separation l(y) of two attracting layers grows like
ln(y)/(2 mu) + l_offset.  The deviation from that law shrinks like ln(y)/y.
"""
import numpy as np

from acwave import layerdyn as LD
from acwave.potentials import make_potential
from acwave.profiles1d import energy_curve

P = make_potential("quartic")
p = LD.LayerParams.from_potential(P, 1.0, energy_curve(P).A_eff)
pred = LD.asymptote_prediction(p)
print(f"Q slope {pred['Q_slope']:.4f}, l_offset {pred['l_offset']:.6f}")

y0, init = LD.asymptotic_start(p)
tr = LD.integrate(p, init, (y0, 1.0e4))
for y in (1e1, 1e2, 1e3, 1e4):
    l = np.interp(y, tr.y, tr.l)
    print(f"  y = {y:8.0f}: l - ln(y)/(2 mu) - l_offset = "
          f"{l - np.log(y) / (2 * p.mu) - pred['l_offset']:+.2e}")
print("max |Q residual|:", f"{np.max(np.abs(LD.q_residual(tr))):.1e}")
