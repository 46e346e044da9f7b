"""Two contrasting runs.

Unbalanced potential at c = c0 / cos(alpha): a V-shaped front forms with arm
slope tan(alpha).  Balanced potential with a single layer: there is no
steady state, and the energy imbalance keeps accumulating while the front
sinks.  Together these take about a minute.
"""
import math

from acwave import diagnostics as D
from acwave import levelset as L
from acwave import solver2d as S
from acwave.potentials import make_potential
from acwave.profiles1d import front_speed

T = make_potential("tilted-quartic", a=0.3)
alpha = math.pi / 6
c = front_speed(T) / math.cos(alpha)
cfg = S.SolveConfig(x_extent=(-30, 30), y_extent=(-8, 26), nx=601, ny=341, dt=0.35,
                    boundary="dirichlet", guess="v-shape")
f, log = S.relax(S.initial_guess(T, c, "v-shape", cfg, alpha=alpha), cfg, T)
r, _, _ = S.recenter(f)
fit = L.fit_asymptotics(L.branch_tables(L.extract_level(r, 0.0), "gamma-of-x"),
                        "line", T, (16.0, 28.0))
print(f"V-shape: {log.status}, arm slope {fit.params['slope']:.4f} "
      f"vs tan(alpha) {math.tan(alpha):.4f}")

P = make_potential("quartic")
wcfg = S.SolveConfig(x_extent=(-10, 10), y_extent=(-150, 30), nx=101, ny=901, dt=0.4,
                     max_steps=400, check_every=50, guess="single-layer")
w = D.nonexistence_witness(P, 1.0, wcfg)
print(f"single layer: {w.status}, monotone flags {w.monotone}")
t = w.table
for k in range(0, len(t["time"]), 2):
    print(f"  t = {t['time'][k]:6.1f}: imbalance {t['imbalance'][k]:.3f}, "
          f"front at y = {t['front_right'][k]:.2f}")
