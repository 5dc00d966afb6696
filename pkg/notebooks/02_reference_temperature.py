"""
Reference versus effective temperature
======================================

The reference temperature only needs the probe's mean energy. We compare
it with the conventional dS/dE temperature along a relaxation with and
without dephasing.
"""

# %%
import numpy as np

from qubit_thermometry import BathSpec, BlochVector, QubitHamiltonian
from qubit_thermometry.core import mean_energy
from qubit_thermometry.dynamics import analytic_trajectory, rates_from_bath
from qubit_thermometry.inference import effective_beta_e, infer_beta_r

h = QubitHamiltonian(1.0)
start = BlochVector(0.4, 0.0, -0.4)
times = np.linspace(0.0, 10.0, 11)

# %%
for gamma0 in (0.0, 0.5):
    rates = rates_from_bath(BathSpec(0.5, 1.0, gamma0), h)
    traj = analytic_trajectory(start, rates, h, times)
    print(f"\ngamma0 = {gamma0}   (bath beta = 2)")
    print("   t    beta_r     beta_e")
    for i, t in enumerate(times):
        state = traj.state(i)
        beta_r = infer_beta_r(mean_energy(state, h), h).beta_r
        beta_e = effective_beta_e(state, rates, h)
        shown = "undefined" if beta_e is None else f"{beta_e:9.5f}"
        print(f"{t:5.1f}  {beta_r:8.5f}  {shown}")

# %% [markdown]
# beta_r is blind to coherence: two probes with the same populations give
# the very same reference series, whatever their transverse components.

# %%
rates = rates_from_bath(BathSpec(0.5, 1.0, 0.2), h)
a = analytic_trajectory(BlochVector(0.0, 0.0, -0.4), rates, h, times)
b = analytic_trajectory(BlochVector(0.6, 0.3, -0.4), rates, h, times)
same = all(
    infer_beta_r(mean_energy(a.state(i), h), h).beta_r == infer_beta_r(mean_energy(b.state(i), h), h).beta_r
    for i in range(len(times))
)
print("\nidentical beta_r series:", same)
