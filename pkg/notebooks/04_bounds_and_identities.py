"""
Bounds and identities
=====================

Spot checks of the inequalities behind the readout on random probe
states, plus the covariance-integral identity.
"""

# %%
import numpy as np

from qubit_thermometry import BlochVector, QubitHamiltonian
from qubit_thermometry.core import mean_energy, relative_entropy
from qubit_thermometry.inference import (
    covariance_identity_residual,
    error_e1,
    error_e2,
    generalized_free_energy,
    infer_beta_r,
)

h = QubitHamiltonian(1.0)
rng = np.random.default_rng(0)

# %%
gaps_t, gaps_b = [], []
for _ in range(2000):
    v = rng.normal(size=3)
    state = BlochVector.from_array(v / np.linalg.norm(v) * rng.random() ** (1 / 3) * 0.99)
    temperature = rng.uniform(0.2, 2.0)
    readout = infer_beta_r(mean_energy(state, h), h)
    e1 = error_e1(state, readout, temperature, h)
    if e1 is not None:
        gaps_t.append(abs(readout.t_r - temperature) - e1)
    gaps_b.append(abs(readout.beta_r - 1 / temperature) - error_e2(readout.energy, 1 / temperature, h))
print(f"min |T_r - T| - E1       = {min(gaps_t):.3e}   (>= -1e-9 up to rounding)")
print(f"min |beta_r - beta| - E2 = {min(gaps_b):.3e}   (>= -1e-9 up to rounding)")

# %% [markdown]
# The generalized free energy exceeds the reference free energy by T_r D.

# %%
state = BlochVector(0.4, 0.0, -0.4)
readout = infer_beta_r(mean_energy(state, h), h)
lhs = generalized_free_energy(state, readout, h) - readout.free_energy
rhs = readout.t_r * relative_entropy(state, readout.gibbs)
print(f"F_gen - F_r = {lhs:.12f}   T_r D = {rhs:.12f}")

# %% [markdown]
# Energy mismatch equals the contrast times the averaged energy covariance.

# %%
for n in (16, 64, 256):
    print(f"Simpson points {n:4d}: residual {covariance_identity_residual(readout, 2.0, h, n):.2e}")
