"""
QFI of a relaxing qubit thermometer
===================================

A qubit probe is dropped into a bath at T = 0.5 and relaxes towards its
Gibbs state. How much information about T does it carry along the way?
"""

# %%
import numpy as np

from qubit_thermometry import BathSpec, BlochVector, QubitHamiltonian
from qubit_thermometry.metrology import qfi_closed_form, thermal_qfi

h = QubitHamiltonian(omega=1.0)
coherent = BlochVector(0.8, 0.0, -0.4)      # rho = I/2 + 0.4 sx - 0.2 sz
incoherent = BlochVector(0.0, 0.0, -0.4)    # same populations, no coherence
times = np.linspace(0.0, 10.0, 41)

# %% [markdown]
# The equilibrium benchmark is the thermal QFI, C / T^2.

# %%
f_thermal = thermal_qfi(BathSpec(0.5, 1.0), h)
print(f"thermal QFI at T = 0.5: {f_thermal:.6f}")

# %% [markdown]
# Without dephasing, the coherent probe beats both its incoherent twin and
# the equilibrium value over a finite window. Dephasing erases the edge.

# %%
for gamma0 in (0.0, 0.2, 0.5):
    bath = BathSpec(0.5, 1.0, gamma0)
    f_coh = np.array([qfi_closed_form(coherent, bath, h, t) for t in times])
    f_inc = np.array([qfi_closed_form(incoherent, bath, h, t) for t in times])
    above = times[(f_coh > f_inc) & (f_coh > f_thermal)]
    window = f"t in [{above.min():.2f}, {above.max():.2f}]" if above.size else "never"
    print(f"gamma0 = {gamma0:<4}  max F = {f_coh.max():.6f}  beats both: {window}")

# %%
print("\n   t    F_coherent  F_incoherent")
bath = BathSpec(0.5, 1.0, 0.0)
for t in times[::4]:
    print(f"{t:5.2f}  {qfi_closed_form(coherent, bath, h, t):10.6f}  {qfi_closed_form(incoherent, bath, h, t):10.6f}")
