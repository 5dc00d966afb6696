"""
Corrected dynamical temperature
===============================

Run the full readout on the figure presets and watch the error-function
correction pull the reference readout towards the bath temperature.
"""

# %%
from qubit_thermometry.experiment import csv_text, preset_config, run_experiment

rows = run_experiment(preset_config("fig3a"))
print("regime:", rows[0].regime)
print("    t      T_r      T_corr       E1")
for row in rows[::111]:
    print(f"{row.t:5.2f}  {row.T_r:.6f}  {row.T_corr:.6f}  {row.E1:.2e}")

# %% [markdown]
# Coherence changes E1 but not E2: E2 only sees the populations.

# %%
low = run_experiment(preset_config("fig4a"))
high = run_experiment(preset_config("fig4b"))
print("max |dE2| across coherences:", max(abs(a.E2 - b.E2) for a, b in zip(low, high)))
print("max |dE1| across coherences:", max(abs(a.E1 - b.E1) for a, b in zip(low, high)))

# %% [markdown]
# The same rows serialize to the CSV the CLI writes.

# %%
print(csv_text(rows[:3], columns=("t", "T_r", "T_corr", "regime")))
