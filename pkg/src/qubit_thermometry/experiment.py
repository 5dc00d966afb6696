"""Declarative experiment configs, built-in figure presets, and the readout pipeline.

Config grammar (UTF-8, one ``key = value`` per line, ``#`` starts a comment)::

    [state]          # either populations/coherence ...
    rho11 = 0.3      #   excited-level population
    rho12_re = 0.2
    rho12_im = 0.0
                     # ... or a Bloch vector: rx = ..., ry = ..., rz = ...
    [bath]
    temperature = 0.5
    gamma = 1.0
    gamma0 = 0.0
    [hamiltonian]
    omega = 1.0
    [grid]
    t_start = 0
    t_end = 10
    n_points = 1000
    [thermometry]
    mode = known     # or: interval, with t_min / t_max
    [output]
    columns = t, beta_r, beta_e      # optional subset, written in schema order
    [sweep]
    gamma0 = 0, 0.2, 0.5             # optional: one run per value
"""

from __future__ import annotations

import csv
import dataclasses
import io
import math
import os
import re
from dataclasses import dataclass, field

import numpy as np

from .core import (
    BathSpec,
    BlochVector,
    DomainError,
    GibbsState,
    QubitHamiltonian,
    mean_energy,
    relative_entropy,
    von_neumann_entropy,
)
from .dynamics import analytic_trajectory, rates_from_bath
from .inference import (
    ErrorPair,
    Regime,
    classify_regime,
    corrected_readout,
    covariance_identity_residual,
    effective_beta_e,
    error_e1,
    error_e2,
    infer_beta_r,
    thermal_energy,
    worst_case_errors,
)
from .metrology import dbloch_dT_analytic, qfi_bloch, qfi_closed_form

COLUMNS = (
    "t", "rx", "ry", "rz", "E_p", "S", "S_r", "D_rel", "beta_r", "T_r", "beta_e",
    "E1", "E2", "T_corr", "beta_corr", "qfi_closed", "qfi_bloch", "regime",
)
NA = "NA"


class ConfigError(ValueError):
    """Invalid experiment config; ``violations`` holds ``(line, message)`` pairs."""

    def __init__(self, violations):
        self.violations = list(violations)
        lines = [f"line {ln}: {msg}" if ln else msg for ln, msg in self.violations]
        super().__init__("invalid config:\n  " + "\n  ".join(lines))


class OutputError(OSError):
    """Failure writing results; the message names the destination."""


@dataclass(frozen=True)
class TimeGrid:
    t_start: float = 0.0
    t_end: float = 10.0
    n_points: int = 1000

    def times(self) -> np.ndarray:
        return np.linspace(self.t_start, self.t_end, self.n_points)


@dataclass(frozen=True)
class ExperimentConfig:
    initial_state: BlochVector
    bath: BathSpec
    hamiltonian: QubitHamiltonian = QubitHamiltonian()
    grid: TimeGrid = TimeGrid()
    interval: tuple[float, float] | None = None
    columns: tuple[str, ...] = COLUMNS
    gamma0_sweep: tuple[float, ...] = ()
    name: str = "config"

    @property
    def true_temperature(self) -> float:
        return self.bath.temperature

    def variants(self) -> list[tuple[str, ExperimentConfig]]:
        """Expand the dephasing sweep into ``(label, config)`` pairs."""
        if not self.gamma0_sweep:
            return [("", self)]
        out = []
        for g0 in self.gamma0_sweep:
            bath = dataclasses.replace(self.bath, gamma0=g0)
            out.append((f"gamma0={g0:g}", dataclasses.replace(self, bath=bath, gamma0_sweep=())))
        return out


@dataclass
class OutputRow:
    t: float
    rx: float
    ry: float
    rz: float
    E_p: float
    S: float
    S_r: float | None = None
    D_rel: float | None = None
    beta_r: float | None = None
    T_r: float | None = None
    beta_e: float | None = None
    E1: float | None = None
    E2: float | None = None
    T_corr: float | None = None
    beta_corr: float | None = None
    qfi_closed: float | None = None
    qfi_bloch: float | None = None
    regime: str = field(default=Regime.EQUILIBRATED.value)

    def values(self, columns=COLUMNS) -> list:
        return [getattr(self, c) for c in columns]


# ---------------------------------------------------------------- parsing

_SCHEMA = {
    "state": {"rho11", "rho12_re", "rho12_im", "rx", "ry", "rz"},
    "bath": {"temperature", "gamma", "gamma0"},
    "hamiltonian": {"omega"},
    "grid": {"t_start", "t_end", "n_points"},
    "thermometry": {"mode", "t_min", "t_max"},
    "output": {"columns"},
    "sweep": {"gamma0"},
}
_SECTION = re.compile(r"^\[\s*([A-Za-z_]+)\s*\]$")


def parse_config(text: str, name: str = "config") -> ExperimentConfig:
    """Parse and validate a config; all violations are collected before raising."""
    errors: list[tuple[int, str]] = []
    values: dict[tuple[str, str], tuple[str, int]] = {}
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _SECTION.match(line)
        if m:
            section = m.group(1).lower()
            if section not in _SCHEMA:
                errors.append((lineno, f"unknown section [{section}]"))
            continue
        if "=" not in line:
            errors.append((lineno, f"expected 'key = value', got {line!r}"))
            continue
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.lower()
        if section is None:
            errors.append((lineno, f"key {key!r} outside any section"))
        elif section in _SCHEMA and key not in _SCHEMA[section]:
            errors.append((lineno, f"unknown key {key!r} in [{section}]"))
        elif (section, key) in values:
            errors.append((lineno, f"duplicate key {key!r} in [{section}]"))
        else:
            values[(section, key)] = (value, lineno)

    def number(section, key, default=None, kind=float):
        if (section, key) not in values:
            if default is None:
                errors.append((0, f"missing required key {key!r} in [{section}]"))
            return default
        text_value, ln = values[(section, key)]
        try:
            v = kind(text_value)
        except ValueError:
            errors.append((ln, f"malformed number for {key}: {text_value!r}"))
            return default
        if kind is float and not math.isfinite(v):
            errors.append((ln, f"{key} must be finite"))
            return default
        return v

    def line_of(section, key):
        return values.get((section, key), ("", 0))[1]

    state = _parse_state(values, number, line_of, errors)

    temperature = number("bath", "temperature")
    gamma = number("bath", "gamma")
    gamma0 = number("bath", "gamma0", 0.0)
    if temperature is not None and not temperature > 0:
        errors.append((line_of("bath", "temperature"), "temperature must be positive"))
    if gamma is not None and not gamma > 0:
        errors.append((line_of("bath", "gamma"), "gamma must be positive"))
    if gamma0 is not None and gamma0 < 0:
        errors.append((line_of("bath", "gamma0"), "gamma0 must be non-negative"))

    omega = number("hamiltonian", "omega", 1.0)
    if omega is not None and not omega > 0:
        errors.append((line_of("hamiltonian", "omega"), "omega must be positive"))

    t_start = number("grid", "t_start", 0.0)
    t_end = number("grid", "t_end", 10.0)
    n_points = number("grid", "n_points", 1000, kind=int)
    if t_start is not None and t_start < 0:
        errors.append((line_of("grid", "t_start"), "t_start must be >= 0"))
    if t_start is not None and t_end is not None and not t_end > t_start:
        errors.append((line_of("grid", "t_end"), "t_end must exceed t_start"))
    if n_points is not None and n_points < 2:
        errors.append((line_of("grid", "n_points"), "n_points must be >= 2"))

    interval = None
    mode = values.get(("thermometry", "mode"), ("known", 0))[0].lower()
    if mode == "interval":
        t_min = number("thermometry", "t_min")
        t_max = number("thermometry", "t_max")
        if t_min is not None and t_max is not None:
            if not 0 < t_min <= t_max:
                errors.append((line_of("thermometry", "t_min"), "need 0 < t_min <= t_max"))
            interval = (t_min, t_max)
    elif mode != "known":
        errors.append((line_of("thermometry", "mode"), f"mode must be 'known' or 'interval', got {mode!r}"))

    columns = COLUMNS
    if ("output", "columns") in values:
        text_value, ln = values[("output", "columns")]
        requested = [c.strip() for c in text_value.split(",") if c.strip()]
        unknown = [c for c in requested if c not in COLUMNS]
        if unknown:
            errors.append((ln, f"unknown output columns: {', '.join(unknown)}"))
        columns = tuple(c for c in COLUMNS if c in requested)
        if not columns and not unknown:
            errors.append((ln, "no output columns selected"))

    sweep: tuple[float, ...] = ()
    if ("sweep", "gamma0") in values:
        text_value, ln = values[("sweep", "gamma0")]
        try:
            sweep = tuple(float(v) for v in text_value.split(","))
        except ValueError:
            errors.append((ln, f"malformed sweep values: {text_value!r}"))
        if any(v < 0 for v in sweep):
            errors.append((ln, "sweep gamma0 values must be non-negative"))

    if errors:
        raise ConfigError(errors)
    return ExperimentConfig(
        initial_state=state,
        bath=BathSpec(temperature, gamma, gamma0),
        hamiltonian=QubitHamiltonian(omega),
        grid=TimeGrid(t_start, t_end, n_points),
        interval=interval,
        columns=columns,
        gamma0_sweep=sweep,
        name=name,
    )


def _parse_state(values, number, line_of, errors) -> BlochVector | None:
    keys = {k for (s, k) in values if s == "state"}
    density_keys = keys & {"rho11", "rho12_re", "rho12_im"}
    bloch_keys = keys & {"rx", "ry", "rz"}
    if density_keys and bloch_keys:
        errors.append((line_of("state", sorted(bloch_keys)[0]), "give either density entries or a Bloch vector, not both"))
        return None
    if bloch_keys:
        rx, ry, rz = (number("state", k, 0.0) for k in ("rx", "ry", "rz"))
        if None in (rx, ry, rz):
            return None
        norm = math.sqrt(rx * rx + ry * ry + rz * rz)
        if norm > 1.0 + 1e-12:
            errors.append((line_of("state", sorted(bloch_keys)[0]), f"unphysical state: |r| = {norm:.6g} > 1"))
            return None
        return BlochVector(rx, ry, rz)

    rho11 = number("state", "rho11")
    re12 = number("state", "rho12_re", 0.0)
    im12 = number("state", "rho12_im", 0.0)
    if rho11 is None or re12 is None or im12 is None:
        return None
    ln = line_of("state", "rho11")
    if not 0.0 <= rho11 <= 1.0:
        errors.append((ln, f"unphysical state: rho11 = {rho11} outside [0, 1]"))
        return None
    rho22 = 1.0 - rho11
    coh_sq = re12 * re12 + im12 * im12
    if coh_sq > rho11 * rho22 + 1e-12:
        lowest = 0.5 - math.sqrt(0.25 - rho11 * rho22 + coh_sq)
        errors.append(
            (ln, f"unphysical state: |rho12| = {math.sqrt(coh_sq):.6g} > sqrt(rho11 rho22) = "
                 f"{math.sqrt(rho11 * rho22):.6g} (eigenvalue {lowest:.6g} < 0)")
        )
        return None
    return BlochVector.from_elements(rho11, complex(re12, im12))


def format_config(config: ExperimentConfig) -> str:
    """Render a config in the grammar accepted by :func:`parse_config`."""
    s = config.initial_state
    lines = [
        "[state]", f"rx = {s.rx!r}", f"ry = {s.ry!r}", f"rz = {s.rz!r}",
        "[bath]", f"temperature = {config.bath.temperature!r}", f"gamma = {config.bath.gamma!r}",
        f"gamma0 = {config.bath.gamma0!r}",
        "[hamiltonian]", f"omega = {config.hamiltonian.omega!r}",
        "[grid]", f"t_start = {config.grid.t_start!r}", f"t_end = {config.grid.t_end!r}",
        f"n_points = {config.grid.n_points}",
        "[thermometry]",
    ]
    if config.interval is None:
        lines.append("mode = known")
    else:
        lines += ["mode = interval", f"t_min = {config.interval[0]!r}", f"t_max = {config.interval[1]!r}"]
    if config.columns != COLUMNS:
        lines += ["[output]", "columns = " + ", ".join(config.columns)]
    if config.gamma0_sweep:
        lines += ["[sweep]", "gamma0 = " + ", ".join(repr(v) for v in config.gamma0_sweep)]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- presets

_REFERENCE_BATH = """
[bath]
temperature = 0.5
gamma = 1.0
gamma0 = {gamma0}
[hamiltonian]
omega = 1.0
[grid]
t_start = 0
t_end = 10
n_points = 1000
"""


def _preset(state: str, gamma0: float = 0.0, sweep: str | None = None) -> str:
    text = "[state]\n" + state + _REFERENCE_BATH.format(gamma0=gamma0)
    if sweep:
        text += f"[sweep]\ngamma0 = {sweep}\n"
    return text


def _populations(rho11: float, rho12: float) -> str:
    return f"rho11 = {rho11}\nrho12_re = {rho12}\nrho12_im = 0.0\n"


PRESETS: dict[str, tuple[str, str]] = {
    # rho = I/2 + 0.4 sigma_x - 0.2 sigma_z
    "fig1": (_preset("rx = 0.8\nry = 0.0\nrz = -0.4\n", sweep="0, 0.2, 0.5"),
             "QFI dynamics, coherent initial state, dephasing sweep"),
    "fig1-incoherent": (_preset("rx = 0.0\nry = 0.0\nrz = -0.4\n"),
                        "QFI dynamics, incoherent reference state I/2 - 0.2 sigma_z"),
    # rho = I/2 + 0.2 sigma_x - 0.2 sigma_z
    "fig2": (_preset("rx = 0.4\nry = 0.0\nrz = -0.4\n", sweep="0, 0.5"),
             "reference vs effective temperature, dephasing sweep"),
}
for _panels, (_p11, _c) in zip(("ad", "be", "cf"), ((0.3, 0.2), (0.2, 0.2), (0.1, 0.2))):
    for _panel in _panels:
        PRESETS[f"fig3{_panel}"] = (
            _preset(_populations(_p11, _c)),
            f"corrected readout, populations {_p11}/{1 - _p11:g}, coherence {_c}",
        )
for _panels, (_p11, _c) in zip(("ac", "bd"), ((0.3, 0.3), (0.3, 0.4))):
    for _panel in _panels:
        PRESETS[f"fig4{_panel}"] = (
            _preset(_populations(_p11, _c)),
            f"corrected readout, populations {_p11}/{1 - _p11:g}, coherence {_c}",
        )


def preset_names() -> list[str]:
    return sorted(PRESETS)


def preset_config(name: str) -> ExperimentConfig:
    if name not in PRESETS:
        raise ConfigError([(0, f"unknown preset {name!r}; available: {', '.join(preset_names())}")])
    return parse_config(PRESETS[name][0], name=name)


# ---------------------------------------------------------------- pipeline

def _regime_for(config: ExperimentConfig, initial_energy: float) -> Regime:
    h = config.hamiltonian
    if config.interval is None:
        return classify_regime(initial_energy, thermal_energy(1.0 / config.true_temperature, h))
    # the regime is certain only if the initial energy clears the whole interval
    t_min, t_max = config.interval
    if initial_energy > thermal_energy(1.0 / t_max, h) + 1e-12:
        return Regime.COOLING
    if initial_energy < thermal_energy(1.0 / t_min, h) - 1e-12:
        return Regime.HEATING
    return Regime.EQUILIBRATED


def _guard(fn, *args):
    try:
        return fn(*args)
    except DomainError:
        return None


def run_experiment(config: ExperimentConfig) -> list[OutputRow]:
    """Evaluate the readout pipeline at every grid point of a single-run config.

    Domain failures become ``None`` cells; the run itself never aborts on them.
    A dephasing sweep must be expanded first (see :meth:`ExperimentConfig.variants`).
    """
    if config.gamma0_sweep:
        raise ValueError("config has a gamma0 sweep; run each of config.variants()")
    h = config.hamiltonian
    bath = config.bath
    rates = rates_from_bath(bath, h)
    traj = analytic_trajectory(config.initial_state, rates, h, config.grid.times())
    regime = _regime_for(config, mean_energy(config.initial_state, h))

    rows = []
    for i, t in enumerate(traj.times):
        state = traj.state(i)
        energy = mean_energy(state, h)
        row = OutputRow(
            t=float(t), rx=state.rx, ry=state.ry, rz=state.rz,
            E_p=energy, S=von_neumann_entropy(state), regime=regime.value,
        )
        readout = _guard(infer_beta_r, energy, h)
        if readout is not None:
            row.beta_r = readout.beta_r
            row.T_r = readout.t_r
            row.S_r = readout.entropy
            row.D_rel = _guard(relative_entropy, state, GibbsState(readout.beta_r, h.omega))
            if config.interval is None:
                errors = ErrorPair(
                    error_e1(state, readout, config.true_temperature, h),
                    error_e2(energy, bath.beta, h),
                )
            else:
                errors = worst_case_errors(state, energy, config.interval, h)
            row.E1, row.E2 = errors.e1, errors.e2
            corrected = corrected_readout(readout, errors, regime)
            row.T_corr, row.beta_corr = corrected.t_corr, corrected.beta_corr
        row.beta_e = _guard(effective_beta_e, state, rates, h)
        row.qfi_closed = _guard(qfi_closed_form, config.initial_state, bath, h, float(t))
        row.qfi_bloch = _guard(lambda: qfi_bloch(state, dbloch_dT_analytic(config.initial_state, bath, h, float(t))))
        rows.append(row)
    return rows


def max_covariance_residual(config: ExperimentConfig, rows: list[OutputRow], n_quadrature: int = 256) -> float | None:
    """Largest residual of the covariance-integral identity over the run's readouts."""
    h = config.hamiltonian
    worst = None
    for row in rows:
        if row.beta_r is None:
            continue
        readout = infer_beta_r(row.E_p, h)
        res = covariance_identity_residual(readout, config.bath.beta, h, n_quadrature)
        worst = res if worst is None else max(worst, res)
    return worst


def _format_cell(value) -> str:
    if value is None:
        return NA
    if isinstance(value, str):
        return value
    if isinstance(value, float) and not math.isfinite(value):
        return NA
    # + 0.0 folds negative zero
    return format(float(value) + 0.0, ".17g")


def emit_csv(table: list[OutputRow], destination, columns=COLUMNS) -> None:
    """Write rows as CSV: fixed header, 17 significant digits, ``NA`` for undefined, LF endings.

    ``destination`` is a path or a text stream.
    """
    columns = tuple(c for c in COLUMNS if c in columns)
    if hasattr(destination, "write"):
        _write_rows(table, destination, columns)
        return
    path = os.fspath(destination)
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            _write_rows(table, fh, columns)
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc.strerror or exc}") from exc


def _write_rows(table, fh, columns) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(columns)
    for row in table:
        writer.writerow([_format_cell(v) for v in row.values(columns)])


def csv_text(table: list[OutputRow], columns=COLUMNS) -> str:
    buf = io.StringIO()
    emit_csv(table, buf, columns)
    return buf.getvalue()
