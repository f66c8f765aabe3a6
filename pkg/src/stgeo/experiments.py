"""Experiment pipelines behind the command-line runner.

Each pipeline takes an :class:`ExperimentConfig` and returns an
:class:`ExperimentReport` of column-labelled tables and summary scalars.
Writing files is left to :func:`write_report`.
"""

from __future__ import annotations

import math
import os
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .benchmarking import GateStyle, RBConfig, build_clifford_table, interleaved_rb, standard_rb
from .config import ExperimentConfig
from .filterfn import ff_fidelity, filter_function
from .linalg import axis_angle_unitary
from .noise import NoiseSpectrum, calibrate_amplitude, quasistatic_sweep
from .synthesis import compile_geometric, compile_naive
from .twoqubit import two_qubit_table

REFERENCE_GATES = {
    "y": axis_angle_unitary((0, 1, 0), math.pi / 4),
    "z": axis_angle_unitary((0, 0, 1), math.pi / 4),
}


@dataclass
class Table:
    columns: tuple
    rows: np.ndarray


@dataclass
class ExperimentReport:
    experiment: str
    config_echo: str
    tables: dict = field(default_factory=dict)
    summary: dict = field(default_factory=dict)
    wall_clock: float = 0.0
    seed: int = 0
    version: str = __version__


def _gate_pairs():
    for name, u in REFERENCE_GATES.items():
        yield name, compile_naive(u, f"naive_{name}"), compile_geometric(u, f"geometric_{name}"), u


def run_pulses(cfg: ExperimentConfig, rep: ExperimentReport):
    for name, nai, geo, _ in _gate_pairs():
        for style, sched in (("naive", nai), ("geometric", geo)):
            t, J = sched.pulse_shape()
            rep.tables[f"{style}_{name}"] = Table(("t_t0", "J_h"), np.column_stack([t, J]))
            rep.summary[f"duration_{style}_{name}"] = sched.duration


def run_quasistatic(cfg: ExperimentConfig, rep: ExperimentReport):
    sw = cfg.sweep
    grid = np.linspace(-sw.quasistatic_max, sw.quasistatic_max, sw.quasistatic_points)
    for name, nai, geo, u in _gate_pairs():
        fn = [f for _, f in quasistatic_sweep(u, nai, grid)]
        fg = [f for _, f in quasistatic_sweep(u, geo, grid)]
        rep.tables[f"quasistatic_{name}"] = Table(
            ("delta_eps", "F_naive", "F_geometric"), np.column_stack([grid, fn, fg])
        )
        rep.summary[f"min_F_naive_{name}"] = min(fn)
        rep.summary[f"min_F_geometric_{name}"] = min(fg)


def run_filterfn(cfg: ExperimentConfig, rep: ExperimentReport):
    spec = cfg.spectrum()
    omega = np.geomspace(1e-7, 1e-3, 400)
    for name, nai, geo, _ in _gate_pairs():
        fn = filter_function(nai, omega).values
        fg = filter_function(geo, omega).values
        rep.tables[f"filter_{name}"] = Table(("omega_t0", "F_naive", "F_geometric"),
                                             np.column_stack([omega, fn, fg]))
        rep.summary[f"ff_fidelity_naive_{name}"] = ff_fidelity(nai, spec)
        rep.summary[f"ff_fidelity_geometric_{name}"] = ff_fidelity(geo, spec)


def _rb_config(cfg: ExperimentConfig, style: GateStyle, spectrum: NoiseSpectrum | None = None):
    return RBConfig(spectrum or cfg.spectrum(), cfg.rb.lengths, cfg.rb.realizations, style,
                    cfg.master_seed)


def _rb_table(res) -> Table:
    return Table(("n", "mean_fidelity", "std_error"),
                 np.column_stack([res.lengths, res.mean_fidelities, res.std_errors]))


def run_rb_standard(cfg: ExperimentConfig, rep: ExperimentReport):
    for style in GateStyle:
        res = standard_rb(_rb_config(cfg, style))
        rep.tables[f"rb_{style.value}"] = _rb_table(res)
        rep.summary[f"d_{style.value}"] = res.fitted_d
        rep.summary[f"F_avg_{style.value}"] = res.F_avg
        rep.summary[f"fit_rms_{style.value}"] = res.residual_rms


def run_rb_interleaved(cfg: ExperimentConfig, rep: ExperimentReport):
    for style in GateStyle:
        table = build_clifford_table(style)
        rbc = _rb_config(cfg, style)
        ref = standard_rb(rbc, table)
        rep.tables[f"rb_{style.value}"] = _rb_table(ref)
        for name, u in REFERENCE_GATES.items():
            f_in, _, it = interleaved_rb(u, rbc, table, ref)
            rep.tables[f"rb_{style.value}_interleaved_{name}"] = _rb_table(it)
            rep.summary[f"F_interleaved_{style.value}_{name}"] = f_in
            for note in it.anomalies:
                rep.summary[f"anomaly_{style.value}_{name}"] = note


def run_error_vs_amplitude(cfg: ExperimentConfig, rep: ExperimentReport):
    tables = {s: build_clifford_table(s) for s in GateStyle}
    for alpha in sorted({1.0, 2.0, cfg.noise.alpha}):
        rows = []
        for amp in cfg.sweep.amplitudes:
            spec = cfg.spectrum(amplitude=amp, alpha=alpha)
            ds = [standard_rb(_rb_config(cfg, s, spec), tables[s]).fitted_d for s in GateStyle]
            rows.append([amp, *ds])
        rep.tables[f"error_alpha_{alpha:g}"] = Table(("amplitude", "d_naive", "d_geometric"),
                                                     np.array(rows))


def kappa_amplitude(cfg: ExperimentConfig, alpha: float) -> float:
    """Amplitude at exponent ``alpha`` with the band variance of the reference point."""
    ref = cfg.spectrum(amplitude=cfg.sweep.kappa_reference_amplitude, alpha=1.0)
    return calibrate_amplitude(math.sqrt(ref.variance), alpha, ref.omega_ir, ref.omega_uv)


def run_kappa_vs_alpha(cfg: ExperimentConfig, rep: ExperimentReport):
    tables = {s: build_clifford_table(s) for s in GateStyle}
    rows = []
    for alpha in cfg.sweep.alphas:
        amp = kappa_amplitude(cfg, alpha)
        spec = cfg.spectrum(amplitude=amp, alpha=alpha)
        d_n, d_g = (standard_rb(_rb_config(cfg, s, spec), tables[s]).fitted_d for s in GateStyle)
        rows.append([alpha, amp, d_n, d_g, d_n / d_g if d_g > 0 else math.inf])
    rep.tables["kappa"] = Table(("alpha", "amplitude", "d_naive", "d_geometric", "kappa"),
                                np.array(rows))


def run_two_qubit_table(cfg: ExperimentConfig, rep: ExperimentReport):
    rows = two_qubit_table(cfg.spectrum(), gamma=cfg.gate.entangling_gamma)
    rep.tables["table"] = Table(
        ("chi", "F1_nai", "F1_geo", "F2_nai", "F2_geo", "F_nai", "F_geo"),
        np.array([[r.chi, r.F1_nai, r.F1_geo, r.F2_nai, r.F2_geo, r.F_nai, r.F_geo] for r in rows]),
    )
    for r in rows:
        rep.summary[f"F_geo_chi_{r.chi:+.4f}"] = r.F_geo
        rep.summary[f"F_nai_chi_{r.chi:+.4f}"] = r.F_nai


PIPELINES = {
    "pulses": run_pulses,
    "quasistatic": run_quasistatic,
    "filterfn": run_filterfn,
    "rb_standard": run_rb_standard,
    "rb_interleaved": run_rb_interleaved,
    "error_vs_amplitude": run_error_vs_amplitude,
    "kappa_vs_alpha": run_kappa_vs_alpha,
    "two_qubit_table": run_two_qubit_table,
}


def run(cfg: ExperimentConfig) -> ExperimentReport:
    rep = ExperimentReport(cfg.experiment, cfg.to_ini(), seed=cfg.master_seed)
    start = time.perf_counter()
    PIPELINES[cfg.experiment](cfg, rep)
    rep.wall_clock = time.perf_counter() - start
    return rep


def _format_value(v) -> str:
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def write_report(rep: ExperimentReport, out_dir: str) -> str:
    """Write ``<out>/<experiment>/`` with one CSV per table, summary and echo."""
    target = os.path.join(out_dir, rep.experiment)
    os.makedirs(target, exist_ok=True)
    for name, table in rep.tables.items():
        path = os.path.join(target, f"{name}.csv")
        with open(path, "w", newline="\n") as fh:
            fh.write(",".join(table.columns) + "\n")
            for row in np.atleast_2d(table.rows):
                fh.write(",".join(f"{x:.12e}" for x in row) + "\n")
    with open(os.path.join(target, "summary.txt"), "w") as fh:
        fh.write(f"experiment = {rep.experiment}\n")
        fh.write(f"version = {rep.version}\n")
        fh.write(f"seed = {rep.seed}\n")
        fh.write(f"wall_clock_s = {rep.wall_clock:.3f}\n")
        for k, v in rep.summary.items():
            fh.write(f"{k} = {_format_value(v)}\n")
    with open(os.path.join(target, "config.echo"), "w") as fh:
        fh.write(rep.config_echo)
    return target
