"""Flat INI experiment configuration with validation and a lossless echo."""

from __future__ import annotations

import configparser
import math
from dataclasses import asdict, dataclass, field, fields

from .noise import NoiseSpectrum, t0_seconds
from .pulses import J_MAX

EXPERIMENTS = (
    "pulses",
    "quasistatic",
    "filterfn",
    "rb_standard",
    "rb_interleaved",
    "error_vs_amplitude",
    "kappa_vs_alpha",
    "two_qubit_table",
)


class ConfigError(ValueError):
    """Unreadable or invalid configuration."""


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in text.replace(",", " ").split())


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.replace(",", " ").split())


def _fmt(value) -> str:
    if isinstance(value, tuple):
        return ", ".join(_fmt(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


@dataclass(frozen=True)
class PhysicalSection:
    h_ghz: float = 1.0
    J0: float = 1.0
    epsilon0: float = 0.272


@dataclass(frozen=True)
class NoiseSection:
    amplitude: float = 1e-4
    alpha: float = 1.0
    f_ir_hz: float = 50e3
    f_uv_hz: float = 1e6


@dataclass(frozen=True)
class RBSection:
    lengths: tuple = (2, 4, 8, 16, 32, 64, 128, 256, 512)
    realizations: int = 1000


@dataclass(frozen=True)
class GateSection:
    theta: float = math.pi / 2
    gamma: float = math.pi / 4
    chi: float = 0.0
    entangling_gamma: float = math.pi / 2


@dataclass(frozen=True)
class SweepSection:
    amplitudes: tuple = (1e-5, 3e-5, 1e-4, 3e-4, 1e-3)
    alphas: tuple = (0.8, 1.0, 1.5, 2.0, 2.85)
    # kappa sweeps hold the band variance at that of this amplitude with alpha = 1
    kappa_reference_amplitude: float = 1e-4
    quasistatic_points: int = 41
    quasistatic_max: float = 0.1


_SECTIONS = {
    "physical": PhysicalSection,
    "noise": NoiseSection,
    "rb": RBSection,
    "gate": GateSection,
    "sweep": SweepSection,
}


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str = "pulses"
    master_seed: int = 0
    output_dir: str = "out"
    physical: PhysicalSection = field(default_factory=PhysicalSection)
    noise: NoiseSection = field(default_factory=NoiseSection)
    rb: RBSection = field(default_factory=RBSection)
    gate: GateSection = field(default_factory=GateSection)
    sweep: SweepSection = field(default_factory=SweepSection)

    def spectrum(self, amplitude: float | None = None, alpha: float | None = None) -> NoiseSpectrum:
        n = self.noise
        return NoiseSpectrum.from_hz(
            n.amplitude if amplitude is None else amplitude,
            n.alpha if alpha is None else alpha,
            n.f_ir_hz, n.f_uv_hz, self.physical.h_ghz,
        )

    def to_ini(self) -> str:
        cp = configparser.ConfigParser()
        cp.optionxform = str
        cp["run"] = {
            "experiment": self.experiment,
            "master_seed": str(self.master_seed),
            "output_dir": self.output_dir,
        }
        for name in _SECTIONS:
            cp[name] = {k: _fmt(v) for k, v in asdict(getattr(self, name)).items()}
        lines = []
        for sec in cp.sections():
            lines.append(f"[{sec}]")
            lines.extend(f"{k} = {v}" for k, v in cp[sec].items())
            lines.append("")
        return "\n".join(lines)


def _parse_section(cls, items: dict, where: str):
    kwargs = {}
    known = {f.name: f for f in fields(cls)}
    for key, raw in items.items():
        if key not in known:
            raise ConfigError(f"unknown key '{key}' in [{where}]")
        default = getattr(cls(), key)
        try:
            if isinstance(default, tuple):
                kwargs[key] = _ints(raw) if all(isinstance(x, int) for x in default) else _floats(raw)
            elif isinstance(default, int):
                kwargs[key] = int(raw)
            else:
                kwargs[key] = float(raw)
        except ValueError as exc:
            raise ConfigError(f"[{where}] {key} = {raw!r}: {exc}") from None
    return cls(**kwargs)


def parse_config(text: str, experiment: str | None = None) -> ExperimentConfig:
    """Parse INI text; ``experiment`` overrides ``[run] experiment``."""
    cp = configparser.ConfigParser()
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from None
    for sec in cp.sections():
        if sec != "run" and sec not in _SECTIONS:
            raise ConfigError(f"unknown section [{sec}]")
    run = dict(cp["run"]) if cp.has_section("run") else {}
    for key in run:
        if key not in ("experiment", "master_seed", "output_dir"):
            raise ConfigError(f"unknown key '{key}' in [run]")
    kwargs = {}
    if experiment is not None:
        kwargs["experiment"] = experiment
    elif "experiment" in run:
        kwargs["experiment"] = run["experiment"]
    if "master_seed" in run:
        try:
            kwargs["master_seed"] = int(run["master_seed"])
        except ValueError:
            raise ConfigError(f"master_seed must be an integer, got {run['master_seed']!r}") from None
    if "output_dir" in run:
        kwargs["output_dir"] = run["output_dir"]
    for name, cls in _SECTIONS.items():
        if cp.has_section(name):
            kwargs[name] = _parse_section(cls, dict(cp[name]), name)
    return ExperimentConfig(**kwargs)


def validate(cfg: ExperimentConfig) -> list[str]:
    """All range problems at once; an empty list means the config is usable."""
    out = []
    if cfg.experiment not in EXPERIMENTS:
        out.append(f"unknown experiment '{cfg.experiment}' (choose from {', '.join(EXPERIMENTS)})")
    p, n, rb, g, sw = cfg.physical, cfg.noise, cfg.rb, cfg.gate, cfg.sweep
    if p.h_ghz <= 0:
        out.append(f"h_ghz must be positive, got {p.h_ghz}")
    if p.J0 <= 0 or p.epsilon0 <= 0:
        out.append(f"J0 and epsilon0 must be positive, got J0={p.J0}, epsilon0={p.epsilon0}")
    if not (0 < n.f_ir_hz < n.f_uv_hz):
        out.append(
            f"noise cutoffs must satisfy 0 < omega_ir < omega_uv "
            f"(got omega_ir={n.f_ir_hz:g} Hz, omega_uv={n.f_uv_hz:g} Hz)"
        )
    if n.amplitude < 0:
        out.append(f"noise amplitude must be >= 0, got {n.amplitude}")
    if n.alpha < 0:
        out.append(f"noise alpha must be >= 0, got {n.alpha}")
    if rb.realizations < 1:
        out.append(f"rb realizations must be >= 1, got {rb.realizations}")
    if not rb.lengths or any(x < 1 for x in rb.lengths) or any(
            b <= a for a, b in zip(rb.lengths, rb.lengths[1:])):
        out.append(f"rb lengths must be positive and strictly increasing, got {list(rb.lengths)}")
    gamma = g.gamma % (2 * math.pi)
    if gamma > math.pi:
        gamma = 2 * math.pi - gamma
    if abs(math.cos(gamma / 2)) < 1e-12 or math.tan(min(gamma, math.pi - 1e-15) / 2) > J_MAX:
        out.append(
            f"gate gamma={g.gamma:g} is not representable as a single geometric gate "
            f"(tan(gamma/2) diverges at pi; J_max={J_MAX:.4g})"
        )
    if not (0 < g.entangling_gamma < math.pi):
        out.append(f"entangling_gamma must lie in (0, pi), got {g.entangling_gamma}")
    if any(a <= 0 for a in sw.amplitudes):
        out.append("sweep amplitudes must be positive")
    if any(a < 0 for a in sw.alphas):
        out.append("sweep alphas must be >= 0")
    if sw.quasistatic_points < 2 or sw.quasistatic_max <= 0:
        out.append("quasistatic sweep needs >= 2 points and a positive range")
    if cfg.master_seed < 0:
        out.append(f"master_seed must be >= 0, got {cfg.master_seed}")
    return out


def internal_cutoffs(cfg: ExperimentConfig) -> tuple[float, float]:
    t0 = t0_seconds(cfg.physical.h_ghz)
    return 2 * math.pi * cfg.noise.f_ir_hz * t0, 2 * math.pi * cfg.noise.f_uv_hz * t0
