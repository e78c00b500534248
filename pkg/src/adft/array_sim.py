"""Receive-chain simulation for a 32-element linear array.

Pipeline per arrival angle: IF synthesis at each element (ideal mixer and
low-pass, so only the IF tone survives), FIR Hilbert IQ decomposition,
per-channel complex calibration, a 32-point spatial transform on every
snapshot and energy integration at each bin output.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np
from scipy import signal as sps

from .beampattern import SPEED_OF_LIGHT, BeamGrid
from .fastalg import apply_fast, builtin_adft32_factorization
from .transforms import TransformDimensionError, adft32_matrix, dft_matrix

__all__ = [
    "ENGINES",
    "BinEnergyReport",
    "ChainConfig",
    "apply_calibration",
    "bin_energy_sweep",
    "element_phases",
    "estimate_calibration",
    "hilbert_fir",
    "hilbert_iq",
    "integrate_bin_energy",
    "load_config",
    "spatial_transform_per_snapshot",
    "synthesize_element_signals",
]

ENGINES = ("dense_exact", "dense_adft", "fast_adft")


def _complex_tuple(values) -> tuple[complex, ...] | None:
    if values is None:
        return None
    out = []
    for v in values:
        if isinstance(v, (list, tuple)):
            v = complex(v[0], v[1])
        elif isinstance(v, str):
            v = complex(v.replace("i", "j"))
        out.append(complex(v))
    return tuple(out)


@dataclass(frozen=True)
class ChainConfig:
    """Receive-chain parameters.

    Frequencies in Hz, ``dx`` in wavelengths at ``f_rf``.  ``calibration`` is
    the per-channel complex weight applied after IQ decomposition;
    ``channel_mismatch`` is the gain/phase error each analog chain injects.
    ``snr_db`` adds white noise at each element when set.
    """

    f_rf: float = 5.86e9
    f_lo: float = 5.85e9
    f_clk: float = 200e6
    n_elements: int = 32
    dx: float = 0.5
    hilbert_taps: int = 63
    calibration: tuple[complex, ...] | None = None
    snapshots: int = 4096
    source_range: float = math.inf
    channel_mismatch: tuple[complex, ...] | None = None
    snr_db: float | None = None
    element_exponent: float | None = None
    spreading: bool = True
    seed: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "calibration", _complex_tuple(self.calibration))
        object.__setattr__(self, "channel_mismatch", _complex_tuple(self.channel_mismatch))
        if not self.f_rf > self.f_lo:
            raise ValueError("f_rf must exceed f_lo")
        if not 0 < self.f_if < self.f_clk / 2:
            raise ValueError(
                f"IF {self.f_if:g} Hz is outside the first Nyquist zone of a {self.f_clk:g} Hz clock"
            )
        if self.hilbert_taps < 3 or self.hilbert_taps % 2 == 0:
            raise ValueError("hilbert_taps must be odd and >= 3")
        if self.n_elements < 1 or self.snapshots < 1:
            raise ValueError("n_elements and snapshots must be positive")
        if not self.dx > 0 or not self.source_range > 0:
            raise ValueError("dx and source_range must be positive")
        for name in ("calibration", "channel_mismatch"):
            vals = getattr(self, name)
            if vals is not None and len(vals) != self.n_elements:
                raise ValueError(f"{name} needs {self.n_elements} entries, got {len(vals)}")

    @property
    def f_if(self) -> float:
        return self.f_rf - self.f_lo

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.f_rf

    def weights(self) -> np.ndarray:
        if self.calibration is None:
            return np.ones(self.n_elements, dtype=np.complex128)
        return np.array(self.calibration, dtype=np.complex128)

    def to_dict(self) -> dict:
        d = asdict(self)
        for name in ("calibration", "channel_mismatch"):
            if d[name] is not None:
                d[name] = [[v.real, v.imag] for v in d[name]]
        if math.isinf(d["source_range"]):
            d["source_range"] = "inf"
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "ChainConfig":
        data = dict(data)
        if "source_range" in data:
            data["source_range"] = float(data["source_range"])
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown chain config fields: {sorted(unknown)}")
        return cls(**data)


def load_config(path) -> ChainConfig:
    """Read a chain config from a JSON or TOML file."""
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".toml":
        try:
            import tomllib
        except ModuleNotFoundError:  # Python < 3.11
            import tomli as tomllib
        data = tomllib.loads(text)
        data = data.get("chain", data)
    else:
        data = json.loads(text)
    return ChainConfig.from_dict(data)


# -- synthesis -----------------------------------------------------------------


def element_phases(config: ChainConfig, azimuth_deg: float) -> tuple[np.ndarray, np.ndarray]:
    """Per-element (amplitude, phase) of the arriving wave, referenced to the array centre."""
    n = np.arange(config.n_elements)
    theta = math.radians(azimuth_deg)
    lam = config.wavelength
    xn = (n - (config.n_elements - 1) / 2) * config.dx * lam
    kw = 2 * np.pi / lam
    if math.isinf(config.source_range):
        amp = np.ones(config.n_elements)
        phase = kw * xn * math.sin(theta)
    else:
        r = config.source_range
        d = np.hypot(r * math.sin(theta) - xn, r * math.cos(theta))
        phase = -kw * (d - r)
        amp = r / d if config.spreading else np.ones(config.n_elements)
    if config.element_exponent is not None:
        amp = amp * max(math.cos(theta), 0.0) ** config.element_exponent
    return amp, phase


def synthesize_element_signals(
    config: ChainConfig, arrival_azimuth: float, duration_samples: int | None = None, rng=None
) -> np.ndarray:
    """Real IF samples, shape ``(n_elements, duration_samples)``."""
    if duration_samples is None:
        duration_samples = config.snapshots + config.hilbert_taps - 1
    amp, phase = element_phases(config, arrival_azimuth)
    if config.channel_mismatch is not None:
        g = np.array(config.channel_mismatch)
        amp = amp * np.abs(g)
        phase = phase + np.angle(g)
    t = np.arange(duration_samples) / config.f_clk
    x = amp[:, None] * np.cos(2 * np.pi * config.f_if * t[None, :] + phase[:, None])
    if config.snr_db is not None:
        rng = np.random.default_rng(config.seed) if rng is None else rng
        sigma = math.sqrt(0.5 / 10 ** (config.snr_db / 10))
        x = x + rng.normal(0.0, sigma, size=x.shape)
    return x


# -- IQ decomposition and calibration -------------------------------------------


def hilbert_fir(taps: int, beta: float = 8.0) -> np.ndarray:
    """Kaiser-windowed ideal Hilbert transformer with ``taps`` (odd) coefficients."""
    if taps < 3 or taps % 2 == 0:
        raise ValueError("taps must be odd and >= 3")
    m = np.arange(taps) - (taps - 1) // 2
    h = np.zeros(taps)
    odd = m % 2 != 0
    h[odd] = 2 / (np.pi * m[odd])
    return h * np.kaiser(taps, beta)


def hilbert_iq(stream, taps: int = 63, beta: float = 8.0) -> np.ndarray:
    """Analytic signal of a real stream (last axis is time).

    Q comes from the FIR Hilbert filter; I is the input delayed by the filter's
    group delay ``(taps - 1) / 2``.  The first ``taps - 1`` outputs are a
    start-up transient.
    """
    x = np.asarray(stream, dtype=float)
    h = hilbert_fir(taps, beta)
    delay = (taps - 1) // 2
    q = sps.lfilter(h, 1.0, x, axis=-1)
    i = np.zeros_like(x)
    if x.shape[-1] > delay:
        i[..., delay:] = x[..., : x.shape[-1] - delay]
    return i + 1j * q


def apply_calibration(signals, weights) -> np.ndarray:
    """Multiply each channel (row) by its complex weight."""
    s = np.asarray(signals, dtype=np.complex128)
    w = np.asarray(weights, dtype=np.complex128)
    if s.ndim != 2 or w.shape != (s.shape[0],):
        raise TransformDimensionError(f"need one weight per channel: signals {s.shape}, weights {w.shape}")
    return s * w[:, None]


def estimate_calibration(signals, reference_channel: int = 0, tone_frequency: float | None = None) -> np.ndarray:
    """Weights equalizing every channel's complex amplitude to the reference channel.

    ``signals`` are IQ streams of a common reference tone, shape
    ``(channels, samples)``; exclude filter transients beforehand.

    With ``tone_frequency`` (cycles per sample) the amplitudes come from a
    least-squares fit of the tone and its image, which removes the small
    bias left by a non-ideal Hilbert filter.  Otherwise each channel is
    projected onto the reference channel.
    """
    s = np.asarray(signals, dtype=np.complex128)
    if tone_frequency is not None:
        t = np.arange(s.shape[1])
        basis = np.stack([np.exp(2j * np.pi * tone_frequency * t), np.exp(-2j * np.pi * tone_frequency * t)], axis=1)
        coef, *_ = np.linalg.lstsq(basis, s.T, rcond=None)
        amp = coef[0]
        if amp[reference_channel] == 0:
            raise ValueError("reference channel carries no signal")
        rel = amp / amp[reference_channel]
    else:
        ref = s[reference_channel]
        power = np.vdot(ref, ref).real
        if power == 0:
            raise ValueError("reference channel carries no signal")
        rel = (s @ ref.conj()) / power
    if np.any(rel == 0):
        raise ValueError("a channel carries no signal; cannot calibrate it")
    return 1.0 / rel


# -- spatial transform and integration ------------------------------------------

_FAST = None


def spatial_transform_per_snapshot(signals, engine: str = "fast_adft") -> np.ndarray:
    """Apply a 32-point transform across elements at every snapshot: ``(32, T) -> (32, T)``."""
    global _FAST
    s = np.asarray(signals, dtype=np.complex128)
    if s.ndim != 2 or s.shape[0] != 32:
        raise TransformDimensionError(f"expected shape (32, T), got {s.shape}")
    if engine == "dense_exact":
        return dft_matrix(32).to_complex() @ s
    if engine == "dense_adft":
        return adft32_matrix().to_complex() @ s
    if engine == "fast_adft":
        if _FAST is None:
            _FAST = builtin_adft32_factorization()
        return apply_fast(_FAST, s)
    raise ValueError(f"unknown engine {engine!r}; choose from {ENGINES}")


@dataclass(frozen=True)
class BinEnergyReport:
    per_bin_energy: np.ndarray
    integration_snapshots: int

    def normalized_db(self) -> np.ndarray:
        e = np.asarray(self.per_bin_energy, dtype=float)
        peak = e.max()
        with np.errstate(divide="ignore"):
            return 10 * np.log10(e / peak) if peak > 0 else np.full_like(e, -np.inf)

    def to_csv(self) -> str:
        lines = ["bin,energy,dB"]
        for k, (e, db) in enumerate(zip(self.per_bin_energy, self.normalized_db())):
            lines.append(f"{k},{e:.10e},{db:.6f}")
        return "\n".join(lines) + "\n"


def integrate_bin_energy(bin_signals) -> BinEnergyReport:
    """Sum of ``|y_k[t]|**2`` over snapshots for every bin."""
    y = np.asarray(bin_signals)
    return BinEnergyReport(np.sum(np.abs(y) ** 2, axis=1), y.shape[1])


def _process_angle(config: ChainConfig, azimuth: float, engine: str, rng) -> np.ndarray:
    raw = synthesize_element_signals(config, azimuth, rng=rng)
    iq = hilbert_iq(raw, config.hilbert_taps)[:, config.hilbert_taps - 1 :]
    iq = apply_calibration(iq, config.weights())
    return integrate_bin_energy(spatial_transform_per_snapshot(iq, engine)).per_bin_energy


def bin_energy_sweep(config: ChainConfig, azimuth_grid, engine: str = "fast_adft") -> BeamGrid:
    """Integrated bin energies versus arrival azimuth (degrees), as a power BeamGrid."""
    if config.n_elements != 32:
        raise ValueError("the spatial transforms are 32-point")
    if engine not in ENGINES:
        raise ValueError(f"unknown engine {engine!r}; choose from {ENGINES}")
    az = np.asarray(azimuth_grid, dtype=float)
    seeds = np.random.SeedSequence(config.seed).spawn(az.size) if config.snr_db is not None else [None] * az.size
    energies = np.empty((32, az.size))
    for i, (a, seed) in enumerate(zip(az, seeds)):
        rng = np.random.default_rng(seed) if seed is not None else None
        energies[:, i] = _process_angle(config, float(a), engine, rng)
    return BeamGrid((az,), energies, ("azimuth_deg",), quantity="power")
