"""Filter-bank responses and array beam patterns of spatial transforms.

Sign convention: a plane wave from azimuth ``theta`` reaches element ``n`` of a
linear array with phase ``n * omega_x``, ``omega_x = 2*pi*dx*sin(theta)`` (``dx``
in wavelengths).  Bin ``k`` of the exact N-point DFT therefore points where
``omega_x = 2*pi*k/N`` (wrapped).  The filter-bank response of a bin is
``H_k(w) = sum_n T[k, n] exp(-1j*w*n)``, so the array factor is
``H_k(-omega_x)``.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

import numpy as np

from .transforms import GaussianMatrix, TransformDimensionError

__all__ = [
    "SPEED_OF_LIGHT",
    "ArrayGeometry",
    "BeamGrid",
    "ErrorSurface",
    "beam_direction",
    "compose_2d_from_measured",
    "filter_bank_response",
    "largest_side_lobe",
    "near_field_pattern",
    "nearest_bin_pair",
    "omega_grid",
    "pattern_deviation_db",
    "response_error_surface",
    "side_lobe_levels",
    "single_beam_complexity",
    "steering_omega",
    "ula_array_factor",
    "ura_beam_2d",
    "ura_beams_2d",
]

SPEED_OF_LIGHT = 299_792_458.0
DB_FLOOR = -300.0


@dataclass(frozen=True)
class ArrayGeometry:
    """Uniform linear (``n_y == 1``) or rectangular array; spacings in wavelengths."""

    n_x: int = 32
    n_y: int = 1
    dx: float = 0.5
    dy: float = 0.5

    def __post_init__(self):
        if self.n_x < 1 or self.n_y < 1:
            raise ValueError("element counts must be >= 1")
        if not (self.dx > 0 and self.dy > 0):
            raise ValueError("element spacings must be positive")

    @property
    def is_2d(self) -> bool:
        return self.n_y > 1

    def visible_omega_range(self) -> float:
        """Largest |omega_x| reached by real angles; beyond pi the pattern aliases."""
        return 2 * np.pi * self.dx

    @property
    def aliased(self) -> bool:
        return self.dx > 0.5

    def element_x_m(self, frequency_hz: float) -> np.ndarray:
        """Element x-positions in metres, centred on the array midpoint."""
        lam = SPEED_OF_LIGHT / frequency_hz
        n = np.arange(self.n_x)
        return (n - (self.n_x - 1) / 2) * self.dx * lam


@dataclass(frozen=True)
class BeamGrid:
    """Sampled per-bin patterns.

    ``values`` has shape ``(n_bins, *grid)`` where ``grid`` follows ``axes``.
    ``quantity`` is ``"amplitude"`` (complex or magnitude field values) or
    ``"power"``.
    """

    axes: tuple[np.ndarray, ...]
    values: np.ndarray
    axis_names: tuple[str, ...] = ("omega",)
    bins: tuple[int, ...] = ()
    quantity: str = "amplitude"

    def __post_init__(self):
        axes = tuple(np.asarray(a, dtype=float) for a in self.axes)
        object.__setattr__(self, "axes", axes)
        values = np.asarray(self.values)
        if values.ndim == len(axes):
            values = values[np.newaxis]
        object.__setattr__(self, "values", values)
        if values.shape[1:] != tuple(len(a) for a in axes):
            raise TransformDimensionError(
                f"values shape {values.shape} does not match axes {[len(a) for a in axes]}"
            )
        for a in axes:
            if a.size > 1 and not np.all(np.diff(a) > 0):
                raise ValueError("grid axes must be strictly increasing")
        if not self.bins:
            object.__setattr__(self, "bins", tuple(range(values.shape[0])))
        if len(self.bins) != values.shape[0]:
            raise ValueError("one bin label per pattern required")
        if self.quantity not in ("amplitude", "power"):
            raise ValueError(f"unknown quantity {self.quantity!r}")

    @property
    def axis(self) -> np.ndarray:
        return self.axes[0]

    @property
    def bin_count(self) -> int:
        return self.values.shape[0]

    def power(self) -> np.ndarray:
        if self.quantity == "power":
            return np.asarray(self.values, dtype=float)
        return np.abs(self.values) ** 2

    def magnitude_db(self, normalize: bool = True) -> np.ndarray:
        """Pattern in dB; with ``normalize`` each bin peaks at exactly 0 dB."""
        p = self.power()
        if normalize:
            peak = p.reshape(p.shape[0], -1).max(axis=1)
            peak = np.where(peak > 0, peak, 1.0)
            p = p / peak.reshape((-1,) + (1,) * (p.ndim - 1))
        with np.errstate(divide="ignore"):
            db = 10 * np.log10(p)
        return np.maximum(db, DB_FLOOR)

    # -- export -------------------------------------------------------------
    def to_csv(self, normalize: bool = True, header: dict | None = None) -> str:
        """Wide CSV: grid coordinates then one dB column per bin."""
        buf = io.StringIO()
        for key, val in (header or {}).items():
            buf.write(f"# {key}: {val}\n")
        w = csv.writer(buf, lineterminator="\n")
        db = self.magnitude_db(normalize)
        w.writerow(list(self.axis_names) + [f"bin{b}_dB" for b in self.bins])
        mesh = np.meshgrid(*self.axes, indexing="ij")
        coords = [m.ravel() for m in mesh]
        flat = db.reshape(db.shape[0], -1)
        for i in range(flat.shape[1]):
            w.writerow([f"{c[i]:.10g}" for c in coords] + [f"{v:.6f}" for v in flat[:, i]])
        return buf.getvalue()

    def to_long_csv(self, normalize: bool = True) -> str:
        """Long (polar-plot) CSV: bin, coordinates, dB."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["bin"] + list(self.axis_names) + ["dB"])
        db = self.magnitude_db(normalize)
        mesh = np.meshgrid(*self.axes, indexing="ij")
        coords = [m.ravel() for m in mesh]
        for b, row in zip(self.bins, db.reshape(db.shape[0], -1)):
            for i, v in enumerate(row):
                w.writerow([b] + [f"{c[i]:.10g}" for c in coords] + [f"{v:.6f}"])
        return buf.getvalue()

    def to_dict(self) -> dict:
        vals = self.values
        out = {
            "axis_names": list(self.axis_names),
            "axes": [a.tolist() for a in self.axes],
            "bins": list(self.bins),
            "quantity": self.quantity,
        }
        if np.iscomplexobj(vals):
            out["real"] = vals.real.tolist()
            out["imag"] = vals.imag.tolist()
        else:
            out["real"] = vals.tolist()
        return out

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data: dict) -> "BeamGrid":
        vals = np.asarray(data["real"], dtype=float)
        if "imag" in data:
            vals = vals + 1j * np.asarray(data["imag"], dtype=float)
        return cls(
            tuple(np.asarray(a) for a in data["axes"]),
            vals,
            tuple(data["axis_names"]),
            tuple(data["bins"]),
            data.get("quantity", "amplitude"),
        )


# -- filter-bank responses -----------------------------------------------------


def omega_grid(points: int) -> np.ndarray:
    """``points`` uniform samples of [-pi, pi)."""
    return -np.pi + 2 * np.pi * np.arange(points) / points


def _as_complex(transform) -> np.ndarray:
    if isinstance(transform, GaussianMatrix):
        return transform.to_complex()
    t = np.asarray(transform, dtype=np.complex128)
    if t.ndim != 2:
        raise TransformDimensionError("transform must be a 2-D matrix")
    return t


def _responses(t: np.ndarray, omega: np.ndarray) -> np.ndarray:
    n = np.arange(t.shape[1])
    return t @ np.exp(-1j * np.outer(n, omega))


def filter_bank_response(transform, grid_points: int = 4096) -> BeamGrid:
    """Frequency response ``H_k(w)`` of every transform row over [-pi, pi)."""
    t = _as_complex(transform)
    if t.shape[0] != t.shape[1]:
        raise TransformDimensionError("transform must be square")
    if grid_points < 64:
        raise ValueError("grid_points must be >= 64")
    w = omega_grid(grid_points)
    return BeamGrid((w,), _responses(t, w), ("omega",))


def _side_lobe_db(mag: np.ndarray, periodic: bool) -> float:
    g = mag.size
    p = int(np.argmax(mag))
    if periodic:
        hi = p
        while mag[(hi + 1) % g] < mag[hi % g] and hi - p < g:
            hi += 1
        lo = p
        while mag[(lo - 1) % g] < mag[lo % g] and p - lo < g:
            lo -= 1
        inside = np.zeros(g, dtype=bool)
        inside[np.arange(lo, hi + 1) % g] = True
        prev, nxt = np.roll(mag, 1), np.roll(mag, -1)
        is_max = (mag > prev) & (mag >= nxt)
    else:
        hi = p
        while hi + 1 < g and mag[hi + 1] < mag[hi]:
            hi += 1
        lo = p
        while lo > 0 and mag[lo - 1] < mag[lo]:
            lo -= 1
        inside = np.zeros(g, dtype=bool)
        inside[lo : hi + 1] = True
        is_max = np.zeros(g, dtype=bool)
        is_max[1:-1] = (mag[1:-1] > mag[:-2]) & (mag[1:-1] >= mag[2:])
    candidates = mag[is_max & ~inside]
    if candidates.size == 0:
        return DB_FLOOR
    return float(20 * np.log10(candidates.max() / mag[p]))


def side_lobe_levels(grid: BeamGrid) -> np.ndarray:
    """Per-bin largest side lobe (dB re main-lobe peak).

    The main lobe extends from the peak down to the first minimum on each side.
    Omega grids are treated as periodic.
    """
    if len(grid.axes) != 1:
        raise ValueError("side lobes are defined for 1-D grids")
    mags = np.sqrt(grid.power())
    periodic = grid.axis_names[0] == "omega"
    return np.array([_side_lobe_db(m, periodic) for m in mags])


def largest_side_lobe(transform, grid_points: int = 4096) -> float:
    """Largest side-lobe level over all bins of a transform's filter bank."""
    return float(side_lobe_levels(filter_bank_response(transform, grid_points)).max())


@dataclass(frozen=True)
class ErrorSurface:
    """Per-bin magnitude-response error, relative to the reference bin peak."""

    grid: BeamGrid
    peak_error_db: np.ndarray
    worst_bins: tuple[int, ...]


def response_error_surface(a, b, grid_points: int = 4096, margin_db: float = 1.0) -> ErrorSurface:
    """Surface ``| |H_a| - |H_b| |`` per bin, ``b`` being the reference.

    ``worst_bins`` are the bins whose peak error lies within ``margin_db`` of
    the largest peak error.
    """
    ha = filter_bank_response(a, grid_points)
    hb = filter_bank_response(b, grid_points)
    ma, mb = np.abs(ha.values), np.abs(hb.values)
    ref = mb.max(axis=1, keepdims=True)
    err = np.abs(ma - mb) / np.where(ref > 0, ref, 1.0)
    with np.errstate(divide="ignore"):
        peak_db = np.maximum(20 * np.log10(err.max(axis=1)), DB_FLOOR)
    worst = tuple(int(k) for k in np.flatnonzero(peak_db >= peak_db.max() - margin_db))
    if peak_db.max() <= DB_FLOOR:
        worst = ()
    return ErrorSurface(BeamGrid(ha.axes, err, ("omega",)), peak_db, worst)


# -- array patterns ------------------------------------------------------------


def steering_omega(azimuth_deg, spacing: float) -> np.ndarray:
    """Inter-element phase step for arrival angle ``azimuth_deg``."""
    return 2 * np.pi * spacing * np.sin(np.radians(azimuth_deg))


def _element_pattern(azimuth_deg, exponent: float | None) -> np.ndarray:
    theta = np.radians(np.asarray(azimuth_deg, dtype=float))
    if exponent is None:
        return np.ones_like(theta)
    return np.clip(np.cos(theta), 0.0, None) ** exponent


def ula_array_factor(
    transform, geometry: ArrayGeometry, azimuth_deg, element_exponent: float | None = None
) -> BeamGrid:
    """Per-bin array factor of a linear array over azimuth (degrees).

    ``element_exponent`` applies a ``cos(theta)**p`` element pattern.
    """
    t = _as_complex(transform)
    if geometry.is_2d:
        raise ValueError("ula_array_factor needs a 1-D geometry")
    if t.shape[1] != geometry.n_x:
        raise TransformDimensionError(f"transform has {t.shape[1]} inputs, array has {geometry.n_x} elements")
    az = np.asarray(azimuth_deg, dtype=float)
    wx = steering_omega(az, geometry.dx)
    n = np.arange(geometry.n_x)
    af = t @ np.exp(1j * np.outer(n, wx))
    return BeamGrid((az,), af * _element_pattern(az, element_exponent), ("azimuth_deg",))


def _ura_omegas(geometry: ArrayGeometry, psi_deg, phi_deg):
    psi = np.radians(np.asarray(psi_deg, dtype=float))[:, None]
    phi = np.radians(np.asarray(phi_deg, dtype=float))[None, :]
    wx = 2 * np.pi * geometry.dx * np.sin(psi) * np.cos(phi)
    wy = 2 * np.pi * geometry.dy * np.sin(psi) * np.sin(phi)
    return wx, wy


def ura_beams_2d(transform, geometry: ArrayGeometry, pairs, psi_deg, phi_deg, method: str = "separable") -> BeamGrid:
    """2-D beams of a rectangular array for several ``(k, l)`` bin pairs.

    ``method="separable"`` multiplies the two 1-D array factors;
    ``method="direct"`` evaluates the full double sum over all elements.
    """
    t = _as_complex(transform)
    n_bins = t.shape[0]
    pairs = [(int(k), int(l)) for k, l in pairs]
    for k, l in pairs:
        if not (0 <= k < n_bins and 0 <= l < n_bins):
            raise IndexError(f"bin pair ({k}, {l}) outside 0..{n_bins - 1}")
    if t.shape[1] != geometry.n_x or geometry.n_y not in (1, t.shape[1]):
        raise TransformDimensionError("transform size must match the array element counts")
    psi = np.asarray(psi_deg, dtype=float)
    phi = np.asarray(phi_deg, dtype=float)
    wx, wy = _ura_omegas(geometry, psi, phi)
    m = np.arange(t.shape[1])
    if method == "separable":
        ux = np.exp(1j * wx[..., None] * m)  # (psi, phi, m)
        uy = np.exp(1j * wy[..., None] * m)
        ks, ls = zip(*pairs)
        fx = ux @ t[list(ks)].T  # (psi, phi, pairs)
        fy = uy @ t[list(ls)].T
        vals = np.moveaxis(fx * fy, -1, 0)
    elif method == "direct":
        coeff = np.stack([np.outer(t[k], t[l]).ravel() for k, l in pairs], axis=1)  # (m*n, pairs)
        mm, nn = np.meshgrid(m, m, indexing="ij")
        mm, nn = mm.ravel(), nn.ravel()
        flat_x, flat_y = wx.ravel(), wy.ravel()
        out = np.empty((flat_x.size, len(pairs)), dtype=np.complex128)
        step = 2048
        for s in range(0, flat_x.size, step):
            phase = flat_x[s : s + step, None] * mm + flat_y[s : s + step, None] * nn
            out[s : s + step] = np.exp(1j * phase) @ coeff
        vals = out.T.reshape(len(pairs), psi.size, phi.size)
    else:
        raise ValueError(f"unknown method {method!r}")
    labels = tuple(k * n_bins + l for k, l in pairs)
    return BeamGrid((psi, phi), vals, ("psi_deg", "phi_deg"), labels)


def ura_beam_2d(transform, geometry: ArrayGeometry, k: int, l: int, psi_deg, phi_deg, method: str = "separable") -> BeamGrid:
    """2-D beam ``(k, l)`` over elevation ``psi`` and azimuth ``phi`` (degrees)."""
    return ura_beams_2d(transform, geometry, [(k, l)], psi_deg, phi_deg, method)


def beam_direction(k: int, l: int, geometry: ArrayGeometry, n: int = 32) -> tuple[float, float]:
    """Pointing angles ``(psi, phi)`` in degrees of exact-DFT beam ``(k, l)``."""
    wx = 2 * np.pi * (((k + n // 2) % n) - n // 2) / n
    wy = 2 * np.pi * (((l + n // 2) % n) - n // 2) / n
    ux, uy = wx / (2 * np.pi * geometry.dx), wy / (2 * np.pi * geometry.dy)
    s = np.hypot(ux, uy)
    if s > 1:
        raise ValueError(f"beam ({k}, {l}) is outside the visible region")
    return float(np.degrees(np.arcsin(s))), float(np.degrees(np.arctan2(uy, ux)))


def nearest_bin_pair(psi_deg: float, phi_deg: float, geometry: ArrayGeometry, n: int = 32) -> tuple[int, int]:
    """Bin pair whose beam is closest to the direction ``(psi, phi)``."""
    wx, wy = _ura_omegas(geometry, [psi_deg], [phi_deg])
    k = int(np.rint(wx.item() * n / (2 * np.pi))) % n
    l = int(np.rint(wy.item() * n / (2 * np.pi))) % n
    return k, l


def _measured_to_omega(measured: BeamGrid, spacing: float) -> np.ndarray:
    name = measured.axis_names[0]
    if name == "omega":
        return measured.axis
    if name == "azimuth_deg":
        return steering_omega(measured.axis, spacing)
    raise ValueError(f"cannot map axis {name!r} to spatial frequency")


def compose_2d_from_measured(
    measured: BeamGrid, transform, geometry: ArrayGeometry, k: int, l: int, psi_deg, phi_deg
) -> BeamGrid:
    """2-D beam from a measured 1-D pattern of bin ``k`` times the analytic 1-D factor of bin ``l``.

    ``measured`` holds 1-D patterns over azimuth or spatial frequency; power
    patterns are converted to amplitude.  Values are interpolated linearly in
    spatial frequency.
    """
    if k not in measured.bins:
        raise KeyError(f"bin {k} not present in measured data")
    row = measured.values[measured.bins.index(k)]
    if measured.quantity == "power":
        row = np.sqrt(np.asarray(row, dtype=float))
    w_meas = _measured_to_omega(measured, geometry.dx)
    order = np.argsort(w_meas)
    w_meas, row = w_meas[order], row[order]
    wx, wy = _ura_omegas(geometry, psi_deg, phi_deg)
    tol = 1e-12
    if wx.min() < w_meas[0] - tol or wx.max() > w_meas[-1] + tol:
        raise ValueError("measured pattern does not cover the required spatial-frequency range")
    if np.iscomplexobj(row):
        meas = np.interp(wx, w_meas, row.real) + 1j * np.interp(wx, w_meas, row.imag)
    else:
        meas = np.interp(wx, w_meas, row)
    t = _as_complex(transform)
    m = np.arange(t.shape[1])
    ups_l = np.exp(1j * wy[..., None] * m) @ t[l]
    n_bins = t.shape[0]
    return BeamGrid(
        (np.asarray(psi_deg, float), np.asarray(phi_deg, float)),
        (meas * ups_l)[None],
        ("psi_deg", "phi_deg"),
        (k * n_bins + l,),
    )


def near_field_pattern(
    transform,
    geometry: ArrayGeometry,
    source_range_m: float,
    frequency_hz: float,
    azimuth_deg,
    spreading: bool = True,
    element_exponent: float | None = None,
) -> BeamGrid:
    """Array factor for a point source at finite range from the array centre.

    Each element sees the exact spherical path length; ``spreading`` adds the
    ``R / d_n`` amplitude taper.  An infinite range gives the plane-wave
    pattern referenced to the array centre.
    """
    if not source_range_m > 0:
        raise ValueError("source range must be positive")
    t = _as_complex(transform)
    az = np.asarray(azimuth_deg, dtype=float)
    theta = np.radians(az)
    lam = SPEED_OF_LIGHT / frequency_hz
    xn = geometry.element_x_m(frequency_hz)
    kw = 2 * np.pi / lam
    if np.isinf(source_range_m):
        sig = np.exp(1j * kw * np.outer(np.sin(theta), xn))
    else:
        r = source_range_m
        sx, sy = r * np.sin(theta), r * np.cos(theta)
        d = np.hypot(sx[:, None] - xn, sy[:, None])
        sig = np.exp(-1j * kw * (d - r))
        if spreading:
            sig = sig * (r / d)
    af = sig @ t.T
    return BeamGrid((az,), af.T * _element_pattern(az, element_exponent), ("azimuth_deg",))


def pattern_deviation_db(pattern: BeamGrid, reference: BeamGrid, floor_db: float = -3.0) -> float:
    """Largest |dB difference| over points where the normalized reference is above ``floor_db``."""
    a = pattern.magnitude_db()
    b = reference.magnitude_db()
    if a.shape != b.shape:
        raise TransformDimensionError("patterns must share a grid")
    mask = b >= floor_db
    return float(np.abs(a - b)[mask].max())


def single_beam_complexity(n: int, n_beams: int = 1) -> dict:
    """Real operations of direct phase-shift beamforming: 3N mults and 7N-2 adds per beam."""
    if n < 1 or n_beams < 1:
        raise ValueError("n and n_beams must be >= 1")
    return {"multiplications": 3 * n * n_beams, "additions": (7 * n - 2) * n_beams}
