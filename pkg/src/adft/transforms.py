"""Exact and approximate 32-point DFT matrices.

Approximation matrices have Gaussian-rational entries and are stored exactly
as integer numerator arrays over a common denominator.  DFT matrices with
irrational twiddles are stored in double precision and flagged inexact.
"""

from __future__ import annotations

import csv
import io
import json
from fractions import Fraction
from math import gcd

import numpy as np

__all__ = [
    "GaussianMatrix",
    "TransformDimensionError",
    "adft32_matrix",
    "apply_dense",
    "dft_matrix",
    "round_half_away",
    "round_scaled_dft",
]


class TransformDimensionError(ValueError):
    """Raised when matrix/vector shapes are incompatible."""


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def _parse_fraction(token) -> Fraction:
    if isinstance(token, str):
        return Fraction(token)
    if isinstance(token, float):
        return Fraction(token).limit_denominator(1 << 20)
    return Fraction(token)


class GaussianMatrix:
    """Dense complex matrix with exact Gaussian-rational or float entries.

    Exact matrices keep ``re/denom + 1j * im/denom`` with integer numerators.
    Inexact matrices keep a ``complex128`` array.  Instances are immutable.

    Parameters
    ----------
    re, im : array_like of int
        Numerators of the real and imaginary parts (exact form).
    denom : int
        Common positive denominator.
    """

    __slots__ = ("_re", "_im", "_denom", "_values")

    def __init__(self, re, im, denom: int = 1):
        re = np.array(re, dtype=np.int64)
        im = np.array(im, dtype=np.int64)
        if re.ndim != 2 or re.shape != im.shape:
            raise TransformDimensionError(
                f"real/imag numerators must be equal-shape 2-D arrays, got {re.shape} and {im.shape}"
            )
        denom = int(denom)
        if denom <= 0:
            raise ValueError("denominator must be positive")
        g = int(np.gcd.reduce(np.concatenate([np.abs(re).ravel(), np.abs(im).ravel(), [denom]])))
        if g > 1:
            re, im, denom = re // g, im // g, denom // g
        re.setflags(write=False)
        im.setflags(write=False)
        self._re, self._im, self._denom = re, im, denom
        self._values = None

    # -- constructors -------------------------------------------------------
    @classmethod
    def from_complex(cls, values, exact: bool = False, max_denom: int = 2) -> "GaussianMatrix":
        """Wrap a complex array.

        With ``exact=True`` the entries must be multiples of ``1/max_denom``;
        otherwise the matrix is stored in double precision.
        """
        values = np.asarray(values, dtype=np.complex128)
        if values.ndim != 2:
            raise TransformDimensionError(f"expected a 2-D array, got shape {values.shape}")
        if exact:
            scaled = values * max_denom
            re, im = np.rint(scaled.real), np.rint(scaled.imag)
            if not (np.array_equal(re, scaled.real) and np.array_equal(im, scaled.imag)):
                raise ValueError(f"entries are not multiples of 1/{max_denom}")
            return cls(re.astype(np.int64), im.astype(np.int64), max_denom)
        obj = cls.__new__(cls)
        values = values.copy()
        values.setflags(write=False)
        obj._re = obj._im = None
        obj._denom = None
        obj._values = values
        return obj

    @classmethod
    def identity(cls, n: int) -> "GaussianMatrix":
        eye = np.eye(n, dtype=np.int64)
        return cls(eye, np.zeros_like(eye))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "GaussianMatrix":
        z = np.zeros((rows, cols), dtype=np.int64)
        return cls(z, z)

    # -- accessors ----------------------------------------------------------
    @property
    def is_exact(self) -> bool:
        return self._values is None

    @property
    def shape(self) -> tuple[int, int]:
        arr = self._re if self.is_exact else self._values
        return arr.shape

    @property
    def rows(self) -> int:
        return self.shape[0]

    @property
    def cols(self) -> int:
        return self.shape[1]

    @property
    def denom(self) -> int | None:
        return self._denom

    @property
    def numerators(self) -> tuple[np.ndarray, np.ndarray]:
        """Integer (re, im) numerator arrays; exact matrices only."""
        if not self.is_exact:
            raise TypeError("inexact matrix has no integer numerators")
        return self._re, self._im

    def to_complex(self) -> np.ndarray:
        """Return the entries as a new ``complex128`` array."""
        if self.is_exact:
            return (self._re + 1j * self._im) / self._denom
        return self._values.copy()

    def __array__(self, dtype=None, copy=None):
        arr = self.to_complex()
        return arr if dtype is None else arr.astype(dtype)

    def entry(self, row: int, col: int) -> complex:
        if self.is_exact:
            return complex(self._re[row, col] / self._denom, self._im[row, col] / self._denom)
        return complex(self._values[row, col])

    def exact_entry(self, row: int, col: int) -> tuple[Fraction, Fraction]:
        if not self.is_exact:
            raise TypeError("inexact matrix")
        d = self._denom
        return Fraction(int(self._re[row, col]), d), Fraction(int(self._im[row, col]), d)

    def part_values(self) -> set:
        """Distinct values taken by the real and imaginary parts."""
        if self.is_exact:
            nums = np.unique(np.concatenate([self._re.ravel(), self._im.ravel()]))
            return {Fraction(int(v), self._denom) for v in nums}
        v = self._values
        return set(np.unique(np.concatenate([v.real.ravel(), v.imag.ravel()])).tolist())

    # -- arithmetic ---------------------------------------------------------
    def __matmul__(self, other: "GaussianMatrix") -> "GaussianMatrix":
        if not isinstance(other, GaussianMatrix):
            return NotImplemented
        if self.cols != other.rows:
            raise TransformDimensionError(f"cannot multiply {self.shape} by {other.shape}")
        if self.is_exact and other.is_exact:
            a, b = self._re, self._im
            c, d = other._re, other._im
            return GaussianMatrix(a @ c - b @ d, a @ d + b @ c, self._denom * other._denom)
        return GaussianMatrix.from_complex(self.to_complex() @ other.to_complex())

    def __neg__(self) -> "GaussianMatrix":
        if self.is_exact:
            return GaussianMatrix(-self._re, -self._im, self._denom)
        return GaussianMatrix.from_complex(-self._values)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GaussianMatrix):
            return NotImplemented
        if self.shape != other.shape:
            return False
        if self.is_exact and other.is_exact:
            return (
                self._denom == other._denom
                and np.array_equal(self._re, other._re)
                and np.array_equal(self._im, other._im)
            )
        return bool(np.array_equal(self.to_complex(), other.to_complex()))

    def __hash__(self) -> int:
        if self.is_exact:
            return hash((self._denom, self._re.tobytes(), self._im.tobytes()))
        return hash(self._values.tobytes())

    def differing_entries(self, other: "GaussianMatrix") -> list[tuple[int, int]]:
        """0-based (row, col) positions where the two matrices differ."""
        if self.shape != other.shape:
            raise TransformDimensionError(f"shape mismatch {self.shape} vs {other.shape}")
        if self.is_exact and other.is_exact:
            m = _lcm(self._denom, other._denom)
            sa, sb = m // self._denom, m // other._denom
            mask = (self._re * sa != other._re * sb) | (self._im * sa != other._im * sb)
        else:
            mask = self.to_complex() != other.to_complex()
        return [tuple(map(int, rc)) for rc in np.argwhere(mask)]

    def __repr__(self) -> str:
        kind = "exact" if self.is_exact else "float"
        return f"GaussianMatrix({self.rows}x{self.cols}, {kind})"

    # -- serialization ------------------------------------------------------
    def _cell(self, r: int, c: int) -> list:
        if self.is_exact:
            out = []
            for num in (self._re[r, c], self._im[r, c]):
                q = Fraction(int(num), self._denom)
                out.append(q.numerator if q.denominator == 1 else f"{q.numerator}/{q.denominator}")
            return out
        v = self._values[r, c]
        return [float(v.real), float(v.imag)]

    def to_dict(self) -> dict:
        """JSON-ready dict: rows, cols and row-major ``[re, im]`` pairs.

        Exact non-integer parts are written as ``"p/q"`` strings.
        """
        return {
            "rows": self.rows,
            "cols": self.cols,
            "exact": self.is_exact,
            "entries": [self._cell(r, c) for r in range(self.rows) for c in range(self.cols)],
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data: dict) -> "GaussianMatrix":
        rows, cols = int(data["rows"]), int(data["cols"])
        entries = data["entries"]
        if len(entries) != rows * cols:
            raise TransformDimensionError(f"expected {rows * cols} entries, got {len(entries)}")
        exact = data.get("exact")
        if exact is None:
            exact = all(not isinstance(x, float) or float(x).is_integer() for pair in entries for x in pair)
        if not exact:
            vals = np.array([complex(float(re), float(im)) for re, im in entries]).reshape(rows, cols)
            return cls.from_complex(vals)
        parts = [(_parse_fraction(re), _parse_fraction(im)) for re, im in entries]
        denom = 1
        for re, im in parts:
            denom = _lcm(denom, _lcm(re.denominator, im.denominator))
        re = np.array([int(p[0] * denom) for p in parts], dtype=np.int64).reshape(rows, cols)
        im = np.array([int(p[1] * denom) for p in parts], dtype=np.int64).reshape(rows, cols)
        return cls(re, im, denom)

    @classmethod
    def from_json(cls, text: str) -> "GaussianMatrix":
        return cls.from_dict(json.loads(text))

    def to_csv(self) -> str:
        """One row per matrix row, cells formatted as ``re+imj``."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        for r in range(self.rows):
            cells = []
            for c in range(self.cols):
                re, im = self._cell(r, c)
                sign = "-" if str(im).startswith("-") else "+"
                cells.append(f"{re}{sign}{str(im).lstrip('-')}j")
            writer.writerow(cells)
        return buf.getvalue()


def dft_matrix(n: int) -> GaussianMatrix:
    """N-point DFT matrix with entries ``exp(-2j*pi*k*m/n)`` (float storage)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    k = np.arange(n)
    # reduce the exponent modulo n so quarter-turn twiddles come out exact
    phase = np.outer(k, k) % n
    values = np.exp(-2j * np.pi * phase / n)
    quarter = (4 * phase) % n == 0
    values[quarter] = np.array([1, -1j, -1, 1j])[(4 * phase[quarter]) // n]
    return GaussianMatrix.from_complex(values)


def round_half_away(x: np.ndarray) -> np.ndarray:
    """Round to nearest integer, ties away from zero."""
    return np.sign(x) * np.floor(np.abs(x) + 0.5)


def round_scaled_dft(beta: float, n: int = 32) -> GaussianMatrix:
    """Candidate approximation ``round(beta * F_n)`` applied to real and imaginary parts."""
    if not beta > 0:
        raise ValueError("beta must be positive")
    scaled = beta * dft_matrix(n).to_complex()
    re = round_half_away(scaled.real).astype(np.int64)
    im = round_half_away(scaled.imag).astype(np.int64)
    return GaussianMatrix(re, im)


# Sub-blocks of the 32-point approximation, one matrix row per line.
_A0 = """
1 1 1 1 1 1 1 1 1 1 1 1 1 1 1 1
1 1 1 1-1i 1-1i 1-1i -1i -1i -1i -1i -1i -1-1i -1-1i -1-1i -1 -1
1 1 1-1i -1i -1i -1i -1-1i -1 -1 -1 -1+1i 1i 1i 1i 1+1i 1
1 1-1i -1i -1i -1-1i -1 -1 -1+1i 1i 1+1i 1 1 1-1i -1i -1i -1-1i
1 1-1i -1i -1-1i -1 -1+1i 1i 1+1i 1 1-1i -1i -1-1i -1 -1+1i 1i 1+1i
1 1-1i -1i -1 -1+1i 1i 1 1-1i -1i -1-1i -1 1i 1+1i 1 -1i -1-1i
1 -1i -1-1i -1 1i 1 1-1i -1i -1 1i 1+1i 1 -1i -1 -1+1i 1i
1 -1i -1 -1+1i 1+1i 1-1i -1i -1 1i 1 -1i -1-1i -1+1i 1+1i 1 -1i
1 -1i -1 1i 1 -1i -1 1i 1 -1i -1 1i 1 -1i -1 1i
1 -1i -1 1+1i 1-1i -1-1i 1i 1 -1i -1 1i 1-1i -1-1i -1+1i 1 -1i
1 -1i -1+1i 1 -1i -1 1+1i -1i -1 1i 1-1i -1 1i 1 -1-1i 1i
1 -1-1i 1i 1 -1-1i 1i 1 -1-1i 1i 1-1i -1 1i 1-1i -1 1i 1-1i
1 -1-1i 1i 1-1i -1 1+1i -1i -1+1i 1 -1-1i 1i 1-1i -1 1+1i -1i -1+1i
1 -1-1i 1i -1i -1+1i 1 -1 1+1i -1i -1+1i 1 -1 1+1i -1i 1i 1-1i
1 -1 1+1i -1i 1i -1i -1+1i 1 -1 1 -1-1i 1i -1i 1i 1-1i -1
1 -1 1 -1-1i 1+1i -1-1i 1i -1i 1i -1i 1i 1-1i -1+1i 1-1i -1 1
"""

_A1 = """
1 1 1 1 1 1 1 1 1 1 1 1 1 1 1 1
-1 -1 -1 -1+1i -1+1i -1+1i 1i 1i 1i 1i 1i 1+1i 1+1i 1+1i 1 1
1 1 1-1i -1i -1i -1i -1-1i -1 -1 -1 -1+1i 1i 1i 1i 1+1i 1
-1 -1+1i 1i 1i 1+1i 1 1 1-1i -1i -1-1i -1 -1 -1+1i 1i 1i 1+1i
1 1-1i -1i -1-1i -1 -1+1i 1i 1+1i 1 1-1i -1i -1-1i -1 -1+1i 1i 1+1i
-1 -1+1i 1i 1 1-1i -1i -1 -1+1i 1i 1+1i 1 -1i -1-1i -1 1i 1+1i
1 -1i -1-1i -1 1i 1 1-1i -1i -1 1i 1+1i 1 -1i -1 -1+1i 1i
-1 1i 1 1-1i -1-1i -1+1i 1i 1 -1i -1 1i 1+1i 1-1i -1-1i -1 1i
1 -1i -1 1i 1 -1i -1 1i 1 -1i -1 1i 1 -1i -1 1i
-1 1i 1 -1-1i -1+1i 1+1i -1i -1 1i 1 -1i -1+1i 1+1i 1-1i -1 1i
1 -1i -1+1i 1 -1i -1 1+1i -1i -1 1i 1-1i -1 1i 1 -1-1i 1i
-1 1+1i -1i -1 1+1i -1i -1 1+1i -1i -1+1i 1 -1i -1+1i 1 -1i -1+1i
1 -1-1i 1i 1-1i -1 1+1i -1i -1+1i 1 -1-1i 1i 1-1i -1 1+1i -1i -1+1i
-1 1+1i -1i 1i 1-1i -1 1 -1-1i 1i 1-1i -1 1 -1-1i 1i -1i -1+1i
1 -1 1+1i -1i 1i -1i -1+1i 1 -1 1 -1-1i 1i -1i 1i 1-1i -1
-1 1 -1 1+1i -1-1i 1+1i -1i 1i -1i 1i -1i -1+1i 1-1i -1+1i 1 -1
"""

_A2 = """
1 -1 1 -1 1 -1 1 -1 1 -1 1 -1 1 -1 1 -1
1 -1 1 -1+1i 1-1i -1+1i -1i 1i -1i 1i -1i 1+1i -1-1i 1+1i -1 1
1 -1 1-1i 1i -1i 1i -1-1i 1 -1 1 -1+1i -1i 1i -1i 1+1i -1
1 -1+1i -1i 1i -1-1i 1 -1 1-1i 1i -1-1i 1 -1 1-1i 1i -1i 1+1i
1 -1+1i -1i 1+1i -1 1-1i 1i -1-1i 1 -1+1i -1i 1+1i -1 1-1i 1i -1-1i
1 -1+1i -1i 1 -1+1i -1i 1 -1+1i -1i 1+1i -1 -1i 1+1i -1 -1i 1+1i
1 1i -1-1i 1 1i -1 1-1i 1i -1 -1i 1+1i -1 -1i 1 -1+1i -1i
1 1i -1 1-1i 1+1i -1+1i -1i 1 1i -1 -1i 1+1i -1+1i -1-1i 1 1i
1 1i -1 -1i 1 1i -1 -1i 1 1i -1 -1i 1 1i -1 -1i
1 1i -1 -1-1i 1-1i 1+1i 1i -1 -1i 1 1i -1+1i -1-1i 1-1i 1 1i
1 1i -1+1i -1 -1i 1 1+1i 1i -1 -1i 1-1i 1 1i -1 -1-1i -1i
1 1+1i 1i -1 -1-1i -1i 1 1+1i 1i -1+1i -1 -1i 1-1i 1 1i -1+1i
1 1+1i 1i -1+1i -1 -1-1i -1i 1-1i 1 1+1i 1i -1+1i -1 -1-1i -1i 1-1i
1 1+1i 1i 1i -1+1i -1 -1 -1-1i -1i 1-1i 1 1 1+1i 1i 1i -1+1i
1 1 1+1i 1i 1i 1i -1+1i -1 -1 -1 -1-1i -1i -1i -1i 1-1i 1
1 1 1 1+1i 1+1i 1+1i 1i 1i 1i 1i 1i -1+1i -1+1i -1+1i -1 -1
"""

_A3 = """
1 -1 1 -1 1 -1 1 -1 1 -1 1 -1 1 -1 1 -1
-1 1 -1 1-1i -1+1i 1-1i 1i -1i 1i -1i 1i -1-1i 1+1i -1-1i 1 -1
1 -1 1-1i 1i -1i 1i -1-1i 1 -1 1 -1+1i -1i 1i -1i 1+1i -1
-1 1-1i 1i -1i 1+1i -1 1 -1+1i -1i 1+1i -1 1 -1+1i -1i 1i -1-1i
1 -1+1i -1i 1+1i -1 1-1i 1i -1-1i 1 -1+1i -1i 1+1i -1 1-1i 1i -1-1i
-1 1-1i 1i -1 1-1i 1i -1 1-1i 1i -1-1i 1 1i -1-1i 1 1i -1-1i
1 1i -1-1i 1 1i -1 1-1i 1i -1 -1i 1+1i -1 -1i 1 -1+1i -1i
-1 -1i 1 -1+1i -1-1i 1-1i 1i -1 -1i 1 1i -1-1i 1-1i 1+1i -1 -1i
1 1i -1 -1i 1 1i -1 -1i 1 1i -1 -1i 1 1i -1 -1i
-1 -1i 1 1+1i -1+1i -1-1i -1i 1 1i -1 -1i 1-1i 1+1i -1+1i -1 -1i
1 1i -1+1i -1 -1i 1 1+1i 1i -1 -1i 1-1i 1 1i -1 -1-1i -1i
-1 -1-1i -1i 1 1+1i 1i -1 -1-1i -1i 1-1i 1 1i -1+1i -1 -1i 1-1i
1 1+1i 1i -1+1i -1 -1-1i -1i 1-1i 1 1+1i 1i -1+1i -1 -1-1i -1i 1-1i
-1 -1-1i -1i -1i 1-1i 1 1 1+1i 1i -1+1i -1 -1 -1-1i -1i -1i 1-1i
1 1 1+1i 1i 1i 1i -1+1i -1 -1 -1 -1-1i -1i -1i -1i 1-1i 1
-1 -1 -1 -1-1i -1-1i -1-1i -1i -1i -1i -1i -1i 1-1i 1-1i 1-1i 1 1
"""


def _parse_token(tok: str) -> tuple[int, int]:
    z = complex(tok.replace("i", "j"))
    return int(z.real), int(z.imag)


def _parse_block(text: str) -> tuple[np.ndarray, np.ndarray]:
    rows = [line.split() for line in text.strip().splitlines()]
    parts = np.array([[_parse_token(t) for t in row] for row in rows], dtype=np.int64)
    return parts[..., 0], parts[..., 1]


_ADFT32 = None


def adft32_matrix() -> GaussianMatrix:
    """The 32-point approximate DFT, assembled as ``[[A0, A1], [A2, A3]]``."""
    global _ADFT32
    if _ADFT32 is None:
        (r0, i0), (r1, i1), (r2, i2), (r3, i3) = (_parse_block(b) for b in (_A0, _A1, _A2, _A3))
        _ADFT32 = GaussianMatrix(np.block([[r0, r1], [r2, r3]]), np.block([[i0, i1], [i2, i3]]))
    return _ADFT32


def apply_dense(m: GaussianMatrix, x) -> np.ndarray:
    """Direct matrix-vector product ``m @ x``.

    ``x`` may be a vector of length ``m.cols`` or a 2-D array whose first axis
    has that length (one column per snapshot).
    """
    x = np.asarray(x, dtype=np.complex128)
    if x.ndim == 0 or x.shape[0] != m.cols:
        raise TransformDimensionError(f"input length {x.shape[:1]} does not match {m.cols} columns")
    return m.to_complex() @ x
