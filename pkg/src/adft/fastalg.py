"""Sparse 8-stage factorization of the 32-point approximate DFT.

Stages are coordinate lists of (row, col, coefficient) with coefficients in
{+1, -1, +j, -j}; ``W1`` is applied first.  Also provides real-addition
accounting for the factorized and direct forms.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass

import numpy as np

from .transforms import GaussianMatrix, TransformDimensionError, adft32_matrix

__all__ = [
    "COEFFICIENTS",
    "FactorizationError",
    "FactorizedTransform",
    "OpCountReport",
    "SparseStage",
    "apply_fast",
    "builtin_adft32_factorization",
    "complexity_table",
    "count_dense_operations",
    "count_operations",
    "flip_coefficient",
    "parse_stage_table",
    "stage_product",
]

#: coefficient label -> (real, imag)
COEFFICIENTS = {"+1": (1, 0), "-1": (-1, 0), "+j": (0, 1), "-j": (0, -1)}

# Published literature rows for 32-point transforms (real additions, real multiplications).
REFERENCE_COMPLEXITIES = (
    ("Radix-2 FFT", 408, 88),
    ("Split-Radix FFT", 388, 68),
    ("Winograd FFT", 388, 68),
)


class FactorizationError(ValueError):
    """Malformed stage or factorization."""


def _normalize_coeff(coeff) -> str:
    if isinstance(coeff, str):
        label = coeff.strip().lower().replace("i", "j")
        if label in ("1", "j"):
            label = "+" + label
        if label in COEFFICIENTS:
            return label
    else:
        z = complex(coeff)
        for label, (a, b) in COEFFICIENTS.items():
            if z == complex(a, b):
                return label
    raise FactorizationError(f"coefficient {coeff!r} is not one of +1, -1, +j, -j")


@dataclass(frozen=True)
class SparseStage:
    """One sparse factor, stored as 0-based (row, col, coefficient) triples."""

    size: int
    triples: tuple[tuple[int, int, str], ...]

    def __post_init__(self):
        norm = tuple((int(r), int(c), _normalize_coeff(k)) for r, c, k in self.triples)
        object.__setattr__(self, "triples", norm)
        seen = set()
        for r, c, _ in norm:
            if not (0 <= r < self.size and 0 <= c < self.size):
                raise FactorizationError(f"index ({r}, {c}) outside a {self.size}-point stage")
            if (r, c) in seen:
                raise FactorizationError(f"duplicate entry at ({r}, {c})")
            seen.add((r, c))
        empty = set(range(self.size)) - {r for r, _, _ in norm}
        if empty:
            raise FactorizationError(f"rows {sorted(empty)} have no entries")

    @classmethod
    def identity(cls, size: int) -> "SparseStage":
        return cls(size, tuple((i, i, "+1") for i in range(size)))

    def to_matrix(self) -> GaussianMatrix:
        re = np.zeros((self.size, self.size), dtype=np.int64)
        im = np.zeros_like(re)
        for r, c, k in self.triples:
            re[r, c], im[r, c] = COEFFICIENTS[k]
        return GaussianMatrix(re, im)

    def row_counts(self) -> np.ndarray:
        return np.bincount([r for r, _, _ in self.triples], minlength=self.size)

    def _slots(self):
        # Split triples into passes so each pass touches every row at most once.
        passes: list[list[tuple[int, int, complex]]] = []
        depth: dict[int, int] = {}
        for r, c, k in self.triples:
            d = depth.get(r, 0)
            depth[r] = d + 1
            if d == len(passes):
                passes.append([])
            passes[d].append((r, c, complex(*COEFFICIENTS[k])))
        out = []
        for p in passes:
            rows, cols, coef = zip(*p)
            out.append((np.array(rows), np.array(cols), np.array(coef)))
        return out

    def apply(self, x: np.ndarray) -> np.ndarray:
        slots = getattr(self, "_slot_cache", None)
        if slots is None:
            slots = self._slots()
            object.__setattr__(self, "_slot_cache", slots)
        shape = (-1,) + (1,) * (x.ndim - 1)
        out = np.zeros_like(x)
        for rows, cols, coef in slots:
            out[rows] += coef.reshape(shape) * x[cols]
        return out


@dataclass(frozen=True)
class FactorizedTransform:
    """Ordered sparse stages; the represented matrix is ``W_last @ ... @ W_first``."""

    stages: tuple[SparseStage, ...]
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "stages", tuple(self.stages))
        if not self.stages:
            raise FactorizationError("factorization needs at least one stage")

    @property
    def size(self) -> int:
        return self.stages[0].size

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "stages": [{"triples": [[r, c, k] for r, c, k in s.triples]} for s in self.stages],
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data: dict, size: int | None = None) -> "FactorizedTransform":
        stages = []
        for st in data["stages"]:
            triples = [tuple(t) for t in st["triples"]]
            n = st.get("size", size)
            if n is None:
                n = 1 + max(max(r, c) for r, c, _ in triples)
            stages.append(SparseStage(int(n), tuple(triples)))
        return cls(tuple(stages), data.get("name", ""))

    @classmethod
    def from_json(cls, text: str) -> "FactorizedTransform":
        return cls.from_dict(json.loads(text))


_PAIR = re.compile(r"\(\s*(\d+)\s*,\s*(\d+)\s*\)")


def parse_stage_table(text: str, size: int = 32) -> FactorizedTransform:
    """Parse the 1-based audit layout.

    ::

        W1
          +1: (1,1), (1,17), ...
          -1: (10,10), ...

    Indices are converted to 0-based.  Stage headers must appear in order.
    """
    stages: list[list[tuple[int, int, str]]] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if re.fullmatch(r"[Ww]\d+", line):
            stages.append([])
            continue
        if ":" not in line or not stages:
            raise FactorizationError(f"cannot parse line {raw!r}")
        label, pairs = line.split(":", 1)
        coeff = _normalize_coeff(label)
        stages[-1].extend((int(r) - 1, int(c) - 1, coeff) for r, c in _PAIR.findall(pairs))
    return FactorizedTransform(tuple(SparseStage(size, tuple(t)) for t in stages))


def builtin_adft32_factorization() -> FactorizedTransform:
    """The published factorization ``F = W8 W7 ... W1`` of the 32-point ADFT."""
    f = parse_stage_table(_TABLE)
    return FactorizedTransform(f.stages, name="ADFT-32")


def stage_product(f: FactorizedTransform) -> GaussianMatrix:
    """Exact product of all stages (first stage rightmost)."""
    sizes = {s.size for s in f.stages}
    if len(sizes) != 1:
        raise TransformDimensionError(f"stages have mismatched sizes {sorted(sizes)}")
    product = GaussianMatrix.identity(f.size)
    for stage in f.stages:
        product = stage.to_matrix() @ product
    return product


def apply_fast(f: FactorizedTransform, x) -> np.ndarray:
    """Apply the stages in sequence.

    ``x`` is a length-``N`` vector or an ``(N, T)`` array of snapshots.  Only
    sign changes and real/imaginary swaps touch the data.
    """
    x = np.asarray(x, dtype=np.complex128)
    if x.ndim == 0 or x.shape[0] != f.size:
        raise TransformDimensionError(f"input length {x.shape[:1]} does not match transform size {f.size}")
    for stage in f.stages:
        x = stage.apply(x)
    return x


@dataclass(frozen=True)
class OpCountReport:
    per_stage_real_additions: tuple[int, ...]
    real_multiplications: int = 0
    input_kind: str = "complex"

    @property
    def total_real_additions(self) -> int:
        return int(sum(self.per_stage_real_additions))

    def to_dict(self) -> dict:
        return {
            "input_kind": self.input_kind,
            "per_stage_real_additions": list(self.per_stage_real_additions),
            "total_real_additions": self.total_real_additions,
            "real_multiplications": self.real_multiplications,
        }


def _count_matrix(re: np.ndarray, im: np.ndarray, has_re: np.ndarray, has_im: np.ndarray):
    """Count real adds/mults of ``(re + j im) @ x`` given which parts of x are non-zero.

    Each output part is a signed sum of real products; ``z`` such terms cost
    ``z - 1`` additions.  Coefficient parts of magnitude one are free.
    """
    p, q = re != 0, im != 0
    terms_re = p.astype(int) @ has_re + q.astype(int) @ has_im
    terms_im = p.astype(int) @ has_im + q.astype(int) @ has_re
    adds = int(np.clip(terms_re - 1, 0, None).sum() + np.clip(terms_im - 1, 0, None).sum())
    nontrivial = (p & ~np.isclose(np.abs(re), 1.0)).astype(int) + (q & ~np.isclose(np.abs(im), 1.0)).astype(int)
    # each non-trivial coefficient part scales every non-zero part of its input
    mults = int((nontrivial @ (has_re.astype(int) + has_im.astype(int))).sum())
    return adds, mults, terms_re > 0, terms_im > 0


def _input_parts(n: int, input_kind: str):
    if input_kind not in ("complex", "real"):
        raise ValueError(f"input_kind must be 'complex' or 'real', got {input_kind!r}")
    return np.ones(n, dtype=bool), np.full(n, input_kind == "complex")


def count_operations(f: FactorizedTransform, input_kind: str = "complex") -> OpCountReport:
    """Real-operation count of the factorized algorithm, stage by stage."""
    has_re, has_im = _input_parts(f.size, input_kind)
    per_stage, mults = [], 0
    for stage in f.stages:
        re, im = stage.to_matrix().numerators
        adds, m, has_re, has_im = _count_matrix(re, im, has_re, has_im)
        per_stage.append(adds)
        mults += m
    return OpCountReport(tuple(per_stage), mults, input_kind)


def count_dense_operations(m: GaussianMatrix, input_kind: str = "complex") -> OpCountReport:
    """Real-operation count of the direct product ``m @ x``, row by row."""
    if m.is_exact:
        num_re, num_im = m.numerators
        re, im = num_re / m.denom, num_im / m.denom
    else:
        vals = m.to_complex()
        re, im = vals.real, vals.imag
    has_re, has_im = _input_parts(m.cols, input_kind)
    adds, mults, _, _ = _count_matrix(re, im, has_re, has_im)
    return OpCountReport((adds,), mults, input_kind)


def complexity_table(f: FactorizedTransform | None = None, dense: GaussianMatrix | None = None) -> list[dict]:
    """Literature FFT rows plus computed rows for the direct and fast ADFT."""
    f = builtin_adft32_factorization() if f is None else f
    dense = adft32_matrix() if dense is None else dense
    rows = [
        {"method": name, "additions": adds, "multiplications": mults, "source": "reference"}
        for name, adds, mults in REFERENCE_COMPLEXITIES
    ]
    d = count_dense_operations(dense)
    fa = count_operations(f)
    rows.append({"method": "Direct Computation ADFT-32", "additions": d.total_real_additions,
                 "multiplications": d.real_multiplications, "source": "computed"})
    rows.append({"method": "Fast Algorithm ADFT-32", "additions": fa.total_real_additions,
                 "multiplications": fa.real_multiplications, "source": "computed"})
    return rows


def flip_coefficient(f: FactorizedTransform, stage: int, index: int) -> FactorizedTransform:
    """Copy of ``f`` with the sign of one triple negated (0-based stage and triple)."""
    flip = {"+1": "-1", "-1": "+1", "+j": "-j", "-j": "+j"}
    st = f.stages[stage]
    triples = list(st.triples)
    r, c, k = triples[index]
    triples[index] = (r, c, flip[k])
    stages = list(f.stages)
    stages[stage] = SparseStage(st.size, tuple(triples))
    return FactorizedTransform(tuple(stages), f.name)


_TABLE = """
W1
  +1: (1,1), (1,17), (2,2), (2,16), (3,3), (3,15), (4,4), (4,14), (5,5), (5,13), (6,6), (6,12), (7,7), (7,11), (8,8), (8,10), (9,9), (10,8), (11,7), (12,6), (13,5), (14,4), (15,3), (16,2), (17,1), (18,18), (18,32), (19,19), (19,31), (20,20), (20,30), (21,21), (21,29), (22,22), (22,28), (23,23), (23,27), (24,24), (24,26), (25,25), (26,24), (27,23), (28,22), (29,21), (30,20), (31,19), (32,18)
  -1: (10,10), (11,11), (12,12), (13,13), (14,14), (15,15), (16,16), (17,17), (26,26), (27,27), (28,28), (29,29), (30,30), (31,31), (32,32)
W2
  +1: (1,1), (2,2), (2,18), (3,3), (3,19), (4,4), (4,20), (5,5), (5,21), (6,6), (6,22), (7,7), (7,23), (8,8), (8,24), (9,9), (9,25), (10,10), (10,26), (11,11), (11,27), (12,12), (12,28), (13,13), (13,29), (14,14), (14,30), (15,15), (15,31), (16,16), (16,32), (17,17), (18,2), (19,3), (20,4), (21,5), (22,6), (23,7), (24,8), (25,9), (26,10), (27,11), (28,12), (29,13), (30,14), (31,15), (32,16)
  -1: (18,18), (19,19), (20,20), (21,21), (22,22), (23,23), (24,24), (25,25), (26,26), (27,27), (28,28), (29,29), (30,30), (31,31), (32,32)
W3
  +1: (1,1), (1,9), (2,2), (2,8), (3,3), (3,7), (4,4), (4,6), (5,5), (6,4), (7,3), (8,2), (9,1), (10,10), (10,16), (11,11), (11,15), (12,12), (12,14), (13,13), (14,12), (15,11), (16,10), (17,17), (18,18), (19,19), (20,20), (21,21), (22,22), (23,23), (24,24), (25,25), (26,26), (27,27), (28,28), (29,29), (30,30), (31,31), (32,32)
  -1: (6,6), (7,7), (8,8), (9,9), (14,14), (15,15), (16,16)
W4
  +1: (1,1), (1,5), (2,2), (2,4), (3,3), (4,2), (5,1), (6,6), (7,7), (7,9), (8,8), (9,7), (10,10), (11,11), (11,13), (12,12), (13,11), (14,14), (14,16), (15,15), (16,14), (17,17), (17,29), (18,18), (19,19), (20,20), (21,21), (21,25), (22,22), (23,23), (24,24), (25,21), (26,26), (27,27), (28,28), (29,17), (30,30), (31,31), (32,32)
  -1: (4,4), (5,5), (9,9), (13,13), (16,16), (25,25), (29,29)
W5
  +1: (1,1), (1,3), (2,2), (3,1), (4,4), (4,5), (5,4), (6,6), (6,9), (7,7), (7,8), (8,7), (9,6), (10,10), (10,13), (11,11), (11,12), (12,11), (13,10), (14,14), (14,15), (15,14), (16,16), (17,31), (18,18), (19,19), (19,25), (20,20), (20,22), (20,24), (21,21), (21,23), (22,20), (23,21), (24,20), (25,19), (26,26), (27,27), (27,29), (28,28), (28,30), (28,32), (29,27), (30,28), (31,17), (31,31), (32,28)
  -1: (3,3), (5,5), (8,8), (9,9), (12,12), (13,13), (15,15), (17,17), (22,22), (23,23), (24,24), (25,25), (29,29), (30,30), (32,32)
W6
  +1: (1,1), (1,2), (2,1), (3,3), (4,4), (5,5), (6,6), (7,7), (8,8), (9,9), (10,10), (11,11), (12,12), (13,13), (14,14), (15,15), (16,16), (17,17), (18,18), (18,22), (19,19), (20,20), (20,21), (21,20), (22,18), (23,23), (24,18), (24,24), (25,25), (26,26), (26,30), (27,27), (28,28), (28,31), (29,29), (30,26), (31,28), (32,26), (32,32)
  -1: (2,2), (18,24), (21,21), (22,22), (26,32), (30,30), (31,31)
W7
  +1: (1,1), (2,2), (3,3), (4,4), (5,5), (6,6), (7,7), (8,8), (9,9), (10,10), (11,11), (12,12), (13,13), (14,14), (15,15), (16,16), (17,17), (17,30), (18,18), (18,25), (19,24), (20,20), (21,21), (22,22), (22,23), (23,22), (24,19), (24,24), (25,18), (26,26), (26,27), (27,26), (28,28), (29,29), (29,32), (30,17), (31,31), (32,29)
  -1: (19,19), (23,23), (25,25), (27,27), (30,30), (32,32)
W8
  +1: (1,1), (2,28), (3,7), (5,4), (6,26), (9,3), (11,9), (15,8), (17,2), (19,8), (23,9), (25,3), (28,26), (29,4), (31,7), (32,28)
  -1: (4,29), (7,6), (8,17), (10,30), (12,27), (13,5), (14,32), (16,31), (18,31), (20,32), (21,5), (22,27), (24,30), (26,17), (27,6), (30,29)
  +j: (5,14), (13,15), (15,12), (18,21), (20,19), (22,25), (23,13), (24,22), (25,16), (26,23), (27,10), (28,18), (30,24), (31,11), (32,20)
  -j: (2,20), (3,11), (4,24), (6,18), (7,10), (8,23), (9,16), (10,22), (11,13), (12,25), (14,19), (16,21), (19,12), (21,15), (29,14)
"""
