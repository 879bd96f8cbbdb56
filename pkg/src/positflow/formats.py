"""The format seam: one interface the flow kernel is written against.

Each format exposes the same operations twice: a scalar form working on
single payload values (float for the reference, bit patterns for posit and
binary16, FixedQ16 for fixed point) and an array form working on whole numpy
arrays of payloads.  Both forms share the same underlying arithmetic, and the
test suite pins them to be bit-identical elementwise.

The reference format optionally records every arithmetic result through a
tap, which is how unique intermediate values are harvested; tapped runs are
scalar and single-threaded.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from . import _kernels as _k
from . import binary16 as f16
from .fixedq16 import RAW_MAX, RAW_MIN, FixedQ16, q16_add, q16_div, q16_mul, q16_sub
from .posit import ExactReal, Posit, PositConfig, encode

__all__ = [
    "ScalarFormat",
    "ReferenceFormat",
    "PositFormat",
    "Float16Format",
    "FixedQ16Format",
    "parse_format",
    "normalize_pixel",
]


class ScalarFormat:
    """Interface shared by all scalar formats (see subclasses)."""

    name: str

    # scalar operations -----------------------------------------------------
    def from_pixel(self, p: int):
        raise NotImplementedError

    def from_norm_quotient(self, pixel: int, norm: int):
        """Normalized pixel: the division happens in this format."""
        return self.div(self.from_pixel(pixel), self.from_pixel(norm))

    def add(self, a, b):
        raise NotImplementedError

    def sub(self, a, b):
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def div(self, a, b):
        raise NotImplementedError

    def neg(self, a):
        raise NotImplementedError

    def compare(self, a, b) -> int:
        """-1/0/+1 by real value; exceptional operands are a caller bug."""
        raise NotImplementedError

    def is_exception(self, v) -> bool:
        raise NotImplementedError

    def to_reference(self, v) -> float:
        raise NotImplementedError

    def singular(self, det, tau) -> bool:
        """|det| <= tau with both in-format and det non-exceptional."""
        raise NotImplementedError

    def tau_from_float(self, f: float):
        """Round a threshold into this format."""
        raise NotImplementedError

    def default_tau(self):
        return self.tau_from_float(1e-9)

    # array operations (payload arrays; layout matches scalar semantics) ----
    def zeros(self, shape):
        raise NotImplementedError

    def pack(self, values):
        """Payload list -> array representation."""
        raise NotImplementedError

    def unpack(self, arr) -> list:
        raise NotImplementedError

    def arr_add(self, a, b):
        raise NotImplementedError

    def arr_sub(self, a, b):
        raise NotImplementedError

    def arr_mul(self, a, b):
        raise NotImplementedError

    def arr_div(self, a, b):
        raise NotImplementedError

    def arr_div_by(self, a, v):
        """Array divided by one scalar payload."""
        raise NotImplementedError

    def arr_is_exception(self, a):
        raise NotImplementedError

    def arr_to_reference(self, a):
        raise NotImplementedError

    def arr_singular(self, det, tau):
        raise NotImplementedError

    def arr_equal(self, a, b) -> bool:
        raise NotImplementedError

    # array plumbing shared by the numpy-backed formats; QArray overrides ----
    def arr_getitem(self, a, idx):
        return a[idx]

    def arr_setitem(self, a, idx, b):
        a[idx] = b

    def arr_where(self, mask, a, b):
        return np.where(mask, a, b)

    def __repr__(self):
        return f"<{type(self).__name__} {self.name}>"


class ReferenceFormat(ScalarFormat):
    """Native binary64; the ground truth the others are measured against."""

    name = "reference"

    def __init__(self, tap: list | None = None):
        self.tap = tap

    def _rec(self, r: float) -> float:
        if self.tap is not None:
            self.tap.append(r)
        return r

    def from_pixel(self, p: int):
        return float(p)

    def add(self, a, b):
        return self._rec(a + b)

    def sub(self, a, b):
        return self._rec(a - b)

    def mul(self, a, b):
        return self._rec(a * b)

    def div(self, a, b):
        if b == 0.0:
            if a == 0.0 or math.isnan(a):
                r = math.nan
            else:
                r = math.copysign(math.inf, a) * math.copysign(1.0, b)
        else:
            r = a / b
        return self._rec(r)

    def neg(self, a):
        return -a

    def compare(self, a, b):
        return (a > b) - (a < b)

    def is_exception(self, v):
        return math.isnan(v) or math.isinf(v)

    def to_reference(self, v):
        return v

    def singular(self, det, tau):
        return abs(det) <= tau

    def tau_from_float(self, f):
        return float(f)

    def zeros(self, shape):
        return np.zeros(shape, np.float64)

    def pack(self, values):
        return np.asarray(values, np.float64)

    def unpack(self, arr):
        return [float(v) for v in arr.ravel()]

    def arr_add(self, a, b):
        return a + b

    def arr_sub(self, a, b):
        return a - b

    def arr_mul(self, a, b):
        return a * b

    def arr_div(self, a, b):
        with np.errstate(divide="ignore", invalid="ignore"):
            return a / b

    def arr_div_by(self, a, v):
        return a / v

    def arr_is_exception(self, a):
        return ~np.isfinite(a)

    def arr_to_reference(self, a):
        return a.astype(np.float64, copy=True)

    def arr_singular(self, det, tau):
        return np.abs(det) <= tau

    def arr_equal(self, a, b):
        return np.array_equal(np.ascontiguousarray(a).view(np.uint64),
                              np.ascontiguousarray(b).view(np.uint64))


class PositFormat(ScalarFormat):
    """posit(n, es) with payloads as raw bit patterns."""

    def __init__(self, config: PositConfig):
        self.config = config
        self.name = f"posit:{config.n},{config.es}"
        self._n = config.n
        self._es = config.es
        self._nar = config.nar_bits
        self._to_float = {}  # pattern -> exact binary64, filled lazily

    def from_pixel(self, p: int):
        return int(_k.round_pack(0, p.bit_length() - 1, p, 0, self._n, self._es)) if p else 0

    def add(self, a, b):
        return int(_k.add_words(a, b, self._n, self._es))

    def sub(self, a, b):
        return int(_k.sub_words(a, b, self._n, self._es))

    def mul(self, a, b):
        return int(_k.mul_words(a, b, self._n, self._es))

    def div(self, a, b):
        return int(_k.div_words(a, b, self._n, self._es))

    def neg(self, a):
        return int(_k.neg_word(a, self._n))

    def _signed(self, a: int) -> int:
        half = 1 << (self._n - 1)
        return (a + half) % (half << 1) - half

    def compare(self, a, b):
        sa, sb = self._signed(a), self._signed(b)
        return (sa > sb) - (sa < sb)

    def is_exception(self, v):
        return v == self._nar

    def to_reference(self, v):
        cached = self._to_float.get(v)
        if cached is None:
            cached = Posit(v, self.config).to_float()
            self._to_float[v] = cached
        return cached

    def singular(self, det, tau):
        sd, st = self._signed(det), self._signed(tau)
        return -st <= sd <= st

    def tau_from_float(self, f):
        return Posit.from_float(f, self.config).bits

    def zeros(self, shape):
        return np.zeros(shape, np.uint32)

    def pack(self, values):
        return np.asarray(values, np.uint32)

    def unpack(self, arr):
        return [int(v) for v in arr.ravel()]

    def _flat(self, fn, a, b):
        out = fn(a.ravel(), b.ravel(), self._n, self._es)
        return out.reshape(a.shape)

    def arr_add(self, a, b):
        return self._flat(_k.add_arrays, a, b)

    def arr_sub(self, a, b):
        return self._flat(_k.sub_arrays, a, b)

    def arr_mul(self, a, b):
        return self._flat(_k.mul_arrays, a, b)

    def arr_div(self, a, b):
        return self._flat(_k.div_arrays, a, b)

    def arr_div_by(self, a, v):
        return _k.div_arrays_scalar(a.ravel(), v, self._n, self._es).reshape(a.shape)

    def arr_is_exception(self, a):
        return a == self._nar

    def arr_to_reference(self, a):
        uniq, inv = np.unique(a, return_inverse=True)
        vals = np.array([self.to_reference(int(u)) for u in uniq], np.float64)
        return vals[inv].reshape(a.shape)

    def arr_singular(self, det, tau):
        half = np.int64(1) << (self._n - 1)
        keys = ((det.astype(np.int64) + half) % (half << 1)) - half
        tk = self._signed(tau)
        return (keys >= -tk) & (keys <= tk)

    def arr_equal(self, a, b):
        return np.array_equal(a, b)


class Float16Format(ScalarFormat):
    """IEEE binary16 with payloads as raw bit patterns.

    Array arithmetic runs through numpy's float16 (exactly rounded for
    +,-,*,/ because its float32 interior is wide enough to make the double
    rounding innocuous), with NaNs collapsed to the canonical pattern to
    match the scalar routines bit-for-bit.
    """

    name = "float16"

    def from_pixel(self, p: int):
        return f16.f16_from_real(p)

    def add(self, a, b):
        return f16.f16_add(a, b)

    def sub(self, a, b):
        return f16.f16_sub(a, b)

    def mul(self, a, b):
        return f16.f16_mul(a, b)

    def div(self, a, b):
        return f16.f16_div(a, b)

    def neg(self, a):
        return f16.f16_neg(a)

    def compare(self, a, b):
        ka, kb = self._key(a), self._key(b)
        return (ka > kb) - (ka < kb)

    @staticmethod
    def _key(v: int) -> int:
        mag = v & 0x7FFF
        return -mag if v & 0x8000 else mag

    def is_exception(self, v):
        return (v & 0x7C00) == 0x7C00  # NaN or +/-inf

    def to_reference(self, v):
        r = f16.f16_to_real(v)
        if isinstance(r, float):
            return r
        return math.ldexp(r.numerator, 1 - r.denominator.bit_length())

    def singular(self, det, tau):
        return (det & 0x7FFF) <= (tau & 0x7FFF)

    def tau_from_float(self, f):
        return f16.f16_from_real(f)

    def zeros(self, shape):
        return np.zeros(shape, np.uint16)

    def pack(self, values):
        return np.asarray(values, np.uint16)

    def unpack(self, arr):
        return [int(v) for v in arr.ravel()]

    @staticmethod
    def _canon(h: np.ndarray) -> np.ndarray:
        bits = h.view(np.uint16)
        return np.where(np.isnan(h), np.uint16(f16.NAN), bits)

    def _op(self, ufunc, a, b):
        with np.errstate(all="ignore"):
            return self._canon(ufunc(a.view(np.float16), b.view(np.float16)))

    def arr_add(self, a, b):
        return self._op(np.add, a, b)

    def arr_sub(self, a, b):
        return self._op(np.subtract, a, b)

    def arr_mul(self, a, b):
        return self._op(np.multiply, a, b)

    def arr_div(self, a, b):
        return self._op(np.divide, a, b)

    def arr_div_by(self, a, v):
        with np.errstate(all="ignore"):
            divisor = np.float16(self.to_reference(v))  # exact for finite v
            return self._canon(a.view(np.float16) / divisor)

    def arr_is_exception(self, a):
        return (a & 0x7C00) == 0x7C00

    def arr_to_reference(self, a):
        return a.view(np.float16).astype(np.float64)

    def arr_singular(self, det, tau):
        return (det & 0x7FFF) <= (tau & 0x7FFF)

    def arr_equal(self, a, b):
        return np.array_equal(a, b)


class QArray(NamedTuple):
    """Array payload for Q16.16: raw int32 values plus sticky flags."""

    raw: np.ndarray
    ovf: np.ndarray


class FixedQ16Format(ScalarFormat):
    name = "q16"

    def from_pixel(self, p: int):
        return FixedQ16.from_int(p)

    def add(self, a, b):
        return q16_add(a, b)

    def sub(self, a, b):
        return q16_sub(a, b)

    def mul(self, a, b):
        return q16_mul(a, b)

    def div(self, a, b):
        return q16_div(a, b)

    def neg(self, a):
        return -a

    def compare(self, a, b):
        return (a.raw > b.raw) - (a.raw < b.raw)

    def is_exception(self, v):
        return v.overflowed

    def to_reference(self, v):
        return v.to_float()

    def singular(self, det, tau):
        return abs(det.raw) <= tau.raw

    def tau_from_float(self, f):
        return FixedQ16.from_float(f)

    def default_tau(self):
        return FixedQ16(0)  # exact-zero determinant only

    def zeros(self, shape):
        return QArray(np.zeros(shape, np.int32), np.zeros(shape, bool))

    def pack(self, values):
        raw = np.asarray([v.raw for v in values], np.int32)
        ovf = np.asarray([v.overflowed for v in values], bool)
        return QArray(raw, ovf)

    def unpack(self, arr):
        return [FixedQ16(int(r), bool(o))
                for r, o in zip(arr.raw.ravel(), arr.ovf.ravel())]

    @staticmethod
    def _sat(raw64: np.ndarray, ovf: np.ndarray) -> QArray:
        over = (raw64 > RAW_MAX) | (raw64 < RAW_MIN)
        clipped = np.clip(raw64, RAW_MIN, RAW_MAX).astype(np.int32)
        return QArray(clipped, ovf | over)

    @staticmethod
    def _round_half_away64(num: np.ndarray, den: int) -> np.ndarray:
        # floor((|num| + den/2) / den) with the sign reapplied
        mag = np.abs(num)
        r = (mag + den // 2) // den
        return np.where(num < 0, -r, r)

    def arr_add(self, a, b):
        return self._sat(a.raw.astype(np.int64) + b.raw.astype(np.int64),
                         a.ovf | b.ovf)

    def arr_sub(self, a, b):
        return self._sat(a.raw.astype(np.int64) - b.raw.astype(np.int64),
                         a.ovf | b.ovf)

    def arr_mul(self, a, b):
        prod = a.raw.astype(np.int64) * b.raw.astype(np.int64)
        return self._sat(self._round_half_away64(prod, 1 << 16), a.ovf | b.ovf)

    def arr_div(self, a, b):
        num = a.raw.astype(np.int64) << 16
        den = b.raw.astype(np.int64)
        zero = den == 0
        num = np.where(den < 0, -num, num)
        den = np.where(den < 0, -den, den)
        den_safe = np.where(zero, 1, den)
        # elementwise round-half-away with per-element denominators
        mag = np.abs(num)
        q = (2 * mag + den_safe) // (2 * den_safe)
        raw = np.where(num < 0, -q, q)
        raw = np.where(zero, np.where(a.raw >= 0, RAW_MAX, RAW_MIN), raw)
        return self._sat(raw, a.ovf | b.ovf | zero)

    def arr_div_by(self, a, v):
        return self.arr_div(a, QArray(np.full(a.raw.shape, v.raw, np.int32),
                                      np.full(a.raw.shape, v.overflowed, bool)))

    def arr_is_exception(self, a):
        return a.ovf.copy()

    def arr_to_reference(self, a):
        return a.raw.astype(np.float64) / 65536.0

    def arr_singular(self, det, tau):
        return np.abs(det.raw.astype(np.int64)) <= tau.raw

    def arr_equal(self, a, b):
        return np.array_equal(a.raw, b.raw) and np.array_equal(a.ovf, b.ovf)

    def arr_getitem(self, a, idx):
        return QArray(a.raw[idx], a.ovf[idx])

    def arr_setitem(self, a, idx, b):
        a.raw[idx] = b.raw
        a.ovf[idx] = b.ovf

    def arr_where(self, mask, a, b):
        return QArray(np.where(mask, a.raw, b.raw), np.where(mask, a.ovf, b.ovf))


def normalize_pixel(pixel: int, norm: int, fmt: ScalarFormat):
    """Scale an 8-bit sample by the norm divisor, rounding in-format."""
    if not 0 <= pixel <= 255:
        raise ValueError(f"pixel {pixel} outside 0..255")
    if not 1 <= norm <= 255:
        raise ValueError(f"norm {norm} outside 1..255")
    return fmt.from_norm_quotient(pixel, norm)


def parse_format(spec: str, tap: list | None = None) -> ScalarFormat:
    """Build a format from its CLI spelling.

    reference | posit:N,ES | float16 | q16
    """
    s = spec.strip().lower()
    if s == "reference":
        return ReferenceFormat(tap=tap)
    if tap is not None:
        raise ValueError("the value tap exists only on the reference format")
    if s == "float16":
        return Float16Format()
    if s == "q16":
        return FixedQ16Format()
    if s.startswith("posit:"):
        try:
            n_str, es_str = s[len("posit:"):].split(",")
            return PositFormat(PositConfig(int(n_str), int(es_str)))
        except ValueError as exc:
            raise ValueError(f"bad posit spec {spec!r} (want posit:N,ES)") from exc
    raise ValueError(f"unknown format {spec!r}")
