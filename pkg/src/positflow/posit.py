"""Parametric posit(n, es) values: decode, correctly rounded encode, arithmetic.

Bit patterns are kept in plain ints; the arithmetic itself lives in
:mod:`positflow._kernels` as fixed-width integer routines shared by the
scalar API here and the array code in the flow engine, so there is exactly
one implementation of the semantics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from . import _kernels as _k

__all__ = [
    "PositConfig",
    "Posit",
    "PositClass",
    "DecodedPosit",
    "ExactReal",
    "decode",
    "encode",
    "int2pos",
    "pos2int",
]

# With sticky information present, rounding needs the guard position to fall
# inside the mantissa; 48 bits is comfortably past any n <= 32 window.
_ENCODE_WIDTH = 48


@dataclass(frozen=True)
class PositConfig:
    """Bit width and exponent-field size of a posit format."""

    n: int
    es: int

    def __post_init__(self):
        if not 2 <= self.n <= 32:
            raise ValueError(f"posit width n={self.n} outside 2..32")
        if not 0 <= self.es <= 4:
            raise ValueError(f"posit es={self.es} outside 0..4")
        if self.es > self.n - 1:
            raise ValueError(f"es={self.es} too large for n={self.n}")

    @property
    def useed(self) -> int:
        return 1 << (1 << self.es)

    @property
    def nar_bits(self) -> int:
        return 1 << (self.n - 1)

    @property
    def maxpos_bits(self) -> int:
        return (1 << (self.n - 1)) - 1

    @property
    def minpos_bits(self) -> int:
        return 1

    @property
    def max_scale(self) -> int:
        """maxpos = 2^max_scale; minpos = 2^-max_scale."""
        return (self.n - 2) << self.es

    def __str__(self):
        return f"posit({self.n},{self.es})"


class PositClass(Enum):
    ZERO = "zero"
    NAR = "nar"
    REAL = "real"


@dataclass(frozen=True)
class DecodedPosit:
    """Exact decomposition of a pattern: value = sign * 2^scale * (1 + frac/2^fn)."""

    klass: PositClass
    sign: int = 1  # +1 or -1
    scale: int = 0
    frac: int = 0
    fn: int = 0

    @property
    def significand(self) -> Fraction:
        return 1 + Fraction(self.frac, 1 << self.fn)

    def value(self) -> Fraction | None:
        if self.klass is PositClass.NAR:
            return None
        if self.klass is PositClass.ZERO:
            return Fraction(0)
        return self.sign * Fraction(2) ** self.scale * self.significand


@dataclass(frozen=True)
class ExactReal:
    """sign * mantissa * 2^exponent, exactly, or one of the special markers.

    `inexact` marks a value known only to lie strictly between mantissa and
    mantissa+1 units of 2^exponent (quotient residue); such values must carry
    enough mantissa bits for the consumer's rounding window.
    """

    sign: int = 0  # 0 positive, 1 negative
    exponent: int = 0
    mantissa: int = 0  # magnitude; 0 encodes zero
    inexact: bool = False
    nar: bool = False

    @classmethod
    def zero(cls) -> "ExactReal":
        return cls()

    @classmethod
    def nar_source(cls) -> "ExactReal":
        return cls(nar=True)

    @classmethod
    def from_int(cls, i: int) -> "ExactReal":
        return cls(sign=1 if i < 0 else 0, mantissa=abs(i))

    @classmethod
    def from_float(cls, f: float) -> "ExactReal":
        if math.isnan(f) or math.isinf(f):
            return cls.nar_source()
        if f == 0.0:
            return cls.zero()
        num, den = f.as_integer_ratio()
        return cls(sign=1 if num < 0 else 0, exponent=1 - den.bit_length(),
                   mantissa=abs(num))

    @classmethod
    def from_fraction(cls, fr: Fraction, precision: int = 64) -> "ExactReal":
        if fr == 0:
            return cls.zero()
        num, den = abs(fr.numerator), fr.denominator
        sign = 1 if fr < 0 else 0
        if den & (den - 1) == 0:  # dyadic: exact
            return cls(sign=sign, exponent=1 - den.bit_length(), mantissa=num)
        shift = max(precision + den.bit_length() - num.bit_length(), 0)
        q, r = divmod(num << shift, den)
        return cls(sign=sign, exponent=-shift, mantissa=q, inexact=r != 0)

    def to_fraction(self) -> Fraction:
        if self.nar:
            raise ValueError("NaR has no rational value")
        return (-1) ** self.sign * self.mantissa * Fraction(2) ** self.exponent


@dataclass(frozen=True)
class Posit:
    """An n-bit posit pattern tied to its configuration."""

    bits: int
    config: PositConfig

    def __post_init__(self):
        if not 0 <= self.bits < (1 << self.config.n):
            raise ValueError(f"bits {self.bits:#x} outside {self.config.n}-bit range")

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, config: PositConfig) -> "Posit":
        return cls(0, config)

    @classmethod
    def nar(cls, config: PositConfig) -> "Posit":
        return cls(config.nar_bits, config)

    @classmethod
    def minpos(cls, config: PositConfig) -> "Posit":
        return cls(1, config)

    @classmethod
    def maxpos(cls, config: PositConfig) -> "Posit":
        return cls(config.maxpos_bits, config)

    @classmethod
    def from_float(cls, f: float, config: PositConfig) -> "Posit":
        return encode(ExactReal.from_float(f), config)

    @classmethod
    def from_fraction(cls, fr: Fraction, config: PositConfig) -> "Posit":
        return encode(ExactReal.from_fraction(fr, precision=_ENCODE_WIDTH), config)

    # -- predicates / conversions ------------------------------------------

    @property
    def is_zero(self) -> bool:
        return self.bits == 0

    @property
    def is_nar(self) -> bool:
        return self.bits == self.config.nar_bits

    def to_fraction(self) -> Fraction | None:
        return decode(self).value()

    def to_float(self) -> float:
        """Exact for every n<=32, es<=4 posit (they all fit binary64)."""
        v = self.to_fraction()
        if v is None:
            return math.nan
        return math.ldexp(v.numerator, 1 - v.denominator.bit_length())

    # -- arithmetic ----------------------------------------------------------

    def _check(self, other: "Posit") -> None:
        if self.config != other.config:
            raise ValueError(f"config mismatch: {self.config} vs {other.config}")

    def __add__(self, other: "Posit") -> "Posit":
        self._check(other)
        c = self.config
        return Posit(int(_k.add_words(self.bits, other.bits, c.n, c.es)), c)

    def __sub__(self, other: "Posit") -> "Posit":
        self._check(other)
        c = self.config
        return Posit(int(_k.sub_words(self.bits, other.bits, c.n, c.es)), c)

    def __mul__(self, other: "Posit") -> "Posit":
        self._check(other)
        c = self.config
        return Posit(int(_k.mul_words(self.bits, other.bits, c.n, c.es)), c)

    def __truediv__(self, other: "Posit") -> "Posit":
        self._check(other)
        c = self.config
        return Posit(int(_k.div_words(self.bits, other.bits, c.n, c.es)), c)

    def __neg__(self) -> "Posit":
        c = self.config
        return Posit(int(_k.neg_word(self.bits, c.n)), c)

    def __repr__(self):
        return f"Posit({self.bits:#0{2 + (self.config.n + 3) // 4}x}, {self.config})"


def decode(p: Posit) -> DecodedPosit:
    """Exact decomposition; total over well-formed patterns."""
    if p.is_zero:
        return DecodedPosit(PositClass.ZERO)
    if p.is_nar:
        return DecodedPosit(PositClass.NAR)
    c = p.config
    sign, scale, mant, fb = _k.decode_parts(p.bits, c.n, c.es)
    return DecodedPosit(PositClass.REAL, sign=-1 if sign else 1, scale=int(scale),
                        frac=int(mant) - (1 << int(fb)), fn=int(fb))


def encode(x: ExactReal, config: PositConfig) -> Posit:
    """Nearest posit (ties to even pattern); clamps to maxpos/minpos."""
    if x.nar:
        return Posit.nar(config)
    if x.mantissa == 0:
        return Posit.zero(config)
    mant, exp, sticky = x.mantissa, x.exponent, x.inexact
    width = mant.bit_length()
    if width > _ENCODE_WIDTH:
        drop = width - _ENCODE_WIDTH
        sticky = sticky or (mant & ((1 << drop) - 1)) != 0
        mant >>= drop
        exp += drop
        width = _ENCODE_WIDTH
    elif sticky and width < 40:
        # too coarse: the interval (mant, mant+1) ulps spans rounding cells
        raise ValueError("inexact ExactReal carries too few mantissa bits")
    scale = exp + width - 1
    bits = int(_k.round_pack(1 if x.sign else 0, scale, mant,
                             1 if sticky else 0, config.n, config.es))
    return Posit(bits, config)


def int2pos(i: int, config: PositConfig) -> Posit:
    """Round a signed integer into the format (same rounding as encode)."""
    return encode(ExactReal.from_int(i), config)


def pos2int(p: Posit, int_bits: int = 32) -> int:
    """Nearest integer (ties to even), saturating at the signed bounds."""
    v = p.to_fraction()
    if v is None:
        raise ValueError("pos2int of NaR")
    i = round(v)  # Fraction.__round__ is round-half-even
    top = (1 << (int_bits - 1)) - 1
    return max(-top - 1, min(top, i))
