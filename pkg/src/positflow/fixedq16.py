"""Q16.16 signed fixed-point arithmetic with saturation and a sticky flag.

A value is raw/2^16 with raw held in int32 range.  Saturating results set
`overflowed`, which then sticks to everything derived from them, so a whole
computation can run to completion while recording that it went out of range.
Division by zero saturates toward the numerator's sign and sets the flag.
"""

from __future__ import annotations

from dataclasses import dataclass

__all__ = ["FixedQ16", "RAW_MAX", "RAW_MIN", "q16_add", "q16_sub", "q16_mul", "q16_div"]

RAW_MAX = (1 << 31) - 1
RAW_MIN = -(1 << 31)
_ONE = 1 << 16


@dataclass(frozen=True)
class FixedQ16:
    raw: int
    overflowed: bool = False

    def __post_init__(self):
        if not RAW_MIN <= self.raw <= RAW_MAX:
            raise ValueError(f"raw {self.raw} outside int32 range")

    @classmethod
    def from_int(cls, i: int) -> "FixedQ16":
        return _saturate(i * _ONE, False)

    @classmethod
    def from_float(cls, f: float) -> "FixedQ16":
        num, den = f.as_integer_ratio()
        return _saturate(_round_half_away(num * _ONE, den), False)

    def to_float(self) -> float:
        return self.raw / 65536.0  # exact: |raw| < 2^31 and 2^16 is a power of two

    def __add__(self, other):
        return q16_add(self, other)

    def __sub__(self, other):
        return q16_sub(self, other)

    def __mul__(self, other):
        return q16_mul(self, other)

    def __truediv__(self, other):
        return q16_div(self, other)

    def __neg__(self):
        return _saturate(-self.raw, self.overflowed)


def _saturate(raw: int, flag: bool) -> FixedQ16:
    if raw > RAW_MAX:
        return FixedQ16(RAW_MAX, True)
    if raw < RAW_MIN:
        return FixedQ16(RAW_MIN, True)
    return FixedQ16(raw, flag)


def _round_half_away(num: int, den: int) -> int:
    """num/den rounded to nearest int, ties away from zero (den > 0)."""
    if num >= 0:
        return (2 * num + den) // (2 * den)
    return -((-2 * num + den) // (2 * den))


def q16_add(a: FixedQ16, b: FixedQ16) -> FixedQ16:
    return _saturate(a.raw + b.raw, a.overflowed or b.overflowed)


def q16_sub(a: FixedQ16, b: FixedQ16) -> FixedQ16:
    return _saturate(a.raw - b.raw, a.overflowed or b.overflowed)


def q16_mul(a: FixedQ16, b: FixedQ16) -> FixedQ16:
    raw = _round_half_away(a.raw * b.raw, _ONE)
    return _saturate(raw, a.overflowed or b.overflowed)


def q16_div(a: FixedQ16, b: FixedQ16) -> FixedQ16:
    if b.raw == 0:
        return FixedQ16(RAW_MAX if a.raw >= 0 else RAW_MIN, True)
    num, den = a.raw * _ONE, b.raw
    if den < 0:
        num, den = -num, -den
    raw = _round_half_away(num, den)
    return _saturate(raw, a.overflowed or b.overflowed)
