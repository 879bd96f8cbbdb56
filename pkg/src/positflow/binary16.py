"""Software IEEE 754 binary16 arithmetic on 16-bit patterns.

Values are plain ints (1 sign, 5 exponent, 10 fraction bits).  Finite
operands are unpacked to exact integer significands, combined exactly (add,
mul) or to a wide quotient with a remainder sticky (div), and packed back
under round-to-nearest-even with full subnormal support.  Every invalid
operation yields the single canonical quiet NaN 0x7E00; payloads are not
propagated.
"""

from __future__ import annotations

import math
from fractions import Fraction

__all__ = [
    "NAN", "POS_INF", "NEG_INF", "MAX_FINITE",
    "is_nan", "is_inf", "is_finite", "is_zero",
    "f16_add", "f16_sub", "f16_mul", "f16_div", "f16_neg",
    "f16_from_real", "f16_to_real",
]

NAN = 0x7E00
POS_INF = 0x7C00
NEG_INF = 0xFC00
MAX_FINITE = 0x7BFF  # 65504


def is_nan(bits: int) -> bool:
    return (bits & 0x7C00) == 0x7C00 and (bits & 0x3FF) != 0


def is_inf(bits: int) -> bool:
    return (bits & 0x7FFF) == 0x7C00


def is_finite(bits: int) -> bool:
    return (bits & 0x7C00) != 0x7C00


def is_zero(bits: int) -> bool:
    return (bits & 0x7FFF) == 0


def f16_neg(bits: int) -> int:
    if is_nan(bits):
        return NAN
    return bits ^ 0x8000


def _unpack(bits: int) -> tuple[int, int, int]:
    """(sign, mant, lsb_exp) with value = (-1)^sign * mant * 2^lsb_exp.

    Finite nonzero patterns only.  Subnormals come out with lsb_exp = -24.
    """
    sign = bits >> 15
    exp = (bits >> 10) & 0x1F
    frac = bits & 0x3FF
    if exp == 0:
        return sign, frac, -24
    return sign, frac | 0x400, exp - 25


def _pack(sign: int, mant: int, exp: int, sticky: int) -> int:
    """Round (-1)^sign * mant * 2^exp (plus sticky residue) to a pattern."""
    sign_bit = sign << 15
    if mant == 0:
        return sign_bit  # only reachable with sticky == 0
    top = exp + mant.bit_length() - 1  # floor(log2(magnitude))
    if top > 15:
        return sign_bit | POS_INF
    if top >= -14:
        # normals: 11 significand bits; align to 13 = sig + guard + round
        shift = mant.bit_length() - 13
        if shift > 0:
            work = mant >> shift
            sticky |= (mant & ((1 << shift) - 1)) != 0
        else:
            work = mant << -shift
        sig = work >> 2
        guard = (work >> 1) & 1
        rest = (work & 1) | sticky
        if guard and (rest or (sig & 1)):
            sig += 1
            if sig == 2048:
                sig = 1024
                top += 1
                if top > 15:
                    return sign_bit | POS_INF
        return sign_bit | ((top + 25) << 10) | (sig & 0x3FF)
    # subnormal region: quantum 2^-24
    shift = -24 - exp
    if shift <= 0:
        return sign_bit | (mant << -shift)  # exact; mant small by range
    sig = mant >> shift
    guard = (mant >> (shift - 1)) & 1
    rest = (mant & ((1 << (shift - 1)) - 1) != 0) | sticky
    if guard and (rest or (sig & 1)):
        sig += 1
    return sign_bit | sig  # sig == 1024 lands exactly on the smallest normal


def f16_add(a: int, b: int) -> int:
    if is_nan(a) or is_nan(b):
        return NAN
    if is_inf(a) or is_inf(b):
        if is_inf(a) and is_inf(b) and (a ^ b) & 0x8000:
            return NAN
        return a if is_inf(a) else b
    if is_zero(a) and is_zero(b):
        return a & b & 0x8000  # -0 only when both are -0
    if is_zero(a):
        return b
    if is_zero(b):
        return a
    sa, ma, ea = _unpack(a)
    sb, mb, eb = _unpack(b)
    e = min(ea, eb)
    total = (ma if sa == 0 else -ma) << (ea - e)
    total += (mb if sb == 0 else -mb) << (eb - e)
    if total == 0:
        return 0x0000  # exact cancellation gives +0
    sign = 1 if total < 0 else 0
    return _pack(sign, abs(total), e, 0)


def f16_sub(a: int, b: int) -> int:
    if is_nan(b):
        return NAN
    return f16_add(a, b ^ 0x8000)


def f16_mul(a: int, b: int) -> int:
    if is_nan(a) or is_nan(b):
        return NAN
    sign = (a ^ b) >> 15
    if is_inf(a) or is_inf(b):
        if is_zero(a) or is_zero(b):
            return NAN
        return (sign << 15) | POS_INF
    if is_zero(a) or is_zero(b):
        return sign << 15
    _, ma, ea = _unpack(a)
    _, mb, eb = _unpack(b)
    return _pack(sign, ma * mb, ea + eb, 0)


def f16_div(a: int, b: int) -> int:
    if is_nan(a) or is_nan(b):
        return NAN
    sign = (a ^ b) >> 15
    if is_inf(a):
        return NAN if is_inf(b) else (sign << 15) | POS_INF
    if is_inf(b):
        return sign << 15
    if is_zero(b):
        return NAN if is_zero(a) else (sign << 15) | POS_INF
    if is_zero(a):
        return sign << 15
    _, ma, ea = _unpack(a)
    _, mb, eb = _unpack(b)
    # quotient to >= 15 significant bits; remainder feeds the sticky
    q, r = divmod(ma << 25, mb)
    return _pack(sign, q, ea - eb - 25, r != 0)


def f16_from_real(x) -> int:
    """Round an exact real (int, float, or Fraction) to binary16."""
    if isinstance(x, float):
        if math.isnan(x):
            return NAN
        if math.isinf(x):
            return POS_INF if x > 0 else NEG_INF
        if x == 0.0:
            return 0x8000 if math.copysign(1.0, x) < 0 else 0x0000
        num, den = x.as_integer_ratio()
        return _from_ratio(num, den)
    if isinstance(x, int):
        if x == 0:
            return 0x0000
        return _from_ratio(x, 1)
    fr = Fraction(x)
    if fr == 0:
        return 0x0000
    return _from_ratio(fr.numerator, fr.denominator)


def _from_ratio(num: int, den: int) -> int:
    sign = 1 if num < 0 else 0
    num = abs(num)
    if den & (den - 1) == 0:
        return _pack(sign, num, 1 - den.bit_length(), 0)
    shift = max(32 + den.bit_length() - num.bit_length(), 0)
    q, r = divmod(num << shift, den)
    return _pack(sign, q, -shift, r != 0)


def f16_to_real(bits: int):
    """Exact Fraction for finite patterns; math.inf/nan for the rest."""
    if is_nan(bits):
        return math.nan
    if is_inf(bits):
        return math.inf if bits == POS_INF else -math.inf
    if is_zero(bits):
        return Fraction(0)
    sign, mant, exp = _unpack(bits)
    v = mant * Fraction(2) ** exp
    return -v if sign else v
