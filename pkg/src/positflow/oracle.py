"""Exact-rational reference arithmetic for checking the bit-level format engines.

Everything here favors obviousness over speed: values are decoded from bit
strings by direct evaluation of the format definition, intermediate results
are kept as exact `Fraction`s, and rounding picks between two candidate bit
patterns by explicit comparison against the decision boundary.  None of the
shift/mask machinery of the production engines is reused, so a mismatch
between the two routes points at a real defect on one side.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from fractions import Fraction
from functools import lru_cache

__all__ = [
    "posit_value",
    "posit_round",
    "posit_op",
    "binary16_value",
    "binary16_round",
    "binary16_op",
    "q16_op",
]


# ---------------------------------------------------------------------------
# posit oracle
# ---------------------------------------------------------------------------

def posit_value(bits: int, n: int, es: int) -> Fraction | None:
    """Value of an n-bit posit pattern, or None for NaR.

    Decodes by spelling the word out as a character string and reading the
    sign / regime / exponent / fraction fields off it, then evaluating
    sign * useed^k * 2^e * (1 + frac/2^fn) exactly.
    """
    if bits == 0:
        return Fraction(0)
    if bits == 1 << (n - 1):
        return None
    word = format(bits & ((1 << n) - 1), f"0{n}b")
    negative = word[0] == "1"
    if negative:
        # magnitude of a negative posit is the two's complement of the word
        mag = (1 << n) - bits
        word = format(mag, f"0{n}b")
    body = word[1:]
    run_char = body[0]
    run = len(body) - len(body.lstrip(run_char))
    k = run - 1 if run_char == "1" else -run
    rest = body[run + 1:]  # skip the regime terminator (may be absent)
    exp_bits = rest[:es].ljust(es, "0")  # truncated exponents read as zero-padded
    e = int(exp_bits, 2) if es else 0
    frac_bits = rest[es:]
    fn = len(frac_bits)
    frac = int(frac_bits, 2) if fn else 0
    useed = Fraction(2) ** (1 << es)
    value = useed ** k * Fraction(2) ** e * (1 + Fraction(frac, 1 << fn))
    return -value if negative else value


# Magnitudes are handled internally as exact scaled rationals (p, q, e)
# meaning (p/q) * 2^e with p, q positive ints; dyadic values have q == 1.
# This keeps the hot comparisons in plain integer arithmetic.

def _fraction_to_dyadic(fr: Fraction) -> tuple[int, int]:
    num, den = fr.numerator, fr.denominator
    e = 1 - den.bit_length()
    assert den == 1 << -e if e <= 0 else True
    return num, e


def _cmp_rational_dyadic(p: int, q: int, e: int, m: int, me: int) -> int:
    """Sign of (p/q)*2^e - m*2^me for positive operands."""
    shift = e - me
    if shift >= 0:
        lhs, rhs = p << shift, m * q
    else:
        lhs, rhs = p, (m * q) << -shift
    return (lhs > rhs) - (lhs < rhs)


def _rational_float(p: int, q: int, e: int) -> float:
    excess = max(p.bit_length() - 64, 0)
    approx = (p >> excess) / q
    return math.ldexp(approx, e + excess)


@lru_cache(maxsize=8)
def _positive_table(n: int, es: int):
    """Positive patterns' values as dyadics (index = pattern) + float keys."""
    vals = [(0, 0)] * (1 << (n - 1))
    keys = [0.0] * (1 << (n - 1))
    for p in range(1, 1 << (n - 1)):
        v = _fraction_to_dyadic(posit_value(p, n, es))
        vals[p] = v
        keys[p] = math.ldexp(v[0], v[1])
    return vals, keys


@lru_cache(maxsize=8)
def _boundary_table(n: int, es: int):
    """Rounding boundary between patterns T and T+1, indexed by T."""
    return [(0, 0)] + [_fraction_to_dyadic(posit_value((t << 1) | 1, n + 1, es))
                       for t in range(1, 1 << (n - 1))]


@lru_cache(maxsize=8)
def _word_table(n: int, es: int):
    """Signed dyadic values of all 2^n words (None for NaR)."""
    out = []
    for p in range(1 << n):
        v = posit_value(p, n, es)
        out.append(None if v is None else _fraction_to_dyadic(v))
    return out


def _maxpos_pattern(n: int) -> int:
    return (1 << (n - 1)) - 1


def posit_round(x: Fraction, n: int, es: int) -> int:
    """Nearest posit pattern to the exact real x.

    Distance follows the posit encoding expansion: the boundary between
    adjacent patterns T and T+1 is the value of the (n+1)-bit pattern
    (T<<1)|1 in the same es, with exact ties resolved to the even pattern.
    Magnitudes beyond maxpos clamp to maxpos; nonzero magnitudes below
    minpos clamp to minpos (a nonzero real never rounds to zero or NaR).
    """
    if x == 0:
        return 0
    pat = _round_magnitude(abs(x.numerator), x.denominator, 0, n, es)
    if x < 0:
        pat = ((1 << n) - pat) & ((1 << n) - 1)
    return pat


def _round_magnitude(p: int, q: int, e: int, n: int, es: int) -> int:
    """Positive pattern nearest to magnitude (p/q)*2^e."""
    bound = (n - 2) << es
    # t brackets floor(log2(mag)) within +/-1; settle exactly only on the fence
    t = p.bit_length() - q.bit_length() + e
    if t >= bound - 1 and _cmp_rational_dyadic(p, q, e, 1, bound) >= 0:
        return _maxpos_pattern(n)  # at or above maxpos
    if t <= 1 - bound and _cmp_rational_dyadic(p, q, e, 1, -bound) <= 0:
        return 1  # at or below minpos
    pat = _bracket(p, q, e, n, es)
    if n <= 16:
        bm, be = _boundary_table(n, es)[pat]
    else:
        bm, be = _fraction_to_dyadic(posit_value((pat << 1) | 1, n + 1, es))
    c = _cmp_rational_dyadic(p, q, e, bm, be)
    if c > 0 or (c == 0 and pat & 1):
        pat += 1
    return pat


def _bracket(p: int, q: int, e: int, n: int, es: int) -> int:
    """Largest positive pattern whose value is <= the magnitude."""
    top = _maxpos_pattern(n)
    if n <= 16:
        vals, keys = _positive_table(n, es)
        guess = bisect_right(keys, _rational_float(p, q, e)) - 1
        guess = min(max(guess, 1), top)
        # the float key is only a seed; settle the bracket exactly
        while guess < top and _cmp_rational_dyadic(p, q, e, *vals[guess + 1]) >= 0:
            guess += 1
        while guess > 1 and _cmp_rational_dyadic(p, q, e, *vals[guess]) < 0:
            guess -= 1
        return guess
    lo, hi = 1, top  # val(lo) <= mag < val(hi) after the clamps
    while hi - lo > 1:
        mid = (lo + hi) // 2
        mm, me = _fraction_to_dyadic(posit_value(mid, n, es))
        if _cmp_rational_dyadic(p, q, e, mm, me) >= 0:
            lo = mid
        else:
            hi = mid
    return lo


def posit_op(op: str, a: int, b: int, n: int, es: int) -> int:
    """Correctly rounded posit result of `a op b` via exact rationals."""
    nar = 1 << (n - 1)
    if n <= 16:
        table = _word_table(n, es)
        va, vb = table[a], table[b]
    else:
        fa, fb = posit_value(a, n, es), posit_value(b, n, es)
        va = None if fa is None else _fraction_to_dyadic(fa)
        vb = None if fb is None else _fraction_to_dyadic(fb)
    if va is None or vb is None:
        return nar
    ma, ea = va
    mb, eb = vb
    if op == "add" or op == "sub":
        if op == "sub":
            mb = -mb
        e = min(ea, eb)
        m = (ma << (ea - e)) + (mb << (eb - e))
        if m == 0:
            return 0
        p, q = (m, 1) if m > 0 else (-m, 1)
    elif op == "mul":
        m = ma * mb
        e = ea + eb
        if m == 0:
            return 0
        p, q = (m, 1) if m > 0 else (-m, 1)
    elif op == "div":
        if mb == 0:
            return nar
        if ma == 0:
            return 0
        m = 1 if (ma > 0) == (mb > 0) else -1
        p, q, e = abs(ma), abs(mb), ea - eb
    else:
        raise ValueError(f"unknown op {op!r}")
    pat = _round_magnitude(p, q, e, n, es)
    if m < 0:
        pat = ((1 << n) - pat) & ((1 << n) - 1)
    return pat


# ---------------------------------------------------------------------------
# binary16 oracle
# ---------------------------------------------------------------------------

F16_NAN = 0x7E00  # the single canonical quiet NaN
F16_POS_INF = 0x7C00
F16_NEG_INF = 0xFC00
_F16_MAX = Fraction(65504)
_F16_OVERFLOW = Fraction(65520)  # halfway to the next would-be step


def binary16_value(bits: int):
    """Fraction for finite patterns; math.inf/-inf/nan for the rest."""
    sign = -1 if bits & 0x8000 else 1
    exp = (bits >> 10) & 0x1F
    frac = bits & 0x3FF
    if exp == 0x1F:
        return math.nan if frac else sign * math.inf
    if exp == 0:
        return sign * Fraction(frac, 1 << 24)
    return sign * Fraction(2) ** (exp - 15) * (1 + Fraction(frac, 1 << 10))


def _floor_log2(x: Fraction) -> int:
    e = x.numerator.bit_length() - x.denominator.bit_length()
    if Fraction(2) ** e > x:
        e -= 1
    return e


def binary16_round(x: Fraction) -> int:
    """Round a nonzero exact real to binary16 (nearest, ties to even)."""
    sign_bit = 0x8000 if x < 0 else 0
    mag = -x if x < 0 else x
    if mag >= _F16_OVERFLOW:
        return sign_bit | F16_POS_INF
    if mag > _F16_MAX:
        return sign_bit | 0x7BFF
    e = _floor_log2(mag)
    if e < -14:
        # subnormal region: quantum 2^-24; round(Fraction) ties to even
        q = round(mag * (1 << 24))
        return sign_bit | q  # q == 1024 lands exactly on the smallest normal
    sig = round(mag / (Fraction(2) ** (e - 10)))
    if sig == 2048:  # rounding carried into the next binade
        sig = 1024
        e += 1
    return sign_bit | ((e + 15) << 10) | (sig - 1024)


def _f16_is_nan(bits: int) -> bool:
    return (bits & 0x7C00) == 0x7C00 and (bits & 0x3FF) != 0


def _f16_is_inf(bits: int) -> bool:
    return (bits & 0x7FFF) == 0x7C00


def binary16_op(op: str, a: int, b: int) -> int:
    """IEEE-754 round-to-nearest-even result of `a op b` on bit patterns."""
    if _f16_is_nan(a) or _f16_is_nan(b):
        return F16_NAN
    if op == "sub":
        return binary16_op("add", a, b ^ 0x8000)
    sa, sb = a >> 15, b >> 15
    if op == "add":
        if _f16_is_inf(a) or _f16_is_inf(b):
            if _f16_is_inf(a) and _f16_is_inf(b) and sa != sb:
                return F16_NAN
            return a if _f16_is_inf(a) else b
        va, vb = binary16_value(a), binary16_value(b)
        r = va + vb
        if r == 0:
            # exact zero: -0 only when both addends are -0
            both_neg_zero = (a | b) & 0x7FFF == 0 and sa and sb
            return 0x8000 if both_neg_zero else 0x0000
        return binary16_round(r)
    sign = sa ^ sb
    sign_bit = sign << 15
    if op == "mul":
        a_zero, b_zero = a & 0x7FFF == 0, b & 0x7FFF == 0
        if _f16_is_inf(a) or _f16_is_inf(b):
            if a_zero or b_zero:
                return F16_NAN
            return sign_bit | F16_POS_INF
        if a_zero or b_zero:
            return sign_bit
        return binary16_round(binary16_value(a) * binary16_value(b))
    if op == "div":
        a_zero, b_zero = a & 0x7FFF == 0, b & 0x7FFF == 0
        if _f16_is_inf(a):
            return F16_NAN if _f16_is_inf(b) else sign_bit | F16_POS_INF
        if _f16_is_inf(b):
            return sign_bit
        if b_zero:
            return F16_NAN if a_zero else sign_bit | F16_POS_INF
        if a_zero:
            return sign_bit
        return binary16_round(binary16_value(a) / binary16_value(b))
    raise ValueError(f"unknown op {op!r}")


# ---------------------------------------------------------------------------
# Q16.16 oracle
# ---------------------------------------------------------------------------

_Q16_MAX = (1 << 31) - 1
_Q16_MIN = -(1 << 31)


def _round_half_away(x: Fraction) -> int:
    if x >= 0:
        return (2 * x.numerator + x.denominator) // (2 * x.denominator)
    return -((-2 * x.numerator + x.denominator) // (2 * x.denominator))


def q16_op(op: str, a_raw: int, b_raw: int) -> tuple[int, bool]:
    """Exact result of `a op b` on Q16.16 raw values: (raw, overflowed).

    add/sub saturate; mul/div round to nearest (ties away from zero) then
    saturate; division by zero saturates toward the numerator's sign.
    """
    va = Fraction(a_raw, 1 << 16)
    vb = Fraction(b_raw, 1 << 16)
    if op == "add":
        raw = a_raw + b_raw
    elif op == "sub":
        raw = a_raw - b_raw
    elif op == "mul":
        raw = _round_half_away(va * vb * (1 << 16))
    elif op == "div":
        if b_raw == 0:
            return (_Q16_MAX if a_raw >= 0 else _Q16_MIN), True
        raw = _round_half_away(va / vb * (1 << 16))
    else:
        raise ValueError(f"unknown op {op!r}")
    if raw > _Q16_MAX:
        return _Q16_MAX, True
    if raw < _Q16_MIN:
        return _Q16_MIN, True
    return raw, False
