"""Integer posit arithmetic cores, JIT-compiled for the hot paths.

All routines operate on n-bit words held in int64 scalars (or uint32 arrays)
for 2 <= n <= 32, 0 <= es <= 4.  Intermediates are carried in int64 with
enough width that rounding decisions are exact:

  * decoded significands have at most n-2 bits (n <= 32 -> < 2^30);
  * addition aligns both significands to a 36-bit frame plus two guard bits,
    so sums stay below 2^39 and any bits shifted past the frame can only
    matter as a sticky OR (the shifted-out operand is then < 2^-2 ulp of the
    kept one, which blocks cancellation past the guard position);
  * products are at most (2n-4) bits (< 2^60);
  * quotients are computed to n-es+1 significant bits with a remainder
    sticky; the numerator needs at most 2n-2es-1 <= 63 bits.

Rounding is round-to-nearest with ties to the even bit pattern, measured
along the posit encoding expansion (truncate the expansion to n bits, then
round up when the guard bit is set and either a lower bit is set or the kept
pattern is odd).  Magnitudes at or above maxpos clamp to maxpos; nonzero
magnitudes below minpos clamp to minpos.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def _bitlen(x):
    n = 0
    if x >> 32:
        x >>= 32
        n += 32
    if x >> 16:
        x >>= 16
        n += 16
    if x >> 8:
        x >>= 8
        n += 8
    if x >> 4:
        x >>= 4
        n += 4
    if x >> 2:
        x >>= 2
        n += 2
    if x >> 1:
        x >>= 1
        n += 1
    if x:
        n += 1
    return n


@njit(cache=True)
def decode_parts(word, n, es):
    """(sign, scale, mant, fb) of a non-special word.

    value = (-1)^sign * mant * 2^(scale - fb), with 2^fb <= mant < 2^(fb+1).
    """
    mask = (1 << n) - 1
    sign = (word >> (n - 1)) & 1
    mag = word if sign == 0 else ((~word) + 1) & mask
    r0 = (mag >> (n - 2)) & 1
    run = 1
    i = n - 3
    while i >= 0 and ((mag >> i) & 1) == r0:
        run += 1
        i -= 1
    k = run - 1 if r0 == 1 else -run
    rem = n - 2 - run  # bits left after the regime terminator
    if rem < 0:
        rem = 0  # regime ran to the end of the word
    if rem >= es:
        e = (mag >> (rem - es)) & ((1 << es) - 1)
        fb = rem - es
        frac = mag & ((1 << fb) - 1)
    else:
        # exponent field truncated by the word end: read as zero-padded
        e = (mag & ((1 << rem) - 1)) << (es - rem)
        fb = 0
        frac = 0
    scale = (k << es) + e
    return sign, scale, (1 << fb) | frac, fb


@njit(cache=True)
def round_pack(sign, scale, mant, sticky, n, es):
    """Encode (-1)^sign * mant * 2^(scale - (bitlen(mant)-1)) into a word.

    mant >= 1; sticky != 0 means the true magnitude lies strictly between
    mant and mant+1 units of mant's lsb (callers keep mant wide enough that
    the rounding position always falls inside mant when sticky is set).
    """
    mask = (1 << n) - 1
    bound = (n - 2) << es  # maxpos = 2^bound, minpos = 2^-bound
    if scale >= bound:
        pat = (1 << (n - 1)) - 1
    elif scale < -bound:
        pat = 1
    else:
        k = scale >> es
        e = scale - (k << es)
        if k >= 0:
            rbits = ((1 << (k + 1)) - 1) << 1  # k+1 ones, terminating zero
            rlen = k + 2
        else:
            rbits = 1  # -k zeros, terminating one
            rlen = 1 - k
        head = (rbits << es) | e
        head_len = rlen + es
        mb = _bitlen(mant) - 1
        frac = mant - (1 << mb)
        avail = n - 1
        guard = 0
        st = 1 if sticky else 0
        if head_len > avail:
            cut = head_len - avail
            pat = head >> cut
            guard = (head >> (cut - 1)) & 1
            if cut > 1 and (head & ((1 << (cut - 1)) - 1)) != 0:
                st = 1
            if frac != 0:
                st = 1
        else:
            need = avail - head_len  # fraction bits that fit in the word
            if mb <= need:
                pat = (head << need) | (frac << (need - mb))
            else:
                drop = mb - need
                pat = (head << need) | (frac >> drop)
                guard = (frac >> (drop - 1)) & 1
                if drop > 1 and (frac & ((1 << (drop - 1)) - 1)) != 0:
                    st = 1
        if guard == 1 and (st == 1 or (pat & 1) == 1):
            pat += 1
    if sign:
        return ((~pat) + 1) & mask
    return pat


@njit(cache=True)
def neg_word(word, n):
    mask = (1 << n) - 1
    if word == 0 or word == 1 << (n - 1):
        return word
    return ((~word) + 1) & mask


_FRAME = 35  # significands are normalized with their top bit here


@njit(cache=True)
def add_words(a, b, n, es):
    nar = 1 << (n - 1)
    if a == nar or b == nar:
        return nar
    if a == 0:
        return b
    if b == 0:
        return a
    sa, ea, ma, fa = decode_parts(a, n, es)
    sb, eb, mb, fb = decode_parts(b, n, es)
    xa = ma << (_FRAME - fa)
    xb = mb << (_FRAME - fb)
    if ea > eb or (ea == eb and xa >= xb):
        shi, ehi, mhi = sa, ea, xa
        slo, elo, mlo = sb, eb, xb
    else:
        shi, ehi, mhi = sb, eb, xb
        slo, elo, mlo = sa, ea, xa
    d = ehi - elo
    hi = mhi << 2
    st = 0
    if d > _FRAME + 3:
        lo = 0
        st = 1
    else:
        t = mlo << 2
        lo = t >> d
        if d > 0 and (t & ((1 << d) - 1)) != 0:
            st = 1
    if shi == slo:
        mant = hi + lo
    else:
        mant = hi - lo
        if st:
            # dropped lo bits pull the true value below hi - lo
            mant -= 1
        if mant == 0:
            return 0  # exact cancellation: equal magnitudes, opposite signs
    scale = ehi + (_bitlen(mant) - 1) - (_FRAME + 2)
    return round_pack(shi, scale, mant, st, n, es)


@njit(cache=True)
def sub_words(a, b, n, es):
    return add_words(a, neg_word(b, n), n, es)


@njit(cache=True)
def mul_words(a, b, n, es):
    nar = 1 << (n - 1)
    if a == nar or b == nar:
        return nar
    if a == 0 or b == 0:
        return 0
    sa, ea, ma, fa = decode_parts(a, n, es)
    sb, eb, mb, fb = decode_parts(b, n, es)
    mant = ma * mb
    scale = (ea - fa) + (eb - fb) + (_bitlen(mant) - 1)
    return round_pack(sa ^ sb, scale, mant, 0, n, es)


@njit(cache=True)
def div_words(a, b, n, es):
    nar = 1 << (n - 1)
    if a == nar or b == nar or b == 0:
        return nar
    if a == 0:
        return 0
    sa, ea, ma, fa = decode_parts(a, n, es)
    sb, eb, mb, fb = decode_parts(b, n, es)
    shift = (n - es) + fb - fa + 1
    num = ma << shift
    q = num // mb
    st = 1 if num - q * mb != 0 else 0
    scale = (ea - fa) - (eb - fb) - shift + (_bitlen(q) - 1)
    return round_pack(sa ^ sb, scale, q, st, n, es)


# -- element-wise array forms (uint32 payloads) -----------------------------

@njit(cache=True)
def add_arrays(a, b, n, es):
    out = np.empty(a.size, np.uint32)
    for i in range(a.size):
        out[i] = add_words(np.int64(a[i]), np.int64(b[i]), n, es)
    return out


@njit(cache=True)
def sub_arrays(a, b, n, es):
    out = np.empty(a.size, np.uint32)
    for i in range(a.size):
        out[i] = sub_words(np.int64(a[i]), np.int64(b[i]), n, es)
    return out


@njit(cache=True)
def mul_arrays(a, b, n, es):
    out = np.empty(a.size, np.uint32)
    for i in range(a.size):
        out[i] = mul_words(np.int64(a[i]), np.int64(b[i]), n, es)
    return out


@njit(cache=True)
def div_arrays(a, b, n, es):
    out = np.empty(a.size, np.uint32)
    for i in range(a.size):
        out[i] = div_words(np.int64(a[i]), np.int64(b[i]), n, es)
    return out


@njit(cache=True)
def div_arrays_scalar(a, b, n, es):
    out = np.empty(a.size, np.uint32)
    bb = np.int64(b)
    for i in range(a.size):
        out[i] = div_words(np.int64(a[i]), bb, n, es)
    return out
