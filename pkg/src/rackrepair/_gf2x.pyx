# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for GF(2)[x] arithmetic on packed-bit integers.

Same interface as the pure-Python module ``_gf2x_py``.  Operands travel
between Python and C as little-endian byte strings of 64-bit words.
"""

from libc.stdint cimport uint64_t, uint16_t
from libc.string cimport memset, memcpy

cdef extern from *:
    """
    #include <stdint.h>
    static void rr_clmul64_sw(uint64_t a, uint64_t b, uint64_t *lo, uint64_t *hi) {
        uint64_t l = 0, h = 0;
        int i;
        for (i = 0; i < 64; i++) {
            uint64_t m = (uint64_t)0 - ((b >> i) & 1);
            l ^= (a << i) & m;
            if (i) h ^= (a >> (64 - i)) & m;
        }
        *lo = l; *hi = h;
    }
    #if defined(__x86_64__) && defined(__GNUC__)
    #include <immintrin.h>
    __attribute__((target("pclmul,sse2")))
    static void rr_clmul64_hw(uint64_t a, uint64_t b, uint64_t *lo, uint64_t *hi) {
        __m128i r = _mm_clmulepi64_si128(_mm_cvtsi64_si128((long long)a),
                                         _mm_cvtsi64_si128((long long)b), 0);
        *lo = (uint64_t)_mm_cvtsi128_si64(r);
        *hi = (uint64_t)_mm_cvtsi128_si64(_mm_unpackhi_epi64(r, r));
    }
    static int rr_detect_hw(void) {
        __builtin_cpu_init();
        return __builtin_cpu_supports("pclmul") ? 1 : 0;
    }
    #else
    static void rr_clmul64_hw(uint64_t a, uint64_t b, uint64_t *lo, uint64_t *hi) {
        rr_clmul64_sw(a, b, lo, hi);
    }
    static int rr_detect_hw(void) { return 0; }
    #endif
    static int rr_use_hw = 0;
    static inline int rr_bitlen(uint64_t x) { return x ? 64 - __builtin_clzll(x) : 0; }
    static inline void rr_clmul64(uint64_t a, uint64_t b, uint64_t *lo, uint64_t *hi) {
        if (rr_use_hw) rr_clmul64_hw(a, b, lo, hi); else rr_clmul64_sw(a, b, lo, hi);
    }
    """
    int rr_detect_hw()
    int rr_use_hw
    int rr_bitlen(uint64_t x) noexcept
    void rr_clmul64(uint64_t a, uint64_t b, uint64_t *lo, uint64_t *hi)

DEF MAXW = 136

rr_use_hw = rr_detect_hw()
BACKEND = "cython-pclmul" if rr_use_hw else "cython"

cdef uint16_t _SPREAD8[256]
cdef int _i, _j
for _i in range(256):
    _SPREAD8[_i] = 0
    for _j in range(8):
        if (_i >> _j) & 1:
            _SPREAD8[_i] |= <uint16_t>(1 << (2 * _j))


cdef int _load(object a, uint64_t* buf, int cap) except -1:
    cdef int nbits = a.bit_length()
    cdef int nw = (nbits + 63) >> 6
    cdef bytes raw
    if nw > cap:
        raise OverflowError("operand too wide for the compiled kernel")
    if nw == 0:
        return 0
    raw = a.to_bytes(nw * 8, "little")
    memcpy(buf, <const char*>raw, nw * 8)
    return nw


cdef object _store(uint64_t* buf, int nw):
    while nw > 0 and buf[nw - 1] == 0:
        nw -= 1
    if nw == 0:
        return 0
    return int.from_bytes((<char*>buf)[:nw * 8], "little")


cdef int _mul_words(uint64_t* a, int na, uint64_t* b, int nb, uint64_t* out) noexcept:
    cdef int i, j
    cdef uint64_t lo, hi
    memset(out, 0, (na + nb) * sizeof(uint64_t))
    for i in range(na):
        if a[i] == 0:
            continue
        for j in range(nb):
            rr_clmul64(a[i], b[j], &lo, &hi)
            out[i + j] ^= lo
            out[i + j + 1] ^= hi
    return na + nb


cdef int _sqr_words(uint64_t* a, int na, uint64_t* out) noexcept:
    cdef int i
    cdef uint64_t w
    for i in range(na):
        w = a[i]
        out[2 * i] = (<uint64_t>_SPREAD8[w & 0xff]
                      | (<uint64_t>_SPREAD8[(w >> 8) & 0xff] << 16)
                      | (<uint64_t>_SPREAD8[(w >> 16) & 0xff] << 32)
                      | (<uint64_t>_SPREAD8[(w >> 24) & 0xff] << 48))
        out[2 * i + 1] = (<uint64_t>_SPREAD8[(w >> 32) & 0xff]
                          | (<uint64_t>_SPREAD8[(w >> 40) & 0xff] << 16)
                          | (<uint64_t>_SPREAD8[(w >> 48) & 0xff] << 32)
                          | (<uint64_t>_SPREAD8[(w >> 56) & 0xff] << 48))
    return 2 * na


cdef inline void _xor_shifted(uint64_t* dst, uint64_t* src, int ns, int shift) noexcept:
    cdef int ws = shift >> 6
    cdef int bs = shift & 63
    cdef int j
    if bs == 0:
        for j in range(ns):
            dst[j + ws] ^= src[j]
    else:
        for j in range(ns):
            dst[j + ws] ^= src[j] << bs
            dst[j + ws + 1] ^= src[j] >> (64 - bs)


def clmul(a, b):
    """Carryless product of two packed GF(2) polynomials."""
    cdef uint64_t wa[MAXW]
    cdef uint64_t wb[MAXW]
    cdef uint64_t out[2 * MAXW + 2]
    cdef int na = _load(a, wa, MAXW)
    cdef int nb = _load(b, wb, MAXW)
    if na == 0 or nb == 0:
        return 0
    return _store(out, _mul_words(wa, na, wb, nb, out))


def clsqr(a):
    cdef uint64_t wa[MAXW]
    cdef uint64_t out[2 * MAXW + 2]
    cdef int na = _load(a, wa, MAXW)
    if na == 0:
        return 0
    return _store(out, _sqr_words(wa, na, out))


def pdivmod(a, b):
    from ._gf2x_py import pdivmod as _pd
    return _pd(a, b)


def pgcd(a, b):
    from ._gf2x_py import pgcd as _pg
    return _pg(a, b)


cdef class Ring:
    """Arithmetic in GF(2)[x]/(m) on reduced packed integers."""

    cdef public object modulus
    cdef public int n
    cdef int nmw
    cdef uint64_t mw[MAXW]
    cdef int nexp
    cdef int exps[4 * MAXW]
    cdef bint fold
    cdef uint64_t lowv[MAXW]
    cdef int nlow

    def __init__(self, modulus):
        if modulus < 2:
            raise ValueError("modulus must have degree at least 1")
        self.modulus = modulus
        self.n = modulus.bit_length() - 1
        if self.n > 64 * (MAXW // 2 - 2):
            raise OverflowError("modulus degree too large for the compiled kernel")
        self.nmw = _load(modulus, self.mw, MAXW)
        low = modulus ^ (1 << self.n)
        self.nlow = _load(low, self.lowv, MAXW)
        self.nexp = 0
        for i in range(low.bit_length()):
            if (low >> i) & 1:
                self.exps[self.nexp] = i
                self.nexp += 1
        self.fold = low.bit_length() - 1 <= self.n // 2

    cdef int _reduce(self, uint64_t* c, int nc) noexcept:
        # In-place reduction of c (nc words, zero beyond); returns word count.
        cdef int n = self.n
        cdef int ws = n >> 6
        cdef int bs = n & 63
        cdef int deg, hw, k, i, e, start
        cdef uint64_t v
        cdef uint64_t hi[2 * MAXW + 2]
        while nc > 0 and c[nc - 1] == 0:
            nc -= 1
        if nc == 0:
            return 0
        deg = (nc - 1) * 64 + rr_bitlen(c[nc - 1]) - 1
        if self.fold:
            while deg >= n:
                hw = ((deg - n) >> 6) + 1
                for k in range(hw):
                    i = ws + k
                    v = c[i] >> bs if bs else c[i]
                    if bs and i + 1 < nc:
                        v |= c[i + 1] << (64 - bs)
                    hi[k] = v
                if bs:
                    c[ws] &= ((<uint64_t>1) << bs) - 1
                    start = ws + 1
                else:
                    start = ws
                for i in range(start, nc):
                    c[i] = 0
                for e in range(self.nexp):
                    _xor_shifted(c, hi, hw, self.exps[e])
                nc = hw + (self.exps[self.nexp - 1] >> 6) + 2 if self.nexp else 0
                if nc < ws + 1:
                    nc = ws + 1
                while nc > 0 and c[nc - 1] == 0:
                    nc -= 1
                if nc == 0:
                    return 0
                deg = (nc - 1) * 64 + rr_bitlen(c[nc - 1]) - 1
            return nc
        while deg >= n:
            if (c[deg >> 6] >> (deg & 63)) & 1:
                _xor_shifted(c, self.mw, self.nmw, deg - n)
            deg -= 1
        while nc > 0 and c[nc - 1] == 0:
            nc -= 1
        return nc

    def reduce(self, c):
        cdef uint64_t buf[2 * MAXW + 4]
        cdef int nc
        if c.bit_length() > 64 * 2 * MAXW - 64:
            from ._gf2x_py import pdivmod as _pd
            return _pd(c, self.modulus)[1]
        memset(buf, 0, sizeof(buf))
        nc = _load(c, buf, 2 * MAXW)
        return _store(buf, self._reduce(buf, nc))

    def mul(self, a, b):
        cdef uint64_t wa[MAXW]
        cdef uint64_t wb[MAXW]
        cdef uint64_t out[2 * MAXW + 4]
        cdef int na = _load(a, wa, MAXW)
        cdef int nb = _load(b, wb, MAXW)
        if na == 0 or nb == 0:
            return 0
        memset(out, 0, sizeof(out))
        return _store(out, self._reduce(out, _mul_words(wa, na, wb, nb, out)))

    def sqr(self, a):
        return self.sqr_k(a, 1)

    def sqr_k(self, a, int k):
        cdef uint64_t cur[MAXW]
        cdef uint64_t out[2 * MAXW + 4]
        cdef int nc = _load(a, cur, MAXW)
        cdef int i, nr
        for i in range(k):
            if nc == 0:
                return 0
            memset(out, 0, sizeof(out))
            nr = self._reduce(out, _sqr_words(cur, nc, out))
            memcpy(cur, out, nr * sizeof(uint64_t))
            nc = nr
        return _store(cur, nc)

    def pow(self, a, e):
        cdef uint64_t base[MAXW]
        cdef uint64_t acc[MAXW]
        cdef uint64_t out[2 * MAXW + 4]
        cdef int nbase, nacc, nr
        if e < 0:
            raise ValueError("negative exponent")
        nbase = _load(a, base, MAXW)
        acc[0] = 1
        nacc = 1
        for bit in format(e, "b"):
            memset(out, 0, sizeof(out))
            nr = self._reduce(out, _sqr_words(acc, nacc, out))
            memcpy(acc, out, nr * sizeof(uint64_t))
            nacc = nr
            if bit == "1":
                if nbase == 0 or nacc == 0:
                    nacc = 0
                else:
                    memset(out, 0, sizeof(out))
                    nr = self._reduce(out, _mul_words(acc, nacc, base, nbase, out))
                    memcpy(acc, out, nr * sizeof(uint64_t))
                    nacc = nr
            if nacc == 0:
                return 0
        return _store(acc, nacc)

    def frob_sum(self, a, int step, int count):
        """Return sum_{j<count} a^(2^(step*j))."""
        cdef uint64_t cur[MAXW]
        cdef uint64_t acc[MAXW]
        cdef uint64_t out[2 * MAXW + 4]
        cdef int nc = _load(a, cur, MAXW)
        cdef int nw = (self.n + 63) >> 6
        cdef int j, s, i, nr
        memset(acc, 0, sizeof(acc))
        for j in range(count):
            for i in range(nc):
                acc[i] ^= cur[i]
            for s in range(step):
                if nc == 0:
                    break
                memset(out, 0, sizeof(out))
                nr = self._reduce(out, _sqr_words(cur, nc, out))
                memcpy(cur, out, nr * sizeof(uint64_t))
                nc = nr
        return _store(acc, nw)

    def inv(self, a):
        from ._gf2x_py import pdivmod as _pd
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        r0, r1 = self.modulus, a
        s0, s1 = 0, 1
        while r1 != 1:
            if r1 == 0:
                raise ValueError("element not invertible modulo a reducible modulus")
            q, r = _pd(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, s0 ^ clmul(q, s1)
        return self.reduce(s1)
