"""Pure-Python kernels for GF(2)[x] arithmetic on packed-bit integers.

Bit i of an integer holds the coefficient of x^i.  Carryless products use
slot spreading: each operand is spread so that bit i lands in its own byte
(or byte pair), an ordinary integer product then accumulates every partial
sum in its own slot, and the low bit of each slot is the parity.
"""

from __future__ import annotations

BACKEND = "python"


# byte -> 8 bytes holding its bits, byte -> 16 bytes (bits in even bytes),
# byte -> 2 bytes with zero bits interleaved (squaring)
_SPREAD8 = [bytes((x >> i) & 1 for i in range(8)) for x in range(256)]
_SPREAD16 = [bytes(v for i in range(8) for v in ((x >> i) & 1, 0)) for x in range(256)]
_SQR = [sum(((x >> i) & 1) << (2 * i) for i in range(8)).to_bytes(2, "little")
        for x in range(256)]
_PARITY_ASCII = bytes(48 + (i & 1) for i in range(256))


def _to_bytes(a: int) -> bytes:
    return a.to_bytes((a.bit_length() + 7) // 8, "little")


def _spread(a: int, table) -> int:
    return int.from_bytes(b"".join([table[x] for x in _to_bytes(a)]), "little")


def _square(a: int) -> int:
    return _spread(a, _SQR)


def clmul(a: int, b: int) -> int:
    """Carryless product of two packed GF(2) polynomials."""
    if a == 0 or b == 0:
        return 0
    if a.bit_length() < b.bit_length():
        a, b = b, a
    nb = b.bit_length()
    if nb <= 8:
        out = 0
        i = 0
        while b:
            if b & 1:
                out ^= a << i
            b >>= 1
            i += 1
        return out
    if nb < 256:
        # one byte per coefficient; slot sums stay below 256
        prod = _spread(a, _SPREAD8) * _spread(b, _SPREAD8)
        return int(_to_bytes(prod).translate(_PARITY_ASCII)[::-1], 2)
    if nb < 65536:
        prod = _spread(a, _SPREAD16) * _spread(b, _SPREAD16)
        raw = _to_bytes(prod)
        return int(raw[::2].translate(_PARITY_ASCII)[::-1], 2)
    out = 0
    i = 0
    while b:
        if b & 1:
            out ^= a << i
        b >>= 1
        i += 1
    return out


def clsqr(a: int) -> int:
    """Square of a packed GF(2) polynomial (bit interleave with zeros)."""
    return _square(a)


def pdivmod(a: int, b: int) -> tuple[int, int]:
    if b == 0:
        raise ZeroDivisionError("polynomial division by zero")
    db = b.bit_length()
    q = 0
    while a.bit_length() >= db:
        s = a.bit_length() - db
        q ^= 1 << s
        a ^= b << s
    return q, a


def pgcd(a: int, b: int) -> int:
    while b:
        a = pdivmod(a, b)[1]
        a, b = b, a
    return a


class Ring:
    """Arithmetic in GF(2)[x]/(m) on reduced packed integers."""

    def __init__(self, modulus: int):
        if modulus < 2:
            raise ValueError("modulus must have degree at least 1")
        self.modulus = modulus
        self.n = n = modulus.bit_length() - 1
        low = modulus ^ (1 << n)
        self._mask = (1 << n) - 1
        self._exps = [i for i in range(low.bit_length()) if (low >> i) & 1]
        # Folding is cheap when x^n = low has small degree; otherwise Barrett.
        self._fold = low.bit_length() - 1 <= n // 2
        self._mu = pdivmod(1 << (2 * n), modulus)[0]

    def reduce(self, c: int) -> int:
        n = self.n
        if c >> n == 0:
            return c
        if self._fold:
            mask = self._mask
            exps = self._exps
            while c >> n:
                hi = c >> n
                c &= mask
                for e in exps:
                    c ^= hi << e
            return c
        if c.bit_length() > 2 * n:
            return pdivmod(c, self.modulus)[1]
        q = clmul(c >> n, self._mu) >> n
        return (c ^ clmul(q, self.modulus)) & self._mask

    def mul(self, a: int, b: int) -> int:
        return self.reduce(clmul(a, b))

    def sqr(self, a: int) -> int:
        return self.reduce(_square(a))

    def sqr_k(self, a: int, k: int) -> int:
        for _ in range(k):
            a = self.reduce(_square(a))
        return a

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            raise ValueError("negative exponent")
        result = 1
        for bit in format(e, "b"):
            result = self.reduce(_square(result))
            if bit == "1":
                result = self.reduce(clmul(result, a))
        return result

    def frob_sum(self, a: int, step: int, count: int) -> int:
        """Return sum_{j<count} a^(2^(step*j))."""
        acc = 0
        for _ in range(count):
            acc ^= a
            a = self.sqr_k(a, step)
        return acc

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        r0, r1 = self.modulus, a
        s0, s1 = 0, 1
        while r1 != 1:
            if r1 == 0:
                raise ValueError("element not invertible modulo a reducible modulus")
            q, r = pdivmod(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, s0 ^ clmul(q, s1)
        return self.reduce(s1)
