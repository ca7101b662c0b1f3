"""Finite fields GF(p^n), explicit extensions, subfields, traces and dual bases.

Elements are handled in two layers.  Fields expose a *raw* interface on
plain Python values (packed integers for GF(p^n), tuples of base values for
an explicit extension), which the coding modules use in their inner loops.
:class:`FieldElement` wraps a raw value with its field for the public API.

For GF(p^n) the raw value is sum_i c_i p^i where c_i is the coefficient of
x^i modulo the defining polynomial; for p = 2 this is the packed-bit form.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

from . import _upoly, gf2x

__all__ = [
    "FieldSpec",
    "GF",
    "ExtensionField",
    "FieldElement",
    "SubfieldHandle",
    "BasisPair",
    "get_field",
    "extension",
    "subfield",
    "irreducible_poly",
    "frobenius_power",
    "trace_to_subfield",
    "dual_basis",
    "element_degree",
    "find_independent_multipliers",
]

_TABLE_LIMIT = 1 << 16


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


def _prime_factors(n: int) -> list[int]:
    return _upoly._prime_factors(n)


def _divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


# ---------------------------------------------------------------------------
# GF(p)[x] helpers used only to find defining polynomials


def _gfp_to_int(coeffs: Sequence[int], p: int) -> int:
    v = 0
    for c in reversed(coeffs):
        v = v * p + c
    return v


def _int_to_gfp(v: int, p: int, n: int) -> list[int]:
    out = []
    for _ in range(n):
        v, c = divmod(v, p)
        out.append(c)
    return out


class _PrimeField:
    """Raw interface for GF(p) with plain ints, used by the irreducibility search."""

    def __init__(self, p: int):
        self.p = p
        self.degree = 1
        self.zero, self.one = 0, 1

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def neg(self, a):
        return -a % self.p

    def mul(self, a, b):
        return a * b % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(a, self.p - 2, self.p)

    def frob(self, a, k):
        return a

    def scalar(self, c):
        return c % self.p

    def random_raw(self, rng):
        return rng.randrange(self.p)


def _is_irreducible_gf2(m: int) -> bool:
    n = m.bit_length() - 1
    if n == 1:
        return True
    if m & 1 == 0 or bin(m).count("1") % 2 == 0:
        return False
    ring = gf2x.Ring(m)
    if ring.sqr_k(2, n) != 2:
        return False
    for ell in _prime_factors(n):
        h = ring.sqr_k(2, n // ell) ^ 2
        if gf2x.pgcd(m, h) != 1:
            return False
    return True


@lru_cache(maxsize=None)
def irreducible_poly(p: int, n: int) -> tuple[int, ...]:
    """Least monic irreducible of degree n over GF(p), coefficients low to high.

    Candidates are ordered by the integer sum_i c_i p^i of their lower
    coefficients, so the search is deterministic across runs.
    """
    if not _is_prime(p):
        raise ValueError(f"characteristic {p} is not prime")
    if n < 1:
        raise ValueError("degree must be positive")
    if n == 1:
        return (0, 1)
    if p == 2:
        for low in range(1, 1 << n, 2):
            m = (1 << n) | low
            if _is_irreducible_gf2(m):
                return tuple(_int_to_gfp(m, 2, n + 1))
        raise AssertionError("no irreducible found")
    F = _PrimeField(p)
    for low in range(1, p ** n):
        coeffs = _int_to_gfp(low, p, n) + [1]
        if coeffs[0] == 0:
            continue
        if _upoly.is_irreducible(F, coeffs):
            return tuple(coeffs)
    raise AssertionError("no irreducible found")


@dataclass(frozen=True)
class FieldSpec:
    """Characteristic, degree and defining polynomial of GF(p^n)."""

    p: int
    n: int
    modulus: tuple[int, ...]

    def to_json(self, subfields: Iterable[int] = ()) -> dict:
        return {"p": self.p, "N": self.n, "defining_poly": list(self.modulus),
                "subfields": sorted(set(subfields))}

    @classmethod
    def from_json(cls, data: dict) -> "FieldSpec":
        return cls(int(data["p"]), int(data["N"]), tuple(int(c) for c in data["defining_poly"]))


# ---------------------------------------------------------------------------
# Fields


class _FieldBase:
    p: int
    degree: int
    q: int
    zero: object
    one: object

    def __call__(self, value) -> "FieldElement":
        return self.element(value)

    def element(self, value) -> "FieldElement":
        if isinstance(value, FieldElement):
            if value.field is not self:
                raise TypeError("field mismatch")
            return value
        return FieldElement(self, self.coerce(value))

    def elem(self, raw) -> "FieldElement":
        return FieldElement(self, raw)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def sqr(self, a):
        return self.mul(a, a)

    def random(self, rng: random.Random) -> "FieldElement":
        return FieldElement(self, self.random_raw(rng))

    def random_nonzero_raw(self, rng: random.Random):
        while True:
            v = self.random_raw(rng)
            if v != self.zero:
                return v

    def element_degree_raw(self, a) -> int:
        for d in _divisors(self.degree):
            if self.frob(a, d) == a:
                return d
        raise AssertionError("Frobenius orbit exceeds field degree")


class GF(_FieldBase):
    """The field GF(p^n) = GF(p)[x]/(modulus)."""

    def __init__(self, p: int, n: int, modulus: Sequence[int] | None = None):
        if not _is_prime(p):
            raise ValueError(f"characteristic {p} is not prime")
        if n < 1:
            raise ValueError("degree must be positive")
        self.p, self.n, self.degree = p, n, n
        self.q = p ** n
        if modulus is None:
            modulus = irreducible_poly(p, n)
        modulus = tuple(int(c) % p for c in modulus)
        if len(modulus) != n + 1 or modulus[-1] != 1:
            raise ValueError("defining polynomial must be monic of degree n")
        if n > 1 and modulus != irreducible_poly(p, n) and \
                not _upoly.is_irreducible(_PrimeField(p), list(modulus)):
            raise ValueError(f"defining polynomial {modulus} is reducible over GF({p})")
        self.modulus = modulus
        self.spec = FieldSpec(p, n, modulus)
        self.zero, self.one = 0, 1
        self._mod_int = _gfp_to_int(modulus, p)
        self._ring = gf2x.Ring(self._mod_int) if p == 2 and n > 1 else None
        self._exp = self._log = None
        if n > 1 and self.q <= _TABLE_LIMIT:
            self._build_tables()

    # -- construction helpers -------------------------------------------------

    def _slow_mul(self, a: int, b: int) -> int:
        if self._ring is not None:
            return self._ring.mul(a, b)
        if self.n == 1:
            return a * b % self.p
        F = _PrimeField(self.p)
        fa = _int_to_gfp(a, self.p, self.n)
        fb = _int_to_gfp(b, self.p, self.n)
        prod = _upoly.mod(F, _upoly.mul(F, _upoly.trim(fa, 0), _upoly.trim(fb, 0)),
                          list(self.modulus))
        return _gfp_to_int(prod, self.p)

    def _build_tables(self) -> None:
        order = self.q - 1
        factors = _prime_factors(order)
        for g in range(2, self.q):
            ok = True
            for ell in factors:
                if self._slow_pow(g, order // ell) == 1:
                    ok = False
                    break
            if ok:
                break
        else:
            raise AssertionError("no primitive element")
        exp = [0] * (2 * order)
        log = [0] * self.q
        v = 1
        for i in range(order):
            exp[i] = v
            log[v] = i
            v = self._slow_mul(v, g)
        for i in range(order, 2 * order):
            exp[i] = exp[i - order]
        self._exp, self._log = exp, log
        self.primitive = g

    def _slow_pow(self, a: int, e: int) -> int:
        result = 1
        for bit in format(e, "b"):
            result = self._slow_mul(result, result)
            if bit == "1":
                result = self._slow_mul(result, a)
        return result

    # -- raw interface ----------------------------------------------------------

    def coerce(self, value) -> int:
        if isinstance(value, FieldElement):
            if value.field is not self:
                raise TypeError("field mismatch")
            return value.value
        if isinstance(value, (list, tuple)):
            if len(value) > self.n:
                raise ValueError("too many coefficients")
            return _gfp_to_int([int(c) % self.p for c in value], self.p)
        v = int(value)
        if self.n == 1:
            return v % self.p
        if not 0 <= v < self.q:
            raise ValueError(f"raw value {v} outside GF({self.p}^{self.n})")
        return v

    def scalar(self, c: int) -> int:
        return int(c) % self.p

    def add(self, a, b):
        if self.p == 2:
            return a ^ b
        if self.n == 1:
            return (a + b) % self.p
        return self._digitwise(a, b, 1)

    def sub(self, a, b):
        if self.p == 2:
            return a ^ b
        if self.n == 1:
            return (a - b) % self.p
        return self._digitwise(a, b, -1)

    def neg(self, a):
        if self.p == 2:
            return a
        if self.n == 1:
            return -a % self.p
        return self._digitwise(0, a, -1)

    def _digitwise(self, a: int, b: int, sign: int) -> int:
        p = self.p
        out, scale = 0, 1
        for _ in range(self.n):
            a, da = divmod(a, p)
            b, db = divmod(b, p)
            out += ((da + sign * db) % p) * scale
            scale *= p
        return out

    def mul(self, a, b):
        if a == 0 or b == 0:
            return 0
        if self._exp is not None:
            return self._exp[self._log[a] + self._log[b]]
        if self._ring is not None:
            return self._ring.mul(a, b)
        if self.n == 1:
            return a * b % self.p
        return self._slow_mul(a, b)

    def sqr(self, a):
        if self._ring is not None and self._exp is None:
            return self._ring.sqr(a)
        return self.mul(a, a)

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("division by zero in finite field")
        if self._exp is not None:
            return self._exp[self.q - 1 - self._log[a]]
        if self._ring is not None:
            return self._ring.inv(a)
        if self.n == 1:
            return pow(a, self.p - 2, self.p)
        return self.pow(a, self.q - 2)

    def pow(self, a, e: int):
        if e < 0:
            return self.pow(self.inv(a), -e)
        if e == 0:
            return 1
        if a == 0:
            return 0
        e %= self.q - 1
        if e == 0:
            return 1
        if self._exp is not None:
            return self._exp[self._log[a] * e % (self.q - 1)]
        if self._ring is not None:
            return self._ring.pow(a, e)
        if self.n == 1:
            return pow(a, e, self.p)
        return self._slow_pow(a, e)

    def frob(self, a, k: int = 1):
        """a^(p^k)."""
        k %= self.n
        if k == 0 or a == 0 or self.n == 1:
            return a
        if self._ring is not None and self._exp is None:
            return self._ring.sqr_k(a, k)
        return self.pow(a, self.p ** k)

    def frob_sum(self, a, step: int, count: int):
        """sum_{j<count} a^(p^(step*j)), the core of every subfield trace."""
        if self._ring is not None and self._exp is None:
            return self._ring.frob_sum(a, step, count)
        acc = 0
        for _ in range(count):
            acc = self.add(acc, a)
            a = self.frob(a, step)
        return acc

    def random_raw(self, rng: random.Random) -> int:
        return rng.randrange(self.q)

    def digits(self, a: int) -> list[int]:
        return _int_to_gfp(a, self.p, self.n)

    def format_raw(self, a: int) -> str:
        if self.n == 1:
            return str(a)
        if self.p == 2:
            return hex(a)
        return str(self.digits(a))

    def to_json_raw(self, a: int):
        if self.p == 2:
            return hex(a)
        if self.n == 1:
            return a
        return self.digits(a)

    def from_json_raw(self, data) -> int:
        if isinstance(data, str):
            return self.coerce(int(data, 16))
        if isinstance(data, list):
            return self.coerce(data)
        return self.coerce(int(data))

    def elements(self) -> Iterable["FieldElement"]:
        if self.q > 1 << 20:
            raise ValueError("refusing to enumerate a large field")
        return (FieldElement(self, v) for v in range(self.q))

    @property
    def generator(self) -> "FieldElement":
        """The class of x (a root of the defining polynomial)."""
        return FieldElement(self, 0 if self.n == 1 else self.p)

    def __repr__(self) -> str:
        return f"GF({self.p}^{self.n})" if self.n > 1 else f"GF({self.p})"


class ExtensionField(_FieldBase):
    """base[z]/(modulus) for a monic irreducible modulus over a base GF.

    Raw elements are tuples (c_0, ..., c_{w-1}) of base raw values for
    sum_j c_j z^j; the generator z plays the role of the extension element
    used for row packing.
    """

    def __init__(self, base: GF, modulus: Sequence):
        self.base = base
        self.modulus = tuple(modulus)
        self.w = len(self.modulus) - 1
        if self.w < 1 or self.modulus[-1] != base.one:
            raise ValueError("extension modulus must be monic of positive degree")
        self.p = base.p
        self.degree = base.degree * self.w
        self.q = base.q ** self.w
        self.zero = (base.zero,) * self.w
        self.one = (base.one,) + (base.zero,) * (self.w - 1)
        # trace of z^j over the base field = trace of multiplication by z^j
        self._traces = []
        for j in range(self.w):
            t = base.zero
            for i in range(self.w):
                basis_i = [base.zero] * self.w
                basis_i[i] = base.one
                t = base.add(t, self.mul(self._zpow(j), tuple(basis_i))[i])
            self._traces.append(t)

    def _zpow(self, j: int):
        coeffs = [self.base.zero] * (j + 1)
        coeffs[j] = self.base.one
        return self._reduce(coeffs)

    def _reduce(self, coeffs: list):
        r = _upoly.mod(self.base, _upoly.trim(list(coeffs), self.base.zero), list(self.modulus))
        return tuple(r) + (self.base.zero,) * (self.w - len(r))

    def coerce(self, value):
        if isinstance(value, FieldElement):
            if value.field is self:
                return value.value
            if value.field is self.base:
                return self.lift(value.value)
            raise TypeError("field mismatch")
        if isinstance(value, (list, tuple)):
            if len(value) != self.w:
                raise ValueError("wrong number of coordinates")
            return tuple(self.base.coerce(v) for v in value)
        return self.lift(self.base.coerce(value))

    def lift(self, a):
        return (a,) + (self.base.zero,) * (self.w - 1)

    def pack(self, coords: Sequence):
        coords = list(coords) + [self.base.zero] * (self.w - len(coords))
        return tuple(coords)

    def unpack(self, a) -> list:
        return list(a)

    def scalar(self, c: int):
        return self.lift(self.base.scalar(c))

    def add(self, a, b):
        ad = self.base.add
        return tuple(ad(x, y) for x, y in zip(a, b))

    def sub(self, a, b):
        sb = self.base.sub
        return tuple(sb(x, y) for x, y in zip(a, b))

    def neg(self, a):
        return tuple(self.base.neg(x) for x in a)

    def scale(self, c, a):
        """Multiply an extension element by a base-field raw value."""
        return tuple(self.base.mul(c, x) for x in a)

    def mul(self, a, b):
        B = self.base
        zero = B.zero
        prod = [zero] * (2 * self.w - 1)
        for i, x in enumerate(a):
            if x == zero:
                continue
            for j, y in enumerate(b):
                if y != zero:
                    prod[i + j] = B.add(prod[i + j], B.mul(x, y))
        return self._reduce(prod)

    def inv(self, a):
        if a == self.zero:
            raise ZeroDivisionError("division by zero in finite field")
        d, s, _ = _upoly.xgcd(self.base, _upoly.trim(list(a), self.base.zero), list(self.modulus))
        if len(d) != 1:
            raise ValueError("extension modulus is reducible")
        return self._reduce(s)

    def pow(self, a, e: int):
        if e < 0:
            return self.pow(self.inv(a), -e)
        result = self.one
        for bit in format(e, "b"):
            result = self.mul(result, result)
            if bit == "1":
                result = self.mul(result, a)
        return result

    def frob(self, a, k: int = 1):
        k %= self.degree
        for _ in range(k):
            a = self.pow(a, self.p)
        return a

    def rel_trace(self, a):
        """Trace from this extension down to its base field (a base raw)."""
        B = self.base
        acc = B.zero
        for c, t in zip(a, self._traces):
            if c != B.zero and t != B.zero:
                acc = B.add(acc, B.mul(c, t))
        return acc

    def random_raw(self, rng: random.Random):
        return tuple(self.base.random_raw(rng) for _ in range(self.w))

    def format_raw(self, a) -> str:
        return "(" + ", ".join(self.base.format_raw(c) for c in a) + ")"

    def to_json_raw(self, a):
        return [self.base.to_json_raw(c) for c in a]

    def from_json_raw(self, data):
        return tuple(self.base.from_json_raw(c) for c in data)

    @property
    def generator(self) -> "FieldElement":
        return FieldElement(self, self._zpow(1))

    def __repr__(self) -> str:
        return f"{self.base!r}[z]/(degree {self.w})"


@lru_cache(maxsize=None)
def get_field(p: int, n: int) -> GF:
    """Registry of fields keyed by (p, n), each with its least irreducible."""
    return GF(p, n)


@lru_cache(maxsize=None)
def _extension_cached(base: GF, w: int) -> ExtensionField:
    return ExtensionField(base, least_irreducible_over(base, w))


def extension(base: GF, w: int):
    """The degree-w extension of ``base`` (``base`` itself when w = 1)."""
    if w == 1:
        return base
    return _extension_cached(base, w)


def least_irreducible_over(base: GF, w: int, budget: int = 4096) -> tuple:
    """First irreducible z^w + z + c over base, c from a deterministic stream.

    Small bases try c = 1, 2, ... in order.  Large bases draw c from a
    fixed-seed generator instead: low-degree constants can all have the
    same trace (e.g. every small c fails for w = 2 over GF(2^210)).
    """
    B = base
    if B.q <= _TABLE_LIMIT:
        stream = iter(range(1, B.q))
    else:
        rng = random.Random(0)
        stream = (B.random_nonzero_raw(rng) for _ in range(budget))
    for c in stream:
        coeffs = [c] + [B.zero] * (w - 1) + [B.one]
        if w > 1:
            coeffs[1] = B.one
        if _upoly.is_irreducible(B, coeffs):
            return tuple(coeffs)
    raise AssertionError("no irreducible extension modulus found")


# ---------------------------------------------------------------------------
# Elements


class FieldElement:
    """An immutable element of a GF or ExtensionField."""

    __slots__ = ("field", "value")

    def __init__(self, field, value):
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "value", value)

    def __setattr__(self, name, value):
        raise AttributeError("field elements are immutable")

    def _other(self, other):
        if isinstance(other, FieldElement):
            if other.field is not self.field:
                raise TypeError(f"field mismatch: {self.field!r} vs {other.field!r}")
            return other.value
        if isinstance(other, int):
            return self.field.scalar(other)
        return NotImplemented

    def __add__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.field, self.field.add(self.value, o))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.field, self.field.sub(self.value, o))

    def __rsub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.field, self.field.sub(o, self.value))

    def __neg__(self):
        return FieldElement(self.field, self.field.neg(self.value))

    def __mul__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.field, self.field.mul(self.value, o))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.field, self.field.div(self.value, o))

    def __rtruediv__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.field, self.field.div(o, self.value))

    def __pow__(self, e: int):
        return FieldElement(self.field, self.field.pow(self.value, e))

    def inverse(self) -> "FieldElement":
        return FieldElement(self.field, self.field.inv(self.value))

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field is other.field and self.value == other.value
        if isinstance(other, int):
            return self.value == self.field.scalar(other)
        return NotImplemented

    def __hash__(self):
        return hash((id(self.field), self.value))

    def __bool__(self):
        return self.value != self.field.zero

    def __repr__(self):
        return f"{self.field.format_raw(self.value)}@{self.field!r}"

    def __str__(self):
        return self.field.format_raw(self.value)

    def frobenius(self, k: int = 1) -> "FieldElement":
        return frobenius_power(self, k)

    def degree(self) -> int:
        return element_degree(self)

    def coeffs(self) -> list[int]:
        """Coefficient list over GF(p), length n (GF fields only)."""
        return self.field.digits(self.value)

    def to_json(self):
        return self.field.to_json_raw(self.value)


def frobenius_power(x: FieldElement, k: int) -> FieldElement:
    """x^(p^k) by k repeated p-th powers."""
    if k < 0:
        raise ValueError("k must be non-negative")
    return FieldElement(x.field, x.field.frob(x.value, k))


def element_degree(x: FieldElement) -> int:
    """Smallest d dividing the field degree with x^(p^d) = x."""
    return x.field.element_degree_raw(x.value)


# ---------------------------------------------------------------------------
# Subfields


class SubfieldHandle:
    """The subfield GF(p^d) inside a parent field, with embedding and projection.

    ``small`` is the registry field GF(p^d); its generator is sent to a root
    of the small field's defining polynomial inside the parent, found by
    trace splitting.  Subfield values travel in the small field's own
    representation, so a message of ``d`` bits really is ``d`` bits.
    """

    def __init__(self, parent, d: int, rng_seed: int = 0):
        self.parent = parent
        self.d = d
        if d < 1 or parent.degree % d:
            raise ValueError(f"subfield degree {d} does not divide {parent.degree}")
        self.small = get_field(parent.p, d)
        self.index = parent.degree // d
        self._seed = rng_seed
        self._delegate = None
        if isinstance(parent, ExtensionField):
            if parent.base.degree % d:
                raise ValueError("subfields of an extension must lie in its base field")
            self._delegate = subfield(parent.base, d)
        self._images = None
        self._echelon = None

    # -- membership and traces --------------------------------------------------

    def contains_raw(self, a) -> bool:
        if self._delegate is not None:
            if any(c != self.parent.base.zero for c in a[1:]):
                return False
            return self._delegate.contains_raw(a[0])
        return self.parent.frob(a, self.d) == a

    def contains(self, x: FieldElement) -> bool:
        return self.contains_raw(x.value)

    def trace_image(self, a):
        """Trace to the subfield, left as a value of the parent's base GF.

        For a GF parent this is a parent raw; for an extension parent it is
        a raw of the extension's base field.
        """
        if self._delegate is not None:
            return self._delegate.trace_image(self.parent.rel_trace(a))
        return self.parent.frob_sum(a, self.d, self.index)

    def trace_raw(self, a):
        """Trace to the subfield in the small field's representation."""
        if self._delegate is not None:
            return self._delegate.project_raw(self.trace_image(a))
        return self.project_raw(self.trace_image(a))

    def trace(self, x: FieldElement) -> FieldElement:
        if x.field is not self.parent:
            raise TypeError("element is not in this subfield's parent")
        return FieldElement(self.small, self.trace_raw(x.value))

    # -- embedding ------------------------------------------------------------------

    @property
    def host(self) -> GF:
        """The GF in which subfield images live (parent, or parent's base)."""
        return self._delegate.host if self._delegate is not None else self.parent

    def _ensure_embedding(self) -> None:
        if self._images is not None:
            return
        P = self.parent
        small = self.small
        if self.d == 1:
            theta = P.one
        elif self.d == P.degree and tuple(small.modulus) == tuple(P.modulus):
            theta = P.generator.value
        else:
            rng = random.Random(self._seed)
            coeffs = [P.scalar(c) for c in small.modulus]
            found = _upoly.roots(P, coeffs, rng, splits=True, one=True)
            if not found:
                raise AssertionError("subfield defining polynomial has no root in parent")
            theta = found[0]
        images = [P.one]
        for _ in range(1, self.d):
            images.append(P.mul(images[-1], theta))
        self._images = images
        self._theta = theta
        if P.p == 2:
            rows = []  # (pivot bit, vector, combination)
            for k, v in enumerate(images):
                combo = 1 << k
                for pivot, rv, rc in rows:
                    if (v >> pivot) & 1:
                        v ^= rv
                        combo ^= rc
                if v == 0:
                    raise AssertionError("subfield basis images are dependent")
                pivot = v.bit_length() - 1
                # keep rows fully reduced on pivots
                new_rows = []
                for rp, rv, rc in rows:
                    if (rv >> pivot) & 1:
                        rv ^= v
                        rc ^= combo
                    new_rows.append((rp, rv, rc))
                new_rows.append((pivot, v, combo))
                rows = new_rows
            self._echelon = sorted(rows, reverse=True)
        else:
            vecs = [P.digits(v) for v in images]
            self._echelon = _gfp_left_inverse(vecs, P.p)

    def embed_raw(self, s):
        if self._delegate is not None:
            return self.parent.lift(self._delegate.embed_raw(s))
        self._ensure_embedding()
        P = self.parent
        if P.p == 2:
            out = 0
            k = 0
            while s:
                if s & 1:
                    out ^= self._images[k]
                s >>= 1
                k += 1
            return out
        out = P.zero
        for k, c in enumerate(self.small.digits(s)):
            if c:
                out = P.add(out, P.mul(P.scalar(c), self._images[k]))
        return out

    def embed(self, s: FieldElement) -> FieldElement:
        if s.field is not self.small:
            raise TypeError("element is not in this subfield")
        return FieldElement(self.parent, self.embed_raw(s.value))

    def project_raw(self, a):
        if self._delegate is not None:
            if any(c != self.parent.base.zero for c in a[1:]):
                raise ValueError("element is not in the subfield image")
            return self._delegate.project_raw(a[0])
        self._ensure_embedding()
        P = self.parent
        if P.p == 2:
            combo = 0
            v = a
            for pivot, rv, rc in self._echelon:
                if (v >> pivot) & 1:
                    v ^= rv
                    combo ^= rc
            if v:
                raise ValueError("element is not in the subfield image")
            return combo
        pivots, transform = self._echelon
        digits = P.digits(a)
        coeffs = [sum(t * digits[c] for t, c in zip(row, pivots)) % P.p for row in transform]
        if self.embed_raw(_gfp_to_int(coeffs, P.p)) != a:
            raise ValueError("element is not in the subfield image")
        return _gfp_to_int(coeffs, P.p)

    def project(self, x: FieldElement) -> FieldElement:
        return FieldElement(self.small, self.project_raw(x.value))

    def __repr__(self) -> str:
        return f"Subfield(GF({self.parent.p}^{self.d}) in {self.parent!r})"


def _gfp_left_inverse(vecs: list[list[int]], p: int):
    """Pivot columns and a d x d inverse so that coords = T * v[pivots]."""
    d = len(vecs)
    n = len(vecs[0])
    # columns of the n x d matrix M (M[:, k] = vecs[k]); pick d independent rows
    rows = [[vecs[k][i] for k in range(d)] for i in range(n)]
    chosen, basis = [], []
    for i, row in enumerate(rows):
        test = basis + [row]
        if _gfp_rank(test, p) == len(test):
            basis.append(row)
            chosen.append(i)
            if len(basis) == d:
                break
    if len(basis) < d:
        raise AssertionError("subfield basis images are dependent")
    F = _PrimeField(p)
    inv = _upoly.invert_matrix(F, basis)
    return chosen, inv


def _gfp_rank(rows: list[list[int]], p: int) -> int:
    a = [list(r) for r in rows]
    rank = 0
    ncols = len(a[0]) if a else 0
    for col in range(ncols):
        piv = next((i for i in range(rank, len(a)) if a[i][col] % p), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        inv = pow(a[rank][col], p - 2, p)
        a[rank] = [v * inv % p for v in a[rank]]
        for i in range(len(a)):
            if i != rank and a[i][col] % p:
                c = a[i][col]
                a[i] = [(v - c * w) % p for v, w in zip(a[i], a[rank])]
        rank += 1
    return rank


_SUBFIELDS: dict = {}


def subfield(parent, d: int) -> SubfieldHandle:
    """Cached subfield handle of absolute degree d in ``parent``."""
    key = (id(parent), d)
    handle = _SUBFIELDS.get(key)
    if handle is None or handle.parent is not parent:
        handle = SubfieldHandle(parent, d)
        _SUBFIELDS[key] = handle
    return handle


def trace_to_subfield(x: FieldElement, sub: SubfieldHandle) -> FieldElement:
    """Sum of the conjugates of x over the subfield, in subfield representation."""
    return sub.trace(x)


# ---------------------------------------------------------------------------
# Bases


@dataclass(frozen=True)
class BasisPair:
    """A basis of a field over a subfield together with its trace-dual basis."""

    sub: SubfieldHandle
    basis: tuple
    dual: tuple

    def coordinates_raw(self, a) -> list:
        """Subfield coordinates (as host raws) of a parent raw in ``basis``."""
        return [self.sub.trace_image(self.sub.parent.mul(a, d)) for d in self.dual]


def _gram(sub: SubfieldHandle, basis: Sequence) -> list[list]:
    P = sub.parent
    return [[sub.trace_image(P.mul(a, b)) for b in basis] for a in basis]


def _scale_parent(P, c, a):
    """Multiply parent raw a by a host (subfield-image) raw c."""
    if isinstance(P, ExtensionField):
        return P.scale(c, a)
    return P.mul(c, a)


def dual_basis_raw(sub: SubfieldHandle, basis: Sequence) -> tuple:
    P = sub.parent
    H = sub.host
    n = len(basis)
    if n != sub.index:
        raise ValueError(f"basis has {n} elements, expected {sub.index}")
    gram = _gram(sub, basis)
    try:
        inv = _upoly.invert_matrix(H, gram)
    except ValueError:
        combo = _vanishing_combination(sub, basis)
        raise ValueError(f"basis is dependent over the subfield; vanishing combination "
                         f"(subfield coefficients): {combo}") from None
    dual = []
    for k in range(n):
        acc = P.zero
        for a in range(n):
            c = inv[a][k]
            if c != H.zero:
                acc = P.add(acc, _scale_parent(P, c, basis[a]))
        dual.append(acc)
    for i in range(n):
        for j in range(n):
            t = sub.trace_image(P.mul(basis[i], dual[j]))
            if t != (H.one if i == j else H.zero):
                raise AssertionError("dual basis verification failed")
    return tuple(dual)


def _vanishing_combination(sub: SubfieldHandle, basis: Sequence) -> list:
    """Subfield coefficients c (small-field raws) with sum c_a basis_a = 0."""
    P = sub.parent
    small = sub.small
    # Expand over GF(p): the products kappa_e * basis_a span the same space.
    kappas = [sub.embed_raw(small.coerce([1 if i == e else 0 for i in range(small.n)]))
              for e in range(small.n)]
    vectors, labels = [], []
    for a, b in enumerate(basis):
        for e, kap in enumerate(kappas):
            prod = P.mul(kap, b)
            vectors.append(_flatten_digits(P, prod))
            labels.append((a, e))
    p = P.p
    kernel = _gfp_kernel_vector(vectors, p)
    if kernel is None:
        return []
    out = []
    for a in range(len(basis)):
        digits = [0] * small.n
        for (aa, e), c in zip(labels, kernel):
            if aa == a:
                digits[e] = c
        out.append(small.format_raw(_gfp_to_int(digits, p)))
    return out


def _flatten_digits(P, a) -> list[int]:
    if isinstance(P, ExtensionField):
        out = []
        for c in a:
            out.extend(P.base.digits(c))
        return out
    return P.digits(a)


def _gfp_kernel_vector(vectors: list[list[int]], p: int):
    """A nonzero c with sum c_i vectors_i = 0 over GF(p), or None."""
    m = len(vectors)
    n = len(vectors[0])
    # rows of the augmented system: transpose with identity tracking
    rows = [list(v) + [1 if i == j else 0 for j in range(m)] for i, v in enumerate(vectors)]
    rank = 0
    for col in range(n):
        piv = next((i for i in range(rank, m) if rows[i][col] % p), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = pow(rows[rank][col], p - 2, p)
        rows[rank] = [v * inv % p for v in rows[rank]]
        for i in range(m):
            if i != rank and rows[i][col] % p:
                c = rows[i][col]
                rows[i] = [(v - c * w) % p for v, w in zip(rows[i], rows[rank])]
        rank += 1
    for i in range(rank, m):
        if all(v % p == 0 for v in rows[i][:n]):
            return rows[i][n:]
    return None


def dual_basis(sub: SubfieldHandle, basis: Sequence[FieldElement]) -> BasisPair:
    """Trace-dual basis of ``basis`` over ``sub``; raises on dependent input."""
    raws = tuple(sub.parent.coerce(b) for b in basis)
    dual = dual_basis_raw(sub, raws)
    return BasisPair(sub, tuple(FieldElement(sub.parent, b) for b in raws),
                     tuple(FieldElement(sub.parent, d) for d in dual))


def is_basis_raw(sub: SubfieldHandle, elems: Sequence) -> bool:
    if len(elems) != sub.index:
        return False
    try:
        _upoly.invert_matrix(sub.host, _gram(sub, elems))
    except ValueError:
        return False
    return True


def find_independent_multipliers(sub: SubfieldHandle, y: FieldElement, w_star: int,
                                 rng_seed: int = 0, budget: int = 64) -> list[FieldElement]:
    """Multipliers gamma_t making {y^u gamma_t : u < w_star} a basis over ``sub``.

    The number of multipliers is [parent : sub] / w_star.  The first attempt
    uses gamma = 1 when a single multiplier is needed; further attempts draw
    seeded random elements.  Every returned set passes a Gram-matrix rank check.
    """
    P = sub.parent
    if sub.index % w_star:
        raise ValueError(f"w_star={w_star} does not divide the extension degree {sub.index}")
    count = sub.index // w_star
    yv = P.coerce(y)
    powers = [P.one]
    for _ in range(1, w_star):
        powers.append(P.mul(powers[-1], yv))
    rng = random.Random(rng_seed)
    for attempt in range(budget):
        if attempt == 0 and count == 1:
            gammas = [P.one]
        else:
            gammas = [P.random_nonzero_raw(rng) for _ in range(count)]
        elems = [P.mul(u, g) for g in gammas for u in powers]
        if is_basis_raw(sub, elems):
            return [FieldElement(P, g) for g in gammas]
    raise RuntimeError(f"no independent multipliers found in {budget} draws")


def field_to_json(F) -> str:
    return json.dumps(F.spec.to_json())
