"""Univariate polynomials over the fields of :mod:`rackrepair.field`."""

from __future__ import annotations

import math
import random
from typing import Iterable, Sequence

from . import _upoly
from .field import FieldElement

__all__ = [
    "DEG_ZERO",
    "Polynomial",
    "poly_divmod",
    "poly_interpolate",
    "interpolate_raw",
    "crt_combine",
    "nth_roots",
    "nth_roots_exhaustive",
    "roots_of_shifted",
]

# Degree of the zero polynomial.  Adding an integer keeps it at -inf, so
# deg(f*g) = deg f + deg g holds without special cases.
DEG_ZERO = float("-inf")


class Polynomial:
    """Immutable polynomial; ``raw`` holds field raw values, lowest degree first."""

    __slots__ = ("field", "raw")

    def __init__(self, field, coeffs: Iterable = ()):
        raw = []
        for c in coeffs:
            if isinstance(c, FieldElement):
                if c.field is not field:
                    raise TypeError("coefficient from a different field")
                raw.append(c.value)
            else:
                raw.append(field.coerce(c))
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "raw", tuple(_upoly.trim(raw, field.zero)))

    def __setattr__(self, name, value):
        raise AttributeError("polynomials are immutable")

    @classmethod
    def from_raw(cls, field, raw: Sequence) -> "Polynomial":
        p = object.__new__(cls)
        object.__setattr__(p, "field", field)
        object.__setattr__(p, "raw", tuple(_upoly.trim(list(raw), field.zero)))
        return p

    @classmethod
    def x(cls, field) -> "Polynomial":
        return cls.from_raw(field, [field.zero, field.one])

    @classmethod
    def monomial(cls, field, degree: int, coeff=None) -> "Polynomial":
        c = field.one if coeff is None else field.coerce(coeff)
        return cls.from_raw(field, [field.zero] * degree + [c])

    @classmethod
    def constant(cls, field, c) -> "Polynomial":
        return cls.from_raw(field, [field.coerce(c)])

    @classmethod
    def from_roots(cls, field, roots: Iterable) -> "Polynomial":
        out = [field.one]
        for r in roots:
            out = _upoly.mul(field, out, [field.neg(field.coerce(r)), field.one])
        return cls.from_raw(field, out)

    # -- inspection -------------------------------------------------------------

    @property
    def degree(self):
        return len(self.raw) - 1 if self.raw else DEG_ZERO

    def is_zero(self) -> bool:
        return not self.raw

    @property
    def coeffs(self) -> list[FieldElement]:
        return [FieldElement(self.field, c) for c in self.raw]

    def coeff(self, i: int) -> FieldElement:
        return FieldElement(self.field, self.raw[i] if i < len(self.raw) else self.field.zero)

    def lead(self) -> FieldElement:
        if not self.raw:
            raise ValueError("zero polynomial has no leading coefficient")
        return FieldElement(self.field, self.raw[-1])

    def monomial_degree(self):
        """w if the polynomial is c*x^w, else None."""
        if not self.raw or any(c != self.field.zero for c in self.raw[:-1]):
            return None
        return len(self.raw) - 1

    def __call__(self, x) -> FieldElement:
        xv = self.field.coerce(x)
        return FieldElement(self.field, _upoly.evaluate(self.field, self.raw, xv))

    def eval_raw(self, x):
        return _upoly.evaluate(self.field, self.raw, x)

    # -- arithmetic ---------------------------------------------------------------

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.field is not self.field:
                raise TypeError("field mismatch")
            return other
        return Polynomial(self.field, [other])

    def __add__(self, other):
        o = self._coerce(other)
        return Polynomial.from_raw(self.field, _upoly.add(self.field, self.raw, o.raw))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return Polynomial.from_raw(self.field, _upoly.sub(self.field, self.raw, o.raw))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        return Polynomial.from_raw(self.field, [self.field.neg(c) for c in self.raw])

    def __mul__(self, other):
        o = self._coerce(other)
        return Polynomial.from_raw(self.field, _upoly.mul(self.field, self.raw, o.raw))

    __rmul__ = __mul__

    def __divmod__(self, other):
        return poly_divmod(self, self._coerce(other))

    def __floordiv__(self, other):
        return poly_divmod(self, self._coerce(other))[0]

    def __mod__(self, other):
        return poly_divmod(self, self._coerce(other))[1]

    def __pow__(self, e: int):
        out = Polynomial.from_raw(self.field, [self.field.one])
        for bit in format(e, "b"):
            out = out * out
            if bit == "1":
                out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.field is other.field and self.raw == other.raw
        if isinstance(other, (int, FieldElement)):
            return self == self._coerce(other)
        return NotImplemented

    def __hash__(self):
        return hash((id(self.field), self.raw))

    def __repr__(self):
        if not self.raw:
            return "0"
        terms = []
        for i in range(len(self.raw) - 1, -1, -1):
            c = self.raw[i]
            if c == self.field.zero:
                continue
            cs = self.field.format_raw(c)
            if i == 0:
                terms.append(cs)
            else:
                mono = "x" if i == 1 else f"x^{i}"
                terms.append(mono if c == self.field.one else f"{cs}*{mono}")
        return " + ".join(terms)

    def to_json(self) -> list:
        return [self.field.to_json_raw(c) for c in self.raw]

    @classmethod
    def from_json(cls, field, data: list) -> "Polynomial":
        return cls.from_raw(field, [field.from_json_raw(c) for c in data])


def poly_divmod(f: Polynomial, g: Polynomial) -> tuple[Polynomial, Polynomial]:
    """(q, r) with f = g*q + r and deg r < deg g."""
    if f.field is not g.field:
        raise TypeError("field mismatch")
    if g.is_zero():
        raise ZeroDivisionError("polynomial division by zero")
    q, r = _upoly.divmod_(f.field, f.raw, g.raw)
    return Polynomial.from_raw(f.field, q), Polynomial.from_raw(f.field, r)


def interpolate_raw(F, xs: Sequence, ys: Sequence) -> list:
    """Lagrange interpolation on raw values; xs must be distinct."""
    if len(set(xs)) != len(xs):
        raise ValueError("interpolation points have repeated x values")
    n = len(xs)
    out = []
    # Newton form: divided differences, then expand
    coef = list(ys)
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            coef[i] = F.div(F.sub(coef[i], coef[i - 1]), F.sub(xs[i], xs[i - j]))
    for i in range(n - 1, -1, -1):
        # out = out * (x - xs[i]) + coef[i]
        shifted = [F.zero] + out
        for k, c in enumerate(out):
            shifted[k] = F.sub(shifted[k], F.mul(c, xs[i]))
        if shifted:
            shifted[0] = F.add(shifted[0], coef[i])
        else:
            shifted = [coef[i]]
        out = shifted
    return _upoly.trim(out, F.zero)


def poly_interpolate(points: Sequence[tuple]) -> Polynomial:
    """The unique polynomial of degree < len(points) through the points."""
    if not points:
        raise ValueError("no interpolation points")
    F = points[0][0].field
    xs = [F.coerce(x) for x, _ in points]
    ys = [F.coerce(y) for _, y in points]
    return Polynomial.from_raw(F, interpolate_raw(F, xs, ys))


def crt_combine(congruences: Sequence[tuple[Polynomial, Polynomial]]) -> Polynomial:
    """Unique F with deg F < sum of modulus degrees matching every residue."""
    if not congruences:
        raise ValueError("no congruences")
    F = congruences[0][0].field
    mods = [m for m, _ in congruences]
    for i in range(len(mods)):
        if mods[i].is_zero() or mods[i].degree < 1:
            raise ValueError(f"modulus {i} must have positive degree")
        if congruences[i][1].degree >= mods[i].degree:
            raise ValueError(f"residue {i} has degree not below its modulus")
        for j in range(i + 1, len(mods)):
            if len(_upoly.gcd(F, mods[i].raw, mods[j].raw)) > 1:
                raise ValueError(f"moduli {i} and {j} are not coprime")
    acc, acc_mod = congruences[0][1].raw, congruences[0][0].raw
    for m, r in congruences[1:]:
        # acc + acc_mod * t with t = (r - acc) / acc_mod mod m
        _, s, _ = _upoly.xgcd(F, _upoly.mod(F, list(acc_mod), m.raw), list(m.raw))
        diff = _upoly.sub(F, r.raw, _upoly.mod(F, list(acc), m.raw))
        t = _upoly.divmod_(F, _upoly.mul(F, diff, s), m.raw)[1]
        acc = _upoly.add(F, acc, _upoly.mul(F, acc_mod, t))
        acc_mod = _upoly.mul(F, acc_mod, m.raw)
    result = Polynomial.from_raw(F, acc)
    for i, (m, r) in enumerate(congruences):
        if result % m != r:
            raise AssertionError(f"CRT verification failed for congruence {i}")
    return result


# ---------------------------------------------------------------------------
# Roots


def _order_divides(F, a, e: int) -> bool:
    return F.pow(a, e) == F.one


def _ell_root(F, a, ell: int, rng: random.Random):
    """An ell-th root of a (a must be an ell-th power, ell prime, ell | q-1)."""
    Q = F.q - 1
    s, t = 0, Q
    while t % ell == 0:
        s += 1
        t //= ell
    lam = pow(ell, -1, t) if t > 1 else 0
    x1 = F.pow(a, lam)
    err = F.div(F.pow(x1, ell), a)  # lies in the Sylow ell-subgroup
    if err == F.one:
        return x1
    while True:
        rho = F.random_nonzero_raw(rng)
        if F.pow(rho, Q // ell) != F.one:
            break
    c = F.pow(rho, t)  # generates the Sylow subgroup of order ell^s
    gamma = F.pow(c, ell ** (s - 1))  # order ell
    small = [F.one]
    for _ in range(1, ell):
        small.append(F.mul(small[-1], gamma))
    # discrete log of err to base c, one base-ell digit at a time
    j = 0
    c_inv = F.inv(c)
    for k in range(s):
        h = F.pow(F.mul(err, F.pow(c_inv, j)), ell ** (s - 1 - k))
        digit = small.index(h)
        j += digit * ell ** k
    if j % ell:
        raise AssertionError("element is not an ell-th power")
    return F.mul(x1, F.pow(c_inv, j // ell))


def _subgroup_generator(F, g: int, rng: random.Random):
    """An element of order exactly g (g | q-1), from u^((q-1)/g) for random u."""
    Q = F.q - 1
    if g == 1:
        return F.one
    primes = _upoly._prime_factors(g)
    for _ in range(512):
        u = F.random_nonzero_raw(rng)
        z = F.pow(u, Q // g)
        if all(F.pow(z, g // ell) != F.one for ell in primes):
            return z
    raise RuntimeError("no element of the required order found")


def _nth_roots_raw(F, y, w: int, rng: random.Random) -> list:
    if w < 1:
        raise ValueError("w must be positive")
    if y == F.zero:
        return [F.zero]
    Q = F.q - 1
    g = math.gcd(w, Q)
    if F.pow(y, Q // g) != F.one:
        return []
    # on the subgroup of order Q/g, x -> x^(w/g) is a bijection
    wp = w // g
    yp = F.pow(y, pow(wp, -1, Q // g)) if Q // g > 1 else y
    z = yp
    rest = g
    for ell in _upoly._prime_factors(g):
        while rest % ell == 0:
            z = _ell_root(F, z, ell, rng)
            rest //= ell
    if F.pow(z, w) != y:
        raise AssertionError("root extraction failed")
    zeta = _subgroup_generator(F, g, rng)
    out = [z]
    for _ in range(1, g):
        out.append(F.mul(out[-1], zeta))
    return out


_EXHAUSTIVE_LIMIT = 1 << 16


def nth_roots_exhaustive(y: FieldElement, w: int) -> list[FieldElement]:
    F = y.field
    if F.q > _EXHAUSTIVE_LIMIT:
        raise ValueError("field too large for exhaustive search")
    return [FieldElement(F, x) for x in range(F.q) if F.pow(x, w) == y.value] \
        if y.value != F.zero else [FieldElement(F, F.zero)]


def nth_roots(y: FieldElement, w: int, rng_seed: int = 0) -> list[FieldElement]:
    """All x with x^w = y, sorted by raw value.

    Fields with at most 2^16 elements are cross-checked by enumeration.
    """
    F = y.field
    rng = random.Random(rng_seed)
    raws = sorted(_nth_roots_raw(F, y.value, w, rng))
    if len(set(raws)) != len(raws):
        raise AssertionError("duplicate roots")
    if F.q <= _EXHAUSTIVE_LIMIT:
        check = sorted(x.value for x in nth_roots_exhaustive(y, w))
        if check != raws:
            raise AssertionError("root extraction disagrees with enumeration")
    return [FieldElement(F, r) for r in raws]


def roots_of_shifted(h: Polynomial, y: FieldElement, rng_seed: int = 0) -> list[FieldElement]:
    """Distinct roots of h(x) - y in the field, sorted by raw value."""
    F = h.field
    if h.degree == DEG_ZERO or h.degree < 1:
        raise ValueError("h must be nonconstant")
    w = h.monomial_degree()
    if w is not None:
        return nth_roots(FieldElement(F, F.div(y.value, h.raw[-1])), w, rng_seed)
    shifted = list(h.raw)
    shifted[0] = F.sub(shifted[0], y.value)
    raws = _upoly.roots(F, shifted, random.Random(rng_seed))
    return [FieldElement(F, r) for r in sorted(set(raws))]
