"""Rack-aware Tamo-Barg array codes built from a good polynomial.

A good polynomial h of degree w takes a constant value y_i on each of m
disjoint sets of w field elements (the classes).  Rack i stores the
evaluations of the message polynomial F_a on class i, one symbol per row.
The first m1 classes carry information: the message block of class i is
the value of F_a at the first r roots of that class.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field as dc_field
from typing import Sequence

import numpy as np

from . import _upoly
from .field import FieldElement, FieldSpec, GF, SubfieldHandle, get_field, subfield
from .poly import Polynomial, crt_combine, interpolate_raw, nth_roots, roots_of_shifted

__all__ = [
    "GoodPolynomial",
    "CodeConfig",
    "ArrayCodeword",
    "RemainderTable",
    "TowerSkeleton",
    "build_monomial_good_poly",
    "verify_good_poly",
    "instantiate_tower",
    "encode",
    "encode_raw",
    "remainder_decompose",
    "local_repair_column",
    "decode_from_columns",
    "min_distance_bruteforce",
    "gf13_instance",
    "tower_instance",
    "gf64_instance",
    "gf256_instance",
    "named_instance",
    "INSTANCE_NAMES",
    "random_message",
]


@dataclass(frozen=True)
class GoodPolynomial:
    """h together with its classes (y_i, sorted roots), stored as raw values."""

    h: Polynomial
    values: tuple
    roots: tuple  # roots[i] is a tuple of w raw values, ascending

    @property
    def field(self):
        return self.h.field

    @property
    def w(self) -> int:
        return int(self.h.degree)

    def classes(self) -> list[tuple[FieldElement, list[FieldElement]]]:
        F = self.field
        return [(FieldElement(F, y), [FieldElement(F, b) for b in rs])
                for y, rs in zip(self.values, self.roots)]

    def check(self) -> None:
        F = self.field
        if len(set(self.values)) != len(self.values):
            raise ValueError("class values are not distinct")
        seen = set()
        for y, rs in zip(self.values, self.roots):
            if len(rs) != self.w or len(set(rs)) != self.w:
                raise ValueError(f"class {F.format_raw(y)} does not have {self.w} distinct roots")
            for b in rs:
                if self.h.eval_raw(b) != y:
                    raise ValueError("h is not constant on a class")
                if b in seen:
                    raise ValueError("classes overlap")
                seen.add(b)


def build_monomial_good_poly(F: GF, w: int, class_values: Sequence) -> GoodPolynomial:
    """h = x^w with the given class values; each value must be a nonzero w-th power."""
    if (F.q - 1) % w:
        raise ValueError(f"w={w} does not divide q-1={F.q - 1}")
    values = [F.coerce(v) for v in class_values]
    if len(set(values)) != len(values):
        raise ValueError("duplicate class values")
    h = Polynomial.monomial(F, w)
    roots = []
    for y in values:
        if y == F.zero:
            raise ValueError("class value 0 has a single root")
        rs = nth_roots(FieldElement(F, y), w)
        if len(rs) != w:
            raise ValueError(f"class value {F.format_raw(y)} is not a {w}-th power "
                             f"(has {len(rs)} roots)")
        roots.append(tuple(r.value for r in rs))
    good = GoodPolynomial(h, tuple(values), tuple(roots))
    good.check()
    return good


def verify_good_poly(h: Polynomial, class_values: Sequence) -> GoodPolynomial:
    """Accept an arbitrary h by counting the roots of h - y for each class value."""
    F = h.field
    values = [F.coerce(v) for v in class_values]
    roots = []
    for y in values:
        rs = roots_of_shifted(h, FieldElement(F, y))
        if len(rs) != int(h.degree):
            raise ValueError(f"h - {F.format_raw(y)} has {len(rs)} roots, "
                             f"expected {int(h.degree)}")
        roots.append(tuple(r.value for r in rs))
    good = GoodPolynomial(h, tuple(values), tuple(roots))
    good.check()
    return good


# ---------------------------------------------------------------------------
# Configuration


@dataclass(frozen=True)
class CodeConfig:
    """An array code instance.  Information classes come first."""

    good: GoodPolynomial
    m1: int
    m2: int
    r: int
    tower: tuple | None = None  # per-class SubfieldHandle of the helper subfield
    common_subfield: SubfieldHandle | None = None
    name: str = ""
    _moduli: list = dc_field(default_factory=list, compare=False, repr=False)

    def __post_init__(self):
        if not 0 < self.r < self.w:
            raise ValueError(f"need 0 < r < w, got r={self.r}, w={self.w}")
        if self.m1 < 1 or self.m2 < 0:
            raise ValueError("need m1 >= 1 and m2 >= 0")
        if self.m1 + self.m2 != len(self.good.values):
            raise ValueError(f"m1 + m2 = {self.m1 + self.m2} but there are "
                             f"{len(self.good.values)} classes")
        if self.tower is not None:
            if len(self.tower) != self.m:
                raise ValueError("one helper subfield per class is required")
            for i, sub in enumerate(self.tower):
                y = self.good.values[i]
                if sub.contains_raw(y):
                    raise ValueError(f"class value {i} lies in its helper subfield")
                for j, yj in enumerate(self.good.values):
                    if j != i and not sub.contains_raw(yj):
                        raise ValueError(f"class value {j} is not in helper subfield {i}")
        F = self.field
        h = self.good.h.raw
        for y in self.good.values:
            m = list(h)
            m[0] = F.sub(m[0], y)
            self._moduli.append(m)

    @property
    def field(self) -> GF:
        return self.good.field

    @property
    def w(self) -> int:
        return self.good.w

    L = w

    @property
    def delta(self) -> int:
        return self.w - self.r + 1

    @property
    def m(self) -> int:
        return self.m1 + self.m2

    @property
    def n(self) -> int:
        return self.m * self.w

    @property
    def k(self) -> int:
        return self.m1 * self.r

    @property
    def K(self) -> int:
        return self.m1

    @property
    def ys(self) -> tuple:
        return self.good.values

    @property
    def roots(self) -> tuple:
        return self.good.roots

    def w_i(self, i: int) -> int:
        if self.tower is None:
            raise ValueError("configuration has no helper subfields")
        return self.tower[i].index

    def target_distance(self) -> int:
        return (self.m2 + 1) * self.w - self.r + 1

    def modulus(self, i: int) -> list:
        """Raw coefficients of h(x) - y_i."""
        return self._moduli[i]

    def to_json(self) -> dict:
        F = self.field
        return {
            "name": self.name,
            "field": F.spec.to_json(s.d for s in (self.tower or ())),
            "h": self.good.h.to_json(),
            "h_degree": self.w,
            "classes": [{"y": F.to_json_raw(y), "roots": [F.to_json_raw(b) for b in rs]}
                        for y, rs in zip(self.good.values, self.good.roots)],
            "m1": self.m1,
            "m2": self.m2,
            "r": self.r,
            "tower": [s.d for s in self.tower] if self.tower else None,
            "common_subfield": self.common_subfield.d if self.common_subfield else None,
        }

    @classmethod
    def from_json(cls, data: dict) -> "CodeConfig":
        spec = FieldSpec.from_json(data["field"])
        F = get_field(spec.p, spec.n)
        if tuple(F.modulus) != spec.modulus:
            F = GF(spec.p, spec.n, spec.modulus)
        h = Polynomial.from_json(F, data["h"])
        values = [F.from_json_raw(c["y"]) for c in data["classes"]]
        good = verify_good_poly(h, values)
        stored = [tuple(F.from_json_raw(b) for b in c["roots"]) for c in data["classes"]]
        if stored != list(good.roots):
            raise ValueError("stored class roots do not match h")
        tower = tuple(subfield(F, d) for d in data["tower"]) if data.get("tower") else None
        common = subfield(F, data["common_subfield"]) if data.get("common_subfield") else None
        return cls(good, int(data["m1"]), int(data["m2"]), int(data["r"]), tower, common,
                   data.get("name", ""))


@dataclass(frozen=True)
class RemainderTable:
    """H[j] is the polynomial in y giving coefficient j of F_a mod (h - y)."""

    config: CodeConfig
    H: tuple  # of Polynomial, j < r

    def at(self, i: int) -> list:
        """Raw coefficients H_j(y_i) for j < r."""
        y = self.config.ys[i]
        return [Hj.eval_raw(y) for Hj in self.H]


@dataclass(frozen=True)
class ArrayCodeword:
    """columns[i][j] is the raw symbol of rack i, row j."""

    config: CodeConfig
    columns: tuple

    def column(self, i: int) -> list[FieldElement]:
        F = self.config.field
        return [FieldElement(F, v) for v in self.columns[i]]

    def matrix(self) -> list[list[FieldElement]]:
        """L x m matrix of elements."""
        F = self.config.field
        return [[FieldElement(F, col[j]) for col in self.columns] for j in range(self.config.L)]

    def flat(self) -> list:
        return [v for col in self.columns for v in col]


# ---------------------------------------------------------------------------
# Encoding and decoding


def message_polynomial_raw(config: CodeConfig, a: Sequence) -> list:
    """F_a as raw coefficients, degree < m1*w."""
    F = config.field
    r = config.r
    if len(a) != config.k:
        raise ValueError(f"message has {len(a)} symbols, expected k={config.k}")
    congruences = []
    for i in range(config.m1):
        xs = list(config.roots[i][:r])
        f = interpolate_raw(F, xs, list(a[i * r:(i + 1) * r]))
        congruences.append((Polynomial.from_raw(F, config.modulus(i)), Polynomial.from_raw(F, f)))
    if config.m1 == 1:
        return list(congruences[0][1].raw)
    return list(crt_combine(congruences).raw)


def encode_raw(config: CodeConfig, a: Sequence) -> tuple[ArrayCodeword, list]:
    F = config.field
    Fa = message_polynomial_raw(config, a)
    cols = tuple(tuple(_upoly.evaluate(F, Fa, b) for b in rs) for rs in config.roots)
    return ArrayCodeword(config, cols), Fa


def encode(config: CodeConfig, a: Sequence) -> tuple[ArrayCodeword, RemainderTable]:
    """Encode k message symbols into an L x m array and its remainder table."""
    F = config.field
    raw = [F.coerce(v) for v in a]
    cw, Fa = encode_raw(config, raw)
    return cw, remainder_decompose(config, Polynomial.from_raw(F, Fa))


def remainder_decompose(config: CodeConfig, Fa: Polynomial) -> RemainderTable:
    """Coefficient polynomials of F_a mod (h - y) by iterated division by h.

    Writing F_a = sum_t U_t(x) h(x)^t with deg U_t < w, the reduction modulo
    h - y is sum_t U_t(x) y^t, so coefficient j is sum_t U_t[j] y^t.
    """
    F = config.field
    if Fa.degree >= config.m1 * config.w:
        raise ValueError("message polynomial degree is too large")
    h = config.good.h.raw
    digits = []
    rest = list(Fa.raw)
    for _ in range(config.m1 - 1):
        q, rem = _upoly.divmod_(F, rest, h)
        digits.append(rem)
        rest = q
    digits.append(rest)
    H = []
    for j in range(config.w):
        Hj = Polynomial.from_raw(F, [d[j] if j < len(d) else F.zero for d in digits])
        if j >= config.r:
            if not Hj.is_zero():
                raise ValueError(f"coefficient polynomial {j} is nonzero; input is not a codeword")
        else:
            H.append(Hj)
    return RemainderTable(config, tuple(H))


def column_coefficients_raw(config: CodeConfig, i: int, column: Sequence) -> list:
    """Coefficients H_j(y_i), j < r, of the rack polynomial, from a full column."""
    F = config.field
    f = interpolate_raw(F, list(config.roots[i]), list(column))
    if len(f) > config.r:
        raise ValueError(f"column {i} is not a codeword column")
    return f + [F.zero] * (config.r - len(f))


def local_repair_column(config: CodeConfig, i: int, column: Sequence, erased) -> list:
    """Rebuild a column with at most delta-1 erasures from r survivors."""
    F = config.field
    erased = set(erased)
    L = config.L
    if any(not 0 <= e < L for e in erased):
        raise ValueError("erased position out of range")
    if len(erased) > config.delta - 1:
        raise ValueError(f"{len(erased)} erasures is beyond locality (at most "
                         f"{config.delta - 1} can be repaired inside the rack)")
    survivors = [j for j in range(L) if j not in erased]
    vals = [F.coerce(column[j]) for j in range(L)] if not erased else \
        [None if j in erased else F.coerce(column[j]) for j in range(L)]
    use = survivors[:config.r]
    f = interpolate_raw(F, [config.roots[i][j] for j in use], [vals[j] for j in use])
    out = []
    for j in range(L):
        v = _upoly.evaluate(F, f, config.roots[i][j])
        if j not in erased and v != vals[j]:
            raise ValueError(f"survivor {j} of column {i} is inconsistent (corruption)")
        out.append(v)
    return out


def decode_from_columns(config: CodeConfig, columns: dict) -> list:
    """Recover the k message symbols (raw) from any m1 full columns."""
    F = config.field
    if len(columns) < config.m1:
        raise ValueError(f"need {config.m1} columns, got {len(columns)}")
    chosen = sorted(columns)[:config.m1]
    congruences = []
    for i in chosen:
        coeffs = column_coefficients_raw(config, i, [F.coerce(v) for v in columns[i]])
        congruences.append((Polynomial.from_raw(F, config.modulus(i)),
                            Polynomial.from_raw(F, coeffs)))
    Fa = list(crt_combine(congruences).raw) if len(congruences) > 1 else list(congruences[0][1].raw)
    a = []
    for i in range(config.m1):
        for b in config.roots[i][:config.r]:
            a.append(_upoly.evaluate(F, Fa, b))
    return a


def generator_rows(config: CodeConfig) -> list[list]:
    F = config.field
    rows = []
    for t in range(config.k):
        a = [F.zero] * config.k
        a[t] = F.one
        rows.append(encode_raw(config, a)[0].flat())
    return rows


def min_distance_bruteforce(config: CodeConfig, limit: int = 10 ** 6) -> int:
    """Exact minimum Hamming weight of the flattened code, by enumeration."""
    F = config.field
    k = config.k
    if F.q ** k > limit:
        raise ValueError(f"q^k = {F.q ** k} exceeds the enumeration limit {limit}")
    G = generator_rows(config)
    if F.degree == 1:
        p = F.p
        Gm = np.array(G, dtype=np.int64)
        best = config.n
        digits = np.array(list(itertools.product(range(p), repeat=k)), dtype=np.int64)[1:]
        for start in range(0, len(digits), 1 << 16):
            block = digits[start:start + (1 << 16)] @ Gm % p
            best = min(best, int(np.count_nonzero(block, axis=1).min()))
        return best
    words = [tuple([F.zero] * config.n)]
    for row in G:
        nxt = []
        for c in words:
            for a in range(F.q):
                nxt.append(tuple(F.add(x, F.mul(a, g)) for x, g in zip(c, row)))
        words = nxt
    return min(sum(1 for v in c if v != F.zero) for c in words[1:])


# ---------------------------------------------------------------------------
# Tower instantiation


@dataclass(frozen=True)
class TowerSkeleton:
    field: GF
    degrees: tuple
    values: tuple  # raw y_i, y_i of degree degrees[i]
    helper_subfields: tuple  # GF(p^(N/d_i)) handles


def instantiate_tower(p: int, degrees: Sequence[int], w: int, rng_seed: int = 0) -> TowerSkeleton:
    """Pick y_i of degree d_i (pairwise coprime d_i) that are w-th powers in GF(p^N).

    With pairwise coprime degrees, the field generated by the y_j with j != i
    is exactly GF(p^(N/d_i)).  Every hypothesis is checked, not assumed.
    """
    degrees = tuple(int(d) for d in degrees)
    for a, b in itertools.combinations(degrees, 2):
        if math.gcd(a, b) != 1:
            raise ValueError(f"degrees {a} and {b} are not coprime")
    N = math.prod(degrees)
    F = get_field(p, N)
    if (F.q - 1) % w:
        raise ValueError(f"w={w} does not divide {p}^{N}-1; try degrees with a different product")
    values = []
    for d in degrees:
        small = subfield(F, d)
        found = None
        budget = min(small.small.q, 4096)
        for cand in range(1, budget):
            y = small.embed_raw(cand)
            if y in values or F.element_degree_raw(y) != d:
                continue
            if not nth_roots(FieldElement(F, y), w, rng_seed):
                continue
            found = y
            break
        if found is None:
            raise ValueError(f"no suitable element of degree {d}; try different degrees")
        values.append(found)
    handles = []
    for i, d in enumerate(degrees):
        sub = subfield(F, N // d)
        if sub.index != d:
            raise AssertionError("helper subfield has the wrong index")
        handles.append(sub)
    return TowerSkeleton(F, degrees, tuple(values), tuple(handles))


# ---------------------------------------------------------------------------
# Named instances


def _sorted_powers(F: GF, w: int, count: int) -> list:
    values = sorted({F.pow(x, w) for x in range(1, F.q)})
    if len(values) < count:
        raise ValueError("not enough classes")
    return values[:count]


def gf13_instance() -> CodeConfig:
    F = get_field(13, 1)
    good = build_monomial_good_poly(F, 3, [1, 8, 12, 5])
    return CodeConfig(good, 2, 2, 2, name="gf13")


def tower_instance() -> CodeConfig:
    sk = instantiate_tower(2, (2, 3, 5, 7), 3)
    good = build_monomial_good_poly(sk.field, 3, sk.values)
    return CodeConfig(good, 2, 2, 2, tower=sk.helper_subfields, name="tower210")


def gf64_instance() -> CodeConfig:
    F = get_field(2, 6)
    good = build_monomial_good_poly(F, 3, _sorted_powers(F, 3, 12))
    return CodeConfig(good, 4, 8, 2, common_subfield=subfield(F, 3), name="gf64")


def gf256_instance() -> CodeConfig:
    F = get_field(2, 8)
    good = build_monomial_good_poly(F, 5, _sorted_powers(F, 5, 36))
    return CodeConfig(good, 4, 32, 3, common_subfield=subfield(F, 4), name="gf256")


_INSTANCES = {
    "gf13": gf13_instance,
    "tower210": tower_instance,
    "gf64": gf64_instance,
    "gf256": gf256_instance,
}
INSTANCE_NAMES = tuple(_INSTANCES)
_CACHE: dict = {}


def named_instance(name: str) -> CodeConfig:
    if name not in _INSTANCES:
        raise KeyError(f"unknown instance {name!r}; choose from {', '.join(_INSTANCES)}")
    if name not in _CACHE:
        _CACHE[name] = _INSTANCES[name]()
    return _CACHE[name]


def random_message(config: CodeConfig, rng: random.Random) -> list:
    F = config.field
    return [F.random_raw(rng) for _ in range(config.k)]
