"""Generalized Reed-Solomon codes over the class values, erasure decoding only."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from . import _upoly
from .field import FieldElement
from .poly import Polynomial, interpolate_raw

__all__ = [
    "GrsCode",
    "grs_encode",
    "dual_multipliers",
    "dual_multipliers_raw",
    "grs_erasure_decode",
    "CorruptionError",
]


class CorruptionError(ValueError):
    """Surplus positions disagree with the interpolated codeword."""


@dataclass(frozen=True)
class GrsCode:
    """Codewords (alpha_j f(y_j))_j for deg f < dimension."""

    field: object
    dimension: int
    locators: tuple
    multipliers: tuple = ()

    def __post_init__(self):
        F = self.field
        locs = tuple(F.coerce(y) for y in self.locators)
        object.__setattr__(self, "locators", locs)
        if len(set(locs)) != len(locs):
            raise ValueError("locators must be distinct")
        mults = tuple(F.coerce(a) for a in self.multipliers) if self.multipliers \
            else (F.one,) * len(locs)
        if len(mults) != len(locs):
            raise ValueError("one multiplier per locator is required")
        if any(a == F.zero for a in mults):
            raise ValueError("multipliers must be nonzero")
        object.__setattr__(self, "multipliers", mults)
        if not 0 <= self.dimension <= len(locs):
            raise ValueError("dimension exceeds length")

    @property
    def length(self) -> int:
        return len(self.locators)

    def dual(self) -> "GrsCode":
        return GrsCode(self.field, self.length - self.dimension, self.locators,
                       dual_multipliers_raw(self))

    def to_json(self) -> dict:
        F = self.field
        return {"dimension": self.dimension,
                "locators": [F.to_json_raw(y) for y in self.locators],
                "multipliers": [F.to_json_raw(a) for a in self.multipliers]}


def grs_encode(code: GrsCode, message: Polynomial) -> list[FieldElement]:
    F = code.field
    if message.degree >= code.dimension:
        raise ValueError(f"message degree {message.degree} is not below {code.dimension}")
    return [FieldElement(F, F.mul(a, message.eval_raw(y)))
            for y, a in zip(code.locators, code.multipliers)]


def dual_multipliers_raw(code: GrsCode) -> tuple:
    """theta_j with GRS_k(alpha, Y)^perp = GRS_{n-k}(theta, Y).

    For alpha = 1 these are 1 / prod_{i != j} (y_j - y_i); in general each is
    divided by alpha_j.  The result is checked on every pair of generators.
    """
    F = code.field
    Y = code.locators
    out = []
    for j, yj in enumerate(Y):
        prod = F.one
        for i, yi in enumerate(Y):
            if i != j:
                prod = F.mul(prod, F.sub(yj, yi))
        out.append(F.inv(F.mul(prod, code.multipliers[j])))
    n, k = code.length, code.dimension
    powers = [[F.one] * n]
    for _ in range(1, max(k, n - k)):
        powers.append([F.mul(p, y) for p, y in zip(powers[-1], Y)])
    for u in range(k):
        for v in range(n - k):
            acc = F.zero
            for j in range(n):
                term = F.mul(F.mul(code.multipliers[j], powers[u][j]), F.mul(out[j], powers[v][j]))
                acc = F.add(acc, term)
            if acc != F.zero:
                raise AssertionError("dual multipliers failed the orthogonality check")
    return tuple(out)


def dual_multipliers(code: GrsCode) -> list[FieldElement]:
    return [FieldElement(code.field, t) for t in dual_multipliers_raw(code)]


def grs_erasure_decode_raw(code: GrsCode, known: Sequence[tuple[int, object]]) -> list:
    F = code.field
    known = list(known)
    idx = [i for i, _ in known]
    if len(set(idx)) != len(idx):
        raise ValueError("repeated positions")
    if len(known) < code.dimension:
        raise ValueError(f"need {code.dimension} known positions, got {len(known)}")
    use = known[:code.dimension]
    xs = [code.locators[i] for i, _ in use]
    ys = [F.div(F.coerce(v), code.multipliers[i]) for i, v in use]
    f = interpolate_raw(F, xs, ys)
    for i, v in known[code.dimension:]:
        if F.mul(code.multipliers[i], _upoly.evaluate(F, f, code.locators[i])) != F.coerce(v):
            raise CorruptionError(f"position {i} is inconsistent with the other positions")
    return f


def grs_erasure_decode(code: GrsCode, known: Sequence[tuple[int, object]]) -> Polynomial:
    """Message polynomial from at least ``dimension`` known positions."""
    return Polynomial.from_raw(code.field, grs_erasure_decode_raw(code, known))
