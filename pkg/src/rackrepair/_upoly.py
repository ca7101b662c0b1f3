"""Dense univariate polynomials as lists of raw field values, lowest degree first.

These helpers work over any object exposing the raw field interface used in
``rackrepair.field`` (``zero``, ``one``, ``add``, ``sub``, ``neg``, ``mul``,
``inv``, ``frob``, ``random_raw``, ``p``, ``degree``).  ``rackrepair.poly``
wraps them in a value type; the field module uses them directly for
subfield embeddings and extension-field inverses.
"""

from __future__ import annotations

import random
from typing import Sequence


def trim(f: list, zero) -> list:
    while f and f[-1] == zero:
        f.pop()
    return f


def add(F, f: Sequence, g: Sequence) -> list:
    if len(f) < len(g):
        f, g = g, f
    out = list(f)
    for i, c in enumerate(g):
        out[i] = F.add(out[i], c)
    return trim(out, F.zero)


def sub(F, f: Sequence, g: Sequence) -> list:
    out = list(f) + [F.zero] * max(0, len(g) - len(f))
    for i, c in enumerate(g):
        out[i] = F.sub(out[i], c)
    return trim(out, F.zero)


def scale(F, c, f: Sequence) -> list:
    if c == F.zero:
        return []
    return trim([F.mul(c, a) for a in f], F.zero)


def mul(F, f: Sequence, g: Sequence) -> list:
    if not f or not g:
        return []
    zero = F.zero
    out = [zero] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a == zero:
            continue
        for j, b in enumerate(g):
            if b != zero:
                out[i + j] = F.add(out[i + j], F.mul(a, b))
    return trim(out, zero)


def divmod_(F, f: Sequence, g: Sequence) -> tuple[list, list]:
    if not g:
        raise ZeroDivisionError("polynomial division by zero")
    zero = F.zero
    r = list(f)
    dg = len(g) - 1
    if len(r) - 1 < dg:
        return [], trim(r, zero)
    lead_inv = F.inv(g[-1])
    q = [zero] * (len(r) - dg)
    terms = [(i, c) for i, c in enumerate(g[:-1]) if c != zero]
    for k in range(len(r) - 1, dg - 1, -1):
        c = r[k]
        if c == zero:
            continue
        c = F.mul(c, lead_inv)
        s = k - dg
        q[s] = c
        r[k] = zero
        for i, gi in terms:
            r[s + i] = F.sub(r[s + i], F.mul(c, gi))
    return trim(q, zero), trim(r[:dg], zero)


def mod(F, f: Sequence, g: Sequence) -> list:
    """Remainder of f modulo g; fast when g is monic and sparse."""
    if not g:
        raise ZeroDivisionError("polynomial division by zero")
    zero, one = F.zero, F.one
    dg = len(g) - 1
    if len(f) - 1 < dg:
        return trim(list(f), zero)
    if g[-1] != one:
        return divmod_(F, f, g)[1]
    r = list(f)
    terms = [(i, c) for i, c in enumerate(g[:-1]) if c != zero]
    for k in range(len(r) - 1, dg - 1, -1):
        c = r[k]
        if c == zero:
            continue
        s = k - dg
        for i, gi in terms:
            r[s + i] = F.sub(r[s + i], c if gi == one else F.mul(c, gi))
    return trim(r[:dg], zero)


def monic(F, f: Sequence) -> list:
    if not f:
        return []
    inv = F.inv(f[-1])
    return [F.mul(inv, c) for c in f]


def gcd(F, f: Sequence, g: Sequence) -> list:
    a, b = trim(list(f), F.zero), trim(list(g), F.zero)
    while b:
        a, b = b, divmod_(F, a, b)[1]
    return monic(F, a)


def xgcd(F, f: Sequence, g: Sequence) -> tuple[list, list, list]:
    """Return (d, s, t) with s*f + t*g = d, d monic."""
    r0, r1 = trim(list(f), F.zero), trim(list(g), F.zero)
    s0, s1, t0, t1 = [F.one], [], [], [F.one]
    while r1:
        q, r = divmod_(F, r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, sub(F, s0, mul(F, q, s1))
        t0, t1 = t1, sub(F, t0, mul(F, q, t1))
    if not r0:
        return [], s0, t0
    inv = F.inv(r0[-1])
    return scale(F, inv, r0), scale(F, inv, s0), scale(F, inv, t0)


def evaluate(F, f: Sequence, x):
    acc = F.zero
    for c in reversed(f):
        acc = F.add(F.mul(acc, x), c)
    return acc


def derivative(F, f: Sequence) -> list:
    out = []
    for i in range(1, len(f)):
        out.append(F.mul(F.scalar(i), f[i]))
    return trim(out, F.zero)


def frob_mod(F, f: Sequence, m: Sequence) -> list:
    """Return f(x)^p mod m (coefficientwise Frobenius, exponents times p)."""
    p = F.p
    zero = F.zero
    out = [zero] * (p * (len(f) - 1) + 1) if f else []
    for i, c in enumerate(f):
        if c != zero:
            out[p * i] = F.frob(c, 1)
    return mod(F, out, m)


def x_pow_q_mod(F, m: Sequence, k: int = 1) -> list:
    """Return x^(Q^k) mod m where Q is the field order."""
    u = mod(F, [F.zero, F.one], m)
    for _ in range(k * F.degree):
        u = frob_mod(F, u, m)
    return u


def powmod(F, f: Sequence, e: int, m: Sequence) -> list:
    result = [F.one]
    base = mod(F, f, m)
    for bit in format(e, "b"):
        result = mod(F, mul(F, result, result), m)
        if bit == "1":
            result = mod(F, mul(F, result, base), m)
    return result


def _prime_factors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def is_irreducible(F, f: Sequence) -> bool:
    """Rabin's test over the field F; f must have degree at least 1."""
    f = monic(F, trim(list(f), F.zero))
    n = len(f) - 1
    if n < 1:
        return False
    if n == 1:
        return True
    x = [F.zero, F.one]
    if sub(F, x_pow_q_mod(F, f, n), mod(F, x, f)):
        return False
    for ell in _prime_factors(n):
        h = sub(F, x_pow_q_mod(F, f, n // ell), mod(F, x, f))
        if len(gcd(F, f, h)) > 1:
            return False
    return True


def _trace_map(F, a, m: Sequence, reducer: Sequence) -> list:
    """Sum_{i<deg F} (a x)^(p^i) reduced modulo `reducer` (a multiple of m)."""
    u = mod(F, [F.zero, a], reducer)
    acc = list(u)
    for _ in range(F.degree - 1):
        u = frob_mod(F, u, reducer)
        acc = add(F, acc, u)
    return mod(F, acc, m)


def _split(F, g: list, rng: random.Random, reducer: Sequence, one_only: bool) -> list:
    if len(g) == 1:
        return []
    if len(g) == 2:
        return [F.neg(g[0])]
    for _ in range(256):
        a = F.random_raw(rng)
        if a == F.zero:
            continue
        t = _trace_map(F, a, g, reducer)
        # every root has Tr(a*root) in GF(p), so the classes partition g
        parts = []
        rest = g
        for c in range(F.p):
            if len(rest) <= 1:
                break
            h = gcd(F, rest, sub(F, t, [F.scalar(c)]) if c else t)
            if len(h) > 1:
                parts.append(h)
                rest = divmod_(F, rest, h)[0]
        if len(parts) > 1:
            parts.sort(key=len)
            if one_only:
                return _split(F, parts[0], rng, reducer, True)
            roots = []
            for h in parts:
                roots.extend(_split(F, h, rng, reducer, False))
            return roots
    raise RuntimeError("root splitting did not converge")


def roots(F, f: Sequence, rng: random.Random | None = None, *,
          splits: bool = False, one: bool = False) -> list:
    """Distinct roots of f in F by gcd with x^Q - x and trace splitting.

    With ``splits=True`` the caller asserts f is squarefree and splits into
    linear factors, which skips the x^Q - x gcd.  With ``one=True`` only a
    single root is returned (or none).
    """
    rng = rng or random.Random(0)
    f = monic(F, trim(list(f), F.zero))
    if len(f) <= 1:
        return []
    zero_root = f[0] == F.zero
    while f and f[0] == F.zero:
        f = f[1:]
    found = [F.zero] if zero_root else []
    if zero_root and one:
        return found
    if len(f) > 1:
        reducer = f
        g = f if splits else gcd(F, f, sub(F, x_pow_q_mod(F, f), [F.zero, F.one]))
        found.extend(_split(F, g, rng, reducer, one))
    return found


def solve_linear(F, rows: list[list], rhs: list) -> list:
    """Solve the square system rows * x = rhs by Gaussian elimination."""
    n = len(rows)
    a = [list(r) + [b] for r, b in zip(rows, rhs)]
    zero = F.zero
    for col in range(n):
        piv = next((i for i in range(col, n) if a[i][col] != zero), None)
        if piv is None:
            raise ValueError("singular linear system")
        a[col], a[piv] = a[piv], a[col]
        inv = F.inv(a[col][col])
        a[col] = [F.mul(inv, v) for v in a[col]]
        for i in range(n):
            if i != col and a[i][col] != zero:
                c = a[i][col]
                a[i] = [F.sub(v, F.mul(c, w)) for v, w in zip(a[i], a[col])]
    return [a[i][n] for i in range(n)]


def invert_matrix(F, rows: list[list]) -> list[list]:
    n = len(rows)
    zero, one = F.zero, F.one
    a = [list(r) + [one if i == j else zero for j in range(n)] for i, r in enumerate(rows)]
    for col in range(n):
        piv = next((i for i in range(col, n) if a[i][col] != zero), None)
        if piv is None:
            raise ValueError("singular matrix")
        a[col], a[piv] = a[piv], a[col]
        inv = F.inv(a[col][col])
        a[col] = [F.mul(inv, v) for v in a[col]]
        for i in range(n):
            if i != col and a[i][col] != zero:
                c = a[i][col]
                a[i] = [F.sub(v, F.mul(c, w)) for v, w in zip(a[i], a[col])]
    return [r[n:] for r in a]
