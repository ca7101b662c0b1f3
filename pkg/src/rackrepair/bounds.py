"""Repair-bandwidth bounds and feasibility thresholds in exact rational arithmetic.

All inputs that may be fractional (per-helper download ``beta``) are
converted with :class:`fractions.Fraction`; floats are rejected so that
optimality checks are equality tests.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

__all__ = [
    "singleton_locality_bound",
    "cutset_mds",
    "cutset_locality",
    "partial_cutset",
    "capacity_c",
    "capacity_c_stated",
    "capacity_terms",
    "feasible",
    "beta_min",
    "beta_min_closed_form",
    "r_star",
    "r_min_direct",
    "threshold_f",
    "threshold_g",
    "threshold_s_star",
    "plugin_reduction_bound",
]


def _q(x) -> Fraction:
    if isinstance(x, float):
        raise TypeError("use an exact rational (int, Fraction or 'a/b' string), not a float")
    return Fraction(x)


def singleton_locality_bound(n: int, k: int, r: int, delta: int) -> int:
    """n - k + 1 - (ceil(k/r) - 1)(delta - 1)."""
    if r < 1 or k < 1:
        raise ValueError("need r >= 1 and k >= 1")
    return n - k + 1 - (-(-k // r) - 1) * (delta - 1)


def cutset_mds(D: int, K: int, L: int, e: int) -> Fraction:
    """D L / (D - K + e): e failed nodes, D helpers, K nodes rebuild the file."""
    if K > D:
        raise ValueError(f"need K <= D, got K={K}, D={D}")
    if e < 1:
        raise ValueError("need at least one failure")
    return Fraction(D * L, D - K + e)


def cutset_locality(D: int, K: int, r: int) -> Fraction:
    """D r / (D - K + 1) for racks with r information symbols each."""
    if K > D:
        raise ValueError(f"need K <= D, got K={K}, D={D}")
    return Fraction(D * r, D - K + 1)


def partial_cutset(D: int, K: int, e: int, delta: int) -> Fraction:
    """D (e - delta + 1) / (D - K + 1) for e erased symbols in one rack, else 0.

    K = D is accepted: the value is then the full download of e - delta + 1
    symbols from each of the D helpers.
    """
    if K > D:
        raise ValueError(f"need K <= D, got K={K}, D={D}")
    if e < delta:
        return Fraction(0)
    return Fraction(D * (e - delta + 1), D - K + 1)


def plugin_reduction_bound(tau: int, D: int, k: int, ell: int, wbar: int, delta: int) -> Fraction:
    """tau D ell (wbar - delta + 1) / (D - k + tau), in subfield symbols."""
    if D - k + tau <= 0:
        raise ValueError("need D - k + tau > 0")
    return Fraction(tau * D * ell * max(wbar - delta + 1, 0), D - k + tau)


# ---------------------------------------------------------------------------
# Capacity of the partial information-flow graph family


def _check_family(N: int, K: int, D: int, s: Sequence[int]) -> None:
    if len(s) != N:
        raise ValueError(f"s has {len(s)} entries, expected N={N}")
    if not 1 <= K <= N:
        raise ValueError("need 1 <= K <= N")
    if not 1 <= D <= N - 1:
        raise ValueError("need 1 <= D <= N-1")
    if any(v < 0 for v in s):
        raise ValueError("surviving counts must be non-negative")


def capacity_terms(N: int, K: int, D: int, beta, s: Sequence[int]) -> list[tuple[Fraction, int]]:
    """The K (outside download, surviving count) pairs of the cheapest cut.

    The t-th of K consecutive failures can draw from at most max(D - t, 0)
    helpers outside the data collector's set.  The minimum over the family
    pairs these download capacities, in ascending order, with the K smallest
    surviving counts, also ascending.
    """
    _check_family(N, K, D, s)
    beta = _q(beta)
    coefs = sorted(max(D - t, 0) for t in range(K))
    smallest = sorted(s)[:K]
    return [(c * beta, v) for c, v in zip(coefs, smallest)]


def capacity_c(N: int, K: int, D: int, beta, s: Sequence[int], r: int) -> Fraction:
    """Minimum S-DC cut over all graphs of the family."""
    return sum((min(b + v, Fraction(r)) for b, v in capacity_terms(N, K, D, beta, s)),
               Fraction(0))


def capacity_c_stated(N: int, K: int, D: int, beta, s: Sequence[int], r: int) -> Fraction:
    """The closed form with (D - i) beta paired with the i-th smallest s.

    Kept for comparison: it coincides with :func:`capacity_c` when the K
    smallest surviving counts are equal, and exceeds it otherwise.
    """
    _check_family(N, K, D, s)
    beta = _q(beta)
    ss = sorted(s)
    split = min(K, D)
    total = Fraction(0)
    for i in range(split):
        total += min((D - i) * beta + ss[i], Fraction(r))
    for i in range(split, K):
        total += min(Fraction(ss[i]), Fraction(r))
    return total


def feasible(N: int, K: int, D: int, beta, s: Sequence[int], r: int) -> bool:
    """K r <= capacity_c."""
    return K * r <= capacity_c(N, K, D, beta, s, r)


def beta_min(N: int, K: int, D: int, r: int, s: Sequence[int]):
    """Smallest beta >= 0 that makes the tuple feasible, or None if none does.

    The capacity is piecewise linear and non-decreasing in beta with kinks at
    (r - s_t) / c_t, so feasibility flips at one of those points.  The search
    bisects the sorted candidate list, evaluating feasibility exactly.
    """
    terms = capacity_terms(N, K, D, 1, s)
    candidates = {Fraction(0)}
    for c, v in terms:
        if c > 0 and v < r:
            candidates.add(Fraction(r - v) / c)
    cands = sorted(candidates)
    if not feasible(N, K, D, cands[-1], s, r):
        return None
    lo, hi = -1, len(cands) - 1  # cands[hi] feasible, cands[lo] infeasible
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if feasible(N, K, D, cands[mid], s, r):
            hi = mid
        else:
            lo = mid
    return cands[hi]


def beta_min_closed_form(N: int, K: int, D: int, r: int, s: Sequence[int]):
    """max(0, (r - s_min) / (D - K + 1)) for K <= D."""
    _check_family(N, K, D, s)
    if K > D:
        raise ValueError("closed form needs K <= D")
    return max(Fraction(0), Fraction(r - min(s), D - K + 1))


# ---------------------------------------------------------------------------
# Threshold on the storage per node


def threshold_f(K: int, D: int, t: int) -> Fraction:
    return Fraction(1) / (K * (D + 1 - K) + Fraction(t * (t + 1), 2) + t * (K - t - 1))


def threshold_g(K: int, D: int, beta, s_sorted: Sequence[int], t: int) -> Fraction:
    beta = _q(beta)
    return sum(s_sorted[:t], Fraction(0)) + t * (D - K) * beta + Fraction(t * (t + 1), 2) * beta


def threshold_s_star(K: int, s_sorted: Sequence[int], t: int) -> Fraction:
    return (sum(s_sorted[:t], Fraction(0)) + (K - t) * s_sorted[t]) / K


def r_star(N: int, K: int, D: int, beta, s: Sequence[int], M):
    """Minimum storage per node for file size M, by the piecewise closed form.

    Returns ``(value, branch)`` where branch is ``"top"``, ``"always"`` or
    the interval index t >= 1.  Returns None when beta lies below every
    interval the closed form covers.  The intervals are written with
    r = M / K, which is how the file size enters the branch conditions.
    """
    _check_family(N, K, D, s)
    if D < K:
        raise ValueError("need D >= K")
    beta = _q(beta)
    M = _q(M)
    if beta < 0:
        raise ValueError("beta must be non-negative")
    r = M / K
    ss = sorted(s)
    if r <= ss[0]:
        return M / K, "always"
    if beta >= threshold_f(K, D, 0) * K * (r - ss[0]):
        return M / K, "top"
    ext = list(ss) + [math.inf]
    tau = next(i for i in range(1, N + 1) if ext[i - 1] < r <= ext[i])
    tau_star = min(tau, K)
    for t in range(1, tau_star):
        lo = threshold_f(K, D, t) * K * (r - threshold_s_star(K, ss, t))
        hi = threshold_f(K, D, t - 1) * K * (r - threshold_s_star(K, ss, t - 1))
        if lo < beta <= hi:
            return (M - threshold_g(K, D, beta, ss, t)) / (K - t), t
    return None


def r_min_direct(N: int, K: int, D: int, beta, s: Sequence[int], M):
    """Smallest rho with sum_i min(b_i, rho) >= M, solved piece by piece.

    b_i are the cut terms (download plus surviving count) of the cheapest
    cut; None when even unbounded storage falls short.
    """
    M = _q(M)
    b = sorted(c + v for c, v in capacity_terms(N, K, D, beta, s))
    K = len(b)
    below = Fraction(0)
    for t in range(K + 1):
        # on [b_{t-1}, b_t): C(rho) = below + (K - t) rho
        if t == K:
            return None if below < M else b[-1]
        rho = (M - below) / (K - t)
        lower = b[t - 1] if t else Fraction(0)
        if rho <= b[t] and rho >= lower:
            return max(rho, Fraction(0))
        below += b[t]
    return None
