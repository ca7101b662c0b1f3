"""Cross-rack repair schemes with exact bandwidth accounting.

Every row of coefficients H_j(y_1), ..., H_j(y_m) is a Reed-Solomon
codeword of dimension m1 over the class values, so for any polynomial p of
degree below m2 the dual relation sum_t theta_t p(y_t) H_j(y_t) = 0 holds.
The schemes choose p so that the unknown term at the failed rack can be
rebuilt from subfield traces sent by the helpers.

Helper messages are produced by functions that receive one helper column
and the public repair plan only; the collector never sees helper columns.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from . import _upoly
from .bounds import cutset_locality, partial_cutset
from .field import ExtensionField, FieldElement, dual_basis_raw, extension, \
    find_independent_multipliers, subfield
from .grs import GrsCode, dual_multipliers_raw, grs_erasure_decode_raw
from .poly import interpolate_raw
from .tamo_barg import CodeConfig, column_coefficients_raw

__all__ = [
    "ErasurePattern",
    "RepairTranscript",
    "BandwidthReport",
    "RepairError",
    "HypothesisError",
    "plan_trace_repair",
    "plan_cross_ratio",
    "CrossRatioPlan",
    "repair_full_rack",
    "repair_partial_single",
    "repair_multi_partial",
    "repair_via_grs_plugin",
    "NaiveGrsPlugin",
    "choose_variant",
    "w_star",
]


class RepairError(ValueError):
    pass


class HypothesisError(RepairError):
    """A hypothesis of the requested scheme does not hold."""


@dataclass(frozen=True)
class ErasurePattern:
    """Erased positions per failed rack."""

    erased: Mapping[int, frozenset]

    def __post_init__(self):
        object.__setattr__(self, "erased",
                           {int(i): frozenset(int(p) for p in e) for i, e in self.erased.items()})

    @classmethod
    def full_rack(cls, i: int, L: int) -> "ErasurePattern":
        return cls({i: frozenset(range(L))})

    @property
    def racks(self) -> list[int]:
        return sorted(self.erased)

    @property
    def tau(self) -> int:
        return len(self.erased)

    def sizes(self) -> list[int]:
        return [len(self.erased[i]) for i in self.racks]

    def validate(self, config: CodeConfig) -> None:
        for i, e in self.erased.items():
            if not 0 <= i < config.m:
                raise RepairError(f"rack {i} out of range")
            if not e:
                raise RepairError(f"rack {i} has no erasures")
            if any(not 0 <= p < config.L for p in e):
                raise RepairError(f"rack {i} has an erased position out of range")

    def is_full(self, config: CodeConfig, i: int) -> bool:
        return len(self.erased[i]) == config.L

    def to_json(self) -> dict:
        return {str(i): sorted(self.erased[i]) for i in self.racks}


@dataclass
class RepairTranscript:
    scheme: str
    helpers: list
    # helper -> list of (subfield degree, value in the subfield's own representation)
    messages: dict = dc_field(default_factory=dict)
    recovered: dict = dc_field(default_factory=dict)  # rack -> {position: raw}

    def verify(self, p: int) -> None:
        for j, msgs in self.messages.items():
            if j not in self.helpers:
                raise AssertionError(f"message from non-helper {j}")
            for d, v in msgs:
                if not 0 <= v < p ** d:
                    raise AssertionError(f"message from helper {j} is outside GF({p}^{d})")

    def to_json(self, fmt=hex) -> dict:
        return {
            "scheme": self.scheme,
            "helpers": list(self.helpers),
            "messages": {str(j): [[d, fmt(v)] for d, v in m] for j, m in self.messages.items()},
            "recovered": {str(i): {str(k): fmt(v) if isinstance(v, int) else str(v)
                                   for k, v in sorted(e.items())}
                          for i, e in self.recovered.items()},
        }


@dataclass
class BandwidthReport:
    scheme: str
    helpers: list
    per_helper_symbols: dict  # helper -> subfield symbols sent
    subfield_degree: dict  # helper -> absolute degree of the message subfield
    field_degree: int
    total: Fraction  # in symbols of the code's field
    bound: Fraction | None
    optimal: bool

    @property
    def D(self) -> int:
        return len(self.helpers)

    @property
    def total_subfield_symbols(self) -> int:
        return sum(self.per_helper_symbols.values())

    def per_helper(self, j: int) -> Fraction:
        return Fraction(self.per_helper_symbols[j] * self.subfield_degree[j], self.field_degree)

    def to_json(self) -> dict:
        return {
            "scheme": self.scheme,
            "helpers": list(self.helpers),
            "D": self.D,
            "per_helper_symbols": {str(j): c for j, c in self.per_helper_symbols.items()},
            "subfield_degree": {str(j): d for j, d in self.subfield_degree.items()},
            "total_subfield_symbols": self.total_subfield_symbols,
            "total": _frac(self.total),
            "bound": None if self.bound is None else _frac(self.bound),
            "optimal": self.optimal,
        }


def _frac(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def _report(scheme, config, helpers, per_helper, degrees, bound) -> BandwidthReport:
    N = config.field.degree
    total = sum((Fraction(per_helper[j] * degrees[j], N) for j in helpers), Fraction(0))
    return BandwidthReport(scheme, list(helpers), dict(per_helper), dict(degrees), N, total,
                           bound, bound is not None and total == bound)


# ---------------------------------------------------------------------------
# Trace repair plan (full rack and single-rack partial)


def w_star(width: int, w_i: int) -> int:
    """Packing factor width / gcd(w_i, width)."""
    return width // math.gcd(w_i, width)


def choose_variant(config: CodeConfig, i: int, rows: int | None = None) -> str:
    """"II" when the packing factor divides w_i, else "I"."""
    ws = w_star(config.r, config.w_i(i))
    return "II" if config.w_i(i) % ws == 0 else "I"


@dataclass
class TracePlan:
    """Public data of one trace repair: everything except the helper columns."""

    config: CodeConfig
    target: int
    variant: str
    rows: tuple  # coefficient rows to recover at the target rack
    w_star: int
    helpers: tuple
    ext: object  # field in which rows are packed (the code's field when no packing)
    sub: object  # helper subfield, as a handle on ``ext``
    groups: tuple  # tuples of row indices (None = zero padding), one packed element each
    gammas: tuple  # multipliers; message t of a group is tr(gamma_t v_j Psi_j)
    v: tuple  # GRS dual multipliers for all racks
    g_at: dict  # rack -> g_Theta(y_rack)
    y_pow: dict  # rack -> [y^u for u < w_star]
    dual: tuple  # dual of {y_i^u gamma_t}, index t * w_star + u

    @property
    def per_helper(self) -> int:
        return len(self.groups) * len(self.gammas)

    def lift(self, a):
        return self.ext.lift(a) if isinstance(self.ext, ExtensionField) else a

    def scale(self, c, a):
        return self.ext.scale(c, a) if isinstance(self.ext, ExtensionField) else self.ext.mul(c, a)

    def pack(self, values: Sequence):
        if isinstance(self.ext, ExtensionField):
            return self.ext.pack(values)
        return values[0]

    def unpack(self, a) -> list:
        return list(a) if isinstance(self.ext, ExtensionField) else [a]


_PLANS: dict = {}


def plan_trace_repair(config: CodeConfig, i: int, rows: Sequence[int], variant: str,
                      helpers: Sequence[int] | None = None, rng_seed: int = 0,
                      width: int | None = None) -> TracePlan:
    """Build (and cache) the public plan for recovering ``rows`` of rack i.

    ``width`` is the number of rows the packing factor is computed from: r
    for full-rack repair, and either r or the number of needed rows for
    partial repair.
    """
    if config.tower is None:
        raise HypothesisError("configuration has no helper subfields")
    F = config.field
    m, m1, m2 = config.m, config.m1, config.m2
    wi = config.w_i(i)
    width = config.r if width is None else width
    ws = w_star(width, wi)
    if variant not in ("I", "II"):
        raise ValueError("variant must be 'I' or 'II'")
    if variant == "I" and ws > wi:
        raise HypothesisError(f"variant I needs w*_i <= w_i, got w*_i={ws}, w_i={wi}")
    if variant == "II" and wi % ws:
        raise HypothesisError(f"variant II needs w*_i | w_i, got w*_i={ws}, w_i={wi}")
    if m2 < max(2, ws):
        raise HypothesisError(f"need m2 >= max(2, w*_i) = {max(2, ws)}, got m2={m2}")
    D = ws + m1 - 1
    if helpers is None:
        helpers = [j for j in range(m) if j != i][:D]
    helpers = tuple(sorted(helpers))
    if len(helpers) != D or len(set(helpers)) != D or i in helpers \
            or any(not 0 <= j < m for j in helpers):
        raise RepairError(f"need exactly D = w*_i + m1 - 1 = {D} distinct helpers other than {i}")
    key = (id(config), i, tuple(rows), variant, helpers, rng_seed, ws)
    plan = _PLANS.get(key)
    if plan is not None and plan.config is config:
        return plan

    ys = config.ys
    theta = [j for j in range(m) if j != i and j not in helpers]
    g_at = {}
    for j in list(helpers) + [i]:
        acc = F.one
        for t in theta:
            acc = F.mul(acc, F.sub(ys[j], ys[t]))
        g_at[j] = acc
    v = dual_multipliers_raw(GrsCode(F, m1, ys))
    y_pow = {}
    for j in list(helpers) + [i]:
        pw = [F.one]
        for _ in range(1, ws):
            pw.append(F.mul(pw[-1], ys[j]))
        y_pow[j] = pw

    sub_degree = config.tower[i].d
    if variant == "I":
        ext = extension(F, ws)
        sub = subfield(ext, sub_degree)
        yi = ext.lift(ys[i]) if isinstance(ext, ExtensionField) else ys[i]
        gam = find_independent_multipliers(sub, FieldElement(ext, yi), ws, rng_seed)
        gammas = tuple(g.value for g in gam)
        rows = tuple(rows)
        padded = list(rows) + [None] * (-len(rows) % ws)
        groups = tuple(tuple(padded[k:k + ws]) for k in range(0, len(padded), ws))
    else:
        ext = F
        sub = config.tower[i]
        step = F.pow(ys[i], ws)
        gam_list = [F.one]
        for _ in range(1, wi // ws):
            gam_list.append(F.mul(gam_list[-1], step))
        gammas = tuple(gam_list)
        groups = tuple((k,) for k in rows)
    basis = []
    for gmm in gammas:
        for u in range(ws):
            yu = y_pow[i][u]
            basis.append(ext.scale(yu, gmm) if isinstance(ext, ExtensionField) else F.mul(yu, gmm))
    dual = dual_basis_raw(sub, basis)
    plan = TracePlan(config, i, variant, tuple(rows), ws, helpers, ext, sub, groups, gammas,
                     tuple(v), g_at, y_pow, dual)
    _PLANS[key] = plan
    return plan


def trace_helper_message(plan: TracePlan, j: int, column: Sequence) -> list:
    """Subfield symbols sent by helper j, computed from its own column only."""
    config = plan.config
    H = column_coefficients_raw(config, j, column)
    zero = config.field.zero
    out = []
    for group in plan.groups:
        psi = plan.pack([H[k] if k is not None else zero for k in group])
        vpsi = plan.scale(plan.v[j], psi)
        for gmm in plan.gammas:
            out.append(plan.sub.trace_raw(plan.ext.mul(gmm, vpsi)))
    return out


def trace_collect(plan: TracePlan, messages: Mapping[int, Sequence]) -> dict:
    """Rebuild H_k(y_i) for the planned rows from the helper messages."""
    F = plan.config.field
    i = plan.target
    H = plan.sub.host
    ws = plan.w_star
    nt = len(plan.gammas)
    denom = F.inv(F.mul(plan.v[i], plan.g_at[i]))
    out = {}
    for gi, group in enumerate(plan.groups):
        # T[t * ws + u] = tr(gamma_t y_i^u v_i g(y_i) Psi_i)
        T = [H.zero] * (nt * ws)
        for j in plan.helpers:
            msgs = messages[j]
            for t in range(nt):
                image = plan.sub.embed_raw(msgs[gi * nt + t])
                if isinstance(plan.ext, ExtensionField):
                    image = image[0]
                if image == H.zero:
                    continue
                for u in range(ws):
                    coef = F.mul(plan.y_pow[j][u], plan.g_at[j])
                    T[t * ws + u] = H.sub(T[t * ws + u], H.mul(coef, image))
        X = plan.ext.zero
        for c, d in zip(T, plan.dual):
            if c != H.zero:
                X = plan.ext.add(X, plan.scale(c, d))
        psi = plan.scale(denom, X)
        for k, val in zip(group, plan.unpack(psi)):
            if k is not None:
                out[k] = val
            elif val != F.zero:
                raise AssertionError("padding slot did not come back as zero")
    return out


def _column_from_coefficients(config: CodeConfig, i: int, coeffs: Sequence) -> list:
    F = config.field
    return [_upoly.evaluate(F, list(coeffs), b) for b in config.roots[i]]


def _available(columns: Mapping[int, Sequence], helpers: Sequence[int]) -> None:
    for j in helpers:
        if j not in columns or columns[j] is None or any(v is None for v in columns[j]):
            raise RepairError(f"helper rack {j} is not fully available")


def repair_full_rack(config: CodeConfig, columns: Mapping[int, Sequence], i: int,
                     variant: str = "auto", helpers: Sequence[int] | None = None,
                     rng_seed: int = 0):
    """Rebuild column i from D = w*_i + m1 - 1 helper racks by subfield traces.

    Returns (column, transcript, report).  The download is (w*_i+m1-1) r / w*_i
    symbols of the code's field.
    """
    if variant == "auto":
        variant = choose_variant(config, i)
    plan = plan_trace_repair(config, i, range(config.r), variant, helpers, rng_seed)
    _available(columns, plan.helpers)
    messages = {j: trace_helper_message(plan, j, columns[j]) for j in plan.helpers}
    rows = trace_collect(plan, messages)
    coeffs = [rows[k] for k in range(config.r)]
    col = _column_from_coefficients(config, i, coeffs)
    d = plan.sub.d
    transcript = RepairTranscript(f"full-{variant}", list(plan.helpers),
                                  {j: [(d, x) for x in messages[j]] for j in plan.helpers},
                                  {i: dict(enumerate(col))})
    report = _report(f"full-{variant}", config, plan.helpers,
                     {j: len(messages[j]) for j in plan.helpers},
                     {j: d for j in plan.helpers},
                     cutset_locality(len(plan.helpers), config.m1, config.r))
    return col, transcript, report


def repair_partial_single(config: CodeConfig, columns: Mapping[int, Sequence], i: int,
                          erased: Sequence[int], variant: str = "auto",
                          helpers: Sequence[int] | None = None, rng_seed: int = 0,
                          packing: str = "auto"):
    """Rebuild the erased entries of column i when |E| >= delta.

    Only the |E| - delta + 1 lowest coefficient rows are fetched; the other
    coefficients follow from the rack's own survivors.  Packings:

    - ``"cross-ratio"``: each needed row is repaired over the subfield of
      index w* = (L - delta + 1) / gcd(w_i, L - delta + 1) from w* + m1 - 1
      helpers, one subfield symbol per helper and row (w* <= 2 only);
    - ``"padded"``: trace repair to the rack's helper subfield with r / gcd(w_i, r)
      rows packed, zero rows padding the unneeded ones;
    - ``"reduced"``: trace repair packing only the needed rows, fewer helpers;
    - ``"auto"``: cross-ratio when its hypotheses hold, else padded.
    """
    F = config.field
    L = config.L
    erased = sorted(set(erased))
    if any(not 0 <= p < L for p in erased):
        raise RepairError("erased position out of range")
    if len(erased) < config.delta:
        raise RepairError(f"{len(erased)} erasures is below delta={config.delta}; use local repair")
    need = len(erased) - config.delta + 1
    if packing in ("auto", "cross-ratio"):
        try:
            plan = plan_cross_ratio(config, i, helpers)
        except HypothesisError:
            if packing == "cross-ratio":
                raise
            packing = "padded"
        else:
            return _repair_cross_ratio(config, columns, i, erased, need, plan)
    if packing == "padded":
        width = config.r
    elif packing == "reduced":
        width = need
    else:
        raise ValueError("packing must be 'auto', 'cross-ratio', 'padded' or 'reduced'")
    if config.tower is None:
        raise HypothesisError("configuration has no helper subfields")
    wi = config.w_i(i)
    if variant == "auto":
        variant = "II" if wi % w_star(width, wi) == 0 else "I"
    plan = plan_trace_repair(config, i, range(need), variant, helpers, rng_seed, width)
    _available(columns, plan.helpers)
    messages = {j: trace_helper_message(plan, j, columns[j]) for j in plan.helpers}
    low = trace_collect(plan, messages)
    coeffs = _complete_coefficients(config, i, columns.get(i), erased, low)
    col = _column_from_coefficients(config, i, coeffs)
    d = plan.sub.d
    scheme = f"partial-{variant}"
    transcript = RepairTranscript(scheme, list(plan.helpers),
                                  {j: [(d, x) for x in messages[j]] for j in plan.helpers},
                                  {i: {p: col[p] for p in erased}})
    report = _report(scheme, config, plan.helpers, {j: len(messages[j]) for j in plan.helpers},
                     {j: d for j in plan.helpers},
                     partial_cutset(len(plan.helpers), config.m1, len(erased), config.delta))
    return {p: col[p] for p in erased}, transcript, report


@dataclass
class CrossRatioPlan:
    """Dual-codeword repair of one coefficient row over a subfield of index t <= 2.

    For t = 2 the check polynomials are p1 = (x - y_a)(y_b - y_c) and
    p2 = (x - y_c)(y_b - y_a), whose ratio is the Mobius map sending the
    helper class values y_a, y_b, y_c to 0, 1, infinity.  At every helper the
    two values are subfield multiples of one element theta_j, so a single
    subfield trace per helper suffices; at the failed rack the ratio is a
    cross-ratio, and the two values are independent over the subfield
    exactly when it lies outside it.
    """

    config: CodeConfig
    i: int
    t: int
    sub: object  # subfield of index t
    helpers: tuple
    theta: dict  # helper -> raw weight theta_j * lambda_j
    coef: dict  # helper -> (b_j1, ..., b_jt) raw subfield elements
    dual: tuple  # trace-dual basis of the failed rack's weights


def plan_cross_ratio(config: CodeConfig, i: int,
                     helpers: Sequence[int] | None = None) -> CrossRatioPlan:
    F = config.field
    if config.tower is None:
        raise HypothesisError("configuration has no helper subfields")
    t = w_star(config.L - config.delta + 1, config.w_i(i))
    if t > 2:
        raise HypothesisError(f"cross-ratio repair covers subfield index at most 2, got {t}")
    if F.degree % t:
        raise HypothesisError(f"the field has no subfield of index {t}")
    D = t + config.m1 - 1
    if helpers is None:
        helpers = [j for j in range(config.m) if j != i][:D]
    helpers = tuple(sorted(helpers))
    if len(helpers) != D or i in helpers or len(set(helpers)) != D:
        raise RepairError(f"need {D} distinct helper racks other than {i}")
    sub = subfield(F, F.degree // t)
    y = config.ys
    S = helpers + (i,)
    lam = {}
    for j in S:
        prod = F.one
        for l in S:
            if l != j:
                prod = F.mul(prod, F.sub(y[j], y[l]))
        lam[j] = F.inv(prod)
    if t == 1:
        polys = [[F.one]]
    else:
        a, b, c = helpers[:3]
        polys = [[F.neg(F.mul(y[a], F.sub(y[b], y[c]))), F.sub(y[b], y[c])],
                 [F.neg(F.mul(y[c], F.sub(y[b], y[a]))), F.sub(y[b], y[a])]]
    theta, coef = {}, {}
    for j in helpers:
        vals = [_upoly.evaluate(F, p, y[j]) for p in polys]
        base = next(v for v in vals if v != F.zero)
        ratios = [F.mul(v, F.inv(base)) for v in vals]
        if not all(sub.contains_raw(v) for v in ratios):
            raise HypothesisError(f"helper {j}: check values are not subfield multiples "
                                  "of one element")
        theta[j] = F.mul(base, lam[j])
        coef[j] = tuple(sub.project_raw(v) for v in ratios)
    weights = [F.mul(lam[i], _upoly.evaluate(F, p, y[i])) for p in polys]
    try:
        dual = dual_basis_raw(sub, weights)
    except ValueError:
        raise HypothesisError("the cross-ratio at the failed rack lies in the subfield") from None
    return CrossRatioPlan(config, i, t, sub, helpers, theta, coef, tuple(dual))


def cross_ratio_helper_message(plan: CrossRatioPlan, j: int, column: Sequence, rows: int) -> list:
    """One subfield symbol per needed row, from helper j's own column."""
    F = plan.config.field
    coeffs = column_coefficients_raw(plan.config, j, column)
    return [plan.sub.trace_raw(F.mul(plan.theta[j], coeffs[k])) for k in range(rows)]


def cross_ratio_collect(plan: CrossRatioPlan, messages: Mapping[int, Sequence], rows: int) -> dict:
    F = plan.config.field
    sub = plan.sub
    out = {}
    for k in range(rows):
        value = F.zero
        for s, dual in enumerate(plan.dual):
            acc = sub.small.zero
            for j in plan.helpers:
                acc = sub.small.add(acc, sub.small.mul(plan.coef[j][s], messages[j][k]))
            value = F.add(value, F.mul(sub.embed_raw(sub.small.neg(acc)), dual))
        out[k] = value
    return out


def _repair_cross_ratio(config, columns, i, erased, need, plan):
    _available(columns, plan.helpers)
    messages = {j: cross_ratio_helper_message(plan, j, columns[j], need) for j in plan.helpers}
    low = cross_ratio_collect(plan, messages, need)
    coeffs = _complete_coefficients(config, i, columns.get(i), erased, low)
    col = _column_from_coefficients(config, i, coeffs)
    d = plan.sub.d
    scheme = "partial-cross-ratio"
    transcript = RepairTranscript(scheme, list(plan.helpers),
                                  {j: [(d, x) for x in messages[j]] for j in plan.helpers},
                                  {i: {p: col[p] for p in erased}})
    report = _report(scheme, config, plan.helpers, {j: need for j in plan.helpers},
                     {j: d for j in plan.helpers},
                     partial_cutset(len(plan.helpers), config.m1, len(erased), config.delta))
    return {p: col[p] for p in erased}, transcript, report


def _complete_coefficients(config: CodeConfig, i: int, column, erased: Sequence[int],
                           known: Mapping[int, object]) -> list:
    """All r coefficients of rack i given some of them and the survivors."""
    F = config.field
    L, r = config.L, config.r
    erased = set(erased)
    survivors = [p for p in range(L) if p not in erased]
    unknown = [k for k in range(r) if k not in known]
    if len(unknown) > len(survivors):
        raise RepairError("not enough survivors to complete the rack polynomial")
    if column is None and survivors:
        raise RepairError("survivor values of the target rack are missing")
    rows, rhs = [], []
    for p in survivors:
        x = config.roots[i][p]
        val = F.coerce(column[p])
        pw = F.one
        row = []
        for k in range(r):
            if k in known:
                val = F.sub(val, F.mul(known[k], pw))
            else:
                row.append(pw)
            pw = F.mul(pw, x)
        rows.append(row)
        rhs.append(val)
    sol = _upoly.solve_linear(F, rows[:len(unknown)], rhs[:len(unknown)]) if unknown else []
    coeffs = []
    it = iter(sol)
    for k in range(r):
        coeffs.append(known[k] if k in known else next(it))
    for row, b in zip(rows[len(unknown):], rhs[len(unknown):]):
        acc = F.zero
        for c, s in zip(row, sol):
            acc = F.add(acc, F.mul(c, s))
        if acc != b:
            raise RepairError(f"survivors of rack {i} are inconsistent")
    return coeffs


# ---------------------------------------------------------------------------
# Several racks with partial erasures


@dataclass
class MultiPlan:
    config: CodeConfig
    pattern: ErasurePattern
    helpers: tuple
    needed: dict  # failed rack -> coefficient rows to fetch
    theta: tuple
    weights: dict  # (v, helper) -> host raw tr(alpha_v Lambda(y_t))
    dual: tuple  # dual basis beta_v of alpha_v
    P: dict  # failed rack -> prod over other failed racks (y_i - y_s)

    @property
    def M(self) -> int:
        return sum(len(v) for v in self.needed.values())


def plan_multi_partial(config: CodeConfig, pattern: ErasurePattern) -> MultiPlan:
    F = config.field
    sub = config.common_subfield
    if sub is None:
        raise HypothesisError("configuration has no common subfield")
    pattern.validate(config)
    tau = pattern.tau
    ratio = F.q // sub.small.q
    if config.m2 < tau * ratio:
        raise HypothesisError(f"need m2 >= tau q / q1 = {tau * ratio}, got m2={config.m2}")
    for i in pattern.racks:
        if len(pattern.erased[i]) < config.delta:
            raise RepairError(f"rack {i} has fewer than delta={config.delta} erasures; "
                              "repair it locally first")
    failed = pattern.racks
    helpers = tuple(j for j in range(config.m) if j not in pattern.erased)
    ys = config.ys
    needed = {i: tuple(range(config.L - len(pattern.erased[i]), config.r)) for i in failed}
    theta = dual_multipliers_raw(GrsCode(F, config.m1, ys))
    ell = sub.index
    alphas = [F.one]
    gen = F.generator.value
    for _ in range(1, ell):
        alphas.append(F.mul(alphas[-1], gen))
    dual = dual_basis_raw(sub, alphas)
    weights = {}
    for t in helpers:
        lam = F.one
        for s in failed:
            lam = F.mul(lam, F.sub(ys[t], ys[s]))
        for v, a in enumerate(alphas):
            weights[(v, t)] = sub.trace_image(F.mul(a, lam))
    P = {}
    for i in failed:
        acc = F.one
        for s in failed:
            if s != i:
                acc = F.mul(acc, F.sub(ys[i], ys[s]))
        P[i] = acc
    return MultiPlan(config, pattern, helpers, needed, tuple(theta), weights, tuple(dual), P)


def multi_helper_message(plan: MultiPlan, t: int, column: Sequence) -> list:
    """tr(-theta_t H_j(y_t) / (y_t - y_i)) for every failed rack i and needed row j."""
    config = plan.config
    F = config.field
    sub = config.common_subfield
    H = column_coefficients_raw(config, t, column)
    yt = config.ys[t]
    out = []
    for i in plan.pattern.racks:
        scale = F.neg(F.div(plan.theta[t], F.sub(yt, config.ys[i])))
        for j in plan.needed[i]:
            out.append(sub.trace_raw(F.mul(scale, H[j])))
    return out


def multi_collect(plan: MultiPlan, messages: Mapping[int, Sequence]) -> dict:
    """H_j(y_i) for every failed rack i and needed row j."""
    config = plan.config
    F = config.field
    sub = config.common_subfield
    ell = sub.index
    images = {t: [sub.embed_raw(x) for x in messages[t]] for t in plan.helpers}
    out = {}
    slot = 0
    for i in plan.pattern.racks:
        denom = F.inv(F.mul(plan.theta[i], plan.P[i]))
        rows = {}
        for j in plan.needed[i]:
            X = F.zero
            for v in range(ell):
                # tr(alpha_v theta_i P_i H_j(y_i)) = sum_t tr(alpha_v Lambda(y_t)) * message
                acc = F.zero
                for t in plan.helpers:
                    acc = F.add(acc, F.mul(plan.weights[(v, t)], images[t][slot]))
                X = F.add(X, F.mul(acc, plan.dual[v]))
            rows[j] = F.mul(X, denom)
            slot += 1
        out[i] = rows
    return out


def repair_multi_partial(config: CodeConfig, columns: Mapping[int, Sequence],
                         pattern: ErasurePattern):
    """Repair partial erasures in several racks from every other rack.

    Each helper sends M = sum_i (|E_i| - delta + 1) symbols of the common
    subfield.  Returns ({rack: {position: raw}}, transcript, report).
    """
    plan = plan_multi_partial(config, pattern)
    _available(columns, plan.helpers)
    messages = {t: multi_helper_message(plan, t, columns[t]) for t in plan.helpers}
    rows = multi_collect(plan, messages)
    recovered = {}
    for i in pattern.racks:
        erased = sorted(pattern.erased[i])
        coeffs = _complete_coefficients(config, i, columns.get(i), erased, rows[i])
        col = _column_from_coefficients(config, i, coeffs)
        recovered[i] = {p: col[p] for p in erased}
    d = config.common_subfield.d
    transcript = RepairTranscript("multi-partial", list(plan.helpers),
                                  {t: [(d, x) for x in messages[t]] for t in plan.helpers},
                                  recovered)
    bound = None
    if pattern.tau == 1:
        (e,) = pattern.sizes()
        bound = partial_cutset(len(plan.helpers), config.m1, e, config.delta)
    report = _report("multi-partial", config, plan.helpers,
                     {t: len(messages[t]) for t in plan.helpers},
                     {t: d for t in plan.helpers}, bound)
    return recovered, transcript, report


# ---------------------------------------------------------------------------
# Reduction to repairing the outer Reed-Solomon rows


class NaiveGrsPlugin:
    """Repairs GRS erasures by downloading whole symbols from D >= dimension helpers."""

    name = "naive"

    def __init__(self, tau: int, D: int):
        self.tau = tau
        self.D = D

    def helper_message(self, code: GrsCode, failed: Sequence[int], j: int, symbol) -> list:
        return [(code.field.degree, symbol)]

    def collect(self, code: GrsCode, failed: Sequence[int], messages: Mapping[int, list]) -> dict:
        if len(messages) < code.dimension:
            raise RepairError(f"naive repair needs {code.dimension} helpers")
        f = grs_erasure_decode_raw(code, [(j, m[0][1]) for j, m in sorted(messages.items())])
        F = code.field
        return {i: F.mul(code.multipliers[i], _upoly.evaluate(F, f, code.locators[i]))
                for i in failed}


def repair_via_grs_plugin(config: CodeConfig, columns: Mapping[int, Sequence],
                          pattern: ErasurePattern, helpers: Sequence[int], plugin):
    """Repair uniform partial erasures by one GRS repair per needed coefficient row."""
    F = config.field
    pattern.validate(config)
    sizes = set(pattern.sizes())
    if len(sizes) != 1:
        raise RepairError("the reduction needs the same number of erasures in every failed rack")
    (wbar,) = sizes
    if wbar < config.delta:
        raise RepairError("fewer than delta erasures; use local repair")
    helpers = tuple(sorted(helpers))
    if plugin.tau != pattern.tau or plugin.D != len(helpers):
        raise RepairError(f"plugin is built for tau={plugin.tau}, D={plugin.D}; "
                          f"pattern has tau={pattern.tau}, D={len(helpers)}")
    if set(helpers) & set(pattern.erased):
        raise RepairError("a failed rack cannot help")
    _available(columns, helpers)
    failed = pattern.racks
    code = GrsCode(F, config.m1, config.ys)
    need = wbar - config.delta + 1
    coeffs = {j: column_coefficients_raw(config, j, columns[j]) for j in helpers}
    known = {i: {} for i in failed}
    messages = {j: [] for j in helpers}
    for row in range(need):
        msgs = {j: plugin.helper_message(code, failed, j, coeffs[j][row]) for j in helpers}
        for j in helpers:
            messages[j].extend(msgs[j])
        got = plugin.collect(code, failed, msgs)
        for i in failed:
            known[i][row] = got[i]
    recovered = {}
    for i in failed:
        erased = sorted(pattern.erased[i])
        full = _complete_coefficients(config, i, columns.get(i), erased, known[i])
        col = _column_from_coefficients(config, i, full)
        recovered[i] = {p: col[p] for p in erased}
    transcript = RepairTranscript(f"grs-{plugin.name}", list(helpers),
                                  {j: messages[j] for j in helpers}, recovered)
    bound = None
    if pattern.tau == 1 and len(helpers) >= config.m1:
        bound = partial_cutset(len(helpers), config.m1, wbar, config.delta)
    report = _report(f"grs-{plugin.name}", config, helpers,
                     {j: len(messages[j]) for j in helpers},
                     {j: messages[j][0][0] if messages[j] else F.degree for j in helpers}, bound)
    return recovered, transcript, report
