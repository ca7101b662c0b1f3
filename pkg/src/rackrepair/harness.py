"""Rack-aware cluster simulator: stripes, erasure events, repair dispatch, traffic metering."""

from __future__ import annotations

import csv
import io
import math
import random
import time
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Sequence

from .repair import (ErasurePattern, NaiveGrsPlugin, RepairError, repair_full_rack,
                     repair_multi_partial, repair_partial_single, repair_via_grs_plugin)
from .tamo_barg import CodeConfig, encode_raw, local_repair_column, named_instance

__all__ = [
    "ClusterState",
    "ExperimentRow",
    "VerificationError",
    "OpenProblemError",
    "symbol_bits",
    "chunk_bytes",
    "pack_bytes",
    "unpack_symbols",
    "cluster_encode",
    "inject",
    "run_repair",
    "verify_against_shadow",
    "read_back",
    "bench",
    "rows_to_csv",
    "CSV_COLUMNS",
    "DEFAULT_MATRIX",
]


class VerificationError(AssertionError):
    """Repaired data disagrees with the ground truth."""


class OpenProblemError(RepairError):
    """No scheme covers the pattern (several fully failed racks)."""


def symbol_bits(config: CodeConfig) -> int:
    """Payload bits per symbol: floor(log2 q), so every bit pattern is a field element."""
    q = config.field.q
    return q.bit_length() - 1


def chunk_bytes(config: CodeConfig) -> int:
    """Smallest byte count that fills a whole number of stripes."""
    stripe_bits = symbol_bits(config) * config.k
    return math.lcm(stripe_bits, 8) // 8


def pack_bytes(config: CodeConfig, data: bytes, pad: bool = False) -> list[list]:
    """Split data into stripes of k symbols, big-endian bit order.

    Without ``pad`` the length must be a multiple of :func:`chunk_bytes`;
    with it the last stripe is zero-filled.
    """
    b = symbol_bits(config)
    k = config.k
    stripe_bits = b * k
    nbits = 8 * len(data)
    if not pad and nbits % stripe_bits:
        raise ValueError(f"data length must be a multiple of {chunk_bytes(config)} bytes "
                         f"(stripes of {k} symbols x {b} bits), got {len(data)} bytes")
    nstripes = -(-nbits // stripe_bits)
    total = nstripes * stripe_bits
    value = int.from_bytes(data, "big") << (total - nbits) if data else 0
    symbols = []
    for s in range(nstripes * k - 1, -1, -1):
        symbols.append((value >> (s * b)) & ((1 << b) - 1))
    F = config.field
    return [[F.coerce(v) for v in symbols[i * k:(i + 1) * k]] for i in range(nstripes)]


def unpack_symbols(config: CodeConfig, stripes: Sequence[Sequence], length: int) -> bytes:
    b = symbol_bits(config)
    value = 0
    count = 0
    for stripe in stripes:
        for v in stripe:
            value = (value << b) | int(v)
            count += b
    nbits = 8 * length
    if nbits > count:
        raise ValueError("not enough symbols for the recorded length")
    return (value >> (count - nbits)).to_bytes(length, "big") if length else b""


@dataclass
class ExperimentRow:
    instance: str
    seed: int
    event: str
    scheme: str
    tau: int
    sizes: tuple
    D: int
    helpers: tuple
    subfield_symbols: int
    total: Fraction
    bound: Fraction | None
    optimal: bool
    wall_clock: float = 0.0

    def as_csv(self, timing: bool = False) -> list:
        out = [self.instance, self.seed, self.event, self.scheme, self.tau,
               " ".join(map(str, self.sizes)), self.D, " ".join(map(str, self.helpers)),
               self.subfield_symbols, _frac(self.total),
               "" if self.bound is None else _frac(self.bound), str(self.optimal).lower()]
        if timing:
            out.append(f"{self.wall_clock:.6f}")
        return out

    def to_json(self) -> dict:
        return {"instance": self.instance, "seed": self.seed, "event": self.event,
                "scheme": self.scheme, "tau": self.tau, "sizes": list(self.sizes), "D": self.D,
                "helpers": list(self.helpers), "subfield_symbols": self.subfield_symbols,
                "total": _frac(self.total),
                "bound": None if self.bound is None else _frac(self.bound),
                "optimal": self.optimal}


CSV_COLUMNS = ["instance", "seed", "event", "scheme", "tau", "sizes", "D", "helpers",
               "subfield_symbols", "total", "bound", "optimal"]


def _frac(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


@dataclass
class ClusterState:
    """Live symbol grid per stripe; None marks an erased cell.

    ``shadow`` holds the encoded truth for verification only; repair code is
    handed ``stripes`` and never the shadow.
    """

    config: CodeConfig
    stripes: list  # stripe -> rack -> list of raw or None
    length: int
    shadow: list = dc_field(repr=False, default_factory=list)
    log: list = dc_field(default_factory=list)
    traffic: Fraction = Fraction(0)

    def erased(self) -> dict:
        """rack -> erased positions (events apply to every stripe alike)."""
        out = {}
        if not self.stripes:
            return out
        for i, col in enumerate(self.stripes[0]):
            e = [p for p, v in enumerate(col) if v is None]
            if e:
                out[i] = e
        return out

    def to_json(self) -> dict:
        F = self.config.field
        enc = lambda v: None if v is None else F.to_json_raw(v)
        return {
            "config": self.config.to_json(),
            "length": self.length,
            "stripes": [[[enc(v) for v in col] for col in s] for s in self.stripes],
            "shadow": [[[enc(v) for v in col] for col in s] for s in self.shadow],
            "log": self.log,
            "traffic": _frac(self.traffic),
        }

    @classmethod
    def from_json(cls, data: dict) -> "ClusterState":
        config = CodeConfig.from_json(data["config"])
        F = config.field
        dec = lambda v: None if v is None else F.from_json_raw(v)
        return cls(config,
                   [[[dec(v) for v in col] for col in s] for s in data["stripes"]],
                   int(data["length"]),
                   [[[dec(v) for v in col] for col in s] for s in data["shadow"]],
                   list(data.get("log", [])), Fraction(data.get("traffic", "0")))


def cluster_encode(config: CodeConfig, data: bytes, pad: bool = False) -> ClusterState:
    messages = pack_bytes(config, data, pad)
    stripes, shadow = [], []
    for a in messages:
        cw, _ = encode_raw(config, a)
        stripes.append([list(col) for col in cw.columns])
        shadow.append([list(col) for col in cw.columns])
    state = ClusterState(config, stripes, len(data), shadow)
    state.log.append({"op": "encode", "bytes": len(data), "stripes": len(stripes)})
    return state


def read_back(state: ClusterState) -> bytes:
    """Decode the information symbols from the live grid (requires no erasures there)."""
    config = state.config
    msgs = []
    for s in state.stripes:
        a = []
        for i in range(config.m1):
            for j in range(config.r):
                v = s[i][j]
                if v is None:
                    raise ValueError("information symbol is erased; repair first")
                a.append(v)
        msgs.append(a)
    return unpack_symbols(config, msgs, state.length)


def inject(state: ClusterState, event: dict) -> ClusterState:
    """Erase cells: {"rack": i}, {"rack": i, "positions": [...]} or {"pattern": {i: [...]}}."""
    L = state.config.L
    if "pattern" in event:
        pattern = {int(i): list(p) for i, p in event["pattern"].items()}
    elif "rack" in event:
        pos = event.get("positions")
        pattern = {int(event["rack"]): list(range(L)) if pos is None else list(pos)}
    else:
        raise ValueError("event needs 'rack' or 'pattern'")
    for i, pos in pattern.items():
        if not 0 <= i < state.config.m:
            raise ValueError(f"rack {i} out of range")
        for p in pos:
            if not 0 <= p < L:
                raise ValueError(f"position {p} out of range")
            for s in state.stripes:
                if s[i][p] is None:
                    raise ValueError(f"cell (rack {i}, position {p}) is already erased")
    for i, pos in pattern.items():
        for s in state.stripes:
            for p in pos:
                s[i][p] = None
    state.log.append({"op": "inject", "pattern": {str(i): sorted(p) for i, p in pattern.items()}})
    return state


def verify_against_shadow(state: ClusterState) -> None:
    for si, (live, truth) in enumerate(zip(state.stripes, state.shadow)):
        for i, (col, tcol) in enumerate(zip(live, truth)):
            for p, (v, t) in enumerate(zip(col, tcol)):
                if v is not None and v != t:
                    raise VerificationError(f"stripe {si}, rack {i}, position {p} differs "
                                            "from the encoded data")


SCHEMES = ("auto", "full-I", "full-II", "partial", "partial-cross-ratio", "partial-padded",
           "partial-reduced", "multi-partial", "naive")


def _pick_scheme(config: CodeConfig, erased: dict) -> str:
    full = [i for i, e in erased.items() if len(e) == config.L]
    if len(full) > 1:
        raise OpenProblemError("several fully failed racks: optimal repair of multiple rack "
                               "erasures is an open problem and no scheme applies")
    if len(erased) == 1:
        (i,) = erased
        if config.tower is not None:
            return "full" if full else "partial"
    if config.common_subfield is not None:
        ratio = config.field.q // config.common_subfield.small.q
        if config.m2 >= len(erased) * ratio:
            return "multi-partial"
    if len({len(e) for e in erased.values()}) == 1:
        return "naive"
    raise RepairError("no applicable scheme for this erasure pattern")


def run_repair(state: ClusterState, policy: str = "auto", rng_seed: int = 0,
               instance: str = "", seed: int = 0, event: str = "") -> tuple[ClusterState, list[ExperimentRow]]:
    """Restore every erased cell, metering cross-rack traffic; returns report rows."""
    config = state.config
    if policy not in SCHEMES:
        raise ValueError(f"unknown scheme {policy!r}; choose from {', '.join(SCHEMES)}")
    rows = []
    erased = state.erased()
    local = {i: e for i, e in erased.items() if len(e) <= config.delta - 1}
    if local:
        start = time.perf_counter()
        for s in state.stripes:
            for i, e in local.items():
                s[i] = local_repair_column(config, i, s[i], e)
        rows.append(ExperimentRow(instance or config.name, seed, event, "local", len(local),
                                  tuple(len(local[i]) for i in sorted(local)), 0, (), 0,
                                  Fraction(0), Fraction(0), True,
                                  time.perf_counter() - start))
    cross = {i: e for i, e in erased.items() if i not in local}
    if cross:
        scheme = _pick_scheme(config, cross) if policy == "auto" else policy
        start = time.perf_counter()
        report = None
        for s in state.stripes:
            cols = {j: s[j] for j in range(config.m)}
            if scheme.startswith("full"):
                if len(cross) != 1:
                    raise RepairError("full-rack repair handles one rack")
                (i,) = cross
                if len(cross[i]) != config.L:
                    raise RepairError("full-rack repair needs the whole rack erased")
                variant = scheme.split("-")[1] if "-" in scheme else "auto"
                col, _, report = repair_full_rack(config, cols, i, variant, rng_seed=rng_seed)
                s[i] = list(col)
            elif scheme.startswith("partial"):
                if len(cross) != 1:
                    raise RepairError("single-rack partial repair handles one rack")
                (i,) = cross
                packing = scheme.partition("-")[2] or "auto"
                rec, _, report = repair_partial_single(config, cols, i, cross[i],
                                                       rng_seed=rng_seed, packing=packing)
                for p, v in rec.items():
                    s[i][p] = v
            elif scheme == "multi-partial":
                rec, _, report = repair_multi_partial(config, cols, ErasurePattern(cross))
                for i, vals in rec.items():
                    for p, v in vals.items():
                        s[i][p] = v
            elif scheme == "naive":
                helpers = [j for j in range(config.m) if j not in cross][:config.m1]
                rec, _, report = repair_via_grs_plugin(config, cols, ErasurePattern(cross),
                                                       helpers,
                                                       NaiveGrsPlugin(len(cross), len(helpers)))
                for i, vals in rec.items():
                    for p, v in vals.items():
                        s[i][p] = v
            else:
                raise ValueError(f"unknown scheme {scheme!r}")
            state.traffic += report.total
        elapsed = time.perf_counter() - start
        if report is not None:
            rows.append(ExperimentRow(instance or config.name, seed, event, report.scheme,
                                      len(cross), tuple(len(cross[i]) for i in sorted(cross)),
                                      report.D, tuple(report.helpers),
                                      report.total_subfield_symbols, report.total, report.bound,
                                      report.optimal, elapsed))
    verify_against_shadow(state)
    state.log.append({"op": "repair", "rows": [r.to_json() for r in rows]})
    return state, rows


# ---------------------------------------------------------------------------
# Experiments

# instance -> list of events; "random" picks racks/positions from the seed
DEFAULT_MATRIX = {
    "gf13": [{"kind": "local", "size": 1}, {"kind": "partial", "size": 2},
             {"kind": "partial", "size": 3}],
    "tower210": [{"kind": "full"}, {"kind": "partial", "size": 2},
                 {"kind": "partial", "size": 3}],
    "gf64": [{"kind": "multi", "sizes": [2]}, {"kind": "multi", "sizes": [3]}],
    "gf256": [{"kind": "multi", "sizes": [4, 5]}, {"kind": "multi", "sizes": [3]}],
}


def _event_from_spec(config: CodeConfig, spec: dict, rng: random.Random) -> tuple[dict, str]:
    kind = spec["kind"]
    L = config.L
    if kind == "full":
        i = rng.randrange(config.m)
        return {"rack": i}, f"full r{i}"
    if kind in ("local", "partial"):
        i = rng.randrange(config.m)
        pos = sorted(rng.sample(range(L), spec["size"]))
        return {"rack": i, "positions": pos}, f"{kind} r{i} {pos}"
    if kind == "multi":
        racks = rng.sample(range(config.m), len(spec["sizes"]))
        pattern = {i: sorted(rng.sample(range(L), e)) for i, e in zip(racks, spec["sizes"])}
        return {"pattern": pattern}, "multi " + " ".join(f"r{i}{pattern[i]}" for i in sorted(pattern))
    raise ValueError(f"unknown event kind {kind!r}")


def bench(matrix: dict | None = None, seeds: int = 3, base_seed: int = 0,
          stripes: int = 1) -> list[ExperimentRow]:
    """Sweep instances x events x seeds; rows are ordered by (instance, event, seed)."""
    matrix = DEFAULT_MATRIX if matrix is None else matrix
    rows = []
    for name in matrix:
        config = named_instance(name)
        payload = stripes * config.k * symbol_bits(config) // 8
        for ei, spec in enumerate(matrix[name]):
            for s in range(seeds):
                seed = base_seed + s
                rng = random.Random(f"{name}/{ei}/{seed}")
                data = bytes(rng.randrange(256) for _ in range(max(payload, 1)))
                state = cluster_encode(config, data, pad=True)
                event, label = _event_from_spec(config, spec, rng)
                inject(state, event)
                _, got = run_repair(state, "auto", rng_seed=seed, instance=name, seed=seed,
                                    event=label)
                if read_back(state) != data:
                    raise VerificationError("read-back after repair differs from the input")
                rows.extend(got)
    return rows


def rows_to_csv(rows: Sequence[ExperimentRow], timing: bool = False) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS + (["wall_clock"] if timing else []))
    for r in rows:
        writer.writerow(r.as_csv(timing))
    return buf.getvalue()
