"""Command-line front end.

Exit status: 0 success, 2 usage error (bad flags, bad config file, out-of-range
parameters),
3 domain error (e.g. a rule that is not Collatz-like where one is required).

Settings resolve as: built-in defaults < ``--config FILE`` (key=value lines)
< explicit flags.  ``IVTDDS_WORKERS`` sets the worker count for table sweeps.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from dataclasses import dataclass
from typing import Optional

from . import __version__
from . import adds, analysis, dynamics, golden, ivt_core, odpe
from .errors import IvtError
from .report import FORMATS, Report

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DOMAIN = 3

TABLE_CSV_HEADER = ("A", "B", "j", "attractor", "unique_steady", "locally_stable", "globally_stable")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    p: int = 3
    j: Optional[int] = None
    k: int = 1
    variant: str = "I"
    A: int = 1
    B: int = 0
    scan_limit: Optional[int] = None
    max_iter: int = dynamics.DEFAULT_MAX_ITER
    value_cap: int = dynamics.DEFAULT_VALUE_CAP
    horizon: Optional[int] = None
    digits: int = 3
    capacity: int = 80
    radius: int = 2
    n_points: Optional[int] = None
    levels: tuple = analysis.DEFAULT_SCALE_LEVELS
    n_max: int = 1000
    strict: bool = False
    format: str = "plain"

    def resolved(self) -> "RunConfig":
        c = dataclasses.replace(self)
        if c.scan_limit is None:
            c.scan_limit = dynamics.default_scan_limit(c.p)
        if c.n_points is None:
            c.n_points = c.p**6
        if c.horizon is None:
            c.horizon = max(100, c.p**3)
        return c

    def validate(self) -> None:
        if self.p < 2:
            raise UsageError("--p must be >= 2")
        for name in ("k", "max_iter", "value_cap", "horizon", "digits", "n_max"):
            if getattr(self, name) is not None and getattr(self, name) < 1:
                raise UsageError(f"{name} must be positive")
        if self.format not in FORMATS:
            raise UsageError(f"format must be one of {', '.join(FORMATS)}")
        if str(self.variant).upper() not in ("I", "II"):
            raise UsageError("variant must be I or II")


_ALIASES = {"a": "A", "b": "B", "scan-limit": "scan_limit", "max-iter": "max_iter",
            "value-cap": "value_cap", "n-points": "n_points", "n-max": "n_max"}


def _coerce(name: str, raw: str):
    if name == "levels":
        return tuple(int(v) for v in raw.replace(",", " ").split())
    if name in ("variant", "format"):
        return raw.strip()
    if name == "strict":
        return raw.strip().lower() in ("1", "true", "yes", "on")
    return int(raw)


def read_config_file(path: str) -> dict:
    fields = {f.name for f in dataclasses.fields(RunConfig)}
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise UsageError(f"cannot read config file: {e}") from None
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{n}: expected key=value")
        key, val = (s.strip() for s in line.split("=", 1))
        key = _ALIASES.get(key, key)
        if key not in fields:
            raise UsageError(f"{path}:{n}: unknown key {key!r}")
        try:
            out[key] = _coerce(key, val)
        except ValueError:
            raise UsageError(f"{path}:{n}: bad value for {key}: {val!r}") from None
    return out


def build_config(ns: argparse.Namespace) -> RunConfig:
    values = {}
    if getattr(ns, "config", None):
        values.update(read_config_file(ns.config))
    for f in dataclasses.fields(RunConfig):
        v = getattr(ns, f.name, None)
        if v is not None:
            values[f.name] = tuple(v) if f.name == "levels" else v
    cfg = RunConfig(**values)
    cfg.validate()
    return cfg.resolved()


def _need_j(cfg: RunConfig) -> int:
    if cfg.j is None:
        raise UsageError("--j is required")
    return cfg.j


def _spec(cfg: RunConfig) -> adds.AddsSpec:
    return adds.AddsSpec(adds.Variant.parse(cfg.variant), cfg.p, _need_j(cfg), cfg.A, cfg.B)


def _fmt_frac(q) -> str:
    return f"{q.numerator}/{q.denominator}" if q.denominator != 1 else str(q.numerator)


def _entries(pairs) -> str:
    return golden.fmt_entries(pairs) or "-"


# -- command handlers; each returns (payload, plain lines, optional csv) -------

def cmd_apply(cfg, ns):
    j = _need_j(cfg)
    xs = ns.x
    k = len(xs) if ns.k is None and len(xs) > 1 else cfg.k
    r = ivt_core.rule_from_index(cfg.p, k, j)
    value = ivt_core.apply(r, xs[0]) if k == 1 and len(xs) == 1 else ivt_core.apply_k(r, xs)
    payload = {"p": cfg.p, "k": k, "j": j, "inputs": xs, "value": value,
               "input_digits": [str(ivt_core.digits_of(x, cfg.p)) for x in xs],
               "output_digits": str(ivt_core.digits_of(value, cfg.p))}
    return payload, [str(value)], None


def cmd_rule(cfg, ns):
    j = _need_j(cfg)
    r = ivt_core.rule_from_index(cfg.p, cfg.k, j)
    slots = []
    for t, d in enumerate(r.table):
        args, v = [], t
        for _ in range(cfg.k):
            v, a = divmod(v, cfg.p)
            args.append(a)
        slots.append((args, d))
    if cfg.k == 1:
        lines = [f"{a[0]} -> {d}" for a, d in slots]
        rows = [(a[0], d) for a, d in slots]
        header = ("digit", "image")
    else:
        lines = [f"{tuple(a)} -> {d}" for a, d in slots]
        rows = [(" ".join(map(str, a)), d) for a, d in slots]
        header = ("args", "image")
    payload = {"p": cfg.p, "k": cfg.k, "j": j, "table": list(r.table),
               "zero_preimages": r.zero_preimages()}
    return payload, lines, (header, rows)


def cmd_digits(cfg, ns):
    d = ivt_core.digits_of(ns.x, cfg.p)
    return {"p": cfg.p, "x": ns.x, "digits": list(d.digits)}, ["".join(map(str, d.digits))], None


def cmd_value(cfg, ns):
    text = ns.digit_string
    try:
        digits = [int(c) for c in (text.replace(",", " ").split() if "," in text or " " in text else text)]
    except ValueError:
        raise UsageError(f"not a digit string: {text!r}") from None
    v = ivt_core.value_of(digits, cfg.p)
    return {"p": cfg.p, "digits": digits, "value": v}, [str(v)], None


def _orbit_step(cfg, ns):
    if ns.variant is None and ns.A is None and ns.B is None:
        return dynamics.ivt_step(cfg.p, _need_j(cfg)), None
    spec = _spec(cfg)
    return spec, spec


def cmd_orbit(cfg, ns):
    step, spec = _orbit_step(cfg, ns)
    o = dynamics.iterate_orbit(step, ns.start, cfg.max_iter, cfg.value_cap)
    payload = {"system": spec.label() if spec else f"IVT_{cfg.j}^({cfg.p},1)",
               "orbit": o}
    if o.converged:
        line = " ".join(map(str, o.transient)) + " | cycle: " + " ".join(map(str, o.cycle))
        payload["attractor"] = dynamics.attractor_of(o)
    else:
        line = " ".join(map(str, o.transient)) + f" | {o.status.value}"
    rows = [(i, v, "transient") for i, v in enumerate(o.transient)]
    rows += [(len(o.transient) + i, v, "cycle") for i, v in enumerate(o.cycle)]
    return payload, [line], (("index", "value", "phase"), rows)


def cmd_classify(cfg, ns):
    if ns.variant is None and ns.A is None and ns.B is None:
        v = dynamics.classify_collatz_like(cfg.p, _need_j(cfg), cfg.scan_limit, cfg.max_iter, cfg.strict)
        system = f"IVT_{cfg.j}^({cfg.p},1)"
    else:
        spec = _spec(cfg)
        v = adds.classify_adds(spec, cfg.scan_limit, cfg.max_iter, cfg.value_cap, cfg.strict)
        system = spec.label()
    if v.is_collatz_like:
        a = v.attractor
        line = f"{system}: Collatz-like, attractor {a.representative} (cycle {' '.join(map(str, a.cycle))})"
    else:
        line = f"{system}: not Collatz-like (witness {v.witness}: {v.witness_reason})"
    line += f" [checked 0..{cfg.scan_limit}]"
    return {"system": system, "verdict": v}, [line], None


def cmd_enumerate(cfg, ns):
    c = dynamics.enumerate_collatz_like(cfg.p, cfg.scan_limit, cfg.max_iter, cfg.strict)
    warnings = []
    if c.count != c.claimed_count_minus_one:
        warnings.append(f"measured count {c.count} contradicts the (p^(p-1) - 1) = "
                        f"{c.claimed_count_minus_one} claim")
    if c.count != c.claimed_count:
        warnings.append(f"measured count {c.count} differs from p^(p-1) = {c.claimed_count}")
    payload = {"p": cfg.p, "rules": list(c.rules), "count": c.count,
               "p^(p-1)": c.claimed_count, "p^(p-1)-1": c.claimed_count_minus_one,
               "horizon": list(c.horizon), "strict": c.strict}
    lines = [f"Collatz-like rules (p={cfg.p}): {' '.join(map(str, c.rules))}",
             f"count {c.count}; p^(p-1) = {c.claimed_count}; p^(p-1)-1 = {c.claimed_count_minus_one}"]
    return payload, lines, (("j",), [(j,) for j in c.rules]), warnings


def cmd_steady(cfg, ns):
    s = adds.steady_states(_spec(cfg), cfg.scan_limit)
    pts = " ".join(map(str, s.steady_points)) or "none"
    line = f"{s.spec.label()}: steady states {pts} in 0..{s.search_bound}" + (" (unique)" if s.unique else "")
    return {"report": s, "unique": s.unique}, [line], (("steady_point",), [(v,) for v in s.steady_points])


def cmd_stability(cfg, ns):
    spec = _spec(cfg)
    points = [ns.point] if ns.point is not None else list(adds.steady_states(spec, cfg.scan_limit).steady_points)
    g = adds.global_stability(spec, cfg.scan_limit)
    lines = [f"{spec.label()}: global max quotient {_fmt_frac(g.max_quotient)} at {g.max_pair} -> "
             f"{'globally stable' if g.stable else 'not globally stable'}"]
    locals_ = []
    for pt in points:
        loc = adds.local_stability(spec, pt, cfg.radius)
        locals_.append(loc)
        lines.append(f"  steady {pt}: local max quotient {_fmt_frac(loc.max_quotient)} "
                     f"(radius {loc.radius}, pair {loc.witness}) -> "
                     f"{'locally stable' if loc.stable else 'not locally stable'}")
    if not points:
        lines.append("  no steady state in range")
    payload = {"system": spec.label(), "global": g, "globally_stable": g.stable,
               "local": [{"report": loc, "stable": loc.stable} for loc in locals_]}
    return payload, lines, None


def cmd_contraction(cfg, ns):
    r = adds.is_contraction(cfg.p, _need_j(cfg), cfg.scan_limit)
    lines = [f"contraction: {'true' if r.is_contraction else 'false'}",
             f"max quotient {_fmt_frac(r.max_quotient)} at {r.max_pair}"]
    if r.witness:
        lines.append(f"witness {r.witness} with quotient {_fmt_frac(r.witness_quotient)}")
    return {"result": r}, lines, None


def cmd_correspondence(cfg, ns):
    if ns.sweep:
        rows, lines, violations = [], [], 0
        for var in (adds.Variant.TYPE_I,):
            table = adds.attractor_table(cfg.p, var, _rows(cfg, ns), cfg.scan_limit, cfg.max_iter,
                                         cfg.value_cap, cfg.radius)
            for row in table.rows:
                for j, _ in row.attractors:
                    rec = adds.verify_type_correspondence(cfg.p, j, row.mul, row.add, cfg.scan_limit,
                                                          cfg.max_iter, cfg.value_cap)
                    divisible = rec.predicted_type2 is not None
                    ok = rec.relation_holds if divisible else None
                    if divisible and not ok:
                        violations += 1
                    rows.append((row.mul, row.add, j, rec.type1_attractor, rec.type2_attractor,
                                 "" if ok is None else str(ok).lower()))
        lines.append(f"checked {len(rows)} Collatz-like type-I systems; violations: {violations}")
        payload = {"checked": len(rows), "violations": violations,
                   "records": [dict(zip(("A", "B", "j", "type1", "type2", "holds"), r)) for r in rows]}
        return payload, lines, (("A", "B", "j", "type1_attractor", "type2_attractor", "relation_holds"), rows)
    rec = adds.verify_type_correspondence(cfg.p, _need_j(cfg), cfg.A, cfg.B, cfg.scan_limit,
                                          cfg.max_iter, cfg.value_cap)
    line = (f"j={rec.j} A={rec.mul} B={rec.add}: type-I attractor {rec.type1_attractor}, "
            f"type-II attractor {rec.type2_attractor}, (A^-B)/A = {rec.predicted_type2} -> "
            f"{'holds' if rec.relation_holds else 'fails'}")
    return {"record": rec, "relation_holds": rec.relation_holds,
            "predicted_type2": rec.predicted_type2}, [line], None


def cmd_unique_zero(cfg, ns):
    u = adds.count_unique_zero_steady(cfg.p, cfg.scan_limit, cfg.max_iter)
    lines = [f"p={cfg.p}: {u.count} Collatz-like rules with unique steady state 0: "
             f"{' '.join(map(str, u.rules))} (p^(p-2) = {u.expected})"]
    warnings = [] if u.count == u.expected else [f"count {u.count} != p^(p-2) = {u.expected}"]
    return {"p": cfg.p, "rules": list(u.rules), "count": u.count, "expected": u.expected}, lines, None, warnings


def cmd_converse(cfg, ns):
    sw = adds.converse_sweep(cfg.p, cfg.scan_limit, cfg.max_iter, cfg.value_cap)
    lines = [f"p={cfg.p}: {sw.checked} type-II Collatz-like systems checked; "
             f"{len(sw.witnesses)} converse witnesses ({len(sw.non_degenerate)} with a >= 1)"]
    w = sw.first
    if w:
        lines.append(f"witness: j={w.j} a={w.mul} b={w.add}, type-II attractor {w.type2_attractor}: {w.reason}")
    rows = [(w.j, w.mul, w.add, w.type2_attractor, w.reason) for w in sw.witnesses]
    payload = {"p": cfg.p, "checked": sw.checked, "witness_count": len(sw.witnesses),
               "non_degenerate_count": len(sw.non_degenerate), "first": w}
    return payload, lines, (("j", "a", "b", "type2_attractor", "reason"), rows)


def _rows(cfg, ns):
    if getattr(ns, "rows", None):
        out = []
        for tok in ns.rows:
            try:
                m, a = (int(v) for v in tok.split(","))
            except ValueError:
                raise UsageError(f"bad --rows entry {tok!r}; expected A,B") from None
            out.append((m, a))
        return out
    return adds.default_coefficients(cfg.p)


def _opt(v):
    return "" if v is None else v


def cmd_tables(cfg, ns):
    variant = adds.Variant.parse(cfg.variant)
    table = adds.attractor_table(cfg.p, variant, _rows(cfg, ns), cfg.scan_limit, cfg.max_iter,
                                 cfg.value_cap, cfg.radius)
    diffs = golden.diff_against_published(table)
    warnings = [d.message() for d in diffs]
    m, a = ("A", "B") if variant is adds.Variant.TYPE_I else ("a", "b")
    lines = [f"type-{variant.value} table, p={cfg.p}, horizon 0..{table.scan_limit}, local radius {table.radius}"]
    rows_out, rows_json = [], []
    for row in table.rows:
        lines.append(f"{m}={row.mul},{a}={row.add} | attractor: {_entries(row.attractors)} | "
                     f"unique steady: {_entries(row.unique_steady)} | "
                     f"locally stable: {_entries(row.locally_stable)} | "
                     f"globally stable: {_entries(row.globally_stable)}"
                     + (f" | diverged: {' '.join(map(str, row.diverged))}" if row.diverged else ""))
        rows_json.append({
            "mul": row.mul, "add": row.add,
            "attractor": golden.fmt_entries(row.attractors),
            "unique_steady": golden.fmt_entries(row.unique_steady),
            "locally_stable": golden.fmt_entries(row.locally_stable),
            "globally_stable": golden.fmt_entries(row.globally_stable),
            "diverged": row.diverged,
            "cells": row.cells,
        })
        for c in row.cells:
            rows_out.append((row.mul, row.add, c.j, _opt(c.attractor), _opt(c.unique_steady),
                             _opt(c.locally_stable), _opt(c.globally_stable)))
    published = cfg.p == 3
    lines.append("diff vs published table: " + ("none" if published and not diffs else
                                                  f"{len(diffs)} discrepanc{'y' if len(diffs) == 1 else 'ies'}" if published else
                                                  "no published table for this base"))
    payload = {"p": cfg.p, "variant": variant, "scan_limit": table.scan_limit, "radius": table.radius,
               "rows": rows_json,
               "published_diff": [dataclasses.asdict(d) for d in diffs] if published else None}
    return payload, lines, (TABLE_CSV_HEADER, rows_out), warnings


# -- odpe -------------------------------------------------------------------

def cmd_odpe_build(cfg, ns):
    t = odpe.build_topology(cfg.p, _need_j(cfg), cfg.digits)
    lines = [f"IVT_{t.j}^({t.p},1), {t.node_count} nodes",
             f"SCA: {t.sca}",
             f"stations: {' '.join(map(str, t.stations))}",
             f"sub-stations: {len(t.substations)}"]
    lines += [f"  {x}: {' -> '.join(map(str, t.routes[x]))}" for x in t.substations]
    edges = t.edges()
    payload = {
        "p": t.p, "j": t.j, "digits": t.digits, "node_count": t.node_count,
        "nodes": [{"id": x, "layer": t.layer_of(x)} for x in range(t.node_count)],
        "layers": {"sca": [t.sca], "stations": list(t.stations), "substations": list(t.substations)},
        "routes": {str(x): list(t.routes[x]) for x in t.substations},
        "adjacency": {str(x): [v for u, v in edges if u == x] for x in range(t.node_count)},
    }
    rows = [(u, v, t.layer_of(u), t.layer_of(v)) for u, v in edges]
    return payload, lines, (("source", "target", "source_layer", "target_layer"), rows)


def _convention(ns) -> odpe.HopConvention:
    conv = odpe.DEFAULT_CONVENTION
    if getattr(ns, "to", None):
        conv = dataclasses.replace(conv, target=odpe.HopTarget(ns.to))
    if getattr(ns, "include_zero", False):
        conv = dataclasses.replace(conv, include_zero=True)
    return conv


def cmd_odpe_hops(cfg, ns):
    conv = _convention(ns)
    s = odpe.average_hopping(cfg.p, _need_j(cfg), cfg.horizon, conv, cfg.scan_limit)
    avg = s.average_hopping
    lines = [f"# convention: {conv.describe()}",
             f"IVT_{s.j}^({s.p},1): total hops {s.total_hops} over {len(s.per_node)} nodes, "
             f"average hopping {float(avg):.2f} ({_fmt_frac(avg)})"]
    if s.p == 3 and s.horizon == 100 and s.j in odpe.PUBLISHED_AVG_HOPS:
        pub = odpe.PUBLISHED_AVG_HOPS[s.j]
        lines.insert(1, f"# calibration: published {pub:.2f}, residual {float(avg) - pub:+.2f}")
    payload = {"p": s.p, "j": s.j, "horizon": s.horizon, "convention": conv,
               "convention_text": conv.describe(), "total_hops": s.total_hops,
               "average_hopping": avg, "per_node": dict(s.per_node)}
    return payload, lines, (("node", "hops"), sorted(s.per_node.items()))


def cmd_odpe_calibrate(cfg, ns):
    cal = odpe.calibrate_hop_convention(cfg.p, cfg.horizon)
    lines = [f"published: {odpe.PUBLISHED_AVG_HOPS}, tolerance {cal.tolerance}"]
    rows = []
    for e in cal.entries:
        mark = " <- pinned" if e is cal.best else ""
        lines.append(f"{e.convention.describe()}: "
                     + ", ".join(f"j={j} {e.averages[j]:.2f} ({e.residuals[j]:+.2f})" for j in sorted(e.averages))
                     + mark)
        for j in sorted(e.averages):
            rows.append((e.convention.target.value, int(e.convention.include_zero), j,
                         f"{e.averages[j]:.4f}", f"{e.residuals[j]:+.4f}"))
    warnings = [] if cal.matched else [
        f"no convention reproduces the published averages within {cal.tolerance}; "
        f"best residual {cal.best.worst:.2f} ({cal.best.convention.describe()})"]
    payload = {"entries": cal.entries, "best": cal.best.convention, "matched": cal.matched,
               "best_residuals": cal.best.residuals}
    return payload, lines, (("target", "include_zero", "j", "average", "residual"), rows), warnings


def cmd_odpe_best(cfg, ns):
    b = odpe.select_best_rule(cfg.p, cfg.horizon)
    lines = [f"best rule for p={b.p}: j={b.rule} (expected p^(p-1)-1 = {b.expected})",
             ("Collatz-like: " if b.p < 5 else "Collatz-like with one zero digit: ")
             + " ".join(map(str, b.collatz_like)),
             f"one-zero candidates: {' '.join(map(str, b.candidates))}"]
    lines += [f"  j={j}: average hopping {float(h):.2f}" for j, h in sorted(b.average_hops.items())]
    payload = {"p": b.p, "rule": b.rule, "expected": b.expected, "collatz_like": list(b.collatz_like),
               "candidates": list(b.candidates), "average_hops": dict(b.average_hops),
               "horizon": b.horizon, "convention": b.convention}
    warnings = [] if b.rule == b.expected else [f"selected {b.rule}, expected {b.expected}"]
    return payload, lines, None, warnings


def cmd_odpe_capacity(cfg, ns):
    c = odpe.capacity_check(cfg.p, _need_j(cfg), cfg.capacity)
    ex = " ".join(map(str, c.excluded_nodes)) or "none"
    lines = [f"capacity {c.capacity}: excluded nodes {ex}"]
    lines += [f"  {x} -> {c.overflow_images[x]}" for x in c.excluded_nodes]
    payload = {"p": c.p, "j": c.j, "capacity": c.capacity, "excluded_nodes": list(c.excluded_nodes),
               "overflow_images": dict(c.overflow_images)}
    return payload, lines, (("node", "first_image_above_capacity"),
                            [(x, c.overflow_images[x]) for x in c.excluded_nodes])


# -- analysis ---------------------------------------------------------------

def cmd_fractal(cfg, ns):
    sample = analysis.graph_points(_spec(cfg), cfg.n_points)
    fit = analysis.box_dimension(sample, cfg.levels)
    lines = [f"{sample.spec.label()}: box dimension {fit.dimension:.5f} "
             f"(levels {','.join(map(str, fit.levels))}, {len(sample.points)} points, rms residual {fit.fit_residual:.4f})"]
    lines += [f"  side {s:.6g}: {n} boxes" for s, n in zip(fit.scales, fit.counts)]
    payload = {"system": sample.spec.label(), "n_points": len(sample.points),
               "normalization": list(sample.normalization), "fit": fit}
    return payload, lines, (("scale", "count"), [(f"{s:.10g}", n) for s, n in zip(fit.scales, fit.counts)])


def cmd_graph(cfg, ns):
    sample = analysis.graph_points(_spec(cfg), cfg.n_points)
    payload = {"system": sample.spec.label(), "normalization": list(sample.normalization),
               "points": [list(pt) for pt in sample.points]}
    lines = [f"{y0} {y1}" for y0, y1 in sample.points]
    return payload, lines, (("Y0", "Y1"), list(sample.points))


def cmd_series(cfg, ns):
    s = analysis.ratio_sequence(_spec(cfg), cfg.n_max)
    lim = "none" if s.limit_estimate is None else f"{s.limit_estimate:.6f}"
    lines = [f"{s.spec.label()}: verdict {s.verdict.value}, limit estimate {lim}"]
    lo = min(100, cfg.n_max)
    spread = None
    if any(r is not None for r in s.ratios[lo:cfg.n_max + 1]):
        spread = s.spread(lo, cfg.n_max)
        lines.append(f"ratio spread over n in [{lo},{cfg.n_max}]: {spread:.6f}")
    if s.zero_terms:
        lines.append(f"zero terms: {len(s.zero_terms)}")
    payload = {"system": s.spec.label(), "verdict": s.verdict, "limit_estimate": s.limit_estimate,
               "tail_spread": s.tail_spread, "spread_100_to_nmax": spread,
               "zero_terms": list(s.zero_terms), "n_max": cfg.n_max,
               "final_ratio": s.ratios[cfg.n_max]}
    rows = [(n, s.terms[n], "" if r is None else f"{r:.12g}") for n, r in enumerate(s.ratios)]
    return payload, lines, (("n", "a_n", "ratio"), rows)


# -- parser -----------------------------------------------------------------

def _common() -> argparse.ArgumentParser:
    c = argparse.ArgumentParser(add_help=False)
    c.add_argument("--format", choices=FORMATS, help="output format (default plain)")
    c.add_argument("--config", metavar="FILE", help="key=value file overriding defaults")
    c.add_argument("--p", type=int, help="base (default 3)")
    c.add_argument("--scan-limit", dest="scan_limit", type=int, help="largest start checked (default p^5-1)")
    c.add_argument("--max-iter", dest="max_iter", type=int, help="iteration cap per orbit (default 10000)")
    c.add_argument("--value-cap", dest="value_cap", type=int, help="divergence threshold (default 1e9)")
    return c


def _system(sp, required_j=True):
    sp.add_argument("--j", type=int, required=required_j, help="rule index")
    sp.add_argument("--variant", help="ADDS type: I or II")
    sp.add_argument("--A", "--a", dest="A", type=int, help="multiplier A (type I) or a (type II)")
    sp.add_argument("--B", "--b", dest="B", type=int, help="offset B (type I) or b (type II)")


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(
        prog="ivtdds",
        description="Integral Value Transformations, affine dynamics and scheduling topologies.",
        epilog="exit status: 0 ok, 2 usage error, 3 domain error",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, fn, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(fn=fn)
        return sp

    sp = add("apply", cmd_apply, "apply a rule to one value (or k values)")
    sp.add_argument("--j", type=int, required=True)
    sp.add_argument("--k", type=int)
    sp.add_argument("--x", type=int, nargs="+", required=True)

    sp = add("rule", cmd_rule, "print a rule's digit table")
    sp.add_argument("--j", type=int, required=True)
    sp.add_argument("--k", type=int)

    sp = add("digits", cmd_digits, "base-p digits of a value")
    sp.add_argument("--x", type=int, required=True)

    sp = add("value", cmd_value, "value of a base-p digit string")
    sp.add_argument("digit_string")

    sp = add("orbit", cmd_orbit, "iterate a rule or an affine system")
    _system(sp)
    sp.add_argument("--start", type=int, required=True)

    sp = add("classify", cmd_classify, "Collatz-like verdict for one rule or system")
    _system(sp)
    sp.add_argument("--strict", action="store_true", default=None, help="require a fixed-point attractor")

    sp = add("enumerate", cmd_enumerate, "all Collatz-like rules of a base")
    sp.add_argument("--strict", action="store_true", default=None)

    sp = add("steady", cmd_steady, "steady states of an affine system")
    _system(sp)

    sp = add("stability", cmd_stability, "local and global stability of an affine system")
    _system(sp)
    sp.add_argument("--point", type=int, help="steady point (default: every one found)")
    sp.add_argument("--radius", type=int)

    sp = add("correspondence", cmd_correspondence, "type-I / type-II attractor relation")
    _system(sp, required_j=False)
    sp.add_argument("--sweep", action="store_true", help="check every Collatz-like row entry")
    sp.add_argument("--rows", nargs="+", metavar="A,B")

    add("unique-zero", cmd_unique_zero, "rules of A=1,B=0 with 0 as unique steady state")
    add("converse", cmd_converse, "search type-II systems whose type-I twin is not Collatz-like")

    sp = add("tables", cmd_tables, "attractor / steady / stability tables")
    sp.add_argument("--variant")
    sp.add_argument("--rows", nargs="+", metavar="A,B", help="coefficient rows, e.g. 1,0 2,1")
    sp.add_argument("--radius", type=int)

    sp = sub.add_parser("odpe", help="scheduling topology commands")
    osub = sp.add_subparsers(dest="odpe_command", required=True, metavar="ACTION")

    def oadd(name, fn, help_):
        s = osub.add_parser(name, parents=[common], help=help_)
        s.set_defaults(fn=fn)
        return s

    s = oadd("build", cmd_odpe_build, "SCA, stations, sub-stations and routes")
    s.add_argument("--j", type=int, required=True)
    s.add_argument("--digits", type=int)
    s = oadd("hops", cmd_odpe_hops, "average hopping up to a horizon")
    s.add_argument("--j", type=int, required=True)
    s.add_argument("--horizon", type=int)
    s.add_argument("--to", choices=[t.value for t in odpe.HopTarget], help="count hops to station or sca")
    s.add_argument("--include-zero", action="store_true")
    s = oadd("best", cmd_odpe_best, "best scheduling rule")
    s.add_argument("--horizon", type=int)
    s = oadd("capacity", cmd_odpe_capacity, "nodes whose orbit exceeds a capacity")
    s.add_argument("--j", type=int, required=True)
    s.add_argument("--capacity", type=int)
    s = oadd("calibrate", cmd_odpe_calibrate, "score hop-counting conventions")
    s.add_argument("--horizon", type=int)

    sp = sub.add_parser("analysis", help="fractal, series and contraction analysis")
    asub = sp.add_subparsers(dest="analysis_command", required=True, metavar="ACTION")

    def aadd(name, fn, help_):
        s = asub.add_parser(name, parents=[common], help=help_)
        s.set_defaults(fn=fn)
        return s

    s = aadd("fractal", cmd_fractal, "box-counting dimension of the Y1~Y0 graph")
    _system(s)
    s.add_argument("--n-points", dest="n_points", type=int)
    s.add_argument("--levels", type=int, nargs="+")
    s = aadd("graph", cmd_graph, "dump (Y0, Y1) points")
    _system(s)
    s.add_argument("--n-points", dest="n_points", type=int)
    s = aadd("series", cmd_series, "ratio test of the coefficient series")
    _system(s)
    s.add_argument("--n-max", dest="n_max", type=int)
    s = aadd("contraction", cmd_contraction, "contraction test of a bare rule")
    s.add_argument("--j", type=int, required=True)
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else EXIT_OK
    try:
        cfg = build_config(ns)
        result = ns.fn(cfg, ns)
    except UsageError as e:
        print(f"ivtdds: usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except IvtError as e:
        print(f"ivtdds: error: {e}", file=sys.stderr)
        return EXIT_DOMAIN
    except ValueError as e:
        print(f"ivtdds: usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    payload, lines, table, *rest = result
    warnings = rest[0] if rest else []
    header, rows = table if table else (None, [])
    report = Report(argv, dataclasses.asdict(cfg), payload, warnings, lines, header, rows)
    sys.stdout.write(report.render(cfg.format))
    if cfg.format == "csv":
        for w in warnings:
            print(f"warning: {w}", file=sys.stderr)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
