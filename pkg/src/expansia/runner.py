"""Run scenario tasks into JSON-ready records and replay recorded reports.

A record is a flat dict with exact rationals as "p/q" strings and points
in the space's own notation, so serialising it with sorted keys is
byte-stable. Wall-clock timing is deliberately kept out of records.
"""
from __future__ import annotations

import random
from fractions import Fraction
from typing import Any

from . import __version__, linalg
from .actions import CoveringMap, check_semiconjugacy, covering_fiber, fiber_separation_beta, is_finite_model
from .covers import prec
from .expansivity import (DEFAULT_DEPTH, DEFAULT_GRID, SeparationCertificate, certify_linear, dynamical_ball,
                          estimate_sup_constant, falsify_expansive, find_separating_element, fixed_points,
                          is_hyperbolic, pair_orbit_max, uniform_separation_bound)
from .groups import SyndeticWitness, cayley_ball, coset_transversal, verify_syndetic_witness
from .orbit import (constant_from_cover, cover_from_constant, is_orbit_expansive_finite, verify_orbit_expansive)
from .scenario import TASKS, Scenario, ScenarioError, parse_int, parse_rational
from .spaces import RationalGrid, Torus
from .suites import SUITES

EXIT_OK, EXIT_FALSIFIED, EXIT_INCONCLUSIVE, EXIT_REPLAY, EXIT_USAGE = 0, 1, 2, 3, 64
EXIT_BY_KIND = {"certified": 0, "verified": 0, "decided": 0, "measured": 0,
                "falsified": 1, "refuted": 1, "inconclusive": 2}

fmt = linalg.format_fraction


def _fmt_opt(x) -> str | None:
    return None if x is None else fmt(x)


def fmt_point(space, p) -> str:
    return space.format_point(p)


class ReplayMismatch(Exception):
    def __init__(self, field: str, detail: str):
        super().__init__(f"field {field!r}: {detail}")
        self.field = field


class Params:
    """Task parameters: scenario [task] values overridden by command-line flags."""

    def __init__(self, scn: Scenario, overrides: dict[str, Any]):
        self.scn = scn
        self.overrides = {k: v for k, v in overrides.items() if v is not None}
        self.used: dict[str, Any] = {}

    def get(self, key: str, fn=str, default=None):
        if key in self.overrides:
            val = self.overrides[key]
        else:
            val = self.scn.param(key, fn, default)
        self.used[key] = val
        return val

    def require(self, key: str, fn=str):
        val = self.get(key, fn)
        if val is None:
            raise ScenarioError(f"task needs '{key}' in [task]", None, None, self.scn.source)
        return val

    def echo(self) -> dict[str, Any]:
        out = {}
        for k, v in sorted(self.used.items()):
            if v is None:
                continue
            out[k] = fmt(v) if isinstance(v, Fraction) else v
        return out


def run(scn: Scenario, task: str | None = None, overrides: dict[str, Any] | None = None) -> list[dict]:
    """Execute the scenario's task; returns the records of the report."""
    task = task or scn.task
    if task is None:
        raise ScenarioError("no task given (positional task or [task] name)", None, None, scn.source)
    if task not in TASKS:
        raise ScenarioError(f"unknown task {task!r}", None, None, scn.source)
    declared = scn.task
    if declared is not None and declared != task:
        e = scn.entry("task", "name")
        raise ScenarioError(f"scenario declares task {declared!r}, not {task!r}", e.line, e.column, scn.source)
    p = Params(scn, overrides or {})
    seed = p.get("seed", parse_int, 0)
    body = _TASKS[task](scn, p, random.Random(seed))
    records = body if isinstance(body, list) else [body]
    out = []
    for i, rec in enumerate(records):
        full = {"tool": "expansia", "version": __version__, "task": task, "seed": seed, "index": i,
                "scenario": {"source": scn.source, "text": scn.text}, "params": p.echo()}
        full.update(rec)
        full["exit"] = EXIT_BY_KIND[full["kind"]]
        out.append(full)
    return out


def exit_code(records: list[dict]) -> int:
    return max((r["exit"] for r in records), default=EXIT_OK)


# --- tasks ---------------------------------------------------------------

def _grid(a, p: Params):
    q = p.get("grid", parse_int, DEFAULT_GRID)
    return RationalGrid(a.space.dim, q) if isinstance(a.space, Torus) else None


def _task_certify(scn, p, rng):
    a = scn.action()
    depth = p.get("depth", parse_int, 4)
    v = certify_linear(a.group, depth)
    rec = {"kind": v.kind, "depth": depth}
    if v.kind == "certified":
        rec.update(witness=v.reason["word"], matrix=v.reason["matrix"], trace=v.reason["trace"],
                   det=v.reason["det"], numeric=v.numeric)
    elif v.kind == "falsified":
        rec.update(witness=list(v.witness), matrix=v.reason["matrix"], trace=v.reason["trace"],
                   det=v.reason["det"], exact=v.exact)
    else:
        rec["note"] = v.note
    return rec


def _task_falsify(scn, p, rng):
    a = scn.action()
    c = p.require("c", parse_rational)
    default_depth = None if is_finite_model(a) else DEFAULT_DEPTH
    depth = p.get("depth", parse_int, default_depth)
    v = falsify_expansive(a, c, depth, sampler=_grid(a, p))
    rec = {"kind": v.kind, "constant": fmt(c), "depth": depth}
    if v.kind == "falsified":
        rec.update(witness=[fmt_point(a.space, x) for x in v.witness],
                   max_separation=fmt(v.max_separation), exact=v.exact)
    elif v.kind == "certified":
        rec["min_max_separation"] = _fmt_opt(v.reason.get("min_max_separation"))
    else:
        rec["note"] = v.note
    return rec


def _task_separate(scn, p, rng):
    a = scn.action()
    c = p.require("c", parse_rational)
    depth = p.get("depth", parse_int, DEFAULT_DEPTH)
    x, y = scn.point(a.space, "x"), scn.point(a.space, "y")
    if x is None or y is None:
        raise ScenarioError("separate needs points x and y in [task]", None, None, scn.source)
    p.used.update(x=fmt_point(a.space, x), y=fmt_point(a.space, y))
    cert = find_separating_element(a, x, y, c, depth)
    if cert is None:
        return {"kind": "inconclusive", "depth": depth, "constant": fmt(c), "note": "no separating element"}
    return {"kind": "certified", "depth": depth, "constant": fmt(c),
            "witness": a.group.word_names(cert.word), "distance": fmt(cert.distance)}


def _task_estimate(scn, p, rng):
    a = scn.action()
    depth = p.get("depth", parse_int, DEFAULT_DEPTH)
    q = p.get("grid", parse_int, DEFAULT_GRID)
    est = estimate_sup_constant(a, depth, q)
    wit = [fmt_point(a.space, x) for x in est.witness] if est.witness else None
    return {"kind": "measured", "depth": depth, "lo": fmt(est.lo), "hi": fmt(est.hi),
            "witness": wit, "exact": est.exact}


def _task_uniform(scn, p, rng):
    a = scn.action()
    c = p.require("c", parse_rational)
    eps = p.require("eps", parse_rational)
    depth = p.get("depth", parse_int, DEFAULT_DEPTH)
    v = uniform_separation_bound(a, c, eps, depth, sampler=_grid(a, p))
    if getattr(v, "kind", None) == "inconclusive":
        return {"kind": "inconclusive", "depth": depth, "note": v.note}
    return {"kind": "measured", "depth": depth, "n": v.n, "analytic": v.analytic}


def _task_dynamical_ball(scn, p, rng):
    a = scn.action()
    c = p.require("c", parse_rational)
    depth = p.get("depth", parse_int, DEFAULT_DEPTH)
    q = p.get("grid", parse_int, DEFAULT_GRID)
    x = scn.point(a.space, "x")
    if x is None:
        x = a.space.origin() if isinstance(a.space, Torus) else 0
    p.used["x"] = fmt_point(a.space, x)
    s = dynamical_ball(a, x, c, depth, q)
    return {"kind": "measured", "depth": depth, "constant": fmt(c),
            "points": [fmt_point(a.space, t) for t in s.points]}


def _task_fixed_points(scn, p, rng):
    a = scn.action()
    fx = fixed_points(a)
    if getattr(fx, "kind", None) == "inconclusive":
        return {"kind": "inconclusive", "note": fx.note}
    return {"kind": "measured", "points": [fmt_point(a.space, x) for x in fx], "count": len(fx)}


def _task_syndetic(scn, p, rng):
    a = scn.action()
    G = a.group
    H = scn.subgroup(G, "H", "task")
    if H is None:
        raise ScenarioError("syndetic needs 'H' (subgroup words) in [task]", None, None, scn.source)
    depth = p.get("depth", parse_int, 4)
    kw = scn.entry("task", "K")
    if kw is not None:
        words = scn.convert(kw, lambda s: [G.parse_word(w) for w in s.split(",")], "K")
        K = SyndeticWitness(tuple(words))
    else:
        T = coset_transversal(G, H, depth)
        if getattr(T, "kind", None) == "inconclusive":
            return {"kind": "inconclusive", "depth": depth, "note": T.note}
        K = SyndeticWitness(tuple(T))
    p.used["H"] = scn.entry("task", "H").value
    v = verify_syndetic_witness(G, H, K, depth)
    rec = {"kind": v.kind, "depth": depth, "K": [G.format_word(k) for k in K.K]}
    if v.kind == "falsified":
        rec["witness"] = [G.format_word(v.witness[0])]
    elif v.kind == "inconclusive":
        rec["note"] = v.note
    return rec


def _cover_members(U) -> list[str]:
    return [f"{n}: {U.format_member(i)}" for i, n in enumerate(U.names)]


def _task_cover_verify(scn, p, rng):
    a = scn.action()
    U = scn.cover(a.space)
    if U is None:
        raise ScenarioError("cover-verify needs a [cover] section", None, None, scn.source)
    depth = None if is_finite_model(a) else p.get("depth", parse_int, DEFAULT_DEPTH)
    v = verify_orbit_expansive(a, U, depth, sampler=_grid(a, p))
    rec = {"kind": v.kind, "depth": depth, "members": len(U)}
    if v.kind == "refuted":
        rec.update(witness=[fmt_point(a.space, x) for x in v.witness], exact=v.exact)
    if v.kind == "decided" and hasattr(a.space, "diameter") and is_finite_model(a):
        rec["constant"] = fmt(constant_from_cover(U))
    return rec


def _task_cover_build(scn, p, rng):
    a = scn.action()
    c = p.require("c", parse_rational)
    q = p.get("grid", parse_int, None) if isinstance(a.space, Torus) else None
    try:
        U = cover_from_constant(a, c, q)
    except ValueError as exc:
        raise ScenarioError(str(exc), None, None, scn.source) from None
    rec = {"kind": "measured", "constant": fmt(c), "members": _cover_members(U)}
    if is_finite_model(a):
        rec["kind"] = "decided" if is_orbit_expansive_finite(a, U) else "refuted"
    return rec


def _covering(scn, p):
    D = p.require("D", linalg.parse_matrix)
    p.used["D"] = linalg.format_matrix(D)
    try:
        return CoveringMap(D)
    except ValueError as exc:
        raise ScenarioError(str(exc), None, None, scn.source) from None


def _task_fiber(scn, p, rng):
    f = _covering(scn, p)
    space = Torus(f.dim)
    y = scn.point(space, "y") or space.origin()
    p.used["y"] = str(y)
    fiber = covering_fiber(f, y)
    rec = {"kind": "measured", "points": [str(x) for x in fiber], "count": len(fiber)}
    if abs(f.det) >= 2:
        rec["beta"] = fmt(fiber_separation_beta(f))
    if scn.entries("matrices"):
        a = scn.action()
        rec["semiconjugacy"] = check_semiconjugacy(f, a, a).holds
    return rec


def _task_beta(scn, p, rng):
    f = _covering(scn, p)
    try:
        beta = fiber_separation_beta(f)
    except ValueError as exc:
        raise ScenarioError(str(exc), None, None, scn.source) from None
    return {"kind": "measured", "beta": fmt(beta), "sheets": abs(f.det)}


def _task_suite(scn, p, rng):
    name = p.require("suite")
    if name not in SUITES:
        raise ScenarioError(f"unknown suite {name!r}; choose from {sorted(SUITES)}", None, None, scn.source)
    models = p.get("models", parse_int, None)
    seed = p.used["seed"]
    res = SUITES[name](seed) if models is None else SUITES[name](seed, models)
    records = []
    for prop in res.properties:
        rec = {"kind": "certified" if prop.passed else "falsified", "suite": name,
               "property": prop.name, "checked": prop.checked, "failures": prop.failures}
        if prop.counterexample is not None:
            rec["witness"] = prop.counterexample
        records.append(rec)
    return records


_TASKS = {
    "certify": _task_certify,
    "falsify": _task_falsify,
    "separate": _task_separate,
    "estimate": _task_estimate,
    "uniform": _task_uniform,
    "dynamical-ball": _task_dynamical_ball,
    "fixed-points": _task_fixed_points,
    "syndetic": _task_syndetic,
    "cover-verify": _task_cover_verify,
    "cover-build": _task_cover_build,
    "fiber": _task_fiber,
    "beta": _task_beta,
    "suite": _task_suite,
}


# --- replay ----------------------------------------------------------------

def _major(v: str) -> str:
    return str(v).split(".")[0]


def replay(records: list[dict]) -> list[str]:
    """Re-validate every record; returns one status line per record.

    Raises :class:`ReplayMismatch` naming the first divergent field.
    """
    lines = []
    for rec in records:
        if rec.get("tool") != "expansia":
            raise ReplayMismatch("tool", f"not an expansia report ({rec.get('tool')!r})")
        if _major(rec.get("version", "")) != _major(__version__):
            raise ValueError(f"report version {rec.get('version')} is incompatible with {__version__}")
        scn = Scenario.parse(rec["scenario"]["text"], rec["scenario"]["source"])
        _check_witness(scn, rec)
        fresh = run(scn, rec["task"], _overrides(rec))
        idx = rec.get("index", 0)
        if idx >= len(fresh):
            raise ReplayMismatch("index", f"record {idx} does not exist on rerun")
        again = fresh[idx]
        for key in sorted(set(rec) | set(again)):
            if rec.get(key) != again.get(key):
                raise ReplayMismatch(key, f"recorded {rec.get(key)!r}, recomputed {again.get(key)!r}")
        lines.append(f"record {idx} ({rec['task']}, {rec['kind']}): replay ok")
    return lines


def _overrides(rec: dict) -> dict[str, Any]:
    params = rec.get("params", {})
    out = {}
    conv = {"depth": int, "grid": int, "seed": int, "models": int}
    for key in ("depth", "grid", "seed", "models"):
        if key in params:
            out[key] = conv[key](params[key])
    return out


def _check_witness(scn: Scenario, rec: dict) -> None:
    """Independent re-validation of the recorded witness, before any rerun."""
    task, kind = rec["task"], rec["kind"]
    if "witness" not in rec or task == "suite":
        return
    params = rec.get("params", {})
    a = scn.action() if (scn.entries("matrices") or scn.entries("permutations")) else None
    try:
        if task == "certify":
            G = a.group
            if kind == "certified":
                w = G.parse_word("*".join(rec["witness"]))
                M = G.canonicalize(w)
                ok = linalg.format_matrix(M) == rec["matrix"] and is_hyperbolic(M)[0]
            else:
                w = G.parse_word("*".join(rec["witness"]))
                M = G.canonicalize(w)
                ok = linalg.format_matrix(M) == rec["matrix"] and not is_hyperbolic(M)[0]
        elif task == "falsify" and kind == "falsified":
            x, y = (a.space.parse_point(s) for s in rec["witness"])
            c = parse_rational(rec["constant"])
            depth = rec["depth"]
            if depth is None:
                m = pair_orbit_max(a, [x, y])[tuple(sorted((x, y)))]
            else:
                m = max(a.distance(a.act(g, x), a.act(g, y)) for g in cayley_ball(a.group, depth))
            ok = x != y and m <= c and fmt(m) == rec["max_separation"]
        elif task == "separate":
            x, y = (a.space.parse_point(params[k]) for k in ("x", "y"))
            w = a.group.parse_word("*".join(rec["witness"]))
            cert = SeparationCertificate(x, y, w, parse_rational(rec["distance"]), parse_rational(rec["constant"]))
            ok = cert.replay(a)
        elif task == "cover-verify" and kind == "refuted":
            x, y = (a.space.parse_point(s) for s in rec["witness"])
            U = scn.cover(a.space)
            if rec["depth"] is None:
                pairs = [p for p in _pair_closure(a, x, y)]
            else:
                pairs = [(a.act(g, x), a.act(g, y)) for g in cayley_ball(a.group, rec["depth"])]
            ok = x != y and all(prec(pq, U) for pq in pairs)
        elif task == "syndetic" and kind == "falsified":
            G = a.group
            H = scn.subgroup(G, "H", "task")
            g = G.canonicalize(G.parse_word(rec["witness"][0]))
            ks = [G.canonicalize(G.parse_word(k)) for k in rec["K"]]
            ok = not any(H.contains(G.rep.compose(k, g)) for k in ks)
        else:
            return
    except (ValueError, KeyError, TypeError, StopIteration) as exc:
        raise ReplayMismatch("witness", f"cannot be re-validated: {exc}") from None
    if not ok:
        raise ReplayMismatch("witness", f"{rec['witness']!r} does not re-validate")


def _pair_closure(a, x, y):
    seen = {(x, y)}
    frontier = [(x, y)]
    while frontier:
        nxt = []
        for u, v in frontier:
            for s in a.group.ids:
                pq = (a.generator_map(s, u), a.generator_map(s, v))
                if pq not in seen:
                    seen.add(pq)
                    nxt.append(pq)
        frontier = nxt
    return seen
