"""Line-oriented scenario files.

A scenario is a sequence of ``[section]`` headers followed by ``key = value``
lines; keys may repeat (``open``, ``row``, ``member``). ``#`` starts a
comment. Example::

    [matrices]
    B = -1,1;0,1
    C = -1,0;1,1

    [subgroup]
    words = B*C

    [space]
    type = torus

    [task]
    name = certify
    depth = 2
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable

from . import linalg
from .actions import Action, MatrixTorusAction, finite_action, restrict_to_subgroup
from .covers import BoxUnion, OpenCover
from .groups import GroupPresentation, Subgroup
from .linalg import ParseError
from .spaces import FiniteMetricSpace, FiniteTopSpace, Torus, TorusPoint

SECTIONS = ("matrices", "permutations", "subgroup", "space", "cover", "task")
TASKS = ("certify", "falsify", "separate", "estimate", "uniform", "dynamical-ball", "fixed-points",
         "syndetic", "cover-verify", "cover-build", "fiber", "beta", "suite")


class ScenarioError(ParseError):
    """A malformed or unresolvable scenario, located by line and column (1-based)."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None,
                 source: str = "<scenario>"):
        super().__init__(message, column)
        self.line = line
        self.source = source

    def __str__(self):
        where = self.source
        if self.line is not None:
            where += f":{self.line}"
            if self.column is not None:
                where += f":{self.column}"
        return f"{where}: {self.args[0]}"


@dataclass(frozen=True)
class Entry:
    key: str
    value: str
    line: int
    column: int  # where the value starts


@dataclass
class Scenario:
    text: str
    source: str = "<scenario>"
    sections: dict[str, list[Entry]] = field(default_factory=dict)

    @classmethod
    def parse(cls, text: str, source: str = "<scenario>") -> "Scenario":
        scn = cls(text, source)
        current = None
        for lineno, raw in enumerate(text.splitlines(), start=1):
            body = raw.split("#", 1)[0].rstrip()
            stripped = body.strip()
            if not stripped:
                continue
            indent = len(body) - len(body.lstrip())
            if stripped.startswith("["):
                if not stripped.endswith("]"):
                    raise ScenarioError("unterminated section header", lineno, indent + 1, source)
                current = stripped[1:-1].strip()
                if current not in SECTIONS:
                    raise ScenarioError(f"unknown section [{current}]", lineno, indent + 2, source)
                if current in scn.sections:
                    raise ScenarioError(f"section [{current}] repeated", lineno, indent + 2, source)
                scn.sections[current] = []
                continue
            if current is None:
                raise ScenarioError("entry before any [section] header", lineno, indent + 1, source)
            if "=" not in stripped:
                raise ScenarioError("expected 'key = value'", lineno, indent + 1, source)
            key, value = body.split("=", 1)
            vcol = len(key) + 2 + (len(value) - len(value.lstrip()))
            scn.sections[current].append(Entry(key.strip(), value.strip(), lineno, vcol))
        return scn

    @classmethod
    def load(cls, path: str | Path) -> "Scenario":
        p = Path(path)
        return cls.parse(p.read_text(encoding="utf-8"), p.name)

    # --- lookups ------------------------------------------------------------

    def entries(self, section: str, key: str | None = None) -> list[Entry]:
        items = self.sections.get(section, [])
        return [e for e in items if key is None or e.key == key]

    def entry(self, section: str, key: str) -> Entry | None:
        found = self.entries(section, key)
        if len(found) > 1:
            e = found[1]
            raise ScenarioError(f"key {key!r} given twice in [{section}]", e.line, 1, self.source)
        return found[0] if found else None

    def convert(self, e: Entry, fn: Callable[[str], Any], what: str):
        try:
            return fn(e.value)
        except ParseError as exc:
            col = e.column + (exc.column - 1 if exc.column else 0)
            raise ScenarioError(f"bad {what}: {exc}", e.line, col, self.source) from None
        except (ValueError, ZeroDivisionError) as exc:
            raise ScenarioError(f"bad {what}: {exc}", e.line, e.column, self.source) from None

    def param(self, key: str, fn: Callable[[str], Any] = str, default=None):
        e = self.entry("task", key)
        return default if e is None else self.convert(e, fn, key)

    @property
    def task(self) -> str | None:
        return self.param("name")

    # --- building objects ---------------------------------------------------

    def group(self) -> GroupPresentation:
        mats, perms = self.entries("matrices"), self.entries("permutations")
        if bool(mats) == bool(perms):
            raise ScenarioError("give exactly one of [matrices] or [permutations]", None, None, self.source)
        if mats:
            named = {e.key: self.convert(e, linalg.parse_matrix, f"matrix {e.key}") for e in mats}
            dims = {len(m) for m in named.values()}
            if len(dims) != 1:
                e = mats[-1]
                raise ScenarioError("matrices of different sizes", e.line, e.column, self.source)
            for e in mats:
                m = named[e.key]
                if abs(linalg.det(m)) != 1:
                    raise ScenarioError(f"matrix {e.key} is not invertible over the integers (det {linalg.det(m)})",
                                        e.line, e.column, self.source)
            return GroupPresentation.from_matrices(named)
        named = {e.key: self.convert(e, linalg.parse_permutation, f"permutation {e.key}") for e in perms}
        if len({len(p) for p in named.values()}) != 1:
            e = perms[-1]
            raise ScenarioError("permutations of different degrees", e.line, e.column, self.source)
        return GroupPresentation.from_permutations(named)

    def subgroup(self, G: GroupPresentation, key: str = "words", section: str = "subgroup") -> Subgroup | None:
        e = self.entry(section, key)
        if e is None:
            return None
        words = [w for w in e.value.split(",") if w.strip()]
        return self.convert(e, lambda _: Subgroup.parse(G, words), "subgroup words")

    def space(self, G: GroupPresentation):
        e = self.entry("space", "type")
        kind = e.value if e else ("torus" if G.rep.kind == "matrix" else None)
        if kind == "torus":
            dim = G.rep.dim if G.rep.kind == "matrix" else 2
            return Torus(dim)
        if kind is None:
            raise ScenarioError("[space] needs a type", None, None, self.source)
        n = G.rep.degree if G.rep.kind == "perm" else 0
        lab = self.entry("space", "labels")
        labels = [s.strip() for s in lab.value.split(",")] if lab else [str(i) for i in range(n)]
        if len(labels) != n:
            raise ScenarioError(f"{len(labels)} labels for permutations of degree {n}",
                                lab.line if lab else e.line, lab.column if lab else e.column, self.source)
        if kind == "discrete-metric":
            return FiniteMetricSpace.discrete(n, labels)
        if kind == "discrete-topology":
            return FiniteTopSpace.discrete(n, labels)
        if kind == "metric":
            rows = self.entries("space", "row")
            text = "\n".join([",".join(labels)] + [r.value for r in rows])
            where = rows[0] if rows else e
            return self.convert(Entry("row", text, where.line, where.column),
                                FiniteMetricSpace.parse, "metric")
        if kind == "topology":
            opens = self.entries("space", "open")
            text = "\n".join([",".join(labels)] + [o.value for o in opens])
            where = opens[0] if opens else e
            return self.convert(Entry("open", text, where.line, where.column),
                                FiniteTopSpace.parse, "topology")
        raise ScenarioError(f"unknown space type {kind!r}", e.line, e.column, self.source)

    def action(self) -> Action:
        G = self.group()
        X = self.space(G)
        if isinstance(X, Torus):
            if G.rep.kind != "matrix":
                raise ScenarioError("a torus needs [matrices]", None, None, self.source)
            a = MatrixTorusAction(G)
        else:
            try:
                a = finite_action(G, X)
            except ValueError as exc:
                raise ScenarioError(str(exc), None, None, self.source) from None
        H = self.subgroup(G)
        return restrict_to_subgroup(a, H) if H is not None else a

    def cover(self, space) -> OpenCover | None:
        members = self.entries("cover", "member")
        if not members:
            return None
        parsed, names = [], []
        for m in members:
            name, body = None, m.value
            if ":" in body:
                name, body = (s.strip() for s in body.split(":", 1))
            names.append(name or f"U{len(names) + 1}")
            if space.is_finite:
                parsed.append(self.convert(Entry("member", body, m.line, m.column),
                                           lambda s: frozenset(space.parse_point(p) for p in s.split(",")),
                                           "cover member"))
            else:
                parsed.append(self.convert(Entry("member", body, m.line, m.column), BoxUnion.parse, "cover member"))
        try:
            return OpenCover(space, parsed, names)
        except ValueError as exc:
            m = members[0]
            raise ScenarioError(f"bad cover: {exc}", m.line, m.column, self.source) from None

    def point(self, space, key: str):
        e = self.entry("task", key)
        if e is None:
            return None
        fn = TorusPoint.parse if isinstance(space, Torus) else space.parse_point
        return self.convert(e, fn, f"point {key}")


def parse_rational(text: str) -> Fraction:
    return linalg.parse_fraction(text)


def parse_int(text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ParseError(f"expected an integer, got {text!r}") from None
