"""Reader and writer for ``.space`` presentation files.

A file has one ``[space]`` section, exactly two ``[plot <name>]``
sections (the first is alpha, the second beta), any number of
``[pullback <name>]`` sections and an optional ``[compute]`` section::

    [space]
    vars = x y
    equations = x*y

    [plot alpha]
    vars = s
    components = s, 0
    retraction = x

    [plot beta]
    vars = t
    components = 0, t
    retraction = y

    [pullback origin]
    vars =
    to_alpha = 0
    to_beta = 0

    [compute]
    bound = 6
    degrees = 0 1 2

A plot without a retraction declares ``symmetry_vars = w1 ...`` and one
or more ``symmetry = <h components> | <h' components>`` lines.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .diffeology import Plot, PullbackChart, Retraction, SpacePresentation, SymmetryGenerators
from .errors import ParseError, UsageError
from .ratpoly import Polynomial, PolyMap, VarContext, parse_poly

__all__ = [
    "SchemaError",
    "PlotSection",
    "ChartSection",
    "ComputeSection",
    "PresentationFile",
    "parse_presentation",
    "format_presentation",
    "load_presentation",
]


class SchemaError(ParseError):
    """Well-formed lines that do not make up a valid presentation."""


_HEADER_RE = re.compile(r"^\[\s*(?P<kind>[A-Za-z]+)(?:\s+(?P<name>\S+))?\s*\]$")
_KV_RE = re.compile(r"^(?P<key>[A-Za-z_][A-Za-z0-9_]*)\s*=(?P<value>.*)$")
_NAME_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")
_UINT_RE = re.compile(r"^\d+$")


@dataclass(frozen=True)
class PlotSection:
    name: str
    vars: VarContext
    components: tuple[Polynomial, ...]
    retraction: tuple[Polynomial, ...] | None = None
    symmetry_vars: VarContext | None = None
    symmetries: tuple[tuple[tuple[Polynomial, ...], tuple[Polynomial, ...]], ...] = ()


@dataclass(frozen=True)
class ChartSection:
    name: str
    vars: VarContext
    maps: tuple[tuple[str, tuple[Polynomial, ...]], ...]  # (plot name, components), in plot order


@dataclass(frozen=True)
class ComputeSection:
    bound: int | None = None
    degrees: tuple[int, ...] = ()


@dataclass(frozen=True)
class PresentationFile:
    ambient: VarContext
    equations: tuple[Polynomial, ...]
    plots: tuple[PlotSection, PlotSection]
    pullbacks: tuple[ChartSection, ...] = ()
    compute: ComputeSection | None = None

    def to_space(self) -> SpacePresentation:
        plots = []
        for sec in self.plots:
            if sec.retraction is not None:
                witness = Retraction(PolyMap(self.ambient, sec.retraction))
            else:
                witness = SymmetryGenerators(
                    sec.symmetry_vars,
                    tuple((PolyMap(sec.symmetry_vars, h), PolyMap(sec.symmetry_vars, hp))
                          for h, hp in sec.symmetries))
            plots.append(Plot(sec.name, PolyMap(sec.vars, sec.components), witness))
        charts = []
        for sec in self.pullbacks:
            maps = dict(sec.maps)
            charts.append(PullbackChart(sec.name, sec.vars,
                                        PolyMap(sec.vars, maps[plots[0].name]),
                                        PolyMap(sec.vars, maps[plots[1].name])))
        return SpacePresentation(self.ambient, self.equations, plots[0], plots[1], tuple(charts))


@dataclass
class _Section:
    kind: str
    name: str | None
    line: int
    entries: list = field(default_factory=list)  # (lineno, key, value)

    def label(self):
        return f"[{self.kind} {self.name}]" if self.name else f"[{self.kind}]"


def _split_sections(text):
    sections = []
    current = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            m = _HEADER_RE.match(line)
            if not m:
                raise ParseError(f"malformed section header {line!r}", line=lineno)
            kind, name = m.group("kind"), m.group("name")
            if kind in ("space", "compute"):
                if name is not None:
                    raise ParseError(f"[{kind}] takes no name", line=lineno)
            elif kind in ("plot", "pullback"):
                if name is None or not _NAME_RE.match(name):
                    raise ParseError(f"[{kind}] needs an identifier name", line=lineno)
            else:
                raise ParseError(f"unknown section [{kind}]", line=lineno)
            current = _Section(kind, name, lineno)
            sections.append(current)
            continue
        m = _KV_RE.match(line)
        if not m:
            raise ParseError(f"expected 'key = value', got {line!r}", line=lineno)
        if current is None:
            raise ParseError("entry before the first section header", line=lineno)
        current.entries.append((lineno, m.group("key"), m.group("value").strip()))
    return sections


def _keyed(section, allowed, repeatable=()):
    out = {}
    for lineno, key, value in section.entries:
        if key not in allowed:
            raise SchemaError(f"unknown key {key!r} in {section.label()}", line=lineno)
        if key in repeatable:
            out.setdefault(key, []).append((lineno, value))
        elif key in out:
            raise SchemaError(f"duplicate key {key!r} in {section.label()}", line=lineno)
        else:
            out[key] = (lineno, value)
    return out


def _require(section, keyed, key):
    if key not in keyed:
        raise SchemaError(f"{section.label()} is missing '{key}'", line=section.line)
    return keyed[key]


def _vars(lineno, value):
    try:
        return VarContext.of(value)
    except UsageError as e:
        raise ParseError(str(e), line=lineno) from None


def _poly(lineno, text, ctx):
    try:
        return parse_poly(text.strip(), ctx)
    except ParseError as e:
        raise ParseError(f"in {text.strip()!r}: {e.message}", e.pos, lineno) from None


def _poly_list(lineno, value, ctx, sep=","):
    if not value.strip():
        return ()
    return tuple(_poly(lineno, part, ctx) for part in value.split(sep))


def _uints(lineno, value):
    parts = value.split()
    for p in parts:
        if not _UINT_RE.match(p):
            raise ParseError(f"expected unsigned integer, got {p!r}", line=lineno)
    return tuple(int(p) for p in parts)


def parse_presentation(text: str) -> PresentationFile:
    sections = _split_sections(text)
    by_kind: dict[str, list[_Section]] = {}
    for sec in sections:
        by_kind.setdefault(sec.kind, []).append(sec)

    spaces = by_kind.get("space", [])
    if len(spaces) != 1:
        raise SchemaError(f"exactly one [space] section required, found {len(spaces)}",
                          line=spaces[1].line if len(spaces) > 1 else None)
    plots = by_kind.get("plot", [])
    if len(plots) != 2:
        raise SchemaError(f"exactly two plots required, found {len(plots)}",
                          line=plots[2].line if len(plots) > 2 else None)
    computes = by_kind.get("compute", [])
    if len(computes) > 1:
        raise SchemaError("at most one [compute] section allowed", line=computes[1].line)
    seen = set()
    for sec in sections:
        if sec.name is not None:
            if sec.name in seen:
                raise SchemaError(f"duplicate section name {sec.name!r}", line=sec.line)
            seen.add(sec.name)

    space = spaces[0]
    kv = _keyed(space, {"vars", "equations"})
    ambient = _vars(*_require(space, kv, "vars"))
    equations = ()
    if "equations" in kv:
        equations = _poly_list(*kv["equations"], ambient, sep=";")

    plot_sections = tuple(_parse_plot(sec, ambient) for sec in plots)
    charts = tuple(_parse_chart(sec, plot_sections) for sec in by_kind.get("pullback", []))

    compute = None
    if computes:
        sec = computes[0]
        kv = _keyed(sec, {"bound", "degrees"})
        bound = None
        if "bound" in kv:
            values = _uints(*kv["bound"])
            if len(values) != 1:
                raise SchemaError("bound takes exactly one unsigned integer", line=kv["bound"][0])
            bound = values[0]
        degrees = _uints(*kv["degrees"]) if "degrees" in kv else ()
        compute = ComputeSection(bound, degrees)
    return PresentationFile(ambient, equations, plot_sections, charts, compute)


def _parse_plot(sec, ambient):
    kv = _keyed(sec, {"vars", "components", "retraction", "symmetry_vars", "symmetry"}, repeatable={"symmetry"})
    ctx = _vars(*_require(sec, kv, "vars"))
    lineno, value = _require(sec, kv, "components")
    components = _poly_list(lineno, value, ctx)
    if len(components) != len(ambient):
        raise SchemaError(f"plot {sec.name} has {len(components)} components, ambient has {len(ambient)}",
                          line=lineno)
    has_retraction = "retraction" in kv
    has_symmetry = "symmetry" in kv
    if has_retraction == has_symmetry:
        raise SchemaError(f"plot {sec.name} needs exactly one of 'retraction' or 'symmetry'", line=sec.line)
    if has_retraction:
        if "symmetry_vars" in kv:
            raise SchemaError(f"plot {sec.name}: symmetry_vars without symmetry lines", line=kv["symmetry_vars"][0])
        lineno, value = kv["retraction"]
        retraction = _poly_list(lineno, value, ambient)
        if len(retraction) != len(ctx):
            raise SchemaError(f"retraction of {sec.name} has {len(retraction)} components, plot has {len(ctx)} vars",
                              line=lineno)
        return PlotSection(sec.name, ctx, components, retraction=retraction)
    if "symmetry_vars" not in kv:
        raise SchemaError(f"plot {sec.name}: symmetry lines need a 'symmetry_vars' declaration", line=sec.line)
    sym_ctx = _vars(*kv["symmetry_vars"])
    pairs = []
    for lineno, value in kv["symmetry"]:
        if value.count("|") != 1:
            raise ParseError("symmetry needs '<h components> | <h\' components>'", line=lineno)
        left, right = value.split("|")
        h, hp = _poly_list(lineno, left, sym_ctx), _poly_list(lineno, right, sym_ctx)
        if len(h) != len(ctx) or len(hp) != len(ctx):
            raise SchemaError(f"symmetry maps of {sec.name} need {len(ctx)} components each", line=lineno)
        pairs.append((h, hp))
    return PlotSection(sec.name, ctx, components, symmetry_vars=sym_ctx, symmetries=tuple(pairs))


def _parse_chart(sec, plots):
    allowed = {"vars"} | {f"to_{p.name}" for p in plots}
    kv = _keyed(sec, allowed)
    ctx = _vars(*_require(sec, kv, "vars"))
    maps = []
    for p in plots:
        lineno, value = _require(sec, kv, f"to_{p.name}")
        comps = _poly_list(lineno, value, ctx)
        if len(comps) != len(p.vars):
            raise SchemaError(f"to_{p.name} has {len(comps)} components, plot {p.name} has {len(p.vars)} vars",
                              line=lineno)
        maps.append((p.name, comps))
    return ChartSection(sec.name, ctx, tuple(maps))


def _join(polys, sep=", "):
    return sep.join(str(p) for p in polys)


def format_presentation(pf: PresentationFile) -> str:
    """Canonical text of a presentation; ``parse_presentation`` inverts it."""
    out = ["[space]", f"vars = {' '.join(pf.ambient.names)}".rstrip(),
           f"equations = {_join(pf.equations, ' ; ')}".rstrip()]
    for p in pf.plots:
        out += ["", f"[plot {p.name}]", f"vars = {' '.join(p.vars.names)}".rstrip(),
                f"components = {_join(p.components)}".rstrip()]
        if p.retraction is not None:
            out.append(f"retraction = {_join(p.retraction)}".rstrip())
        else:
            out.append(f"symmetry_vars = {' '.join(p.symmetry_vars.names)}".rstrip())
            for h, hp in p.symmetries:
                out.append(f"symmetry = {_join(h)} | {_join(hp)}")
    for c in pf.pullbacks:
        out += ["", f"[pullback {c.name}]", f"vars = {' '.join(c.vars.names)}".rstrip()]
        for name, comps in c.maps:
            out.append(f"to_{name} = {_join(comps)}".rstrip())
    if pf.compute is not None:
        out += ["", "[compute]"]
        if pf.compute.bound is not None:
            out.append(f"bound = {pf.compute.bound}")
        if pf.compute.degrees:
            out.append("degrees = " + " ".join(str(d) for d in pf.compute.degrees))
    return "\n".join(out) + "\n"


def load_presentation(path) -> PresentationFile:
    with open(path, encoding="utf-8") as fh:
        return parse_presentation(fh.read())
