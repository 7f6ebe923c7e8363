"""Safety/performance specifications, a VNN-LIB subset, and the ALWAYS surface syntax.

A specification pins an input polytope (by reference) and a per-output
interval on the network output.  One-sided constraints use +/-1e30 sentinels
so every record stays plain numeric.  Only conjunctions of linear constraints
are supported; ALWAYS is the sole temporal operator and is read as universal
quantification over the referenced polytope.
"""

from __future__ import annotations

import enum
import json
import os
import re
from dataclasses import dataclass

import numpy as np

from .geometry import Halfspace, Polytope

SENTINEL = 1e30


class SpecKind(enum.Enum):
    SAFETY = "SAFETY"
    PERFORMANCE = "PERFORMANCE"


class SpecSyntaxError(ValueError):
    """Unsupported or malformed specification text; message carries the location."""


@dataclass
class Spec:
    id: str
    kind: SpecKind
    polytope_ref: str
    output_interval: list[tuple[float, float]]
    description: str = ""

    def __post_init__(self):
        for lo, hi in self.output_interval:
            if lo > hi:
                raise ValueError(f"spec {self.id}: interval lower {lo} > upper {hi}")


def build_safety_spec(sign: str, poly_ref: str, spec_id: str | None = None) -> Spec:
    """One-sided output constraint: '-' keeps outputs <= 0, '+' keeps them >= 0."""
    if sign == "-":
        interval = (-SENTINEL, 0.0)
    elif sign == "+":
        interval = (0.0, SENTINEL)
    else:
        raise ValueError(f"sign must be '-' or '+', got {sign!r}")
    return Spec(
        id=spec_id or f"safety{sign}",
        kind=SpecKind.SAFETY,
        polytope_ref=poly_ref,
        output_interval=[interval],
        description=f"output {'<= 0' if sign == '-' else '>= 0'} over {poly_ref}",
    )


def build_performance_spec(lo: float, hi: float, poly_ref: str, spec_id: str | None = None) -> Spec:
    if lo > hi:
        raise ValueError(f"performance interval lower {lo} > upper {hi}")
    return Spec(
        id=spec_id or f"perf[{lo:g},{hi:g}]",
        kind=SpecKind.PERFORMANCE,
        polytope_ref=poly_ref,
        output_interval=[(float(lo), float(hi))],
        description=f"output in [{lo:g}, {hi:g}] over {poly_ref}",
    )


# ---------------------------------------------------------------------------
# VNN-LIB subset


@dataclass
class VnnlibProperty:
    input_dim: int
    output_dim: int
    input_halfspaces: list[Halfspace]
    output_interval: list[tuple[float, float]]


def _tokenize_sexpr(text: str):
    tokens = []
    line = 1
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "\n":
            line += 1
            i += 1
        elif ch in " \t\r":
            i += 1
        elif ch == ";":
            while i < len(text) and text[i] != "\n":
                i += 1
        elif ch in "()":
            tokens.append((ch, line))
            i += 1
        else:
            j = i
            while j < len(text) and text[j] not in " \t\r\n();":
                j += 1
            tokens.append((text[i:j], line))
            i = j
    return tokens


def _parse_sexprs(tokens):
    pos = 0

    def parse_one():
        nonlocal pos
        tok, line = tokens[pos]
        pos += 1
        if tok == "(":
            items = []
            while pos < len(tokens) and tokens[pos][0] != ")":
                items.append(parse_one())
            if pos >= len(tokens):
                raise SpecSyntaxError(f"line {line}: unbalanced '('")
            pos += 1
            return (items, line)
        if tok == ")":
            raise SpecSyntaxError(f"line {line}: unexpected ')'")
        return (tok, line)

    forms = []
    while pos < len(tokens):
        forms.append(parse_one())
    return forms


_VAR_RE = re.compile(r"^([XY])_(\d+)$")


def _linexpr(node) -> tuple[dict, float, int]:
    """Evaluate a linear expression into ({('X'|'Y', idx): coeff}, const, line)."""
    body, line = node
    if isinstance(body, str):
        m = _VAR_RE.match(body)
        if m:
            return {(m.group(1), int(m.group(2))): 1.0}, 0.0, line
        try:
            return {}, float(body), line
        except ValueError:
            raise SpecSyntaxError(f"line {line}: unknown symbol {body!r}") from None
    if not body:
        raise SpecSyntaxError(f"line {line}: empty expression")
    head = body[0][0]
    if head == "*":
        if len(body) != 3:
            raise SpecSyntaxError(f"line {line}: '*' takes a constant and a variable")
        c_terms, c_const, _ = _linexpr(body[1])
        v_terms, v_const, _ = _linexpr(body[2])
        if c_terms and v_terms:
            raise SpecSyntaxError(f"line {line}: non-linear term")
        if c_terms:  # allow (* X_0 0.5) as well
            c_terms, v_terms = v_terms, c_terms
            c_const, v_const = v_const, c_const
        return {k: c_const * v for k, v in v_terms.items()}, c_const * v_const, line
    if head == "+":
        terms: dict = {}
        const = 0.0
        for sub in body[1:]:
            t, c, _ = _linexpr(sub)
            for k, v in t.items():
                terms[k] = terms.get(k, 0.0) + v
            const += c
        return terms, const, line
    if head == "-" and len(body) == 3:
        lt, lc, _ = _linexpr(body[1])
        rt, rc, _ = _linexpr(body[2])
        for k, v in rt.items():
            lt[k] = lt.get(k, 0.0) - v
        return lt, lc - rc, line
    raise SpecSyntaxError(f"line {line}: unsupported construct {head!r}")


def parse_vnnlib(text: str) -> VnnlibProperty:
    """Parse the conjunctive linear VNN-LIB subset used by this toolkit."""
    forms = _parse_sexprs(_tokenize_sexpr(text))
    n_in = 0
    n_out = 0
    input_rows: list[tuple[np.ndarray | dict, float]] = []
    out_lo: dict[int, float] = {}
    out_hi: dict[int, float] = {}

    for body, line in forms:
        if isinstance(body, str):
            raise SpecSyntaxError(f"line {line}: stray token {body!r}")
        if not body:
            continue
        head = body[0][0]
        if head == "declare-const":
            name = body[1][0]
            m = _VAR_RE.match(name)
            if not m or body[2][0] != "Real":
                raise SpecSyntaxError(f"line {line}: unsupported declaration {name!r}")
            idx = int(m.group(2)) + 1
            if m.group(1) == "X":
                n_in = max(n_in, idx)
            else:
                n_out = max(n_out, idx)
        elif head == "assert":
            expr, eline = body[1]
            if isinstance(expr, str) or not expr:
                raise SpecSyntaxError(f"line {eline}: assert needs a comparison")
            op = expr[0][0]
            if op in ("or", "and"):
                raise SpecSyntaxError(f"line {eline}: {op!r} is not supported (conjunctive subset only)")
            if op not in ("<=", ">="):
                raise SpecSyntaxError(f"line {eline}: unsupported comparison {op!r}")
            lt, lc, _ = _linexpr(expr[1])
            rt, rc, _ = _linexpr(expr[2])
            terms = dict(lt)
            for k, v in rt.items():
                terms[k] = terms.get(k, 0.0) - v
            rhs = rc - lc
            if op == ">=":
                terms = {k: -v for k, v in terms.items()}
                rhs = -rhs
            kinds = {k[0] for k in terms}
            if kinds == {"X", "Y"}:
                raise SpecSyntaxError(f"line {eline}: constraints mixing inputs and outputs are unsupported")
            if kinds == {"Y"}:
                if len(terms) != 1:
                    raise SpecSyntaxError(f"line {eline}: output constraints must involve one output")
                (_, j), coeff = next(iter(terms.items()))
                if coeff == 0.0:
                    raise SpecSyntaxError(f"line {eline}: zero output coefficient")
                bound = rhs / coeff
                if coeff > 0:
                    out_hi[j] = min(out_hi.get(j, SENTINEL), bound)
                else:
                    out_lo[j] = max(out_lo.get(j, -SENTINEL), bound)
                n_out = max(n_out, j + 1)
            elif kinds == {"X"}:
                input_rows.append((dict(terms), rhs))
                n_in = max(n_in, 1 + max(k[1] for k in terms))
            else:
                raise SpecSyntaxError(f"line {eline}: constraint without variables")
        else:
            raise SpecSyntaxError(f"line {line}: unsupported command {head!r}")

    halfspaces = []
    for terms, rhs in input_rows:
        a = np.zeros(n_in)
        for (_, j), v in terms.items():
            a[j] = v
        halfspaces.append(Halfspace(a, float(rhs)))
    interval = [(out_lo.get(j, -SENTINEL), out_hi.get(j, SENTINEL)) for j in range(max(n_out, 1))]
    return VnnlibProperty(n_in, max(n_out, 1), halfspaces, interval)


def _num(v: float) -> str:
    return repr(float(v))


def emit_vnnlib(spec: Spec, poly: Polytope) -> str:
    """Emit the polytope's H-rep plus the spec's output interval as VNN-LIB text."""
    lines = [f"; {spec.id}: {spec.description}".rstrip()]
    for i in range(poly.dim):
        lines.append(f"(declare-const X_{i} Real)")
    for j in range(len(spec.output_interval)):
        lines.append(f"(declare-const Y_{j} Real)")
    for h in poly.halfspaces:
        terms = " ".join(f"(* {_num(h.a[i])} X_{i})" for i in range(poly.dim) if h.a[i] != 0.0)
        lines.append(f"(assert (<= (+ {terms}) {_num(h.b)}))")
    for j, (lo, hi) in enumerate(spec.output_interval):
        if lo > -SENTINEL:
            lines.append(f"(assert (>= Y_{j} {_num(lo)}))")
        if hi < SENTINEL:
            lines.append(f"(assert (<= Y_{j} {_num(hi)}))")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# surface syntax

_SURFACE_RE = re.compile(
    r"^\s*ALWAYS\s*\(\s*z\s+IN\s+(?P<poly>[^\s()]+)\s*\)\s*IMPLIES\s*"
    r"\(\s*output\s+IN\s*\[\s*(?P<lo>[^\s,\]]+)\s*,\s*(?P<hi>[^\s,\]]+)\s*\]\s*\)\s*$"
)
_TEMPORAL = ("EVENTUALLY", "NEXT", "UNTIL", "RELEASE")


def parse_surface(text: str, spec_id: str | None = None) -> Spec:
    """Parse `ALWAYS (z IN <poly-id>) IMPLIES (output IN [lo, hi])`."""
    stripped = text.strip()
    for op in _TEMPORAL:
        if stripped.upper().startswith(op):
            raise SpecSyntaxError(f"temporal operator {op} is not supported; only ALWAYS")
    m = _SURFACE_RE.match(stripped)
    if not m:
        raise SpecSyntaxError(f"malformed surface spec: {stripped!r}")
    try:
        lo, hi = float(m.group("lo")), float(m.group("hi"))
    except ValueError:
        raise SpecSyntaxError(f"malformed interval in {stripped!r}") from None
    if lo > hi:
        raise SpecSyntaxError(f"interval lower {lo} > upper {hi}")
    one_sided = lo <= -SENTINEL or hi >= SENTINEL
    kind = SpecKind.SAFETY if one_sided else SpecKind.PERFORMANCE
    return Spec(
        id=spec_id or f"always_{m.group('poly')}",
        kind=kind,
        polytope_ref=m.group("poly"),
        output_interval=[(lo, hi)],
        description=stripped,
    )


# ---------------------------------------------------------------------------
# spec manifests


@dataclass
class ManifestEntry:
    spec: Spec
    polytope_path: str


def load_manifest(path) -> list[ManifestEntry]:
    """Manifest: JSON array of {id, kind, spec, polytope}; spec paths are
    surface (.spec/.txt) or VNN-LIB (.vnnlib) files, resolved relative to the
    manifest."""
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    base = os.path.dirname(os.path.abspath(str(path)))
    entries = []
    for row in doc:
        spec_path = row["spec"]
        if not os.path.isabs(spec_path):
            spec_path = os.path.join(base, spec_path)
        poly_path = row["polytope"]
        if not os.path.isabs(poly_path):
            poly_path = os.path.join(base, poly_path)
        with open(spec_path, "r", encoding="utf-8") as fh:
            text = fh.read()
        if spec_path.endswith(".vnnlib"):
            prop = parse_vnnlib(text)
            kind = SpecKind(row["kind"])
            spec = Spec(
                id=row["id"],
                kind=kind,
                polytope_ref=poly_path,
                output_interval=prop.output_interval,
                description=f"vnnlib:{os.path.basename(spec_path)}",
            )
        else:
            spec = parse_surface(text, spec_id=row["id"])
            spec.kind = SpecKind(row["kind"])
            spec.polytope_ref = poly_path
        entries.append(ManifestEntry(spec, poly_path))
    return entries
