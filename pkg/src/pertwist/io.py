"""Algebra input files and JSON-ready serialization helpers.

The text format is a sectioned key-value file.  A ``[algebra]`` header names
the algebra and fixes the prime (``field = 0`` means the rationals), then
exactly one of:

* ``[quiver]`` — ``vertices`` (comma-separated names), repeated
  ``arrow = name: from -> to`` lines, repeated ``relation = ...`` lines
  holding signed integer combinations of arrow paths (paths compose left to
  right, e.g. ``b*a - c*d``), and an optional ``max_path_len``;
* ``[table]`` — ``basis`` (comma-separated labels), ``unit`` (a combination
  of basis labels), and repeated ``product = x * y = <combination>`` lines.
  When the unit is a single basis label, its products are filled in
  automatically; all other unspecified products default to zero.  An
  optional ``idempotents`` line asserts that the named elements square to
  themselves.

``#`` starts a comment.  Errors carry ``path:line:col`` locations.  Table
input whose semisimple quotient is not split over the prime field is
rejected with a pointer at the section, since vertex grading needs a split
basic algebra; quiver input is split by construction.
"""

from __future__ import annotations

import os
import re
import tempfile
from dataclasses import dataclass, field as dc_field
from typing import Optional

import numpy as np

from .algebra import (Algebra, AlgebraError, QuiverPresentation, from_table,
                      path_algebra)
from .linalg import Field


class InputError(Exception):
    """A problem with an input file, carrying a location when known."""

    def __init__(self, message: str, path: str = "<input>",
                 line: Optional[int] = None, col: Optional[int] = None):
        self.message = message
        self.path = path
        self.line = line
        self.col = col
        super().__init__(str(self))

    def __str__(self) -> str:
        loc = self.path
        if self.line is not None:
            loc += f":{self.line}"
            if self.col is not None:
                loc += f":{self.col}"
        return f"{loc}: {self.message}"


@dataclass
class _Entry:
    key: str
    value: str
    line: int
    value_col: int


@dataclass
class _Section:
    name: str
    line: int
    entries: list[_Entry] = dc_field(default_factory=list)


_SECTION_RE = re.compile(r"^\[([A-Za-z_][A-Za-z0-9_]*)\]\s*$")
_INT_RE = re.compile(r"^[+-]?\d+$")


def _split_sections(text: str, path: str) -> list[_Section]:
    sections: list[_Section] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        m = _SECTION_RE.match(line.strip())
        if m:
            sections.append(_Section(m.group(1).lower(), lineno))
            continue
        if "=" not in line:
            raise InputError("expected 'key = value' or a [section] header",
                             path, lineno, 1 + len(line) - len(line.lstrip()))
        if not sections:
            raise InputError("content before the first [section] header",
                             path, lineno, 1)
        key, value = line.split("=", 1)
        sections[-1].entries.append(
            _Entry(key.strip().lower(), value.strip(), lineno,
                   line.index("=") + 2 + (len(value) - len(value.lstrip()))))
    if not sections:
        raise InputError("empty input", path, 1, 1)
    return sections


def _single(section: _Section, key: str, path: str,
            required: bool = False) -> Optional[_Entry]:
    hits = [e for e in section.entries if e.key == key]
    if len(hits) > 1:
        raise InputError(f"'{key}' given more than once in [{section.name}]",
                         path, hits[1].line, 1)
    if not hits:
        if required:
            raise InputError(f"[{section.name}] is missing '{key}'",
                             path, section.line, 1)
        return None
    return hits[0]


def _find_col(entry: _Entry, token: str) -> int:
    pos = entry.value.find(token)
    return entry.value_col + (pos if pos >= 0 else 0)


def _parse_int(entry: _Entry, path: str, minimum: Optional[int] = None) -> int:
    if not _INT_RE.match(entry.value):
        raise InputError(f"'{entry.key}' must be an integer, got "
                         f"{entry.value!r}", path, entry.line,
                         entry.value_col)
    n = int(entry.value)
    if minimum is not None and n < minimum:
        raise InputError(f"'{entry.key}' must be at least {minimum}",
                         path, entry.line, entry.value_col)
    return n


def _parse_names(entry: _Entry, path: str, what: str,
                 forbid_integers: bool = False) -> list[str]:
    names = [t.strip() for t in entry.value.split(",")]
    if any(not n for n in names):
        raise InputError(f"empty name in the {what} list", path, entry.line,
                         entry.value_col)
    seen = set()
    for n in names:
        if n in seen:
            raise InputError(f"duplicate {what} name {n!r}", path,
                             entry.line, _find_col(entry, n))
        seen.add(n)
        if forbid_integers and _INT_RE.match(n):
            raise InputError(
                f"{what} name {n!r} looks like an integer; integer tokens "
                "are reserved for coefficients", path, entry.line,
                _find_col(entry, n))
    return names


def _parse_combination(entry: _Entry, value: str, col0: int, path: str,
                       known: dict[str, int], what: str
                       ) -> list[tuple[int, list[str]]]:
    """Parse ``2*a*b - c + 3*d`` into signed coefficient/word terms.

    ``known`` maps valid factor names; a lone ``0`` denotes the empty
    combination.  Integer factors are only legal in leading position.
    """
    if value.strip() == "0":
        return []
    # split into signed terms, tracking offsets for error columns
    terms: list[tuple[int, str, int]] = []   # (sign, text, offset)
    sign, start, depth = 1, None, 0
    i = 0
    cleaned = value
    while i < len(cleaned):
        ch = cleaned[i]
        if ch in "+-" and (start is None or cleaned[start:i].strip()):
            if start is not None and cleaned[start:i].strip():
                terms.append((sign, cleaned[start:i], start))
            sign = 1 if ch == "+" else -1
            start = i + 1
        elif start is None and not ch.isspace():
            start = i
        i += 1
    if start is not None and cleaned[start:].strip():
        terms.append((sign, cleaned[start:], start))
    if not terms:
        raise InputError(f"empty {what}", path, entry.line, col0)
    out: list[tuple[int, list[str]]] = []
    for sgn, text, off in terms:
        factors = [t.strip() for t in text.split("*")]
        if any(not t for t in factors):
            raise InputError(f"dangling '*' in {what}", path, entry.line,
                             col0 + off)
        coeff = sgn
        word: list[str] = []
        for k, tok in enumerate(factors):
            if _INT_RE.match(tok):
                if word:
                    raise InputError(
                        "integer coefficients must come before the path, "
                        f"found {tok!r} after {word[-1]!r}", path,
                        entry.line, col0 + off + text.find(tok))
                coeff *= int(tok)
                continue
            if tok not in known:
                raise InputError(f"unknown name {tok!r} in {what}", path,
                                 entry.line, col0 + off + text.find(tok))
            word.append(tok)
        if not word:
            raise InputError(f"term without a name in {what}", path,
                             entry.line, col0 + off)
        out.append((coeff, word))
    return out


# ----------------------------------------------------------------------
# quiver section
# ----------------------------------------------------------------------

_ARROW_RE = re.compile(r"^(?P<name>[^:\s]+)\s*:\s*(?P<src>[^\s>]+)\s*->"
                       r"\s*(?P<tgt>\S+)$")


def _build_quiver(field: Field, section: _Section, path: str) -> Algebra:
    vent = _single(section, "vertices", path, required=True)
    vertices = _parse_names(vent, path, "vertex")
    vset = {v: i for i, v in enumerate(vertices)}
    arrows: list[tuple[str, str, str]] = []
    anames: dict[str, int] = {}
    relations: list[list[tuple[int, list[str]]]] = []
    for e in section.entries:
        if e.key == "arrow":
            m = _ARROW_RE.match(e.value)
            if not m:
                raise InputError(
                    "arrow must look like 'name: from -> to', got "
                    f"{e.value!r}", path, e.line, e.value_col)
            name, src, tgt = m.group("name"), m.group("src"), m.group("tgt")
            if _INT_RE.match(name):
                raise InputError(
                    f"arrow name {name!r} looks like an integer; integer "
                    "tokens are reserved for coefficients", path, e.line,
                    _find_col(e, name))
            if name in anames:
                raise InputError(f"duplicate arrow name {name!r}", path,
                                 e.line, _find_col(e, name))
            for end in (src, tgt):
                if end not in vset:
                    raise InputError(f"unknown vertex {end!r} in arrow "
                                     f"{name!r}", path, e.line,
                                     _find_col(e, end))
            anames[name] = len(arrows)
            arrows.append((name, src, tgt))
        elif e.key == "relation":
            relations.append(_parse_combination(
                e, e.value, e.value_col, path, anames, "relation"))
        elif e.key not in ("vertices", "max_path_len"):
            raise InputError(f"unknown key '{e.key}' in [quiver]", path,
                             e.line, 1)
    ment = _single(section, "max_path_len", path)
    max_len = _parse_int(ment, path, minimum=2) if ment else 12
    pres = QuiverPresentation(vertices=vertices, arrows=arrows,
                              relations=relations)
    try:
        return path_algebra(field, pres, max_path_len=max_len)
    except (AlgebraError, ValueError) as exc:
        raise InputError(f"quiver presentation rejected: {exc}", path,
                         section.line) from exc


# ----------------------------------------------------------------------
# table section
# ----------------------------------------------------------------------

def _build_table(field: Field, section: _Section, path: str) -> Algebra:
    bent = _single(section, "basis", path, required=True)
    labels = _parse_names(bent, path, "basis", forbid_integers=True)
    index = {lab: k for k, lab in enumerate(labels)}
    d = len(labels)

    def as_vector(entry: _Entry, value: str, col0: int, what: str):
        vec = field.zeros(d)
        for coeff, word in _parse_combination(entry, value, col0, path,
                                              index, what):
            if len(word) != 1:
                raise InputError(f"{what} must combine single basis labels, "
                                 f"got the product {'*'.join(word)!r}", path,
                                 entry.line, col0)
            k = index[word[0]]
            vec[k] = field.scalar(vec[k] + field.scalar(coeff))
        return field.normalize(vec)

    uent = _single(section, "unit", path, required=True)
    unit = as_vector(uent, uent.value, uent.value_col, "unit")
    mul = field.zeros((d, d, d))
    given = set()
    for e in section.entries:
        if e.key != "product":
            continue
        if "=" not in e.value:
            raise InputError("product must look like 'x * y = <combination>'",
                             path, e.line, e.value_col)
        lhs, rhs = e.value.split("=", 1)
        factors = [t.strip() for t in lhs.split("*")]
        if len(factors) != 2 or not all(factors):
            raise InputError("left side of a product must be exactly "
                             "'label * label'", path, e.line, e.value_col)
        for tok in factors:
            if tok not in index:
                raise InputError(f"unknown basis label {tok!r}", path,
                                 e.line, _find_col(e, tok))
        i, j = index[factors[0]], index[factors[1]]
        if (i, j) in given:
            raise InputError(f"product {factors[0]}*{factors[1]} given "
                             "twice", path, e.line, e.value_col)
        given.add((i, j))
        rhs_col = e.value_col + e.value.index("=") + 1
        mul[i, j] = as_vector(e, rhs, rhs_col, "product value")
    # single-label units act as identities on unspecified products
    unit_hits = [k for k in range(d) if unit[k] != field.zero]
    if len(unit_hits) == 1 and unit[unit_hits[0]] == field.one:
        u = unit_hits[0]
        for k in range(d):
            if (u, k) not in given:
                mul[u, k, k] = field.one
            if (k, u) not in given:
                mul[k, u, k] = field.one
    for e in section.entries:
        if e.key not in ("basis", "unit", "product", "idempotents"):
            raise InputError(f"unknown key '{e.key}' in [table]", path,
                             e.line, 1)
    try:
        alg = from_table(field, mul, unit, labels=labels)
    except AlgebraError as exc:
        raise InputError(
            f"table rejected: {exc} (supply a split quiver presentation "
            "if the algebra is defined over an extension field)", path,
            section.line) from exc
    ient = _single(section, "idempotents", path)
    if ient is not None:
        for name in _parse_names(ient, path, "idempotent"):
            if name not in index:
                raise InputError(f"unknown basis label {name!r}", path,
                                 ient.line, _find_col(ient, name))
            v = field.zeros(d)
            v[index[name]] = field.one
            sq = field.normalize(np.tensordot(np.tensordot(v, mul, axes=(0, 0)),
                                              v, axes=(0, 0)))
            if not bool(field.equal(sq, v)):
                raise InputError(f"declared idempotent {name!r} does not "
                                 "square to itself", path, ient.line,
                                 _find_col(ient, name))
    return alg


# ----------------------------------------------------------------------
# entry points
# ----------------------------------------------------------------------

def parse_algebra_text(text: str, path: str = "<input>"
                       ) -> tuple[str, Algebra]:
    """Parse the sectioned text format; returns ``(name, algebra)``."""
    sections = _split_sections(text, path)
    by_name: dict[str, _Section] = {}
    for s in sections:
        if s.name in by_name:
            raise InputError(f"section [{s.name}] appears twice", path,
                             s.line, 1)
        by_name[s.name] = s
    unknown = set(by_name) - {"algebra", "quiver", "table"}
    if unknown:
        s = by_name[sorted(unknown)[0]]
        raise InputError(f"unknown section [{s.name}]", path, s.line, 1)
    if "algebra" not in by_name:
        raise InputError("missing [algebra] section", path, sections[0].line,
                         1)
    head = by_name["algebra"]
    for e in head.entries:
        if e.key not in ("name", "field"):
            raise InputError(f"unknown key '{e.key}' in [algebra]", path,
                             e.line, 1)
    fent = _single(head, "field", path, required=True)
    p = _parse_int(fent, path, minimum=0)
    if p > 0:
        try:
            field = Field(p)
        except Exception as exc:
            raise InputError(f"invalid field characteristic {p}: {exc}",
                             path, fent.line, fent.value_col) from exc
    else:
        field = Field(0)
    nent = _single(head, "name", path)
    name = nent.value if nent else os.path.splitext(os.path.basename(path))[0]
    has_q, has_t = "quiver" in by_name, "table" in by_name
    if has_q == has_t:
        raise InputError("need exactly one of [quiver] or [table]", path,
                         sections[0].line, 1)
    if has_q:
        return name, _build_quiver(field, by_name["quiver"], path)
    return name, _build_table(field, by_name["table"], path)


def parse_algebra_file(path: str) -> tuple[str, Algebra]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read file: {exc.strerror or exc}", path)
    return parse_algebra_text(text, path)


# ----------------------------------------------------------------------
# serialization helpers
# ----------------------------------------------------------------------

def algebra_to_dict(a: Algebra, name: str = "") -> dict:
    """Deterministic JSON-ready summary of an algebra."""
    out = {
        "field": int(a.field.p),
        "dim": int(a.dim),
        "vertices": list(a.vertex_names),
        "labels": list(a.labels),
        "cartan": a.cartan_matrix().astype(int).tolist(),
        "arrow_counts": a.arrow_count_matrix().astype(int).tolist(),
        "radical_dim": int(a.radical_rows.shape[0]),
        "loewy_length": int(a.loewy_length()),
    }
    if name:
        out["name"] = name
    return out


def checks_to_list(checks) -> list[dict]:
    return [{"name": n, "ok": bool(o), "detail": str(d)}
            for n, o, d in checks]


def atomic_write(path: str, data: str) -> None:
    """Write text via a temp file and rename, so readers never see a
    partial report."""
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-report-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise
