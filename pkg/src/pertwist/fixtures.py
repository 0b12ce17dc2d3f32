"""Built-in example algebras used by the test suite and the CLI.

Four families:

* ``kxn``: truncated polynomial algebras k[x]/(x^(n+1)) — one vertex, one
  loop;
* ``a2_te``: two vertices joined by arrows both ways with zero-relations of
  length three (self-injective Nakayama of Loewy length 3);
* ``brauer_line_3``: three vertices on a line, arrows both ways, the two
  length-two cycles at the middle vertex identified and mixed length-two
  paths zero;
* ``kq8``: the group algebra of the quaternion group of order 8, entered as a
  raw multiplication table (exercises radical discovery and re-grading).

Every fixture is a symmetric split basic algebra over its stated fields.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import Algebra, QuiverPresentation, from_table, path_algebra
from .linalg import Field


def kxn_algebra(field: Field, n: int) -> Algebra:
    """Truncated polynomial algebra k[x]/(x^(n+1)), dimension n + 1."""
    if n < 1:
        raise ValueError("need n >= 1 so the relation has length >= 2")
    pres = QuiverPresentation(
        vertices=["1"],
        arrows=[("x", "1", "1")],
        relations=[[(1, ["x"] * (n + 1))]],
    )
    return path_algebra(field, pres, max_path_len=2 * (n + 1))


def a2_te_algebra(field: Field) -> Algebra:
    """Two-vertex symmetric Nakayama algebra with zero relations aba, bab."""
    pres = QuiverPresentation(
        vertices=["1", "2"],
        arrows=[("a", "1", "2"), ("b", "2", "1")],
        relations=[
            [(1, ["a", "b", "a"])],
            [(1, ["b", "a", "b"])],
        ],
    )
    return path_algebra(field, pres, max_path_len=6)


def brauer_line_3_algebra(field: Field) -> Algebra:
    """Line-shaped symmetric algebra on three vertices, dimension 10.

    Arrows a: 1->2, b: 2->1, c: 2->3, d: 3->2 with relations
    a*c = 0, d*b = 0, b*a = c*d.
    """
    pres = QuiverPresentation(
        vertices=["1", "2", "3"],
        arrows=[("a", "1", "2"), ("b", "2", "1"), ("c", "2", "3"), ("d", "3", "2")],
        relations=[
            [(1, ["a", "c"])],
            [(1, ["d", "b"])],
            [(1, ["b", "a"]), (-1, ["c", "d"])],
        ],
    )
    return path_algebra(field, pres, max_path_len=6)


QUATERNION_LABELS = ["1", "i", "i2", "i3", "j", "ij", "i2j", "i3j"]


def quaternion_table() -> np.ndarray:
    """8x8 index table of the quaternion group in the basis i^a j^b."""
    def idx(a: int, b: int) -> int:
        return (a % 4) + 4 * (b % 2)

    table = np.zeros((8, 8), dtype=np.int64)
    for a in range(4):
        for b in range(2):
            for c in range(4):
                for d in range(2):
                    sign_c = c if b == 0 else -c
                    carry = 2 * ((b + d) // 2)
                    table[idx(a, b), idx(c, d)] = idx(a + sign_c + carry, b + d)
    return table


def kq8_algebra(field: Field) -> Algebra:
    """Group algebra of the quaternion group of order 8 from its raw table."""
    table = quaternion_table()
    mul = np.zeros((8, 8, 8), dtype=np.int64)
    for g in range(8):
        for h in range(8):
            mul[g, h, table[g, h]] = 1
    unit = np.zeros(8, dtype=np.int64)
    unit[0] = 1
    return from_table(field, field.asarray(mul), field.asarray(unit),
                      labels=list(QUATERNION_LABELS), vertex_names=["1"])


@dataclass(frozen=True)
class FixtureSpec:
    """A named fixture: builder, legal characteristics, default vertex set J."""
    name: str
    build: object                 # (Field, **params) -> Algebra
    default_J: tuple[str, ...]    # vertex names
    params: dict


def _build_kxn(field: Field, n: int = 2) -> Algebra:
    return kxn_algebra(field, n)


def _build_a2te(field: Field) -> Algebra:
    return a2_te_algebra(field)


def _build_brauer(field: Field) -> Algebra:
    return brauer_line_3_algebra(field)


def _build_kq8(field: Field) -> Algebra:
    if field.p != 2:
        raise ValueError("the quaternion fixture is defined over GF(2)")
    return kq8_algebra(field)


def fixture_registry() -> dict[str, FixtureSpec]:
    return {
        "kxn": FixtureSpec("kxn", _build_kxn, ("1",), {"n": 2}),
        "a2_te": FixtureSpec("a2_te", _build_a2te, ("1", "2"), {}),
        "brauer_line_3": FixtureSpec("brauer_line_3", _build_brauer, ("1", "2"), {}),
        "kq8": FixtureSpec("kq8", _build_kq8, ("1",), {}),
    }


def parse_fixture_name(name: str):
    """Parse names like ``kxn_p3_n2``, ``brauer_line_3_p2``, ``kq8_p2``.

    Returns ``(spec, field, params)``.
    """
    reg = fixture_registry()
    parts = name.split("_")
    base = None
    for key in sorted(reg, key=len, reverse=True):
        if name == key or name.startswith(key + "_"):
            base = key
            break
    if base is None:
        raise ValueError(f"unknown fixture {name!r}; known: {sorted(reg)}")
    spec = reg[base]
    rest = [s for s in name[len(base):].split("_") if s]
    p = None
    params = dict(spec.params)
    for tok in rest:
        if tok.startswith("p") and tok[1:].isdigit():
            p = int(tok[1:])
        elif tok.startswith("n") and tok[1:].isdigit():
            params["n"] = int(tok[1:])
        else:
            raise ValueError(f"unrecognized fixture modifier {tok!r} in {name!r}")
    if p is None:
        raise ValueError(f"fixture name {name!r} must carry a characteristic "
                         "suffix like _p2")
    field = Field(p)
    return spec, field, params


def build_fixture(name: str) -> tuple[Algebra, list[int]]:
    """Build a fixture algebra and its default J as vertex indices."""
    spec, field, params = parse_fixture_name(name)
    alg = spec.build(field, **params)
    J = [alg.vertex_names.index(v) for v in spec.default_J]
    return alg, J
