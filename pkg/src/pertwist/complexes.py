"""Bounded cochain complexes of modules with the calculus used downstream:
shift, cone, tensor over an algebra, Hom complex, homology, chain maps
modulo homotopy, and linear duals of bimodule complexes.

Sign conventions (fixed once, used consistently by every constructor):

* shift: ``X[1]^i = X^{i+1}`` with all differentials negated;
* cone(f): ``cone^i = X^{i+1} ⊕ Y^i`` with ``d(x, y) = (−dx, f(x) + dy)``;
* tensor: ``d(x ⊗ y) = dx ⊗ y + (−1)^{deg x} x ⊗ dy`` (left degree rules);
* hom: ``(d h) = d_Y ∘ h − (−1)^n h ∘ d_X`` for h of degree n;
* dual: ``(X^*)^n = (X^{−n})^*`` with ``d^n_* = (−1)^{n+1} (d^{−n−1})^*``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg as la
from .algebra import Algebra
from .modules import (Module, ModuleMap, hom_space, is_isomorphic,
                      env_dual, tensor_over, trivial_algebra, IsoResult,
                      IsoKind, sum_maps)


class ComplexError(Exception):
    pass


class Complex:
    """Bounded cochain complex; terms stored sparsely by degree."""

    def __init__(self, algebra: Algebra, terms: dict[int, Module],
                 diffs: dict[int, np.ndarray], check: bool = True):
        self.algebra = algebra
        self.field = algebra.field
        self.terms = {i: t for i, t in terms.items() if t.dim > 0}
        self.diffs = {}
        for i, d in diffs.items():
            if i in self.terms and (i + 1) in self.terms:
                self.diffs[i] = algebra.field.normalize(d)
        if check:
            self.validate()

    # -- accessors -------------------------------------------------------

    @property
    def degrees(self) -> list[int]:
        return sorted(self.terms)

    @property
    def lo(self) -> int:
        return min(self.terms) if self.terms else 0

    @property
    def hi(self) -> int:
        return max(self.terms) if self.terms else 0

    def term(self, i: int) -> Module:
        return self.terms.get(i) or Module.zero(self.algebra)

    def dim(self, i: int) -> int:
        return self.terms[i].dim if i in self.terms else 0

    def diff(self, i: int) -> np.ndarray:
        if i in self.diffs:
            return self.diffs[i]
        return self.field.zeros((self.dim(i + 1), self.dim(i)))

    def dims_by_degree(self) -> dict[int, int]:
        return {i: t.dim for i, t in sorted(self.terms.items())}

    def is_zero(self) -> bool:
        return not self.terms

    def euler_characteristic(self) -> int:
        return sum((-1) ** i * t.dim for i, t in self.terms.items())

    def validate(self) -> None:
        f = self.field
        for i, d in self.diffs.items():
            if d.shape != (self.dim(i + 1), self.dim(i)):
                raise ComplexError(f"differential at degree {i} has shape "
                                   f"{d.shape}, expected "
                                   f"{(self.dim(i + 1), self.dim(i))}")
            mm = ModuleMap(self.term(i), self.term(i + 1), d)
            if not mm.check():
                raise ComplexError(f"differential at degree {i} is not a "
                                   "module map")
        for i in self.diffs:
            if (i + 1) in self.diffs:
                prod = f.matmul(self.diffs[i + 1], self.diffs[i])
                if not f.equal(prod, f.zeros(prod.shape)):
                    raise ComplexError(f"d² != 0 between degrees {i} and {i + 2}")

    # -- constructors ----------------------------------------------------

    @classmethod
    def from_module(cls, m: Module, degree: int = 0) -> "Complex":
        return cls(m.algebra, {degree: m}, {}, check=False)

    @classmethod
    def zero(cls, algebra: Algebra) -> "Complex":
        return cls(algebra, {}, {}, check=False)

    def shift(self, n: int) -> "Complex":
        sign = self.field.scalar((-1) ** n)
        terms = {i - n: t for i, t in self.terms.items()}
        diffs = {i - n: self.field.normalize(sign * d)
                 for i, d in self.diffs.items()}
        return Complex(self.algebra, terms, diffs, check=False)


@dataclass
class DenseChainMap:
    source: Complex
    target: Complex
    mats: dict[int, np.ndarray]

    def mat(self, i: int) -> np.ndarray:
        if i in self.mats:
            return self.mats[i]
        f = self.source.field
        return f.zeros((self.target.dim(i), self.source.dim(i)))

    def check(self) -> bool:
        f = self.source.field
        degrees = set(self.source.terms) | set(self.target.terms)
        for i in sorted(degrees):
            lhs = f.matmul(self.target.diff(i), self.mat(i))
            rhs = f.matmul(self.mat(i + 1), self.source.diff(i))
            if not f.equal(lhs, rhs):
                return False
            mm = ModuleMap(self.source.term(i), self.target.term(i), self.mat(i))
            if not mm.check():
                return False
        return True

    def is_isomorphism(self) -> bool:
        f = self.source.field
        for i in set(self.source.terms) | set(self.target.terms):
            if self.source.dim(i) != self.target.dim(i):
                return False
            if not la.is_invertible(f, self.mat(i)):
                return False
        return True


def cone(f_map: DenseChainMap) -> tuple[Complex, DenseChainMap, DenseChainMap]:
    """Mapping cone with the canonical inclusion of the target and
    projection onto the shifted source."""
    x, y = f_map.source, f_map.target
    fld = x.field
    alg = x.algebra
    terms: dict[int, Module] = {}
    degs = set()
    for i in x.terms:
        degs.add(i - 1)
    degs |= set(y.terms)
    for i in sorted(degs):
        parts = []
        if x.dim(i + 1):
            parts.append(x.term(i + 1))
        if y.dim(i):
            parts.append(y.term(i))
        if parts:
            terms[i] = Module.direct_sum(alg, parts)
    diffs: dict[int, np.ndarray] = {}
    for i in sorted(degs):
        rows = x.dim(i + 2) + y.dim(i + 1)
        cols = x.dim(i + 1) + y.dim(i)
        if rows == 0 or cols == 0:
            continue
        d = fld.zeros((rows, cols))
        if x.dim(i + 2) and x.dim(i + 1):
            d[:x.dim(i + 2), :x.dim(i + 1)] = fld.normalize(-x.diff(i + 1))
        if y.dim(i + 1) and x.dim(i + 1):
            d[x.dim(i + 2):, :x.dim(i + 1)] = f_map.mat(i + 1)
        if y.dim(i + 1) and y.dim(i):
            d[x.dim(i + 2):, x.dim(i + 1):] = y.diff(i)
        diffs[i] = d
    c = Complex(alg, terms, diffs, check=False)
    inc_mats = {}
    proj_mats = {}
    for i in sorted(degs):
        total = x.dim(i + 1) + y.dim(i)
        if total == 0:
            continue
        inc = fld.zeros((total, y.dim(i)))
        if y.dim(i):
            inc[x.dim(i + 1):, :] = fld.eye(y.dim(i))
        inc_mats[i] = inc
        pr = fld.zeros((x.dim(i + 1), total))
        if x.dim(i + 1):
            pr[:, :x.dim(i + 1)] = fld.eye(x.dim(i + 1))
        proj_mats[i] = pr
    return (c, DenseChainMap(y, c, inc_mats),
            DenseChainMap(c, x.shift(1), proj_mats))


def homology(x: Complex, i: int) -> Module:
    """H^i = ker d^i / im d^{i−1} with the induced action."""
    f = x.field
    if x.dim(i) == 0:
        return Module.zero(x.algebra)
    zrows = la.kernel(f, x.diff(i)).T.copy()
    z = Module.from_invariant_rows(x.term(i), zrows, check=False) \
        if zrows.shape[0] else Module.zero(x.algebra)
    if zrows.shape[0] == 0:
        return z
    brows_full = la.row_space(f, x.diff(i - 1).T) if x.dim(i - 1) else \
        f.zeros((0, x.dim(i)))
    if brows_full.shape[0] == 0:
        return z
    bcoords = la.coords_in_rows(f, zrows, brows_full)
    if bcoords is None:
        raise ComplexError("image does not lie inside the kernel")
    return z.quotient_by_rows(bcoords)


def homology_dims(x: Complex) -> dict[int, int]:
    out = {}
    for i in range(x.lo, x.hi + 1):
        h = homology(x, i)
        if h.dim:
            out[i] = h.dim
    return out


def tensor_complexes(a: Algebra, x: Complex, y: Complex) -> Complex:
    """Total complex of the degreewise tensor over ``a`` with Koszul signs."""
    f = x.field
    pairs: dict[tuple[int, int], tuple[Module, np.ndarray, np.ndarray]] = {}
    owner = None
    for p in x.terms:
        for q in y.terms:
            t, proj, embed = tensor_over(a, x.term(p), y.term(q))
            pairs[(p, q)] = (t, proj, embed)
            owner = t.algebra
    if owner is None:
        return Complex.zero(trivial_algebra(f))
    # group by total degree
    offs: dict[tuple[int, int], int] = {}
    terms: dict[int, Module] = {}
    order: dict[int, list[tuple[int, int]]] = {}
    for n in sorted({p + q for (p, q) in pairs}):
        keys = sorted([k for k in pairs if k[0] + k[1] == n])
        mods = [pairs[k][0] for k in keys]
        off = 0
        for k, m in zip(keys, mods):
            offs[k] = off
            off += m.dim
        if off:
            terms[n] = Module.direct_sum(owner, mods)
            order[n] = keys
    diffs: dict[int, np.ndarray] = {}
    for n in sorted(terms):
        if (n + 1) not in terms:
            continue
        d = f.zeros((terms[n + 1].dim, terms[n].dim))
        wrote = False
        for (p, q) in order[n]:
            tm, proj, embed = pairs[(p, q)]
            if tm.dim == 0:
                continue
            # horizontal component d_x ⊗ id
            if (p + 1, q) in pairs and pairs[(p + 1, q)][0].dim:
                t2, proj2, _ = pairs[(p + 1, q)]
                big = np.kron(x.diff(p), f.eye(y.dim(q)))
                mat = f.normalize(proj2 @ f.normalize(big @ embed))
                d[offs[(p + 1, q)]:offs[(p + 1, q)] + t2.dim,
                  offs[(p, q)]:offs[(p, q)] + tm.dim] = mat
                wrote = True
            # vertical component (−1)^p id ⊗ d_y
            if (p, q + 1) in pairs and pairs[(p, q + 1)][0].dim:
                t2, proj2, _ = pairs[(p, q + 1)]
                big = np.kron(f.eye(x.dim(p)), y.diff(q))
                sign = f.scalar((-1) ** p)
                mat = f.normalize(sign * f.normalize(proj2 @ f.normalize(big @ embed)))
                d[offs[(p, q + 1)]:offs[(p, q + 1)] + t2.dim,
                  offs[(p, q)]:offs[(p, q)] + tm.dim] = mat
                wrote = True
        if wrote:
            diffs[n] = d
    return Complex(owner, terms, diffs, check=False)


def _linear_hom_basis(m: Module, n: Module) -> list[np.ndarray]:
    """All linear maps when the target lives over the trivial algebra."""
    f = m.field
    out = []
    for r in range(n.dim):
        for c in range(m.dim):
            mt = f.zeros((n.dim, m.dim))
            mt[r, c] = f.one
            out.append(mt)
    return out


def hom_complex(x: Complex, y: Complex) -> tuple[Complex, dict]:
    """Hom total complex; terms are plain vector spaces.

    Returns (complex, bases) where bases[(n, p)] is the list of matrices
    spanning Hom(x^p, y^{p+n}) used as coordinates.
    """
    f = x.field
    triv = trivial_algebra(f)
    y_trivial = y.algebra.dim == 1
    bases: dict[tuple[int, int], list[np.ndarray]] = {}
    degs = set()
    for p in x.terms:
        for q in y.terms:
            n = q - p
            if y_trivial:
                basis = _linear_hom_basis(x.term(p), y.term(q))
            else:
                basis = [h.matrix for h in hom_space(x.term(p), y.term(q))]
            if basis:
                bases[(n, p)] = basis
                degs.add(n)
    terms: dict[int, Module] = {}
    offs: dict[tuple[int, int], int] = {}
    order: dict[int, list[int]] = {}
    for n in sorted(degs):
        ps = sorted(p for (nn, p) in bases if nn == n)
        off = 0
        for p in ps:
            offs[(n, p)] = off
            off += len(bases[(n, p)])
        terms[n] = Module(triv, f.eye(off).reshape(1, off, off))
        order[n] = ps
    diffs: dict[int, np.ndarray] = {}
    for n in sorted(terms):
        if (n + 1) not in terms:
            continue
        d = f.zeros((terms[n + 1].dim, terms[n].dim))
        sign = f.scalar((-1) ** n)
        for p in order[n]:
            for k, h in enumerate(bases[(n, p)]):
                col = offs[(n, p)] + k
                # d_y ∘ h lands in slot (n+1, p)
                if (n + 1, p) in bases:
                    img = f.matmul(y.diff(p + n), h)
                    coords = _coords_in_matrix_basis(f, bases[(n + 1, p)], img)
                    if coords is None:
                        raise ComplexError("hom differential escapes basis")
                    d[offs[(n + 1, p)]:offs[(n + 1, p)] + len(bases[(n + 1, p)]),
                      col] = f.normalize(d[offs[(n + 1, p)]:
                                           offs[(n + 1, p)] + len(bases[(n + 1, p)]),
                                           col] + coords)
                # −(−1)^n h ∘ d_x lands in slot (n+1, p−1)
                if (n + 1, p - 1) in bases and x.dim(p - 1):
                    img = f.normalize(-sign * f.matmul(h, x.diff(p - 1)))
                    coords = _coords_in_matrix_basis(f, bases[(n + 1, p - 1)], img)
                    if coords is None:
                        raise ComplexError("hom differential escapes basis")
                    sl = offs[(n + 1, p - 1)]
                    ln = len(bases[(n + 1, p - 1)])
                    d[sl:sl + ln, col] = f.normalize(d[sl:sl + ln, col] + coords)
        diffs[n] = d
    return Complex(triv, terms, diffs, check=False), bases


def _coords_in_matrix_basis(f, basis: list[np.ndarray], mat: np.ndarray):
    stacked = np.stack([b.reshape(-1) for b in basis], axis=0)
    coords = la.coords_in_rows(f, stacked, mat.reshape(1, -1).copy())
    return None if coords is None else coords[0]


def dual_complex(x: Complex, dual_env: Algebra) -> Complex:
    """Linear dual of a bimodule complex: (X*)^n = (X^{−n})* with the sign
    convention d* = (−1)^{n+1} (d^{−n−1})^T in coordinate dual bases."""
    f = x.field
    terms = {}
    for i, t in x.terms.items():
        terms[-i] = env_dual(t, dual_env)
    diffs = {}
    for i, d in x.diffs.items():
        n = -i - 1
        sign = f.scalar((-1) ** (n + 1))
        diffs[n] = f.normalize(sign * d.T.copy())
    return Complex(dual_env, terms, diffs, check=False)


# ----------------------------------------------------------------------
# chain maps and homotopy
# ----------------------------------------------------------------------

def chain_map_space(x: Complex, y: Complex,
                    intertwine: bool = True) -> list[DenseChainMap]:
    """Basis of degreewise module-map collections commuting with d."""
    f = x.field
    degrees = sorted(set(x.terms) | set(y.terms))
    slots: list[tuple[int, list[np.ndarray]]] = []
    for i in degrees:
        if x.dim(i) == 0 or y.dim(i) == 0:
            continue
        if intertwine:
            basis = [h.matrix for h in hom_space(x.term(i), y.term(i))]
        else:
            basis = _linear_hom_basis(x.term(i), y.term(i))
        if basis:
            slots.append((i, basis))
    if not slots:
        return []
    offs = {}
    total = 0
    for i, basis in slots:
        offs[i] = (total, len(basis))
        total += len(basis)
    rows = []
    for i in degrees:
        # constraint in degree i -> i+1: d_y f_i − f_{i+1} d_x = 0
        rdim = y.dim(i + 1) * x.dim(i)
        if rdim == 0:
            continue
        block = f.zeros((rdim, total))
        wrote = False
        if i in offs:
            st, ln = offs[i]
            for k, h in enumerate(_slot_basis(slots, i)):
                block[:, st + k] = f.matmul(y.diff(i), h).reshape(-1)
            wrote = True
        if (i + 1) in offs:
            st, ln = offs[i + 1]
            for k, h in enumerate(_slot_basis(slots, i + 1)):
                block[:, st + k] = f.normalize(
                    block[:, st + k] - f.matmul(h, x.diff(i)).reshape(-1))
            wrote = True
        if wrote:
            rows.append(block)
    if rows:
        system = np.concatenate(rows, axis=0)
        ker = la.kernel(f, system)
    else:
        ker = f.eye(total)
    out = []
    for t in range(ker.shape[1]):
        mats = {}
        for i, basis in slots:
            st, ln = offs[i]
            mats[i] = sum_maps(f, ker[st:st + ln, t], basis)
        out.append(DenseChainMap(x, y, mats))
    return out


def _slot_basis(slots, i):
    for j, basis in slots:
        if j == i:
            return basis
    return []


def _flatten_chain_map(cm: DenseChainMap, degrees) -> np.ndarray:
    f = cm.source.field
    vecs = []
    for i in degrees:
        m = cm.mat(i)
        if m.size:
            vecs.append(m.reshape(-1))
    return np.concatenate(vecs) if vecs else f.zeros(0)


def chain_maps_mod_homotopy(x: Complex, y: Complex
                            ) -> tuple[list[DenseChainMap], list[DenseChainMap]]:
    """(representatives, null_homotopic_basis) for Hom_{K^b}(x, y)."""
    f = x.field
    maps = chain_map_space(x, y)
    degrees = sorted(set(x.terms) | set(y.terms))
    # homotopies: collections h^i : x^i -> y^{i-1}; boundary dh + hd
    null_maps: list[DenseChainMap] = []
    for i in degrees:
        if x.dim(i) == 0 or y.dim(i - 1) == 0:
            continue
        for h in hom_space(x.term(i), y.term(i - 1)):
            mats = {}
            m1 = f.matmul(y.diff(i - 1), h.matrix)
            if m1.size:
                mats[i] = m1
            m2 = f.matmul(h.matrix, x.diff(i - 1))
            if m2.size:
                mats[i - 1] = m2
            null_maps.append(DenseChainMap(x, y, mats))
    if not maps:
        return [], null_maps
    null_rows = [_flatten_chain_map(nm, degrees) for nm in null_maps]
    null_span = la.row_space(f, np.stack(null_rows)) if null_rows else \
        f.zeros((0, _flatten_chain_map(maps[0], degrees).shape[0]))
    reps = []
    span = null_span
    for cm in maps:
        vec = _flatten_chain_map(cm, degrees)
        if not la.in_span(f, span, vec):
            reps.append(cm)
            span = la.row_space(f, np.concatenate(
                [span, vec.reshape(1, -1)], axis=0))
    return reps, null_maps


def iso_of_complexes(x: Complex, y: Complex, seed: int = 0, budget: int = 200,
                     exhaustive_limit: int = 4096) -> IsoResult:
    """Search for an isomorphism of complexes (no homotopy allowed)."""
    f = x.field
    for i in set(x.terms) | set(y.terms):
        if x.dim(i) != y.dim(i):
            return IsoResult(IsoKind.NO,
                             obstruction=f"degree {i}: dim {x.dim(i)} != {y.dim(i)}")
    maps = chain_map_space(x, y)
    if not maps:
        if not x.terms and not y.terms:
            return IsoResult(IsoKind.ISO)
        return IsoResult(IsoKind.NO, obstruction="no chain maps at all")

    def invertible(cm):
        return cm.is_isomorphism()

    for cm in maps:
        if invertible(cm):
            return IsoResult(IsoKind.ISO, witness=cm)
    for a in range(len(maps)):
        for b in range(a + 1, len(maps)):
            cand = _combine(f, x, y, [f.one, f.one], [maps[a], maps[b]])
            if invertible(cand):
                return IsoResult(IsoKind.ISO, witness=cand)
    h = len(maps)
    if f.p > 0 and f.p ** h <= exhaustive_limit:
        import itertools
        for coeffs in itertools.product(range(f.p), repeat=h):
            cand = _combine(f, x, y, [f.scalar(c) for c in coeffs], maps)
            if invertible(cand):
                return IsoResult(IsoKind.ISO, witness=cand)
        return IsoResult(IsoKind.NO,
                         obstruction="exhaustive chain-map search failed")
    rng = np.random.Generator(np.random.PCG64(seed))
    for _ in range(budget):
        coeffs = f.rand(rng, h)
        cand = _combine(f, x, y, list(coeffs), maps)
        if invertible(cand):
            return IsoResult(IsoKind.ISO, witness=cand)
    return IsoResult(IsoKind.UNDETERMINED,
                     obstruction=f"no invertible chain map in {budget} tries")


def _combine(f, x, y, coeffs, maps) -> DenseChainMap:
    mats = {}
    for i in set(x.terms) | set(y.terms):
        pieces = [cm.mat(i) for cm in maps]
        if pieces and pieces[0].size:
            mats[i] = sum_maps(f, coeffs, pieces)
    return DenseChainMap(x, y, mats)
