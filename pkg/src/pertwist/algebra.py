"""Finite-dimensional associative algebras in vertex-graded coordinates.

An :class:`Algebra` is given by structure constants over an exact field
together with a complete set of orthogonal primitive idempotents ("vertices")
and a basis in which every basis element lives in a single Peirce component
``e_u * b * e_v``.  All constructions used downstream (path algebras with
admissible relations, opposites, corners, enveloping algebras, endomorphism
algebras of tilting complexes) either produce such a basis directly or are
re-based into one by :func:`from_table`.

The Jacobson radical is certified, not merely computed: every candidate is
checked to be a nilpotent two-sided ideal whose quotient is spanned by the
discovered orthogonal idempotents, which proves both inclusions.  Inputs whose
semisimple quotient is not a product of copies of the ground field are
rejected (`NotSplitBasicError`); the toolkit's scope is split basic algebras.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field

import numpy as np
import sympy

from . import linalg as la
from .linalg import Field, LinAlgError


class AlgebraError(Exception):
    """Base class for algebra construction/validation failures."""


class NotAssociativeError(AlgebraError):
    pass


class MalformedRelationError(AlgebraError):
    pass


class NotFiniteDimensionalError(AlgebraError):
    pass


class NotSplitBasicError(AlgebraError):
    pass


class NoSymmetricFormError(AlgebraError):
    pass


class Algebra:
    """Structure-constant algebra with a vertex-graded basis.

    Attributes:
        field: ground :class:`Field`.
        dim: vector-space dimension d.
        mul: (d, d, d) tensor, ``mul[i, j, :]`` = coordinates of ``b_i * b_j``.
        unit: coordinates of 1.
        labels: basis element names (for reports and serialization).
        vertex_names: names of the primitive orthogonal idempotents.
        idem: ``idem[v]`` = basis index of the idempotent ``e_v``.
        lv, rv: per-basis-element vertex indices with
            ``e_{lv[i]} * b_i * e_{rv[i]} == b_i``.
    """

    def __init__(self, field: Field, mul: np.ndarray, unit: np.ndarray,
                 labels: list[str], vertex_names: list[str], idem: list[int],
                 lv: np.ndarray, rv: np.ndarray,
                 radical_rows: np.ndarray | None = None,
                 sym_form: np.ndarray | None = None,
                 validate: bool = True):
        self.field = field
        self.mul = field.normalize(mul)
        self.unit = field.normalize(unit)
        self.dim = int(unit.shape[0])
        self.labels = list(labels)
        self.vertex_names = list(vertex_names)
        self.idem = list(idem)
        self.lv = np.asarray(lv, dtype=np.int64)
        self.rv = np.asarray(rv, dtype=np.int64)
        self._radical_rows = None if radical_rows is None else field.normalize(radical_rows)
        self.sym_form = None if sym_form is None else field.normalize(sym_form)
        self._cache: dict = {}
        if validate:
            self._validate_graded_structure()

    # ------------------------------------------------------------------
    # construction-time checks
    # ------------------------------------------------------------------

    def _validate_graded_structure(self) -> None:
        f, d = self.field, self.dim
        if self.mul.shape != (d, d, d):
            raise AlgebraError(f"structure tensor shape {self.mul.shape} != {(d, d, d)}")
        if len(self.labels) != d:
            raise AlgebraError("label count does not match dimension")
        if len(self.idem) != len(self.vertex_names):
            raise AlgebraError("idempotent index count does not match vertex count")
        # unit acts as identity on both sides
        lid = np.tensordot(self.unit, self.mul, axes=(0, 0))
        rid = np.tensordot(self.unit, self.mul, axes=(0, 1))
        eye = f.eye(d)
        if not (f.equal(f.normalize(lid), eye) and f.equal(f.normalize(rid), eye)):
            raise AlgebraError("unit vector does not act as a two-sided identity")
        # idempotents: complete orthogonal set of basis elements
        esum = f.zeros(d)
        for v, i in enumerate(self.idem):
            ei = self.basis_vector(i)
            esum = f.normalize(esum + ei)
            for w, j in enumerate(self.idem):
                prod = self.mul[i, j]
                want = self.basis_vector(i) if i == j else f.zeros(d)
                if not f.equal(f.normalize(np.array(prod)), want):
                    raise AlgebraError(
                        f"idempotents {self.vertex_names[v]}, {self.vertex_names[w]} "
                        "are not orthogonal idempotent basis elements")
        if not f.equal(esum, self.unit):
            raise AlgebraError("idempotents do not sum to the unit")
        # grading: e_{lv[i]} b_i = b_i = b_i e_{rv[i]}
        for i in range(d):
            li = self.idem[int(self.lv[i])]
            ri = self.idem[int(self.rv[i])]
            if not f.equal(f.normalize(np.array(self.mul[li, i])), self.basis_vector(i)):
                raise AlgebraError(f"basis element {self.labels[i]} not left-graded")
            if not f.equal(f.normalize(np.array(self.mul[i, ri])), self.basis_vector(i)):
                raise AlgebraError(f"basis element {self.labels[i]} not right-graded")

    def validate_associativity(self, max_full_dim: int = 24,
                               rng: np.random.Generator | None = None) -> None:
        """Check associativity of the structure tensor.

        Exhaustive for dimensions up to ``max_full_dim``; beyond that a seeded
        random sample of triples is used.
        """
        f, d, m = self.field, self.dim, self.mul
        if d <= max_full_dim:
            t1 = np.tensordot(m, m, axes=([2], [0]))        # (i,j,k,l)
            t2 = np.tensordot(m, m, axes=([2], [1]))        # (j,k,i,l)
            t2 = np.transpose(t2, (2, 0, 1, 3))
            if not f.equal(f.normalize(t1), f.normalize(t2)):
                raise NotAssociativeError("structure constants are not associative")
            return
        rng = rng or np.random.Generator(np.random.PCG64(0))
        for _ in range(200):
            i, j, k = (int(x) for x in rng.integers(0, d, size=3))
            left = self.multiply(f.normalize(np.array(m[i, j])), self.basis_vector(k))
            right = self.multiply(self.basis_vector(i), f.normalize(np.array(m[j, k])))
            if not f.equal(left, right):
                raise NotAssociativeError(
                    f"associativity fails on basis triple ({i}, {j}, {k})")

    # ------------------------------------------------------------------
    # elementary operations
    # ------------------------------------------------------------------

    def basis_vector(self, i: int) -> np.ndarray:
        v = self.field.zeros(self.dim)
        v[i] = self.field.one
        return v

    def idempotent_vector(self, v: int) -> np.ndarray:
        return self.basis_vector(self.idem[v])

    def multiply(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        a = np.tensordot(x, self.mul, axes=(0, 0))   # (j, k)
        return self.field.normalize(y @ a)

    def lmul(self, x: np.ndarray) -> np.ndarray:
        """Matrix of left multiplication: ``lmul(x) @ y == x * y``."""
        a = np.tensordot(x, self.mul, axes=(0, 0))   # (j, k)
        return self.field.normalize(a.T)

    def rmul(self, y: np.ndarray) -> np.ndarray:
        """Matrix of right multiplication: ``rmul(y) @ x == x * y``."""
        a = np.tensordot(y, self.mul, axes=(0, 1))   # (i, k)
        return self.field.normalize(a.T)

    def peirce_indices(self, u: int, v: int) -> list[int]:
        return [i for i in range(self.dim) if self.lv[i] == u and self.rv[i] == v]

    def left_ideal_indices(self, v: int) -> list[int]:
        """Basis indices of ``A e_v`` (elements right-graded at v)."""
        return [i for i in range(self.dim) if self.rv[i] == v]

    def right_ideal_indices(self, u: int) -> list[int]:
        """Basis indices of ``e_u A`` (elements left-graded at u)."""
        return [i for i in range(self.dim) if self.lv[i] == u]

    @property
    def n_vertices(self) -> int:
        return len(self.vertex_names)

    def __repr__(self) -> str:
        return (f"Algebra(dim={self.dim}, vertices={self.vertex_names}, "
                f"field={self.field!r})")

    # ------------------------------------------------------------------
    # radical
    # ------------------------------------------------------------------

    @property
    def radical_rows(self) -> np.ndarray:
        """Canonical row basis of the Jacobson radical (certified)."""
        if self._radical_rows is None:
            cand = _radical_candidate(self)
            _verify_nilpotent_ideal(self, cand)
            # quotient is spanned by the images of the known idempotents:
            # dim A / rad must equal the number of vertices.
            if cand.shape[0] != self.dim - self.n_vertices:
                raise AlgebraError(
                    "radical candidate dimension inconsistent with vertex count "
                    f"({cand.shape[0]} vs dim {self.dim} - {self.n_vertices} vertices)")
            self._radical_rows = cand
        return self._radical_rows

    def set_certified_radical(self, rows: np.ndarray, verify: bool = True) -> None:
        rows = la.row_space(self.field, self.field.normalize(rows))
        if verify:
            _verify_nilpotent_ideal(self, rows)
            if rows.shape[0] != self.dim - self.n_vertices:
                raise AlgebraError("supplied radical has wrong dimension")
        self._radical_rows = rows

    def rad_power_rows(self, k: int) -> np.ndarray:
        """Canonical row basis of ``rad^k`` (``k >= 1``)."""
        key = ("radpow", k)
        if key not in self._cache:
            if k == 1:
                self._cache[key] = self.radical_rows
            elif hasattr(self, "env_left"):
                # rad^k(B (x) A^op) = sum_{i+j=k} rad^i(B) (x) rad^j(A)
                lft, rgt = self.env_left, self.env_right
                f = self.field
                rows = []
                for i in range(k + 1):
                    lrows = (lft.rad_power_rows(i) if i
                             else np.stack([unit_vec(f, lft.dim, t)
                                            for t in range(lft.dim)]))
                    rrows = (rgt.rad_power_rows(k - i) if k - i
                             else np.stack([unit_vec(f, rgt.dim, t)
                                            for t in range(rgt.dim)]))
                    for r in lrows:
                        for s in rrows:
                            rows.append(np.outer(r, s).reshape(-1))
                self._cache[key] = (la.row_space(self.field, np.stack(rows))
                                    if rows else self.field.zeros((0, self.dim)))
            else:
                prev = self.rad_power_rows(k - 1)
                rad = self.radical_rows
                prods = [self.multiply(r, s) for r in prev for s in rad]
                if prods:
                    self._cache[key] = la.row_space(self.field, np.stack(prods))
                else:
                    self._cache[key] = self.field.zeros((0, self.dim))
        return self._cache[key]

    def loewy_length(self) -> int:
        """Smallest n with ``rad^n == 0``."""
        n = 1
        while self.rad_power_rows(n).shape[0] > 0:
            n += 1
        return n

    def arrow_rows(self) -> np.ndarray:
        """Lifts of a basis of ``rad / rad^2`` (the 'arrow space')."""
        key = "arrows"
        if key not in self._cache:
            rad = self.radical_rows
            rad2 = self.rad_power_rows(2)
            rows = []
            span = rad2
            for r in rad:
                if not la.in_span(self.field, span, r):
                    rows.append(r)
                    span = la.row_space(self.field, np.concatenate(
                        [span, r.reshape(1, -1)], axis=0))
            self._cache[key] = (np.stack(rows) if rows
                                else self.field.zeros((0, self.dim)))
        return self._cache[key]

    def generators(self) -> list[np.ndarray]:
        """Algebra generators: idempotents plus arrow-space lifts."""
        gens = [self.idempotent_vector(v) for v in range(self.n_vertices)]
        gens.extend(self.arrow_rows())
        return gens

    def semisimple_functionals(self) -> np.ndarray:
        """Matrix L with ``L[v] @ x`` = coefficient of ``e_v`` in ``x mod rad``."""
        key = "ssfun"
        if key not in self._cache:
            f, d = self.field, self.dim
            rad = self.radical_rows
            erows = np.stack([self.idempotent_vector(v) for v in range(self.n_vertices)])
            s = np.concatenate([rad, erows], axis=0)
            sinv = la.invert(f, s)
            self._cache[key] = sinv.T[d - self.n_vertices:, :]
        return self._cache[key]

    def cartan_matrix(self) -> np.ndarray:
        c = np.zeros((self.n_vertices, self.n_vertices), dtype=np.int64)
        for i in range(self.dim):
            c[self.lv[i], self.rv[i]] += 1
        return c

    def arrow_count_matrix(self) -> np.ndarray:
        """``a[u, v]`` = dim of the (u, v) component of rad / rad^2."""
        arrows = self.arrow_rows()
        a = np.zeros((self.n_vertices, self.n_vertices), dtype=np.int64)
        f = self.field
        rad2 = self.rad_power_rows(2)
        for u in range(self.n_vertices):
            for v in range(self.n_vertices):
                idx = self.peirce_indices(u, v)
                comp = []
                for r in arrows:
                    proj = f.zeros(self.dim)
                    proj[idx] = r[idx]
                    comp.append(proj)
                if not comp:
                    continue
                stacked = np.concatenate([rad2, np.stack(comp)], axis=0)
                a[u, v] = la.rank(f, stacked) - rad2.shape[0]
        return a

    def center_rows(self) -> np.ndarray:
        """Canonical row basis of the center."""
        key = "center"
        if key not in self._cache:
            d = self.dim
            t1 = np.transpose(self.mul, (1, 2, 0))       # [j,k,i] = M[i,j,k]
            t2 = np.transpose(self.mul, (0, 2, 1))       # [j,k,i] = M[j,i,k]
            c = self.field.normalize(t1 - t2).reshape(d * d, d)
            ker = la.kernel(self.field, c)
            self._cache[key] = la.row_space(self.field, ker.T)
        return self._cache[key]

    # ------------------------------------------------------------------
    # symmetrizing form
    # ------------------------------------------------------------------

    def gram(self, lam: np.ndarray) -> np.ndarray:
        """Bilinear form matrix ``G[i, j] = lam(b_i * b_j)``."""
        return self.field.normalize(np.tensordot(self.mul, lam, axes=(2, 0)))

    def trace_functional_space(self) -> np.ndarray:
        """Row basis of functionals with ``lam(ab) == lam(ba)``."""
        d = self.dim
        t1 = self.mul.reshape(d * d, d)
        t2 = np.transpose(self.mul, (1, 0, 2)).reshape(d * d, d)
        rows = self.field.normalize(t1 - t2)
        ker = la.kernel(self.field, rows)
        return la.row_space(self.field, ker.T)

    def find_symmetric_form(self, seed: int = 0, budget: int = 300):
        """Deterministically search for a nondegenerate symmetrizing form.

        Returns ``(lam, certainty)`` where certainty is ``"exhaustive"`` or
        ``"randomized"``; raises :class:`NoSymmetricFormError` if the search
        proves (exhaustively) or gives up (budget) that none was found.
        """
        if self.sym_form is not None:
            return self.sym_form, "cached"
        f = self.field
        space = self.trace_functional_space()
        s = space.shape[0]
        if s == 0:
            raise NoSymmetricFormError("no nonzero trace-symmetric functionals")

        def good(lam):
            return la.is_invertible(f, self.gram(lam))

        # 1. single basis functionals, then pairwise sums
        for r in space:
            if good(r):
                self.sym_form = r
                return r, "exhaustive" if s == 1 and f.p > 0 else "partial"
        # exhaustive over small finite coefficient spaces
        if f.p > 0 and f.p ** s <= 4096:
            for coeffs in itertools.product(range(f.p), repeat=s):
                if all(c == 0 for c in coeffs):
                    continue
                lam = f.normalize(f.asarray(list(coeffs)) @ space)
                if good(lam):
                    self.sym_form = lam
                    return lam, "exhaustive"
            raise NoSymmetricFormError(
                "exhaustive search: algebra admits no nondegenerate "
                "symmetrizing form")
        # all-ones, then seeded random combinations
        ones = f.normalize(f.asarray([1] * s) @ space)
        if good(ones):
            self.sym_form = ones
            return ones, "partial"
        rng = np.random.Generator(np.random.PCG64(seed))
        for _ in range(budget):
            coeffs = f.rand(rng, s)
            lam = f.normalize(coeffs @ space)
            if good(lam):
                self.sym_form = lam
                return lam, "randomized"
        raise NoSymmetricFormError(
            f"no nondegenerate symmetrizing form found within budget {budget}")

    def symmetric_structure(self):
        """Cached ``(lam, gram, gram_inv)`` for the symmetrizing form."""
        key = "symstruct"
        if key not in self._cache:
            lam, _ = self.find_symmetric_form()
            g = self.gram(lam)
            self._cache[key] = (lam, g, la.invert(self.field, g))
        return self._cache[key]


# ----------------------------------------------------------------------
# radical computation and certification
# ----------------------------------------------------------------------

def _trace_gram(alg: Algebra) -> np.ndarray:
    """Gram matrix of the regular trace form Tr(L_x L_y) on basis pairs."""
    return alg.field.normalize(
        np.tensordot(alg.mul, alg.mul, axes=([1, 2], [2, 1])))


def _charpoly_coeff(field: Field, mat: np.ndarray, q: int):
    """Coefficient of t^(n-q) in the characteristic polynomial of ``mat``."""
    cp = la.charpoly(field, mat)
    n = mat.shape[0]
    return cp[n - q]


def _radical_candidate(alg: Algebra) -> np.ndarray:
    """Radical candidate rows: trace form over Q, coefficient chain over F_p.

    Over F_p the chain refines the trace-form kernel using higher
    characteristic-polynomial coefficients ``c_{p^i}`` of products, evaluated
    in the regular representation; over the prime field these conditions are
    linear on each previous stage.  The caller certifies the result.
    """
    f, d = alg.field, alg.dim
    gram = _trace_gram(alg)
    ker = la.kernel(f, gram)
    rows = la.row_space(f, ker.T)
    if f.p == 0:
        return rows
    q = f.p
    while q <= d and rows.shape[0] > 0:
        s = rows.shape[0]
        lmats = [alg.lmul(rows[i]) for i in range(s)]
        sys = f.zeros((s, s))
        for a in range(s):
            for b in range(s):
                prod = f.matmul(lmats[a], lmats[b])
                sys[a, b] = _charpoly_coeff(f, prod, q)
        coeff_kernel = la.kernel(f, sys.T)     # vectors t with t @ sys == 0
        new_rows = f.matmul(coeff_kernel.T, rows)
        rows = la.row_space(f, new_rows)
        q *= f.p
    return rows


def _verify_nilpotent_ideal(alg: Algebra, rows: np.ndarray) -> None:
    """Certify that the row span is a nilpotent two-sided ideal."""
    f = alg.field
    if rows.shape[0] == 0:
        return
    for r in rows:
        for i in range(alg.dim):
            b = alg.basis_vector(i)
            if not la.in_span(f, rows, alg.multiply(b, r)):
                raise AlgebraError("radical candidate is not a left ideal")
            if not la.in_span(f, rows, alg.multiply(r, b)):
                raise AlgebraError("radical candidate is not a right ideal")
    cur = rows
    for _ in range(alg.dim + 1):
        if cur.shape[0] == 0:
            return
        prods = [alg.multiply(r, s) for r in cur for s in rows]
        cur = la.row_space(f, np.stack(prods))
    raise AlgebraError("radical candidate is not nilpotent")


# ----------------------------------------------------------------------
# building graded algebras from raw structure constants
# ----------------------------------------------------------------------

def _quotient_setup(alg_field: Field, dim: int, rad_rows: np.ndarray):
    """Projection onto a complement of the radical, in unit-vector coordinates.

    Returns ``(comp, proj)`` where ``comp`` lists coordinate indices forming a
    complement and ``proj`` maps an algebra vector to its quotient coordinates.
    """
    comp = la.complement_coords(alg_field, rad_rows, dim)
    erows = alg_field.zeros((len(comp), dim))
    for t, c in enumerate(comp):
        erows[t, c] = alg_field.one
    s = np.concatenate([rad_rows, erows], axis=0)
    sinv = la.invert(alg_field, s)
    proj = sinv.T[rad_rows.shape[0]:, :]
    return comp, proj


def _poly_roots_in_field(field: Field, coeffs: list):
    """Distinct roots in the ground field of a monic polynomial.

    Returns ``None`` if the polynomial has an irreducible factor of degree
    greater than 1 (not split), and raises if a repeated factor shows up.
    ``coeffs`` are low-to-high.
    """
    x = sympy.Symbol("x")
    if field.p == 0:
        expr = sum(sympy.Rational(str(c)) * x ** i for i, c in enumerate(coeffs))
        poly_in = sympy.Poly(expr, x, domain="QQ")
    else:
        expr = sum(int(c) * x ** i for i, c in enumerate(coeffs))
        poly_in = sympy.Poly(expr, x, modulus=field.p, symmetric=False)
    _, factors = poly_in.factor_list()
    roots = []
    for poly, mult in factors:
        if mult > 1:
            raise AlgebraError(
                "repeated eigenvalue in semisimple quotient; radical "
                "certification failed")
        if poly.degree() > 1:
            return None
        c1, c0 = poly.all_coeffs()
        if field.p == 0:
            from fractions import Fraction
            rat = sympy.Rational(-c0, c1)
            root = Fraction(int(rat.p), int(rat.q))
        else:
            root = (-int(c0) * pow(int(c1), -1, field.p)) % field.p
        roots.append(root)
    return sorted(roots, key=lambda r: (float(r) if field.p == 0 else int(r)))


def _split_quotient_idempotents(field: Field, qmul: np.ndarray, qunit: np.ndarray):
    """Complete set of primitive orthogonal idempotents of a commutative
    split semisimple algebra given by structure constants.

    Raises :class:`NotSplitBasicError` when the algebra is not a product of
    copies of the ground field.
    """
    qd = qunit.shape[0]

    def qmultiply(a, b):
        t = np.tensordot(a, qmul, axes=(0, 0))
        return field.normalize(b @ t)

    # commutativity check
    if not field.equal(field.normalize(qmul),
                       field.normalize(np.transpose(qmul, (1, 0, 2)))):
        raise NotSplitBasicError(
            "semisimple quotient is not commutative; the algebra is not basic")

    queue = [qunit]
    finished = []
    while queue:
        fv = queue.pop(0)
        # corner f * Abar * f
        corner_rows = []
        for i in range(qd):
            e = field.zeros(qd)
            e[i] = field.one
            corner_rows.append(qmultiply(qmultiply(fv, e), fv))
        corner = la.row_space(field, np.stack(corner_rows))
        c = corner.shape[0]
        if c == 1:
            finished.append(fv)
            continue
        split_done = False
        for z in corner:
            # matrix of multiplication-by-z on the corner, in corner row coords
            imgs = np.stack([qmultiply(z, corner[t]) for t in range(c)])
            coords = la.coords_in_rows(field, corner, imgs)
            if coords is None:
                raise AlgebraError("corner not closed under multiplication")
            mp = la.minpoly(field, coords.T)
            if len(mp) - 1 < 2:
                continue
            roots = _poly_roots_in_field(field, mp)
            if roots is None:
                raise NotSplitBasicError(
                    "semisimple quotient contains a proper field extension; "
                    "only split basic algebras are supported")
            # Lagrange projections onto the eigenspaces, inside the corner
            pieces = []
            for lam_i in roots:
                piece = fv
                for lam_j in roots:
                    if lam_j == lam_i:
                        continue
                    factor = field.normalize(z - field.normalize(lam_j * fv))
                    scale = field.inv_scalar(field.normalize(
                        field.scalar(lam_i) - field.scalar(lam_j)))
                    piece = field.normalize(qmultiply(piece, factor) * scale)
                pieces.append(piece)
            total = field.zeros(qd)
            for piece in pieces:
                if not field.equal(qmultiply(piece, piece), piece):
                    raise AlgebraError("projection is not idempotent")
                total = field.normalize(total + piece)
            if not field.equal(total, fv):
                raise AlgebraError("projections do not sum to the corner unit")
            queue.extend(pieces)
            split_done = True
            break
        if not split_done:
            raise NotSplitBasicError(
                "could not split a corner of the semisimple quotient; "
                "only split basic algebras are supported")
    return finished


def _lift_idempotents(alg_field: Field, dim: int, mul: np.ndarray,
                      unit: np.ndarray, rad_rows: np.ndarray,
                      qbars: list, comp, proj) -> list:
    """Lift orthogonal quotient idempotents to orthogonal idempotents."""

    def multiply(a, b):
        t = np.tensordot(a, mul, axes=(0, 0))
        return alg_field.normalize(b @ t)

    def embed(qvec):
        out = alg_field.zeros(dim)
        for t, c in enumerate(comp):
            out[c] = qvec[t]
        return out

    lifted: list = []
    for t, qbar in enumerate(qbars):
        if t == len(qbars) - 1:
            cand = unit.copy()
            for g in lifted:
                cand = alg_field.normalize(cand - g)
        else:
            partial = alg_field.zeros(dim)
            for g in lifted:
                partial = alg_field.normalize(partial + g)
            shield = alg_field.normalize(unit - partial)
            cand = multiply(multiply(shield, embed(qbar)), shield)
            for _ in range(2 * dim + 4):
                sq = multiply(cand, cand)
                if alg_field.equal(sq, cand):
                    break
                cube = multiply(sq, cand)
                cand = alg_field.normalize(3 * sq - 2 * cube)
        if not alg_field.equal(multiply(cand, cand), cand):
            raise AlgebraError("idempotent lifting failed to converge")
        if not alg_field.equal(alg_field.normalize(proj @ cand), alg_field.asarray(qbar)):
            raise AlgebraError("lifted idempotent has wrong image in the quotient")
        for g in lifted:
            z = alg_field.zeros(dim)
            if not (alg_field.equal(multiply(cand, g), z)
                    and alg_field.equal(multiply(g, cand), z)):
                raise AlgebraError("lifted idempotents are not orthogonal")
        lifted.append(cand)
    return lifted


def from_table(field: Field, mul, unit, labels: list[str] | None = None,
               vertex_names: list[str] | None = None) -> Algebra:
    """Build a graded :class:`Algebra` from raw structure constants.

    Validates associativity and the unit, certifies the radical, discovers and
    lifts a complete set of primitive orthogonal idempotents, and re-bases to
    a vertex-graded basis when the input basis is not already graded (in the
    graded case the input basis and labels are kept).
    """
    mul = field.asarray(mul)
    unit = field.asarray(unit)
    d = unit.shape[0]
    if labels is None:
        labels = [f"b{i}" for i in range(d)]
    probe = Algebra(field, mul, unit, labels, ["?"], [0],
                    np.zeros(d, dtype=np.int64), np.zeros(d, dtype=np.int64),
                    validate=False)
    probe.validate_associativity()
    lid = field.normalize(np.tensordot(unit, mul, axes=(0, 0)))
    rid = field.normalize(np.tensordot(unit, mul, axes=(0, 1)))
    if not (field.equal(lid, field.eye(d)) and field.equal(rid, field.eye(d))):
        raise AlgebraError("unit vector does not act as a two-sided identity")

    rad = _radical_candidate(probe)
    _verify_nilpotent_ideal(probe, rad)
    comp, proj = _quotient_setup(field, d, rad)
    qd = len(comp)

    def embed(qvec):
        out = field.zeros(d)
        for t, c in enumerate(comp):
            out[c] = qvec[t]
        return out

    # quotient structure constants
    qmul = field.zeros((qd, qd, qd))
    for a in range(qd):
        for b in range(qd):
            qmul[a, b] = field.normalize(proj @ probe.multiply(embed_unit(field, qd, a, embed),
                                                               embed_unit(field, qd, b, embed)))
    qunit = field.normalize(proj @ unit)
    qbars = _split_quotient_idempotents(field, qmul, qunit)
    if len(qbars) != qd:
        raise NotSplitBasicError(
            "quotient does not split into one-dimensional blocks")
    es = _lift_idempotents(field, d, mul, unit, rad, qbars, comp, proj)
    r = len(es)
    if vertex_names is None:
        vertex_names = [f"v{t + 1}" for t in range(r)]

    # try to keep the original basis: every basis vector must be graded and
    # every idempotent must be a basis vector
    idem_idx: list[int] = []
    for e in es:
        hits = [i for i in range(d)
                if field.equal(e, probe.basis_vector(i))]
        if len(hits) != 1:
            idem_idx = []
            break
        idem_idx.append(hits[0])
    graded = bool(idem_idx)
    lv = np.zeros(d, dtype=np.int64)
    rv = np.zeros(d, dtype=np.int64)
    if graded:
        for i in range(d):
            b = probe.basis_vector(i)
            hits = []
            for u in range(r):
                for v in range(r):
                    piece = probe.multiply(probe.multiply(es[u], b), es[v])
                    if field.equal(piece, b):
                        hits.append((u, v))
                    elif not field.equal(piece, field.zeros(d)):
                        hits.append(None)
            if len(hits) != 1 or hits[0] is None:
                graded = False
                break
            lv[i], rv[i] = hits[0]
    if graded:
        return Algebra(field, mul, unit, labels, vertex_names, idem_idx,
                       lv, rv, radical_rows=la.row_space(field, rad))

    # re-base to a graded basis: idempotents first, then Peirce components
    new_rows = []
    new_labels = []
    new_lv: list[int] = []
    new_rv: list[int] = []
    idem_idx = []
    for u in range(r):
        idem_idx.append(len(new_rows))
        new_rows.append(es[u])
        new_labels.append(f"e{vertex_names[u]}")
        new_lv.append(u)
        new_rv.append(u)
    for u in range(r):
        for v in range(r):
            pieces = [probe.multiply(probe.multiply(es[u], probe.basis_vector(i)), es[v])
                      for i in range(d)]
            comp_rows = la.row_space(field, np.stack(pieces))
            count = 0
            span = np.stack([row for t, row in enumerate(new_rows)
                             if new_lv[t] == u and new_rv[t] == v]) \
                if any(new_lv[t] == u and new_rv[t] == v for t in range(len(new_rows))) \
                else field.zeros((0, d))
            for row in comp_rows:
                if la.in_span(field, span, row):
                    continue
                new_rows.append(row)
                new_labels.append(f"g_{vertex_names[u]}_{vertex_names[v]}_{count}")
                new_lv.append(u)
                new_rv.append(v)
                count += 1
                span = np.concatenate([span, row.reshape(1, -1)], axis=0)
    if len(new_rows) != d:
        raise AlgebraError("Peirce re-basing produced wrong dimension")
    basis = np.stack(new_rows)
    basis_t = basis.T.copy()
    new_mul = field.zeros((d, d, d))
    for i in range(d):
        for j in range(d):
            prod = probe.multiply(basis[i], basis[j])
            coords = la.solve(field, basis_t, prod)
            if coords is None:
                raise AlgebraError("product escapes the re-based basis")
            new_mul[i, j] = coords
    new_unit = la.solve(field, basis_t, unit)
    rad_new = la.coords_in_rows(field, basis, rad) if rad.shape[0] else field.zeros((0, d))
    if rad.shape[0] and rad_new is None:
        raise AlgebraError("radical does not re-express in the new basis")
    return Algebra(field, new_mul, new_unit, new_labels, vertex_names, idem_idx,
                   np.asarray(new_lv), np.asarray(new_rv),
                   radical_rows=la.row_space(field, rad_new))


def embed_unit(field: Field, qd: int, a: int, embed):
    v = field.zeros(qd)
    v[a] = field.one
    return embed(v)


# ----------------------------------------------------------------------
# derived algebras: opposite, corner, enveloping
# ----------------------------------------------------------------------

def opposite(alg: Algebra) -> Algebra:
    """Opposite algebra on the same basis (grading sides swapped)."""
    mul_op = np.transpose(alg.mul, (1, 0, 2)).copy()
    out = Algebra(alg.field, mul_op, alg.unit.copy(), list(alg.labels),
                  list(alg.vertex_names), list(alg.idem),
                  alg.rv.copy(), alg.lv.copy(),
                  radical_rows=alg.radical_rows.copy(),
                  sym_form=None if alg.sym_form is None else alg.sym_form.copy(),
                  validate=False)
    out.op_of = alg
    return out


def corner(alg: Algebra, vertices: list[int],
           vertex_names: list[str] | None = None) -> Algebra:
    """Corner algebra ``e_J A e_J`` for a set J of vertices.

    The corner basis is the subset of the graded basis supported on J on both
    sides; multiplication, radical, and symmetrizing form restrict.
    """
    f = alg.field
    vset = sorted(set(vertices))
    if not vset or any(v < 0 or v >= alg.n_vertices for v in vset):
        raise AlgebraError(f"invalid vertex subset {vertices}")
    idx = [i for i in range(alg.dim)
           if alg.lv[i] in vset and alg.rv[i] in vset]
    pos = {g: t for t, g in enumerate(idx)}
    sub = f.normalize(np.array(alg.mul[np.ix_(idx, idx, idx)], copy=True))
    unit = f.zeros(len(idx))
    remap = {v: t for t, v in enumerate(vset)}
    idem = []
    for v in vset:
        unit[pos[alg.idem[v]]] = f.one
        idem.append(pos[alg.idem[v]])
    lv = np.asarray([remap[int(alg.lv[i])] for i in idx], dtype=np.int64)
    rv = np.asarray([remap[int(alg.rv[i])] for i in idx], dtype=np.int64)
    rad = alg.radical_rows
    rad_corner = la.row_space(f, rad[:, idx]) if rad.shape[0] else f.zeros((0, len(idx)))
    names = vertex_names or [alg.vertex_names[v] for v in vset]
    out = Algebra(f, sub, unit, [alg.labels[i] for i in idx], names, idem,
                  lv, rv, radical_rows=rad_corner,
                  sym_form=None if alg.sym_form is None else alg.sym_form[idx].copy(),
                  validate=False)
    out.corner_of = alg
    out.corner_vertices = vset
    out.corner_indices = idx
    return out


def enveloping(left: Algebra, right: Algebra, max_dim: int = 512) -> Algebra:
    """Enveloping-type tensor algebra ``left (x) right^op``.

    Basis pairs ``(i, j)`` at flat index ``i * dim(right) + j``; a left module
    over the result is exactly a (left, right)-bimodule.  Radical and
    symmetrizing form are inherited from the factors.
    """
    f = left.field
    if right.field != f:
        raise AlgebraError("enveloping factors must share a ground field")
    dl, dr = left.dim, right.dim
    d = dl * dr
    if d > max_dim:
        raise AlgebraError(
            f"enveloping algebra dimension {d} exceeds supported bound {max_dim}")
    big = np.multiply.outer(left.mul, right.mul)  # (i,k,m, l,j,n)
    big = np.transpose(big, (0, 4, 1, 3, 2, 5))   # (i,j,k,l,m,n)
    mul = f.normalize(big.reshape(d, d, d))
    unit = f.normalize(np.outer(left.unit, right.unit).reshape(-1))
    labels = [f"{left.labels[i]}(x){right.labels[j]}"
              for i in range(dl) for j in range(dr)]
    vertex_names = [f"{u}|{v}" for u in left.vertex_names
                    for v in right.vertex_names]
    idem = []
    for u in range(left.n_vertices):
        for v in range(right.n_vertices):
            idem.append(left.idem[u] * dr + right.idem[v])
    lv = np.empty(d, dtype=np.int64)
    rv = np.empty(d, dtype=np.int64)
    nrv = right.n_vertices
    for i in range(dl):
        for j in range(dr):
            lv[i * dr + j] = left.lv[i] * nrv + right.rv[j]
            rv[i * dr + j] = left.rv[i] * nrv + right.lv[j]
    rad_rows = []
    for r in left.radical_rows:
        for j in range(dr):
            rad_rows.append(np.outer(r, unit_vec(f, dr, j)).reshape(-1))
    for i in range(dl):
        for s in right.radical_rows:
            rad_rows.append(np.outer(unit_vec(f, dl, i), s).reshape(-1))
    rad = (la.row_space(f, np.stack(rad_rows)) if rad_rows
           else f.zeros((0, d)))
    sym = None
    if left.sym_form is not None and right.sym_form is not None:
        sym = f.normalize(np.outer(left.sym_form, right.sym_form).reshape(-1))
    out = Algebra(f, mul, unit, labels, vertex_names, idem, lv, rv,
                  radical_rows=rad, sym_form=sym, validate=False)
    out.env_left = left
    out.env_right = right
    return out


def unit_vec(field: Field, n: int, i: int) -> np.ndarray:
    v = field.zeros(n)
    v[i] = field.one
    return v


def tensor_vec(field: Field, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Coordinates of ``x (x) y`` in the flat pair basis."""
    return field.normalize(np.outer(x, y).reshape(-1))


def check_morphism(f_mat: np.ndarray, dom: Algebra, cod: Algebra,
                   generators: list[np.ndarray] | None = None) -> bool:
    """Whether a linear map (matrix on coordinates) is an algebra morphism.

    Checking multiplicativity on generators against the whole basis is sound:
    the set of x with ``f(x y) == f(x) f(y)`` for all y is a subalgebra.
    """
    fld = dom.field
    if not fld.equal(fld.matmul(f_mat, dom.unit.reshape(-1, 1)).reshape(-1),
                     cod.unit):
        return False
    gens = generators if generators is not None else dom.generators()
    for g in gens:
        fg = fld.matmul(f_mat, g.reshape(-1, 1)).reshape(-1)
        for i in range(dom.dim):
            lhs = fld.matmul(f_mat, dom.multiply(g, dom.basis_vector(i)).reshape(-1, 1)).reshape(-1)
            rhs = cod.multiply(fg, fld.matmul(f_mat, dom.basis_vector(i).reshape(-1, 1)).reshape(-1))
            if not fld.equal(lhs, rhs):
                return False
    return True


def is_automorphism(f_mat: np.ndarray, alg: Algebra) -> bool:
    return la.is_invertible(alg.field, f_mat) and check_morphism(f_mat, alg, alg)


# ----------------------------------------------------------------------
# path algebras of quivers with relations
# ----------------------------------------------------------------------

@dataclass
class QuiverPresentation:
    """A quiver with relations; paths compose left to right (``a*b`` = a then b)."""
    vertices: list[str]
    arrows: list[tuple[str, str, str]]          # (name, source, target)
    relations: list[list[tuple[object, list[str]]]] = dc_field(default_factory=list)

    def __post_init__(self):
        if len(set(self.vertices)) != len(self.vertices):
            raise MalformedRelationError("duplicate vertex names")
        names = [a[0] for a in self.arrows]
        if len(set(names)) != len(names):
            raise MalformedRelationError("duplicate arrow names")
        vset = set(self.vertices)
        for name, s, t in self.arrows:
            if s not in vset or t not in vset:
                raise MalformedRelationError(
                    f"arrow {name}: endpoint not a declared vertex")


def _path_label(pres: QuiverPresentation, vsrc: int, arrows: tuple) -> str:
    if not arrows:
        return f"e{pres.vertices[vsrc]}"
    names = [pres.arrows[a][0] for a in arrows]
    if all(len(n) == 1 for n in names):
        return "".join(names)
    return "*".join(names)


def path_algebra(field: Field, pres: QuiverPresentation,
                 max_path_len: int = 12, max_paths: int = 20000) -> Algebra:
    """Quotient of a path algebra by admissible relations.

    Args:
        field: ground field.
        pres: quiver and relations; every relation term must be a composable
            path of length at least 2, and all terms of one relation must be
            parallel (same source and target).
        max_path_len: truncation length for the path basis; the result is
            accepted only if twice the longest surviving path still fits, so
            products are provably reduced correctly.
        max_paths: guard against combinatorial explosion.

    Raises:
        NotFiniteDimensionalError: if paths keep growing past the truncation
            (raise ``max_path_len`` if the algebra is finite-dimensional).
        MalformedRelationError: for non-composable, non-parallel, or short
            relation terms.
    """
    nv = len(pres.vertices)
    vidx = {v: t for t, v in enumerate(pres.vertices)}
    aidx = {a[0]: t for t, a in enumerate(pres.arrows)}
    asrc = [vidx[a[1]] for a in pres.arrows]
    atgt = [vidx[a[2]] for a in pres.arrows]

    # enumerate paths: (source_vertex, tuple of arrow indices); target derived
    paths: list[tuple[int, tuple]] = [(v, ()) for v in range(nv)]
    frontier = list(paths)
    while frontier:
        nxt = []
        for (s, arr) in frontier:
            tgt = atgt[arr[-1]] if arr else s
            for a in range(len(pres.arrows)):
                if asrc[a] != tgt:
                    continue
                cand = (s, arr + (a,))
                if len(cand[1]) > max_path_len:
                    continue
                nxt.append(cand)
        paths.extend(nxt)
        if len(paths) > max_paths:
            raise NotFiniteDimensionalError(
                f"more than {max_paths} paths up to length {max_path_len}")
        frontier = nxt
    paths.sort(key=lambda p: (len(p[1]), p[0], p[1]))
    pindex = {p: t for t, p in enumerate(paths)}
    np_paths = len(paths)

    def ptgt(p):
        return atgt[p[1][-1]] if p[1] else p[0]

    # relations -> vectors over the path basis
    rel_vecs = []
    for rel in pres.relations:
        vec = field.zeros(np_paths)
        sig = None
        nonzero = False
        for coef, arrow_names in rel:
            c = field.scalar(coef)
            if c == field.zero:
                continue
            if len(arrow_names) < 2:
                raise MalformedRelationError(
                    f"relation term {arrow_names} has length < 2")
            try:
                arrs = tuple(aidx[n] for n in arrow_names)
            except KeyError as exc:
                raise MalformedRelationError(f"unknown arrow {exc}") from exc
            for x, y in zip(arrs, arrs[1:]):
                if atgt[x] != asrc[y]:
                    raise MalformedRelationError(
                        f"relation term {arrow_names} is not composable")
            p = (asrc[arrs[0]], arrs)
            if sig is None:
                sig = (p[0], ptgt(p))
            elif sig != (p[0], ptgt(p)):
                raise MalformedRelationError(
                    "relation terms are not parallel paths")
            if len(arrs) > max_path_len:
                raise NotFiniteDimensionalError(
                    f"relation term longer than max_path_len={max_path_len}")
            vec[pindex[p]] = field.normalize(vec[pindex[p]] + c)
            nonzero = True
        if nonzero:
            rel_vecs.append((vec, sig))

    # two-sided ideal spanned by u * rel * w, truncated at max_path_len
    ideal_rows = []
    for vec, (rs, rt) in rel_vecs:
        terms = [(t, paths[t]) for t in np.flatnonzero(
            np.array([x != field.zero for x in vec]))]
        maxlen = max(len(p[1]) for _, p in terms)
        for (us, uarr) in paths:
            if (atgt[uarr[-1]] if uarr else us) != rs:
                continue
            for (ws, warr) in paths:
                if ws != rt:
                    continue
                if len(uarr) + maxlen + len(warr) > max_path_len:
                    continue
                row = field.zeros(np_paths)
                ok = True
                for t, (ps, parr) in terms:
                    newp = (us, uarr + parr + warr)
                    if newp not in pindex:
                        ok = False
                        break
                    row[pindex[newp]] = vec[t]
                if ok:
                    ideal_rows.append(row)
    # eliminate with longest paths first so the quotient basis prefers
    # short paths (idempotents and arrows survive)
    order = sorted(range(np_paths), key=lambda t: (-len(paths[t][1]), t))
    inv_order = np.empty(np_paths, dtype=np.int64)
    for t, o in enumerate(order):
        inv_order[o] = t
    if ideal_rows:
        perm_rows = np.stack(ideal_rows)[:, order]
        red, piv = la.rref(field, perm_rows)
        red = red[:len(piv)]
    else:
        red = field.zeros((0, np_paths))
        piv = []
    pivot_paths = {order[c] for c in piv}
    basis_pos = [t for t in range(np_paths) if t not in pivot_paths]
    dim = len(basis_pos)
    maxb = max(len(paths[t][1]) for t in basis_pos)
    if 2 * maxb > max_path_len:
        raise NotFiniteDimensionalError(
            f"longest basis path has length {maxb} but truncation is "
            f"{max_path_len}; products may be unreduced "
            "(if the algebra is finite-dimensional, raise max_path_len)")

    # reduction of any path vector to quotient coordinates
    basis_of = {t: k for k, t in enumerate(basis_pos)}

    def reduce_vec(v: np.ndarray) -> np.ndarray:
        w = v[order].copy()
        if red.shape[0]:
            coeffs = w[list(piv)]
            if np.any(np.array([c != field.zero for c in coeffs])):
                w = field.normalize(w - coeffs @ red)
        out = field.zeros(dim)
        for k, t in enumerate(basis_pos):
            out[k] = w[inv_order[t]]
        return out

    # structure constants from concatenation + reduction
    mul = field.zeros((dim, dim, dim))
    for a, ta in enumerate(basis_pos):
        (s1, arr1) = paths[ta]
        t1 = ptgt(paths[ta])
        for b, tb in enumerate(basis_pos):
            (s2, arr2) = paths[tb]
            if t1 != s2:
                continue
            cat = (s1, arr1 + arr2)
            if cat not in pindex:
                raise NotFiniteDimensionalError(
                    "product path falls outside enumeration; raise max_path_len")
            v = field.zeros(np_paths)
            v[pindex[cat]] = field.one
            mul[a, b] = reduce_vec(v)
    unit = field.zeros(dim)
    idem = []
    for v in range(nv):
        t = pindex[(v, ())]
        if t not in basis_of:
            raise AlgebraError("a trivial path was eliminated by the relations")
        unit[basis_of[t]] = field.one
        idem.append(basis_of[t])
    labels = [_path_label(pres, paths[t][0], paths[t][1]) for t in basis_pos]
    lv = np.asarray([paths[t][0] for t in basis_pos], dtype=np.int64)
    rv = np.asarray([ptgt(paths[t]) for t in basis_pos], dtype=np.int64)
    rad_rows = []
    for k, t in enumerate(basis_pos):
        if len(paths[t][1]) >= 1:
            rad_rows.append(unit_vec(field, dim, k))
    rad = (la.row_space(field, np.stack(rad_rows)) if rad_rows
           else field.zeros((0, dim)))
    alg = Algebra(field, mul, unit, labels, list(pres.vertices), idem, lv, rv,
                  radical_rows=rad)
    alg.validate_associativity()
    alg.presentation = pres
    _verify_nilpotent_ideal(alg, rad)
    return alg
