"""Finite-dimensional left modules; bimodules live as modules over an
enveloping-type tensor algebra.

A :class:`Module` stores one action matrix per algebra basis element
(column action: vectors are columns, ``rho(a) @ v`` is the action of the
element with coordinate vector ``a``).  Validation and Hom-space systems run
over algebra *generators* (idempotents plus arrow lifts), which is sound: the
set of elements acting compatibly is a unital subalgebra.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
import sympy

from . import linalg as la
from .algebra import Algebra, AlgebraError, tensor_vec
from .linalg import Field


class ModuleError(Exception):
    pass


class Module:
    """Left module given by per-basis-element action matrices (d, m, m)."""

    def __init__(self, algebra: Algebra, act: np.ndarray, validate: bool = False):
        self.algebra = algebra
        self.field = algebra.field
        self.act = algebra.field.normalize(act)
        if self.act.shape[0] != algebra.dim or self.act.shape[1] != self.act.shape[2]:
            raise ModuleError(f"bad action tensor shape {self.act.shape}")
        self.dim = int(self.act.shape[1])
        if validate:
            self.validate()

    def validate(self) -> None:
        f = self.field
        if not f.equal(self.rho(self.algebra.unit), f.eye(self.dim)):
            raise ModuleError("unit does not act as the identity")
        for g in self.algebra.generators():
            rg = self.rho(g)
            # all products g * b_i at once: column i of lmul(g) holds g * b_i
            lg = self.algebra.lmul(g)
            prod_elems = f.normalize(np.tensordot(lg, self.act, axes=(0, 0)))
            via_mats = _batched_matmul(f, rg, self.act)
            if not f.equal(prod_elems, via_mats):
                raise ModuleError("action is not multiplicative on a generator")

    def rho(self, avec: np.ndarray) -> np.ndarray:
        return self.field.normalize(np.tensordot(avec, self.act, axes=(0, 0)))

    def apply(self, avec: np.ndarray, v: np.ndarray) -> np.ndarray:
        return self.field.normalize(self.rho(avec) @ v)

    # -- constructors ----------------------------------------------------

    @classmethod
    def regular(cls, algebra: Algebra) -> "Module":
        act = np.transpose(algebra.mul, (0, 2, 1)).copy()
        return cls(algebra, act)

    @classmethod
    def projective(cls, algebra: Algebra, v: int) -> "Module":
        idx = algebra.left_ideal_indices(v)
        sub = algebra.mul[np.ix_(range(algebra.dim), idx, idx)]
        m = cls(algebra, np.transpose(sub, (0, 2, 1)).copy())
        m.projective_vertex = v
        m.coord_labels = [algebra.labels[i] for i in idx]
        return m

    @classmethod
    def simple(cls, algebra: Algebra, v: int) -> "Module":
        lam = algebra.semisimple_functionals()
        act = lam[v].reshape(algebra.dim, 1, 1).copy()
        return cls(algebra, act)

    @classmethod
    def zero(cls, algebra: Algebra) -> "Module":
        return cls(algebra, algebra.field.zeros((algebra.dim, 0, 0)))

    @classmethod
    def direct_sum(cls, algebra: Algebra, parts: list["Module"]) -> "Module":
        f = algebra.field
        m = sum(p.dim for p in parts)
        act = f.zeros((algebra.dim, m, m))
        off = 0
        for p in parts:
            act[:, off:off + p.dim, off:off + p.dim] = p.act
            off += p.dim
        return cls(algebra, act)

    @classmethod
    def from_invariant_rows(cls, parent: "Module", rows: np.ndarray,
                            check: bool = True) -> "Module":
        """Submodule spanned by the given row vectors (must be invariant)."""
        f = parent.field
        rows = la.row_space(f, rows)
        r = rows.shape[0]
        act = f.zeros((parent.algebra.dim, r, r))
        for i in range(parent.algebra.dim):
            imgs = f.normalize((parent.act[i] @ rows.T).T)
            coords = la.coords_in_rows(f, rows, imgs)
            if coords is None:
                if check:
                    raise ModuleError("row span is not invariant under the action")
                raise ModuleError("row span is not invariant")
            act[i] = coords.T
        sub = cls(parent.algebra, act)
        sub.parent_rows = rows
        return sub

    def quotient_by_rows(self, rows: np.ndarray) -> "Module":
        """Quotient by an invariant subspace given as rows."""
        f = self.field
        comp, proj, embed = la.quotient_projection(f, rows, self.dim)
        act = f.zeros((self.algebra.dim, len(comp), len(comp)))
        for i in range(self.algebra.dim):
            act[i] = f.normalize(proj @ f.normalize(self.act[i] @ embed))
        q = Module(self.algebra, act)
        q.quotient_proj = proj
        return q

    # -- structure -------------------------------------------------------

    def radical_rows(self) -> np.ndarray:
        """Row basis of rad(A)·M."""
        f = self.field
        rad = self.algebra.radical_rows
        if rad.shape[0] == 0 or self.dim == 0:
            return f.zeros((0, self.dim))
        blocks = [self.rho(r).T for r in rad]
        return la.row_space(f, np.concatenate(blocks, axis=0))

    def radical_series_dims(self) -> list[int]:
        """Dimensions of M ⊇ rad·M ⊇ rad²·M ⊇ … until zero."""
        dims = [self.dim]
        cur = self
        rows = cur.radical_rows()
        while rows.shape[0] > 0:
            dims.append(rows.shape[0])
            cur = Module.from_invariant_rows(cur, rows, check=False)
            rows = cur.radical_rows()
        dims.append(0)
        return dims

    def vertex_dims(self) -> list[int]:
        """dim e_v · M for each vertex."""
        return [la.rank(self.field, self.rho(self.algebra.idempotent_vector(v)))
                for v in range(self.algebra.n_vertices)]

    def layer_signature(self) -> list[tuple[int, ...]]:
        """Per-radical-layer vertex dimensions (iso invariant)."""
        sig = []
        cur = self
        while cur.dim > 0:
            rows = cur.radical_rows()
            top = cur.quotient_by_rows(rows)
            sig.append(tuple(top.vertex_dims()))
            if rows.shape[0] == 0:
                break
            cur = Module.from_invariant_rows(cur, rows, check=False)
        return sig

    def submodule_generated_rows(self, seed_rows: np.ndarray) -> np.ndarray:
        """Row basis of the submodule generated by the given vectors."""
        f = self.field
        span = la.row_space(f, seed_rows)
        while True:
            new_rows = [span]
            for i in range(self.algebra.dim):
                new_rows.append(f.normalize((self.act[i] @ span.T).T))
            bigger = la.row_space(f, np.concatenate(new_rows, axis=0))
            if bigger.shape[0] == span.shape[0]:
                return bigger
            span = bigger


def _batched_matmul(field: Field, left: np.ndarray, batch: np.ndarray) -> np.ndarray:
    """``left @ batch[i]`` for each i; works for object and int arrays."""
    return field.normalize(np.swapaxes(
        np.tensordot(left, batch, axes=(1, 1)), 0, 1))


@dataclass
class ModuleMap:
    source: Module
    target: Module
    matrix: np.ndarray

    def check(self) -> bool:
        f = self.source.field
        for g in self.source.algebra.generators():
            lhs = f.matmul(self.target.rho(g), self.matrix)
            rhs = f.matmul(self.matrix, self.source.rho(g))
            if not f.equal(lhs, rhs):
                return False
        return True

    def is_invertible(self) -> bool:
        return la.is_invertible(self.source.field, self.matrix)


def hom_space(m: Module, n: Module) -> list[ModuleMap]:
    """Basis of Hom_A(m, n) via the generator intertwining system."""
    if m.algebra.dim != n.algebra.dim or m.field != n.field:
        raise ModuleError("hom_space needs modules over the same algebra")
    f = m.field
    if m.dim == 0 or n.dim == 0:
        return []
    rows = []
    eye_m = f.eye(m.dim)
    eye_n = f.eye(n.dim)
    for g in m.algebra.generators():
        block = f.normalize(np.kron(eye_n, m.rho(g).T) - np.kron(n.rho(g), eye_m))
        rows.append(block)
    system = np.concatenate(rows, axis=0)
    ker = la.kernel(f, system)
    return [ModuleMap(m, n, ker[:, t].reshape(n.dim, m.dim).copy())
            for t in range(ker.shape[1])]


def element_to_map(p: Module, target: Module, x: np.ndarray) -> ModuleMap:
    """The map P(v) -> M sending the generator e_v to x ∈ e_v·M.

    Columns are the images of the path basis of A·e_v.
    """
    alg = p.algebra
    v = p.projective_vertex
    idx = alg.left_ideal_indices(v)
    f = alg.field
    cols = f.zeros((target.dim, len(idx)))
    for t, i in enumerate(idx):
        cols[:, t] = target.apply(alg.basis_vector(i), x)
    return ModuleMap(p, target, cols)


def projective_cover(m: Module) -> tuple[Module, ModuleMap, list[int]]:
    """Minimal projective cover (P, epi, vertex multiset).

    P = ⊕_v projective(v)^{n_v} with n_v = dim e_v·(m / rad m); the epi is
    built from lifted top generators and certified: surjective with kernel
    inside rad P.
    """
    alg, f = m.algebra, m.field
    if m.dim == 0:
        z = Module.zero(alg)
        return z, ModuleMap(z, m, f.zeros((0, 0))), []
    rad_rows = m.radical_rows()
    comp, proj, embed = la.quotient_projection(f, rad_rows, m.dim)
    tdim = len(comp)
    tops: list[tuple[int, np.ndarray]] = []
    for v in range(alg.n_vertices):
        ev = alg.idempotent_vector(v)
        rho_t = f.normalize(proj @ f.normalize(m.rho(ev) @ embed))
        basis = la.row_space(f, rho_t.T)
        for tbar in basis:
            x = f.normalize(m.rho(ev) @ f.normalize(embed @ tbar))
            tops.append((v, x))
    if len(tops) != tdim:
        raise ModuleError("top generators do not span the head")
    vertices = [v for v, _ in tops]
    parts = [Module.projective(alg, v) for v in vertices]
    cover = Module.direct_sum(alg, parts)
    blocks = [element_to_map(part, m, x).matrix
              for part, (v, x) in zip(parts, tops)]
    mat = np.concatenate(blocks, axis=1) if blocks else f.zeros((m.dim, 0))
    if la.rank(f, mat) != m.dim:
        raise ModuleError("cover map is not surjective")
    epi = ModuleMap(cover, m, mat)
    ker_cols = la.kernel(f, mat)
    cover_rad = cover.radical_rows()
    for t in range(ker_cols.shape[1]):
        if not la.in_span(f, cover_rad, ker_cols[:, t]):
            raise ModuleError("cover kernel is not inside the radical "
                              "(cover not minimal)")
    return cover, epi, vertices


def cover_kernel(m: Module) -> tuple[Module, Module, ModuleMap]:
    """(kernel, cover, epi) for the minimal cover of m."""
    cover, epi, _ = projective_cover(m)
    f = m.field
    ker_cols = la.kernel(f, epi.matrix)
    if ker_cols.shape[1] == 0:
        return Module.zero(m.algebra), cover, epi
    kmod = Module.from_invariant_rows(cover, ker_cols.T.copy(), check=False)
    return kmod, cover, epi


def strip_projective_summands(m: Module, seed: int = 0, budget: int = 50
                              ) -> tuple[Module, list[int]]:
    """Split off projective direct summands; returns (rest, vertices removed)."""
    alg, f = m.algebra, m.field
    removed: list[int] = []
    cur = m
    rng = np.random.Generator(np.random.PCG64(seed))
    progress = True
    while progress and cur.dim > 0:
        progress = False
        for v in range(alg.n_vertices):
            p = Module.projective(alg, v)
            outs = hom_space(cur, p)
            if not outs:
                continue
            ev_img = la.row_space(f, cur.rho(alg.idempotent_vector(v)).T)
            candidates_in = [ev_img[t] for t in range(ev_img.shape[0])]
            found = None
            for x in candidates_in:
                hin = element_to_map(p, cur, x).matrix
                for ho in outs:
                    s = f.matmul(ho.matrix, hin)
                    if la.is_invertible(f, s):
                        found = (hin, ho.matrix, s)
                        break
                if found:
                    break
            if found is None and len(outs) > 1 and len(candidates_in) > 0:
                for _ in range(budget):
                    coeffs = f.rand(rng, len(outs))
                    hmat = sum_maps(f, coeffs, [o.matrix for o in outs])
                    xc = f.rand(rng, len(candidates_in))
                    x = f.normalize(xc @ np.stack(candidates_in))
                    hin = element_to_map(p, cur, x).matrix
                    s = f.matmul(hmat, hin)
                    if la.is_invertible(f, s):
                        found = (hin, hmat, s)
                        break
            if found is None:
                continue
            hin, ho, s = found
            pi = f.matmul(f.matmul(hin, la.invert(f, s)), ho)
            rest_rows = la.kernel(f, pi).T.copy()
            cur = Module.from_invariant_rows(cur, rest_rows, check=False)
            removed.append(v)
            progress = True
            break
    return cur, removed


def sum_maps(field: Field, coeffs, mats):
    out = field.zeros(mats[0].shape)
    for c, mt in zip(coeffs, mats):
        if c != field.zero:
            out = field.normalize(out + c * mt)
    return out


def syzygy(m: Module, n: int, strip: bool = True) -> Module:
    """Ω^n(m) along minimal covers; projective summands stripped at step 0."""
    if n < 0:
        raise ModuleError("syzygy count must be >= 0")
    cur = m
    if strip:
        cur, _ = strip_projective_summands(m)
    for _ in range(n):
        cur, _, _ = cover_kernel(cur)
    return cur


class IsoKind(Enum):
    ISO = "isomorphic"
    NO = "not_isomorphic"
    UNDETERMINED = "undetermined"


@dataclass
class IsoResult:
    kind: IsoKind
    witness: ModuleMap | None = None
    obstruction: str | None = None

    def __bool__(self) -> bool:
        return self.kind is IsoKind.ISO


def is_isomorphic(m: Module, n: Module, seed: int = 0, budget: int = 200,
                  exhaustive_limit: int = 4096) -> IsoResult:
    """Three-valued isomorphism test with certified No obstructions."""
    f = m.field
    if m.dim != n.dim:
        return IsoResult(IsoKind.NO, obstruction=f"dim {m.dim} != {n.dim}")
    if m.dim == 0:
        return IsoResult(IsoKind.ISO, witness=ModuleMap(m, n, f.zeros((0, 0))))
    sig_m, sig_n = m.layer_signature(), n.layer_signature()
    if sig_m != sig_n:
        return IsoResult(IsoKind.NO,
                         obstruction=f"radical layer signature {sig_m} != {sig_n}")
    homs = hom_space(m, n)
    if not homs:
        return IsoResult(IsoKind.NO, obstruction="hom space is zero")
    mats = [h.matrix for h in homs]
    for mt in mats:
        if la.is_invertible(f, mt):
            return IsoResult(IsoKind.ISO, witness=ModuleMap(m, n, mt))
    for a in range(len(mats)):
        for b in range(a + 1, len(mats)):
            mt = f.normalize(mats[a] + mats[b])
            if la.is_invertible(f, mt):
                return IsoResult(IsoKind.ISO, witness=ModuleMap(m, n, mt))
    h = len(mats)
    if f.p > 0 and f.p ** h <= exhaustive_limit:
        import itertools
        for coeffs in itertools.product(range(f.p), repeat=h):
            mt = sum_maps(f, [f.scalar(c) for c in coeffs], mats)
            if la.is_invertible(f, mt):
                return IsoResult(IsoKind.ISO, witness=ModuleMap(m, n, mt))
        return IsoResult(IsoKind.NO,
                         obstruction="exhaustive hom search: no invertible map")
    rng = np.random.Generator(np.random.PCG64(seed))
    for _ in range(budget):
        coeffs = f.rand(rng, h)
        mt = sum_maps(f, coeffs, mats)
        if la.is_invertible(f, mt):
            return IsoResult(IsoKind.ISO, witness=ModuleMap(m, n, mt))
    return IsoResult(IsoKind.UNDETERMINED,
                     obstruction=f"no invertible combination in {budget} tries")


def perp_test(alg: Algebra, J: list[int], k: Module) -> bool:
    """Membership of a module in the right orthogonal of ⊕_{j∈J} P_j.

    Hom(P_j, K) ≅ e_j·K, so the test is that every e_j acts by zero.
    """
    f = k.field
    for j in J:
        if k.dim == 0:
            continue
        mat = k.rho(alg.idempotent_vector(j))
        if not f.equal(mat, f.zeros(mat.shape)):
            return False
    return True


# ----------------------------------------------------------------------
# bimodule plumbing
# ----------------------------------------------------------------------

def regular_bimodule(env: Algebra) -> Module:
    """The underlying algebra, as a module over its enveloping algebra.

    Requires ``env = enveloping(A, A)``; the basis pair (i, j) acts on x by
    b_i · x · b_j.
    """
    base: Algebra = env.env_left
    if env.env_right is not base:
        raise ModuleError("regular bimodule needs env(A, A) for a single A")
    f = env.field
    d = base.dim
    act = f.zeros((env.dim, d, d))
    for i in range(d):
        li = base.lmul(base.basis_vector(i))
        for j in range(d):
            act[i * d + j] = f.matmul(li, base.rmul(base.basis_vector(j)))
    return Module(env, act)


def env_left_restriction(m: Module) -> Module:
    """A module over env(B, A) restricted to its left B-action."""
    env = m.algebra
    left: Algebra = env.env_left
    right: Algebra = env.env_right
    f = m.field
    act = f.zeros((left.dim, m.dim, m.dim))
    for i in range(left.dim):
        vec = tensor_vec(f, la_unit(f, left.dim, i), right.unit)
        act[i] = m.rho(vec)
    return Module(left, act)


def env_right_action(m: Module, avec: np.ndarray) -> np.ndarray:
    """Matrix of the right action of an element of A on an env(B, A)-module."""
    env = m.algebra
    left: Algebra = env.env_left
    return m.rho(tensor_vec(m.field, left.unit, avec))


def env_dual(m: Module, dual_env: Algebra) -> Module:
    """Dual of a (B, A)-bimodule as an (A, B)-bimodule.

    ``dual_env`` must be env(A, B) when m is a module over env(B, A).
    """
    env = m.algebra
    left: Algebra = env.env_left
    right: Algebra = env.env_right
    if not (dual_env.env_left is right and dual_env.env_right is left):
        raise ModuleError("dual_env must be the enveloping algebra with "
                          "factors swapped")
    f = m.field
    act = f.zeros((dual_env.dim, m.dim, m.dim))
    for i in range(right.dim):
        for j in range(left.dim):
            src = m.rho(tensor_vec(f, la_unit(f, left.dim, j),
                                   la_unit(f, right.dim, i)))
            act[i * left.dim + j] = src.T.copy()
    return Module(dual_env, act)


def la_unit(field: Field, n: int, i: int) -> np.ndarray:
    v = field.zeros(n)
    v[i] = field.one
    return v


def _right_action_data(a: Algebra, m: Module):
    """(right-action rho, outer-left algebra and rho) for the tensor factor."""
    env = m.algebra
    if getattr(env, "env_right", None) is a:
        left = env.env_left

        def rho_r(avec):
            return m.rho(tensor_vec(m.field, left.unit, avec))

        def rho_l(bvec):
            return m.rho(tensor_vec(m.field, bvec, a.unit))

        return rho_r, left, rho_l
    if getattr(env, "op_of", None) is a:
        return (lambda avec: m.rho(avec)), None, None
    raise ModuleError(
        "left tensor factor must be a right module over the base algebra "
        "(module over its opposite or an enveloping algebra ending in it)")


def _left_action_data(a: Algebra, n: Module):
    env = n.algebra
    if env is a:
        return (lambda avec: n.rho(avec)), None, None
    if getattr(env, "env_left", None) is a:
        right = env.env_right

        def rho_l(avec):
            return n.rho(tensor_vec(n.field, avec, right.unit))

        def rho_r(cvec):
            return n.rho(tensor_vec(n.field, a.unit, cvec))

        return rho_l, right, rho_r
    raise ModuleError("right tensor factor must be a left module over the "
                      "base algebra")


def tensor_over(a: Algebra, m: Module, n: Module):
    """Tensor product over ``a``: (m ⊗_k n) / span{x·g ⊗ y − x ⊗ g·y}.

    ``m`` carries a right a-action (module over opposite(a) or over an
    enveloping algebra with right factor a); ``n`` carries a left a-action
    (module over a, or over an enveloping algebra with left factor a).
    Residual outer actions are installed on the result; with no residual
    action the result is a module over the one-dimensional trivial algebra.

    Returns ``(module, proj, embed)`` where proj/embed relate the quotient to
    the full Kronecker space (row-major pair coordinates).
    """
    f = m.field
    rho_mr, outer_l_alg, rho_ml = _right_action_data(a, m)
    rho_nl, outer_r_alg, rho_nr = _left_action_data(a, n)
    mm, nn = m.dim, n.dim
    big = mm * nn
    eye_m, eye_n = f.eye(mm), f.eye(nn)
    rel = []
    for g in a.generators():
        block = f.normalize(np.kron(rho_mr(g).T, eye_n) - np.kron(eye_m, rho_nl(g).T))
        rel.append(block)
    rel_rows = la.row_space(f, np.concatenate(rel, axis=0)) if rel else f.zeros((0, big))
    comp, proj, embed = la.quotient_projection(f, rel_rows, big)
    tdim = len(comp)

    def conj(mat):
        return f.normalize(proj @ f.normalize(mat @ embed))

    if outer_l_alg is not None and outer_r_alg is not None:
        from .algebra import enveloping
        owner = enveloping(outer_l_alg, outer_r_alg)
        act = f.zeros((owner.dim, tdim, tdim))
        for i in range(outer_l_alg.dim):
            left_mat = np.kron(rho_ml(la_unit(f, outer_l_alg.dim, i)), eye_n)
            for j in range(outer_r_alg.dim):
                right_mat = np.kron(eye_m, rho_nr(la_unit(f, outer_r_alg.dim, j)))
                act[i * outer_r_alg.dim + j] = conj(f.matmul(left_mat, right_mat))
        out = Module(owner, act)
    elif outer_l_alg is not None:
        act = f.zeros((outer_l_alg.dim, tdim, tdim))
        for i in range(outer_l_alg.dim):
            act[i] = conj(np.kron(rho_ml(la_unit(f, outer_l_alg.dim, i)), eye_n))
        out = Module(outer_l_alg, act)
    elif outer_r_alg is not None:
        act = f.zeros((outer_r_alg.dim, tdim, tdim))
        for j in range(outer_r_alg.dim):
            act[j] = conj(np.kron(eye_m, rho_nr(la_unit(f, outer_r_alg.dim, j))))
        out = Module(outer_r_alg, act)
    else:
        out = Module(trivial_algebra(f), f.eye(tdim).reshape(1, tdim, tdim))
    return out, proj, embed


_TRIVIAL_CACHE: dict = {}


def trivial_algebra(field: Field) -> Algebra:
    if field.p not in _TRIVIAL_CACHE:
        _TRIVIAL_CACHE[field.p] = Algebra(
            field, field.asarray([[[1]]]), field.asarray([1]), ["e"], ["*"],
            [0], np.zeros(1, dtype=np.int64), np.zeros(1, dtype=np.int64),
            radical_rows=field.zeros((0, 1)))
    return _TRIVIAL_CACHE[field.p]


def right_module_over_op(alg_op: Algebra, act: np.ndarray) -> Module:
    """Right A-module from matrices of the right action, as a module over A^op."""
    return Module(alg_op, act)


# ----------------------------------------------------------------------
# decomposition
# ----------------------------------------------------------------------

def fitting_decomposition(m: Module, endo: np.ndarray
                          ) -> tuple[Module, Module]:
    """Fitting decomposition ker(f^∞) ⊕ im(f^∞) along an endomorphism."""
    f = m.field
    power = endo
    prev_rank = -1
    for _ in range(m.dim + 1):
        r = la.rank(f, power)
        if r == prev_rank:
            break
        prev_rank = r
        power = f.matmul(power, endo)
    ker_rows = la.kernel(f, power).T.copy()
    im_rows = la.row_space(f, power.T)
    return (Module.from_invariant_rows(m, ker_rows, check=False),
            Module.from_invariant_rows(m, im_rows, check=False))


def decompose(m: Module, seed: int = 0, budget: int = 40) -> list[Module]:
    """Direct-sum decomposition via random endomorphisms (finite fields).

    Splits along coprime factors of minimal polynomials of random
    endomorphisms; pieces that never split within the budget are returned
    as they are (they are indecomposable whenever End is local, e.g. when
    its dimension is 1).
    """
    f = m.field
    if m.dim == 0:
        return []
    ends = hom_space(m, m)
    if len(ends) == 1:
        return [m]
    rng = np.random.Generator(np.random.PCG64(seed))
    for _ in range(budget):
        coeffs = f.rand(rng, len(ends))
        e = sum_maps(f, coeffs, [h.matrix for h in ends])
        mp = la.minpoly(f, e)
        factors = _coprime_factors(f, mp)
        if len(factors) < 2:
            continue
        pieces = []
        for poly in factors:
            mat = la.poly_eval_matrix(f, poly, e)
            # primary component = kernel of poly(e)^dim
            power = mat
            for _ in range(int(np.ceil(np.log2(max(m.dim, 2))))):
                power = f.matmul(power, power)
            rows = la.kernel(f, power).T.copy()
            pieces.append(Module.from_invariant_rows(m, rows, check=False))
        if sum(p.dim for p in pieces) == m.dim:
            out = []
            for p in pieces:
                out.extend(decompose(p, seed=seed + 1, budget=budget))
            return out
    return [m]


def _coprime_factors(field: Field, poly_coeffs: list) -> list[list]:
    """Primary factors f_i^{e_i} of a polynomial, as coefficient lists."""
    x = sympy.Symbol("x")
    if field.p == 0:
        expr = sum(sympy.Rational(str(c)) * x ** i
                   for i, c in enumerate(poly_coeffs))
        poly = sympy.Poly(expr, x, domain="QQ")
    else:
        expr = sum(int(c) * x ** i for i, c in enumerate(poly_coeffs))
        poly = sympy.Poly(expr, x, modulus=field.p, symmetric=False)
    _, factors = poly.factor_list()
    out = []
    for fac, mult in factors:
        prim = fac ** mult
        cs = list(reversed(prim.all_coeffs()))
        if field.p == 0:
            from fractions import Fraction
            out.append([Fraction(int(sympy.Rational(c).p),
                                 int(sympy.Rational(c).q)) for c in cs])
        else:
            out.append([int(c) % field.p for c in cs])
    return out
