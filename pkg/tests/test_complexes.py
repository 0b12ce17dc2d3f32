"""Chain-complex layer: shifts, cones, tensor/hom calculus, homology,
minimization, and the block engine, cross-validated dense vs. block."""

import numpy as np
import pytest

from pertwist import linalg as la
from pertwist.linalg import Field, QQ
from pertwist.algebra import Algebra, enveloping, opposite, tensor_vec
from pertwist.modules import (Module, ModuleMap, regular_bimodule,
                              trivial_algebra, env_dual, IsoKind)
from pertwist.fixtures import (kxn_algebra, a2_te_algebra, brauer_line_3_algebra)
from pertwist.complexes import (Complex, ComplexError, DenseChainMap, cone,
                                homology, homology_dims, tensor_complexes,
                                hom_complex, dual_complex, chain_map_space,
                                chain_maps_mod_homotopy, iso_of_complexes)
from pertwist.blocks import (BlockComplex, BlockChainMap, Proj, Opaque,
                             block_cone, minimize_blocks, minimize_dense,
                             dense_to_blocks, homotopy_equivalent_dense,
                             homotopy_equivalent_blocks, block_iso_search,
                             tensor_blocks, dual_blocks, NotProjectiveTerms,
                             BudgetExceeded, po_dense)

F2 = Field(2)
F3 = Field(3)


# ----------------------------------------------------------------------
# shift / basic structure
# ----------------------------------------------------------------------

def test_stalk_and_shift_degrees():
    a = brauer_line_3_algebra(F2)
    p1 = Module.projective(a, 0)
    x = Complex.from_module(p1, 0)
    assert x.dims_by_degree() == {0: 3}
    # a module placed in degree -n is the n-fold shift of its stalk
    assert x.shift(-2).dims_by_degree() == {2: 3}
    assert x.shift(1).dims_by_degree() == {-1: 3}


def test_shift_negates_differential_and_round_trips():
    a = kxn_algebra(F3, 1)
    reg = Module.regular(a)
    d = reg.rho(a.basis_vector(1)).T.copy()  # right multiplication by x
    d = a.field.normalize(d)
    x = Complex(a, {0: reg, 1: reg}, {0: _rmul_mat(a, 1)})
    s = x.shift(1)
    assert s.dims_by_degree() == {-1: 2, 0: 2}
    assert F3.equal(s.diff(-1), F3.normalize(-x.diff(0)))
    rt = s.shift(-1)
    assert F3.equal(rt.diff(0), x.diff(0))


def _rmul_mat(a: Algebra, basis_index: int) -> np.ndarray:
    """Matrix of right multiplication on the regular left module."""
    return a.rmul(a.basis_vector(basis_index))


def test_validate_rejects_bad_differential():
    a = kxn_algebra(F2, 1)
    reg = Module.regular(a)
    with pytest.raises(ComplexError):
        # x followed by x is zero, but x then identity is not a complex
        Complex(a, {0: reg, 1: reg, 2: reg},
                {0: _rmul_mat(a, 1), 1: a.field.eye(2)})
    # non-module-map differential
    bad = a.field.zeros((2, 2))
    bad[0, 1] = a.field.one
    with pytest.raises(ComplexError):
        Complex(a, {0: reg, 1: reg}, {0: bad})


def test_two_term_homology_of_multiplication_by_x():
    # k[x]/x^2: A --x--> A has H^0 = A/(x), H^1 = ann(x) = (x)
    a = kxn_algebra(F2, 1)
    reg = Module.regular(a)
    x = Complex(a, {0: reg, 1: reg}, {0: _rmul_mat(a, 1)})
    assert homology(x, 0).dim == 1
    assert homology(x, 1).dim == 1
    assert homology_dims(x) == {0: 1, 1: 1}
    assert x.euler_characteristic() == 0


def test_homology_of_stalk_is_the_module():
    a = brauer_line_3_algebra(F2)
    m = Module.simple(a, 1)
    x = Complex.from_module(m, -3)
    assert homology(x, -3).dim == 1
    assert homology(x, 0).dim == 0


# ----------------------------------------------------------------------
# cones
# ----------------------------------------------------------------------

def test_cone_dimension_additivity_and_maps():
    a = brauer_line_3_algebra(F2)
    p1 = Module.projective(a, 0)
    p2 = Module.projective(a, 1)
    from pertwist.modules import hom_space
    maps = hom_space(p1, p2)
    fm = DenseChainMap(Complex.from_module(p1), Complex.from_module(p2),
                       {0: maps[0].matrix})
    c, inc, proj = cone(fm)
    assert c.dims_by_degree() == {-1: 3, 0: 4}
    assert inc.check() and proj.check()
    # cone of a map between stalks: H^{-1} = ker, H^0 = coker
    k = la.kernel(F2, maps[0].matrix).shape[1]
    assert homology(c, -1).dim == k
    assert homology(c, 0).dim == 4 - (3 - k)


def test_cone_of_identity_is_contractible():
    a = brauer_line_3_algebra(F2)
    p1 = Module.projective(a, 0)
    x = Complex.from_module(p1)
    fm = DenseChainMap(x, x, {0: F2.eye(3)})
    c, _, _ = cone(fm)
    assert homology_dims(c) == {}
    m = minimize_dense(c)
    assert m.is_zero()
    reps, _ = chain_maps_mod_homotopy(c, c)
    assert reps == []


def test_cone_of_zero_map_is_shift_plus_target():
    a = brauer_line_3_algebra(F2)
    p1 = Module.projective(a, 0)
    p3 = Module.projective(a, 2)
    fm = DenseChainMap(Complex.from_module(p1), Complex.from_module(p3),
                       {0: F2.zeros((3, 3))})
    c, _, _ = cone(fm)
    assert c.dims_by_degree() == {-1: 3, 0: 3}
    assert homology(c, -1).dim == 3 and homology(c, 0).dim == 3
    direct = dense_to_blocks(c)
    assert direct.labels(-1) == ["P0"] and direct.labels(0) == ["P2"]


# ----------------------------------------------------------------------
# tensor of complexes
# ----------------------------------------------------------------------

def test_tensor_with_algebra_complex_is_identity_on_terms():
    a = brauer_line_3_algebra(F2)
    aop = opposite(a)
    left = Complex.from_module(Module.regular(aop))  # A as a right module
    p2 = Module.projective(a, 1)
    from pertwist.modules import hom_space
    h = hom_space(p2, Module.projective(a, 0))[0]
    y = Complex(a, {0: p2, 1: Module.projective(a, 0)}, {0: h.matrix})
    t = tensor_complexes(a, left, y)
    assert t.dims_by_degree() == y.dims_by_degree()
    assert homology_dims(t) == homology_dims(y)


def test_tensor_koszul_sign_makes_total_differential_square_to_zero():
    # both factors with a nonzero differential, over F3 so signs matter
    a = kxn_algebra(F3, 2)
    aop = opposite(a)
    regr = Module.regular(aop)
    # right-module map A -> A: left multiplication by x
    lx = a.lmul(a.basis_vector(1))
    x = Complex(aop, {0: regr, 1: regr}, {0: F3.normalize(lx @ lx)})
    reg = Module.regular(a)
    y = Complex(a, {0: reg, 1: reg}, {0: F3.normalize(
        a.rmul(a.basis_vector(1)) @ a.rmul(a.basis_vector(1)))})
    t = tensor_complexes(a, x, y)
    t.validate()   # includes d² = 0
    assert t.lo == 0 and t.hi == 2


def test_tensor_euler_characteristic_multiplies():
    f = F2
    triv = trivial_algebra(f)
    trop = opposite(triv)

    def vec(n, alg=triv):
        return Module(alg, f.eye(n).reshape(1, n, n))
    x = Complex(trop, {0: vec(2, trop), 1: vec(3, trop)}, {})
    y = Complex(triv, {-1: vec(1), 0: vec(4)}, {})
    t = tensor_complexes(triv, x, y)
    assert t.euler_characteristic() == \
        x.euler_characteristic() * y.euler_characteristic()


# ----------------------------------------------------------------------
# hom complexes
# ----------------------------------------------------------------------

def test_hom_from_algebra_stalk_recovers_module_dims():
    a = brauer_line_3_algebra(F2)
    x = Complex.from_module(Module.regular(a))
    p1 = Module.projective(a, 0)
    h, _ = hom_complex(x, Complex.from_module(p1))
    assert h.dims_by_degree() == {0: 3}
    assert homology(h, 0).dim == 3


def test_hom_h0_matches_maps_mod_homotopy():
    a = brauer_line_3_algebra(F2)
    p1 = Module.projective(a, 0)
    x = Complex.from_module(p1)
    fm = DenseChainMap(x, x, {0: F2.eye(3)})
    c, _, _ = cone(fm)
    h, _ = hom_complex(c, x)
    assert homology(h, 0).dim == 0
    reps, _ = chain_maps_mod_homotopy(c, x)
    assert len(reps) == 0
    # and against a stalk with genuine maps
    h2, _ = hom_complex(x, x)
    reps2, _ = chain_maps_mod_homotopy(x, x)
    assert homology(h2, 0).dim == len(reps2)


def test_dual_complex_mirrors_homology():
    a = a2_te_algebra(F3)
    a.find_symmetric_form()
    env = enveloping(a, a)
    bim = regular_bimodule(env)
    # two-term bimodule complex: multiply by a central nilpotent element
    zrows = a.center_rows()
    znil = None
    lam = a.semisimple_functionals()
    for r in range(zrows.shape[0]):
        if all(F3.normalize(lam[v] @ zrows[r]) == F3.zero
               for v in range(a.n_vertices)):
            znil = zrows[r].copy()
            break
    assert znil is not None
    d = F3.normalize(a.lmul(znil))
    x = Complex(env, {0: bim, 1: bim}, {0: d})
    xd = dual_complex(x, env)
    hd = homology_dims(x)
    hdd = homology_dims(xd)
    assert hdd == {-i: d for i, d in hd.items()}


# ----------------------------------------------------------------------
# chain maps
# ----------------------------------------------------------------------

def test_chain_map_space_between_stalks_is_hom():
    a = brauer_line_3_algebra(F2)
    p1 = Module.projective(a, 0)
    p2 = Module.projective(a, 1)
    from pertwist.modules import hom_space
    maps = chain_map_space(Complex.from_module(p1), Complex.from_module(p2))
    assert len(maps) == len(hom_space(p1, p2))
    for cm in maps:
        assert cm.check()


def test_iso_of_complexes_detects_conjugated_complex():
    a = brauer_line_3_algebra(F2)
    p2 = Module.projective(a, 1)
    rad = Module.from_invariant_rows(p2, p2.radical_rows())
    from pertwist.modules import hom_space, projective_cover
    cover, epi, verts = projective_cover(rad)
    x = Complex(a, {-1: cover, 0: p2},
                {-1: _compose_into(a, epi, rad, p2)})
    # conjugate degree -1 by an automorphism of the cover
    auts = hom_space(cover, cover)
    g = None
    for h in auts:
        if la.is_invertible(F2, h.matrix) and not F2.equal(h.matrix,
                                                           F2.eye(cover.dim)):
            g = h.matrix
            break
    if g is None:
        g = F2.eye(cover.dim)
    y = Complex(a, {-1: cover, 0: p2},
                {-1: F2.normalize(x.diff(-1) @ g)})
    res = iso_of_complexes(x, y)
    assert res.kind is IsoKind.ISO
    assert res.witness.check() and res.witness.is_isomorphism()


def _compose_into(a, epi, sub, parent):
    """Matrix of cover -> rad P -> P."""
    f = a.field
    return f.normalize(sub.parent_rows.T @ epi.matrix) \
        if hasattr(sub, "parent_rows") else _embed_rows(a, epi, sub, parent)


def _embed_rows(a, epi, sub, parent):
    f = a.field
    # from_invariant_rows keeps its row basis; recompute it here
    rows = la.row_space(f, parent.radical_rows())
    return f.normalize(rows.T @ epi.matrix)


# ----------------------------------------------------------------------
# minimization and the block engine
# ----------------------------------------------------------------------

def test_minimize_cancels_identity_component():
    a = brauer_line_3_algebra(F2)
    p1 = Module.projective(a, 0)
    p2 = Module.projective(a, 1)
    both = Module.direct_sum(a, [p1, p2])
    d = F2.zeros((3, 7))
    d[:, :3] = F2.eye(3)
    c = Complex(a, {0: both, 1: p1}, {0: d})
    m = minimize_dense(c)
    assert m.dims_by_degree() == {0: 4}
    assert homology_dims(m) == homology_dims(c)
    bl = dense_to_blocks(m)
    assert bl.labels(0) == ["P1"]
    # idempotent
    m2 = minimize_dense(m)
    assert m2.dims_by_degree() == m.dims_by_degree()


def test_minimize_requires_projective_terms():
    a = brauer_line_3_algebra(F2)
    s = Module.simple(a, 0)
    with pytest.raises(NotProjectiveTerms):
        minimize_dense(Complex.from_module(s))


def test_minimize_budget_interrupts():
    a = brauer_line_3_algebra(F2)
    p1 = Module.projective(a, 0)
    x = Complex.from_module(p1)
    fm = DenseChainMap(x, x, {0: F2.eye(3)})
    c, _, _ = cone(fm)
    with pytest.raises(BudgetExceeded):
        minimize_blocks(dense_to_blocks(c), max_steps=0)


def test_homotopy_equivalence_dense_wrapper():
    a = brauer_line_3_algebra(F2)
    p1 = Module.projective(a, 0)
    p2 = Module.projective(a, 1)
    both = Module.direct_sum(a, [p1, p2])
    d = F2.zeros((3, 7))
    d[:, :3] = F2.eye(3)
    c = Complex(a, {0: both, 1: p1}, {0: d})
    res = homotopy_equivalent_dense(c, Complex.from_module(p2))
    assert res.kind is IsoKind.ISO
    res2 = homotopy_equivalent_dense(c, Complex.from_module(p1))
    assert res2.kind is IsoKind.NO


def test_block_cone_and_shift_round_trip():
    a = a2_te_algebra(F2)
    env = enveloping(a, a)
    env.radical_rows
    v00 = 0 * a.n_vertices + 0
    x = BlockComplex(env, {0: [Proj(v00)]}, {})
    idm = BlockChainMap(x, x, {0: {(0, 0): env.idempotent_vector(v00)}})
    c, inc, proj = block_cone(idm)
    assert c.dim(-1) == c.dim(0) == x.dim(0)
    m = minimize_blocks(c)
    assert not m.terms
    s = x.shift(3).shift(-3)
    assert s.terms.keys() == x.terms.keys()


def _block_g_complex(a: Algebra, env: Algebra, av: int, bv: int):
    """[ P(a,b) --(u⊗t ↦ u z t)--> A ] with z a basis element of e_a A e_b."""
    f = a.field
    bim = regular_bimodule(env)
    aterm = Opaque(bim, "A", base=a, gen=a.unit.copy())
    zidx = a.peirce_indices(av, bv)[0]
    z = a.basis_vector(zidx)
    v = av * a.n_vertices + bv
    terms = {-1: [Proj(v)], 0: [aterm]}
    blocks = {-1: {(0, 0): z}}
    return BlockComplex(env, terms, blocks), z


def test_block_tensor_matches_dense_tensor():
    a = a2_te_algebra(F2)
    a.find_symmetric_form()
    env = enveloping(a, a)
    x, _ = _block_g_complex(a, env, 0, 0)
    y, _ = _block_g_complex(a, env, 1, 1)
    t = tensor_blocks(x, y)
    t.validate()
    td = t.to_dense()
    dense = tensor_complexes(a, x.to_dense(), y.to_dense())
    assert td.dims_by_degree() == dense.dims_by_degree()
    assert homology_dims(td) == homology_dims(dense)


def test_block_tensor_with_unit_stalk_is_identity():
    a = a2_te_algebra(F2)
    env = enveloping(a, a)
    env.radical_rows
    bim = regular_bimodule(env)
    unit = BlockComplex(env, {0: [Opaque(bim, "A", base=a, gen=a.unit.copy())]},
                        {})
    x, _ = _block_g_complex(a, env, 0, 1)
    t = tensor_blocks(x, unit)
    assert [t.labels(i) for i in t.degrees] == \
        [x.labels(i) for i in x.degrees]
    t2 = tensor_blocks(unit, x)
    assert [t2.labels(i) for i in t2.degrees] == \
        [x.labels(i) for i in x.degrees]
    res = block_iso_search(t, x)
    assert res.kind is IsoKind.ISO


def test_block_dual_matches_dense_dual():
    a = a2_te_algebra(F3)
    a.find_symmetric_form()
    env = enveloping(a, a)
    env.radical_rows
    x, _ = _block_g_complex(a, env, 0, 1)
    xd = dual_blocks(x)
    xd.validate()
    dd = dual_complex(x.to_dense(), env)
    assert xd.to_dense().dims_by_degree() == dd.dims_by_degree()
    assert homology_dims(xd.to_dense()) == homology_dims(dd)
    # double dual comes back to the original labels
    xdd = dual_blocks(xd)
    assert [xdd.labels(i) for i in xdd.degrees] == \
        [x.labels(i) for i in x.degrees]
    res = block_iso_search(xdd, x)
    assert res.kind is IsoKind.ISO


def test_block_pp_dual_value_swaps_factors():
    a = a2_te_algebra(F2)
    a.find_symmetric_form()
    env = enveloping(a, a)
    env.radical_rows
    # P(0,0) -> P(0,1) with value ab ⊗ b°  (u⊗t ↦ u·ab ⊗ b·t)
    iab = a.labels.index("ab")
    ib = a.labels.index("b")
    w = tensor_vec(F2, a.basis_vector(iab), a.basis_vector(ib))
    nv = a.n_vertices
    x = BlockComplex(env, {0: [Proj(0 * nv + 0)], 1: [Proj(0 * nv + 1)]},
                     {0: {(0, 0): w}})
    xd = dual_blocks(x)
    wd = xd.block(-1 - 0, 0, 0)
    expect = tensor_vec(F2, a.basis_vector(ib), a.basis_vector(iab))
    assert F2.equal(F2.normalize(wd), F2.normalize(expect)) or \
        F2.equal(F2.normalize(wd), F2.normalize(-expect))
    assert xd.labels(-1) == [f"P{1 * nv + 0}"]
    assert xd.labels(0) == [f"P{0 * nv + 0}"]


def test_block_minimize_matches_dense_homology():
    a = a2_te_algebra(F2)
    a.find_symmetric_form()
    env = enveloping(a, a)
    x, _ = _block_g_complex(a, env, 0, 0)
    y, _ = _block_g_complex(a, env, 0, 1)
    t = tensor_blocks(x, y)
    before = homology_dims(t.to_dense())
    m = minimize_blocks(t)
    after = homology_dims(m.to_dense())
    assert before == after


def test_block_tensor_with_internal_pp_blocks():
    # three-term complex exercising the Proj->Proj transform on both sides
    a = a2_te_algebra(F2)
    a.find_symmetric_form()
    env = enveloping(a, a)
    env.radical_rows
    f = a.field
    bim = regular_bimodule(env)
    nv = a.n_vertices
    iab = a.labels.index("ab")
    ib = a.labels.index("b")
    ia = a.labels.index("a")
    w = tensor_vec(F2, a.basis_vector(iab), a.basis_vector(ib))
    z = a.basis_vector(ia)   # po value in e_0 A e_1
    x = BlockComplex(
        env,
        {-2: [Proj(0 * nv + 0)], -1: [Proj(0 * nv + 1)],
         0: [Opaque(bim, "A", base=a, gen=a.unit.copy())]},
        {-2: {(0, 0): w}, -1: {(0, 0): z}})
    x.validate()
    t = tensor_blocks(x, x)
    t.validate()
    dense = tensor_complexes(a, x.to_dense(), x.to_dense())
    assert t.to_dense().dims_by_degree() == dense.dims_by_degree()
    assert homology_dims(t.to_dense()) == homology_dims(dense)
