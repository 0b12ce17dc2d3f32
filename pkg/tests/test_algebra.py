"""Unit tests for graded algebras, quiver presentations, and radicals.

Oracles: hand-enumerated path bases for the fixture quivers, the augmentation
ideal of a p-group algebra in characteristic p, and small algebras whose
radical and idempotents are known in closed form.
"""

import numpy as np
import pytest

from pertwist import algebra as al
from pertwist import linalg as la
from pertwist.algebra import (AlgebraError, MalformedRelationError,
                              NotFiniteDimensionalError, NotSplitBasicError,
                              QuiverPresentation, check_morphism, corner,
                              enveloping, from_table, opposite, path_algebra)
from pertwist.fixtures import (a2_te_algebra, brauer_line_3_algebra,
                               build_fixture, kq8_algebra, kxn_algebra,
                               quaternion_table)
from pertwist.linalg import Field, QQ


F2, F3, F5 = Field(2), Field(3), Field(5)


# ----------------------------------------------------------------------
# quiver-presented fixtures
# ----------------------------------------------------------------------

@pytest.mark.parametrize("field", [QQ, F2, F3, F5], ids=repr)
@pytest.mark.parametrize("n", [1, 2, 3])
def test_kxn_structure(field, n):
    a = kxn_algebra(field, n)
    assert a.dim == n + 1
    assert a.labels[0] == "e1"
    assert a.n_vertices == 1
    x = a.basis_vector(1)
    cur = x
    for k in range(2, n + 1):
        cur = a.multiply(cur, x)
        assert field.equal(cur, a.basis_vector(k))
    assert field.equal(a.multiply(cur, x), field.zeros(n + 1))
    assert a.radical_rows.shape[0] == n
    assert a.loewy_length() == n + 1
    lam, _ = a.find_symmetric_form()
    g = a.gram(lam)
    assert la.is_invertible(field, g)
    assert field.equal(g, g.T.copy())


def test_a2_te_structure():
    a = a2_te_algebra(F2)
    assert a.dim == 6
    assert sorted(a.labels) == sorted(["e1", "e2", "a", "b", "ab", "ba"])
    assert a.cartan_matrix().tolist() == [[2, 1], [1, 2]]
    assert a.arrow_count_matrix().tolist() == [[0, 1], [1, 0]]
    assert a.radical_rows.shape[0] == 4
    assert a.loewy_length() == 3
    # ab and ba are socle elements: annihilated by both arrows on both sides
    iab = a.labels.index("ab")
    arrow = a.basis_vector(a.labels.index("a"))
    z = F2.zeros(6)
    assert F2.equal(a.multiply(a.basis_vector(iab), arrow), z)
    assert F2.equal(a.multiply(arrow, a.basis_vector(iab)), z)


@pytest.mark.parametrize("field", [F2, F3], ids=repr)
def test_brauer_line_structure(field):
    a = brauer_line_3_algebra(field)
    assert a.dim == 10
    assert a.n_vertices == 3
    assert a.cartan_matrix().tolist() == [[2, 1, 0], [1, 2, 1], [0, 1, 2]]
    assert a.arrow_count_matrix().tolist() == [[0, 1, 0], [1, 0, 1], [0, 1, 0]]
    # b*a == c*d (identified cycles at the middle vertex)
    ib, ia = a.labels.index("b"), a.labels.index("a")
    ic, idd = a.labels.index("c"), a.labels.index("d")
    ba = a.multiply(a.basis_vector(ib), a.basis_vector(ia))
    cd = a.multiply(a.basis_vector(ic), a.basis_vector(idd))
    assert field.equal(ba, cd)
    # a*c == 0
    assert field.equal(a.multiply(a.basis_vector(ia), a.basis_vector(ic)),
                       field.zeros(10))
    # Peirce corner at vertex 1 is spanned by e1 and the cycle a*b
    assert len(a.peirce_indices(0, 0)) == 2
    lam, _ = a.find_symmetric_form()
    assert la.is_invertible(field, a.gram(lam))


def test_left_right_ideal_indices_match_path_targets():
    a = brauer_line_3_algebra(F2)
    # A e_1 = paths ending at vertex 1: e1, b, ab
    names = sorted(a.labels[i] for i in a.left_ideal_indices(0))
    assert names == sorted(["e1", "b", "ab"])
    # the identified cycle b*a == c*d survives under the label "cd"
    names2 = sorted(a.labels[i] for i in a.left_ideal_indices(1))
    assert names2 == sorted(["e2", "a", "d", "cd"])
    names3 = sorted(a.labels[i] for i in a.right_ideal_indices(0))
    assert names3 == sorted(["e1", "a", "ab"])


def test_path_algebra_guards():
    with pytest.raises(NotFiniteDimensionalError):
        path_algebra(F2, QuiverPresentation(["1"], [("x", "1", "1")], []),
                     max_path_len=6)
    with pytest.raises(MalformedRelationError):
        path_algebra(F2, QuiverPresentation(
            ["1"], [("x", "1", "1")], [[(1, ["x"])]]))
    with pytest.raises(MalformedRelationError):
        # non-composable term
        path_algebra(F2, QuiverPresentation(
            ["1", "2"], [("a", "1", "2")], [[(1, ["a", "a"])]]))
    with pytest.raises(MalformedRelationError):
        # non-parallel terms
        path_algebra(F3, QuiverPresentation(
            ["1", "2"],
            [("a", "1", "2"), ("b", "2", "1")],
            [[(1, ["a", "b"]), (1, ["b", "a"])]]))


# ----------------------------------------------------------------------
# radical certification on table-born algebras
# ----------------------------------------------------------------------

def test_dual_numbers_char2_radical_needs_second_stage():
    # F2[x]/(x^2): the regular trace form vanishes identically, so the
    # second-stage coefficient condition must cut the radical down to <x>.
    mul = [[[1, 0], [0, 1]], [[0, 1], [0, 0]]]
    a = from_table(F2, mul, [1, 0], labels=["one", "x"])
    assert a.radical_rows.shape[0] == 1
    assert a.radical_rows[0].tolist() == [0, 1]
    assert a.n_vertices == 1


@pytest.mark.parametrize("field", [QQ, F3, F5], ids=repr)
def test_split_torus_is_regraded(field):
    # k[u]/(u^2 - 1) with char != 2: two idempotents (1 +- u)/2; the input
    # basis {1, u} is not graded so the algebra must be re-based.
    mul = [[[1, 0], [0, 1]], [[0, 1], [1, 0]]]
    a = from_table(field, mul, [1, 0])
    assert a.n_vertices == 2
    assert a.radical_rows.shape[0] == 0
    assert a.dim == 2
    # the two vertex idempotents multiply to zero
    e0, e1 = a.idempotent_vector(0), a.idempotent_vector(1)
    assert field.equal(a.multiply(e0, e1), field.zeros(2))
    assert field.equal(field.normalize(e0 + e1), a.unit)


def test_unsplit_torus_char2_is_local():
    # over F2, u^2 - 1 = (u - 1)^2: local with radical <u - 1>
    mul = [[[1, 0], [0, 1]], [[0, 1], [1, 0]]]
    a = from_table(F2, mul, [1, 0])
    assert a.n_vertices == 1
    assert a.radical_rows.shape[0] == 1


def test_field_extension_rejected():
    # F4 = F2[w]/(w^2 + w + 1) is semisimple but not split over F2
    mul = [[[1, 0], [0, 1]], [[0, 1], [1, 1]]]
    with pytest.raises(NotSplitBasicError):
        from_table(F2, mul, [1, 0])


def test_matrix_algebra_rejected():
    # M2(F2) is semisimple but not commutative mod radical -> not basic
    f = F2
    d = 4

    def unit_m(i, j):
        m = np.zeros((2, 2), dtype=np.int64)
        m[i, j] = 1
        return m

    basis = [unit_m(0, 0), unit_m(0, 1), unit_m(1, 0), unit_m(1, 1)]
    mul = np.zeros((d, d, d), dtype=np.int64)
    for a in range(d):
        for b in range(d):
            prod = basis[a] @ basis[b] % 2
            for c in range(d):
                if np.array_equal(prod, basis[c]):
                    mul[a, b, c] = 1
    with pytest.raises(NotSplitBasicError):
        from_table(f, mul, [1, 0, 0, 1])


def test_quaternion_group_table_and_algebra():
    t = quaternion_table()
    # group axioms: latin square, identity, associativity spot checks
    for g in range(8):
        assert sorted(t[g]) == list(range(8))
        assert sorted(t[:, g]) == list(range(8))
        assert t[0, g] == g and t[g, 0] == g
    rng = np.random.Generator(np.random.PCG64(1))
    for _ in range(50):
        a, b, c = rng.integers(0, 8, size=3)
        assert t[t[a, b], c] == t[a, t[b, c]]
    # i^2 = j^2 = i2, i*j = ij, j*i = i3j (anti-commutation)
    assert t[1, 1] == 2 and t[4, 4] == 2
    assert t[1, 4] == 5 and t[4, 1] == 7

    a = kq8_algebra(F2)
    assert a.dim == 8
    assert a.n_vertices == 1
    assert a.labels == ["1", "i", "i2", "i3", "j", "ij", "i2j", "i3j"]
    # radical = augmentation ideal, dimension 7, and Loewy length 5
    assert a.radical_rows.shape[0] == 7
    assert a.loewy_length() == 5
    # the class-function space has dimension 5, and a symmetrizing form exists
    assert a.trace_functional_space().shape[0] == 5
    lam, _ = a.find_symmetric_form()
    assert la.is_invertible(F2, a.gram(lam))


def test_radical_verification_rejects_wrong_ideal():
    a = brauer_line_3_algebra(F2)
    with pytest.raises(AlgebraError):
        # the unit span is not a nilpotent ideal
        a.set_certified_radical(a.unit.reshape(1, -1))


# ----------------------------------------------------------------------
# derived algebras
# ----------------------------------------------------------------------

def test_opposite_involution_and_grading():
    a = brauer_line_3_algebra(F3)
    op = opposite(a)
    op.validate_associativity()
    ia, ib = a.labels.index("a"), a.labels.index("b")
    # in the opposite algebra, a *op c = c * a
    ic = a.labels.index("c")
    lhs = op.multiply(op.basis_vector(ic), op.basis_vector(ia))
    rhs = a.multiply(a.basis_vector(ia), a.basis_vector(ic))
    assert F3.equal(lhs, rhs)
    assert list(op.lv) == list(a.rv)
    opop = opposite(op)
    assert F3.equal(opop.mul, a.mul)


def test_corner_of_brauer_is_a2te():
    a = brauer_line_3_algebra(F2)
    c = corner(a, [0, 1])
    c.validate_associativity()
    assert c.dim == 6
    # "cd" is the corner's copy of the cycle b*a at vertex 2
    assert sorted(c.labels) == sorted(["e1", "e2", "a", "b", "ab", "cd"])
    assert c.radical_rows.shape[0] == 4
    ref = a2_te_algebra(F2)
    # same structure constants after matching labels (cd plays the role of ba)
    rename = {"ba": "cd"}
    perm = [c.labels.index(rename.get(l, l)) for l in ref.labels]
    sub = c.mul[np.ix_(perm, perm, perm)]
    assert F2.equal(F2.normalize(sub), ref.mul)
    # corner symmetrizing form stays nondegenerate
    lam, _ = a.find_symmetric_form()
    c2 = corner(a, [0, 1])
    assert c2.sym_form is not None
    assert la.is_invertible(F2, c2.gram(c2.sym_form))


def test_corner_single_vertex():
    a = brauer_line_3_algebra(F2)
    c = corner(a, [0])
    assert c.dim == 2
    assert c.n_vertices == 1
    assert sorted(c.labels) == sorted(["e1", "ab"])
    assert c.radical_rows.shape[0] == 1


@pytest.mark.parametrize("field", [QQ, F2], ids=repr)
def test_enveloping_algebra(field):
    a = kxn_algebra(field, 2)
    a.find_symmetric_form()
    env = enveloping(a, a)
    env.validate_associativity()
    assert env.dim == 9
    assert env.n_vertices == 1
    assert env.radical_rows.shape[0] == 8
    # multiplication: (x (x) 1)(x (x) 1) = x^2 (x) 1;
    # (1 (x) x)(1 (x) x) = 1 (x) x^2 (opposite side squares the same way)
    x = a.basis_vector(1)
    xe = al.tensor_vec(field, x, a.unit)
    ex = al.tensor_vec(field, a.unit, x)
    x2e = al.tensor_vec(field, a.basis_vector(2), a.unit)
    ex2 = al.tensor_vec(field, a.unit, a.basis_vector(2))
    assert field.equal(env.multiply(xe, xe), x2e)
    assert field.equal(env.multiply(ex, ex), ex2)
    # mixed factors commute
    assert field.equal(env.multiply(xe, ex), env.multiply(ex, xe))
    assert env.sym_form is not None
    assert la.is_invertible(field, env.gram(env.sym_form))


def test_enveloping_opposite_order():
    # env(B, A) multiplies the second coordinate in reversed order
    a = a2_te_algebra(F2)
    env = enveloping(a, a)
    ia, ib = a.labels.index("a"), a.labels.index("b")
    u = al.tensor_vec(F2, a.unit, a.basis_vector(ia))
    v = al.tensor_vec(F2, a.unit, a.basis_vector(ib))
    # (1 (x) a)(1 (x) b) has second factor b*a
    ba = a.multiply(a.basis_vector(ib), a.basis_vector(ia))
    assert F2.equal(env.multiply(u, v), al.tensor_vec(F2, a.unit, ba))


# ----------------------------------------------------------------------
# morphisms, center, generators
# ----------------------------------------------------------------------

def test_check_morphism_identity_and_failure():
    a = brauer_line_3_algebra(F2)
    assert check_morphism(F2.eye(a.dim), a, a)
    bad = F2.eye(a.dim)
    ia, ib2 = a.labels.index("a"), a.labels.index("ab")
    bad[ib2, ia] = F2.one   # send a -> a + ab: breaks a*c = 0? check catches
    # any non-morphism must be rejected
    if check_morphism(bad, a, a):  # pragma: no cover - guard
        raise AssertionError("morphism check accepted a wrong map")


def test_generators_generate():
    a = brauer_line_3_algebra(F3)
    gens = a.generators()
    # closure of the generator span under multiplication reaches the whole algebra
    span = la.row_space(F3, np.stack(gens))
    for _ in range(4):
        rows = list(span)
        for g in list(span):
            for h in list(span):
                rows.append(a.multiply(g, h))
        span = la.row_space(F3, np.stack(rows))
    assert span.shape[0] == a.dim


def test_center_of_commutative_is_everything():
    a = kxn_algebra(F5, 3)
    assert a.center_rows().shape[0] == 4


def test_center_contains_unit_and_is_central():
    a = brauer_line_3_algebra(F2)
    z = a.center_rows()
    assert la.in_span(F2, z, a.unit)
    for r in z:
        for i in range(a.dim):
            b = a.basis_vector(i)
            assert F2.equal(a.multiply(r, b), a.multiply(b, r))


def test_semisimple_functionals():
    a = brauer_line_3_algebra(F2)
    lam = a.semisimple_functionals()
    # e_v maps to the v-th coordinate, radical elements map to zero
    for v in range(3):
        vec = F2.normalize(lam @ a.idempotent_vector(v))
        want = F2.zeros(3)
        want[v] = F2.one
        assert F2.equal(vec, want)
    for r in a.radical_rows:
        assert F2.equal(F2.normalize(lam @ r), F2.zeros(3))


def test_fixture_registry_names():
    a, J = build_fixture("brauer_line_3_p2")
    assert a.dim == 10 and J == [0, 1]
    a2, J2 = build_fixture("kxn_p3_n3")
    assert a2.dim == 4 and a2.field.p == 3 and J2 == [0]
    a3, J3 = build_fixture("kq8_p2")
    assert a3.dim == 8 and J3 == [0]
    with pytest.raises(ValueError):
        build_fixture("kxn")          # missing characteristic
    with pytest.raises(ValueError):
        build_fixture("nope_p2")
