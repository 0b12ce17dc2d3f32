"""Combinatorial tilting: minimal approximations, the two-term tilting
complex, its endomorphism ring, iterated tilts closing a cycle, the
three-valued algebra-isomorphism search, and agreement with the twist."""

import json

import numpy as np
import pytest

from pertwist.linalg import Field, rank
from pertwist.algebra import AlgebraError, QuiverPresentation, path_algebra
from pertwist.fixtures import (kxn_algebra, a2_te_algebra,
                               brauer_line_3_algebra)
from pertwist.modules import Module
from pertwist.blocks import Proj, BlockComplex
from pertwist.periodicity import certify_twisted_periodicity, CheckReport
from pertwist.twist import endomorphism_setup
from pertwist import tilting as TL


@pytest.fixture(scope="module")
def line_f2():
    return brauer_line_3_algebra(Field(2))


@pytest.fixture(scope="module")
def line_step(line_f2):
    """One tilt of the line algebra at its first two vertices."""
    return TL.tilt_step(line_f2, [0, 1])


def quantum_plane(field, q):
    """Four-dimensional local algebra on two square-zero generators with
    commutation parameter q."""
    pres = QuiverPresentation(
        vertices=["1"],
        arrows=[("x", "1", "1"), ("y", "1", "1")],
        relations=[
            [(1, ["x", "x"])],
            [(1, ["y", "y"])],
            [(1, ["x", "y"]), (-q, ["y", "x"])],
        ],
    )
    return path_algebra(field, pres, max_path_len=4)


class TestApproximation:
    def test_line_outside_vertex_covered_by_middle_projective(self, line_f2):
        ap = TL.minimal_approximation(line_f2, [0, 1], 2)
        assert ap.vertex == 2
        assert ap.cover_vertices == [1]
        assert len(ap.gens) == 1
        assert ap.phi.source.dim == 4 and ap.phi.target.dim == 3

    def test_approximation_is_minimal(self, line_f2):
        ap = TL.minimal_approximation(line_f2, [0, 1], 2)
        assert TL.approximation_is_minimal(line_f2, [0, 1], ap)

    def test_dropping_a_summand_breaks_minimality(self, line_f2):
        ap = TL.minimal_approximation(line_f2, [0, 1], 2)
        doubled = TL.Approximation(ap.vertex, ap.cover_vertices * 2,
                                   ap.gens * 2, ap.phi, ap.cover)
        assert not TL.approximation_is_minimal(line_f2, [0, 1], doubled)

    def test_chosen_vertex_rejected(self, line_f2):
        with pytest.raises(TL.BadSubset, match="chosen"):
            TL.minimal_approximation(line_f2, [0, 1], 0)

    def test_out_of_range_vertex_rejected(self, line_f2):
        with pytest.raises(TL.BadSubset, match="out of range"):
            TL.minimal_approximation(line_f2, [0, 1], 7)

    def test_te_ring_approximation(self):
        a = a2_te_algebra(Field(2))
        ap = TL.minimal_approximation(a, [0], 1)
        assert ap.cover_vertices == [0]
        assert TL.approximation_is_minimal(a, [0], ap)


class TestTiltingComplex:
    def test_line_summand_shapes(self, line_f2):
        tilt = TL.combinatorial_tilting_complex(line_f2, [0, 1])
        assert tilt.chosen == [0, 1]
        t0, t1, t2 = tilt.parts
        assert t0.degrees == [-1] and t0.labels(-1) == ["P0"]
        assert t1.degrees == [-1] and t1.labels(-1) == ["P1"]
        assert t2.degrees == [-1, 0]
        assert t2.labels(-1) == ["P1"] and t2.labels(0) == ["P2"]

    def test_line_report_checks(self, line_f2):
        tilt = TL.combinatorial_tilting_complex(line_f2, [0, 1])
        assert tilt.report.ok
        assert [name for name, _, _ in tilt.report.checks] == [
            "self-orthogonality at shift +1",
            "self-orthogonality at shift -1",
            "approximation cokernels avoid chosen simples",
            "generation by the summands",
        ]

    def test_subset_guards(self, line_f2):
        for bad in ([], [0, 1, 2], [7], [-1]):
            with pytest.raises(TL.BadSubset):
                TL.combinatorial_tilting_complex(line_f2, bad)

    def test_single_vertex_algebra_has_no_proper_subset(self):
        a = kxn_algebra(Field(2), 1)
        with pytest.raises(TL.BadSubset):
            TL.combinatorial_tilting_complex(a, [0])


class TestEndomorphismRing:
    def test_line_tilts_to_twelve_dimensional_star(self, line_step):
        b = line_step.target
        assert b.dim == 12
        assert b.n_vertices == 3
        assert np.array_equal(b.cartan_matrix(),
                              [[2, 1, 1], [1, 2, 1], [1, 1, 2]])
        assert np.array_equal(b.arrow_count_matrix(),
                              [[0, 0, 1], [1, 0, 0], [0, 1, 0]])
        assert b.loewy_length() == 4
        assert rank(b.field, b.center_rows()) == 4

    def test_hom_dimensions_recorded(self, line_step):
        assert np.array_equal(line_step.hom_dims,
                              [[2, 1, 1], [1, 2, 1], [1, 1, 2]])
        assert int(line_step.hom_dims.sum()) == line_step.target.dim

    def test_dimension_can_change_across_one_tilt(self, line_step):
        assert line_step.source.dim == 10
        assert line_step.target.dim == 12

    def test_step_serializes(self, line_step):
        d = json.loads(json.dumps(line_step.to_dict()))
        assert d["source_dim"] == 10 and d["target_dim"] == 12
        assert d["summand_degrees"] == [[-1], [-1], [-1, 0]]
        assert d["summand_labels"][2] == {"-1": ["P1"], "0": ["P2"]}

    def test_all_regular_stalks_recover_the_algebra(self, line_f2):
        a = line_f2
        parts = [BlockComplex(a, {-1: [Proj(v)]}, {})
                 for v in range(a.n_vertices)]
        tilt = TL.Tilting(a, [], parts, {}, CheckReport([]))
        e, basis = TL.endomorphism_algebra(tilt)
        assert e.dim == a.dim
        assert len(basis) == a.dim
        v = TL.algebra_iso_search(e, a)
        assert v.kind is TL.AlgebraIsoKind.ISOMORPHIC
        assert v.permutation == [0, 1, 2]

    def test_second_tilt_returns_to_starting_dimension(self, line_step):
        st2 = TL.tilt_step(line_step.target, [0, 1])
        assert st2.target.dim == 10


class TestIsoSearch:
    def test_self_is_isomorphic_via_canonical_candidate(self, line_f2):
        v = TL.algebra_iso_search(line_f2, line_f2)
        assert v.kind is TL.AlgebraIsoKind.ISOMORPHIC
        assert v.permutation == [0, 1, 2]
        assert "1 candidate" in v.detail

    def test_witness_is_a_certified_morphism(self, line_f2):
        v = TL.algebra_iso_search(line_f2, line_f2)
        assert TL.morphism_check(line_f2, line_f2, v.witness)

    def test_different_fields_distinguished(self):
        v = TL.algebra_iso_search(brauer_line_3_algebra(Field(2)),
                                  brauer_line_3_algebra(Field(3)))
        assert v.kind is TL.AlgebraIsoKind.DISTINGUISHED
        assert "fields" in v.obstruction

    def test_different_dimensions_distinguished(self, line_f2):
        v = TL.algebra_iso_search(kxn_algebra(Field(2), 1), line_f2)
        assert v.kind is TL.AlgebraIsoKind.DISTINGUISHED
        assert "dimension" in v.obstruction

    def test_loewy_length_distinguishes_equal_dimensions(self):
        f = Field(2)
        chain = kxn_algebra(f, 3)          # k[x]/(x^4), Loewy length 4
        plane = quantum_plane(f, 1)        # (x, y) square-zero, length 3
        v = TL.algebra_iso_search(chain, plane)
        assert v.kind is TL.AlgebraIsoKind.DISTINGUISHED
        assert "Loewy" in v.obstruction

    def test_quantum_planes_inverse_parameters_isomorphic(self):
        f = Field(5)
        v = TL.algebra_iso_search(quantum_plane(f, 2), quantum_plane(f, 3))
        assert v.kind is TL.AlgebraIsoKind.ISOMORPHIC
        assert v.witness is not None

    def test_quantum_planes_distinct_parameters_distinguished(self):
        f = Field(5)
        v = TL.algebra_iso_search(quantum_plane(f, 2), quantum_plane(f, 4))
        assert v.kind is TL.AlgebraIsoKind.DISTINGUISHED
        assert "exhaustive" in v.obstruction

    def test_small_budget_degrades_to_invariants_match(self):
        f = Field(5)
        v = TL.algebra_iso_search(quantum_plane(f, 2), quantum_plane(f, 4),
                                  budget=50)
        assert v.kind is TL.AlgebraIsoKind.INVARIANTS_MATCH

    def test_verdict_serializes(self, line_f2):
        v = TL.algebra_iso_search(line_f2, line_f2)
        d = json.loads(json.dumps(v.to_dict()))
        assert d["kind"] == "isomorphic"
        assert d["permutation"] == [0, 1, 2]

    def test_morphism_check_rejects_non_morphism(self, line_f2):
        f = line_f2.field
        bad = f.eye(line_f2.dim)
        bad[0, 1] = f.one
        ok_shape = TL.morphism_check(line_f2, line_f2, f.eye(line_f2.dim))
        assert ok_shape
        assert not TL.morphism_check(line_f2, line_f2, bad)


class TestCircle:
    def test_two_steps_close_the_cycle(self, line_f2):
        run = TL.iterate(line_f2, [0, 1], 2)
        assert run.to_dict()["dims"] == [10, 12, 10]
        assert run.verdict.kind is TL.AlgebraIsoKind.ISOMORPHIC
        assert run.verdict.permutation == [1, 0, 2]

    def test_single_vertex_closes_in_one_step(self, line_f2):
        run = TL.iterate(line_f2, [0], 1)
        assert run.to_dict()["dims"] == [10, 10]
        assert run.verdict.kind is TL.AlgebraIsoKind.ISOMORPHIC

    @pytest.mark.parametrize("p", [2, 3])
    def test_te_ring_single_vertex_cycle(self, p):
        a = a2_te_algebra(Field(p))
        run = TL.iterate(a, [0], 1)
        assert run.to_dict()["dims"] == [6, 6]
        assert run.verdict.kind is TL.AlgebraIsoKind.ISOMORPHIC

    def test_zero_steps_compare_the_algebra_to_itself(self, line_f2):
        run = TL.iterate(line_f2, [0, 1], 0)
        assert run.to_dict()["dims"] == [10]
        assert run.verdict.kind is TL.AlgebraIsoKind.ISOMORPHIC

    def test_negative_steps_rejected(self, line_f2):
        with pytest.raises(TL.BadSubset, match="nonnegative"):
            TL.iterate(line_f2, [0, 1], -1)

    def test_improper_subset_rejected_when_stepping(self, line_f2):
        with pytest.raises(TL.BadSubset):
            TL.iterate(line_f2, [0, 1, 2], 1)

    def test_run_serializes(self, line_f2):
        run = TL.iterate(line_f2, [0, 1], 2)
        d = json.loads(json.dumps(run.to_dict()))
        assert d["dims"] == [10, 12, 10]
        assert d["verdict"]["kind"] == "isomorphic"
        assert len(d["steps"]) == 2


@pytest.fixture(scope="module")
def line_setup(line_f2):
    ed = endomorphism_setup(line_f2, [0, 1])
    r = certify_twisted_periodicity(ed.endo, 8)
    return line_f2, r


class TestCircleVsTwist:
    def test_line_checks_all_pass(self, line_setup):
        a, r = line_setup
        assert r.period == 2
        rep = TL.circle_vs_twist(a, [0, 1], r)
        assert rep.ok
        assert [name for name, _, _ in rep.checks] == [
            "chosen projective at vertex 0 relabels to 1",
            "chosen projective at vertex 1 relabels to 0",
            "tilt preimage matches the twist at vertex 2",
            "hom complex is the syzygy at step 2 (vertex 2)",
        ]

    def test_wrong_period_claim_fails_the_syzygy_check(self, line_setup):
        a, r = line_setup
        rep = TL.circle_vs_twist(a, [0, 1], r, claim_period=3)
        failed = [name for name, ok, _ in rep.checks if not ok]
        assert failed == ["hom complex is the syzygy at step 3 (vertex 2)"]

    def test_te_ring_period_one_agreement(self):
        a = a2_te_algebra(Field(2))
        ed = endomorphism_setup(a, [0])
        r = certify_twisted_periodicity(ed.endo, 8)
        assert r.period == 1
        rep = TL.circle_vs_twist(a, [0], r)
        assert rep.ok
        bad = TL.circle_vs_twist(a, [0], r, claim_period=2)
        assert not bad.ok

    def test_tracked_preimage_dimensions(self, line_setup):
        a, r = line_setup
        ed = endomorphism_setup(a, [0, 1])
        bc, m = TL.truncated_add_resolution(ed, 2, r.period)
        assert bc.degrees == [-2, -1, 0]
        assert [bc.dim(d) for d in bc.degrees] == [3, 4, 3]
        assert m.dim == 1
        hcx = TL.hom_restriction(ed, bc)
        from pertwist.complexes import homology_dims
        assert homology_dims(hcx) == {-2: 1}
