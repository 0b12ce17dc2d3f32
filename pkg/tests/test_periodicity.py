"""Twisted-periodicity certificates: resolutions, σ extraction, splicing,
inversion, and verification."""

import numpy as np
import pytest

from pertwist.linalg import Field
from pertwist.algebra import QuiverPresentation, path_algebra
from pertwist.fixtures import kxn_algebra, a2_te_algebra, kq8_algebra
from pertwist.blocks import BlockComplex, homotopy_equivalent_blocks, dual_blocks
from pertwist.modules import IsoKind
from pertwist import periodicity as P


def semisimple_pair(p=3):
    f = Field(p)
    return path_algebra(f, QuiverPresentation(["u", "v"], [], []))


class TestCertify:
    def test_dual_numbers_f3_period_one_sigma_negates(self):
        f = Field(3)
        e = kxn_algebra(f, 1)
        r = P.certify_twisted_periodicity(e, 3)
        assert r.period == 1
        assert sorted(r.y.terms) == [0]
        x = e.basis_vector(1)
        assert (r.sigma @ x % 3 == 2 * x % 3).all()
        assert r.sigma_perm == [0]

    def test_dual_numbers_f2_sigma_identity(self):
        f = Field(2)
        e = kxn_algebra(f, 1)
        r = P.certify_twisted_periodicity(e, 2)
        assert r.period == 1
        assert (r.sigma == f.eye(2)).all()

    def test_dual_numbers_rational_sigma_negates(self):
        f = Field(0)
        e = kxn_algebra(f, 1)
        r = P.certify_twisted_periodicity(e, 2)
        assert r.period == 1
        x = e.basis_vector(1)
        assert f.equal(f.normalize(r.sigma @ x), f.normalize(-x))

    @pytest.mark.parametrize("p", [2, 3, 5])
    @pytest.mark.parametrize("n", [2, 3])
    def test_truncated_polynomial_period_two_matches_pattern(self, p, n):
        f = Field(p)
        e = kxn_algebra(f, n)
        r = P.certify_twisted_periodicity(e, 3)
        assert r.period == 2
        assert (r.sigma == f.eye(n + 1)).all()
        pat = P.kxn_pattern_resolution(e, n, periods=2)
        assert pat.period == 2
        res = homotopy_equivalent_blocks(r.y, pat.y)
        assert res.kind is IsoKind.ISO

    def test_certificate_passes_full_verification(self):
        f = Field(3)
        e = kxn_algebra(f, 2)
        rep = P.verify_truncated(P.certify_twisted_periodicity(e, 3))
        assert rep.ok, rep.lines()

    def test_two_vertex_self_dual_algebra_swaps_vertices(self):
        f = Field(2)
        a = a2_te_algebra(f)
        r = P.certify_twisted_periodicity(a, 4)
        assert r.period == 2
        assert r.sigma_perm == [1, 0]
        assert P.verify_truncated(r).ok

    def test_semisimple_is_not_certified(self):
        ss = semisimple_pair()
        with pytest.raises(P.NotCertified) as exc:
            P.certify_twisted_periodicity(ss, 3)
        assert any("terminated" in line for line in exc.value.log)


class TestResolution:
    def test_alternating_values_for_dual_numbers_f2(self):
        f = Field(2)
        e = kxn_algebra(f, 1)
        res = P.bimodule_resolution(e, 3)
        assert sorted(res.y.terms) == [-3, -2, -1, 0]
        for i in (-3, -2, -1):
            assert res.y.labels(i) == ["P0"]
            assert res.y.blocks[i][(0, 0)].tolist() == [0, 1, 1, 0]
        assert res.aug[0].tolist() == [1, 0]
        assert [k.dim for k, _ in res.kernels] == [2, 2, 2, 2]

    def test_semisimple_resolution_terminates_at_degree_zero(self):
        ss = semisimple_pair()
        res = P.bimodule_resolution(ss, 3)
        assert sorted(res.y.terms) == [0]
        assert res.kernels[0][0].dim == 0

    def test_term_dimension_guard(self):
        f = Field(3)
        e = kxn_algebra(f, 2)
        with pytest.raises(P.DepthExceeded):
            P.bimodule_resolution(e, 4, max_term_dim=2)


class TestSplice:
    def test_two_period_ones_give_standard_period_two(self):
        f = Field(3)
        e = kxn_algebra(f, 1)
        r = P.certify_twisted_periodicity(e, 2)
        s = P.splice(r, r)
        assert s.period == 2
        assert (s.sigma == f.eye(2)).all()
        assert P.verify_truncated(s).ok
        pat = P.kxn_pattern_resolution(e, 1, periods=2)
        assert homotopy_equivalent_blocks(s.y, pat.y).kind is IsoKind.ISO

    def test_vertex_swap_squares_to_identity(self):
        f = Field(2)
        a = a2_te_algebra(f)
        r = P.certify_twisted_periodicity(a, 4)
        s = P.splice(r, r)
        assert s.period == 4
        assert s.sigma_perm == [0, 1]
        assert P.verify_truncated(s).ok

    def test_period_additivity(self):
        f = Field(3)
        e = kxn_algebra(f, 2)
        r = P.certify_twisted_periodicity(e, 3)
        s = P.splice(r, r)
        assert s.period == 4
        assert P.verify_truncated(s).ok

    def test_algebra_mismatch(self):
        f2, f3 = Field(2), Field(3)
        r1 = P.certify_twisted_periodicity(kxn_algebra(f2, 1), 2)
        r2 = P.certify_twisted_periodicity(kxn_algebra(f3, 2), 3)
        with pytest.raises(P.AlgebraMismatch):
            P.splice(r1, r2)


class TestInverse:
    def test_degrees_and_dual_comparison(self):
        f = Field(3)
        e = kxn_algebra(f, 2)
        r = P.certify_twisted_periodicity(e, 3)
        inv = P.inverse_resolution(r)
        assert sorted(inv.terms) == [0, 1]
        res = homotopy_equivalent_blocks(inv, dual_blocks(r.y))
        assert res.kind is IsoKind.ISO

    def test_untwisted_period_one_is_fixed(self):
        f = Field(2)
        e = kxn_algebra(f, 1)
        r = P.certify_twisted_periodicity(e, 2)
        inv = P.inverse_resolution(r)
        assert sorted(inv.terms) == [0]
        assert inv.labels(0) == r.y.labels(0)
        assert inv.blocks == r.y.blocks


class TestScreen:
    def test_truncated_polynomial_screens(self):
        assert P.simple_screen(kxn_algebra(Field(2), 1), 3) == {0: 1}
        assert P.simple_screen(kxn_algebra(Field(3), 2), 3) == {0: 2}

    def test_semisimple_screen_is_zero(self):
        assert P.simple_screen(semisimple_pair(), 3) == {0: 0, 1: 0}

    def test_bound_too_small_gives_none(self):
        assert P.simple_screen(kxn_algebra(Field(3), 2), 1) == {0: None}


class TestVerification:
    def test_corrupted_differential_is_detected(self):
        f = Field(3)
        e = kxn_algebra(f, 2)
        r = P.certify_twisted_periodicity(e, 3)
        bad_blocks = {i: {k: v.copy() for k, v in bs.items()}
                      for i, bs in r.y.blocks.items()}
        key = next(iter(bad_blocks[-1]))
        bad_blocks[-1][key][0] = (bad_blocks[-1][key][0] + 1) % 3
        bad_y = BlockComplex(r.env, r.y.terms, bad_blocks)
        bad = P.TruncatedResolution(r.algebra, r.env, r.period, bad_y, r.aug,
                                    r.sigma, r.sigma_perm, r.theta,
                                    r.kernel_rows)
        rep = P.verify_truncated(bad)
        assert not rep.ok
        failing = [name for name, okk, _ in rep.checks if not okk]
        assert "augmented complex exact" in failing

    def test_report_lines_format(self):
        f = Field(2)
        e = kxn_algebra(f, 1)
        rep = P.verify_truncated(P.certify_twisted_periodicity(e, 2))
        assert all(line.startswith("[PASS]") for line in rep.lines())


class TestQuaternion:
    def test_screen_and_bimodule_period_four(self):
        f = Field(2)
        e = kq8_algebra(f)
        assert P.simple_screen(e, 6) == {0: 4}
        r = P.certify_twisted_periodicity(e, 4)
        assert r.period == 4
        assert {i: r.y.dim(i) for i in sorted(r.y.terms)} == {
            -3: 64, -2: 128, -1: 128, 0: 64}
        rep = P.verify_truncated(r, compare_fresh=False)
        assert rep.ok, rep.lines()
