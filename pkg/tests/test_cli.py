"""Command-line surface: input parsing, report emission, exit codes,
negative controls, and the bundled expected-report snapshots."""

import json
import os

import pytest
from click.testing import CliRunner

from pertwist.cli import main

HERE = os.path.dirname(os.path.abspath(__file__))
SNAPDIR = os.path.join(os.path.dirname(HERE), "snapshots")

SNAPSHOT_JOBS = {
    "kx2_p2": ["periodicity", "--fixture", "kx2_p2"],
    "kx2_p3": ["periodicity", "--fixture", "kx2_p3"],
    "a2_te_p2": ["periodicity", "--fixture", "a2_te_p2"],
    "a2_te_p3": ["periodicity", "--fixture", "a2_te_p3"],
    "brauer_line_3_p2": ["twist", "--fixture", "brauer_line_3_p2",
                         "--J", "1,2"],
    "brauer_line_3_p3": ["twist", "--fixture", "brauer_line_3_p3",
                         "--J", "1,2"],
    "kq8_p2": ["algebra-check", "--fixture", "kq8_p2"],
}

LINE_FILE = """\
[algebra]
name = line
field = 2

[quiver]
vertices = u, v, w
arrow = a: u -> v
arrow = b: v -> u
arrow = c: v -> w
arrow = d: w -> v
relation = a*c
relation = d*b
relation = b*a - c*d
max_path_len = 6
"""


@pytest.fixture()
def runner():
    return CliRunner()


def alltext(res) -> str:
    out = res.output
    try:
        out += res.stderr
    except (ValueError, AttributeError):
        pass
    return out


class TestSources:
    def test_fixture_listing(self, runner):
        res = runner.invoke(main, ["fixtures"])
        assert res.exit_code == 0
        assert "kq8_p2" in res.output and "brauer_line_3_p{p}" in res.output

    def test_unknown_fixture_is_input_error(self, runner):
        res = runner.invoke(main, ["algebra-check", "--fixture", "nope_p9"])
        assert res.exit_code == 2
        assert "unknown fixture" in alltext(res)

    def test_missing_source_is_usage_error(self, runner):
        res = runner.invoke(main, ["algebra-check"])
        assert res.exit_code == 2

    def test_two_sources_is_usage_error(self, runner, tmp_path):
        p = tmp_path / "a.alg"
        p.write_text(LINE_FILE)
        res = runner.invoke(main, ["algebra-check", "--fixture", "kx2_p2",
                                   "--file", str(p)])
        assert res.exit_code == 2

    def test_file_source_round_trip(self, runner, tmp_path):
        p = tmp_path / "line.alg"
        p.write_text(LINE_FILE)
        res = runner.invoke(main, ["algebra-check", "--file", str(p),
                                   "--format", "json"])
        assert res.exit_code == 0
        d = json.loads(res.output)
        alg = d["payload"]["algebra"]
        assert alg["dim"] == 10
        assert alg["vertices"] == ["u", "v", "w"]
        assert alg["cartan"] == [[2, 1, 0], [1, 2, 1], [0, 1, 2]]

    def test_malformed_relation_has_location(self, runner, tmp_path):
        p = tmp_path / "bad.alg"
        p.write_text("[algebra]\nfield = 2\n[quiver]\nvertices = 1\n"
                     "arrow = x: 1 -> 1\nrelation = x*q\n")
        res = runner.invoke(main, ["algebra-check", "--file", str(p)])
        assert res.exit_code == 2
        text = alltext(res)
        assert "unknown name 'q'" in text
        assert "bad.alg:6:" in text


class TestAlgebraCheck:
    def test_dual_numbers_p3_summary(self, runner):
        res = runner.invoke(main, ["algebra-check", "--fixture", "kx2_p3",
                                   "--format", "json"])
        assert res.exit_code == 0
        d = json.loads(res.output)
        assert d["payload"]["algebra"]["dim"] == 2
        assert d["payload"]["symmetric"] is True
        assert d["payload"]["gram"] == [[0, 1], [1, 0]]

    def test_report_written_to_file(self, runner, tmp_path):
        dest = tmp_path / "rep.json"
        res = runner.invoke(main, ["algebra-check", "--fixture", "kx2_p2",
                                   "--format", "json", "--out", str(dest)])
        assert res.exit_code == 0
        d = json.loads(dest.read_text())
        assert d["command"] == "algebra-check"
        assert d["exit_code"] == 0


class TestPeriodicity:
    def test_two_vertex_fixture_period_two(self, runner):
        res = runner.invoke(main, ["periodicity", "--fixture", "a2_te_p2",
                                   "--format", "json"])
        assert res.exit_code == 0
        d = json.loads(res.output)
        assert d["payload"]["period"] == 2
        assert d["payload"]["sigma_vertex_action"] == ["2", "1"]

    def test_corrupted_differential_fails_exactness(self, runner):
        res = runner.invoke(main, ["periodicity", "--fixture", "a2_te_p2",
                                   "--corrupt-differential", "-1:0:0"])
        assert res.exit_code == 1
        assert "corrupting block (-1, 0, 0)" in res.output
        assert "[FAIL] augmented complex exact" in res.output

    def test_exhausted_bound_is_undetermined(self, runner):
        res = runner.invoke(main, ["periodicity", "--fixture", "a2_te_p2",
                                   "--max-period", "1"])
        assert res.exit_code == 3
        assert "no twisted period up to 1" in alltext(res)


class TestTwistCommands:
    def test_contract_passes(self, runner):
        res = runner.invoke(main, ["twist", "--fixture",
                                   "brauer_line_3_p2", "--J", "1,2",
                                   "--format", "json"])
        assert res.exit_code == 0
        d = json.loads(res.output)
        assert d["payload"]["period"] == 2
        assert d["payload"]["relabeling"] == {"1": "2", "2": "1"}
        assert all(c["ok"] for s in d["sections"] for c in s["checks"])

    def test_forced_relabeling_fails(self, runner):
        res = runner.invoke(main, ["twist", "--fixture",
                                   "brauer_line_3_p2", "--J", "1,2",
                                   "--force-sigma", "1,2"])
        assert res.exit_code == 1
        assert "[FAIL] projective image at vertex 0" in res.output

    def test_inverse_contract(self, runner):
        res = runner.invoke(main, ["inverse", "--fixture", "kx2_p2",
                                   "--J", "1", "--format", "json"])
        assert res.exit_code == 0
        d = json.loads(res.output)
        assert all(c["ok"] for s in d["sections"] for c in s["checks"])

    def test_self_splice(self, runner):
        res = runner.invoke(main, ["compose", "--fixture", "kx2_p2",
                                   "--J", "1", "--with-J", "1"])
        assert res.exit_code == 0
        assert "[PASS] tensor matches spliced complex" in res.output
        assert "[PASS] periods add" in res.output


class TestTiltCircle:
    def test_tilt_reports_certificates(self, runner):
        res = runner.invoke(main, ["tilt", "--fixture", "brauer_line_3_p2",
                                   "--J", "1,2", "--format", "json"])
        assert res.exit_code == 0
        d = json.loads(res.output)
        assert d["payload"]["step"]["source_dim"] == 10
        assert d["payload"]["step"]["target_dim"] == 12
        assert d["payload"]["target"]["cartan"] == [[2, 1, 1], [1, 2, 1],
                                                    [1, 1, 2]]

    def test_improper_subset_is_input_error(self, runner):
        res = runner.invoke(main, ["tilt", "--fixture", "brauer_line_3_p2",
                                   "--J", "1,2,3"])
        assert res.exit_code == 2
        assert "proper subset" in alltext(res)

    def test_circle_closes_with_witness(self, runner):
        res = runner.invoke(main, ["circle", "--fixture",
                                   "brauer_line_3_p2", "--J", "1,2",
                                   "--steps", "2", "--format", "json"])
        assert res.exit_code == 0
        d = json.loads(res.output)
        assert d["payload"]["run"]["dims"] == [10, 12, 10]
        assert d["payload"]["run"]["verdict"]["kind"] == "isomorphic"
        assert d["payload"]["witness"]  # explicit matrix present

    def test_wrong_period_claim_fails(self, runner):
        res = runner.invoke(main, ["circle", "--fixture",
                                   "brauer_line_3_p2", "--J", "1,2",
                                   "--steps", "2", "--claim-period", "3"])
        assert res.exit_code == 1
        assert "[FAIL] hom complex is the syzygy at step 3" in res.output


class TestSnapshots:
    @pytest.mark.parametrize("name", sorted(SNAPSHOT_JOBS))
    def test_snapshot_is_reproduced_byte_for_byte(self, runner, name):
        path = os.path.join(SNAPDIR, f"{name}.json")
        with open(path, "r", encoding="utf-8") as fh:
            expected = fh.read()
        res = runner.invoke(main, [*SNAPSHOT_JOBS[name], "--format", "json"])
        assert res.exit_code == json.loads(expected)["exit_code"]
        assert res.output == expected
