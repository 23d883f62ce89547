import json
import math

import numpy as np

import ctqw
from ctqw.cli import annotate_time, run


def run_json(capsys, argv):
    code = run(argv)
    out = capsys.readouterr().out
    assert code == 0, out
    return json.loads(out)


class TestAnnotateTime:
    def test_half_pi(self):
        assert annotate_time(math.pi / 2)["symbolic"] == "pi/2"

    def test_rational_multiples(self):
        assert annotate_time(2 * math.pi / 9)["symbolic"] == "2*pi/9"
        assert annotate_time(math.pi)["symbolic"] == "pi"
        assert annotate_time(3 * math.pi)["symbolic"] == "3*pi"
        assert annotate_time(0.0)["symbolic"] == "0"

    def test_inverse_square_roots(self):
        assert annotate_time(math.pi / math.sqrt(2))["symbolic"] == "pi/sqrt(2)"
        assert annotate_time(math.pi / math.sqrt(15))["symbolic"] == "pi/sqrt(15)"

    def test_generic_time_unannotated(self):
        info = annotate_time(1.2345)
        assert info["symbolic"] is None
        assert info["display"] == "1.2345"


class TestGen:
    def test_path_3_stdout(self, capsys):
        assert run(["gen", "--family", "path:3", "--out", "-"]) == 0
        assert capsys.readouterr().out == "3 2\n0 1\n1 2\n"

    def test_weighted_graph_round_trip(self, tmp_path, capsys):
        g, _, _ = ctqw.compressed_q4()
        path = tmp_path / "cq4.edges"
        path.write_text(ctqw.format_edge_list(g))
        rep1 = run_json(capsys, ["spectrum", "--graph", str(path)])
        rep2 = run_json(capsys, ["spectrum", "--graph", str(path)])
        assert rep1 == rep2
        assert rep1["input_digest"] == rep2["input_digest"]

    def test_gen_then_analyze_matches_family_route(self, tmp_path, capsys):
        path = tmp_path / "q3.edges"
        assert run(["gen", "--family", "hypercube:3", "--out", str(path)]) == 0
        capsys.readouterr()
        via_file = run_json(capsys, ["pst", "--graph", str(path), "--pair", "0,7"])
        via_family = run_json(capsys, ["pst", "--family", "hypercube:3", "--pair", "0,7"])
        assert via_file["payload"] == via_family["payload"]


class TestPst:
    def test_hypercube_4(self, capsys):
        rep = run_json(capsys, ["pst", "--family", "hypercube:4", "--pair", "0,15"])
        pst = rep["payload"]["pst"]
        assert pst["occurs"] is True
        assert pst["time"]["symbolic"] == "pi/2"
        assert pst["certificate"]["g"] == 2
        assert rep["payload"]["bounds"]["diameter_bound_ok"] is True
        assert rep["payload"]["tolerances"]["pst_residual"] == 1e-9

    def test_negative_case(self, capsys):
        rep = run_json(capsys, ["pst", "--family", "complete:3", "--pair", "0,1"])
        assert rep["payload"]["pst"]["occurs"] is False
        assert rep["payload"]["pst"]["certificate"] is None
        assert "bounds" not in rep["payload"]

    def test_p3_symbolic_time(self, capsys):
        rep = run_json(capsys, ["pst", "--family", "path:3", "--pair", "0,2"])
        pst = rep["payload"]["pst"]
        assert pst["certificate"] == "numeric-only"
        assert pst["time"]["symbolic"] == "pi/sqrt(2)"


class TestWalkAndSpectrum:
    def test_walk_mixing_inline(self, capsys):
        rep = run_json(capsys, ["walk", "--family", "path:2", "--time", str(math.pi / 4), "--matrix", "M"])
        m = np.array(rep["payload"]["M"])
        assert np.allclose(m, 0.5, atol=1e-12)

    def test_walk_unitary_csv(self, tmp_path, capsys):
        out = str(tmp_path / "walk")
        rep = run_json(capsys, [
            "walk", "--family", "path:2", "--time", "0.5", "--matrix", "U", "--out", out,
        ])
        re = np.loadtxt(rep["payload"]["U"]["re_csv"], delimiter=",")
        im = np.loadtxt(rep["payload"]["U"]["im_csv"], delimiter=",")
        u = re + 1j * im
        expected = ctqw.transition(ctqw.decompose(ctqw.path(2)), 0.5).matrix
        assert np.max(np.abs(u - expected)) < 1e-12

    def test_spectrum_csv(self, tmp_path, capsys):
        out = str(tmp_path / "spec")
        rep = run_json(capsys, ["spectrum", "--family", "hypercube:4", "--out", out])
        assert rep["payload"]["integer_spectrum"] is True
        rows = open(rep["payload"]["spectrum_csv"]).read().strip().splitlines()
        assert rows[0] == "eigenvalue,multiplicity"
        assert len(rows) == 6

    def test_spectrum_idempotents_dump(self, tmp_path, capsys):
        prefix = str(tmp_path / "idem")
        rep = run_json(capsys, ["spectrum", "--family", "path:2", "--idempotents", prefix])
        files = rep["payload"]["idempotent_csvs"]
        assert len(files) == 2
        e0 = np.loadtxt(files[0], delimiter=",")
        assert np.allclose(e0, 0.5, atol=1e-12)


class TestQuotientCli:
    def test_lift_compressed_q4(self, tmp_path, capsys):
        g, a, b = ctqw.compressed_q4()
        gpath = tmp_path / "cq4.edges"
        gpath.write_text(ctqw.format_edge_list(g))
        ppath = tmp_path / "cq4.partition"
        blocks = [[0], [1, 2, 3, 4], [5, 6, 7, 8, 9, 10], [11], [12]]
        lines = [" ".join(map(str, blk)) for blk in blocks] + ["weights: 11=2"]
        ppath.write_text("\n".join(lines) + "\n")
        rep = run_json(capsys, [
            "quotient", "--graph", str(gpath), "--partition", str(ppath), "--lift", "0,12",
        ])
        payload = rep["payload"]
        assert payload["equitable"] is True
        assert payload["residual"] <= 1e-12
        assert payload["lift"]["occurs"] is True
        assert payload["lift"]["time"]["symbolic"] == "pi/2"
        b_matrix = np.array(payload["B"])
        assert abs(b_matrix[0, 1] - 2.0) < 1e-12
        assert abs(b_matrix[1, 2] - math.sqrt(6)) < 1e-12


class TestSchemeCli:
    def test_hadamard_pq(self, capsys):
        rep = run_json(capsys, ["scheme", "--family", "hadamard:4", "--pq"])
        p = np.array(rep["payload"]["P"])
        assert np.max(np.abs(p - np.array(rep["payload"]["Q"]))) < 1e-8
        assert np.allclose(p[0], [1, 4, 6, 4, 1], atol=1e-10)

    def test_scheme_scan_and_roots(self, capsys):
        rep = run_json(capsys, [
            "scheme", "--family", "hadamard:4",
            "--mix-eigs", str(math.pi / 4),
            "--um-scan", "1.0", "1e-3",
            "--roots", str(math.pi / 4), "8",
        ])
        payload = rep["payload"]
        assert payload["mixing_eigenvalues"]["uniform"] is True
        assert payload["um_scan"]["verdict"] == "uniform-found"
        assert payload["roots_of_unity"]["all_near_roots"] is True

    def test_non_drg_reported_not_failed(self, capsys):
        rep = run_json(capsys, ["scheme", "--family", "path:4"])
        assert rep["payload"]["distance_regular"] is False
        assert "reason" in rep["payload"]


class TestUmScanCli:
    def test_hadamard(self, capsys):
        rep = run_json(capsys, [
            "um-scan", "--family", "hadamard:4", "--tmax", "3.2", "--step", "1e-4",
        ])
        assert rep["payload"]["verdict"] == "uniform-found"
        assert abs(rep["payload"]["best_time"]["value"] - 0.7853981633974483) < 1e-6
        assert rep["payload"]["best_time"]["symbolic"] == "pi/4"


class TestAvgmixCli:
    def test_full_report(self, capsys):
        rep = run_json(capsys, [
            "avgmix", "--family", "path:3", "--interval", "10",
            "--dist", "gaussian:0.5,1.2", "--cp", "--rank",
        ])
        payload = rep["payload"]
        assert payload["rank"] == 2
        assert payload["cp"]["applicable"] is True
        assert payload["cp"]["nonneg_rank_bound"] == 2
        assert payload["rank_probe"]["distance_regular"] is False
        m = np.array(payload["average_mixing"])
        assert np.max(np.abs(m - np.array([[0.375, 0.25, 0.375], [0.25, 0.5, 0.25], [0.375, 0.25, 0.375]]))) < 1e-12

    def test_cp_not_applicable_is_verdict_not_error(self, capsys):
        rep = run_json(capsys, ["avgmix", "--family", "cycle:4", "--cp"])
        assert rep["payload"]["cp"]["applicable"] is False


class TestExitCodes:
    def test_usage_error(self, capsys):
        assert run(["pst", "--family", "path:2"]) == 1  # missing --pair
        err = json.loads(capsys.readouterr().err)
        assert err["error"] == "usage"

    def test_unknown_subcommand(self, capsys):
        assert run(["frobnicate"]) == 1

    def test_missing_input(self, capsys):
        assert run(["spectrum"]) == 1

    def test_both_inputs_rejected(self, tmp_path, capsys):
        p = tmp_path / "g.edges"
        p.write_text("2 1\n0 1\n")
        assert run(["spectrum", "--graph", str(p), "--family", "path:2"]) == 1

    def test_format_error(self, tmp_path, capsys):
        p = tmp_path / "bad.edges"
        p.write_text("2 1\n0 0\n")
        assert run(["spectrum", "--graph", str(p)]) == 2
        err = json.loads(capsys.readouterr().err)
        assert err["error"] == "input-format"

    def test_missing_file(self, capsys):
        assert run(["spectrum", "--graph", "/nonexistent/g.edges"]) == 2

    def test_bad_family(self, capsys):
        assert run(["spectrum", "--family", "hadamard:7"]) == 2

    def test_bad_pair_format(self, capsys):
        assert run(["pst", "--family", "path:2", "--pair", "zero,one"]) == 1

    def test_pair_out_of_range(self, capsys):
        assert run(["pst", "--family", "path:2", "--pair", "0,9"]) == 2

    def test_internal_consistency_failure(self, capsys, monkeypatch):
        from ctqw.errors import ConsistencyError

        def boom(*args, **kwargs):
            raise ConsistencyError("synthetic failure")

        monkeypatch.setattr("ctqw.cli.decompose", boom)
        assert run(["spectrum", "--family", "path:2"]) == 3
        err = json.loads(capsys.readouterr().err)
        assert err["error"] == "internal-consistency"


class TestReportShape:
    def test_envelope_keys(self, capsys):
        rep = run_json(capsys, ["spectrum", "--family", "path:2"])
        assert set(rep) == {"command", "input_digest", "version", "payload", "warnings"}
        assert rep["version"] == ctqw.__version__
        assert rep["command"][0] == "spectrum"

    def test_sorted_keys_deterministic(self, capsys):
        run(["spectrum", "--family", "path:3"])
        out1 = capsys.readouterr().out
        run(["spectrum", "--family", "path:3"])
        out2 = capsys.readouterr().out
        assert out1 == out2
