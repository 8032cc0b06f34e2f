import json
import math
import subprocess
import sys

import numpy as np
import pytest

from cyclicfan import (
    AtAntipode,
    DomainError,
    build_scene,
    render_fan,
    stereo_project,
    validate,
)
from cyclicfan.cli import main
from cyclicfan.io import MatrixFormatError, format_matrix, parse_matrix
from conftest import B228, MARKOV


class TestProjection:
    def test_center_maps_to_origin(self):
        p = stereo_project([1, 1, 1])
        assert p.u == pytest.approx(0, abs=1e-12)
        assert p.w == pytest.approx(0, abs=1e-12)
        assert p.t == pytest.approx(1.0)

    def test_scale_invariance(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            x = rng.normal(size=3)
            if np.linalg.norm(x) < 1e-3 or x @ np.ones(3) / np.linalg.norm(x) < -1.7:
                continue
            base = stereo_project(x)
            for lam in (0.5, 2.0, 10.0):
                p = stereo_project(lam * x)
                assert p.u == pytest.approx(base.u, abs=1e-12)
                assert p.w == pytest.approx(base.w, abs=1e-12)

    def test_e1_against_line_plane_oracle(self):
        # oracle: intersect the line N + s(p - N) with the plane <x, n> = 1
        n_hat = np.ones(3) / math.sqrt(3)
        big_n = -n_hat
        p = np.array([1.0, 0, 0])
        s = (1 - big_n @ n_hat) / ((p - big_n) @ n_hat)
        point = big_n + s * (p - big_n)
        u_hat = np.array([1, -1, 0]) / math.sqrt(2)
        w_hat = np.array([1, 1, -2]) / math.sqrt(6)
        proj = stereo_project([1, 0, 0])
        assert proj.u == pytest.approx(point @ u_hat, rel=1e-12)
        assert proj.w == pytest.approx(point @ w_hat, rel=1e-12)
        assert proj.t == pytest.approx(2 / (1 + 1 / math.sqrt(3)), rel=1e-12)

    def test_antipode_rejected(self):
        with pytest.raises(AtAntipode):
            stereo_project([-1, -1, -1])
        with pytest.raises(DomainError):
            stereo_project([0, 0, 0])


class TestRender:
    def test_deterministic(self, markov):
        layers = ("orthants", "gcones", "global", "local", "separators")
        one = render_fan(markov, 5, layers)
        two = render_fan(markov, 5, layers)
        assert one == two
        assert one.startswith("<?xml")
        assert "<svg" in one and one.rstrip().endswith("</svg>")

    def test_depth_zero_initial_triangle_only(self, markov):
        scene = build_scene(markov, 0, ("gcones",))
        assert len(scene.arcs) == 3  # three edges of one triangle

    def test_every_cone_contributes_three_vertices(self, markov):
        # distinct projected cone corners at depth 2: each full cone is a
        # triangle; count unique edge endpoints
        scene = build_scene(markov, 2, ("gcones",))
        corners = set()
        for _, seg in scene.arcs:
            corners.add(tuple(round(c, 6) for c in seg[0]))
            corners.add(tuple(round(c, 6) for c in seg[-1]))
        # 10 distinct seeds at depth <= 2 share rays; just require each arc
        # to have two endpoints and the initial triangle's corners present
        e_corners = {
            tuple(round(c, 6) for c in stereo_project([1, 0, 0]).xy()),
            tuple(round(c, 6) for c in stereo_project([0, 1, 0]).xy()),
            tuple(round(c, 6) for c in stereo_project([0, 0, 1]).xy()),
        }
        assert e_corners <= corners

    def test_markov_global_layer_is_sum_zero_plane(self, markov):
        scene = build_scene(markov, 0, ("global",))
        n_hat = np.ones(3) / math.sqrt(3)
        u_hat = np.array([1, -1, 0]) / math.sqrt(2)
        w_hat = np.array([1, 1, -2]) / math.sqrt(6)
        for _, seg in scene.arcs:
            for (u, w) in seg:
                # invert: the projected point lies on the plane sum x = 0
                # circle iff the ray direction has zero coordinate sum
                point = -n_hat + 0  # N
                # reconstruct the ray: P = N + t(p - N) with <P, n> = 1
                big_p = np.array([0.0, 0, 0]) + u * u_hat + w * w_hat + n_hat
                t = 2.0  # on the sum-zero circle t is exactly 2
                ray = (big_p - (1 - t) * (-n_hat)) / t
                assert ray @ np.ones(3) == pytest.approx(0, abs=1e-9)

    def test_unknown_layer_rejected(self, markov):
        with pytest.raises(ValueError):
            build_scene(markov, 2, ("bogus",))


class TestMatrixIO:
    def test_plain_round_trip(self, tmp_path):
        text = "0 -228 1795\n228 0 -409252\n-1795 409252 0\n"
        mat = parse_matrix(text)
        assert np.array_equal(mat.b, np.array(B228, dtype=float))
        assert format_matrix(mat).splitlines()[0] == "0 -228 1795"

    def test_d_row(self):
        mat = parse_matrix("0 -4 2\n1 0 -1\n-2 4 0\nd: 1 4 1\n")
        assert np.array_equal(mat.d, [1.0, 4.0, 1.0])

    def test_json_document(self):
        doc = json.dumps({"b": [0, -2, 2, 2, 0, -2, -2, 2, 0]})
        mat = parse_matrix(doc)
        assert np.array_equal(mat.b, np.array(MARKOV, dtype=float))

    def test_bad_documents(self):
        with pytest.raises(MatrixFormatError):
            parse_matrix("")
        with pytest.raises(MatrixFormatError):
            parse_matrix("1 2\n3 4\n")
        with pytest.raises(MatrixFormatError):
            parse_matrix("{}")


@pytest.fixture
def matrix_file(tmp_path):
    def write(rows, name="b.txt"):
        path = tmp_path / name
        path.write_text("\n".join(" ".join(str(x) for x in row) for row in rows) + "\n")
        return str(path)

    return write


class TestCli:
    def test_minimize_228(self, matrix_file, capsys):
        rc = main(["minimize", matrix_file(B228)])
        out = capsys.readouterr().out
        assert rc == 0
        assert out.splitlines()[0] == "1 2 3 2 1"
        assert "0 4 -3" in out

    def test_mutate_prints_g_chain(self, matrix_file, capsys):
        rc = main(["mutate", matrix_file(B228), "1", "2", "1"])
        out = capsys.readouterr().out
        assert rc == 0
        assert "G^w:" in out
        assert "29 8 1" in out.replace("  ", " ")

    def test_fan_streams_json_lines(self, matrix_file, capsys):
        rc = main(["fan", matrix_file(MARKOV), "--depth", "2"])
        out = capsys.readouterr().out
        assert rc == 0
        records = [json.loads(line) for line in out.splitlines()]
        assert len(records) == 1 + 3 + 6
        assert records[0]["word"] == []
        assert records[1]["kst"] is not None

    def test_verify_ok(self, matrix_file, capsys):
        rc = main(
            ["verify", matrix_file(MARKOV), "--depth", "5", "--checks", "global,signs"]
        )
        out = capsys.readouterr().out
        assert rc == 0
        assert "[ok] global-bound" in out
        machine = out.split("--- machine ---", 1)[1]
        payload = json.loads(machine)
        assert all(rep["ok"] for rep in payload)

    def test_verify_bad_check_name(self, matrix_file, capsys):
        rc = main(["verify", matrix_file(MARKOV), "--checks", "nope"])
        assert rc == 2

    def test_input_error_exit_two(self, tmp_path, capsys):
        bad = tmp_path / "bad.txt"
        bad.write_text("0 1 1\n1 0 1\n1 1 0\n")
        assert main(["mutate", str(bad)]) == 2
        assert main(["mutate", str(tmp_path / "missing.txt")]) == 2

    def test_render_writes_file(self, matrix_file, tmp_path, capsys):
        out_path = str(tmp_path / "fan.svg")
        rc = main(
            [
                "render",
                matrix_file(MARKOV),
                "--depth",
                "3",
                "--layers",
                "orthants,gcones,global",
                "-o",
                out_path,
            ]
        )
        assert rc == 0
        content = open(out_path).read()
        assert content.startswith("<?xml") and "</svg>" in content

    def test_module_entry_point(self, matrix_file):
        # the CLI is importable and runnable as a subprocess
        path = matrix_file(MARKOV)
        proc = subprocess.run(
            [sys.executable, "-m", "cyclicfan.cli", "minimize", path],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        assert "(already minimum)" in proc.stdout
