import csv
import io
import statistics

import numpy as np
import pytest

from kohler import GrayImage, fast_contrast_curve
from kohler import bench
from kohler.bench import (
    BenchReport,
    CurveMismatchError,
    VideoReport,
    bench_image,
    bench_video,
    resolve_impls,
    write_report_csv,
)
from kohler.pnm import frame_sequence, load_image, save_pgm


@pytest.fixture
def small_img():
    rng = np.random.default_rng(3)
    return GrayImage(rng.integers(0, 256, (24, 20), dtype=np.uint8))


def corrupt_fast(img, workers):
    curve = fast_contrast_curve(img, 1)
    curve.cardinality[0] += 1
    return curve


def test_resolve_impls():
    assert resolve_impls(["parallel", "direct"]) == ["direct", "parallel"]
    assert resolve_impls(["A", "B", "D"]) == ["direct", "fast", "parallel"]
    with pytest.raises(ValueError, match="unknown"):
        resolve_impls(["quick"])


class TestBenchImage:
    def test_run_count(self, small_img):
        rep = bench_image(small_img, runs=3, warmup=0, workers=2)
        assert rep.impls == ["direct", "fast", "parallel"]
        for name in rep.impls:
            assert len(rep.durations[name]) == 3
            assert all(d > 0 for d in rep.durations[name])
            assert rep.median(name) == statistics.median(rep.durations[name])
        assert rep.gain("direct") == 1.0
        assert rep.gain("parallel") == rep.median("direct") / rep.median("parallel")

    def test_without_direct(self, small_img):
        rep = bench_image(small_img, ["fast"], runs=1, warmup=0, workers=1)
        assert rep.gain("fast") is None

    def test_mismatch_aborts(self, small_img, monkeypatch):
        monkeypatch.setitem(bench.IMPLEMENTATIONS, "fast", corrupt_fast)
        with pytest.raises(CurveMismatchError):
            bench_image(small_img, runs=1, warmup=0, workers=2)

    @pytest.mark.parametrize("runs,warmup", [(0, 1), (1, -1)])
    def test_bad_counts(self, small_img, runs, warmup):
        with pytest.raises(ValueError):
            bench_image(small_img, runs=runs, warmup=warmup)

    def test_gain_over_direct_512(self):
        rng = np.random.default_rng(0)
        img = GrayImage(rng.integers(0, 256, (512, 512), dtype=np.uint8))
        rep = bench_image(img, ["direct", "parallel"], runs=1, warmup=1)
        assert rep.gain("parallel") > 1

    @pytest.mark.slow
    def test_linear_envelope(self):
        rng = np.random.default_rng(1)
        small = GrayImage(rng.integers(0, 256, (256, 256), dtype=np.uint8))
        double = GrayImage(rng.integers(0, 256, (512, 256), dtype=np.uint8))
        a = bench_image(small, ["fast"], runs=5, warmup=1).median("fast")
        b = bench_image(double, ["fast"], runs=5, warmup=1).median("fast")
        assert b <= 4 * a


class TestCsv:
    def report(self, medians):
        rep = BenchReport("lenna", 512, 512, 4, 1, 1)
        for name, m in medians.items():
            rep.durations[name] = [m]
        return rep

    def test_paper_gain(self):
        out = write_report_csv(self.report({"direct": 0.69, "parallel": 0.00546})).decode()
        lines = out.split("\n")
        assert lines[0] == "name,width,height,runs,median_s,run_1_s,gain_vs_direct"
        assert lines[1] == "direct,512,512,1,0.690000,0.690000,1.00"
        assert lines[2] == "parallel,512,512,1,0.005460,0.005460,126.37"
        assert out.endswith("\n") and "\r" not in out

    def test_single_impl_empty_gain(self):
        out = write_report_csv(self.report({"fast": 0.0162})).decode()
        assert out.splitlines()[1] == "fast,512,512,1,0.016200,0.016200,"

    def test_round_trip(self, small_img):
        rep = bench_image(small_img, runs=3, warmup=0, workers=2)
        rows = list(csv.DictReader(io.StringIO(write_report_csv(rep).decode())))
        assert [r["name"] for r in rows] == rep.impls
        for r in rows:
            name = r["name"]
            assert (int(r["width"]), int(r["height"]), int(r["runs"])) == (20, 24, 3)
            assert float(r["median_s"]) == pytest.approx(rep.median(name), abs=5e-7)
            for i, d in enumerate(rep.durations[name]):
                assert float(r[f"run_{i + 1}_s"]) == pytest.approx(d, abs=5e-7)
            assert float(r["gain_vs_direct"]) == pytest.approx(rep.gain(name), abs=5e-3)


class TestVideo:
    def frames(self, tmp_path, n=3, constant=False):
        tmp_path.mkdir(exist_ok=True)
        rng = np.random.default_rng(5)
        for i in range(n):
            px = np.full((12, 16), 40, dtype=np.uint8) if constant else rng.integers(0, 256, (12, 16), dtype=np.uint8)
            save_pgm(GrayImage(px), tmp_path / f"f{i:03d}.pgm")
        return frame_sequence(tmp_path)

    def test_two_class_output(self, tmp_path):
        seq = self.frames(tmp_path / "in")
        rep = bench_video(seq, ["direct", "parallel"], workers=2, out_dir=tmp_path / "out")
        assert rep.frame_count == 3
        for name in ("direct", "parallel"):
            assert rep.fps(name) * rep.seconds[name] == pytest.approx(3, rel=1e-9)
            assert rep.decode_seconds[name] > 0
            assert rep.no_boundary_frames[name] == 0
        assert rep.gain("parallel") == rep.fps("parallel") / rep.fps("direct")
        outs = sorted((tmp_path / "out").iterdir())
        assert [p.name for p in outs] == ["f000.pgm", "f001.pgm", "f002.pgm"]
        for p in outs:
            assert len(np.unique(load_image(p).pixels)) <= 2

    def test_single_frame_fps(self, tmp_path):
        rep = bench_video(self.frames(tmp_path, n=1), ["fast"])
        assert rep.fps("fast") == 1 / rep.seconds["fast"]

    def test_constant_frames_pass_through(self, tmp_path):
        seq = self.frames(tmp_path / "in", n=4, constant=True)
        rep = bench_video(seq, ["parallel"], out_dir=tmp_path / "out")
        assert rep.no_boundary_frames["parallel"] == 4
        assert load_image(tmp_path / "out" / "f000.pgm") == load_image(seq.paths[0])

    def test_in_memory_frames(self):
        imgs = [GrayImage([[0, 255], [255, 0]])] * 2
        rep = bench_video(imgs, ["fast"], workers=1)
        assert rep.frame_count == 2 and (rep.width, rep.height) == (2, 2)
        assert rep.gain("fast") is None

    def test_empty(self):
        with pytest.raises(ValueError):
            bench_video([], ["fast"])
