import numpy as np
import pytest

from robustness_predictor import (
    FormatError,
    apply_square_mask,
    load_manifest,
    manifest_digest,
    read_curve_csv,
    read_rimg,
    sample_corner,
    write_curve_csv,
    write_rimg,
)

from conftest import run_toolkit


class TestRimg:
    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(0)
        pixels = rng.random((9, 7)).astype(np.float32)
        write_rimg(pixels, tmp_path / "x.rimg")
        assert np.array_equal(read_rimg(tmp_path / "x.rimg"), pixels)

    def test_header_layout(self, tmp_path):
        write_rimg(np.zeros((2, 3), dtype=np.float32), tmp_path / "x.rimg")
        data = (tmp_path / "x.rimg").read_bytes()
        assert data[:4] == b"RIMG" and data[4] == 1
        assert len(data) == 13 + 4 * 6

    def test_rejects_bad_magic(self, tmp_path):
        (tmp_path / "x.rimg").write_bytes(b"NOPE" + bytes(30))
        with pytest.raises(FormatError):
            read_rimg(tmp_path / "x.rimg")

    def test_rejects_truncation(self, tmp_path):
        write_rimg(np.zeros((4, 4), dtype=np.float32), tmp_path / "x.rimg")
        raw = (tmp_path / "x.rimg").read_bytes()
        (tmp_path / "x.rimg").write_bytes(raw[:-3])
        with pytest.raises(FormatError):
            read_rimg(tmp_path / "x.rimg")

    def test_reads_toolkit_output(self, tmp_path):
        # an image produced by the dataset toolkit itself must parse
        edges = tmp_path / "g.edges"
        run_toolkit("gen", "--topology", "er", "--n", "12", "--k", "2", "--seed", "3", "--out", edges)
        ds = tmp_path / "ds"
        run_toolkit(
            "dataset", "exp1", "--out-dir", ds, "--n", "12", "--topologies", "er",
            "--k-list", "2", "--train", "1", "--test", "0", "--strategy", "ra",
            "--kind", "connectivity", "--seed", "5",
        )
        manifest = load_manifest(ds / "manifest.json")
        image = read_rimg(manifest.resolve(manifest.entries[0].image_path))
        assert image.shape == (12, 12)
        assert set(np.unique(image)) <= {0.0, 1.0}


class TestCurveCsv:
    def test_round_trip(self, tmp_path):
        values = np.array([1 / 3, 0.5, 1.0])
        write_curve_csv(values, tmp_path / "c.csv")
        assert np.array_equal(read_curve_csv(tmp_path / "c.csv"), values)

    def test_header_enforced(self, tmp_path):
        (tmp_path / "c.csv").write_text("step,value\n0,1\n")
        with pytest.raises(FormatError):
            read_curve_csv(tmp_path / "c.csv")


class TestManifest:
    def test_loads_toolkit_manifest(self, tmp_path):
        ds = tmp_path / "ds"
        run_toolkit(
            "dataset", "exp1", "--out-dir", ds, "--n", "12", "--topologies", "er,sw",
            "--k-list", "2", "--train", "2", "--test", "1", "--mask-sizes", "3",
            "--strategy", "ra", "--kind", "connectivity", "--seed", "5",
        )
        manifest = load_manifest(ds / "manifest.json")
        assert manifest.n == 12
        assert len(manifest.entries) == 2 * (2 + 1 * 2)
        masked = [e for e in manifest.entries if e.mask]
        assert masked and all(e.mask_kind == "null" and e.mask_size == 3 for e in masked)

    def test_digest_tracks_content(self, tmp_path, synthetic_manifest):
        d1 = manifest_digest(synthetic_manifest)
        assert d1 == manifest_digest(synthetic_manifest)
        synthetic_manifest.write_text(synthetic_manifest.read_text() + "\n")
        assert manifest_digest(synthetic_manifest) != d1

    def test_schema_checked(self, tmp_path):
        bad = tmp_path / "m.json"
        bad.write_text('{"rnet-manifest": 9, "entries": []}')
        with pytest.raises(FormatError):
            load_manifest(bad)


class TestMaskParity:
    def test_matches_toolkit_mask_command(self, tmp_path):
        rng = np.random.default_rng(7)
        pixels = (rng.random((20, 20)) < 0.2).astype(np.float32)
        src = tmp_path / "src.rimg"
        write_rimg(pixels, src)
        for kind, row, col, size in (("null", 3, 5, 6), ("confusion", 1, 14, 4)):
            out = tmp_path / f"{kind}.rimg"
            run_toolkit("mask", "--in", src, "--kind", kind, "--size", size,
                        "--row", row, "--col", col, "--out", out)
            ours = apply_square_mask(pixels, kind, size, row, col)
            assert np.array_equal(read_rimg(out), ours)

    def test_corner_sampling_range(self):
        rng = np.random.default_rng(3)
        seen = {sample_corner(10, 4, rng) for _ in range(500)}
        rows = {r for r, _ in seen}
        cols = {c for _, c in seen}
        assert rows == cols == {1, 2, 3, 4, 5, 6}

    def test_mask_bounds(self):
        pixels = np.zeros((8, 8), dtype=np.float32)
        with pytest.raises(ValueError):
            apply_square_mask(pixels, "null", 3, 6, 1)
        with pytest.raises(ValueError):
            apply_square_mask(pixels, "blur", 3, 1, 1)
