import json

import numpy as np
import pytest

from netrobust import GrayImage, hash_tree, load_manifest, read_image, write_image
from netrobust.cli import run
from netrobust.reports import ErrorRow, write_error_report


def test_gen_writes_expected_header(tmp_path):
    out = tmp_path / "g.edges"
    code = run(["gen", "--topology", "er", "--n", "100", "--k", "4", "--seed", "7", "--out", str(out)])
    assert code == 0
    assert out.read_text().splitlines()[0] == "# RNET-EDGES v1 N=100 M=400"


def test_gen_requires_seed(tmp_path, capsys):
    code = run(["gen", "--topology", "er", "--n", "20", "--k", "2", "--out", str(tmp_path / "g")])
    assert code == 2
    assert "--seed" in capsys.readouterr().err


def test_gen_identical_seeds_identical_bytes(tmp_path):
    a, b = tmp_path / "a.edges", tmp_path / "b.edges"
    for out in (a, b):
        assert run(["gen", "--topology", "sf", "--n", "50", "--k", "3", "--seed", "5", "--out", str(out)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_gen_validation_error_exit_code(tmp_path):
    code = run(["gen", "--topology", "er", "--n", "4", "--k", "99", "--seed", "1", "--out", str(tmp_path / "g")])
    assert code == 4


def test_unknown_flag_is_usage_error(tmp_path):
    assert run(["gen", "--not-a-flag", "x"]) == 2


def test_unknown_subcommand_is_usage_error():
    assert run(["frobnicate"]) == 2


@pytest.mark.parametrize(
    "argv",
    [
        ["gen", "--help"],
        ["attack", "--help"],
        ["mask", "--help"],
        ["dataset", "exp1", "--help"],
        ["dataset", "exp2", "--help"],
        ["eval", "--help"],
        ["sweep", "--help"],
        ["difftable", "--help"],
    ],
)
def test_help_everywhere(argv, capsys):
    assert run(argv) == 0
    assert "usage" in capsys.readouterr().out.lower()


def test_attack_writes_curve_rows(tmp_path):
    edges = tmp_path / "g.edges"
    run(["gen", "--topology", "er", "--n", "100", "--k", "4", "--seed", "7", "--out", str(edges)])
    curve = tmp_path / "c.csv"
    code = run(
        ["attack", "--in", str(edges), "--strategy", "td", "--mode", "adaptive",
         "--kind", "controllability", "--out", str(curve)]
    )
    assert code == 0
    lines = curve.read_text().splitlines()
    assert lines[0] == "index,value"
    assert len(lines) == 101


def test_attack_random_needs_seed(tmp_path):
    edges = tmp_path / "g.edges"
    run(["gen", "--topology", "er", "--n", "20", "--k", "2", "--seed", "1", "--out", str(edges)])
    code = run(["attack", "--in", str(edges), "--strategy", "ra", "--kind", "connectivity",
                "--out", str(tmp_path / "c.csv")])
    assert code == 2


def test_attack_repeats_average(tmp_path):
    edges = tmp_path / "g.edges"
    run(["gen", "--topology", "er", "--n", "20", "--k", "2", "--seed", "1", "--out", str(edges)])
    curve = tmp_path / "c.csv"
    code = run(["attack", "--in", str(edges), "--strategy", "ra", "--kind", "connectivity",
                "--seed", "5", "--repeats", "4", "--out", str(curve)])
    assert code == 0
    assert len(curve.read_text().splitlines()) == 21


def test_attack_repeats_conflicts_with_order_out(tmp_path):
    edges = tmp_path / "g.edges"
    run(["gen", "--topology", "er", "--n", "20", "--k", "2", "--seed", "1", "--out", str(edges)])
    code = run(["attack", "--in", str(edges), "--strategy", "ra", "--kind", "connectivity",
                "--seed", "5", "--repeats", "4", "--out", str(tmp_path / "c.csv"),
                "--order-out", str(tmp_path / "o.csv")])
    assert code == 2


def test_attack_missing_input_is_io_error(tmp_path):
    code = run(["attack", "--in", str(tmp_path / "nope.edges"), "--strategy", "td",
                "--kind", "connectivity", "--out", str(tmp_path / "c.csv")])
    assert code == 3


def test_attack_order_out(tmp_path):
    edges = tmp_path / "g.edges"
    run(["gen", "--topology", "sw", "--n", "12", "--k", "2", "--seed", "3", "--out", str(edges)])
    order = tmp_path / "order.csv"
    code = run(["attack", "--in", str(edges), "--strategy", "td", "--kind", "connectivity",
                "--out", str(tmp_path / "c.csv"), "--order-out", str(order)])
    assert code == 0
    lines = order.read_text().splitlines()
    assert lines[0] == "step,node"
    assert len(lines) == 13


def test_mask_confusion_region(tmp_path):
    src = tmp_path / "img.rimg"
    write_image(GrayImage(np.ones((30, 30), dtype=np.float32)), src)
    out = tmp_path / "masked.rimg"
    code = run(["mask", "--in", str(src), "--kind", "confusion", "--size", "20",
                "--row", "5", "--col", "5", "--out", str(out)])
    assert code == 0
    img = read_image(out)
    assert (img.pixels[4:24, 4:24] == 0.5).all()
    assert img.pixels[0, 0] == 1.0


def test_mask_sampled_position(tmp_path):
    src = tmp_path / "img.rimg"
    write_image(GrayImage(np.zeros((10, 10), dtype=np.float32)), src)
    out = tmp_path / "m.rimg"
    code = run(["mask", "--in", str(src), "--kind", "confusion", "--size", "4",
                "--seed", "11", "--out", str(out)])
    assert code == 0
    assert (read_image(out).pixels == 0.5).sum() == 16


def test_mask_without_position_or_seed(tmp_path):
    src = tmp_path / "img.rimg"
    write_image(GrayImage(np.zeros((6, 6), dtype=np.float32)), src)
    code = run(["mask", "--in", str(src), "--kind", "null", "--size", "2", "--out", str(tmp_path / "m.rimg")])
    assert code == 2


def test_mask_oversize_is_validation_error(tmp_path):
    src = tmp_path / "img.rimg"
    write_image(GrayImage(np.zeros((6, 6), dtype=np.float32)), src)
    code = run(["mask", "--in", str(src), "--kind", "null", "--size", "6",
                "--seed", "1", "--out", str(tmp_path / "m.rimg")])
    assert code == 4


def test_config_file_supplies_defaults(tmp_path):
    cfg = tmp_path / "gen.cfg"
    cfg.write_text("topology er\nn 30\nk 2\nseed 4\n")
    out = tmp_path / "g.edges"
    code = run(["gen", "--config", str(cfg), "--out", str(out)])
    assert code == 0
    assert "N=30" in out.read_text().splitlines()[0]


def test_config_file_flag_priority(tmp_path):
    cfg = tmp_path / "gen.cfg"
    cfg.write_text("topology er\nn 30\nk 2\nseed 4\n")
    out = tmp_path / "g.edges"
    code = run(["gen", "--config", str(cfg), "--n", "40", "--out", str(out)])
    assert code == 0
    assert "N=40" in out.read_text().splitlines()[0]


def test_config_file_unknown_key(tmp_path):
    cfg = tmp_path / "gen.cfg"
    cfg.write_text("nonsense 1\n")
    assert run(["gen", "--config", str(cfg), "--out", str(tmp_path / "g")]) == 2


def test_config_file_accepts_k_avg_spelling(tmp_path):
    cfg = tmp_path / "gen.cfg"
    cfg.write_text("topology er\nn 30\nk_avg 2\nseed 4\n")
    out = tmp_path / "g.edges"
    assert run(["gen", "--config", str(cfg), "--out", str(out)]) == 0
    assert "M=60" in out.read_text().splitlines()[0]


DATASET_ARGS = [
    "--n", "16", "--topologies", "er,sw", "--k-list", "2", "--strategy", "ra",
    "--kind", "connectivity", "--seed", "9",
]


def _build_exp1(tmp_path, name):
    out = tmp_path / name
    code = run(["dataset", "exp1", "--out-dir", str(out), *DATASET_ARGS,
                "--train", "2", "--test", "6", "--mask-sizes", "3,5"])
    assert code == 0
    return out


def test_dataset_exp1_cli(tmp_path):
    out = _build_exp1(tmp_path, "ds")
    manifest = load_manifest(out / "manifest.json")
    # 2 configs x (2 train + 6 test x (1 base + 2 masked))
    assert len(manifest.entries) == 2 * (2 + 6 * 3)


def test_dataset_cli_deterministic(tmp_path):
    a = _build_exp1(tmp_path, "a")
    b = _build_exp1(tmp_path, "b")
    assert hash_tree(a) == hash_tree(b)


def test_dataset_exp2_cli(tmp_path):
    out = tmp_path / "ds2"
    code = run(["dataset", "exp2", "--out-dir", str(out), *DATASET_ARGS,
                "--originals", "2", "--masked-per-original", "4", "--mask-size", "4"])
    assert code == 0
    manifest = load_manifest(out / "manifest.json")
    assert len(manifest.entries) == 2 * 2 * (1 + 4)


def test_eval_sweep_pipeline(tmp_path):
    out = _build_exp1(tmp_path, "ds")
    manifest = load_manifest(out / "manifest.json")
    preds = tmp_path / "preds"
    preds.mkdir()
    rng = np.random.default_rng(0)
    for e in manifest.entries:
        truth_lines = (out / e.curve_path).read_text().splitlines()[1:]
        values = np.array([float(line.split(",")[1]) for line in truth_lines])
        # degrade masked entries so the sweep has signal
        noise = 0.2 if e.mask is not None else 0.001
        noisy = np.clip(values + rng.normal(0, noise, len(values)), 0, 1)
        lines = ["index,value"] + [f"{i},{v:.17g}" for i, v in enumerate(noisy)]
        (preds / f"{e.entry_id}.csv").write_text("\n".join(lines) + "\n")

    report = tmp_path / "errors.csv"
    summary = tmp_path / "summary.json"
    code = run(["eval", "--manifest", str(out / "manifest.json"), "--pred-dir", str(preds),
                "--out", str(report), "--json", str(summary)])
    assert code == 0
    assert json.loads(summary.read_text())["entries"] == 2 * 6 * 3

    code = run(["sweep", "--report", str(report), "--alpha", "0.05", "--out", str(tmp_path / "sweep")])
    assert code == 0
    sweep = json.loads((tmp_path / "sweep.json").read_text())
    assert set(sweep) == {"er,k2,ra,connectivity", "sw,k2,ra,connectivity"}
    for rpt in sweep.values():
        assert rpt["threshold"] == 3  # every masked size is degraded


def test_difftable_cli(tmp_path):
    def rows(kind, mae):
        return [
            ErrorRow(
                entry_id=f"e{i}", topology="er", k_avg=4.0, instance_index=i,
                attack_strategy="ra", attack_mode="adaptive", curve_kind="connectivity",
                role="test", mask_kind=kind, mask_size=10, mask_row=1, mask_col=1, mae=mae,
            )
            for i in range(4)
        ]

    null_report = tmp_path / "null.csv"
    confusion_report = tmp_path / "conf.csv"
    write_error_report(rows("null", 0.05), null_report)
    write_error_report(rows("confusion", 0.02), confusion_report)
    code = run(["difftable", "--null", str(null_report), "--confusion", str(confusion_report),
                "--out", str(tmp_path / "table")])
    assert code == 0
    table = json.loads((tmp_path / "table.json").read_text())
    assert table["n_positive"] == 1 and table["n_negative"] == 0
    assert abs(table["diffs"]["er,k4,ra,connectivity,s10"] - 0.03) < 1e-12
