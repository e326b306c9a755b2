import numpy as np
import pytest

from mvtrack.evaluate import (Box, DEFAULT_THRESHOLDS, auc, average_overlap,
                              emit_plot, overlap, read_curve_csv,
                              success_curve, SuccessCurve, auc_of)


def test_overlap_identical_and_disjoint():
    a = Box(0, 0, 10, 10)
    assert overlap(a, a) == 1.0
    assert overlap(a, Box(100, 100, 5, 5)) == 0.0


def test_overlap_hand_computed_third():
    assert np.isclose(overlap(Box(0, 0, 10, 10), Box(5, 0, 10, 10)), 1.0 / 3.0)


def test_overlap_symmetric_and_scale_invariant():
    rng = np.random.default_rng(0)
    for _ in range(25):
        a = Box(*rng.uniform(0, 20, 2), *rng.uniform(1, 15, 2))
        b = Box(*rng.uniform(0, 20, 2), *rng.uniform(1, 15, 2))
        assert np.isclose(overlap(a, b), overlap(b, a))
        s = rng.uniform(0.5, 4.0)
        a2 = Box(a.x * s, a.y * s, a.w * s, a.h * s)
        b2 = Box(b.x * s, b.y * s, b.w * s, b.h * s)
        assert np.isclose(overlap(a, b), overlap(a2, b2))


def test_overlap_one_iff_identical():
    a = Box(0, 0, 10, 10)
    assert overlap(a, Box(0, 0, 10, 10.01)) < 1.0


def test_overlap_rejects_nonpositive_area():
    with pytest.raises(ValueError):
        overlap(Box(0, 0, 0, 10), Box(0, 0, 10, 10))


def test_overlap_accepts_tuples():
    assert overlap((0, 0, 10, 10), (0, 0, 10, 10)) == 1.0


def test_average_overlap_cases():
    gt = [Box(0, 0, 10, 10), Box(5, 5, 10, 10)]
    assert average_overlap(gt, gt) == 1.0
    pred = [Box(0, 0, 10, 10), Box(100, 100, 10, 10)]
    assert np.isclose(average_overlap(pred, gt), 0.5)
    with pytest.raises(ValueError):
        average_overlap(pred, gt[:1])


def test_success_curve_strict_inequality():
    gt = [Box(0, 0, 10, 10)]
    # horizontal shift d gives IoU (10-d)/(10+d); d = 10/3 lands exactly 0.5
    pred = [Box(10.0 / 3.0, 0, 10, 10)]
    assert np.isclose(overlap(pred[0], gt[0]), 0.5)
    curve = success_curve(pred, gt, thresholds=(0.0, 0.25, 0.5, 0.75, 1.0))
    assert curve.values == (1.0, 1.0, 0.0, 0.0, 0.0)


def test_success_curve_all_perfect_breaks_at_one():
    gt = [Box(0, 0, 5, 5)] * 4
    curve = success_curve(gt, gt)
    assert curve.thresholds == DEFAULT_THRESHOLDS
    assert curve.values[:-1] == tuple([1.0] * 20)
    assert curve.values[-1] == 0.0  # 1 > 1 is false


def test_success_curve_matches_naive_count():
    rng = np.random.default_rng(1)
    gt = [Box(0, 0, 10, 10) for _ in range(40)]
    pred = [Box(rng.uniform(0, 8), rng.uniform(0, 8), 10, 10) for _ in range(40)]
    curve = success_curve(pred, gt)
    ov = [overlap(p, g) for p, g in zip(pred, gt)]
    for t, v in zip(curve.thresholds, curve.values):
        count = sum(1 for o in ov if o > t)
        assert v == count / len(ov)


def test_success_curve_non_increasing():
    rng = np.random.default_rng(2)
    gt = [Box(0, 0, 10, 10) for _ in range(30)]
    pred = [Box(rng.uniform(0, 9), rng.uniform(0, 9), 10, 10) for _ in range(30)]
    values = success_curve(pred, gt).values
    assert all(b <= a for a, b in zip(values, values[1:]))


def test_auc_constant_one():
    curve = SuccessCurve(DEFAULT_THRESHOLDS, tuple([1.0] * 21),
                         auc_of(DEFAULT_THRESHOLDS, [1.0] * 21))
    assert auc(curve) == 1.0


def test_auc_linear_curve():
    ts = tuple(np.linspace(0, 1, 101))
    vals = tuple(1.0 - t for t in ts)
    assert abs(auc_of(ts, vals) - 0.5) < 1e-3


def test_auc_bounded_by_max_value():
    rng = np.random.default_rng(3)
    vals = np.sort(rng.uniform(0, 1, 21))[::-1]
    assert auc_of(DEFAULT_THRESHOLDS, vals) <= vals.max() + 1e-12


def test_auc_needs_two_points():
    with pytest.raises(ValueError):
        auc_of((0.5,), (1.0,))


def test_emit_plot_single_constant_curve(tmp_path):
    gt = [Box(0, 0, 5, 5)] * 3
    curve = success_curve(gt, gt)
    csv_path, svg_path = emit_plot({"perfect": curve}, str(tmp_path / "out"))
    lines = open(csv_path).read().strip().splitlines()
    assert len(lines) == 22  # header + 21 grid rows
    svg = open(svg_path).read()
    assert "perfect (0.950)" in svg or "perfect" in svg
    back = read_curve_csv(csv_path)
    assert back["perfect"].values == curve.values
    assert back["perfect"].thresholds == curve.thresholds


def test_emit_plot_legend_sorted_by_auc(tmp_path):
    ts = DEFAULT_THRESHOLDS
    good = SuccessCurve(ts, tuple([1.0] * 20 + [0.0]), auc_of(ts, [1.0] * 20 + [0.0]))
    bad = SuccessCurve(ts, tuple([0.3] * 20 + [0.0]), auc_of(ts, [0.3] * 20 + [0.0]))
    _, svg_path = emit_plot({"weak": bad, "strong": good}, str(tmp_path / "two"))
    svg = open(svg_path).read()
    assert svg.index("strong (") < svg.index("weak (")


def test_emit_plot_constant_one_legend(tmp_path):
    ts = DEFAULT_THRESHOLDS
    flat = SuccessCurve(ts, tuple([1.0] * 21), 1.0)
    _, svg_path = emit_plot({"ideal": flat}, str(tmp_path / "flat"))
    assert "ideal (1.000)" in open(svg_path).read()
