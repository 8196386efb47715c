import numpy as np
import pytest

from fracdenoise import InvalidArgumentError, SolverConfig, denoise, psnr
from fracdenoise.benchmark import METHODS, BenchmarkConfig, BestTracker, run_benchmark, run_cell, table_rows
from fracdenoise.metrics import NoiseSpec, add_gaussian_noise


@pytest.fixture(scope="module")
def clean():
    y, x = np.mgrid[0:32, 0:32]
    return np.where(x + y < 32, 50.0, 180.0) + 0.5 * x


def small(**kw):
    base = dict(sigmas=(15.0,), seed=2, solver=SolverConfig(n_steps=30), pm_steps=60, patience=None)
    base.update(kw)
    return BenchmarkConfig(**base)


class TestBestTracker:
    def test_keeps_best_iterate(self, clean):
        noisy = add_gaussian_noise(clean, NoiseSpec(15, 2))
        tracker = BestTracker(clean)
        history = []
        denoise(noisy, SolverConfig(n_steps=25), observer=lambda n, g: (tracker(n, g), history.append(np.clip(g, 0, 255))))
        scores = [psnr(h, clean) for h in history]
        assert tracker.best_step == int(np.argmax(scores)) + 1
        assert tracker.best_psnr == max(scores)
        np.testing.assert_array_equal(tracker.best, history[tracker.best_step - 1])

    def test_patience_stops_early(self, clean):
        calls = []

        def solver(observer):
            for n in range(1, 101):
                calls.append(n)
                # PSNR peaks at step 5 and then falls
                observer(n, clean + abs(n - 5) + 1.0)

        tracker = BestTracker(clean, patience=3)
        tracker.run(solver)
        assert tracker.best_step == 5 and calls[-1] == 8


class TestRunCell:
    def test_noisy_cell_is_reference_noise(self, clean):
        r = run_cell("img", clean, 15.0, "noisy", small())
        noisy = np.clip(add_gaussian_noise(clean, NoiseSpec(15.0, 2)), 0, 255)
        np.testing.assert_array_equal(r.output, noisy)
        assert r.best_step == 0

    @pytest.mark.parametrize("method", ["gaussian", "median", "pm", "proposed"])
    def test_methods_improve_on_noisy(self, clean, method):
        noisy = run_cell("img", clean, 15.0, "noisy", small())
        r = run_cell("img", clean, 15.0, method, small())
        assert r.psnr_db > noisy.psnr_db
        assert r.psnr_db == psnr(r.output, clean)
        assert r.output.min() >= 0 and r.output.max() <= 255

    def test_iterative_best_step_within_budget(self, clean):
        r = run_cell("img", clean, 15.0, "pm", small(pm_steps=40))
        assert 1 <= r.best_step <= 40
        assert "max_steps=40" in r.param_note and "K=p30.0" in r.param_note

    def test_patience_does_not_change_an_interior_peak(self):
        y, x = np.mgrid[0:32, 0:32]
        texture = 128 + 60 * np.sin(0.9 * x) * np.cos(0.7 * y)
        full = run_cell("img", texture, 15.0, "proposed", small(solver=SolverConfig(n_steps=80)))
        assert full.best_step < 40
        early = run_cell("img", texture, 15.0, "proposed", small(solver=SolverConfig(n_steps=80), patience=20))
        assert (early.best_step, early.psnr_db) == (full.best_step, full.psnr_db)

    def test_baseline_sweep_picks_best(self, clean):
        r = run_cell("img", clean, 15.0, "median", small(median_radii=(1,)))
        assert r.param_note == "radius=1"

    def test_unknown_method(self, clean):
        with pytest.raises(InvalidArgumentError):
            run_cell("img", clean, 15.0, "bm3d", small())


def test_run_order_and_table(clean):
    results = run_benchmark([("a", clean), ("b", clean[:20, :24])], small(sigmas=(5.0, 15.0)))
    assert [(r.image, r.sigma, r.method) for r in results] == [
        (img, s, m) for img in "ab" for s in (5.0, 15.0) for m in METHODS
    ]
    rows = table_rows(results)
    assert len(rows) == 8
    assert rows[0]["pm"] == repr(results[3].psnr_db)


def test_duplicate_names_rejected(clean):
    with pytest.raises(InvalidArgumentError):
        run_benchmark([("a", clean), ("a", clean)], small())


@pytest.mark.parametrize(
    "kwargs", [{"sigmas": ()}, {"pm_dt": 0.3}, {"patience": 0}, {"median_radii": (0,)}, {"ssim_window": "gauss"}]
)
def test_invalid_config(kwargs):
    with pytest.raises(InvalidArgumentError):
        small(**kwargs)
