"""Release gate for the figure package: fixtures in, committed pixels out."""

from contextlib import contextmanager

from conftest import ACCEPTANCE_LINES, FIXTURES, GOLDENS

from figures import plot_constants, plot_ensemble


@contextmanager
def criterion(num, title):
    """Record one gate line; failures inside the block mark the line FAIL."""
    note = {}
    try:
        yield note
    except BaseException as exc:
        ACCEPTANCE_LINES.append(f"[FAIL] #{num} {title} ({type(exc).__name__}: {exc})")
        raise
    extra = f": {note['detail']}" if note.get("detail") else ""
    ACCEPTANCE_LINES.append(f"[PASS] #{num} {title}{extra}")


def test_10_figures_regenerate_pixel_identical(tmp_path):
    with criterion(10, "figures regenerate pixel-identical from fixtures") as note:
        constants_out = tmp_path / "constants.svg"
        summary = plot_constants(FIXTURES / "sweep.csv", constants_out)
        assert constants_out.read_bytes() == (GOLDENS / "constants.svg").read_bytes(), (
            "constants figure differs from the committed golden"
        )

        ensemble_out = tmp_path / "ensemble.svg"
        plot_ensemble(
            FIXTURES / "ensemble.csv",
            FIXTURES / "ensemble_stats.csv",
            ensemble_out,
        )
        assert ensemble_out.read_bytes() == (GOLDENS / "ensemble.svg").read_bytes(), (
            "ensemble figure differs from the committed golden"
        )

        # the variance panel starts at the small-asymmetry limit and the
        # drift panel vanishes toward the left edge
        assert abs(summary["sigma2_left"] - 1.2) < 0.05
        assert abs(summary["mu_left"]) < 0.02

        note["detail"] = (
            f"two byte-identical SVGs; sigma2 left end {summary['sigma2_left']:.4f}, "
            f"mu left end {summary['mu_left']:.2e}"
        )
