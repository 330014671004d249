"""Regenerate the golden SVGs from the committed fixtures.

Run from anywhere: paths resolve relative to this file. Rerun only when
the pinned renderer configuration or matplotlib itself changes, and
commit the refreshed RENDERER file alongside the images.
"""

from pathlib import Path

import matplotlib

from figures import plot_constants, plot_ensemble

HERE = Path(__file__).parent
FIXTURES = HERE / "fixtures"
GOLDENS = HERE / "goldens"


def main():
    GOLDENS.mkdir(exist_ok=True)
    plot_constants(FIXTURES / "sweep.csv", GOLDENS / "constants.svg")
    plot_ensemble(
        FIXTURES / "ensemble.csv",
        FIXTURES / "ensemble_stats.csv",
        GOLDENS / "ensemble.svg",
    )
    (GOLDENS / "RENDERER").write_text(f"matplotlib {matplotlib.__version__}\n")
    for name in ("constants.svg", "ensemble.svg"):
        print(f"wrote {GOLDENS / name}")


if __name__ == "__main__":
    main()
