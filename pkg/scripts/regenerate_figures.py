"""Write every preset's figure datasets under figures/<preset>/."""

import argparse
from pathlib import Path

from groupess.report import figure_data, write_files

PRESETS = ("hawk-dove", "stag-hunt", "prisoners-dilemma", "mac")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="figures")
    args = ap.parse_args()
    for preset in PRESETS:
        for path in write_files(figure_data(preset), Path(args.out) / preset):
            print(path)


if __name__ == "__main__":
    main()
