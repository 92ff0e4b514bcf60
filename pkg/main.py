from __future__ import annotations

import sys

from esdsim.cli import cli_main


def main() -> None:
    """Entry point: ``python main.py <command> ...``.

    Commands:
      evolve       evolve a Werner-like state through AD / PD / D noise
      concurrence  concurrence of the initial state, both methods
      pc           critical probability of entanglement sudden death
      scan         concurrence over a theta x p grid (CSV or JSON)
      figure N     reproduce the dataset behind figure N (1..6)
    """
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
