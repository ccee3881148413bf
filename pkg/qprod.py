"""Command-line launcher: ``python qprod.py eval --t 1 --x 0.5``."""

import sys

from qproduct.cli import main


if __name__ == "__main__":
    sys.exit(main())
