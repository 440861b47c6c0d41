#!/usr/bin/env python3
"""
hdspecreg Main Script.
"""

import sys

from hdspecreg.cli import run


def main() -> None:
    """
    Main entry point for the hdspecreg command line.

    Notes
    -----
    1. Parses the sub-command and its flags (``python main.py --help``).
    2. Loads the configuration file given with ``--config`` over the built-in
       defaults, then applies the flags on top.
    3. Sets up global logging once for the whole package.
    4. Runs the command and writes its reports to the output directory.

    Exit codes: 0 on success, 1 on a data or configuration error, 2 on a
    numerical failure or a usage error.

    Examples
    --------
    .. code-block:: bash

        python main.py screen --input data.csv --v v --z z1,z2,z3 --top 2
        python main.py simulate --design 1 --n 500 --p 15 --reps 200 --seed 7
    """
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
