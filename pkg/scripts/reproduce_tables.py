#!/usr/bin/env python3
"""Recompute the classification tables from scratch and diff them against
the expected tables shipped with the package.

Equivalent to ``forgetmaps verify``; kept as a script so the whole
reproduction is one command from a checkout.  Exit code 0 means every
table matched; 1 means at least one differed (the diff is printed).
"""
import sys

from forgetmaps.cli import main

if __name__ == "__main__":
    sys.exit(main(["verify"] + sys.argv[1:]))
