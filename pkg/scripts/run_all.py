#!/usr/bin/env python3
"""Run every suite on every fixture and write reports to ./reports."""

import sys

from kahlercheck.cli import main

if __name__ == "__main__":
    sys.exit(main(["run", "--suite", "all", *sys.argv[1:]]))
