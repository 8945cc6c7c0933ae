#!/usr/bin/env python
"""
LevyCLT command-line entrypoint.

Loads a `.env` file when present and runs the command group.

Usage:
    python run.py constants --exponent mix:1.0*1.8+1.0*1.2 --h 0.1,0.01,0.001,0.0001
    python run.py --seed 7 --threads 8 clt --exponent stable:1.5
"""

from dotenv import load_dotenv

load_dotenv()

from levyclt.cli import create_cli  # noqa: E402

cli = create_cli()

if __name__ == "__main__":
    cli()
