"""Shared helpers for the experiment scripts."""
import argparse
from pathlib import Path


def parser(description):
    p = argparse.ArgumentParser(description=description)
    p.add_argument("--results", default=str(Path(__file__).resolve().parent.parent / "results"),
                   help="directory for CSV output")
    return p


def results_dir(args):
    path = Path(args.results)
    path.mkdir(parents=True, exist_ok=True)
    return path
