"""Long-run energy error: SHO with hem(3,1) and Duffing with midpoint and hem(2,1).

The Duffing runs use 10^4 steps of h = 0.2 by default.
"""
from _common import parser, results_dir

from pcvi.harness import output, studies

RUNS = [("sho", "hem", 3, 1), ("duffing", "midpoint", 3, None), ("duffing", "hem", 2, 1)]


def main():
    p = parser(__doc__)
    p.add_argument("--steps", type=int, default=10000)
    p.add_argument("--h", type=float, default=0.2)
    args = p.parse_args()
    out = results_dir(args)
    for system, method, n, m in RUNS:
        cfg = studies.ExperimentConfig(system=system, method=method, n=n, m=m, h=args.h,
                                       steps=args.steps)
        rep = studies.energy_study(cfg)
        print(rep.summary())
        name = f"energy_{system}_{rep.method.replace('(', '').replace(')', '').replace(',', '')}.csv"
        output.write_csv(["t", "energy_error"], zip(rep.times, rep.dH), out / name)
        output.emit_series_script(out / name, ["energy_error"])


if __name__ == "__main__":
    main()
