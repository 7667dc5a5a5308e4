"""Global error at T = 10 against h for hem variants and the reference methods."""
from _common import parser, results_dir

from pcvi.harness import output, studies

CASES = [("hem", 2, 1), ("hem", 3, 1), ("hem", 4, 2), ("gauss2", 3, None), ("midpoint", 3, None)]


def main():
    p = parser(__doc__)
    p.add_argument("--systems", default="sho,pendulum,duffing")
    args = p.parse_args()
    out = results_dir(args)
    rows = []
    for system in args.systems.split(","):
        for method, n, m in CASES:
            for component in ("phase", "q"):
                cfg = studies.ExperimentConfig(system=system, method=method, n=n, m=m,
                                               component=component)
                rep = studies.global_error_study(cfg)
                print(rep.summary())
                rows += [[system, rep.method, component, h, e] for h, e in rep.rows]
    path = out / "convergence.csv"
    output.write_csv(["system", "method", "component", "h", "error"], rows, path)
    print(f"wrote {path}")


if __name__ == "__main__":
    main()
