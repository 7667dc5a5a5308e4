"""Error of the discrete Lagrangian against the exact one, for several (n, m)."""
from _common import parser, results_dir

from pcvi.harness import output, studies

PAIRS = [(2, 0), (2, 1), (3, 0), (3, 1), (4, 1), (4, 2)]


def main():
    p = parser(__doc__)
    p.add_argument("--systems", default="sho,pendulum")
    args = p.parse_args()
    out = results_dir(args)
    rows = []
    for system in args.systems.split(","):
        for n, m in PAIRS:
            rep = studies.ldorder_study(studies.ExperimentConfig(system=system, n=n, m=m))
            print(f"{rep.summary()}   predicted min(2m+3, 2n) = {min(2 * m + 3, 2 * n)}")
            rows += [[system, rep.method, h, e] for h, e in rep.rows]
    path = out / "ldorder.csv"
    output.write_csv(["system", "method", "h", "ld_error"], rows, path)
    print(f"wrote {path}")


if __name__ == "__main__":
    main()
