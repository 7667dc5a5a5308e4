"""Wall time against global error for hem(3,1) and a reference method."""
from _common import parser, results_dir

from pcvi.harness import output, studies


def main():
    p = parser(__doc__)
    p.add_argument("--systems", default="sho,pendulum,duffing")
    args = p.parse_args()
    out = results_dir(args)
    rows = []
    for system in args.systems.split(","):
        cfg = studies.ExperimentConfig(system=system, method="hem", n=3, m=1)
        for method, h, wall, err in studies.work_precision(cfg):
            print(f"{system} {method} h={h}: {wall:.3f}s error={err:.3e}")
            rows.append([system, method, h, wall, err])
    path = out / "work_precision.csv"
    output.write_csv(["system", "method", "h", "wall_time", "global_error"], rows, path)
    print(f"wrote {path}")


if __name__ == "__main__":
    main()
