"""Collocation endpoint errors with exact boundary positions (velocity and q''')."""
from _common import parser, results_dir

from pcvi.harness import output, studies
from pcvi.systems import builtin

STATES = {"sho": (1.0, 0.0), "pendulum": (0.5, 0.0), "duffing": (0.5, 0.0)}
HS = (0.4, 0.2, 0.1, 0.05)


def main():
    args = parser(__doc__).parse_args()
    out = results_dir(args)
    rows = []
    for name, (q0, v0) in STATES.items():
        for n in (2, 3, 4):
            res = studies.endpoint_rates(builtin(name), n, HS, q0, v0)
            for col, label in ((1, "v0"), (2, "v1"), (3, "q3")):
                s, _ = studies.fit_slope(HS, [r[col] for r in res])
                print(f"{name} n={n} {label}: slope={s:.2f} (2n-1 = {2 * n - 1})")
            rows += [[name, n, *r] for r in res]
    path = out / "endpoint_rates.csv"
    output.write_csv(["system", "n", "h", "v0_error", "v1_error", "q3_error"], rows, path)
    print(f"wrote {path}")


if __name__ == "__main__":
    main()
