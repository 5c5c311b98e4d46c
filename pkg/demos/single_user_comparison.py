"""Compare receiver architectures for a single uplink user.

Runs a small Monte Carlo grid twice, once with ideal front-ends and once with
hardware limits (coupling cap, feed attenuation, phase-shifter and combiner
losses), and prints the mean sum rate per architecture and transmit power.

Run with:  python3 demos/single_user_comparison.py --drops 2 --realizations 10
"""

import argparse

import pandas as pd

from dmasim.harness import ExperimentConfig, run_experiment, summarize


def run_case(args: argparse.Namespace, limits: bool) -> pd.DataFrame:
    cfg = ExperimentConfig(
        frontends=["dma-lpm", "pchp", "dpa"],
        k=1,
        hardware_limits=limits,
        n_drops=args.drops,
        n_realizations=args.realizations,
        p_t_dbm=[0.0, 10.0, 20.0, 30.0],
        n_jobs=args.jobs,
    )
    result = run_experiment(cfg)
    table = summarize(result)
    pivot = table.pivot_table(
        index="p_t_dbm", columns="frontend", values="sum_rate_mean"
    )
    return pivot


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--drops", type=int, default=2, help="user drops")
    parser.add_argument("--realizations", type=int, default=10, help="channels per drop")
    parser.add_argument("--jobs", type=int, default=4, help="worker processes")
    args = parser.parse_args()

    print("== ideal front-ends (no losses, unit coupling) ==")
    print(run_case(args, limits=False).round(3).to_string())
    print()
    print("== hardware limits on ==")
    print(run_case(args, limits=True).round(3).to_string())
    print()
    print("with ideal front-ends the large apertures (metasurface, hybrid) win;")
    print("with losses factored in the metasurface drops sharply while the")
    print("hybrid keeps a modest aperture advantage over the 4-chain digital array.")


if __name__ == "__main__":
    main()
