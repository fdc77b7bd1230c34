"""Command-line entry point: ``aqsbench --scenario honest --protocol bell``."""
from __future__ import annotations

import argparse
import sys

from .errors import InvalidConfig
from .harness import PROTOCOLS, SCENARIOS, ScenarioConfig, emit_report, run_scenario


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="aqsbench",
        description="Run honest, forgery, disavowal and swap-test scenarios "
                    "against arbitrated quantum signature protocols.")
    p.add_argument("--scenario", required=True, choices=SCENARIOS)
    p.add_argument("--protocol", default="bell", choices=PROTOCOLS)
    p.add_argument("--n", type=int, default=8, help="message length in qubits (default 8)")
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--comparison", default="oracle", choices=("oracle", "physical"))
    p.add_argument("--swap-repetitions", type=int, default=1,
                   help="swap tests per qubit comparison in physical mode")
    p.add_argument("--variant", default="standard", choices=("standard", "trent_retains"))
    p.add_argument("--timing", default="post", choices=("post", "pre"),
                   help="when Bob forges: after verification (post) or on receipt (pre)")
    p.add_argument("--format", default="text", choices=("json", "text"))
    p.add_argument("--out", default="-", help="output path, '-' for stdout")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    config = ScenarioConfig(
        scenario=args.scenario, protocol=args.protocol, n=args.n, trials=args.trials,
        seed=args.seed, comparison=args.comparison, swap_repetitions=args.swap_repetitions,
        variant=args.variant, timing=args.timing)
    try:
        report = run_scenario(config)
        emit_report(report, args.format, args.out)
    except InvalidConfig as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
