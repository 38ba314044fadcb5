"""
Command-Line Interface
Subcommands: run, sweep, sensitivity, verify
"""

import argparse
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from .config import ConfigError, get_settings, parse_config
from .experiments import (
    DEFAULT_DELTAS,
    SweepError,
    extreme_battery,
    sensitivity_suite,
    simulate,
    sweep,
    sweep_values,
)
from .serialization import battery_csv, run_outputs, sensitivity_csv, sweep_csv, write_files

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

# Flags that map one-to-one onto Params fields
PARAM_FLAGS = (
    ("--seed", int, "Master seed"),
    ("--steps", int, "Number of 10-day steps"),
    ("--max-profiles", int, "Population size"),
    ("--max-network", int, "Maximum out-links per profile"),
    ("--distortion", float, "Perception noise sd for Strongest links"),
    ("--max-change", float, "Maximum affinity change per step"),
    ("--aff-radius", float, "Tolerated affinity difference"),
    ("--people-dead", int, "Maximum stochastic deaths per step"),
    ("--initial-affinity", float, "Common starting affinity (default: uniform draws)"),
)

VERIFY_DEFAULT_REPS = 5


def _float_list(text: str) -> List[float]:
    try:
        return [float(item) for item in text.split(",") if item.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', type=str, help='Model parameter file (key=value lines)')
    for flag, kind, help_text in PARAM_FLAGS:
        common.add_argument(flag, type=kind, help=help_text)
    common.add_argument('--out', type=str, help='Output directory (default: AFFSIM_OUTPUT_DIR or results)')
    common.add_argument('--jobs', type=int, help='Parallel worker processes for replications')
    common.add_argument(
        '--log-level',
        type=str.upper,
        choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'],
        help='Logging level (default: AFFSIM_LOG_LEVEL or INFO)'
    )

    parser = argparse.ArgumentParser(
        prog="affinity-sim",
        description="Agent-based simulation of affinity-driven social networks",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Single run with edge dump
  python main.py run --steps 1000 --seed 7 --out results --dump-edges

  # Sweep max-change from 0 to 1
  python main.py sweep --param max-change --from 0 --to 1 --step 0.2 --reps 20

  # Sensitivity table
  python main.py sensitivity --reps 20 --baseline-reps 30

  # Extreme-value scenario battery
  python main.py verify --reps 5
        """
    )
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser('run', parents=[common], help='Run one simulation')
    run.add_argument('--dump-edges', action='store_true', help='Also write the final edge list')

    sweep_parser = commands.add_parser('sweep', parents=[common], help='Sweep one parameter')
    sweep_parser.add_argument('--param', type=str, required=True, help='Parameter name, e.g. max-change')
    sweep_parser.add_argument('--from', dest='start', type=float, help='First value')
    sweep_parser.add_argument('--to', dest='stop', type=float, help='Last value (inclusive)')
    sweep_parser.add_argument('--step', dest='step_size', type=float, help='Increment')
    sweep_parser.add_argument('--values', type=_float_list, help='Explicit comma-separated values')
    sweep_parser.add_argument('--reps', type=int, help='Replications per value')

    sensitivity = commands.add_parser('sensitivity', parents=[common], help='Sensitivity analysis')
    sensitivity.add_argument('--deltas', type=_float_list, default=list(DEFAULT_DELTAS),
                             help='Relative perturbations, e.g. --deltas=-0.1,0.1 (default: -0.1,-0.05,0.05,0.1)')
    sensitivity.add_argument('--reps', type=int, help='Replications per perturbed cell')
    sensitivity.add_argument('--baseline-reps', type=int, help='Replications of the baseline')

    verify = commands.add_parser('verify', parents=[common], help='Run the extreme-scenario battery')
    verify.add_argument('--reps', type=int, default=VERIFY_DEFAULT_REPS, help='Replications per scenario')

    return parser


def _overrides(args: argparse.Namespace) -> Dict[str, Any]:
    return {flag.lstrip("-").replace("-", "_"): getattr(args, flag.lstrip("-").replace("-", "_"))
            for flag, _, _ in PARAM_FLAGS}


def _run(args: argparse.Namespace, out_dir: Path) -> int:
    params = parse_config(args.config, _overrides(args))
    logger.info(f"Running {params.steps} steps with {params.max_profiles} profiles (seed {params.seed})")
    net, summary = simulate(params)
    write_files(out_dir, run_outputs(summary, net.links() if args.dump_edges else None))
    final = summary.final_row
    print(f"step {final.step}: density={final.density:.4f} clustering={final.clustering:.4f} "
          f"std_affinity={final.std_affinity:.4f}")
    return EXIT_OK


def _sweep(args: argparse.Namespace, out_dir: Path) -> int:
    params = parse_config(args.config, _overrides(args))
    if args.values is not None:
        values = args.values
    elif None not in (args.start, args.stop, args.step_size):
        values = sweep_values(args.start, args.stop, args.step_size)
    else:
        raise SweepError("give either --values or all of --from, --to and --step")
    reps = args.reps if args.reps is not None else get_settings().replications
    result = sweep(params, args.param, values, reps, n_jobs=args.jobs)
    write_files(out_dir, {"sweep.csv": sweep_csv(result)})
    return EXIT_OK


def _sensitivity(args: argparse.Namespace, out_dir: Path) -> int:
    params = parse_config(args.config, _overrides(args))
    cells = sensitivity_suite(
        params,
        deltas=args.deltas,
        reps=args.reps,
        baseline_reps=args.baseline_reps,
        n_jobs=args.jobs,
    )
    write_files(out_dir, {"sensitivity.csv": sensitivity_csv(cells)})
    return EXIT_OK


def _verify(args: argparse.Namespace, out_dir: Path) -> int:
    params = parse_config(args.config, _overrides(args))
    if args.reps < 1:
        raise ValueError(f"--reps must be >= 1, got {args.reps}")
    report = extreme_battery(args.reps, base=params, n_jobs=args.jobs)
    for scenario in report.scenarios:
        status = "PASS" if scenario.passed else "FAIL"
        details = "; ".join(
            f"{check.description}: {'ok' if check.passed else 'failed'}"
            + (f" ({check.detail})" if check.detail else "")
            for check in scenario.checks
        ) or "no assertions"
        print(f"{status} {scenario.name}: {details}")
    write_files(out_dir, {"battery.csv": battery_csv(report)})
    return EXIT_OK if report.passed else EXIT_FAILURE


COMMANDS = {
    "run": _run,
    "sweep": _sweep,
    "sensitivity": _sensitivity,
    "verify": _verify,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    settings = get_settings()

    logging.basicConfig(
        level=getattr(logging, args.log_level or settings.log_level.upper()),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    )

    out_dir = Path(args.out or settings.output_dir)
    try:
        return COMMANDS[args.command](args, out_dir)
    except (ConfigError, SweepError, ValueError) as e:
        logger.error(f"Invalid input: {e}")
        return EXIT_USAGE
    except OSError as e:
        logger.error(f"Could not write results to {out_dir}: {e}")
        return EXIT_FAILURE
