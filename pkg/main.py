import argparse
import os
import sys

# Path fixing for local imports
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from src.core.errors import NumericalError, ValidationError
from src.pipeline.experiments import COMMANDS, run_command
from src.utils.config import load_config

EXIT_OK, EXIT_NUMERICAL, EXIT_INVALID = 0, 1, 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Toeplitz covariance splitting, ICC spectral-radius bounds and semi-correlated MIMO capacity.",
    )
    parser.add_argument("command", choices=list(COMMANDS), help="Experiment to run.")
    parser.add_argument("--config", help="JSON experiment config (defaults reproduce the published setup).")
    parser.add_argument("--seed", type=int, help="Unsigned 64-bit Monte Carlo seed.")
    parser.add_argument("--trials", type=int, help="Monte Carlo trials for mean capacity.")
    parser.add_argument("--alpha", help="Comma-separated alpha grid, e.g. 5,10,20,30.")
    parser.add_argument("--variant", choices=["as-printed", "cscs"], help="ICC iteration-matrix variant.")
    parser.add_argument("--out", help="Output directory.")
    parser.add_argument("--format", dest="formats", help="Comma-separated subset of csv,svg,png,xlsx.")
    parser.add_argument("--raw-covariance", action="store_true", default=None,
                        help="Use R(alpha) without Hermitian/PSD projection and log2|det| (expert path).")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    print("\n" + "=" * 60)
    print(f" --- ICC CAPACITY EXPERIMENTS: {args.command} ---")
    print("=" * 60)

    try:
        config = load_config(args.config, {
            "seed": args.seed,
            "trials": args.trials,
            "alpha": args.alpha,
            "variant": args.variant,
            "out": args.out,
            "formats": args.formats,
            "raw_covariance": args.raw_covariance,
        })
        result = run_command(args.command, config)
    except ValidationError as e:
        print(f"\n  Invalid input ({type(e).__name__}): {e}", file=sys.stderr)
        return EXIT_INVALID
    except NumericalError as e:
        print(f"\n  Numerical failure ({type(e).__name__}): {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    except Exception as e:
        print(f"\n  Critical Pipeline Failure: {e}", file=sys.stderr)
        import traceback
        traceback.print_exc()
        return EXIT_NUMERICAL

    print(f"\n Done. {len(result.paths)} file(s) written to '{config.output_dir}'.")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
