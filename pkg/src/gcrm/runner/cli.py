"""
Command-line runner for the gcrm experiments.

Usage:
    python -m gcrm pair-corr --sampler a1 --alpha 1.5 --b 1 --samples 1000000 --seed 42 --n 1,2,3,4
    python -m gcrm subordinate --drift 0 --rate 1 --jump log4 --t 1 --samples 1000000 --seed 7
    python -m gcrm orthogonality --alpha 1.0 --max-degree 6 --out o.csv

Exit status: 0 when every gate passes, 1 on any gate failure, 2 on a
configuration or range error (one line on stderr).
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional

from dotenv import dotenv_values
from pydantic import ValidationError

from ..base import ConfigurationError, GcrmError, RangeError
from ..config import get_config
from .config import get_settings
from .experiments import run_experiment
from .report_io import write_report
from .schemas import SUBCOMMANDS, ExperimentConfig

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_GATE_FAILED = 1
EXIT_CONFIG_ERROR = 2

# Parameter flags per subcommand; values stay text until the experiment parses them.
SUBCOMMAND_FLAGS: Dict[str, List[str]] = {
    "orthogonality": ["alpha", "max-degree", "nodes"],
    "genfun-check": ["alpha", "x", "r", "terms"],
    "pair-corr": [
        "sampler", "alpha", "c", "b", "z", "t", "pstar", "pz", "pz-points",
        "kernel", "bases", "law", "law-points", "eta",
        "n", "max-order", "scan-degree", "streams",
    ],
    "merge-check": ["alpha", "c", "kernel", "z", "bases", "law", "law-points", "eta", "i", "j", "max-n"],
    "dirichlet-moments": ["theta", "base", "n-max", "eps"],
    "stieltjes-check": ["theta", "base", "lam", "eps"],
    "density-check": ["alpha", "z", "upper", "panels", "panel-nodes"],
    "laplace-ratio": ["alpha", "c", "kernel", "z", "bases", "law", "law-points", "eta", "s", "t", "trunc"],
    "subordinate": ["alpha", "drift", "rate", "jump", "t", "mode", "n", "steps", "expect", "streams"],
    "poisson-embed": ["alpha", "gamma", "z", "t", "n", "streams"],
}

HELP = {
    "orthogonality": "Quadrature orthogonality of the monic Laguerre polynomials",
    "genfun-check": "Laguerre generating function against its closed form",
    "pair-corr": "Canonical correlations of a pair sampler (a1|a2|a3|a4|dw|general)",
    "merge-check": "Merge identity and Bell form of the canonical correlations",
    "dirichlet-moments": "Dirichlet mean moments: recursion against stick breaking",
    "stieltjes-check": "Markov-Krein identity for a Dirichlet mean",
    "density-check": "Mass and first correlation of the extreme-pair density",
    "laplace-ratio": "Laplace-ratio series against closed forms",
    "subordinate": "Subordinated DW pairs (--mode corr|chain|factorization)",
    "poisson-embed": "DW chain on a Poisson clock",
}


class _Parser(argparse.ArgumentParser):
    """Argument parser that reports errors as ConfigurationError."""

    def error(self, message):
        raise ConfigurationError(message)


def read_config_file(path: str) -> Dict[str, str]:
    """key=value parameters in dotenv syntax; '#' comments allowed."""
    if not Path(path).is_file():
        raise ConfigurationError(f"Cannot read config file {path}")
    params = {}
    for key, value in dotenv_values(path, encoding="utf-8", interpolate=False).items():
        if value is None:
            raise ConfigurationError(f"{path}: expected key=value, got {key!r}")
        params[key.lstrip("-")] = value
    return params


class ExperimentCLI:
    """Argparse front end mapping subcommands onto experiment runs."""

    def build_parser(self) -> argparse.ArgumentParser:
        parser = _Parser(prog="gcrm", description="Canonically correlated gamma CRM experiments")
        subparsers = parser.add_subparsers(dest="command", parser_class=_Parser)

        for name in SUBCOMMANDS:
            sub = subparsers.add_parser(name, help=HELP[name])
            sub.add_argument("--seed", type=int, help="Seed (default: GCRM_SEED, then config)")
            sub.add_argument("--samples", type=int, help="Monte Carlo sample count")
            sub.add_argument("--out", help="CSV report path")
            sub.add_argument("--config", help="key=value parameter file; flags win on conflict")
            sub.add_argument("--verbose", "-v", action="count", default=0, help="More logging on stderr")
            for flag in SUBCOMMAND_FLAGS[name]:
                sub.add_argument(f"--{flag}", dest=flag.replace("-", "_"), default=None)
        return parser

    def build_config(self, args: argparse.Namespace) -> ExperimentConfig:
        """Merge --config file, flags and environment into an ExperimentConfig."""
        settings = get_settings()
        defaults = get_config().experiments

        file_params = read_config_file(args.config) if args.config else {}
        file_params = {k.replace("-", "_"): v for k, v in file_params.items()}
        allowed = {flag.replace("-", "_") for flag in SUBCOMMAND_FLAGS[args.command]}
        allowed |= {"seed", "samples", "out"}
        unknown = sorted(set(file_params) - allowed)
        if unknown:
            raise ConfigurationError(f"{args.command}: unknown parameter(s) in config file: {', '.join(unknown)}")

        params = {k: v for k, v in file_params.items() if k not in ("seed", "samples", "out")}
        for flag in SUBCOMMAND_FLAGS[args.command]:
            key = flag.replace("-", "_")
            value = getattr(args, key)
            if value is not None:
                params[key] = value

        seed = args.seed
        if seed is None and "seed" in file_params:
            seed = file_params["seed"]
        if seed is None:
            seed = settings.SEED if settings.SEED is not None else defaults.default_seed

        samples = args.samples if args.samples is not None else file_params.get("samples", defaults.default_samples)
        output = args.out or file_params.get("out") or str(Path(settings.OUTPUT_DIR) / f"{args.command}.csv")

        return ExperimentConfig(subcommand=args.command, params=params, seed=seed, samples=samples, output=output)

    def run(self, argv: Optional[List[str]] = None) -> int:
        try:
            args = self.build_parser().parse_args(argv)
            if not args.command:
                raise ConfigurationError("missing subcommand; choose one of " + ", ".join(SUBCOMMANDS))
            self._configure_logging(args.verbose)
            config = self.build_config(args)
            outcome = run_experiment(config)
            path = write_report(outcome, config.output)
        except ValidationError as e:
            first = e.errors()[0]
            where = ".".join(str(p) for p in first.get("loc", ()))
            print(f"gcrm: configuration error: {where}: {first.get('msg')}", file=sys.stderr)
            return EXIT_CONFIG_ERROR
        except GcrmError as e:
            message = str(e).splitlines()[0] if str(e) else type(e).__name__
            kind = "range error" if isinstance(e, RangeError) else "configuration error"
            print(f"gcrm: {kind}: {message}", file=sys.stderr)
            return EXIT_CONFIG_ERROR

        report = outcome.report
        verdict = "PASS" if outcome.passed else "FAIL"
        print(
            f"{outcome.experiment}: {len(report)} rows, max |z| {report.max_abs_z:.3f} "
            f"(gate {report.gate:g}) -> {verdict} [{path}]"
        )
        return EXIT_OK if outcome.passed else EXIT_GATE_FAILED

    def _configure_logging(self, verbose: int):
        level_name = get_settings().LOG_LEVEL.upper()
        level = getattr(logging, level_name, logging.WARNING)
        if verbose == 1:
            level = min(level, logging.INFO)
        elif verbose >= 2:
            level = logging.DEBUG
        logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
        logging.getLogger().setLevel(level)


def main(argv: Optional[List[str]] = None) -> int:
    cli = ExperimentCLI()
    return cli.run(argv)


if __name__ == "__main__":
    sys.exit(main())
