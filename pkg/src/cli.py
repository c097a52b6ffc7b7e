# src/cli.py

"""
Command-line front end.

    python -m src.cli gen --k 2 --d 2 --n 5000 --separation 10 --seed 1 \
        --out-data data.csv --out-truth truth.json
    python -m src.cli fit --data data.csv --k 2 --epsilon 1 --delta 1e-6 \
        --alpha 0.5 --beta 0.1 --seed 7
    python -m src.cli calibrate --alpha 0.05 --beta 0.05 --epsilon 0.1 \
        --delta 1e-6 --k 2 --d 3
    python -m src.cli dist --a truth.json --b fitted.json
    python -m src.cli audit triangle --r 1 --z 1.5 --trials 1000 --seed 3

Records go to stdout as JSON, logs and progress bars to stderr. Exit codes:
0 success or released, 2 private failure (bot), 1 any error.
"""

import argparse
import asyncio
import math
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

import uvloop
from pydantic import ValidationError

from config.config import config
from src.audit.auditors import audit_concentration, audit_indistinguishability, audit_triangle
from src.audit.reports import AuditReport
from src.audit.samplers import CollinearTripleSampler, RestrictedTripleSampler
from src.learning.em import LearnerOptions
from src.learning.synthesis import make_separated_gmm, sample_gmm
from src.masking.maskers import GmmMasker, MaskConfig
from src.metrics.distances import SemimetricParams, dist_mixture
from src.models.mixture import Gmm
from src.ppe.calibration import (
    CalibrationInput,
    calibrate_gamma,
    calibrate_mask_config,
    compose_masking,
    min_subsets,
    ppe_privacy_guarantee,
    ppe_threshold,
)
from src.ppe.pipeline import fit_gmm_private
from src.randomness.noise import TLapParams, tlap_bound
from src.randomness.streams import RandomStream
from src.utils.errors import Infeasible, PrivGmmError
from src.utils.file_operations import FileOperations
from src.utils.logging import Logger
from src.utils.serialization import dumps, error_record, run_record_to_dict

logger = Logger.get_logger("CliLogger", config.paths.log_dir / "cli.log")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_BOT = 2


def _sig12(value: float) -> float:
    return float(f"{value:.12g}")


def _emit(data: Dict[str, Any]):
    sys.stdout.write(dumps(data) + "\n")
    sys.stdout.flush()


def _calibration_input(args: argparse.Namespace, k: int, d: int) -> CalibrationInput:
    fields = dict(alpha=args.alpha, beta=args.beta, epsilon=args.epsilon, delta=args.delta, k=k, d=d)
    if args.c2 is not None:
        fields["c2"] = args.c2
    return CalibrationInput(**fields)


def _masker(args: argparse.Namespace, g: Gmm) -> GmmMasker:
    """Explicit --eta-* scales when all three are given, else calibrated noise."""
    etas = (args.eta_w, args.eta_mean, args.eta_cov)
    if all(e is not None for e in etas):
        cfg = MaskConfig(eta_w=args.eta_w, eta_mean=args.eta_mean, eta_cov=args.eta_cov)
    elif any(e is not None for e in etas):
        raise ValueError("Give all of --eta-w, --eta-mean, --eta-cov or none of them")
    else:
        cfg = calibrate_mask_config(_calibration_input(args, g.k, g.d))
    return GmmMasker(cfg, max_workers=1)


async def cmd_gen(args: argparse.Namespace) -> int:
    stream = RandomStream(args.seed)
    truth = make_separated_gmm(args.k, args.d, args.separation, stream.child("truth"))
    dataset = sample_gmm(truth, args.n, stream.child("data"))
    for path in (args.out_data, args.out_truth):
        await FileOperations.ensure_directory(path.parent)
    await FileOperations.save_dataset(dataset, args.out_data)
    await FileOperations.save_gmm(truth, args.out_truth)
    logger.info(f"Wrote {args.n} points to {args.out_data} and the truth to {args.out_truth}")
    return EXIT_OK


async def cmd_fit(args: argparse.Namespace) -> int:
    dataset = await FileOperations.load_dataset(args.data)
    inp = _calibration_input(args, args.k, dataset.d)
    learner = LearnerOptions(k=args.k)
    record = await asyncio.to_thread(
        fit_gmm_private,
        dataset,
        inp,
        learner,
        RandomStream(args.seed),
        t=args.t,
        r=args.r,
        max_workers=args.threads,
    )
    params = {"k": args.k, "d": dataset.d, "alpha": args.alpha, "beta": args.beta, "c2": inp.c2}
    _emit(
        run_record_to_dict(
            record,
            args.seed,
            params=params,
            diagnostics=args.unsafe_diagnostics,
            timings=args.timings,
        )
    )
    logger.info(f"Fit finished: {'released' if record.released is not None else 'bot'}")
    return EXIT_OK if record.released is not None else EXIT_BOT


async def cmd_calibrate(args: argparse.Namespace) -> int:
    inp = _calibration_input(args, args.k, args.d)
    gamma = calibrate_gamma(inp)
    t_min = min_subsets(inp.epsilon, inp.delta)
    eps_composed, delta_composed = compose_masking(inp.k, inp.epsilon, inp.delta, inp.delta)
    guarantee = ppe_privacy_guarantee(inp.epsilon, inp.delta, t_min)
    report: Dict[str, Any] = {
        "gamma": _sig12(gamma),
        "t_min": t_min,
        "ppe_threshold": _sig12(ppe_threshold(t_min, inp.epsilon, inp.delta)),
        "noise_bound": _sig12(
            tlap_bound(TLapParams(delta_sens=2.0 / t_min, epsilon=inp.epsilon, delta=inp.delta))
        ),
        "epsilon_composed": _sig12(eps_composed),
        "delta_composed": _sig12(delta_composed),
        "guarantee": {"epsilon": _sig12(guarantee[0]), "delta": _sig12(guarantee[1])},
    }
    try:
        mask = calibrate_mask_config(inp)
        report.update(
            eta_w=_sig12(mask.eta_w), eta_mean=_sig12(mask.eta_mean), eta_cov=_sig12(mask.eta_cov)
        )
    except Infeasible as e:
        report.update(eta_w=None, eta_mean=None, eta_cov=None, mask_error=str(e))
    _emit(report)
    return EXIT_OK


async def cmd_dist(args: argparse.Namespace) -> int:
    a, b = await asyncio.gather(FileOperations.load_gmm(args.a), FileOperations.load_gmm(args.b))
    _emit({"distance": _sig12(dist_mixture(a, b))})
    return EXIT_OK


async def _write_report(report: AuditReport, out: Optional[Path]):
    sys.stdout.write(report.to_json_line() + "\n")
    if out is not None:
        await FileOperations.append_lines_async(out, [report.to_json_line()])


async def cmd_audit_concentration(args: argparse.Namespace) -> int:
    reference = await FileOperations.load_gmm(args.gmm)
    masker = _masker(args, reference)
    report = await asyncio.to_thread(
        audit_concentration,
        masker,
        reference,
        args.alpha,
        args.beta,
        args.trials,
        RandomStream(args.seed),
        args.threads,
    )
    await _write_report(report, args.out)
    return EXIT_OK


async def cmd_audit_indistinguishability(args: argparse.Namespace) -> int:
    f, f_prime = await asyncio.gather(
        FileOperations.load_gmm(args.f), FileOperations.load_gmm(args.f_prime)
    )
    masker = _masker(args, f)
    delta_prime = args.delta_prime if args.delta_prime is not None else args.delta
    eps_target, delta_target = compose_masking(f.k, args.epsilon, args.delta, delta_prime)
    gamma = None if args.skip_distance_check else calibrate_gamma(_calibration_input(args, f.k, f.d))
    report = await asyncio.to_thread(
        audit_indistinguishability,
        masker,
        f,
        f_prime,
        eps_target,
        delta_target,
        args.trials,
        RandomStream(args.seed),
        gamma,
        args.threads,
    )
    await _write_report(report, args.out)
    return EXIT_OK


async def cmd_audit_triangle(args: argparse.Namespace) -> int:
    if args.sampler == "collinear":
        sampler = CollinearTripleSampler(k=args.k, d=args.d)
    else:
        sampler = RestrictedTripleSampler(k=args.k, d=args.d)
    report = await asyncio.to_thread(
        audit_triangle,
        sampler,
        SemimetricParams(r=args.r, z=args.z),
        args.trials,
        RandomStream(args.seed),
        args.threads,
    )
    await _write_report(report, args.out)
    return EXIT_OK


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _finite_float(text: str) -> float:
    value = float(text)
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"expected a finite number, got {text}")
    return value


def _add_budget(parser: argparse.ArgumentParser, required: bool = True):
    parser.add_argument("--alpha", type=_finite_float, required=required)
    parser.add_argument("--beta", type=_finite_float, required=required)
    parser.add_argument("--epsilon", type=_finite_float, required=required)
    parser.add_argument("--delta", type=_finite_float, required=required)
    parser.add_argument("--c2", type=_finite_float, default=None, help="calibration constant")


def _add_noise(parser: argparse.ArgumentParser):
    parser.add_argument("--eta-w", type=_finite_float, default=None)
    parser.add_argument("--eta-mean", type=_finite_float, default=None)
    parser.add_argument("--eta-cov", type=_finite_float, default=None)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=_positive_int, default=1)
    common.add_argument(
        "--log-level", default=None, choices=["VERBOSE", "DEBUG", "INFO", "WARNING", "ERROR"]
    )
    common.add_argument("--no-progress", action="store_true")

    parser = argparse.ArgumentParser(
        prog="privgmm", description="Differentially private Gaussian mixture estimation."
    )
    commands = parser.add_subparsers(dest="command", required=True)

    gen = commands.add_parser("gen", parents=[common], help="sample a separated mixture dataset")
    gen.add_argument("--k", type=_positive_int, required=True)
    gen.add_argument("--d", type=_positive_int, required=True)
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--separation", type=_finite_float, default=10.0)
    gen.add_argument("--out-data", type=Path, required=True)
    gen.add_argument("--out-truth", type=Path, required=True)
    gen.set_defaults(handler=cmd_gen)

    fit = commands.add_parser("fit", parents=[common], help="private mixture fit")
    fit.add_argument("--data", type=Path, required=True)
    fit.add_argument("--k", type=_positive_int, required=True)
    _add_budget(fit)
    fit.add_argument("--t", type=_positive_int, default=None, help="override the subset count")
    fit.add_argument("--r", type=_finite_float, default=None, help="override the agreement radius")
    fit.add_argument("--unsafe-diagnostics", action="store_true")
    fit.add_argument("--timings", action="store_true")
    fit.set_defaults(handler=cmd_fit)

    calibrate = commands.add_parser("calibrate", parents=[common], help="evaluate calibration formulas")
    calibrate.add_argument("--k", type=_positive_int, required=True)
    calibrate.add_argument("--d", type=_positive_int, required=True)
    _add_budget(calibrate)
    calibrate.set_defaults(handler=cmd_calibrate)

    dist = commands.add_parser("dist", parents=[common], help="mixture distance of two files")
    dist.add_argument("--a", type=Path, required=True)
    dist.add_argument("--b", type=Path, required=True)
    dist.set_defaults(handler=cmd_dist)

    audit = commands.add_parser("audit", help="Monte-Carlo audits")
    audits = audit.add_subparsers(dest="audit", required=True)

    conc = audits.add_parser("concentration", parents=[common])
    conc.add_argument("--gmm", type=Path, required=True)
    conc.add_argument("--trials", type=_positive_int, default=2000)
    _add_budget(conc)
    _add_noise(conc)
    conc.add_argument("--out", type=Path, default=None)
    conc.set_defaults(handler=cmd_audit_concentration)

    indist = audits.add_parser("indistinguishability", parents=[common])
    indist.add_argument("--f", type=Path, required=True)
    indist.add_argument("--f-prime", type=Path, required=True)
    indist.add_argument("--trials", type=_positive_int, default=config.audit.indistinguishability_min_trials)
    indist.add_argument("--delta-prime", type=_finite_float, default=None)
    indist.add_argument("--skip-distance-check", action="store_true")
    _add_budget(indist)
    _add_noise(indist)
    indist.add_argument("--out", type=Path, default=None)
    indist.set_defaults(handler=cmd_audit_indistinguishability)

    tri = audits.add_parser("triangle", parents=[common])
    tri.add_argument("--r", type=_finite_float, default=1.0)
    tri.add_argument("--z", type=_finite_float, default=config.ppe.z)
    tri.add_argument("--k", type=_positive_int, default=2)
    tri.add_argument("--d", type=_positive_int, default=2)
    tri.add_argument("--trials", type=_positive_int, default=1000)
    tri.add_argument("--sampler", choices=["restricted", "collinear"], default="restricted")
    tri.add_argument("--out", type=Path, default=None)
    tri.set_defaults(handler=cmd_audit_triangle)

    return parser


async def run(args: argparse.Namespace) -> int:
    try:
        return await args.handler(args)
    except (PrivGmmError, ValidationError, ValueError, OSError) as e:
        logger.error(f"{args.command} failed: {e}")
        logger.debug(f"Detailed error for {args.command}:", exc_info=True)
        sys.stderr.write(f"error: {e}\n")
        if args.command == "fit":
            _emit(error_record(str(e), args.seed))
        return EXIT_ERROR


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.log_level:
        Logger.set_log_level(args.log_level)
    if args.no_progress:
        config.processing.show_progress = False
    uvloop.install()
    return asyncio.run(run(args))


if __name__ == "__main__":
    sys.exit(main())
