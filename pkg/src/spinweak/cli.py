"""Command-line entry point: ``spinweak fringe|sweep|montecarlo``.

Settings come from an optional JSON campaign file; command-line flags
override it. CSV goes to ``--out`` or stdout.

Exit codes: 0 success, 2 invalid configuration, 3 I/O failure,
4 numerical failure (fit failure, atanh divergence).
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from pathlib import Path

from . import campaign
from .campaign import CampaignConfig
from .detector import DetectorModel
from .errors import InvalidArgumentError, NumericalError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_NUMERIC = 4

log = logging.getLogger("spinweak")

_DETECTOR_FLAGS = {"contrast": "contrast", "background": "background_rate", "flux": "flux", "exposure": "exposure"}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON campaign file")
    common.add_argument("--phi", type=float, help="azimuthal post-selection angle (rad)")
    common.add_argument("--theta", type=float, help="polar post-selection angle for the fringe scan (rad)")
    common.add_argument("--alpha", type=float, help="weak rotation angle (rad)")
    common.add_argument("--model", choices=["exact", "first-order", "re-exp"])
    common.add_argument("--contrast", type=float, help="interferometer contrast, 0..1")
    common.add_argument("--background", type=float, help="background rate (counts/s)")
    common.add_argument("--flux", type=float, help="incident rate (counts/s)")
    common.add_argument("--exposure", type=float, help="counting time per setting (s)")
    common.add_argument("--seed", type=int)
    common.add_argument("--out", type=Path, help="output CSV (default stdout)")
    common.add_argument("--replicates", type=int)
    common.add_argument("--contrast-policy", choices=["paper", "uniform", "none"])
    common.add_argument("--inversion", choices=["corrected", "literal"])
    common.add_argument("--quartet-counts", type=float, help="scale flux so each quartet totals this many counts")
    common.add_argument("--ideal", action="store_true", help="noiseless intensities, no detector")
    common.add_argument("--workers", type=int, help="worker processes for grid evaluation")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="spinweak", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("fringe", parents=[common], help="reference and weak-rotation phase scans")
    sub.add_parser("sweep", parents=[common], help="weak value vs post-selection angle")
    sub.add_parser("montecarlo", parents=[common], help="replicated noisy sweep with pull statistics")
    return parser


def load_config(args: argparse.Namespace) -> CampaignConfig:
    doc = {}
    if args.config is not None:
        try:
            doc = json.loads(args.config.read_text(encoding="utf-8"))
        except OSError as exc:
            raise InvalidArgumentError(f"cannot read config: {exc}") from None
        except json.JSONDecodeError as exc:
            raise InvalidArgumentError(f"config is not valid JSON: {exc}") from None
        if not isinstance(doc, dict):
            raise InvalidArgumentError("config must be a JSON object")
    cfg = CampaignConfig.from_dict(doc)

    changes = {}
    for flag, key in (("phi", "phi"), ("theta", "theta"), ("alpha", "alpha"), ("model", "model"),
                      ("replicates", "replicates"), ("contrast_policy", "contrast_policy"),
                      ("inversion", "inversion"), ("quartet_counts", "quartet_counts"), ("workers", "workers")):
        val = getattr(args, flag)
        if val is not None:
            changes[key] = val
    if args.out is not None:
        changes["output"] = str(args.out)

    det_changes = {key: getattr(args, flag) for flag, key in _DETECTOR_FLAGS.items() if getattr(args, flag) is not None}
    if args.seed is not None:
        det_changes["seed"] = args.seed
    if args.ideal:
        changes["detector"] = None
    elif cfg.detector is not None or set(det_changes) - {"seed"} or args.command == "montecarlo":
        base = cfg.detector if cfg.detector is not None else DetectorModel()
        changes["detector"] = dataclasses.replace(base, **det_changes)
    return cfg.replace(**changes)


def _fit_path(out: Path) -> Path:
    return out.with_name(out.stem + "_fit" + (out.suffix or ".csv"))


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def run(args: argparse.Namespace) -> int:
    cfg = load_config(args)
    out = Path(cfg.output) if cfg.output else None
    status = EXIT_OK
    if args.command == "fringe":
        result = campaign.fringe_campaign(cfg)
        _emit(campaign.rows_to_csv(result.rows, campaign.FRINGE_COLUMNS), out)
        summary = campaign.rows_to_csv(result.summary_rows(), campaign.FIT_COLUMNS)
        if out is not None:
            _emit(summary, _fit_path(out))
        sys.stderr.write(summary)
    else:
        if args.command == "sweep":
            rows = campaign.sweep_campaign(cfg)
            columns = campaign.SWEEP_COLUMNS
            failed = [r for r in rows if r["clamped_flags"] != "skipped" and r["re_est"] != r["re_est"]]
        else:
            rows = campaign.montecarlo_campaign(cfg)
            columns = campaign.MONTECARLO_COLUMNS
            failed = [r for r in rows if r["flags"] != "skipped" and r["n_ok"] == 0]
        _emit(campaign.rows_to_csv(rows, columns), out)
        if failed:
            log.warning("%d of %d grid points hit a numerical failure", len(failed), len(rows))
            status = EXIT_NUMERIC
    return status


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return run(args)
    except InvalidArgumentError as exc:
        log.error("invalid configuration: %s", exc)
        return EXIT_CONFIG
    except NumericalError as exc:
        log.error("numerical failure: %s", exc)
        return EXIT_NUMERIC
    except OSError as exc:
        log.error("I/O failure: %s", exc)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
