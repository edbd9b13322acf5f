"""``phasecal`` command line: synth, calibrate, report, export-atx, simulate-rtk.

Data goes to files under ``--out`` (and short summaries to stdout);
diagnostics go to stderr. The exit status is 0 only when no error occurred.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .errors import CalibrationError
from .formats.antex import write_antex
from .formats.ffd import QUANTITY_COLUMNS, SCENARIO_ALIASES, parse_ffd, write_ffd
from .formats.store import load_profile, result_from_json, result_to_json
from .grid import GainMap
from .metrics import field_to_gain
from .pco import DEFAULT_MASK_DEG, WEIGHTINGS
from .phase import Pco

log = logging.getLogger("phasecal")

DEFAULT_FREQS = (1176.45, 1575.42)
CALIBRATION_JSON = "calibration.json"


class UsageError(CalibrationError):
    pass


def _float_list(text: str) -> list[float]:
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _pco_arg(text: str) -> Pco:
    values = _float_list(text)
    if len(values) != 3:
        raise argparse.ArgumentTypeError(f"PCO needs 3 components x,y,z, got {len(values)}")
    return Pco.from_array(values)


def _mask_arg(text: str) -> float:
    try:
        mask = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"mask must be a number, got {text!r}") from None
    if not 0.0 <= mask < 90.0:
        raise argparse.ArgumentTypeError(f"mask must be in [0, 90), got {mask:g}")
    return mask


def _seed_arg(text: str) -> int:
    try:
        seed = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got {text!r}") from None
    if not 0 <= seed < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return seed


def _existing_file(path: Path, what: str) -> Path:
    if not path.is_file():
        raise UsageError(f"{what} not found: {path}")
    return path


def _read_ffd(path: Path):
    _existing_file(path, "measurement file")
    return parse_ffd(path.read_text(encoding="utf-8"), source=str(path))


def _write(path: Path, text: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    log.info("wrote %s", path)
    return path


def cmd_synth(args: argparse.Namespace) -> int:
    from .synthesis import synth_measurement_set

    freqs = args.freq or list(DEFAULT_FREQS)
    ms = synth_measurement_set(
        args.pco,
        freqs,
        quantity=args.quantity,
        ripple=args.ripple,
        noise_deg=args.noise,
        seed=args.seed,
        antenna=args.antenna,
        scenario=SCENARIO_ALIASES[args.scenario.lower()],
    )
    _write(args.out / args.name, write_ffd(ms))
    print(f"truth_pco_mm\t{args.pco.x!r}\t{args.pco.y!r}\t{args.pco.z!r}")
    return 0


def cmd_calibrate(args: argparse.Namespace) -> int:
    from .pipeline import calibrate
    from .report import text_report, write_calibration_tables

    ms = _read_ffd(args.input)
    result = calibrate(ms, args.mask, args.estimate_bias, args.weight, args.freq)
    _write(args.out / CALIBRATION_JSON, result_to_json(result))
    for path in write_calibration_tables(result, args.out):
        log.info("wrote %s", path)
    sys.stdout.write(text_report(result))
    return 0


def _gain_maps(path: Path, freqs) -> list[GainMap]:
    from .pipeline import select_frequencies

    ms = _read_ffd(path)
    chosen = select_frequencies(ms.maps, freqs)
    if ms.quantity == "gain_dbic":
        return [ms.maps[f] for f in chosen]
    if ms.quantity == "vh_complex":
        return [field_to_gain(ms.maps[f]) for f in chosen]
    raise UsageError(f"{path}: gain figures need gain_dbic or vh_complex data, file holds {ms.quantity}")


def cmd_report(args: argparse.Namespace) -> int:
    from .plotting import render_calibration, render_gain
    from .report import azimuth_cut_csv, lag_ar_csv, text_report, write_calibration_tables

    cal = _existing_file(args.calibration, "calibration")
    result = result_from_json(cal.read_text(encoding="utf-8"))
    outputs = write_calibration_tables(result, args.out)
    outputs += render_calibration(result, args.out)
    if args.gain is not None:
        gains = _gain_maps(args.gain, args.freq)
        outputs.append(_write(args.out / "lag_ar.csv", lag_ar_csv(gains)))
        outputs.append(_write(args.out / "azimuth_cut.csv", azimuth_cut_csv(gains, args.cut_elevation)))
        outputs += render_gain(gains, args.out, args.cut_elevation)
    for path in outputs:
        log.info("wrote %s", path)
    sys.stdout.write(text_report(result))
    return 0


def cmd_export_atx(args: argparse.Namespace) -> int:
    profile = load_profile(_existing_file(args.calibration, "calibration"))
    text = write_antex(profile, fold_rows=not args.long_rows)
    _write(args.out / args.name, text)
    return 0


def cmd_simulate_rtk(args: argparse.Namespace) -> int:
    from dataclasses import replace

    from .scenario import observables_csv, parse_scenario, residual_report, residuals_csv, run_simulation, truth_profile

    path = _existing_file(args.scenario, "scenario file")
    sc = parse_scenario(path.read_text(encoding="utf-8"), base_dir=path.parent)
    if args.seed is not None:
        sc = replace(sc, seed=args.seed)
    applied = load_profile(_existing_file(args.calibration, "calibration")) if args.calibration else truth_profile(sc)
    result = run_simulation(sc, applied)
    report = residual_report(result)
    _write(args.out / "observables.csv", observables_csv(result, applied))
    _write(args.out / "dd_residuals.csv", residuals_csv(result))
    _write(args.out / "rtk_report.txt", report)
    sys.stdout.write(report)
    return 0


def _estimation_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--mask", type=_mask_arg, default=DEFAULT_MASK_DEG, help="elevation mask in degrees (default 10)")
    p.add_argument("--estimate-bias", action="store_true", help="add a constant phase-bias column to the PCO fit")
    p.add_argument("--weight", choices=WEIGHTINGS, default="equal", help="observation weighting (default equal)")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", type=Path, default=Path("."), help="output directory (default .)")
    common.add_argument("--freq", type=_float_list, default=None, help="comma-separated frequencies in MHz")
    common.add_argument("-v", "--verbose", action="store_true", help="log written files to stderr")

    parser = argparse.ArgumentParser(prog="phasecal", description="GNSS antenna phase-center calibration")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", parents=[common], help="write a synthetic FFD measurement file")
    p.add_argument("--pco", type=_pco_arg, default=Pco(), help="true offset x,y,z in mm (default 0,0,0)")
    p.add_argument("--quantity", choices=sorted(QUANTITY_COLUMNS), default="phase_deg")
    p.add_argument("--ripple", type=float, default=0.0, help="PCV ripple amplitude in mm")
    p.add_argument("--noise", type=float, default=0.0, help="phase noise sigma in degrees")
    p.add_argument("--seed", type=_seed_arg, default=0)
    p.add_argument("--antenna", default="SYNTHETIC")
    p.add_argument("--scenario", choices=sorted(SCENARIO_ALIASES), default="evb")
    p.add_argument("--name", default="measurement.ffd", help="output file name")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("calibrate", parents=[common], help="fit PCO/PCV from an FFD phase file")
    p.add_argument("input", type=Path)
    _estimation_flags(p)
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("report", parents=[common], help="CSV tables and PNG figures for a calibration")
    p.add_argument("calibration", type=Path, help=f"{CALIBRATION_JSON} written by calibrate")
    p.add_argument("--gain", type=Path, default=None, help="FFD gain or V/H file for LAG/AR figures")
    p.add_argument("--cut-elevation", type=float, default=36.0, help="azimuth cut elevation (default 36)")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("export-atx", parents=[common], help="write a calibration as ANTEX")
    p.add_argument("calibration", type=Path)
    p.add_argument("--name", default="calibration.atx", help="output file name")
    p.add_argument("--long-rows", action="store_true", help="one data line per azimuth (exceeds 80 columns)")
    p.set_defaults(func=cmd_export_atx)

    p = sub.add_parser("simulate-rtk", parents=[common], help="double-difference closure with and without calibration")
    p.add_argument("scenario", type=Path, help="scenario key=value file")
    p.add_argument("--calibration", type=Path, default=None, help="profile to apply (default: the generating one)")
    p.add_argument("--seed", type=_seed_arg, default=None, help="override the scenario seed")
    p.set_defaults(func=cmd_simulate_rtk)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    try:
        return args.func(args)
    except (CalibrationError, OSError) as exc:
        print(f"phasecal: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
