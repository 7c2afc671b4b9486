"""Command-line interface.

Five subcommands, each writing CSV files into the output directory:

  intra         center stray field of the fixed layers vs cell size
  inter         neighborhood field map of a 3x3 array patch
  psi           disturbance ratio over a (size, pitch) grid
  metrics       critical current, switching time, and stability sweeps
  characterize  analyze measured loops, cycle ensembles, calibration data

Outputs are byte-identical across runs: rows follow a fixed order, floats
are formatted with a fixed precision, and line endings are always LF.

Exit codes: 0 success, 2 configuration errors, 3 data errors, 4 domain,
geometry, and fit errors.
"""

import argparse
import csv
import os
import sys

import numpy as np

from .characterization import (
    analyze_loop,
    fit_hk_delta0,
    read_calibration_csv,
    read_cycles_csv,
    read_loop_csv,
    switching_probability,
)
from .config import load_config, render_defaults
from .coupling import ArrayConfig, coupling_map, min_pitch_for_psi, psi_sweep
from .errors import (
    ConfigError,
    DataError,
    DomainError,
    FitError,
    GeometryError,
)
from .metrics import (
    avg_switching_time,
    critical_current,
    delta0_at,
    overdrive_current,
    thermal_stability,
    worst_case_delta,
)
from .stack import calibrate_ms_t, intra_center_hz_oe, intra_stray_profile

PSI_TARGET_INFO = 0.02


def _fmt(value, precision):
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), f".{precision}g")


def _write_csv(out_dir, name, header, rows, precision, comments=()):
    path = os.path.join(out_dir, name)
    with open(path, "w", newline="") as fh:
        for line in comments:
            fh.write(f"# {line}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v, precision) for v in row])
    print(f"wrote {path} ({len(rows)} rows)")
    return path


def _grid(lo, hi, step):
    return [float(v) for v in np.arange(lo, hi + 0.5 * step, step)]


def _cmd_intra(cfg, args):
    prec = cfg.output["precision"]
    rows = []
    for ecd in cfg.sweep["ecd_list_nm"]:
        stack = cfg.build_stack(ecd_nm=ecd)
        rows.append((ecd, intra_center_hz_oe(stack)))
        n_prof = cfg.sweep["profile_points"]
        if n_prof > 0:
            profile = intra_stray_profile(stack, n_points=n_prof)
            _write_csv(
                args.out,
                f"intra_profile_{ecd:g}nm.csv",
                ("radius_nm", "hz_oe"),
                list(zip(profile.radius_nm, profile.hz_oe)),
                prec,
            )
    _write_csv(args.out, "intra.csv", ("ecd_nm", "hz_center_oe"), rows, prec)
    return 0


def _cmd_inter(cfg, args):
    prec = cfg.output["precision"]
    array = ArrayConfig(
        stack=cfg.build_stack(), pitch_nm=cfg.sweep["inter_pitch_nm"]
    )
    report = coupling_map(array, hc_oe=cfg.device["hc_oe"])
    rows = []
    for np8, hz in enumerate(report.full_map_oe):
        ones_direct = bin(np8 & 0x0F).count("1")
        ones_diag = bin(np8 & 0xF0).count("1")
        rows.append((np8, ones_direct, ones_diag, hz))
    summary = (
        f"base_oe={_fmt(report.base_oe, prec)} "
        f"step_direct_oe={_fmt(report.step_direct_oe, prec)} "
        f"step_diag_oe={_fmt(report.step_diag_oe, prec)} "
        f"psi={_fmt(report.psi, prec)}"
    )
    _write_csv(
        args.out,
        "inter_map.csv",
        ("np8", "ones_direct", "ones_diag", "hz_oe"),
        rows,
        prec,
        comments=(summary,),
    )
    return 0


def _cmd_psi(cfg, args):
    prec = cfg.output["precision"]
    pmin = cfg.sweep["pitch_min_nm"]
    pitch_range = (
        0.0 if pmin == "auto" else pmin,
        cfg.sweep["pitch_max_nm"],
        cfg.sweep["pitch_step_nm"],
    )
    template = cfg.build_stack()
    rows = psi_sweep(
        template,
        cfg.sweep["ecd_list_nm"],
        pitch_range,
        hc_oe=cfg.device["hc_oe"],
        threads=args.threads,
    )
    _write_csv(args.out, "psi.csv", ("ecd_nm", "pitch_nm", "psi"), rows, prec)
    for ecd in cfg.sweep["ecd_list_nm"]:
        pitch = min_pitch_for_psi(
            template, ecd, PSI_TARGET_INFO, hc_oe=cfg.device["hc_oe"]
        )
        where = "not reached by 200 nm" if pitch is None else f"from {pitch:g} nm"
        print(f"ecd {ecd:g} nm: psi <= {PSI_TARGET_INFO:g} {where}")
    return 0


def _scenario_fields(stack, array_pitches, hc_oe):
    """Net field (Oe) per scenario: ideal, intra only, intra plus np0/np255."""
    h_intra = intra_center_hz_oe(stack)
    per_pitch = {}
    for pitch in array_pitches:
        report = coupling_map(ArrayConfig(stack=stack, pitch_nm=pitch), hc_oe)
        per_pitch[pitch] = {
            "ideal": 0.0,
            "intra": h_intra,
            "np0": h_intra + report.full_map_oe[0],
            "np255": h_intra + report.full_map_oe[255],
        }
    return per_pitch


def _cmd_metrics(cfg, args):
    prec = cfg.output["precision"]
    stack = cfg.build_stack()
    switch = cfg.switch_params()
    resist = cfg.resistance_model()
    sun = cfg.sun_params()
    stability = cfg.stability_params()
    hc = cfg.device["hc_oe"]
    t_ref = cfg.device["t_ref_k"]

    pitches = [r * stack.ecd_nm for r in cfg.sweep["pitch_list_ratio"]]
    fields = _scenario_fields(stack, pitches, hc)
    scenarios = ("ideal", "intra", "np0", "np255")

    header = ["pitch_nm"]
    for scen in scenarios:
        header += [f"ic_p_to_ap_{scen}_ua", f"ic_ap_to_p_{scen}_ua"]
    rows = []
    for pitch in pitches:
        row = [pitch]
        for scen in scenarios:
            h = fields[pitch][scen]
            row.append(critical_current(switch, "p_to_ap", h) * 1e6)
            row.append(critical_current(switch, "ap_to_p", h) * 1e6)
        rows.append(row)
    _write_csv(args.out, "ic_vs_pitch.csv", header, rows, prec)

    vp_grid = _grid(
        cfg.sweep["vp_min_v"], cfg.sweep["vp_max_v"], cfg.sweep["vp_step_v"]
    )
    rows = []
    for pitch in pitches:
        for vp in vp_grid:
            row = [pitch, vp]
            for scen in ("ideal", "np0", "np255"):
                h = fields[pitch][scen]
                if overdrive_current(resist, switch, "ap_to_p", vp, h) <= 0.0:
                    row.append(None)
                else:
                    row.append(
                        avg_switching_time(sun, switch, resist, "ap_to_p", vp, h)
                    )
            rows.append(row)
    _write_csv(
        args.out,
        "tw_vs_voltage.csv",
        (
            "pitch_nm",
            "vp_v",
            "tw_ap_to_p_nostray_ns",
            "tw_ap_to_p_np0_ns",
            "tw_ap_to_p_np255_ns",
        ),
        rows,
        prec,
    )

    t_grid = _grid(
        cfg.sweep["temp_min_k"], cfg.sweep["temp_max_k"], cfg.sweep["temp_step_k"]
    )
    base_pitch = pitches[0]
    rows = []
    for t in t_grid:
        h_intra = fields[base_pitch]["intra"]
        h_np0 = fields[base_pitch]["np0"]
        rows.append(
            (
                t,
                delta0_at(stability, t),
                thermal_stability(stability, "p", h_intra, t),
                thermal_stability(stability, "ap", h_intra, t),
                thermal_stability(stability, "p", h_np0, t),
                thermal_stability(stability, "ap", h_np0, t),
            )
        )
    _write_csv(
        args.out,
        "delta_vs_temperature.csv",
        (
            "t_k",
            "delta0",
            "delta_p_intra",
            "delta_ap_intra",
            "delta_p_np0",
            "delta_ap_np0",
        ),
        rows,
        prec,
    )

    rows = []
    h_intra = fields[pitches[0]]["intra"]
    for pitch in pitches:
        report = coupling_map(ArrayConfig(stack=stack, pitch_nm=pitch), hc)
        worst = worst_case_delta(stability, h_intra, report.full_map_oe, t_ref)
        rows.append(
            (pitch, pitch / stack.ecd_nm, worst.delta_min, worst.state, worst.np8)
        )
    _write_csv(
        args.out,
        "delta_worst_case.csv",
        ("pitch_nm", "pitch_over_ecd", "delta_min", "state", "np8"),
        rows,
        prec,
    )
    return 0


def _cmd_characterize(cfg, args):
    if not (args.loop or args.cycles or args.calibration):
        raise ConfigError(
            "characterize needs at least one of --loop, --cycles, --calibration"
        )
    prec = cfg.output["precision"]
    ra = cfg.stack["ra_ohm_um2"]

    if args.loop:
        loop = read_loop_csv(args.loop)
        summary = analyze_loop(loop, ra_ohm_um2=ra)
        _write_csv(
            args.out,
            "loop_summary.csv",
            (
                "source",
                "hsw_p_oe",
                "hsw_n_oe",
                "hc_oe",
                "hoffset_oe",
                "hs_intra_oe",
                "rp_ohm",
                "rap_ohm",
                "tmr",
                "ecd_nm",
            ),
            [
                (
                    os.path.basename(args.loop),
                    summary.hsw_p_oe,
                    summary.hsw_n_oe,
                    summary.hc_oe,
                    summary.hoffset_oe,
                    summary.hs_intra_oe,
                    summary.rp_ohm,
                    summary.rap_ohm,
                    summary.tmr,
                    summary.ecd_nm,
                )
            ],
            prec,
        )

    if args.cycles:
        cycles = read_cycles_csv(args.cycles)
        protocol = cfg.ramp_protocol()
        rows = []
        for direction in ("ascending", "descending"):
            curve = switching_probability(cycles, direction)
            fit = fit_hk_delta0(curve.h_oe, curve.p, protocol)
            rows.append(
                (
                    os.path.basename(args.cycles),
                    direction,
                    fit.hk_oe,
                    fit.delta0,
                    fit.residual,
                    fit.n_points,
                )
            )
        _write_csv(
            args.out,
            "fit_report.csv",
            ("source", "direction", "hk_oe", "delta0", "residual", "n_points"),
            rows,
            prec,
        )

    if args.calibration:
        measured = read_calibration_csv(args.calibration)
        result = calibrate_ms_t(cfg.build_stack(), measured)
        print(
            f"calibration: rl_scale={result.rl_scale:.{prec}g} "
            f"hl_scale={result.hl_scale:.{prec}g} "
            f"residual_oe={result.residual_oe:.{prec}g}"
        )
    return 0


def _add_common_options(parser, suppress_defaults):
    # the same options hang off the root parser and off every subparser so
    # they are accepted on either side of the subcommand name
    dflt = argparse.SUPPRESS if suppress_defaults else None

    def default(value):
        return dflt if suppress_defaults else value

    parser.add_argument(
        "--config", metavar="PATH", default=default(None), help="INI file of overrides"
    )
    parser.add_argument(
        "--out",
        metavar="DIR",
        default=default("out"),
        help="output directory (default: out)",
    )
    parser.add_argument(
        "--threads",
        type=int,
        default=default(1),
        metavar="N",
        help="worker threads for sweeps (default: 1)",
    )
    parser.add_argument(
        "--seed",
        type=int,
        default=default(None),
        metavar="N",
        help="seed for stochastic steps; the analysis commands are deterministic",
    )


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="mramcoupling",
        description="Stray-field coupling simulator for perpendicular MRAM arrays.",
    )
    _add_common_options(parser, suppress_defaults=False)
    parser.add_argument(
        "--print-defaults",
        action="store_true",
        help="print the default configuration as INI text and exit",
    )
    common = argparse.ArgumentParser(add_help=False)
    _add_common_options(common, suppress_defaults=True)
    sub = parser.add_subparsers(dest="command")
    sub.add_parser("intra", parents=[common], help="center stray field vs cell size")
    sub.add_parser("inter", parents=[common], help="3x3 neighborhood field map")
    sub.add_parser(
        "psi", parents=[common], help="disturbance ratio over a (size, pitch) grid"
    )
    sub.add_parser(
        "metrics",
        parents=[common],
        help="critical current, switching time, stability",
    )
    p_char = sub.add_parser(
        "characterize", parents=[common], help="analyze measured data files"
    )
    p_char.add_argument("--loop", metavar="PATH", help="single-loop CSV")
    p_char.add_argument("--cycles", metavar="PATH", help="cycle-ensemble CSV")
    p_char.add_argument(
        "--calibration", metavar="PATH", help="size vs stray-field CSV"
    )
    return parser


_COMMANDS = {
    "intra": _cmd_intra,
    "inter": _cmd_inter,
    "psi": _cmd_psi,
    "metrics": _cmd_metrics,
    "characterize": _cmd_characterize,
}


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.print_defaults:
        print(render_defaults(), end="")
        return 0
    if args.command is None:
        parser.error("a subcommand is required (or use --print-defaults)")
    if args.threads < 1:
        print("error: --threads must be at least 1", file=sys.stderr)
        return 2
    try:
        cfg = load_config(args.config)
        os.makedirs(args.out, exist_ok=True)
        return _COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (GeometryError, DomainError, FitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
