"""Command-line front-end: ``adft <subcommand> ...``.

Every subcommand that writes a file also writes ``<output>.manifest.json``;
``adft rerun <manifest>`` repeats the run with the recorded parameters.
Relative output paths resolve against ``$ADFT_OUTPUT_DIR`` when it is set.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import json
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import __version__
from .approx_search import pareto_search, search_report_csv
from .array_sim import ENGINES, ChainConfig, bin_energy_sweep, load_config
from .beampattern import (
    ArrayGeometry,
    filter_bank_response,
    near_field_pattern,
    pattern_deviation_db,
    response_error_surface,
    side_lobe_levels,
    ula_array_factor,
    ura_beams_2d,
)
from .fastalg import (
    apply_fast,
    builtin_adft32_factorization,
    complexity_table,
    count_dense_operations,
    count_operations,
    flip_coefficient,
    stage_product,
)
from .transforms import adft32_matrix, apply_dense, dft_matrix, round_scaled_dft

OUTPUT_DIR_ENV = "ADFT_OUTPUT_DIR"
STAGE_ADDITIONS = (60, 60, 28, 28, 60, 28, 24, 60)


class CLIError(Exception):
    """Expected failure; reported as a one-line diagnostic."""


# -- helpers ---------------------------------------------------------------------


def _resolve_output(path: str | None) -> Path | None:
    if path is None:
        return None
    p = Path(path)
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not p.is_absolute():
        p = Path(base) / p
    return p


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _params(args: argparse.Namespace) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("func",)}


def _write_output(args, text: str) -> None:
    out = _resolve_output(args.output)
    if out is None:
        sys.stdout.write(text)
        return
    _atomic_write(out, text)
    manifest = {
        "subcommand": args.command,
        "parameters": _params(args),
        "outputs": [str(out)],
        "inputs": [p for p in (getattr(args, "config", None),) if p],
        "tool_version": __version__,
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(),
        "seed": getattr(args, "seed", None),
    }
    _atomic_write(out.with_name(out.name + ".manifest.json"), json.dumps(manifest, indent=2) + "\n")


def _transform(name: str):
    if name == "adft":
        return adft32_matrix()
    if name == "dft":
        return dft_matrix(32)
    raise CLIError(f"unknown transform {name!r}")


def _parse_grid2(text: str) -> tuple[int, int]:
    try:
        a, b = (int(v) for v in text.lower().split("x"))
    except ValueError as exc:
        raise CLIError(f"grid must look like 361x181, got {text!r}") from exc
    if a < 2 or b < 2:
        raise CLIError("grid dimensions must be >= 2")
    return a, b


def _parse_range(text: str) -> np.ndarray:
    """``start:stop:step`` in degrees, inclusive of ``stop``."""
    try:
        start, stop, step = (float(v) for v in text.split(":"))
    except ValueError as exc:
        raise CLIError(f"angle range must be start:stop:step, got {text!r}") from exc
    if step <= 0 or stop < start:
        raise CLIError("angle range needs step > 0 and stop >= start")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return np.round(start + step * np.arange(count), 10)


# -- subcommands -----------------------------------------------------------------


def cmd_matrix(args) -> int:
    m = adft32_matrix() if args.kind == "adft" else dft_matrix(args.size)
    if args.json or args.format == "json":
        text = m.to_json() + "\n"
    else:
        text = m.to_csv()
    _write_output(args, text)
    return 0


def _verify_report(args) -> dict:
    rng = np.random.default_rng(args.seed)
    f = builtin_adft32_factorization()
    if args.mutate_stage is not None:
        if not 1 <= args.mutate_stage <= len(f.stages):
            raise CLIError(f"--mutate-stage must be 1..{len(f.stages)}")
        st = f.stages[args.mutate_stage - 1]
        if not 0 <= args.mutate_index < len(st.triples):
            raise CLIError(f"--mutate-index must be 0..{len(st.triples) - 1}")
        f = flip_coefficient(f, args.mutate_stage - 1, args.mutate_index)
    target = adft32_matrix()
    product = stage_product(f)
    diffs = product.differing_entries(target)
    x = rng.integers(-128, 128, (32, args.vectors)) + 1j * rng.integers(-128, 128, (32, args.vectors))
    fast = apply_fast(f, x)
    dense = apply_dense(target, x)
    ops = count_operations(f)
    dense_ops = count_dense_operations(target)
    checks = {
        "factorization_identity": not diffs,
        "transcription_matches_rounding": round_scaled_dft(1.0) == target,
        "fast_equals_dense": bool(np.array_equal(fast, dense)),
        "fast_additions_348": ops.total_real_additions == 348
        and tuple(ops.per_stage_real_additions) == STAGE_ADDITIONS,
        "zero_multiplications": ops.real_multiplications == 0 and dense_ops.real_multiplications == 0,
    }
    report = {
        "checks": checks,
        "passed": all(checks.values()),
        "additions": ops.total_real_additions,
        "per_stage_additions": list(ops.per_stage_real_additions),
        "dense_additions": dense_ops.total_real_additions,
        "complexity_table": complexity_table(f),
        "vectors": args.vectors,
    }
    if diffs:
        r, c = diffs[0]
        report["first_difference"] = {"row": r, "col": c, "got": str(product.entry(r, c)), "expected": str(target.entry(r, c))}
    return report


def cmd_verify(args) -> int:
    report = _verify_report(args)
    if args.json:
        text = json.dumps(report, indent=2) + "\n"
    else:
        lines = [f"{name}: {'PASS' if ok else 'FAIL'}" for name, ok in report["checks"].items()]
        if "first_difference" in report:
            d = report["first_difference"]
            lines.append(f"first differing entry: ({d['row']}, {d['col']}) got {d['got']} expected {d['expected']}")
        lines.append(f"additions: {report['additions']} (per stage {report['per_stage_additions']})")
        lines.append(f"{'method':<30}{'additions':>10}{'multiplications':>17}  source")
        for row in report["complexity_table"]:
            lines.append(f"{row['method']:<30}{row['additions']:>10}{row['multiplications']:>17}  {row['source']}")
        text = "\n".join(lines) + "\n"
    if args.output:
        _write_output(args, text)
    else:
        sys.stdout.write(text)
    return 0 if report["passed"] else 1


def cmd_response(args) -> int:
    t = _transform(args.transform)
    grid = filter_bank_response(t, args.grid)
    sll = side_lobe_levels(grid)
    params = {"transform": args.transform, "grid_points": args.grid, "axis": "omega [rad/sample]", "values": "dB re bin peak"}
    summary = {"largest_side_lobe_db": float(sll.max()), "per_bin_side_lobe_db": [round(float(v), 4) for v in sll]}
    if args.transform == "adft":
        err = response_error_surface(t, dft_matrix(32), args.grid)
        summary["worst_bins"] = list(err.worst_bins)
        summary["peak_error_db"] = [round(float(v), 4) for v in err.peak_error_db]
    text = json.dumps({"summary": summary, "grid": grid.to_dict()}) + "\n" if args.json else grid.to_csv(header=params)
    _write_output(args, text)
    print(f"largest side lobe: {summary['largest_side_lobe_db']:.2f} dB", file=sys.stderr)
    if "worst_bins" in summary:
        print(f"worst bins vs exact DFT: {summary['worst_bins']}", file=sys.stderr)
    return 0


def cmd_beams1d(args) -> int:
    t = _transform(args.transform)
    az = np.linspace(-90, 90, args.grid)
    grid = ula_array_factor(t, ArrayGeometry(32, 1, args.dx), az, args.element_exponent)
    params = {"transform": args.transform, "dx_wavelengths": args.dx, "axis": "azimuth [deg]", "values": "dB re bin peak"}
    if args.json:
        text = grid.to_json() + "\n"
    elif args.long:
        text = grid.to_long_csv()
    else:
        text = grid.to_csv(header=params)
    _write_output(args, text)
    return 0


def cmd_beams2d(args) -> int:
    t = _transform(args.transform)
    n_phi, n_psi = _parse_grid2(args.grid)
    psi = np.linspace(0, 90, n_psi)
    phi = np.linspace(-180, 180, n_phi)
    geom = ArrayGeometry(32, 32, args.dx, args.dy)
    try:
        sep = ura_beams_2d(t, geom, [(args.k, args.l)], psi, phi, "separable")
    except IndexError as exc:
        raise CLIError(str(exc)) from exc
    direct = ura_beams_2d(t, geom, [(args.k, args.l)], psi, phi, "direct")
    rel = float(np.abs(sep.values - direct.values).max() / np.abs(direct.values).max())
    if rel >= 1e-10:
        raise CLIError(f"separability self-check failed: relative difference {rel:.3e}")
    print(f"separability check passed (max relative difference {rel:.2e})", file=sys.stderr)
    params = {"transform": args.transform, "k": args.k, "l": args.l, "dx": args.dx, "dy": args.dy,
              "axes": "psi [deg], phi [deg]", "values": "dB re beam peak"}
    text = sep.to_json() + "\n" if args.json else sep.to_csv(header=params)
    _write_output(args, text)
    return 0


def cmd_nearfield(args) -> int:
    t = _transform(args.transform)
    az = _parse_range(args.azimuth)
    geom = ArrayGeometry(32, 1, args.dx)
    near = near_field_pattern(t, geom, args.range, args.freq, az, element_exponent=args.element_exponent)
    far = near_field_pattern(t, geom, np.inf, args.freq, az, element_exponent=args.element_exponent)
    dev = pattern_deviation_db(near, far)
    print(f"max main-lobe deviation from far field: {dev:.4f} dB", file=sys.stderr)
    params = {"transform": args.transform, "range_m": args.range, "frequency_hz": args.freq,
              "dx_wavelengths": args.dx, "axis": "azimuth [deg]", "values": "dB re bin peak"}
    text = json.dumps({"deviation_db": dev, "near": near.to_dict()}) + "\n" if args.json else near.to_csv(header=params)
    _write_output(args, text)
    return 0


def cmd_pareto(args) -> int:
    results = pareto_search(args.beta_min, args.beta_max, args.step)
    best = min(results, key=lambda r: r.metrics.total_error_energy)
    print(
        f"{len(results)} distinct candidates, {sum(r.pareto_efficient for r in results)} Pareto-efficient; "
        f"min total error energy {best.metrics.total_error_energy:.2f} at beta={best.beta:.2f}",
        file=sys.stderr,
    )
    if args.json:
        text = json.dumps([
            {"beta": r.beta, "betas": list(r.betas), "pareto": r.pareto_efficient, **vars(r.metrics)} for r in results
        ]) + "\n"
    else:
        text = search_report_csv(results)
    _write_output(args, text)
    if args.emit_matrix is not None:
        if not args.matrix_output:
            raise CLIError("--emit-matrix needs --matrix-output")
        path = _resolve_output(args.matrix_output)
        _atomic_write(path, round_scaled_dft(args.emit_matrix).to_json() + "\n")
    return 0


def cmd_simulate(args) -> int:
    cfg = load_config(args.config) if args.config else ChainConfig()
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.snapshots is not None:
        overrides["snapshots"] = args.snapshots
    if args.dx is not None:
        overrides["dx"] = args.dx
    if args.range is not None:
        overrides["source_range"] = args.range
    if overrides:
        cfg = ChainConfig.from_dict({**cfg.to_dict(), **overrides})
    args.seed = cfg.seed
    az = _parse_range(args.azimuth)
    grid = bin_energy_sweep(cfg, az, args.engine)
    params = {"engine": args.engine, **{k: v for k, v in cfg.to_dict().items() if k not in ("calibration", "channel_mismatch")},
              "axis": "azimuth [deg]", "values": "integrated energy, dB re bin peak"}
    text = grid.to_json() + "\n" if args.json else grid.to_csv(header=params)
    _write_output(args, text)
    return 0


def cmd_opcount(args) -> int:
    if args.transform == "fast":
        report = count_operations(builtin_adft32_factorization(), args.input_kind)
    else:
        m = adft32_matrix() if args.transform == "dense-adft" else dft_matrix(32)
        report = count_dense_operations(m, args.input_kind)
    if args.json:
        text = json.dumps({**report.to_dict(), "table": complexity_table()}, indent=2) + "\n"
    else:
        text = (
            f"per-stage additions: {list(report.per_stage_real_additions)}\n"
            f"additions: {report.total_real_additions}\n"
            f"multiplications: {report.real_multiplications}\n"
        )
    if args.output:
        _write_output(args, text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_rerun(args) -> int:
    manifest = json.loads(Path(args.manifest).read_text())
    params = dict(manifest["parameters"])
    if args.output:
        params["output"] = args.output
    ns = argparse.Namespace(**params)
    ns.func = _COMMANDS[manifest["subcommand"]]
    return ns.func(ns)


_COMMANDS = {
    "matrix": cmd_matrix,
    "verify": cmd_verify,
    "response": cmd_response,
    "beams1d": cmd_beams1d,
    "beams2d": cmd_beams2d,
    "nearfield": cmd_nearfield,
    "pareto": cmd_pareto,
    "simulate": cmd_simulate,
    "opcount": cmd_opcount,
    "rerun": cmd_rerun,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-o", "--output", help="output file (default: stdout)")
    common.add_argument("--json", action="store_true", help="write JSON instead of CSV/text")

    parser = argparse.ArgumentParser(prog="adft", description="32-point approximate DFT beamforming toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("matrix", parents=[common], help="export the DFT or ADFT matrix")
    p.add_argument("--kind", required=True, choices=["dft", "adft"])
    p.add_argument("--size", type=int, default=32, help="DFT size (dft only)")
    p.add_argument("--format", choices=["json", "csv"], default="json")

    p = sub.add_parser("verify", parents=[common], help="check the fast algorithm against the dense matrix")
    p.add_argument("--vectors", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mutate-stage", type=int, help="stage number (1-8) whose coefficient to flip")
    p.add_argument("--mutate-index", type=int, default=0, help="0-based triple index within the stage")

    p = sub.add_parser("response", parents=[common], help="filter-bank responses and side lobes")
    p.add_argument("--transform", choices=["adft", "dft"], default="adft")
    p.add_argument("--grid", type=int, default=4096)

    p = sub.add_parser("beams1d", parents=[common], help="linear-array beam patterns")
    p.add_argument("--transform", choices=["adft", "dft"], default="adft")
    p.add_argument("--dx", type=float, default=0.5, help="element spacing [wavelengths]")
    p.add_argument("--grid", type=int, default=361, help="azimuth points over [-90, 90] deg")
    p.add_argument("--element-exponent", type=float, default=None)
    p.add_argument("--long", action="store_true", help="long-format (bin, angle, dB) CSV")

    p = sub.add_parser("beams2d", parents=[common], help="rectangular-array beam (k, l)")
    p.add_argument("--transform", choices=["adft", "dft"], default="adft")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--grid", default="361x181", help="<phi points>x<psi points>")
    p.add_argument("--dx", type=float, default=0.5)
    p.add_argument("--dy", type=float, default=0.5)

    p = sub.add_parser("nearfield", parents=[common], help="finite-range measurement pattern")
    p.add_argument("--transform", choices=["adft", "dft"], default="adft")
    p.add_argument("--range", type=float, default=7.0, help="source range [m]")
    p.add_argument("--freq", type=float, default=5.8e9, help="carrier [Hz]")
    p.add_argument("--dx", type=float, default=0.6)
    p.add_argument("--azimuth", default="-72:72:0.1", help="start:stop:step [deg]")
    p.add_argument("--element-exponent", type=float, default=None)

    p = sub.add_parser("pareto", parents=[common], help="beta sweep and Pareto-efficient set")
    p.add_argument("--beta-min", type=float, default=0.01)
    p.add_argument("--beta-max", type=float, default=5.0)
    p.add_argument("--step", type=float, default=0.01)
    p.add_argument("--emit-matrix", type=float, metavar="BETA")
    p.add_argument("--matrix-output")

    p = sub.add_parser("simulate", parents=[common], help="receive-chain bin-energy sweep")
    p.add_argument("--config", help="chain config (.toml or .json)")
    p.add_argument("--engine", choices=ENGINES, default="fast_adft")
    p.add_argument("--azimuth", default="-72:72:1", help="start:stop:step [deg]")
    p.add_argument("--seed", type=int)
    p.add_argument("--snapshots", type=int)
    p.add_argument("--dx", type=float)
    p.add_argument("--range", type=float, help="source range [m] (default: far field)")

    p = sub.add_parser("opcount", parents=[common], help="real-operation counts")
    p.add_argument("--transform", choices=["fast", "dense-adft", "dense-dft"], default="fast")
    p.add_argument("--input-kind", choices=["complex", "real"], default="complex")

    p = sub.add_parser("rerun", help="repeat a run from its manifest")
    p.add_argument("manifest")
    p.add_argument("-o", "--output", help="override the recorded output path")

    for name, sp in sub.choices.items():
        sp.set_defaults(func=_COMMANDS[name])
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CLIError, ValueError, OSError, KeyError) as exc:
        print(f"adft {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
