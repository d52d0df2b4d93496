"""Command line interface: ``fronttrack {solve,convergence,stability,compare-fv}``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from fronttrack.errors import FrontTrackError
from fronttrack.experiments import EXTRA_KEYS, build_config, preset, read_config_file
from fronttrack.output import emit_plot_data, format_table, write_text
from fronttrack.studies import (
    DEFAULT_EPS_LIST,
    DEFAULT_N_LIST,
    compare_ft_fv,
    convergence_rate,
    fv_solution,
    reference_solution,
    run_convergence_study,
    run_stability_study,
)
from fronttrack.tracking import front_tracking_run

log = logging.getLogger("fronttrack")


def _csv_ints(text: str) -> tuple[int, ...]:
    return tuple(int(v) for v in text.replace(",", " ").split())


def _csv_floats(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in text.replace(",", " ").split())


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--experiment", choices=("1", "2"), help="preset (default 1)")
    common.add_argument("--config", type=Path, help="flat 'key = value' file overriding the preset")
    common.add_argument("--n", type=int, help="resolution; delta = dx = delta_scale / n")
    common.add_argument("--delta", type=float, help="explicit delta (overrides --n for a single solve)")
    common.add_argument("--end-time", type=float, dest="end_time")
    common.add_argument("--lambda", type=float, dest="fv_lambda", help="FV ratio dt/dx")
    common.add_argument("--reference-n", type=int, dest="reference_n")
    common.add_argument("--delta-scale", type=float, dest="delta_scale",
                        help="numerator of delta = delta_scale / n (default 1)")
    common.add_argument("--out-dir", type=Path, dest="out_dir")
    common.add_argument("--format", choices=("csv", "txt"), dest="format")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="fronttrack", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", parents=[common], help="front tracking solution at the end time")
    s.add_argument("--fv", action="store_true", help="also write the upwind FV solution")

    c = sub.add_parser("convergence", parents=[common], help="L1 error / OOC table")
    c.add_argument("--n-list", type=_csv_ints, dest="n_list")

    st = sub.add_parser("stability", parents=[common], help="perturbation study")
    st.add_argument("--mode", choices=("datum", "coefficient", "flux"))
    st.add_argument("--eps-list", type=_csv_floats, dest="eps_list")

    cf = sub.add_parser("compare-fv", parents=[common], help="FT vs FV L1 errors")
    cf.add_argument("--n-list", type=_csv_ints, dest="n_list")
    return p


def resolve(args: argparse.Namespace):
    """Layer the config file over the preset; command line flags win over both."""
    file_values = read_config_file(args.config) if args.config else {}
    which = args.experiment or file_values.get("experiment")
    if which is None and "fluxes" in file_values:
        base = None
    else:
        base = preset(which or "1")
    cfg = build_config(base, file_values)
    cfg = cfg.with_overrides(
        n=args.n, delta=args.delta, end_time=args.end_time, fv_lambda=args.fv_lambda,
        reference_n=args.reference_n, delta_scale=args.delta_scale,
    )
    extra = {k: file_values[k] for k in EXTRA_KEYS if k in file_values}
    for key in ("n_list", "eps_list", "mode", "format", "out_dir"):
        val = getattr(args, key, None)
        if val is not None:
            extra[key] = val
    extra.setdefault("format", "txt")
    extra["out_dir"] = Path(extra.get("out_dir") or ".")
    return cfg, extra


def _stem(cfg) -> str:
    return cfg.name.replace(" ", "_")


def cmd_solve(cfg, extra, args) -> int:
    out: Path = extra["out_dir"]
    out.mkdir(parents=True, exist_ok=True)
    fmt = extra["format"]
    delta = cfg.resolution
    run = front_tracking_run(cfg.spatial_flux(), cfg.initial_datum(), delta,
                             cfg.end_time, cfg.domain)
    # compute everything before writing so a failure leaves no partial output
    fv = fv_solution(cfg, delta) if getattr(args, "fv", False) else None
    meta = {"experiment": cfg.name, "time": "%g" % cfg.end_time, "n": cfg.n,
            "delta": "%.17g" % delta}
    ext = "csv" if fmt == "csv" else "txt"
    path = emit_plot_data(run.solution, cfg.domain,
                          out / f"{_stem(cfg)}_ft_t{cfg.end_time:g}.{ext}",
                          {**meta, "method": "front-tracking"}, fmt)
    emit_plot_data(run.initial, cfg.domain, out / f"{_stem(cfg)}_initial.{ext}",
                   {**meta, "time": 0, "method": "projected-datum"}, fmt)
    print(f"wrote {path}")
    st = run.state.stats
    print(f"events={st.events} collisions={st.collisions}"
          f" interface_crossings={st.interface_crossings} max_fronts={st.max_fronts}")
    if fv is not None:
        p = emit_plot_data(fv, cfg.domain, out / f"{_stem(cfg)}_fv_t{cfg.end_time:g}.{ext}",
                           {**meta, "method": "upwind-fv", "lambda": cfg.fv_lambda}, fmt)
        print(f"wrote {p}")
    return 0


def cmd_convergence(cfg, extra, args) -> int:
    n_list = extra.get("n_list") or DEFAULT_N_LIST
    rows = run_convergence_study(cfg, n_list)
    fmt = extra["format"]
    table = format_table(rows, fmt)
    out: Path = extra["out_dir"]
    out.mkdir(parents=True, exist_ok=True)
    path = write_text(out / f"{_stem(cfg)}_convergence.{fmt}", table)
    print(format_table(rows, "txt"), end="")
    print(f"rate (least squares in delta): {convergence_rate(rows):.3f}")
    print(f"wrote {path}")
    return 0


def cmd_stability(cfg, extra, args) -> int:
    mode = extra.get("mode") or "flux"
    eps = extra.get("eps_list") or DEFAULT_EPS_LIST
    res = run_stability_study(cfg, mode, eps)
    lines = ["eps,distance,perturbation,ratio"] + [
        f"{r.eps:.3e},{r.distance:.6e},{r.perturbation:.3e},{r.ratio:.4f}" for r in res.rows
    ]
    text = "\n".join(lines) + "\n"
    out: Path = extra["out_dir"]
    out.mkdir(parents=True, exist_ok=True)
    path = write_text(out / f"{_stem(cfg)}_stability_{mode}.csv", text)
    print(text, end="")
    print(f"mode={mode} delta={res.delta:.6g} slope={res.slope:.4f} max_ratio={res.max_ratio:.4f}")
    print(f"wrote {path}")
    return 0


def cmd_compare(cfg, extra, args) -> int:
    n_list = extra.get("n_list") or (cfg.n,)
    ref = reference_solution(cfg)
    lines = ["n,ft_error,fv_error,ratio"]
    for n in n_list:
        c = compare_ft_fv(cfg, n, reference=ref)
        lines.append(f"{n},{c.ft_error:.3e},{c.fv_error:.3e},{c.ratio:.1f}")
    text = "\n".join(lines) + "\n"
    out: Path = extra["out_dir"]
    out.mkdir(parents=True, exist_ok=True)
    path = write_text(out / f"{_stem(cfg)}_compare_fv.csv", text)
    print(text, end="")
    print(f"wrote {path}")
    return 0


COMMANDS = {
    "solve": cmd_solve,
    "convergence": cmd_convergence,
    "stability": cmd_stability,
    "compare-fv": cmd_compare,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        cfg, extra = resolve(args)
        return COMMANDS[args.command](cfg, extra, args)
    except (FrontTrackError, OSError, ValueError) as exc:
        print(f"fronttrack: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
