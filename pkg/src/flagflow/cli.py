"""Command line interface.

Exit status: 0 on success, 2 for bad parameters, 3 for numerical failures.
Data goes to standard output (or ``--out``); diagnostics to standard error,
errors as a single line starting with ``error:``.
"""

from __future__ import annotations

import argparse
import re
import sys
from typing import Sequence

from . import report
from .analysis import named_equilibria
from .errors import DomainError, NumericalError, ParameterError
from .flow import (
    IntegrationConfig,
    basin_sweep,
    integrate_compactified,
    integrate_raw,
    sector_of,
)
from .models import make_model

EXIT_OK, EXIT_PARAM, EXIT_NUMERIC = 0, 2, 3


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("model")
    g.add_argument("--family", default="I", help="I (SO(2n+1)/(U(m)xSO(2k+1))) or II (Sp(n)/(U(m)xSp(k)))")
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--k", type=int, required=True)
    g.add_argument("--no-strict", dest="strict", action="store_false",
                   help="accept parameters outside the validated ranges")
    n = p.add_argument_group("integration")
    n.add_argument("--rtol", type=float, default=IntegrationConfig.rtol)
    n.add_argument("--atol", type=float, default=IntegrationConfig.atol)
    n.add_argument("--t-max", type=float, default=IntegrationConfig.t_max)
    n.add_argument("--capture", type=float, default=IntegrationConfig.capture_radius)
    o = p.add_argument_group("output")
    o.add_argument("--out", help="write data to this file instead of standard output")
    o.add_argument("--json", action="store_true", help="JSON output where available")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="flagflow", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("model", parents=[common], help="print the flow system and its polynomial form")
    sub.add_parser("equilibria", parents=[common], help="equilibria at infinity")
    sub.add_parser("rays", parents=[common], help="invariant rays (Einstein directions)")
    f = sub.add_parser("flow", parents=[common], help="integrate one orbit; CSV samples")
    f.add_argument("--x0", type=float, required=True)
    f.add_argument("--y0", type=float, required=True)
    f.add_argument("--raw", action="store_true", help="integrate the rational system in its own time")
    b = sub.add_parser("basin", parents=[common], help="basin classification over a seed grid; CSV")
    b.add_argument("--grid", default="10x10", help="NXxNY")
    b.add_argument("--xmin", type=float, default=0.0)
    b.add_argument("--ymin", type=float, default=0.0)
    b.add_argument("--xmax", type=float, required=True)
    b.add_argument("--ymax", type=float, required=True)
    b.add_argument("--workers", type=int, default=1)
    pr = sub.add_parser("portrait", parents=[common], help="SVG portrait on the Poincare disc")
    pr.add_argument("--width", type=int, default=800)
    pr.add_argument("--seeds", type=int, default=24)
    pr.add_argument("--no-rays", dest="rays", action="store_false")
    pr.add_argument("--no-labels", dest="labels", action="store_false")
    return parser


def _emit(args, text: str | bytes) -> None:
    if args.out:
        report.write_atomic(args.out, text)
        return
    if isinstance(text, bytes):
        sys.stdout.buffer.write(text)
        sys.stdout.buffer.flush()
    else:
        sys.stdout.write(text)
        sys.stdout.flush()


def _parse_grid(spec: str) -> tuple[int, int]:
    m = re.fullmatch(r"\s*(\d+)\s*[xX]\s*(\d+)\s*", spec)
    if not m:
        raise ParameterError(f"grid must look like NXxNY, got {spec!r}")
    return int(m.group(1)), int(m.group(2))


def _run(args) -> int:
    model = make_model(args.family, args.m, args.k, strict=args.strict)
    cfg = IntegrationConfig(rtol=args.rtol, atol=args.atol, t_max=args.t_max, capture_radius=args.capture)

    if args.command == "model":
        _emit(args, report.model_json(model) if args.json else report.model_summary(model))
    elif args.command == "equilibria":
        if args.json:
            _emit(args, report.export_equilibria(model))
        else:
            lines = []
            for e in named_equilibria(model):
                eig = ", ".join(f"{l.real:.12g}" + (f"{l.imag:+.12g}j" if l.imag else "") for l in e.eigenvalues)
                lines.append(f"{e.name}  {e.chart.value} z1={float(e.z1):.12g}  "
                             f"disc=({e.disc.u:.12g}, {e.disc.v:.12g})  eig=({eig})  {e.classification.value}")
            _emit(args, "\n".join(lines) + "\n")
    elif args.command == "rays":
        if args.json:
            _emit(args, report.export_rays(model))
        else:
            from .analysis import invariant_rays
            from .models import polynomial_field

            lines = [f"direction=({r.a:.12g}, {r.b:.12g})  x/y={r.slope}" for r in invariant_rays(polynomial_field(model))]
            _emit(args, "\n".join(lines) + "\n")
    elif args.command == "flow":
        if args.raw:
            traj = integrate_raw(model, args.x0, args.y0, cfg)
        else:
            traj = integrate_compactified(model, args.x0, args.y0, cfg)
        region = sector_of(model, args.x0, args.y0)
        print(f"region={region.value} omega={traj.omega} stop={traj.stop_reason} "
              f"samples={len(traj)}", file=sys.stderr)
        if args.json:
            om = traj.omega
            _emit(args, report.to_json({
                "x0": args.x0, "y0": args.y0, "region": region.value,
                "omega": om.verdict.value, "target": om.target,
                "final_disc": list(om.final_disc.as_tuple()), "final_distance": om.final_distance,
                "stop_reason": traj.stop_reason, "samples": len(traj),
            }) + "\n")
        else:
            _emit(args, report.export_trajectory(traj))
    elif args.command == "basin":
        nx, ny = _parse_grid(args.grid)
        grid = basin_sweep(model, (args.xmin, args.xmax), (args.ymin, args.ymax), nx, ny, cfg,
                           workers=args.workers)
        bad = sum(not c.consistent for c in grid)
        print(f"{len(grid.cells)} cells, {bad} inconsistent", file=sys.stderr)
        _emit(args, report.export_basin(grid))
    elif args.command == "portrait":
        opts = report.PortraitOptions(width_px=args.width, n_stream_seeds=args.seeds,
                                      draw_rays=args.rays, labels=args.labels)
        _emit(args, report.render_portrait(model, opts, cfg))
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _run(args)
    except (ParameterError, DomainError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARAM
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except BrokenPipeError:
        # reader went away (e.g. piped into head)
        sys.stdout = None
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
