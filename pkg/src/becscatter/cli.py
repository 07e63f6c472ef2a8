"""Command-line interface.

Subcommands: epsilon, spectrum, bragg, dispersion, compare. A plain-text
``key=value`` config file can preload any long-form flag default; explicit
flags win. Exit codes: 0 success, 2 invalid parameters, 3 convergence
failure in any row.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import kernels, runner
from .core import ProfileKind, SimulationParams
from .dispersion import bulk_propagator
from .permittivity import epsilon_sweep

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NOT_CONVERGED = 3


def _read_config(path: str) -> dict:
    values: dict[str, str] = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"config line without '=': {raw!r}")
        values[key.strip().replace("-", "_")] = value.strip()
    return values


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="key=value file overriding built-in defaults")
    p.add_argument("--density", type=float, default=0.05,
                   help="atomic density n0 in 1/k0^3 units")
    p.add_argument("--length", type=float, default=10.0,
                   help="slab depth in resonant wavelengths")
    p.add_argument("--mu-c", type=float, default=0.0,
                   help="chemical potential in gamma units")
    p.add_argument("--recoil", type=float, default=1e-3,
                   help="recoil frequency in gamma units")
    p.add_argument("--resonance-ratio", type=float, default=1e8,
                   help="omega0 / gamma")
    p.add_argument("--delta-q", type=float, default=0.5,
                   help="split-profile momentum modulation in k0 units")
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def _add_sweep(p: argparse.ArgumentParser):
    p.add_argument("--dmin", type=float, default=-4.0)
    p.add_argument("--dmax", type=float, default=4.0)
    p.add_argument("--points", type=int, default=401)


def _add_solver(p: argparse.ArgumentParser):
    p.add_argument("--cutoff", default="auto",
                   help="'auto' for the doubling controller or a fixed integer")
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--margin", type=float, default=4.0,
                   help="initial grid margin factor over the coupled-mode span")
    p.add_argument("--workers", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="becscatter",
        description="1D light scattering from a condensate slab "
                    f"(kernel backend: {kernels.backend_name()})",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_eps = sub.add_parser("epsilon", help="permittivity sweep")
    _add_common(p_eps)
    _add_sweep(p_eps)

    p_spec = sub.add_parser("spectrum", help="transmission/reflection spectrum")
    _add_common(p_spec)
    _add_sweep(p_spec)
    _add_solver(p_spec)
    p_spec.add_argument("--profile", choices=[k.value for k in ProfileKind],
                        default="uniform")
    p_spec.add_argument("--method", choices=runner.METHODS, default="polariton")
    p_spec.add_argument("--taylor-order", default="1",
                        help="forward-only sqrt(eps) expansion order: 1, 2 or 'exact'")

    p_bragg = sub.add_parser("bragg", help="reflection vs modulation wavenumber")
    _add_common(p_bragg)
    _add_solver(p_bragg)
    p_bragg.add_argument("--dq-min", type=float, default=0.3)
    p_bragg.add_argument("--dq-max", type=float, default=1.4)
    p_bragg.add_argument("--points", type=int, default=23)
    p_bragg.add_argument("--resonance-ref", choices=("displaced", "bare"),
                         default="displaced")

    p_disp = sub.add_parser("dispersion", help="bulk propagator energy scan")
    _add_common(p_disp)
    _add_sweep(p_disp)
    p_disp.add_argument("--momentum", type=float, default=1.2,
                        help="quasiparticle momentum in hbar*k0 units")

    p_cmp = sub.add_parser("compare",
                           help="polariton vs maxwell with deviation summary")
    _add_common(p_cmp)
    _add_sweep(p_cmp)
    _add_solver(p_cmp)

    return parser


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> argparse.Namespace:
    # peek at --config, load it as defaults, then parse for real
    probe = argparse.ArgumentParser(add_help=False)
    probe.add_argument("--config")
    known, _ = probe.parse_known_args(argv[1:] if argv else argv)
    args = parser.parse_args(argv)
    if getattr(args, "config", None):
        overrides = _read_config(args.config)
        fresh = parser.parse_args([argv[0]])
        given = {a for a in vars(args) if getattr(args, a) != getattr(fresh, a, None)}
        for key, value in overrides.items():
            if not hasattr(args, key):
                raise ValueError(f"unknown config key: {key}")
            if key in given:
                continue  # explicit flag wins
            current = getattr(fresh, key)
            if isinstance(current, bool):
                setattr(args, key, value.lower() in ("1", "true", "yes"))
            elif isinstance(current, int) and not isinstance(current, bool):
                setattr(args, key, int(value))
            elif isinstance(current, float):
                setattr(args, key, float(value))
            else:
                setattr(args, key, value)
    return args


def _params(args) -> SimulationParams:
    return SimulationParams(
        density=args.density, slab_depth=args.length, mu_c=args.mu_c,
        recoil=args.recoil, resonance_ratio=args.resonance_ratio,
        delta_q=args.delta_q,
    )


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _parse_cutoff(raw) -> int | None:
    if raw is None or raw == "auto":
        return None
    return int(raw)


def _parse_taylor(raw) -> int | None:
    if raw == "exact":
        return None
    return int(raw)


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
        params = _params(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID

    try:
        if args.command == "epsilon":
            deltas = np.linspace(args.dmin, args.dmax, args.points)
            eps = epsilon_sweep(deltas, params.density, params.mu_c)
            metadata = {
                "schema": runner.SCHEMA_EPSILON,
                **runner._params_metadata(params),
                "dmin": repr(args.dmin), "dmax": repr(args.dmax),
                "points": str(args.points),
                "kernel": kernels.backend_name(),
            }
            if args.format == "json":
                import json

                rows = [{"delta": float(d), "eps_re": e.real, "eps_im": e.imag}
                        for d, e in zip(deltas, eps)]
                _emit(json.dumps({"metadata": metadata, "rows": rows}, indent=2)
                      + "\n", args.out)
            else:
                _emit(runner.epsilon_csv(deltas, eps, metadata), args.out)
            return EXIT_OK

        if args.command == "spectrum":
            table = runner.run_spectrum(
                args.profile, params, args.dmin, args.dmax, args.points,
                method=args.method, tol=args.tol,
                cutoff=_parse_cutoff(args.cutoff), margin=args.margin,
                taylor_order=_parse_taylor(args.taylor_order),
                workers=args.workers,
            )
            text = runner.spectrum_json(table) if args.format == "json" \
                else runner.spectrum_csv(table)
            _emit(text, args.out)
            return EXIT_NOT_CONVERGED if table.failed_rows else EXIT_OK

        if args.command == "bragg":
            table = runner.run_bragg_scan(
                params, args.dq_min, args.dq_max, args.points, tol=args.tol,
                cutoff=_parse_cutoff(args.cutoff), margin=args.margin,
                resonance=args.resonance_ref, workers=args.workers,
            )
            text = runner.bragg_json(table) if args.format == "json" \
                else runner.bragg_csv(table)
            _emit(text, args.out)
            return EXIT_NOT_CONVERGED if table.failed_rows else EXIT_OK

        if args.command == "dispersion":
            deltas = np.linspace(args.dmin, args.dmax, args.points)
            props = [bulk_propagator(args.momentum, float(d), params.density, params)
                     for d in deltas]
            metadata = {
                "schema": runner.SCHEMA_DISPERSION,
                **runner._params_metadata(params),
                "momentum": repr(args.momentum),
                "dmin": repr(args.dmin), "dmax": repr(args.dmax),
                "points": str(args.points),
                "kernel": kernels.backend_name(),
            }
            _emit(runner.dispersion_csv(
                deltas,
                [p.g_parallel for p in props],
                [p.g_perp for p in props],
                metadata,
            ), args.out)
            return EXIT_OK

        if args.command == "compare":
            if not args.out:
                print("error: compare requires --out BASEPATH", file=sys.stderr)
                return EXIT_INVALID
            pol = runner.run_spectrum(
                "uniform", params, args.dmin, args.dmax, args.points,
                method="polariton", tol=args.tol,
                cutoff=_parse_cutoff(args.cutoff), margin=args.margin,
                workers=args.workers,
            )
            mxw = runner.run_spectrum(
                "uniform", params, args.dmin, args.dmax, args.points,
                method="maxwell",
            )
            base = Path(args.out)
            suffix = ".json" if args.format == "json" else ".csv"
            towrite = runner.spectrum_json if args.format == "json" \
                else runner.spectrum_csv
            p_path = base.with_suffix(f".polariton{suffix}")
            m_path = base.with_suffix(f".maxwell{suffix}")
            p_path.write_text(towrite(pol))
            m_path.write_text(towrite(mxw))
            dt = float(np.max(np.abs(pol.T - mxw.T)))
            dr = float(np.max(np.abs(pol.R - mxw.R)))
            print(f"wrote {p_path} and {m_path}")
            print(f"max |T_polariton - T_maxwell| = {runner.fmt(dt)}")
            print(f"max |R_polariton - R_maxwell| = {runner.fmt(dr)}")
            return EXIT_NOT_CONVERGED if pol.failed_rows else EXIT_OK

        raise AssertionError(f"unhandled command {args.command}")
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
