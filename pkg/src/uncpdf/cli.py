"""Command-line interface: ``uncpdf {pdf,region,min,verify,figures} ...``."""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import io as uio
from .errors import UncertaintyError, UnsupportedDimension
from .figures import FIGURES, figure_data
from .mc_verify import SUITE, run_suite
from .observables import HermitianObservable, QubitObservable, Spectrum, bloch_gram, spectrum_of
from .pdf_analytic import (
    Density2D,
    Pdf1D,
    collinear_uncertainties_qubit2,
    describe,
    joint_exp_exp2_d4,
    joint_exp_exp2_qutrit,
    joint_exp_std_d4,
    joint_exp_std_qutrit,
    joint_expectations_qubit2,
    joint_expectations_qubit3,
    joint_uncertainties_qubit2,
    pdf_expectation,
    pdf_uncertainty,
    support_regions,
    uncertainty_surface_qubit3,
)
from .regions import (
    Objective,
    minimize,
    minimize_heuristic,
    qubit_pair_contains,
    qubit_triple_contains,
    supercube_bound,
)

PDF_KINDS = ("expectation", "uncertainty", "joint-exp", "joint-unc", "exp-exp2", "exp-std")
OBJECTIVES = {"sum-sq": "sum_of_variances", "sum": "sum_of_stddevs"}


class _ObsAction(argparse.Action):
    """Collect ``--obs/--spectrum/--qubit`` into one ordered list."""

    def __call__(self, parser, namespace, values, option_string=None):
        items = list(getattr(namespace, "observables", None) or [])
        try:
            if option_string == "--obs":
                items.extend(uio.load_observables(values))
            elif option_string == "--spectrum":
                items.append(Spectrum([float(v) for v in values.split(",")]))
            else:
                parts = [float(v) for v in values.split(",")]
                if len(parts) != 4:
                    raise ValueError("--qubit takes a0,ax,ay,az")
                items.append(QubitObservable(parts[0], parts[1:]))
        except (OSError, ValueError) as exc:
            parser.error(f"{option_string}: {exc}")
        namespace.observables = items


def _add_obs(p: argparse.ArgumentParser) -> None:
    p.add_argument("--obs", action=_ObsAction, metavar="FILE", help="JSON observable file (repeatable)")
    p.add_argument("--spectrum", action=_ObsAction, metavar="a,b,c", help="observable given by its eigenvalues")
    p.add_argument("--qubit", action=_ObsAction, metavar="a0,ax,ay,az", help="qubit observable a0 + a.sigma")
    p.set_defaults(observables=[])


def _threads_default() -> int:
    env = os.environ.get("UNC_PDF_THREADS", "")
    return int(env) if env.isdigit() and int(env) > 0 else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="uncpdf", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pdf", help="evaluate a density on a grid (CSV) or describe a singular law (JSON)")
    p.add_argument("kind", choices=PDF_KINDS)
    _add_obs(p)
    p.add_argument("--grid", help="lo:hi:n[,lo:hi:n]; defaults to the support box")
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("region", help="uncertainty-region queries")
    p.add_argument("action", choices=("min", "contains", "supercube", "boundary"))
    _add_obs(p)
    p.add_argument("--objective", choices=tuple(OBJECTIVES), default="sum-sq")
    p.add_argument("--point", help="x,y[,z] uncertainties, or r,x for a single spectrum")
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--points-per-arc", type=int, default=200)
    p.add_argument("--restarts", type=int, default=16)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")

    p = sub.add_parser("min", help="shorthand for 'region min'")
    _add_obs(p)
    p.add_argument("--objective", choices=tuple(OBJECTIVES), default="sum-sq")
    p.add_argument("--restarts", type=int, default=16)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")

    p = sub.add_parser("verify", help="Monte Carlo verification suite")
    p.add_argument("--suite", default="default")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--n", type=int, default=None, help="samples per check (default per check kind)")
    p.add_argument("--workers", type=int, default=None, help="sampler streams (default UNC_PDF_THREADS or 1)")
    p.add_argument("--out")

    p = sub.add_parser("figures", help="curve data for the support and density figures")
    p.add_argument("which", choices=FIGURES + ("all",))
    p.add_argument("--n", type=int, default=2000, help="points per curve")
    p.add_argument("--out-dir", help="write <fig>.csv and <fig>.json here (default: CSV to stdout)")
    return parser


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)


def _as_qubit(obs) -> QubitObservable:
    if isinstance(obs, QubitObservable):
        return obs
    if isinstance(obs, HermitianObservable) and obs.dim == 2:
        return QubitObservable.from_matrix(obs.matrix)
    raise UnsupportedDimension("joint densities of several observables are available for qubits only")


def _spectrum(obs) -> Spectrum:
    return obs if isinstance(obs, Spectrum) else spectrum_of(obs)


def _grid_axes(args, bbox) -> list[np.ndarray]:
    if args.grid:
        axes = uio.parse_grid(args.grid)
    else:
        axes = [(lo, hi, 201) for lo, hi in bbox]
    if len(axes) != len(bbox):
        raise ValueError(f"grid needs {len(bbox)} axis spec(s)")
    return [np.linspace(lo, hi, n) for lo, hi, n in axes]


def _pdf_csv(dist, args, names) -> str:
    if isinstance(dist, Pdf1D):
        (xs,) = _grid_axes(args, [(dist.lower, dist.upper)])
        return uio.csv_text((names[0], "f"), zip(xs, np.atleast_1d(dist(xs))))
    us, vs = _grid_axes(args, list(dist.bbox))
    U, V = np.meshgrid(us, vs, indexing="ij")
    F = np.asarray(dist(U, V), dtype=float)
    return uio.csv_text((names[0], names[1], "f"), zip(U.ravel(), V.ravel(), F.ravel()))


def _singular_output(dist, args) -> int:
    info = describe(dist)
    profile = getattr(dist, "profile", None)
    if profile is not None and args.out:
        profile_path = str(Path(args.out).with_suffix("")) + ".profile.csv"
        names = ("x",) if dist.derived else ("r",)
        if isinstance(profile, Density2D):
            names = ("r", "s")
        Path(profile_path).write_text(_pdf_csv(profile, argparse.Namespace(grid=None), names), encoding="utf-8")
        info["profile_csv"] = profile_path
    _emit(json.dumps(info, indent=2) + "\n", args.out)
    return 0


def cmd_pdf(args) -> int:
    obs = args.observables
    if not obs:
        raise ValueError("pdf needs at least one observable")
    kind = args.kind
    if kind == "expectation":
        dist, names = pdf_expectation(_spectrum(obs[0])), ("r",)
    elif kind == "uncertainty":
        dist, names = pdf_uncertainty(_spectrum(obs[0])), ("x",)
    elif kind in ("exp-exp2", "exp-std"):
        spec = _spectrum(obs[0])
        table = {
            ("exp-exp2", 3): (joint_exp_exp2_qutrit, ("r", "s")),
            ("exp-exp2", 4): (joint_exp_exp2_d4, ("r", "s")),
            ("exp-std", 3): (joint_exp_std_qutrit, ("r", "x")),
            ("exp-std", 4): (joint_exp_std_d4, ("r", "x")),
        }
        if (kind, spec.dim) not in table:
            raise UnsupportedDimension(f"{kind} densities are available for d = 3 and d = 4; got d = {spec.dim}")
        fn, names = table[kind, spec.dim]
        dist = fn(spec)
    else:
        qubits = [_as_qubit(o) for o in obs]
        if len(qubits) not in (2, 3):
            raise ValueError(f"{kind} needs two or three qubit observables")
        if kind == "joint-exp":
            dist = joint_expectations_qubit2(*qubits) if len(qubits) == 2 else joint_expectations_qubit3(*qubits)
            names = ("r", "s")
        elif len(qubits) == 2:
            if bloch_gram(qubits).numerical_rank < 2:
                dist = collinear_uncertainties_qubit2(*qubits)
            else:
                dist = joint_uncertainties_qubit2(*qubits)
            names = ("x", "y")
        else:
            surface = uncertainty_surface_qubit3(*qubits)
            _emit(json.dumps(surface.describe(), indent=2) + "\n", args.out)
            return 0
    if not isinstance(dist, (Pdf1D, Density2D)):
        return _singular_output(dist, args)
    if args.format == "json":
        info = describe(dist)
        info.update({"support_box": [list(b) for b in getattr(dist, "bbox", [(dist.lower, dist.upper)])]})
        if isinstance(dist, Pdf1D):
            info["breakpoints"] = list(dist.breakpoints)
        _emit(json.dumps(info, indent=2) + "\n", args.out)
        return 0
    _emit(_pdf_csv(dist, args, names), args.out)
    return 0


def _point(args, k: int) -> list[float]:
    if not args.point:
        raise ValueError("--point is required")
    vals = [float(v) for v in args.point.split(",")]
    if len(vals) != k:
        raise ValueError(f"--point needs {k} values")
    return vals


def _minimize(args) -> int:
    obj = Objective(OBJECTIVES[args.objective])
    obs = args.observables
    if not obs:
        raise ValueError("min needs observables")
    if all(isinstance(o, QubitObservable) or (isinstance(o, HermitianObservable) and o.dim == 2) for o in obs):
        res = minimize(obj, [_as_qubit(o) for o in obs])
    else:
        mats = [np.diag(o.values) if isinstance(o, Spectrum) else o.matrix for o in obs]
        res = minimize_heuristic(obj, mats, restarts=args.restarts, seed=args.seed)
    _emit(json.dumps(res.to_dict(), indent=2) + "\n", args.out)
    return 0


def cmd_region(args) -> int:
    obs = args.observables
    if args.action == "min":
        return _minimize(args)
    if args.action == "supercube":
        bounds = supercube_bound([_spectrum(o) for o in obs])
        _emit(json.dumps({"intervals": [list(b) for b in bounds]}, indent=2) + "\n", args.out)
        return 0
    if args.action == "boundary":
        region = support_regions(_spectrum(obs[0]))
        curves = region.boundary(args.points_per_arc)
        labels = ["outer"] + [f"lower_{k + 1}{k + 2}" for k in range(len(curves) - 1)]
        rows = [(lab, r, x) for lab, poly in zip(labels, curves) for r, x in poly]
        _emit(uio.csv_text(("curve", "r", "x"), rows), args.out)
        return 0
    # contains
    if len(obs) == 1:
        r, x = _point(args, 2)
        inside = bool(support_regions(_spectrum(obs[0])).contains_rx(r, x, args.tol))
    elif len(obs) == 2:
        x, y = _point(args, 2)
        inside = qubit_pair_contains(*[_as_qubit(o) for o in obs], x, y, args.tol)
    elif len(obs) == 3:
        x, y, z = _point(args, 3)
        inside = qubit_triple_contains(*[_as_qubit(o) for o in obs], x, y, z, args.tol)
    else:
        raise ValueError("contains takes one spectrum or two/three qubit observables")
    _emit(json.dumps({"inside": inside}) + "\n", args.out)
    return 0


def cmd_verify(args, parser) -> int:
    if args.suite != "default" and args.suite not in SUITE:
        parser.error(f"unknown suite {args.suite!r}; choose 'default' or one of: {', '.join(SUITE)}")
    workers = args.workers or _threads_default()
    reports = run_suite(args.suite, seed=args.seed, n=args.n, n_workers=workers)
    for r in reports:
        print(r.line(), file=sys.stderr)
    _emit(json.dumps([r.to_dict() for r in reports], indent=2) + "\n", args.out)
    return 0 if all(r.passed for r in reports) else 1


def cmd_figures(args) -> int:
    names = FIGURES if args.which == "all" else (args.which,)
    if args.out_dir:
        Path(args.out_dir).mkdir(parents=True, exist_ok=True)
    for name in names:
        fig = figure_data(name, args.n)
        text = uio.csv_text(fig.header, fig.rows)
        if args.out_dir:
            base = Path(args.out_dir) / name
            base.with_suffix(".csv").write_text(text, encoding="utf-8", newline="\n")
            base.with_suffix(".json").write_text(json.dumps(fig.meta, indent=2) + "\n", encoding="utf-8")
        else:
            sys.stdout.write(text)
    return 0


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "pdf":
            return cmd_pdf(args)
        if args.command == "region":
            return cmd_region(args)
        if args.command == "min":
            return _minimize(args)
        if args.command == "verify":
            return cmd_verify(args, parser)
        return cmd_figures(args)
    except (UncertaintyError, ValueError, KeyError) as exc:
        print(f"uncpdf: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
