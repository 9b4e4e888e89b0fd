"""Command-line front end.

Subcommands: exponents, classify, shoot, spectrum, transform, sweep.
Every command prints a JSON report envelope on stdout (or a flat CSV with
--format csv); shoot additionally writes its solution table to --out, and
sweep emits a CSV matrix.  Exit codes: 0 success, 2 invalid input,
3 numerical failure.

Outputs are deterministic: identical inputs with the same tool version
produce byte-identical bytes.  The envelope's timestamp is therefore null
unless the SOURCE_DATE_EPOCH convention supplies a fixed value.
Infinite critical powers serialize as the string "infinity" in JSON and
as an empty cell in CSV.

Sweep configuration is a flat key-value text file, one ``key = value``
per line, ``#`` for comments.  Values may be a scalar, a comma list
(``0,0.5,1``), or ``start:stop:count`` for an inclusive linear range.
Keys for ``mode = exponents``: nprime, tau.  Keys for ``mode =
spectrum``: N, theta, l, p, a, b, n.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

from . import __version__
from .errors import EmdenlabError, InvalidParameterError, NumericalError
from .grids import RadialGrid
from .params import (
    ProblemParams,
    SchrodingerParams,
    classify_p,
    critical_exponents,
    derive,
    f_eval,
    hardy_constant,
)
from .radial_ode import shoot, v_infinity
from .stability import radial_morse_index
from .transforms import (
    TransformKind,
    dual_params,
    kelvin_params,
    sigma_inverse,
    sigma_params,
)

INFINITY_TOKEN = "infinity"


def _jsonable(x):
    if x is None or isinstance(x, (bool, int, str)):
        return x
    if isinstance(x, float):
        return x
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if hasattr(x, "tolist"):
        return _jsonable(x.tolist())
    if hasattr(x, "value"):
        return x.value
    return float(x)


def _or_infinity(x):
    return INFINITY_TOKEN if x is None else x


def _timestamp():
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    return int(epoch) if epoch is not None else None


def _envelope(command: str, inputs: dict, derived: dict | None, results: dict) -> dict:
    return {
        "tool": "emdenlab",
        "version": __version__,
        "command": command,
        "inputs": _jsonable(inputs),
        "derived": _jsonable(derived) if derived is not None else None,
        "results": _jsonable(results),
        "timestamp": _timestamp(),
    }


def _emit(envelope: dict, fmt: str, out: str | None):
    if fmt == "json":
        text = json.dumps(envelope, sort_keys=True, indent=2) + "\n"
    else:
        text = _flatten_csv(envelope)
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _flatten_csv(envelope: dict) -> str:
    flat: dict[str, object] = {}

    def walk(prefix, obj):
        for key in sorted(obj):
            value = obj[key]
            name = f"{prefix}{key}"
            if isinstance(value, dict):
                walk(f"{name}.", value)
            elif isinstance(value, list):
                flat[name] = ";".join(_csv_cell(v) for v in value)
            else:
                flat[name] = value

    walk("", envelope)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    keys = sorted(flat)
    writer.writerow(keys)
    writer.writerow([_csv_cell(flat[k]) for k in keys])
    return buf.getvalue()


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _derived_block(params: ProblemParams, with_p: bool = True) -> dict:
    ind = derive(params)
    return {
        "n_prime": ind.n_prime,
        "tau": ind.tau,
        "m_exp": ind.m_exp if with_p else None,
        "serrin": ind.serrin,
        "sobolev": ind.sobolev,
        "c0": ind.c0 if with_p else None,
        "standard_regime": params.standard_regime,
    }


def _problem_params(args) -> ProblemParams:
    if args.N is None or args.theta is None or args.l is None:
        raise InvalidParameterError("--N, --theta and --l are required")
    p = args.p if getattr(args, "p", None) is not None else 2.0
    return ProblemParams(N=args.N, theta=args.theta, l=args.l, p=p)


def cmd_exponents(args) -> dict:
    has_p = args.p is not None
    params = ProblemParams(args.N, args.theta, args.l, args.p if has_p else 2.0)
    if not params.standard_regime:
        raise InvalidParameterError(
            "exponent report requires the standard regime N + theta > 2, l - theta > -2"
        )
    ind = derive(params)
    exps = critical_exponents(ind.n_prime, ind.tau)
    results = {
        "serrin": ind.serrin,
        "sobolev": ind.sobolev,
        "p_tilde_c": exps.p_tilde_c,
        "p_minus": exps.p_minus,
        "p_plus": exps.p_plus,
        "p_c": _or_infinity(exps.p_c),
        "hardy_level": hardy_constant(ind.n_prime),
        "quadratic_coeffs": list(exps.quadratic_coeffs),
    }
    inputs = {"N": args.N, "theta": args.theta, "l": args.l, "p": args.p}
    if has_p:
        cls = classify_p(params)
        results["c0"] = ind.c0
        results["f_p"] = f_eval(params.p, ind.n_prime, ind.tau)
        results["regime"] = cls.label.value
        results["condition_weight_balance"] = cls.condition_weight_balance
    return _envelope("exponents", inputs, _derived_block(params, with_p=has_p), results)


def cmd_classify(args) -> dict:
    if args.p is None:
        raise InvalidParameterError("--p is required for classify")
    params = _problem_params(args)
    cls = classify_p(params)
    results = {
        "regime": cls.label.value,
        "condition_weight_balance": cls.condition_weight_balance,
        "p_c_weighted": _or_infinity(cls.p_c_weighted),
        "p_c_dimension": _or_infinity(cls.p_c_dimension),
        "removability_upper": _or_infinity(cls.removability_upper),
        "removability_applies": cls.removability_applies,
    }
    inputs = {"N": args.N, "theta": args.theta, "l": args.l, "p": args.p}
    return _envelope("classify", inputs, _derived_block(params), results)


def cmd_shoot(args) -> dict:
    if args.p is None:
        raise InvalidParameterError("--p is required for shoot")
    params = _problem_params(args)
    result = shoot(
        params,
        kappa=args.kappa,
        r_max=args.rmax,
        tol=args.tol,
        r_min=args.rmin,
        points_per_decade=args.points_per_decade,
    )
    ind = derive(params)
    grid = result.solution.grid
    if args.out:
        scaled = result.solution.values * grid.points**ind.m_exp
        with open(args.out, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["r", "v", "scaled"])
            for r, v, s in zip(grid.points, result.solution.values, scaled):
                writer.writerow([repr(float(r)), repr(float(v)), repr(float(s))])
    results = {
        "kappa": result.kappa,
        "r_min": grid.r_min,
        "r_max": grid.r_max,
        "n_points": grid.n,
        "asymptotic_constant": result.asymptotic_constant,
        "converged": result.converged,
        "classification": result.classification.value,
        "ordering_vs_singular": result.ordering_vs_singular.value,
        "c0": ind.c0,
        "csv": args.out,
    }
    inputs = {
        "N": args.N,
        "theta": args.theta,
        "l": args.l,
        "p": args.p,
        "kappa": args.kappa,
        "rmax": args.rmax,
        "rmin": args.rmin,
        "tol": args.tol,
    }
    return _envelope("shoot", inputs, _derived_block(params), results)


def cmd_spectrum(args) -> dict:
    if args.p is None:
        raise InvalidParameterError("--p is required for spectrum")
    params = _problem_params(args)
    profile = args.profile
    if profile == "v_infinity":
        pad = 1.0 + 1e-9
        grid = RadialGrid.logspaced(args.a / pad, args.b * pad, max(args.n, 256))
        v = v_infinity(params, grid)
    elif profile.startswith("shoot:"):
        kappa = float(profile.split(":", 1)[1])
        result = shoot(params, kappa=kappa, r_max=args.b * 2.0, tol=args.tol)
        v = result.solution
    else:
        raise InvalidParameterError(
            "profile must be 'v_infinity' or 'shoot:<kappa>'"
        )
    report = radial_morse_index(params, v, args.a, args.b, args.n)
    results = {
        "a": args.a,
        "b": args.b,
        "n": args.n,
        "profile": profile,
        "negative_count": report.negative_count,
        "min_eigenvalue": report.min_eigenvalue,
        "negative_tol": report.negative_tol,
        "eigenvalues": list(report.eigenvalues),
    }
    inputs = {
        "N": args.N,
        "theta": args.theta,
        "l": args.l,
        "p": args.p,
        "profile": profile,
        "a": args.a,
        "b": args.b,
        "n": args.n,
    }
    return _envelope("spectrum", inputs, _derived_block(params), results)


def cmd_transform(args) -> dict:
    kind = TransformKind(args.kind)
    if kind is TransformKind.SIGMA:
        if args.alpha is None or args.ell is None or args.p is None:
            raise InvalidParameterError("sigma transform needs --N, --alpha, --ell, --p")
        sp = SchrodingerParams(N=args.N, alpha=args.alpha, ell=args.ell, p=args.p)
        image = sigma_params(sp).params
        inputs = {"kind": args.kind, "N": args.N, "alpha": args.alpha, "ell": args.ell, "p": args.p}
        checks = {
            "sigma": sp.sigma,
            "sigma_quadratic_residual": sp.sigma**2 - (sp.N - 2.0) * sp.sigma + sp.ell,
        }
        derived = None
    else:
        params = _problem_params(args)
        inputs = {"kind": args.kind, "N": args.N, "theta": args.theta, "l": args.l, "p": args.p}
        derived = _derived_block(params)
        if kind is TransformKind.KELVIN:
            image = kelvin_params(params).params
            checks = {
                "tau_image": image.l - image.theta,
                "tau_image_above_minus2": (image.l - image.theta) > -2.0,
            }
        elif kind is TransformKind.DUAL:
            image = dual_params(params).params
            checks = {
                "n_prime_sum": params.n_prime + image.n_prime,
                "tau_sum": params.tau + image.tau,
            }
        elif kind is TransformKind.SIGMA_INVERSE:
            sp = sigma_inverse(params)
            results = {
                "schrodinger": {"N": sp.N, "alpha": sp.alpha, "ell": sp.ell, "p": sp.p},
                "identity_checks": {"sigma": sp.sigma},
            }
            return _envelope("transform", inputs, derived, results)
        else:
            raise InvalidParameterError(f"unsupported transform kind {args.kind}")
    results = {
        "image": {"N": image.N, "theta": image.theta, "l": image.l, "p": image.p},
        "image_n_prime": image.n_prime,
        "image_tau": image.tau,
        "image_standard_regime": image.standard_regime,
        "identity_checks": checks,
    }
    return _envelope("transform", inputs, derived, results)


def _parse_values(text: str) -> list[float]:
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise InvalidParameterError(f"range must be start:stop:count, got {text!r}")
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        if count < 0:
            raise InvalidParameterError("range count must be >= 0")
        if count == 0:
            return []
        if count == 1:
            return [start]
        step = (stop - start) / (count - 1)
        return [start + i * step for i in range(count)]
    if "," in text:
        return [float(v) for v in text.split(",") if v.strip()]
    return [float(text)]


def _read_config(path: str) -> dict[str, str]:
    config: dict[str, str] = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise InvalidParameterError(
                    f"{path}:{lineno}: expected 'key = value', got {raw.rstrip()!r}"
                )
            key, value = line.split("=", 1)
            config[key.strip()] = value.strip()
    return config


def cmd_sweep(args) -> str:
    config = _read_config(args.config)
    mode = config.get("mode", "exponents")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if mode == "exponents":
        writer.writerow(["n_prime", "tau", "serrin", "sobolev", "p_tilde_c", "p_c", "error"])
        nprimes = _parse_values(config["nprime"]) if config.get("nprime") else []
        taus = _parse_values(config["tau"]) if config.get("tau") else []
        for n_prime in nprimes:
            for tau in taus:
                row: list[str] = [repr(float(n_prime)), repr(float(tau))]
                try:
                    exps = critical_exponents(n_prime, tau)
                    serrin = (n_prime + tau) / (n_prime - 2.0)
                    sobolev = (n_prime + 2.0 + 2.0 * tau) / (n_prime - 2.0)
                    row += [
                        repr(serrin),
                        repr(sobolev),
                        repr(exps.p_tilde_c),
                        "" if exps.p_c is None else repr(exps.p_c),
                        "",
                    ]
                except EmdenlabError as exc:
                    row += ["", "", "", "", str(exc)]
                writer.writerow(row)
    elif mode == "spectrum":
        writer.writerow(["N", "theta", "l", "p", "f_p", "hardy_level", "negative_count", "min_eigenvalue", "error"])
        N = int(float(config["N"]))
        theta = float(config["theta"])
        l = float(config["l"])
        a = float(config.get("a", 1e-3))
        b = float(config.get("b", 1e3))
        n = int(float(config.get("n", 2000)))
        p_values = _parse_values(config["p"]) if config.get("p") else []
        for p in p_values:
            row = [str(N), repr(theta), repr(l), repr(float(p))]
            try:
                params = ProblemParams(N=N, theta=theta, l=l, p=p)
                ind = derive(params)
                pad = 1.0 + 1e-9
                grid = RadialGrid.logspaced(a / pad, b * pad, max(n, 256))
                v = v_infinity(params, grid)
                report = radial_morse_index(params, v, a, b, n)
                row += [
                    repr(f_eval(p, ind.n_prime, ind.tau)),
                    repr(hardy_constant(ind.n_prime)),
                    str(report.negative_count),
                    repr(report.min_eigenvalue),
                    "",
                ]
            except EmdenlabError as exc:
                row += ["", "", "", "", str(exc)]
            writer.writerow(row)
    else:
        raise InvalidParameterError(f"unknown sweep mode {mode!r}")
    text = buf.getvalue()
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return text


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="emdenlab",
        description="Critical exponents, radial profiles and stability spectra "
        "of the weighted Lane-Emden equation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, with_p=True):
        p.add_argument("--N", type=int, default=None, help="space dimension (integer >= 2)")
        p.add_argument("--theta", type=float, default=None, help="gradient weight exponent")
        p.add_argument("--l", type=float, default=None, help="nonlinearity weight exponent")
        if with_p:
            p.add_argument("--p", type=float, default=None, help="nonlinearity power (> 1)")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--out", default=None, help="optional output path")

    p_exp = sub.add_parser("exponents", help="critical exponent report")
    add_common(p_exp)
    p_exp.set_defaults(fn=cmd_exponents)

    p_cls = sub.add_parser("classify", help="regime classification of p")
    add_common(p_cls)
    p_cls.set_defaults(fn=cmd_classify)

    p_shoot = sub.add_parser("shoot", help="radial shooting run")
    add_common(p_shoot)
    p_shoot.add_argument("--kappa", type=float, default=1.0, help="initial value at the origin")
    p_shoot.add_argument("--rmax", type=float, default=1e6)
    p_shoot.add_argument("--rmin", type=float, default=None)
    p_shoot.add_argument("--tol", type=float, default=1e-10)
    p_shoot.add_argument("--points-per-decade", type=int, default=128)
    p_shoot.set_defaults(fn=cmd_shoot)

    p_spec = sub.add_parser("spectrum", help="stability spectrum on an annulus")
    add_common(p_spec)
    p_spec.add_argument("--profile", default="v_infinity", help="v_infinity or shoot:<kappa>")
    p_spec.add_argument("--a", type=float, default=1e-3)
    p_spec.add_argument("--b", type=float, default=1e3)
    p_spec.add_argument("--n", type=int, default=2000)
    p_spec.add_argument("--tol", type=float, default=1e-10)
    p_spec.set_defaults(fn=cmd_spectrum)

    p_tr = sub.add_parser("transform", help="parameter-level transform")
    p_tr.add_argument("--kind", required=True, choices=[k.value for k in TransformKind])
    add_common(p_tr)
    p_tr.add_argument("--alpha", type=float, default=None)
    p_tr.add_argument("--ell", type=float, default=None)
    p_tr.set_defaults(fn=cmd_transform)

    p_sw = sub.add_parser("sweep", help="CSV sweep from a config file")
    p_sw.add_argument("--config", required=True)
    p_sw.add_argument("--out", default=None)
    p_sw.set_defaults(fn=cmd_sweep)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "sweep":
            cmd_sweep(args)
        else:
            envelope = args.fn(args)
            # shoot reserves --out for its solution table; its envelope
            # always goes to stdout
            out = None if args.command == "shoot" else args.out
            _emit(envelope, args.format, out)
    except InvalidParameterError as exc:
        sys.stdout.write(
            json.dumps(
                {"error": {"type": "invalid_input", "message": str(exc)}},
                sort_keys=True,
            )
            + "\n"
        )
        return 2
    except NumericalError as exc:
        sys.stdout.write(
            json.dumps(
                {"error": {"type": "numerical_failure", "message": str(exc)}},
                sort_keys=True,
            )
            + "\n"
        )
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
