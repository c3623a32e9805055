"""Command line front end: CSV in, fitted and complex-point statistics out.

Four commands: ``fit`` (trend coefficients and the variance factor at a real
point), ``complex-mean`` (the complex mean/variance of a sample with its
standard errors), ``zero-points`` (the covariate moments and the conjugate
zero-variance points), and ``simulate`` (seeded Monte-Carlo error moments).
Output is an aligned table by default or a single JSON document with
``--json``; diagnostics go to stderr.

Exit codes: 0 success, 2 input or parse errors, 3 degenerate mathematics.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import warnings
from dataclasses import dataclass
from decimal import ROUND_HALF_EVEN, Decimal
from math import isfinite
from typing import Optional

import numpy as np

from .kriging import (
    DegenerateDesign,
    EmptySample,
    Sample,
    TrendBasis,
    build_design,
    feature_vector,
    gls_beta,
    kriging_weights,
    predict,
    trend_variance,
)
from .moments import (
    DegenerateCovariates,
    complex_variance,
    index_moments,
    slope,
    zero_variance_points,
)
from .numerics import NotPositiveDefinite
from .validation import MonteCarloReport, SimulationConfig, SingularSystem, monte_carlo_mse

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_DEGENERATE = 3


class ParseError(ValueError):
    """CSV input failure, carrying the 1-based row and column of the offence."""

    def __init__(self, message: str, row: int, col: int):
        super().__init__(f"row {row}, column {col}: {message}")
        self.row = row
        self.col = col


@dataclass(frozen=True)
class CsvSample:
    """Two-column numeric CSV contents, row order preserved."""

    header: Optional[tuple]
    x: np.ndarray
    v: np.ndarray

    @property
    def n(self) -> int:
        return self.x.size


def _parse_cell(cell: str) -> float:
    value = float(cell)
    if not isfinite(value):
        raise ValueError(f"non-finite value {cell!r}")
    return value


def parse_csv(text: str) -> CsvSample:
    """Parse a two-column numeric CSV; a non-numeric first row is a header."""
    rows = [[cell.strip() for cell in row] for row in csv.reader(io.StringIO(text))]
    if not rows:
        raise ParseError("empty input", row=1, col=1)

    header = None
    first = rows[0]
    try:
        for cell in first:
            _parse_cell(cell)
    except ValueError:
        header = tuple(first)
        if len(header) != 2:
            raise ParseError(f"expected 2 columns, found {len(header)}", row=1, col=1)
        rows = rows[1:]

    xs, vs = [], []
    offset = 2 if header is not None else 1
    for i, row in enumerate(rows):
        if len(row) != 2:
            raise ParseError(f"expected 2 columns, found {len(row)}", row=i + offset, col=1)
        pair = []
        for j, cell in enumerate(row):
            try:
                pair.append(_parse_cell(cell))
            except ValueError:
                raise ParseError(f"not a number: {cell!r}", row=i + offset, col=j + 1) from None
        xs.append(pair[0])
        vs.append(pair[1])
    if not xs:
        raise ParseError("no data rows", row=offset, col=1)
    return CsvSample(header=header, x=np.asarray(xs), v=np.asarray(vs))


def render_one_decimal(value: float) -> str:
    """One-decimal rendering with round-half-even ties, e.g. 6.1454 -> '6.1'."""
    return str(Decimal(repr(float(value))).quantize(Decimal("0.1"), rounding=ROUND_HALF_EVEN))


def _complex_doc(z: complex) -> dict:
    return {"re": float(z.real), "im": float(z.imag)}


def _pair_doc(pair, branch: str) -> dict:
    doc = {}
    if branch in ("plus", "both"):
        doc["plus"] = _complex_doc(pair.plus)
    if branch in ("minus", "both"):
        doc["minus"] = _complex_doc(pair.minus)
    return doc


def _load_csv(path: str) -> CsvSample:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_csv(handle.read())


def _load_lambda(source: str, n: int):
    if source == "identity":
        return None
    with open(source, "r", encoding="utf-8") as handle:
        values = handle.read().split()
    if len(values) != n * n:
        raise ValueError(
            f"correlation file must hold {n}x{n} = {n * n} values, found {len(values)}"
        )
    try:
        lam = np.array([float(v) for v in values]).reshape(n, n)
    except ValueError as exc:
        raise ValueError(f"correlation file: {exc}") from None
    return lam


def cmd_fit(args) -> dict:
    data = _load_csv(args.file)
    basis = TrendBasis.constant() if args.basis == "constant" else TrendBasis.linear()
    lam = _load_lambda(args.lam, data.n)
    design = build_design(basis, data.x)
    beta = gls_beta(design, lam, data.v)

    outputs = {
        "beta_hat": [float(b) for b in beta],
        "rendered": {"beta_hat": [render_one_decimal(b) for b in beta]},
    }
    if args.at is not None:
        f = feature_vector(basis, args.at)
        solution = kriging_weights(design, lam, f)
        outputs["at"] = {
            "point": float(args.at),
            "variance_factor": _complex_doc(solution.variance_factor),
            "trend_variance": _complex_doc(trend_variance(solution, args.sigma2)),
            "prediction": _complex_doc(predict(solution, data.v)),
        }
    return {
        "command": "fit",
        "inputs": {
            "n": data.n,
            "basis": args.basis,
            "sigma2": float(args.sigma2),
            "lambda": "identity" if lam is None else "file",
            "at": None if args.at is None else float(args.at),
        },
        "outputs": outputs,
    }


def cmd_complex_mean(args) -> dict:
    data = _load_csv(args.file)
    sample = Sample(covariates=data.x, observations=data.v)
    stats = complex_variance(sample)
    points = zero_variance_points(data.x)
    branch = args.branch

    rendered = {
        "mean_re": render_one_decimal(stats.mean.plus.real),
        "real_standard_error": render_one_decimal(stats.real_se),
        "imaginary_standard_error": render_one_decimal(stats.imag_se),
    }
    if branch in ("plus", "both"):
        rendered["mean_im_plus"] = render_one_decimal(stats.mean.plus.imag)
    if branch in ("minus", "both"):
        rendered["mean_im_minus"] = render_one_decimal(stats.mean.minus.imag)

    mom = index_moments(data.x)
    return {
        "command": "complex-mean",
        "inputs": {"n": data.n, "basis": "linear", "branch": branch},
        "outputs": {
            "index_moments": {"m_n": mom.m_n, "m_sn": mom.m_sn, "sigma_n": mom.sigma_n},
            "zero_variance_points": _pair_doc(points, branch),
            "mean": _pair_doc(stats.mean, branch),
            "weighted_square": _pair_doc(stats.weighted_square, branch),
            "variance": _pair_doc(stats.variance, branch),
            "slope": slope(sample),
            "real_standard_error": stats.real_se,
            "imaginary_standard_error": stats.imag_se,
            "rendered": rendered,
        },
    }


def cmd_zero_points(args) -> dict:
    data = _load_csv(args.file)
    points = zero_variance_points(data.x)
    mom = index_moments(data.x)
    return {
        "command": "zero-points",
        "inputs": {"n": data.n},
        "outputs": {
            "m_n": mom.m_n,
            "m_sn": mom.m_sn,
            "sigma_n": mom.sigma_n,
            "points": _pair_doc(points, "both"),
            "rendered": {
                "m_n": render_one_decimal(mom.m_n),
                "m_sn": render_one_decimal(mom.m_sn),
                "sigma_n": render_one_decimal(mom.sigma_n),
            },
        },
    }


def cmd_simulate(args) -> dict:
    covariates = tuple(float(i) for i in range(1, args.n + 1))
    config = SimulationConfig(
        covariates=covariates,
        beta=(args.beta1, args.beta2),
        sigma=args.sigma,
        replicates=args.replicates,
        seed=args.seed,
        noise_kind=args.noise,
    )
    if args.at == "zero-variance":
        point = zero_variance_points(covariates).plus
    else:
        point = args.at
    report: MonteCarloReport = monte_carlo_mse(config, point)
    return {
        "command": "simulate",
        "inputs": {
            "n": args.n,
            "beta": [float(args.beta1), float(args.beta2)],
            "sigma": float(args.sigma),
            "replicates": args.replicates,
            "seed": args.seed,
            "noise": args.noise,
            "at": _complex_doc(point),
        },
        "outputs": {
            "mean_error_re": report.mean_error_re,
            "mean_error_im": report.mean_error_im,
            "var_re": report.var_re,
            "var_im": report.var_im,
            "cov_re_im": report.cov_re_im,
            "bilinear_mse": _complex_doc(report.bilinear_mse),
            "replicates_used": report.replicates_used,
            "rendered": {
                "var_re": render_one_decimal(report.var_re),
                "var_im": render_one_decimal(report.var_im),
            },
        },
    }


def _at_point(text: str):
    if text == "zero-variance":
        return text  # resolved per command against the covariates
    try:
        value = complex(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number or 'zero-variance': {text!r}")
    if not (isfinite(value.real) and isfinite(value.imag)):
        raise argparse.ArgumentTypeError("evaluation point must be finite")
    return value


def _real_point(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not isfinite(value):
        raise argparse.ArgumentTypeError("evaluation point must be finite")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ckrig",
        description="Kriging under white noise with polynomial trends, "
        "including the complex-point mean and variance estimators.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    fit = sub.add_parser("fit", help="trend coefficients and variance factor")
    fit.add_argument("file", help="two-column CSV of covariates and observations")
    fit.add_argument("--basis", choices=("constant", "linear"), default="linear")
    fit.add_argument("--sigma2", type=float, default=1.0, help="noise variance (default 1)")
    fit.add_argument(
        "--lambda",
        dest="lam",
        default="identity",
        help="'identity' or a file with a whitespace-separated n-by-n correlation matrix",
    )
    fit.add_argument("--at", type=_real_point, default=None, help="real evaluation point")
    fit.add_argument("--json", action="store_true")
    fit.set_defaults(handler=cmd_fit)

    cmean = sub.add_parser("complex-mean", help="complex mean, variance and standard errors")
    cmean.add_argument("file")
    cmean.add_argument("--branch", choices=("plus", "minus", "both"), default="both")
    cmean.add_argument("--json", action="store_true")
    cmean.set_defaults(handler=cmd_complex_mean)

    zero = sub.add_parser("zero-points", help="covariate moments and zero-variance points")
    zero.add_argument("file")
    zero.add_argument("--json", action="store_true")
    zero.set_defaults(handler=cmd_zero_points)

    sim = sub.add_parser("simulate", help="Monte-Carlo error moments of the predictor")
    sim.add_argument("--n", type=int, default=11, help="sample size; covariates are 1..n")
    sim.add_argument("--beta1", type=float, default=0.0, help="true intercept")
    sim.add_argument("--beta2", type=float, default=0.0, help="true slope")
    sim.add_argument("--sigma", type=float, default=1.0, help="noise standard deviation")
    sim.add_argument("--replicates", type=int, default=1000)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--noise", choices=("gaussian", "uniform"), default="gaussian")
    sim.add_argument(
        "--at",
        type=_at_point,
        default="zero-variance",
        help="evaluation point: a real/complex literal like '4.6' or '4.6+2.7j', "
        "or 'zero-variance' (default)",
    )
    sim.add_argument("--json", action="store_true")
    sim.set_defaults(handler=cmd_simulate)

    return parser


def _emit_table(doc: dict, stream) -> None:
    lines = []

    def walk(prefix: str, node) -> None:
        if isinstance(node, dict):
            for key, value in node.items():
                walk(f"{prefix}.{key}" if prefix else key, value)
        elif isinstance(node, list):
            lines.append((prefix, "[" + ", ".join(_scalar_text(v) for v in node) + "]"))
        else:
            lines.append((prefix, _scalar_text(node)))

    def _scalar_text(value) -> str:
        if isinstance(value, float):
            return repr(value)
        return str(value)

    walk("", doc)
    width = max(len(key) for key, _ in lines)
    for key, value in lines:
        print(f"{key.ljust(width)}  {value}", file=stream)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            doc = args.handler(args)
        doc["warnings"] = [str(w.message) for w in caught]
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (DegenerateDesign, DegenerateCovariates, NotPositiveDefinite, SingularSystem) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (OSError, UnicodeDecodeError, EmptySample, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT

    for message in doc["warnings"]:
        print(f"warning: {message}", file=sys.stderr)
    if args.json:
        print(json.dumps(doc, indent=2))
    else:
        _emit_table(doc, sys.stdout)
    return EXIT_OK


def entrypoint() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entrypoint()
