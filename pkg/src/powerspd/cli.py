"""Command-line front end.

Every run writes one JSON envelope on a single line to stdout and exits with
0 (ok), 2 (invalid input), 3 (out of validity) or 4 (numerical failure).
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import distance as dist
from . import geometry, means, metric, oracle
from .errors import InvalidInput, NotPositiveDefinite, NotSymmetric, NumericalFailure, OutOfValidity
from .geodesic import build_geodesic, geodesic_point
from .linalg import as_spd

EXIT = {"ok": 0, "invalid-input": 2, "out-of-validity": 3, "numerical-failure": 4}
EXTENDED_NOTE = "extended (uniqueness not asserted)"

TOL_RESIDUAL = 1e-6
TOL_SPEED = 1e-6
TOL_LENGTH = 1e-6
TOL_DET = 1e-10


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def read_matrix(path):
    """Load ``{"matrix": [[...], ...]}`` JSON, or plain CSV rows for ``.csv``."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InvalidInput(f"cannot read {path}: {exc.strerror}") from None
    try:
        if path.suffix.lower() == ".csv":
            rows = [[float(x) for x in row] for row in csv.reader(text.splitlines()) if row]
        else:
            rows = json.loads(text)["matrix"]
        M = np.array(rows, dtype=float)
    except (ValueError, KeyError, TypeError) as exc:
        raise InvalidInput(f"{path}: malformed matrix file ({exc})") from None
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.size == 0:
        raise InvalidInput(f"{path}: matrix must be square and non-empty")
    return M


def write_matrix(path, M):
    Path(path).write_text(json.dumps({"matrix": np.asarray(M).tolist()}) + "\n")


def _load_spd(path, label):
    M = read_matrix(path)
    try:
        return as_spd(M, label)
    except NotSymmetric:
        raise NotSymmetric(f"{label} ({path}): asymmetric matrix") from None
    except NotPositiveDefinite:
        raise NotPositiveDefinite(f"{label} ({path}): not positive definite") from None


def _clean(obj):
    """Non-finite floats become ``null`` so the envelope stays strict JSON."""
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


def cmd_mean(args):
    A, B = _load_spd(args.A, "A"), _load_spd(args.B, "B")
    diag = {}
    if args.method == "gbeta":
        if args.beta is None:
            raise InvalidInput("--beta is required for gbeta")
        desc = build_geodesic(A, B, args.beta)
        G = geodesic_point(desc, args.t)
        diag = {"gamma": desc.gamma, "sigma": desc.sigma, "branch": desc.branch.value}
        if desc.extended:
            diag["note"] = EXTENDED_NOTE
    else:
        if args.method in ("power-euclidean", "lim-palfia") and args.p is None:
            raise InvalidInput(f"--p is required for {args.method}")
        method = {
            "power-euclidean": lambda: means.PowerEuclidean(args.p),
            "lim-palfia": lambda: means.LimPalfia(args.p),
            "geometric": means.Geometric,
        }[args.method]()
        G = means.mean(means.MeanRequest(A, B, args.t, method))
    if args.output:
        write_matrix(args.output, G)
    return {"matrix": G.tolist()}, diag


def cmd_distance(args):
    A, B = _load_spd(args.A, "A"), _load_spd(args.B, "B")
    rep = dist.distance_beta(A, B, args.beta)
    out = {
        "d_beta": rep.d_beta,
        "gamma": rep.gamma,
        "logdet_A": rep.logdet_a,
        "logdet_B": rep.logdet_b,
    }
    if args.classical:
        out["delta"] = rep.delta
    return out, {"branch": rep.branch.value}


def cmd_gamma(args):
    A, B = _load_spd(args.A, "A"), _load_spd(args.B, "B")
    return {"gamma": geometry.gamma_beta(A, B, args.beta)}, {}


def cmd_bounds(args):
    A, B = _load_spd(args.A, "A"), _load_spd(args.B, "B")
    bb = geometry.beta_bounds(A, B)
    window = [bb.beta_hat_1, bb.beta_hat_2] if args.window == "pi" else [bb.beta_1, bb.beta_2]
    out = {
        "beta_1": bb.beta_1,
        "beta_2": bb.beta_2,
        "beta_hat_1": bb.beta_hat_1,
        "beta_hat_2": bb.beta_hat_2,
        "d": bb.d,
        "window": window,
    }
    return out, {"window": args.window}


def cmd_potential(args):
    X = _load_spd(args.X, "X")
    return {"potential": metric.potential(X, args.beta)}, {}


def cmd_verify(args):
    A, B = _load_spd(args.A, "A"), _load_spd(args.B, "B")
    desc = build_geodesic(A, B, args.beta)
    ts = np.linspace(0.0, 1.0, args.grid)
    h = args.fd_step

    residual = oracle.residual_check(desc, ts)
    speeds = np.array([dist.geodesic_speed(desc, t, h) for t in ts])
    mean_speed = float(speeds.mean())
    speed_dev = float(np.max(np.abs(speeds - mean_speed)) / mean_speed) if mean_speed > 0 else 0.0
    length = dist.curve_length(lambda t: geodesic_point(desc, t), desc.beta, h=h)
    ref = dist.geodesic_length(desc)
    length_err = abs(length - ref) / ref if ref > 0 else abs(length)
    det_err = max(dist.det_law_error(desc, t) for t in ts)

    checks = {
        "ode_residual": [residual, TOL_RESIDUAL],
        "speed_deviation": [speed_dev, TOL_SPEED],
        "length_error": [length_err, TOL_LENGTH],
        "det_law_error": [det_err, TOL_DET],
    }
    passed = {k: bool(v <= tol) for k, (v, tol) in checks.items()}
    out = {k: v for k, (v, _) in checks.items()}
    out["passed"] = passed
    out["length"] = length
    out["speed_squared_mean"] = mean_speed
    diag = {"gamma": desc.gamma, "sigma": desc.sigma, "branch": desc.branch.value}
    if desc.extended:
        diag["note"] = EXTENDED_NOTE
        diag["length_reference"] = "constant-speed length of the extended curve"
    else:
        diag["length_reference"] = "d_beta"
    if not all(passed.values()):
        raise _VerifyFailed(out, diag)
    return out, diag


class _VerifyFailed(Exception):
    def __init__(self, out, diag):
        super().__init__("verification tolerances exceeded")
        self.out, self.diag = out, diag


def build_parser():
    p = _Parser(prog="powerspd", description="Beta-power geometry on SPD matrices.")
    sub = p.add_subparsers(dest="command", required=True)

    def pair(sp):
        sp.add_argument("--A", required=True, help="matrix file for A")
        sp.add_argument("--B", required=True, help="matrix file for B")

    sp = sub.add_parser("mean", help="weighted mean of two matrices")
    pair(sp)
    sp.add_argument("--t", type=float, required=True)
    sp.add_argument(
        "--method", required=True, choices=["gbeta", "power-euclidean", "lim-palfia", "geometric"]
    )
    sp.add_argument("--beta", type=float)
    sp.add_argument("--p", type=float)
    sp.add_argument("--output", help="also write the mean to this matrix file")
    sp.set_defaults(func=cmd_mean)

    sp = sub.add_parser("distance", help="d_beta and related quantities")
    pair(sp)
    sp.add_argument("--beta", type=float, required=True)
    sp.add_argument("--classical", action="store_true", help="also report delta")
    sp.set_defaults(func=cmd_distance)

    sp = sub.add_parser("gamma", help="linear-independence angle gamma_beta")
    pair(sp)
    sp.add_argument("--beta", type=float, required=True)
    sp.set_defaults(func=cmd_gamma)

    sp = sub.add_parser("bounds", help="beta windows for gamma < pi/2 and gamma < pi")
    pair(sp)
    sp.add_argument("--window", choices=["pi", "pi2"], default="pi2")
    sp.set_defaults(func=cmd_bounds)

    sp = sub.add_parser("verify", help="check the closed-form geodesic numerically")
    pair(sp)
    sp.add_argument("--beta", type=float, required=True)
    sp.add_argument("--grid", type=int, default=11)
    sp.add_argument("--fd-step", type=float, default=1e-5)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("potential", help="beta-power potential of X")
    sp.add_argument("--X", required=True)
    sp.add_argument("--beta", type=float, required=True)
    sp.set_defaults(func=cmd_potential)
    return p


def _inputs(args):
    if args is None:
        return {}
    skip = {"func", "command"}
    return {k: v for k, v in vars(args).items() if k not in skip and v is not None}


def main(argv=None):
    parser = build_parser()
    args = None
    outputs, diag, message = {}, {}, None
    try:
        args = parser.parse_args(argv)
        if getattr(args, "grid", 2) < 2:
            raise InvalidInput("--grid must be at least 2")
        outputs, diag = args.func(args)
        status = "ok"
    except _UsageError as exc:
        status, message = "invalid-input", str(exc)
        parser.print_usage(sys.stderr)
    except _VerifyFailed as exc:
        status, message, outputs, diag = "numerical-failure", str(exc), exc.out, exc.diag
    except InvalidInput as exc:
        status, message = "invalid-input", str(exc)
    except OutOfValidity as exc:
        status, message = "out-of-validity", str(exc)
    except NumericalFailure as exc:
        status, message = "numerical-failure", str(exc)
    except Exception as exc:  # noqa: BLE001 - exit-code contract is exhaustive
        status, message = "numerical-failure", f"{type(exc).__name__}: {exc}"

    envelope = {
        "operation": getattr(args, "command", None),
        "inputs": _inputs(args),
        "outputs": outputs,
        "diagnostics": diag,
        "status": status,
    }
    if message:
        envelope["message"] = message
        print(f"powerspd: {status}: {message}", file=sys.stderr)
    sys.stdout.write(json.dumps(_clean(envelope), allow_nan=False) + "\n")
    return EXIT[status]


if __name__ == "__main__":
    sys.exit(main())
