"""Command-line entry point.

Exit codes: 0 success, 1 usage or schema error, 2 failed check or reconstruction.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import io
from .classical import (
    ClassicalSystem,
    classical_derivatives,
    classical_normalize,
    classical_reconstruct,
    finite_difference_derivatives,
    hidden_scale,
    trajectory,
)
from .dynamics import (
    TwoQubitState,
    fit_polynomial,
    fit_taylor,
    map_snapshot,
    mean_taylor,
    mean_trajectory,
    taylor_maps,
)
from .errors import TwoQubitError
from .example import closed_form_trajectory
from .hamiltonian import CanonicalHamiltonian, from_dict, random_canonical, sign_partner
from .parity import check_color_algebra, verify_parity_series, verify_spectrum_gap
from .reconstruction import DEFAULT_EPS, reconstruct
from .state_recovery import flip_state, recover_environment, subtract_sigma_part

EXIT_OK, EXIT_USAGE, EXIT_FAILED = 0, 1, 2


class UsageError(Exception):
    pass


def _load_config(args) -> dict:
    if args.config is None:
        return {}
    try:
        cfg = io.load_json(args.config)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {args.config}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise UsageError("config must be a JSON object")
    return cfg


def _hamiltonian(cfg: dict, base: Path):
    record = cfg.get("hamiltonian")
    if record is None:
        raise UsageError("config needs a 'hamiltonian' record")
    if isinstance(record, str):
        record = io.load_json(base / record)
    try:
        return from_dict(record)
    except (ValueError, TypeError) as exc:
        raise UsageError(f"bad Hamiltonian record: {exc}") from exc


def _state(cfg: dict) -> TwoQubitState | None:
    if "state" not in cfg:
        return None
    try:
        return io.state_from_dict(cfg["state"])
    except (ValueError, TypeError) as exc:
        raise UsageError(f"bad state record: {exc}") from exc


def _base(args) -> Path:
    return Path(args.config).parent if args.config else Path(".")


# --- simulate -----------------------------------------------------------------


def cmd_simulate(args) -> int:
    cfg = _load_config(args)
    h = _hamiltonian(cfg, _base(args))
    state = _state(cfg)
    t_max = float(cfg.get("t_max", 2.0))
    n_points = int(cfg.get("n_points", 101))
    if n_points < 2 or t_max <= 0:
        raise UsageError("need t_max > 0 and n_points >= 2")
    times = np.linspace(0.0, t_max, n_points)
    out = Path(args.out)
    io.write_map_csv(out / "maps.csv", [map_snapshot(h, t) for t in times])
    files = ["maps.csv"]
    if state is not None:
        io.write_mean_csv(out / "means.csv", times, mean_trajectory(h, state, times))
        files.append("means.csv")
    io.write_json(out / "simulate.json", {"seed": args.seed, "t_max": t_max, "n_points": n_points, "files": files})
    print(f"wrote {', '.join(files)} to {out}")
    return EXIT_OK


# --- reconstruct --------------------------------------------------------------


def _environment(report, observed_means, sigma, order):
    """Environment estimate under each candidate from aligned mean-value coefficients."""
    r = report.frame_r
    means = observed_means @ r.T
    out = {}
    for name, cand in (("plus", report.candidate_plus), ("minus", report.candidate_minus)):
        u = taylor_maps(cand, order).u
        observed = subtract_sigma_part(means, u, r @ sigma)
        out[name] = recover_environment(cand, observed).to_dict()
    return out


def cmd_reconstruct(args) -> int:
    cfg = _load_config(args)
    base = _base(args)
    order = args.order if args.order is not None else int(cfg.get("order", 4))
    env_order = max(order, 4)
    state = _state(cfg)

    if args.mode == "exact":
        h = _hamiltonian(cfg, base)
        table = taylor_maps(h, order)
        tol = args.tolerance if args.tolerance is not None else 1e-6
        eps = float(cfg.get("eps", DEFAULT_EPS))
        means = mean_taylor(h, state, env_order) if state is not None else None
    else:
        if "trajectory_csv" not in cfg:
            raise UsageError("fit mode needs 'trajectory_csv' in the config")
        snaps = io.read_map_csv(base / cfg["trajectory_csv"])
        window = cfg.get("window")
        degree = int(cfg.get("fit_degree", order + 5))
        table = fit_taylor(snaps, order, window=window, degree=degree)
        tol = args.tolerance if args.tolerance is not None else 1e-3
        eps = float(cfg.get("eps", 1e-3))
        means = None
        if "means_csv" in cfg and state is not None:
            times, values = io.read_mean_csv(base / cfg["means_csv"])
            means, _ = fit_polynomial(times, values, env_order, window=window, degree=env_order + 5)

    report = reconstruct(table, eps=eps, tol=tol)
    payload = {"seed": args.seed, "mode": args.mode, "order": order, "tolerance": tol}
    payload.update(report.to_dict())
    if means is not None:
        payload["environment"] = _environment(report, means, state.sigma, env_order)
    io.write_json(Path(args.out) / "report.json", payload)
    print(f"case {report.case.value}; candidates written to {Path(args.out) / 'report.json'}")
    return EXIT_OK


# --- verify -------------------------------------------------------------------


def _corrupt_partner(h: CanonicalHamiltonian) -> CanonicalHamiltonian:
    return CanonicalHamiltonian(h.alpha, h.beta * np.array([1.0, -1.0, 1.0]), h.gamma)


def cmd_verify(args) -> int:
    cfg = _load_config(args)
    rng = np.random.default_rng(args.seed)
    n = int(cfg.get("samples", 20))
    tol = args.tolerance if args.tolerance is not None else 1e-12
    partner = _corrupt_partner if cfg.get("corrupt_partner", False) else sign_partner
    checks = []

    try:
        checks.append(check_color_algebra())
    except AssertionError as exc:
        checks.append({"check": "color_algebra", "passed": False, "error": str(exc)})

    for i in range(n):
        h = random_canonical(rng)
        rep = verify_parity_series(h, order=6, tol=tol, partner=partner)
        rep["sample"] = i
        checks.append(rep)

    times = np.linspace(0.0, 2.0, 20)
    for i in range(n):
        h = random_canonical(rng)
        s = TwoQubitState.random_pure(rng)
        hp = partner(h)
        du = max(float(np.max(np.abs(map_snapshot(h, t).u - map_snapshot(hp, t).u))) for t in times)
        dm = float(
            np.max(
                np.abs(
                    mean_trajectory(h, s, times)
                    - mean_trajectory(hp, flip_state(s), times, allow_invalid=True)
                )
            )
        )
        checks.append(
            {
                "check": "sign_flip_trajectory",
                "sample": i,
                "max_u_difference": du,
                "max_mean_difference": dm,
                "passed": du <= tol and dm <= tol,
            }
        )

    example = CanonicalHamiltonian(gamma=[0.7, 1.1, 1.3])
    gap = verify_spectrum_gap(example)
    checks.append({"check": "spectrum_gap", "gammas": [0.7, 1.1, 1.3], "gap": gap, "passed": abs(gap - 0.7) <= tol})

    st = TwoQubitState.random_pure(rng)
    tt = np.linspace(0.0, 5.0, 50)
    dev = float(np.max(np.abs(mean_trajectory(example, st, tt) - closed_form_trajectory(example.gamma, st, tt))))
    checks.append({"check": "closed_forms", "max_deviation": dev, "passed": dev <= tol})

    passed = all(c["passed"] for c in checks)
    summary = {"seed": args.seed, "samples": n, "tolerance": tol, "passed": passed, "checks": checks}
    io.write_json(Path(args.out) / "verify.json", summary)
    failed = [c["check"] for c in checks if not c["passed"]]
    print("all checks passed" if passed else f"FAILED: {sorted(set(failed))}")
    return EXIT_OK if passed else EXIT_FAILED


# --- classical ----------------------------------------------------------------


def cmd_classical(args) -> int:
    cfg = _load_config(args)
    try:
        system = ClassicalSystem(
            float(cfg["alpha"]), float(cfg["beta"]), float(cfg["gamma_prime"]), float(cfg["delta"])
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"bad classical system record: {exc}") from exc
    canon = classical_normalize(system)
    x0s = [float(x) for x in cfg.get("x0", [1.0, -0.5])]
    y0p = float(cfg.get("y0_prime", 0.4))
    step = float(cfg.get("step", 1e-4))
    y0 = hidden_scale(system) * y0p

    analytic = [(x, *classical_derivatives(canon, x, y0)) for x in x0s]
    fd = [(x, *finite_difference_derivatives(trajectory(system.matrix(), x, y0p, dps=40), step)) for x in x0s]
    truth = {"alpha": canon.alpha, "beta": canon.beta, "gamma": canon.gamma, "sign": canon.sign, "y0": y0}

    def summarize(rec):
        got = {"alpha": rec.alpha, "beta": rec.beta, "gamma": rec.gamma, "sign": rec.sign, "y0": rec.y0}
        errs = [abs(got[k] - truth[k]) for k in truth if got[k] is not None]
        return {**got, "undetermined": rec.undetermined, "residual": rec.residual, "max_error": max(errs)}

    rec_a = summarize(classical_reconstruct(analytic))
    rec_f = summarize(classical_reconstruct(fd))
    tol_a = args.tolerance if args.tolerance is not None else 1e-12
    passed = rec_a["max_error"] <= tol_a and rec_f["max_error"] <= 1e-6
    payload = {
        "seed": args.seed,
        "system": {"alpha": system.alpha, "beta": system.beta, "gamma_prime": system.gamma_prime, "delta": system.delta},
        "normalized": truth,
        "analytic": rec_a,
        "finite_difference": {**rec_f, "step": step},
        "passed": passed,
    }
    io.write_json(Path(args.out) / "classical.json", payload)
    print(f"classical round trip {'passed' if passed else 'FAILED'}")
    return EXIT_OK if passed else EXIT_FAILED


# --- entry point --------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON configuration file")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", default="out", help="output directory")
    common.add_argument("--order", type=int, default=None)
    common.add_argument("--tolerance", type=float, default=None)
    common.add_argument("--mode", choices=["exact", "fit"], default="exact")

    parser = argparse.ArgumentParser(prog="twoqubit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("simulate", parents=[common], help="write map and mean-value trajectories")
    sub.add_parser("reconstruct", parents=[common], help="recover both candidate Hamiltonians")
    sub.add_parser("verify", parents=[common], help="run the parity and sign-flip checks")
    sub.add_parser("classical", parents=[common], help="classical analog round trip")
    return parser


COMMANDS = {
    "simulate": cmd_simulate,
    "reconstruct": cmd_reconstruct,
    "verify": cmd_verify,
    "classical": cmd_classical,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except TwoQubitError as exc:
        print(f"failed: {exc}", file=sys.stderr)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
