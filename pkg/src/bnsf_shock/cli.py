"""Command-line harness: config parsing, run orchestration, file emission.

Subcommands
-----------
profile     construct one shock profile and write CSV + JSON artifacts
verify      evaluate the estimate suite on a fresh or saved profile
sweep       run profiles over an eps list and check eps-uniformity
derivcheck  compare the closed-form derivative matrices to finite differences

Exit codes: 0 success, 1 a check failed, 2 configuration error, 3 solver
failure.  Config files are INI-style (key = value under named sections);
see the README for the full grammar.
"""

from __future__ import annotations

import argparse
import configparser
import json
import sys
from dataclasses import dataclass, field as dc_field
from pathlib import Path

from .gas import GasConstants, State, TransportModel, builtin_models
from .hugoniot import ShockData
from .profile_ode import PhaseField, make_field
from .reduction import compute_A, g_derivative_check, h_derivative_check
from .shooting import Profile, ShootOptions, normalize_phase, reflect, shoot
from .verify import FieldTemplate, FitWindowError, sweep as run_sweep, verify_profile

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_SOLVER = 3


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    """Validated run configuration assembled from an INI file."""

    gas: GasConstants
    coeffs: TransportModel
    coeffs_desc: dict
    left: State
    eps: float
    family: int
    solver: ShootOptions
    out_dir: Path
    profile_csv: str = "profile.csv"
    report_json: str = "report.json"
    extras: dict = dc_field(default_factory=dict)


def _getfloat(section, key, default=None):
    if key not in section:
        if default is None:
            raise ConfigError(f"missing key '{key}' in section [{section.name}]")
        return default
    try:
        return float(section[key])
    except ValueError as exc:
        raise ConfigError(f"key '{key}' in [{section.name}] is not a number: {section[key]!r}") from exc


def load_config(path) -> RunConfig:
    """Parse and validate an INI run configuration.

    Raises ConfigError for missing files, malformed syntax, missing keys,
    and invariant violations (for example gamma <= 1 or eps = 0).
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    parser = configparser.ConfigParser()
    try:
        parser.read(path)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from exc

    for name in ("gas", "coeffs", "left", "shock"):
        if name not in parser:
            raise ConfigError(f"missing section [{name}] in {path}")

    try:
        gas = GasConstants(
            R=_getfloat(parser["gas"], "R", 1.0),
            gamma=_getfloat(parser["gas"], "gamma"),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    coeffs_sec = parser["coeffs"]
    model = coeffs_sec.get("model")
    if not model:
        raise ConfigError("missing key 'model' in section [coeffs]")
    params = {k: float(v) for k, v in coeffs_sec.items() if k != "model"}
    try:
        coeffs = builtin_models(model, **params)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"bad coefficient model: {exc}") from exc

    try:
        left = State(
            v=_getfloat(parser["left"], "v"),
            u=_getfloat(parser["left"], "u", 0.0),
            theta=_getfloat(parser["left"], "theta"),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    eps = _getfloat(parser["shock"], "eps")
    if eps <= 0:
        raise ConfigError(f"shock amplitude eps must be positive, got {eps}")
    family = parser["shock"].getint("family", 3)
    if family not in (1, 3):
        raise ConfigError(f"shock family must be 1 or 3, got {family}")

    defaults = ShootOptions()
    if "solver" in parser:
        s = parser["solver"]
        solver = ShootOptions(
            rel_tol=_getfloat(s, "rel_tol", defaults.rel_tol),
            abs_tol=_getfloat(s, "abs_tol", defaults.abs_tol),
            tol_end_factor=_getfloat(s, "tol_end_factor", defaults.tol_end_factor),
            xi_cap_factor=_getfloat(s, "xi_cap_factor", defaults.xi_cap_factor),
        )
    else:
        solver = defaults

    out_sec = parser["output"] if "output" in parser else {}
    out_dir = Path(out_sec.get("dir", "."))
    profile_csv = out_sec.get("profile_csv", "profile.csv")
    report_json = out_sec.get("report_json", "report.json")

    return RunConfig(
        gas=gas,
        coeffs=coeffs,
        coeffs_desc={"model": model, "params": params},
        left=left,
        eps=eps,
        family=family,
        solver=solver,
        out_dir=out_dir,
        profile_csv=profile_csv,
        report_json=report_json,
    )


def _build_profile(cfg: RunConfig) -> Profile:
    field = make_field(cfg.left, cfg.eps, cfg.family, cfg.gas, cfg.coeffs)
    return normalize_phase(shoot(field, cfg.solver))


def _write_json(path: Path, payload: dict):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def cmd_profile(cfg: RunConfig, out_dir: Path) -> int:
    try:
        profile = _build_profile(cfg)
    except (RuntimeError, ValueError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / cfg.profile_csv
    profile.save_csv(csv_path)
    profile.save_shock_json(csv_path.with_suffix(".json"))
    print(f"profile written to {csv_path} ({len(profile.xi)} samples)")
    return EXIT_OK


def cmd_verify(cfg: RunConfig, out_dir: Path, profile_csv=None) -> int:
    try:
        if profile_csv is not None:
            csv_path = Path(profile_csv)
            shock_path = csv_path.with_suffix(".json")
            if not shock_path.is_file():
                print(f"shock metadata not found next to {csv_path}", file=sys.stderr)
                return EXIT_CONFIG
            with open(shock_path) as fh:
                shock = ShockData.from_dict(json.load(fh))
            profile = Profile.load_csv(csv_path, shock)
        else:
            profile = _build_profile(cfg)
        if profile.shock.family == 1:
            profile = reflect(profile, cfg.gas)
        A = profile.shock.A
        if A is None:
            A = compute_A(PhaseField(profile.shock, cfg.gas, cfg.coeffs))
        report = verify_profile(profile, A, cfg.gas)
    except FitWindowError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (RuntimeError, ValueError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_json(out_dir / cfg.report_json, report.to_dict())
    ok = report.sign_ok and report.derivdecay_ok
    print(f"verify: sign_ok={report.sign_ok} derivdecay_ok={report.derivdecay_ok}")
    for key, val in sorted(report.fitted_constants().items()):
        print(f"  {key} = {val:.6g}")
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def cmd_sweep(cfg: RunConfig, out_dir: Path, eps_list) -> int:
    template = FieldTemplate(left=cfg.left, family=cfg.family, gas=cfg.gas, coeffs=cfg.coeffs)
    try:
        report = run_sweep(template, eps_list, cfg.solver)
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except RuntimeError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_json(out_dir / cfg.report_json, report.to_dict())
    print(f"sweep over eps={eps_list}: uniform={report.uniform} max_ratio={report.max_ratio:.4f}")
    return EXIT_OK if report.uniform else EXIT_CHECK_FAILED


def cmd_derivcheck(cfg: RunConfig, out_dir: Path) -> int:
    field = make_field(cfg.left, cfg.eps, cfg.family, cfg.gas, cfg.coeffs)
    try:
        rep_h = h_derivative_check(field)
        rep_g = g_derivative_check(field)
    except (RuntimeError, ValueError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    payload = {
        "h": rep_h.entries,
        "g": rep_g.entries,
        "max_rel_err_first": max(rep_h.max_rel_err(1), rep_g.max_rel_err(1)),
        "max_rel_err_second": max(rep_h.max_rel_err(2), rep_g.max_rel_err(2)),
        "ok": rep_h.ok() and rep_g.ok(),
    }
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_json(out_dir / cfg.report_json, payload)
    print(
        "derivcheck: max rel err first={:.3e} second={:.3e} ok={}".format(
            payload["max_rel_err_first"], payload["max_rel_err_second"], payload["ok"]
        )
    )
    return EXIT_OK if payload["ok"] else EXIT_CHECK_FAILED


def _parse_eps_list(text):
    try:
        values = [float(tok) for tok in text.replace(",", " ").split()]
    except ValueError as exc:
        raise ConfigError(f"bad --eps list {text!r}") from exc
    if not values:
        raise ConfigError("empty --eps list")
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bnsf-shock",
        description="Viscous shock profile construction and estimate verification.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("profile", "construct a profile and write CSV/JSON artifacts"),
        ("verify", "run the estimate suite on a profile"),
        ("sweep", "run profiles over an eps list and check uniformity"),
        ("derivcheck", "verify closed-form derivative matrices"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="path to the INI run config")
        p.add_argument("--out", default=None, help="output directory (overrides config)")
        if name == "sweep":
            p.add_argument("--eps", required=True, help="descending eps list, comma or space separated")
        if name == "verify":
            p.add_argument("--profile", default=None, help="verify a saved CSV instead of shooting")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        eps_list = _parse_eps_list(args.eps) if args.command == "sweep" else None
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out_dir = Path(args.out) if args.out else cfg.out_dir

    if args.command == "profile":
        return cmd_profile(cfg, out_dir)
    if args.command == "verify":
        return cmd_verify(cfg, out_dir, profile_csv=args.profile)
    if args.command == "sweep":
        return cmd_sweep(cfg, out_dir, eps_list)
    return cmd_derivcheck(cfg, out_dir)


if __name__ == "__main__":
    raise SystemExit(main())
