"""Command-line front end: config parsing, orchestration, CSV/JSON emission.

Subcommands:

* ``ops verify``  check one operator set and print the JSON report.
* ``ops qtable``  print the boundary-constant table (q scaled with h) as CSV
  beside the frozen reference values.
* ``run``         execute a convergence study from a JSON config.
* ``certify``     emit duality certificates for a config without solving.
* ``sweep``       run one grid across a list of factorization parameters.

Configs are JSON files; one config describes one experiment campaign. All
floating-point output uses 17 significant digits so identical configs give
bit-identical files. Exit codes: 0 success, 1 check failure, 2 usage or
config error, 3 numerical failure. The ``SBPSAT_THREADS`` environment
variable overrides the config's ``parallelism`` value.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import dataclass

from .errors import (
    BlowUpError,
    ConfigError,
    DualityViolatedError,
    GridTooSmallError,
    InvalidOmegaError,
    InvalidZeroBlockError,
    NoConvergenceError,
    NotSymmetricError,
    NotWellPosedError,
    ShapeMismatchError,
    SingularMatrixError,
    SingularPError,
    SingularPenaltyDenominatorError,
    SingularPerturbedMatrixError,
    UnknownVariantError,
)
from .experiments import (
    OMEGA_MODES,
    PENALTY_FLAVORS,
    ConvergenceRow,
    OmegaSweepRow,
    PresetProblem,
    certify_case,
    convergence_study,
    make_preset,
    omega_sweep,
)
from .operators import build_second_derivative, verify_sbp
from .solver import TimeIntegratorConfig

__all__ = ["RunConfig", "load_config", "main"]

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

_CHECK_ERRORS = (NotWellPosedError, DualityViolatedError)
_CONFIG_ERRORS = (
    ConfigError,
    GridTooSmallError,
    UnknownVariantError,
    InvalidOmegaError,
    ShapeMismatchError,
)
_NUMERICAL_ERRORS = (
    BlowUpError,
    SingularMatrixError,
    SingularPerturbedMatrixError,
    SingularPError,
    NoConvergenceError,
    NotSymmetricError,
    SingularPenaltyDenominatorError,
    InvalidZeroBlockError,
)

_CSV_COLUMNS = (
    "preset",
    "N",
    "h",
    "order",
    "variant",
    "omega_mode",
    "penalty_flavor",
    "sol_error",
    "sol_order",
    "func_index",
    "func_error",
    "func_order",
    "rho",
    "eta",
    "duality_verdict",
)

# Boundary constants q*h for every shipped operator, beside their reference
# values. The interior-order-8 narrow operator has free boundary parameters,
# so its reference is informational: different published closures give
# different q while all satisfying the same operator identities.
_QTABLE_ROWS = (
    ("wide", 2, 16, 2.0, 1e-12),
    ("wide", 4, 16, 48.0 / 17.0, 1e-12),
    ("wide", 6, 16, 43200.0 / 13649.0, 1e-12),
    ("wide", 8, 16, 5080320.0 / 1498139.0, 1e-12),
    ("narrow_20", 2, 16, 1.0, 1e-12),
    ("narrow", 2, 16, 2.5, 1e-12),
    ("narrow", 4, 8, 3.986391480987749, 1e-12),
    ("narrow", 6, 12, 5.322804652661742, 1e-10),
    ("narrow", 8, 16, 633.69326893357, None),
)

_CONFIG_KEYS = {
    "preset",
    "operator",
    "omega_mode",
    "N",
    "time",
    "steady",
    "penalty_flavor",
    "overrides",
    "omegas",
    "output",
    "parallelism",
}
_OPERATOR_KEYS = {"interior_order", "variant"}
_TIME_KEYS = {"scheme", "dt", "t_end"}
_OUTPUT_KEYS = {"csv", "certificates"}


@dataclass(frozen=True)
class RunConfig:
    """One experiment campaign, fully validated against the preset catalogue."""

    preset_name: str
    preset: PresetProblem
    interior_order: int
    variant: str
    omega_mode: str | None
    n_list: tuple[int, ...]
    time: TimeIntegratorConfig | str | None
    penalty_flavor: str
    omegas: tuple[float, ...] | None
    csv_path: str | None
    certificates_path: str | None
    parallelism: int


def _require(data: dict, key: str, path: str):
    if key not in data:
        raise ConfigError(f"{path}: missing required field {key!r}")
    return data[key]


def _check_keys(data: dict, allowed: set, where: str) -> None:
    unknown = sorted(set(data) - allowed)
    if unknown:
        raise ConfigError(
            f"{where}: unknown field {unknown[0]!r}, "
            f"allowed fields are {sorted(allowed)}"
        )


def _parse_n_values(raw, path: str) -> tuple[int, ...]:
    if isinstance(raw, bool):
        raise ConfigError(f"{path}: N must be an integer or list of integers")
    if isinstance(raw, int):
        return (raw,)
    if isinstance(raw, list) and raw and all(
        isinstance(v, int) and not isinstance(v, bool) for v in raw
    ):
        return tuple(raw)
    raise ConfigError(f"{path}: N must be an integer or list of integers")


def _parse_time(data: dict, path: str) -> TimeIntegratorConfig | str | None:
    time_block = data.get("time")
    steady = data.get("steady", False)
    if time_block is not None and steady:
        raise ConfigError(f"{path}: 'time' and 'steady' are mutually exclusive")
    if steady:
        if steady is not True:
            raise ConfigError(f"{path}: 'steady' must be true when present")
        return "steady"
    if time_block is None:
        return None
    if not isinstance(time_block, dict):
        raise ConfigError(f"{path}: 'time' must be an object")
    _check_keys(time_block, _TIME_KEYS, f"{path}: time")
    return TimeIntegratorConfig(
        scheme=_require(time_block, "scheme", f"{path}: time"),
        dt=float(_require(time_block, "dt", f"{path}: time")),
        t_end=float(_require(time_block, "t_end", f"{path}: time")),
    )


def load_config(path: str) -> RunConfig:
    """Parse and validate a campaign config file."""
    try:
        with open(path, "r", encoding="utf-8") as handle:
            data = json.load(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"{path}:{exc.lineno}:{exc.colno}: invalid JSON ({exc.msg})"
        ) from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    _check_keys(data, _CONFIG_KEYS, path)

    preset_name = _require(data, "preset", path)
    overrides = data.get("overrides", {})
    if not isinstance(overrides, dict):
        raise ConfigError(f"{path}: 'overrides' must be an object")
    preset = make_preset(preset_name, **overrides)

    operator = _require(data, "operator", path)
    if not isinstance(operator, dict):
        raise ConfigError(f"{path}: 'operator' must be an object")
    _check_keys(operator, _OPERATOR_KEYS, f"{path}: operator")
    interior_order = _require(operator, "interior_order", f"{path}: operator")
    variant = _require(operator, "variant", f"{path}: operator")

    omega_mode = data.get("omega_mode")
    if omega_mode is not None:
        if not isinstance(omega_mode, str) or (
            omega_mode not in OMEGA_MODES and not omega_mode.startswith("value:")
        ):
            raise ConfigError(
                f"{path}: unknown omega mode {omega_mode!r}, expected one of "
                f"{OMEGA_MODES} or 'value:<x>'"
            )

    penalty_flavor = data.get("penalty_flavor", "theorem2")
    if penalty_flavor not in PENALTY_FLAVORS:
        raise ConfigError(
            f"{path}: unknown penalty flavor {penalty_flavor!r}, "
            f"expected one of {PENALTY_FLAVORS}"
        )

    omegas = data.get("omegas")
    if omegas is not None:
        if not isinstance(omegas, list) or not omegas or not all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in omegas
        ):
            raise ConfigError(f"{path}: 'omegas' must be a non-empty number list")
        omegas = tuple(float(v) for v in omegas)

    output = data.get("output", {})
    if not isinstance(output, dict):
        raise ConfigError(f"{path}: 'output' must be an object")
    _check_keys(output, _OUTPUT_KEYS, f"{path}: output")

    parallelism = data.get("parallelism", 1)
    if not isinstance(parallelism, int) or isinstance(parallelism, bool) \
            or parallelism < 1:
        raise ConfigError(f"{path}: 'parallelism' must be a positive integer")

    return RunConfig(
        preset_name=preset_name,
        preset=preset,
        interior_order=interior_order,
        variant=variant,
        omega_mode=omega_mode,
        n_list=_parse_n_values(_require(data, "N", path), path),
        time=_parse_time(data, path),
        penalty_flavor=penalty_flavor,
        omegas=omegas,
        csv_path=output.get("csv"),
        certificates_path=output.get("certificates"),
        parallelism=parallelism,
    )


def _threads(config: RunConfig) -> int:
    env = os.environ.get("SBPSAT_THREADS")
    if env is None:
        return config.parallelism
    try:
        value = int(env)
    except ValueError as exc:
        raise ConfigError(f"SBPSAT_THREADS must be an integer, got {env!r}") from exc
    if value < 1:
        raise ConfigError(f"SBPSAT_THREADS must be positive, got {value}")
    return value


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return "%.17g" % value
    return str(value)


def _verdict_flag(verdict: str) -> str:
    return "pass" if verdict == "dual_consistent" else "fail"


def _write_csv(rows: list[dict], columns: tuple[str, ...], path: str | None) -> None:
    def emit(handle) -> None:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(row[col]) for col in columns])

    if path is None:
        emit(sys.stdout)
    else:
        with open(path, "w", encoding="utf-8", newline="") as handle:
            emit(handle)


def _write_json(payload, path: str | None) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True)
    if path is None:
        print(text)
    else:
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(text + "\n")


def _study_csv_rows(config: RunConfig, rows: list[ConvergenceRow]) -> list[dict]:
    out = []
    for row in rows:
        verdict = _verdict_flag(row.report.certificate.verdict)
        for idx, (err, order) in enumerate(zip(row.func_errors, row.func_orders)):
            out.append({
                "preset": config.preset_name,
                "N": row.N,
                "h": row.h,
                "order": config.interior_order,
                "variant": config.variant,
                "omega_mode": row.omega_mode,
                "penalty_flavor": config.penalty_flavor,
                "sol_error": row.sol_error,
                "sol_order": row.sol_order,
                "func_index": idx,
                "func_error": err,
                "func_order": order,
                "rho": row.report.rho,
                "eta": row.report.eta,
                "duality_verdict": verdict,
            })
    return out


def _sweep_csv_rows(config: RunConfig, n_pts: int,
                    rows: list[OmegaSweepRow]) -> list[dict]:
    out = []
    for row in rows:
        verdict = _verdict_flag(row.report.certificate.verdict)
        for idx, err in enumerate(row.func_errors):
            out.append({
                "preset": config.preset_name,
                "N": n_pts,
                "h": config.preset.problem.length / n_pts,
                "order": config.interior_order,
                "variant": config.variant,
                "omega_mode": "value:%.17g" % row.omega,
                "penalty_flavor": config.penalty_flavor,
                "sol_error": row.sol_error,
                "sol_order": None,
                "func_index": idx,
                "func_error": err,
                "func_order": None,
                "rho": row.rho,
                "eta": row.eta,
                "duality_verdict": verdict,
            })
    return out


def cmd_ops_verify(args: argparse.Namespace) -> int:
    opset = build_second_derivative(args.order, args.variant, args.n, 1.0 / args.n)
    report = verify_sbp(opset)
    print(json.dumps(report, indent=2, sort_keys=True))
    return EXIT_OK if report["passed"] else EXIT_CHECK_FAILED


def cmd_ops_qtable(args: argparse.Namespace) -> int:
    rows = []
    failed = False
    for variant, order, n_pts, reference, tol in _QTABLE_ROWS:
        opset = build_second_derivative(order, variant, n_pts, 1.0 / n_pts)
        computed = opset.q * opset.h
        if tol is None:
            match = "informational"
        elif abs(computed - reference) <= tol:
            match = "yes"
        else:
            match = "no"
            failed = True
        rows.append({
            "variant": variant,
            "order": order,
            "N": n_pts,
            "computed": computed,
            "reference": reference,
            "match": match,
        })
    _write_csv(rows, ("variant", "order", "N", "computed", "reference", "match"),
               args.output)
    return EXIT_CHECK_FAILED if failed else EXIT_OK


def _certificates_payload(config: RunConfig) -> list[dict]:
    payload = []
    for n_pts in config.n_list:
        cert = certify_case(config.preset, config.interior_order, config.variant,
                            config.omega_mode, n_pts,
                            penalty_flavor=config.penalty_flavor)
        entry = cert.to_dict()
        entry["N"] = n_pts
        payload.append(entry)
    return payload


def cmd_run(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    if config.omegas is not None:
        raise ConfigError(
            f"{args.config}: 'omegas' only applies to the sweep command"
        )
    if len(config.n_list) == 1:
        print("warning: single grid in config, order columns left empty",
              file=sys.stderr)
    rows = convergence_study(
        config.preset, config.interior_order, config.variant, config.omega_mode,
        list(config.n_list), time=config.time,
        penalty_flavor=config.penalty_flavor, threads=_threads(config))
    _write_csv(_study_csv_rows(config, rows), _CSV_COLUMNS, config.csv_path)
    if config.certificates_path is not None:
        payload = []
        for row in rows:
            entry = row.report.certificate.to_dict()
            entry["N"] = row.N
            payload.append(entry)
        _write_json(payload, config.certificates_path)
    return EXIT_OK


def cmd_certify(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    payload = _certificates_payload(config)
    _write_json(payload, config.certificates_path)
    if config.penalty_flavor == "theorem2" and any(
        entry["verdict"] != "dual_consistent" for entry in payload
    ):
        return EXIT_CHECK_FAILED
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    if config.omegas is None:
        raise ConfigError(f"{args.config}: sweep requires an 'omegas' list")
    if len(config.n_list) != 1:
        raise ConfigError(f"{args.config}: sweep requires a single N")
    n_pts = config.n_list[0]
    rows = omega_sweep(
        config.preset, config.interior_order, config.variant,
        list(config.omegas), n_pts, time=config.time,
        penalty_flavor=config.penalty_flavor, threads=_threads(config))
    _write_csv(_sweep_csv_rows(config, n_pts, rows), _CSV_COLUMNS,
               config.csv_path)
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sbpsat",
        description="Dual-consistent SBP-SAT discretizations: operator checks, "
                    "duality certificates, and convergence experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    ops = sub.add_parser("ops", help="operator-level checks and tables")
    ops_sub = ops.add_subparsers(dest="ops_command", required=True)

    verify = ops_sub.add_parser("verify", help="check one operator set")
    verify.add_argument("--order", type=int, required=True,
                        help="interior accuracy order (2, 4, 6 or 8)")
    verify.add_argument("--variant", required=True,
                        help="second-derivative variant (wide, narrow, narrow_20)")
    verify.add_argument("--n", type=int, required=True,
                        help="number of grid intervals")
    verify.set_defaults(func=cmd_ops_verify)

    qtable = ops_sub.add_parser(
        "qtable", help="boundary-constant table q*h for all shipped operators")
    qtable.add_argument("--output", default=None, help="CSV path (default stdout)")
    qtable.set_defaults(func=cmd_ops_qtable)

    run = sub.add_parser("run", help="execute a convergence study from a config")
    run.add_argument("config", help="JSON campaign config")
    run.set_defaults(func=cmd_run)

    certify_cmd = sub.add_parser(
        "certify", help="emit duality certificates for a config without solving")
    certify_cmd.add_argument("config", help="JSON campaign config")
    certify_cmd.set_defaults(func=cmd_certify)

    sweep = sub.add_parser(
        "sweep", help="run one grid across a list of factorization parameters")
    sweep.add_argument("config", help="JSON campaign config")
    sweep.set_defaults(func=cmd_sweep)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return args.func(args)
    except _CHECK_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    except _CONFIG_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except _NUMERICAL_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
