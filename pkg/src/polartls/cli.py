"""Command-line front end: sweeps, point queries, and cascade runs.

Subcommands
-----------
``sweep``
    Grid sweeps of the headline quantities, written as CSV or JSON.
``rate``
    Rate table (or one partial rate) for a single dressed state.
``overlap``
    One cross-ladder overlap, exact or asymptotic route.
``semiclassical``
    Large-index totals (gamma_e, gamma_g).
``cascade``
    Monte-Carlo cascade ensemble: trajectory log plus summary.
``gamma0``
    Absolute free-space decay rate in SI units.

Except for ``gamma0``, all inputs are dimensionless: frequencies and
couplings are ratios to the bare transition frequency (``--omega-a`` is
coupling/omega0, ``--omega-l`` is drive/omega0), rates come out in units
of gamma0, and photon frequencies in units of omega0.

Exit codes: 0 success, 1 compute or I/O error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .cascade import emission_spectrum, sample_ensemble, write_trajectory_log
from .ladder import DressedState, allowed_final_indices
from .overlaps import ModelParams, overlap_bessel, overlap_exact
from .rates import (
    DEBYE,
    Gamma0Params,
    absorption_rate_g1,
    gamma0_si,
    partial_rate,
    semiclassical_totals,
    suppression_rate_e0,
    total_rate,
)

__all__ = ["AxisSpec", "SweepConfig", "run_sweep", "main"]


class _UsageError(Exception):
    """Bad flags or config; maps to exit code 2."""


SWEEP_QUANTITIES = (
    "suppression_e0",
    "absorption_g1",
    "partial_e0n",
    "overlap_compare",
    "semiclassical_totals",
)

_DEFAULT_COUPLING_AXIS = "0,4,101,linear"
_DEFAULT_DRIVE_AXIS = "0.05,2,101,linear"
_DEFAULT_SQRT_N_AXIS = "100,1000,20,log"
_DEFAULT_P_VALUES = "0,1,2,3"


@dataclass(frozen=True)
class AxisSpec:
    """One sweep axis: ``start,stop,steps[,scale]`` with scale linear or log."""

    start: float
    stop: float
    steps: int
    scale: str = "linear"

    def __post_init__(self):
        if self.scale not in ("linear", "log"):
            raise _UsageError(f"axis scale must be linear or log, got {self.scale!r}")
        if isinstance(self.steps, bool) or not isinstance(self.steps, int):
            raise _UsageError(f"axis steps must be an integer, got {self.steps!r}")
        if self.steps < 2:
            raise _UsageError(f"axis needs steps >= 2, got {self.steps}")
        if not (math.isfinite(self.start) and math.isfinite(self.stop)):
            raise _UsageError("axis endpoints must be finite")
        if not self.start < self.stop:
            raise _UsageError(
                f"axis needs start < stop, got {self.start!r} >= {self.stop!r}"
            )
        if self.scale == "log" and self.start <= 0.0:
            raise _UsageError("log axis needs start > 0")

    @classmethod
    def parse(cls, text: str) -> "AxisSpec":
        parts = [p.strip() for p in str(text).split(",")]
        if len(parts) not in (3, 4):
            raise _UsageError(
                f"axis spec must be start,stop,steps[,scale], got {text!r}"
            )
        try:
            start, stop = float(parts[0]), float(parts[1])
            steps = int(parts[2])
        except ValueError as exc:
            raise _UsageError(f"bad axis spec {text!r}: {exc}") from None
        scale = parts[3] if len(parts) == 4 else "linear"
        return cls(start, stop, steps, scale)

    def values(self) -> np.ndarray:
        if self.scale == "log":
            return np.geomspace(self.start, self.stop, self.steps)
        return np.linspace(self.start, self.stop, self.steps)


@dataclass(frozen=True)
class SweepConfig:
    """Fully resolved sweep request (flags and config file already merged)."""

    quantity: str
    output: str
    fmt: str = "csv"
    threads: int = 1
    coupling_axis: AxisSpec | None = None
    drive_axis: AxisSpec | None = None
    sqrt_n_axis: AxisSpec | None = None
    p_values: tuple[int, ...] = ()
    fixed: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.quantity not in SWEEP_QUANTITIES:
            raise _UsageError(
                f"quantity must be one of {', '.join(SWEEP_QUANTITIES)}; "
                f"got {self.quantity!r}"
            )
        if self.fmt not in ("csv", "json"):
            raise _UsageError(f"format must be csv or json, got {self.fmt!r}")
        if isinstance(self.threads, bool) or not isinstance(self.threads, int):
            raise _UsageError(f"threads must be an integer, got {self.threads!r}")
        if self.threads < 1:
            raise _UsageError(f"threads must be >= 1, got {self.threads}")
        object.__setattr__(self, "fixed", dict(self.fixed))


def _fixed_value(config: SweepConfig, key: str, required: bool, default=None):
    if key in config.fixed:
        return config.fixed[key]
    if required:
        raise _UsageError(
            f"quantity {config.quantity} requires a pinned parameter "
            f"'{key}' (use --fix {key}=VALUE)"
        )
    return default


_ALLOWED_FIXED = {
    "suppression_e0": {"phi"},
    "absorption_g1": {"phi"},
    "partial_e0n": {"phi", "n_prime"},
    "overlap_compare": {"phi", "omega_a", "omega_l"},
    "semiclassical_totals": {"phi", "n_bar"},
}


def _grid_tasks(config: SweepConfig):
    """Point evaluators for the quantities living on the coupling x drive grid."""
    if config.coupling_axis is None or config.drive_axis is None:
        raise _UsageError(
            f"quantity {config.quantity} sweeps the coupling and drive axes; "
            "both --omega-a and --omega-l axis specs are required"
        )
    phi = float(_fixed_value(config, "phi", required=False, default=0.0))

    if config.quantity == "suppression_e0":
        columns = ["omega_L_over_omega0", "Omega_a_over_omega0", "value"]

        def evaluate(drive, coupling):
            params = ModelParams.from_ratios(coupling, drive, phi)
            return (drive, coupling, suppression_rate_e0(params))

    elif config.quantity == "absorption_g1":
        columns = ["omega_L_over_omega0", "Omega_a_over_omega0", "value"]

        def evaluate(drive, coupling):
            params = ModelParams.from_ratios(coupling, drive, phi)
            return (drive, coupling, absorption_rate_g1(params))

    elif config.quantity == "partial_e0n":
        n_prime_raw = _fixed_value(config, "n_prime", required=True)
        n_prime = int(n_prime_raw)
        if n_prime != n_prime_raw or n_prime < 0:
            raise _UsageError(f"n_prime must be an integer >= 0, got {n_prime_raw!r}")
        columns = ["omega_L_over_omega0", "Omega_a_over_omega0", "value"]

        def evaluate(drive, coupling):
            params = ModelParams.from_ratios(coupling, drive, phi)
            state = DressedState("e", 0)
            if n_prime in allowed_final_indices(state, params):
                value = partial_rate(state, n_prime, params)
            else:
                value = 0.0  # channel closed at this grid point
            return (drive, coupling, value)

    else:  # semiclassical_totals
        n_bar = float(_fixed_value(config, "n_bar", required=True))
        columns = ["omega_L_over_omega0", "Omega_a_over_omega0", "gamma_e", "gamma_g"]

        def evaluate(drive, coupling):
            params = ModelParams.from_ratios(coupling, drive, phi)
            totals = semiclassical_totals(n_bar, params)
            return (drive, coupling, totals.gamma_e, totals.gamma_g)

    points = [
        (float(drive), float(coupling))
        for drive in config.drive_axis.values()
        for coupling in config.coupling_axis.values()
    ]
    return columns, evaluate, points


def _overlap_compare_tasks(config: SweepConfig):
    if config.sqrt_n_axis is None:
        raise _UsageError("overlap_compare sweeps a --sqrt-n axis; none given")
    if not config.p_values:
        raise _UsageError("overlap_compare needs at least one p value")
    coupling = float(_fixed_value(config, "omega_a", required=True))
    drive = float(_fixed_value(config, "omega_l", required=True))
    phi = float(_fixed_value(config, "phi", required=False, default=0.0))
    params = ModelParams.from_ratios(coupling, drive, phi)

    points = []
    for sqrt_n in config.sqrt_n_axis.values():
        n = round(float(sqrt_n) ** 2)
        for p in config.p_values:
            if n - p < 0 or n < 1:
                raise _UsageError(
                    f"sqrt_n={float(sqrt_n):g} gives n={n}, too small for p={p}"
                )
            if abs(p) > n / 10:
                raise _UsageError(
                    f"|p| <= n/10 required for the asymptotic route; "
                    f"got p={p} at n={n}"
                )
            points.append((float(sqrt_n), n, int(p)))

    columns = ["sqrt_n", "p", "exact_sq", "bessel_sq"]

    def evaluate(sqrt_n, n, p):
        exact = overlap_exact(n, n - p, params).abs_squared
        asymptotic = overlap_bessel(n, p, params).abs_squared
        return (sqrt_n, p, exact, asymptotic)

    return columns, evaluate, points


def run_sweep(config: SweepConfig) -> int:
    """Evaluate the configured grid and write it; returns the row count.

    Output is deterministic for identical configs: rows follow grid
    order (outer axis major) no matter how many threads evaluate them.
    """
    unknown = set(config.fixed) - _ALLOWED_FIXED[config.quantity]
    if unknown:
        raise _UsageError(
            f"pinned parameters {sorted(unknown)} are not used by "
            f"{config.quantity}; allowed: {sorted(_ALLOWED_FIXED[config.quantity])}"
        )
    if config.quantity == "overlap_compare":
        columns, evaluate, points = _overlap_compare_tasks(config)
    else:
        columns, evaluate, points = _grid_tasks(config)

    if config.threads > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            rows = list(pool.map(lambda point: evaluate(*point), points))
    else:
        rows = [evaluate(*point) for point in points]

    if config.fmt == "json":
        _write_json(config, columns, rows)
    else:
        _write_csv(config, columns, rows)
    return len(rows)


def _format_cell(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_csv(config: SweepConfig, columns, rows) -> None:
    try:
        with open(config.output, "w", encoding="utf-8") as handle:
            handle.write(f"# quantity={config.quantity}\n")
            if config.fixed:
                pinned = " ".join(
                    f"{k}={config.fixed[k]!r}" for k in sorted(config.fixed)
                )
                handle.write(f"# fixed {pinned}\n")
            handle.write(",".join(columns) + "\n")
            for row in rows:
                handle.write(",".join(_format_cell(v) for v in row) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write sweep output {config.output!r}: {exc}") from exc


def _write_json(config: SweepConfig, columns, rows) -> None:
    payload = {
        "quantity": config.quantity,
        "fixed": {k: config.fixed[k] for k in sorted(config.fixed)},
        "columns": list(columns),
        "rows": [list(row) for row in rows],
    }
    try:
        with open(config.output, "w", encoding="utf-8") as handle:
            json.dump(payload, handle, indent=1)
            handle.write("\n")
    except OSError as exc:
        raise OSError(f"cannot write sweep output {config.output!r}: {exc}") from exc


def _read_config_file(path: str) -> dict:
    """Plain declarative ``key = value`` lines; '#' starts a comment.

    The ``fix`` key may repeat (``fix = name=value``); other repeated
    keys keep the last value, mirroring flag override order.
    """
    settings: dict = {}
    fixes: list[str] = []
    try:
        with open(path, "r", encoding="utf-8") as handle:
            for lineno, raw in enumerate(handle, start=1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise _UsageError(
                        f"{path}:{lineno}: expected 'key = value', got {raw.rstrip()!r}"
                    )
                key, value = line.split("=", 1)
                key = key.strip().replace("-", "_")
                value = value.strip()
                if key == "fix":
                    fixes.append(value)
                else:
                    settings[key] = value
    except OSError as exc:
        raise _UsageError(f"cannot read config file {path!r}: {exc}") from None
    if fixes:
        settings["fix"] = fixes
    return settings


def _parse_fix_entry(entry: str) -> tuple[str, float]:
    if "=" not in entry:
        raise _UsageError(f"--fix expects name=value, got {entry!r}")
    name, value = entry.split("=", 1)
    name = name.strip().replace("-", "_")
    try:
        return name, float(value)
    except ValueError:
        raise _UsageError(f"--fix {name} needs a numeric value, got {value!r}") from None


def _parse_p_values(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in str(text).split(",") if part.strip())
    except ValueError:
        raise _UsageError(f"p values must be comma-separated integers, got {text!r}") from None


def _resolve(flag_value, file_settings: dict, key: str, default=None):
    if flag_value is not None:
        return flag_value
    if key in file_settings:
        return file_settings[key]
    return default


def _cmd_sweep(args) -> int:
    file_settings = _read_config_file(args.config) if args.config else {}

    quantity = _resolve(args.quantity, file_settings, "quantity")
    if quantity is None:
        raise _UsageError("sweep needs a quantity (--quantity or config file)")
    output = _resolve(args.output, file_settings, "output")
    if output is None:
        raise _UsageError("sweep needs an output path (--output or config file)")
    fmt = _resolve(args.format, file_settings, "format", "csv")
    threads_raw = _resolve(args.threads, file_settings, "threads", 1)
    try:
        threads = int(threads_raw)
    except (TypeError, ValueError):
        raise _UsageError(f"threads must be an integer, got {threads_raw!r}") from None

    needs_grid = quantity in (
        "suppression_e0",
        "absorption_g1",
        "partial_e0n",
        "semiclassical_totals",
    )
    coupling_spec = _resolve(
        args.omega_a, file_settings, "omega_a",
        _DEFAULT_COUPLING_AXIS if needs_grid else None,
    )
    drive_spec = _resolve(
        args.omega_l, file_settings, "omega_l",
        _DEFAULT_DRIVE_AXIS if needs_grid else None,
    )
    sqrt_n_spec = _resolve(
        args.sqrt_n, file_settings, "sqrt_n",
        _DEFAULT_SQRT_N_AXIS if quantity == "overlap_compare" else None,
    )
    p_spec = _resolve(args.p_values, file_settings, "p_values", _DEFAULT_P_VALUES)

    fixed: dict[str, float] = {}
    for entry in file_settings.get("fix", []):
        name, value = _parse_fix_entry(entry)
        fixed[name] = value
    for entry in args.fix or []:
        name, value = _parse_fix_entry(entry)
        fixed[name] = value

    config = SweepConfig(
        quantity=str(quantity),
        output=str(output),
        fmt=str(fmt),
        threads=threads,
        coupling_axis=AxisSpec.parse(coupling_spec) if coupling_spec else None,
        drive_axis=AxisSpec.parse(drive_spec) if drive_spec else None,
        sqrt_n_axis=AxisSpec.parse(sqrt_n_spec) if sqrt_n_spec else None,
        p_values=_parse_p_values(p_spec) if p_spec else (),
        fixed=fixed,
    )
    count = run_sweep(config)
    print(f"wrote {count} rows ({config.quantity}) to {config.output}")
    return 0


def _params_from_args(args) -> ModelParams:
    return ModelParams.from_ratios(
        coupling_ratio=args.omega_a,
        drive_ratio=args.omega_l,
        phase=getattr(args, "phi", 0.0) or 0.0,
    )


def _cmd_rate(args) -> int:
    params = _params_from_args(args)
    state = DressedState(args.branch, args.n)
    if args.to is not None:
        if args.to not in allowed_final_indices(state, params):
            raise _UsageError(
                f"final index {args.to} is not reachable from "
                f"({state.branch},{state.n}) at omega_l={args.omega_l:g}"
            )
        value = partial_rate(state, args.to, params)
        print(f"rate[({state.branch},{state.n}) -> {args.to}] = {value:.12g}  (gamma0 units)")
        return 0
    table = total_rate(state, params)
    for record in table.transitions:
        print(
            f"-> ({record.final.branch},{record.final.n})  "
            f"rate = {record.rate_over_gamma0:.12g}  "
            f"photon_freq = {record.photon_freq:.12g}  (omega0 units)"
        )
    print(f"total[({state.branch},{state.n})] = {table.total_over_gamma0:.12g}  (gamma0 units)")
    return 0


def _cmd_overlap(args) -> int:
    params = _params_from_args(args)
    bra_sign = +1 if args.bra == "+" else -1
    if args.method == "bessel":
        if args.same:
            raise _UsageError("the asymptotic route only handles opposite ladders")
        value = overlap_bessel(args.ell, args.ell - args.n, params, bra_sign)
    else:
        ket_sign = bra_sign if args.same else None
        value = overlap_exact(args.ell, args.n, params, bra_sign, ket_sign)
    print(f"|overlap|   = {value.magnitude:.12g}")
    print(f"|overlap|^2 = {value.abs_squared:.12g}")
    print(f"ln|overlap| = {value.log_abs:.12g}")
    print(f"phase (rad) = {value.phase:.12g}")
    print(f"value       = {value.to_complex():.12g}")
    return 0


def _cmd_semiclassical(args) -> int:
    params = _params_from_args(args)
    totals = semiclassical_totals(args.n_bar, params)
    print(f"gamma_e = {totals.gamma_e:.12g}  (gamma0 units)")
    print(f"gamma_g = {totals.gamma_g:.12g}  (gamma0 units)")
    return 0


def _cmd_cascade(args) -> int:
    params = _params_from_args(args)
    start = DressedState(args.branch, args.n)
    trajectories = sample_ensemble(
        start,
        params,
        seed=args.seed,
        n_trajectories=args.trajectories,
        max_jumps=args.max_jumps,
        threads=args.threads or 1,
    )
    write_trajectory_log(trajectories, args.output)
    spectrum = emission_spectrum(trajectories, args.bin_width)
    jump_counts = [len(t.jumps) for t in trajectories]
    total_times = [t.jumps[-1][0] for t in trajectories if t.jumps]
    summary = {
        "trajectories": len(trajectories),
        "truncated": sum(t.truncated for t in trajectories),
        "mean_jumps": float(np.mean(jump_counts)) if jump_counts else 0.0,
        "mean_total_time": float(np.mean(total_times)) if total_times else 0.0,
        "total_photons": spectrum.total_photons,
        "spectrum_bin_width": args.bin_width,
        "spectrum": [
            [float(center), float(weight)]
            for center, weight in zip(spectrum.bin_centers, spectrum.weights)
            if weight > 0.0
        ],
    }
    if args.format == "json":
        print(json.dumps(summary, indent=1))
    else:
        print(f"trajectories = {summary['trajectories']}")
        print(f"truncated = {summary['truncated']}")
        print(f"mean_jumps = {summary['mean_jumps']:.6g}")
        print(f"mean_total_time = {summary['mean_total_time']:.6g}  (1/gamma0 units)")
        print(f"total_photons = {summary['total_photons']}")
        print("spectrum (center omega/omega0, weight):")
        for center, weight in summary["spectrum"]:
            print(f"  {center:.6g}, {weight:.6g}")
    return 0


def _cmd_gamma0(args) -> int:
    if (args.dipole is None) == (args.dipole_debye is None):
        raise _UsageError("give exactly one of --dipole (C m) or --dipole-debye")
    dipole = args.dipole if args.dipole is not None else args.dipole_debye * DEBYE
    value = gamma0_si(Gamma0Params(omega0=args.omega0, dipole=dipole))
    print(f"gamma0 = {value:.12g}  1/s")
    return 0


def _add_model_flags(parser: argparse.ArgumentParser, required: bool = True) -> None:
    parser.add_argument(
        "--omega-a", type=float, required=required,
        help="coupling magnitude over omega0",
    )
    parser.add_argument(
        "--omega-l", type=float, required=required,
        help="drive frequency over omega0",
    )
    parser.add_argument(
        "--phi", type=float, default=0.0, help="coupling phase in radians"
    )


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polartls",
        description=(
            "Emission and absorption rates of a longitudinally driven polar "
            "two-level emitter (dimensionless ratios; rates in gamma0 units)."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sweep = sub.add_parser("sweep", help="grid sweep to CSV/JSON")
    sweep.add_argument("--quantity", choices=SWEEP_QUANTITIES)
    sweep.add_argument("--config", help="declarative key=value config file")
    sweep.add_argument(
        "--omega-a", metavar="START,STOP,STEPS[,SCALE]",
        help="coupling axis spec (Omega_a/omega0)",
    )
    sweep.add_argument(
        "--omega-l", metavar="START,STOP,STEPS[,SCALE]",
        help="drive axis spec (omega_L/omega0)",
    )
    sweep.add_argument(
        "--sqrt-n", metavar="START,STOP,STEPS[,SCALE]",
        help="sqrt(n) axis spec (overlap_compare only)",
    )
    sweep.add_argument("--p-values", help="comma-separated channel indices")
    sweep.add_argument(
        "--fix", action="append", metavar="NAME=VALUE",
        help="pin a scalar parameter (phi, n_prime, n_bar, omega_a, omega_l)",
    )
    sweep.add_argument("--output", help="output file path")
    sweep.add_argument("--format", choices=("csv", "json"))
    sweep.add_argument("--threads", type=int)
    sweep.set_defaults(handler=_cmd_sweep)

    rate = sub.add_parser("rate", help="rate table or single partial rate")
    rate.add_argument("--branch", choices=("e", "g"), required=True)
    rate.add_argument("--n", type=int, required=True, help="initial ladder index")
    rate.add_argument("--to", type=int, help="final ladder index (partial rate)")
    _add_model_flags(rate)
    rate.set_defaults(handler=_cmd_rate)

    overlap = sub.add_parser("overlap", help="one cross-ladder overlap")
    overlap.add_argument("--ell", type=int, required=True, help="bra ladder index")
    overlap.add_argument("--n", type=int, required=True, help="ket ladder index")
    overlap.add_argument("--bra", choices=("+", "-"), default="+")
    ladders = overlap.add_mutually_exclusive_group()
    ladders.add_argument(
        "--opposite", dest="same", action="store_false",
        help="bra and ket on opposite ladders (default)",
    )
    ladders.add_argument(
        "--same", dest="same", action="store_true",
        help="bra and ket on the same ladder",
    )
    overlap.set_defaults(same=False)
    overlap.add_argument("--method", choices=("exact", "bessel"), default="exact")
    _add_model_flags(overlap)
    overlap.set_defaults(handler=_cmd_overlap)

    semi = sub.add_parser("semiclassical", help="large-index totals")
    semi.add_argument("--n-bar", type=float, required=True)
    _add_model_flags(semi)
    semi.set_defaults(handler=_cmd_semiclassical)

    cascade = sub.add_parser("cascade", help="cascade ensemble: log + summary")
    cascade.add_argument("--branch", choices=("e", "g"), required=True)
    cascade.add_argument("--n", type=int, required=True, help="starting ladder index")
    _add_model_flags(cascade)
    cascade.add_argument("--seed", type=int, required=True)
    cascade.add_argument("--trajectories", type=int, required=True)
    cascade.add_argument("--max-jumps", type=int, default=1000)
    cascade.add_argument("--output", required=True, help="trajectory log path")
    cascade.add_argument("--bin-width", type=float, default=0.05)
    cascade.add_argument("--format", choices=("csv", "json"), default="csv")
    cascade.add_argument("--threads", type=int, default=1)
    cascade.set_defaults(handler=_cmd_cascade)

    gamma0 = sub.add_parser("gamma0", help="absolute decay rate in SI units")
    gamma0.add_argument("--omega0", type=float, required=True, help="rad/s")
    gamma0.add_argument("--dipole", type=float, help="dipole moment in C m")
    gamma0.add_argument("--dipole-debye", type=float, help="dipole moment in debye")
    gamma0.set_defaults(handler=_cmd_gamma0)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.handler(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
