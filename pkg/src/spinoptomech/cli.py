"""Command-line front end: figure reproduction, sweeps, CSV emission.

Configuration is a flat ``key = value`` text file (``#`` comments allowed);
command-line flags of the form ``--key value`` override file entries, which
in turn override the per-figure presets and the built-in defaults.  The
defaults are the standard baseline: lam = kappa, omega_b = 2000*kappa,
g = 1e-5*omega_b, Omega = omega_b, gamma_a = 0.1*kappa, n_th = 0.1,
t1 = 0.25*pi.

All CSV output uses a mandatory header row, comma separators, LF line
endings and the shortest round-trip decimal representation of each double,
so identical configurations produce byte-identical files.

Exit codes: 0 success, 1 usage/config error, 2 domain error
(stability/validity), 3 internal invariant breach.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .closed_dynamics import amplitudes, concurrence_pure, concurrence_vs_photons
from .dispersive import (
    dispersive_shift,
    dispersive_validity,
    moment_oracle,
    variance_analytic,
    variance_steady,
)
from .errors import (
    CutoffTooSmall,
    InvariantBreach,
    NormalizationError,
    NotAState,
    ParameterInvalid,
    ResonantDivergence,
    StabilityViolation,
    StepTooLarge,
    ZeroFrequency,
)
from .frame import SystemParams, build_frame, rabi_period, rwa_ratio, stability_margin
from .open_dynamics import (
    concurrence_mixed,
    concurrence_trace,
    evolve,
    prepare_initial_state,
)

__all__ = ["main", "RunConfig", "ConfigError"]

FIGURE_IDS = ("fig2", "fig3a", "fig3b", "fig4", "fig5", "fig6a", "fig6b")
SWEEP_AXES = ("n", "t", "t1", "n_th")
SWEEP_QUANTITIES = (
    "concurrence_closed",
    "concurrence_open",
    "var_minus",
    "rwa_ratio",
    "chi",
)

#: Stability margins below this trigger a warning in `validate`.
MARGIN_WARN = 0.01

#: Number of points used for uniformly sampled time/sweep grids.
GRID_POINTS = 2001


class ConfigError(Exception):
    """Bad configuration file, key or value (CLI usage error, exit 1)."""


@dataclass(frozen=True)
class RunConfig:
    """All configuration keys with their baseline defaults."""

    lam: float = 1.0
    omega_b: float = 2000.0
    omega_a: float = 0.0
    g: float = 0.02  # 1e-5 * omega_b at the baseline
    Omega: float = 2000.0
    kappa: float = 1.0
    gamma_a: float = 0.1
    n_th: float = 0.1
    n: int = 0
    t1: float = 0.25 * math.pi
    t_end: float = 10.0
    dt: float | None = None  # None = automatic step selection
    n_grid: str = "0:24800:100"
    n_values: str = "0,24000"
    sample_stride: int = 100
    fock_cutoff: int = 6

    def system_params(self) -> SystemParams:
        return SystemParams(
            lam=self.lam,
            omega_b=self.omega_b,
            omega_a=self.omega_a,
            g=self.g,
            Omega=self.Omega,
            kappa=self.kappa,
            gamma_a=self.gamma_a,
            n_th=self.n_th,
            n=self.n,
        )


_FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(RunConfig)}

# Keys pinned per figure, applied below config-file and flag overrides.
_FIG_PRESETS: dict[str, dict[str, object]] = {
    "fig6a": {"n": 20000, "t_end": 5.0},
}


def _parse_value(key: str, raw: str) -> object:
    if key not in _FIELD_TYPES:
        raise ConfigError(f"unknown configuration key {key!r}")
    raw = raw.strip()
    try:
        if key in ("n", "sample_stride", "fock_cutoff"):
            return int(raw)
        if key in ("n_grid", "n_values"):
            return raw
        if key == "dt":
            return None if raw.lower() in ("auto", "none") else float(raw)
        return float(raw)
    except ValueError as exc:
        raise ConfigError(f"invalid value for {key!r}: {raw!r}") from exc


def _read_config_file(path: str) -> dict[str, object]:
    entries: dict[str, object] = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path!r}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        entries[key.strip()] = _parse_value(key.strip(), value)
    return entries


def _parse_int_list(spec: str, what: str) -> list[int]:
    """Parse 'a:b:step' (inclusive) or 'v1,v2,...' into an integer list."""
    spec = spec.strip()
    try:
        if ":" in spec:
            parts = spec.split(":")
            if len(parts) != 3:
                raise ValueError("expected start:stop:step")
            start, stop, step = (int(p) for p in parts)
            if step <= 0:
                raise ValueError("step must be > 0")
            return list(range(start, stop + 1, step))
        return [int(p) for p in spec.split(",") if p.strip() != ""]
    except ValueError as exc:
        raise ConfigError(f"invalid {what} {spec!r}: {exc}") from exc


def _parse_float_list(spec: str, what: str) -> list[float]:
    spec = spec.strip()
    try:
        if ":" in spec:
            parts = spec.split(":")
            if len(parts) != 3:
                raise ValueError("expected start:stop:step")
            start, stop, step = (float(p) for p in parts)
            if step <= 0:
                raise ValueError("step must be > 0")
            count = int(math.floor((stop - start) / step + 1e-9)) + 1
            return [start + i * step for i in range(count)]
        return [float(p) for p in spec.split(",") if p.strip() != ""]
    except ValueError as exc:
        raise ConfigError(f"invalid {what} {spec!r}: {exc}") from exc


def _build_config(args: argparse.Namespace, fig_id: str | None = None) -> RunConfig:
    values: dict[str, object] = {}
    if fig_id is not None:
        values.update(_FIG_PRESETS.get(fig_id, {}))
    if args.config is not None:
        values.update(_read_config_file(args.config))
    for key in _FIELD_TYPES:
        flag = getattr(args, f"cfg_{key}", None)
        if flag is not None:
            values[key] = _parse_value(key, flag)
    try:
        return RunConfig(**values)  # type: ignore[arg-type]
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


# ---------------------------------------------------------------------------
# CSV plumbing


def _fmt(value: object) -> object:
    """Normalize a cell so csv.writer emits the round-trip decimal form."""
    if isinstance(value, (bool, int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    return value


def _write_csv_files(
    outdir: str, files: dict[str, tuple[list[str], list[tuple]]]
) -> list[Path]:
    """Write all files, removing everything written if any write fails."""
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    try:
        for name, (header, rows) in files.items():
            path = out / name
            with open(path, "w", newline="", encoding="utf-8") as fh:
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(header)
                for row in rows:
                    writer.writerow([_fmt(v) for v in row])
            written.append(path)
    except BaseException:
        for path in written:
            path.unlink(missing_ok=True)
        raise
    return written


# ---------------------------------------------------------------------------
# Figure builders: compute everything first, write only afterwards, so a
# domain error never leaves partial output behind.


def _fig2(cfg: RunConfig) -> dict[str, tuple[list[str], list[tuple]]]:
    params = cfg.system_params()
    rows = []
    for n in _parse_int_list(cfg.n_grid, "n_grid"):
        frame = build_frame(dataclasses.replace(params, n=n))
        rows.append((n, frame.lambda_n))
    return {"fig2.csv": (["n", "lambda_n"], rows)}


def _fig3a(cfg: RunConfig) -> dict[str, tuple[list[str], list[tuple]]]:
    frame = build_frame(cfg.system_params())
    t_max = 2.0 * math.pi
    rows = []
    for i in range(GRID_POINTS):
        t = i * t_max / (GRID_POINTS - 1)
        rows.append((t, concurrence_pure(amplitudes(frame, t))))
    return {"fig3a.csv": (["T1", "concurrence"], rows)}


def _fig3b(cfg: RunConfig) -> dict[str, tuple[list[str], list[tuple]]]:
    params = cfg.system_params()
    n_values = _parse_int_list(cfg.n_grid, "n_grid")
    sweeps = [
        concurrence_vs_photons(params, t1, n_values)
        for t1 in (0.5 * math.pi, math.pi)
    ]
    for sweep in sweeps:
        for point in sweep:
            if point.error is not None:
                raise StabilityViolation(f"n = {point.n}: {point.error}")
    rows = [
        (pa.n, pa.concurrence, pb.concurrence)
        for pa, pb in zip(sweeps[0], sweeps[1])
    ]
    header = ["n", "concurrence_T1_half_pi", "concurrence_T1_pi"]
    return {"fig3b.csv": (header, rows)}


def _fig4(cfg: RunConfig) -> dict[str, tuple[list[str], list[tuple]]]:
    params = cfg.system_params()
    files: dict[str, tuple[list[str], list[tuple]]] = {}
    for n in _parse_int_list(cfg.n_values, "n_values"):
        params_n = dataclasses.replace(params, n=n)
        frame_n = build_frame(params_n)
        rho0 = prepare_initial_state(params, cfg.t1)
        trace = evolve(
            rho0, frame_n, params_n, cfg.t_end, dt=cfg.dt, stride=cfg.sample_stride
        )
        rows = [
            (s.t, s.rho11, s.rho33, s.rho44, abs(s.rho14)) for s in trace.samples
        ]
        files[f"fig4_n{n}.csv"] = (
            ["T", "rho11", "rho33", "rho44", "abs_rho14"],
            rows,
        )
    return files


def _fig5(cfg: RunConfig) -> dict[str, tuple[list[str], list[tuple]]]:
    n_values = _parse_int_list(cfg.n_values, "n_values")
    files: dict[str, tuple[list[str], list[tuple]]] = {}
    for panel, n_th in (("a", 0.0), ("b", 0.1)):
        params = dataclasses.replace(cfg.system_params(), n_th=n_th)
        for series in concurrence_trace(
            params, cfg.t1, cfg.t_end, n_values, dt=cfg.dt, stride=cfg.sample_stride
        ):
            rows = list(zip(series.times.tolist(), series.concurrence.tolist()))
            files[f"fig5{panel}_n{series.n}.csv"] = (["T", "concurrence"], rows)
    return files


def _fig6a(cfg: RunConfig) -> dict[str, tuple[list[str], list[tuple]]]:
    params = cfg.system_params()
    frame = build_frame(params)
    # Pick a step at or below the bound that lands GRID_POINTS uniform samples.
    chunks = GRID_POINTS - 1
    bound = 1e-3 / params.kappa if params.kappa > 0 else 1e-3
    per_chunk = max(1, math.ceil(cfg.t_end / (chunks * bound) - 1e-9))
    dt = cfg.t_end / (chunks * per_chunk)
    oracle = moment_oracle(params, frame, cfg.t_end, dt=dt, stride=per_chunk)
    rows = [
        (v.t, variance_analytic(params, frame, v.t).var_minus, v.var_minus)
        for v in oracle.variances
    ]
    header = ["T", "var_minus_analytic", "var_minus_oracle"]
    return {"fig6a.csv": (header, rows)}


def _fig6b(cfg: RunConfig) -> dict[str, tuple[list[str], list[tuple]]]:
    params = cfg.system_params()
    rows = []
    for n in _parse_int_list(cfg.n_grid, "n_grid"):
        params_n = dataclasses.replace(params, n=n)
        frame = build_frame(params_n)
        var0, _ = variance_steady(dataclasses.replace(params_n, n_th=0.0), frame)
        var1, _ = variance_steady(dataclasses.replace(params_n, n_th=0.1), frame)
        rows.append((n, var0, var1, 1.0))
    header = ["n", "var_ss_nth0", "var_ss_nth0.1", "threshold"]
    return {"fig6b.csv": (header, rows)}


_FIG_BUILDERS = {
    "fig2": _fig2,
    "fig3a": _fig3a,
    "fig3b": _fig3b,
    "fig4": _fig4,
    "fig5": _fig5,
    "fig6a": _fig6a,
    "fig6b": _fig6b,
}


# ---------------------------------------------------------------------------
# Sweep


def _sweep_value(cfg: RunConfig, axis: str, value: float, quantity: str) -> float:
    if axis == "n":
        cfg = dataclasses.replace(cfg, n=int(value))
    elif axis == "t":
        cfg = dataclasses.replace(cfg, t_end=float(value))
    elif axis == "t1":
        cfg = dataclasses.replace(cfg, t1=float(value))
    elif axis == "n_th":
        cfg = dataclasses.replace(cfg, n_th=float(value))
    params = cfg.system_params()
    frame = build_frame(params)
    if quantity == "rwa_ratio":
        return rwa_ratio(frame)
    if quantity == "chi":
        return dispersive_shift(frame)
    if quantity == "var_minus":
        return variance_steady(params, frame)[0]
    if quantity == "concurrence_closed":
        # Axis t moves the evaluation time; otherwise evaluate at t1.
        t_eval = float(value) if axis == "t" else cfg.t1
        return concurrence_pure(amplitudes(frame, t_eval))
    if quantity == "concurrence_open":
        rho0 = prepare_initial_state(params, cfg.t1)
        trace = evolve(
            rho0, frame, params, cfg.t_end, dt=cfg.dt, stride=cfg.sample_stride
        )
        return concurrence_mixed(trace.samples[-1])
    raise ConfigError(f"unknown quantity {quantity!r}")


def _run_sweep(
    cfg: RunConfig, axis: str, range_spec: str, quantity: str
) -> dict[str, tuple[list[str], list[tuple]]]:
    if axis == "n":
        values: list[float] = [float(v) for v in _parse_int_list(range_spec, "range")]
    else:
        values = _parse_float_list(range_spec, "range")
    if not values:
        raise ConfigError("empty sweep range")
    rows = []
    for value in sorted(values):
        axis_cell: object = int(value) if axis == "n" else value
        try:
            rows.append((axis_cell, _sweep_value(cfg, axis, value, quantity), ""))
        except (StabilityViolation, ResonantDivergence, ZeroFrequency) as exc:
            rows.append((axis_cell, "", str(exc)))
    header = [axis, quantity, "error"]
    return {f"sweep_{quantity}_vs_{axis}.csv": (header, rows)}


# ---------------------------------------------------------------------------
# Validate


def _run_validate(cfg: RunConfig, out=None) -> None:
    out = out if out is not None else sys.stdout
    params = cfg.system_params()
    margin = stability_margin(params)
    frame = build_frame(params)
    chi = "n/a (resonant)" if frame.chi is None else repr(frame.chi)
    try:
        period = repr(rabi_period(frame))
    except ZeroFrequency:
        period = "n/a (zero Rabi frequency)"
    lines = [
        f"n                   = {params.n}",
        f"r_n                 = {frame.r_n!r}",
        f"omega_n             = {frame.omega_n!r}",
        f"lambda_n            = {frame.lambda_n!r}",
        f"Delta               = {frame.Delta!r}",
        f"Omega_n             = {frame.Omega_n!r}",
        f"Omega_tilde_n       = {frame.Omega_tilde_n!r}",
        f"chi                 = {chi}",
        f"rabi_period         = {period}",
        f"rwa_ratio           = {rwa_ratio(frame)!r}",
        f"dispersive_validity = {dispersive_validity(frame, params.n_th)!r}",
        f"stability_margin    = {margin!r}",
    ]
    print("\n".join(lines), file=out)
    if margin < MARGIN_WARN:
        print(
            f"warning: stability margin {margin:g} is below {MARGIN_WARN:g}; "
            "the squeezed frame is close to the confinement boundary",
            file=out,
        )


# ---------------------------------------------------------------------------
# Entry point


def _add_common_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="PATH", help="key = value config file")
    group = parser.add_argument_group("configuration overrides")
    for key in _FIELD_TYPES:
        group.add_argument(
            f"--{key}", dest=f"cfg_{key}", metavar="VALUE", default=None
        )


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinoptomech",
        description="Photon-controlled spin-oscillator simulator (CSV output).",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    fig = sub.add_parser("fig", help="reproduce one figure's data as CSV")
    fig.add_argument("figure_id", choices=FIGURE_IDS)
    fig.add_argument("--out", required=True, metavar="DIR")
    _add_common_options(fig)

    sweep = sub.add_parser("sweep", help="sweep one axis and emit a CSV")
    sweep.add_argument("--axis", required=True, choices=SWEEP_AXES)
    sweep.add_argument(
        "--range",
        required=True,
        dest="range_spec",
        metavar="SPEC",
        help="'start:stop:step' (inclusive) or comma-separated values",
    )
    sweep.add_argument("--quantity", required=True, choices=SWEEP_QUANTITIES)
    sweep.add_argument("--out", required=True, metavar="DIR")
    _add_common_options(sweep)

    val = sub.add_parser("validate", help="print derived frame diagnostics")
    _add_common_options(val)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        if args.command == "validate":
            cfg = _build_config(args)
            _run_validate(cfg)
        elif args.command == "fig":
            cfg = _build_config(args, fig_id=args.figure_id)
            files = _FIG_BUILDERS[args.figure_id](cfg)
            for path in _write_csv_files(args.out, files):
                print(f"wrote {path}")
        elif args.command == "sweep":
            cfg = _build_config(args)
            files = _run_sweep(cfg, args.axis, args.range_spec, args.quantity)
            for path in _write_csv_files(args.out, files):
                print(f"wrote {path}")
        return 0
    except (ConfigError, ParameterInvalid, StepTooLarge) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (
        StabilityViolation,
        ResonantDivergence,
        ZeroFrequency,
        CutoffTooSmall,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (InvariantBreach, NotAState, NormalizationError) as exc:
        print(f"internal invariant breach: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
