"""Command-line interface.

Subcommands:
  tune      print design gains and the equivalent PI(D)F parameters
  figure N  reproduce experiment N (1-8) as CSV data plus an SVG plot
  sweep     run a custom plant-parameter step sweep
  verify    run the numerical equivalence/property suite

Exit codes: 0 ok, 1 verification failure, 2 bad arguments, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import configparser
import dataclasses
import io
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .adrc import TwoInputController, build_adrc, extract_cr_cy, tune_first_order, tune_second_order
from .analysis import (
    STEP_HORIZON_FACTOR,
    STEP_N_STEPS,
    PlantModel,
    SweepResult,
    gang_of_seven,
    step_sweep,
)
from .lti import log_grid
from .pid_equiv import (
    PidfParams,
    PifParams,
    build_equivalent_controller,
    build_pidf_controller,
    build_pif_controller,
    equivalent_params,
)
from .svg import Series, line_chart
from .verify import run_verification

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_BAD_ARGS = 2
EXIT_IO = 3

CSV_CAP = 1e6  # diverging traces are clamped to this magnitude on output

DEFAULT_SWEEPS = {
    (1, "K"): (0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0),
    (1, "T"): (0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0),
    (2, "K"): (0.1, 0.2, 0.5, 1.0, 2.0, 5.0),
    (2, "T"): (0.1, 0.2, 0.5, 1.0, 2.0, 5.0),
}

# figure id -> (kind, swept parameter or None, plant order)
FIGURES = {
    1: ("step", "K", 1),
    2: ("step", "T", 1),
    3: ("bode", None, 1),
    4: ("gang", None, 1),
    5: ("step", "K", 2),
    6: ("step", "T", 2),
    7: ("bode", None, 2),
    8: ("gang", None, 2),
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Resolved experiment parameters; round-trips losslessly through text."""

    order: int = 1
    ts: float = 1.0
    g: float = 10.0
    b0: float = 1.0
    plant_k: float = 1.0
    plant_t: float = 1.0
    plant_d: float = 1.0
    k_sweep: tuple[float, ...] | None = None
    t_sweep: tuple[float, ...] | None = None
    omega_min: float = 1e-2
    omega_max: float = 1e4
    omega_points: int = 600
    out_dir: str = "out"
    compare_pid: tuple[float, float, float, float, float] | None = None

    def validate(self) -> None:
        if self.order not in (1, 2):
            raise ValueError("order must be 1 or 2")
        for flag, value in (("ts", self.ts), ("g", self.g), ("b0", self.b0)):
            if value <= 0:
                raise ValueError(f"--{flag} must be > 0")
        if self.plant_t <= 0:
            raise ValueError("--plant-t must be > 0")
        if self.plant_d <= 0:
            raise ValueError("--plant-d must be > 0")
        for name, sweep in (("k_sweep", self.k_sweep), ("t_sweep", self.t_sweep)):
            if sweep is not None and len(sweep) == 0:
                raise ValueError(f"{name} must be nonempty")
        if not 0 < self.omega_min < self.omega_max:
            raise ValueError("need 0 < omega_min < omega_max")
        if self.omega_points < 2:
            raise ValueError("omega_points must be >= 2")
        if self.compare_pid is not None:
            if len(self.compare_pid) != 5:
                raise ValueError("--compare-pid needs kp,ki,kd,Tf,b")
            if self.compare_pid[3] <= 0:
                raise ValueError("--compare-pid Tf must be > 0")

    def to_text(self) -> str:
        cp = configparser.ConfigParser()
        cp["tuning"] = {
            "order": str(self.order),
            "ts": _fmt(self.ts),
            "g": _fmt(self.g),
            "b0": _fmt(self.b0),
        }
        cp["plant"] = {
            "k": _fmt(self.plant_k),
            "t": _fmt(self.plant_t),
            "d": _fmt(self.plant_d),
        }
        sweep = {}
        if self.k_sweep is not None:
            sweep["k_values"] = ",".join(_fmt(v) for v in self.k_sweep)
        if self.t_sweep is not None:
            sweep["t_values"] = ",".join(_fmt(v) for v in self.t_sweep)
        if sweep:
            cp["sweep"] = sweep
        cp["frequency"] = {
            "omega_min": _fmt(self.omega_min),
            "omega_max": _fmt(self.omega_max),
            "points": str(self.omega_points),
        }
        cp["output"] = {"dir": self.out_dir}
        if self.compare_pid is not None:
            cp["compare"] = {"pid": ",".join(_fmt(v) for v in self.compare_pid)}
        buf = io.StringIO()
        cp.write(buf)
        return buf.getvalue()

    @classmethod
    def from_text(cls, text: str) -> "ExperimentConfig":
        cp = configparser.ConfigParser()
        cp.read_string(text)
        kwargs = {}
        if cp.has_section("tuning"):
            sec = cp["tuning"]
            if "order" in sec:
                kwargs["order"] = sec.getint("order")
            for key in ("ts", "g", "b0"):
                if key in sec:
                    kwargs[key] = sec.getfloat(key)
        if cp.has_section("plant"):
            sec = cp["plant"]
            for key, field in (("k", "plant_k"), ("t", "plant_t"), ("d", "plant_d")):
                if key in sec:
                    kwargs[field] = sec.getfloat(key)
        if cp.has_section("sweep"):
            sec = cp["sweep"]
            if "k_values" in sec:
                kwargs["k_sweep"] = _parse_floats(sec["k_values"])
            if "t_values" in sec:
                kwargs["t_sweep"] = _parse_floats(sec["t_values"])
        if cp.has_section("frequency"):
            sec = cp["frequency"]
            if "omega_min" in sec:
                kwargs["omega_min"] = sec.getfloat("omega_min")
            if "omega_max" in sec:
                kwargs["omega_max"] = sec.getfloat("omega_max")
            if "points" in sec:
                kwargs["omega_points"] = sec.getint("points")
        if cp.has_section("output") and "dir" in cp["output"]:
            kwargs["out_dir"] = cp["output"]["dir"]
        if cp.has_section("compare") and "pid" in cp["compare"]:
            values = _parse_floats(cp["compare"]["pid"])
            if len(values) != 5:
                raise ValueError("compare pid needs exactly kp,ki,kd,Tf,b")
            kwargs["compare_pid"] = values
        return cls(**kwargs)


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def _parse_floats(text: str) -> tuple[float, ...]:
    items = [part.strip() for part in text.split(",") if part.strip()]
    return tuple(float(part) for part in items)


def _design_for(cfg: ExperimentConfig, order: int):
    tune = tune_first_order if order == 1 else tune_second_order
    return tune(cfg.ts, cfg.g, cfg.b0)


def _comparison_controller(values: tuple[float, ...]) -> TwoInputController:
    kp, ki, kd, tf_, b = values
    if kd == 0.0:
        return build_pif_controller(PifParams(kp=kp, ki=ki, Tf=tf_, b=b))
    # user supplies no filter damping, so the second-order measurement
    # filter defaults to critically damped
    return build_pidf_controller(PidfParams(kp=kp, ki=ki, kd=kd, Tf=tf_, d=1.0, b=b))


def _controllers(cfg: ExperimentConfig, order: int) -> dict[str, TwoInputController]:
    design = _design_for(cfg, order)
    ctrls = {
        "adrc": build_adrc(design),
        "equiv": build_equivalent_controller(equivalent_params(design)),
    }
    if cfg.compare_pid is not None:
        ctrls["pid"] = _comparison_controller(cfg.compare_pid)
    return ctrls


def _plant(cfg: ExperimentConfig, order: int) -> PlantModel:
    return PlantModel(
        order=order,
        K=cfg.plant_k,
        T=cfg.plant_t,
        D=cfg.plant_d if order == 2 else None,
    )


def _capped(values: np.ndarray) -> np.ndarray:
    v = np.nan_to_num(values, nan=CSV_CAP, posinf=CSV_CAP, neginf=-CSV_CAP)
    return np.clip(v, -CSV_CAP, CSV_CAP)


def _write_csv(path: Path, names: list[str], columns: list[np.ndarray]) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(",".join(names) + "\n")
        for row in zip(*columns):
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _step_columns(sweep: SweepResult) -> tuple[list[str], list[np.ndarray], list[Series]]:
    t = sweep.cases[0].table.t
    # CSV keeps every sample; the SVG gets a decimated copy to stay small
    stride = max(1, t.size // 1000)
    names = ["t"]
    columns = [t]
    series = []
    for value in sweep.values:
        for ctrl in sweep.controllers:
            case = sweep.case(value, ctrl)
            y = _capped(case.table.columns["y"])
            label = f"y_{ctrl}_{sweep.parameter}={value:g}"
            names.append(label)
            columns.append(y)
            series.append(Series(label, t[::stride], y[::stride]))
    return names, columns, series


def _figure_step(cfg: ExperimentConfig, order: int, parameter: str):
    values = (cfg.k_sweep if parameter == "K" else cfg.t_sweep) or DEFAULT_SWEEPS[(order, parameter)]
    sweep = step_sweep(
        _plant(cfg, order),
        parameter,
        values,
        _controllers(cfg, order),
        t_end=STEP_HORIZON_FACTOR * cfg.ts,
        n_steps=STEP_N_STEPS,
    )
    names, columns, series = _step_columns(sweep)
    markup = line_chart(
        series,
        title=f"Closed-loop step response, {parameter} sweep (order {order})",
        xlabel="t [s]",
        ylabel="y",
    )
    return names, columns, markup


def _figure_bode(cfg: ExperimentConfig, order: int):
    omega = log_grid(cfg.omega_min, cfg.omega_max, cfg.omega_points)
    names = ["omega"]
    columns = [omega]
    series = []
    for ctrl_name, ctrl in _controllers(cfg, order).items():
        c_r, c_y = extract_cr_cy(ctrl)
        for channel, tf in (("Cr", c_r), ("Cy", c_y)):
            values = np.asarray(tf(1j * omega), dtype=complex)
            mag = np.abs(values)
            phase = np.degrees(np.unwrap(np.angle(values)))
            label = f"{ctrl_name}_{channel}"
            names.extend([f"mag_{label}", f"phase_deg_{label}"])
            columns.extend([mag, phase])
            series.append(Series(label, omega, mag))
    markup = line_chart(
        series,
        title=f"Controller frequency responses (order {order})",
        xlabel="omega [rad/s]",
        ylabel="magnitude",
        xlog=True,
        ylog=True,
    )
    return names, columns, markup


def _figure_gang(cfg: ExperimentConfig, order: int):
    omega = log_grid(cfg.omega_min, cfg.omega_max, cfg.omega_points)
    plant = _plant(cfg, order)
    names = ["omega"]
    columns = [omega]
    series = []
    for ctrl_name, ctrl in _controllers(cfg, order).items():
        g7 = gang_of_seven(plant, ctrl)
        for fn_name, tf in g7.named().items():
            mag = np.abs(np.asarray(tf(1j * omega), dtype=complex))
            label = f"{fn_name}_{ctrl_name}"
            names.append(label)
            columns.append(mag)
            series.append(Series(label, omega, mag))
    markup = line_chart(
        series,
        title=f"Gang of seven magnitudes (order {order})",
        xlabel="omega [rad/s]",
        ylabel="magnitude",
        xlog=True,
        ylog=True,
    )
    return names, columns, markup


def compute_figure(fig_id: int, cfg: ExperimentConfig):
    """Columns and SVG markup for one experiment figure."""
    kind, parameter, order = FIGURES[fig_id]
    if kind == "step":
        return _figure_step(cfg, order, parameter)
    if kind == "bode":
        return _figure_bode(cfg, order)
    return _figure_gang(cfg, order)


def write_figure(fig_id: int, cfg: ExperimentConfig) -> list[Path]:
    """Write fig<id>.csv, fig<id>.svg, and the resolved config echo."""
    names, columns, markup = compute_figure(fig_id, cfg)
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / f"fig{fig_id}.csv"
    svg_path = out / f"fig{fig_id}.svg"
    _write_csv(csv_path, names, columns)
    svg_path.write_text(markup, newline="\n")
    cfg_path = out / "config_used.cfg"
    cfg_path.write_text(cfg.to_text(), newline="\n")
    return [csv_path, svg_path, cfg_path]


def _print_matrix(name: str, m: np.ndarray) -> None:
    body = np.array2string(
        np.atleast_2d(m),
        formatter={"float_kind": lambda v: format(v, ".10g")},
        separator=", ",
    )
    print(f"  {name} = {body}")


def cmd_tune(order: int, ts: float, g: float, b0: float) -> int:
    if order == 1:
        design = tune_first_order(ts, g, b0)
        params = equivalent_params(design)
        print(f"first-order ADRC design (T_s={_sig(ts)}, g={_sig(g)}, b0={_sig(b0)})")
        print(f"  K_P = {_sig(design.K_P)}")
        print(f"  l1  = {_sig(design.l1)}")
        print(f"  l2  = {_sig(design.l2)}")
        print("equivalent PI+F parameters (filtered measurement, set-point weight b)")
        print(f"  kp = {_sig(params.kp)}")
        print(f"  ki = {_sig(params.ki)}")
        print(f"  Tf = {_sig(params.Tf)}")
        print(f"  b  = {_sig(params.b)}")
        ctrl = build_pif_controller(params)
    else:
        design = tune_second_order(ts, g, b0)
        params = equivalent_params(design)
        print(f"second-order ADRC design (T_s={_sig(ts)}, g={_sig(g)}, b0={_sig(b0)})")
        print(f"  omega_cl = {_sig(design.omega_cl)}")
        print(f"  K_P = {_sig(design.K_P)}")
        print(f"  K_D = {_sig(design.K_D)}")
        print(f"  l1  = {_sig(design.l1)}")
        print(f"  l2  = {_sig(design.l2)}")
        print(f"  l3  = {_sig(design.l3)}")
        print("equivalent PID+F parameters (filtered measurement, set-point weight b)")
        print(f"  kp = {_sig(params.kp)}")
        print(f"  ki = {_sig(params.ki)}")
        print(f"  kd = {_sig(params.kd)}")
        print(f"  Tf = {_sig(params.Tf)}")
        print(f"  d  = {_sig(params.d)}")
        print(f"  b  = {_sig(params.b)}")
        ctrl = build_pidf_controller(params)
    print("state-space realization (inputs [r, y], output u)")
    _print_matrix("A", ctrl.ss.A)
    _print_matrix("B", ctrl.ss.B)
    _print_matrix("C", ctrl.ss.C)
    _print_matrix("D", ctrl.ss.D)
    return EXIT_OK


def _sig(v: float) -> str:
    return format(float(v), ".10g")


def cmd_figure(fig_id: int, cfg: ExperimentConfig) -> int:
    try:
        paths = write_figure(fig_id, cfg)
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    for path in paths:
        print(f"wrote {path}")
    return EXIT_OK


def cmd_sweep(cfg: ExperimentConfig, parameter: str, values: tuple[float, ...] | None) -> int:
    order = cfg.order
    resolved = values or (cfg.k_sweep if parameter == "K" else cfg.t_sweep) or DEFAULT_SWEEPS[(order, parameter)]
    sweep = step_sweep(
        _plant(cfg, order),
        parameter,
        resolved,
        _controllers(cfg, order),
        t_end=STEP_HORIZON_FACTOR * cfg.ts,
        n_steps=STEP_N_STEPS,
    )
    names, columns, series = _step_columns(sweep)
    markup = line_chart(
        series,
        title=f"Closed-loop step response, {parameter} sweep (order {order})",
        xlabel="t [s]",
        ylabel="y",
    )
    try:
        out = Path(cfg.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        _write_csv(out / f"sweep_{parameter}.csv", names, columns)
        (out / f"sweep_{parameter}.svg").write_text(markup, newline="\n")
        (out / "config_used.cfg").write_text(cfg.to_text(), newline="\n")
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    for case in sweep.cases:
        if not case.stable:
            print(f"note: unstable case {parameter}={case.value:g} controller={case.controller}")
    print(f"wrote {Path(cfg.out_dir) / f'sweep_{parameter}.csv'}")
    return EXIT_OK


def cmd_verify(cfg: ExperimentConfig, perturb_b0: float) -> int:
    checks = run_verification(ts=cfg.ts, g=cfg.g, b0=cfg.b0, perturb_b0=perturb_b0)
    failed = 0
    for check in checks:
        status = "PASS" if check.passed else "FAIL"
        if not check.passed:
            failed += 1
        print(f"{check.name}: residual={check.residual:.6e} tol={check.tol:.1e} {status}")
    print(f"{len(checks) - failed}/{len(checks)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_VERIFY_FAILED


def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=str, default=None, help="config file (flat key-value with sections)")
    parser.add_argument("--order", type=int, choices=(1, 2), default=None)
    parser.add_argument("--ts", type=float, default=None, help="desired settling time T_s")
    parser.add_argument("--g", type=float, default=None, help="observer pole multiplier")
    parser.add_argument("--b0", type=float, default=None, help="characteristic plant gain")
    parser.add_argument("--plant-k", type=float, default=None)
    parser.add_argument("--plant-t", type=float, default=None)
    parser.add_argument("--plant-d", type=float, default=None)
    parser.add_argument("--out", type=str, default=None, help="output directory")
    parser.add_argument(
        "--compare-pid",
        type=str,
        default=None,
        metavar="kp,ki,kd,Tf,b",
        help="extra user-supplied comparison controller",
    )


def _resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    if getattr(args, "config", None):
        path = Path(args.config)
        try:
            text = path.read_text()
        except OSError as exc:
            raise ValueError(f"--config file not readable: {exc}") from exc
        cfg = ExperimentConfig.from_text(text)
    else:
        cfg = ExperimentConfig()
    overrides = {}
    for flag, field in (
        ("order", "order"),
        ("ts", "ts"),
        ("g", "g"),
        ("b0", "b0"),
        ("plant_k", "plant_k"),
        ("plant_t", "plant_t"),
        ("plant_d", "plant_d"),
        ("out", "out_dir"),
    ):
        value = getattr(args, flag, None)
        if value is not None:
            overrides[field] = value
    if getattr(args, "compare_pid", None) is not None:
        values = _parse_floats(args.compare_pid)
        if len(values) != 5:
            raise ValueError("--compare-pid needs exactly kp,ki,kd,Tf,b")
        overrides["compare_pid"] = values
    cfg = dataclasses.replace(cfg, **overrides)
    cfg.validate()
    return cfg


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="adrcpid",
        description="Linear ADRC as a tuning rule for filtered 2DOF PI(D) control",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_tune = sub.add_parser("tune", help="print design gains and equivalent PI(D)F parameters")
    p_tune.add_argument("--order", type=int, choices=(1, 2), required=True)
    p_tune.add_argument("--ts", type=float, required=True)
    p_tune.add_argument("--g", type=float, required=True)
    p_tune.add_argument("--b0", type=float, default=1.0)

    p_fig = sub.add_parser("figure", help="reproduce experiment figure 1-8")
    p_fig.add_argument("id", type=int, choices=sorted(FIGURES), help="figure number")
    _add_common_flags(p_fig)

    p_sweep = sub.add_parser("sweep", help="custom plant-parameter step sweep")
    p_sweep.add_argument("--param", choices=("K", "T"), required=True)
    p_sweep.add_argument("--values", type=str, default=None, help="comma-separated plant values")
    _add_common_flags(p_sweep)

    p_verify = sub.add_parser("verify", help="run the numerical verification suite")
    _add_common_flags(p_verify)
    p_verify.add_argument(
        "--perturb-b0",
        type=float,
        default=1.0,
        help="scale b0 on the equivalence-check inputs only (self-test knob)",
    )

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else EXIT_OK

    try:
        if args.command == "tune":
            if args.ts <= 0:
                print("error: --ts must be > 0", file=sys.stderr)
                return EXIT_BAD_ARGS
            if args.g <= 0:
                print("error: --g must be > 0", file=sys.stderr)
                return EXIT_BAD_ARGS
            if args.b0 == 0:
                print("error: --b0 must be nonzero", file=sys.stderr)
                return EXIT_BAD_ARGS
            return cmd_tune(args.order, args.ts, args.g, args.b0)
        cfg = _resolve_config(args)
        if args.command == "figure":
            _, _, order = FIGURES[args.id]
            cfg = dataclasses.replace(cfg, order=order)
            return cmd_figure(args.id, cfg)
        if args.command == "sweep":
            values = _parse_floats(args.values) if args.values else None
            if values is not None and not values:
                print("error: --values must be nonempty", file=sys.stderr)
                return EXIT_BAD_ARGS
            return cmd_sweep(cfg, args.param, values)
        if args.command == "verify":
            return cmd_verify(cfg, args.perturb_b0)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_ARGS
    raise AssertionError(f"unhandled command {args.command!r}")


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
