"""Command-line harness: scenario orchestration and output emission.

    chemotaxlab <command> --config PATH [--out DIR] [--strict] [--jobs K]
                          [--no-figures]

Commands: check, simulate, envelope, entire, periodic, steady, sweep,
verify.  Exit codes: 0 success, 1 usage/config error, 2 hypothesis
violation (strict mode or operation precondition), 3 blow-up detected,
4 numerical failure.  All diagnostics go to stderr; results to stdout.
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import replace
from pathlib import Path

from . import acceptance, reporting
from .config import ScenarioConfig, load_config
from .entire import periodic_fixed_point, pullback_entire, steady_state
from .envelopes import integrate_envelope
from .errors import (BlowUpDetected, HypothesisViolated, LabError, MissingBlock,
                     NoConvergence, NotAutonomousCoefficients, NotPeriodicCoefficients,
                     OrderViolation, ParseError, ValidationError)
from .fieldio import field_csv_header, field_csv_rows, write_field
from .hypotheses import build_report, check_H2, check_H2_prime, neg, pos, sampled_extrema
from .pde import integrate

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_HYPOTHESIS = 2
EXIT_BLOWUP = 3
EXIT_NUMERICAL = 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="chemotaxlab",
                                     description="numerical laboratory for a chemotaxis system "
                                                 "with heterogeneous logistic sources")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, needs_config in (("check", True), ("simulate", True), ("envelope", True),
                               ("entire", True), ("periodic", True), ("steady", True),
                               ("sweep", True), ("verify", False)):
        sp = sub.add_parser(name)
        if needs_config:
            sp.add_argument("--config", required=True, help="scenario config file")
        sp.add_argument("--out", default=None, help="output directory (overrides config)")
        sp.add_argument("--strict", action="store_true",
                        help="treat hypothesis violations as errors (exit 2)")
        sp.add_argument("--jobs", type=int, default=None,
                        help="work-pool width (default: CHEMOTAXLAB_JOBS or cpu count)")
        sp.add_argument("--no-figures", action="store_true", help="skip figure rendering")
    return parser


def _out_dir(cfg: ScenarioConfig | None, args) -> Path:
    out = args.out or (cfg.out_dir if cfg is not None else "out")
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _existence_gate(cfg: ScenarioConfig, strict: bool) -> int | None:
    margin = check_H2(cfg.params())
    if margin <= 0:
        msg = f"global-existence margin is not positive ({margin:g})"
        if strict:
            print(f"error: {msg}", file=sys.stderr)
            return EXIT_HYPOTHESIS
        print(f"warning: {msg}; proceeding", file=sys.stderr)
    return None


def cmd_check(cfg: ScenarioConfig, args) -> int:
    out = _out_dir(cfg, args)
    min_window = cfg.check.min_window if cfg.check else None
    report = build_report(cfg.params(), min_window)
    reporting.write_text(out / "hypothesis_report.txt", report.to_keyvalues())
    reporting.write_csv(out / "hypothesis_report.csv", report.csv_header(), [report.csv_row()])
    reporting.write_csv(out / "l1_l2_series.csv", ["t", "L1", "L2"],
                        zip(report.ts, report.L1_series, report.L2_series))
    if not args.no_figures:
        reporting.hypothesis_figure(out / "l1_l2_series.png", report.ts,
                                    report.L1_series, report.L2_series)
    print(f"check: h2_margin={report.h2_margin:.6g} r1={report.r1:.6g} r2={report.r2:.6g} "
          f"window_avg={report.worst_window_average:.6g} -> {out}")
    if args.strict and report.h2_margin <= 0:
        print("error: strict mode and the global-existence margin is not positive", file=sys.stderr)
        return EXIT_HYPOTHESIS
    return EXIT_OK


def cmd_simulate(cfg: ScenarioConfig, args) -> int:
    blk = cfg.block_for("simulate")
    if cfg.n != cfg.grid.dim:
        raise ValidationError("n", f"simulation requires n == grid dim ({cfg.grid.dim}), got {cfg.n}")
    gate = _existence_gate(cfg, args.strict)
    if gate is not None:
        return gate
    out = _out_dir(cfg, args)
    u0 = blk.u0.build(cfg.grid, cfg.seed)
    traj = integrate(cfg.params(), u0, blk.t0, blk.t_end, cfg.ctrl, stride=blk.stride)
    reporting.write_csv(out / "trajectory.csv", traj.csv_header(), traj.csv_rows())
    if blk.dump_fields:
        for k, state in enumerate(traj.states):
            write_field(out / f"snap_{k}.bin", state.u)
    final = traj.final()
    write_field(out / "final_field.bin", final.u)
    reporting.write_csv(out / "final_field.csv", field_csv_header(cfg.grid),
                        field_csv_rows(final.u))
    if not args.no_figures:
        times = [s.t for s in traj.states]
        reporting.trajectory_figure(out / "trajectory.png", times,
                                    [s.u_min for s in traj.states],
                                    [s.u_max for s in traj.states],
                                    [s.mass for s in traj.states])
        reporting.field_figure(out / "final_field.png", final.u, title=f"u at t={final.t:g}")
    print(f"simulate: outcome={traj.outcome.kind} t={final.t:.6g} "
          f"u_max={final.u_max:.6g} mass={final.mass:.6g} -> {out}")
    if traj.outcome.kind == "blowup":
        return EXIT_BLOWUP
    if traj.outcome.kind == "step_failure":
        return EXIT_NUMERICAL
    return EXIT_OK


def cmd_envelope(cfg: ScenarioConfig, args) -> int:
    blk = cfg.block_for("envelope")
    gate = _existence_gate(cfg, args.strict)
    if gate is not None:
        return gate
    out = _out_dir(cfg, args)
    if blk.u0 is not None:
        u0 = blk.u0.build(cfg.grid, cfg.seed)
        ub0, uu0 = u0.max(), u0.min()
    else:
        ub0, uu0 = blk.u_bar0, blk.u_under0
    series = integrate_envelope(cfg.params(), ub0, uu0, blk.t0, blk.t_end)
    reporting.write_csv(out / "envelope.csv", series.csv_header(), series.csv_rows())
    if not args.no_figures:
        reporting.envelope_figure(out / "envelope.png", series.ts, series.u_bar, series.u_under)
    print(f"envelope: t_end={blk.t_end:g} u_bar={series.u_bar[-1]:.6g} "
          f"u_under={series.u_under[-1]:.6g} -> {out}")
    return EXIT_OK


def _write_approx(cfg: ScenarioConfig, args, approx, stem: str, out: Path) -> None:
    rows = []
    for t, f in zip(approx.anchor_times, approx.fields):
        vol = cfg.grid.cell_volume
        rows.append([t, f.min(), f.max(), vol * float(f.values.sum())])
    reporting.write_csv(out / f"{stem}_window.csv", ["t", "u_min", "u_max", "mass"], rows)
    for k, f in enumerate(approx.fields):
        write_field(out / f"{stem}_{k}.bin", f)
    lines = [f"kind={approx.kind}", f"residual={approx.residual!r}",
             f"floor={approx.floor!r}", f"ceiling={approx.ceiling!r}"]
    if approx.period is not None:
        lines.append(f"period={approx.period!r}")
    for k, v in sorted(approx.meta.items()):
        lines.append(f"{k}={v!r}")
    reporting.write_text(out / f"{stem}_report.txt", "\n".join(lines) + "\n")
    if not args.no_figures:
        reporting.field_figure(out / f"{stem}_profile.png", approx.fields[0],
                               title=f"{approx.kind} solution at anchor time")


def cmd_entire(cfg: ScenarioConfig, args) -> int:
    blk = cfg.block_for("entire")
    out = _out_dir(cfg, args)
    ctrl = cfg.ctrl if blk.dt is None else replace(cfg.ctrl, dt_init=blk.dt,
                                                   dt_min=min(cfg.ctrl.dt_min, blk.dt),
                                                   dt_max=max(cfg.ctrl.dt_max, blk.dt))
    approx = pullback_entire(cfg.params(), ctrl, n_max=blk.n_max, window=blk.window,
                             tol=blk.tol, start_value=blk.start_value)
    _write_approx(cfg, args, approx, "entire", out)
    print(f"entire: pullback n={approx.meta['n_used']} residual={approx.residual:.3e} "
          f"floor={approx.floor:.6g} ceiling={approx.ceiling:.6g} -> {out}")
    return EXIT_OK


def cmd_periodic(cfg: ScenarioConfig, args) -> int:
    blk = cfg.block_for("periodic")
    out = _out_dir(cfg, args)
    approx = periodic_fixed_point(cfg.params(), blk.period, cfg.ctrl,
                                  tol=blk.tol, max_iter=blk.max_iter)
    _write_approx(cfg, args, approx, "periodic", out)
    print(f"periodic: T={blk.period:g} iterations={approx.meta['iterations']} "
          f"residual={approx.residual:.3e} floor={approx.floor:.6g} -> {out}")
    return EXIT_OK


def cmd_steady(cfg: ScenarioConfig, args) -> int:
    blk = cfg.block_for("steady")
    out = _out_dir(cfg, args)
    approx = steady_state(cfg.params(), cfg.ctrl, tol=blk.tol, max_time=blk.max_time)
    write_field(out / "steady_field.bin", approx.fields[0])
    reporting.write_csv(out / "steady_field.csv", field_csv_header(cfg.grid),
                        field_csv_rows(approx.fields[0]))
    reporting.write_text(out / "steady_report.txt",
                         f"kind=steady\nresidual={approx.residual!r}\n"
                         f"floor={approx.floor!r}\nceiling={approx.ceiling!r}\n"
                         f"march_time={approx.meta['march_time']!r}\n")
    if not args.no_figures:
        reporting.field_figure(out / "steady_field.png", approx.fields[0], title="steady state")
    print(f"steady: residual={approx.residual:.3e} floor={approx.floor:.6g} "
          f"ceiling={approx.ceiling:.6g} -> {out}")
    return EXIT_OK


# ----------------------------------------------------------------- sweep

def _with_base(cfg: ScenarioConfig, name: str, value: float) -> ScenarioConfig:
    from .coefficients import CoefficientTerm, CoefficientTriple

    if name == "chi":
        return replace(cfg, chi=float(value))
    if name == "n":
        return replace(cfg, n=int(round(value)))
    which = 1 if name == "a1_base" else 2
    terms = list(cfg.triple.terms(which))
    replaced = False
    for i, term in enumerate(terms):
        if term.is_time_constant() and term.is_space_constant() and len(term.amps) == 1:
            terms[i] = CoefficientTerm.constant(float(value), term.modes)
            replaced = True
            break
    if not replaced:
        terms.insert(0, CoefficientTerm.constant(float(value)))
    fields = {"a0": cfg.triple.a0, "a1": cfg.triple.a1, "a2": cfg.triple.a2}
    fields["a1" if which == 1 else "a2"] = tuple(terms)
    triple = CoefficientTriple(lengths=cfg.triple.lengths,
                               declared_bounds=cfg.triple.declared_bounds, **fields)
    return replace(cfg, triple=triple)


def _sweep_cell(payload: tuple) -> list:
    """One sweep grid point; failures are recorded in the row, never raised."""
    cfg_path, overrides, t_end, stride = payload
    started = time.time()
    values = [v for _, v in overrides]
    try:
        cfg = load_config(cfg_path)
        for name, value in overrides:
            cfg = _with_base(cfg, name, value)
        p = cfg.params()
        h2 = check_H2(p)
        h2p_pos, h2p_dim = check_H2_prime(p)
        from .hypotheses import stability_margin_heterogeneous
        try:
            stab = stability_margin_heterogeneous(p)
        except LabError:
            stab = float("nan")
        u0 = cfg.sweep.u0.build(cfg.grid, cfg.seed)
        traj = integrate(p, u0, 0.0, t_end, cfg.ctrl, stride=stride)
        final_umax = traj.final().u_max
        if traj.outcome.kind == "blowup":
            cls = "blowup"
        elif traj.outcome.kind == "step_failure":
            cls = "failed"
        else:
            s = sampled_extrema(p)
            denom = float((s.inf[1] - p.omega_measure * neg(s.inf[2])).min()) - pos(p.chi)
            if h2 > 0 and denom > 0:
                bound = max(u0.max(), float(s.sup[0].max()) / denom)
                cls = "bounded" if final_umax <= bound * 1.001 else "growing"
            else:
                # empirical trend: compare the last max against the mid-run max
                mid = traj.states[max(0, int(0.6 * (len(traj.states) - 1)))].u_max
                cls = "growing" if final_umax > 1.2 * max(mid, 1e-300) else "bounded"
        return values + [h2, h2p_pos, h2p_dim, stab, cls, final_umax, time.time() - started]
    except Exception as exc:  # isolated: one bad cell never aborts the sweep
        nan = float("nan")
        return values + [nan, nan, nan, nan, "failed", nan, time.time() - started]


def cmd_sweep(cfg: ScenarioConfig, args, cfg_path: str) -> int:
    blk = cfg.block_for("sweep")
    out = _out_dir(cfg, args)
    name1, vals1 = blk.axis1
    axes = [(name1, v) for v in vals1]
    if blk.axis2 is not None:
        name2, vals2 = blk.axis2
        cells = [((name1, v1), (name2, v2)) for v1 in vals1 for v2 in vals2]
        names = [name1, name2]
    else:
        cells = [((name1, v1),) for v1 in vals1]
        names = [name1]
    payloads = [(cfg_path, list(cell), blk.t_end, blk.stride) for cell in cells]
    jobs = args.jobs or reporting.default_jobs()
    if jobs <= 1 or len(payloads) == 1:
        rows = [_sweep_cell(pl) for pl in payloads]
    else:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_sweep_cell, payloads))
    header = names + ["h2_margin", "h2_prime_margin_pos", "h2_prime_margin_dim",
                      "stability_margin", "classification", "final_u_max", "runtime_s"]
    reporting.write_csv(out / "sweep.csv", header, rows)
    if not args.no_figures:
        cls_idx = len(names) + 4
        reporting.sweep_figure(out / "sweep.png", name1, vals1, blk.axis2,
                               [r[cls_idx] for r in rows], [r[cls_idx + 1] for r in rows])
    counts = {}
    for r in rows:
        counts[r[len(names) + 4]] = counts.get(r[len(names) + 4], 0) + 1
    print(f"sweep: {len(rows)} cells {dict(sorted(counts.items()))} -> {out}")
    return EXIT_OK


def cmd_verify(args) -> int:
    out = _out_dir(None, args)
    jobs = args.jobs or reporting.default_jobs()
    results = acceptance.run_all(jobs=jobs)
    for r in results:
        print(r.line())
    reporting.write_csv(out / "acceptance_report.csv",
                        ["criterion", "name", "passed", "detail"],
                        [[r.index, r.name, r.passed, r.detail] for r in results])
    return EXIT_OK if all(r.passed for r in results) else EXIT_NUMERICAL


def _dispatch(args) -> int:
    if args.command == "verify":
        return cmd_verify(args)
    cfg = load_config(args.config)
    if args.command == "check":
        return cmd_check(cfg, args)
    if args.command == "simulate":
        return cmd_simulate(cfg, args)
    if args.command == "envelope":
        return cmd_envelope(cfg, args)
    if args.command == "entire":
        return cmd_entire(cfg, args)
    if args.command == "periodic":
        return cmd_periodic(cfg, args)
    if args.command == "steady":
        return cmd_steady(cfg, args)
    if args.command == "sweep":
        return cmd_sweep(cfg, args, args.config)
    raise ValidationError("command", f"unknown command {args.command}")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except (ParseError, ValidationError, MissingBlock, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (HypothesisViolated, NotPeriodicCoefficients, NotAutonomousCoefficients) as exc:
        print(f"hypothesis violation: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except BlowUpDetected as exc:
        print(f"blow-up: {exc}", file=sys.stderr)
        return EXIT_BLOWUP
    except (NoConvergence, OrderViolation) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except LabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
