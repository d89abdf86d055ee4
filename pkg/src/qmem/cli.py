"""Command-line front end: ``qmem <command> ...``.

Every command writes plain CSV/JSON files (atomically) and prints a short
summary. Outputs never contain timestamps, so a fixed seed gives identical
bytes on every invocation.
"""

import argparse
import json
import os
import sys
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional

import numpy as np

from . import baselines, hyperopt, readout, reservoir, tasks, tomography
from .errors import DataFileError, DomainError
from .memristor import ExpMovingAverage, Frozen, MovingAverage

SCHEMA = 1


def write_atomic(path, text):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dump_json(obj):
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


@dataclass
class RunReport:
    task: str
    config: dict
    split: dict
    seed: int
    mse_train: float
    mse_test: float
    clamp_events: int
    artifact_paths: List[str] = field(default_factory=list)
    readout: dict = field(default_factory=dict)
    rank_deficient: bool = False
    task_meta: dict = field(default_factory=dict)
    schema: int = SCHEMA

    def to_dict(self):
        return dict(self.__dict__)

    def to_json(self):
        return dump_json(self.to_dict())

    @classmethod
    def from_json(cls, text):
        d = json.loads(text)
        if d.get("schema") != SCHEMA:
            raise DomainError(f"unsupported report schema {d.get('schema')!r}")
        return cls(**d)


def parse_feedback(text):
    """``ema:m_d``, ``ma:m,a,b`` or ``frozen:R``."""
    kind, _, arg = text.partition(":")
    try:
        if kind == "ema":
            return ExpMovingAverage(float(arg))
        if kind == "ma":
            parts = [float(v) for v in arg.split(",")]
            m = int(parts[0])
            if m != parts[0] or len(parts) > 3:
                raise ValueError
            return MovingAverage(m, *parts[1:])
        if kind == "frozen":
            return Frozen(float(arg) if arg else 0.5)
    except (ValueError, TypeError, DomainError) as exc:
        raise argparse.ArgumentTypeError(f"bad feedback spec {text!r}: {exc}") from None
    raise argparse.ArgumentTypeError(f"bad feedback spec {text!r}; use ema:m_d, ma:m,a,b or frozen:R")


def parse_int_list(text):
    out = []
    for part in text.split(","):
        lo, sep, hi = part.partition("-")
        out.extend(range(int(lo), int(hi) + 1) if sep else [int(lo)])
    if not out:
        raise argparse.ArgumentTypeError("empty list")
    return out


def parse_float_list(text):
    return [float(v) for v in text.split(",") if v]


def _dataset(args, seed):
    if args.task == "narma":
        return tasks.narma(args.length or 1000, seed)
    if args.task == "mackey-glass":
        return tasks.mackey_glass(args.length or 1000)
    if args.task == "santa-fe":
        length = None if args.length is None else args.length + 1
        return tasks.santa_fe_load(args.data, args.offset, length)
    return tasks.monomial(args.n)


def _config(args, rule, seed):
    shots = getattr(args, "shots", None)
    if args.task == "monomial":
        params = getattr(args, "params", None)
        if params:
            hp = hyperopt.HyperParams(**json.loads(Path(params).read_text())["params"])
            cfg = hp.config()
            if rule is not None:
                cfg = reservoir.ReservoirConfig(**{**cfg.__dict__, "rule": rule})
        else:
            cfg = reservoir.ReservoirConfig(rule=rule or Frozen(0.5))
        overrides = {"shots": shots, "seed": seed}
    else:
        cfg = reservoir.preset(args.task, rule)
        overrides = {"shots": shots, "seed": seed}
    if getattr(args, "coupling", None):
        overrides["coupling"] = args.coupling
    d = {**cfg.__dict__, **overrides}
    return reservoir.ReservoirConfig(**d)


def _evaluate(ds, cfg):
    fm = reservoir.run(ds.inputs, cfg)
    model, tr, te, y_hat = readout.evaluate(fm, ds.targets, ds.split)
    return fm, model, tr, te, y_hat


def cmd_run(args):
    out = Path(args.out)
    ds = _dataset(args, args.seed)
    cfg = _config(args, args.feedback, args.seed)
    fm, model, tr, te, y_hat = _evaluate(ds, cfg)
    pred = ["t,y_true,y_pred\n"] + [f"{t},{y:.17g},{p:.17g}\n"
                                     for t, (y, p) in enumerate(zip(ds.targets, y_hat))]
    paths = [str(out / "report.json"), str(out / "features.csv"), str(out / "predictions.csv")]
    meta = dict(ds.meta)
    if args.task == "monomial":
        meta["grid_order"] = "ascending"
    report = RunReport(
        task=args.task, config=cfg.to_dict(), split=ds.split.to_dict(), seed=args.seed,
        mse_train=tr, mse_test=te, clamp_events=fm.clamp_events, artifact_paths=paths,
        readout=model.to_dict(), rank_deficient=model.rank_deficient, task_meta=meta,
    )
    write_atomic(out / "features.csv", fm.to_csv())
    write_atomic(out / "predictions.csv", "".join(pred))
    write_atomic(out / "report.json", report.to_json())
    print(f"{args.task}: mse_train={tr:.4e} mse_test={te:.4e} clamp_events={fm.clamp_events}")
    return report


def _mse_row(label, values):
    v = np.asarray(values, dtype=np.float64)
    std = f"{np.std(v, ddof=1):.17g}" if v.size > 1 else ""
    pct = np.percentile(v, [10, 50, 90])
    return (f"{label},{v.mean():.17g},{std},{pct[0]:.17g},{pct[1]:.17g},{pct[2]:.17g},"
            f"{v.size}\n")


def sweep_memory(args):
    """Test MSE per memory decay; returns (csv text, {m: mean}, frozen mean)."""
    lines = ["m,mean_mse,std_mse,p10,p50,p90,runs\n"]
    means = {}
    seeds = [args.seed + i for i in range(args.runs)]
    data = {s: _dataset(args, s) for s in seeds}
    for m in args.m:
        vals = [_evaluate(data[s], _config(args, ExpMovingAverage(m), s))[3] for s in seeds]
        means[m] = float(np.mean(vals))
        lines.append(_mse_row(str(m), vals))
    frozen = [_evaluate(data[s], _config(args, Frozen(0.5), s))[3] for s in seeds]
    lines.append(_mse_row("NM", frozen))
    return "".join(lines), means, float(np.mean(frozen))


def cmd_sweep_memory(args):
    text, means, frozen = sweep_memory(args)
    write_atomic(args.out, text)
    best = min(means, key=means.get)
    print(f"best m={best} mean_mse={means[best]:.4e} (frozen {frozen:.4e})")


def table1(runs, seed):
    rows = baselines.baseline_suite(lambda s: tasks.narma(1000, s), runs=runs, base_seed=seed)
    cfg = reservoir.preset("narma")
    qmem = []
    for i in range(runs):
        ds = tasks.narma(1000, seed + i)
        qmem.append(_evaluate(ds, cfg)[3])
    rows.append(baselines.SuiteRow("QMEM", np.array(qmem)))
    return rows


def cmd_table1(args):
    rows = table1(args.runs, args.seed)
    text = baselines.format_table(rows)
    if args.out:
        write_atomic(args.out, baselines.suite_csv(rows))
    sys.stdout.write(text)


def cmd_baselines(args):
    rows = baselines.baseline_suite(lambda s: _dataset(args, s), runs=args.runs, base_seed=args.seed,
                                    predictor=args.predictor)
    if args.out:
        write_atomic(args.out, baselines.suite_csv(rows))
    sys.stdout.write(baselines.format_table(rows))


def lagplot(args):
    ds = _dataset(args, args.seed)
    tau = args.tau or (10 if args.task == "mackey-glass" else 1)
    cfg = _config(args, None, args.seed)
    y_mem = _evaluate(ds, cfg)[4]
    y_frz = _evaluate(ds, cfg.frozen())[4]
    w = ds.split.washout
    cols = [ds.targets[w:], y_mem[w:], y_frz[w:]]
    lines = ["t,truth_x,truth_y,memristor_x,memristor_y,frozen_x,frozen_y\n"]
    for t in range(cols[0].size - tau):
        vals = ",".join(f"{c[t]:.17g},{c[t + tau]:.17g}" for c in cols)
        lines.append(f"{t + w},{vals}\n")
    return "".join(lines), tau


def cmd_lagplot(args):
    text, tau = lagplot(args)
    write_atomic(args.out, text)
    print(f"wrote {args.out} (tau={tau})")


def cmd_tomography(args):
    text = tomography.grid_csv(args.x, args.r, args.shots, args.seed)
    if args.out:
        write_atomic(args.out, text)
    sys.stdout.write(text)


def cmd_hyperopt(args):
    out = Path(args.out)
    adam = hyperopt.AdamConfig(lr=args.lr, iters=args.iters,
                               burn_in=min(hyperopt.AdamConfig.burn_in, args.iters))
    lines = ["n,mse_test_feedback,mse_test_frozen,mse_ratio,abs_error_ratio,m\n"]
    for n in args.n:
        fb, fr, res_fb, res_fr = hyperopt.compare(n, adam=adam, restarts=args.restarts,
                                                  seed=args.seed)
        split = tasks.monomial(n).split
        r_mse, r_abs = hyperopt.accuracy_ratios(fb, fr, split)
        for tag, res, ev in (("feedback", res_fb, fb), ("frozen", res_fr, fr)):
            payload = res.to_dict()
            payload.update(n=n, mse_train=ev.mse_train, mse_test=ev.mse_test,
                           clamp_events=ev.clamp_events, grid_order="ascending")
            write_atomic(out / f"params_n{n}_{tag}.json", dump_json(payload))
        lines.append(f"{n},{fb.mse_test:.17g},{fr.mse_test:.17g},{r_mse:.17g},{r_abs:.17g},"
                     f"{fb.params.m}\n")
        print(f"n={n}: test mse {fb.mse_test:.3e} (feedback) vs {fr.mse_test:.3e} (frozen); "
              f"mse ratio {r_mse:.1f}, mean |error| ratio {r_abs:.2f}")
    write_atomic(out / "summary.csv", "".join(lines))


def build_parser():
    p = argparse.ArgumentParser(prog="qmem", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def task_args(sp, tasks_allowed=tasks.TASKS):
        sp.add_argument("task", choices=tasks_allowed)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--length", type=int, default=None, help="series length (pairs)")
        sp.add_argument("--offset", type=int, default=0, help="Santa Fe excerpt start")
        sp.add_argument("--data", default=None, help="Santa Fe data file")
        sp.add_argument("--n", type=int, default=4, help="monomial exponent")
        sp.add_argument("--coupling", choices=reservoir.COUPLINGS, default=None)

    sp = sub.add_parser("run", help="run one task and write a report")
    task_args(sp)
    sp.add_argument("--feedback", type=parse_feedback, default=None)
    sp.add_argument("--shots", type=int, default=None)
    sp.add_argument("--params", default=None, help="hyperopt JSON for the monomial task")
    sp.add_argument("--out", default="qmem-run")
    sp.set_defaults(func=cmd_run)

    ts = ("narma", "mackey-glass", "santa-fe")
    sp = sub.add_parser("sweep-memory", help="test MSE versus memory decay")
    task_args(sp, ts)
    sp.add_argument("--m", type=parse_int_list, default=list(range(1, 21)))
    sp.add_argument("--runs", type=int, default=50)
    sp.add_argument("--shots", type=int, default=None)
    sp.add_argument("--out", default="sweep.csv")
    sp.set_defaults(func=cmd_sweep_memory)

    sp = sub.add_parser("table1", help="classical baselines and QMEM on NARMA")
    sp.add_argument("--runs", type=int, default=100)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_table1)

    sp = sub.add_parser("baselines", help="classical baseline suite for a task")
    task_args(sp, ts)
    sp.add_argument("--runs", type=int, default=100)
    sp.add_argument("--predictor", choices=("input", "output"), default="input")
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_baselines)

    sp = sub.add_parser("lagplot", help="(s_t, s_t+tau) pairs for truth and predictions")
    task_args(sp, ts)
    sp.add_argument("--tau", type=int, default=None)
    sp.add_argument("--out", default="lag.csv")
    sp.set_defaults(func=cmd_lagplot)

    sp = sub.add_parser("tomography", help="reconstructed purity over an (x, R) grid")
    sp.add_argument("--x", type=parse_float_list, default=[0.1, 0.5, 0.9])
    sp.add_argument("--r", type=parse_float_list, default=[0.0, 0.5, 1.0])
    sp.add_argument("--shots", type=int, default=None)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_tomography)

    sp = sub.add_parser("hyperopt", help="optimise the monomial device with and without feedback")
    sp.add_argument("--n", type=parse_int_list, default=[4])
    sp.add_argument("--restarts", type=int, default=8)
    sp.add_argument("--iters", type=int, default=500)
    sp.add_argument("--lr", type=float, default=0.4)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", default="qmem-hyperopt")
    sp.set_defaults(func=cmd_hyperopt)
    return p


def main(argv: Optional[List[str]] = None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except (DomainError, DataFileError, FileNotFoundError) as exc:
        print(f"qmem: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
