"""Seeded experiment execution and trajectory persistence."""
import csv
import io
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from asgo import __version__, linalg, problems
from asgo.errors import DivergenceError
from asgo.optim import OptimizerState, step

COLUMNS = (
    "step",
    "loss",
    "f_gap",
    "grad_frobenius",
    "grad_trace_norm",
    "dist_op",
    "dist_F",
    "update_frobenius",
    "kernel_residual",
    "wall_nanos",
)
DIVERGENCE_LIMIT = 1e12


def lr_at(schedule, base_lr, t, steps):
    """Learning rate for step ``t`` (0-based) of ``steps``."""
    if schedule.type == "constant":
        return base_lr
    warm = schedule.warmup_steps
    if t < warm:
        return base_lr * (t + 1) / warm
    span = max(steps - warm, 1)
    progress = min((t - warm) / span, 1.0)
    return schedule.final_lr + 0.5 * (base_lr - schedule.final_lr) * (1.0 + math.cos(math.pi * progress))


@dataclass
class RunRecord:
    seed: int
    rows: list = field(default_factory=list)
    diverged: bool = False
    final_loss: float = None
    final_f_gap: float = None
    header: dict = field(default_factory=dict)

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(COLUMNS)
        for row in self.rows:
            writer.writerow(["" if row.get(c) is None else _fmt(row[c]) for c in COLUMNS])
        return buf.getvalue()

    def summary(self):
        losses = [r["loss"] for r in self.rows]
        return {
            **self.header,
            "seed": self.seed,
            "rows": len(self.rows),
            "diverged": self.diverged,
            "final_loss": self.final_loss,
            "final_f_gap": self.final_f_gap,
            "avg_loss": float(np.mean(losses)) if losses else None,
        }


def _fmt(value):
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def _bad(*values):
    return any(v is not None and (not math.isfinite(v) or abs(v) > DIVERGENCE_LIMIT) for v in values)


def run_seed(config, seed):
    """One seeded run; never raises on divergence (the record says so)."""
    problem = problems.build(config.problem["name"], config.problem["params"], seed)
    cfg = config.optimizer
    params = problem.init(problems.generator(seed, "init"))
    w_star = problem.w_star  # may trigger a cached minimizer search
    f_star = problem.f_star
    rng = problems.generator(seed, "oracle")
    states = [OptimizerState() for _ in params]
    record = RunRecord(seed, header={"config_hash": config.digest(), "code_version": __version__})
    started = time.perf_counter_ns()
    for t in range(config.steps):
        loss = problem.loss(params)
        true_grads = problem.grad(params)
        if config.batch_size is None:
            grads = true_grads
        else:
            grads = problem.stoch_grad(params, config.batch_size, rng)
        lr = lr_at(config.schedule, cfg.lr, t, config.steps)
        new_params = []
        residual = None
        try:
            for layer, (w, g) in enumerate(zip(params, grads)):
                new, _ = step(cfg, states[layer], w, g, lr)
                new_params.append(new)
                if states[layer].kernel_residual is not None:
                    residual = max(residual or 0.0, states[layer].kernel_residual)
        except (DivergenceError, FloatingPointError) as exc:
            record.rows.append({"step": t, "loss": loss})
            record.diverged = True
            record.header["error"] = str(exc)
            return record
        update = math.sqrt(sum(float(np.sum((a - b) ** 2)) for a, b in zip(new_params, params)))
        gnorm = math.sqrt(sum(float(np.sum(g * g)) for g in true_grads))
        tnorm = sum(linalg.trace_norm(g) if np.any(g) else 0.0 for g in true_grads)
        row = {
            "step": t,
            "loss": loss,
            "f_gap": None if f_star is None else loss - f_star,
            "grad_frobenius": gnorm,
            "grad_trace_norm": tnorm,
            "update_frobenius": update,
            "kernel_residual": residual,
        }
        if w_star is not None and len(params) == 1:
            delta = params[0] - w_star[0]
            row["dist_op"] = linalg.spectral_norm(delta) if np.any(delta) else 0.0
            row["dist_F"] = float(np.linalg.norm(delta))
        if config.record_wall_time:
            row["wall_nanos"] = time.perf_counter_ns() - started
        diverged = _bad(loss, gnorm, update) or not all(np.all(np.isfinite(p)) for p in new_params)
        if t % config.record_every == 0 or diverged:
            record.rows.append(row)
        if diverged:
            record.diverged = True
            return record
        params = new_params
    record.final_loss = problem.loss(params)
    record.final_f_gap = None if f_star is None else record.final_loss - f_star
    if _bad(record.final_loss):
        record.diverged = True
    return record


def _run_one(args):
    config, seed = args
    return run_seed(config, seed)


def workers():
    try:
        return max(1, int(os.environ.get("ASGO_WORKERS", "1")))
    except ValueError:
        return 1


def run_all(config, seeds=None):
    """Run every seed, in a process pool when ``ASGO_WORKERS > 1``; sorted by seed."""
    seeds = sorted(config.seeds if seeds is None else seeds)
    jobs = [(config, s) for s in seeds]
    n = min(workers(), len(jobs))
    if n > 1:
        with ProcessPoolExecutor(n) as pool:
            records = list(pool.map(_run_one, jobs))
    else:
        records = [_run_one(j) for j in jobs]
    return sorted(records, key=lambda r: r.seed)


def write_records(config, records, out_dir=None):
    """One CSV per seed plus ``<name>-summary.json``; returns the summary dict."""
    out = os.fspath(out_dir or config.output_path)
    os.makedirs(out, exist_ok=True)
    for rec in records:
        with open(os.path.join(out, f"{config.name}-seed{rec.seed}.csv"), "w", newline="") as fh:
            fh.write(rec.to_csv())
    summary = {
        "name": config.name,
        "config_hash": config.digest(),
        "code_version": __version__,
        "config": config.to_dict(),
        "diverged": any(r.diverged for r in records),
        "seeds": [r.summary() for r in records],
    }
    finals = [r.final_f_gap if r.final_f_gap is not None else r.final_loss for r in records if not r.diverged]
    summary["mean_final"] = float(np.mean(finals)) if finals else None
    with open(os.path.join(out, f"{config.name}-summary.json"), "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return summary
