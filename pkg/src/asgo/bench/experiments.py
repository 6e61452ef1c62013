"""Multi-config comparison and hyperparameter sweeps."""
import csv
import itertools
import json
import logging
import math
import os
from dataclasses import replace

import numpy as np

from asgo.bench.config import ConfigError
from asgo.bench.runner import run_all, write_records
from asgo.optim import OptimizerConfig

log = logging.getLogger(__name__)


def _final_score(records):
    """Mean over seeds of the final f_gap (final loss when f* is unknown); inf if any seed diverged."""
    if any(r.diverged for r in records):
        return math.inf
    vals = [r.final_f_gap if r.final_f_gap is not None else r.final_loss for r in records]
    return float(np.mean(vals))


def _aggregate(records, column="loss"):
    """Per-step mean and standard error across seeds, over steps every seed recorded."""
    by_step = {}
    for rec in records:
        for row in rec.rows:
            if row.get(column) is not None:
                by_step.setdefault(row["step"], []).append(row[column])
    steps = sorted(s for s, v in by_step.items() if len(v) == len(records))
    mean, stderr = [], []
    for s in steps:
        v = np.array(by_step[s])
        mean.append(float(v.mean()))
        stderr.append(float(v.std(ddof=1) / math.sqrt(len(v))) if len(v) > 1 else 0.0)
    return steps, mean, stderr


def compare(configs, out_dir):
    """Run every config and write aligned per-step loss statistics side by side."""
    if not configs:
        raise ConfigError("compare: need at least one config")
    first = configs[0]
    for cfg in configs[1:]:
        if cfg.problem != first.problem:
            raise ConfigError(f"{cfg.name}: problem differs from {first.name}")
        if cfg.steps != first.steps:
            raise ConfigError(f"{cfg.name}: steps={cfg.steps} but {first.name} has steps={first.steps}")
    labels = []
    for cfg in configs:
        label = cfg.name
        k = 2
        while label in labels:
            label = f"{cfg.name}-{k}"
            k += 1
        labels.append(label)

    columns = {}
    finals = {}
    step_sets = []
    for label, cfg in zip(labels, configs):
        records = run_all(cfg)
        steps, mean, stderr = _aggregate(records)
        columns[label] = dict(zip(steps, zip(mean, stderr)))
        step_sets.append(set(steps))
        score = _final_score(records)
        finals[label] = score if math.isfinite(score) else None
    steps = sorted(set.intersection(*step_sets))

    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "compare.csv"), "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["step"] + [f"{l}_{stat}" for l in labels for stat in ("loss_mean", "loss_stderr")])
        for s in steps:
            row = [s]
            for l in labels:
                row += [repr(columns[l][s][0]), repr(columns[l][s][1])]
            writer.writerow(row)
    result = {
        "labels": labels,
        "problem": first.problem,
        "steps": first.steps,
        "final": finals,
        "series": {l: {"step": steps, "loss_mean": [columns[l][s][0] for s in steps],
                       "loss_stderr": [columns[l][s][1] for s in steps]} for l in labels},
    }
    with open(os.path.join(out_dir, "compare.json"), "w") as fh:
        json.dump(result, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return result


def grid_cells(config):
    """Distinct optimizer settings of the grid, in a fixed order; duplicates are dropped with a warning."""
    grid = config.grid or {}
    keys = sorted(grid)
    cells, seen = [], set()
    for values in itertools.product(*(grid[k] for k in keys)):
        cell = tuple(zip(keys, values))
        marker = json.dumps(cell, sort_keys=True)
        if marker in seen:
            log.warning("duplicate grid cell %s dropped", dict(cell))
            continue
        seen.add(marker)
        cells.append(dict(cell))
    if len(cells) > config.grid_cap:
        raise ConfigError(f"grid: {len(cells)} cells exceed grid_cap={config.grid_cap}")
    return cells or [{}]


def cell_config(config, cell):
    opt = config.optimizer.to_dict()
    opt.update(cell)
    try:
        optimizer = OptimizerConfig.from_dict(opt)
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"grid cell {cell}: {exc}") from exc
    return replace(config, optimizer=optimizer, grid=None)


def sweep(config, out_dir=None, write=True):
    """Run every grid cell and rank cells by mean final f_gap (lower first)."""
    cells = grid_cells(config)
    out_dir = out_dir or os.path.join(config.output_path, f"{config.name}-sweep")
    ranked = []
    for i, cell in enumerate(cells):
        cfg = cell_config(config, cell)
        records = run_all(cfg)
        if write:
            write_records(cfg, records, os.path.join(out_dir, f"cell-{i:03d}"))
        ranked.append({"cell": i, "params": cell, "score": _final_score(records),
                       "diverged": any(r.diverged for r in records)})
    ranked.sort(key=lambda r: (r["score"], r["cell"]))
    for rank, entry in enumerate(ranked, 1):
        entry["rank"] = rank
        if not math.isfinite(entry["score"]):
            entry["score"] = None  # diverged; JSON has no infinity
    if write:
        os.makedirs(out_dir, exist_ok=True)
        with open(os.path.join(out_dir, "ranking.json"), "w") as fh:
            json.dump({"name": config.name, "ranking": ranked}, fh, indent=2, sort_keys=True)
            fh.write("\n")
        keys = sorted({k for r in ranked for k in r["params"]})
        with open(os.path.join(out_dir, "ranking.csv"), "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["rank", "cell"] + keys + ["score", "diverged"])
            for r in ranked:
                writer.writerow([r["rank"], r["cell"]] + [r["params"].get(k, "") for k in keys]
                                + ["" if r["score"] is None else repr(r["score"]), r["diverged"]])
    return ranked
