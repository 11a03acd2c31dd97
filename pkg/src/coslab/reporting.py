"""Output writers: JSONL experiment logs, CSV summaries, rendered figures.

Every file opens with a header embedding the tool version, the schema
version, and the full parameter echo of the producing command, so a result
file is self-describing.  Figures are rendered non-interactively alongside
the delimited output.
"""

from __future__ import annotations

import json
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .ensemble import SCHEMA_VERSION, ExperimentRecord, ScalingFit  # noqa: E402

TOOL_VERSION = "0.1.0"

CSV_COLUMNS = ("n", "m", "trials", "mean", "stderr")


def file_header(command: str, params: dict) -> dict:
    return {
        "version": TOOL_VERSION,
        "schema": SCHEMA_VERSION,
        "command": command,
        "params": params,
    }


def write_jsonl(path, command: str, params: dict, records) -> None:
    """Header line followed by one JSON line per experiment record."""
    with open(path, "w") as fh:
        fh.write(json.dumps(file_header(command, params), sort_keys=True) + "\n")
        for rec in records:
            fh.write(json.dumps(rec.to_dict(), sort_keys=True) + "\n")


def read_jsonl(path) -> list:
    """Records from a JSONL log; the header line is recognized and skipped."""
    out = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            if "command" in obj and "kind" not in obj:
                continue
            out.append(
                ExperimentRecord(
                    kind=obj["kind"],
                    params=obj["params"],
                    seed=obj["seed"],
                    trials=obj["trials"],
                    mean=obj["mean"],
                    stderr=obj["stderr"],
                    per_trial=tuple(obj["per_trial"]) if "per_trial" in obj else None,
                    schema=obj.get("schema", SCHEMA_VERSION),
                )
            )
    return out


def write_csv(path, command: str, params: dict, records) -> None:
    """One summary row per cell; the echo rides in a leading '#' comment."""
    with open(path, "w") as fh:
        fh.write("# " + json.dumps(file_header(command, params), sort_keys=True) + "\n")
        fh.write(",".join(CSV_COLUMNS) + "\n")
        for rec in records:
            n = rec.params.get("n", "")
            m = rec.params.get("m", "")
            fh.write(
                "%s,%s,%d,%.17g,%.17g\n" % (n, m, rec.trials, rec.mean, rec.stderr)
            )


def render_mc_figure(path, records, title: str = "") -> None:
    """Mean with stderr bars against m, one line per n, log-log axes."""
    groups = defaultdict(list)
    for rec in records:
        groups[rec.params.get("n")].append(rec)
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    for n, recs in sorted(groups.items(), key=lambda kv: (kv[0] is None, kv[0])):
        recs = sorted(recs, key=lambda r: r.params.get("m", 0))
        ms = [r.params.get("m", 0) for r in recs]
        means = [r.mean for r in recs]
        errs = [r.stderr for r in recs]
        label = "n=%s" % n if n is not None else "all"
        ax.errorbar(ms, means, yerr=errs, marker="o", capsize=3, label=label)
    ax.set_xscale("log")
    if all(rec.mean > 0 for rec in records):
        ax.set_yscale("log")
    ax.set_xlabel("m")
    ax.set_ylabel("mean")
    if title:
        ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_fit_figure(path, fit: ScalingFit) -> None:
    """Measured cell means against the fitted model, with the y = x guide."""
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    model = [c["model"] for c in fit.cells]
    mean = [c["mean"] for c in fit.cells]
    ax.scatter(model, mean)
    lo = min(min(model), min(mean))
    hi = max(max(model), max(mean))
    ax.plot([lo, hi], [lo, hi], linestyle="--", linewidth=1.0)
    ax.set_xlabel("model: c1 n log(m)/sqrt(m) + c2 m")
    ax.set_ylabel("measured mean zeros")
    ax.set_title("c1=%.4g  c2=%.4g" % (fit.c1, fit.c2))
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
