"""Harness report output: machine-readable JSON for CI, a delimited summary,
and a figure of per-suite outcomes."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .harness import SuiteResult


def write_report_files(results: list[SuiteResult], out_dir: str | Path) -> dict[str, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "json": out / "report.json",
        "csv": out / "report.csv",
        "png": out / "report.png",
    }

    doc = {
        "passed": all(r.passed for r in results),
        "suites": [r.to_obj() for r in results],
    }
    paths["json"].write_text(json.dumps(doc, indent=2, ensure_ascii=False))

    with paths["csv"].open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["suite", "trials", "failures", "duration_s", "status"])
        for r in results:
            writer.writerow(
                [r.name, r.trials, len(r.failures), f"{r.duration_s:.3f}",
                 "pass" if r.passed else "FAIL"]
            )

    _write_figure(results, paths["png"])
    return paths


def _write_figure(results: list[SuiteResult], path: Path):
    names = [r.name for r in results]
    trials = [r.trials for r in results]
    failures = [len(r.failures) for r in results]
    colors = ["#2a9d8f" if r.passed else "#e76f51" for r in results]

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.2))
    ax1.bar(names, trials, color=colors)
    ax1.set_ylabel("trials")
    ax1.set_title("suite size")
    ax1.set_yscale("log")
    ax2.bar(names, failures, color=colors)
    ax2.set_ylabel("failures")
    ax2.set_title("failures per suite")
    for ax in (ax1, ax2):
        ax.tick_params(axis="x", rotation=20)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
