"""Rate CDFs, percentile tables, improvement ratios and favor statistics.

The percentile is the linear-interpolation empirical quantile: for n
sorted samples the quantile at p percent sits at fractional rank
(n - 1) * p / 100 and interpolates linearly between the two closest
ranks. The method is fixed so reported numbers are reproducible across
implementations.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .harness import SimulationResult, StageResult
from .ran import Operator, OPERATORS


def percentile(samples, p: float) -> float:
    """Linear-interpolation empirical quantile, p in (0, 100)."""
    arr = np.asarray(samples, dtype=float)
    if arr.size == 0:
        raise ValueError("percentile of an empty sample set")
    if not (0.0 < p < 100.0):
        raise ValueError("p must be in the open interval (0, 100)")
    return float(np.percentile(arr, p, method="linear"))


def improvement(mode_samples, baseline_samples, p: float) -> float | None:
    """Percent quantile improvement over a baseline; None if undefined."""
    q_mode = percentile(mode_samples, p)
    q_base = percentile(baseline_samples, p)
    if q_base == 0.0:
        return None
    return 100.0 * (q_mode - q_base) / q_base


@dataclass(frozen=True)
class RateCdf:
    operator: Operator
    mode: str
    samples: np.ndarray  # sorted ascending

    @classmethod
    def from_samples(cls, operator: Operator, mode: str, samples) -> "RateCdf":
        return cls(operator, mode, np.sort(np.asarray(samples, dtype=float)))

    @property
    def n_samples(self) -> int:
        return int(self.samples.size)

    def points(self) -> tuple[np.ndarray, np.ndarray]:
        """(rate, cumulative probability) pairs; step heights k/n."""
        n = self.n_samples
        return self.samples, np.arange(1, n + 1) / n


def favor_stats(stage_results: list[StageResult]) -> dict:
    """Ask/grant counts per operator plus the balance trajectory."""
    asks = {op: 0 for op in OPERATORS}
    grants = {op: 0 for op in OPERATORS}
    for r in stage_results:
        for op in OPERATORS:
            if r.asks[op] is not None:
                asks[op] += 1
            if r.granted_by is op:
                grants[op] += 1
    trajectory = [r.balance for r in stage_results]
    return {
        "asks": {op.value: asks[op] for op in OPERATORS},
        "grants": {op.value: grants[op] for op in OPERATORS},
        "balance_trajectory": trajectory,
        "final_balance": trajectory[-1] if trajectory else 0,
        "max_abs_balance": max((abs(b) for b in trajectory), default=0),
    }


def outcome_census(stage_results: list[StageResult]) -> dict[str, int]:
    census: dict[str, int] = {}
    for r in stage_results:
        census[r.final_label] = census.get(r.final_label, 0) + 1
    return census


# ---------------------------------------------------------------------------
# file interfaces


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_stages_csv(path: Path, results_by_mode: dict[str, SimulationResult]) -> None:
    """Per-stage log; deterministic bytes for a fixed (config, seed)."""
    columns = [
        "mode",
        "stage",
        "n_ue_a",
        "n_ue_b",
        "proposal_a",
        "proposal_b",
        "one_shot",
        "final",
        "ask_a",
        "ask_b",
        "granted_by",
        "favor_units",
        "balance",
        "utility_a",
        "utility_b",
    ]
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(columns)
        for mode, result in results_by_mode.items():
            for r in result.stage_results:
                writer.writerow(
                    [
                        mode,
                        r.stage_index,
                        r.n_ues[Operator.A],
                        r.n_ues[Operator.B],
                        r.proposals[0],
                        r.proposals[1],
                        r.one_shot_label,
                        r.final_label,
                        r.asks[Operator.A].compact() if r.asks[Operator.A] else "",
                        r.asks[Operator.B].compact() if r.asks[Operator.B] else "",
                        r.granted_by.value if r.granted_by else "",
                        r.favor_units,
                        r.balance,
                        _fmt(r.utilities[Operator.A]),
                        _fmt(r.utilities[Operator.B]),
                    ]
                )


def write_rates_csv(path: Path, samples: np.ndarray) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["rate_bps"])
        for v in samples:
            writer.writerow([_fmt(float(v))])


def read_rates_csv(path: Path) -> np.ndarray:
    with open(path, "r", encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        header = next(reader)
        if header != ["rate_bps"]:
            raise ValueError(f"unexpected rates CSV header: {header}")
        return np.array([float(row[0]) for row in reader])


def write_cdf_csv(path: Path, cdf: RateCdf) -> None:
    rates, probs = cdf.points()
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["rate_bps", "cdf"])
        for r, p in zip(rates, probs):
            writer.writerow([_fmt(float(r)), _fmt(float(p))])


def build_summary(results_by_mode: dict[str, SimulationResult]) -> dict:
    """Percentiles, improvements vs no-sharing and favor counts per op/mode."""
    baseline = results_by_mode.get("no-sharing")
    entries = []
    for mode, result in results_by_mode.items():
        stats = favor_stats(result.stage_results)
        for op in OPERATORS:
            samples = result.rate_samples(op)
            degenerate = samples.size == 0
            entry = {
                "operator": op.value,
                "mode": mode,
                "n_samples": int(samples.size),
                "degenerate": degenerate,
                "p10": None if degenerate else percentile(samples, 10),
                "p50": None if degenerate else percentile(samples, 50),
                "favor_counts": {
                    "asks": stats["asks"][op.value],
                    "grants": stats["grants"][op.value],
                },
                "final_balance": stats["final_balance"],
                "max_abs_balance": stats["max_abs_balance"],
            }
            for p in (10, 50):
                key = f"improvement_vs_nosharing_p{p}"
                if baseline is None or mode == "no-sharing" or degenerate:
                    entry[key] = None
                else:
                    base_samples = baseline.rate_samples(op)
                    entry[key] = (
                        None
                        if base_samples.size == 0
                        else improvement(samples, base_samples, p)
                    )
            entries.append(entry)
    modes = list(results_by_mode)
    census = {
        mode: outcome_census(results_by_mode[mode].stage_results) for mode in modes
    }
    return {"results": entries, "outcome_census": census, "modes": modes}


def write_outputs(
    outdir: str | Path, results_by_mode: dict[str, SimulationResult]
) -> dict:
    """Write stages.csv, per-op rate and CDF CSVs, and summary.json."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    write_stages_csv(outdir / "stages.csv", results_by_mode)
    for mode, result in results_by_mode.items():
        for op in OPERATORS:
            samples = result.rate_samples(op)
            write_rates_csv(outdir / f"rates_{op.value}_{mode}.csv", samples)
            if samples.size:
                cdf = RateCdf.from_samples(op, mode, samples)
                write_cdf_csv(outdir / f"cdf_{op.value}_{mode}.csv", cdf)
    summary = build_summary(results_by_mode)
    any_cfg = next(iter(results_by_mode.values())).config
    summary["config"] = any_cfg.to_dict()
    summary["config"]["strategy"]["theta_g_init"] = (
        None
        if summary["config"]["strategy"]["theta_g_init"] == float("inf")
        else summary["config"]["strategy"]["theta_g_init"]
    )
    with open(outdir / "summary.json", "w", encoding="utf-8") as f:
        json.dump(summary, f, indent=2, sort_keys=True)
        f.write("\n")
    return summary
