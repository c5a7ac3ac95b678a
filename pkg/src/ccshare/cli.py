"""Command line front end.

    ccshare simulate --config cfg.json --mode all --seed 1 --stages 4000 --out results/
    ccshare simulate --scenario 1 --out results/
    ccshare report --in results/

``simulate`` runs one mode (or all four, paired on common random numbers)
and writes stages.csv, rates_<op>_<mode>.csv, cdf_<op>_<mode>.csv and
summary.json into the output directory. ``report`` rebuilds summary
percentiles from the rate CSVs already on disk.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import MODES, ScenarioConfig, scenario1, scenario2
from .harness import run_paired
from .metrics import improvement, percentile, read_rates_csv, write_outputs
from .ran import OPERATORS


def _build_config(args) -> ScenarioConfig:
    if args.config:
        cfg = ScenarioConfig.from_json(args.config)
    elif args.scenario == "1":
        cfg = scenario1()
    elif args.scenario == "2":
        cfg = scenario2()
    else:
        raise SystemExit("simulate needs --config FILE or --scenario 1|2")
    if args.seed is not None:
        cfg.seed = args.seed
    if args.stages is not None:
        cfg.n_stages = args.stages
    if args.mode != "all":
        cfg.mode = args.mode
    cfg.validate()
    return cfg


def _cmd_simulate(args) -> int:
    cfg = _build_config(args)
    modes = list(MODES) if args.mode == "all" else [cfg.mode]
    results = run_paired(cfg, modes)
    summary = write_outputs(args.out, results)
    for entry in summary["results"]:
        print(
            f"{entry['mode']:>16}  op {entry['operator']}  "
            f"n={entry['n_samples']:>6}  p10={entry['p10']}  p50={entry['p50']}"
        )
    print(f"wrote {Path(args.out) / 'summary.json'}")
    return 0


def _cmd_report(args) -> int:
    indir = Path(args.indir)
    rows = []
    for path in sorted(indir.glob("rates_*_*.csv")):
        _, op, mode = path.stem.split("_", 2)
        samples = read_rates_csv(path)
        if samples.size == 0:
            rows.append({"operator": op, "mode": mode, "p10": None, "p50": None})
            continue
        rows.append(
            {
                "operator": op,
                "mode": mode,
                "p10": percentile(samples, 10),
                "p50": percentile(samples, 50),
            }
        )
    baselines = {
        r["operator"]: r for r in rows if r["mode"] == "no-sharing" and r["p10"] is not None
    }
    for r in rows:
        base = baselines.get(r["operator"])
        if base is None or r["mode"] == "no-sharing" or r["p10"] is None:
            r["improvement_vs_nosharing_p10"] = None
            r["improvement_vs_nosharing_p50"] = None
        else:
            mode_samples = read_rates_csv(indir / f"rates_{r['operator']}_{r['mode']}.csv")
            base_samples = read_rates_csv(indir / f"rates_{r['operator']}_no-sharing.csv")
            r["improvement_vs_nosharing_p10"] = improvement(mode_samples, base_samples, 10)
            r["improvement_vs_nosharing_p50"] = improvement(mode_samples, base_samples, 50)
    print(json.dumps({"results": rows}, indent=2, sort_keys=True))
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="ccshare")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a scenario and write report files")
    sim.add_argument("--config", help="scenario config JSON")
    sim.add_argument("--scenario", choices=("1", "2"), help="built-in scenario preset")
    sim.add_argument("--mode", default="all", choices=MODES + ("all",))
    sim.add_argument("--seed", type=int)
    sim.add_argument("--stages", type=int)
    sim.add_argument("--out", required=True, help="output directory")
    sim.set_defaults(func=_cmd_simulate)

    rep = sub.add_parser("report", help="recompute percentiles from rate CSVs")
    rep.add_argument("--in", dest="indir", required=True, help="report directory")
    rep.set_defaults(func=_cmd_report)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
