/**
 * Favor-ledger trajectory figure: stage against signed balance (operator
 * A's perspective) with the +-credit-limit guides from the run config.
 */

import { Figure } from "./figure.js";
import { loadBalances, loadSummary } from "./report.js";

export function buildLedgerFigure(dir: string, mode = "combined"): Figure {
  const traj = loadBalances(dir, mode);
  const { creditLimitUnits } = loadSummary(dir);
  return {
    title: `Favor ledger balance, ${mode}`,
    xLabel: "stage",
    yLabel: "balance (favor units, A owes B positive)",
    series: [
      {
        label: mode,
        color: "#2ca02c",
        points: traj.stages.map((s, i) => [s, traj.balances[i]] as [number, number]),
      },
    ],
    guides: [
      { y: creditLimitUnits, label: `+D = ${creditLimitUnits}` },
      { y: -creditLimitUnits, label: `-D = ${creditLimitUnits}` },
    ],
  };
}
