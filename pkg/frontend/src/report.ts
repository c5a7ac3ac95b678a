/**
 * Readers for a simulation report directory: per-mode CDF CSVs, the
 * per-stage log and summary.json.
 */

import { readFileSync } from "node:fs";
import { join } from "node:path";

import { numericColumn, readCsv, stringColumn } from "./csv.js";

export const ALL_MODES = [
  "no-sharing",
  "one-shot-only",
  "combined",
  "full-cooperation",
] as const;

export interface CdfSeries {
  mode: string;
  operator: string;
  rates: number[]; // bit/s, ascending
  cdf: number[]; // cumulative probability, matching rates
}

export function loadCdf(dir: string, operator: string, mode: string): CdfSeries {
  const path = join(dir, `cdf_${operator}_${mode}.csv`);
  const table = readCsv(path);
  return {
    mode,
    operator,
    rates: numericColumn(table, "rate_bps", path),
    cdf: numericColumn(table, "cdf", path),
  };
}

export interface BalanceTrajectory {
  mode: string;
  stages: number[];
  balances: number[];
}

export function loadBalances(dir: string, mode: string): BalanceTrajectory {
  const path = join(dir, "stages.csv");
  const table = readCsv(path);
  const modes = stringColumn(table, "mode", path);
  const stages = numericColumn(table, "stage", path);
  const balances = numericColumn(table, "balance", path);
  const out: BalanceTrajectory = { mode, stages: [], balances: [] };
  for (let i = 0; i < modes.length; i++) {
    if (modes[i] === mode) {
      out.stages.push(stages[i]);
      out.balances.push(balances[i]);
    }
  }
  if (out.stages.length === 0) {
    throw new Error(`no '${mode}' rows in ${path}`);
  }
  return out;
}

export interface SummaryInfo {
  nStages: number;
  creditLimitUnits: number;
}

/** Credit limit of null in the config resolves to half the horizon. */
export function loadSummary(dir: string): SummaryInfo {
  const path = join(dir, "summary.json");
  let parsed: any;
  try {
    parsed = JSON.parse(readFileSync(path, "utf8"));
  } catch {
    throw new Error(`missing or invalid summary: ${path}`);
  }
  const nStages = parsed?.config?.n_stages;
  if (typeof nStages !== "number") {
    throw new Error(`summary ${path} lacks config.n_stages`);
  }
  const configured = parsed?.config?.strategy?.credit_limit_units;
  const creditLimitUnits =
    typeof configured === "number" ? configured : Math.max(1, Math.floor(nStages / 2));
  return { nStages, creditLimitUnits };
}
