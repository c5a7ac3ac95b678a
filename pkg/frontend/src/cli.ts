#!/usr/bin/env node
/**
 * Batch plotter for simulation report directories.
 *
 *   plot cdf    --in <dir> --op A|B [--modes m1,m2,...] [--xlog] --out <file.svg|png>
 *   plot ledger --in <dir> [--mode combined] --out <file.svg|png>
 */

import { writeFileSync } from "node:fs";

import { buildCdfFigure } from "./cdf.js";
import { buildLedgerFigure } from "./ledger.js";
import { Figure } from "./figure.js";
import { renderPng } from "./png.js";
import { renderSvg } from "./svg.js";
import { ALL_MODES } from "./report.js";

interface Args {
  command: string;
  flags: Map<string, string>;
  bools: Set<string>;
}

function parseArgs(argv: string[]): Args {
  if (argv.length === 0) {
    throw new Error("usage: plot cdf|ledger --in <dir> --out <file> [options]");
  }
  const [command, ...rest] = argv;
  const flags = new Map<string, string>();
  const bools = new Set<string>();
  for (let i = 0; i < rest.length; i++) {
    const arg = rest[i];
    if (!arg.startsWith("--")) {
      throw new Error(`unexpected argument '${arg}'`);
    }
    const name = arg.slice(2);
    if (name === "xlog") {
      bools.add(name);
    } else {
      const value = rest[++i];
      if (value === undefined) {
        throw new Error(`flag --${name} needs a value`);
      }
      flags.set(name, value);
    }
  }
  return { command, flags, bools };
}

function required(args: Args, name: string): string {
  const v = args.flags.get(name);
  if (v === undefined) {
    throw new Error(`missing required flag --${name}`);
  }
  return v;
}

export function writeFigure(fig: Figure, outPath: string): void {
  if (outPath.endsWith(".svg")) {
    writeFileSync(outPath, renderSvg(fig));
  } else if (outPath.endsWith(".png")) {
    writeFileSync(outPath, renderPng(fig));
  } else {
    throw new Error(`output must end in .svg or .png, got '${outPath}'`);
  }
}

export function run(argv: string[]): number {
  const args = parseArgs(argv);
  const outPath = required(args, "out");
  let fig: Figure;
  if (args.command === "cdf") {
    const dir = required(args, "in");
    const op = required(args, "op");
    const modes = args.flags.has("modes")
      ? args.flags.get("modes")!.split(",").filter((m) => m.length > 0)
      : [...ALL_MODES];
    fig = buildCdfFigure(dir, op, modes, args.bools.has("xlog"));
  } else if (args.command === "ledger") {
    const dir = required(args, "in");
    fig = buildLedgerFigure(dir, args.flags.get("mode") ?? "combined");
  } else {
    throw new Error(`unknown command '${args.command}' (expected cdf or ledger)`);
  }
  writeFigure(fig, outPath);
  console.log(`wrote ${outPath} (${fig.series.length} series)`);
  return 0;
}

const isMain =
  process.argv[1] !== undefined &&
  import.meta.url.endsWith(process.argv[1].split("/").pop() ?? "");
if (isMain) {
  try {
    process.exit(run(process.argv.slice(2)));
  } catch (err) {
    console.error(String(err instanceof Error ? err.message : err));
    process.exit(1);
  }
}
