#!/usr/bin/env node
/**
 * Figure generation from harness CSV outputs.
 *
 * Usage:
 *   node dist/src/cli.js intervals --csv sweep.csv --group-by M --out fig1.svg
 *   node dist/src/cli.js threshold --csv regimes.csv --out fig4.svg
 *   node dist/src/cli.js stopping  --csv stopping.csv --out fig6.svg
 */

import { plotIntervals, plotStopping, plotThreshold } from "./plots.js";

function getFlag(args: string[], name: string): string | undefined {
  const i = args.indexOf(name);
  return i >= 0 && i + 1 < args.length ? args[i + 1] : undefined;
}

function need(args: string[], name: string): string {
  const v = getFlag(args, name);
  if (v === undefined) {
    throw new Error(`missing required flag ${name}`);
  }
  return v;
}

export function run(argv: string[]): void {
  const [command, ...rest] = argv;
  switch (command) {
    case "intervals": {
      const groupBy = need(rest, "--group-by");
      if (groupBy !== "M" && groupBy !== "n") {
        throw new Error(`--group-by must be M or n, got "${groupBy}"`);
      }
      plotIntervals(need(rest, "--csv"), groupBy, need(rest, "--out"));
      break;
    }
    case "threshold":
      plotThreshold(need(rest, "--csv"), need(rest, "--out"));
      break;
    case "stopping":
      plotStopping(need(rest, "--csv"), need(rest, "--out"));
      break;
    default:
      throw new Error(
        `unknown command "${command ?? ""}" (expected intervals | threshold | stopping)`,
      );
  }
}

const isMain = process.argv[1] !== undefined && import.meta.url.endsWith(
  process.argv[1].split("/").pop() ?? "",
);
if (isMain) {
  try {
    run(process.argv.slice(2));
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : err}`);
    process.exit(1);
  }
}
