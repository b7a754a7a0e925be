/**
 * Figure builders for the three harness CSV schemas.
 *
 * The plot layer never recomputes statistics: interval sweeps are averaged
 * over the replicate column (the only aggregation), the regime and stopping
 * files already contain means and are rendered as-is.
 */

import { writeFileSync } from "node:fs";
import { extname } from "node:path";

import { asNumber, distinct, meanBy, readCsv, requireColumns, Row, SchemaError } from "./csv.js";
import { METHOD_COLORS, PanelOpts, renderFigure, Series } from "./svg.js";

const KILO = 1e3; // interval lengths are displayed scaled by 10^3

function writeFigure(path: string, svg: string): void {
  if (extname(path).toLowerCase() !== ".svg") {
    throw new SchemaError(`unsupported output extension for "${path}" (use .svg)`);
  }
  writeFileSync(path, svg);
}

function colorFor(name: string, index: number): string {
  return METHOD_COLORS[name] ?? ["#e76f51", "#7b2cbf", "#118ab2", "#ef476f"][index % 4];
}

const INTERVALS_SCHEMA = [
  "scenario", "param", "n", "M", "rep", "method", "value", "covered", "mmax_true",
];

/** Mean interval length per method against the varying grid axis (n or M). */
export function plotIntervals(
  csvPath: string,
  groupBy: "M" | "n",
  outPath: string,
): void {
  if (groupBy !== "M" && groupBy !== "n") {
    throw new SchemaError(`group_by must be "M" or "n", got "${groupBy}"`);
  }
  const { header, rows } = readCsv(csvPath);
  requireColumns(csvPath, header, INTERVALS_SCHEMA);
  if (rows.length === 0) {
    throw new SchemaError(`${csvPath}: no data rows`);
  }
  const panels: PanelOpts[] = [];
  for (const scenarioKey of distinct(rows, "scenario")) {
    for (const paramKey of distinct(rows.filter((r) => r.scenario === scenarioKey), "param")) {
      const sub = rows.filter((r) => r.scenario === scenarioKey && r.param === paramKey);
      const means = meanBy(sub, ["method", groupBy], "value");
      const series: Series[] = distinct(sub, "method").map((method, i) => {
        const pts = [...means.values()]
          .filter((e) => e.key.method === method)
          .map((e) => ({ x: Number(e.key[groupBy]), y: e.mean * KILO }))
          .sort((a, b) => a.x - b.x);
        return {
          label: method,
          color: colorFor(method, i),
          x: pts.map((p) => p.x),
          y: pts.map((p) => p.y),
        };
      });
      panels.push({
        title: `${scenarioKey} (${paramKey})`,
        xLabel: groupBy === "M" ? "alphabet size M" : "sample size n",
        yLabel: "mean bound x 1000",
        series,
        logX: groupBy === "M",
      });
    }
  }
  writeFigure(outPath, renderFigure(panels, Math.min(3, panels.length)));
}

const REGIMES_SCHEMA = ["scenario", "param", "n", "M", "S_true", "threshold", "method", "mean_value"];

/** Bound lengths against the total mass, with the selection threshold marked. */
export function plotThreshold(csvPath: string, outPath: string): void {
  const { header, rows } = readCsv(csvPath);
  requireColumns(csvPath, header, REGIMES_SCHEMA);
  if (rows.length === 0) {
    throw new SchemaError(`${csvPath}: no data rows`);
  }
  const threshold = asNumber(rows[0], "threshold");
  const panels: PanelOpts[] = distinct(rows, "scenario").map((scenario) => {
    const sub = rows.filter((r) => r.scenario === scenario);
    const series: Series[] = distinct(sub, "method").map((method, i) => {
      const pts = sub
        .filter((r) => r.method === method)
        .map((r) => ({ x: asNumber(r, "S_true"), y: asNumber(r, "mean_value") * KILO }))
        .sort((a, b) => a.x - b.x);
      return {
        label: method,
        color: colorFor(method, i),
        x: pts.map((p) => p.x),
        y: pts.map((p) => p.y),
      };
    });
    return {
      title: scenario,
      xLabel: "total mass S",
      yLabel: "mean bound x 1000",
      series,
      vLines: [{ x: threshold, label: `threshold ${threshold.toFixed(2)}` }],
    };
  });
  writeFigure(outPath, renderFigure(panels, Math.min(3, panels.length)));
}

const STOPPING_SCHEMA = ["scenario", "policy", "q", "mean_nstop", "mean_missed", "type1", "mean_extra"];

/** Two-row grid: stopping size and missed-relevant fraction against the
 * contamination rate, one column per scenario, one line per policy. */
export function plotStopping(csvPath: string, outPath: string): void {
  const { header, rows } = readCsv(csvPath);
  requireColumns(csvPath, header, STOPPING_SCHEMA);
  if (rows.length === 0) {
    throw new SchemaError(`${csvPath}: no data rows`);
  }
  const scenarios = distinct(rows, "scenario");
  const policies = distinct(rows, "policy");
  const makeRow = (valueCol: string, yLabel: string): PanelOpts[] =>
    scenarios.map((scenario) => {
      const sub = rows.filter((r) => r.scenario === scenario);
      const series: Series[] = policies.map((policy, i) => {
        const pts = sub
          .filter((r) => r.policy === policy)
          .map((r) => ({ x: asNumber(r, "q"), y: asNumber(r, valueCol) }))
          .sort((a, b) => a.x - b.x);
        return {
          label: policy,
          color: colorFor(policy, i),
          x: pts.map((p) => p.x),
          y: pts.map((p) => p.y),
        };
      });
      return {
        title: `${scenario}: ${yLabel}`,
        xLabel: "contamination rate q",
        yLabel,
        series,
      };
    });
  const panels = [...makeRow("mean_nstop", "mean stopping size"),
                  ...makeRow("mean_missed", "mean missed fraction")];
  writeFigure(outPath, renderFigure(panels, scenarios.length));
}
