import assert from "node:assert/strict";
import { existsSync, mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { test } from "node:test";

import { SchemaError } from "../src/csv.js";
import { plotIntervals, plotStopping, plotThreshold } from "../src/plots.js";
import { run } from "../src/cli.js";

const FIXTURES = join(import.meta.dirname, "..", "..", "test", "fixtures");
const out = mkdtempSync(join(tmpdir(), "plots-"));

function seriesCount(svg: string): number {
  return (svg.match(/data-series="/g) ?? []).length;
}

function panelCount(svg: string): number {
  return (svg.match(/data-panel="/g) ?? []).length;
}

test("interval sweep over M: one line per method, log x, y scaled by 1000", () => {
  const path = join(out, "intervals_M.svg");
  plotIntervals(join(FIXTURES, "intervals_by_M.csv"), "M", path);
  const svg = readFileSync(path, "utf-8");
  assert.equal(panelCount(svg), 1);
  assert.equal(seriesCount(svg), 3);
  for (const method of ["bonferroni", "bounded", "unbounded"]) {
    assert.match(svg, new RegExp(`data-series="${method}"`));
  }
  assert.match(svg, /mean bound x 1000/);
  assert.match(svg, /alphabet size M/);
});

test("interval sweep over n uses the sample-size axis", () => {
  const path = join(out, "intervals_n.svg");
  plotIntervals(join(FIXTURES, "intervals_by_n.csv"), "n", path);
  const svg = readFileSync(path, "utf-8");
  assert.match(svg, /sample size n/);
  assert.equal(seriesCount(svg), 3);
});

test("header-only sweep file is rejected and nothing is written", () => {
  const empty = join(out, "empty.csv");
  writeFileSync(
    empty,
    "scenario,param,n,M,rep,method,value,covered,mmax_true\n",
  );
  const target = join(out, "never.svg");
  assert.throws(() => plotIntervals(empty, "M", target), /no data rows/);
  assert.equal(existsSync(target), false);
});

test("schema mismatch names the missing column", () => {
  const bad = join(out, "bad.csv");
  writeFileSync(bad, "scenario,param,n,M,rep,method,value\nzipf,1,10,5,0,bounded,0.1\n");
  assert.throws(
    () => plotIntervals(bad, "M", join(out, "x.svg")),
    (err: unknown) =>
      err instanceof SchemaError && /missing column "covered"/.test(err.message),
  );
});

test("regime comparison marks the selection threshold", () => {
  const path = join(out, "threshold.svg");
  plotThreshold(join(FIXTURES, "regimes.csv"), path);
  const svg = readFileSync(path, "utf-8");
  assert.equal(panelCount(svg), 3); // zipf, geometric, homogeneous
  assert.equal(seriesCount(svg), 9); // three methods per scenario panel
  const ref = svg.match(/data-refline="([0-9.e+-]+)"/);
  assert.ok(ref, "threshold reference line present");
  assert.ok(Math.abs(Number(ref![1]) - 15.4634) < 0.005);
  assert.match(svg, /threshold 15\.46/);
});

test("stopping grid renders two rows of scenario panels from the CSV q values", () => {
  const path = join(out, "stopping.svg");
  plotStopping(join(FIXTURES, "stopping.csv"), path);
  const svg = readFileSync(path, "utf-8");
  assert.equal(panelCount(svg), 4); // 2 scenarios x (stopping size, missed fraction)
  assert.equal(seriesCount(svg), 12); // 3 policies per panel
  assert.match(svg, /mean stopping size/);
  assert.match(svg, /mean missed fraction/);
  // every q value present in the file appears as a tick
  assert.match(svg, /data-xtick="0"/);
  assert.match(svg, /data-xtick="0.005"/);
});

test("non-svg output extension is rejected", () => {
  assert.throws(
    () => plotThreshold(join(FIXTURES, "regimes.csv"), join(out, "fig.pdf")),
    /use \.svg/,
  );
});

test("cli dispatches and validates flags", () => {
  const path = join(out, "cli.svg");
  run(["threshold", "--csv", join(FIXTURES, "regimes.csv"), "--out", path]);
  assert.ok(existsSync(path));
  assert.throws(() => run(["intervals", "--csv", "x.csv", "--out", "y.svg"]), /--group-by/);
  assert.throws(() => run(["bogus"]), /unknown command/);
});
