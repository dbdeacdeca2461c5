import assert from "node:assert/strict";
import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import path from "node:path";
import test from "node:test";
import { fileURLToPath } from "node:url";

import { SWEEP_HEADER } from "../src/csv.js";
import { groupRows, renderBler, renderComplexity } from "../src/figure.js";
import { loadSweepCsv } from "../src/csv.js";
import { cScl } from "../src/theory.js";

const FIXTURES = path.join(path.dirname(fileURLToPath(import.meta.url)),
  "..", "..", "tests", "fixtures");

const REFINED = path.join(FIXTURES, "sweep_refined.csv");
const STAGE1 = path.join(FIXTURES, "sweep_stage1.csv");
const ML = path.join(FIXTURES, "sweep_ml.csv");
const REFINED_SEED2 = path.join(FIXTURES, "sweep_refined_seed2.csv");

test("bler figure renders all groups with axes and whiskers", () => {
  const svg = renderBler({
    csvPaths: [REFINED, STAGE1, ML], axis: "bler", outPath: "",
  });
  assert.ok(svg.startsWith("<svg "));
  assert.ok(svg.includes("BLER"));
  assert.ok(svg.includes("SNR per information bit (dB)"));
  assert.ok(svg.includes("ml seed=99"));
  assert.ok(svg.includes("scl4 r=2"));
  assert.ok((svg.match(/<path d="M /g) ?? []).length >= 3, "one path per curve");
});

test("replicate seeds appear as distinct curves", () => {
  const rows = loadSweepCsv(REFINED).concat(loadSweepCsv(REFINED_SEED2));
  const groups = groupRows(rows);
  assert.equal(groups.length, 2);
  const svg = renderBler({
    csvPaths: [REFINED, REFINED_SEED2], axis: "bler", outPath: "",
  });
  assert.ok(svg.includes("seed=99") && svg.includes("seed=1234"));
});

test("complexity figure overlays the stage-1 baseline from the model", () => {
  const svg = renderComplexity({
    csvPaths: [REFINED], axis: "ed_units", outPath: "",
  });
  const expected = cScl(4, 64).toPrecision(6);
  assert.ok(svg.includes(`scl4 baseline = ${expected}`),
    `legend should carry the 6-significant-digit baseline ${expected}`);
  assert.ok(svg.includes("stroke-dasharray"));
});

test("rendering is byte-stable", () => {
  const spec = { csvPaths: [REFINED, STAGE1, ML] as string[], axis: "bler" as const, outPath: "" };
  assert.equal(renderBler(spec), renderBler(spec));
  const cspec = { csvPaths: [REFINED], axis: "ed_units" as const, outPath: "" };
  assert.equal(renderComplexity(cspec), renderComplexity(cspec));
  assert.ok(!renderBler(spec).match(/\d{4}-\d{2}-\d{2}/), "no dates embedded");
});

test("renders the (256,16) comparison sweeps without error", () => {
  const paths = ["sweep_256_refined.csv", "sweep_256_scl16.csv", "sweep_256_ml.csv"]
    .map((name) => path.join(FIXTURES, name));
  const bler = renderBler({ csvPaths: paths, axis: "bler", outPath: "" });
  assert.ok(bler.includes("scl16 r=3 m=11 J=4 L=16"));
  const cx = renderComplexity({ csvPaths: paths, axis: "ed_units", outPath: "" });
  const expected = cScl(16, 256).toPrecision(6);
  assert.ok(cx.includes(`scl16 baseline = ${expected}`));
  assert.equal(expected, "170.667");
});

test("header-only input raises an explicit no-data error", () => {
  const dir = mkdtempSync(path.join(tmpdir(), "plotkit-"));
  const empty = path.join(dir, "empty.csv");
  writeFileSync(empty, SWEEP_HEADER.join(",") + "\n");
  assert.throws(() => renderBler({ csvPaths: [empty], axis: "bler", outPath: "" }),
    /no data/);
});

test("schema mismatch is reported as such", () => {
  const dir = mkdtempSync(path.join(tmpdir(), "plotkit-"));
  const bad = path.join(dir, "bad.csv");
  writeFileSync(bad, "snr,bler\n1.0,0.5\n");
  assert.throws(() => renderBler({ csvPaths: [bad], axis: "bler", outPath: "" }),
    /schema mismatch/);
});
