/**
 * Figure assembly: group sweep rows into curves and render BLER or
 * complexity figures.  Groups are keyed by (code, stage1, sphere radius,
 * filter size, iteration cap, path count, seed), so replicate seeds of one
 * configuration appear as separate overlapping curves.
 */

import { writeFileSync } from "node:fs";

import { loadSweepCsv, SweepRow } from "./csv.js";
import { Curve, Overlay, renderFigure } from "./svg.js";
import { stage1Baseline } from "./theory.js";

export interface FigureSpec {
  csvPaths: string[];
  axis: "bler" | "ed_units";
  outPath: string;
  title?: string;
}

interface Group {
  key: string;
  rows: SweepRow[];
}

export function groupRows(rows: SweepRow[]): Group[] {
  const groups = new Map<string, SweepRow[]>();
  for (const row of rows) {
    const key = row.stage1 === "ml"
      ? `${row.code} ml seed=${row.seed}`
      : `${row.code} ${row.stage1} r=${row.wsdR} m=${row.wsdM} J=${row.wsdJ} `
        + `L=${row.lInit} seed=${row.seed}`;
    const bucket = groups.get(key);
    if (bucket) {
      bucket.push(row);
    } else {
      groups.set(key, [row]);
    }
  }
  const out = [...groups.entries()].map(([key, groupRows]) => ({
    key,
    rows: [...groupRows].sort((a, b) => a.snrDb - b.snrDb),
  }));
  out.sort((a, b) => (a.key < b.key ? -1 : a.key > b.key ? 1 : 0));
  return out;
}

function loadAll(paths: string[]): SweepRow[] {
  if (paths.length === 0) {
    throw new Error("no CSV inputs given");
  }
  const rows = paths.flatMap((path) => loadSweepCsv(path));
  if (rows.length === 0) {
    throw new Error("no data: the CSV inputs contain only headers");
  }
  return rows;
}

export function renderBler(spec: FigureSpec): string {
  const groups = groupRows(loadAll(spec.csvPaths));
  const curves: Curve[] = groups.map((group) => ({
    label: group.key,
    points: group.rows.map((row) => ({ x: row.snrDb, y: row.bler })),
    whiskers: group.rows
      .filter((row) => row.bler > 0)
      .map((row) => ({ x: row.snrDb, lo: Math.max(row.blerLo, 1e-12), hi: row.blerHi })),
  }));
  return renderFigure(curves, [], {
    title: spec.title ?? "Block error rate",
    xLabel: "SNR per information bit (dB)",
    yLabel: "BLER",
    logY: true,
  });
}

export function renderComplexity(spec: FigureSpec): string {
  const groups = groupRows(loadAll(spec.csvPaths));
  const curves: Curve[] = groups.map((group) => ({
    label: group.key,
    points: group.rows.map((row) => ({ x: row.snrDb, y: row.edUnits })),
  }));
  const overlays: Overlay[] = [];
  const seen = new Set<string>();
  for (const group of groups) {
    const first = group.rows[0];
    const baseline = stage1Baseline(first.code, first.stage1);
    if (baseline === null) {
      continue;
    }
    const label = `${first.stage1} baseline = ${baseline.toPrecision(6)}`;
    if (!seen.has(label)) {
      seen.add(label);
      overlays.push({ label, y: baseline });
    }
  }
  return renderFigure(curves, overlays, {
    title: spec.title ?? "Average normalized complexity",
    xLabel: "SNR per information bit (dB)",
    yLabel: "ED units per trial",
    logY: true,
  });
}

export function plotBler(spec: FigureSpec): void {
  writeFileSync(spec.outPath, renderBler(spec));
}

export function plotComplexity(spec: FigureSpec): void {
  writeFileSync(spec.outPath, renderComplexity(spec));
}
