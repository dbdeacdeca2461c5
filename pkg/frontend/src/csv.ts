/**
 * Strict reader for sweep CSVs.  The schema is a fixed contract; any header
 * deviation or non-numeric value is an error, never a silent coercion.
 */

import { readFileSync } from "node:fs";

export const SWEEP_HEADER = [
  "code", "stage1", "wsd_r", "wsd_m", "wsd_J", "L_init", "snr_db", "trials",
  "errors", "bler", "bler_lo", "bler_hi", "p_act", "ed_units", "avg_iters",
  "seed",
] as const;

export interface SweepRow {
  code: string;
  stage1: string;
  wsdR: number;
  wsdM: number;
  wsdJ: number;
  lInit: number;
  snrDb: number;
  trials: number;
  errors: number;
  bler: number;
  blerLo: number;
  blerHi: number;
  pAct: number;
  edUnits: number;
  avgIters: number;
  seed: number;
  /** Untouched source cells, for exact round-trips. */
  raw: string[];
}

export class CsvError extends Error {}

function num(cell: string, column: string, line: number): number {
  if (cell.trim() === "" || cell.trim() !== cell) {
    throw new CsvError(`line ${line}: empty or padded value in ${column}`);
  }
  const value = Number(cell);
  if (!Number.isFinite(value)) {
    throw new CsvError(`line ${line}: ${column} is not a finite number: ${cell}`);
  }
  return value;
}

function int(cell: string, column: string, line: number): number {
  const value = num(cell, column, line);
  if (!Number.isInteger(value)) {
    throw new CsvError(`line ${line}: ${column} must be an integer: ${cell}`);
  }
  return value;
}

export function parseSweepCsv(text: string): SweepRow[] {
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new CsvError("empty file: no header row");
  }
  if (lines[0] !== SWEEP_HEADER.join(",")) {
    throw new CsvError(
      `schema mismatch: expected header '${SWEEP_HEADER.join(",")}', got '${lines[0]}'`);
  }
  const rows: SweepRow[] = [];
  for (let i = 1; i < lines.length; i++) {
    const cells = lines[i].split(",");
    if (cells.length !== SWEEP_HEADER.length) {
      throw new CsvError(
        `line ${i + 1}: expected ${SWEEP_HEADER.length} columns, got ${cells.length}`);
    }
    const n = i + 1;
    rows.push({
      code: cells[0],
      stage1: cells[1],
      wsdR: int(cells[2], "wsd_r", n),
      wsdM: int(cells[3], "wsd_m", n),
      wsdJ: int(cells[4], "wsd_J", n),
      lInit: int(cells[5], "L_init", n),
      snrDb: num(cells[6], "snr_db", n),
      trials: int(cells[7], "trials", n),
      errors: int(cells[8], "errors", n),
      bler: num(cells[9], "bler", n),
      blerLo: num(cells[10], "bler_lo", n),
      blerHi: num(cells[11], "bler_hi", n),
      pAct: num(cells[12], "p_act", n),
      edUnits: num(cells[13], "ed_units", n),
      avgIters: num(cells[14], "avg_iters", n),
      seed: int(cells[15], "seed", n),
      raw: cells,
    });
  }
  return rows;
}

export function loadSweepCsv(path: string): SweepRow[] {
  return parseSweepCsv(readFileSync(path, "utf8"));
}

/** Reserialize rows exactly as read (round-trip identity check). */
export function writebackCsv(rows: SweepRow[]): string {
  const body = rows.map((row) => row.raw.join(","));
  return [SWEEP_HEADER.join(","), ...body].join("\n") + "\n";
}
