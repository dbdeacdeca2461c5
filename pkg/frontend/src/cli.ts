#!/usr/bin/env node
/**
 * feclab-plot bler|complexity --csv sweep.csv [--csv more.csv] --out fig.svg
 *             [--title "..."]
 */

import { plotBler, plotComplexity } from "./figure.js";

function usage(): never {
  console.error(
    "usage: feclab-plot <bler|complexity> --csv FILE [--csv FILE ...] "
    + "--out FILE.svg [--title TEXT]");
  process.exit(2);
}

export function main(argv: string[]): number {
  const [mode, ...rest] = argv;
  if (mode !== "bler" && mode !== "complexity") {
    usage();
  }
  const csvPaths: string[] = [];
  let outPath = "";
  let title: string | undefined;
  for (let i = 0; i < rest.length; i += 2) {
    const flag = rest[i];
    const value = rest[i + 1];
    if (value === undefined) {
      usage();
    }
    if (flag === "--csv") {
      csvPaths.push(...value.split(",").filter((v) => v.length > 0));
    } else if (flag === "--out") {
      outPath = value;
    } else if (flag === "--title") {
      title = value;
    } else {
      usage();
    }
  }
  if (csvPaths.length === 0 || outPath === "") {
    usage();
  }
  const spec = { csvPaths, axis: mode as "bler" | "ed_units", outPath, title };
  try {
    if (mode === "bler") {
      plotBler(spec);
    } else {
      plotComplexity(spec);
    }
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : err}`);
    return 1;
  }
  console.log(`wrote ${outPath}`);
  return 0;
}

process.exit(main(process.argv.slice(2)));
