/**
 * Closed-form decoder cost baselines in ED units, mirroring the simulation
 * library's models so the figures can overlay theory next to measurements.
 */

export function cScl(listSize: number, n: number): number {
  if (n < 2 || (n & (n - 1)) !== 0) {
    throw new Error("n must be a power of two");
  }
  return (4 / 3) * listSize * Math.log2(n);
}

export function cOsd(orderK: number, k: number): number {
  let total = 0;
  let term = 1;
  for (let i = 0; i <= orderK; i++) {
    total += term;
    term = (term * (k - i)) / (i + 1);
  }
  return total;
}

export function cWsd(
  iterations: number, m: number, n: number, sphereSize: number, wBar: number,
): number {
  const exactPart = m * (1 + 1 / (3 * n));
  const filterPart = (sphereSize * (wBar + Math.log2(m))) / (3 * n);
  return iterations * (exactPart + filterPart);
}

export function cMpWsd(
  cInit: number, pAct: number, numPaths: number, cWsdVal: number,
): number {
  return cInit + pAct * numPaths * cWsdVal;
}

const CODE_LABEL = /^(ca-polar|polar|rm|linear):(\d+):(\d+)$/;
const STAGE1_LABEL = /^(scl|osd)(\d+)$/;

export interface GroupParams {
  family: string;
  n: number;
  k: number;
  stage1Kind: string;
  stage1Size: number;
}

export function parseGroupParams(code: string, stage1: string): GroupParams | null {
  const codeMatch = CODE_LABEL.exec(code);
  const stageMatch = STAGE1_LABEL.exec(stage1);
  if (!codeMatch || !stageMatch) {
    return null; // e.g. the 'ml' oracle rows have no stage-1 baseline
  }
  return {
    family: codeMatch[1],
    n: Number(codeMatch[2]),
    k: Number(codeMatch[3]),
    stage1Kind: stageMatch[1],
    stage1Size: Number(stageMatch[2]),
  };
}

/** Stage-1 baseline cost for a sweep group, from its CSV labels alone. */
export function stage1Baseline(code: string, stage1: string): number | null {
  const params = parseGroupParams(code, stage1);
  if (params === null) {
    return null;
  }
  if (params.stage1Kind === "scl") {
    return cScl(params.stage1Size, params.n);
  }
  // OSD reprocesses over the code dimension (CRC bits are not part of K here)
  return cOsd(params.stage1Size, params.k);
}
