/** The four report figures, built from the CLI's CSV schemas. */

import { column, hasColumn, Table } from "./csv";
import { Scene } from "./svg";

/** Leading coefficient of the right-tail reference curve sigma(lambda). */
export const SIGMA_REFERENCE_COEFFICIENT = 2 / (3 * Math.PI);

/** Reference counting curve (2/(3*pi)) * lambda^(3/2), zero for lambda < 0. */
export function referenceSigma(lambda: number): number {
  return lambda <= 0 ? 0 : SIGMA_REFERENCE_COEFFICIENT * Math.pow(lambda, 1.5);
}

const WIDTH = 640;
const HEIGHT = 420;
const MARGIN = { left: 62, right: 18, top: 30, bottom: 46 };

interface Frame {
  sx(v: number): number;
  sy(v: number): number;
}

function niceTicks(lo: number, hi: number, count = 6): number[] {
  if (!(hi > lo)) {
    hi = lo + 1;
  }
  const span = hi - lo;
  const step = Math.pow(10, Math.floor(Math.log10(span / count)));
  const err = span / count / step;
  const mult = err >= 7.5 ? 10 : err >= 3.5 ? 5 : err >= 1.5 ? 2 : 1;
  const s = step * mult;
  const ticks: number[] = [];
  for (let v = Math.ceil(lo / s) * s; v <= hi + 1e-12; v += s) {
    ticks.push(Math.abs(v) < 1e-12 ? 0 : v);
  }
  return ticks;
}

const fmt = (v: number) => {
  const a = Math.abs(v);
  if (a !== 0 && (a >= 10000 || a < 0.001)) {
    return v.toExponential(1);
  }
  return String(Number(v.toPrecision(4)));
};

function makeFrame(
  scene: Scene,
  xmin: number,
  xmax: number,
  ymin: number,
  ymax: number,
  title: string,
  xlabel: string,
  ylabel: string,
): Frame {
  if (xmax <= xmin) {
    xmax = xmin + 1;
  }
  if (ymax <= ymin) {
    ymax = ymin + 1;
  }
  const plotW = WIDTH - MARGIN.left - MARGIN.right;
  const plotH = HEIGHT - MARGIN.top - MARGIN.bottom;
  const sx = (v: number) => MARGIN.left + ((v - xmin) / (xmax - xmin)) * plotW;
  const sy = (v: number) => MARGIN.top + plotH - ((v - ymin) / (ymax - ymin)) * plotH;
  scene.rect(MARGIN.left, MARGIN.top, plotW, plotH, "#ffffff", "#333333");
  for (const t of niceTicks(xmin, xmax)) {
    if (t < xmin - 1e-12 || t > xmax + 1e-12) {
      continue;
    }
    scene.line(sx(t), MARGIN.top + plotH, sx(t), MARGIN.top + plotH + 4, "#333333", 1);
    scene.text(sx(t), MARGIN.top + plotH + 16, fmt(t), 10);
  }
  for (const t of niceTicks(ymin, ymax)) {
    if (t < ymin - 1e-12 || t > ymax + 1e-12) {
      continue;
    }
    scene.line(MARGIN.left - 4, sy(t), MARGIN.left, sy(t), "#333333", 1);
    scene.text(MARGIN.left - 8, sy(t) + 3, fmt(t), 10, "end");
  }
  scene.text(WIDTH / 2, 16, title, 13);
  scene.text(WIDTH / 2, HEIGHT - 12, xlabel, 11);
  scene.text(14, MARGIN.top - 10, ylabel, 11, "start");
  return { sx, sy };
}

/** Histogram (20 bins) of the scaled right-edge extreme from extremes.csv. */
export function edgeHist(extremes: Table, regimeLabel: string): Scene {
  const values = column(extremes, "scaled_right").filter((v) => Number.isFinite(v));
  if (values.length === 0) {
    throw new Error(`${extremes.file}: no finite scaled_right values`);
  }
  const bins = 20;
  const lo = Math.min(...values);
  const hi = Math.max(...values);
  const span = hi > lo ? hi - lo : 1;
  const counts = new Array<number>(bins).fill(0);
  for (const v of values) {
    const b = Math.min(bins - 1, Math.floor(((v - lo) / span) * bins));
    counts[b] += 1;
  }
  const scene = new Scene(WIDTH, HEIGHT);
  const frame = makeFrame(
    scene,
    lo,
    lo + span,
    0,
    Math.max(...counts) * 1.08,
    `Scaled extreme eigenvalue (${regimeLabel} scaling, ${values.length} replicates)`,
    "scaled right-edge extreme",
    "count",
  );
  const binW = span / bins;
  counts.forEach((c, i) => {
    if (c === 0) {
      return;
    }
    const x0 = frame.sx(lo + i * binW);
    const x1 = frame.sx(lo + (i + 1) * binW);
    scene.rect(x0, frame.sy(c), x1 - x0 - 1, frame.sy(0) - frame.sy(c), "#4878a8", "#2b4a6b");
  });
  return scene;
}

/** Mean counting curves from curves.csv with the lambda^(3/2) overlay. */
export function sigmaCurves(curves: Table): Scene {
  const lambda = column(curves, "lambda");
  const sigmaR = column(curves, "sigma_R_mean");
  const sigmaL = hasColumn(curves, "sigma_L_mean") ? column(curves, "sigma_L_mean") : null;
  const std = hasColumn(curves, "sigma_R_std") ? column(curves, "sigma_R_std") : null;
  const overlay = lambda.map((l) => referenceSigma(l));
  const ymax = Math.max(...sigmaR, ...overlay, ...(sigmaL ?? [0])) * 1.05;
  const scene = new Scene(WIDTH, HEIGHT);
  const frame = makeFrame(
    scene,
    Math.min(...lambda),
    Math.max(...lambda),
    0,
    ymax,
    "Edge counting measure vs (2/(3π)) λ^(3/2)",
    "λ",
    "σ(λ)",
  );
  const pts = (ys: number[]) =>
    lambda.map((l, i) => [frame.sx(l), frame.sy(ys[i])] as [number, number]).filter((p) => Number.isFinite(p[1]));
  if (std) {
    const upper = sigmaR.map((v, i) => v + std[i]);
    const lower = sigmaR.map((v, i) => Math.max(0, v - std[i]));
    scene.polyline(pts(upper), "#b0c4d8", 1);
    scene.polyline(pts(lower), "#b0c4d8", 1);
  }
  scene.polyline(pts(sigmaR), "#2b6aa8", 2, undefined, "sigma-right");
  if (sigmaL) {
    scene.polyline(pts(sigmaL), "#7a4aa8", 1.5, "6,3", "sigma-left");
  }
  scene.polyline(pts(overlay), "#c03a2b", 1.5, "2,3", "reference-overlay");
  scene.text(WIDTH - MARGIN.right - 8, MARGIN.top + 14, "reference: (2/(3π)) λ^(3/2)", 10, "end");
  return scene;
}

/** Ratio of the Fourier walk count to the local-CLT value, from walk.csv. */
export function walkRatio(walk: Table): Scene {
  const ns = column(walk, "n");
  const rs = column(walk, "R");
  const fourier = column(walk, "count_fourier");
  const gaussian = column(walk, "gaussian");
  const n = Math.max(...ns.filter((v) => Number.isFinite(v)));
  const gmax = Math.max(...gaussian.filter((_, i) => ns[i] === n));
  const points: Array<[number, number]> = [];
  for (let i = 0; i < rs.length; i++) {
    // the ratio is meaningful only where the CLT value is non-negligible
    if (ns[i] === n && gaussian[i] > 1e-3 * gmax && Number.isFinite(fourier[i])) {
      points.push([rs[i], fourier[i] / gaussian[i]]);
    }
  }
  if (points.length === 0) {
    throw new Error(`${walk.file}: no rows in the diffusive window`);
  }
  points.sort((a, b) => a[0] - b[0]);
  const ratios = points.map((p) => p[1]);
  const ymin = Math.min(0.85, Math.min(...ratios));
  const ymax = Math.max(1.15, Math.max(...ratios));
  const scene = new Scene(WIDTH, HEIGHT);
  const frame = makeFrame(
    scene,
    points[0][0],
    points[points.length - 1][0],
    ymin,
    ymax,
    `Walk count / local CLT value (n = ${n})`,
    "displacement R",
    "ratio",
  );
  for (const band of [0.9, 1.0, 1.1]) {
    scene.line(frame.sx(points[0][0]), frame.sy(band), frame.sx(points[points.length - 1][0]), frame.sy(band),
      band === 1.0 ? "#888888" : "#bbbbbb", 1, "4,4");
  }
  scene.polyline(points.map(([r, v]) => [frame.sx(r), frame.sy(v)] as [number, number]), "#2b6aa8", 2);
  return scene;
}

export interface NormGroup {
  label: string;
  values: number[];
}

function quantile(sorted: number[], q: number): number {
  const pos = (sorted.length - 1) * q;
  const lo = Math.floor(pos);
  const hi = Math.ceil(pos);
  return sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo);
}

/** Box plots of the norm statistic, one box per run (labelled by W). */
export function normBox(groups: NormGroup[]): Scene {
  if (groups.length === 0) {
    throw new Error("normBox: no runs with norm_ratio data");
  }
  const all = groups.flatMap((g) => g.values);
  const ymin = Math.min(...all, 0.95) - 0.05;
  const ymax = Math.max(...all, 1.05) + 0.05;
  const scene = new Scene(WIDTH, HEIGHT);
  const frame = makeFrame(
    scene,
    0,
    groups.length,
    ymin,
    ymax,
    "Normalised operator norm by bandwidth",
    "",
    "max(|α_max|, |α_min|)",
  );
  scene.line(frame.sx(0), frame.sy(1.0), frame.sx(groups.length), frame.sy(1.0), "#c03a2b", 1, "4,4");
  groups.forEach((g, i) => {
    const sorted = [...g.values].sort((a, b) => a - b);
    const q1 = quantile(sorted, 0.25);
    const q2 = quantile(sorted, 0.5);
    const q3 = quantile(sorted, 0.75);
    const cx = frame.sx(i + 0.5);
    const half = Math.min(40, (frame.sx(1) - frame.sx(0)) * 0.3);
    scene.rect(cx - half, frame.sy(q3), 2 * half, frame.sy(q1) - frame.sy(q3), "#d8e4f0", "#2b4a6b");
    scene.line(cx - half, frame.sy(q2), cx + half, frame.sy(q2), "#2b4a6b", 2);
    scene.line(cx, frame.sy(sorted[0]), cx, frame.sy(q1), "#2b4a6b", 1);
    scene.line(cx, frame.sy(q3), cx, frame.sy(sorted[sorted.length - 1]), "#2b4a6b", 1);
    scene.text(cx, HEIGHT - MARGIN.bottom + 30, g.label, 11);
  });
  return scene;
}
