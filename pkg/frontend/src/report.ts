/** Figure-set rendering over a directory of bandedge CLI runs. */

import * as fs from "node:fs";
import * as path from "node:path";

import { readCsv, SchemaError, Table } from "./csv";
import { edgeHist, normBox, NormGroup, sigmaCurves, walkRatio } from "./figures";
import { column } from "./csv";
import { Scene } from "./svg";

export const FIGURE_KINDS = ["edge_hist", "sigma_curves", "walk_ratio", "norm_box"] as const;
export type FigureKind = (typeof FIGURE_KINDS)[number];

export interface ReportSpec {
  inputDir: string;
  outputDir: string;
  figures: FigureKind[];
}

interface Run {
  dir: string;
  manifest: Record<string, unknown> | null;
}

/** Runs are subdirectories holding CSVs; a bare directory of CSVs is one run. */
export function discoverRuns(inputDir: string): Run[] {
  const subdirs = fs
    .readdirSync(inputDir, { withFileTypes: true })
    .filter((e) => e.isDirectory())
    .map((e) => path.join(inputDir, e.name))
    .sort();
  const holdsData = (dir: string) =>
    fs.existsSync(path.join(dir, "manifest.json")) ||
    fs.readdirSync(dir).some((name) => name.endsWith(".csv"));
  const dirs = [inputDir, ...subdirs].filter(holdsData);
  return (dirs.length > 0 ? dirs : [inputDir]).map((dir) => ({ dir, manifest: readManifest(dir) }));
}

function readManifest(dir: string): Record<string, unknown> | null {
  const p = path.join(dir, "manifest.json");
  if (!fs.existsSync(p)) {
    return null;
  }
  try {
    return JSON.parse(fs.readFileSync(p, "utf8"));
  } catch {
    return null;
  }
}

function findCsv(runs: Run[], name: string, figure: string): Table {
  for (const run of runs) {
    const p = path.join(run.dir, name);
    if (fs.existsSync(p)) {
      return readCsv(p);
    }
  }
  throw new SchemaError(`${figure}`, `input file ${name} not found in any run directory`);
}

function manifestW(run: Run): string {
  const config = run.manifest?.["config"] as Record<string, unknown> | undefined;
  const w = config?.["w"];
  return w === undefined ? path.basename(run.dir) : `W=${w}`;
}

function buildFigure(kind: FigureKind, runs: Run[]): Scene {
  if (kind === "edge_hist") {
    const table = findCsv(runs, "extremes.csv", kind);
    const run = runs.find((r) => fs.existsSync(path.join(r.dir, "extremes.csv")));
    const regime = (run?.manifest?.["regime"] as string | undefined) ?? "edge";
    return edgeHist(table, regime);
  }
  if (kind === "sigma_curves") {
    return sigmaCurves(findCsv(runs, "curves.csv", kind));
  }
  if (kind === "walk_ratio") {
    return walkRatio(findCsv(runs, "walk.csv", kind));
  }
  const groups: NormGroup[] = [];
  for (const run of runs) {
    const p = path.join(run.dir, "extremes.csv");
    if (!fs.existsSync(p)) {
      continue;
    }
    const values = column(readCsv(p), "norm_ratio").filter((v) => Number.isFinite(v));
    if (values.length > 0) {
      groups.push({ label: manifestW(run), values });
    }
  }
  return normBox(groups);
}

/** Render the requested figures; returns the paths of all written files. */
export function renderReport(spec: ReportSpec): string[] {
  const runs = discoverRuns(spec.inputDir);
  fs.mkdirSync(spec.outputDir, { recursive: true });
  const written: string[] = [];
  for (const kind of spec.figures) {
    const scene = buildFigure(kind, runs);
    const svgPath = path.join(spec.outputDir, `${kind}.svg`);
    const pngPath = path.join(spec.outputDir, `${kind}.png`);
    fs.writeFileSync(svgPath, scene.toSvg());
    fs.writeFileSync(pngPath, scene.toPng());
    written.push(svgPath, pngPath);
  }
  return written;
}
