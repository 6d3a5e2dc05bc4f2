#!/usr/bin/env node
/** CLI: render --in <dir> --out <dir> [--figures edge_hist,sigma_curves,...] */

import { SchemaError } from "./csv";
import { FIGURE_KINDS, FigureKind, renderReport } from "./report";

function parseArgs(argv: string[]): { inputDir: string; outputDir: string; figures: FigureKind[] } {
  let inputDir: string | null = null;
  let outputDir: string | null = null;
  let figures: FigureKind[] = [...FIGURE_KINDS];
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    if (arg === "render") {
      continue; // allow "bandedge-render render --in ..." symmetry with docs
    }
    if (arg === "--in") {
      inputDir = argv[++i];
    } else if (arg === "--out") {
      outputDir = argv[++i];
    } else if (arg === "--figures") {
      const req = (argv[++i] ?? "").split(",").filter((s) => s.length > 0);
      for (const f of req) {
        if (!FIGURE_KINDS.includes(f as FigureKind)) {
          throw new Error(`unknown figure "${f}"; valid: ${FIGURE_KINDS.join(", ")}`);
        }
      }
      figures = req as FigureKind[];
    } else {
      throw new Error(`unknown argument "${arg}"`);
    }
  }
  if (!inputDir || !outputDir) {
    throw new Error("usage: render --in <dir> --out <dir> [--figures a,b,c]");
  }
  return { inputDir, outputDir, figures };
}

export function main(argv: string[]): number {
  try {
    const args = parseArgs(argv);
    const written = renderReport(args);
    for (const file of written) {
      process.stdout.write(file + "\n");
    }
    return 0;
  } catch (err) {
    if (err instanceof SchemaError) {
      process.stderr.write(`schema error: ${err.message}\n`);
      return 1;
    }
    process.stderr.write(`error: ${(err as Error).message}\n`);
    return 1;
  }
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
