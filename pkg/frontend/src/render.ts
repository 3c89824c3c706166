/** File-level orchestration: read a figure spec, render, write the SVG. */

import { mkdirSync, readFileSync, renameSync, writeFileSync } from "node:fs";
import { dirname, join, resolve } from "node:path";

import { parseAggregates, parseOracleGrid } from "./csv.js";
import { FigureSpec, validateSpec } from "./figspec.js";
import { renderHeatmap, SolverPoint } from "./heatmap.js";
import { renderLineChart } from "./linechart.js";

export interface RenderOutcome {
  output: string;
  warnings: string[];
}

function atomicWrite(path: string, content: string): void {
  mkdirSync(dirname(resolve(path)), { recursive: true });
  const tmp = `${path}.tmp`;
  writeFileSync(tmp, content);
  renameSync(tmp, path);
}

export function renderSpec(spec: FigureSpec, baseDir = "."): RenderOutcome {
  const csvText = readFileSync(resolve(baseDir, spec.input_csv), "utf8");
  let svg: string;
  let warnings: string[];
  if (spec.kind === "line") {
    const result = renderLineChart(parseAggregates(csvText), spec);
    svg = result.svg;
    warnings = result.warnings;
  } else {
    let solver: SolverPoint | undefined;
    if (spec.manifest) {
      const manifest = JSON.parse(
        readFileSync(resolve(baseDir, spec.manifest), "utf8"));
      solver = { alpha1: manifest.solver.alpha1, alpha2: manifest.solver.alpha2 };
    }
    const result = renderHeatmap(parseOracleGrid(csvText), spec, solver);
    svg = result.svg;
    warnings = result.warnings;
  }
  const outPath = resolve(baseDir, spec.output);
  atomicWrite(outPath, svg);
  return { output: outPath, warnings };
}

export function renderSpecFile(path: string): RenderOutcome {
  const spec = validateSpec(JSON.parse(readFileSync(path, "utf8")));
  return renderSpec(spec, dirname(resolve(path)));
}

export { join };
