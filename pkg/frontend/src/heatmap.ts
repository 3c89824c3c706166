/** Alpha-grid heatmap from the oracle subcommand's CSV, with solver marker. */

import { OracleCell } from "./csv.js";
import { HeatmapFigureSpec } from "./figspec.js";
import { colormap, esc, fmt, tag } from "./svg.js";

export interface SolverPoint {
  alpha1: number;
  alpha2: number;
}

export interface HeatmapResult {
  svg: string;
  argmax: OracleCell;
  cellSize: number; // in alpha units
  warnings: string[];
}

const SIZE = 560;
const MARGIN = { left: 70, right: 110, top: 46, bottom: 58 };

export function gridArgmax(cells: OracleCell[]): OracleCell {
  let best: OracleCell | null = null;
  for (const cell of cells) {
    if (!cell.feasible) continue;
    if (best === null || cell.objective > best.objective) best = cell;
  }
  if (best === null) throw new Error("heatmap: no feasible cell in the grid");
  return best;
}

export function renderHeatmap(cells: OracleCell[], spec: HeatmapFigureSpec,
                              solver?: SolverPoint): HeatmapResult {
  if (cells.length === 0) throw new Error("heatmap: empty grid");
  const warnings: string[] = [];
  const axis1 = [...new Set(cells.map((c) => c.alpha1))].sort((a, b) => a - b);
  const axis2 = [...new Set(cells.map((c) => c.alpha2))].sort((a, b) => a - b);
  if (axis1.length < 2 || axis2.length < 2) {
    throw new Error("heatmap: grid must have at least 2 points per axis");
  }
  const step1 = axis1[1] - axis1[0];
  const step2 = axis2[1] - axis2[0];

  const feasibleValues = cells.filter((c) => c.feasible).map((c) => c.objective);
  if (feasibleValues.length === 0) throw new Error("heatmap: no feasible cell in the grid");
  const vMin = Math.min(...feasibleValues);
  const vMax = Math.max(...feasibleValues);
  const span = vMax - vMin || 1;

  const plotW = SIZE - MARGIN.left - MARGIN.right;
  const plotH = SIZE - MARGIN.top - MARGIN.bottom;
  const px = (a1: number) => MARGIN.left + ((a1 - axis1[0]) / (axis1[axis1.length - 1] - axis1[0] + step1)) * plotW;
  const py = (a2: number) => SIZE - MARGIN.bottom - ((a2 - axis2[0] + step2) / (axis2[axis2.length - 1] - axis2[0] + step2)) * plotH;
  const cellW = plotW / axis1.length;
  const cellH = plotH / axis2.length;

  const parts: string[] = [];
  parts.push(`<svg xmlns="http://www.w3.org/2000/svg" width="${SIZE}" ` +
             `height="${SIZE}" viewBox="0 0 ${SIZE} ${SIZE}" ` +
             `font-family="Helvetica,Arial,sans-serif">`);
  parts.push(tag("rect", { x: 0, y: 0, width: SIZE, height: SIZE, fill: "white" }));
  for (const cell of cells) {
    const fill = cell.feasible
      ? colormap((cell.objective - vMin) / span)
      : "#d9d9d9";
    parts.push(tag("rect", {
      x: px(cell.alpha1), y: py(cell.alpha2),
      width: cellW + 0.5, height: cellH + 0.5, fill,
    }));
  }

  const argmax = gridArgmax(cells);
  parts.push(tag("rect", {
    x: px(argmax.alpha1), y: py(argmax.alpha2), width: cellW, height: cellH,
    fill: "none", stroke: "#000000", "stroke-width": 2,
  }));

  if (solver !== undefined) {
    const sx = px(solver.alpha1) + cellW / 2;
    const sy = py(solver.alpha2) + cellH / 2;
    parts.push(tag("line", { x1: sx - 7, y1: sy, x2: sx + 7, y2: sy,
                             stroke: "#ffffff", "stroke-width": 4 }));
    parts.push(tag("line", { x1: sx, y1: sy - 7, x2: sx, y2: sy + 7,
                             stroke: "#ffffff", "stroke-width": 4 }));
    parts.push(tag("line", { x1: sx - 7, y1: sy, x2: sx + 7, y2: sy,
                             stroke: "#d62728", "stroke-width": 2 }));
    parts.push(tag("line", { x1: sx, y1: sy - 7, x2: sx, y2: sy + 7,
                             stroke: "#d62728", "stroke-width": 2 }));
    const off = Math.max(Math.abs(solver.alpha1 - argmax.alpha1) / step1,
                         Math.abs(solver.alpha2 - argmax.alpha2) / step2);
    if (off > 1.0 + 1e-9) {
      warnings.push(`solver point sits ${off.toFixed(2)} cells from the grid argmax`);
    }
  }

  // axis labels and a simple colorbar
  for (const t of [0, 0.25, 0.5, 0.75, 1.0]) {
    const inX = t >= axis1[0] && t <= axis1[axis1.length - 1] + step1;
    if (inX) {
      parts.push(tag("text", { x: px(t), y: SIZE - MARGIN.bottom + 18,
                               "text-anchor": "middle", "font-size": 12 }, fmt(t)));
    }
    const inY = t >= axis2[0] && t <= axis2[axis2.length - 1] + step2;
    if (inY) {
      parts.push(tag("text", { x: MARGIN.left - 8, y: py(t) + 4,
                               "text-anchor": "end", "font-size": 12 }, fmt(t)));
    }
  }
  parts.push(tag("text", { x: MARGIN.left + plotW / 2, y: SIZE - 16,
                           "text-anchor": "middle", "font-size": 13 }, "alpha1"));
  parts.push(tag("text", {
    x: 18, y: MARGIN.top + plotH / 2, "font-size": 13, "text-anchor": "middle",
    transform: `rotate(-90 18 ${fmt(MARGIN.top + plotH / 2)})`,
  }, "alpha2"));
  const barX = SIZE - MARGIN.right + 28;
  for (let i = 0; i < 64; i++) {
    parts.push(tag("rect", {
      x: barX, y: MARGIN.top + plotH - ((i + 1) * plotH) / 64,
      width: 16, height: plotH / 64 + 0.5, fill: colormap(i / 63),
    }));
  }
  parts.push(tag("text", { x: barX + 22, y: MARGIN.top + 10, "font-size": 11 },
                 esc(`${fmt(vMax / 1e6)}M`)));
  parts.push(tag("text", { x: barX + 22, y: MARGIN.top + plotH, "font-size": 11 },
                 esc(`${fmt(vMin / 1e6)}M`)));
  parts.push(tag("text", { x: SIZE / 2, y: 24, "text-anchor": "middle",
                           "font-size": 15, "font-weight": "bold" },
                 esc(spec.title ?? "objective over the power-fraction grid")));
  parts.push("</svg>");
  return { svg: parts.join("\n") + "\n", argmax, cellSize: Math.max(step1, step2),
           warnings };
}
