import { describe, expect, it } from "vitest";

import { OracleCell } from "../src/csv.js";
import { gridArgmax, renderHeatmap } from "../src/heatmap.js";

function grid(n: number, objective: (a1: number, a2: number) => number,
              feasible: (a1: number, a2: number) => boolean = () => true): OracleCell[] {
  const cells: OracleCell[] = [];
  for (let i = 0; i < n; i++) {
    for (let j = 0; j < n; j++) {
      const a1 = i / (n - 1);
      const a2 = j / (n - 1);
      cells.push({ alpha1: a1, alpha2: a2, objective: objective(a1, a2),
                   feasible: feasible(a1, a2) });
    }
  }
  return cells;
}

const SPEC = { kind: "heatmap" as const, input_csv: "x", output: "y" };

describe("heatmap", () => {
  it("rejects an empty grid", () => {
    expect(() => renderHeatmap([], SPEC)).toThrowError(/empty grid/);
  });

  it("rejects a fully infeasible grid", () => {
    const cells = grid(5, () => 1, () => false);
    expect(() => renderHeatmap(cells, SPEC)).toThrowError(/no feasible cell/);
  });

  it("finds the argmax among feasible cells only", () => {
    const cells = grid(9, (a1, a2) => a1 + a2, (a1) => a1 < 0.8);
    const best = gridArgmax(cells);
    expect(best.alpha1).toBeLessThan(0.8);
    expect(best.alpha2).toBe(1.0);
  });

  it("renders a symmetric instance symmetrically", () => {
    const cells = grid(11, (a1, a2) => -((a1 - 0.5) ** 2 + (a2 - 0.5) ** 2));
    const { svg } = renderHeatmap(cells, SPEC);
    // cell colors for (a1,a2) and (a2,a1) must match: count each fill string
    const fills = [...svg.matchAll(/fill="(rgb\([^)]*\))"/g)].map((m) => m[1]);
    const counts = new Map<string, number>();
    for (const f of fills) counts.set(f, (counts.get(f) ?? 0) + 1);
    // every off-diagonal color appears an even number of times (mirror pairs),
    // ignoring the colorbar's 64 unique swatches
    const odd = [...counts.values()].filter((c) => c % 2 === 1).length;
    expect(odd).toBeLessThanOrEqual(11 + 64); // diagonal cells + colorbar
  });

  it("marks the solver point and flags disagreement beyond one cell", () => {
    const cells = grid(11, (a1, a2) => a1 + a2);
    const good = renderHeatmap(cells, SPEC, { alpha1: 1.0, alpha2: 1.0 });
    expect(good.warnings).toHaveLength(0);
    const bad = renderHeatmap(cells, SPEC, { alpha1: 0.2, alpha2: 0.2 });
    expect(bad.warnings.some((w) => w.includes("cells from the grid argmax"))).toBe(true);
  });

  it("is deterministic", () => {
    const cells = grid(7, (a1, a2) => a1 * a2);
    expect(renderHeatmap(cells, SPEC).svg).toBe(renderHeatmap(cells, SPEC).svg);
  });
});
