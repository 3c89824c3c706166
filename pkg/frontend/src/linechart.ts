/** Multi-line chart with error bars for aggregate sweep CSVs. */

import { AggregateRow } from "./csv.js";
import { DEFAULT_STYLES, FALLBACK_STYLE, LineFigureSpec, SchemeStyle,
         X_LABELS, X_SCALES } from "./figspec.js";
import { colormap, esc, fmt, linearScale, tag, ticks } from "./svg.js";

export interface RenderResult {
  svg: string;
  warnings: string[];
}

const WIDTH = 720;
const HEIGHT = 480;
const MARGIN = { left: 78, right: 180, top: 46, bottom: 56 };

function marker(style: SchemeStyle, x: number, y: number): string {
  switch (style.marker) {
    case "square":
      return tag("rect", { x: x - 3.5, y: y - 3.5, width: 7, height: 7,
                           fill: style.color });
    case "diamond":
      return tag("rect", { x: x - 3.5, y: y - 3.5, width: 7, height: 7,
                           fill: style.color,
                           transform: `rotate(45 ${fmt(x)} ${fmt(y)})` });
    case "triangle":
      return tag("polygon", {
        points: `${fmt(x)},${fmt(y - 4.5)} ${fmt(x - 4)},${fmt(y + 3.5)} ` +
                `${fmt(x + 4)},${fmt(y + 3.5)}`,
        fill: style.color,
      });
    default:
      return tag("circle", { cx: x, cy: y, r: 3.5, fill: style.color });
  }
}

export function renderLineChart(rows: AggregateRow[], spec: LineFigureSpec): RenderResult {
  if (rows.length === 0) throw new Error("line chart: no rows to plot");
  const warnings: string[] = [];
  const units = spec.units ?? "bit";
  const toDisplay = (r: AggregateRow) => (units === "bit" ? r.meanBit : r.meanNat) / 1e6;
  const errDisplay = (r: AggregateRow) =>
    (units === "bit" ? r.stderr / Math.LN2 : r.stderr) / 1e6;

  const sweepVar = rows[0].sweepVar;
  const xScaleFactor = X_SCALES[sweepVar] ?? 1;
  const schemes = [...new Set(rows.map((r) => r.scheme))];
  const styles = { ...DEFAULT_STYLES, ...(spec.styles ?? {}) };
  for (const scheme of schemes) {
    if (!(scheme in styles)) {
      warnings.push(`unknown scheme tag ${scheme}: using the default style`);
    }
  }

  const xs = rows.map((r) => r.sweepValue * xScaleFactor);
  const ysLo = rows.map((r) => toDisplay(r) - errDisplay(r));
  const ysHi = rows.map((r) => toDisplay(r) + errDisplay(r));
  const xDomain: [number, number] = [Math.min(...xs), Math.max(...xs)];
  const yDomain: [number, number] = [Math.min(0, ...ysLo), Math.max(...ysHi) * 1.05];
  const x = linearScale(xDomain, [MARGIN.left, WIDTH - MARGIN.right]);
  const y = linearScale(yDomain, [HEIGHT - MARGIN.bottom, MARGIN.top]);

  const parts: string[] = [];
  parts.push(`<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" ` +
             `height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}" ` +
             `font-family="Helvetica,Arial,sans-serif">`);
  parts.push(tag("rect", { x: 0, y: 0, width: WIDTH, height: HEIGHT, fill: "white" }));

  // axes and grid
  for (const t of ticks(xDomain)) {
    parts.push(tag("line", { x1: x(t), y1: y(yDomain[0]), x2: x(t),
                             y2: y(yDomain[1]), stroke: "#eeeeee" }));
    parts.push(tag("text", { x: x(t), y: HEIGHT - MARGIN.bottom + 18,
                             "text-anchor": "middle", "font-size": 12 }, fmt(t)));
  }
  for (const t of ticks(yDomain)) {
    parts.push(tag("line", { x1: MARGIN.left, y1: y(t), x2: WIDTH - MARGIN.right,
                             y2: y(t), stroke: "#eeeeee" }));
    parts.push(tag("text", { x: MARGIN.left - 8, y: y(t) + 4,
                             "text-anchor": "end", "font-size": 12 }, fmt(t)));
  }
  parts.push(tag("line", { x1: MARGIN.left, y1: y(yDomain[0]),
                           x2: WIDTH - MARGIN.right, y2: y(yDomain[0]),
                           stroke: "#333333" }));
  parts.push(tag("line", { x1: MARGIN.left, y1: y(yDomain[0]), x2: MARGIN.left,
                           y2: y(yDomain[1]), stroke: "#333333" }));

  // one polyline + error bars per scheme, in first-seen order
  schemes.forEach((scheme, index) => {
    const style = styles[scheme] ?? FALLBACK_STYLE;
    const data = rows
      .filter((r) => r.scheme === scheme)
      .sort((a, b) => a.sweepValue - b.sweepValue);
    const points = data
      .map((r) => `${fmt(x(r.sweepValue * xScaleFactor))},${fmt(y(toDisplay(r)))}`)
      .join(" ");
    const attrs: Record<string, string | number> = {
      points, fill: "none", stroke: style.color, "stroke-width": 2,
    };
    if (style.dash) attrs["stroke-dasharray"] = style.dash;
    parts.push(tag("polyline", attrs));
    for (const r of data) {
      const cx = x(r.sweepValue * xScaleFactor);
      const lo = y(toDisplay(r) - errDisplay(r));
      const hi = y(toDisplay(r) + errDisplay(r));
      parts.push(tag("line", { x1: cx, y1: lo, x2: cx, y2: hi,
                               stroke: style.color, "stroke-width": 1.2 }));
      parts.push(tag("line", { x1: cx - 3, y1: lo, x2: cx + 3, y2: lo,
                               stroke: style.color, "stroke-width": 1.2 }));
      parts.push(tag("line", { x1: cx - 3, y1: hi, x2: cx + 3, y2: hi,
                               stroke: style.color, "stroke-width": 1.2 }));
      parts.push(marker(style, cx, y(toDisplay(r))));
    }
    // legend entry
    const ly = MARGIN.top + 10 + index * 20;
    const lx = WIDTH - MARGIN.right + 14;
    const legendLine: Record<string, string | number> = {
      x1: lx, y1: ly, x2: lx + 26, y2: ly, stroke: style.color, "stroke-width": 2,
    };
    if (style.dash) legendLine["stroke-dasharray"] = style.dash;
    parts.push(tag("line", legendLine));
    parts.push(marker(style, lx + 13, ly));
    parts.push(tag("text", { x: lx + 32, y: ly + 4, "font-size": 12 }, esc(scheme)));
  });

  const title = spec.title ?? `mean ${rows[0].objective} rate vs ${sweepVar}`;
  parts.push(tag("text", { x: WIDTH / 2, y: 24, "text-anchor": "middle",
                           "font-size": 15, "font-weight": "bold" }, esc(title)));
  parts.push(tag("text", { x: (MARGIN.left + WIDTH - MARGIN.right) / 2,
                           y: HEIGHT - 14, "text-anchor": "middle",
                           "font-size": 13 },
                 esc(spec.x_label ?? X_LABELS[sweepVar] ?? sweepVar)));
  parts.push(tag("text", {
    x: 18, y: (MARGIN.top + HEIGHT - MARGIN.bottom) / 2, "font-size": 13,
    "text-anchor": "middle",
    transform: `rotate(-90 18 ${fmt((MARGIN.top + HEIGHT - MARGIN.bottom) / 2)})`,
  }, esc(`mean rate [M${units}/s]`)));
  parts.push("</svg>");
  return { svg: parts.join("\n") + "\n", warnings };
}

// re-exported for the heatmap module
export { colormap };
