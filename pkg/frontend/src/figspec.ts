/** Declarative per-figure spec files and the scheme style table. */

export interface SchemeStyle {
  color: string;
  dash?: string;
  marker: "circle" | "square" | "diamond" | "triangle";
}

export const DEFAULT_STYLES: Record<string, SchemeStyle> = {
  "comp-noma": { color: "#1f77b4", marker: "circle" },
  "comp-cnoma": { color: "#d62728", marker: "square" },
  "comp-oma": { color: "#2ca02c", dash: "6 3", marker: "diamond" },
  "cnoma": { color: "#9467bd", dash: "4 2", marker: "triangle" },
  "noma": { color: "#8c564b", dash: "2 2", marker: "circle" },
  "comp-noma/optimal-uc": { color: "#1f77b4", marker: "circle" },
  "comp-noma/random-uc": { color: "#1f77b4", dash: "4 2", marker: "square" },
  "comp-cnoma/optimal-uc": { color: "#d62728", marker: "circle" },
  "comp-cnoma/random-uc": { color: "#d62728", dash: "4 2", marker: "square" },
};

export const FALLBACK_STYLE: SchemeStyle = { color: "#555555", marker: "circle" };

export interface LineFigureSpec {
  kind: "line";
  input_csv: string;
  output: string;
  title?: string;
  x_label?: string;
  units?: "nat" | "bit";
  styles?: Record<string, SchemeStyle>;
}

export interface HeatmapFigureSpec {
  kind: "heatmap";
  input_csv: string;
  manifest?: string;
  output: string;
  title?: string;
}

export type FigureSpec = LineFigureSpec | HeatmapFigureSpec;

export function validateSpec(raw: unknown): FigureSpec {
  if (typeof raw !== "object" || raw === null) {
    throw new Error("figure spec must be a JSON object");
  }
  const spec = raw as Record<string, unknown>;
  if (spec.kind !== "line" && spec.kind !== "heatmap") {
    throw new Error(`figure spec: kind must be "line" or "heatmap", got ${String(spec.kind)}`);
  }
  for (const key of ["input_csv", "output"]) {
    if (typeof spec[key] !== "string" || spec[key] === "") {
      throw new Error(`figure spec: ${key} must be a non-empty string`);
    }
  }
  if (spec.kind === "line" && spec.units !== undefined
      && spec.units !== "nat" && spec.units !== "bit") {
    throw new Error(`figure spec: units must be "nat" or "bit"`);
  }
  return raw as FigureSpec;
}

export const X_LABELS: Record<string, string> = {
  p_elec_dbm: "transmit electrical power [dBm]",
  rate_threshold_nat_s: "rate threshold [Mnat/s]",
  pd_area_cm2: "PD area [cm^2]",
  ap_separation_m: "AP separation [m]",
  ap_height_m: "AP height [m]",
};

export const X_SCALES: Record<string, number> = {
  rate_threshold_nat_s: 1e-6,
};
