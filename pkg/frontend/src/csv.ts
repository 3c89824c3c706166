/** Parsers for the simulator's CSV contracts (no quoting, comma-separated). */

export interface AggregateRow {
  sweepVar: string;
  sweepValue: number;
  scheme: string;
  objective: string;
  meanNat: number;
  meanBit: number;
  stderr: number;
  nTrials: number;
  nInfeasible: number;
  nDegenerate: number;
}

export interface OracleCell {
  alpha1: number;
  alpha2: number;
  objective: number;
  feasible: boolean;
}

const AGGREGATE_COLUMNS = [
  "sweep_var", "sweep_value", "scheme", "objective", "mean_rate_nat_s",
  "mean_rate_bit_s", "stderr", "n_trials", "n_infeasible", "n_degenerate",
];

const ORACLE_COLUMNS = ["alpha1", "alpha2", "objective_nat_s", "feasible"];

function splitCsv(text: string): string[][] {
  return text
    .split("\n")
    .map((line) => line.trim())
    .filter((line) => line.length > 0)
    .map((line) => line.split(","));
}

function checkHeader(header: string[], expected: string[], what: string): void {
  const missing = expected.filter((c) => !header.includes(c));
  if (missing.length > 0) {
    throw new Error(`${what}: missing columns ${missing.join(", ")}`);
  }
}

export function parseAggregates(text: string): AggregateRow[] {
  const rows = splitCsv(text);
  if (rows.length === 0) throw new Error("aggregate CSV: empty file");
  checkHeader(rows[0], AGGREGATE_COLUMNS, "aggregate CSV");
  const col = new Map(rows[0].map((name, i) => [name, i]));
  const at = (row: string[], name: string) => row[col.get(name)!];
  return rows.slice(1).map((row) => ({
    sweepVar: at(row, "sweep_var"),
    sweepValue: Number(at(row, "sweep_value")),
    scheme: at(row, "scheme"),
    objective: at(row, "objective"),
    meanNat: Number(at(row, "mean_rate_nat_s")),
    meanBit: Number(at(row, "mean_rate_bit_s")),
    stderr: Number(at(row, "stderr")),
    nTrials: Number(at(row, "n_trials")),
    nInfeasible: Number(at(row, "n_infeasible")),
    nDegenerate: Number(at(row, "n_degenerate")),
  }));
}

export function parseOracleGrid(text: string): OracleCell[] {
  const rows = splitCsv(text);
  if (rows.length === 0) throw new Error("oracle CSV: empty file");
  checkHeader(rows[0], ORACLE_COLUMNS, "oracle CSV");
  const col = new Map(rows[0].map((name, i) => [name, i]));
  const cells = rows.slice(1).map((row) => ({
    alpha1: Number(row[col.get("alpha1")!]),
    alpha2: Number(row[col.get("alpha2")!]),
    objective: Number(row[col.get("objective_nat_s")!]),
    feasible: row[col.get("feasible")!] === "true",
  }));
  if (cells.length === 0) throw new Error("oracle CSV: grid has no cells");
  return cells;
}
