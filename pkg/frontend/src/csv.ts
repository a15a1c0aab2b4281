/**
 * Strict CSV reading for the simulator interchange files.
 *
 * The emitted files never quote fields or embed separators, so parsing
 * is a line/comma split plus schema validation. Every error names the
 * offending file, and a header mismatch names the missing column.
 */

export interface Table {
  header: string[];
  rows: string[][];
}

export class SchemaError extends Error {}

export function parseCsv(text: string, source: string): Table {
  const lines = text.split("\n");
  while (lines.length > 0 && lines[lines.length - 1] === "") {
    lines.pop();
  }
  if (lines.length === 0) {
    throw new SchemaError(`${source}: empty file`);
  }
  const header = (lines[0] as string).split(",");
  const rows: string[][] = [];
  for (let i = 1; i < lines.length; i++) {
    const row = (lines[i] as string).split(",");
    if (row.length !== header.length) {
      throw new SchemaError(
        `${source}: row ${i + 1} has ${row.length} fields, header has ${header.length}`,
      );
    }
    rows.push(row);
  }
  return { header, rows };
}

/** Map required column names to their indices; name what is missing. */
export function requireColumns(
  table: Table,
  required: string[],
  source: string,
): Record<string, number> {
  const index: Record<string, number> = {};
  for (const name of required) {
    const at = table.header.indexOf(name);
    if (at < 0) {
      throw new SchemaError(
        `missing column "${name}" in ${source} (found: ${table.header.join(", ")})`,
      );
    }
    index[name] = at;
  }
  return index;
}

export function numberAt(row: string[], col: number, source: string, line: number): number {
  const raw = row[col];
  const value = Number(raw);
  if (raw === undefined || raw === "" || !Number.isFinite(value)) {
    throw new SchemaError(`${source}: row ${line}: not a finite number: ${JSON.stringify(raw)}`);
  }
  return value;
}

export interface ThroughputRow {
  system: string;
  step: number;
  throughput: number;
}

export interface UtilizationRow {
  system: string;
  step: number;
  linkId: number;
  utilization: number;
}

export interface LatencyRow {
  system: string;
  step: number;
  latency: number;
  delivered: number;
}

export interface CapacityRow {
  linkId: number;
  capacity: number;
}

export function readThroughput(text: string, source: string): ThroughputRow[] {
  const table = parseCsv(text, source);
  const col = requireColumns(table, ["system", "step", "throughput"], source);
  return table.rows.map((row, i) => ({
    system: row[col["system"] as number] ?? "",
    step: numberAt(row, col["step"] as number, source, i + 2),
    throughput: numberAt(row, col["throughput"] as number, source, i + 2),
  }));
}

export function readUtilization(text: string, source: string): UtilizationRow[] {
  const table = parseCsv(text, source);
  const col = requireColumns(table, ["system", "step", "link_id", "utilization"], source);
  return table.rows.map((row, i) => ({
    system: row[col["system"] as number] ?? "",
    step: numberAt(row, col["step"] as number, source, i + 2),
    linkId: numberAt(row, col["link_id"] as number, source, i + 2),
    utilization: numberAt(row, col["utilization"] as number, source, i + 2),
  }));
}

export function readLatency(text: string, source: string): LatencyRow[] {
  const table = parseCsv(text, source);
  const col = requireColumns(
    table,
    ["system", "step", "src", "dst", "path_idx", "latency", "delivered"],
    source,
  );
  return table.rows.map((row, i) => ({
    system: row[col["system"] as number] ?? "",
    step: numberAt(row, col["step"] as number, source, i + 2),
    latency: numberAt(row, col["latency"] as number, source, i + 2),
    delivered: numberAt(row, col["delivered"] as number, source, i + 2),
  }));
}

export function readCapacity(text: string, source: string): CapacityRow[] {
  const table = parseCsv(text, source);
  const col = requireColumns(table, ["link_id", "capacity"], source);
  return table.rows.map((row, i) => ({
    linkId: numberAt(row, col["link_id"] as number, source, i + 2),
    capacity: numberAt(row, col["capacity"] as number, source, i + 2),
  }));
}
