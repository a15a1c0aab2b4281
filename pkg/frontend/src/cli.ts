#!/usr/bin/env node
/**
 * plot <kind> --in <csv...> --out <file.svg> [--width N] [--height N] [--title T]
 *
 * Renders one figure from simulator CSV output. Exit codes: 0 on
 * success, 2 on usage or input-schema errors, 1 on anything else.
 */

import { realpathSync } from "node:fs";
import { pathToFileURL } from "node:url";

import { SchemaError } from "./csv.js";
import { FIGURE_KINDS, isFigureKind, render } from "./figures.js";
import type { PlotSpec } from "./figures.js";

const USAGE = `usage: plot <kind> --in <csv...> --out <file.svg> [--width N] [--height N] [--title T]
kinds: ${FIGURE_KINDS.join(", ")}`;

class UsageError extends Error {}
class HelpRequested extends Error {}

export function parseArgs(argv: string[]): PlotSpec {
  if (argv.includes("--help") || argv.includes("-h")) {
    throw new HelpRequested(USAGE);
  }
  if (argv.length === 0) {
    throw new UsageError(USAGE);
  }
  const kind = argv[0] as string;
  if (!isFigureKind(kind)) {
    throw new UsageError(`unknown figure kind "${kind}"\n${USAGE}`);
  }
  const inputs: string[] = [];
  let output: string | undefined;
  let width: number | undefined;
  let height: number | undefined;
  let title: string | undefined;

  let i = 1;
  const next = (flag: string): string => {
    i += 1;
    const value = argv[i];
    if (value === undefined) {
      throw new UsageError(`missing value for ${flag}\n${USAGE}`);
    }
    return value;
  };
  const nextInt = (flag: string): number => {
    const raw = next(flag);
    const value = Number(raw);
    if (!Number.isInteger(value) || value <= 0) {
      throw new UsageError(`${flag} expects a positive integer, got "${raw}"`);
    }
    return value;
  };

  for (; i < argv.length; i++) {
    const arg = argv[i] as string;
    switch (arg) {
      case "--in":
        inputs.push(next("--in"));
        while (i + 1 < argv.length && !(argv[i + 1] as string).startsWith("--")) {
          i += 1;
          inputs.push(argv[i] as string);
        }
        break;
      case "--out":
        output = next("--out");
        break;
      case "--width":
        width = nextInt("--width");
        break;
      case "--height":
        height = nextInt("--height");
        break;
      case "--title":
        title = next("--title");
        break;
      default:
        throw new UsageError(`unknown argument "${arg}"\n${USAGE}`);
    }
  }

  if (inputs.length === 0) {
    throw new UsageError(`--in is required\n${USAGE}`);
  }
  if (output === undefined) {
    throw new UsageError(`--out is required\n${USAGE}`);
  }
  const style: PlotSpec["style"] = {};
  if (width !== undefined) {
    style.width = width;
  }
  if (height !== undefined) {
    style.height = height;
  }
  if (title !== undefined) {
    style.title = title;
  }
  return { kind, inputs, output, style };
}

export function main(argv: string[]): number {
  let spec: PlotSpec;
  try {
    spec = parseArgs(argv);
  } catch (err) {
    if (err instanceof HelpRequested) {
      process.stdout.write(`${err.message}\n`);
      return 0;
    }
    if (err instanceof UsageError) {
      process.stderr.write(`${err.message}\n`);
      return 2;
    }
    throw err;
  }
  try {
    render(spec);
  } catch (err) {
    if (err instanceof SchemaError) {
      process.stderr.write(`error: ${err.message}\n`);
      return 2;
    }
    process.stderr.write(`error: ${err instanceof Error ? err.message : String(err)}\n`);
    return 1;
  }
  process.stdout.write(`wrote ${spec.output}\n`);
  return 0;
}

let invokedDirectly = false;
if (process.argv[1] !== undefined) {
  try {
    invokedDirectly = import.meta.url === pathToFileURL(realpathSync(process.argv[1])).href;
  } catch {
    invokedDirectly = false;
  }
}

if (invokedDirectly) {
  process.exit(main(process.argv.slice(2)));
}
