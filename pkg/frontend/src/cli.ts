#!/usr/bin/env node
/** figplot <figure> <bundle_dir> [--out file]
 *
 * Renders one SVG figure from a couplersim result bundle.  The bundle is
 * verified (table digests) and never modified; on any error no output file
 * is written.
 */

import { writeFileSync } from "node:fs";

import { BundleError } from "./bundle.js";
import { CsvError } from "./csv.js";
import { FIGURE_PIPELINES, render, type FigureKind } from "./render.js";

const USAGE = `usage: figplot <figure> <bundle_dir> [--out file]
figures: ${Object.keys(FIGURE_PIPELINES).join(", ")}`;

export function run(argv: string[]): number {
  const positional: string[] = [];
  let out: string | undefined;
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    if (arg === "--out") {
      out = argv[++i];
      if (out === undefined) {
        process.stderr.write("--out requires a file name\n");
        return 2;
      }
    } else if (arg === "--help" || arg === "-h") {
      process.stdout.write(USAGE + "\n");
      return 0;
    } else if (arg.startsWith("-")) {
      process.stderr.write(`unknown option: ${arg}\n${USAGE}\n`);
      return 2;
    } else {
      positional.push(arg);
    }
  }
  if (positional.length !== 2) {
    process.stderr.write(USAGE + "\n");
    return 2;
  }
  const [figure, bundleDir] = positional;
  if (!(figure in FIGURE_PIPELINES)) {
    process.stderr.write(
      `unknown figure: ${figure}; choose from ` +
        `${Object.keys(FIGURE_PIPELINES).join(", ")}\n`,
    );
    return 2;
  }

  let svg: string;
  try {
    svg = render({ figure: figure as FigureKind, bundleDir });
  } catch (exc) {
    if (exc instanceof BundleError || exc instanceof CsvError) {
      process.stderr.write(`figplot: ${exc.message}\n`);
      return 1;
    }
    throw exc;
  }
  const target = out ?? `${figure}.svg`;
  writeFileSync(target, svg, "utf-8");
  process.stderr.write(`wrote ${target}\n`);
  return 0;
}

const isMain =
  process.argv[1] !== undefined &&
  import.meta.url.endsWith(process.argv[1].split("/").pop() ?? "");
if (isMain) {
  process.exit(run(process.argv.slice(2)));
}
