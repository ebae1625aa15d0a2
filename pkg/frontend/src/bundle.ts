/** Read-only access to couplersim result bundles.
 *
 * A bundle directory contains summary.json (schema "couplersim-bundle-v1"),
 * config.json, and one CSV per result table.  Loading re-verifies every
 * table's recorded SHA-256 digest, so a tampered or truncated bundle is
 * refused before anything is rendered.
 */

import { createHash } from "node:crypto";
import { readFileSync, readdirSync, statSync } from "node:fs";
import { join } from "node:path";

import { parseCsv, type Table } from "./csv.js";

export const BUNDLE_SCHEMA = "couplersim-bundle-v1";

export class BundleError extends Error {}

export interface TableMeta {
  file: string;
  sha256: string;
  rows: number;
}

export interface Check {
  name: string;
  measured: number | boolean;
  oracle: number | boolean;
  tolerance: number;
  kind: string;
  passed: boolean;
}

export interface Summary {
  schema: string;
  pipeline: string;
  config_hash: string;
  status: string;
  checks: Check[];
  tables: Record<string, TableMeta>;
  values: Record<string, unknown>;
  runtime_s?: number;
}

export interface Bundle {
  dir: string;
  summary: Summary;
  tables: Map<string, Table>;
}

function sha256Hex(data: Buffer): string {
  return createHash("sha256").update(data).digest("hex");
}

export function loadBundle(dir: string): Bundle {
  let summaryText: string;
  try {
    summaryText = readFileSync(join(dir, "summary.json"), "utf-8");
  } catch {
    throw new BundleError(`not a result bundle (no summary.json): ${dir}`);
  }
  let summary: Summary;
  try {
    summary = JSON.parse(summaryText) as Summary;
  } catch (exc) {
    throw new BundleError(`corrupt summary.json: ${String(exc)}`);
  }
  if (summary.schema !== BUNDLE_SCHEMA) {
    throw new BundleError(
      `unsupported bundle schema ${JSON.stringify(summary.schema)}; ` +
        `expected ${BUNDLE_SCHEMA}`,
    );
  }

  const tables = new Map<string, Table>();
  for (const [name, meta] of Object.entries(summary.tables ?? {})) {
    let payload: Buffer;
    try {
      payload = readFileSync(join(dir, meta.file));
    } catch {
      throw new BundleError(`missing table file: ${meta.file}`);
    }
    const digest = sha256Hex(payload);
    if (digest !== meta.sha256) {
      throw new BundleError(
        `table ${name} does not match its recorded digest ` +
          `(${digest.slice(0, 12)}… vs ${meta.sha256.slice(0, 12)}…); ` +
          `refusing to render a modified bundle`,
      );
    }
    tables.set(name, parseCsv(payload.toString("utf-8")));
  }
  return { dir, summary, tables };
}

/** SHA-256 of every regular file in a directory, for before/after
 * read-only comparisons in tests. */
export function hashTree(dir: string): Record<string, string> {
  const out: Record<string, string> = {};
  for (const entry of readdirSync(dir).sort()) {
    const path = join(dir, entry);
    if (statSync(path).isFile()) {
      out[entry] = sha256Hex(readFileSync(path));
    }
  }
  return out;
}
