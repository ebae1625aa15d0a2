import { createHash } from "node:crypto";
import {
  cpSync,
  existsSync,
  mkdtempSync,
  readdirSync,
  readFileSync,
  rmSync,
  writeFileSync,
} from "node:fs";
import { tmpdir } from "node:os";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import { afterAll, describe, expect, it } from "vitest";

// The tests exercise the built artifact, not the sources.
import { BundleError, hashTree, loadBundle } from "../dist/bundle.js";
import { CsvError, parseCsv } from "../dist/csv.js";
import { linearScale, logScale } from "../dist/scales.js";
import { render, type FigureKind } from "../dist/render.js";
import { run } from "../dist/cli.js";

const FIXTURES = join(dirname(fileURLToPath(import.meta.url)), "fixtures");

/** Fixture bundles are laid out as fixtures/<pipeline>/<hash>/ exactly as
 * the producer CLI writes them; each pipeline dir holds a single bundle. */
function fixture(pipeline: string): string {
  const root = join(FIXTURES, pipeline);
  const entries = readdirSync(root);
  expect(entries.length).toBe(1);
  return join(root, entries[0]);
}

const CASES: [FigureKind, string][] = [
  ["suppression", "fig3_rabi"],
  ["band", "fig4_ipr"],
  ["zz", "fig5_zz"],
  ["modulation", "fig6_pam"],
  ["metapotential", "metapotential"],
];

const tmpDirs: string[] = [];
afterAll(() => {
  for (const d of tmpDirs) rmSync(d, { recursive: true, force: true });
});

function scratch(): string {
  const d = mkdtempSync(join(tmpdir(), "figplot-"));
  tmpDirs.push(d);
  return d;
}

describe("render", () => {
  for (const [figure, pipeline] of CASES) {
    it(`renders ${figure} from a ${pipeline} bundle without touching it`, () => {
      const dir = fixture(pipeline);
      const before = hashTree(dir);
      const svg = render({ figure, bundleDir: dir });
      expect(svg.startsWith("<svg")).toBe(true);
      expect(svg.endsWith("</svg>")).toBe(true);
      expect(svg.length).toBeGreaterThan(1000);
      expect(svg.includes("<path") || svg.includes("<rect")).toBe(true);
      expect(hashTree(dir)).toEqual(before);
    });
  }

  it("draws the shaded band and dashed baseline in the band figure", () => {
    const svg = render({ figure: "band", bundleDir: fixture("fig4_ipr") });
    expect(svg).toContain("fill-opacity");
    expect(svg).toContain("stroke-dasharray");
  });

  it("marks extrema on the metapotential heatmap", () => {
    const svg = render({
      figure: "metapotential",
      bundleDir: fixture("metapotential"),
    });
    expect(svg).toContain("<circle");
    expect(svg).toContain("rgb(");
  });

  it("refuses a bundle from the wrong pipeline", () => {
    expect(() =>
      render({ figure: "band", bundleDir: fixture("metapotential") }),
    ).toThrow(/accepts pipelines/);
  });

  it("refuses a tampered bundle", () => {
    const dir = join(scratch(), "bundle");
    cpSync(fixture("fig5_zz"), dir, { recursive: true });
    const csv = readdirSync(dir).find((f) => f.endsWith(".csv"))!;
    const text = readFileSync(join(dir, csv), "utf-8");
    writeFileSync(join(dir, csv), text.replace(/1/, "2"), "utf-8");
    expect(() => render({ figure: "zz", bundleDir: dir })).toThrow(
      /recorded digest/,
    );
  });

  it("refuses a bundle with no data rows and writes nothing", () => {
    const dir = scratch();
    const csv = "alpha0_sq,abar_sq,chi12_numeric_mhz,chi12_acstark_mhz\n";
    const digest = createHash("sha256").update(csv).digest("hex");
    writeFileSync(join(dir, "zz.csv"), csv, "utf-8");
    writeFileSync(
      join(dir, "summary.json"),
      JSON.stringify({
        schema: "couplersim-bundle-v1",
        pipeline: "fig5_zz",
        config_hash: "0".repeat(12),
        status: "ok",
        checks: [],
        values: {},
        tables: { zz: { file: "zz.csv", sha256: digest, rows: 0 } },
      }),
      "utf-8",
    );
    expect(() => render({ figure: "zz", bundleDir: dir })).toThrow(
      /no data rows/,
    );
    const out = join(dir, "zz.svg");
    expect(run(["zz", dir, "--out", out])).toBe(1);
    expect(existsSync(out)).toBe(false);
  });

  it("rejects a directory that is not a bundle", () => {
    expect(() => loadBundle(scratch())).toThrow(BundleError);
  });
});

describe("cli", () => {
  it("writes an SVG file and exits 0", () => {
    const out = join(scratch(), "fig.svg");
    expect(run(["metapotential", fixture("metapotential"), "--out", out])).toBe(0);
    const svg = readFileSync(out, "utf-8");
    expect(svg.startsWith("<svg")).toBe(true);
  });

  it("exits 2 on usage errors", () => {
    expect(run([])).toBe(2);
    expect(run(["nope", fixture("metapotential")])).toBe(2);
    expect(run(["zz", fixture("fig5_zz"), "--bad"])).toBe(2);
  });
});

describe("csv", () => {
  it("parses header and numeric rows", () => {
    const t = parseCsv("a,b\n1,2\n3.5,-4e-2\n");
    expect(t.columns).toEqual(["a", "b"]);
    expect(t.rows).toEqual([
      [1, 2],
      [3.5, -0.04],
    ]);
  });

  it("rejects ragged rows and non-numeric cells", () => {
    expect(() => parseCsv("a,b\n1\n")).toThrow(CsvError);
    expect(() => parseCsv("a,b\n1,x\n")).toThrow(CsvError);
  });
});

describe("scales", () => {
  it("maps linearly and produces ticks inside the domain", () => {
    const s = linearScale([0, 10], [0, 100]);
    expect(s(5)).toBeCloseTo(50);
    for (const t of s.ticks()) {
      expect(t).toBeGreaterThanOrEqual(0);
      expect(t).toBeLessThanOrEqual(10);
    }
  });

  it("maps decades evenly on a log scale", () => {
    const s = logScale([1e-4, 1], [200, 0]);
    expect(s(1e-2)).toBeCloseTo(100);
    expect(s.ticks()).toContain(1e-3);
    expect(() => logScale([0, 1], [0, 1])).toThrow();
  });
});
