/** Figure rendering from result bundles.
 *
 * Strictly presentational: the data leave the CSV unchanged except for the
 * axis mapping (linear/log coordinates, absolute value on magnitude axes).
 * Anything that looks like a computation belongs upstream.
 */

import { BundleError, loadBundle, type Bundle } from "./bundle.js";
import { column, type Table } from "./csv.js";
import {
  linearDomain,
  linearScale,
  logDomain,
  logScale,
  type Scale,
} from "./scales.js";
import { el, fmt, svgDocument, text } from "./svg.js";

export type FigureKind =
  | "suppression"
  | "band"
  | "zz"
  | "modulation"
  | "metapotential";

export interface FigureSpec {
  figure: FigureKind;
  bundleDir: string;
}

/** Which pipelines each figure layout accepts. */
export const FIGURE_PIPELINES: Record<FigureKind, string[]> = {
  suppression: ["fig3_rabi"],
  band: ["fig4_ipr"],
  zz: ["fig5_zz"],
  modulation: ["fig6_pam", "app_ld", "app_pam_ld", "app_dephasing"],
  metapotential: ["metapotential"],
};

const PALETTE = ["#1f5fa8", "#c23b22", "#2e8540", "#8256a8", "#b8860b"];

export function render(spec: FigureSpec): string {
  const bundle = loadBundle(spec.bundleDir);
  const allowed = FIGURE_PIPELINES[spec.figure];
  if (!allowed) {
    throw new BundleError(`unknown figure kind: ${spec.figure}`);
  }
  if (!allowed.includes(bundle.summary.pipeline)) {
    throw new BundleError(
      `figure "${spec.figure}" accepts pipelines [${allowed.join(", ")}], ` +
        `but the bundle was produced by "${bundle.summary.pipeline}"`,
    );
  }
  switch (spec.figure) {
    case "suppression":
      return renderSuppression(bundle);
    case "band":
      return renderBand(bundle);
    case "zz":
      return renderZz(bundle);
    case "modulation":
      return renderModulation(bundle);
    case "metapotential":
      return renderMetapotential(bundle);
  }
}

function requireTable(bundle: Bundle, name: string): Table {
  const table = bundle.tables.get(name);
  if (!table) {
    throw new BundleError(
      `bundle has no table "${name}"; have [${[...bundle.tables.keys()].join(", ")}]`,
    );
  }
  if (table.rows.length === 0) {
    throw new BundleError(`table "${name}" has no data rows`);
  }
  return table;
}

function firstTable(bundle: Bundle, names: string[]): Table {
  for (const name of names) {
    if (bundle.tables.has(name)) return requireTable(bundle, name);
  }
  throw new BundleError(
    `bundle has none of the tables [${names.join(", ")}]`,
  );
}

// ---------------------------------------------------------------- panels

interface Panel {
  x: number;
  y: number;
  w: number;
  h: number;
  xScale: Scale;
  yScale: Scale;
  body: string[];
}

function makePanel(
  x: number,
  y: number,
  w: number,
  h: number,
  xScale: Scale,
  yScale: Scale,
  title: string,
  xLabel: string,
  yLabel: string,
): Panel {
  const body: string[] = [
    el("rect", {
      x,
      y,
      width: w,
      height: h,
      fill: "none",
      stroke: "#333",
      "stroke-width": 1,
    }),
    text(title, {
      x: x + w / 2,
      y: y - 8,
      "text-anchor": "middle",
      "font-weight": "bold",
    }),
    text(xLabel, { x: x + w / 2, y: y + h + 32, "text-anchor": "middle" }),
    text(yLabel, {
      x: x - 44,
      y: y + h / 2,
      "text-anchor": "middle",
      transform: `rotate(-90 ${x - 44} ${y + h / 2})`,
    }),
  ];
  for (const t of xScale.ticks()) {
    const px = xScale(t);
    body.push(
      el("line", { x1: px, y1: y + h, x2: px, y2: y + h + 4, stroke: "#333" }),
      text(fmt(t), { x: px, y: y + h + 16, "text-anchor": "middle" }),
    );
  }
  for (const t of yScale.ticks()) {
    const py = yScale(t);
    body.push(
      el("line", { x1: x - 4, y1: py, x2: x, y2: py, stroke: "#333" }),
      text(fmt(t), { x: x - 6, y: py + 3, "text-anchor": "end" }),
      el("line", {
        x1: x,
        y1: py,
        x2: x + w,
        y2: py,
        stroke: "#ddd",
        "stroke-width": 0.5,
      }),
    );
  }
  return { x, y, w, h, xScale, yScale, body };
}

function pathFor(panel: Panel, xs: number[], ys: number[]): string {
  const pts = xs
    .map((vx, i) => [vx, ys[i]])
    .filter(([, vy]) => inDomain(panel.yScale, vy))
    .map(([vx, vy]) => `${panel.xScale(vx).toFixed(2)},${panel.yScale(vy).toFixed(2)}`);
  return pts.length >= 2 ? `M${pts.join("L")}` : "";
}

function inDomain(scale: Scale, v: number): boolean {
  return Number.isFinite(scale(v));
}

function addLine(
  panel: Panel,
  xs: number[],
  ys: number[],
  color: string,
  dashed = false,
): void {
  const d = pathFor(panel, xs, ys);
  if (!d) return;
  const attrs: Record<string, string | number> = {
    d,
    fill: "none",
    stroke: color,
    "stroke-width": 1.5,
  };
  if (dashed) attrs["stroke-dasharray"] = "5 3";
  panel.body.push(el("path", attrs));
}

function addMarkers(
  panel: Panel,
  xs: number[],
  ys: number[],
  color: string,
): void {
  xs.forEach((vx, i) => {
    const vy = ys[i];
    if (!inDomain(panel.yScale, vy)) return;
    panel.body.push(
      el("circle", {
        cx: panel.xScale(vx).toFixed(2),
        cy: panel.yScale(vy).toFixed(2),
        r: 2.5,
        fill: color,
      }),
    );
  });
}

function addBand(
  panel: Panel,
  xs: number[],
  lo: number[],
  hi: number[],
  color = "#bbb",
): void {
  const kept = xs
    .map((vx, i) => [vx, lo[i], hi[i]])
    .filter(([, l, h]) => inDomain(panel.yScale, l) && inDomain(panel.yScale, h));
  if (kept.length < 2) return;
  const upper = kept.map(
    ([vx, , h]) => `${panel.xScale(vx).toFixed(2)},${panel.yScale(h).toFixed(2)}`,
  );
  const lower = kept
    .slice()
    .reverse()
    .map(([vx, l]) => `${panel.xScale(vx).toFixed(2)},${panel.yScale(l).toFixed(2)}`);
  panel.body.push(
    el("path", {
      d: `M${upper.join("L")}L${lower.join("L")}Z`,
      fill: color,
      "fill-opacity": 0.5,
      stroke: "none",
    }),
  );
}

function addLegend(panel: Panel, entries: [string, string, boolean][]): void {
  entries.forEach(([label, color, dashed], i) => {
    const lx = panel.x + 10;
    const ly = panel.y + 14 + 14 * i;
    const attrs: Record<string, string | number> = {
      x1: lx,
      y1: ly,
      x2: lx + 18,
      y2: ly,
      stroke: color,
      "stroke-width": 1.5,
    };
    if (dashed) attrs["stroke-dasharray"] = "5 3";
    panel.body.push(el("line", attrs), text(label, { x: lx + 22, y: ly + 3 }));
  });
}

const PANEL_W = 300;
const PANEL_H = 240;
const MARGIN = { left: 70, right: 20, top: 40, bottom: 55 };

function panelOrigin(index: number): [number, number] {
  return [MARGIN.left + index * (PANEL_W + MARGIN.left), MARGIN.top];
}

function docSize(nPanels: number): [number, number] {
  return [
    MARGIN.left + nPanels * (PANEL_W + MARGIN.left) - MARGIN.left + PANEL_W * 0 + MARGIN.right,
    MARGIN.top + PANEL_H + MARGIN.bottom,
  ];
}

// ---------------------------------------------------------------- figures

function groupBy(
  keys: number[],
): Map<number, number[]> {
  const groups = new Map<number, number[]>();
  keys.forEach((k, i) => {
    const idx = groups.get(k) ?? [];
    idx.push(i);
    groups.set(k, idx);
  });
  return groups;
}

function pick(values: number[], idx: number[]): number[] {
  return idx.map((i) => values[i]);
}

function renderSuppression(bundle: Bundle): string {
  const table = requireTable(bundle, "rabi_dephasing");
  const x = column(table, "abar_sq");
  const chi = column(table, "chi_mhz");
  const panels: Panel[] = [];

  const specs: [string, string, string][] = [
    ["omega_tilde_fit_mhz", "omega_tilde_formula_mhz", "exchange rate (MHz)"],
    ["tphi_fit_us", "tphi_formula_us", "dephasing time (us)"],
  ];
  specs.forEach(([fitCol, formulaCol, yLabel], p) => {
    const fit = column(table, fitCol);
    const formula = column(table, formulaCol);
    const [px, py] = panelOrigin(p);
    const panel = makePanel(
      px,
      py,
      PANEL_W,
      PANEL_H,
      linearScale(linearDomain(x), [px, px + PANEL_W]),
      logScale(logDomain([...fit, ...formula]), [py + PANEL_H, py]),
      yLabel,
      "displacement |a|^2",
      yLabel,
    );
    const legend: [string, string, boolean][] = [];
    let s = 0;
    for (const [chiVal, idx] of groupBy(chi)) {
      const color = PALETTE[s % PALETTE.length];
      const order = idx.slice().sort((a, b) => x[a] - x[b]);
      addLine(panel, pick(x, order), pick(formula, order), color);
      addMarkers(panel, pick(x, order), pick(fit, order), color);
      legend.push([`chi = ${fmt(chiVal)} MHz`, color, false]);
      s++;
    }
    addLegend(panel, legend);
    panels.push(panel);
  });

  const [w, h] = docSize(panels.length);
  return svgDocument(w, h, panels.flatMap((p) => p.body));
}

function renderBand(bundle: Bundle): string {
  const table = requireTable(bundle, "ipr_band");
  const x = column(table, "abar_sq");
  const y = column(table, "one_minus_ipr_diag");
  const lo = column(table, "band_lo");
  const hi = column(table, "band_hi");
  const dashed = column(table, "dashed_acstark");
  const kr = column(table, "k_r_mhz");
  const qubit = column(table, "qubit");

  const panels: Panel[] = [];
  let p = 0;
  for (const [krVal, idx] of groupBy(kr)) {
    const [px, py] = panelOrigin(p++);
    const panel = makePanel(
      px,
      py,
      PANEL_W,
      PANEL_H,
      linearScale(linearDomain(pick(x, idx)), [px, px + PANEL_W]),
      logScale(logDomain([...pick(y, idx), ...pick(lo, idx), ...pick(hi, idx)]), [
        py + PANEL_H,
        py,
      ]),
      `K_r = ${fmt(krVal)} MHz`,
      "displacement |a|^2",
      "qubit participation 1 - IPR",
    );
    const q1 = idx.filter((i) => qubit[i] === 1).sort((a, b) => x[a] - x[b]);
    addBand(panel, pick(x, q1), pick(lo, q1), pick(hi, q1));
    addLine(panel, pick(x, q1), pick(dashed, q1), "#555", true);
    const legend: [string, string, boolean][] = [["analytic band", "#bbb", false]];
    let s = 0;
    for (const [qVal, qIdx] of groupBy(pick(qubit, idx))) {
      const color = PALETTE[s % PALETTE.length];
      const order = qIdx.map((j) => idx[j]).sort((a, b) => x[a] - x[b]);
      addMarkers(panel, pick(x, order), pick(y, order), color);
      legend.push([`qubit ${qVal}`, color, false]);
      s++;
    }
    legend.push(["ac-Stark baseline", "#555", true]);
    addLegend(panel, legend);
    panels.push(panel);
  }
  const [w, h] = docSize(panels.length);
  return svgDocument(w, h, panels.flatMap((pp) => pp.body));
}

function renderZz(bundle: Bundle): string {
  const table = requireTable(bundle, "zz");
  const x = column(table, "abar_sq");
  const numeric = column(table, "chi12_numeric_mhz").map(Math.abs);
  const baseline = column(table, "chi12_acstark_mhz").map(Math.abs);
  const [px, py] = panelOrigin(0);
  const panel = makePanel(
    px,
    py,
    PANEL_W,
    PANEL_H,
    linearScale(linearDomain(x), [px, px + PANEL_W]),
    logScale(logDomain([...numeric, ...baseline]), [py + PANEL_H, py]),
    "two-qubit ZZ rate",
    "displacement |a|^2",
    "|chi_12| (MHz)",
  );
  const order = x.map((_, i) => i).sort((a, b) => x[a] - x[b]);
  addLine(panel, pick(x, order), pick(baseline, order), "#555", true);
  addLine(panel, pick(x, order), pick(numeric, order), PALETTE[0]);
  addMarkers(panel, pick(x, order), pick(numeric, order), PALETTE[0]);
  addLegend(panel, [
    ["diagonalized", PALETTE[0], false],
    ["ac-Stark baseline", "#555", true],
  ]);
  const [w, h] = docSize(1);
  return svgDocument(w, h, panel.body);
}

function renderModulation(bundle: Bundle): string {
  const table = firstTable(bundle, ["pam", "ld", "pam_ld", "dephasing"]);
  const x = column(table, "abar_sq");
  const order = x.map((_, i) => i).sort((a, b) => x[a] - x[b]);
  const curveCols = table.columns.filter(
    (c) =>
      (c.startsWith("one_minus_ipr") || c.startsWith("gamma_")) &&
      !c.endsWith("_lo") &&
      !c.endsWith("_hi"),
  );
  if (curveCols.length === 0) {
    throw new BundleError("no suppression columns to plot");
  }
  const allY = curveCols.flatMap((c) => column(table, c));
  const [px, py] = panelOrigin(0);
  const panel = makePanel(
    px,
    py,
    PANEL_W,
    PANEL_H,
    linearScale(linearDomain(x), [px, px + PANEL_W]),
    logScale(logDomain(allY), [py + PANEL_H, py]),
    "modulated-drive suppression",
    "displacement |a|^2",
    "suppression",
  );
  if (
    table.columns.includes("one_minus_ipr_pam_lo") &&
    table.columns.includes("one_minus_ipr_pam_hi")
  ) {
    addBand(
      panel,
      pick(x, order),
      pick(column(table, "one_minus_ipr_pam_lo"), order),
      pick(column(table, "one_minus_ipr_pam_hi"), order),
    );
  }
  const legend: [string, string, boolean][] = [];
  curveCols.forEach((c, s) => {
    const dashed = c === "floor";
    const color = dashed ? "#555" : PALETTE[s % PALETTE.length];
    addLine(panel, pick(x, order), pick(column(table, c), order), color, dashed);
    legend.push([c, color, dashed]);
  });
  if (table.columns.includes("floor")) {
    addLine(panel, pick(x, order), pick(column(table, "floor"), order), "#555", true);
    legend.push(["floor", "#555", true]);
  }
  addLegend(panel, legend);
  const [w, h] = docSize(1);
  return svgDocument(w, h, panel.body);
}

interface Minimum {
  i: number;
  q: number;
  expected_i: number;
  expected_q: number;
}

function renderMetapotential(bundle: Bundle): string {
  const gridNames = [...bundle.tables.keys()]
    .filter((n) => n.startsWith("grid_n"))
    .sort();
  if (gridNames.length === 0) {
    throw new BundleError("metapotential bundle has no grid tables");
  }
  const minima =
    (bundle.summary.values?.minima as Record<string, Minimum>) ?? {};

  const panels: string[] = [];
  gridNames.forEach((name, p) => {
    const table = requireTable(bundle, name);
    const iv = column(table, "i");
    const qv = column(table, "q");
    const val = column(table, "value");
    const iUnique = [...new Set(iv)].sort((a, b) => a - b);
    const qUnique = [...new Set(qv)].sort((a, b) => a - b);
    const [px, py] = panelOrigin(p);
    const xScale = linearScale(
      [iUnique[0], iUnique[iUnique.length - 1]],
      [px, px + PANEL_W],
    );
    const yScale = linearScale(
      [qUnique[0], qUnique[qUnique.length - 1]],
      [py + PANEL_H, py],
    );
    const vMin = Math.min(...val);
    const vMax = Math.max(...val);
    const vSpan = vMax - vMin || 1;
    const cellW = PANEL_W / Math.max(iUnique.length - 1, 1);
    const cellH = PANEL_H / Math.max(qUnique.length - 1, 1);

    const body: string[] = [];
    for (let k = 0; k < val.length; k++) {
      // Grayscale ramp: white at the grid maximum.
      const level = Math.round(255 * ((val[k] - vMin) / vSpan));
      body.push(
        el("rect", {
          x: (xScale(iv[k]) - cellW / 2).toFixed(2),
          y: (yScale(qv[k]) - cellH / 2).toFixed(2),
          width: cellW.toFixed(2),
          height: cellH.toFixed(2),
          fill: `rgb(${level},${level},${level})`,
        }),
      );
    }
    const levelKey = name.replace("grid_n", "");
    const min = minima[levelKey];
    if (min) {
      body.push(
        el("circle", {
          cx: xScale(min.i).toFixed(2),
          cy: yScale(min.q).toFixed(2),
          r: 4,
          fill: "none",
          stroke: "#c23b22",
          "stroke-width": 1.5,
        }),
        el("path", {
          d:
            `M${(xScale(min.expected_i) - 4).toFixed(2)},${yScale(min.expected_q).toFixed(2)}` +
            `H${(xScale(min.expected_i) + 4).toFixed(2)}` +
            `M${xScale(min.expected_i).toFixed(2)},${(yScale(min.expected_q) - 4).toFixed(2)}` +
            `V${(yScale(min.expected_q) + 4).toFixed(2)}`,
          stroke: "#1f5fa8",
          "stroke-width": 1.5,
        }),
      );
    }
    body.push(
      el("rect", {
        x: px,
        y: py,
        width: PANEL_W,
        height: PANEL_H,
        fill: "none",
        stroke: "#333",
      }),
      text(`bus level ${levelKey}`, {
        x: px + PANEL_W / 2,
        y: py - 8,
        "text-anchor": "middle",
        "font-weight": "bold",
      }),
      text("I", { x: px + PANEL_W / 2, y: py + PANEL_H + 32, "text-anchor": "middle" }),
      text("Q", {
        x: px - 30,
        y: py + PANEL_H / 2,
        "text-anchor": "middle",
        transform: `rotate(-90 ${px - 30} ${py + PANEL_H / 2})`,
      }),
    );
    for (const t of xScale.ticks()) {
      body.push(
        el("line", {
          x1: xScale(t),
          y1: py + PANEL_H,
          x2: xScale(t),
          y2: py + PANEL_H + 4,
          stroke: "#333",
        }),
        text(fmt(t), { x: xScale(t), y: py + PANEL_H + 16, "text-anchor": "middle" }),
      );
    }
    for (const t of yScale.ticks()) {
      body.push(
        el("line", { x1: px - 4, y1: yScale(t), x2: px, y2: yScale(t), stroke: "#333" }),
        text(fmt(t), { x: px - 6, y: yScale(t) + 3, "text-anchor": "end" }),
      );
    }
    panels.push(body.join(""));
  });
  const [w, h] = docSize(gridNames.length);
  return svgDocument(w, h, panels);
}
