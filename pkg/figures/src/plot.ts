/**
 * Figure builders: turn simulator CSV outputs into SVG + PNG image pairs.
 *
 * Every builder consumes files the simulator already wrote — nothing is
 * recomputed here — and rendering never touches the inputs. All validation
 * (missing file, wrong header, empty table) happens before any output file
 * is created, so a failed render leaves no partial artifacts behind.
 */

import * as fs from "node:fs";
import { Resvg } from "@resvg/resvg-js";
import { CsvTable, distinctInOrder, numericColumn, readCsv, stringColumn } from "./csv";
import { Panel, Series, renderFigure } from "./svg";

export type FigureKind = "signal" | "ccdf" | "ber" | "convergence" | "sweep";

export interface PlotSpec {
  kind: FigureKind;
  /** Input CSV paths, in the order the kind expects them. */
  inputs: string[];
  /** Output path without extension; .svg and .png siblings are written. */
  output: string;
  xRange?: [number, number];
  yRange?: [number, number];
}

const FONT_DIR = "/usr/share/fonts/truetype/dejavu";

function expectInputs(spec: PlotSpec, count: number, what: string): void {
  if (spec.inputs.length !== count) {
    throw new Error(
      `figure kind "${spec.kind}" expects ${count} input file(s) (${what}), got ${spec.inputs.length}`
    );
  }
}

/** Pull one (x, y) series per distinct value of the `by` column. */
function seriesBy(
  table: CsvTable,
  by: string,
  xColumn: string,
  yColumn: string
): Series[] {
  const groups = stringColumn(table, by);
  const xs = numericColumn(table, xColumn);
  const ys = numericColumn(table, yColumn);
  return distinctInOrder(groups).map((label) => {
    const x: number[] = [];
    const y: number[] = [];
    for (let i = 0; i < groups.length; i += 1) {
      if (groups[i] === label) {
        x.push(xs[i]);
        y.push(ys[i]);
      }
    }
    return { label, x, y };
  });
}

function buildCcdf(spec: PlotSpec): Panel[] {
  expectInputs(spec, 1, "ccdf.csv");
  const table = readCsv(spec.inputs[0], ["threshold_db", "scheme", "ccdf"]);
  return [
    {
      title: "PAPR CCDF",
      x: { label: "PAPR threshold (dB)", range: spec.xRange },
      y: { label: "Pr(PAPR > threshold)", log: true, range: spec.yRange },
      series: seriesBy(table, "scheme", "threshold_db", "ccdf"),
    },
  ];
}

function buildBer(spec: PlotSpec): Panel[] {
  expectInputs(spec, 1, "ber.csv");
  const table = readCsv(spec.inputs[0], [
    "snr_db",
    "scheme",
    "bits_simulated",
    "bit_errors",
    "ber",
  ]);
  const series = seriesBy(table, "scheme", "snr_db", "ber").map((s) => {
    // the noiseless sanity row (snr = inf) has no place on a dB axis
    const x: number[] = [];
    const y: number[] = [];
    for (let i = 0; i < s.x.length; i += 1) {
      if (Number.isFinite(s.x[i])) {
        x.push(s.x[i]);
        y.push(s.y[i]);
      }
    }
    return { label: s.label, x, y };
  });
  if (series.every((s) => s.x.length === 0)) {
    throw new Error(`${spec.inputs[0]} has no finite-SNR rows to plot`);
  }
  return [
    {
      title: "Coded BER",
      x: { label: "SNR (dB)", range: spec.xRange },
      y: { label: "bit error rate", log: true, range: spec.yRange },
      series,
    },
  ];
}

function buildConvergence(spec: PlotSpec): Panel[] {
  expectInputs(spec, 1, "convergence.csv");
  const table = readCsv(spec.inputs[0], [
    "outer_iter",
    "mean_max_papr_db",
    "mean_objective",
    "mean_perturbation_power",
  ]);
  const iters = numericColumn(table, "outer_iter");
  return [
    {
      title: "PAPR vs outer iteration",
      x: { label: "outer iteration", range: spec.xRange },
      y: { label: "mean max-antenna PAPR (dB)", range: spec.yRange },
      series: [
        { label: "mean PAPR", x: iters, y: numericColumn(table, "mean_max_papr_db") },
      ],
    },
    {
      title: "Perturbation power vs outer iteration",
      x: { label: "outer iteration", range: spec.xRange },
      y: { label: "mean perturbation power" },
      series: [
        {
          label: "mean power",
          x: iters,
          y: numericColumn(table, "mean_perturbation_power"),
        },
      ],
    },
  ];
}

function buildSweep(spec: PlotSpec): Panel[] {
  expectInputs(spec, 1, "sweep.csv");
  const table = readCsv(spec.inputs[0], [
    "lam",
    "outer_iters",
    "papr_ccdf50_db",
    "mean_pi_db",
  ]);
  const budgets = distinctInOrder(
    stringColumn(table, "outer_iters").map((v) => `T=${v}`)
  );
  const labeled = {
    ...table,
    rows: table.rows.map((row) => {
      const copy = row.slice();
      copy[1] = `T=${row[1]}`;
      return copy;
    }),
  };
  const papr = seriesBy(labeled, "outer_iters", "lam", "papr_ccdf50_db");
  const pi = seriesBy(labeled, "outer_iters", "lam", "mean_pi_db");
  if (papr.length !== budgets.length) {
    throw new Error(`${spec.inputs[0]} groups rows inconsistently by outer_iters`);
  }
  return [
    {
      title: "Median PAPR vs peak penalty",
      x: { label: "peak penalty λ", log: true, range: spec.xRange },
      y: { label: "PAPR at CCDF 0.5 (dB)", range: spec.yRange },
      series: papr,
    },
    {
      title: "Power increase vs peak penalty",
      x: { label: "peak penalty λ", log: true, range: spec.xRange },
      y: { label: "mean power increase (dB)" },
      series: pi,
    },
  ];
}

function buildSignal(spec: PlotSpec): Panel[] {
  expectInputs(spec, 2, "demo_time.csv, demo_freq.csv");
  const time = readCsv(spec.inputs[0], ["sample", "scheme", "magnitude"]);
  const freq = readCsv(spec.inputs[1], ["tone", "scheme", "magnitude"]);
  return [
    {
      title: "Time-domain magnitude (antenna 0)",
      x: { label: "oversampled time index", range: spec.xRange },
      y: { label: "|y[n]|", range: spec.yRange },
      series: seriesBy(time, "scheme", "sample", "magnitude"),
    },
    {
      title: "Tone magnitudes (antenna 0)",
      x: { label: "tone index" },
      y: { label: "|X[k]|" },
      series: seriesBy(freq, "scheme", "tone", "magnitude"),
    },
  ];
}

const BUILDERS: Record<FigureKind, (spec: PlotSpec) => Panel[]> = {
  signal: buildSignal,
  ccdf: buildCcdf,
  ber: buildBer,
  convergence: buildConvergence,
  sweep: buildSweep,
};

/** Render a PNG from finished SVG text with a pinned font set. */
export function rasterize(svg: string): Buffer {
  const resvg = new Resvg(svg, {
    font: {
      loadSystemFonts: false,
      fontDirs: [FONT_DIR],
      defaultFontFamily: "DejaVu Sans",
    },
  });
  return resvg.render().asPng();
}

/**
 * Build the figure for `spec` and write `<output>.svg` and `<output>.png`.
 * Returns the two paths written. Both image buffers are completed in memory
 * before the first write, so errors never leave a partial pair.
 */
export function render(spec: PlotSpec): { svg: string; png: string } {
  const builder = BUILDERS[spec.kind];
  if (builder === undefined) {
    throw new Error(`unknown figure kind "${spec.kind}"`);
  }
  const svgText = renderFigure(builder(spec));
  const pngBytes = rasterize(svgText);
  const svgPath = `${spec.output}.svg`;
  const pngPath = `${spec.output}.png`;
  fs.writeFileSync(svgPath, svgText);
  fs.writeFileSync(pngPath, pngBytes);
  return { svg: svgPath, png: pngPath };
}
