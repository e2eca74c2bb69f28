import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";
import { afterAll, describe, expect, it } from "vitest";
import { readCsv, numericColumn } from "../src/csv";
import { render } from "../src/plot";
import { main as ccdfMain } from "../scripts/fig_ccdf";
import { main as signalMain } from "../scripts/fig_signal";

const FIXTURES = path.join(__dirname, "fixtures");
const CCDF = path.join(FIXTURES, "ccdf.csv");
const BER = path.join(FIXTURES, "ber.csv");
const CONVERGENCE = path.join(FIXTURES, "convergence.csv");
const SWEEP = path.join(FIXTURES, "sweep.csv");
const DEMO_TIME = path.join(FIXTURES, "demo_time.csv");
const DEMO_FREQ = path.join(FIXTURES, "demo_freq.csv");

// snapshot every fixture up front so the last test can prove rendering
// never wrote to them
const inputSnapshot = new Map<string, Buffer>();
for (const name of fs.readdirSync(FIXTURES)) {
  const p = path.join(FIXTURES, name);
  inputSnapshot.set(p, fs.readFileSync(p));
}

const tmp = fs.mkdtempSync(path.join(os.tmpdir(), "figures-test-"));
afterAll(() => {
  fs.rmSync(tmp, { recursive: true, force: true });
});

let counter = 0;
function outBase(): string {
  counter += 1;
  return path.join(tmp, `fig-${counter}`);
}

const PNG_MAGIC = Buffer.from([0x89, 0x50, 0x4e, 0x47]);

function checkPair(paths: { svg: string; png: string }): string {
  const svg = fs.readFileSync(paths.svg, "utf8");
  expect(svg.startsWith("<svg ")).toBe(true);
  const png = fs.readFileSync(paths.png);
  expect(png.subarray(0, 4).equals(PNG_MAGIC)).toBe(true);
  expect(png.length).toBeGreaterThan(1000);
  return svg;
}

function panelCount(svg: string): number {
  return (svg.match(/fill="none" stroke="#444444"/g) ?? []).length;
}

describe("figure kinds render from quick-preset output", () => {
  it("ccdf: one log-y panel with a curve per scheme", () => {
    const svg = checkPair(render({ kind: "ccdf", inputs: [CCDF], output: outBase() }));
    expect(panelCount(svg)).toBe(1);
    expect(svg).toContain(">PAPR CCDF</text>");
    for (const scheme of ["zf", "clipping", "proxinf-admm"]) {
      expect(svg).toContain(`>${scheme}</text>`);
    }
    // log-y decade labels reach down to the single-trial floor
    expect(svg).toContain(">0.001</text>");
    expect((svg.match(/<polyline /g) ?? []).length).toBeGreaterThanOrEqual(3);
  });

  it("ber: log-y BER versus SNR in dB", () => {
    const svg = checkPair(render({ kind: "ber", inputs: [BER], output: outBase() }));
    expect(panelCount(svg)).toBe(1);
    expect(svg).toContain(">Coded BER</text>");
    expect(svg).toContain(">SNR (dB)</text>");
    for (const scheme of ["zf", "clipping", "proxinf-admm"]) {
      expect(svg).toContain(`>${scheme}</text>`);
    }
  });

  it("convergence: paired PAPR and perturbation-power panels", () => {
    const svg = checkPair(
      render({ kind: "convergence", inputs: [CONVERGENCE], output: outBase() })
    );
    expect(panelCount(svg)).toBe(2);
    expect(svg).toContain(">PAPR vs outer iteration</text>");
    expect(svg).toContain(">Perturbation power vs outer iteration</text>");
  });

  it("sweep: log-x panels with one series per iteration budget", () => {
    const svg = checkPair(render({ kind: "sweep", inputs: [SWEEP], output: outBase() }));
    expect(panelCount(svg)).toBe(2);
    expect(svg).toContain(">T=20</text>");
    expect(svg).toContain(">T=200</text>");
    for (const decade of ["1", "10", "100"]) {
      expect(svg).toContain(`>${decade}</text>`);
    }
  });

  it("signal: time- and tone-domain magnitude panels", () => {
    const svg = checkPair(
      render({ kind: "signal", inputs: [DEMO_TIME, DEMO_FREQ], output: outBase() })
    );
    expect(panelCount(svg)).toBe(2);
    expect(svg).toContain(">oversampled time index</text>");
    expect(svg).toContain(">tone index</text>");
    expect(svg).toContain(">zf</text>");
  });

  it("honors explicit axis ranges from the spec", () => {
    const svg = checkPair(
      render({
        kind: "ccdf",
        inputs: [CCDF],
        output: outBase(),
        xRange: [0, 20],
        yRange: [0.0001, 1],
      })
    );
    // neither tick can come from the data: thresholds stop at 14 dB and the
    // empirical CCDF floor is 1/3200, so both prove the ranges took effect
    expect(svg).toContain(">20</text>");
    expect(svg).toContain(">1e-4</text>");
  });
});

describe("plotted geometry matches the data", () => {
  it("convergence panel inverts back to the CSV values", () => {
    const paths = render({ kind: "convergence", inputs: [CONVERGENCE], output: outBase() });
    const svg = fs.readFileSync(paths.svg, "utf8");

    // panel 0 is everything between the first and second frame rectangles
    const panel0 = svg.split('fill="none" stroke="#444444"')[1];
    const tickRe = (anchor: string) =>
      new RegExp(
        `<text x="([0-9.]+)" y="([0-9.]+)" font-family="[^"]+" font-size="11" ` +
          `fill="#222222" text-anchor="${anchor}">([^<]+)</text>`,
        "g"
      );
    const xTicks = [...panel0.matchAll(tickRe("middle"))].map((m) => ({
      px: Number(m[1]),
      value: Number(m[3]),
    }));
    const yTicks = [...panel0.matchAll(tickRe("end"))].map((m) => ({
      px: Number(m[2]) - 3.5, // labels sit 3.5px below the gridline
      value: Number(m[3]),
    }));
    expect(xTicks.length).toBeGreaterThanOrEqual(2);
    expect(yTicks.length).toBeGreaterThanOrEqual(2);

    const invert = (ticks: { px: number; value: number }[], px: number) => {
      const a = ticks[0];
      const b = ticks[ticks.length - 1];
      return a.value + ((px - a.px) * (b.value - a.value)) / (b.px - a.px);
    };

    const points = /<polyline points="([^"]+)"/
      .exec(panel0)![1]
      .split(" ")
      .map((pair) => pair.split(",").map(Number));

    const table = readCsv(CONVERGENCE, [
      "outer_iter",
      "mean_max_papr_db",
      "mean_objective",
      "mean_perturbation_power",
    ]);
    const iters = numericColumn(table, "outer_iter");
    const papr = numericColumn(table, "mean_max_papr_db");
    expect(points.length).toBe(iters.length);

    for (const idx of [0, Math.floor(iters.length / 2), iters.length - 1]) {
      const [pxX, pxY] = points[idx];
      expect(Math.abs(invert(xTicks, pxX) - iters[idx])).toBeLessThan(0.05);
      expect(Math.abs(invert(yTicks, pxY) - papr[idx])).toBeLessThan(0.02);
    }
  });
});

describe("determinism and input hygiene", () => {
  it("repeated renders produce identical bytes, svg and png alike", () => {
    const kinds: Array<[Parameters<typeof render>[0]["kind"], string[]]> = [
      ["ccdf", [CCDF]],
      ["convergence", [CONVERGENCE]],
      ["signal", [DEMO_TIME, DEMO_FREQ]],
    ];
    for (const [kind, inputs] of kinds) {
      const first = render({ kind, inputs, output: outBase() });
      const second = render({ kind, inputs, output: outBase() });
      expect(fs.readFileSync(first.svg, "utf8")).toBe(fs.readFileSync(second.svg, "utf8"));
      expect(fs.readFileSync(first.png).equals(fs.readFileSync(second.png))).toBe(true);
    }
  });

  it("an empty CSV is an error and writes nothing", () => {
    const empty = path.join(tmp, "empty.csv");
    fs.writeFileSync(empty, "");
    const base = outBase();
    expect(() => render({ kind: "ccdf", inputs: [empty], output: base })).toThrow(/empty/);
    expect(fs.existsSync(`${base}.svg`)).toBe(false);
    expect(fs.existsSync(`${base}.png`)).toBe(false);
  });

  it("a header-only CSV is an error and writes nothing", () => {
    const headerOnly = path.join(tmp, "header_only.csv");
    fs.writeFileSync(headerOnly, "threshold_db,scheme,ccdf\n");
    const base = outBase();
    expect(() => render({ kind: "ccdf", inputs: [headerOnly], output: base })).toThrow(
      /no data rows/
    );
    expect(fs.existsSync(`${base}.svg`)).toBe(false);
  });

  it("a schema mismatch names the expected and found columns", () => {
    const base = outBase();
    expect(() => render({ kind: "ber", inputs: [CCDF], output: base })).toThrow(
      /expected columns "snr_db,scheme,bits_simulated,bit_errors,ber" but found "threshold_db,scheme,ccdf"/
    );
    expect(fs.existsSync(`${base}.svg`)).toBe(false);
  });

  it("drops infinite-SNR rows and rejects tables with none left", () => {
    const header = "snr_db,scheme,bits_simulated,bit_errors,ber\n";
    const mixed = path.join(tmp, "mixed_snr.csv");
    fs.writeFileSync(mixed, header + "inf,zf,100,0,0.5\n0.0,zf,100,10,0.1\n2.0,zf,100,1,0.01\n");
    const svg = checkPair(render({ kind: "ber", inputs: [mixed], output: outBase() }));
    const points = /<polyline points="([^"]+)"/.exec(svg)![1];
    expect(points.split(" ")).toHaveLength(2); // the inf row is gone

    const onlyInf = path.join(tmp, "only_inf.csv");
    fs.writeFileSync(onlyInf, header + "inf,zf,100,0,0.0\n");
    const base = outBase();
    expect(() => render({ kind: "ber", inputs: [onlyInf], output: base })).toThrow(
      /no finite-SNR rows/
    );
    expect(fs.existsSync(`${base}.svg`)).toBe(false);
  });

  it("rejects a wrong input-file count and unknown kinds", () => {
    expect(() =>
      render({ kind: "signal", inputs: [DEMO_TIME], output: outBase() })
    ).toThrow(/expects 2 input file\(s\)/);
    expect(() =>
      render({ kind: "nonsense" as never, inputs: [CCDF], output: outBase() })
    ).toThrow(/unknown figure kind/);
  });

  it("never modifies its input files", () => {
    for (const [p, before] of inputSnapshot) {
      expect(fs.readFileSync(p).equals(before)).toBe(true);
    }
  });
});

describe("figure scripts", () => {
  it("fig_ccdf renders a pair and reports usage errors", () => {
    const base = outBase();
    expect(ccdfMain([CCDF, base])).toBe(0);
    expect(fs.existsSync(`${base}.svg`)).toBe(true);
    expect(fs.existsSync(`${base}.png`)).toBe(true);
    expect(ccdfMain([CCDF])).toBe(2);
  });

  it("fig_signal takes both CSVs and an output base", () => {
    const base = outBase();
    expect(signalMain([DEMO_TIME, DEMO_FREQ, base])).toBe(0);
    expect(fs.existsSync(`${base}.png`)).toBe(true);
    expect(signalMain([DEMO_TIME])).toBe(2);
  });
});
