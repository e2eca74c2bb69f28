import { render } from "../src/plot";

export function main(argv: string[]): number {
  if (argv.length !== 2) {
    console.error("usage: fig_sweep <sweep.csv> <output-base>");
    return 2;
  }
  const { svg, png } = render({ kind: "sweep", inputs: [argv[0]], output: argv[1] });
  console.log(svg);
  console.log(png);
  return 0;
}

if (typeof require !== "undefined" && require.main === module) {
  try {
    process.exitCode = main(process.argv.slice(2));
  } catch (err) {
    console.error(err instanceof Error ? err.message : String(err));
    process.exitCode = 1;
  }
}
