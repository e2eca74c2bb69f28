import { render } from "../src/plot";

export function main(argv: string[]): number {
  if (argv.length !== 3) {
    console.error("usage: fig_signal <demo_time.csv> <demo_freq.csv> <output-base>");
    return 2;
  }
  const { svg, png } = render({
    kind: "signal",
    inputs: [argv[0], argv[1]],
    output: argv[2],
  });
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
