#!/usr/bin/env node
import path from "path";
import yargs from "yargs";
import { hideBin } from "yargs/helpers";
import { PRESETS } from "./presets";
import { FigureKind, FigureSpec, render } from "./render";

function specFromArgs(argv: Record<string, unknown>): FigureSpec {
  if (argv.preset) {
    const name = String(argv.preset);
    const preset = PRESETS[name];
    if (!preset) {
      throw new Error(`unknown preset '${name}'; choose from ${Object.keys(PRESETS).join(", ")}`);
    }
    const csvPath = argv.csv ? String(argv.csv) : preset.defaultCsv;
    const dir = path.dirname(csvPath);
    return {
      csvPath,
      kind: preset.kind,
      xColumn: argv.x ? String(argv.x) : preset.xColumn,
      yColumn: argv.y ? String(argv.y) : preset.yColumn,
      groupColumn: argv.group ? String(argv.group) : preset.groupColumn,
      outputPath: argv.out ? String(argv.out) : `${name}.svg`,
      boundCsvPath: argv["bound-csv"]
        ? String(argv["bound-csv"])
        : preset.boundCsv
          ? path.join(dir, preset.boundCsv)
          : undefined,
      title: preset.title,
      logX: preset.logX,
    };
  }
  for (const required of ["csv", "kind", "x", "y", "out"] as const) {
    if (!argv[required]) throw new Error(`--${required} is required without --preset`);
  }
  return {
    csvPath: String(argv.csv),
    kind: String(argv.kind) as FigureKind,
    xColumn: String(argv.x),
    yColumn: String(argv.y),
    groupColumn: argv.group ? String(argv.group) : undefined,
    outputPath: String(argv.out),
    boundCsvPath: argv["bound-csv"] ? String(argv["bound-csv"]) : undefined,
  };
}

export function main(args: string[]): number {
  const argv = yargs(args)
    .usage("plot --csv <path> --kind <k> --x <col> --y <col> [--group <col>] --out <img>")
    .option("csv", { type: "string", describe: "input CSV path" })
    .option("kind", {
      type: "string",
      choices: ["trajectories", "errorbar", "bound_overlay"],
      describe: "figure kind",
    })
    .option("x", { type: "string", describe: "x column name" })
    .option("y", { type: "string", describe: "y column name" })
    .option("group", { type: "string", describe: "series grouping column" })
    .option("out", { type: "string", describe: "output image path (SVG)" })
    .option("bound-csv", { type: "string", describe: "reference bound CSV (bound_overlay)" })
    .option("preset", { type: "string", describe: "figure preset (fig1..fig8)" })
    .help()
    .parseSync();
  try {
    const result = render(specFromArgs(argv as Record<string, unknown>));
    console.log(`wrote ${result.outputPath} (${result.seriesCount} series)`);
    return 0;
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : err}`);
    return 2;
  }
}

if (require.main === module) {
  process.exit(main(hideBin(process.argv)));
}
