#!/usr/bin/env node
import { readFileSync, writeFileSync } from "fs";

import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { parseCsv } from "./csv.js";
import { FigureOptions, RENDERERS } from "./figures.js";
import { FIGURE_KINDS, FigureKind, SchemaError } from "./schema.js";

function readAsymptote(manifestPath: string): number | undefined {
  const manifest = JSON.parse(readFileSync(manifestPath, "utf8"));
  const value = manifest?.annotations?.asymptote;
  return typeof value === "number" ? value : undefined;
}

export function run(argv: string[]): number {
  const args = yargs(argv)
    .command("plot <kind> <csv>", "render an experiment CSV to SVG", (y) =>
      y
        .positional("kind", {
          choices: FIGURE_KINDS,
          describe: "figure kind",
          type: "string",
        })
        .positional("csv", { type: "string", describe: "input CSV file" })
        .option("out", {
          alias: "o",
          type: "string",
          demandOption: true,
          describe: "output SVG path",
        })
        .option("manifest", {
          type: "string",
          describe: "run manifest (reads annotations.asymptote)",
        })
        .option("title", { type: "string" }),
    )
    .demandCommand(1)
    .strict()
    .exitProcess(false)
    .parseSync();

  const kind = args.kind as FigureKind;
  const csvPath = args.csv as string;
  try {
    const text = readFileSync(csvPath, "utf8");
    const table = parseCsv(text, kind);
    const opts: FigureOptions = { title: args.title as string | undefined };
    if (args.manifest) {
      opts.asymptote = readAsymptote(args.manifest as string);
    }
    const svg = RENDERERS[kind](table, opts);
    writeFileSync(args.out as string, svg);
    console.log(`wrote ${args.out}`);
    return 0;
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`schema error: ${err.message}`);
      return 2;
    }
    if (err instanceof Error && "code" in err && err.code === "ENOENT") {
      console.error(`file not found: ${(err as NodeJS.ErrnoException).path}`);
      return 2;
    }
    throw err;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url.endsWith(process.argv[1].split("/").pop() ?? "");
if (invokedDirectly) {
  process.exit(run(hideBin(process.argv)));
}
