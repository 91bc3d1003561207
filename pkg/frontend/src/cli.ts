#!/usr/bin/env node
/**
 * Command line entry point.
 *
 *   export          encode one target's texts into a DYTAG-EMB v1 file
 *   verify-prompts  regenerate a dataset's prompts and byte-compare them
 *                   against a golden manifest, reporting the first drift
 *
 * Exit codes: 0 success, 1 usage or bad flags, 2 data problem (unreadable
 * dataset, parse failure, prompt mismatch), 3 encoder failure (unknown
 * identifier, output dimension drift).
 */

import * as fs from "node:fs";
import { parseArgs } from "node:util";

import { loadDataset } from "./dataset";
import { Pooling, resolveEncoder } from "./encoder";
import { DataError, EncoderError } from "./errors";
import { ExportJob, runExport, Target, TARGETS } from "./exporter";
import { datasetPrompts, escapePromptLine, parseManifest } from "./prompts";

export const EXIT_OK = 0;
export const EXIT_USAGE = 1;
export const EXIT_DATA = 2;
export const EXIT_ENCODER = 3;

const USAGE = `usage:
  dytag-export export --dataset <dir> --target <t> --encoder <id> --out <path> --batch N
                      [--pooling mean|sum] [--prompts <manifest>]
  dytag-export verify-prompts --dataset <dir> --golden <file>

targets: ${TARGETS.join(", ")}
encoders: ngram-v1, ngram-v1:<dim>`;

class UsageError extends Error {}

function requireOption(value: string | undefined, name: string): string {
  if (value === undefined) throw new UsageError(`missing required option --${name}`);
  return value;
}

function cmdExport(argv: string[]): number {
  const { values } = parseArgs({
    args: argv,
    options: {
      dataset: { type: "string" },
      target: { type: "string" },
      encoder: { type: "string" },
      out: { type: "string" },
      batch: { type: "string", default: "64" },
      pooling: { type: "string", default: "mean" },
      prompts: { type: "string" },
    },
  });
  const targetName = requireOption(values.target, "target");
  const encoderId = requireOption(values.encoder, "encoder");
  const datasetDir = requireOption(values.dataset, "dataset");
  const outPath = requireOption(values.out, "out");
  if (!(TARGETS as readonly string[]).includes(targetName)) {
    throw new UsageError(`target must be one of ${TARGETS.join(", ")}, got ${JSON.stringify(targetName)}`);
  }
  if (values.pooling !== "mean" && values.pooling !== "sum") {
    throw new UsageError(`pooling must be mean or sum, got ${JSON.stringify(values.pooling)}`);
  }
  const batchSize = Number(values.batch);
  if (!Number.isInteger(batchSize) || batchSize < 1) {
    throw new UsageError(`batch must be a positive integer, got ${JSON.stringify(values.batch)}`);
  }

  const encoder = resolveEncoder(encoderId, values.pooling as Pooling);
  const dataset = loadDataset(datasetDir);

  let extraPrompts: string[] | undefined;
  if (values.prompts !== undefined) {
    let content: string;
    try {
      content = fs.readFileSync(values.prompts, "utf-8");
    } catch (err) {
      throw new DataError(`cannot read prompt manifest ${values.prompts}: ${(err as Error).message}`);
    }
    extraPrompts = parseManifest(content);
  }

  const job: ExportJob = {
    dataset,
    target: targetName as Target,
    encoder,
    outPath,
    batchSize,
    extraPrompts,
  };
  const count = runExport(job);
  console.log(`wrote ${job.outPath}: ${count} entries, dim ${encoder.dim}, encoder ${encoder.id}`);
  return EXIT_OK;
}

function cmdVerifyPrompts(argv: string[]): number {
  const { values } = parseArgs({
    args: argv,
    options: {
      dataset: { type: "string" },
      golden: { type: "string" },
    },
  });
  const goldenPath = requireOption(values.golden, "golden");
  let goldenContent: string;
  try {
    goldenContent = fs.readFileSync(goldenPath, "utf-8");
  } catch (err) {
    throw new DataError(`cannot read golden file ${goldenPath}: ${(err as Error).message}`);
  }
  const expected = goldenContent.split("\n");
  if (expected.length > 0 && expected[expected.length - 1] === "") expected.pop();
  const dataset = loadDataset(requireOption(values.dataset, "dataset"));
  const actual = datasetPrompts(dataset).map(escapePromptLine);

  const n = Math.min(expected.length, actual.length);
  for (let i = 0; i < n; i++) {
    if (actual[i] !== expected[i]) {
      console.error(`prompt ${i + 1} diverges:`);
      console.error(`  golden: ${expected[i]}`);
      console.error(`  local:  ${actual[i]}`);
      return EXIT_DATA;
    }
  }
  if (expected.length !== actual.length) {
    console.error(`prompt count diverges: golden has ${expected.length}, local has ${actual.length}`);
    const i = n; // first missing side
    console.error(`  first unmatched: ${(expected[i] ?? actual[i])!}`);
    return EXIT_DATA;
  }
  console.log(`verified ${actual.length} prompts against ${goldenPath}`);
  return EXIT_OK;
}

export function main(argv: string[]): number {
  try {
    const [command, ...rest] = argv;
    if (command === "export") return cmdExport(rest);
    if (command === "verify-prompts") return cmdVerifyPrompts(rest);
    throw new UsageError(command === undefined ? "missing command" : `unknown command ${JSON.stringify(command)}`);
  } catch (err) {
    if (err instanceof UsageError) {
      console.error(`error: ${err.message}`);
      console.error(USAGE);
      return EXIT_USAGE;
    }
    if (err instanceof EncoderError) {
      console.error(`encoder error: ${err.message}`);
      return EXIT_ENCODER;
    }
    if (err instanceof DataError) {
      console.error(`data error: ${err.message}`);
      return EXIT_DATA;
    }
    if (err instanceof RangeError || err instanceof TypeError) {
      // parseArgs signals unknown or malformed flags with TypeError
      console.error(`error: ${err.message}`);
      console.error(USAGE);
      return EXIT_USAGE;
    }
    throw err;
  }
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
