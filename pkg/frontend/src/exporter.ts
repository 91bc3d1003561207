/**
 * Export jobs: turn one dataset's texts or prompts into one embedding
 * cache file.
 *
 * Four targets exist, one per cache file consumed downstream:
 *
 *   node-text          distinct node texts (missing table rows read as "")
 *   relation-text      distinct relation texts in table order
 *   neighbor-prompts   distinct neighbor prompts, edge order
 *   link-prompts       distinct positive/negative existence prompts, edge
 *                      order, plus any extra prompts from a manifest
 *
 * The extra-manifest hook exists because negative existence prompts used
 * during training are sampled there, not derivable from the dataset; the
 * training side writes them to a manifest that is fed back in here.
 *
 * Encoding runs in batches. The output dimension is recorded from the
 * first batch and enforced on every later one; any drift aborts the job.
 */

import { Dataset, nodeText } from "./dataset";
import { writeEmbFile } from "./emb";
import { Encoder } from "./encoder";
import { EncoderError } from "./errors";
import { textKey } from "./fnv";
import { linkPrompt, neighborPrompt } from "./prompts";

export const TARGETS = ["node-text", "relation-text", "neighbor-prompts", "link-prompts"] as const;
export type Target = (typeof TARGETS)[number];

export interface ExportJob {
  dataset: Dataset;
  target: Target;
  encoder: Encoder;
  outPath: string;
  batchSize: number;
  extraPrompts?: string[]; // merged into the link-prompts target
}

function dedup(texts: Iterable<string>): string[] {
  const seen = new Set<string>();
  const out: string[] = [];
  for (const t of texts) {
    if (!seen.has(t)) {
      seen.add(t);
      out.push(t);
    }
  }
  return out;
}

/** The texts a target covers, duplicates removed, first occurrence order. */
export function targetTexts(ds: Dataset, target: Target, extraPrompts: string[] = []): string[] {
  switch (target) {
    case "node-text": {
      const texts: string[] = [];
      for (let u = 0; u < ds.nodeCount; u++) texts.push(nodeText(ds, u));
      return dedup(texts);
    }
    case "relation-text":
      return dedup(ds.relationOrder.map((id) => ds.relationText.get(id)!));
    case "neighbor-prompts":
      return dedup(ds.edges.map((e) => neighborPrompt(ds, e)));
    case "link-prompts": {
      const texts: string[] = [];
      for (const e of ds.edges) {
        texts.push(linkPrompt(ds, e, true));
        texts.push(linkPrompt(ds, e, false));
      }
      texts.push(...extraPrompts);
      return dedup(texts);
    }
  }
}

/** Encode all texts for a job and write its cache file. Returns the entry count. */
export function runExport(job: ExportJob): number {
  if (job.batchSize < 1) throw new RangeError(`batch size must be >= 1, got ${job.batchSize}`);
  const texts = targetTexts(job.dataset, job.target, job.extraPrompts ?? []);

  const entries = new Map<string, Float64Array>();
  let dim = 0;
  for (let start = 0; start < texts.length; start += job.batchSize) {
    const batch = texts.slice(start, start + job.batchSize);
    const vecs = job.encoder.encodeBatch(batch);
    if (vecs.length !== batch.length) {
      throw new EncoderError(`encoder returned ${vecs.length} vectors for ${batch.length} texts`);
    }
    for (let i = 0; i < batch.length; i++) {
      const vec = vecs[i];
      if (dim === 0) dim = vec.length;
      if (vec.length !== dim) {
        throw new EncoderError(`output dimension drifted from ${dim} to ${vec.length}`);
      }
      entries.set(textKey(batch[i]), vec);
    }
  }
  if (dim === 0) dim = job.encoder.dim; // no texts: fall back to the declared width
  writeEmbFile(job.outPath, dim, entries);
  return entries.size;
}
