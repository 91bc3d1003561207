/**
 * Prompt templates and the escaped-line manifest format.
 *
 * The two templates must reproduce the training side's prompts byte for
 * byte, since prompt embeddings are looked up by a hash of the exact
 * prompt string. Golden-file verification exists to catch any drift.
 *
 * Manifests store one prompt per line with backslash escaping, so prompts
 * containing newlines survive the line-oriented format: "\\" for a
 * backslash, "\n" for a line feed, "\r" for a carriage return.
 */

import { Dataset, Edge, nodeText } from "./dataset";

function labelName(ds: Dataset, e: Edge): string {
  return ds.labelNames[e.label];
}

function relationTextOf(ds: Dataset, e: Edge): string {
  return ds.relationText.get(e.relationId)!;
}

/** Textual description of an observed edge, seen from its neighborhood. */
export function neighborPrompt(ds: Dataset, e: Edge): string {
  return (
    `Entity ${nodeText(ds, e.src)} is connected to entity ${nodeText(ds, e.dst)} ` +
    `via relation ${relationTextOf(ds, e)} at timestamp ${e.timestamp} ` +
    `with label ${labelName(ds, e)}`
  );
}

/** Existence statement about a (possibly fake) edge. */
export function linkPrompt(ds: Dataset, e: Edge, positive: boolean): string {
  const word = positive ? "an" : "no";
  return (
    `There is ${word} edge between entity ${nodeText(ds, e.src)} ` +
    `and entity ${nodeText(ds, e.dst)} ` +
    `via relation ${relationTextOf(ds, e)} at timestamp ${e.timestamp} ` +
    `with label ${labelName(ds, e)}`
  );
}

/**
 * Every prompt derivable from the dataset alone, duplicates removed,
 * first occurrence order: neighbor prompts for each edge, then positive
 * and negative existence prompts for each edge.
 */
export function datasetPrompts(ds: Dataset): string[] {
  const seen = new Set<string>();
  const out: string[] = [];
  const add = (p: string) => {
    if (!seen.has(p)) {
      seen.add(p);
      out.push(p);
    }
  };
  for (const e of ds.edges) add(neighborPrompt(ds, e));
  for (const e of ds.edges) {
    add(linkPrompt(ds, e, true));
    add(linkPrompt(ds, e, false));
  }
  return out;
}

export function escapePromptLine(s: string): string {
  return s.replace(/\\/g, "\\\\").replace(/\r/g, "\\r").replace(/\n/g, "\\n");
}

export function unescapePromptLine(s: string): string {
  let out = "";
  let i = 0;
  while (i < s.length) {
    const c = s[i];
    if (c === "\\" && i + 1 < s.length) {
      const nxt = s[i + 1];
      if (nxt === "\\") {
        out += "\\";
        i += 2;
        continue;
      }
      if (nxt === "n") {
        out += "\n";
        i += 2;
        continue;
      }
      if (nxt === "r") {
        out += "\r";
        i += 2;
        continue;
      }
    }
    out += c;
    i += 1;
  }
  return out;
}

/** Read an escaped-line manifest into its prompt strings. */
export function parseManifest(content: string): string[] {
  const lines = content.split("\n");
  if (lines.length > 0 && lines[lines.length - 1] === "") lines.pop();
  return lines.map(unescapePromptLine);
}
