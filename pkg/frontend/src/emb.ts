/**
 * The DYTAG-EMB v1 embedding cache file format.
 *
 * Layout: a header line "DYTAG-EMB v1 <dim> <count>", then one line per
 * entry, "<key> <v1> .. <vdim>", sorted by key, LF endings. Keys are 16
 * lowercase hex digits; values are decimal floats printed to 9
 * significant digits.
 */

import * as fs from "node:fs";
import * as path from "node:path";
import * as process from "node:process";

import { DataError } from "./errors";
import { formatValue } from "./format";

export const MAGIC = "DYTAG-EMB";
export const VERSION = "v1";

const KEY_RE = /^[0-9a-f]{16}$/;

export function renderEmbFile(dim: number, entries: Map<string, Float64Array>): string {
  const lines = [`${MAGIC} ${VERSION} ${dim} ${entries.size}`];
  for (const key of [...entries.keys()].sort()) {
    const vec = entries.get(key)!;
    if (vec.length !== dim) {
      throw new DataError(`entry ${key} has ${vec.length} values, expected ${dim}`);
    }
    lines.push(key + " " + Array.from(vec, formatValue).join(" "));
  }
  return lines.join("\n") + "\n";
}

/** Write the file atomically: temp file in the target directory, then rename. */
export function writeEmbFile(outPath: string, dim: number, entries: Map<string, Float64Array>): void {
  const content = renderEmbFile(dim, entries);
  const dir = path.dirname(outPath);
  fs.mkdirSync(dir, { recursive: true });
  const tmp = path.join(dir, `.${path.basename(outPath)}.tmp-${process.pid}`);
  fs.writeFileSync(tmp, content, "utf-8");
  fs.renameSync(tmp, outPath);
}

/** Parse a cache file back into (dim, entries); used to check round trips. */
export function parseEmbFile(content: string): { dim: number; entries: Map<string, Float64Array> } {
  const lines = content.split("\n");
  if (lines.length > 0 && lines[lines.length - 1] === "") lines.pop();
  if (lines.length === 0) throw new DataError("empty file");
  const header = lines[0].split(" ");
  if (header.length !== 4 || header[0] !== MAGIC || header[1] !== VERSION) {
    throw new DataError(`bad header ${JSON.stringify(lines[0])}`);
  }
  const dim = Number(header[2]);
  const count = Number(header[3]);
  if (!Number.isInteger(dim) || !Number.isInteger(count) || dim < 1 || count < 0) {
    throw new DataError(`invalid dim ${header[2]} or count ${header[3]}`);
  }
  if (lines.length - 1 !== count) {
    throw new DataError(`header says ${count} entries, file has ${lines.length - 1}`);
  }
  const entries = new Map<string, Float64Array>();
  for (let i = 1; i < lines.length; i++) {
    const fields = lines[i].split(" ");
    if (fields.length !== dim + 1) {
      throw new DataError(`line ${i + 1}: expected ${dim + 1} fields, got ${fields.length}`);
    }
    const key = fields[0];
    if (!KEY_RE.test(key)) throw new DataError(`line ${i + 1}: bad key ${JSON.stringify(key)}`);
    if (entries.has(key)) throw new DataError(`line ${i + 1}: duplicate key ${key}`);
    const vec = new Float64Array(dim);
    for (let j = 0; j < dim; j++) {
      const x = Number(fields[j + 1]);
      if (fields[j + 1] === "" || Number.isNaN(x)) {
        throw new DataError(`line ${i + 1}: unparseable float ${JSON.stringify(fields[j + 1])}`);
      }
      vec[j] = x;
    }
    entries.set(key, vec);
  }
  return { dim, entries };
}
