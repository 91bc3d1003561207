/**
 * Deterministic text encoders.
 *
 * Encoder identifiers are opaque strings; the file contract only requires
 * that an encoder maps each text to a fixed-dimension float vector
 * deterministically. The built-in "ngram-v1" encoder hashes character
 * trigrams into per-gram pseudo-random vectors and pools them, so equal
 * texts always produce equal vectors with no model weights involved.
 *
 * Identifier grammar: "ngram-v1" (32 dimensions) or "ngram-v1:<dim>".
 */

import { EncoderError } from "./errors";
import { fnv1a64 } from "./fnv";

export type Pooling = "mean" | "sum";

export interface Encoder {
  readonly id: string;
  readonly dim: number;
  encodeBatch(texts: string[]): Float64Array[];
}

const MASK64 = 0xffffffffffffffffn;
const GOLDEN = 0x9e3779b97f4a7c15n;
const MIX1 = 0xbf58476d1ce4e5b9n;
const MIX2 = 0x94d049bb133111ebn;
const DEFAULT_DIM = 32;
const MAX_DIM = 4096;

/** splitmix64 step: advances the state and returns the mixed output. */
function splitmix64(state: bigint): [bigint, bigint] {
  const next = (state + GOLDEN) & MASK64;
  let z = next;
  z = ((z ^ (z >> 30n)) * MIX1) & MASK64;
  z = ((z ^ (z >> 27n)) * MIX2) & MASK64;
  z = z ^ (z >> 31n);
  return [next, z];
}

/** Uniform draw in [-1, 1) from the top 53 bits of a 64-bit word. */
function toUnit(word: bigint): number {
  return (Number(word >> 11n) / 2 ** 53) * 2 - 1;
}

const utf8 = new TextEncoder();

function gramVector(gram: string, dim: number): Float64Array {
  let state = fnv1a64(utf8.encode(gram));
  const v = new Float64Array(dim);
  for (let i = 0; i < dim; i++) {
    const [next, word] = splitmix64(state);
    state = next;
    v[i] = toUnit(word);
  }
  return v;
}

/** Character trigrams over code points, with ^ and $ boundary markers. */
function trigrams(text: string): string[] {
  const chars = ["^", ...text, "$"];
  const grams: string[] = [];
  for (let i = 0; i + 2 < chars.length; i++) {
    grams.push(chars[i] + chars[i + 1] + chars[i + 2]);
  }
  return grams;
}

class NgramEncoder implements Encoder {
  constructor(
    readonly id: string,
    readonly dim: number,
    private readonly pooling: Pooling,
  ) {}

  private encodeOne(text: string): Float64Array {
    const grams = trigrams(text);
    const acc = new Float64Array(this.dim);
    for (const g of grams) {
      const v = gramVector(g, this.dim);
      for (let i = 0; i < this.dim; i++) acc[i] += v[i];
    }
    if (this.pooling === "mean" && grams.length > 0) {
      for (let i = 0; i < this.dim; i++) acc[i] /= grams.length;
    }
    return acc;
  }

  encodeBatch(texts: string[]): Float64Array[] {
    return texts.map((t) => this.encodeOne(t));
  }
}

export function resolveEncoder(id: string, pooling: Pooling): Encoder {
  const m = /^ngram-v1(?::(\d+))?$/.exec(id);
  if (m === null) {
    throw new EncoderError(`unknown encoder ${JSON.stringify(id)}`);
  }
  const dim = m[1] === undefined ? DEFAULT_DIM : parseInt(m[1], 10);
  if (dim < 1 || dim > MAX_DIM) {
    throw new EncoderError(`encoder dimension must be in [1, ${MAX_DIM}], got ${dim}`);
  }
  return new NgramEncoder(id, dim, pooling);
}
