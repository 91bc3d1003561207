import { describe, expect, it } from "vitest";

import { resolveEncoder } from "../src/encoder";
import { EncoderError } from "../src/errors";

describe("resolveEncoder", () => {
  it("resolves the default and dimension-suffixed identifiers", () => {
    expect(resolveEncoder("ngram-v1", "mean").dim).toBe(32);
    expect(resolveEncoder("ngram-v1:7", "mean").dim).toBe(7);
  });

  it("rejects unknown identifiers and bad dimensions", () => {
    expect(() => resolveEncoder("bert-base", "mean")).toThrowError(EncoderError);
    expect(() => resolveEncoder("ngram-v1:0", "mean")).toThrowError(EncoderError);
    expect(() => resolveEncoder("ngram-v1:99999", "mean")).toThrowError(EncoderError);
  });
});

describe("ngram encoder", () => {
  const enc = resolveEncoder("ngram-v1:16", "mean");

  it("is deterministic and text-sensitive", () => {
    const [a1] = enc.encodeBatch(["hello world"]);
    const [a2] = enc.encodeBatch(["hello world"]);
    const [b] = enc.encodeBatch(["hello worlds"]);
    expect([...a1]).toEqual([...a2]);
    expect([...a1]).not.toEqual([...b]);
  });

  it("does not depend on batch boundaries", () => {
    const texts = ["a", "bb", "ccc", "dddd"];
    const whole = enc.encodeBatch(texts);
    const split = [...enc.encodeBatch(texts.slice(0, 1)), ...enc.encodeBatch(texts.slice(1))];
    for (let i = 0; i < texts.length; i++) {
      expect([...whole[i]]).toEqual([...split[i]]);
    }
  });

  it("emits the declared dimension with bounded components", () => {
    const [v] = enc.encodeBatch(["some reasonably long sentence, with punctuation"]);
    expect(v).toHaveLength(16);
    for (const x of v) expect(Math.abs(x)).toBeLessThanOrEqual(1);
  });

  it("maps empty text to the zero vector", () => {
    const [v] = enc.encodeBatch([""]);
    expect([...v]).toEqual(new Array(16).fill(0));
  });

  it("sum pooling equals mean pooling times the gram count", () => {
    const text = "abc"; // ^abc$ has the 3 trigrams ^ab, abc, bc$
    const [mean] = resolveEncoder("ngram-v1:8", "mean").encodeBatch([text]);
    const [sum] = resolveEncoder("ngram-v1:8", "sum").encodeBatch([text]);
    for (let i = 0; i < 8; i++) {
      expect(sum[i]).toBeCloseTo(mean[i] * 3, 12);
    }
  });

  it("treats astral code points as single characters", () => {
    // one emoji is one code point: ^x$ framing gives 1 + 2 = 3 char window
    const [a] = enc.encodeBatch(["\u{1f600}"]);
    const [b] = enc.encodeBatch(["\u{1f601}"]);
    expect([...a]).not.toEqual([...b]);
    expect([...a]).not.toEqual(new Array(16).fill(0));
  });
});
