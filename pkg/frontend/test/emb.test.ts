import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";

import { afterAll, describe, expect, it } from "vitest";

import { parseEmbFile, renderEmbFile, writeEmbFile } from "../src/emb";
import { DataError } from "../src/errors";

const k = (c: string) => c.repeat(16);

function sampleEntries(): Map<string, Float64Array> {
  return new Map([
    [k("b"), new Float64Array([1, 0.5])],
    [k("a"), new Float64Array([0.1, 1 / 3])],
    [k("c"), new Float64Array([-2.5e-11, 1234567891])],
  ]);
}

describe("renderEmbFile", () => {
  it("writes header, sorted keys, 9-significant-digit values, LF endings", () => {
    const text = renderEmbFile(2, sampleEntries());
    expect(text).toBe(
      "DYTAG-EMB v1 2 3\n" +
        `${k("a")} 0.1 0.333333333\n` +
        `${k("b")} 1 0.5\n` +
        `${k("c")} -2.5e-11 1.23456789e+09\n`,
    );
    expect(text.includes("\r")).toBe(false);
  });

  it("writes a bare header for an empty map", () => {
    expect(renderEmbFile(3, new Map())).toBe("DYTAG-EMB v1 3 0\n");
  });

  it("rejects entries whose width disagrees with the declared dimension", () => {
    const bad = new Map([[k("a"), new Float64Array([1, 2, 3])]]);
    expect(() => renderEmbFile(2, bad)).toThrowError(DataError);
  });
});

describe("parseEmbFile", () => {
  it("round-trips render output byte-identically", () => {
    const text = renderEmbFile(2, sampleEntries());
    const { dim, entries } = parseEmbFile(text);
    expect(dim).toBe(2);
    expect(renderEmbFile(dim, entries)).toBe(text);
  });

  it.each([
    "",
    "BAD-MAGIC v1 2 0\n",
    "DYTAG-EMB v2 2 0\n",
    "DYTAG-EMB v1 x 0\n",
    "DYTAG-EMB v1 0 0\n",
    "DYTAG-EMB v1 2 5\n",
    `DYTAG-EMB v1 2 1\n${k("a")} 1\n`,
    `DYTAG-EMB v1 2 1\nshortkey 1 2\n`,
    `DYTAG-EMB v1 2 1\n${k("A")} 1 2\n`,
    `DYTAG-EMB v1 2 1\n${k("a")} 1 x\n`,
    `DYTAG-EMB v1 2 2\n${k("a")} 1 2\n${k("a")} 1 2\n`,
  ])("rejects malformed content %#", (content) => {
    expect(() => parseEmbFile(content)).toThrowError(DataError);
  });
});

describe("writeEmbFile", () => {
  const dir = fs.mkdtempSync(path.join(os.tmpdir(), "emb-"));
  afterAll(() => fs.rmSync(dir, { recursive: true, force: true }));

  it("creates parent directories and leaves no temp files behind", () => {
    const out = path.join(dir, "deep", "nested", "x.emb");
    writeEmbFile(out, 2, sampleEntries());
    expect(fs.readFileSync(out, "utf-8")).toBe(renderEmbFile(2, sampleEntries()));
    const siblings = fs.readdirSync(path.dirname(out));
    expect(siblings).toEqual(["x.emb"]);
  });

  it("replaces an existing file atomically by rename", () => {
    const out = path.join(dir, "y.emb");
    writeEmbFile(out, 1, new Map([[k("a"), new Float64Array([1])]]));
    writeEmbFile(out, 1, new Map([[k("b"), new Float64Array([2])]]));
    expect(fs.readFileSync(out, "utf-8")).toBe(`DYTAG-EMB v1 1 1\n${k("b")} 2\n`);
  });
});
