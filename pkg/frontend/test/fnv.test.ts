import { describe, expect, it } from "vitest";

import { fnv1a64, textKey } from "../src/fnv";

const bytes = (s: string) => new TextEncoder().encode(s);

describe("fnv1a64", () => {
  it("matches the published reference vectors", () => {
    expect(fnv1a64(new Uint8Array(0))).toBe(0xcbf29ce484222325n);
    expect(fnv1a64(bytes("a"))).toBe(0xaf63dc4c8601ec8cn);
    expect(fnv1a64(bytes("foobar"))).toBe(0x85944171f73967e8n);
  });

  it("hashes UTF-8 bytes, not code units", () => {
    // "é" is 0xc3 0xa9 in UTF-8; hashing code units would see one unit 0xe9
    const manual = fnv1a64(new Uint8Array([0xc3, 0xa9]));
    expect(fnv1a64(bytes("é"))).toBe(manual);
  });
});

describe("textKey", () => {
  it("prints 16 lowercase hex digits with zero padding", () => {
    expect(textKey("")).toBe("cbf29ce484222325");
    expect(textKey("")).toHaveLength(16);
    for (const t of ["a", "foobar", "hello world", "Entity X"]) {
      expect(textKey(t)).toMatch(/^[0-9a-f]{16}$/);
    }
  });

  it("distinguishes nearby texts", () => {
    expect(textKey("a")).not.toBe(textKey("b"));
    expect(textKey("ab")).not.toBe(textKey("ba"));
  });
});
