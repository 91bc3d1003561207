import { describe, expect, it } from "vitest";

import { Dataset, Edge } from "../src/dataset";
import {
  datasetPrompts,
  escapePromptLine,
  linkPrompt,
  neighborPrompt,
  parseManifest,
  unescapePromptLine,
} from "../src/prompts";

// hand-built dataset view: one edge, raw-looking timestamp and label name
function twoNodeDataset(uText: string, vText: string, rText: string, t: number, label: string): Dataset {
  const entityText = new Map<number, string>();
  if (uText !== "") entityText.set(0, uText);
  entityText.set(1, vText);
  return {
    nodeCount: 2,
    edges: [{ src: 0, dst: 1, relationId: 0, timestamp: t, label: 0 }],
    labelNames: [label],
    entityText,
    relationText: new Map([[0, rText]]),
    relationOrder: [0],
  };
}

describe("prompt templates", () => {
  const ds = twoNodeDataset("Alice", "Bob", "email about deal", 42, "deal communication");
  const e = ds.edges[0];

  it("renders the neighbor prompt byte-exactly", () => {
    expect(neighborPrompt(ds, e)).toBe(
      "Entity Alice is connected to entity Bob via relation email about deal " +
        "at timestamp 42 with label deal communication",
    );
  });

  it("renders existence prompts byte-exactly", () => {
    expect(linkPrompt(ds, e, true)).toBe(
      "There is an edge between entity Alice and entity Bob via relation " +
        "email about deal at timestamp 42 with label deal communication",
    );
    expect(linkPrompt(ds, e, false).startsWith("There is no edge between entity")).toBe(true);
  });

  it("keeps the double space when a node has empty text", () => {
    const empty = twoNodeDataset("", "Bob", "rel", 0, "lbl");
    expect(neighborPrompt(empty, empty.edges[0]).startsWith("Entity  is connected to entity Bob")).toBe(true);
  });
});

describe("datasetPrompts", () => {
  it("lists neighbor prompts first, then an/no pairs, deduplicated", () => {
    const ds = twoNodeDataset("A", "B", "r", 0, "0");
    const more: Edge = { src: 1, dst: 0, relationId: 0, timestamp: 1, label: 0 };
    ds.edges.push(more);
    const prompts = datasetPrompts(ds);
    expect(prompts).toHaveLength(6);
    expect(prompts[0]).toMatch(/^Entity /);
    expect(prompts[1]).toMatch(/^Entity /);
    expect(prompts[2]).toMatch(/^There is an edge/);
    expect(prompts[3]).toMatch(/^There is no edge/);
    expect(new Set(prompts).size).toBe(prompts.length);
  });
});

describe("manifest escaping", () => {
  it("escapes backslashes, carriage returns and newlines", () => {
    expect(escapePromptLine("a\\b")).toBe("a\\\\b");
    expect(escapePromptLine("a\r\nb")).toBe("a\\r\\nb");
    expect(escapePromptLine("plain")).toBe("plain");
  });

  it("round-trips arbitrary control-character soup", () => {
    const cases = ["", "\\", "\\n", "a\nb\rc\\d", "\\\\r", "tail\\"];
    for (const s of cases) {
      const esc = escapePromptLine(s);
      expect(esc.includes("\n")).toBe(false);
      expect(esc.includes("\r")).toBe(false);
      expect(unescapePromptLine(esc)).toBe(s);
    }
  });

  it("leaves unknown escapes and a trailing backslash untouched", () => {
    expect(unescapePromptLine("a\\tb")).toBe("a\\tb");
    expect(unescapePromptLine("tail\\")).toBe("tail\\");
  });

  it("parses a manifest into one prompt per line", () => {
    expect(parseManifest("first\\nline\nsecond\n")).toEqual(["first\nline", "second"]);
    expect(parseManifest("")).toEqual([]);
  });
});
