/**
 * Dataset assembly: raw CSV parts become a graph view with dense
 * timestamps, a sorted label vocabulary and validated references.
 *
 * A dataset directory holds three files:
 *
 *     edge_list.csv      src,dst,relation_id,timestamp,label
 *     entity_text.csv    id,text
 *     relation_text.csv  id,text
 *
 * Raw timestamps may be sparse; they are re-indexed to dense integers
 * 0..T-1 (order-preserving). Raw label values map to indices of a sorted
 * vocabulary whose names are the original decimal strings. Edges are kept
 * globally sorted by (timestamp, src, dst, relation_id, label).
 */

import * as fs from "node:fs";
import * as path from "node:path";

import { parseEdgeList, parseTextTable, RawEdge, TextEntry } from "./csv";
import { DanglingReference, DataError, EmptyGraph } from "./errors";

export const EDGE_FILE = "edge_list.csv";
export const ENTITY_FILE = "entity_text.csv";
export const RELATION_FILE = "relation_text.csv";

export interface Edge {
  src: number;
  dst: number;
  relationId: number;
  timestamp: number; // dense, 0..T-1
  label: number; // index into labelNames
}

export interface Dataset {
  nodeCount: number;
  edges: Edge[]; // sorted by (timestamp, src, dst, relationId, label)
  labelNames: string[];
  entityText: Map<number, string>;
  relationText: Map<number, string>;
  relationOrder: number[]; // relation ids in table order
}

/** Order-preserving map from raw integer values to 0..n-1. */
export function densify(values: number[]): Map<number, number> {
  const sorted = [...new Set(values)].sort((a, b) => a - b);
  return new Map(sorted.map((raw, i) => [raw, i]));
}

function compareEdges(a: Edge, b: Edge): number {
  return (
    a.timestamp - b.timestamp ||
    a.src - b.src ||
    a.dst - b.dst ||
    a.relationId - b.relationId ||
    a.label - b.label
  );
}

export function assemble(
  rawEdges: RawEdge[],
  entityEntries: TextEntry[],
  relationEntries: TextEntry[],
): Dataset {
  const entityText = new Map(entityEntries);
  const relationText = new Map(relationEntries);
  for (const e of rawEdges) {
    if (!entityText.has(e.src) || !entityText.has(e.dst)) {
      const missing = entityText.has(e.src) ? e.dst : e.src;
      throw new DanglingReference(`edge references unknown entity id ${missing}`);
    }
    if (!relationText.has(e.relationId)) {
      throw new DanglingReference(`edge references unknown relation id ${e.relationId}`);
    }
  }

  let maxId = -1;
  for (const [id] of entityEntries) maxId = Math.max(maxId, id);
  for (const e of rawEdges) maxId = Math.max(maxId, e.src, e.dst);
  const nodeCount = maxId + 1;
  if (nodeCount === 0) throw new EmptyGraph("dataset has no entities");

  const tMap = densify(rawEdges.map((e) => e.timestamp));
  const rawLabels = [...new Set(rawEdges.map((e) => e.label))].sort((a, b) => a - b);
  const lMap = new Map(rawLabels.map((raw, i) => [raw, i]));
  const labelNames = rawLabels.length > 0 ? rawLabels.map(String) : ["0"];

  const edges = rawEdges.map((e) => ({
    src: e.src,
    dst: e.dst,
    relationId: e.relationId,
    timestamp: tMap.get(e.timestamp)!,
    label: lMap.get(e.label)!,
  }));
  edges.sort(compareEdges);

  return {
    nodeCount,
    edges,
    labelNames,
    entityText,
    relationText,
    relationOrder: relationEntries.map(([id]) => id),
  };
}

function readFile(dir: string, name: string): string {
  const p = path.join(dir, name);
  let content: string;
  try {
    content = fs.readFileSync(p, "utf-8");
  } catch (err) {
    throw new DataError(`cannot read dataset file ${p}: ${(err as Error).message}`);
  }
  return content;
}

export function loadDataset(dir: string): Dataset {
  const rawEdges = parseEdgeList(readFile(dir, EDGE_FILE));
  const entityEntries = parseTextTable(readFile(dir, ENTITY_FILE));
  const relationEntries = parseTextTable(readFile(dir, RELATION_FILE));
  return assemble(rawEdges, entityEntries, relationEntries);
}

/** Node text lookup: nodes without a table entry read as empty text. */
export function nodeText(ds: Dataset, u: number): string {
  return ds.entityText.get(u) ?? "";
}
