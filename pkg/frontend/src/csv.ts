/**
 * Dataset file parsing.
 *
 * Edge lists are plain comma-separated integers, one edge per line. Text
 * tables are id,text CSV with RFC-4180 double-quote escaping, so quoted
 * fields may contain commas, quotes and newlines. Header lines are
 * auto-detected: if the first field of the first line is not an integer,
 * the line is skipped.
 */

import { DuplicateId, ParseError } from "./errors";

export interface RawEdge {
  src: number;
  dst: number;
  relationId: number;
  timestamp: number;
  label: number;
}

export type TextEntry = [id: number, text: string];

const INT_RE = /^\s*[+-]?\d+\s*$/;

function isInt(field: string): boolean {
  return INT_RE.test(field);
}

function toInt(field: string, lineno: number, fieldIdx: number): number {
  if (!isInt(field)) {
    throw new ParseError(`non-integer field ${JSON.stringify(field)}`, lineno, fieldIdx);
  }
  const n = Number(field.trim());
  if (!Number.isSafeInteger(n)) {
    throw new ParseError(`integer out of range ${JSON.stringify(field)}`, lineno, fieldIdx);
  }
  return n;
}

/** Raw edges in file order; timestamps and labels keep their raw values. */
export function parseEdgeList(content: string): RawEdge[] {
  const edges: RawEdge[] = [];
  const lines = content.split("\n");
  for (let i = 0; i < lines.length; i++) {
    const lineno = i + 1;
    const line = lines[i].replace(/\r$/, "");
    if (line === "") continue;
    const fields = line.split(",");
    if (lineno === 1 && fields.length > 0 && !isInt(fields[0])) {
      continue; // header
    }
    if (fields.length !== 5) {
      throw new ParseError(`expected 5 comma-separated fields, got ${fields.length}`, lineno);
    }
    const v = fields.map((f, j) => toInt(f, lineno, j + 1));
    edges.push({ src: v[0], dst: v[1], relationId: v[2], timestamp: v[3], label: v[4] });
  }
  return edges;
}

/**
 * Split CSV content into rows of fields. A field starting with a double
 * quote runs to the matching closing quote, with "" as a literal quote;
 * the closing quote must be followed by a comma, a line break or EOF.
 */
function csvRows(content: string): { row: string[]; lineno: number }[] {
  const rows: { row: string[]; lineno: number }[] = [];
  let fields: string[] = [];
  let buf = "";
  let lineno = 1;
  let rowStart = 1;
  let i = 0;
  const n = content.length;

  const endField = () => fields.push(buf);
  const endRow = () => {
    endField();
    // a lone newline yields one empty field: treat as a blank row
    if (!(fields.length === 1 && fields[0] === "")) {
      rows.push({ row: fields, lineno: rowStart });
    }
    fields = [];
    buf = "";
    rowStart = lineno;
  };

  while (i < n) {
    const c = content[i];
    if (c === '"' && buf === "") {
      i++; // opening quote
      for (;;) {
        if (i >= n) throw new ParseError("unterminated quoted field", lineno);
        const q = content[i];
        if (q === '"') {
          if (content[i + 1] === '"') {
            buf += '"';
            i += 2;
            continue;
          }
          i++; // closing quote
          break;
        }
        if (q === "\n") lineno++;
        buf += q;
        i++;
      }
      const after = i < n ? content[i] : undefined;
      if (after !== undefined && after !== "," && after !== "\n" && after !== "\r") {
        throw new ParseError(`unexpected character ${JSON.stringify(after)} after closing quote`, lineno);
      }
      // force the field to end even if empty, so `"",x` keeps two fields
      if (after === ",") {
        endField();
        buf = "";
        i++;
        continue;
      }
      if (after === "\r" && content[i + 1] === "\n") i++;
      if (after !== undefined) {
        lineno++;
        i++;
      }
      endRow();
      if (after === undefined) return rows;
      continue;
    }
    if (c === ",") {
      endField();
      buf = "";
      i++;
      continue;
    }
    if (c === "\n" || c === "\r") {
      if (c === "\r" && content[i + 1] === "\n") i++;
      lineno++;
      i++;
      endRow();
      continue;
    }
    buf += c;
    i++;
  }
  if (buf !== "" || fields.length > 0) endRow();
  return rows;
}

/** Parse an id,text CSV into entries, rejecting duplicate ids. */
export function parseTextTable(content: string): TextEntry[] {
  const entries: TextEntry[] = [];
  const seen = new Set<number>();
  for (const { row, lineno } of csvRows(content)) {
    if (lineno === 1 && !isInt(row[0])) {
      continue; // header
    }
    if (row.length !== 2) {
      throw new ParseError(`expected 2 fields, got ${row.length}`, lineno);
    }
    const id = toInt(row[0], lineno, 1);
    if (seen.has(id)) throw new DuplicateId(id);
    seen.add(id);
    entries.push([id, row[1]]);
  }
  return entries;
}
