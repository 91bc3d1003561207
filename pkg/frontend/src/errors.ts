/** Error taxonomy; the CLI maps each class to a distinct exit code. */

/** Unreadable or malformed dataset input. */
export class DataError extends Error {}

/** CSV or edge-list syntax problem, with 1-based line position. */
export class ParseError extends DataError {
  constructor(message: string, readonly lineno: number, readonly field?: number) {
    super(field === undefined ? `line ${lineno}: ${message}` : `line ${lineno}, field ${field}: ${message}`);
  }
}

export class DuplicateId extends DataError {
  constructor(readonly dupId: number) {
    super(`duplicate id ${dupId}`);
  }
}

export class DanglingReference extends DataError {}

export class EmptyGraph extends DataError {}

/** Encoder resolution or output-shape failure. */
export class EncoderError extends Error {}
