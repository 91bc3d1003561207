/**
 * FNV-1a 64-bit hashing and the cache key convention.
 *
 * Embedding cache files key every vector by the FNV-1a hash of the UTF-8
 * bytes of the original text, printed as 16 lowercase hex digits. The
 * training side derives keys the same way, so files written here resolve
 * lookups there without shipping the raw texts.
 */

const FNV_OFFSET = 0xcbf29ce484222325n;
const FNV_PRIME = 0x100000001b3n;
const MASK64 = 0xffffffffffffffffn;

export function fnv1a64(data: Uint8Array): bigint {
  let h = FNV_OFFSET;
  for (const byte of data) {
    h ^= BigInt(byte);
    h = (h * FNV_PRIME) & MASK64;
  }
  return h;
}

const utf8 = new TextEncoder();

/** Cache key of a text: 16 lowercase hex digits. */
export function textKey(text: string): string {
  return fnv1a64(utf8.encode(text)).toString(16).padStart(16, "0");
}
