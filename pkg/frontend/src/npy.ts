/**
 * Minimal NPY (v1.0) codec for the two array flavors that cross the
 * process boundary: binary fault masks and float64 probability maps.
 *
 * The writer reproduces numpy's header layout byte for byte (single
 * quotes, trailing comma, space padding to a 64-byte multiple) so that
 * files written here are indistinguishable from `numpy.save` output.
 * Everything is copied on the way in and out; no views escape.
 */

const MAGIC = Buffer.from("\x93NUMPY", "latin1");

/** Binary mask: row-major 0/1 bytes, shape height x width. */
export interface Mask {
  readonly height: number;
  readonly width: number;
  readonly data: Uint8Array;
}

/** Probability map: row-major float64 values, shape height x width. */
export interface ProbMap {
  readonly height: number;
  readonly width: number;
  readonly data: Float64Array;
}

function checkShape(height: number, width: number, length: number): void {
  if (!Number.isInteger(height) || !Number.isInteger(width) || height < 0 || width < 0) {
    throw new RangeError(`invalid shape ${height}x${width}`);
  }
  if (height * width !== length) {
    throw new RangeError(`data length ${length} does not match shape ${height}x${width}`);
  }
}

/** Build a mask from nested rows; any nonzero entry counts as fault. */
export function maskFrom(rows: ReadonlyArray<ReadonlyArray<number>>): Mask {
  const height = rows.length;
  const width = height === 0 ? 0 : rows[0]!.length;
  const data = new Uint8Array(height * width);
  for (let r = 0; r < height; r++) {
    const row = rows[r]!;
    if (row.length !== width) throw new RangeError("ragged rows");
    for (let c = 0; c < width; c++) data[r * width + c] = row[c] !== 0 ? 1 : 0;
  }
  return { height, width, data };
}

/** Build a probability map from nested rows of floats. */
export function mapFrom(rows: ReadonlyArray<ReadonlyArray<number>>): ProbMap {
  const height = rows.length;
  const width = height === 0 ? 0 : rows[0]!.length;
  const data = new Float64Array(height * width);
  for (let r = 0; r < height; r++) {
    const row = rows[r]!;
    if (row.length !== width) throw new RangeError("ragged rows");
    for (let c = 0; c < width; c++) data[r * width + c] = row[c]!;
  }
  return { height, width, data };
}

// numpy pads the header dict with spaces so that the whole preamble
// (magic + version + length + dict + '\n') lands on a 64-byte multiple.
function header(descr: string, height: number, width: number): Buffer {
  const dict = `{'descr': '${descr}', 'fortran_order': False, 'shape': (${height}, ${width}), }`;
  const base = MAGIC.length + 2 + 2 + dict.length + 1;
  const pad = (64 - (base % 64)) % 64;
  const text = dict + " ".repeat(pad) + "\n";
  const out = Buffer.alloc(MAGIC.length + 4 + text.length);
  MAGIC.copy(out, 0);
  out[6] = 1; // format version 1.0
  out[7] = 0;
  out.writeUInt16LE(text.length, 8);
  out.write(text, 10, "latin1");
  return out;
}

/** Serialize a mask as a '|b1' NPY file (bytes forced to 0/1). */
export function encodeMask(mask: Mask): Buffer {
  checkShape(mask.height, mask.width, mask.data.length);
  const head = header("|b1", mask.height, mask.width);
  const out = Buffer.alloc(head.length + mask.data.length);
  head.copy(out, 0);
  for (let i = 0; i < mask.data.length; i++) out[head.length + i] = mask.data[i] !== 0 ? 1 : 0;
  return out;
}

/** Serialize a probability map as a '<f8' NPY file. */
export function encodeMap(map: ProbMap): Buffer {
  checkShape(map.height, map.width, map.data.length);
  const head = header("<f8", map.height, map.width);
  const out = Buffer.alloc(head.length + map.data.length * 8);
  head.copy(out, 0);
  const view = new DataView(out.buffer, out.byteOffset + head.length);
  for (let i = 0; i < map.data.length; i++) view.setFloat64(i * 8, map.data[i]!, true);
  return out;
}

interface RawNpy {
  readonly descr: string;
  readonly height: number;
  readonly width: number;
  readonly payload: Buffer;
}

function parseNpy(buf: Buffer): RawNpy {
  if (buf.length < 10 || !buf.subarray(0, 6).equals(MAGIC)) {
    throw new Error("not an NPY file");
  }
  const major = buf[6]!;
  let headerLen: number;
  let offset: number;
  if (major === 1) {
    headerLen = buf.readUInt16LE(8);
    offset = 10;
  } else if (major === 2) {
    headerLen = buf.readUInt32LE(8);
    offset = 12;
  } else {
    throw new Error(`unsupported NPY version ${major}.${buf[7]}`);
  }
  const text = buf.subarray(offset, offset + headerLen).toString("latin1");
  const descr = /'descr':\s*'([^']+)'/.exec(text)?.[1];
  const fortran = /'fortran_order':\s*(True|False)/.exec(text)?.[1];
  const shape = /'shape':\s*\(([^)]*)\)/.exec(text)?.[1];
  if (!descr || !fortran || shape === undefined) {
    throw new Error(`malformed NPY header: ${text.trim()}`);
  }
  if (fortran === "True") throw new Error("fortran-order arrays are not supported");
  const dims = shape.split(",").map((s) => s.trim()).filter((s) => s.length > 0).map(Number);
  if (dims.length !== 2 || dims.some((d) => !Number.isInteger(d) || d < 0)) {
    throw new Error(`expected a 2D array, got shape (${shape})`);
  }
  return {
    descr,
    height: dims[0]!,
    width: dims[1]!,
    payload: buf.subarray(offset + headerLen),
  };
}

/** Parse a '|b1' or '|u1' NPY buffer into a 0/1 mask. */
export function decodeMask(buf: Buffer): Mask {
  const raw = parseNpy(buf);
  if (raw.descr !== "|b1" && raw.descr !== "|u1") {
    throw new Error(`expected a byte mask, got dtype ${raw.descr}`);
  }
  const n = raw.height * raw.width;
  if (raw.payload.length < n) throw new Error("truncated NPY payload");
  const data = new Uint8Array(n);
  for (let i = 0; i < n; i++) data[i] = raw.payload[i] !== 0 ? 1 : 0;
  return { height: raw.height, width: raw.width, data };
}

/** Parse a '<f8' or '<f4' NPY buffer into a float64 map. */
export function decodeMap(buf: Buffer): ProbMap {
  const raw = parseNpy(buf);
  const itemSize = raw.descr === "<f8" ? 8 : raw.descr === "<f4" ? 4 : 0;
  if (itemSize === 0) throw new Error(`expected a float map, got dtype ${raw.descr}`);
  const n = raw.height * raw.width;
  if (raw.payload.length < n * itemSize) throw new Error("truncated NPY payload");
  const view = new DataView(raw.payload.buffer, raw.payload.byteOffset);
  const data = new Float64Array(n);
  for (let i = 0; i < n; i++) {
    data[i] = itemSize === 8 ? view.getFloat64(i * 8, true) : view.getFloat32(i * 4, true);
  }
  return { height: raw.height, width: raw.width, data };
}
