"""Readers and writers for seismic volumes and fault masks.

Supported formats:

* SEG-Y rev 0 with 4-byte IBM hex floats (format code 1) or 4-byte IEEE
  floats (format code 5), fixed-length traces, one volume per file.
* Headerless raw binary: float32 samples in (inline, crossline, sample)
  C order, either byte order.
* NPY versions 1.0 and 2.0, C order only.
* 8-bit grayscale or palette PNG masks; gray value > 127 means fault.

All readers accept a filesystem path, raw bytes, or a binary file
object, and return the wrapper types from :mod:`faultbench.types`.
"""

from __future__ import annotations

import io
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import (
    ConfigError,
    FortranOrderUnsupported,
    IrregularGeometry,
    NonFiniteSample,
    SizeMismatch,
    TruncatedFile,
    UnsupportedColorType,
    UnsupportedDtype,
    UnsupportedFormatCode,
    UnsupportedRank,
)
from .types import FaultMask, ProbabilityMap, SeismicVolume, SourceFormat

TEXT_HEADER_LEN = 3200
BINARY_HEADER_LEN = 400
TRACE_HEADER_LEN = 240
SAMPLE_BYTES = 4

IBM_FLOAT = 1
IEEE_FLOAT = 5
SUPPORTED_FORMAT_CODES = (IBM_FLOAT, IEEE_FLOAT)

# Zero-based offsets into the 400-byte binary header (all big-endian).
_BIN_INTERVAL_OFF = 16  # sample interval, microseconds
_BIN_NSAMPLES_OFF = 20  # samples per trace
_BIN_FORMAT_OFF = 24  # sample format code

# One-based byte positions within the 240-byte trace header. 189/193 is
# the common convention for 3-D post-stack data; both are configurable
# because vendors disagree.
DEFAULT_INLINE_BYTE = 189
DEFAULT_CROSSLINE_BYTE = 193
_TRACE_NSAMPLES_OFF = 114  # zero-based: trace sample count (informational)
_TRACE_INTERVAL_OFF = 116  # zero-based: trace sample interval


# ---------------------------------------------------------------------------
# IBM System/360 32-bit hexadecimal floats
# ---------------------------------------------------------------------------

def ibm_to_float(bits) -> np.ndarray:
    """Decode IBM 32-bit hex floats from uint32 bit patterns to float64.

    Layout: sign bit, 7-bit excess-64 base-16 exponent, 24-bit fraction:
    value = sign * fraction/2**24 * 16**(exponent-64). The result must be
    float64; the IBM exponent range (about 1e-79 .. 7e75) overflows
    float32.
    """
    u = np.asarray(bits, dtype=np.uint32)
    sign = np.where(u >> np.uint32(31), -1.0, 1.0)
    exponent = ((u >> np.uint32(24)) & np.uint32(0x7F)).astype(np.int64)
    fraction = (u & np.uint32(0x00FFFFFF)).astype(np.float64)
    # fraction/2**24 * 16**(exp-64) == ldexp(fraction, 4*exp - 280)
    return sign * np.ldexp(fraction, 4 * exponent - 280)


def float_to_ibm(values) -> np.ndarray:
    """Encode float64 values as the nearest IBM 32-bit hex floats.

    Zero maps to the all-zero pattern. Magnitudes below the smallest
    normalized IBM float flush to zero; magnitudes above the largest
    saturate. Patterns round-trip exactly through :func:`ibm_to_float`
    whenever the value is exactly representable (in particular, any
    normalized IBM pattern decoded by it).
    """
    v = np.asarray(values, dtype=np.float64)
    if not np.isfinite(v).all():
        raise NonFiniteSample("cannot encode non-finite values as IBM floats")
    out = np.zeros(v.shape, dtype=np.uint32)
    nz = v != 0.0
    if not nz.any():
        return out
    mag = np.abs(v[nz])
    m2, e2 = np.frexp(mag)
    # Regroup the base-2 exponent in chunks of 4: mag = m16 * 16**e16
    # with m16 in [1/16, 1).
    e16 = -(-e2 // 4)
    m16 = np.ldexp(m2, e2 - 4 * e16)
    fraction = np.rint(np.ldexp(m16, 24)).astype(np.int64)
    carry = fraction == 1 << 24  # rounding spilled into the next hex digit
    fraction[carry] >>= 4
    exponent = e16 + carry + 64
    fraction = np.where(exponent > 127, 0x00FFFFFF, fraction)
    exponent = np.minimum(exponent, 127)
    keep = exponent >= 0  # underflow flushes to +0
    word = (exponent.astype(np.uint32) << np.uint32(24)) | fraction.astype(np.uint32)
    word |= np.where(v[nz] < 0, np.uint32(0x80000000), np.uint32(0))
    out[nz] = np.where(keep, word, np.uint32(0))
    return out


# ---------------------------------------------------------------------------
# SEG-Y
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SegyBinaryHeader:
    """The fields of the 400-byte binary header this toolkit consumes."""

    sample_interval_us: int
    samples_per_trace: int
    format_code: int
    raw: bytes

    @classmethod
    def parse(cls, raw: bytes) -> "SegyBinaryHeader":
        if len(raw) != BINARY_HEADER_LEN:
            raise TruncatedFile(
                f"binary header needs {BINARY_HEADER_LEN} bytes, got {len(raw)}"
            )
        interval, = struct.unpack_from(">H", raw, _BIN_INTERVAL_OFF)
        nsamples, = struct.unpack_from(">H", raw, _BIN_NSAMPLES_OFF)
        fmt, = struct.unpack_from(">H", raw, _BIN_FORMAT_OFF)
        return cls(interval, nsamples, fmt, raw)


@dataclass(frozen=True)
class TraceHeader:
    """Per-trace header fields: grid position and informational count."""

    inline: int
    crossline: int
    sample_count: int

    @classmethod
    def parse(
        cls,
        raw: bytes,
        inline_byte: int = DEFAULT_INLINE_BYTE,
        crossline_byte: int = DEFAULT_CROSSLINE_BYTE,
    ) -> "TraceHeader":
        if len(raw) != TRACE_HEADER_LEN:
            raise TruncatedFile(
                f"trace header needs {TRACE_HEADER_LEN} bytes, got {len(raw)}"
            )
        il, = struct.unpack_from(">i", raw, _byte_offset(inline_byte))
        xl, = struct.unpack_from(">i", raw, _byte_offset(crossline_byte))
        ns, = struct.unpack_from(">H", raw, _TRACE_NSAMPLES_OFF)
        return cls(il, xl, ns)


def _byte_offset(one_based: int) -> int:
    if not 1 <= one_based <= TRACE_HEADER_LEN - 3:
        raise ConfigError(
            f"trace header byte position must be in [1, {TRACE_HEADER_LEN - 3}],"
            f" got {one_based}"
        )
    return one_based - 1


def _read_bytes(source) -> bytes:
    if isinstance(source, (bytes, bytearray, memoryview)):
        return bytes(source)
    if isinstance(source, (str, Path)):
        return Path(source).read_bytes()
    return source.read()


def read_segy(
    source,
    inline_byte: int = DEFAULT_INLINE_BYTE,
    crossline_byte: int = DEFAULT_CROSSLINE_BYTE,
) -> SeismicVolume:
    """Parse a SEG-Y rev 0 file into a SeismicVolume.

    Traces are placed on the (inline, crossline) grid spanned by the
    distinct header values; the grid must be dense and free of
    duplicates or IrregularGeometry is raised.
    """
    data = _read_bytes(source)
    if len(data) < TEXT_HEADER_LEN + BINARY_HEADER_LEN:
        raise TruncatedFile(
            f"file of {len(data)} bytes is shorter than the 3600-byte header block"
        )
    header = SegyBinaryHeader.parse(
        data[TEXT_HEADER_LEN:TEXT_HEADER_LEN + BINARY_HEADER_LEN]
    )
    if header.format_code not in SUPPORTED_FORMAT_CODES:
        raise UnsupportedFormatCode(
            f"format code {header.format_code}; supported: {SUPPORTED_FORMAT_CODES}"
        )
    ns = header.samples_per_trace
    if ns == 0:
        raise IrregularGeometry("binary header declares zero samples per trace")

    trace_len = TRACE_HEADER_LEN + ns * SAMPLE_BYTES
    body = len(data) - TEXT_HEADER_LEN - BINARY_HEADER_LEN
    if body == 0:
        raise TruncatedFile("file contains headers but no traces")
    if body % trace_len != 0:
        raise TruncatedFile(
            f"trace section of {body} bytes is not a multiple of the"
            f" {trace_len}-byte trace length"
        )
    ntraces = body // trace_len

    raw = np.frombuffer(
        data, dtype=np.uint8, count=ntraces * trace_len,
        offset=TEXT_HEADER_LEN + BINARY_HEADER_LEN,
    ).reshape(ntraces, trace_len)

    il_off = _byte_offset(inline_byte)
    xl_off = _byte_offset(crossline_byte)
    inlines = raw[:, il_off:il_off + 4].copy().view(">i4").ravel().astype(np.int64)
    crosslines = raw[:, xl_off:xl_off + 4].copy().view(">i4").ravel().astype(np.int64)

    il_values = np.unique(inlines)
    xl_values = np.unique(crosslines)
    n_il, n_xl = len(il_values), len(xl_values)
    if n_il * n_xl != ntraces:
        raise IrregularGeometry(
            f"{ntraces} traces cannot fill a {n_il} x {n_xl} inline/crossline grid"
        )
    il_idx = np.searchsorted(il_values, inlines)
    xl_idx = np.searchsorted(xl_values, crosslines)
    flat = il_idx * n_xl + xl_idx
    if len(np.unique(flat)) != ntraces:
        raise IrregularGeometry("duplicate (inline, crossline) positions")

    payload = raw[:, TRACE_HEADER_LEN:].copy()
    if header.format_code == IEEE_FLOAT:
        traces = payload.view(">f4").astype(np.float32)
    else:
        words = payload.view(">u4").astype(np.uint32)
        traces = ibm_to_float(words).astype(np.float32)

    cube = np.empty((n_il, n_xl, ns), dtype=np.float32)
    cube[il_idx, xl_idx, :] = traces
    return SeismicVolume(
        cube,
        sample_interval_us=header.sample_interval_us,
        source_format=SourceFormat.SEGY,
    )


def _text_header(volume: SeismicVolume, format_code: int) -> bytes:
    lines = [
        "C 1 SEISMIC AMPLITUDE VOLUME",
        f"C 2 INLINES {volume.inline_count} CROSSLINES {volume.crossline_count}"
        f" SAMPLES {volume.sample_count}",
        f"C 3 SAMPLE FORMAT CODE {format_code}"
        f" SAMPLE INTERVAL {volume.sample_interval_us} US",
    ]
    lines += [f"C{n:2d}" for n in range(4, 41)]
    text = "".join(line.ljust(80) for line in lines)
    return text.encode("ascii")


def write_segy(
    volume: SeismicVolume,
    format_code: int = IEEE_FLOAT,
    inline_byte: int = DEFAULT_INLINE_BYTE,
    crossline_byte: int = DEFAULT_CROSSLINE_BYTE,
) -> bytes:
    """Serialize a volume as SEG-Y rev 0 and return the file bytes.

    Inline and crossline numbering starts at 1. With format code 5 the
    float32 samples are stored verbatim, so read_segy(write_segy(v))
    reproduces them bit for bit; format code 1 rounds to the nearest
    IBM float.
    """
    if format_code not in SUPPORTED_FORMAT_CODES:
        raise UnsupportedFormatCode(
            f"format code {format_code}; supported: {SUPPORTED_FORMAT_CODES}"
        )
    n_il, n_xl, ns = volume.samples.shape
    if ns > 0xFFFF or volume.sample_interval_us > 0xFFFF:
        raise SizeMismatch("sample count or interval exceeds the 16-bit header field")

    binary = bytearray(BINARY_HEADER_LEN)
    struct.pack_into(">H", binary, _BIN_INTERVAL_OFF, volume.sample_interval_us)
    struct.pack_into(">H", binary, _BIN_NSAMPLES_OFF, ns)
    struct.pack_into(">H", binary, _BIN_FORMAT_OFF, format_code)

    ntraces = n_il * n_xl
    il_numbers = np.repeat(np.arange(1, n_il + 1, dtype=">i4"), n_xl)
    xl_numbers = np.tile(np.arange(1, n_xl + 1, dtype=">i4"), n_il)

    headers = np.zeros((ntraces, TRACE_HEADER_LEN), dtype=np.uint8)
    il_off = _byte_offset(inline_byte)
    xl_off = _byte_offset(crossline_byte)
    headers[:, il_off:il_off + 4] = il_numbers.view(np.uint8).reshape(ntraces, 4)
    headers[:, xl_off:xl_off + 4] = xl_numbers.view(np.uint8).reshape(ntraces, 4)
    ns_field = np.full(ntraces, ns, dtype=">u2")
    headers[:, _TRACE_NSAMPLES_OFF:_TRACE_NSAMPLES_OFF + 2] = (
        ns_field.view(np.uint8).reshape(ntraces, 2)
    )
    interval_field = np.full(ntraces, volume.sample_interval_us, dtype=">u2")
    headers[:, _TRACE_INTERVAL_OFF:_TRACE_INTERVAL_OFF + 2] = (
        interval_field.view(np.uint8).reshape(ntraces, 2)
    )

    flat = volume.samples.reshape(ntraces, ns)
    if format_code == IEEE_FLOAT:
        payload = flat.astype(">f4").view(np.uint8)
    else:
        words = float_to_ibm(flat.astype(np.float64)).astype(">u4")
        payload = words.view(np.uint8)
    payload = payload.reshape(ntraces, ns * SAMPLE_BYTES)

    traces = np.hstack([headers, payload]).tobytes()
    return _text_header(volume, format_code) + bytes(binary) + traces


# ---------------------------------------------------------------------------
# Raw binary
# ---------------------------------------------------------------------------

def read_raw_binary(
    source,
    shape: tuple[int, int, int],
    byte_order: str = "little",
) -> SeismicVolume:
    """Read headerless float32 samples laid out in C (inline-major) order."""
    if byte_order not in ("little", "big"):
        raise ConfigError(f"byte_order must be 'little' or 'big', got {byte_order!r}")
    data = _read_bytes(source)
    dt = np.dtype("<f4" if byte_order == "little" else ">f4")
    expected = int(np.prod(shape)) * SAMPLE_BYTES
    if len(data) != expected:
        raise SizeMismatch(
            f"shape {tuple(shape)} needs {expected} bytes, file has {len(data)}"
        )
    arr = np.frombuffer(data, dtype=dt).astype(np.float32).reshape(shape)
    if not np.isfinite(arr).all():
        raise NonFiniteSample("raw volume contains NaN or infinite samples")
    return SeismicVolume(arr, source_format=SourceFormat.RAW)


def write_raw_binary(volume: SeismicVolume, byte_order: str = "little") -> bytes:
    if byte_order not in ("little", "big"):
        raise ConfigError(f"byte_order must be 'little' or 'big', got {byte_order!r}")
    dt = "<f4" if byte_order == "little" else ">f4"
    return volume.samples.astype(dt).tobytes()


# ---------------------------------------------------------------------------
# NPY
# ---------------------------------------------------------------------------

def read_npy(source) -> SeismicVolume | FaultMask | ProbabilityMap:
    """Read an NPY array and classify it by rank and dtype.

    3-D float arrays become volumes; 2-D bool or uint8 arrays become
    masks (nonzero means fault); 2-D float arrays become probability
    maps. Everything else is rejected.
    """
    fp = io.BytesIO(_read_bytes(source))
    try:
        version = np.lib.format.read_magic(fp)
    except ValueError as exc:
        raise TruncatedFile(f"not an NPY file: {exc}") from exc
    if version not in ((1, 0), (2, 0)):
        raise UnsupportedDtype(f"NPY format version {version} not supported")
    read_header = (
        np.lib.format.read_array_header_1_0
        if version == (1, 0)
        else np.lib.format.read_array_header_2_0
    )
    try:
        shape, fortran_order, dtype = read_header(fp)
    except ValueError as exc:
        raise TruncatedFile(f"malformed NPY header: {exc}") from exc

    if fortran_order:
        raise FortranOrderUnsupported("NPY payload is Fortran-ordered; need C order")
    if len(shape) not in (2, 3):
        raise UnsupportedRank(f"NPY rank {len(shape)} not supported, need 2 or 3")
    if (dtype.kind, dtype.itemsize) not in (("f", 4), ("f", 8), ("u", 1), ("b", 1)):
        raise UnsupportedDtype(f"NPY dtype {dtype} not supported")

    count = int(np.prod(shape))
    payload = fp.read(count * dtype.itemsize)
    if len(payload) < count * dtype.itemsize:
        raise TruncatedFile(
            f"NPY payload holds {len(payload)} bytes,"
            f" header promises {count * dtype.itemsize}"
        )
    arr = np.frombuffer(payload, dtype=dtype, count=count).reshape(shape)

    if len(shape) == 3:
        if dtype.kind != "f":
            raise UnsupportedDtype("3-D arrays must be float to form a volume")
        return SeismicVolume(arr.astype(np.float32), source_format=SourceFormat.NPY)
    if dtype.kind == "f":
        return ProbabilityMap(arr.astype(np.float64))
    return FaultMask(arr != 0)


def write_npy(obj) -> bytes:
    """Serialize a volume, mask, map, or bare array as NPY v1.0."""
    if isinstance(obj, SeismicVolume):
        arr = obj.samples
    elif isinstance(obj, FaultMask):
        arr = obj.grid
    elif isinstance(obj, ProbabilityMap):
        arr = obj.values
    else:
        arr = np.asarray(obj)
    buf = io.BytesIO()
    np.lib.format.write_array(buf, np.ascontiguousarray(arr), version=(1, 0))
    return buf.getvalue()


# ---------------------------------------------------------------------------
# PNG masks
# ---------------------------------------------------------------------------

def read_mask_png(source) -> FaultMask:
    """Read an 8-bit grayscale or palette PNG; gray > 127 marks fault."""
    img = Image.open(io.BytesIO(_read_bytes(source)))
    if img.mode not in ("L", "P"):
        raise UnsupportedColorType(
            f"PNG mode {img.mode!r}; need 8-bit grayscale (L) or palette (P)"
        )
    gray = np.asarray(img.convert("L"))
    return FaultMask(gray > 127)


def write_mask_png(mask: FaultMask) -> bytes:
    """Serialize a mask as 8-bit grayscale PNG (fault=255, background=0)."""
    grid = mask.grid if isinstance(mask, FaultMask) else np.asarray(mask, dtype=bool)
    img = Image.fromarray(np.where(grid, 255, 0).astype(np.uint8), mode="L")
    buf = io.BytesIO()
    img.save(buf, format="PNG")
    return buf.getvalue()


# ---------------------------------------------------------------------------
# Path-level dispatch helpers
# ---------------------------------------------------------------------------

_SEGY_SUFFIXES = (".sgy", ".segy")
_RAW_SUFFIXES = (".dat", ".bin", ".raw")


def load_volume(
    path,
    shape: tuple[int, int, int] | None = None,
    byte_order: str = "little",
    inline_byte: int = DEFAULT_INLINE_BYTE,
    crossline_byte: int = DEFAULT_CROSSLINE_BYTE,
) -> SeismicVolume:
    """Load a volume, dispatching on the path suffix."""
    p = Path(path)
    suffix = p.suffix.lower()
    if suffix in _SEGY_SUFFIXES:
        return read_segy(p, inline_byte=inline_byte, crossline_byte=crossline_byte)
    if suffix in _RAW_SUFFIXES:
        if shape is None:
            raise ConfigError(f"raw binary {p.name} needs an explicit shape")
        return read_raw_binary(p, shape, byte_order=byte_order)
    if suffix == ".npy":
        obj = read_npy(p)
        if not isinstance(obj, SeismicVolume):
            raise UnsupportedRank(f"{p.name} does not hold a 3-D volume")
        return obj
    raise ConfigError(f"unrecognized volume format {suffix!r} for {p.name}")


def save_volume(volume: SeismicVolume, path, byte_order: str = "little",
                format_code: int = IEEE_FLOAT) -> None:
    """Write a volume, dispatching on the path suffix."""
    p = Path(path)
    suffix = p.suffix.lower()
    if suffix in _SEGY_SUFFIXES:
        p.write_bytes(write_segy(volume, format_code=format_code))
    elif suffix in _RAW_SUFFIXES:
        p.write_bytes(write_raw_binary(volume, byte_order=byte_order))
    elif suffix == ".npy":
        p.write_bytes(write_npy(volume))
    else:
        raise ConfigError(f"unrecognized volume format {suffix!r} for {p.name}")


def load_mask(path) -> FaultMask:
    """Load a binary mask from .png or .npy."""
    p = Path(path)
    suffix = p.suffix.lower()
    if suffix == ".png":
        return read_mask_png(p)
    if suffix == ".npy":
        obj = read_npy(p)
        if isinstance(obj, FaultMask):
            return obj
        raise UnsupportedDtype(f"{p.name} holds {type(obj).__name__}, not a mask")
    raise ConfigError(f"unrecognized mask format {suffix!r} for {p.name}")


def save_mask(mask: FaultMask, path) -> None:
    p = Path(path)
    suffix = p.suffix.lower()
    if suffix == ".png":
        p.write_bytes(write_mask_png(mask))
    elif suffix == ".npy":
        p.write_bytes(write_npy(mask))
    else:
        raise ConfigError(f"unrecognized mask format {suffix!r} for {p.name}")


def load_probability_map(path) -> ProbabilityMap:
    """Load per-pixel scores from .npy (float) or .png (gray / 255)."""
    p = Path(path)
    suffix = p.suffix.lower()
    if suffix == ".npy":
        obj = read_npy(p)
        if isinstance(obj, ProbabilityMap):
            return obj
        if isinstance(obj, FaultMask):
            return ProbabilityMap(obj.grid.astype(np.float64))
        raise UnsupportedRank(f"{p.name} holds a 3-D volume, not a 2-D map")
    if suffix == ".png":
        img = Image.open(io.BytesIO(p.read_bytes()))
        if img.mode not in ("L", "P"):
            raise UnsupportedColorType(
                f"PNG mode {img.mode!r}; need 8-bit grayscale (L) or palette (P)"
            )
        return ProbabilityMap(np.asarray(img.convert("L")).astype(np.float64) / 255.0)
    raise ConfigError(f"unrecognized map format {suffix!r} for {p.name}")
