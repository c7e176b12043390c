"""Binary space files: canonical, checksummed, atomic.

Layout (all integers little-endian, no padding):

    magic            8 bytes  b"DRIFTSPC"
    format_version   u32      currently 1
    dim              u32
    window           u32
    order_span       u32
    global_seed      u64
    perm_seed        u64
    weighting        u8       0=uniform, 1=inverse_log_frequency
    hash_algorithm   u8       seed-derivation scheme id (see vectors)
    float_width      u8       32 or 64
    compaction       u8       0/1
    label_len        u32      followed by that many UTF-8 bytes
    term_count       u64
    ingested_tokens  u64
    header_crc       u32      CRC-32 of everything above
    records          term_count times, sorted lexicographically by term:
        term_len     u32      followed by that many UTF-8 bytes
        count        u64
        context      dim floats of float_width
        order        dim floats of float_width
        record_crc   u32      CRC-32 of this record's bytes

Terms are written in sorted order and floats in a fixed byte order, so the
same space always serializes to the same bytes; writes go to a temp file in
the target directory and are renamed into place.
"""

from __future__ import annotations

import os
import struct
import zlib
from pathlib import Path

import numpy as np

from .errors import (
    BadMagicError,
    ChecksumError,
    ConfigError,
    SpaceFormatError,
    TruncatedFileError,
    VersionMismatchError,
)
from .space import SemanticSpace, SpaceConfig, TermEntry, WEIGHTINGS
from .vectors import HASH_ALGORITHM_ID

MAGIC = b"DRIFTSPC"
FORMAT_VERSION = 1

_FIXED_HEADER = struct.Struct("<8sIIIIQQBBBB")
_U32 = struct.Struct("<I")
_U64 = struct.Struct("<Q")
_COUNTS = struct.Struct("<QQ")

_WIDTH_DTYPES = {32: np.dtype("<f4"), 64: np.dtype("<f8")}


def _weighting_code(weighting: str) -> int:
    return WEIGHTINGS.index(weighting)


def save_space(space: SemanticSpace, path, float_width: int | None = None) -> Path:
    """Write the canonical binary image of ``space`` to ``path``.

    ``float_width`` defaults to the space's own dtype (64 for built spaces);
    passing 32 downcasts vectors on write.  Identical spaces produce
    byte-identical files.
    """
    if float_width is None:
        float_width = 32 if space.float_dtype == np.dtype(np.float32) else 64
    if float_width not in _WIDTH_DTYPES:
        raise ConfigError(f"float_width must be 32 or 64, got {float_width}")
    dtype = _WIDTH_DTYPES[float_width]
    config = space.config
    label = space.epoch_label.encode("utf-8")

    header = bytearray()
    header += _FIXED_HEADER.pack(
        MAGIC,
        FORMAT_VERSION,
        config.dim,
        config.window,
        config.order_span,
        config.global_seed,
        config.perm_seed,
        _weighting_code(config.weighting),
        HASH_ALGORITHM_ID,
        float_width,
        int(config.compaction),
    )
    header += _U32.pack(len(label)) + label
    header += _COUNTS.pack(len(space.entries), space.ingested_tokens)

    blob = bytearray(header)
    blob += _U32.pack(zlib.crc32(bytes(header)))
    for term in sorted(space.entries):
        entry = space.entries[term]
        term_bytes = term.encode("utf-8")
        record = bytearray()
        record += _U32.pack(len(term_bytes)) + term_bytes
        record += _U64.pack(entry.count)
        record += np.ascontiguousarray(entry.context, dtype=dtype).tobytes()
        record += np.ascontiguousarray(entry.order, dtype=dtype).tobytes()
        blob += record
        blob += _U32.pack(zlib.crc32(bytes(record)))

    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(bytes(blob))
    os.replace(tmp, path)
    return path


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.offset = 0

    def take(self, n: int, what: str) -> bytes:
        end = self.offset + n
        if end > len(self.data):
            raise TruncatedFileError(len(self.data), end, what)
        chunk = self.data[self.offset:end]
        self.offset = end
        return chunk


def load_space(path) -> SemanticSpace:
    """Read a space file, verifying structure and checksums.

    Raises BadMagicError, VersionMismatchError, TruncatedFileError (with
    the failing offset) or ChecksumError; each is a distinct class so
    callers can map them to distinct exit codes.
    """
    data = Path(path).read_bytes()
    reader = _Reader(data)

    fixed = reader.take(_FIXED_HEADER.size, "fixed header")
    (
        magic,
        version,
        dim,
        window,
        order_span,
        global_seed,
        perm_seed,
        weighting_code,
        hash_algorithm,
        float_width,
        compaction,
    ) = _FIXED_HEADER.unpack(fixed)
    if magic != MAGIC:
        raise BadMagicError(
            f"not a space file: expected magic {MAGIC!r}, found {magic!r}"
        )
    if version != FORMAT_VERSION:
        raise VersionMismatchError(
            f"space file is format version {version}; this build reads version "
            f"{FORMAT_VERSION} only. Rebuild the space from its corpus or "
            f"convert it with a matching release."
        )
    if hash_algorithm != HASH_ALGORITHM_ID:
        raise SpaceFormatError(
            f"space file uses seed-derivation scheme {hash_algorithm}; "
            f"this build implements scheme {HASH_ALGORITHM_ID}"
        )
    if float_width not in _WIDTH_DTYPES:
        raise SpaceFormatError(f"unsupported float width {float_width}")
    if weighting_code >= len(WEIGHTINGS):
        raise SpaceFormatError(f"unknown weighting code {weighting_code}")

    (label_len,) = _U32.unpack(reader.take(_U32.size, "label length"))
    label_bytes = reader.take(label_len, "epoch label")
    term_count, ingested_tokens = _COUNTS.unpack(
        reader.take(_COUNTS.size, "term and token counts")
    )
    header_end = reader.offset
    (stored_header_crc,) = _U32.unpack(reader.take(_U32.size, "header checksum"))
    if zlib.crc32(data[:header_end]) != stored_header_crc:
        raise ChecksumError("header checksum mismatch")
    # Decode only after the checksum passed, so a corrupted byte surfaces
    # as a checksum failure rather than a decode error.
    try:
        label = label_bytes.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise SpaceFormatError(f"epoch label is not valid UTF-8: {exc}") from None

    config = SpaceConfig(
        dim=dim,
        window=window,
        order_span=order_span,
        global_seed=global_seed,
        perm_seed=perm_seed,
        weighting=WEIGHTINGS[weighting_code],
        compaction=bool(compaction),
    )
    dtype = _WIDTH_DTYPES[float_width]
    native = np.float32 if float_width == 32 else np.float64
    vector_bytes = dim * dtype.itemsize

    space = SemanticSpace(config, label, float_dtype=native)
    for index in range(term_count):
        record_start = reader.offset
        (term_len,) = _U32.unpack(reader.take(_U32.size, f"record {index} term length"))
        term_bytes = reader.take(term_len, f"record {index} term")
        (count,) = _U64.unpack(reader.take(_U64.size, f"record {index} count"))
        context = np.frombuffer(
            reader.take(vector_bytes, f"record {index} context vector"), dtype=dtype
        ).astype(native)
        order = np.frombuffer(
            reader.take(vector_bytes, f"record {index} order vector"), dtype=dtype
        ).astype(native)
        record_end = reader.offset
        (stored_crc,) = _U32.unpack(reader.take(_U32.size, f"record {index} checksum"))
        if zlib.crc32(data[record_start:record_end]) != stored_crc:
            raise ChecksumError(f"checksum mismatch in record {index}")
        try:
            term = term_bytes.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise SpaceFormatError(
                f"record {index} term is not valid UTF-8: {exc}"
            ) from None
        space.entries[term] = TermEntry(context, order, count)
    if reader.offset != len(data):
        raise SpaceFormatError(
            f"{len(data) - reader.offset} trailing bytes after the last record"
        )
    space.ingested_tokens = ingested_tokens
    return space


def write_space_tsv(space: SemanticSpace, path) -> Path:
    """Inspection export: term, count, squared context norm per row."""
    lines = ["term\tcount\tsquared_context_norm"]
    for term in sorted(space.entries):
        entry = space.entries[term]
        context = np.asarray(entry.context, dtype=np.float64)
        squared = float(np.dot(context, context))
        lines.append(f"{term}\t{entry.count}\t{squared:.12g}")
    path = Path(path)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path
