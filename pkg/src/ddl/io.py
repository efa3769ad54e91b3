"""Serialization: canonical JSON, rational encoding, binary table files."""

from __future__ import annotations

import json
import struct
from fractions import Fraction
from pathlib import Path

import numpy as np

from .cube import EXACT, FLOAT, ValueTable

MAGIC = b"DDLT"
_MODE_CODE = {FLOAT: 0, EXACT: 1}
_CODE_MODE = {v: k for k, v in _MODE_CODE.items()}
_SIDE_CODE = {"primal": 0, "fourier": 1}
_CODE_SIDE = {v: k for k, v in _SIDE_CODE.items()}


class FormatError(ValueError):
    pass


def encode_scalar(x):
    """Rationals become ``{"num", "den"}`` decimal strings; floats stay floats."""
    if x is None:
        return None
    if isinstance(x, bool):
        return x
    if isinstance(x, (int, np.integer)):
        return {"num": str(int(x)), "den": "1"}
    if isinstance(x, Fraction):
        return {"num": str(x.numerator), "den": str(x.denominator)}
    if isinstance(x, (float, np.floating)):
        return float(x)
    raise TypeError(f"cannot encode {x!r}")


def decode_scalar(obj):
    if isinstance(obj, dict):
        return Fraction(int(obj["num"]), int(obj["den"]))
    return obj


def dumps(obj) -> str:
    """Deterministic JSON: sorted keys, fixed separators, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2, separators=(",", ": ")) + "\n"


def write_json(obj, path: str | Path | None) -> str:
    text = dumps(obj)
    if path is None or str(path) == "-":
        return text
    Path(path).write_text(text)
    return text


def read_json(path: str | Path):
    return json.loads(Path(path).read_text())


def _int_bytes(v: int) -> bytes:
    length = max(1, (v.bit_length() + 8) // 8)
    return v.to_bytes(length, "little", signed=True)


def table_to_bytes(t: ValueTable) -> bytes:
    """Header ``MAGIC | N:u32 | mode:u8 | side:u8`` then the payload.

    Float payload: ``2^N`` little-endian float64.  Exact payload: one
    length-prefixed signed little-endian integer for the common denominator,
    then one per numerator (prefix is a u32 byte count).
    """
    head = MAGIC + struct.pack("<IBB", t.dim, _MODE_CODE[t.mode], _SIDE_CODE[t.side])
    if t.mode == FLOAT:
        return head + t.data.astype("<f8").tobytes()
    parts = [head]
    for v in [t.den, *t.data.tolist()]:
        b = _int_bytes(int(v))
        parts.append(struct.pack("<I", len(b)))
        parts.append(b)
    return b"".join(parts)


def table_from_bytes(buf: bytes) -> ValueTable:
    if len(buf) < 10 or buf[:4] != MAGIC:
        raise FormatError("not a table file (bad magic)")
    dim, mode_code, side_code = struct.unpack_from("<IBB", buf, 4)
    if mode_code not in _CODE_MODE or side_code not in _CODE_SIDE:
        raise FormatError("unknown mode or side code")
    mode, side = _CODE_MODE[mode_code], _CODE_SIDE[side_code]
    size = 1 << dim
    pos = 10
    if mode == FLOAT:
        if len(buf) - pos != 8 * size:
            raise FormatError("float payload has the wrong length")
        return ValueTable(dim, np.frombuffer(buf, "<f8", size, pos).astype(np.float64), FLOAT, side)
    vals = []
    for _ in range(size + 1):
        if pos + 4 > len(buf):
            raise FormatError("truncated exact payload")
        (length,) = struct.unpack_from("<I", buf, pos)
        pos += 4
        vals.append(int.from_bytes(buf[pos : pos + length], "little", signed=True))
        pos += length
    if pos != len(buf):
        raise FormatError("trailing bytes after payload")
    num = np.empty(size, dtype=object)
    num[:] = vals[1:]
    if vals[0] <= 0:
        raise FormatError("denominator must be positive")
    return ValueTable(dim, num, EXACT, side, vals[0])


def write_table(t: ValueTable, path: str | Path) -> None:
    Path(path).write_bytes(table_to_bytes(t))


def read_table(path: str | Path) -> ValueTable:
    return table_from_bytes(Path(path).read_bytes())
