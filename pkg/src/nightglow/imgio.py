"""Image decoding and encoding: PNG (8/16-bit) and PPM/PGM.

Decoded pixels are always float64 arrays of shape (H, W, C) with C in
{1, 3}, normalized to [0, 1] by the source's maximum code value. Alpha
channels are dropped on load (the compositing model treats every layer
as opaque emission). The PNG codec is self-contained: non-interlaced
images, bit depths 1/2/4/8/16, color types gray, RGB, palette,
gray+alpha and RGBA are supported; Adam7 interlacing is rejected.

Encoding always writes non-interlaced PNGs with filter type 0 on every
row, so output bytes are a pure function of the pixel data.
"""

from __future__ import annotations

import struct
import zlib
from pathlib import Path

import numpy as np

from .errors import ImageFormatError

_PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"


# ---------------------------------------------------------------------------
# PNG decode
# ---------------------------------------------------------------------------

def _iter_chunks(data: bytes):
    pos = 8
    while pos < len(data):
        length = struct.unpack(">I", data[pos : pos + 4])[0]
        ctype = data[pos + 4 : pos + 8]
        chunk = data[pos + 8 : pos + 8 + length]
        if len(chunk) != length:
            raise ImageFormatError("truncated PNG chunk")
        yield ctype, chunk
        pos += 12 + length
        if ctype == b"IEND":
            return


def _paeth(a: int, b: int, c: int) -> int:
    p = a + b - c
    pa = abs(p - a)
    pb = abs(p - b)
    pc = abs(p - c)
    if pa <= pb and pa <= pc:
        return a
    if pb <= pc:
        return b
    return c


def _unfilter(raw: bytes, height: int, stride: int, bpp: int) -> np.ndarray:
    """Undo PNG row filters, returning (height, stride) uint8 samples."""
    if len(raw) != height * (stride + 1):
        raise ImageFormatError("PNG pixel data has unexpected length")
    rows = np.frombuffer(raw, dtype=np.uint8).reshape(height, stride + 1)
    filters = rows[:, 0]
    out = np.zeros((height, stride), dtype=np.uint8)
    prev = np.zeros(stride, dtype=np.uint8)
    for y in range(height):
        f = int(filters[y])
        cur = rows[y, 1:].copy()
        if f == 0:
            pass
        elif f == 1:  # Sub: per-lane cumulative sum mod 256
            for lane in range(bpp):
                cur[lane::bpp] = np.cumsum(cur[lane::bpp], dtype=np.uint64) & 0xFF
        elif f == 2:  # Up
            cur = (cur.astype(np.uint16) + prev) & 0xFF
            cur = cur.astype(np.uint8)
        elif f == 3:  # Average: sequential in x
            line = cur.astype(np.int32)
            for x in range(stride):
                left = line[x - bpp] if x >= bpp else 0
                line[x] = (line[x] + ((left + int(prev[x])) >> 1)) & 0xFF
            cur = line.astype(np.uint8)
        elif f == 4:  # Paeth: sequential in x
            line = cur.astype(np.int32)
            for x in range(stride):
                left = int(line[x - bpp]) if x >= bpp else 0
                up = int(prev[x])
                ul = int(prev[x - bpp]) if x >= bpp else 0
                line[x] = (line[x] + _paeth(left, up, ul)) & 0xFF
            cur = line.astype(np.uint8)
        else:
            raise ImageFormatError(f"unknown PNG filter type {f}")
        out[y] = cur
        prev = out[y]
    return out


def _unpack_low_depth(samples: np.ndarray, width: int, depth: int) -> np.ndarray:
    """Expand 1/2/4-bit packed rows to one sample per entry."""
    bits = np.unpackbits(samples, axis=1)
    h = samples.shape[0]
    # each sample is `depth` consecutive bits, most significant first
    grouped = bits.reshape(h, -1, depth)
    weights = (1 << np.arange(depth - 1, -1, -1)).astype(np.uint16)
    vals = (grouped * weights).sum(axis=2).astype(np.uint16)
    return vals[:, :width]


def decode_png(data: bytes) -> np.ndarray:
    """Decode PNG bytes to float64 (H, W, C) in [0, 1], C in {1, 3}."""
    if data[:8] != _PNG_SIGNATURE:
        raise ImageFormatError("not a PNG file")
    width = height = None
    depth = ctype = None
    palette = None
    idat = bytearray()
    for name, chunk in _iter_chunks(data):
        if name == b"IHDR":
            width, height, depth, ctype, comp, filt, interlace = struct.unpack(
                ">IIBBBBB", chunk
            )
            if comp != 0 or filt != 0:
                raise ImageFormatError("unsupported PNG compression/filter method")
            if interlace != 0:
                raise ImageFormatError("interlaced PNG is not supported")
        elif name == b"PLTE":
            palette = np.frombuffer(chunk, dtype=np.uint8).reshape(-1, 3)
        elif name == b"IDAT":
            idat.extend(chunk)
    if width is None:
        raise ImageFormatError("PNG missing IHDR")

    nchan = {0: 1, 2: 3, 3: 1, 4: 2, 6: 4}.get(ctype)
    if nchan is None:
        raise ImageFormatError(f"unsupported PNG color type {ctype}")
    if depth not in (1, 2, 4, 8, 16) or (depth < 8 and ctype not in (0, 3)):
        raise ImageFormatError(f"unsupported PNG bit depth {depth} for color type {ctype}")

    raw = zlib.decompress(bytes(idat))
    bits_per_pixel = depth * nchan
    stride = (width * bits_per_pixel + 7) // 8
    bpp = max(1, bits_per_pixel // 8)
    samples = _unfilter(raw, height, stride, bpp)

    if depth < 8:
        vals = _unpack_low_depth(samples, width, depth)  # (H, W)
        maxval = (1 << depth) - 1
        if ctype == 3:
            if palette is None:
                raise ImageFormatError("palette PNG missing PLTE")
            rgb = palette[vals.astype(np.intp)]
            return rgb.astype(np.float64) / 255.0
        return (vals.astype(np.float64) / maxval)[:, :, None]

    if depth == 8:
        vals = samples.reshape(height, width, nchan).astype(np.float64)
        maxval = 255.0
    else:
        wide = samples.reshape(height, -1, 2)
        vals16 = (wide[:, :, 0].astype(np.uint16) << 8) | wide[:, :, 1]
        vals = vals16.reshape(height, width, nchan).astype(np.float64)
        maxval = 65535.0

    if ctype == 3:
        if palette is None:
            raise ImageFormatError("palette PNG missing PLTE")
        rgb = palette[vals[:, :, 0].astype(np.intp)]
        return rgb.astype(np.float64) / 255.0

    out = vals / maxval
    if ctype == 4:
        out = out[:, :, :1]
    elif ctype == 6:
        out = out[:, :, :3]
    return out


# ---------------------------------------------------------------------------
# PNG encode
# ---------------------------------------------------------------------------

def _chunk(name: bytes, payload: bytes) -> bytes:
    crc = zlib.crc32(name + payload) & 0xFFFFFFFF
    return struct.pack(">I", len(payload)) + name + payload + struct.pack(">I", crc)


def encode_png(image: np.ndarray, bitdepth: int = 8) -> bytes:
    """Encode a float (H, W, C) array in [0, 1] as PNG bytes.

    Values are clipped then quantized by rounding to the full code range.
    C must be 1 (grayscale) or 3 (RGB); bitdepth must be 8 or 16.
    """
    if bitdepth not in (8, 16):
        raise ImageFormatError(f"unsupported PNG bit depth {bitdepth}")
    arr = np.asarray(image, dtype=np.float64)
    if arr.ndim == 2:
        arr = arr[:, :, None]
    if arr.ndim != 3 or arr.shape[2] not in (1, 3):
        raise ImageFormatError("image must have shape (H, W) or (H, W, 1|3)")
    h, w, c = arr.shape
    maxval = (1 << bitdepth) - 1
    quant = np.rint(np.clip(arr, 0.0, 1.0) * maxval)
    ctype = 0 if c == 1 else 2
    if bitdepth == 8:
        flat = quant.astype(np.uint8).reshape(h, w * c)
        rows = flat
    else:
        q = quant.astype(np.uint16).reshape(h, w * c)
        rows = np.empty((h, w * c * 2), dtype=np.uint8)
        rows[:, 0::2] = (q >> 8).astype(np.uint8)
        rows[:, 1::2] = (q & 0xFF).astype(np.uint8)
    filtered = np.concatenate(
        [np.zeros((h, 1), dtype=np.uint8), rows], axis=1
    ).tobytes()
    ihdr = struct.pack(">IIBBBBB", w, h, bitdepth, ctype, 0, 0, 0)
    return b"".join(
        [
            _PNG_SIGNATURE,
            _chunk(b"IHDR", ihdr),
            _chunk(b"IDAT", zlib.compress(filtered, 6)),
            _chunk(b"IEND", b""),
        ]
    )


# ---------------------------------------------------------------------------
# PPM / PGM (binary P5/P6)
# ---------------------------------------------------------------------------

def decode_pnm(data: bytes) -> np.ndarray:
    """Decode binary PGM (P5) or PPM (P6) to float64 (H, W, C) in [0, 1]."""
    magic = data[:2]
    if magic not in (b"P5", b"P6"):
        raise ImageFormatError("only binary P5/P6 PNM files are supported")
    fields: list[int] = []
    pos = 2
    while len(fields) < 3:
        if pos >= len(data):
            raise ImageFormatError("truncated PNM header")
        ch = data[pos : pos + 1]
        if ch == b"#":
            while pos < len(data) and data[pos : pos + 1] != b"\n":
                pos += 1
        elif ch.isspace():
            pos += 1
        else:
            start = pos
            while pos < len(data) and not data[pos : pos + 1].isspace():
                pos += 1
            fields.append(int(data[start:pos]))
    pos += 1  # single whitespace after maxval
    width, height, maxval = fields
    nchan = 1 if magic == b"P5" else 3
    count = width * height * nchan
    if maxval < 256:
        pix = np.frombuffer(data, dtype=np.uint8, count=count, offset=pos)
    else:
        pix = np.frombuffer(data, dtype=">u2", count=count, offset=pos)
    arr = pix.reshape(height, width, nchan).astype(np.float64) / maxval
    return arr


def encode_pnm(image: np.ndarray, maxval: int = 255) -> bytes:
    """Encode float (H, W, C) in [0, 1] as binary PGM/PPM bytes."""
    arr = np.asarray(image, dtype=np.float64)
    if arr.ndim == 2:
        arr = arr[:, :, None]
    h, w, c = arr.shape
    if c not in (1, 3):
        raise ImageFormatError("PNM supports 1 or 3 channels")
    magic = b"P5" if c == 1 else b"P6"
    header = b"%s\n%d %d\n%d\n" % (magic, w, h, maxval)
    quant = np.rint(np.clip(arr, 0.0, 1.0) * maxval)
    if maxval < 256:
        body = quant.astype(np.uint8).tobytes()
    else:
        body = quant.astype(">u2").tobytes()
    return header + body


# ---------------------------------------------------------------------------
# File-level helpers
# ---------------------------------------------------------------------------

def load_image(path: str | Path) -> np.ndarray:
    """Load a PNG/PPM/PGM file as float64 (H, W, C) normalized to [0, 1]."""
    data = Path(path).read_bytes()
    if data[:8] == _PNG_SIGNATURE:
        img = decode_png(data)
    elif data[:2] in (b"P5", b"P6"):
        img = decode_pnm(data)
    else:
        raise ImageFormatError(f"{path}: unrecognized image format")
    if not np.isfinite(img).all():
        raise ImageFormatError(f"{path}: decoded non-finite pixel values")
    return img


def save_image(path: str | Path, image: np.ndarray, bitdepth: int = 8) -> None:
    """Write an image by extension: .png, .pgm or .ppm. Atomic replace."""
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix == ".png":
        payload = encode_png(image, bitdepth=bitdepth)
    elif suffix in (".pgm", ".ppm"):
        payload = encode_pnm(image, maxval=(1 << bitdepth) - 1)
    else:
        raise ImageFormatError(f"{path}: unsupported output extension")
    _atomic_write(path, payload)


def save_kernel_heatmap(path: str | Path, kernel: np.ndarray) -> None:
    """Write a kernel as a 16-bit PGM heatmap scaled so the peak is white."""
    peak = float(kernel.max())
    scaled = kernel / peak if peak > 0 else kernel
    _atomic_write(Path(path), encode_pnm(scaled[:, :, None], maxval=65535))


def load_mask(path: str | Path) -> np.ndarray:
    """Load a mask image as booleans: pixel is true where value >= 0.5.

    Multi-channel files are collapsed to their channel mean first.
    """
    img = load_image(path)
    gray = img.mean(axis=2) if img.shape[2] > 1 else img[:, :, 0]
    return gray >= 0.5


def _atomic_write(path: Path, payload: bytes) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(payload)
    tmp.replace(path)
