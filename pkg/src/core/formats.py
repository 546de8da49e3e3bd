from pathlib import Path

import numpy as np
from PIL import Image

from core.errors import FieldFormatError, InputError
from core.raster import ImageBuffer, ScalarField, UVField

"""
Binary field formats. Both share a 12 byte header: a 4 byte magic, then width
and height as little-endian uint32. The payload is row-major little-endian
float32: (u, v) pairs for UVF1, one value per pixel for KMF1.
"""

UVF_MAGIC = b"UVF1"
KMF_MAGIC = b"KMF1"
HEADER_SIZE = 12

_HEADER_DTYPE = np.dtype("<u4")
_VALUE_DTYPE = np.dtype("<f4")


def _header(magic: bytes, width: int, height: int) -> bytes:
    return magic + np.array([width, height], dtype=_HEADER_DTYPE).tobytes()


def encode_uvf(field: UVField) -> bytes:
    pairs = np.stack([field.u, field.v], axis=-1).astype(_VALUE_DTYPE)
    return _header(UVF_MAGIC, field.width, field.height) + pairs.tobytes()


def encode_kmf(field: ScalarField) -> bytes:
    values = field.values.astype(_VALUE_DTYPE)
    return _header(KMF_MAGIC, field.width, field.height) + values.tobytes()


def _parse(data: bytes, magic: bytes, channels: int) -> tuple[int, int, np.ndarray]:
    if len(data) < 4 or data[:4] != magic:
        found = data[:4]
        raise FieldFormatError(f"Bad magic {found!r}, expected {magic!r}", 0)
    if len(data) < HEADER_SIZE:
        raise FieldFormatError(
            "Truncated header", len(data), expected=HEADER_SIZE, actual=len(data)
        )
    width, height = np.frombuffer(data, dtype=_HEADER_DTYPE, count=2, offset=4)
    width, height = int(width), int(height)
    if width < 2 or height < 2:
        raise FieldFormatError(f"Field must be at least 2x2, got {width}x{height}", 4)
    expected = HEADER_SIZE + width * height * channels * _VALUE_DTYPE.itemsize
    if len(data) != expected:
        raise FieldFormatError(
            f"Payload size does not match a {width}x{height} field",
            min(len(data), expected),
            expected=expected,
            actual=len(data),
        )
    values = np.frombuffer(data, dtype=_VALUE_DTYPE, offset=HEADER_SIZE)
    values = values.astype(np.float64)
    if not np.all(np.isfinite(values)):
        bad = int(np.argmax(~np.isfinite(values)))
        raise FieldFormatError(
            "Non-finite value", HEADER_SIZE + bad * _VALUE_DTYPE.itemsize
        )
    return width, height, values


def decode_uvf(data: bytes) -> UVField:
    width, height, values = _parse(data, UVF_MAGIC, 2)
    pairs = values.reshape(height, width, 2)
    return UVField(pairs[:, :, 0], pairs[:, :, 1])


def decode_kmf(data: bytes) -> ScalarField:
    width, height, values = _parse(data, KMF_MAGIC, 1)
    return ScalarField(values.reshape(height, width))


def write_uvf(path: Path, field: UVField) -> None:
    path.write_bytes(encode_uvf(field))


def read_uvf(path: Path) -> UVField:
    return decode_uvf(path.read_bytes())


def write_kmf(path: Path, field: ScalarField) -> None:
    path.write_bytes(encode_kmf(field))


def read_kmf(path: Path) -> ScalarField:
    return decode_kmf(path.read_bytes())


def read_field(path: Path) -> UVField | ScalarField:
    """
    Reads either format, dispatching on the magic bytes.
    """
    data = path.read_bytes()
    if data[:4] == UVF_MAGIC:
        return decode_uvf(data)
    if data[:4] == KMF_MAGIC:
        return decode_kmf(data)
    raise FieldFormatError(
        f"Bad magic {data[:4]!r}, expected {UVF_MAGIC!r} or {KMF_MAGIC!r}", 0
    )


def read_png(path: Path) -> ImageBuffer:
    with Image.open(path) as image:
        data = np.array(image.convert("RGB"), dtype=np.uint8)
    if data.shape[0] < 2 or data.shape[1] < 2:
        raise InputError(
            f"{path} is {data.shape[1]}x{data.shape[0]}, need at least 2x2"
        )
    return ImageBuffer(data)


def write_png(path: Path, img: ImageBuffer) -> None:
    Image.fromarray(np.array(img.data)).save(path, format="PNG")
