"""Orthonormal 2-D Haar transform, s-term sparsification, PSNR, and binary
PGM image I/O for the real-image experiment."""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .core import hard_threshold

__all__ = [
    "haar2_forward",
    "haar2_inverse",
    "sparsify",
    "psnr",
    "read_pgm",
    "write_pgm",
]

_SQRT2 = math.sqrt(2.0)


def _validate_square_pow2(a: np.ndarray) -> int:
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square 2-D array, got shape {a.shape}")
    side = a.shape[0]
    if side < 1 or (side & (side - 1)) != 0:
        raise ValueError(f"side must be a power of two, got {side}")
    return side


def _analyze(block: np.ndarray, axis: int) -> np.ndarray:
    if axis == 1:
        even, odd = block[:, 0::2], block[:, 1::2]
        return np.hstack([(even + odd) / _SQRT2, (even - odd) / _SQRT2])
    even, odd = block[0::2, :], block[1::2, :]
    return np.vstack([(even + odd) / _SQRT2, (even - odd) / _SQRT2])


def _synthesize(block: np.ndarray, axis: int) -> np.ndarray:
    out = np.empty_like(block)
    if axis == 1:
        half = block.shape[1] // 2
        smooth, detail = block[:, :half], block[:, half:]
        out[:, 0::2] = (smooth + detail) / _SQRT2
        out[:, 1::2] = (smooth - detail) / _SQRT2
    else:
        half = block.shape[0] // 2
        smooth, detail = block[:half, :], block[half:, :]
        out[0::2, :] = (smooth + detail) / _SQRT2
        out[1::2, :] = (smooth - detail) / _SQRT2
    return out


def haar2_forward(img) -> np.ndarray:
    """Full-depth orthonormal Haar decomposition of a square power-of-two
    image. Preserves Euclidean norm."""
    a = np.asarray(img, dtype=np.float64)
    side = _validate_square_pow2(a)
    out = a.copy()
    size = side
    while size >= 2:
        block = _analyze(out[:size, :size], axis=1)
        out[:size, :size] = _analyze(block, axis=0)
        size //= 2
    return out


def haar2_inverse(coeffs) -> np.ndarray:
    """Exact inverse of :func:`haar2_forward`."""
    a = np.asarray(coeffs, dtype=np.float64)
    side = _validate_square_pow2(a)
    out = a.copy()
    size = 2
    while size <= side:
        block = _synthesize(out[:size, :size], axis=0)
        out[:size, :size] = _synthesize(block, axis=1)
        size *= 2
    return out


def sparsify(img, s: int) -> tuple[np.ndarray, np.ndarray]:
    """Keep the s largest-magnitude Haar coefficients of an image.

    Returns the thresholded coefficient array (same shape as the image)
    and the reconstruction from just those coefficients.
    """
    if s < 1:
        raise ValueError("s must be at least 1")
    coeffs = haar2_forward(img)
    kept = hard_threshold(coeffs.ravel(), s).reshape(coeffs.shape)
    return kept, haar2_inverse(kept)


def psnr(ref, test, peak: float = 1.0) -> float:
    """Peak signal-to-noise ratio in decibels; identical inputs give
    positive infinity."""
    ref = np.asarray(ref, dtype=np.float64)
    test = np.asarray(test, dtype=np.float64)
    if ref.shape != test.shape:
        raise ValueError("images differ in shape")
    if peak <= 0:
        raise ValueError("peak must be positive")
    mse = float(np.mean((ref - test) ** 2))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(peak**2 / mse)


# Binary PGM (P5), 8-bit. Header grammar (tokens separated by whitespace,
# '#' starts a comment running to end of line):
#   "P5" <width> <height> <maxval<=255> <single whitespace> <width*height bytes>


def _next_token(buf: bytes, pos: int) -> tuple[bytes, int]:
    while pos < len(buf):
        c = buf[pos : pos + 1]
        if c in b" \t\r\n":
            pos += 1
        elif c == b"#":
            nl = buf.find(b"\n", pos)
            pos = len(buf) if nl < 0 else nl + 1
        else:
            break
    start = pos
    while pos < len(buf) and buf[pos : pos + 1] not in b" \t\r\n":
        pos += 1
    if start == pos:
        raise ValueError("truncated PGM header")
    return buf[start:pos], pos


def read_pgm(path) -> np.ndarray:
    """Load a binary (P5) 8-bit PGM as floats in [0, 1]."""
    buf = Path(path).read_bytes()
    magic, pos = _next_token(buf, 0)
    if magic != b"P5":
        raise ValueError(f"not a binary PGM (magic {magic!r})")
    fields = []
    for _ in range(3):
        token, pos = _next_token(buf, pos)
        try:
            fields.append(int(token))
        except ValueError as exc:
            raise ValueError(f"bad PGM header token {token!r}") from exc
    width, height, maxval = fields
    if width < 1 or height < 1:
        raise ValueError(f"bad PGM dimensions {width}x{height}")
    if not 1 <= maxval <= 255:
        raise ValueError(f"only 8-bit PGM supported (maxval {maxval})")
    pos += 1  # exactly one whitespace byte separates header and payload
    expected = width * height
    payload = buf[pos : pos + expected]
    if len(payload) != expected:
        raise ValueError(
            f"PGM payload truncated: expected {expected} bytes, got {len(payload)}"
        )
    pixels = np.frombuffer(payload, dtype=np.uint8).reshape(height, width)
    return pixels.astype(np.float64) / maxval


def write_pgm(path, img, maxval: int = 255) -> None:
    """Write floats in [0, 1] as a binary (P5) PGM; values are clipped and
    rounded to the 0..maxval grid."""
    a = np.asarray(img, dtype=np.float64)
    if a.ndim != 2:
        raise ValueError("image must be 2-D")
    if not 1 <= maxval <= 255:
        raise ValueError(f"only 8-bit PGM supported (maxval {maxval})")
    quantized = np.rint(np.clip(a, 0.0, 1.0) * maxval).astype(np.uint8)
    header = f"P5\n{a.shape[1]} {a.shape[0]}\n{maxval}\n".encode("ascii")
    Path(path).write_bytes(header + quantized.tobytes())
