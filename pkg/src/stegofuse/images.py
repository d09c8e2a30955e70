"""Decoding of images into uniform 8-bit sample planes, plus directory scanning.

Every detector downstream consumes a :class:`SampleImage`: one row-major
uint8 plane per channel, alpha dropped, grayscale kept as a single plane.
Files that cannot be decoded to 8 bits per channel are rejected rather than
silently truncated.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError


class DecodeError(Exception):
    """Base class for image decoding failures."""


class UnreadableFile(DecodeError):
    """The file could not be read from disk at all."""


class NotAnImage(DecodeError):
    """The content is not a decodable image."""


class UnsupportedDepth(DecodeError):
    """The image does not use 8 bits per channel."""


class NotADirectory(Exception):
    """scan_directory was pointed at something that is not a directory."""


# Formats PIL may report that use lossy compression (or where we cannot
# tell, e.g. WEBP); these get analysed but flagged, since the detectors
# assume lossless pixel data.
_LOSSY_FORMATS = {"JPEG", "JPEG2000", "JPX", "JP2", "WEBP", "MPO"}

# PIL modes with a bit depth other than 8 per channel.
_REJECTED_MODES = {"1", "I", "F", "I;16", "I;16B", "I;16L", "I;16N"}


class ImageFormat(Enum):
    PNG = "png"
    BMP = "bmp"
    LOSSY_OR_OTHER = "lossy-or-other"  # JPEG and any other decodable format
    NON_IMAGE = "non-image"


@dataclass(frozen=True)
class ScanTarget:
    path: Path
    format: ImageFormat

    @property
    def is_image(self) -> bool:
        return self.format is not ImageFormat.NON_IMAGE


@dataclass(frozen=True)
class SampleImage:
    """A decoded image as per-channel 8-bit sample planes.

    ``planes`` has shape (channels, height, width), dtype uint8, and is
    marked read-only so instances can be shared across workers.
    """

    width: int
    height: int
    channels: int
    planes: np.ndarray
    source_path: Path
    file_size: int
    lossy_source: bool = False

    def __post_init__(self) -> None:
        if self.channels not in (1, 3):
            raise ValueError(f"channels must be 1 or 3, got {self.channels}")
        if self.planes.shape != (self.channels, self.height, self.width):
            raise ValueError(
                f"planes shape {self.planes.shape} does not match "
                f"({self.channels}, {self.height}, {self.width})"
            )
        if self.planes.dtype != np.uint8:
            raise ValueError(f"planes must be uint8, got {self.planes.dtype}")
        if self.file_size <= 0:
            raise ValueError("file_size must be positive")
        self.planes.setflags(write=False)

    @property
    def capacity_bits(self) -> int:
        """LSB capacity: one bit per sample."""
        return self.width * self.height * self.channels

    def samples_interleaved(self) -> np.ndarray:
        """Samples in channel-interleaved row-major order.

        Pixel 0's channels first (R, G, B for colour), then pixel 1, etc.
        This is the canonical traversal order shared with the embedder.
        """
        return np.ascontiguousarray(self.planes.transpose(1, 2, 0)).ravel()

    def with_planes(self, planes: np.ndarray) -> "SampleImage":
        return replace(self, planes=planes)


def image_from_planes(
    planes: np.ndarray,
    source_path: Path | str = Path("<memory>"),
    file_size: int | None = None,
    lossy_source: bool = False,
) -> SampleImage:
    """Wrap a (C, H, W) or (H, W) uint8 array as a SampleImage.

    For in-memory images ``file_size`` defaults to the raw sample count,
    which keeps the positive-size invariant without touching disk.
    """
    arr = np.asarray(planes, dtype=np.uint8)
    if arr.ndim == 2:
        arr = arr[None, :, :]
    channels, height, width = arr.shape
    return SampleImage(
        width=width,
        height=height,
        channels=channels,
        planes=arr,
        source_path=Path(source_path),
        file_size=file_size if file_size is not None else max(1, arr.size),
        lossy_source=lossy_source,
    )


def _planes_from_pil(im: Image.Image) -> np.ndarray:
    if im.mode in _REJECTED_MODES:
        raise UnsupportedDepth(f"{im.filename if hasattr(im, 'filename') else im}: mode {im.mode} is not 8 bits per channel")
    if im.mode == "L":
        converted = im
    elif im.mode == "LA":
        converted = im.convert("L")  # drop alpha, stay grayscale
    else:
        # Palette images expand to RGB; RGBA/PA drop alpha; CMYK/YCbCr map to RGB.
        converted = im.convert("RGB")
    arr = np.asarray(converted, dtype=np.uint8)
    if arr.ndim == 2:
        return arr[None, :, :]
    return np.ascontiguousarray(arr.transpose(2, 0, 1))


def decode_image(path: Path | str) -> SampleImage:
    """Decode a lossless (or, flagged, lossy) image into sample planes.

    Raises UnreadableFile, NotAnImage or UnsupportedDepth.
    """
    path = Path(path)
    try:
        file_size = path.stat().st_size
    except OSError as exc:
        raise UnreadableFile(f"{path}: {exc}") from exc
    try:
        with Image.open(path) as im:
            fmt = im.format or ""
            planes = _planes_from_pil(im)
    except UnidentifiedImageError as exc:
        raise NotAnImage(f"{path}: not a decodable image") from exc
    except UnsupportedDepth:
        raise
    except (OSError, ValueError, SyntaxError) as exc:
        # PIL raises plain OSError for truncated/corrupt content.
        raise NotAnImage(f"{path}: undecodable content ({exc})") from exc
    if file_size <= 0:
        raise NotAnImage(f"{path}: empty file")
    channels, height, width = planes.shape
    return SampleImage(
        width=width,
        height=height,
        channels=channels,
        planes=planes,
        source_path=path,
        file_size=file_size,
        lossy_source=fmt in _LOSSY_FORMATS,
    )


def save_image(img: SampleImage | np.ndarray, path: Path | str) -> None:
    """Write sample planes losslessly; format chosen from the file suffix."""
    planes = img.planes if isinstance(img, SampleImage) else np.asarray(img, dtype=np.uint8)
    if planes.ndim == 2:
        planes = planes[None, :, :]
    if planes.shape[0] == 1:
        pil = Image.fromarray(planes[0], mode="L")
    else:
        pil = Image.fromarray(np.ascontiguousarray(planes.transpose(1, 2, 0)), mode="RGB")
    pil.save(Path(path))


def classify_file(path: Path | str) -> ImageFormat:
    """Classify by decodable content, not extension."""
    try:
        with Image.open(Path(path)) as im:
            fmt = im.format or ""
    except (UnidentifiedImageError, OSError, ValueError):
        return ImageFormat.NON_IMAGE
    if fmt == "PNG":
        return ImageFormat.PNG
    if fmt == "BMP":
        return ImageFormat.BMP
    return ImageFormat.LOSSY_OR_OTHER


def scan_directory(directory: Path | str) -> list[ScanTarget]:
    """Enumerate regular files directly inside ``directory`` (non-recursive).

    Results are ordered lexicographically by file name so downstream
    reports are deterministic.
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise NotADirectory(f"{directory} is not a directory")
    targets = []
    for entry in sorted(directory.iterdir(), key=lambda p: p.name):
        if not entry.is_file():
            continue
        targets.append(ScanTarget(path=entry, format=classify_file(entry)))
    return targets
