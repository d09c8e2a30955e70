"""Synthetic photographic-style covers for desk-scale pools.

Real photo corpora are not bundled, so pools are grown from fields that
mimic the statistics the detectors lean on: strong local correlation
(multi-octave smooth noise), sensor noise, correlated colour channels and
a per-image tone curve. The tone curve is applied after quantization,
which combs the histogram the way camera pipelines and format conversions
do; without it the chi-square attack would see unnaturally even PoV pairs
on clean images.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np
from PIL import Image

from .images import save_image


def _smooth_field(rng: np.random.Generator, width: int, height: int, scale: int) -> np.ndarray:
    """Bicubically upsampled white noise: correlation length ~ scale pixels."""
    gw = max(2, math.ceil(width / scale) + 1)
    gh = max(2, math.ceil(height / scale) + 1)
    grid = rng.normal(size=(gh, gw)).astype(np.float32)
    im = Image.fromarray(grid, mode="F").resize((width, height), Image.Resampling.BICUBIC)
    return np.asarray(im, dtype=np.float32)


def _tone_curve(rng: np.random.Generator) -> np.ndarray:
    """Monotone uint8 LUT with slope wobble: combs the histogram like a camera.

    The curve must stay strongly non-linear: it is what glues sample parity
    to intensity. Without it the quantized noise field has near-independent
    LSBs, which is statistically the same as a fully embedded image.
    """
    xs = np.linspace(0.0, 1.0, 256)
    gamma = rng.uniform(0.8, 1.3)
    strength = rng.uniform(0.45, 0.7)
    ys = xs**gamma
    ys = ys + strength * np.sin(2.0 * np.pi * ys) / (2.0 * np.pi)
    ys = np.maximum.accumulate(ys)  # guard monotonicity against rounding
    return np.clip(np.round(ys * 255.0), 0, 255).astype(np.uint8)


def synth_cover(
    rng: np.random.Generator,
    width: int,
    height: int,
    channels: int = 3,
) -> np.ndarray:
    """One cover as (channels, height, width) uint8 planes."""
    base = np.zeros((height, width), dtype=np.float32)
    amplitude = 1.0
    for scale in (48, 16, 6):
        base += amplitude * _smooth_field(rng, width, height, scale)
        amplitude *= 0.55
    base = (base - base.mean()) / (base.std() + 1e-9)
    mean = rng.uniform(100.0, 156.0)
    spread = rng.uniform(32.0, 52.0)
    noise_sigma = rng.uniform(0.8, 1.8)

    planes = []
    for _ in range(channels):
        chroma = rng.uniform(6.0, 18.0) * _smooth_field(rng, width, height, 64)
        plane = mean + spread * base + chroma
        plane += rng.normal(0.0, noise_sigma, size=plane.shape)
        planes.append(plane)
    stacked = np.clip(np.round(np.stack(planes)), 0, 255).astype(np.uint8)
    return _tone_curve(rng)[stacked]


def random_cover_size(rng: np.random.Generator, min_pixels: int, max_pixels: int) -> tuple[int, int]:
    """(width, height) with area in [min_pixels, max_pixels] and a sane aspect."""
    area = rng.uniform(min_pixels, max_pixels)
    aspect = rng.uniform(0.7, 1.5)
    height = int(round(math.sqrt(area / aspect)))
    width = int(round(area / height))
    return max(16, width), max(16, height)


def write_cover_corpus(
    out_dir: Path | str,
    count: int,
    seed: int,
    min_pixels: int = 50_000,
    max_pixels: int = 250_000,
    channels: int = 3,
) -> list[Path]:
    """Write ``count`` PNG covers and return their paths (name-sorted)."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    paths = []
    for i in range(count):
        width, height = random_cover_size(rng, min_pixels, max_pixels)
        planes = synth_cover(rng, width, height, channels)
        path = out_dir / f"cover_{i:04d}.png"
        save_image(planes, path)
        paths.append(path)
    return paths
