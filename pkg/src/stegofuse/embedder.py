"""LSB-replacement embedding and labelled test-pool synthesis.

Samples are always traversed channel-interleaved row-major (all channels of
pixel 0, then pixel 1, ...), so sequential embedding and extraction agree by
construction. Payload bits overwrite the LSBs of the selected samples; no
other bit of any sample ever changes.
"""

from __future__ import annotations

import csv
import shutil
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from .images import ImageFormat, SampleImage, decode_image, save_image, scan_directory


class EmbedError(Exception):
    pass


class PayloadTooLarge(EmbedError):
    pass


class EmptyPayload(EmbedError):
    pass


class NoCovers(Exception):
    pass


class UnwritableOutput(Exception):
    pass


class Distribution(Enum):
    SEQUENTIAL = "sequential"
    PSEUDORANDOM = "pseudorandom"
    EQUIDISTRIBUTED = "equidistributed"


@dataclass(frozen=True)
class EmbedSpec:
    distribution: Distribution
    payload: bytes
    target_rate: float = 1.0
    seed: int | None = None  # required for PSEUDORANDOM

    def __post_init__(self) -> None:
        if not (0.0 < self.target_rate <= 1.0):
            raise ValueError(f"target_rate must be in (0, 1], got {self.target_rate}")
        if self.distribution is Distribution.PSEUDORANDOM and self.seed is None:
            raise ValueError("pseudorandom embedding needs a seed")


def _select_positions(
    distribution: Distribution, capacity: int, k: int, seed: int | None
) -> np.ndarray:
    if distribution is Distribution.SEQUENTIAL:
        return np.arange(k)
    if distribution is Distribution.PSEUDORANDOM:
        # Seeded permutation truncated to k: collision-free by construction.
        rng = np.random.default_rng(seed)
        return rng.permutation(capacity)[:k]
    stride = capacity // k
    return np.arange(k) * stride


def lsb_embed(img: SampleImage, spec: EmbedSpec) -> SampleImage:
    """Return a copy of ``img`` whose selected LSBs carry the payload bits."""
    k = len(spec.payload) * 8
    if k == 0:
        raise EmptyPayload("payload is empty")
    capacity = img.capacity_bits
    if k > int(spec.target_rate * capacity):
        raise PayloadTooLarge(
            f"{k} payload bits exceed {spec.target_rate:.3f} x {capacity} capacity"
        )
    bits = np.unpackbits(np.frombuffer(spec.payload, dtype=np.uint8))
    positions = _select_positions(spec.distribution, capacity, k, spec.seed)
    samples = img.samples_interleaved().copy()
    samples[positions] = (samples[positions] & 0xFE) | bits
    planes = np.ascontiguousarray(
        samples.reshape(img.height, img.width, img.channels).transpose(2, 0, 1)
    )
    return img.with_planes(planes)


def extract_payload(
    img: SampleImage,
    distribution: Distribution,
    n_bytes: int,
    seed: int | None = None,
) -> bytes:
    """Read back an embedded payload (test oracle for the round-trip property)."""
    if n_bytes <= 0:
        return b""
    positions = _select_positions(distribution, img.capacity_bits, n_bytes * 8, seed)
    bits = img.samples_interleaved()[positions] & 1
    return np.packbits(bits).tobytes()


# ---------------------------------------------------------------------------
# Pool generation
# ---------------------------------------------------------------------------

MANIFEST_NAME = "manifest.csv"
_MANIFEST_COLUMNS = ("path", "label", "distribution", "true_rate", "payload_bytes", "seed")


@dataclass(frozen=True)
class PoolRow:
    path: str  # file name relative to the pool directory
    label: str  # "stego" | "clean"
    distribution: str  # empty for clean rows
    true_rate: float
    payload_bytes: int
    seed: int | None


@dataclass
class PoolManifest:
    rows: list[PoolRow]

    @property
    def stego_rows(self) -> list[PoolRow]:
        return [r for r in self.rows if r.label == "stego"]

    @property
    def clean_rows(self) -> list[PoolRow]:
        return [r for r in self.rows if r.label == "clean"]

    def save(self, path: Path | str) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(_MANIFEST_COLUMNS)
            for row in self.rows:
                writer.writerow(
                    [
                        row.path,
                        row.label,
                        row.distribution,
                        repr(row.true_rate),  # full precision: load() must round-trip
                        row.payload_bytes,
                        "" if row.seed is None else row.seed,
                    ]
                )

    @classmethod
    def load(cls, path: Path | str) -> "PoolManifest":
        rows = []
        with open(path, "r", encoding="utf-8", newline="") as fh:
            for record in csv.DictReader(fh):
                rows.append(
                    PoolRow(
                        path=record["path"],
                        label=record["label"],
                        distribution=record["distribution"],
                        true_rate=float(record["true_rate"]),
                        payload_bytes=int(record["payload_bytes"]),
                        seed=int(record["seed"]) if record["seed"] else None,
                    )
                )
        return cls(rows)


def _file_seed(master_seed: int, index: int) -> int:
    return (master_seed * 1_000_003 + index) % (2**32)


def generate_pool(
    covers_dir: Path | str,
    out_dir: Path | str,
    stego_fraction: float,
    rates: list[float],
    distributions: list[Distribution],
    seed: int,
    manifest_name: str = MANIFEST_NAME,
) -> PoolManifest:
    """Build a labelled pool: clean copies plus stego variants with a manifest.

    Stego files cycle round-robin through the cross product of rates and
    distributions; payloads are seeded random bytes (matching the high
    entropy of the compressed payloads the detectors are meant to face).
    The whole layout is a pure function of the inputs and the seed.
    """
    covers = [
        t.path
        for t in scan_directory(covers_dir)
        if t.format in (ImageFormat.PNG, ImageFormat.BMP)
    ]
    if not covers:
        raise NoCovers(f"no decodable lossless covers in {covers_dir}")
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        probe = out_dir / ".write-probe"
        probe.write_bytes(b"")
        probe.unlink()
    except OSError as exc:
        raise UnwritableOutput(f"{out_dir}: {exc}") from exc

    n_stego = round(stego_fraction * len(covers))
    rng = np.random.default_rng(seed)
    stego_indices = set(rng.permutation(len(covers))[:n_stego].tolist())
    combos = [(rate, dist) for rate in rates for dist in distributions]

    rows: list[PoolRow] = []
    combo_cursor = 0
    for index, cover_path in enumerate(covers):
        if index in stego_indices and combos:
            rate, dist = combos[combo_cursor % len(combos)]
            combo_cursor += 1
            cover = decode_image(cover_path)
            payload_bytes = int(rate * cover.capacity_bits) // 8
            if payload_bytes > 0:
                file_seed = _file_seed(seed, index)
                payload = np.random.default_rng(file_seed).bytes(payload_bytes)
                spec = EmbedSpec(
                    distribution=dist,
                    payload=payload,
                    target_rate=rate,
                    seed=file_seed if dist is Distribution.PSEUDORANDOM else None,
                )
                stego = lsb_embed(cover, spec)
                name = f"{index:04d}_{cover_path.stem}.png"
                save_image(stego, out_dir / name)
                rows.append(
                    PoolRow(
                        path=name,
                        label="stego",
                        distribution=dist.value,
                        true_rate=payload_bytes * 8 / cover.capacity_bits,
                        payload_bytes=payload_bytes,
                        seed=file_seed,
                    )
                )
                continue
            # Cover too small to hold even one byte at this rate: keep it clean.
        name = f"{index:04d}_{cover_path.name}"
        shutil.copyfile(cover_path, out_dir / name)
        rows.append(
            PoolRow(path=name, label="clean", distribution="", true_rate=0.0,
                    payload_bytes=0, seed=None)
        )

    manifest = PoolManifest(rows)
    manifest.save(out_dir / manifest_name)
    return manifest
