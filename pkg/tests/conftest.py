import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from stegofuse.images import image_from_planes
from stegofuse.synthetic import synth_cover, write_cover_corpus


@pytest.fixture(scope="session")
def cover_dir(tmp_path_factory) -> Path:
    """Ten small synthetic PNG covers on disk."""
    out = tmp_path_factory.mktemp("covers")
    write_cover_corpus(out, count=10, seed=101, min_pixels=15_000, max_pixels=40_000)
    return out


@pytest.fixture(scope="session")
def clean_images_50():
    """Fifty small clean photographic-style images, in memory."""
    rng = np.random.default_rng(2024)
    images = []
    for _ in range(50):
        width = int(rng.integers(160, 260))
        height = int(rng.integers(140, 220))
        images.append(image_from_planes(synth_cover(rng, width, height)))
    return images


@pytest.fixture(scope="session")
def photo_cover():
    """One mid-size photographic-style cover for rate-estimation checks."""
    rng = np.random.default_rng(77)
    return image_from_planes(synth_cover(rng, 360, 280))
