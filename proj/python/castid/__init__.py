# Copyright 2026 The castid Authors
# License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
"""Cast identification from face and voice descriptors."""

from . import _core
from ._core import (
    CastidError,
    augment,
    average_precision,
    bicubic_resize,
    confident_count,
    contrast_stretch,
    evaluate,
    frames_for_duration,
    horizontal_flip,
    pool_track,
    read_embeddings,
    read_png,
    read_wav,
    run,
    spectrogram,
    to_grayscale,
    validate,
    write_embeddings,
    write_png,
)

__all__ = [
    "CastidError",
    "augment",
    "average_precision",
    "bicubic_resize",
    "confident_count",
    "contrast_stretch",
    "evaluate",
    "frames_for_duration",
    "horizontal_flip",
    "pool_track",
    "read_embeddings",
    "read_png",
    "read_wav",
    "run",
    "simulate",
    "spectrogram",
    "to_grayscale",
    "validate",
    "write_embeddings",
    "write_png",
]


def simulate(out_dir, config=None, seed=None):
    """Write a synthetic episode and return its manifest path.

    config maps simulator keys (n_tracks, domain_gap, ...) to values.
    """
    text = "".join(f"{k} = {v}\n" for k, v in (config or {}).items())
    return _core.simulate(out_dir, text, seed)
