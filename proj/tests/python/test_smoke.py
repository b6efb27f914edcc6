# Copyright 2026 The castid Authors
# License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

import math

import numpy as np
import pytest

import castid


def test_embeddings_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    values = rng.standard_normal((5, 7)).astype(np.float32)
    ids = [f"t{i}" for i in range(5)]
    castid.write_embeddings(tmp_path / "x.cmeb", ids, values)
    got_ids, got = castid.read_embeddings(tmp_path / "x.cmeb")
    assert got_ids == ids
    assert got.dtype == np.float32
    assert np.array_equal(got, values)


def test_bad_magic_raises_with_code(tmp_path):
    (tmp_path / "x.cmeb").write_bytes(b"NOPE" + bytes(12))
    with pytest.raises(castid.CastidError) as info:
        castid.read_embeddings(tmp_path / "x.cmeb")
    assert info.value.code == "BadMagic"
    assert info.value.exit_code == 3


def test_pool_track_is_unit_and_order_free():
    frames = np.random.default_rng(1).standard_normal((12, 16)).astype(np.float32)
    pooled = castid.pool_track(frames)
    assert abs(np.linalg.norm(pooled.astype(np.float64)) - 1.0) < 1e-6
    assert np.array_equal(pooled, castid.pool_track(frames[::-1].copy()))


def test_spectrogram_shape_and_tone_peak():
    t = np.arange(16000) / 16000.0
    spec = castid.spectrogram(0.5 * np.sin(2 * math.pi * 1000.0 * t))
    assert spec.shape == (castid.frames_for_duration(1.0), 512) == (98, 512)
    assert abs(int(np.argmax(spec[10])) - 63) <= 1


def test_image_ops():
    img = np.random.default_rng(2).uniform(0.1, 0.9, (6, 9, 3)).astype(np.float32)
    assert np.array_equal(castid.horizontal_flip(castid.horizontal_flip(img)), img)
    stretched = castid.contrast_stretch(img)
    assert abs(stretched[..., 0].min() - 0.4) < 1e-6
    assert abs(stretched[..., 0].max() - 1.0) < 1e-6
    out = castid.augment([img, img[:, ::-1].copy()])
    assert len(out) == 8
    assert castid.to_grayscale(img).shape == (6, 9)


def test_selection_and_ap():
    assert castid.confident_count(4, 0.5) == 2
    assert castid.confident_count(10, 0.8) == 8
    labels = [("a", "X", 0.9), ("b", "Y", 0.8), ("c", "X", 0.1)]
    gt = [("a", "X"), ("b", "X"), ("c", "X")]
    # Thresholds admit a (1/1), then b (1/2), then c (2/3).
    expected = (1 / 3) * 1.0 + (1 / 3) * 0.5 + (1 / 3) * (2 / 3)
    assert castid.average_precision(labels, gt) == pytest.approx(expected, abs=1e-12)


def test_episode_end_to_end(tmp_path):
    config = {"n_tracks": 200, "n_segments": 40, "n_characters": 6}
    manifest = castid.simulate(tmp_path / "ep", config, seed=3)
    assert "valid:" in castid.validate(manifest)
    message = castid.run(manifest, tmp_path / "out")
    assert message.startswith("completed")
    report = castid.evaluate(tmp_path / "out" / "labels.csv",
                             tmp_path / "ep" / "ground_truth.csv", tmp_path / "eval")
    assert 0.0 <= report["accuracy"] <= 1.0
    assert report["n_tracks"] == 200


def test_run_rejects_bad_stage(tmp_path):
    manifest = castid.simulate(tmp_path / "ep", {"n_tracks": 50, "n_segments": 10})
    with pytest.raises(castid.CastidError) as info:
        castid.run(manifest, tmp_path / "out", stage="4")
    assert info.value.exit_code == 1
