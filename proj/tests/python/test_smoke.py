# Copyright 2026 The velocomp Authors
# SPDX-License-Identifier: Apache-2.0

import math
import struct

import numpy as np
import pytest

import velocomp


def test_harmonic_mean():
    assert velocomp.harmonic_mean(0.5, 0.5) == 0.5
    assert velocomp.harmonic_mean(0.0, 0.7) == 0.0


def test_least_squares_collinear_is_symmetric():
    d = np.array([0.6, 0.8, 0.0])
    a, b, damped = velocomp.least_squares_coefficients(d, d, d)
    assert damped
    assert abs(a - b) < 1e-12
    assert abs(a - 0.5) < 1e-6


def test_least_squares_orthogonal():
    a, b, damped = velocomp.least_squares_coefficients(
        np.array([1.0, 0.0]), np.array([0.0, 1.0]), np.array([2.0, 3.0]))
    assert (a, b, damped) == (2.0, 3.0, False)


def test_bias_sweep_and_score_file(tmp_path):
    scores = np.array([[0.9, 0.1], [0.6, 0.4]])
    truth = np.array([0, 1], dtype=np.uint32)
    seen = np.array([1, 0], dtype=np.uint8)
    report = velocomp.bias_sweep(scores, truth, seen)
    assert report.best_seen == 1.0
    assert report.best_unseen == 1.0
    assert report.best_hm == 1.0
    assert math.isinf(report.curve[0].bias) and report.curve[0].bias < 0

    path = tmp_path / "s.fcsm"
    velocomp.save_score_matrix(path, scores, truth, seen)
    s2, t2, m2 = velocomp.load_score_matrix(path)
    np.testing.assert_allclose(s2, scores.astype(np.float32))
    assert list(t2) == [0, 1] and list(m2) == [1, 0]


def test_bias_sweep_rejects_nan():
    with pytest.raises(velocomp.Error):
        velocomp.bias_sweep(np.array([[math.nan, 0.0], [0.0, 0.0]]),
                            np.array([0, 1], dtype=np.uint32), np.array([1, 0], dtype=np.uint8))


def test_synthetic_is_deterministic():
    c = velocomp.SyntheticConfig()
    c.seed = 4
    a = velocomp.generate_synthetic(c)
    b = velocomp.generate_synthetic(c)
    assert a.encode() == b.encode()
    assert len(a.seen_pairs) == 32 and len(a.unseen_pairs) == 32
    assert a.split_size("train") == 256


def write_fceb(path, dim, texts, seen, unseen, samples):
    """Single-path FCEB written field by field."""
    attr, obj, comp = texts
    out = [b"FCEB", struct.pack("<5I", 1, dim, len(attr), len(obj), len(comp))]
    for table in (seen, unseen):
        out.append(struct.pack("<I", len(table)))
        for a, o in table:
            out.append(struct.pack("<2I", a, o))
    out.append(struct.pack("<B", 4))
    for block in (attr, obj, comp):
        for row in block:
            out.append(struct.pack(f"<{dim}f", *row))
    out.append(struct.pack("<I", len(samples)))
    for a, o, split, feature in samples:
        out.append(struct.pack("<2IB", a, o, split))
        out.append(struct.pack(f"<{dim}f", *feature))
    path.write_bytes(b"".join(out))


def test_hand_written_fceb_loads_and_round_trips(tmp_path):
    attr = [[1, 0], [0, 1]]
    obj = [[1, 0], [0, 1]]
    comp = [[1, 0], [0.6, 0.8], [0.8, 0.6]]  # seen (0,0), (1,1) then unseen (0,1)
    seen = [(0, 0), (1, 1)]
    unseen = [(0, 1)]
    samples = [(0, 0, 0, [1, 0]), (1, 1, 0, [0, 1]), (0, 1, 2, [0.5, 0.5])]
    path = tmp_path / "hand.fceb"
    write_fceb(path, 2, (attr, obj, comp), seen, unseen, samples)
    ds = velocomp.load_dataset(path)
    assert ds.dim == 2 and not ds.multi_path
    assert ds.seen_pairs == seen and ds.unseen_pairs == unseen
    assert ds.split_size("test") == 1
    assert ds.encode() == path.read_bytes()


def test_bad_files_raise_typed_errors(tmp_path):
    path = tmp_path / "junk.fceb"
    path.write_bytes(b"FCEX" + b"\0" * 40)
    with pytest.raises(velocomp.FormatError):
        velocomp.load_dataset(path)
    assert issubclass(velocomp.SplitError, velocomp.DataError)


def test_config_errors():
    c = velocomp.RunConfig()
    with pytest.raises(velocomp.ConfigError):
        c.set("no_such_key", "1")
    with pytest.raises(velocomp.ConfigError):
        c.set("tau", "abc")


def test_small_train_and_evaluate(tmp_path):
    c = velocomp.RunConfig()
    for k, v in {"synth.attributes": "3", "synth.objects": "4", "synth.dim": "8",
                 "flow_width": "8", "flow_blocks": "1", "composer_width": "8",
                 "composer_blocks": "1", "flow_epochs": "2", "composer_epochs": "2"}.items():
        c.set(k, v)
    ds = velocomp.generate_synthetic(c.synthetic)
    result = velocomp.train(ds, c)
    assert [(e.stage, e.epoch) for e in result.losses] == [(1, 1), (1, 2), (2, 1), (2, 2)]
    assert result.leakage_enabled
    out = velocomp.evaluate(ds, result.models, c)
    assert 0.0 <= out.closed.auc <= out.closed.best_seen * out.closed.best_unseen + 1e-12
    scores, truth, seen = out.closed_scores
    assert scores.shape == (ds.split_size("test"), len(ds.seen_pairs) + len(ds.unseen_pairs))

    result.models.save(tmp_path)
    reloaded = velocomp.load_models(tmp_path, ds.dim)
    again = velocomp.evaluate(ds, reloaded, c)
    assert again.closed.auc == out.closed.auc
