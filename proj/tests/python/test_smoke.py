import json

import numpy as np
import pytest

import s3a


def small_synth(seed=3):
    cfg = s3a.SynthConfig()
    cfg.input_dim = 8
    cfg.samples_per_group = 12
    cfg.seed = seed
    return s3a.generate_synthetic(cfg)


def test_numerics():
    assert s3a.l21_norm(np.array([[3.0, 4.0], [0.0, 0.0]])) == 5.0
    assert s3a.frobenius_sq(np.array([[3.0, 4.0]])) == 25.0
    assert s3a.sigmoid(np.zeros((2, 3))).tolist() == [[0.5] * 3] * 2


def test_partition_groups():
    p = s3a.build_partition([0, 0, 1, 1], [0, 1, 0, 1])
    assert p.groups == {(0, 0): [0], (0, 1): [1], (1, 0): [2], (1, 1): [3]}


def test_synthetic_shapes_and_manifest_roundtrip():
    X, man = small_synth()
    assert X.shape == (8, 48)
    assert len(man) == 48
    again = s3a.DatasetManifest.from_csv(man.to_csv())
    assert again.to_csv() == man.to_csv()


def test_train_and_extract_deterministic():
    X, man = small_synth()
    X = X - X.mean(axis=1, keepdims=True)
    cfg = s3a.TrainConfig()
    cfg.learning_rate = 1e-3
    cfg.pretrain_epochs = 20
    cfg.finetune_epochs = 20
    dims = s3a.default_hidden_dims(8)
    p1, r1 = s3a.pretrain(X, dims, cfg)
    p2, r2 = s3a.pretrain(X, dims, cfg)
    assert p1 == p2 and r1.totals == r2.totals
    part = s3a.build_partition(man.class_ids, man.subclass_ids)
    f, rep = s3a.finetune(p1, X, part, cfg)
    assert rep.epochs_run == 40
    H = s3a.encode_stack(f, X)
    assert H.shape == (dims[-1], X.shape[1])
    assert np.all((H > 0) & (H < 1))


def test_grad_check_small():
    X = np.random.default_rng(0).normal(size=(4, 6))
    p = s3a.init_params(4, [3, 2], 1)
    part = s3a.build_partition([0, 0, 0, 1, 1, 1], [0, 1, 0, 1, 0, 1])
    cfg = s3a.TrainConfig()
    assert s3a.grad_check(p, X, part, cfg) < 1e-5


def test_svm_and_roc():
    F = np.array([[-2.0, -1.5, 1.5, 2.0]])
    labels = [-1, -1, 1, 1]
    m = s3a.train_svm(F, labels)
    scores = s3a.decision_values(m, F)
    assert [1 if s >= 0 else -1 for s in scores] == labels
    assert s3a.roc_auc(scores, labels) == 1.0
    assert json.loads(m.to_json())["cost_pos"] == 1.0


def test_feature_file_roundtrip(tmp_path):
    X = np.arange(12.0).reshape(3, 4)
    path = str(tmp_path / "x.s3af")
    s3a.save_features(path, X)
    assert np.array_equal(s3a.load_features(path), X)


def test_errors_carry_category(tmp_path):
    bad = tmp_path / "bad.s3af"
    bad.write_bytes(b"NOPE" + b"\0" * 12)
    with pytest.raises(s3a.S3AError) as info:
        s3a.load_features(str(bad))
    assert info.value.code == "BadMagic"
    with pytest.raises(s3a.S3AError):
        s3a.build_partition([0, 1], [0])
