"""Neural-network kernel: layers, gradients, training loop, checkpoints."""

import numpy as np
import pytest

from dysasr.errors import DivergenceError, GeometryError, UnsupportedFormatError
from dysasr.nn import (
    Conv1D,
    Dense,
    Geometry,
    Network,
    Parallel,
    TrainConfig,
    grad_check,
    load_checkpoint,
    network_from_config,
    save_checkpoint,
    sgd_train,
)

RNG = np.random.default_rng(0)


def toy_batch(n, dims, n_classes, seed=0):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((n, dims)).astype(np.float32)
    y = rng.integers(0, n_classes, n)
    return x, y


class TestDense:
    def test_forward_shapes(self):
        layer = Dense(5, 3, "sigmoid", RNG)
        out = layer.forward(np.zeros((7, 5), dtype=np.float32))
        assert out.shape == (7, 3)
        assert np.all((out > 0) & (out < 1))

    def test_linear_is_affine(self):
        layer = Dense(4, 2, "linear", RNG)
        x = np.random.default_rng(1).standard_normal((3, 4)).astype(np.float32)
        out = layer.forward(x)
        assert np.allclose(out, x @ layer.W + layer.b, atol=1e-6)

    def test_softmax_rows_sum_to_one(self):
        layer = Dense(4, 6, "softmax", RNG)
        out = layer.forward(np.random.default_rng(2)
                            .standard_normal((5, 4)).astype(np.float32))
        assert np.allclose(out.sum(axis=1), 1.0, atol=1e-6)

    def test_grad_check(self):
        net = Network([Dense(6, 4, "sigmoid", RNG), Dense(4, 3, "softmax", RNG)])
        x, y = toy_batch(8, 6, 3)
        report = grad_check(net, x, y)
        assert report.passed and report.max_rel_error < 1e-4


class TestConv1D:
    def test_freq_positions_and_pooling(self):
        g = Geometry(17, 3, 40)
        conv = Conv1D("freq", 200, 8, 3, g, RNG)
        assert conv.n_positions == 33
        assert conv.n_pooled == 11
        out = conv.forward(np.zeros((2, g.size), dtype=np.float32))
        assert out.shape == (2, 11 * 200)

    def test_time_positions_and_pooling(self):
        g = Geometry(17, 3, 40)
        conv = Conv1D("time", 75, 8, 5, g, RNG)
        assert conv.n_positions == 10
        assert conv.n_pooled == 2
        assert conv.out_dim == 150

    def test_span_exceeds_extent(self):
        with pytest.raises(GeometryError):
            Conv1D("freq", 4, 9, 1, Geometry(2, 1, 8), RNG)

    def test_grad_check_freq(self):
        g = Geometry(4, 2, 9)
        net = Network([Conv1D("freq", 3, 3, 2, g, RNG),
                       Dense(3 * 3, 4, "softmax", RNG)])
        x, y = toy_batch(5, g.size, 4)
        assert grad_check(net, x, y).max_rel_error < 1e-4

    def test_grad_check_time(self):
        g = Geometry(7, 1, 5)
        net = Network([Conv1D("time", 4, 3, 2, g, RNG),
                       Dense(2 * 4, 3, "softmax", RNG)])
        x, y = toy_batch(5, g.size, 3)
        assert grad_check(net, x, y).max_rel_error < 1e-4

    def test_pool_routes_max(self):
        # with a single filter of weight pattern picking one input, the pooled
        # output is the sigmoid of the max pre-activation over the pool group
        g = Geometry(1, 1, 6)
        conv = Conv1D("freq", 1, 1, 3, g, RNG)
        conv.W[:] = 1.0
        conv.b[:] = 0.0
        x = np.array([[0.1, 0.9, 0.4, -2.0, -1.0, -3.0]], dtype=np.float32)
        out = conv.forward(x)
        expected = 1 / (1 + np.exp(-np.array([0.9, -1.0])))
        assert np.allclose(out[0], expected, atol=1e-6)


class TestParallel:
    def test_fusion_concat_and_grads(self):
        g = Geometry(5, 1, 6)
        f = Conv1D("freq", 2, 3, 2, g, RNG)
        t = Conv1D("time", 2, 3, 2, g, RNG)
        fusion = Parallel([(slice(0, g.size), f), (slice(0, g.size), t)], g.size)
        assert fusion.out_dim == f.out_dim + t.out_dim
        net = Network([fusion, Dense(fusion.out_dim, 3, "softmax", RNG)])
        x, y = toy_batch(4, g.size, 3)
        assert grad_check(net, x, y).max_rel_error < 1e-4

    def test_disjoint_slices(self):
        g1, g2 = Geometry(1, 1, 6), Geometry(1, 1, 4)
        a = Dense(6, 3, "sigmoid", RNG)
        b = Dense(4, 2, "sigmoid", RNG)
        fusion = Parallel([(slice(0, 6), a), (slice(6, 10), b)], 10)
        x = np.random.default_rng(3).standard_normal((2, 10)).astype(np.float32)
        out = fusion.forward(x)
        assert np.allclose(out[:, :3], a.forward(x[:, :6]), atol=1e-6)
        assert np.allclose(out[:, 3:], b.forward(x[:, 6:]), atol=1e-6)
        del g1, g2


class TestNetwork:
    def test_mse_loss_value(self):
        net = Network([Dense(3, 2, "linear", RNG)], loss="mse")
        out = np.array([[1.0, 2.0]])
        tgt = np.array([[0.0, 0.0]])
        # 0.5 * mean over rows of the squared-error sum
        assert net.loss_value(out, tgt) == pytest.approx(0.5 * (1 + 4))

    def test_ce_loss_value(self):
        net = Network([Dense(3, 2, "softmax", RNG)], loss="ce")
        out = np.array([[0.25, 0.75]])
        assert net.loss_value(out, np.array([1])) == pytest.approx(-np.log(0.75))

    def test_mse_grad_check(self):
        net = Network([Dense(5, 4, "sigmoid", RNG), Dense(4, 2, "linear", RNG)],
                      loss="mse")
        x = np.random.default_rng(4).standard_normal((6, 5))
        tgt = np.random.default_rng(5).standard_normal((6, 2))
        assert grad_check(net, x, tgt).max_rel_error < 1e-4

    def test_forward_until(self):
        l1, l2 = Dense(4, 3, "sigmoid", RNG), Dense(3, 2, "softmax", RNG)
        net = Network([l1, l2])
        x = np.zeros((2, 4), dtype=np.float32)
        assert np.allclose(net.forward_until(1, x), l1.forward(x))

    def test_clone_independent(self):
        net = Network([Dense(3, 2, "softmax", RNG)])
        other = net.clone()
        other.layers[0].W += 1.0
        assert not np.allclose(net.layers[0].W, other.layers[0].W)


class TestTraining:
    def test_loss_decreases_on_separable_data(self):
        rng = np.random.default_rng(0)
        y = rng.integers(0, 3, 300)
        x = (rng.standard_normal((300, 6)) * 0.1).astype(np.float32)
        x[np.arange(300), y] += 2.0
        net = Network([Dense(6, 16, "sigmoid", rng), Dense(16, 3, "softmax", rng)])
        log = sgd_train(net, x, y, x, y,
                        TrainConfig(lr0=0.5, batch=32, max_epochs=10))
        assert log.train_losses[-1] < log.train_losses[0]
        assert net.error_rate(x, y) < 0.1

    def test_deterministic(self):
        x, y = toy_batch(100, 5, 3, seed=7)
        cfg = TrainConfig(lr0=0.1, batch=16, max_epochs=3, seed=5)

        def run():
            rng = np.random.default_rng(1)
            net = Network([Dense(5, 8, "sigmoid", rng), Dense(8, 3, "softmax", rng)])
            sgd_train(net, x, y, x, y, cfg)
            return [p.copy() for p in net.params()]

        a, b = run(), run()
        assert all(np.array_equal(p, q) for p, q in zip(a, b))

    def test_lr_schedule_constant_then_halves(self):
        x, y = toy_batch(60, 4, 2, seed=3)
        cfg = TrainConfig(lr0=0.008, constant_epochs=4, batch=16, max_epochs=12)
        rng = np.random.default_rng(2)
        net = Network([Dense(4, 4, "sigmoid", rng), Dense(4, 2, "softmax", rng)])
        log = sgd_train(net, x, y, x, y, cfg)
        assert log.learning_rates[: min(4, log.epochs)] == [0.008] * min(4, log.epochs)
        for prev, cur in zip(log.learning_rates, log.learning_rates[1:]):
            assert cur in (prev, prev / 2)

    def test_frozen_layers_untouched(self):
        x, y = toy_batch(50, 4, 2, seed=1)
        rng = np.random.default_rng(3)
        net = Network([Dense(4, 6, "sigmoid", rng), Dense(6, 2, "softmax", rng)])
        w0 = net.layers[0].W.copy()
        sgd_train(net, x, y, x, y, TrainConfig(lr0=0.1, max_epochs=2),
                  trainable_layers=[net.layers[1]])
        assert np.array_equal(net.layers[0].W, w0)
        assert not np.array_equal(net.layers[1].W, np.zeros_like(net.layers[1].W))

    def test_divergence_detected(self):
        # linear regression with an absurd lr blows up to non-finite loss
        rng = np.random.default_rng(3)
        x = rng.standard_normal((64, 4)).astype(np.float32)
        tgt = rng.standard_normal((64, 2)).astype(np.float32)
        net = Network([Dense(4, 2, "linear", rng)], loss="mse")
        with pytest.raises(DivergenceError):
            sgd_train(net, x, tgt, x, tgt, TrainConfig(lr0=1e18, max_epochs=10))

    def test_target_accuracy_early_exit(self):
        rng = np.random.default_rng(0)
        y = rng.integers(0, 2, 200)
        x = (rng.standard_normal((200, 4)) * 0.05).astype(np.float32)
        x[np.arange(200), y] += 3.0
        net = Network([Dense(4, 8, "sigmoid", rng), Dense(8, 2, "softmax", rng)])
        log = sgd_train(net, x, y, x, y,
                        TrainConfig(lr0=0.5, batch=16, max_epochs=50,
                                    target_train_accuracy=0.99))
        assert log.stopped_reason == "target train accuracy reached"
        assert log.epochs < 50


class TestCheckpoint:
    def _net(self):
        rng = np.random.default_rng(9)
        g = Geometry(5, 1, 8)
        f = Conv1D("freq", 3, 3, 2, g, rng)
        fusion = Parallel([(slice(0, g.size), f)], g.size)
        return Network([fusion, Dense(f.out_dim, 4, "sigmoid", rng),
                        Dense(4, 3, "softmax", rng)])

    def test_round_trip(self, tmp_path):
        net = self._net()
        path = str(tmp_path / "m.nnck")
        save_checkpoint(path, net)
        back = load_checkpoint(path)
        x = np.random.default_rng(1).standard_normal((3, 40)).astype(np.float32)
        assert np.array_equal(net.forward(x), back.forward(x))

    def test_deterministic_bytes(self, tmp_path):
        net = self._net()
        p1, p2 = str(tmp_path / "a"), str(tmp_path / "b")
        save_checkpoint(p1, net)
        save_checkpoint(p2, net)
        assert open(p1, "rb").read() == open(p2, "rb").read()

    def test_bad_magic(self, tmp_path):
        path = str(tmp_path / "bad")
        open(path, "wb").write(b"JUNK1234")
        with pytest.raises(UnsupportedFormatError):
            load_checkpoint(path)

    def test_config_round_trip(self):
        net = self._net()
        rebuilt = network_from_config(net.config())
        shapes = [p.shape for p in net.params()]
        assert [p.shape for p in rebuilt.params()] == shapes
