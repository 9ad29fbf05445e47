"""Learning rules: one-shot updates, minibatch trainers, update algebra."""

import copy

import numpy as np
import pytest

import hippomem.plasticity as plasticity
from hippomem.core import Activation, Pathway, ae_decode, ae_encode, forward, init_autoencoder
from hippomem.errors import ConfigError
from hippomem.plasticity import (
    AutoMinibatchTrainer,
    HeteroMinibatchTrainer,
    auto_update,
    hetero_update,
    online_learning_rate,
)


class TestOnlineLearningRate:
    def test_reference_values(self):
        assert online_learning_rate(200) == 0.1
        assert online_learning_rate(1000) == 0.02
        assert online_learning_rate(2000) == 0.01
        assert online_learning_rate(20) == 1.0

    def test_rejects_non_positive_and_non_int(self):
        for bad in (0, -5, 2.5, "200"):
            with pytest.raises(ValueError):
                online_learning_rate(bad)


def _step_pathway():
    # W=[[4],[0]], b=[0], mu=[.5,.5], Step: x=[1,0] drives a=2 -> h=1
    return Pathway(
        weights=[[4.0], [0.0]], bias=[0.0], offsets=[0.5, 0.5], activation=Activation.STEP
    )


class TestHeteroUpdate:
    def test_hand_oracle(self):
        # h=1, t=0 -> err=1: dW = -eta*(x-mu)*err = -[.5,-.5]; db = -1
        p = _step_pathway()
        h = hetero_update(p, [1.0, 0.0], [0.0], eta=1.0)
        assert h.tolist() == [1.0]
        assert p.weights.tolist() == [[3.5], [0.5]]
        assert p.bias.tolist() == [-1.0]

    def test_zero_error_is_exact_fixed_point(self):
        p = _step_pathway()
        x = np.array([1.0, 0.0])
        target = forward(p, x)  # err == 0 exactly
        w0, b0 = p.weights.copy(), p.bias.copy()
        hetero_update(p, x, target, eta=0.7)
        assert np.array_equal(p.weights, w0)
        assert np.array_equal(p.bias, b0)

    def test_converged_association_not_eroded_by_repetition(self):
        p = _step_pathway()
        x, t = np.array([1.0, 0.0]), np.array([1.0])
        for _ in range(5):
            hetero_update(p, x, t, eta=1.0)
        snapshot = p.weights.copy()
        hetero_update(p, x, t, eta=1.0)
        assert np.array_equal(p.weights, snapshot)

    def test_eta_linearity_bitwise(self):
        # From zero weights the applied delta is the update itself; doubling a
        # power-of-two eta scales every float exactly.
        def fresh():
            return Pathway(
                weights=np.zeros((3, 2)),
                bias=np.zeros(2),
                offsets=[0.25, 0.5, 0.75],
                activation=Activation.SIGMOID,
            )

        x = np.array([1.0, 0.0, 1.0])
        t = np.array([1.0, 0.0])
        small, big = fresh(), fresh()
        hetero_update(small, x, t, eta=0.25)
        hetero_update(big, x, t, eta=0.5)
        assert np.array_equal(2.0 * small.weights, big.weights)
        assert np.array_equal(2.0 * small.bias, big.bias)

    def test_eta_zero_changes_nothing(self):
        p = _step_pathway()
        w0 = p.weights.copy()
        hetero_update(p, [1.0, 0.0], [0.0], eta=0.0)
        assert np.array_equal(p.weights, w0)

    def test_exactly_one_forward_per_call(self, monkeypatch):
        calls = []
        original = plasticity.forward

        def spy(pathway, x):
            calls.append(1)
            return original(pathway, x)

        monkeypatch.setattr(plasticity, "forward", spy)
        hetero_update(_step_pathway(), [1.0, 0.0], [0.0], eta=1.0)
        assert len(calls) == 1

    def test_shape_validation(self):
        p = _step_pathway()
        with pytest.raises(ConfigError):
            hetero_update(p, [1.0, 0.0, 0.0], [0.0], eta=1.0)
        with pytest.raises(ConfigError):
            hetero_update(p, [1.0, 0.0], [0.0, 1.0], eta=1.0)


class TestAutoUpdate:
    def test_matches_independent_formula(self):
        ae = init_autoencoder(4, 3, visible_offsets=0.35, hidden_offsets=0.03, seed=11)
        x = np.array([1.0, 0.0, 1.0, 0.0])
        eta = 0.5
        # independent recomputation of the tied-weight rule
        h = 1.0 / (1.0 + np.exp(-((x - ae.visible_offsets) @ ae.weights + ae.encode_bias)))
        z = 1.0 / (1.0 + np.exp(-((h - ae.hidden_offsets) @ ae.weights.T + ae.decode_bias)))
        want_w = ae.weights - eta * np.outer(z - x, h - ae.hidden_offsets)
        want_c = ae.decode_bias - eta * (z - x)
        want_b = ae.encode_bias - eta * (h - ae.target_hidden_activity)
        got_h, got_z = auto_update(ae, x, eta=eta)
        assert np.allclose(got_h, h, atol=1e-12)
        assert np.allclose(got_z, z, atol=1e-12)
        assert np.allclose(ae.weights, want_w, atol=1e-12)
        assert np.allclose(ae.decode_bias, want_c, atol=1e-12)
        assert np.allclose(ae.encode_bias, want_b, atol=1e-12)

    def test_encode_bias_update_can_be_disabled(self):
        ae = init_autoencoder(4, 3, visible_offsets=0.35, hidden_offsets=0.03, seed=11)
        b0 = ae.encode_bias.copy()
        w0 = ae.weights.copy()
        auto_update(ae, np.array([1.0, 0.0, 1.0, 0.0]), eta=0.5, update_encode_bias=False)
        assert np.array_equal(ae.encode_bias, b0)
        assert not np.array_equal(ae.weights, w0)

    def test_shape_validation(self):
        ae = init_autoencoder(4, 3, visible_offsets=0.5, hidden_offsets=0.5)
        with pytest.raises(ConfigError):
            auto_update(ae, np.zeros(3), eta=0.1)


class TestHeteroMinibatchTrainer:
    def test_batch_update_is_mean_of_per_sample_updates(self):
        def fresh():
            return Pathway(
                weights=np.zeros((3, 2)), bias=np.zeros(2), offsets=[0.25, 0.5, 0.75]
            )

        x = np.array([[1.0, 0.0, 1.0], [0.0, 1.0, 0.0]])
        t = np.array([[1.0, 0.0], [0.0, 1.0]])
        eta = 0.5
        batch = fresh()
        HeteroMinibatchTrainer(batch, eta=eta).step(x, t)
        # per-sample updates from the same start, averaged (batch size 2 is a
        # power of two, so the division is exact)
        singles = []
        for i in range(2):
            p = fresh()
            hetero_update(p, x[i], t[i], eta=eta)
            singles.append((p.weights, p.bias))
        assert np.array_equal(batch.weights, (singles[0][0] + singles[1][0]) / 2.0)
        assert np.array_equal(batch.bias, (singles[0][1] + singles[1][1]) / 2.0)

    def test_momentum_recursion(self):
        # applied_t = update_t + m * applied_{t-1}, replayed independently
        rng = np.random.default_rng(7)
        w0 = rng.normal(0, 0.1, (4, 3))
        p = Pathway(weights=w0.copy(), bias=np.zeros(3), offsets=0.5)
        trainer = HeteroMinibatchTrainer(p, eta=0.2, momentum=0.5)
        x = (rng.random((2, 4)) < 0.5).astype(float)
        t = (rng.random((2, 3)) < 0.5).astype(float)
        # mirror recursion with plain numpy
        w, b = w0.copy(), np.zeros(3)
        vel_w = np.zeros_like(w)
        vel_b = np.zeros_like(b)
        for _ in range(3):
            h = 1.0 / (1.0 + np.exp(-((x - 0.5) @ w + b)))
            err = h - t
            vel_w = -0.2 * ((x - 0.5).T @ err) / 2.0 + 0.5 * vel_w
            vel_b = -0.2 * err.mean(axis=0) + 0.5 * vel_b
            w = w + vel_w
            b = b + vel_b
            trainer.step(x, t)
        assert np.allclose(p.weights, w, atol=1e-12)
        assert np.allclose(p.bias, b, atol=1e-12)

    def test_zero_momentum_step_equals_plain_mean(self):
        p1 = Pathway(weights=np.zeros((2, 2)), bias=np.zeros(2), offsets=0.5)
        p2 = Pathway(weights=np.zeros((2, 2)), bias=np.zeros(2), offsets=0.5)
        x = np.array([[1.0, 0.0]])
        t = np.array([[1.0, 1.0]])
        HeteroMinibatchTrainer(p1, eta=1.0, momentum=0.0).step(x, t)
        hetero_update(p2, x[0], t[0], eta=1.0)
        assert np.array_equal(p1.weights, p2.weights)
        assert np.array_equal(p1.bias, p2.bias)

    def test_invalid_momentum_rejected(self):
        p = Pathway(weights=np.zeros((2, 2)), bias=np.zeros(2), offsets=0.5)
        for bad in (1.0, 1.5, -0.1):
            with pytest.raises(ConfigError):
                HeteroMinibatchTrainer(p, eta=1.0, momentum=bad)

    def test_empty_and_mismatched_batches_rejected(self):
        p = Pathway(weights=np.zeros((2, 2)), bias=np.zeros(2), offsets=0.5)
        trainer = HeteroMinibatchTrainer(p, eta=1.0)
        with pytest.raises(ValueError):
            trainer.step(np.zeros((0, 2)), np.zeros((0, 2)))
        with pytest.raises(ConfigError):
            trainer.step(np.zeros((2, 2)), np.zeros((3, 2)))


class TestAutoMinibatchTrainer:
    def test_single_sample_step_matches_auto_update(self):
        ae1 = init_autoencoder(5, 4, visible_offsets=0.35, hidden_offsets=0.03, seed=3)
        ae2 = copy.deepcopy(ae1)
        x = np.array([1.0, 0.0, 0.0, 1.0, 1.0])
        AutoMinibatchTrainer(ae1, eta=0.3, momentum=0.0).step(x[None, :])
        auto_update(ae2, x, eta=0.3)
        assert np.allclose(ae1.weights, ae2.weights, atol=1e-15)
        assert np.allclose(ae1.decode_bias, ae2.decode_bias, atol=1e-15)
        assert np.allclose(ae1.encode_bias, ae2.encode_bias, atol=1e-15)

    def test_encode_bias_freeze_respected(self):
        ae = init_autoencoder(5, 4, visible_offsets=0.35, hidden_offsets=0.03, seed=3)
        b0 = ae.encode_bias.copy()
        trainer = AutoMinibatchTrainer(ae, eta=0.3, update_encode_bias=False)
        trainer.step(np.ones((2, 5)))
        assert np.array_equal(ae.encode_bias, b0)

    def test_training_reduces_reconstruction_error(self):
        rng = np.random.default_rng(9)
        x = (rng.random((40, 12)) < 0.35).astype(float)
        ae = init_autoencoder(12, 30, visible_offsets=0.35, hidden_offsets=0.1, seed=1)
        trainer = AutoMinibatchTrainer(ae, eta=0.5)
        before = np.abs(ae_decode(ae, ae_encode(ae, x)) - x).mean()
        for _ in range(600):
            trainer.step(x)
        after = np.abs(ae_decode(ae, ae_encode(ae, x)) - x).mean()
        assert after < before / 2
