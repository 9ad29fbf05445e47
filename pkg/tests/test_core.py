"""Forward-pass math: activations, centered pathways, tied-weight codecs."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hippomem.core import (
    Activation,
    AutoEncoderPathway,
    Pathway,
    ae_decode,
    ae_encode,
    forward,
    init_autoencoder,
    init_pathway,
    sigmoid,
    step,
)
from hippomem.errors import ConfigError


class TestSigmoid:
    def test_zero_drive_is_exactly_half(self):
        assert sigmoid(np.array(0.0)) == 0.5

    def test_log3_oracle(self):
        # 1 / (1 + exp(-ln 3)) = 1 / (1 + 1/3) = 3/4
        assert abs(sigmoid(np.array(np.log(3.0))) - 0.75) < 1e-12
        assert abs(sigmoid(np.array(-np.log(3.0))) - 0.25) < 1e-12

    def test_saturates_without_overflow(self):
        # the pre-activation is clipped, so the negative tail bottoms out at
        # exp(-clip) rather than exactly zero
        with np.errstate(over="raise"):
            assert 0.0 <= sigmoid(np.array(-1e6)) < 1e-300
            assert sigmoid(np.array(1e6)) == 1.0

    def test_monotone_on_grid(self):
        a = np.linspace(-20, 20, 101)
        y = sigmoid(a)
        assert np.all(np.diff(y) > 0)
        assert np.all((y > 0) & (y < 1))


class TestStep:
    def test_zero_maps_to_zero(self):
        assert step(np.array(0.0)) == 0.0
        assert step(np.array(-0.0)) == 0.0

    def test_smallest_positive_fires(self):
        assert step(np.array(5e-324)) == 1.0

    def test_binary_output(self):
        out = step(np.array([-2.0, -0.5, 0.0, 0.5, 2.0]))
        assert out.tolist() == [0.0, 0.0, 0.0, 1.0, 1.0]


class TestForward:
    def test_hand_oracle_balanced_drive(self):
        # x=[1,0], mu=[.5,.5], W=[[2],[2]]: a = .5*2 + (-.5)*2 = 0 -> sigmoid 0.5
        p = Pathway(weights=[[2.0], [2.0]], bias=[0.0], offsets=[0.5, 0.5])
        assert forward(p, [1.0, 0.0])[0] == 0.5

    def test_hand_oracle_step(self):
        # a = .5*4 + (-.5)*0 = 2 -> step 1;  x=[0,1] gives a = -2 -> step 0
        p = Pathway(
            weights=[[4.0], [0.0]], bias=[0.0], offsets=[0.5, 0.5], activation=Activation.STEP
        )
        assert forward(p, [1.0, 0.0])[0] == 1.0
        assert forward(p, [0.0, 1.0])[0] == 0.0

    def test_bias_shifts_drive(self):
        # zero weights: output is sigmoid(bias) regardless of input
        p = Pathway(weights=np.zeros((3, 2)), bias=[0.0, np.log(3.0)], offsets=0.5)
        out = forward(p, [1.0, 0.0, 1.0])
        assert out[0] == 0.5
        assert abs(out[1] - 0.75) < 1e-12

    def test_batch_matches_single(self):
        rng = np.random.default_rng(3)
        p = init_pathway(5, 4, offsets=0.2, seed=7)
        x = (rng.random((6, 5)) < 0.4).astype(float)
        batched = forward(p, x)
        assert batched.shape == (6, 4)
        for i in range(6):
            assert np.array_equal(batched[i], forward(p, x[i]))

    def test_step_pathway_output_is_binary(self):
        p = init_pathway(8, 6, offsets=0.3, activation=Activation.STEP, seed=1)
        out = forward(p, (np.random.default_rng(0).random((5, 8)) < 0.3).astype(float))
        assert np.all((out == 0.0) | (out == 1.0))

    def test_dim_mismatch_raises(self):
        p = init_pathway(4, 3, offsets=0.5)
        with pytest.raises(ConfigError):
            forward(p, np.zeros(5))

    @settings(deadline=None)
    @given(
        d_in=st.integers(1, 6),
        d_out=st.integers(1, 4),
        data=st.data(),
    )
    def test_centering_invariance(self, d_in, d_out, data):
        # Shifting inputs and offsets by the same 1/16-grid amount leaves the
        # output bitwise unchanged: the (x - mu) subtraction is exact on the grid.
        grid = st.integers(-64, 64).map(lambda k: k / 16.0)
        weights = np.array(
            data.draw(
                st.lists(
                    st.lists(grid, min_size=d_out, max_size=d_out),
                    min_size=d_in,
                    max_size=d_in,
                )
            )
        )
        x = np.array(data.draw(st.lists(st.sampled_from([0.0, 1.0]), min_size=d_in, max_size=d_in)))
        mu = np.array(
            data.draw(
                st.lists(st.integers(0, 8).map(lambda k: k / 16.0), min_size=d_in, max_size=d_in)
            )
        )
        delta = data.draw(st.integers(0, 8).map(lambda k: k / 16.0))
        shifted_mu = mu + delta
        if np.any(shifted_mu > 1.0):
            shifted_mu = np.clip(shifted_mu, 0.0, 1.0)
            delta_vec = shifted_mu - mu
        else:
            delta_vec = np.full(d_in, delta)
        base = Pathway(weights=weights, bias=np.zeros(d_out), offsets=mu)
        shifted = Pathway(weights=weights.copy(), bias=np.zeros(d_out), offsets=shifted_mu)
        assert np.array_equal(forward(base, x), forward(shifted, x + delta_vec))


class TestPathwayValidation:
    def test_offsets_must_be_probabilities(self):
        with pytest.raises(ConfigError):
            Pathway(weights=np.zeros((2, 2)), bias=np.zeros(2), offsets=[-0.1, 0.5])
        with pytest.raises(ConfigError):
            Pathway(weights=np.zeros((2, 2)), bias=np.zeros(2), offsets=[0.5, 1.5])

    def test_non_finite_weights_rejected(self):
        with pytest.raises(ConfigError):
            Pathway(weights=[[np.nan, 0.0]], bias=np.zeros(2), offsets=[0.5])

    def test_bias_shape_checked(self):
        with pytest.raises(ConfigError):
            Pathway(weights=np.zeros((2, 3)), bias=np.zeros(2), offsets=0.5)

    def test_scalar_offsets_broadcast(self):
        p = Pathway(weights=np.zeros((3, 2)), bias=np.zeros(2), offsets=0.2)
        assert np.array_equal(p.offsets, [0.2, 0.2, 0.2])

    def test_init_pathway_deterministic(self):
        a = init_pathway(6, 5, offsets=0.2, seed=42)
        b = init_pathway(6, 5, offsets=0.2, seed=42)
        assert np.array_equal(a.weights, b.weights)
        assert np.array_equal(a.bias, np.zeros(5))
        c = init_pathway(6, 5, offsets=0.2, seed=43)
        assert not np.array_equal(a.weights, c.weights)

    def test_init_pathway_rejects_bad_dims(self):
        with pytest.raises(ConfigError):
            init_pathway(0, 3, offsets=0.5)


class TestAutoEncoder:
    def _tiny(self):
        # d_visible=2, d_hidden=1, tied weight column [ln 4, 0]
        return AutoEncoderPathway(
            weights=[[np.log(4.0)], [0.0]],
            encode_bias=[0.0],
            decode_bias=[0.0, 0.0],
            visible_offsets=[0.5, 0.5],
            hidden_offsets=[0.5],
        )

    def test_encode_oracle(self):
        ae = self._tiny()
        # a_h = .5*ln4 + (-.5)*0 = ln 2 -> sigmoid = 2/3
        h = ae_encode(ae, [1.0, 0.0])
        assert abs(h[0] - 2.0 / 3.0) < 1e-12

    def test_decode_uses_transposed_weights(self):
        ae = self._tiny()
        # z = sigmoid((h - .5) * [ln4, 0]): unit 1 gets zero drive -> exactly 0.5
        z = ae_decode(ae, [2.0 / 3.0])
        assert abs(z[0] - sigmoid(np.array((2.0 / 3.0 - 0.5) * np.log(4.0)))) < 1e-15
        assert z[1] == 0.5

    def test_target_hidden_activity_defaults_to_hidden_offsets(self):
        ae = init_autoencoder(4, 3, visible_offsets=0.35, hidden_offsets=0.03, seed=0)
        assert np.array_equal(ae.target_hidden_activity, ae.hidden_offsets)
        ae2 = init_autoencoder(
            4, 3, visible_offsets=0.35, hidden_offsets=0.03, target_hidden_activity=0.1, seed=0
        )
        assert np.array_equal(ae2.target_hidden_activity, np.full(3, 0.1))

    def test_step_encode_is_binary(self):
        ae = init_autoencoder(
            10, 7, visible_offsets=0.35, hidden_offsets=0.35,
            encode_activation=Activation.STEP, seed=5,
        )
        x = np.random.default_rng(2).random((4, 10))
        h = ae_encode(ae, x)
        assert np.all((h == 0.0) | (h == 1.0))

    def test_dim_mismatches_raise(self):
        ae = init_autoencoder(4, 3, visible_offsets=0.5, hidden_offsets=0.5)
        with pytest.raises(ConfigError):
            ae_encode(ae, np.zeros(3))
        with pytest.raises(ConfigError):
            ae_decode(ae, np.zeros(4))
