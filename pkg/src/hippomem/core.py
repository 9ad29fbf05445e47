"""Centered rate-based neurons: the forward math every region shares.

A pathway computes h = phi(W^T (x - mu) + b) where mu is a fixed estimate of
the mean input activity.  Centering the input before the weight multiply is
load-bearing: the learning rules in `plasticity` assume it, and it is what
keeps weight updates mean-free.  The subtraction must happen first, in
(x - mu) form, so that shift invariance holds exactly in floating point
whenever the shifted operands are exactly representable.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ConfigError
from .seeding import as_generator

# exp() overflows doubles just past 709; clipping there leaves the logistic
# exact everywhere a double can distinguish it from 0 or 1.
_EXP_CLIP = 709.0


class Activation(str, Enum):
    SIGMOID = "sigmoid"
    STEP = "step"


def sigmoid(a: np.ndarray) -> np.ndarray:
    """Logistic function, overflow-safe for any finite input."""
    a = np.asarray(a, dtype=np.float64)
    return 1.0 / (1.0 + np.exp(-np.clip(a, -_EXP_CLIP, _EXP_CLIP)))


def step(a: np.ndarray) -> np.ndarray:
    """Heaviside threshold with step(0) = 0: zero drive means silence."""
    return (np.asarray(a, dtype=np.float64) > 0.0).astype(np.float64)


def activate(kind: Activation, a: np.ndarray) -> np.ndarray:
    if kind == Activation.SIGMOID:
        return sigmoid(a)
    if kind == Activation.STEP:
        return step(a)
    raise ConfigError(f"unknown activation: {kind!r}")


def _as_float_vector(x, size: int, name: str) -> np.ndarray:
    v = np.asarray(x, dtype=np.float64)
    if v.ndim == 0:
        v = np.full(size, float(v))
    if v.shape != (size,):
        raise ConfigError(f"{name}: expected shape ({size},), got {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ConfigError(f"{name}: contains non-finite entries")
    return v


def _check_offsets(v: np.ndarray, name: str) -> np.ndarray:
    if np.any(v < 0.0) or np.any(v > 1.0):
        raise ConfigError(f"{name}: offsets must lie in [0, 1]")
    return v


@dataclass
class Pathway:
    """One hetero-associative projection between two regions.

    weights : (d_in, d_out), bias : (d_out,), offsets : (d_in,) input means.
    """

    weights: np.ndarray
    bias: np.ndarray
    offsets: np.ndarray
    activation: Activation = Activation.SIGMOID

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=np.float64)
        if self.weights.ndim != 2:
            raise ConfigError(f"weights: expected 2-D array, got ndim={self.weights.ndim}")
        if not np.all(np.isfinite(self.weights)):
            raise ConfigError("weights: contains non-finite entries")
        d_in, d_out = self.weights.shape
        self.bias = _as_float_vector(self.bias, d_out, "bias")
        self.offsets = _check_offsets(_as_float_vector(self.offsets, d_in, "offsets"), "offsets")
        self.activation = Activation(self.activation)

    @property
    def d_in(self) -> int:
        return self.weights.shape[0]

    @property
    def d_out(self) -> int:
        return self.weights.shape[1]


def init_pathway(
    d_in: int,
    d_out: int,
    offsets,
    activation: Activation = Activation.SIGMOID,
    seed=0,
    weight_scale: float = 0.01,
) -> Pathway:
    """Fresh pathway: N(0, weight_scale^2) weights, zero bias."""
    if d_in < 1 or d_out < 1:
        raise ConfigError(f"pathway dims must be positive, got ({d_in}, {d_out})")
    rng = as_generator(seed)
    weights = rng.normal(0.0, weight_scale, size=(d_in, d_out))
    return Pathway(weights=weights, bias=np.zeros(d_out), offsets=offsets, activation=activation)


def forward(pathway: Pathway, x) -> np.ndarray:
    """h = phi((x - mu) W + b).  Accepts one pattern (d_in,) or a batch (..., d_in)."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != pathway.d_in:
        raise ConfigError(
            f"forward: input dim {x.shape[-1]} does not match pathway d_in {pathway.d_in}"
        )
    a = (x - pathway.offsets) @ pathway.weights + pathway.bias
    return activate(pathway.activation, a)


@dataclass
class AutoEncoderPathway:
    """Tied-weight auto-associator between a visible and a hidden region.

    Encode: h = phi_enc(W^T (x - mu) + b); decode: z = phi_dec(W (h - lambda) + c).
    `hidden_offsets` (lambda) centers the hidden code during decoding and
    weight updates; `target_hidden_activity` (lambda-tilde) is the sparseness
    the optional encode-bias update pulls the hidden units toward.
    """

    weights: np.ndarray  # (d_visible, d_hidden)
    encode_bias: np.ndarray  # (d_hidden,)
    decode_bias: np.ndarray  # (d_visible,)
    visible_offsets: np.ndarray  # (d_visible,)
    hidden_offsets: np.ndarray  # (d_hidden,)
    target_hidden_activity: np.ndarray = None  # (d_hidden,), defaults to hidden_offsets
    encode_activation: Activation = Activation.SIGMOID
    decode_activation: Activation = Activation.SIGMOID

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=np.float64)
        if self.weights.ndim != 2:
            raise ConfigError(f"weights: expected 2-D array, got ndim={self.weights.ndim}")
        if not np.all(np.isfinite(self.weights)):
            raise ConfigError("weights: contains non-finite entries")
        d_vis, d_hid = self.weights.shape
        self.encode_bias = _as_float_vector(self.encode_bias, d_hid, "encode_bias")
        self.decode_bias = _as_float_vector(self.decode_bias, d_vis, "decode_bias")
        self.visible_offsets = _check_offsets(
            _as_float_vector(self.visible_offsets, d_vis, "visible_offsets"), "visible_offsets"
        )
        self.hidden_offsets = _check_offsets(
            _as_float_vector(self.hidden_offsets, d_hid, "hidden_offsets"), "hidden_offsets"
        )
        if self.target_hidden_activity is None:
            self.target_hidden_activity = self.hidden_offsets.copy()
        self.target_hidden_activity = _check_offsets(
            _as_float_vector(self.target_hidden_activity, d_hid, "target_hidden_activity"),
            "target_hidden_activity",
        )
        self.encode_activation = Activation(self.encode_activation)
        self.decode_activation = Activation(self.decode_activation)

    @property
    def d_visible(self) -> int:
        return self.weights.shape[0]

    @property
    def d_hidden(self) -> int:
        return self.weights.shape[1]


def init_autoencoder(
    d_visible: int,
    d_hidden: int,
    visible_offsets,
    hidden_offsets,
    target_hidden_activity=None,
    encode_activation: Activation = Activation.SIGMOID,
    decode_activation: Activation = Activation.SIGMOID,
    seed=0,
    weight_scale: float = 0.01,
) -> AutoEncoderPathway:
    if d_visible < 1 or d_hidden < 1:
        raise ConfigError(f"autoencoder dims must be positive, got ({d_visible}, {d_hidden})")
    rng = as_generator(seed)
    weights = rng.normal(0.0, weight_scale, size=(d_visible, d_hidden))
    return AutoEncoderPathway(
        weights=weights,
        encode_bias=np.zeros(d_hidden),
        decode_bias=np.zeros(d_visible),
        visible_offsets=visible_offsets,
        hidden_offsets=hidden_offsets,
        target_hidden_activity=target_hidden_activity,
        encode_activation=encode_activation,
        decode_activation=decode_activation,
    )


def ae_encode(ae: AutoEncoderPathway, x) -> np.ndarray:
    """h = phi_enc((x - mu) W + b) for one pattern or a batch."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != ae.d_visible:
        raise ConfigError(
            f"ae_encode: input dim {x.shape[-1]} does not match d_visible {ae.d_visible}"
        )
    a = (x - ae.visible_offsets) @ ae.weights + ae.encode_bias
    return activate(ae.encode_activation, a)


def ae_decode(ae: AutoEncoderPathway, h) -> np.ndarray:
    """z = phi_dec((h - lambda) W^T + c) for one code or a batch."""
    h = np.asarray(h, dtype=np.float64)
    if h.shape[-1] != ae.d_hidden:
        raise ConfigError(
            f"ae_decode: hidden dim {h.shape[-1]} does not match d_hidden {ae.d_hidden}"
        )
    a = (h - ae.hidden_offsets) @ ae.weights.T + ae.decode_bias
    return activate(ae.decode_activation, a)
