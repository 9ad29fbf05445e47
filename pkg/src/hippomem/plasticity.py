"""Hebbian-descent learning rules.

All rules share one shape: the update is the outer product of the centered
presynaptic state and the postsynaptic error, so a unit whose output already
equals its target contributes nothing (one-shot updates neither grow without
bound nor erode converged associations).

Hetero-associative (pathway h = phi((x - mu) W + b), target t):
    dW = -eta (x - mu) (h - t)^T        db = -eta (h - t)

Auto-associative (tied weights, reconstruction z of input x, hidden h):
    dW = -eta (z - x) (h - lambda)^T    dc = -eta (z - x)
and optionally the encode bias is pulled toward the target hidden activity:
    db = -eta (h - lambda_tilde)
"""

from __future__ import annotations

import numpy as np

from .core import AutoEncoderPathway, Pathway, ae_decode, ae_encode, forward
from .errors import ConfigError


def online_learning_rate(n: int) -> float:
    """Learning rate 20/n used for one-shot storage at pattern size n."""
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError(f"pattern size must be a positive integer, got {n!r}")
    return 20.0 / float(n)


def hetero_update(pathway: Pathway, x, target, eta: float) -> np.ndarray:
    """One-shot hetero-associative update; returns the (single) forward output.

    Exactly one forward pass is computed per call.
    """
    x = np.asarray(x, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if x.shape != (pathway.d_in,):
        raise ConfigError(f"hetero_update: input shape {x.shape} != ({pathway.d_in},)")
    if target.shape != (pathway.d_out,):
        raise ConfigError(f"hetero_update: target shape {target.shape} != ({pathway.d_out},)")
    h = forward(pathway, x)
    err = h - target
    pathway.weights -= np.outer(eta * (x - pathway.offsets), err)
    pathway.bias -= eta * err
    return h


def auto_update(
    ae: AutoEncoderPathway, x, eta: float, update_encode_bias: bool = True
) -> tuple[np.ndarray, np.ndarray]:
    """One-shot auto-associative update; returns (hidden, reconstruction)."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (ae.d_visible,):
        raise ConfigError(f"auto_update: input shape {x.shape} != ({ae.d_visible},)")
    h = ae_encode(ae, x)
    z = ae_decode(ae, h)
    err = z - x
    ae.weights -= np.outer(eta * err, h - ae.hidden_offsets)
    ae.decode_bias -= eta * err
    if update_encode_bias:
        ae.encode_bias -= eta * (h - ae.target_hidden_activity)
    return h, z


def _check_momentum(momentum: float) -> float:
    if not 0.0 <= momentum < 1.0:
        raise ConfigError(f"momentum must lie in [0, 1), got {momentum}")
    return float(momentum)


class HeteroMinibatchTrainer:
    """Minibatch gradient steps for one hetero-associative pathway.

    Each step applies the batch mean of the per-sample updates plus a classical
    momentum term: applied = mean_update + momentum * previously_applied.
    """

    def __init__(self, pathway: Pathway, eta: float, momentum: float = 0.0):
        self.pathway = pathway
        self.eta = float(eta)
        self.momentum = _check_momentum(momentum)
        self._vel_w = np.zeros_like(pathway.weights)
        self._vel_b = np.zeros_like(pathway.bias)

    def step(self, inputs, targets) -> np.ndarray:
        """One update from a batch; returns the batch forward outputs."""
        x = np.atleast_2d(np.asarray(inputs, dtype=np.float64))
        t = np.atleast_2d(np.asarray(targets, dtype=np.float64))
        if x.shape[0] == 0:
            raise ValueError("empty batch")
        if x.shape[0] != t.shape[0]:
            raise ConfigError(f"batch size mismatch: {x.shape[0]} inputs, {t.shape[0]} targets")
        p = self.pathway
        h = forward(p, x)
        err = h - t
        batch = x.shape[0]
        upd_w = -self.eta * ((x - p.offsets).T @ err) / batch
        upd_b = -self.eta * err.mean(axis=0)
        self._vel_w = upd_w + self.momentum * self._vel_w
        self._vel_b = upd_b + self.momentum * self._vel_b
        p.weights += self._vel_w
        p.bias += self._vel_b
        return h


class AutoMinibatchTrainer:
    """Minibatch gradient steps for one tied-weight auto-associator."""

    def __init__(
        self,
        ae: AutoEncoderPathway,
        eta: float,
        momentum: float = 0.0,
        update_encode_bias: bool = True,
    ):
        self.ae = ae
        self.eta = float(eta)
        self.momentum = _check_momentum(momentum)
        self.update_encode_bias = bool(update_encode_bias)
        self._vel_w = np.zeros_like(ae.weights)
        self._vel_c = np.zeros_like(ae.decode_bias)
        self._vel_b = np.zeros_like(ae.encode_bias)

    def step(self, inputs) -> tuple[np.ndarray, np.ndarray]:
        """One update from a batch; returns (hidden codes, reconstructions)."""
        x = np.atleast_2d(np.asarray(inputs, dtype=np.float64))
        if x.shape[0] == 0:
            raise ValueError("empty batch")
        ae = self.ae
        h = ae_encode(ae, x)
        z = ae_decode(ae, h)
        err = z - x
        batch = x.shape[0]
        upd_w = -self.eta * (err.T @ (h - ae.hidden_offsets)) / batch
        upd_c = -self.eta * err.mean(axis=0)
        self._vel_w = upd_w + self.momentum * self._vel_w
        self._vel_c = upd_c + self.momentum * self._vel_c
        ae.weights += self._vel_w
        ae.decode_bias += self._vel_c
        if self.update_encode_bias:
            upd_b = -self.eta * (h - ae.target_hidden_activity).mean(axis=0)
            self._vel_b = upd_b + self.momentum * self._vel_b
            ae.encode_bias += self._vel_b
        return h, z
