"""Slow-timescale training of the fixed scaffolding.

Three procedures run before any one-shot storage and are then frozen:
the recurrent CA3 pathway that replays a cyclic intrinsic sequence, the
EC->DG autoencoder whose encoder half separates correlated patterns, and
the SI<->EC codec that binarizes real-valued input data.  Defaults are the
reference hyperparameters; pass a plain int seed for end-to-end determinism.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    Activation,
    AutoEncoderPathway,
    Pathway,
    init_autoencoder,
    init_pathway,
)
from .data import balanced_flip_rows, gen_rand
from .errors import ConfigError
from .plasticity import AutoMinibatchTrainer, HeteroMinibatchTrainer
from .seeding import derive_generator


@dataclass
class IntrinsicSequence:
    """The cyclic CA3 pattern chain the recurrent pathway is trained to replay."""

    patterns: np.ndarray  # (length, dim) binary
    activity: float

    def __post_init__(self):
        self.patterns = np.asarray(self.patterns, dtype=np.float64)
        if self.patterns.ndim != 2 or self.patterns.shape[0] < 2:
            raise ConfigError("intrinsic sequence needs >= 2 patterns")
        if not np.all((self.patterns == 0.0) | (self.patterns == 1.0)):
            raise ConfigError("intrinsic patterns must be binary")
        expected = int(round(self.activity * self.dim))
        counts = self.patterns.sum(axis=1)
        if not np.all(counts == expected):
            raise ConfigError(
                f"intrinsic patterns must each have exactly {expected} active units"
            )

    @property
    def length(self) -> int:
        return self.patterns.shape[0]

    @property
    def dim(self) -> int:
        return self.patterns.shape[1]

    def successor_index(self, index: int) -> int:
        return (index + 1) % self.length

    def pattern(self, index: int) -> np.ndarray:
        return self.patterns[index % self.length]


def _batches(count: int, batch_size: int):
    for start in range(0, count, batch_size):
        yield slice(start, min(start + batch_size, count))


def pretrain_ca3(
    dim: int,
    length: int,
    activity: float = 0.2,
    epochs: int = 100,
    batch_size: int = 10,
    eta: float = 1.0,
    flip_fraction: float = 0.1,
    seed: int = 0,
    init_scale: float = 0.01,
) -> tuple[Pathway, IntrinsicSequence]:
    """Train the recurrent pathway to map each intrinsic pattern to its cyclic
    successor.  Inputs are re-corrupted with fresh flips every epoch (targets
    stay clean), which is what lets retrieval denoise partial cues later;
    batch composition is reshuffled each epoch.  Flips are activity-balanced
    (half ones cleared, half zeros set): balanced noise plus shuffling are
    what get every association to >= 0.99 successor correlation within the
    default epoch budget at small network sizes, while uniform-position flips
    leave sparse patterns stuck near chance.  When the patterns are too
    sparse for the nominal round(f*dim)/2 flips per side, the per-side count
    is capped at half the smaller unit pool so training noise never erases
    the majority of a pattern's active units.
    """
    if length < 2:
        raise ConfigError(f"intrinsic length must be >= 2, got {length}")
    if epochs < 0:
        raise ConfigError(f"epochs must be >= 0, got {epochs}")
    patterns = gen_rand(length, dim, activity, derive_generator(seed, "ca3-patterns")).patterns
    intrinsic = IntrinsicSequence(patterns=patterns, activity=activity)
    k_flip = int(round(flip_fraction * dim))
    k_active = int(round(activity * dim))
    side_cap = min(k_active, dim - k_active) // 2
    k_on = min(k_flip // 2, side_cap)
    k_off = min(k_flip - k_flip // 2, side_cap)
    pathway = init_pathway(
        dim,
        dim,
        offsets=activity,
        activation=Activation.SIGMOID,
        seed=derive_generator(seed, "ca3-init"),
        weight_scale=init_scale,
    )
    targets = np.roll(patterns, -1, axis=0)
    trainer = HeteroMinibatchTrainer(pathway, eta=eta, momentum=0.0)
    noise_rng = derive_generator(seed, "ca3-noise")
    order_rng = derive_generator(seed, "ca3-order")
    for _ in range(epochs):
        inputs = balanced_flip_rows(
            patterns, flip_fraction, noise_rng, flips_on=k_on, flips_off=k_off
        )
        order = order_rng.permutation(length)
        for sl in _batches(length, batch_size):
            trainer.step(inputs[order[sl]], targets[order[sl]])
    return pathway, intrinsic


def pretrain_dg(
    ec_dim: int,
    dg_dim: int,
    ec_activity: float = 0.35,
    dg_activity: float = 0.03,
    n_patterns: int = 4000,
    epochs: int = 1,
    batch_size: int = 10,
    eta: float = 100.0,
    seed: int = 0,
    init_scale: float = 0.01,
) -> AutoEncoderPathway:
    """Train the EC->DG tied-weight autoencoder on random EC-like patterns.

    The large learning rate with a low target hidden activity is what drives
    the sparse, decorrelated DG codes; only the encoder half is used later.
    The codes are generic: trained once on random data, reused for any input.
    """
    ae = init_autoencoder(
        ec_dim,
        dg_dim,
        visible_offsets=ec_activity,
        hidden_offsets=dg_activity,
        seed=derive_generator(seed, "dg-init"),
        weight_scale=init_scale,
    )
    train = gen_rand(n_patterns, ec_dim, ec_activity, derive_generator(seed, "dg-patterns"))
    trainer = AutoMinibatchTrainer(ae, eta=eta, momentum=0.0, update_encode_bias=True)
    for _ in range(epochs):
        for sl in _batches(n_patterns, batch_size):
            trainer.step(train.patterns[sl])
    return ae


def pretrain_si_codec(
    data,
    ec_dim: int,
    ec_activity: float = 0.35,
    epochs: int = 10,
    batch_size: int = 100,
    eta: float = 0.01,
    momentum: float = 0.9,
    seed: int = 0,
    init_scale: float = 0.01,
) -> AutoEncoderPathway:
    """Train the SI<->EC codec on the actual input corpus.

    The Step encode side yields binary EC codes; the sigmoid decode side
    reconstructs SI values for visualization.  Visible offsets are the
    per-position data mean (clipped into [0, 1] against float residue on
    standardized data); presentation order is reshuffled each epoch.
    """
    x = np.asarray(data, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 1:
        raise ConfigError("si codec needs a nonempty 2-D training set")
    ae = init_autoencoder(
        x.shape[1],
        ec_dim,
        visible_offsets=np.clip(x.mean(axis=0), 0.0, 1.0),
        hidden_offsets=ec_activity,
        encode_activation=Activation.STEP,
        decode_activation=Activation.SIGMOID,
        seed=derive_generator(seed, "si-init"),
        weight_scale=init_scale,
    )
    trainer = AutoMinibatchTrainer(ae, eta=eta, momentum=momentum, update_encode_bias=True)
    order_rng = derive_generator(seed, "si-order")
    count = x.shape[0]
    for _ in range(epochs):
        order = order_rng.permutation(count)
        for sl in _batches(count, batch_size):
            trainer.step(x[order[sl]])
    return ae
