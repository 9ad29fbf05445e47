"""Sequence-memory model wiring, one-shot storage, retrieval, and dreaming.

Two encoder variants share a decoder and a frozen recurrent CA3 pathway that
replays a pre-trained cyclic intrinsic sequence: Model-A projects EC straight
to CA3, Model-B routes EC through the frozen DG separator first.  Storage
hetero-associates each input pattern with the current intrinsic pattern in a
single one-shot update per pathway; retrieval encodes a cue and lets the
recurrent dynamics replay from there.  The standard-framework variant is the
alternative hypothesis used as a baseline: no fixed scaffolding, sequences
stored directly into a plastic recurrent pathway.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .core import (
    Activation,
    AutoEncoderPathway,
    Pathway,
    ae_decode,
    ae_encode,
    forward,
    init_pathway,
)
from .errors import ConfigError
from .metrics import UndefinedCorrelationError, _center_rows
from .plasticity import hetero_update
from .pretrain import IntrinsicSequence
from .seeding import derive_generator


class Variant(str, Enum):
    MODEL_A = "model-a"
    MODEL_B = "model-b"
    STANDARD = "standard"


class Relaxation(str, Enum):
    CORRECT = "correct"
    SHIFTED_POSITION = "shifted-position"
    SPURIOUS = "spurious"
    UNLABELED = "unlabeled"


@dataclass
class ModelConfig:
    """Scale and operating point.  Region sizes derive from n: EC holds
    round(1.1 n) units, CA3 round(2.5 n), DG 12 n."""

    n: int
    variant: Variant = Variant.MODEL_A
    ca3_activity: float = 0.2
    dg_activity: float = 0.03
    ec_activity: float = 0.35
    eta: float = None  # one-shot learning rate; defaults to 20/n
    init_seed: int = 0  # seed for plastic-pathway initialization

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise ConfigError(f"n must be a positive integer, got {self.n!r}")
        self.n = int(self.n)
        self.variant = Variant(self.variant)
        for name in ("ca3_activity", "dg_activity", "ec_activity"):
            value = getattr(self, name)
            if not 0.0 < value < 1.0:
                raise ConfigError(f"{name} must lie in (0, 1), got {value}")
        if self.eta is None:
            self.eta = 20.0 / self.n
        if self.eta < 0.0:
            raise ConfigError(f"eta must be >= 0, got {self.eta}")

    @property
    def ec_dim(self) -> int:
        return int(round(1.1 * self.n))

    @property
    def ca3_dim(self) -> int:
        return int(round(2.5 * self.n))

    @property
    def dg_dim(self) -> int:
        return 12 * self.n

    @property
    def input_dim(self) -> int:
        """Dimension of the patterns handed to store/encode: EC for Model-A/B;
        the standard framework stores CA3 patterns directly."""
        return self.ca3_dim if self.variant == Variant.STANDARD else self.ec_dim


@dataclass
class SequenceStore:
    """Ground truth for one store call: the input patterns and the intrinsic
    indices they were bound to."""

    intrinsic: IntrinsicSequence
    ec: np.ndarray  # (T, input_dim) stored input patterns
    indices: np.ndarray  # (T,) intrinsic index bound to each pattern

    def __post_init__(self):
        self.ec = np.asarray(self.ec, dtype=np.float64)
        self.indices = np.asarray(self.indices, dtype=np.int64)
        if self.ec.ndim != 2 or self.indices.shape != (self.ec.shape[0],):
            raise ConfigError("SequenceStore: ec and indices must align")

    def __len__(self) -> int:
        return self.ec.shape[0]

    def ca3(self) -> np.ndarray:
        """Ground-truth intrinsic CA3 pattern for each stored index."""
        return self.intrinsic.patterns[self.indices]


@dataclass
class RecallTrace:
    """States visited while relaxing from one cue.

    Row j of each stack is the state after j transitions (row 0 is the
    encoded cue), so there are transitions + 1 rows.
    """

    cue_index: int  # intrinsic index the cue corresponds to; None if unknown
    transitions: int
    ca3_states: np.ndarray  # (transitions + 1, ca3_dim)
    ec_states: np.ndarray  # (transitions + 1, input_dim)
    si_states: np.ndarray = None  # (transitions + 1, si_dim), when requested
    relaxation: Relaxation = Relaxation.UNLABELED

    def __post_init__(self):
        self.ca3_states = np.asarray(self.ca3_states, dtype=np.float64)
        self.ec_states = np.asarray(self.ec_states, dtype=np.float64)
        expected = self.transitions + 1
        if self.ca3_states.shape[0] != expected or self.ec_states.shape[0] != expected:
            raise ConfigError(f"RecallTrace: expected {expected} per-step states")
        self.relaxation = Relaxation(self.relaxation)


def _require_binary_stack(x: np.ndarray, dim: int, what: str) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        x = x[None, :]
    if x.ndim != 2 or x.shape[1] != dim:
        raise ConfigError(f"{what}: expected patterns of dim {dim}, got shape {x.shape}")
    if not np.all((x == 0.0) | (x == 1.0)):
        raise ValueError(f"{what}: patterns must be binary")
    return x


class HippocampusModel:
    """One model instance: fixed scaffolding plus the plastic pathways.

    Single-writer: store_sequence/store_standard/dream mutate the plastic
    pathways and must not run concurrently; encode/decode/transition/recall
    are pure reads.
    """

    def __init__(
        self,
        config: ModelConfig,
        intrinsic: IntrinsicSequence,
        ca3_to_ca3: Pathway = None,
        ec_to_dg: AutoEncoderPathway = None,
        si_codec: AutoEncoderPathway = None,
    ):
        self.config = config
        self.intrinsic = intrinsic
        if intrinsic.dim != config.ca3_dim:
            raise ConfigError(
                f"intrinsic dim {intrinsic.dim} != configured CA3 dim {config.ca3_dim}"
            )
        self.si_codec = si_codec
        self.ec_to_dg = None
        self.ec_to_ca3 = None
        self.dg_to_ca3 = None
        self.ca3_to_ec = None
        self.stored_count = 0
        self._next_index = 0

        if config.variant == Variant.STANDARD:
            if ca3_to_ca3 is not None or ec_to_dg is not None:
                raise ConfigError(
                    "standard framework builds its own plastic recurrent pathway"
                )
            self.ca3_to_ca3 = init_pathway(
                config.ca3_dim,
                config.ca3_dim,
                offsets=config.ca3_activity,
                seed=derive_generator(config.init_seed, "recurrent-init"),
            )
            return

        if ca3_to_ca3 is None:
            raise ConfigError(f"{config.variant.value} requires a pre-trained ca3_to_ca3")
        if ca3_to_ca3.weights.shape != (config.ca3_dim, config.ca3_dim):
            raise ConfigError(
                f"ca3_to_ca3 shape {ca3_to_ca3.weights.shape} != "
                f"({config.ca3_dim}, {config.ca3_dim})"
            )
        self.ca3_to_ca3 = ca3_to_ca3
        self.ca3_to_ec = init_pathway(
            config.ca3_dim,
            config.ec_dim,
            offsets=config.ca3_activity,
            seed=derive_generator(config.init_seed, "decoder-init"),
        )
        if config.variant == Variant.MODEL_A:
            if ec_to_dg is not None:
                raise ConfigError("model-a does not use a DG pathway")
            self.ec_to_ca3 = init_pathway(
                config.ec_dim,
                config.ca3_dim,
                offsets=config.ec_activity,
                seed=derive_generator(config.init_seed, "encoder-init"),
            )
        else:
            if ec_to_dg is None:
                raise ConfigError("model-b requires a pre-trained ec_to_dg")
            if ec_to_dg.weights.shape != (config.ec_dim, config.dg_dim):
                raise ConfigError(
                    f"ec_to_dg shape {ec_to_dg.weights.shape} != "
                    f"({config.ec_dim}, {config.dg_dim})"
                )
            self.ec_to_dg = ec_to_dg
            self.dg_to_ca3 = init_pathway(
                config.dg_dim,
                config.ca3_dim,
                offsets=config.dg_activity,
                seed=derive_generator(config.init_seed, "encoder-init"),
            )

    @property
    def encoder_pathway(self) -> Pathway:
        """The plastic pathway one-shot storage writes on the input side."""
        if self.config.variant == Variant.STANDARD:
            raise ConfigError("standard framework has no encoder pathway")
        return self.ec_to_ca3 if self.config.variant == Variant.MODEL_A else self.dg_to_ca3

    # --- pure reads ------------------------------------------------------

    def encode(self, x) -> np.ndarray:
        """Input pattern(s) -> CA3 state(s).  Model-B routes through frozen DG."""
        x = np.asarray(x, dtype=np.float64)
        if self.config.variant == Variant.STANDARD:
            if x.shape[-1] != self.config.ca3_dim:
                raise ConfigError(
                    f"encode: dim {x.shape[-1]} != CA3 dim {self.config.ca3_dim}"
                )
            return x.copy()
        if self.config.variant == Variant.MODEL_A:
            return forward(self.ec_to_ca3, x)
        return forward(self.dg_to_ca3, ae_encode(self.ec_to_dg, x))

    def transition(self, ca3, steps: int = 1) -> np.ndarray:
        """Apply the recurrent pathway `steps` times (0 returns the input)."""
        if steps < 0:
            raise ValueError(f"steps must be >= 0, got {steps}")
        state = np.asarray(ca3, dtype=np.float64)
        for _ in range(steps):
            state = forward(self.ca3_to_ca3, state)
        return state

    def decode(self, ca3) -> np.ndarray:
        """CA3 state(s) -> input-space pattern(s)."""
        ca3 = np.asarray(ca3, dtype=np.float64)
        if self.config.variant == Variant.STANDARD:
            if ca3.shape[-1] != self.config.ca3_dim:
                raise ConfigError(
                    f"decode: dim {ca3.shape[-1]} != CA3 dim {self.config.ca3_dim}"
                )
            return ca3.copy()
        return forward(self.ca3_to_ec, ca3)

    def decode_si(self, ec) -> np.ndarray:
        """EC code(s) -> sensory-interface reconstruction via the codec."""
        if self.si_codec is None:
            raise ConfigError("no SI codec attached to this model")
        return ae_decode(self.si_codec, ec)

    def encode_si(self, si) -> np.ndarray:
        """Sensory input(s) -> binary EC code(s) via the codec."""
        if self.si_codec is None:
            raise ConfigError("no SI codec attached to this model")
        return ae_encode(self.si_codec, si)

    # --- mutations -------------------------------------------------------

    def store_sequence(self, ec_sequence, start_intrinsic_index: int = None) -> SequenceStore:
        """One-shot storage: bind each input pattern to the next intrinsic
        pattern with exactly one update per plastic pathway per pattern.

        The intrinsic index advances by ground-truth cyclic lookup (input to
        CA3 is suppressed during storage).  Consecutive calls keep walking
        the cycle; `start_intrinsic_index` repositions explicitly.
        """
        if self.config.variant == Variant.STANDARD:
            raise ConfigError("standard framework stores via store_standard")
        ec = _require_binary_stack(ec_sequence, self.config.ec_dim, "store_sequence")
        count = ec.shape[0]
        length = self.intrinsic.length
        if self.stored_count + count > length:
            raise ValueError(
                f"cannot store {count} more patterns: {self.stored_count} of "
                f"{length} intrinsic positions already used"
            )
        start = self._next_index if start_intrinsic_index is None else start_intrinsic_index
        indices = (start + np.arange(count)) % length
        targets = self.intrinsic.patterns[indices]
        encoder = self.encoder_pathway
        if self.config.variant == Variant.MODEL_B:
            inputs = ae_encode(self.ec_to_dg, ec)
        else:
            inputs = ec
        eta = self.config.eta
        for t in range(count):
            hetero_update(encoder, inputs[t], targets[t], eta)
            hetero_update(self.ca3_to_ec, targets[t], ec[t], eta)
        self.stored_count += count
        self._next_index = (start + count) % length
        return SequenceStore(intrinsic=self.intrinsic, ec=ec.copy(), indices=indices)

    def store_standard(self, ca3_sequence=None, eta: float = None) -> SequenceStore:
        """Store a CA3 sequence directly into the plastic recurrent pathway,
        one hetero_update per consecutive pair, including the wrap-around
        pair so the cycle stays closed.  Defaults to the model's reference
        sequence.
        """
        if self.config.variant != Variant.STANDARD:
            raise ConfigError("store_standard requires the standard-framework variant")
        if ca3_sequence is None:
            ca3_sequence = self.intrinsic.patterns
        seq = _require_binary_stack(ca3_sequence, self.config.ca3_dim, "store_standard")
        count = seq.shape[0]
        if count < 2:
            raise ValueError("store_standard needs >= 2 patterns to form pairs")
        if eta is None:
            eta = self.config.eta
        successors = np.roll(seq, -1, axis=0)
        for t in range(count):
            hetero_update(self.ca3_to_ca3, seq[t], successors[t], eta)
        self.stored_count += count
        return SequenceStore(
            intrinsic=self.intrinsic, ec=seq.copy(), indices=np.arange(count)
        )

    def dream(
        self,
        loops: int,
        order: str = "sequential",
        eta: float = None,
        seed: int = 0,
        start_index: int = None,
    ) -> None:
        """Input-free encoder re-training: reconstruct each intrinsic pattern
        through the frozen decoder and re-associate the reconstruction with
        that pattern.  The intrinsic index advances by ground-truth cyclic
        lookup; the decoder is never touched.
        """
        if self.config.variant == Variant.STANDARD:
            raise ConfigError("standard framework has no encoder to dream on")
        if loops < 0:
            raise ValueError(f"loops must be >= 0, got {loops}")
        if order not in ("sequential", "random"):
            raise ConfigError(f"order must be 'sequential' or 'random', got {order!r}")
        if loops == 0:
            return
        if eta is None:
            eta = self.config.eta
        length = self.intrinsic.length
        rng = derive_generator(seed, "dream")
        if order == "random":
            visits = rng.integers(0, length, size=loops * length)
        else:
            start = int(rng.integers(0, length)) if start_index is None else start_index
            visits = (start + np.arange(loops * length)) % length
        # Decoder and DG are frozen during dreaming, so the reconstructed EC
        # patterns (and their DG codes) are fixed per index: compute once.
        ec_tilde = self.decode(self.intrinsic.patterns)
        if self.config.variant == Variant.MODEL_B:
            inputs = ae_encode(self.ec_to_dg, ec_tilde)
        else:
            inputs = ec_tilde
        encoder = self.encoder_pathway
        for t in visits:
            hetero_update(encoder, inputs[t], self.intrinsic.patterns[t], eta)

    # --- retrieval -------------------------------------------------------

    def recall(
        self,
        cue,
        transitions: int,
        emit_si: bool = False,
        cue_index: int = None,
    ) -> RecallTrace:
        """Encode a cue, run the recurrent dynamics, decode every state.

        `cue_index` is bookkeeping for later classification (the intrinsic
        index the cue is supposed to map to); pass None for novel cues.
        """
        if transitions < 0:
            raise ValueError(f"transitions must be >= 0, got {transitions}")
        state = self.encode(np.asarray(cue, dtype=np.float64))
        if state.ndim != 1:
            raise ConfigError("recall takes a single cue pattern")
        states = np.empty((transitions + 1, state.shape[0]))
        states[0] = state
        for j in range(1, transitions + 1):
            state = self.transition(state)
            states[j] = state
        ec_states = self.decode(states)
        si_states = None
        if emit_si:
            si_states = self.decode_si(ec_states)
        return RecallTrace(
            cue_index=cue_index,
            transitions=transitions,
            ca3_states=states,
            ec_states=ec_states,
            si_states=si_states,
        )


def classify_relaxation(
    trace: RecallTrace, store: SequenceStore, threshold: float = 0.5
) -> Relaxation:
    """Label how a relaxation ended, judged on the late half of the trace
    (the early steps are the sequence-completion phase and may be off-track).

    Correct: the late CA3 states follow the intrinsic subsequence aligned
    with the cue.  ShiftedPosition: they follow the sequence at some other
    offset.  Spurious: no alignment reaches the threshold.
    """
    states = trace.ca3_states
    if states.shape[0] == 0:
        raise ValueError("empty trace")
    length = store.intrinsic.length
    first_late = states.shape[0] // 2
    late = states[first_late:]
    try:
        normed_states = _center_rows(late, "trace states")
    except UndefinedCorrelationError:
        return Relaxation.SPURIOUS  # flat states match nothing
    normed_intrinsic = _center_rows(store.intrinsic.patterns, "intrinsic patterns")
    corr = normed_states @ normed_intrinsic.T  # (n_late, length)
    cue = 0 if trace.cue_index is None else int(trace.cue_index)
    base = cue + first_late + np.arange(late.shape[0])
    shifts = np.arange(length)
    cols = (base[:, None] + shifts[None, :]) % length
    scores = corr[np.arange(late.shape[0])[:, None], cols].mean(axis=0)
    if trace.cue_index is not None and scores[0] >= threshold:
        return Relaxation.CORRECT
    if scores.max() >= threshold:
        return Relaxation.SHIFTED_POSITION
    return Relaxation.SPURIOUS
