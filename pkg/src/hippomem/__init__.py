"""hippomem: a rate-based sequence-memory model of the hippocampal loop.

One-shot storage binds input patterns to a pre-trained intrinsic CA3 cycle by
Hebbian-descent updates on the encoder and decoder pathways; recall cues the
cycle and replays it.  A dentate-gyrus stage separates correlated inputs, and
a dreaming pass fine-tunes the encoder on the model's own reconstructions.
"""

__version__ = "0.1.0"

from .core import (
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
from .data import (
    Dataset,
    DatasetKind,
    balanced_flip_rows,
    corrupt,
    corrupt_rows,
    gen_rand,
    gen_rand_corr,
    load_cifar,
    load_mnist,
    make_sequence,
)
from .errors import ConfigError, DataError, HippomemError, UndefinedCorrelationError
from .experiments import (
    PRESETS,
    ExperimentSpec,
    build_scaffolding,
    load_config,
    preset_spec,
    run_experiment,
    run_repeats,
)
from .metrics import (
    CurveMode,
    ForgettingCurve,
    baseline_correlation,
    forgetting_curve,
    max_correlation_profile,
    mean_pattern,
    pearson,
    pearson_rows,
    retrieve,
)
from .model import (
    HippocampusModel,
    ModelConfig,
    RecallTrace,
    Relaxation,
    SequenceStore,
    Variant,
    classify_relaxation,
)
from .plasticity import (
    AutoMinibatchTrainer,
    HeteroMinibatchTrainer,
    auto_update,
    hetero_update,
    online_learning_rate,
)
from .pretrain import IntrinsicSequence, pretrain_ca3, pretrain_dg, pretrain_si_codec
from .seeding import as_generator, child_seed, derive_generator, derive_seed
from .serialize import (
    load_autoencoder,
    load_intrinsic,
    load_model,
    load_pathway,
    save_autoencoder,
    save_intrinsic,
    save_model,
    save_pathway,
)

__all__ = [
    "__version__",
    "Activation",
    "AutoEncoderPathway",
    "AutoMinibatchTrainer",
    "ConfigError",
    "CurveMode",
    "DataError",
    "Dataset",
    "DatasetKind",
    "ExperimentSpec",
    "ForgettingCurve",
    "HeteroMinibatchTrainer",
    "HippocampusModel",
    "HippomemError",
    "IntrinsicSequence",
    "ModelConfig",
    "PRESETS",
    "Pathway",
    "RecallTrace",
    "Relaxation",
    "SequenceStore",
    "UndefinedCorrelationError",
    "Variant",
    "ae_decode",
    "ae_encode",
    "as_generator",
    "auto_update",
    "balanced_flip_rows",
    "baseline_correlation",
    "build_scaffolding",
    "child_seed",
    "classify_relaxation",
    "corrupt",
    "corrupt_rows",
    "derive_generator",
    "derive_seed",
    "forgetting_curve",
    "forward",
    "gen_rand",
    "gen_rand_corr",
    "hetero_update",
    "init_autoencoder",
    "init_pathway",
    "load_autoencoder",
    "load_cifar",
    "load_config",
    "load_intrinsic",
    "load_mnist",
    "load_model",
    "load_pathway",
    "make_sequence",
    "max_correlation_profile",
    "mean_pattern",
    "online_learning_rate",
    "pearson",
    "pearson_rows",
    "preset_spec",
    "pretrain_ca3",
    "pretrain_dg",
    "pretrain_si_codec",
    "retrieve",
    "run_experiment",
    "run_repeats",
    "save_autoencoder",
    "save_intrinsic",
    "save_model",
    "save_pathway",
    "sigmoid",
    "step",
]
