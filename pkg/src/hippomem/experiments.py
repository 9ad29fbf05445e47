"""Declarative experiment pipelines: config -> pretrain -> store -> report.

A run is described by an INI-style config whose defaults are the reference
hyperparameters, so an empty file (or a bare preset) reproduces the standard
setup and any deviation is visible in the file.  One master seed fans out to
named sub-seeds (data, pre-training stages, initialization, noise, dreaming)
so individual stochastic stages can be pinned independently.
"""

from __future__ import annotations

import configparser
import hashlib
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .data import (
    Dataset,
    DatasetKind,
    corrupt,
    corrupt_rows,
    export_csv,
    gen_rand,
    gen_rand_corr,
    load_cifar,
    load_mnist,
    make_sequence,
)
from .errors import ConfigError
from .metrics import CurveMode, forgetting_curve, retrieve
from .model import (
    HippocampusModel,
    ModelConfig,
    Relaxation,
    Variant,
    classify_relaxation,
)
from .pretrain import IntrinsicSequence, pretrain_ca3, pretrain_dg, pretrain_si_codec
from .report import RunResults, emit_report, image_grid
from .seeding import child_seed
from .serialize import (
    autoencoder_hash,
    content_hash,
    load_autoencoder,
    load_intrinsic,
    load_pathway,
    pathway_hash,
    save_autoencoder,
    save_intrinsic,
    save_pathway,
)

CACHE_ENV_VAR = "HIPPOMEM_CACHE"
MNIST_IMAGES_ENV_VAR = "HIPPOMEM_MNIST_IMAGES"
MNIST_LABELS_ENV_VAR = "HIPPOMEM_MNIST_LABELS"
CIFAR_BATCHES_ENV_VAR = "HIPPOMEM_CIFAR_BATCHES"

MIN_N = 20
MAX_N = 2000


@dataclass
class ExperimentSpec:
    """Resolved experiment description; defaults are the reference setup."""

    # [experiment]
    name: str = "custom"
    variant: Variant = Variant.MODEL_A
    n: int = 200
    master_seed: int = 0
    store_count: int = None  # defaults to n
    intrinsic_length: int = None  # defaults to store_count
    start_index: int = 0
    # [model]
    ca3_activity: float = 0.2
    dg_activity: float = 0.03
    ec_activity: float = 0.35
    eta: float = None  # defaults to 20/n
    # [pretrain]
    ca3_epochs: int = 100
    ca3_batch_size: int = 10
    ca3_eta: float = 1.0
    ca3_flip_fraction: float = 0.1
    dg_patterns: int = 4000
    dg_epochs: int = 1
    dg_batch_size: int = 10
    dg_eta: float = 100.0
    si_epochs: int = 10
    si_batch_size: int = 100
    si_eta: float = 0.01
    si_momentum: float = 0.9
    # [data]
    data_kind: DatasetKind = DatasetKind.RAND
    data_flip_fraction: float = 0.1
    mnist_images: str = None
    mnist_labels: str = None
    cifar_batches: tuple = ()
    # [recall]
    modes: tuple = ("encoder", "decoder", "encode_decode", "full_recall")
    recall_transitions: tuple = (1, 5)
    noise_levels: tuple = ()
    classify_noise: tuple = ()
    classify_transitions: int = 15
    classify_threshold: float = 0.5
    # [dreaming]
    dream_loops: int = 0
    dream_order: str = "sequential"
    # [standard]
    standard_eta: float = 0.01
    # [output]
    emit_images: bool = None  # auto: yes for image corpora
    export_data: bool = False
    image_count: int = 20

    def resolved(self) -> "ExperimentSpec":
        """Fill derived defaults and validate; returns a new spec."""
        spec = replace(self)
        spec.variant = Variant(spec.variant)
        spec.data_kind = DatasetKind(spec.data_kind)
        if spec.store_count is None:
            spec.store_count = spec.n
        if spec.intrinsic_length is None:
            spec.intrinsic_length = spec.store_count
        if spec.emit_images is None:
            spec.emit_images = spec.data_kind in (DatasetKind.MNIST, DatasetKind.CIFAR)
        if spec.data_kind == DatasetKind.MNIST:
            spec.mnist_images = spec.mnist_images or os.environ.get(MNIST_IMAGES_ENV_VAR)
            spec.mnist_labels = spec.mnist_labels or os.environ.get(MNIST_LABELS_ENV_VAR)
        if spec.data_kind == DatasetKind.CIFAR and not spec.cifar_batches:
            env = os.environ.get(CIFAR_BATCHES_ENV_VAR, "")
            spec.cifar_batches = tuple(p for p in env.split(":") if p)
        spec.validate()
        return spec

    def validate(self) -> None:
        def bad(path, message):
            raise ConfigError(f"{path}: {message}")

        if not MIN_N <= self.n <= MAX_N:
            bad("experiment.n", f"supported range is {MIN_N} to {MAX_N}, got {self.n}")
        if self.master_seed < 0:
            bad("experiment.master_seed", "must be non-negative")
        if self.store_count < 1:
            bad("experiment.store_count", "must be positive")
        if self.intrinsic_length < self.store_count:
            bad(
                "experiment.intrinsic_length",
                f"{self.intrinsic_length} is below store_count {self.store_count}",
            )
        for name in ("ca3_activity", "dg_activity", "ec_activity"):
            if not 0.0 < getattr(self, name) < 1.0:
                bad(f"model.{name}", "must lie in (0, 1)")
        if self.eta is not None and self.eta < 0:
            bad("model.eta", "must be >= 0")
        for name, path in (
            ("ca3_epochs", "pretrain.ca3_epochs"),
            ("ca3_batch_size", "pretrain.ca3_batch_size"),
            ("dg_patterns", "pretrain.dg_patterns"),
            ("dg_epochs", "pretrain.dg_epochs"),
            ("dg_batch_size", "pretrain.dg_batch_size"),
            ("si_epochs", "pretrain.si_epochs"),
            ("si_batch_size", "pretrain.si_batch_size"),
            ("classify_transitions", "recall.classify_transitions"),
            ("image_count", "output.image_count"),
        ):
            if getattr(self, name) < 1:
                bad(path, "must be positive")
        if self.variant == Variant.STANDARD and self.data_kind != DatasetKind.RAND:
            bad(
                "data.kind",
                "the standard framework stores random CA3 sequences; use kind=rand",
            )
        if self.data_kind == DatasetKind.MNIST:
            if not self.mnist_images:
                bad(
                    "data.mnist_images",
                    f"required for kind=mnist (or set ${MNIST_IMAGES_ENV_VAR})",
                )
            for path in (self.mnist_images, self.mnist_labels):
                if path and not Path(path).is_file():
                    bad("data.mnist_images", f"file not found: {path}")
        if self.data_kind == DatasetKind.CIFAR:
            if not self.cifar_batches:
                bad(
                    "data.cifar_batches",
                    f"required for kind=cifar (or set ${CIFAR_BATCHES_ENV_VAR})",
                )
            for path in self.cifar_batches:
                if not Path(path).is_file():
                    bad("data.cifar_batches", f"file not found: {path}")
        for mode in self.modes:
            if mode not in (m.value for m in CurveMode) or mode == "recall":
                bad("recall.modes", f"unknown curve mode {mode!r}")
        for seq_name, path in (
            ("recall_transitions", "recall.transitions"),
            ("noise_levels", "recall.noise_levels"),
            ("classify_noise", "recall.classify_noise"),
        ):
            for v in getattr(self, seq_name):
                if v < 0:
                    bad(path, "entries must be >= 0")
        if self.dream_order not in ("sequential", "random"):
            bad("dreaming.order", f"must be sequential or random, got {self.dream_order!r}")
        if self.dream_loops < 0:
            bad("dreaming.loops", "must be >= 0")
        if self.dream_loops and self.variant == Variant.STANDARD:
            bad("dreaming.loops", "the standard framework has no encoder to dream on")
        if not 0.0 < self.standard_eta:
            bad("standard.eta", "must be positive")

    def sections(self) -> dict:
        """The spec in config-file layout (for dry runs and manifests)."""
        return {
            "experiment": {
                "name": self.name,
                "variant": Variant(self.variant).value,
                "n": self.n,
                "master_seed": self.master_seed,
                "store_count": self.store_count,
                "intrinsic_length": self.intrinsic_length,
                "start_index": self.start_index,
            },
            "model": {
                "ca3_activity": self.ca3_activity,
                "dg_activity": self.dg_activity,
                "ec_activity": self.ec_activity,
                "eta": self.eta if self.eta is not None else "auto",
            },
            "pretrain": {
                "ca3_epochs": self.ca3_epochs,
                "ca3_batch_size": self.ca3_batch_size,
                "ca3_eta": self.ca3_eta,
                "ca3_flip_fraction": self.ca3_flip_fraction,
                "dg_patterns": self.dg_patterns,
                "dg_epochs": self.dg_epochs,
                "dg_batch_size": self.dg_batch_size,
                "dg_eta": self.dg_eta,
                "si_epochs": self.si_epochs,
                "si_batch_size": self.si_batch_size,
                "si_eta": self.si_eta,
                "si_momentum": self.si_momentum,
            },
            "data": {
                "kind": DatasetKind(self.data_kind).value,
                "flip_fraction": self.data_flip_fraction,
                "mnist_images": self.mnist_images or "",
                "mnist_labels": self.mnist_labels or "",
                "cifar_batches": ",".join(self.cifar_batches),
            },
            "recall": {
                "modes": ",".join(self.modes),
                "transitions": ",".join(str(k) for k in self.recall_transitions),
                "noise_levels": ",".join(str(v) for v in self.noise_levels),
                "classify_noise": ",".join(str(v) for v in self.classify_noise),
                "classify_transitions": self.classify_transitions,
                "classify_threshold": self.classify_threshold,
            },
            "dreaming": {"loops": self.dream_loops, "order": self.dream_order},
            "standard": {"eta": self.standard_eta},
            "output": {
                "emit_images": self.emit_images,
                "export_data": self.export_data,
                "image_count": self.image_count,
            },
        }


# section.key -> (field name, parser)
def _parse_str(v):
    return v.strip()


def _parse_int(v):
    return int(v)


def _parse_float(v):
    return float(v)


def _parse_optional_float(v):
    v = v.strip()
    return None if v in ("", "auto") else float(v)


def _parse_optional_int(v):
    v = v.strip()
    return None if v in ("", "auto") else int(v)


def _parse_bool(v):
    v = v.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    if v == "auto":
        return None
    raise ValueError(f"expected a boolean, got {v!r}")


def _parse_str_tuple(v):
    return tuple(s.strip() for s in v.split(",") if s.strip())


def _parse_int_tuple(v):
    return tuple(int(s) for s in _parse_str_tuple(v))


def _parse_float_tuple(v):
    return tuple(float(s) for s in _parse_str_tuple(v))


def _parse_optional_str(v):
    v = v.strip()
    return v or None


_CONFIG_KEYS = {
    ("experiment", "name"): ("name", _parse_str),
    ("experiment", "variant"): ("variant", _parse_str),
    ("experiment", "n"): ("n", _parse_int),
    ("experiment", "master_seed"): ("master_seed", _parse_int),
    ("experiment", "store_count"): ("store_count", _parse_optional_int),
    ("experiment", "intrinsic_length"): ("intrinsic_length", _parse_optional_int),
    ("experiment", "start_index"): ("start_index", _parse_int),
    ("model", "ca3_activity"): ("ca3_activity", _parse_float),
    ("model", "dg_activity"): ("dg_activity", _parse_float),
    ("model", "ec_activity"): ("ec_activity", _parse_float),
    ("model", "eta"): ("eta", _parse_optional_float),
    ("pretrain", "ca3_epochs"): ("ca3_epochs", _parse_int),
    ("pretrain", "ca3_batch_size"): ("ca3_batch_size", _parse_int),
    ("pretrain", "ca3_eta"): ("ca3_eta", _parse_float),
    ("pretrain", "ca3_flip_fraction"): ("ca3_flip_fraction", _parse_float),
    ("pretrain", "dg_patterns"): ("dg_patterns", _parse_int),
    ("pretrain", "dg_epochs"): ("dg_epochs", _parse_int),
    ("pretrain", "dg_batch_size"): ("dg_batch_size", _parse_int),
    ("pretrain", "dg_eta"): ("dg_eta", _parse_float),
    ("pretrain", "si_epochs"): ("si_epochs", _parse_int),
    ("pretrain", "si_batch_size"): ("si_batch_size", _parse_int),
    ("pretrain", "si_eta"): ("si_eta", _parse_float),
    ("pretrain", "si_momentum"): ("si_momentum", _parse_float),
    ("data", "kind"): ("data_kind", _parse_str),
    ("data", "flip_fraction"): ("data_flip_fraction", _parse_float),
    ("data", "mnist_images"): ("mnist_images", _parse_optional_str),
    ("data", "mnist_labels"): ("mnist_labels", _parse_optional_str),
    ("data", "cifar_batches"): ("cifar_batches", _parse_str_tuple),
    ("recall", "modes"): ("modes", _parse_str_tuple),
    ("recall", "transitions"): ("recall_transitions", _parse_int_tuple),
    ("recall", "noise_levels"): ("noise_levels", _parse_float_tuple),
    ("recall", "classify_noise"): ("classify_noise", _parse_float_tuple),
    ("recall", "classify_transitions"): ("classify_transitions", _parse_int),
    ("recall", "classify_threshold"): ("classify_threshold", _parse_float),
    ("dreaming", "loops"): ("dream_loops", _parse_int),
    ("dreaming", "order"): ("dream_order", _parse_str),
    ("standard", "eta"): ("standard_eta", _parse_float),
    ("output", "emit_images"): ("emit_images", _parse_bool),
    ("output", "export_data"): ("export_data", _parse_bool),
    ("output", "image_count"): ("image_count", _parse_int),
}


def load_config(path, base: ExperimentSpec = None) -> ExperimentSpec:
    """Parse an INI-style experiment config on top of `base` (or defaults).

    Unknown sections or keys are config errors (with their field path), so
    typos cannot silently fall back to defaults.
    """
    parser = configparser.ConfigParser(interpolation=None)
    try:
        with open(path, "r", encoding="utf-8") as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from exc
    spec = replace(base) if base is not None else ExperimentSpec()
    for section in parser.sections():
        for key, raw in parser.items(section):
            try:
                field_name, parse = _CONFIG_KEYS[(section, key)]
            except KeyError:
                raise ConfigError(f"{section}.{key}: unknown config key") from None
            try:
                setattr(spec, field_name, parse(raw))
            except ValueError as exc:
                raise ConfigError(f"{section}.{key}: {exc}") from exc
    return spec


# --- presets ------------------------------------------------------------------

PRESETS = {
    "rand-modela-n200": (
        "Model-A, 200 random patterns: one-shot forgetting curves",
        {},
    ),
    "rand-modela-n1000": (
        "Model-A, 1000 random patterns (reference scale)",
        {("experiment", "n"): "1000"},
    ),
    "randcorr-modela-n200": (
        "Model-A on correlated patterns: encoder failure case",
        {("data", "kind"): "rand-corr"},
    ),
    "randcorr-modelb-n200": (
        "Model-B on correlated patterns: DG rescue",
        {("experiment", "variant"): "model-b", ("data", "kind"): "rand-corr"},
    ),
    "dreaming-modela-n200": (
        "Model-A on correlated patterns with 10 dreaming loops",
        {("data", "kind"): "rand-corr", ("dreaming", "loops"): "10"},
    ),
    "standard-n200": (
        "Plastic-CA3 standard framework baseline (eta 0.01)",
        {
            ("experiment", "variant"): "standard",
            ("recall", "modes"): "",
            ("recall", "transitions"): "1, 5, 500",
        },
    ),
    "capacity-modela-n200": (
        "Model-A storing 2N patterns on a 2N cycle: capacity exhaustion",
        {
            ("experiment", "store_count"): "400",
            ("experiment", "intrinsic_length"): "400",
        },
    ),
    "activity10-modelb-n200": (
        "Model-B, CA3 activity raised to 10% (small-net operating point)",
        {("experiment", "variant"): "model-b", ("model", "ca3_activity"): "0.10"},
    ),
    "activity032-modelb-n200": (
        "Model-B, CA3 activity 3.2% at N=200 (fails at this scale)",
        {("experiment", "variant"): "model-b", ("model", "ca3_activity"): "0.032"},
    ),
    "activity032-modelb-n1000": (
        "Model-B, CA3 activity 3.2% at N=1000 (works at this scale)",
        {
            ("experiment", "variant"): "model-b",
            ("experiment", "n"): "1000",
            ("model", "ca3_activity"): "0.032",
        },
    ),
    "noise-modelb-n200": (
        "Model-B, random patterns, noisy cues + relaxation classification",
        {
            ("experiment", "variant"): "model-b",
            ("recall", "noise_levels"): "0.1",
            ("recall", "classify_noise"): "0.5",
        },
    ),
    "mnist-modelb-n200": (
        "Model-B storing 200 MNIST digits through the SI codec",
        {("experiment", "variant"): "model-b", ("data", "kind"): "mnist"},
    ),
    "cifar-modelb-n200": (
        "Model-B storing 200 CIFAR images through the SI codec",
        {("experiment", "variant"): "model-b", ("data", "kind"): "cifar"},
    ),
}


def preset_spec(name: str) -> ExperimentSpec:
    try:
        _, overrides = PRESETS[name]
    except KeyError:
        known = ", ".join(sorted(PRESETS))
        raise ConfigError(f"unknown preset {name!r}; known presets: {known}") from None
    spec = ExperimentSpec(name=name)
    for (section, key), raw in overrides.items():
        field_name, parse = _CONFIG_KEYS[(section, key)]
        setattr(spec, field_name, parse(raw))
    return spec


# --- pre-trained scaffolding cache ---------------------------------------------


def default_cache_dir() -> Path:
    env = os.environ.get(CACHE_ENV_VAR)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "hippomem"


# bumped whenever a pretraining procedure changes, so stale scaffolding
# cached under the old behavior is never reused
FORMAT_TAG = f"hippomem-{__version__}-v2"


def _cache_key(stage: str, params: dict) -> str:
    blob = repr((FORMAT_TAG, stage, sorted(params.items()))).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()[:16]


@dataclass
class Scaffolding:
    """The frozen pre-trained pieces one experiment needs."""

    ca3_to_ca3: object = None
    intrinsic: IntrinsicSequence = None
    ec_to_dg: object = None
    si_codec: object = None


def _cached(cache_dir, stage, params, build, save, load, log):
    """Fetch stage artifacts from the cache or build and store them.

    A corrupt cache entry (bad hash, unreadable container) is rebuilt with a
    warning rather than failing the run.
    """
    key = _cache_key(stage, params)
    if cache_dir is None:
        return build()
    cache_dir = Path(cache_dir)
    cache_dir.mkdir(parents=True, exist_ok=True)
    path = cache_dir / f"{stage}-{key}.npz"
    if path.exists():
        try:
            artifact = load(path)
            log(f"[cache] reusing {stage} scaffolding: {path}")
            return artifact
        except Exception as exc:  # corrupt entries must never poison a run
            log(f"[cache] WARNING: discarding corrupt entry {path} ({exc}); re-training")
    artifact = build()
    save(path, artifact)
    log(f"[cache] stored {stage} scaffolding: {path}")
    return artifact


def build_scaffolding(
    spec: ExperimentSpec, dataset: Dataset = None, cache_dir=None, log=print
) -> Scaffolding:
    """Pre-train (or fetch from cache) everything the spec's model needs."""
    spec = spec.resolved()
    scaffold = Scaffolding()
    config = ModelConfig(
        n=spec.n,
        variant=spec.variant,
        ca3_activity=spec.ca3_activity,
        dg_activity=spec.dg_activity,
        ec_activity=spec.ec_activity,
        eta=spec.eta,
    )
    if spec.variant == Variant.STANDARD:
        return scaffold

    ca3_seed = child_seed(spec.master_seed, "ca3-pretrain")
    ca3_params = {
        "dim": config.ca3_dim,
        "length": spec.intrinsic_length,
        "activity": spec.ca3_activity,
        "epochs": spec.ca3_epochs,
        "batch_size": spec.ca3_batch_size,
        "eta": spec.ca3_eta,
        "flip_fraction": spec.ca3_flip_fraction,
        "seed": ca3_seed,
    }

    def build_ca3():
        log(f"[pretrain] CA3 recurrent pathway: {ca3_params}")
        return pretrain_ca3(**ca3_params)

    def save_ca3(path, artifact):
        pathway, intrinsic = artifact
        save_pathway(path, pathway)
        save_intrinsic(_sibling(path, "intrinsic"), intrinsic)

    def load_ca3(path):
        return load_pathway(path), load_intrinsic(_sibling(path, "intrinsic"))

    scaffold.ca3_to_ca3, scaffold.intrinsic = _cached(
        cache_dir, "ca3", ca3_params, build_ca3, save_ca3, load_ca3, log
    )

    if spec.variant == Variant.MODEL_B:
        dg_seed = child_seed(spec.master_seed, "dg-pretrain")
        dg_params = {
            "ec_dim": config.ec_dim,
            "dg_dim": config.dg_dim,
            "ec_activity": spec.ec_activity,
            "dg_activity": spec.dg_activity,
            "n_patterns": spec.dg_patterns,
            "epochs": spec.dg_epochs,
            "batch_size": spec.dg_batch_size,
            "eta": spec.dg_eta,
            "seed": dg_seed,
        }

        def build_dg():
            log(f"[pretrain] EC->DG separator: {dg_params}")
            return pretrain_dg(**dg_params)

        scaffold.ec_to_dg = _cached(
            cache_dir, "dg", dg_params, build_dg, save_autoencoder, load_autoencoder, log
        )

    if dataset is not None and dataset.kind in (DatasetKind.MNIST, DatasetKind.CIFAR):
        si_seed = child_seed(spec.master_seed, "si-pretrain")
        si_params = {
            "ec_dim": config.ec_dim,
            "ec_activity": spec.ec_activity,
            "epochs": spec.si_epochs,
            "batch_size": spec.si_batch_size,
            "eta": spec.si_eta,
            "momentum": spec.si_momentum,
            "seed": si_seed,
        }
        cache_params = dict(si_params, data_hash=content_hash(dataset.patterns))

        def build_si():
            log(f"[pretrain] SI<->EC codec on {len(dataset)} patterns: {si_params}")
            return pretrain_si_codec(dataset.patterns, **si_params)

        scaffold.si_codec = _cached(
            cache_dir, "si", cache_params, build_si, save_autoencoder, load_autoencoder, log
        )
    return scaffold


def _sibling(path: Path, tag: str) -> Path:
    return path.with_name(path.name.replace(".npz", f".{tag}.npz"))


# --- the pipeline ---------------------------------------------------------------


def load_dataset(spec: ExperimentSpec):
    """The corpus referenced by the spec (None for the standard framework,
    which generates its CA3 sequence in build_model_and_store)."""
    spec = spec.resolved()
    config = ModelConfig(n=spec.n, variant=spec.variant)
    seed = child_seed(spec.master_seed, "data")
    if spec.variant == Variant.STANDARD:
        return None
    if spec.data_kind == DatasetKind.RAND:
        return gen_rand(spec.store_count, config.ec_dim, spec.ec_activity, seed)
    if spec.data_kind == DatasetKind.RAND_CORR:
        return gen_rand_corr(
            spec.store_count, config.ec_dim, spec.ec_activity, spec.data_flip_fraction, seed
        )
    if spec.data_kind == DatasetKind.MNIST:
        return load_mnist(spec.mnist_images, spec.mnist_labels)
    return load_cifar(list(spec.cifar_batches))


def run_experiment(spec: ExperimentSpec, out_dir, cache_dir=None, log=print) -> RunResults:
    """Execute the full pipeline and write the report tree under out_dir."""
    spec = spec.resolved()
    log(f"[run] {spec.name}: variant={spec.variant.value} n={spec.n} seed={spec.master_seed}")
    dataset = load_dataset(spec)
    scaffold = build_scaffolding(spec, dataset=dataset, cache_dir=cache_dir, log=log)

    config = ModelConfig(
        n=spec.n,
        variant=spec.variant,
        ca3_activity=spec.ca3_activity,
        dg_activity=spec.dg_activity,
        ec_activity=spec.ec_activity,
        eta=spec.eta,
        init_seed=child_seed(spec.master_seed, "model-init"),
    )

    si_patterns = None
    if spec.variant == Variant.STANDARD:
        seq = gen_rand(
            spec.store_count,
            config.ca3_dim,
            spec.ca3_activity,
            child_seed(spec.master_seed, "data"),
        )
        intrinsic = IntrinsicSequence(patterns=seq.patterns, activity=spec.ca3_activity)
        model = HippocampusModel(config, intrinsic)
        store = model.store_standard(eta=spec.standard_eta)
    else:
        model = HippocampusModel(
            config,
            scaffold.intrinsic,
            ca3_to_ca3=scaffold.ca3_to_ca3,
            ec_to_dg=scaffold.ec_to_dg,
            si_codec=scaffold.si_codec,
        )
        if dataset.kind in (DatasetKind.MNIST, DatasetKind.CIFAR):
            si_patterns, _ = make_sequence(
                dataset, spec.store_count, child_seed(spec.master_seed, "sequence")
            )
            ec_sequence = model.encode_si(si_patterns)
        else:
            ec_sequence, _ = make_sequence(dataset, spec.store_count)
        store = model.store_sequence(ec_sequence, start_intrinsic_index=spec.start_index)
    log(f"[store] {len(store)} patterns bound to the intrinsic cycle")

    results = RunResults(manifest={})
    curves = results.curves
    recall_ready = spec.store_count == spec.intrinsic_length

    def add_curve(name, mode, transitions=None, cues=None):
        curves[name] = forgetting_curve(model, store, mode, transitions=transitions, cues=cues)
        log(f"[curve] {name}: mean={curves[name].mean():.4f}")

    def standard_curve_set(prefix=""):
        for k in spec.recall_transitions:
            add_curve(f"{prefix}recall_k{k}", CurveMode.RECALL, transitions=k)

    if spec.variant == Variant.STANDARD:
        standard_curve_set()
    else:
        if spec.dream_loops:
            # Dreaming changes the encoder: snapshot encoder-dependent curves first.
            for mode in spec.modes:
                if mode == CurveMode.DECODER.value:
                    continue
                if mode == CurveMode.FULL_RECALL.value and not recall_ready:
                    continue
                add_curve(f"pre_dream_{mode}", mode)
            model.dream(
                spec.dream_loops,
                order=spec.dream_order,
                seed=child_seed(spec.master_seed, "dream"),
                start_index=spec.start_index,
            )
            log(f"[dream] {spec.dream_loops} loops ({spec.dream_order})")
        for mode in spec.modes:
            if recall_ready or mode not in (
                CurveMode.FULL_RECALL.value,
                CurveMode.RECALL.value,
            ):
                add_curve(mode, mode)
        if recall_ready:
            for k in spec.recall_transitions:
                add_curve(f"recall_k{k}", CurveMode.RECALL, transitions=k)
            for i, level in enumerate(spec.noise_levels):
                cues = corrupt_rows(
                    store.ec, level, child_seed(spec.master_seed, "cue-noise", i)
                )
                add_curve(
                    f"full_recall_noise{int(round(level * 100)):02d}",
                    CurveMode.FULL_RECALL,
                    cues=cues,
                )

    classification_summary = {}
    for i, level in enumerate(spec.classify_noise):
        rows = []
        counts = {kind.value: 0 for kind in Relaxation}
        noise_seed = child_seed(spec.master_seed, "classify-noise", i)
        for t in range(len(store)):
            cue = corrupt(store.ec[t], level, child_seed(noise_seed, "cue", t))
            trace = model.recall(
                cue, spec.classify_transitions, cue_index=int(store.indices[t])
            )
            label = classify_relaxation(trace, store, spec.classify_threshold)
            counts[label.value] += 1
            rows.append((t, label.value))
        name = f"relaxation_noise{int(round(level * 100)):02d}"
        results.tables[name] = (["cue_index", "relaxation"], rows)
        classification_summary[name] = counts
        log(f"[classify] {name}: {counts}")

    if spec.emit_images and si_patterns is not None:
        count = min(spec.image_count, len(store))
        shape = dataset.image_shape
        results.images["input"] = image_grid(si_patterns[:count], shape)
        roundtrip = model.decode_si(store.ec[:count])
        results.images["codec_roundtrip"] = image_grid(roundtrip, shape)
        if recall_ready:
            retrieved, _, _ = retrieve(model, store, CurveMode.FULL_RECALL)
            results.images["full_recall"] = image_grid(
                model.decode_si(retrieved[:count]), shape
            )
        log(f"[images] {len(results.images)} grids of {count} patterns")

    scaffold_hashes = {}
    if scaffold.ca3_to_ca3 is not None:
        scaffold_hashes["ca3_to_ca3"] = pathway_hash(scaffold.ca3_to_ca3)
        scaffold_hashes["intrinsic"] = content_hash(scaffold.intrinsic.patterns)
    if scaffold.ec_to_dg is not None:
        scaffold_hashes["ec_to_dg"] = autoencoder_hash(scaffold.ec_to_dg)
    if scaffold.si_codec is not None:
        scaffold_hashes["si_codec"] = autoencoder_hash(scaffold.si_codec)

    results.manifest = {
        "name": spec.name,
        "config": spec.sections(),
        "seeds": {
            name: child_seed(spec.master_seed, name)
            for name in ("data", "sequence", "model-init", "ca3-pretrain", "dg-pretrain",
                         "si-pretrain", "dream")
        },
        "scaffold_hashes": scaffold_hashes,
        "stored_count": model.stored_count,
        "curves": {name: curve.summary() for name, curve in curves.items()},
        "classification": classification_summary,
        "versions": {"hippomem": __version__, "numpy": np.__version__},
        "created_at": datetime.now(timezone.utc).isoformat(),
    }

    if spec.export_data:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        export_csv(store.ec, out / "stored_patterns.csv")

    emit_report(results, out_dir)
    log(f"[report] written to {out_dir}")
    return results


def _run_repeat(args):
    spec, out_dir, cache_dir = args
    run_experiment(spec, out_dir, cache_dir=cache_dir)
    return str(out_dir)


def run_repeats(spec: ExperimentSpec, out_root, repeats: int, cache_dir=None, log=print):
    """Run `repeats` independent seeds of one spec in a process pool, each in
    its own subdirectory."""
    if repeats < 1:
        raise ConfigError(f"repeats must be >= 1, got {repeats}")
    spec = spec.resolved()
    if repeats == 1:
        run_experiment(spec, Path(out_root), cache_dir=cache_dir, log=log)
        return [str(out_root)]
    jobs = []
    for r in range(repeats):
        seed = child_seed(spec.master_seed, "repeat", r)
        sub = replace(spec, master_seed=seed, name=f"{spec.name}-r{r}")
        jobs.append((sub, Path(out_root) / f"seed-{seed}", cache_dir))
    workers = min(repeats, os.cpu_count() or 1)
    log(f"[repeats] {repeats} runs on {workers} workers")
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_repeat, jobs))
