"""Persistence for trained pathways and model snapshots.

Container: numpy .npz with a JSON metadata entry carrying a format version,
the object kind, activation names, and a sha256 content hash of all arrays.
The hash lets the cache detect corruption and lets tests assert that frozen
pathways never drift.
"""

from __future__ import annotations

import hashlib
import json

import numpy as np

from .core import Activation, AutoEncoderPathway, Pathway
from .errors import DataError
from .pretrain import IntrinsicSequence

FORMAT_VERSION = 1

_META_KEY = "__meta__"


def content_hash(*arrays) -> str:
    """sha256 over dtype, shape, and C-order bytes of each array, in order."""
    digest = hashlib.sha256()
    for arr in arrays:
        arr = np.ascontiguousarray(arr)
        digest.update(str(arr.dtype).encode("ascii"))
        digest.update(str(arr.shape).encode("ascii"))
        digest.update(arr.tobytes())
    return digest.hexdigest()


def pathway_hash(p: Pathway) -> str:
    return content_hash(p.weights, p.bias, p.offsets)


def autoencoder_hash(ae: AutoEncoderPathway) -> str:
    return content_hash(
        ae.weights,
        ae.encode_bias,
        ae.decode_bias,
        ae.visible_offsets,
        ae.hidden_offsets,
        ae.target_hidden_activity,
    )


def _write_npz(path, meta: dict, arrays: dict) -> None:
    meta = dict(meta, format_version=FORMAT_VERSION)
    payload = {_META_KEY: np.frombuffer(json.dumps(meta, sort_keys=True).encode("utf-8"), dtype=np.uint8)}
    payload.update(arrays)
    with open(path, "wb") as fh:
        np.savez(fh, **payload)


def _read_npz(path, expected_kind: str):
    try:
        with np.load(path) as npz:
            if _META_KEY not in npz:
                raise DataError(f"{path}: missing metadata entry")
            meta = json.loads(npz[_META_KEY].tobytes().decode("utf-8"))
            arrays = {k: npz[k] for k in npz.files if k != _META_KEY}
    except (OSError, ValueError) as exc:
        raise DataError(f"{path}: unreadable container ({exc})") from exc
    version = meta.get("format_version")
    if version != FORMAT_VERSION:
        raise DataError(f"{path}: unsupported format version {version!r}")
    kind = meta.get("kind")
    if kind != expected_kind:
        raise DataError(f"{path}: expected kind {expected_kind!r}, found {kind!r}")
    return meta, arrays


def save_pathway(path, p: Pathway) -> None:
    _write_npz(
        path,
        {"kind": "pathway", "activation": p.activation.value, "content_hash": pathway_hash(p)},
        {"weights": p.weights, "bias": p.bias, "offsets": p.offsets},
    )


def load_pathway(path) -> Pathway:
    meta, arrays = _read_npz(path, "pathway")
    p = Pathway(
        weights=arrays["weights"],
        bias=arrays["bias"],
        offsets=arrays["offsets"],
        activation=Activation(meta["activation"]),
    )
    if pathway_hash(p) != meta.get("content_hash"):
        raise DataError(f"{path}: content hash mismatch (corrupt or tampered file)")
    return p


def save_autoencoder(path, ae: AutoEncoderPathway) -> None:
    _write_npz(
        path,
        {
            "kind": "autoencoder",
            "encode_activation": ae.encode_activation.value,
            "decode_activation": ae.decode_activation.value,
            "content_hash": autoencoder_hash(ae),
        },
        {
            "weights": ae.weights,
            "encode_bias": ae.encode_bias,
            "decode_bias": ae.decode_bias,
            "visible_offsets": ae.visible_offsets,
            "hidden_offsets": ae.hidden_offsets,
            "target_hidden_activity": ae.target_hidden_activity,
        },
    )


def load_autoencoder(path) -> AutoEncoderPathway:
    meta, arrays = _read_npz(path, "autoencoder")
    ae = AutoEncoderPathway(
        weights=arrays["weights"],
        encode_bias=arrays["encode_bias"],
        decode_bias=arrays["decode_bias"],
        visible_offsets=arrays["visible_offsets"],
        hidden_offsets=arrays["hidden_offsets"],
        target_hidden_activity=arrays["target_hidden_activity"],
        encode_activation=Activation(meta["encode_activation"]),
        decode_activation=Activation(meta["decode_activation"]),
    )
    if autoencoder_hash(ae) != meta.get("content_hash"):
        raise DataError(f"{path}: content hash mismatch (corrupt or tampered file)")
    return ae


_PATHWAY_FIELDS = ("weights", "bias", "offsets")
_AE_FIELDS = (
    "weights",
    "encode_bias",
    "decode_bias",
    "visible_offsets",
    "hidden_offsets",
    "target_hidden_activity",
)


def save_model(path, model) -> None:
    """Snapshot a HippocampusModel: config, counters, intrinsic sequence, and
    every present pathway, so store-then-recall can cross process boundaries.
    """
    cfg = model.config
    meta = {
        "kind": "model",
        "config": {
            "n": cfg.n,
            "variant": cfg.variant.value,
            "ca3_activity": cfg.ca3_activity,
            "dg_activity": cfg.dg_activity,
            "ec_activity": cfg.ec_activity,
            "eta": cfg.eta,
            "init_seed": cfg.init_seed,
        },
        "stored_count": model.stored_count,
        "next_index": model._next_index,
        "intrinsic_activity": model.intrinsic.activity,
        "activations": {},
    }
    arrays = {"intrinsic.patterns": model.intrinsic.patterns}
    for name in ("ca3_to_ca3", "ec_to_ca3", "dg_to_ca3", "ca3_to_ec"):
        p = getattr(model, name)
        if p is None:
            continue
        meta["activations"][name] = p.activation.value
        for field in _PATHWAY_FIELDS:
            arrays[f"{name}.{field}"] = getattr(p, field)
    for name in ("ec_to_dg", "si_codec"):
        ae = getattr(model, name)
        if ae is None:
            continue
        meta["activations"][name] = [ae.encode_activation.value, ae.decode_activation.value]
        for field in _AE_FIELDS:
            arrays[f"{name}.{field}"] = getattr(ae, field)
    meta["content_hash"] = content_hash(*(arrays[k] for k in sorted(arrays)))
    _write_npz(path, meta, arrays)


def load_model(path):
    """Rebuild a HippocampusModel from a snapshot written by save_model."""
    from .model import HippocampusModel, ModelConfig, Variant

    meta, arrays = _read_npz(path, "model")
    if content_hash(*(arrays[k] for k in sorted(arrays))) != meta.get("content_hash"):
        raise DataError(f"{path}: content hash mismatch (corrupt or tampered file)")
    config = ModelConfig(**meta["config"])
    intrinsic = IntrinsicSequence(
        patterns=arrays["intrinsic.patterns"], activity=float(meta["intrinsic_activity"])
    )

    def pathway(name):
        if f"{name}.weights" not in arrays:
            return None
        return Pathway(
            weights=arrays[f"{name}.weights"],
            bias=arrays[f"{name}.bias"],
            offsets=arrays[f"{name}.offsets"],
            activation=Activation(meta["activations"][name]),
        )

    def autoencoder(name):
        if f"{name}.weights" not in arrays:
            return None
        enc, dec = meta["activations"][name]
        return AutoEncoderPathway(
            **{field: arrays[f"{name}.{field}"] for field in _AE_FIELDS},
            encode_activation=Activation(enc),
            decode_activation=Activation(dec),
        )

    variant = Variant(config.variant)
    model = HippocampusModel(
        config,
        intrinsic,
        ca3_to_ca3=None if variant == Variant.STANDARD else pathway("ca3_to_ca3"),
        ec_to_dg=autoencoder("ec_to_dg"),
        si_codec=autoencoder("si_codec"),
    )
    if variant == Variant.STANDARD:
        model.ca3_to_ca3 = pathway("ca3_to_ca3")
    else:
        model.ca3_to_ec = pathway("ca3_to_ec")
        if variant == Variant.MODEL_A:
            model.ec_to_ca3 = pathway("ec_to_ca3")
        else:
            model.dg_to_ca3 = pathway("dg_to_ca3")
    model.stored_count = int(meta["stored_count"])
    model._next_index = int(meta["next_index"])
    return model


def save_intrinsic(path, seq: IntrinsicSequence) -> None:
    _write_npz(
        path,
        {
            "kind": "intrinsic",
            "activity": seq.activity,
            "content_hash": content_hash(seq.patterns),
        },
        {"patterns": seq.patterns},
    )


def load_intrinsic(path) -> IntrinsicSequence:
    meta, arrays = _read_npz(path, "intrinsic")
    if content_hash(arrays["patterns"]) != meta.get("content_hash"):
        raise DataError(f"{path}: content hash mismatch (corrupt or tampered file)")
    return IntrinsicSequence(patterns=arrays["patterns"], activity=float(meta["activity"]))
