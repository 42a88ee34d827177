"""Weight-file serialization.

A weight document is JSON:

    {
      "schema_version": 1,
      "architecture": "simple" | "lstm" | "naive",
      "k": int, "m": int,
      "encoding_kind": "onehot" | "binary" | null,
      "numeric_config": {"beta": f, "lambda": f, "zeta": f},
      "matrices": {name: {"shape": [...], "data": [row-major floats]}}
    }

Floats survive the JSON round trip bit-for-bit (shortest-repr encoding).
Files are written atomically (temp file, then rename).
"""

from __future__ import annotations

import json
import os
import tempfile

import numpy as np

from .automaton import DyckParams
from .builders import (LstmParams, NaiveDfaParams, SimpleRnnParams,
                       build_encoding, enumerate_states)
from .encodings import ARCH_LSTM, ARCH_NAIVE, ARCH_SIMPLE
from .numerics import NumericConfig

SCHEMA_VERSION = 1

_SIMPLE_MATS = ("W", "U", "b", "E", "V", "b_v")
_LSTM_MATS = ("W_f", "U_f", "b_f", "W_i", "U_i", "b_i", "W_o", "U_o", "b_o",
              "W_c", "U_c", "b_c", "E", "V", "b_v")
_NAIVE_MATS = ("W", "U", "b", "E", "V", "b_v")


def _mat_names(architecture: str) -> tuple[str, ...]:
    return {ARCH_SIMPLE: _SIMPLE_MATS, ARCH_LSTM: _LSTM_MATS,
            ARCH_NAIVE: _NAIVE_MATS}[architecture]


def to_document(paramset) -> dict:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "architecture": paramset.architecture,
        "k": paramset.k,
        "m": paramset.m,
        "encoding_kind": None if paramset.encoding is None else paramset.encoding.kind,
        "numeric_config": paramset.numeric.to_dict(),
        "matrices": {},
    }
    for name in _mat_names(paramset.architecture):
        arr = getattr(paramset, name)
        doc["matrices"][name] = {"shape": list(arr.shape),
                                 "data": arr.ravel().tolist()}
    return doc


def from_document(doc: dict):
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise ValueError(f"unsupported weight schema {doc.get('schema_version')!r}")
    arch = doc["architecture"]
    k, m = int(doc["k"]), int(doc["m"])
    numeric = NumericConfig.from_dict(doc["numeric_config"])
    mats = {}
    for name in _mat_names(arch):
        entry = doc["matrices"][name]
        mats[name] = np.array(entry["data"], dtype=float).reshape(entry["shape"])
    params = DyckParams(k, m)
    if arch == ARCH_SIMPLE:
        enc = build_encoding(params, doc["encoding_kind"], ARCH_SIMPLE)
        return SimpleRnnParams(k=k, m=m, encoding=enc, numeric=numeric, **mats)
    if arch == ARCH_LSTM:
        enc = build_encoding(params, doc["encoding_kind"], ARCH_LSTM)
        return LstmParams(k=k, m=m, encoding=enc, numeric=numeric, **mats)
    if arch == ARCH_NAIVE:
        return NaiveDfaParams(k=k, m=m, numeric=numeric, scale=2.0 * numeric.beta,
                              states=enumerate_states(params), **mats)
    raise ValueError(f"unknown architecture {arch!r}")


def atomic_write_text(path: str, text: str):
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", text=True)
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def save_weights(path: str, paramset):
    atomic_write_text(path, json.dumps(to_document(paramset)) + "\n")


def load_weights(path: str):
    with open(path) as handle:
        return from_document(json.load(handle))
