"""Shared test helpers: an independent membership oracle and weight sabotage."""

from __future__ import annotations

import dataclasses

import numpy as np
import pytest

def reference_member(k: int, m: int, tokens) -> bool:
    """Membership decided without the automaton: prefix depth counting plus
    repeated cancellation of adjacent matching bracket pairs."""
    if not tokens or tokens[-1].kind != "end":
        return False
    body = list(tokens[:-1])
    if any(t.kind == "end" for t in body):
        return False
    depth = 0
    for t in body:
        if t.index > k:
            return False
        depth += 1 if t.kind == "open" else -1
        if depth < 0 or depth > m:
            return False
    if depth != 0:
        return False
    seq = [(t.kind, t.index) for t in body]
    reduced = True
    while reduced:
        reduced = False
        for i in range(len(seq) - 1):
            if seq[i][0] == "open" and seq[i + 1] == ("close", seq[i][1]):
                del seq[i:i + 2]
                reduced = True
                break
    return not seq


def clone_with(paramset, **overrides):
    """Copy a parameter set, replacing named arrays (others are deep-copied)."""
    fields = {}
    for f in dataclasses.fields(paramset):
        value = overrides.get(f.name, getattr(paramset, f.name))
        if isinstance(value, np.ndarray) and f.name not in overrides:
            value = value.copy()
        fields[f.name] = value
    return type(paramset)(**fields)


def zero_close_rows(paramset):
    """Sabotage: erase the readout rows of every close bracket."""
    V = paramset.V.copy()
    V[paramset.k:2 * paramset.k, :] = 0.0
    return clone_with(paramset, V=V)


def flip_push_entry(simple_params):
    """Sabotage: flip one entry of the push-shift block of the recurrent matrix."""
    W = simple_params.W.copy()
    w = simple_params.encoding.width
    if simple_params.m > 1:
        # the slot1 -> slot2 copy inside the push half
        W[w, 0] = 0.0
    else:
        # no shift band exists at m = 1; corrupt where slot 1 lands instead
        W[0, 0] = 2.0 * simple_params.numeric.beta
    return clone_with(simple_params, W=W)


@pytest.fixture
def tiny_params():
    from dyckrnn.automaton import DyckParams
    return DyckParams(2, 2)
