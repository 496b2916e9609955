"""Built-in example systems used as regression fixtures.

Each fixture stores matrices exactly as published, rounding included,
so a written fixture file carries those decimal strings unchanged.
"""

import numpy as np

from .statespace import StateSpace, manifest_output

__all__ = ["FIXTURES", "fixture_names", "load_fixture", "fixture_document", "ALTERNATE_CERTIFICATE"]


_A0 = [[-1.0, 0.0, 4.0], [0.0, -2.0, 5.0], [-6.0, 0.0, -3.0]]
_B0 = [[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]]

FIXTURES = {
    "two-channel": {
        "description": "two manifest states, one latent state, noise entering each manifest state",
        "a": _A0,
        "b": _B0,
        "labels": ["y1", "y2"],
        # basis of the positive-real realization used by the worked example
        "phi_basis": [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [1.49506, 0.49601, 2.07092]],
    },
    "two-channel-alternate": {
        "description": "second network with the spectral density of two-channel (entries rounded to two figures)",
        "a": [[-3.3, -2.9, 4.0], [-2.9, -5.7, 5.0], [-8.3, -3.7, 3.0]],
        "b": _B0,
        "labels": ["y1", "y2"],
    },
    "two-channel-fullnoise": {
        "description": "two-channel dynamics with every state driven by its own noise",
        "a": _A0,
        "b": [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
        "labels": ["y1", "y2"],
    },
}

# (S, T) relating two-channel to two-channel-alternate, two significant figures
ALTERNATE_CERTIFICATE = {
    "s": [[0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, -0.15]],
    "t": [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [-0.59, -0.73, 1.0]],
}


def fixture_names():
    return sorted(FIXTURES)


def _p_from(entry):
    return len(entry["labels"])


def load_fixture(name):
    """``(StateSpace, entry)`` for a built-in fixture.

    Raises
    ------
    KeyError
        If ``name`` is not a fixture.
    """
    entry = FIXTURES[name]
    a = np.array(entry["a"], dtype=float)
    b = np.array(entry["b"], dtype=float)
    p = _p_from(entry)
    sys = StateSpace(a, b, manifest_output(p, a.shape[0] - p), np.zeros((p, b.shape[1])))
    return sys, entry


def fixture_document(name):
    """System-file document for a fixture (see :mod:`netfactor.io`)."""
    from .io import system_document

    sys, entry = load_fixture(name)
    extra = {"description": entry["description"]}
    if "phi_basis" in entry:
        extra["phi_basis"] = entry["phi_basis"]
    return system_document(sys, labels=entry["labels"], extra=extra)
