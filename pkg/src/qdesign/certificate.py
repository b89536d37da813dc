"""Verification certificates and JSON helpers.

A certificate's ``pass`` flag is derived, never set: it is true exactly when
every named deviation is at most ``tol``.
"""
from __future__ import annotations

import json
import math
from importlib import resources

import numpy as np

from . import __version__

SUBJECTS = ("field", "plane", "mols", "mub", "net", "sic", "dual", "toy")


def encode_complex(a) -> list:
    """Nested lists with each complex entry as ``[re, im]``."""
    a = np.asarray(a, dtype=complex)
    if a.ndim == 0:
        return [float(a.real), float(a.imag)]
    return [encode_complex(x) for x in a]


def decode_complex(data) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.shape[-1] != 2:
        raise ValueError("complex entries must be [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def _clean(value):
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        return float(value)
    if isinstance(value, np.ndarray):
        return _clean(value.tolist())
    return value


def certificate(subject: str, parameters: dict, deviations: dict, tol: float,
                seed: int | None = None, report: dict | None = None,
                artifact: dict | None = None) -> dict:
    if subject not in SUBJECTS:
        raise ValueError(f"unknown subject {subject!r}")
    deviations = {k: float(v) for k, v in deviations.items()}
    cert = {
        "subject": subject,
        "tool": "qdesign",
        "version": __version__,
        "parameters": _clean(parameters),
        "tol": float(tol),
        "deviations": deviations,
        "pass": all(math.isfinite(v) and v <= tol for v in deviations.values()),
        "seed": seed,
    }
    if report is not None:
        cert["report"] = _clean(report)
    if artifact is not None:
        cert["artifact"] = _clean(artifact)
    return cert


def dumps(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=True, ensure_ascii=False) + "\n"


def load_schema(name: str) -> dict:
    text = resources.files("qdesign").joinpath("schemas", f"{name}.schema.json").read_text()
    return json.loads(text)


def unwrap(data: dict) -> dict:
    """Return the embedded artifact if ``data`` is a certificate."""
    if isinstance(data, dict) and "artifact" in data and "subject" in data:
        return data["artifact"]
    return data
