"""Self-describing text containers for matrices and coefficient vectors.

A dump is a single JSON document: a header object carrying every input that
produced the data (Bloch phase, radius, material constants, truncation
degree, dimer separation, basis ordering version, tool version) followed by
the entries as ``[re, im]`` pairs in row-major order.  Loaders reject files
whose basis ordering version does not match the one compiled in.  A flat
CSV export (row, col, re, im) is available for external tooling.
"""

from __future__ import annotations

import json

import numpy as np

from .assembly import BASIS_VERSION, AssembledMatrix, BasisMap
from .kelvin import LameParams
from .latsum import DimerGeometry
from . import __version__

__all__ = [
    "save_matrix",
    "load_matrix",
    "save_vector",
    "load_vector",
    "matrix_to_csv",
]


class FormatError(ValueError):
    pass


def _header(m: AssembledMatrix) -> dict:
    return {
        "kind": "matrix",
        "alpha": m.alpha,
        "rho": m.rho,
        "lambda": m.params.lam,
        "mu": m.params.mu,
        "sign_flip": m.params.sign_flip,
        "lmax": m.l_max,
        "d": m.dimer.d if m.dimer is not None else None,
        "basis_version": BASIS_VERSION,
        "tool_version": __version__,
        "shape": list(m.matrix.shape),
    }


def _pairs(arr: np.ndarray):
    flat = np.asarray(arr, dtype=complex).ravel()
    return [[float(v.real), float(v.imag)] for v in flat]


def save_matrix(path, m: AssembledMatrix) -> None:
    doc = {"header": _header(m), "entries": _pairs(m.matrix)}
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1, sort_keys=True)
        fh.write("\n")


def load_matrix(path) -> AssembledMatrix:
    with open(path) as fh:
        doc = json.load(fh)
    hdr = doc["header"]
    if hdr.get("basis_version") != BASIS_VERSION:
        raise FormatError(
            f"basis ordering version {hdr.get('basis_version')!r} does not "
            f"match {BASIS_VERSION!r}"
        )
    shape = tuple(hdr["shape"])
    flat = np.array([complex(re, im) for re, im in doc["entries"]])
    params = LameParams(hdr["lambda"], hdr["mu"], hdr.get("sign_flip", False))
    geom = None
    if hdr.get("d") is not None:
        geom = DimerGeometry(hdr["d"], hdr["rho"])
    return AssembledMatrix(
        matrix=flat.reshape(shape),
        basis=BasisMap(hdr["lmax"]),
        alpha=hdr["alpha"],
        rho=hdr["rho"],
        params=params,
        l_max=hdr["lmax"],
        dimer=geom,
        meta={"tool_version": hdr.get("tool_version")},
    )


def save_vector(path, vec, header_extra: dict | None = None) -> None:
    vec = np.asarray(vec, dtype=complex)
    doc = {
        "header": {
            "kind": "vector",
            "basis_version": BASIS_VERSION,
            "tool_version": __version__,
            "length": int(vec.shape[0]),
            **(header_extra or {}),
        },
        "entries": _pairs(vec),
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1, sort_keys=True)
        fh.write("\n")


def load_vector(path):
    with open(path) as fh:
        doc = json.load(fh)
    hdr = doc["header"]
    if hdr.get("basis_version") != BASIS_VERSION:
        raise FormatError(
            f"basis ordering version {hdr.get('basis_version')!r} does not "
            f"match {BASIS_VERSION!r}"
        )
    vec = np.array([complex(re, im) for re, im in doc["entries"]])
    return vec, hdr


def matrix_to_csv(path, m: AssembledMatrix) -> None:
    with open(path, "w") as fh:
        fh.write("row,col,re,im\n")
        rows, cols = m.matrix.shape
        for i in range(rows):
            for j in range(cols):
                v = complex(m.matrix[i, j])
                fh.write(f"{i},{j},{v.real!r},{v.imag!r}\n")
