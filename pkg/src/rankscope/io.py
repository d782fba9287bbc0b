"""Matrix CSV files, instance JSON files and report serialization.

Matrix files are plain CSV: one matrix row per line, comma separated, no
header. Vectors may be stored as a single row or a single column.

An instance file is a JSON object::

    {"m": 10, "n": 8, "r": 2,
     "sensing": {"type": "khatri-rao", "B": "B.csv", "C": "C.csv", "b": "b.csv"},
     "A": "A.csv",
     "Y": {"U": "U.csv", "sigma": "sigma.csv", "V": "V.csv"}}

``type`` is one of ``identity``, ``dense`` (needs ``M``, an ``ell x mn``
matrix in row-major vectorization), ``khatri-rao`` (``B``, ``C``) or
``coords`` (``pairs``, a list of 0-based ``[i, j]``). Matrix-valued fields
are paths relative to the JSON file; vector fields (``A``, ``b``, ``sigma``)
may also be given inline as lists.
"""
import json
import os

import numpy as np

from .exceptions import BadInput
from .matman import RankRPoint
from .sensing import CoordinateSensing, DenseSensing, IdentitySensing, KhatriRaoSensing

SENSING_TYPES = ("identity", "dense", "khatri-rao", "coords")


def read_matrix(path):
    A = np.loadtxt(path, delimiter=",", ndmin=2, dtype=float)
    return A


def write_matrix(path, A):
    A = np.atleast_2d(np.asarray(A, dtype=float))
    np.savetxt(path, A, delimiter=",", fmt="%.17g")


def read_vector(path):
    return read_matrix(path).ravel()


def write_vector(path, x):
    np.savetxt(path, np.asarray(x, dtype=float).reshape(-1, 1), delimiter=",", fmt="%.17g")


def _resolve(base, value, vector=False):
    if isinstance(value, (list, tuple)):
        return np.asarray(value, dtype=float)
    if not isinstance(value, str):
        raise BadInput(f"expected a path or a list, got {value!r}")
    path = value if os.path.isabs(value) else os.path.join(base, value)
    return read_vector(path) if vector else read_matrix(path)


def sensing_from_spec(spec, m, n, base="."):
    kind = spec.get("type")
    b = spec.get("b")
    b = None if b is None else _resolve(base, b, vector=True)
    if kind == "identity":
        return IdentitySensing(m, n, b)
    if kind == "dense":
        return DenseSensing(_resolve(base, spec["M"]), m, n, b)
    if kind == "khatri-rao":
        return KhatriRaoSensing(_resolve(base, spec["B"]), _resolve(base, spec["C"]), b)
    if kind == "coords":
        return CoordinateSensing(spec["pairs"], m, n, b)
    raise BadInput(f"unknown sensing type {kind!r}; expected one of {', '.join(SENSING_TYPES)}")


def load_instance(path, sensing=None):
    """Read an instance file.

    ``sensing`` fills in the operator type when the file does not name one,
    and must agree with it when it does.

    Returns
    -------
    A : ndarray of shape (ell,)
    Y : RankRPoint
    L : SensingOperator
    """
    base = os.path.dirname(os.path.abspath(path))
    with open(path) as fh:
        doc = json.load(fh)
    try:
        m, n, r = int(doc["m"]), int(doc["n"]), int(doc["r"])
        spec = dict(doc.get("sensing") or {})
        if sensing is not None:
            if spec.get("type") not in (None, sensing):
                raise BadInput(f"instance declares sensing type {spec['type']!r}, not {sensing!r}")
            spec["type"] = sensing
        L = sensing_from_spec(spec, m, n, base)
        A = _resolve(base, doc["A"], vector=True)
        y = doc["Y"]
        Y = RankRPoint.from_factors(
            _resolve(base, y["U"]), _resolve(base, y["sigma"], vector=True), _resolve(base, y["V"])
        )
    except KeyError as exc:
        raise BadInput(f"{path}: missing field {exc}") from None
    if Y.shape != (m, n) or Y.r != r:
        raise BadInput(f"{path}: Y is {Y.m}x{Y.n} of rank {Y.r}, header says {m}x{n} rank {r}")
    return A, Y, L


def save_instance(path, A, Y, L):
    """Write an instance file and its CSV companions into the directory of ``path``."""
    base = os.path.dirname(os.path.abspath(path))
    stem = os.path.splitext(os.path.basename(path))[0]
    os.makedirs(base, exist_ok=True)

    def companion(name, data, vector=False):
        fname = f"{stem}.{name}.csv"
        (write_vector if vector else write_matrix)(os.path.join(base, fname), data)
        return fname

    spec = {"type": L.kind}
    if L.kind == "dense":
        spec["M"] = companion("M", L.M)
    elif L.kind == "khatri-rao":
        spec["B"] = companion("B", L.B)
        spec["C"] = companion("C", L.C)
    elif L.kind == "coords":
        spec["pairs"] = L.pairs.tolist()
    if np.any(L.b):
        spec["b"] = companion("b", L.b, vector=True)
    doc = {
        "m": Y.m,
        "n": Y.n,
        "r": Y.r,
        "sensing": spec,
        "A": companion("A", A, vector=True),
        "Y": {
            "U": companion("U", Y.U),
            "sigma": companion("sigma", Y.sigma, vector=True),
            "V": companion("V", Y.V),
        },
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
    return doc


def dump_report(report, **extra):
    doc = report.to_dict()
    doc.update(extra)
    return json.dumps(doc, indent=2)
