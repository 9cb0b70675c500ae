"""JSON (de)serialization of instances, certificates and verdict documents.

Complex numbers serialize as two-element [re, im] arrays; matrices as
row-major lists of rows. Python's shortest-round-trip float printing makes
the encoding lossless for binary64 values and byte-deterministic.
"""

from __future__ import annotations

import json

import numpy as np

from .algebra import MatrixAlgebra, factor_algebra, full_algebra, matrix_algebra
from .errors import MalformedInstanceError
from .linalg import MatrixPolynomial
from .oracle import algebra_from_kind
from .solver import UepInstance, UepVerdict
from .states import DensityOperator, PureState, density_operator, pure_state

__all__ = [
    "matrix_to_json",
    "matrix_from_json",
    "vector_to_json",
    "vector_from_json",
    "algebra_to_json",
    "algebra_from_json",
    "instance_to_json",
    "load_instance",
    "parse_instance",
    "verdict_document",
    "certificate_to_json",
    "certificate_from_json",
    "dumps_document",
]

MODES = ("matrix-pairs", "matpoly", "pure-sets", "unilocal-mixed", "generic-mixed")


def _pair(z: complex):
    return [float(z.real), float(z.imag)]


def matrix_to_json(M) -> list:
    M = np.asarray(M, dtype=complex)
    return [[_pair(z) for z in row] for row in M]


def vector_to_json(v) -> list:
    return [_pair(z) for z in np.asarray(v, dtype=complex).ravel()]


def _entry_from_json(obj, where: str) -> complex:
    if (not isinstance(obj, (list, tuple)) or len(obj) != 2
            or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in obj)):
        raise MalformedInstanceError(f"{where}: expected a [re, im] number pair, got {obj!r}")
    z = complex(float(obj[0]), float(obj[1]))
    if not (np.isfinite(z.real) and np.isfinite(z.imag)):
        raise MalformedInstanceError(f"{where}: non-finite entry {obj!r}")
    return z


def matrix_from_json(obj, where: str) -> np.ndarray:
    if not isinstance(obj, list) or not obj or not all(isinstance(r, list) for r in obj):
        raise MalformedInstanceError(f"{where}: expected a list of rows")
    ncols = len(obj[0])
    if ncols == 0 or any(len(r) != ncols for r in obj):
        raise MalformedInstanceError(f"{where}: rows must be non-empty and of equal length")
    return np.array(
        [[_entry_from_json(e, f"{where}[{i}][{j}]") for j, e in enumerate(row)]
         for i, row in enumerate(obj)],
        dtype=complex,
    )


def vector_from_json(obj, where: str) -> np.ndarray:
    if not isinstance(obj, list) or not obj:
        raise MalformedInstanceError(f"{where}: expected a non-empty list of [re, im] pairs")
    return np.array([_entry_from_json(e, f"{where}[{i}]") for i, e in enumerate(obj)],
                    dtype=complex)


def algebra_to_json(G: MatrixAlgebra) -> dict:
    if G.kind == "full":
        return {"kind": "full"}
    if G.kind == "factor":
        a, b = G.factor_shape
        return {"kind": "factor", "a": a, "b": b}
    return {"kind": "span", "basis": [matrix_to_json(E) for E in G.basis]}


def algebra_from_json(obj, d: int, where: str) -> MatrixAlgebra:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise MalformedInstanceError(f"{where}: expected an object with a 'kind' field")
    kind = obj["kind"]
    try:
        if kind == "full":
            return full_algebra(d)
        if kind == "factor":
            a, b = _require_int(obj, "a", where), _require_int(obj, "b", where)
            if a * b != d:
                raise MalformedInstanceError(f"{where}: factor {a}x{b} does not tile dimension {d}")
            return factor_algebra(a, b)
        if kind == "span":
            basis_obj = obj.get("basis")
            if not isinstance(basis_obj, list) or not basis_obj:
                raise MalformedInstanceError(f"{where}.basis: expected a non-empty list of matrices")
            basis = [matrix_from_json(E, f"{where}.basis[{i}]") for i, E in enumerate(basis_obj)]
            return matrix_algebra(basis, kind="span")
    except MalformedInstanceError:
        raise
    except Exception as exc:
        raise MalformedInstanceError(f"{where}: {exc}") from exc
    raise MalformedInstanceError(f"{where}.kind: unknown algebra kind {kind!r}")


def _require_int(doc: dict, key: str, where: str) -> int:
    if key not in doc:
        raise MalformedInstanceError(f"{where}.{key}: missing required field")
    value = doc[key]
    if not isinstance(value, int) or isinstance(value, bool) or value < 1:
        raise MalformedInstanceError(f"{where}.{key}: expected a positive integer, got {value!r}")
    return value


def instance_to_json(inst: UepInstance, mode: str = "matrix-pairs", seed=None) -> dict:
    doc = {
        "mode": mode,
        "d1": inst.d1,
        "d2": inst.d2,
        "pairs": [{"X": matrix_to_json(X), "Y": matrix_to_json(Y)} for X, Y in inst.pairs],
        "G1": algebra_to_json(inst.G1),
        "G2": algebra_to_json(inst.G2),
    }
    if seed is not None:
        doc["seed"] = int(seed)
    return doc


def parse_instance(doc: dict):
    """Parse an instance document into (mode, payload).

    Payload depends on the mode: a UepInstance, a (P, Q) polynomial pair,
    two pure-state lists, two density-operator lists, or a (rho, sigma) pair.
    """
    if not isinstance(doc, dict):
        raise MalformedInstanceError("top level: expected a JSON object")
    mode = doc.get("mode", "matrix-pairs")
    if mode not in MODES:
        raise MalformedInstanceError(f"mode: unknown mode {mode!r}, expected one of {MODES}")
    d1 = _require_int(doc, "d1", "top level")
    d2 = _require_int(doc, "d2", "top level")
    try:
        if mode == "matrix-pairs":
            return mode, _parse_matrix_pairs(doc, d1, d2)
        if mode == "matpoly":
            return mode, _parse_matpoly(doc, d1, d2)
        if mode == "pure-sets":
            return mode, _parse_pure_sets(doc, d1, d2)
        if mode == "unilocal-mixed":
            return mode, _parse_density_lists(doc, d1, d2)
        return mode, _parse_generic_mixed(doc, d1, d2)
    except MalformedInstanceError:
        raise
    except Exception as exc:
        raise MalformedInstanceError(f"instance validation failed: {exc}") from exc


def _parse_matrix_pairs(doc, d1, d2) -> UepInstance:
    pairs_obj = doc.get("pairs")
    if not isinstance(pairs_obj, list) or not pairs_obj:
        raise MalformedInstanceError("pairs: expected a non-empty list")
    pairs = []
    for i, p in enumerate(pairs_obj):
        if not isinstance(p, dict) or "X" not in p or "Y" not in p:
            raise MalformedInstanceError(f"pairs[{i}]: expected an object with 'X' and 'Y'")
        pairs.append((matrix_from_json(p["X"], f"pairs[{i}].X"),
                      matrix_from_json(p["Y"], f"pairs[{i}].Y")))
    G1 = algebra_from_json(doc.get("G1", {"kind": "full"}), d1, "G1")
    G2 = algebra_from_json(doc.get("G2", {"kind": "full"}), d2, "G2")
    return UepInstance(d1=d1, d2=d2, pairs=tuple(pairs), G1=G1, G2=G2)


def _parse_matpoly(doc, d1, d2):
    out = []
    for key in ("P", "Q"):
        coeffs_obj = doc.get(key)
        if not isinstance(coeffs_obj, list) or not coeffs_obj:
            raise MalformedInstanceError(f"{key}: expected a non-empty list of coefficient matrices")
        coeffs = [matrix_from_json(C, f"{key}[{i}]") for i, C in enumerate(coeffs_obj)]
        if any(C.shape != (d1, d2) for C in coeffs):
            raise MalformedInstanceError(f"{key}: coefficients must all be {d1} x {d2}")
        out.append(MatrixPolynomial(tuple(coeffs)))
    return tuple(out)


def _parse_pure_sets(doc, d1, d2):
    out = []
    for key in ("states_in", "states_out"):
        vecs_obj = doc.get(key)
        if not isinstance(vecs_obj, list) or not vecs_obj:
            raise MalformedInstanceError(f"{key}: expected a non-empty list of state vectors")
        out.append([pure_state(d1, d2, vector_from_json(v, f"{key}[{i}]"))
                    for i, v in enumerate(vecs_obj)])
    if len(out[0]) != len(out[1]):
        raise MalformedInstanceError("states_in and states_out must have equal length")
    return tuple(out)


def _parse_density_lists(doc, d1, d2):
    out = []
    for key in ("rhos", "sigmas"):
        mats_obj = doc.get(key)
        if not isinstance(mats_obj, list) or not mats_obj:
            raise MalformedInstanceError(f"{key}: expected a non-empty list of density matrices")
        out.append([density_operator(d1, d2, matrix_from_json(M, f"{key}[{i}]"))
                    for i, M in enumerate(mats_obj)])
    if len(out[0]) != len(out[1]):
        raise MalformedInstanceError("rhos and sigmas must have equal length")
    return tuple(out)


def _parse_generic_mixed(doc, d1, d2):
    out = []
    for key in ("rho", "sigma"):
        if key not in doc:
            raise MalformedInstanceError(f"{key}: missing required field")
        out.append(density_operator(d1, d2, matrix_from_json(doc[key], key)))
    return tuple(out)


def load_instance(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise MalformedInstanceError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise MalformedInstanceError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    return doc, parse_instance(doc)


def verdict_document(verdict: UepVerdict, mode: str, seed: int,
                     timing: float | None = None, verbose: bool = False) -> dict:
    doc = {
        "verdict": verdict.verdict,
        "certainty": verdict.certainty,
        "certificate_kind": verdict.certificate_kind,
        "U": None if verdict.U is None else matrix_to_json(verdict.U),
        "V": None if verdict.V is None else matrix_to_json(verdict.V),
        "residual": float(verdict.residual),
        "trials_used": int(verdict.trials_used),
        "failure_bound": float(verdict.failure_bound),
        "solution_dimension": verdict.solution_dimension,
        "detail": verdict.detail,
        "mode": mode,
        "seed": int(seed),
    }
    if verbose:
        doc["aux"] = {k: (matrix_to_json(v) if isinstance(v, np.ndarray) else v)
                      for k, v in verdict.aux.items()}
    if timing is not None:
        doc["timing"] = float(timing)
    return doc


def certificate_to_json(U, V) -> dict:
    return {
        "U": None if U is None else matrix_to_json(U),
        "V": None if V is None else matrix_to_json(V),
    }


def certificate_from_json(doc: dict):
    if not isinstance(doc, dict):
        raise MalformedInstanceError("certificate: expected a JSON object")
    out = []
    for key in ("U", "V"):
        value = doc.get(key)
        out.append(None if value is None else matrix_from_json(value, key))
    return tuple(out)


def dumps_document(doc: dict) -> str:
    return json.dumps(doc, indent=2) + "\n"
