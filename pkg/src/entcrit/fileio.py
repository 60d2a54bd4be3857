"""Input documents and certificate serialization for the CLI.

A state document is UTF-8 JSON with a qubit count ``n`` and either
``rows`` (a row-major 2^n x 2^n array of [re, im] pairs) or
``ghz_diagonal`` (an object with four ``lambda`` and four ``mu`` values).
Certificates are emitted as JSON listing each biseparable term with its
weight, partition label and pure components as amplitude vectors.
"""

import json

import numpy as np

from .families import GhzDiagonal3, ghz_diagonal_3
from .qstate import DensityMatrix, EntcritError


class StateDocument:
    """Parsed input: a density matrix, possibly with GHZ-diagonal structure."""

    def __init__(self, n_qubits, rho, ghz_diagonal=None, descriptor="<memory>"):
        self.n_qubits = n_qubits
        self.rho = rho
        self.ghz_diagonal = ghz_diagonal
        self.descriptor = descriptor


def parse_state_document(text, descriptor="<memory>"):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        raise EntcritError(f"not valid JSON: {err}") from None
    if not isinstance(doc, dict) or "n" not in doc:
        raise EntcritError("document must be an object with an 'n' field")
    n = doc["n"]
    if not isinstance(n, int) or n < 1:
        raise EntcritError(f"'n' must be a positive integer, got {n!r}")
    if "ghz_diagonal" in doc:
        if n != 3:
            raise EntcritError("ghz_diagonal form requires n = 3")
        body = doc["ghz_diagonal"]
        try:
            params = GhzDiagonal3(tuple(body["lambda"]), tuple(body["mu"]))
        except (KeyError, TypeError) as err:
            raise EntcritError(f"malformed ghz_diagonal block: {err}") from None
        return StateDocument(3, ghz_diagonal_3(params), params, descriptor)
    if "rows" not in doc:
        raise EntcritError("document needs either 'rows' or 'ghz_diagonal'")
    rows = doc["rows"]
    dim = 2 ** n
    if len(rows) != dim or any(len(r) != dim for r in rows):
        raise EntcritError(f"'rows' must be a {dim} x {dim} array")
    mat = np.empty((dim, dim), dtype=complex)
    try:
        for i, row in enumerate(rows):
            for j, pair in enumerate(row):
                re, im = pair
                mat[i, j] = float(re) + 1j * float(im)
    except (TypeError, ValueError) as err:
        raise EntcritError(f"entries must be [re, im] number pairs: {err}") from None
    return StateDocument(n, DensityMatrix(mat), None, descriptor)


def load_state_document(path):
    try:
        with open(path, encoding="utf-8") as handle:
            text = handle.read()
    except OSError as err:
        raise EntcritError(f"cannot read {path}: {err}") from None
    return parse_state_document(text, descriptor=str(path))


def state_document_dict(rho):
    """Serialize a density matrix into the input schema."""
    mat = rho.matrix
    rows = [[[float(mat[i, j].real), float(mat[i, j].imag)]
             for j in range(mat.shape[1])] for i in range(mat.shape[0])]
    return {"n": rho.n_qubits, "rows": rows}


def report_dict(report):
    return {
        "criterion": report.criterion_id,
        "lhs": report.lhs,
        "rhs": report.rhs,
        "margin": report.margin,
        "violated": report.violated,
    }


def certificate_dict(decomposition, verified):
    terms = []
    for term in decomposition.terms:
        components = []
        for prob, psi in term.components:
            vec = psi.amplitudes / psi.norm
            components.append({
                "probability": float(prob),
                "amplitudes": [[float(a.real), float(a.imag)] for a in vec],
            })
        terms.append({
            "weight": float(term.weight),
            "partition": term.partition.label,
            "components": components,
        })
    residue = [{"weight": float(w), "basis_state": "".join(str(b) for b in t)}
               for w, t in decomposition.residue]
    return {
        "n": decomposition.n_qubits,
        "terms": terms,
        "residue": residue,
        "verified": bool(verified),
    }


def dump_json(obj, path=None):
    text = json.dumps(obj, indent=2)
    if path is None:
        return text
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(text + "\n")
    return text
