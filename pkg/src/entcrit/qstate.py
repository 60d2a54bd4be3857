"""Complex density-matrix core for multiqubit systems.

Conventions used throughout the package:

* Computational basis states of N qubits are labelled by index tuples
  ``I = (i_1, ..., i_N)`` with ``i_k`` in {0, 1}.  Qubit 1 (letter ``A``,
  array position 0) is the most significant bit, so the diagonal entry
  for ``(0,0,0)`` is the matrix element (0, 0) and ``(0,0,1)`` is (1, 1).
* States may be unnormalized; every tolerance scales with the trace so
  scaled inputs behave like their normalized counterparts.
"""

import warnings
from dataclasses import dataclass
from functools import reduce
from itertools import combinations

import numpy as np

HERMITICITY_RTOL = 1e-9
PSD_RTOL = 1e-9


class EntcritError(ValueError):
    """Base class for invalid states or criterion inputs."""


# ---------------------------------------------------------------------------
# Index tuples
# ---------------------------------------------------------------------------

def weight(index_tuple):
    """Number of 1-bits in an index tuple."""
    return sum(index_tuple)


def complement(index_tuple):
    """Exchange zeros and ones; an involution."""
    return tuple(1 - b for b in index_tuple)


def tuple_to_index(index_tuple):
    """Row index of a basis label, qubit 1 being the most significant bit."""
    idx = 0
    for b in index_tuple:
        idx = (idx << 1) | b
    return idx


def index_to_tuple(idx, n_qubits):
    """Inverse of :func:`tuple_to_index`."""
    return tuple((idx >> (n_qubits - 1 - k)) & 1 for k in range(n_qubits))


def all_index_tuples(n_qubits):
    """All 2^N index tuples in row order."""
    return [index_to_tuple(i, n_qubits) for i in range(2 ** n_qubits)]


def tuples_of_weight(n_qubits, w):
    """All index tuples with exactly ``w`` ones, in row order."""
    out = []
    for ones in combinations(range(n_qubits), w):
        t = [0] * n_qubits
        for q in ones:
            t[q] = 1
        out.append(tuple(t))
    return sorted(out, key=tuple_to_index)


def _check_tuple(index_tuple, n_qubits):
    if len(index_tuple) != n_qubits:
        raise EntcritError(
            f"index tuple of length {len(index_tuple)} on {n_qubits} qubits")
    if any(b not in (0, 1) for b in index_tuple):
        raise EntcritError(f"index tuple must be binary, got {index_tuple}")


# ---------------------------------------------------------------------------
# Bipartitions
# ---------------------------------------------------------------------------

_QUBIT_LETTERS = "ABCDEFGHIJKLMNOPQRST"


@dataclass(frozen=True)
class Bipartition:
    """A split of the qubits {0, ..., N-1} into two nonempty groups.

    Canonical form keeps the side containing qubit 0 in ``side_a``; a
    partition and its mirror image are the same object.
    """

    n_qubits: int
    side_a: tuple

    def __post_init__(self):
        side = frozenset(self.side_a)
        if not side or len(side) >= self.n_qubits:
            raise EntcritError("side_a must be a nonempty proper subset")
        if any(q < 0 or q >= self.n_qubits for q in side):
            raise EntcritError("qubit position out of range")
        if 0 not in side:
            side = frozenset(range(self.n_qubits)) - side
        object.__setattr__(self, "side_a", tuple(sorted(side)))

    @property
    def side_b(self):
        return tuple(q for q in range(self.n_qubits) if q not in self.side_a)

    @property
    def label(self):
        a = "".join(_QUBIT_LETTERS[q] for q in self.side_a)
        b = "".join(_QUBIT_LETTERS[q] for q in self.side_b)
        return f"{a}|{b}"

    @classmethod
    def from_label(cls, label, n_qubits=None):
        """Parse a label like ``"AB|C"`` (letters A, B, ... are qubits 0, 1, ...)."""
        left, _, right = label.partition("|")
        qubits = [_QUBIT_LETTERS.index(c) for c in (left + right).upper()]
        n = n_qubits if n_qubits is not None else len(qubits)
        if sorted(qubits) != list(range(n)):
            raise EntcritError(f"bipartition label {label!r} does not cover qubits 0..{n - 1}")
        return cls(n, tuple(_QUBIT_LETTERS.index(c) for c in left.upper()))

    def separates(self, index_a, index_b):
        """True if the two index tuples differ on both sides of the cut."""
        differs_a = any(index_a[q] != index_b[q] for q in self.side_a)
        differs_b = any(index_a[q] != index_b[q] for q in self.side_b)
        return differs_a and differs_b


def all_bipartitions(n_qubits):
    """Every bipartition of N qubits, one per mirror pair (2^(N-1) - 1 total)."""
    rest = list(range(1, n_qubits))
    out = []
    for r in range(0, n_qubits - 1):
        for extra in combinations(rest, r):
            out.append(Bipartition(n_qubits, (0,) + extra))
    return out


# ---------------------------------------------------------------------------
# Pure states
# ---------------------------------------------------------------------------

class PureState:
    """State vector on N qubits; not necessarily normalized."""

    def __init__(self, amplitudes, n_qubits=None):
        amp = np.asarray(amplitudes, dtype=complex).reshape(-1)
        n = int(np.log2(amp.size)) if n_qubits is None else n_qubits
        if 2 ** n != amp.size:
            raise EntcritError(f"amplitude vector of length {amp.size} is not 2^{n}")
        if n < 1:
            raise EntcritError("need at least one qubit")
        norm = np.linalg.norm(amp)
        if norm == 0.0:
            raise EntcritError("zero state vector")
        amp = amp.copy()
        amp.flags.writeable = False
        self.amplitudes = amp
        self.n_qubits = n

    @property
    def norm(self):
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self):
        return PureState(self.amplitudes / self.norm, self.n_qubits)

    def amplitude(self, index_tuple):
        _check_tuple(index_tuple, self.n_qubits)
        return complex(self.amplitudes[tuple_to_index(index_tuple)])

    def support(self, rtol=1e-12):
        """Index tuples carrying nonzero amplitude."""
        cut = rtol * np.abs(self.amplitudes).max()
        return [index_to_tuple(i, self.n_qubits)
                for i in np.nonzero(np.abs(self.amplitudes) > cut)[0]]

    def density_matrix(self):
        psi = self.amplitudes / self.norm
        return DensityMatrix(np.outer(psi, psi.conj()), validate=False)

    def schmidt_coefficients(self, partition):
        """Singular values of the amplitude matrix across a bipartition."""
        mat = _partition_matrix(self.amplitudes, self.n_qubits, partition)
        return np.linalg.svd(mat, compute_uv=False)

    def __repr__(self):
        return f"PureState(n_qubits={self.n_qubits})"


def _partition_matrix(amplitudes, n_qubits, partition):
    """Reshape an amplitude vector into a (side_a x side_b) matrix."""
    tensor = amplitudes.reshape((2,) * n_qubits)
    order = list(partition.side_a) + list(partition.side_b)
    tensor = np.transpose(tensor, order)
    return tensor.reshape(2 ** len(partition.side_a), -1)


# ---------------------------------------------------------------------------
# Density matrices
# ---------------------------------------------------------------------------

class DensityMatrix:
    """Hermitian 2^N x 2^N matrix with positive trace, possibly unnormalized.

    Hermiticity is always validated (tolerance 1e-9 relative to the trace);
    positivity is checked lazily because criteria do not require it, and a
    failing check only sets :attr:`psd_warning` so that slightly non-positive
    tomography matrices remain analyzable.
    """

    def __init__(self, matrix, validate=True):
        mat = np.asarray(matrix, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise EntcritError(f"expected a square matrix, got shape {mat.shape}")
        n = int(np.log2(mat.shape[0]))
        if 2 ** n != mat.shape[0]:
            raise EntcritError(f"dimension {mat.shape[0]} is not a power of two")
        tr = complex(np.trace(mat))
        if validate:
            if abs(tr) <= 0.0 or abs(tr.imag) > HERMITICITY_RTOL * abs(tr) or tr.real <= 0.0:
                raise EntcritError(f"trace must be positive, got {tr}")
            dev = np.abs(mat - mat.conj().T).max()
            if dev > HERMITICITY_RTOL * tr.real:
                raise EntcritError(
                    f"matrix is not Hermitian: max deviation {dev:.3e} "
                    f"exceeds {HERMITICITY_RTOL:.0e} * trace")
            diag = np.diagonal(mat)
            if diag.real.min() < -PSD_RTOL * tr.real:
                raise EntcritError("negative diagonal entry beyond tolerance")
        mat = mat.copy()
        mat.flags.writeable = False
        self.matrix = mat
        self.n_qubits = n
        self.trace = float(tr.real)
        self._min_eigenvalue = None

    @property
    def dim(self):
        return self.matrix.shape[0]

    def normalized(self):
        return DensityMatrix(self.matrix / self.trace, validate=False)

    def min_eigenvalue(self):
        if self._min_eigenvalue is None:
            self._min_eigenvalue = float(np.linalg.eigvalsh(self.matrix)[0])
        return self._min_eigenvalue

    @property
    def is_psd(self):
        return self.min_eigenvalue() >= -PSD_RTOL * self.trace

    def validate_psd(self):
        """Check positivity; warn (do not reject) on failure.

        Returns True if the smallest eigenvalue is above -1e-9 * trace.
        """
        if not self.is_psd:
            warnings.warn(f"state is not positive semidefinite "
                          f"(min eigenvalue {self.min_eigenvalue():.3e})")
            return False
        return True

    def entry(self, row_tuple, col_tuple):
        _check_tuple(row_tuple, self.n_qubits)
        _check_tuple(col_tuple, self.n_qubits)
        return complex(self.matrix[tuple_to_index(row_tuple), tuple_to_index(col_tuple)])

    def diagonal(self):
        """Real diagonal, tiny negative noise clipped to zero."""
        return np.clip(np.diagonal(self.matrix).real, 0.0, None)

    def __repr__(self):
        return f"DensityMatrix(n_qubits={self.n_qubits}, trace={self.trace:.6g})"


def diagonal_entry(rho, index_tuple):
    """Diagonal element labelled by an index tuple (clipped at zero)."""
    _check_tuple(index_tuple, rho.n_qubits)
    val = rho.matrix[tuple_to_index(index_tuple), tuple_to_index(index_tuple)].real
    return max(val, 0.0)


# ---------------------------------------------------------------------------
# Local operations
# ---------------------------------------------------------------------------

def _apply_one_site(op, mat, qubit, n_qubits, adjoint_side):
    """Multiply a 2x2 operator into one tensor factor of a 2^N x 2^N matrix."""
    dim = 2 ** n_qubits
    if adjoint_side:
        # mat @ (I x op^dagger x I): act on column index of the qubit
        t = mat.reshape((dim,) + (2,) * n_qubits)
        t = np.moveaxis(t, 1 + qubit, -1)
        t = t @ op.conj().T
        t = np.moveaxis(t, -1, 1 + qubit)
        return t.reshape(dim, dim)
    t = mat.reshape((2,) * n_qubits + (dim,))
    t = np.moveaxis(t, qubit, 0)
    t = np.tensordot(op, t, axes=([1], [0]))
    t = np.moveaxis(t, 0, qubit)
    return t.reshape(dim, dim)


def apply_local(rho, operators):
    """Conjugate by a product of one-qubit operators, (F1 x ... x FN) rho (.)^dagger.

    Parameters
    ----------
    rho : DensityMatrix
    operators : sequence of N complex 2x2 arrays

    Returns
    -------
    DensityMatrix, unnormalized in general.
    """
    if len(operators) != rho.n_qubits:
        raise EntcritError(f"need {rho.n_qubits} operators, got {len(operators)}")
    mat = rho.matrix
    for q, op in enumerate(operators):
        op = np.asarray(op, dtype=complex)
        if op.shape != (2, 2):
            raise EntcritError("local operators must be 2x2")
        mat = _apply_one_site(op, mat, q, rho.n_qubits, adjoint_side=False)
        mat = _apply_one_site(op, mat, q, rho.n_qubits, adjoint_side=True)
    return DensityMatrix(mat, validate=False)


def apply_local_to_pure(psi, operators):
    """Apply a product of one-qubit operators to a state vector."""
    if len(operators) != psi.n_qubits:
        raise EntcritError(f"need {psi.n_qubits} operators, got {len(operators)}")
    t = psi.amplitudes.reshape((2,) * psi.n_qubits)
    for q, op in enumerate(operators):
        op = np.asarray(op, dtype=complex)
        t = np.moveaxis(np.tensordot(op, np.moveaxis(t, q, 0), axes=([1], [0])), 0, q)
    return PureState(t.reshape(-1), psi.n_qubits)


def permute_qubits(rho, order):
    """Relabel qubits: new qubit q is old qubit order[q]."""
    n = rho.n_qubits
    if sorted(order) != list(range(n)):
        raise EntcritError(f"not a permutation of 0..{n - 1}: {order}")
    t = rho.matrix.reshape((2,) * (2 * n))
    axes = list(order) + [n + q for q in order]
    t = np.transpose(t, axes)
    return DensityMatrix(t.reshape(rho.dim, rho.dim), validate=False)


def flip_qubits(rho, mask):
    """Apply a bit flip (Pauli X) on every qubit where mask is truthy."""
    ops = [np.array([[0, 1], [1, 0]], dtype=complex) if m
           else np.eye(2, dtype=complex) for m in mask]
    return apply_local(rho, ops)


def partial_transpose(rho, partition):
    """Transpose the tensor factor holding ``partition.side_a``.

    Hermiticity and the trace are preserved exactly; positivity of the
    result is a necessary condition for separability across the cut.
    """
    n = rho.n_qubits
    if partition.n_qubits != n:
        raise EntcritError("partition size does not match the state")
    t = rho.matrix.reshape((2,) * (2 * n))
    axes = list(range(2 * n))
    for q in partition.side_a:
        axes[q], axes[n + q] = axes[n + q], axes[q]
    t = np.transpose(t, axes)
    return DensityMatrix(t.reshape(rho.dim, rho.dim), validate=False)


def tensor_product(*vectors):
    """Kronecker product of state vectors (plain arrays in, array out)."""
    return reduce(np.kron, [np.asarray(v, dtype=complex) for v in vectors])


def fidelity(rho, psi):
    """Overlap <psi| rho |psi> in [0, 1]; both inputs normalized internally."""
    if isinstance(rho, PureState):
        if rho.n_qubits != psi.n_qubits:
            raise EntcritError("qubit count mismatch")
        a = rho.amplitudes / rho.norm
        b = psi.amplitudes / psi.norm
        return float(min(abs(np.vdot(b, a)) ** 2, 1.0))
    if rho.n_qubits != psi.n_qubits:
        raise EntcritError("qubit count mismatch")
    vec = psi.amplitudes / psi.norm
    val = float(np.real(np.vdot(vec, rho.matrix @ vec))) / rho.trace
    return float(min(max(val, 0.0), 1.0))
