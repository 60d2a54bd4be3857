"""Constructors for the state families the criteria are exercised on.

Includes GHZ, W and Dicke states, white-noise mixtures, 3-qubit states
diagonal in the GHZ basis, the Acin bound-entangled family, and a compact
closed-form representation (:class:`CornerDiagonalState`) for states whose
diagonal depends only on the Hamming weight and whose single coherence sits
in the (0...0, 1...1) corner.  The closed form lets threshold sweeps run to
N = 20 qubits without allocating 2^N x 2^N arrays.
"""

from dataclasses import dataclass
from math import comb, sqrt

import numpy as np

from .qstate import (
    DensityMatrix,
    EntcritError,
    PureState,
    all_index_tuples,
    tuple_to_index,
    tuples_of_weight,
    weight,
)


def ghz(n_qubits):
    """(|0...0> + |1...1>)/sqrt(2)."""
    if n_qubits < 2:
        raise EntcritError("GHZ state needs at least 2 qubits")
    amp = np.zeros(2 ** n_qubits, dtype=complex)
    amp[0] = amp[-1] = 1.0 / sqrt(2.0)
    return PureState(amp, n_qubits)


def w(n_qubits):
    """Equal superposition of all weight-1 basis states."""
    if n_qubits < 2:
        raise EntcritError("W state needs at least 2 qubits")
    amp = np.zeros(2 ** n_qubits, dtype=complex)
    for t in tuples_of_weight(n_qubits, 1):
        amp[tuple_to_index(t)] = 1.0 / sqrt(n_qubits)
    return PureState(amp, n_qubits)


def dicke(n_qubits, k):
    """Equal superposition of all weight-k basis states, norm 1/sqrt(C(N,k))."""
    if not 0 <= k <= n_qubits:
        raise EntcritError(f"excitation number {k} out of range 0..{n_qubits}")
    amp = np.zeros(2 ** n_qubits, dtype=complex)
    for t in tuples_of_weight(n_qubits, k):
        amp[tuple_to_index(t)] = 1.0 / sqrt(comb(n_qubits, k))
    return PureState(amp, n_qubits)


def white_noise_mix(psi, p):
    """(1-p) |psi><psi| + p * identity / 2^N, a normalized density matrix."""
    if not 0.0 <= p <= 1.0:
        raise EntcritError(f"mixing parameter {p} outside [0, 1]")
    proj = psi.density_matrix().matrix
    dim = proj.shape[0]
    mat = (1.0 - p) * proj + (p / dim) * np.eye(dim)
    return DensityMatrix(mat, validate=False)


# ---------------------------------------------------------------------------
# GHZ-diagonal three-qubit states
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GhzDiagonal3:
    """Three-qubit state diagonal in the GHZ basis.

    ``lam[i]`` sits on the diagonal at rows i and 7-i (zero based), and
    ``mu[i]`` on the anti-diagonal connecting them.  Positivity of each
    2x2 block requires |mu_i| <= lam_i.  Entries are stored raw; if
    ``normalization`` is given the assembled matrix is divided by it.
    """

    lam: tuple
    mu: tuple
    normalization: float | None = None

    def __post_init__(self):
        lam = tuple(float(v) for v in self.lam)
        mu = tuple(float(v) for v in self.mu)
        if len(lam) != 4 or len(mu) != 4:
            raise EntcritError("need four lambda and four mu values")
        scale = max(max(lam), 1.0)
        if min(lam) < -1e-12 * scale:
            raise EntcritError(f"negative lambda in {lam}")
        for l, m in zip(lam, mu):
            if abs(m) > l + 1e-9 * scale:
                raise EntcritError(f"|mu| = {abs(m)} exceeds lambda = {l}")
        if self.normalization is not None and not self.normalization > 0:
            raise EntcritError("normalization must be positive")
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "mu", mu)

    @property
    def trace(self):
        raw = 2.0 * sum(self.lam)
        return raw / self.normalization if self.normalization else raw


def ghz_diagonal_3(params):
    """Assemble the 8x8 matrix of a :class:`GhzDiagonal3`."""
    mat = np.zeros((8, 8), dtype=complex)
    for i in range(4):
        mat[i, i] = mat[7 - i, 7 - i] = params.lam[i]
        mat[i, 7 - i] = mat[7 - i, i] = params.mu[i]
    if params.normalization:
        mat /= params.normalization
    return DensityMatrix(mat, validate=False)


# ---------------------------------------------------------------------------
# Acin bound-entangled family
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AcinFamilyParams:
    """Parameters of the three-qubit family that is PPT across every cut.

    The corners are pinned at one, the remaining diagonal is
    (1, l2, l3, l4, 1/l4, 1/l3, 1/l2, 1) and all other coherences vanish.
    Members with l2 * l3 != l4 are separable under each bipartition but not
    fully separable.
    """

    lambda2: float
    lambda3: float
    lambda4: float

    def __post_init__(self):
        for v in (self.lambda2, self.lambda3, self.lambda4):
            if not v > 0:
                raise EntcritError(f"parameters must be positive, got {v}")

    @property
    def is_bound_entangled_candidate(self):
        return abs(self.lambda2 * self.lambda3 - self.lambda4) > 1e-12 * max(
            self.lambda2 * self.lambda3, self.lambda4)

    @property
    def trace(self):
        return (2.0 + self.lambda2 + 1.0 / self.lambda2
                + self.lambda3 + 1.0 / self.lambda3
                + self.lambda4 + 1.0 / self.lambda4)


def acin_state(params):
    """Unnormalized 8x8 matrix of the Acin family member."""
    l2, l3, l4 = params.lambda2, params.lambda3, params.lambda4
    mat = np.zeros((8, 8), dtype=complex)
    np.fill_diagonal(mat, [1.0, l2, l3, l4, 1.0 / l4, 1.0 / l3, 1.0 / l2, 1.0])
    mat[0, 7] = mat[7, 0] = 1.0
    return DensityMatrix(mat, validate=False)


# ---------------------------------------------------------------------------
# GHZ basis
# ---------------------------------------------------------------------------

def ghz_basis(n_qubits):
    """The 2^N orthonormal states (|x> +- |x_bar>)/sqrt(2).

    Representatives x run over tuples with leading bit 0 in row order; each
    contributes the plus state followed by the minus state, so the first
    element is the N-qubit GHZ state.
    """
    if n_qubits < 2:
        raise EntcritError("GHZ basis needs at least 2 qubits")
    dim = 2 ** n_qubits
    out = []
    for rep in range(dim // 2):
        for sign in (1.0, -1.0):
            amp = np.zeros(dim, dtype=complex)
            amp[rep] = 1.0 / sqrt(2.0)
            amp[dim - 1 - rep] = sign / sqrt(2.0)
            out.append(PureState(amp, n_qubits))
    return out


# ---------------------------------------------------------------------------
# Closed-form weight-shell states
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CornerDiagonalState:
    """Diagonal state plus a single real (0...0, 1...1) coherence.

    The diagonal takes a common value on each Hamming-weight shell, which
    covers GHZ states under white noise or relaxation (before and after
    diagonal filtering).  ``shell_diagonals[w]`` is the value of every
    diagonal entry of weight w; ``corner`` is the off-diagonal element
    between (0,...,0) and (1,...,1).
    """

    n_qubits: int
    shell_diagonals: tuple
    corner: float

    def __post_init__(self):
        if len(self.shell_diagonals) != self.n_qubits + 1:
            raise EntcritError("need one shell value per Hamming weight 0..N")
        object.__setattr__(self, "shell_diagonals",
                           tuple(float(v) for v in self.shell_diagonals))

    @property
    def trace(self):
        return sum(comb(self.n_qubits, w) * d
                   for w, d in enumerate(self.shell_diagonals))

    def diagonal_entry(self, index_tuple):
        return self.shell_diagonals[weight(index_tuple)]

    def to_density_matrix(self):
        if self.n_qubits > 12:
            raise EntcritError("dense form limited to 12 qubits")
        dim = 2 ** self.n_qubits
        mat = np.zeros((dim, dim), dtype=complex)
        for t in all_index_tuples(self.n_qubits):
            idx = tuple_to_index(t)
            mat[idx, idx] = self.shell_diagonals[weight(t)]
        mat[0, dim - 1] = mat[dim - 1, 0] = self.corner
        return DensityMatrix(mat, validate=False)


def noisy_ghz_shells(n_qubits, p):
    """Closed form of the N-qubit GHZ state mixed with white noise."""
    if not 0.0 <= p <= 1.0:
        raise EntcritError(f"mixing parameter {p} outside [0, 1]")
    dim = 2 ** n_qubits
    shells = [p / dim] * (n_qubits + 1)
    shells[0] += (1.0 - p) / 2.0
    shells[n_qubits] += (1.0 - p) / 2.0
    return CornerDiagonalState(n_qubits, tuple(shells), (1.0 - p) / 2.0)


def noisy_ghz(n_qubits, p):
    """Dense N-qubit GHZ state mixed with white noise."""
    return white_noise_mix(ghz(n_qubits), p)


def ghz_diagonal_from_corner(state):
    """Interpret a 3-qubit corner-diagonal state as GHZ-diagonal parameters.

    Requires the mirror symmetry d[0] == d[3] and d[1] == d[2]; otherwise the
    state (e.g. a filtered relaxed GHZ with its excess at (0,0,0)) is not
    GHZ-diagonal and an error is raised.
    """
    if state.n_qubits != 3:
        raise EntcritError("only defined for 3 qubits")
    d = state.shell_diagonals
    scale = max(abs(v) for v in d) + abs(state.corner)
    if abs(d[0] - d[3]) > 1e-12 * scale or abs(d[1] - d[2]) > 1e-12 * scale:
        raise EntcritError("diagonal lacks the mirror symmetry of a GHZ-diagonal state")
    return GhzDiagonal3(lam=(d[0], d[1], d[1], d[2]), mu=(state.corner, 0.0, 0.0, 0.0))
