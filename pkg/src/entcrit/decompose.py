"""Constructive biseparability certificates for GHZ-diagonal 3-qubit states.

The corner criterion (largest anti-diagonal element against the sum of the
other paired diagonals) is exact on this family: whenever it is not
violated, an explicit decomposition into biseparable pieces exists and is
produced here.  Building blocks are the four-entry states carrying weight
on two index pairs with matching coherences; each one splits into two pure
product components across the cut singled out by the differing qubit.
"""

from dataclasses import dataclass
from itertools import permutations
from math import pi

import numpy as np

from .criteria import VIOLATION_RTOL, ghz3_biseparability
from .families import GhzDiagonal3, ghz_diagonal_3
from .qstate import (
    Bipartition,
    DensityMatrix,
    EntcritError,
    PureState,
    complement,
    index_to_tuple,
    tuple_to_index,
)


class GmeRefusal(EntcritError):
    """Decomposition refused: the state is genuinely multipartite entangled."""

    def __init__(self, report):
        super().__init__(
            f"state is genuinely multipartite entangled "
            f"(margin {report.margin:.6g}); no biseparable decomposition exists")
        self.report = report


# ---------------------------------------------------------------------------
# Local relabelings (qubit permutations and bit flips)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LocalRelabeling:
    """Basis relabeling y_q = x_{perm[q]} xor flips[q] on three qubits.

    Permutations and flips both preserve the GHZ-diagonal family, move the
    diagonal pairs around without touching the coherence values, and map
    product states to product states.
    """

    perm: tuple
    flips: tuple

    def apply_index(self, index_tuple):
        return tuple(index_tuple[self.perm[q]] ^ int(self.flips[q])
                     for q in range(3))

    def inverse(self):
        iperm = tuple(self.perm.index(q) for q in range(3))
        iflips = tuple(self.flips[iperm[q]] for q in range(3))
        return LocalRelabeling(iperm, iflips)

    def index_map(self):
        """Array m with m[old_row] = new_row."""
        m = np.zeros(8, dtype=int)
        for row in range(8):
            m[row] = tuple_to_index(self.apply_index(index_to_tuple(row, 3)))
        return m

    def apply_to_pure(self, psi):
        amp = np.zeros(8, dtype=complex)
        amp[self.index_map()] = psi.amplitudes
        return PureState(amp, 3)

    def apply_to_matrix(self, rho):
        m = self.index_map()
        out = np.zeros((8, 8), dtype=complex)
        out[np.ix_(m, m)] = rho.matrix
        return DensityMatrix(out, validate=False)

    def pair_permutation(self):
        """Action on the four diagonal-pair labels 0..3."""
        out = [0] * 4
        for i in range(4):
            y = self.apply_index(index_to_tuple(i, 3))
            row = tuple_to_index(y)
            out[i] = row if row < 4 else 7 - row
        return tuple(out)

    @property
    def is_identity(self):
        return self.perm == (0, 1, 2) and not any(self.flips)


def _relabeling_candidates():
    out = []
    for perm in permutations(range(3)):
        for mask in range(8):
            flips = tuple(bool((mask >> (2 - q)) & 1) for q in range(3))
            out.append(LocalRelabeling(tuple(perm), flips))
    return out


_CANDIDATES = _relabeling_candidates()
_PAIR_PERMS = [(r, r.pair_permutation()) for r in _CANDIDATES]


def normal_form(state):
    """Relabel so that the lambdas are non-increasing.

    Returns the reordered state and the relabeling that realizes it; ties
    are broken by the lexicographically first (permutation, flips) record,
    so the identity wins when the input is already ordered.
    """
    lam = state.lam
    for record, pair_perm in _PAIR_PERMS:
        new_lam = [0.0] * 4
        new_mu = [0.0] * 4
        for i in range(4):
            new_lam[pair_perm[i]] = lam[i]
            new_mu[pair_perm[i]] = state.mu[i]
        if new_lam[0] >= new_lam[1] >= new_lam[2] >= new_lam[3]:
            ordered = GhzDiagonal3(tuple(new_lam), tuple(new_mu),
                                   state.normalization)
            return ordered, record
    raise AssertionError("relabeling search cannot fail on four values")


def is_gme(state):
    """Exact genuine-multipartite-entanglement test for GHZ-diagonal states.

    After reordering, true iff the top coherence strictly exceeds the sum
    of the remaining lambdas (same tolerance as the matrix criterion).
    """
    ordered, _ = normal_form(state)
    lam = ordered.lam
    trace = 2.0 * sum(lam)
    return abs(ordered.mu[0]) - (lam[1] + lam[2] + lam[3]) > VIOLATION_RTOL * trace


# ---------------------------------------------------------------------------
# Building blocks
# ---------------------------------------------------------------------------

# Diagonal one-qubit phases realizing each achievable (even) sign pattern on
# the four pair coherences; keys are frozensets of flipped pair labels.
_EVEN_FLIP_PHASES = {
    frozenset(): (0.0, 0.0, 0.0),
    frozenset({0, 1}): (pi / 2, pi / 2, 0.0),
    frozenset({0, 2}): (pi / 2, 0.0, pi / 2),
    frozenset({0, 3}): (0.0, pi / 2, pi / 2),
    frozenset({1, 2}): (0.0, pi / 2, -pi / 2),
    frozenset({1, 3}): (pi / 2, 0.0, -pi / 2),
    frozenset({2, 3}): (pi / 2, -pi / 2, 0.0),
    frozenset({0, 1, 2, 3}): (0.0, 0.0, pi),
}


@dataclass(frozen=True)
class DecompositionTerm:
    """One biseparable piece: weight times a mixture of pure products."""

    weight: float
    partition: Bipartition
    components: tuple        # ((probability, PureState), ...)

    def matrix(self):
        out = np.zeros((2 ** self.partition.n_qubits,) * 2, dtype=complex)
        for prob, psi in self.components:
            vec = psi.amplitudes / psi.norm
            out += prob * np.outer(vec, vec.conj())
        return self.weight * out


def _pair_tuples(pair_label):
    rep = index_to_tuple(pair_label, 3)
    return rep, complement(rep)


def _block_geometry(pair_k, pair_l):
    """Representatives u, v differing on exactly one qubit, and that qubit."""
    u = index_to_tuple(pair_k, 3)
    diff = tuple(a ^ b for a, b in zip(u, index_to_tuple(pair_l, 3)))
    if sum(diff) == 2:
        diff = complement(diff)
    qubit = diff.index(1)
    v = tuple(u[q] ^ diff[q] for q in range(3))
    return u, v, qubit


def _sign_block_term(pair_k, pair_l, lam, sign_k, sign_l):
    """The two-pair block with coherences sign_k*lam, sign_l*lam.

    Splits into two pure components, each a product across the cut that
    isolates the qubit on which the two pairs differ; mixed signs are
    produced by diagonal one-qubit phases, which keep the product form.
    """
    u, v, qubit = _block_geometry(pair_k, pair_l)
    flipped = set()
    if sign_k < 0:
        flipped.add(pair_k)
    if sign_l < 0:
        flipped.add(pair_l)
    if len(flipped) == 1:
        filler = next(i for i in range(4) if i not in (pair_k, pair_l))
        flipped.add(filler)
    phases = _EVEN_FLIP_PHASES[frozenset(flipped)]
    phase_factors = np.array([
        np.prod([np.exp(1j * phases[q] * bits[q]) for q in range(3)])
        for bits in (index_to_tuple(row, 3) for row in range(8))])
    components = []
    for sign in (1.0, -1.0):
        amp = np.zeros(8, dtype=complex)
        amp[tuple_to_index(u)] = 0.5
        amp[tuple_to_index(complement(u))] = 0.5
        amp[tuple_to_index(v)] = 0.5 * sign
        amp[tuple_to_index(complement(v))] = 0.5 * sign
        components.append((0.5, PureState(amp * phase_factors, 3)))
    return DecompositionTerm(4.0 * lam, Bipartition(3, (qubit,)),
                             tuple(components))


@dataclass(frozen=True)
class BlockState:
    """Two-pair GHZ-diagonal block with a common coherence sign."""

    pair: tuple              # (k, l), zero-based pair labels, k != l
    lam: float
    mu_sign: int = 1

    def __post_init__(self):
        k, l = self.pair
        if k == l or not {k, l} <= {0, 1, 2, 3}:
            raise EntcritError(f"invalid pair labels {self.pair}")
        if self.lam < 0:
            raise EntcritError("block magnitude must be nonnegative")
        if self.mu_sign not in (1, -1):
            raise EntcritError("sign must be +1 or -1")

    def term(self):
        return _sign_block_term(self.pair[0], self.pair[1], self.lam,
                                self.mu_sign, self.mu_sign)

    def to_density_matrix(self):
        mat = np.zeros((8, 8), dtype=complex)
        for label in self.pair:
            rep, bar = _pair_tuples(label)
            i, j = tuple_to_index(rep), tuple_to_index(bar)
            mat[i, i] = mat[j, j] = self.lam
            mat[i, j] = mat[j, i] = self.mu_sign * self.lam
        return DensityMatrix(mat, validate=False)


def block_state(k, l, lam, sign=1):
    """Construct the block on pairs (k, l) with its product certificate."""
    return BlockState((k, l), lam, sign)


# ---------------------------------------------------------------------------
# The decomposition algorithm
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GreedyAllocation:
    """Residual pair values after peeling the level-one blocks."""

    alpha4: float
    alpha3: float
    alpha2: float
    lambda_r: tuple

    @classmethod
    def from_lambdas(cls, lam):
        alpha4 = max(lam[1] + lam[2] + lam[3] - lam[0], 0.0)
        r4 = min(lam[3], alpha4 / 3.0)
        alpha3 = alpha4 - r4
        r3 = min(lam[2], alpha3 / 2.0)
        alpha2 = alpha3 - r3
        r2 = min(lam[1], alpha2)
        return cls(alpha4, alpha3, alpha2, (r2, r3, r4))


@dataclass(frozen=True)
class BiseparableDecomposition:
    """Certificate: the state equals the weighted terms plus the residue.

    The residue is a fully separable mixture of a computational basis state
    and its complement (the corner states of the reordered frame mapped
    back to the input labeling).
    """

    n_qubits: int
    terms: tuple
    residue: tuple           # ((weight, index_tuple), ...)

    def matrix(self):
        dim = 2 ** self.n_qubits
        out = np.zeros((dim, dim), dtype=complex)
        for term in self.terms:
            out += term.matrix()
        for w, t in self.residue:
            idx = tuple_to_index(t)
            out[idx, idx] += w
        return out

    @property
    def total_weight(self):
        return (sum(t.weight for t in self.terms)
                + sum(w for w, _ in self.residue))


def _spread(mu, mass, block):
    """Coherence assigned to one pair inside one block, proportional to mass."""
    if mass <= 0.0:
        return 0.0
    return max(-block, min(block, mu * block / mass))


def decompose(state):
    """Decompose a biseparable GHZ-diagonal state into certified pieces.

    Steps: reorder the lambdas; if the top pair dominates, peel off a fully
    separable corner residue; peel blocks pairing the top label with each
    other label, choosing residual values as equal as possible; close the
    remaining three-pair system exactly; realize the requested coherences
    as convex mixtures of sign blocks and map everything back through the
    relabeling.  Raises :class:`GmeRefusal` when no certificate exists.
    """
    ordered, record = normal_form(state)
    report = ghz3_biseparability(ghz_diagonal_3(
        GhzDiagonal3(ordered.lam, ordered.mu)))
    if report.violated:
        raise GmeRefusal(report)
    lam = list(ordered.lam)
    mu = list(ordered.mu)
    tiny = 1e-15 * (1.0 + 2.0 * sum(lam))

    residue_weight = 0.0
    if lam[0] > lam[1] + lam[2] + lam[3]:
        kept = max(abs(mu[0]), lam[1])
        residue_weight = lam[0] - kept
        lam[0] = kept

    alloc = GreedyAllocation.from_lambdas(lam)
    r2, r3, r4 = alloc.lambda_r
    assert r2 >= r3 - tiny and r3 >= r4 - tiny, "residuals must decrease"
    assert r2 <= r3 + r4 + tiny, "residual system must stay closable"
    blocks = {}
    for k, residual in ((1, r2), (2, r3), (3, r4)):
        blocks[(0, k)] = lam[k] - residual
    blocks[(1, 2)] = max((r2 + r3 - r4) / 2.0, 0.0)
    blocks[(1, 3)] = max((r2 + r4 - r3) / 2.0, 0.0)
    blocks[(2, 3)] = max((r3 + r4 - r2) / 2.0, 0.0)

    inverse = record.inverse()
    terms = []
    for (k, l), size in blocks.items():
        if size <= tiny:
            continue
        m_k = _spread(mu[k], lam[k], size)
        m_l = _spread(mu[l], lam[l], size)
        for s in (1.0, -1.0):
            for t in (1.0, -1.0):
                prob = (1.0 + s * m_k / size) * (1.0 + t * m_l / size) / 4.0
                if prob <= 0.0:
                    continue
                base = _sign_block_term(k, l, size * prob, int(s), int(t))
                terms.append(DecompositionTerm(
                    base.weight,
                    Bipartition(3, tuple(record.perm[q]
                                         for q in base.partition.side_a)),
                    tuple((p, inverse.apply_to_pure(psi))
                          for p, psi in base.components)))

    residue = ()
    if residue_weight > tiny:
        zero = inverse.apply_index((0, 0, 0))
        residue = ((residue_weight, zero), (residue_weight, complement(zero)))

    scale = 1.0 / state.normalization if state.normalization else 1.0
    if scale != 1.0:
        terms = [DecompositionTerm(t.weight * scale, t.partition, t.components)
                 for t in terms]
        residue = tuple((w * scale, t) for w, t in residue)
    return BiseparableDecomposition(3, tuple(terms), residue)


def verify_decomposition(rho, decomposition, rtol=1e-10):
    """Independent check of a certificate against a density matrix.

    Verifies the entrywise reconstruction within rtol * trace and that each
    pure component factorizes across its term's partition (largest Schmidt
    coefficient equal to the norm within rtol).  Returns (ok, diagnostics).
    """
    problems = []
    recon = decomposition.matrix()
    dev = np.abs(recon - rho.matrix).max()
    if dev > rtol * rho.trace:
        problems.append(f"reconstruction deviates by {dev:.3e}")
    for i, term in enumerate(decomposition.terms):
        if term.weight < 0:
            problems.append(f"term {i} has negative weight")
        for j, (prob, psi) in enumerate(term.components):
            if prob < 0:
                problems.append(f"term {i} component {j} has negative probability")
            coeffs = psi.schmidt_coefficients(term.partition)
            if abs(coeffs[0] - psi.norm) > rtol * psi.norm:
                problems.append(
                    f"term {i} component {j} is not a product across "
                    f"{term.partition.label} (top Schmidt {coeffs[0]:.12f} "
                    f"vs norm {psi.norm:.12f})")
    for w, _ in decomposition.residue:
        if w < 0:
            problems.append("negative residue weight")
    return not problems, problems
