"""Zero-temperature relaxation of GHZ states and entanglement survival.

Single-qubit relaxation sends |1><1| to x |1><1| + (1-x) |0><0| and scales
coherences by sqrt(x), with x = exp(-gamma t).  A GHZ state under this
channel keeps a closed form: weight-shell diagonals plus one corner
coherence.  Balancing it with the diagonal filter of strength
alpha^4 = x/(1-x) yields a state that differs from a GHZ-diagonal one only
in the (0...0) population, which never enters the corner criterion, so the
criterion decides genuine multipartite entanglement exactly and the
survival time has an analytic form.
"""

import math
from dataclasses import dataclass

import numpy as np

from .criteria import ghzN_biseparability
from .families import CornerDiagonalState
from .filters import relaxation_balance_alpha
from .qstate import DensityMatrix, EntcritError, _apply_one_site


@dataclass(frozen=True)
class RelaxationParams:
    """Decay rate and elapsed time; x = exp(-gamma t) in (0, 1]."""

    gamma: float
    t: float

    def __post_init__(self):
        if not self.gamma > 0:
            raise EntcritError("decay rate must be positive")
        if self.t < 0:
            raise EntcritError("time must be nonnegative")

    @property
    def x(self):
        return math.exp(-self.gamma * self.t)


def relaxation_channel(rho, x, qubits=None):
    """Apply the zero-temperature relaxation channel to selected qubits.

    Parameters
    ----------
    rho : DensityMatrix
    x : float in (0, 1], the surviving excited-state population fraction
    qubits : iterable of qubit positions, default all

    Trace preserving and positivity preserving; x = 1 is the identity.
    """
    if not 0.0 < x <= 1.0:
        raise EntcritError(f"relaxation parameter {x} outside (0, 1]")
    targets = range(rho.n_qubits) if qubits is None else tuple(qubits)
    k0 = np.array([[1.0, 0.0], [0.0, math.sqrt(x)]], dtype=complex)
    k1 = np.array([[0.0, math.sqrt(1.0 - x)], [0.0, 0.0]], dtype=complex)
    mat = rho.matrix
    for q in targets:
        if not 0 <= q < rho.n_qubits:
            raise EntcritError(f"qubit {q} out of range")
        acc = np.zeros_like(mat)
        for k in (k0, k1):
            term = _apply_one_site(k, mat, q, rho.n_qubits, adjoint_side=False)
            acc += _apply_one_site(k, term, q, rho.n_qubits, adjoint_side=True)
        mat = acc
    return DensityMatrix(mat, validate=False)


def relaxed_ghz_shells(n_qubits, x):
    """Closed form of the GHZ state after relaxation on every qubit.

    Diagonal entries depend only on the Hamming weight w:
    [delta_{w,0} + x^w (1-x)^(N-w)] / 2; the corner coherence is
    x^(N/2) / 2 (half the pure-GHZ value scaled by sqrt(x) per qubit).
    The trace stays exactly one.
    """
    if n_qubits < 2:
        raise EntcritError("needs at least 2 qubits")
    if not 0.0 < x <= 1.0:
        raise EntcritError(f"relaxation parameter {x} outside (0, 1]")
    shells = []
    for w in range(n_qubits + 1):
        val = x ** w * (1.0 - x) ** (n_qubits - w)
        if w == 0:
            val += 1.0
        shells.append(val / 2.0)
    return CornerDiagonalState(n_qubits, tuple(shells), x ** (n_qubits / 2.0) / 2.0)


def relaxed_ghz(n_qubits, x):
    """Dense density matrix of the relaxed GHZ state."""
    return relaxed_ghz_shells(n_qubits, x).to_density_matrix()


def apply_balance_filter(state, x):
    """Filter a corner-diagonal state with alpha^4 = x/(1-x) on every qubit.

    The diagonal at weight w scales by alpha^(2N-4w); the corner picks up
    alpha^N / alpha^N = 1.  Applied to the relaxed GHZ state this equalizes
    all diagonals of weight 1..N, leaving only the (0...0) excess.
    """
    alpha = relaxation_balance_alpha(x)
    n = state.n_qubits
    shells = tuple(d * alpha ** (2 * n - 4 * w)
                   for w, d in enumerate(state.shell_diagonals))
    return CornerDiagonalState(n, shells, state.corner)


def gme_survival_threshold(n_qubits, gamma):
    """Analytic time past which the relaxed GHZ state stops being GME.

    t* = -ln[1 - (2^(N-1) - 1)^(-2/N)] / gamma.  For N = 2 the expression
    diverges: the state stays genuinely entangled for every finite time,
    reported as infinity rather than an error.
    """
    if n_qubits < 2:
        raise EntcritError("needs at least 2 qubits")
    if not gamma > 0:
        raise EntcritError("decay rate must be positive")
    base = (2 ** (n_qubits - 1) - 1) ** (-2.0 / n_qubits)
    if base >= 1.0:
        return math.inf
    return -math.log(1.0 - base) / gamma


def survival_margin(n_qubits, gamma, t):
    """Criterion margin of the filtered relaxed GHZ state at time t."""
    x = RelaxationParams(gamma, t).x
    state = relaxed_ghz_shells(n_qubits, x)
    if x < 1.0:
        state = apply_balance_filter(state, x)
    return ghzN_biseparability(state).margin


def gme_survival_numeric(n_qubits, gamma, tol=1e-6):
    """Survival time by bisection of the filtered-criterion margin.

    Brackets the sign change starting from 1/gamma and bisects the time
    axis to the requested width.  Raises if no sign change is found, which
    happens only in the N = 2 edge case where the threshold is infinite.
    """
    if survival_margin(n_qubits, gamma, 0.0) <= 0.0:
        raise EntcritError("no violation at t = 0; nothing to bracket")
    lo, hi = 0.0, 1.0 / gamma
    for _ in range(200):
        if survival_margin(n_qubits, gamma, hi) < 0.0:
            break
        lo, hi = hi, 2.0 * hi
    else:
        raise EntcritError("criterion margin never changes sign; "
                           "threshold appears unbounded")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if survival_margin(n_qubits, gamma, mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
