"""Independent verification machinery.

Random biseparable and product states (with seeded, reproducible draws),
partial-transpose checks, Monte-Carlo soundness sweeps asserting that no
criterion ever fires on states it must not fire on, and the bisection
harness that turns criterion margins into noise thresholds.
"""

from dataclasses import dataclass

import numpy as np

from . import families
from .criteria import evaluate_criterion
from .qstate import (
    DensityMatrix,
    EntcritError,
    PSD_RTOL,
    PureState,
    all_bipartitions,
    partial_transpose,
)

SOUNDNESS_RTOL = 1e-12


def _rng(seed_or_rng):
    if isinstance(seed_or_rng, np.random.Generator):
        return seed_or_rng
    return np.random.default_rng(seed_or_rng)


def _gaussian_unit_vector(dim, rng):
    vec = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return vec / np.linalg.norm(vec)


def random_pure_product(n_qubits, seed=0):
    """Tensor product of independent Haar-random one-qubit states."""
    rng = _rng(seed)
    amp = np.ones(1, dtype=complex)
    for _ in range(n_qubits):
        amp = np.kron(amp, _gaussian_unit_vector(2, rng))
    return PureState(amp, n_qubits)


def random_pure_biseparable(n_qubits, partition, seed=0):
    """Haar-like random state on side A tensored with one on side B.

    Generically entangled inside each side, so it exercises the criteria
    away from the fully separable corner of the biseparable set.
    """
    rng = _rng(seed)
    side_a, side_b = partition.side_a, partition.side_b
    ta = _gaussian_unit_vector(2 ** len(side_a), rng).reshape((2,) * len(side_a))
    tb = _gaussian_unit_vector(2 ** len(side_b), rng).reshape((2,) * len(side_b))
    tensor = np.multiply.outer(ta, tb)
    tensor = np.moveaxis(tensor, range(n_qubits), side_a + side_b)
    return PureState(tensor.reshape(-1), n_qubits)


def random_biseparable_mixture(n_qubits, seed=0, max_components=8):
    """Convex mixture of pure biseparable states over random bipartitions."""
    rng = _rng(seed)
    cuts = all_bipartitions(n_qubits)
    k = int(rng.integers(1, max_components + 1))
    weights = rng.dirichlet(np.ones(k))
    dim = 2 ** n_qubits
    mat = np.zeros((dim, dim), dtype=complex)
    for w in weights:
        cut = cuts[rng.integers(len(cuts))]
        psi = random_pure_biseparable(n_qubits, cut, rng).amplitudes
        mat += w * np.outer(psi, psi.conj())
    return DensityMatrix(mat, validate=False)


def random_product_mixture(n_qubits, seed=0, max_components=8):
    """Convex mixture of random pure product states (fully separable)."""
    rng = _rng(seed)
    k = int(rng.integers(1, max_components + 1))
    weights = rng.dirichlet(np.ones(k))
    dim = 2 ** n_qubits
    mat = np.zeros((dim, dim), dtype=complex)
    for w in weights:
        psi = random_pure_product(n_qubits, rng).amplitudes
        mat += w * np.outer(psi, psi.conj())
    return DensityMatrix(mat, validate=False)


def ppt_check(rho, partition):
    """Positivity of the partial transpose across one cut.

    Returns (ok, min_eigenvalue); a negative eigenvalue certifies
    entanglement across the cut, while ok says nothing beyond PPT.
    """
    pt = partial_transpose(rho, partition)
    min_eig = pt.min_eigenvalue()
    return min_eig >= -PSD_RTOL * rho.trace, min_eig


def ppt_all_bipartitions(rho):
    """PPT verdict for every cut; True only if all pass."""
    results = {}
    for cut in all_bipartitions(rho.n_qubits):
        results[cut.label] = ppt_check(rho, cut)
    return all(ok for ok, _ in results.values()), results


# ---------------------------------------------------------------------------
# Threshold bisection
# ---------------------------------------------------------------------------

def threshold_bisection(family, criterion_id, lo, hi, tol=1e-6):
    """Locate the margin sign change of a one-parameter state family.

    ``family`` maps a parameter to a state.  The margins at ``lo`` and
    ``hi`` must have opposite signs; the returned parameter is the
    midpoint of the final bracket of width at most ``tol``.
    """
    margin_lo = evaluate_criterion(criterion_id, family(lo)).margin
    margin_hi = evaluate_criterion(criterion_id, family(hi)).margin
    if not margin_lo * margin_hi < 0.0:
        raise EntcritError(
            f"no sign change on [{lo}, {hi}]: margins {margin_lo:.3e}, {margin_hi:.3e}")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if (evaluate_criterion(criterion_id, family(mid)).margin > 0.0) == (margin_lo > 0.0):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class SweepResult:
    """Threshold plus margin curve for one family at one qubit count."""

    family_id: str
    criterion_id: str
    n_qubits: int
    grid: tuple
    reports: tuple
    threshold: float
    tolerance: float


def noise_family(family_id, n_qubits):
    """Resolve a family id to (parameter -> state, default criterion id)."""
    if family_id == "ghz-noise":
        return (lambda p: families.noisy_ghz_shells(n_qubits, p)), "ghzN"
    if family_id == "w-noise":
        if n_qubits == 3:
            return (lambda p: families.white_noise_mix(families.w(3), p)), "w3"
        if n_qubits == 4:
            return (lambda p: families.white_noise_mix(families.w(4), p)), "w4"
        raise EntcritError("w-noise criteria exist for 3 or 4 qubits")
    if family_id == "dicke-noise":
        if n_qubits != 4:
            raise EntcritError("dicke-noise is defined for 4 qubits")
        return (lambda p: families.white_noise_mix(families.dicke(4, 2), p)), "dicke4"
    raise EntcritError(f"unknown family {family_id!r}")


def sweep_noise_family(family_id, n_qubits, criterion_id=None, tol=1e-6,
                       grid_points=41):
    """Bisect the detection threshold and tabulate the margin curve."""
    family, default_cid = noise_family(family_id, n_qubits)
    cid = criterion_id or default_cid
    grid = tuple(np.linspace(0.0, 1.0, grid_points))
    reports = tuple(evaluate_criterion(cid, family(p)) for p in grid)
    threshold = threshold_bisection(family, cid, 0.0, 1.0, tol)
    return SweepResult(family_id, cid, n_qubits, grid, reports, threshold, tol)


# ---------------------------------------------------------------------------
# Monte-Carlo soundness harness
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SoundnessReport:
    criterion_id: str
    n_qubits: int
    samples: int
    seed: int
    max_margin: float
    worst_sample: int
    failures: tuple          # sample indices with margin above tolerance

    @property
    def passed(self):
        return not self.failures


def _soundness_states(criterion_id, n_qubits, samples, seed):
    """Yield states the criterion must never fire on."""
    rng = np.random.default_rng(seed)
    fullsep = criterion_id.startswith("fullsep")
    cuts = all_bipartitions(n_qubits)
    for i in range(samples):
        if fullsep:
            if i % 2 == 0:
                yield i, random_pure_product(n_qubits, rng).density_matrix()
            else:
                yield i, random_product_mixture(n_qubits, rng)
        else:
            if i % 2 == 0:
                cut = cuts[i // 2 % len(cuts)]
                yield i, random_pure_biseparable(n_qubits, cut, rng).density_matrix()
            else:
                yield i, random_biseparable_mixture(n_qubits, rng)


def soundness_sweep(criterion_id, n_qubits, samples=1000, seed=0):
    """Check a criterion against states of the class it must respect.

    Biseparability criteria face pure biseparable states cycling through
    every bipartition plus random mixtures of them; full-separability
    criteria face product states and their mixtures.  Margins must stay
    at or below 1e-12 times the trace.
    """
    max_margin = -np.inf
    worst = -1
    failures = []
    for i, rho in _soundness_states(criterion_id, n_qubits, samples, seed):
        margin = evaluate_criterion(criterion_id, rho).margin
        if margin > max_margin:
            max_margin, worst = margin, i
        if margin > SOUNDNESS_RTOL * rho.trace:
            failures.append(i)
    return SoundnessReport(criterion_id, n_qubits, samples, seed,
                           float(max_margin), worst, tuple(failures))
