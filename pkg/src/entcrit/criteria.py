"""Separability inequalities on density-matrix elements.

Three groups of criteria live here:

* biseparability criteria built from a target pure state (GHZ, W and Dicke
  targets are provided hand-coded; :func:`derive_biseparability_criterion`
  constructs the same objects generically for any suitable target),
* full-separability criteria given by balanced diagonal monomials bounding
  the corner coherence, together with the canned substitution suite,
* the fidelity reformulation of the three-qubit W criterion for experiments
  that measure a fidelity plus populations instead of full tomography.

A criterion evaluates to a :class:`CriterionReport`; ``violated`` means the
left-hand side exceeds the right-hand side by more than 1e-10 * trace, so a
violation certifies the corresponding entanglement class exclusion while
boundary states report non-violation.
"""

from collections import defaultdict
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from math import comb, exp, log, sqrt

from .families import CornerDiagonalState, w as _w_state
from .qstate import (
    EntcritError,
    all_bipartitions,
    complement,
    diagonal_entry,
    fidelity,
    tuple_to_index,
    tuples_of_weight,
)

VIOLATION_RTOL = 1e-10


class CriterionDerivationError(EntcritError):
    """Raised when no sound criterion can be derived for a target."""


@dataclass(frozen=True)
class CriterionReport:
    """Outcome of one inequality on one state."""

    criterion_id: str
    lhs: float
    rhs: float
    margin: float
    violated: bool

    @classmethod
    def from_values(cls, criterion_id, lhs, rhs, trace):
        lhs, rhs = float(lhs), float(rhs)
        margin = lhs - rhs
        return cls(criterion_id, lhs, rhs, margin,
                   bool(margin > VIOLATION_RTOL * abs(trace)))


def offdiag_sum(rho, target):
    """Sum of |rho_{I,J}| over upper-triangle entries where the target lives.

    The pairs (I, J) run over distinct support indices of the target state.
    """
    if rho.n_qubits != target.n_qubits:
        raise EntcritError("state and target qubit counts differ")
    support = sorted(target.support(), key=tuple_to_index)
    total = 0.0
    for a, b in combinations(support, 2):
        total += abs(rho.entry(a, b))
    return total


# ---------------------------------------------------------------------------
# Biseparability criteria as explicit term collections
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BiseparabilityCriterion:
    """A criterion lhs <= rhs with

    lhs  = sum over support pairs (I < J) of |rho_{I,J}|,
    rhs  = sum of sqrt(rho_I rho_J) over ``sqrt_terms``
           + sum of coeff * rho_I over ``diag_terms``.

    Satisfied by every biseparable state; violation certifies genuine
    multipartite entanglement.
    """

    criterion_id: str
    n_qubits: int
    support: tuple
    sqrt_terms: tuple        # ((I, J), ...) with I < J in row order
    diag_terms: tuple        # ((I, coeff), ...)

    def evaluate(self, rho):
        if rho.n_qubits != self.n_qubits:
            raise EntcritError(
                f"criterion {self.criterion_id} needs {self.n_qubits} qubits, "
                f"state has {rho.n_qubits}")
        lhs = 0.0
        for a, b in combinations(self.support, 2):
            lhs += abs(rho.entry(a, b))
        rhs = 0.0
        for a, b in self.sqrt_terms:
            rhs += sqrt(diagonal_entry(rho, a) * diagonal_entry(rho, b))
        for a, coeff in self.diag_terms:
            rhs += coeff * diagonal_entry(rho, a)
        return CriterionReport.from_values(self.criterion_id, lhs, rhs, rho.trace)

    def same_terms(self, other):
        """Term-for-term structural equality, ignoring the ids."""
        return (self.n_qubits == other.n_qubits
                and set(self.support) == set(other.support)
                and set(self.sqrt_terms) == set(other.sqrt_terms)
                and dict(self.diag_terms) == dict(other.diag_terms))


def _ordered_pair(a, b):
    return (a, b) if tuple_to_index(a) < tuple_to_index(b) else (b, a)


@lru_cache(maxsize=None)
def ghz_criterion(n_qubits):
    """Corner coherence against the paired-diagonal geometric means.

    rhs sums sqrt(rho_I rho_Ibar) once per complement pair with
    1 <= |I| <= N-1; exact (necessary and sufficient) on GHZ-diagonal states.
    """
    if n_qubits < 2:
        raise EntcritError("needs at least 2 qubits")
    support = ((0,) * n_qubits, (1,) * n_qubits)
    terms = []
    seen = set()
    for w in range(1, n_qubits):
        for t in tuples_of_weight(n_qubits, w):
            key = frozenset((t, complement(t)))
            if key not in seen:
                seen.add(key)
                terms.append(_ordered_pair(t, complement(t)))
    return BiseparabilityCriterion(
        f"ghz{n_qubits}" if n_qubits == 3 else "ghzN",
        n_qubits, support, tuple(sorted(terms, key=lambda p: tuple_to_index(p[0]))), ())


def w3_criterion():
    """Three-qubit W-state criterion: weight-1 coherences against
    sqrt(rho_(000) rho_I) over weight-2 I plus half the weight-1 populations."""
    support = tuple(tuples_of_weight(3, 1))
    zero = (0, 0, 0)
    sqrt_terms = tuple(_ordered_pair(zero, t) for t in tuples_of_weight(3, 2))
    diag_terms = tuple((t, 0.5) for t in tuples_of_weight(3, 1))
    return BiseparabilityCriterion("w3", 3, support, sqrt_terms, diag_terms)


def w4_criterion():
    """Four-qubit W-state criterion (unit weight on the populations)."""
    support = tuple(tuples_of_weight(4, 1))
    zero = (0, 0, 0, 0)
    sqrt_terms = tuple(_ordered_pair(zero, t) for t in tuples_of_weight(4, 2))
    diag_terms = tuple((t, 1.0) for t in tuples_of_weight(4, 1))
    return BiseparabilityCriterion("w4", 4, support, sqrt_terms, diag_terms)


def dicke4_criterion():
    """Four-qubit two-excitation Dicke criterion with coefficient 3/2."""
    support = tuple(tuples_of_weight(4, 2))
    sqrt_terms = [((0, 0, 0, 0), (1, 1, 1, 1))]
    for a in tuples_of_weight(4, 1):
        for b in tuples_of_weight(4, 3):
            sqrt_terms.append(_ordered_pair(a, b))
    diag_terms = tuple((t, 1.5) for t in tuples_of_weight(4, 2))
    return BiseparabilityCriterion("dicke4", 4, support, tuple(sqrt_terms), diag_terms)


def fullsep_w3_criterion():
    """Full-separability counterpart of the W criterion (no population term)."""
    support = tuple(tuples_of_weight(3, 1))
    zero = (0, 0, 0)
    sqrt_terms = tuple(_ordered_pair(zero, t) for t in tuples_of_weight(3, 2))
    return BiseparabilityCriterion("fullsep-w3", 3, support, sqrt_terms, ())


_GHZ3 = ghz_criterion(3)
_W3 = w3_criterion()
_W4 = w4_criterion()
_DICKE4 = dicke4_criterion()
_FULLSEP_W3 = fullsep_w3_criterion()


def ghz3_biseparability(rho):
    """Evaluate the three-qubit GHZ criterion."""
    return _GHZ3.evaluate(rho)


def ghzN_biseparability(state):
    """Evaluate the N-qubit GHZ criterion.

    Accepts a dense :class:`DensityMatrix` or, for large N, a closed-form
    :class:`CornerDiagonalState`, for which the right-hand side is the
    binomially weighted sum over Hamming-weight shells.
    """
    if isinstance(state, CornerDiagonalState):
        n = state.n_qubits
        d = state.shell_diagonals
        rhs = 0.5 * sum(comb(n, w) * sqrt(max(d[w], 0.0) * max(d[n - w], 0.0))
                        for w in range(1, n))
        return CriterionReport.from_values("ghzN", abs(state.corner), rhs, state.trace)
    report = ghz_criterion(state.n_qubits).evaluate(state)
    return CriterionReport("ghzN", report.lhs, report.rhs, report.margin,
                           report.violated)


def w3_biseparability(rho):
    return _W3.evaluate(rho)


def w4_biseparability(rho):
    return _W4.evaluate(rho)


def dicke4_biseparability(rho):
    return _DICKE4.evaluate(rho)


def fullsep_w3(rho):
    """Full-separability test sharp near the three-qubit W state."""
    return _FULLSEP_W3.evaluate(rho)


# ---------------------------------------------------------------------------
# Generic derivation from a target state
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OffDiagonalBound:
    """Bound on |rho_{I,J}| valid for states separable across one cut.

    ``sqrt`` form: the element is bounded by sqrt(rho_M1 rho_M2) where the
    mixed tuples M1, M2 take the bits of I on one side of the cut and of J
    on the other.  ``internal`` form (indices differing on a single side):
    the positivity bound (rho_I + rho_J) / 2, valid for any state.
    """

    kind: str
    indices: tuple

    def evaluate(self, rho):
        a, b = self.indices
        if self.kind == "sqrt":
            return sqrt(diagonal_entry(rho, a) * diagonal_entry(rho, b))
        return 0.5 * (diagonal_entry(rho, a) + diagonal_entry(rho, b))


def _mixed_tuples(index_a, index_b, partition):
    side = set(partition.side_a)
    m1 = tuple(index_a[q] if q in side else index_b[q] for q in range(len(index_a)))
    m2 = tuple(index_b[q] if q in side else index_a[q] for q in range(len(index_a)))
    return m1, m2


def estimate_offdiagonal(index_a, index_b, partition):
    """Per-bipartition estimation rule for a single off-diagonal element."""
    if index_a == index_b:
        raise EntcritError("need two distinct index tuples")
    if partition.separates(index_a, index_b):
        return OffDiagonalBound("sqrt", _mixed_tuples(index_a, index_b, partition))
    return OffDiagonalBound("internal", _ordered_pair(index_a, index_b))


def derive_biseparability_criterion(target, criterion_id=None):
    """Build a biseparability criterion for an arbitrary target state.

    For every bipartition, each support pair is bounded by its crossing
    sqrt form when the cut separates the pair; pairs internal to one side
    are bounded collectively through the positive-block trace bound
    sum_{i<j} |P_ij| <= (n-1)/2 * Tr(P).  Crossing bounds whose mixed
    tuples fall back onto the support diagonal are absorbed into the
    population penalty; the final coefficient is the worst per-index load
    over all bipartitions.  Mixed tuples straddling the support boundary
    admit no sound uniform absorption and the target is refused.
    """
    n = target.n_qubits
    support = sorted(target.support(), key=tuple_to_index)
    if len(support) < 2:
        raise CriterionDerivationError("target must populate at least two basis states")
    support_set = set(support)
    sqrt_terms = set()
    capable = set()
    max_load = 0.0
    for partition in all_bipartitions(n):
        load = defaultdict(float)
        for side in (partition.side_a, partition.side_b):
            groups = defaultdict(list)
            for t in support:
                groups[tuple(t[q] for q in side)].append(t)
            for members in groups.values():
                if len(members) >= 2:
                    for t in members:
                        load[t] += (len(members) - 1) / 2.0
        for a, b in combinations(support, 2):
            if not partition.separates(a, b):
                continue
            m1, m2 = _mixed_tuples(a, b, partition)
            inside = (m1 in support_set) + (m2 in support_set)
            if inside == 2:
                load[m1] += 0.5
                load[m2] += 0.5
            elif inside == 0:
                sqrt_terms.add(frozenset((m1, m2)))
            else:
                raise CriterionDerivationError(
                    f"support pair {a}, {b} maps to mixed tuples {m1}, {m2} that "
                    f"straddle the support under partition {partition.label}")
        for t, value in load.items():
            if value > 0.0:
                capable.add(t)
            max_load = max(max_load, value)
    diag_terms = tuple((t, max_load) for t in sorted(capable, key=tuple_to_index))
    ordered = sorted((_ordered_pair(*term) for term in sqrt_terms),
                     key=lambda p: (tuple_to_index(p[0]), tuple_to_index(p[1])))
    return BiseparabilityCriterion(
        criterion_id or "derived", n, tuple(support), tuple(ordered), diag_terms)


# ---------------------------------------------------------------------------
# Full-separability monomial calculus
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MonomialCriterion:
    """|rho_{1,2^N}| <= (prod rho_I^{w_I})^(1/k) with k = sum of weights.

    The balance condition (for every qubit the weights split evenly between
    its 0- and 1-side) makes the bound an equality on every pure product
    state, which is exactly what soundness under mixing requires.
    """

    criterion_id: str
    n_qubits: int
    weights: tuple           # ((I, w_I), ...)

    def __post_init__(self):
        ws = tuple(sorted(((tuple(t), int(v)) for t, v in self.weights),
                          key=lambda item: tuple_to_index(item[0])))
        if not ws or any(v <= 0 for _, v in ws):
            raise EntcritError("weights must be positive integers")
        total = sum(v for _, v in ws)
        for q in range(self.n_qubits):
            zero_side = sum(v for t, v in ws if t[q] == 0)
            if 2 * zero_side != total:
                raise EntcritError(
                    f"unbalanced monomial: qubit {q} splits {zero_side} vs "
                    f"{total - zero_side}")
        object.__setattr__(self, "weights", ws)

    @property
    def root(self):
        return sum(v for _, v in self.weights)

    def evaluate(self, rho):
        if rho.n_qubits != self.n_qubits:
            raise EntcritError("qubit count mismatch")
        zero = (0,) * self.n_qubits
        lhs = abs(rho.entry(zero, complement(zero)))
        log_sum = 0.0
        vanished = False
        for t, v in self.weights:
            d = diagonal_entry(rho, t)
            if d <= 0.0:
                vanished = True
                break
            log_sum += v * log(d)
        rhs = 0.0 if vanished else exp(log_sum / self.root)
        return CriterionReport.from_values(self.criterion_id, lhs, rhs, rho.trace)


def _monomial(criterion_id, weight_map):
    return MonomialCriterion(criterion_id, 3, tuple(weight_map.items()))


# Base: the six middle diagonal entries, one each.
_BASE = _monomial("fullsep-base", {
    (0, 0, 1): 1, (0, 1, 0): 1, (0, 1, 1): 1,
    (1, 0, 0): 1, (1, 0, 1): 1, (1, 1, 0): 1})

# Single substitutions of a balanced diagonal pair, named by the 1-based
# matrix positions they replace and introduce.
_SUBSTITUTIONS = (
    _monomial("fullsep-sub-22.33-11.44", {
        (0, 0, 0): 1, (0, 1, 1): 2, (1, 0, 0): 1, (1, 0, 1): 1, (1, 1, 0): 1}),
    _monomial("fullsep-sub-66.77-55.88", {
        (0, 0, 1): 1, (0, 1, 0): 1, (0, 1, 1): 1, (1, 0, 0): 2, (1, 1, 1): 1}),
    _monomial("fullsep-sub-22.55-11.66", {
        (0, 0, 0): 1, (0, 1, 0): 1, (0, 1, 1): 1, (1, 0, 1): 2, (1, 1, 0): 1}),
    _monomial("fullsep-sub-44.77-33.88", {
        (0, 0, 1): 1, (0, 1, 0): 2, (1, 0, 0): 1, (1, 0, 1): 1, (1, 1, 1): 1}),
    _monomial("fullsep-sub-33.55-11.77", {
        (0, 0, 0): 1, (0, 0, 1): 1, (0, 1, 1): 1, (1, 0, 1): 1, (1, 1, 0): 2}),
    _monomial("fullsep-sub-44.66-22.88", {
        (0, 0, 1): 2, (0, 1, 0): 1, (1, 0, 0): 1, (1, 1, 0): 1, (1, 1, 1): 1}),
)

# Two substitutions combined collapse to a quartic monomial.
_QUARTIC = _monomial("fullsep-quartic", {
    (0, 0, 1): 1, (0, 1, 0): 1, (1, 0, 0): 1, (1, 1, 1): 1})

SUBSTITUTION_SUITE = (_BASE,) + _SUBSTITUTIONS + (_QUARTIC,)


def fullsep_base(rho):
    """Corner coherence against the geometric mean of the six middle diagonals."""
    return _BASE.evaluate(rho)


def fullsep_monomial(rho, criterion):
    """Evaluate one balanced monomial criterion."""
    return criterion.evaluate(rho)


@dataclass(frozen=True)
class SuiteResult:
    reports: tuple

    @property
    def best(self):
        return max(self.reports, key=lambda r: r.margin)

    @property
    def any_violated(self):
        return any(r.violated for r in self.reports)


def substitution_suite(rho):
    """Run the base monomial, its six single substitutions and the quartic."""
    return SuiteResult(tuple(m.evaluate(rho) for m in SUBSTITUTION_SUITE))


# ---------------------------------------------------------------------------
# Fidelity form of the W criterion
# ---------------------------------------------------------------------------

def w3_fidelity_form(f_value, diagonals):
    """W-state detection from a measured fidelity plus the eight populations.

    Violated when F exceeds two thirds of (sqrt(rho11 rho44) +
    sqrt(rho11 rho66) + sqrt(rho11 rho77) + rho22 + rho33 + rho55);
    equivalent to the full W criterion with the coherences replaced by the
    fidelity, so five local measurement settings suffice.
    """
    if not 0.0 <= f_value <= 1.0:
        raise EntcritError(f"fidelity {f_value} outside [0, 1]")
    d = [max(float(v), 0.0) for v in diagonals]
    if len(d) != 8:
        raise EntcritError("need eight diagonal entries")
    rhs = (2.0 / 3.0) * (sqrt(d[0] * d[3]) + sqrt(d[0] * d[5]) + sqrt(d[0] * d[6])
                         + d[1] + d[2] + d[4])
    return CriterionReport.from_values("w3-fidelity", f_value, rhs, sum(d))


# ---------------------------------------------------------------------------
# Registry for CLI selection
# ---------------------------------------------------------------------------

def _suite_best(rho):
    best = substitution_suite(rho).best
    return CriterionReport(f"fullsep-suite:{best.criterion_id}", best.lhs,
                           best.rhs, best.margin, best.violated)


def _w3_fidelity_on_state(rho):
    """The fidelity-form test computed from a full density matrix."""
    rho = rho.normalized()
    return w3_fidelity_form(fidelity(rho, _w_state(3)), rho.diagonal())


_REGISTRY = {
    "ghz3": (lambda n: n == 3, ghz3_biseparability),
    "ghzN": (lambda n: n >= 2, ghzN_biseparability),
    "w3": (lambda n: n == 3, w3_biseparability),
    "w4": (lambda n: n == 4, w4_biseparability),
    "dicke4": (lambda n: n == 4, dicke4_biseparability),
    "fullsep-base": (lambda n: n == 3, fullsep_base),
    "fullsep-suite": (lambda n: n == 3, _suite_best),
    "fullsep-w3": (lambda n: n == 3, fullsep_w3),
    "w3-fidelity": (lambda n: n == 3, _w3_fidelity_on_state),
}

GME_CRITERIA = ("ghz3", "ghzN", "w4", "dicke4", "w3", "w3-fidelity")
FULLSEP_CRITERIA = ("fullsep-base", "fullsep-suite", "fullsep-w3")


def criterion_ids():
    return tuple(_REGISTRY)


def applicable_criteria(n_qubits):
    return tuple(cid for cid, (pred, _) in _REGISTRY.items() if pred(n_qubits))


def evaluate_criterion(criterion_id, state):
    """Evaluate one registered criterion (or ``derived:<target>``) on a state.

    Closed-form corner-diagonal states are evaluated directly by the
    N-qubit GHZ criterion and densified for everything else.
    """
    if isinstance(state, CornerDiagonalState) and criterion_id != "ghzN":
        state = state.to_density_matrix()
    if criterion_id.startswith("derived:"):
        crit = derived_criterion_by_name(criterion_id.split(":", 1)[1])
        return crit.evaluate(state)
    try:
        pred, fn = _REGISTRY[criterion_id]
    except KeyError:
        raise EntcritError(f"unknown criterion {criterion_id!r}") from None
    if not pred(state.n_qubits):
        raise EntcritError(
            f"criterion {criterion_id!r} does not apply to {state.n_qubits} qubits")
    return fn(state)


def derived_criterion_by_name(name):
    """Derive a criterion for a named target like ghz3, w4 or dicke4-2."""
    from . import families

    name = name.lower()
    if name.startswith("ghz"):
        target = families.ghz(int(name[3:]))
    elif name.startswith("dicke"):
        body = name[5:]
        n_str, _, k_str = body.partition("-")
        target = families.dicke(int(n_str), int(k_str) if k_str else 2)
    elif name.startswith("w"):
        target = families.w(int(name[1:]))
    else:
        raise EntcritError(f"unknown derivation target {name!r}")
    return derive_biseparability_criterion(target, criterion_id=f"derived:{name}")
