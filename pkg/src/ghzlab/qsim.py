"""Dense statevector simulation for small collections of two-level sites.

Conventions, fixed here and relied on by every other module:

* Basis index: site ``k`` occupies bit ``k`` of the amplitude index, so
  site 0 is the lowest-order bit.  Bit value 0 is spin up along z, bit
  value 1 is spin down along z.
* Pauli phases: ``sigma_y |up> = i |down>`` and ``sigma_y |down> = -i |up>``.
* Bell basis: ``Phi+- = (|uu> +- |dd>)/sqrt2`` and ``Psi+- = (|ud> +- |du>)/
  sqrt2``, where the first arrow belongs to the first site of the measured
  pair as passed to :func:`bell_measure`.

States are value objects: every operation returns a fresh ``StateVector``
and amplitude buffers are marked read-only.  Randomness enters only through
an explicit ``numpy.random.Generator`` argument, so all sampling is
reproducible and the functions here are pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

# Hard cap on dense representation size: 2**12 = 4096 amplitudes.
MAX_SITES = 12

# Tolerance for exact algebraic identities (norms, traces, eigenrelations).
ATOL_EXACT = 1e-12
# Tolerance for derived operator norms (commutators, convention checks).
ATOL_NORM = 1e-10
# Branches below this probability are treated as numerically impossible.
MIN_BRANCH_PROB = 1e-15

RandomSource = np.random.Generator


class Axis(Enum):
    """A spin measurement axis with outcomes +1 and -1."""

    X = "x"
    Y = "y"
    Z = "z"


class BellIndex(Enum):
    """The four maximally entangled two-site basis states."""

    PHI_PLUS = "phi_plus"
    PHI_MINUS = "phi_minus"
    PSI_PLUS = "psi_plus"
    PSI_MINUS = "psi_minus"

    @property
    def label(self) -> str:
        return {
            BellIndex.PHI_PLUS: "Phi+",
            BellIndex.PHI_MINUS: "Phi-",
            BellIndex.PSI_PLUS: "Psi+",
            BellIndex.PSI_MINUS: "Psi-",
        }[self]


_SQRT1_2 = 1.0 / math.sqrt(2.0)

_PAULI = {
    Axis.X: np.array([[0, 1], [1, 0]], dtype=complex),
    Axis.Y: np.array([[0, -1j], [1j, 0]], dtype=complex),
    Axis.Z: np.array([[1, 0], [0, -1]], dtype=complex),
}

# Components of the +1/-1 eigenvectors of each axis in the z basis.
_EIGVEC = {
    (Axis.X, 1): (_SQRT1_2, _SQRT1_2),
    (Axis.X, -1): (_SQRT1_2, -_SQRT1_2),
    (Axis.Y, 1): (_SQRT1_2, 1j * _SQRT1_2),
    (Axis.Y, -1): (_SQRT1_2, -1j * _SQRT1_2),
    (Axis.Z, 1): (1.0 + 0j, 0j),
    (Axis.Z, -1): (0j, 1.0 + 0j),
}

# Unitary mapping the +1/-1 eigenbasis of each axis onto |0>, |1>.
_TO_Z_BASIS = {
    Axis.X: np.array([[1, 1], [1, -1]], dtype=complex) * _SQRT1_2,
    Axis.Y: np.array([[1, -1j], [1, 1j]], dtype=complex) * _SQRT1_2,
    Axis.Z: np.eye(2, dtype=complex),
}

# Components of each Bell vector over the pair basis p = bit(s1) + 2*bit(s2).
_BELL_COMPONENTS = {
    BellIndex.PHI_PLUS: np.array([1, 0, 0, 1], dtype=complex) * _SQRT1_2,
    BellIndex.PHI_MINUS: np.array([1, 0, 0, -1], dtype=complex) * _SQRT1_2,
    BellIndex.PSI_PLUS: np.array([0, 1, 1, 0], dtype=complex) * _SQRT1_2,
    BellIndex.PSI_MINUS: np.array([0, -1, 1, 0], dtype=complex) * _SQRT1_2,
}


class StateVector:
    """Normalized pure state of ``num_sites`` two-level systems."""

    __slots__ = ("num_sites", "amps")

    def __init__(self, num_sites: int, amps, *, copy: bool = True):
        if not 1 <= num_sites <= MAX_SITES:
            raise ValueError(f"num_sites must be in [1, {MAX_SITES}], got {num_sites}")
        arr = np.array(amps, dtype=complex, copy=copy)
        if arr.shape != (1 << num_sites,):
            raise ValueError(
                f"expected {1 << num_sites} amplitudes for {num_sites} sites, got {arr.shape}"
            )
        if not np.all(np.isfinite(arr.view(np.float64))):
            raise ValueError("amplitudes must be finite")
        norm2 = np.vdot(arr, arr).real
        if abs(norm2 - 1.0) > ATOL_EXACT:
            raise ValueError(f"state is not normalized: |amps|^2 = {norm2!r}")
        arr.flags.writeable = False
        self.num_sites = num_sites
        self.amps = arr

    @classmethod
    def _renormalized(cls, num_sites: int, amps: np.ndarray) -> "StateVector":
        """Wrap amplitudes a kernel just renormalized, skipping validation.

        Internal fast path for measurement collapse, where the norm is 1 by
        construction; the buffer is still frozen before it escapes.
        """
        self = object.__new__(cls)
        amps.flags.writeable = False
        self.num_sites = num_sites
        self.amps = amps
        return self

    def amp(self, bits: str) -> complex:
        """Amplitude of a basis state given as a bit string, site 0 first."""
        if len(bits) != self.num_sites or any(c not in "01" for c in bits):
            raise ValueError(f"need {self.num_sites} chars of 0/1, got {bits!r}")
        index = sum(1 << k for k, c in enumerate(bits) if c == "1")
        return complex(self.amps[index])

    def dump_lines(self) -> list[str]:
        """Debug dump: one line 'bitstring re im' per basis state, site 0 first."""
        lines = []
        for i, a in enumerate(self.amps):
            bits = "".join("1" if (i >> k) & 1 else "0" for k in range(self.num_sites))
            lines.append(f"{bits} {a.real:.15g} {a.imag:.15g}")
        return lines

    def __repr__(self) -> str:
        return f"StateVector(num_sites={self.num_sites})"


@dataclass(frozen=True)
class ProductObservable:
    """An ordered product of single-site Pauli factors, eigenvalues +1/-1.

    Factors may repeat, e.g. for squared products, but all factors acting
    on one site must share the same axis, which keeps the product Hermitian
    and involutory.
    """

    factors: tuple[tuple[int, Axis], ...]

    def __post_init__(self):
        if not self.factors:
            raise ValueError("a product observable needs at least one factor")
        seen: dict[int, Axis] = {}
        for site, axis in self.factors:
            if site < 0:
                raise ValueError(f"negative site index {site}")
            if seen.setdefault(site, axis) is not axis:
                raise ValueError(
                    f"site {site} carries both {seen[site].value} and {axis.value}; "
                    "mixed-axis products on one site are not Hermitian"
                )

    @classmethod
    def of(cls, *factors: tuple[int, Axis]) -> "ProductObservable":
        return cls(tuple(factors))

    @property
    def max_site(self) -> int:
        return max(site for site, _ in self.factors)

    def label(self, site_names: Sequence[str] | None = None) -> str:
        parts = []
        for site, axis in self.factors:
            name = site_names[site] if site_names else str(site)
            parts.append(f"{axis.value}({name})")
        return "*".join(parts)


def pauli_product(axes: str, sites: Sequence[int] | None = None) -> ProductObservable:
    """Build a product observable from an axis string, e.g. ``"xyy"``.

    Character k acts on ``sites[k]`` (default: site k).
    """
    if sites is None:
        sites = range(len(axes))
    return ProductObservable(tuple((s, Axis(c.lower())) for s, c in zip(sites, axes)))


# ---------------------------------------------------------------------------
# State construction


def basis_state(bits: str) -> StateVector:
    """Computational basis state from a bit string, site 0 first (0 = up)."""
    n = len(bits)
    amps = np.zeros(1 << n, dtype=complex)
    amps[sum(1 << k for k, c in enumerate(bits) if c == "1")] = 1.0
    return StateVector(n, amps, copy=False)


def pauli_eigenstate(axis: Axis, sign: int) -> StateVector:
    """Single-site eigenstate of a Pauli axis with eigenvalue ``sign``."""
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    if axis is Axis.Z:
        amps = [1, 0] if sign == 1 else [0, 1]
    elif axis is Axis.X:
        amps = [_SQRT1_2, sign * _SQRT1_2]
    else:
        amps = [_SQRT1_2, sign * 1j * _SQRT1_2]
    return StateVector(1, np.array(amps, dtype=complex), copy=False)


@lru_cache(maxsize=1)
def make_ghz() -> StateVector:
    """Three-site state (|up,up,up> - |down,down,down>)/sqrt2.

    States are immutable, so the instance is cached and shared.
    """
    amps = np.zeros(8, dtype=complex)
    amps[0b000] = _SQRT1_2
    amps[0b111] = -_SQRT1_2
    return StateVector(3, amps, copy=False)


@lru_cache(maxsize=1)
def make_singlet() -> StateVector:
    """Two-site state (|up,down> - |down,up>)/sqrt2.

    States are immutable, so the instance is cached and shared.
    """
    amps = np.zeros(4, dtype=complex)
    amps[0b10] = _SQRT1_2  # site 0 up, site 1 down
    amps[0b01] = -_SQRT1_2
    return StateVector(2, amps, copy=False)


def tensor_product(a: StateVector, b: StateVector) -> StateVector:
    """Combined state; ``b``'s sites are renumbered after ``a``'s."""
    n = a.num_sites + b.num_sites
    if n > MAX_SITES:
        raise ValueError(f"{n} sites exceeds the {MAX_SITES}-site cap")
    # index = ia + (ib << a.num_sites), hence the kron order below
    return StateVector(n, np.kron(b.amps, a.amps), copy=False)


# ---------------------------------------------------------------------------
# Index bookkeeping for in-place-free kernel application


@lru_cache(maxsize=None)
def _site_split(n: int, site: int) -> tuple[np.ndarray, np.ndarray]:
    """Basis indices with bit ``site`` clear, and the same with it set."""
    idx = np.arange(1 << n)
    i0 = idx[((idx >> site) & 1) == 0]
    i1 = i0 + (1 << site)
    i0.flags.writeable = False
    i1.flags.writeable = False
    return i0, i1


@lru_cache(maxsize=None)
def _pair_split(n: int, s1: int, s2: int) -> tuple[np.ndarray, ...]:
    """Basis indices grouped by the pair value p = bit(s1) + 2*bit(s2)."""
    idx = np.arange(1 << n)
    base = idx[(((idx >> s1) & 1) == 0) & (((idx >> s2) & 1) == 0)]
    groups = (base, base + (1 << s1), base + (1 << s2), base + (1 << s1) + (1 << s2))
    for g in groups:
        g.flags.writeable = False
    return groups


def _apply_one_site(amps: np.ndarray, n: int, site: int, mat: np.ndarray) -> np.ndarray:
    if not 0 <= site < n:
        raise ValueError(f"site {site} out of range for {n} sites")
    i0, i1 = _site_split(n, site)
    a0 = amps[i0]
    a1 = amps[i1]
    out = np.empty_like(amps)
    out[i0] = mat[0, 0] * a0 + mat[0, 1] * a1
    out[i1] = mat[1, 0] * a0 + mat[1, 1] * a1
    return out


def _apply_factors(amps: np.ndarray, n: int, factors: Iterable[tuple[int, Axis]]) -> np.ndarray:
    # rightmost factor acts first, as in an operator product
    for site, axis in reversed(tuple(factors)):
        amps = _apply_one_site(amps, n, site, _PAULI[axis])
    return amps


def apply_product(state: StateVector, obs: ProductObservable) -> StateVector:
    """Apply a product observable as an operator (the result stays normalized)."""
    if obs.max_site >= state.num_sites:
        raise ValueError(f"observable site {obs.max_site} out of range")
    return StateVector(state.num_sites, _apply_factors(state.amps, state.num_sites, obs.factors), copy=False)


# ---------------------------------------------------------------------------
# Measurement and projection


def _pick_branch(rnd: RandomSource, p_plus: float) -> int:
    """Sample +1/-1 by the Born rule, clamping numerically dead branches."""
    p_minus = 1.0 - p_plus
    if p_plus < MIN_BRANCH_PROB and p_minus < MIN_BRANCH_PROB:
        raise RuntimeError("both measurement branches have zero probability")
    if p_plus < MIN_BRANCH_PROB:
        return -1
    if p_minus < MIN_BRANCH_PROB:
        return 1
    return 1 if rnd.random() < p_plus else -1


def _site_overlap(amps: np.ndarray, n: int, site: int, axis: Axis, outcome: int) -> np.ndarray:
    """Overlap field <outcome eigenstate|psi> over the remaining sites."""
    i0, i1 = _site_split(n, site)
    a0 = amps[i0]
    a1 = amps[i1]
    if axis is Axis.Z:
        return a0.copy() if outcome == 1 else a1.copy()
    if axis is Axis.X:
        return (a0 + a1) * _SQRT1_2 if outcome == 1 else (a0 - a1) * _SQRT1_2
    return (a0 - 1j * a1) * _SQRT1_2 if outcome == 1 else (a0 + 1j * a1) * _SQRT1_2


def _site_collapse(
    n: int, site: int, axis: Axis, outcome: int, coeff: np.ndarray, prob: float
) -> np.ndarray:
    """Rebuild the full renormalized state from an overlap field."""
    i0, i1 = _site_split(n, site)
    v0, v1 = _EIGVEC[(axis, outcome)]
    inv = 1.0 / math.sqrt(prob)
    out = np.zeros(1 << n, dtype=complex)
    if v0:
        out[i0] = (v0 * inv) * coeff
    if v1:
        out[i1] = (v1 * inv) * coeff
    return out


def measure_pauli(
    state: StateVector, site: int, axis: Axis, rnd: RandomSource
) -> tuple[int, StateVector]:
    """Projectively measure one Pauli axis on one site.

    Returns the sampled outcome (+1 or -1) and the renormalized collapsed
    state.  The input state is not modified.
    """
    n = state.num_sites
    if not 0 <= site < n:
        raise ValueError(f"site {site} out of range for {n} sites")
    c_plus = _site_overlap(state.amps, n, site, axis, 1)
    p_plus = float(np.vdot(c_plus, c_plus).real)
    outcome = _pick_branch(rnd, p_plus)
    if outcome == 1:
        coeff, prob = c_plus, p_plus
    else:
        coeff, prob = _site_overlap(state.amps, n, site, axis, -1), 1.0 - p_plus
    return outcome, StateVector._renormalized(n, _site_collapse(n, site, axis, outcome, coeff, prob))


def pauli_project(
    state: StateVector, site: int, axis: Axis, outcome: int
) -> tuple[float, StateVector | None]:
    """Probability of a given single-site outcome and the collapsed state.

    The collapsed state is ``None`` when the branch probability is below
    ``MIN_BRANCH_PROB``.
    """
    if outcome not in (1, -1):
        raise ValueError(f"outcome must be +1 or -1, got {outcome}")
    n = state.num_sites
    if not 0 <= site < n:
        raise ValueError(f"site {site} out of range for {n} sites")
    coeff = _site_overlap(state.amps, n, site, axis, outcome)
    p = float(np.vdot(coeff, coeff).real)
    if p < MIN_BRANCH_PROB:
        return 0.0, None
    return p, StateVector._renormalized(n, _site_collapse(n, site, axis, outcome, coeff, p))


def measure_product(
    state: StateVector, obs: ProductObservable, rnd: RandomSource
) -> tuple[int, StateVector]:
    """Measure a Pauli product as a single +1/-1 observable.

    Projects onto the degenerate eigenspaces (I + o*O)/2 and renormalizes.
    """
    n = state.num_sites
    if obs.max_site >= n:
        raise ValueError(f"observable site {obs.max_site} out of range")
    o_amps = _apply_factors(state.amps, n, obs.factors)
    w_plus = 0.5 * (state.amps + o_amps)
    p_plus = float(np.vdot(w_plus, w_plus).real)
    outcome = _pick_branch(rnd, p_plus)
    if outcome == 1:
        collapsed = w_plus / math.sqrt(p_plus)
    else:
        collapsed = (state.amps - w_plus) / math.sqrt(1.0 - p_plus)
    return outcome, StateVector(n, collapsed, copy=False)


def product_project(
    state: StateVector, obs: ProductObservable, outcome: int
) -> tuple[float, StateVector | None]:
    """Probability of a product-observable outcome and the collapsed state."""
    if outcome not in (1, -1):
        raise ValueError(f"outcome must be +1 or -1, got {outcome}")
    n = state.num_sites
    if obs.max_site >= n:
        raise ValueError(f"observable site {obs.max_site} out of range")
    o_amps = _apply_factors(state.amps, n, obs.factors)
    w = 0.5 * (state.amps + outcome * o_amps)
    p = float(np.vdot(w, w).real)
    if p < MIN_BRANCH_PROB:
        return 0.0, None
    return p, StateVector(n, w / math.sqrt(p), copy=False)


def expectation_product(state: StateVector, obs: ProductObservable) -> float:
    """Expectation value <state|O|state> of a Pauli product."""
    n = state.num_sites
    if obs.max_site >= n:
        raise ValueError(f"observable site {obs.max_site} out of range")
    value = np.vdot(state.amps, _apply_factors(state.amps, n, obs.factors))
    return float(value.real)


def bell_project(
    state: StateVector, s1: int, s2: int, which: BellIndex
) -> tuple[float, StateVector | None]:
    """Probability of one Bell outcome on sites (s1, s2) and the collapse."""
    n = state.num_sites
    if s1 == s2:
        raise ValueError("Bell measurement needs two distinct sites")
    if not (0 <= s1 < n and 0 <= s2 < n):
        raise ValueError(f"sites ({s1}, {s2}) out of range for {n} sites")
    groups = _pair_split(n, s1, s2)
    v = _BELL_COMPONENTS[which]
    coeff = sum(np.conj(v[p]) * state.amps[groups[p]] for p in range(4))
    p = float(np.vdot(coeff, coeff).real)
    if p < MIN_BRANCH_PROB:
        return 0.0, None
    coeff = coeff / math.sqrt(p)
    out = np.zeros_like(state.amps)
    for q in range(4):
        if v[q] != 0:
            out[groups[q]] = v[q] * coeff
    return p, StateVector(n, out, copy=False)


def bell_measure(
    state: StateVector, s1: int, s2: int, rnd: RandomSource
) -> tuple[BellIndex, StateVector]:
    """Projective measurement in the Bell basis of sites (s1, s2)."""
    branches = []
    total = 0.0
    for which in BellIndex:
        p, collapsed = bell_project(state, s1, s2, which)
        branches.append((which, p, collapsed))
        total += p
    u = rnd.random() * total
    acc = 0.0
    for which, p, collapsed in branches:
        if collapsed is None:
            continue
        acc += p
        if u < acc:
            return which, collapsed
    # numerically possible only when u lands on the trailing rounding gap
    for which, p, collapsed in reversed(branches):
        if collapsed is not None:
            return which, collapsed
    raise RuntimeError("all Bell branches have zero probability")


def joint_distribution(
    state: StateVector, axes: Sequence[tuple[int, Axis]]
) -> dict[tuple[int, ...], float]:
    """Exact Born distribution of single-site measurements on distinct sites.

    Returns a map from outcome tuples (ordered as ``axes``) to probability,
    covering all 2**k tuples.  The result does not depend on the order in
    which the commuting single-site measurements would be performed.
    """
    n = state.num_sites
    sites = [s for s, _ in axes]
    if len(set(sites)) != len(sites):
        raise ValueError("sites must be pairwise distinct")
    work = state.amps
    for site, axis in axes:
        work = _apply_one_site(work, n, site, _TO_Z_BASIS[axis])
    probs = np.abs(work) ** 2
    idx = np.arange(1 << n)
    key = np.zeros(1 << n, dtype=np.int64)
    for j, site in enumerate(sites):
        key |= ((idx >> site) & 1) << j
    marginal = np.bincount(key, weights=probs, minlength=1 << len(sites))
    dist: dict[tuple[int, ...], float] = {}
    for m in range(1 << len(sites)):
        outcome = tuple(1 if ((m >> j) & 1) == 0 else -1 for j in range(len(sites)))
        dist[outcome] = float(marginal[m])
    return dist


def reduced_density(state: StateVector, sites: Sequence[int]) -> np.ndarray:
    """Reduced density matrix of ``sites``, tracing out everything else.

    Row/column index bit j corresponds to ``sites[j]``.
    """
    n = state.num_sites
    keep = list(sites)
    if len(set(keep)) != len(keep):
        raise ValueError("sites must be pairwise distinct")
    if any(not 0 <= s < n for s in keep):
        raise ValueError(f"sites {keep} out of range for {n} sites")
    rest = [s for s in range(n) if s not in keep]
    idx = np.arange(1 << n)
    row = np.zeros(1 << n, dtype=np.int64)
    for j, s in enumerate(keep):
        row |= ((idx >> s) & 1) << j
    col = np.zeros(1 << n, dtype=np.int64)
    for j, s in enumerate(rest):
        col |= ((idx >> s) & 1) << j
    m = np.zeros((1 << len(keep), 1 << len(rest)), dtype=complex)
    m[row, col] = state.amps
    return m @ m.conj().T


def commutes_on_state(
    state: StateVector, o1: ProductObservable, o2: ProductObservable
) -> bool:
    """Whether (O1*O2 - O2*O1) annihilates the given state."""
    n = state.num_sites
    a = _apply_factors(_apply_factors(state.amps, n, o2.factors), n, o1.factors)
    b = _apply_factors(_apply_factors(state.amps, n, o1.factors), n, o2.factors)
    return float(np.linalg.norm(a - b)) < ATOL_NORM
