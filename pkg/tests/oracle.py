"""Independent dense-matrix oracle used to cross-check the package.

Everything here builds full 2**n x 2**n operator matrices with np.kron and
evaluates probabilities and expectations by plain linear algebra.  The
package itself never forms full operator matrices, so agreement between
the two routes is a meaningful check.
"""

from __future__ import annotations

import numpy as np

SQ2 = 1.0 / np.sqrt(2.0)

PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}
ID2 = np.eye(2, dtype=complex)

# The four Bell vectors over two sites (first site = low bit of the index).
BELL_VECTORS = {
    "phi_plus": np.array([1, 0, 0, 1], dtype=complex) * SQ2,
    "phi_minus": np.array([1, 0, 0, -1], dtype=complex) * SQ2,
    "psi_plus": np.array([0, 1, 1, 0], dtype=complex) * SQ2,
    "psi_minus": np.array([0, -1, 1, 0], dtype=complex) * SQ2,
}


def embed(ops: dict[int, np.ndarray], n: int) -> np.ndarray:
    """Full operator acting with ``ops[site]`` on each site, identity elsewhere.

    Site 0 is the lowest-order bit of the basis index, so the kron chain
    runs from the highest site down.
    """
    full = np.eye(1, dtype=complex)
    for site in range(n - 1, -1, -1):
        full = np.kron(full, ops.get(site, ID2))
    return full


def product_matrix(factors: list[tuple[int, str]], n: int) -> np.ndarray:
    """Matrix of an ordered product of single-site Paulis."""
    full = np.eye(1 << n, dtype=complex)
    for site, axis in factors:
        full = full @ embed({site: PAULI[axis]}, n)
    return full


def expectation(psi: np.ndarray, matrix: np.ndarray) -> float:
    value = np.vdot(psi, matrix @ psi)
    assert abs(value.imag) < 1e-10
    return float(value.real)


def eigenprojector(matrix: np.ndarray, outcome: int) -> np.ndarray:
    dim = matrix.shape[0]
    return (np.eye(dim, dtype=complex) + outcome * matrix) / 2


def pauli_projector(site: int, axis: str, outcome: int, n: int) -> np.ndarray:
    return embed({site: eigenprojector(PAULI[axis], outcome)}, n)


def bell_projector(s1: int, s2: int, which: str, n: int) -> np.ndarray:
    """Projector onto one Bell state of the pair (s1, s2), identity elsewhere.

    Built by summing |basis vector><basis vector| terms over the rest space,
    a deliberately different construction from the package's kernel.
    """
    v = BELL_VECTORS[which]
    dim = 1 << n
    proj = np.zeros((dim, dim), dtype=complex)
    rest_sites = [s for s in range(n) if s not in (s1, s2)]
    for rest_bits in range(1 << len(rest_sites)):
        vec = np.zeros(dim, dtype=complex)
        base = sum(
            ((rest_bits >> j) & 1) << site for j, site in enumerate(rest_sites)
        )
        for p in range(4):
            index = base + ((p & 1) << s1) + ((p >> 1) << s2)
            vec[index] = v[p]
        proj += np.outer(vec, vec.conj())
    return proj


def born_probability(psi: np.ndarray, projector: np.ndarray) -> float:
    w = projector @ psi
    return float(np.vdot(w, w).real)


def collapse(psi: np.ndarray, projector: np.ndarray) -> np.ndarray:
    w = projector @ psi
    return w / np.linalg.norm(w)


def abl_probabilities(
    psi: np.ndarray,
    obs_factors: list[tuple[int, str]],
    post: list[tuple[int, str, int]],
    n: int,
) -> dict[int, float]:
    """Time-symmetric inference probabilities by explicit matrix products."""
    post_proj = np.eye(1 << n, dtype=complex)
    for site, axis, outcome in post:
        post_proj = post_proj @ pauli_projector(site, axis, outcome, n)
    obs = product_matrix(obs_factors, n)
    weights = {}
    for o in (1, -1):
        w = post_proj @ (eigenprojector(obs, o) @ psi)
        weights[o] = float(np.vdot(w, w).real)
    total = weights[1] + weights[-1]
    return {o: weights[o] / total for o in (1, -1)}


def reduced_density(psi: np.ndarray, keep: list[int], n: int) -> np.ndarray:
    """Partial trace by summing explicit basis blocks."""
    k = len(keep)
    rest = [s for s in range(n) if s not in keep]
    rho = np.zeros((1 << k, 1 << k), dtype=complex)
    for i in range(1 << n):
        for j in range(1 << n):
            if any(((i >> s) & 1) != ((j >> s) & 1) for s in rest):
                continue
            r = sum(((i >> s) & 1) << a for a, s in enumerate(keep))
            c = sum(((j >> s) & 1) << a for a, s in enumerate(keep))
            rho[r, c] += psi[i] * np.conj(psi[j])
    return rho


def random_state(n: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    amps = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return amps / np.linalg.norm(amps)


def binomial_4sigma(p: float, n: int) -> float:
    return 4.0 * np.sqrt(max(p * (1.0 - p), 0.0) / n)
