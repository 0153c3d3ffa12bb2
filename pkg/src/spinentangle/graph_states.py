"""Stabilizers and graph states generated by zero-field Ising evolution.

With ``U = ising_product_unitary(graph, pi/4)`` the operators
``K_n = U sigma_z^n U^dagger`` commute, square to one, and ``U|e_m>`` is their
joint eigenstate with eigenvalue ``+1`` on every site whose bit in ``m`` is 0
and ``-1`` otherwise.
"""
from dataclasses import dataclass
import itertools
import math

import numpy as np

from .errors import DomainError
from .evolution import ising_product_unitary
from .metrics import concurrence_from_lambdas, pair_lambdas
from .register import basis_state, bit, embed_pauli, n_qubits_of

GRAPH_TIME = math.pi / 4


@dataclass(frozen=True)
class StabilizerSet:
    operators: tuple
    source_graph: object

    def __len__(self):
        return len(self.operators)

    def max_commutator(self):
        worst = 0.0
        for a, b in itertools.combinations(self.operators, 2):
            worst = max(worst, float(np.max(np.abs(a @ b - b @ a))))
        return worst


def stabilizers(graph):
    u = ising_product_unitary(graph, GRAPH_TIME)
    n = graph.n_sites
    ops = []
    for site in range(n):
        k = u @ embed_pauli(n, [(site, "z")]) @ u.conj().T
        ops.append(0.5 * (k + k.conj().T))
    return StabilizerSet(tuple(ops), graph)


def ring_stabilizer(n, site):
    """Closed form ``-X_{l-1} Z_l X_{l+1}`` of a ring stabilizer."""
    return -embed_pauli(n, [((site - 1) % n, "x"), (site, "z"), ((site + 1) % n, "x")])


def basis_eigenvalues(n_sites, index):
    return np.array([1 - 2 * bit(index, s, n_sites) for s in range(n_sites)], dtype=int)


def graph_state(graph, basis_index):
    u = ising_product_unitary(graph, GRAPH_TIME)
    return u @ basis_state(graph.n_sites, basis_index)


def verify_stabilized(psi, stabs, expected_eigs):
    """Largest ``|| K_n psi - e_n psi ||`` over the set."""
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    eigs = np.asarray(expected_eigs)
    if len(eigs) != len(stabs):
        raise DomainError("need one expected eigenvalue per stabilizer")
    if not np.all(np.isin(eigs, (-1, 1))):
        raise DomainError("expected eigenvalues must be +1 or -1")
    if stabs.operators[0].shape[0] != psi.size:
        raise DomainError("state and stabilizer dimensions differ")
    return max(float(np.linalg.norm(k @ psi - e * psi)) for k, e in zip(stabs.operators, eigs))


def _measurement_basis(theta, phi):
    up = np.array([math.cos(theta / 2), math.sin(theta / 2) * complex(math.cos(phi), math.sin(phi))])
    down = np.array([-math.sin(theta / 2) * complex(math.cos(phi), -math.sin(phi)), math.cos(theta / 2)])
    return np.stack([up, down])


def projected_pair_concurrences(psi, pair, axes):
    """Pair concurrence for every outcome of a product measurement on the complement.

    ``axes`` maps each complement site to a Bloch direction ``(theta, phi)``.
    Returns ``(probabilities, concurrences)`` over all outcomes.
    """
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    n = n_qubits_of(psi)
    i, j = pair
    rest = [k for k in range(n) if k not in (i, j)]
    t = np.transpose(psi.reshape((2,) * n), [i, j] + rest)
    for pos, site in enumerate(rest):
        basis = _measurement_basis(*axes[site]).conj()
        t = np.moveaxis(np.tensordot(basis, t, axes=(1, 2 + pos)), 0, 2 + pos)
    phi = t.reshape(4, -1)
    probs = np.sum(np.abs(phi) ** 2, axis=0)
    conc = np.zeros_like(probs)
    keep = probs > 1e-14
    normed = phi[:, keep] / np.sqrt(probs[keep])
    conc[keep] = 2 * np.abs(normed[0] * normed[3] - normed[1] * normed[2])
    return probs, conc


def best_uniform_projection(psi, pair, n_theta=9, n_phi=8):
    """Search a common measurement axis for the complement maximizing the worst-outcome concurrence.

    Returns ``(worst_concurrence, (theta, phi))``.
    """
    n = n_qubits_of(np.asarray(psi).reshape(-1))
    rest = [k for k in range(n) if k not in pair]
    best = (-1.0, None)
    for theta in np.linspace(0, math.pi, n_theta):
        for phi in np.linspace(0, 2 * math.pi, n_phi, endpoint=False):
            probs, conc = projected_pair_concurrences(psi, pair, {k: (theta, phi) for k in rest})
            worst = float(np.min(conc[probs > 1e-12]))
            if worst > best[0]:
                best = (worst, (float(theta), float(phi)))
    return best


def pair_concurrence(psi, pair):
    return float(concurrence_from_lambdas(pair_lambdas(psi, pair)))
