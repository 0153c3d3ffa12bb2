"""Pure-state time evolution by spectral decomposition.

Besides the generic propagator this module holds two closed forms used as
oracles: the commuting product of two-spin unitaries for the zero-field
Ising model, and the analytic state of an XY star whose centre is rotated.
"""
from dataclasses import dataclass
import math

import numpy as np

from .errors import DomainError, NumericalError
from .register import embed_pauli

HERMITIAN_TOL = 1e-10
NORM_DRIFT_TOL = 1e-8


@dataclass(frozen=True)
class Propagator:
    """Eigen-decomposition of a Hamiltonian, eigenvalues ascending."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self):
        return self.eigenvalues.size

    def unitary(self, t):
        v = self.eigenvectors
        return (v * np.exp(-1j * self.eigenvalues * t)) @ v.conj().T

    def evolve_many(self, states, t):
        """Evolve the columns of ``states`` (dim x k) to time ``t``.

        Returns the evolved columns and the largest norm drift seen.
        """
        v = self.eigenvectors
        coeffs = v.conj().T @ states
        out = v @ (np.exp(-1j * self.eigenvalues * t)[:, None] * coeffs)
        norms = np.linalg.norm(out, axis=0)
        drift = float(np.max(np.abs(norms - np.linalg.norm(states, axis=0))))
        return out, drift


def diagonalize(h):
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise DomainError("Hamiltonian must be a square matrix")
    if np.max(np.abs(h - h.conj().T), initial=0.0) > HERMITIAN_TOL:
        raise DomainError("Hamiltonian is not Hermitian")
    energies, vectors = np.linalg.eigh(h)
    return Propagator(energies, vectors)


def evolve(p, psi0, t):
    psi0 = np.asarray(psi0, dtype=complex).reshape(-1)
    if psi0.size != p.dim:
        raise DomainError(f"state dimension {psi0.size} does not match propagator {p.dim}")
    out, drift = p.evolve_many(psi0[:, None], t)
    if drift >= NORM_DRIFT_TOL:
        raise NumericalError(f"evolution: norm drift {drift:.3e} at t={t}")
    out = out[:, 0]
    return out / np.linalg.norm(out)


def ising_product_unitary(graph, tau):
    """``prod_edges exp(i tau sigma_x^a sigma_x^b)`` for the zero-field Ising model."""
    if graph.triples:
        raise DomainError("product unitary is defined for pair-coupled graphs only")
    n = graph.n_sites
    u = np.eye(2 ** n, dtype=complex)
    c, s = math.cos(tau), math.sin(tau)
    for a, b in graph.edges:
        xx = embed_pauli(n, [(a, "x"), (b, "x")])
        u = (c * np.eye(2 ** n) + 1j * s * xx) @ u
    return u


def xy_star_analytic(theta, n_outer, t):
    """Closed-form state of an XY star with only the centre (site 0) rotated by ``theta``.

    The outer spins start up; the centre starts in
    ``cos(theta/2)|0> + sin(theta/2)|1>``.
    """
    if n_outer < 1:
        raise DomainError("n_outer must be at least 1")
    n = n_outer + 1
    w = 2.0 * math.sqrt(n_outer) * t
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    psi = np.zeros(2 ** n, dtype=complex)
    psi[0] = c
    psi[1 << n_outer] = s * math.cos(w)
    # with H = -sum(xx + yy) the exchange amplitude into |0>_c W carries +i
    amp = 1j * s * math.sin(w) / math.sqrt(n_outer)
    for k in range(1, n):
        psi[1 << (n - 1 - k)] += amp
    return psi / np.linalg.norm(psi)
