"""Coupling topologies and dense spin Hamiltonians.

All couplings are set to 1, so energies and times are dimensionless. The
magnetic field term is ``-B * sum_k R_k sigma_z R_k^dagger`` with
``R_k = exp(i phi/2 sigma_x)`` acting on site ``k``.
"""
from dataclasses import dataclass, field
from enum import Enum
import math

import numpy as np

from .errors import DomainError
from .register import IDENTITY, SIGMA_X, SIGMA_Z, embed_operator, embed_pauli


@dataclass(frozen=True)
class CouplingGraph:
    n_sites: int
    edges: tuple = ()
    triples: tuple = ()

    def __post_init__(self):
        if self.n_sites < 1:
            raise DomainError("n_sites must be positive")
        edges = tuple(tuple(int(v) for v in e) for e in self.edges)
        triples = tuple(tuple(int(v) for v in t) for t in self.triples)
        seen = set()
        for e in edges:
            if len(e) != 2:
                raise DomainError(f"edge {e} is not a pair")
            a, b = e
            if a == b:
                raise DomainError(f"self-loop at site {a}")
            if not (0 <= a < self.n_sites and 0 <= b < self.n_sites):
                raise DomainError(f"edge {e} out of range")
            key = frozenset(e)
            if key in seen:
                raise DomainError(f"duplicate edge {e}")
            seen.add(key)
        for t in triples:
            if len(t) != 3 or len(set(t)) != 3:
                raise DomainError(f"triple {t} must name three distinct sites")
            if any(not 0 <= v < self.n_sites for v in t):
                raise DomainError(f"triple {t} out of range")
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "triples", triples)

    def degree(self, site):
        return sum(site in e for e in self.edges)


@dataclass(frozen=True)
class FieldSpec:
    """Field magnitude ``B`` (sign allowed) and tilt angle ``phi`` in radians."""

    B: float = 0.0
    phi: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.B) and math.isfinite(self.phi)):
            raise DomainError("field parameters must be finite")


class Model(Enum):
    ISING_XX = "ising"
    XY = "xy"
    THREE_BODY_XYX = "three_body"


@dataclass(frozen=True)
class HamiltonianSpec:
    model: Model
    graph: CouplingGraph
    field: FieldSpec = field(default_factory=FieldSpec)

    def __post_init__(self):
        model = Model(self.model)
        object.__setattr__(self, "model", model)
        if model is Model.THREE_BODY_XYX:
            if not self.graph.triples or self.graph.edges:
                raise DomainError("three-body model needs triples and no pair edges")
            if self.field.B != 0.0:
                raise DomainError("three-body model takes no magnetic field")
        elif self.graph.triples:
            raise DomainError(f"{model.value} model takes pair edges only")


def ring_graph(n):
    if n < 3:
        raise DomainError("a ring needs at least 3 sites")
    return CouplingGraph(n, tuple((k, (k + 1) % n) for k in range(n)))


def star_graph(n_outer):
    """Site 0 is the centre, sites 1..n_outer the outer spins."""
    if n_outer < 1:
        raise DomainError("a star needs at least one outer site")
    return CouplingGraph(n_outer + 1, tuple((0, k) for k in range(1, n_outer + 1)))


def triple_ring(n):
    if n < 3:
        raise DomainError("a triple ring needs at least 3 sites")
    return CouplingGraph(n, triples=tuple(((k - 1) % n, k, (k + 1) % n) for k in range(n)))


def field_rotation(phi):
    # exp(i phi/2 sigma_x); exact because sigma_x squares to one
    return math.cos(phi / 2) * IDENTITY + 1j * math.sin(phi / 2) * SIGMA_X


def tilted_sigma_z(phi):
    r = field_rotation(phi)
    return r @ SIGMA_Z @ r.conj().T


def coupling_terms(spec):
    """Individual coupling operators; the Hamiltonian is minus their sum plus the field."""
    n = spec.graph.n_sites
    if spec.model is Model.ISING_XX:
        return [embed_pauli(n, [(a, "x"), (b, "x")]) for a, b in spec.graph.edges]
    if spec.model is Model.XY:
        return [
            embed_pauli(n, [(a, "x"), (b, "x")]) + embed_pauli(n, [(a, "y"), (b, "y")])
            for a, b in spec.graph.edges
        ]
    return [embed_pauli(n, [(a, "x"), (b, "y"), (c, "x")]) for a, b, c in spec.graph.triples]


def field_term(n_sites, B, phi):
    """``-B sum_k R_k sigma_z R_k^dagger``."""
    local = tilted_sigma_z(phi)
    out = np.zeros((2 ** n_sites, 2 ** n_sites), dtype=complex)
    for k in range(n_sites):
        out += embed_operator(n_sites, k, local)
    return -B * out


def build_hamiltonian(spec):
    n = spec.graph.n_sites
    h = np.zeros((2 ** n, 2 ** n), dtype=complex)
    for term in coupling_terms(spec):
        h -= term
    if spec.field.B != 0.0:
        h += field_term(n, spec.field.B, spec.field.phi)
    h = 0.5 * (h + h.conj().T)
    return h

