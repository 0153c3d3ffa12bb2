import itertools
import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, strategies as st

from spinentangle.errors import DomainError
from spinentangle.hamiltonians import (
    CouplingGraph,
    FieldSpec,
    HamiltonianSpec,
    Model,
    build_hamiltonian,
    coupling_terms,
    ring_graph,
    star_graph,
    tilted_sigma_z,
    triple_ring,
)
from spinentangle.register import SIGMA_X, SIGMA_Y, SIGMA_Z, basis_state, embed_pauli


def test_ring_graph():
    assert set(map(frozenset, ring_graph(3).edges)) == {frozenset(e) for e in [(0, 1), (1, 2), (2, 0)]}
    g = ring_graph(5)
    assert len(g.edges) == 5 and all(g.degree(k) == 2 for k in range(5))
    assert (5, 0) in ring_graph(6).edges
    with pytest.raises(DomainError):
        ring_graph(2)


def test_star_graph():
    assert star_graph(1).edges == ((0, 1),)
    g = star_graph(6)
    assert g.n_sites == 7 and g.degree(0) == 6 and all(g.degree(k) == 1 for k in range(1, 7))
    g = star_graph(4)
    assert g.n_sites == 5 and len(g.edges) == 4
    with pytest.raises(DomainError):
        star_graph(0)


def test_triple_ring():
    assert len(triple_ring(3).triples) == 3
    g = triple_ring(6)
    assert len(g.triples) == 6 and sorted(t[1] for t in g.triples) == list(range(6))
    assert g.edges == ()
    assert (3, 0, 1) in triple_ring(4).triples
    with pytest.raises(DomainError):
        triple_ring(2)


@pytest.mark.parametrize(
    "edges",
    [[(0, 0)], [(0, 1), (1, 0)], [(0, 5)]],
)
def test_graph_validation(edges):
    with pytest.raises(DomainError):
        CouplingGraph(3, edges)


def test_spec_model_graph_consistency():
    with pytest.raises(DomainError):
        HamiltonianSpec(Model.THREE_BODY_XYX, ring_graph(4))
    with pytest.raises(DomainError):
        HamiltonianSpec(Model.ISING_XX, triple_ring(4))
    with pytest.raises(DomainError):
        HamiltonianSpec(Model.THREE_BODY_XYX, triple_ring(4), FieldSpec(1.0, 0.0))


def test_field_must_be_finite():
    with pytest.raises(DomainError):
        FieldSpec(float("nan"), 0.0)


def test_ising_two_sites_spectrum():
    h = build_hamiltonian(HamiltonianSpec(Model.ISING_XX, CouplingGraph(2, [(0, 1)])))
    # hand 4x4 diagonalization of -XX
    np.testing.assert_allclose(np.linalg.eigvalsh(h), [-1, -1, 1, 1], atol=1e-12)


def test_xy_two_sites_spectrum():
    h = build_hamiltonian(HamiltonianSpec(Model.XY, CouplingGraph(2, [(0, 1)])))
    np.testing.assert_allclose(np.linalg.eigvalsh(h), [-2, 0, 0, 2], atol=1e-12)
    s2 = 1 / math.sqrt(2)
    plus = np.array([0, s2, s2, 0])
    minus = np.array([0, s2, -s2, 0])
    np.testing.assert_allclose(h @ plus, -2 * plus, atol=1e-12)
    np.testing.assert_allclose(h @ minus, 2 * minus, atol=1e-12)


@pytest.mark.parametrize("graph", [ring_graph(4), star_graph(3), CouplingGraph(3, [(0, 2)])])
def test_z_field_energy_of_all_up(graph):
    spec = HamiltonianSpec(Model.ISING_XX, graph, FieldSpec(1.0, 0.0))
    h = build_hamiltonian(spec)
    n = graph.n_sites
    field = h + sum(coupling_terms(spec))
    np.testing.assert_allclose(field, -sum(embed_pauli(n, [(k, "z")]) for k in range(n)), atol=1e-12)
    psi = basis_state(n, 0)
    assert abs(psi @ field @ psi + n) < 1e-12


def test_negative_field_flips_sign():
    g = ring_graph(3)
    hp = build_hamiltonian(HamiltonianSpec(Model.ISING_XX, g, FieldSpec(0.7, 0.3)))
    hm = build_hamiltonian(HamiltonianSpec(Model.ISING_XX, g, FieldSpec(-0.7, 0.3)))
    h0 = build_hamiltonian(HamiltonianSpec(Model.ISING_XX, g))
    np.testing.assert_allclose(hp - h0, -(hm - h0), atol=1e-12)


@given(phi=st.floats(-10, 10))
def test_tilted_field_matches_expm_and_expansion(phi):
    r = scipy.linalg.expm(1j * phi / 2 * SIGMA_X)
    literal = r @ SIGMA_Z @ r.conj().T
    np.testing.assert_allclose(tilted_sigma_z(phi), literal, atol=1e-12)
    # expansion obtained from the conjugation: cos(phi) Z + sin(phi) Y
    np.testing.assert_allclose(literal, math.cos(phi) * SIGMA_Z + math.sin(phi) * SIGMA_Y, atol=1e-12)


def test_three_body_matches_definition():
    spec = HamiltonianSpec(Model.THREE_BODY_XYX, triple_ring(4))
    expected = -sum(
        embed_pauli(4, [((k - 1) % 4, "x"), (k, "y"), ((k + 1) % 4, "x")]) for k in range(4)
    )
    np.testing.assert_allclose(build_hamiltonian(spec), expected, atol=1e-12)


ALL_SPECS = [
    HamiltonianSpec(Model.ISING_XX, ring_graph(4), FieldSpec(0.8, 0.4)),
    HamiltonianSpec(Model.ISING_XX, star_graph(3), FieldSpec(-1.2, 2.0)),
    HamiltonianSpec(Model.XY, ring_graph(5), FieldSpec(1.0, 1.1)),
    HamiltonianSpec(Model.XY, star_graph(4), FieldSpec(1.0, 0.0)),
    HamiltonianSpec(Model.THREE_BODY_XYX, triple_ring(5)),
]


@pytest.mark.parametrize("spec", ALL_SPECS)
def test_hermitian(spec):
    h = build_hamiltonian(spec)
    assert np.max(np.abs(h - h.conj().T)) <= 1e-10


@pytest.mark.parametrize("graph", [ring_graph(5), star_graph(4)])
def test_xy_couplings_commute_with_total_z(graph):
    h = build_hamiltonian(HamiltonianSpec(Model.XY, graph))
    n = graph.n_sites
    total_z = sum(embed_pauli(n, [(k, "z")]) for k in range(n))
    assert np.max(np.abs(h @ total_z - total_z @ h)) <= 1e-10


@pytest.mark.parametrize("graph", [ring_graph(5), star_graph(4), CouplingGraph(4, [(0, 1), (1, 2), (0, 3)])])
def test_zero_field_ising_terms_commute(graph):
    terms = coupling_terms(HamiltonianSpec(Model.ISING_XX, graph))
    for a, b in itertools.combinations(terms, 2):
        assert np.max(np.abs(a @ b - b @ a)) <= 1e-10


@given(phi=st.floats(-7, 7), b=st.floats(-2, 2))
def test_phi_periodicity(phi, b):
    g = star_graph(2)
    for model in (Model.ISING_XX, Model.XY):
        h1 = build_hamiltonian(HamiltonianSpec(model, g, FieldSpec(b, phi)))
        h2 = build_hamiltonian(HamiltonianSpec(model, g, FieldSpec(b, phi + 2 * math.pi)))
        np.testing.assert_allclose(h1, h2, atol=1e-10)
