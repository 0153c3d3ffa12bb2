"""Dense multi-qubit states, Pauli embedding and partial traces.

Conventions
-----------
A state of ``n`` qubits is a complex vector of length ``2**n``. Qubit 0 is the
most significant bit of the basis index, and bit value 0 is spin-up
(``sigma_z = +1``), bit value 1 is spin-down. Density operators are plain
``2**k x 2**k`` complex arrays.
"""
from enum import Enum

import numpy as np

from .errors import DomainError

NORM_TOL = 1e-9

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY = np.eye(2, dtype=complex)


class PauliAxis(Enum):
    X = "x"
    Y = "y"
    Z = "z"

    @property
    def matrix(self):
        return {"x": SIGMA_X, "y": SIGMA_Y, "z": SIGMA_Z}[self.value]


def _axis(a):
    return a if isinstance(a, PauliAxis) else PauliAxis(str(a).lower())


def n_qubits_of(vec_or_mat):
    dim = np.shape(vec_or_mat)[0]
    n = int(dim).bit_length() - 1
    if dim < 2 or 2 ** n != dim:
        raise DomainError(f"dimension {dim} is not a power of two >= 2")
    return n


def as_state(amplitudes, tol=NORM_TOL):
    """Return ``amplitudes`` as a complex vector after checking its norm."""
    psi = np.asarray(amplitudes, dtype=complex).reshape(-1)
    n_qubits_of(psi)
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > tol:
        raise DomainError(f"state norm {norm!r} differs from 1")
    return psi


def basis_state(n_qubits, index):
    if n_qubits < 1:
        raise DomainError("n_qubits must be positive")
    if not 0 <= index < 2 ** n_qubits:
        raise DomainError(f"basis index {index} out of range for {n_qubits} qubits")
    psi = np.zeros(2 ** n_qubits, dtype=complex)
    psi[index] = 1.0
    return psi


def product_state(locals_):
    """Tensor product of single-qubit states, qubit 0 first."""
    if len(locals_) == 0:
        raise DomainError("need at least one single-qubit factor")
    psi = np.ones(1, dtype=complex)
    for k, pair in enumerate(locals_):
        factor = np.asarray(pair, dtype=complex)
        if factor.shape != (2,):
            raise DomainError(f"factor {k} is not a pair of amplitudes")
        if abs(np.linalg.norm(factor) - 1.0) > NORM_TOL:
            raise DomainError(f"factor {k} is not normalized")
        psi = np.kron(psi, factor)
    return psi


def single_excitation_state(coeffs):
    """``A_0 |0...0> + sum_k A_k |0..1_{k-1}..0>``.

    ``coeffs[0]`` multiplies the all-up state and ``coeffs[k]`` (k >= 1) the
    basis state with only qubit ``k - 1`` flipped, so ``len(coeffs) - 1``
    qubits are produced.
    """
    a = np.asarray(coeffs, dtype=complex).reshape(-1)
    n = a.size - 1
    if n < 1:
        raise DomainError("need at least one excitation site")
    if abs(np.sum(np.abs(a) ** 2) - 1.0) > NORM_TOL:
        raise DomainError("coefficients are not normalized")
    psi = np.zeros(2 ** n, dtype=complex)
    psi[0] = a[0]
    for k in range(1, n + 1):
        psi[1 << (n - k)] = a[k]
    return psi


def embed_pauli(n_qubits, factors):
    """Dense matrix of a Pauli string; ``factors`` is a list of (site, axis)."""
    ops = [IDENTITY] * n_qubits
    seen = set()
    for site, axis in factors:
        if not 0 <= site < n_qubits:
            raise DomainError(f"site {site} out of range")
        if site in seen:
            raise DomainError(f"duplicate site {site}")
        seen.add(site)
        ops[site] = _axis(axis).matrix
    out = np.ones((1, 1), dtype=complex)
    for op in ops:
        out = np.kron(out, op)
    return out


def embed_operator(n_qubits, site, op):
    """Embed a single-qubit operator at ``site``."""
    if not 0 <= site < n_qubits:
        raise DomainError(f"site {site} out of range")
    return np.kron(np.kron(np.eye(2 ** site), op), np.eye(2 ** (n_qubits - site - 1)))


def apply_local(psi, site, op):
    """Apply a 2x2 operator to one qubit of a state vector without forming the full matrix."""
    n = n_qubits_of(psi)
    t = np.moveaxis(psi.reshape((2,) * n), site, 0)
    t = np.tensordot(op, t, axes=(1, 0))
    return np.moveaxis(t, 0, site).reshape(-1)


def _check_keep(keep, n):
    keep = [int(k) for k in keep]
    if not keep:
        raise DomainError("keep must be non-empty")
    if len(set(keep)) != len(keep):
        raise DomainError("keep contains duplicate sites")
    if any(k < 0 or k >= n for k in keep):
        raise DomainError(f"keep {keep} out of range for {n} qubits")
    return keep


def partial_trace(state, keep):
    """Reduced density operator on ``keep`` (in the given order).

    ``state`` may be a state vector or a density matrix.
    """
    state = np.asarray(state, dtype=complex)
    n = n_qubits_of(state)
    keep = _check_keep(keep, n)
    rest = [k for k in range(n) if k not in keep]
    dk = 2 ** len(keep)
    if state.ndim == 1:
        t = np.transpose(state.reshape((2,) * n), keep + rest).reshape(dk, -1)
        rho = t @ t.conj().T
    else:
        t = state.reshape((2,) * (2 * n))
        perm = keep + rest
        t = np.transpose(t, perm + [n + p for p in perm])
        dr = 2 ** len(rest)
        t = t.reshape(dk, dr, dk, dr)
        rho = np.einsum("ajbj->ab", t)
    return 0.5 * (rho + rho.conj().T)


def overlap(a, b):
    """``<a|b>``."""
    a = np.asarray(a, dtype=complex).reshape(-1)
    b = np.asarray(b, dtype=complex).reshape(-1)
    if a.shape != b.shape:
        raise DomainError(f"dimension mismatch {a.shape} vs {b.shape}")
    return complex(np.vdot(a, b))


def bit(index, site, n_qubits):
    """Value of qubit ``site`` in basis index ``index``."""
    return (index >> (n_qubits - 1 - site)) & 1
