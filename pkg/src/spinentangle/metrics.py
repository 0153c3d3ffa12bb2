"""Bipartite entanglement diagnostics for one- and two-qubit reductions.

The Wootters numbers ``lambda_1 >= ... >= lambda_4`` of a two-qubit state
``rho`` are the eigenvalues of ``sqrt(sqrt(rho) rho~ sqrt(rho))`` where
``rho~ = (Y x Y) rho* (Y x Y)``. Writing ``rho = W W^dagger`` they are also the
singular values of ``W^T (Y x Y) W``, which is how they are evaluated here:
the singular values come straight out of an SVD instead of as square roots of
eigenvalues, so a numerically zero ``lambda`` stays at roundoff level
(~1e-16) rather than at its square root (~1e-8).

For pair reductions of a pure global state, ``W`` is read off an SVD of the
state reshaped into a ``4 x 2**(N-2)`` matrix, so no square root of a density
matrix is ever taken.
"""
from dataclasses import asdict, dataclass
import math

import numpy as np

from .errors import DomainError, NumericalError
from .register import SIGMA_Y, n_qubits_of

CLAMP_WINDOW = 1e-10
NEGATIVE_LIMIT = 1e-8
CKW_TOL = 1e-8
OUTCOME_CUTOFF = 1e-14

YY = np.kron(SIGMA_Y, SIGMA_Y)
METRIC_NAMES = (
    "concurrence",
    "c_assist",
    "sqrt_tangle_i",
    "sqrt_tangle_j",
    "eof",
    "ckw_residual_i",
    "le_lower_bound",
)


@dataclass(frozen=True)
class PairReport:
    sites: tuple
    concurrence: float
    concurrence_of_assistance: float
    sqrt_one_tangle_i: float
    sqrt_one_tangle_j: float
    eof: float
    ckw_residual_i: float
    le_lower_bound: float

    def as_dict(self):
        return asdict(self)


def _check_dim(rho, dim):
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (dim, dim):
        raise DomainError(f"expected a {dim}x{dim} matrix, got shape {rho.shape}")
    return rho


def _clamp_eigenvalues(w, what):
    if np.any(w < -NEGATIVE_LIMIT):
        raise NumericalError(f"metrics: {what} has eigenvalue {w.min():.3e} below -{NEGATIVE_LIMIT}")
    return np.where(w < 0, 0.0, w)


def one_tangle(rho):
    """``4 det(rho)`` for a single-qubit density matrix."""
    rho = _check_dim(rho, 2)
    t = 4.0 * float(np.real(np.linalg.det(rho)))
    if t < -1e-9 or t > 1 + 1e-9:
        raise NumericalError(f"metrics: one-tangle {t} outside [0, 1]")
    return min(max(t, 0.0), 1.0)


def spin_flip(rho):
    rho = _check_dim(rho, 4)
    return YY @ rho.conj() @ YY


def density_factor(rho):
    """``W`` with ``rho = W W^dagger``, from the clamped spectral decomposition."""
    w, v = np.linalg.eigh(0.5 * (rho + rho.conj().T))
    w = _clamp_eigenvalues(w, "density matrix")
    return v * np.sqrt(w)


def _lambdas_from_factors(factors):
    # factors: (..., 4, r); returns (..., 4) descending, zero padded
    x = np.swapaxes(factors, -1, -2) @ YY @ factors
    s = np.linalg.svd(x, compute_uv=False)
    r = s.shape[-1]
    if r < 4:
        s = np.concatenate([s, np.zeros(s.shape[:-1] + (4 - r,))], axis=-1)
    return s[..., :4]


def wootters_lambdas(rho):
    """The four Wootters numbers of a two-qubit state, descending."""
    rho = _check_dim(rho, 4)
    return _lambdas_from_factors(density_factor(rho))


def wootters_lambdas_hermitian(rho):
    """Same numbers via ``sqrt(sqrt(rho) rho~ sqrt(rho))`` literally; used as a cross-check."""
    rho = _check_dim(rho, 4)
    w, v = np.linalg.eigh(0.5 * (rho + rho.conj().T))
    w = _clamp_eigenvalues(w, "density matrix")
    sq = (v * np.sqrt(w)) @ v.conj().T
    m = sq @ spin_flip(rho) @ sq
    mu = np.linalg.eigvalsh(0.5 * (m + m.conj().T))
    mu = _clamp_eigenvalues(mu, "sqrt(rho) rho~ sqrt(rho)")
    return np.sort(np.sqrt(mu))[::-1]


def concurrence_from_lambdas(lam):
    lam = np.asarray(lam)
    return np.maximum(0.0, lam[..., 0] - lam[..., 1] - lam[..., 2] - lam[..., 3])


def concurrence(rho):
    return float(concurrence_from_lambdas(wootters_lambdas(rho)))


def concurrence_of_assistance(rho):
    return float(np.sum(wootters_lambdas(rho)))


def _binary_entropy(x):
    if x <= 0.0 or x >= 1.0:
        return 0.0
    return -x * math.log2(x) - (1 - x) * math.log2(1 - x)


def entanglement_of_formation(c):
    if not -1e-9 <= c <= 1 + 1e-9:
        raise DomainError(f"concurrence {c} outside [0, 1]")
    c = min(max(float(c), 0.0), 1.0)
    return _binary_entropy((1 + math.sqrt(1 - c * c)) / 2)


# ---------------------------------------------------------------------------
# pure-state routes, batched over a stack of state vectors


def _as_batch(states):
    states = np.asarray(states, dtype=complex)
    single = states.ndim == 1
    if single:
        states = states[None, :]
    return states, single, n_qubits_of(states[0])


def _grouped(states, n, first):
    """Reshape a batch to (batch, 2**len(first), rest) with ``first`` leading."""
    rest = [k for k in range(n) if k not in first]
    t = states.reshape((states.shape[0],) + (2,) * n)
    t = np.transpose(t, [0] + [1 + k for k in first] + [1 + k for k in rest])
    return t.reshape(states.shape[0], 2 ** len(first), -1)


def pair_lambdas(states, pair):
    """Wootters numbers of the reduction of each pure state onto ``pair``."""
    states, single, n = _as_batch(states)
    i, j = _check_pair(pair, n)
    psi = _grouped(states, n, [i, j])
    u, s, _ = np.linalg.svd(psi, full_matrices=False)
    lam = _lambdas_from_factors(u * s[:, None, :])
    return lam[0] if single else lam


def sqrt_one_tangles(states, site):
    """``sqrt(4 det rho_site) = 2 s_0 s_1`` from the Schmidt values of the site cut."""
    states, single, n = _as_batch(states)
    if not 0 <= site < n:
        raise DomainError(f"site {site} out of range")
    s = np.linalg.svd(_grouped(states, n, [site]), compute_uv=False)
    out = np.clip(2.0 * s[:, 0] * s[:, 1], 0.0, 1.0)
    return out[0] if single else out


def le_lower_bounds(states, pair):
    """Average pair concurrence after measuring every other qubit in the computational basis.

    For outcome ``m`` with unnormalized pair state ``(a, b, c, d)`` the weighted
    concurrence ``p_m C_m`` equals ``2 |ad - bc|``.
    """
    states, single, n = _as_batch(states)
    i, j = _check_pair(pair, n)
    if n < 3:
        raise DomainError("localizable entanglement needs at least 3 qubits")
    phi = _grouped(states, n, [i, j])
    weights = np.sum(np.abs(phi) ** 2, axis=1)
    dets = 2.0 * np.abs(phi[:, 0, :] * phi[:, 3, :] - phi[:, 1, :] * phi[:, 2, :])
    out = np.sum(np.where(weights >= OUTCOME_CUTOFF, dets, 0.0), axis=1)
    out = np.clip(out, 0.0, 1.0)
    return out[0] if single else out


def ckw_residuals(states, site):
    states, single, n = _as_batch(states)
    t = sqrt_one_tangles(states, site) ** 2
    for other in range(n):
        if other != site:
            t = t - concurrence_from_lambdas(pair_lambdas(states, (site, other))) ** 2
    if np.any(t < -CKW_TOL):
        raise NumericalError(f"metrics: CKW residual {t.min():.3e} below -{CKW_TOL}")
    return t[0] if single else t


def _check_pair(pair, n):
    i, j = (int(v) for v in pair)
    if i == j:
        raise DomainError("pair sites must differ")
    if not (0 <= i < n and 0 <= j < n):
        raise DomainError(f"pair {pair} out of range for {n} qubits")
    return i, j


def ckw_residual(psi, site):
    return float(ckw_residuals(psi, site))


def le_lower_bound(psi, pair):
    return float(le_lower_bounds(psi, pair))


def pair_metrics(states, pair, metrics=METRIC_NAMES):
    """Dict of metric arrays (one entry per state) for the requested metric names."""
    states = np.asarray(states, dtype=complex)
    i, j = pair
    out = {}
    unknown = set(metrics) - set(METRIC_NAMES)
    if unknown:
        raise DomainError(f"unknown metrics {sorted(unknown)}")
    if {"concurrence", "c_assist", "eof"} & set(metrics):
        lam = pair_lambdas(states, pair)
        c = concurrence_from_lambdas(lam)
        if "concurrence" in metrics:
            out["concurrence"] = c
        if "c_assist" in metrics:
            out["c_assist"] = np.sum(lam, axis=-1)
        if "eof" in metrics:
            out["eof"] = np.vectorize(entanglement_of_formation, otypes=[float])(c)
    if "sqrt_tangle_i" in metrics:
        out["sqrt_tangle_i"] = sqrt_one_tangles(states, i)
    if "sqrt_tangle_j" in metrics:
        out["sqrt_tangle_j"] = sqrt_one_tangles(states, j)
    if "ckw_residual_i" in metrics:
        out["ckw_residual_i"] = ckw_residuals(states, i)
    if "le_lower_bound" in metrics:
        out["le_lower_bound"] = le_lower_bounds(states, pair)
    return out


def pair_report(psi, pair):
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    n = n_qubits_of(psi)
    metrics = METRIC_NAMES if n >= 3 else METRIC_NAMES[:-1]
    m = {k: float(v) for k, v in pair_metrics(psi, pair, metrics).items()}
    return PairReport(
        sites=tuple(int(v) for v in pair),
        concurrence=m["concurrence"],
        concurrence_of_assistance=m["c_assist"],
        sqrt_one_tangle_i=m["sqrt_tangle_i"],
        sqrt_one_tangle_j=m["sqrt_tangle_j"],
        eof=m["eof"],
        ckw_residual_i=m["ckw_residual_i"],
        # two qubits leave nothing to measure
        le_lower_bound=m.get("le_lower_bound", m["concurrence"]),
    )
