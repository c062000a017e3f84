"""Brute-force full-Hilbert-space reference (N <= 12).

Ground truth for every analytic formula: the kick is applied as N
single-qubit rotations on the 2^N state vector, the Ising phase is a
popcount lookup, and reduced matrices come from literal partial traces.
Slow and simple on purpose.
"""

from dataclasses import dataclass
from functools import reduce
from math import comb

import numpy as np

from .dynamics import SingleQubitRDM
from .errors import ResourceLimitError
from .states import CoherentParams, SymmetricState

MAX_QUBITS = 12


@dataclass(frozen=True)
class FullState:
    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.amplitudes, dtype=complex)
        object.__setattr__(self, "amplitudes", a)
        if a.shape != (2 ** self.n_qubits,):
            raise ValueError("amplitude count != 2^N")
        if abs(np.linalg.norm(a) - 1.0) > 1e-13:
            raise ValueError("full state not normalized")


def _guard(n: int, limit: int = MAX_QUBITS):
    if n > limit:
        raise ResourceLimitError(f"oracle capped at {limit} qubits, got {n}")


def _popcounts(n: int) -> np.ndarray:
    idx = np.arange(2 ** n, dtype=np.uint32)
    counts = np.zeros_like(idx)
    for bit in range(n):
        counts += (idx >> bit) & 1
    return counts.astype(np.int64)


def ising_phases(n: int, j: float, tau: float) -> np.ndarray:
    """Diagonal of exp(-i tau J sum_{l<l'} sz sz) in the computational basis."""
    d = ((n - 2 * _popcounts(n)) ** 2 - n) / 2.0
    return np.exp(-1j * tau * j * d)


def _kick_single(tau: float) -> np.ndarray:
    # exp(-i tau sigma_y) with sigma_y = [[0, -i], [i, 0]]
    return np.array([[np.cos(tau), -np.sin(tau)],
                     [np.sin(tau), np.cos(tau)]], dtype=complex)


def apply_kick(state: np.ndarray, n: int, tau: float) -> np.ndarray:
    """Apply exp(-i tau sum_l sy_l) without materializing the 2^N matrix."""
    u = _kick_single(tau)
    psi = state.reshape([2] * n)
    for axis in range(n):
        psi = np.tensordot(u, psi, axes=([1], [axis]))
        psi = np.moveaxis(psi, 0, axis)
    return psi.reshape(-1)


def full_floquet(n: int, j: float, tau: float) -> np.ndarray:
    """Materialized 2^N x 2^N Floquet operator."""
    _guard(n)
    kick = reduce(np.kron, [_kick_single(tau)] * n)
    return ising_phases(n, j, tau)[:, None] * kick


def full_state_evolve(params: CoherentParams, n: int, j: float, tau: float,
                      n_kicks: int) -> FullState:
    """Kick the coherent product state n_kicks times."""
    _guard(n)
    qubit = np.array([np.cos(params.theta0 / 2.0),
                      np.exp(-1j * params.phi0) * np.sin(params.theta0 / 2.0)])
    psi = reduce(np.kron, [qubit] * n)
    phases = ising_phases(n, j, tau)
    for _ in range(n_kicks):
        psi = phases * apply_kick(psi, n, tau)
    return FullState(n, psi)


def full_rdm_qubit(state: FullState) -> SingleQubitRDM:
    """Partial trace down to the first qubit."""
    m = state.amplitudes.reshape(2, -1)
    rho = m @ m.conj().T
    return SingleQubitRDM(float(rho[0, 0].real), complex(rho[0, 1]))


def full_rdm_block(state: FullState, n_a: int) -> np.ndarray:
    """Dense reduced density matrix of the first n_a qubits."""
    n = state.n_qubits
    if not 1 <= n_a <= n - 1:
        raise ValueError("n_a out of range")
    m = state.amplitudes.reshape(2 ** n_a, -1)
    return m @ m.conj().T


def parity_operator(n: int) -> np.ndarray:
    _guard(n, 10)
    sy = np.array([[0.0, -1.0j], [1.0j, 0.0]])
    return reduce(np.kron, [sy] * n)


def parity_commutation_check(n: int, j: float, tau: float) -> float:
    """max |[U, P]| with P the tensor-sy parity; exactly zero in theory."""
    _guard(n, 10)
    u = full_floquet(n, j, tau)
    p = parity_operator(n)
    return float(np.abs(u @ p - p @ u).max())


# ---- symmetric-sector bridge ----------------------------------------------


def dicke_vector(n: int, q: int) -> np.ndarray:
    """|w_q> embedded in the computational basis."""
    _guard(n)
    v = np.zeros(2 ** n)
    v[_popcounts(n) == q] = 1.0
    return v / np.sqrt(comb(n, q))


def embed_symmetric(state: SymmetricState) -> FullState:
    _guard(state.n_qubits)
    n = state.n_qubits
    full = np.zeros(2 ** n, dtype=complex)
    pops = _popcounts(n)
    for q in range(n + 1):
        full[pops == q] += state.coeffs[q] / np.sqrt(comb(n, q))
    return FullState(n, full)


def project_symmetric(state: FullState) -> SymmetricState:
    """Project onto the Dicke sector (requires a symmetric input state)."""
    n = state.n_qubits
    pops = _popcounts(n)
    c = np.array([state.amplitudes[pops == q].sum() / np.sqrt(comb(n, q))
                  for q in range(n + 1)])
    return SymmetricState(n, c / np.linalg.norm(c))
