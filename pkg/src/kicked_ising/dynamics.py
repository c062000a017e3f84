"""Entanglement dynamics of coherent states under the diagonal blocks.

Each kick multiplies the parity amplitudes by the analytic diagonal
phases, so any kick count is evaluated directly from n — no sequential
state threading.  The single-qubit reduced density matrix follows from
the Dicke amplitudes:

    <0|rho|0> = sum_q |c_q|^2 (N - q)/N
    <0|rho|1> = sum_q c_q c_{q+1}^* sqrt((N - q)(q + 1))/N

which is the binomial-weighted bilinear form of the B coefficients after
the basis change; this generic form sidesteps the per-sector index
bookkeeping entirely and is pinned to the brute-force partial trace.
"""

from dataclasses import dataclass

import numpy as np

from .floquet import CouplingSpec, FloquetBlocks, diagonal_blocks
from .states import CoherentParams, ParityState, coherent_dicke, from_parity, to_parity


@dataclass(frozen=True)
class SingleQubitRDM:
    """rho_1 = [[p, g], [g*, 1-p]]; trace fixed at one by construction."""
    population: float
    coherence: complex

    def __post_init__(self):
        det = self.population * (1.0 - self.population) - abs(self.coherence) ** 2
        if det < -1e-12:
            raise ValueError(f"RDM not positive semidefinite: det = {det:.3e}")

    def eigenvalues(self) -> tuple[float, float]:
        det = self.population * (1.0 - self.population) - abs(self.coherence) ** 2
        disc = np.sqrt(max(0.0, 1.0 - 4.0 * det))
        return (1.0 + disc) / 2.0, (1.0 - disc) / 2.0

    def matrix(self) -> np.ndarray:
        return np.array([[self.population, self.coherence],
                         [np.conj(self.coherence), 1.0 - self.population]])


@dataclass(frozen=True)
class EntropySeries:
    kicks: np.ndarray
    linear: np.ndarray
    von_neumann: np.ndarray
    params: dict


def evolve_parity(state: ParityState, blocks: FloquetBlocks, n_kicks: int) -> ParityState:
    """Apply U^n to a parity-basis state (diagonal blocks only)."""
    if blocks.representation != "diagonal":
        raise ValueError("evolve_parity requires diagonal blocks")
    if blocks.n_qubits != state.n_qubits:
        raise ValueError("qubit-count mismatch between state and blocks")
    if n_kicks == 0:
        return state
    un = blocks.power(n_kicks)
    return ParityState(state.n_qubits,
                       un.diagonal_entries("plus") * state.plus,
                       un.diagonal_entries("minus") * state.minus)


def _rdm_from_dicke(n: int, c: np.ndarray) -> SingleQubitRDM:
    q = np.arange(n + 1)
    abs2 = c.real**2 + c.imag**2  # one rounding path for weights and norm
    norm2 = float(abs2.sum())
    pop = float((abs2 * ((n - q) / n)).sum()) / norm2
    w = np.sqrt((n - q[:-1]) * (q[:-1] + 1.0)) / n
    coh = complex((c[:-1] * np.conj(c[1:]) * w).sum()) / norm2
    return SingleQubitRDM(pop, coh)


def single_qubit_rdm(state: ParityState) -> SingleQubitRDM:
    """Single-qubit reduced density matrix of a symmetric state."""
    sym = from_parity(state)
    return _rdm_from_dicke(state.n_qubits, sym.coeffs)


def linear_entropy(rdm: SingleQubitRDM) -> float:
    """1 - Tr rho^2 written as [r(2 - r) - |w|^2]/2; range [0, 1/2]."""
    r = 2.0 * rdm.population
    w2 = 4.0 * abs(rdm.coherence) ** 2
    s = (r * (2.0 - r) - w2) / 2.0
    return float(min(max(s, 0.0), 0.5))


def von_neumann_entropy(rdm: SingleQubitRDM) -> float:
    """-sum lambda ln lambda of the qubit RDM (natural log, 0 ln 0 := 0)."""
    s = 0.0
    for lam in rdm.eigenvalues():
        lam = min(max(lam, 0.0), 1.0)
        if lam > 0.0:
            s -= lam * np.log(lam)
    return float(min(max(s, 0.0), np.log(2.0)))


def entropy_series(params: CoherentParams, n: int, j: CouplingSpec, m: int,
                   n_max: int) -> EntropySeries:
    """Linear and von Neumann entropy of one qubit after 0..n_max kicks."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    blocks = diagonal_blocks(n, j, m)
    psi0 = to_parity(coherent_dicke(params, n))
    kicks = np.arange(n_max + 1)
    lin = np.empty(n_max + 1)
    vne = np.empty(n_max + 1)
    for i, nk in enumerate(kicks):
        rdm = single_qubit_rdm(evolve_parity(psi0, blocks, int(nk)))
        lin[i] = linear_entropy(rdm)
        vne[i] = von_neumann_entropy(rdm)
    return EntropySeries(kicks, lin, vne,
                         params={"theta0": params.theta0, "phi0": params.phi0,
                                 "n_qubits": n, "coupling": j.label(), "tau_m": m})


def detect_period(series, tol: float):
    """Smallest p >= 1 with |S(i+p) - S(i)| <= tol over the window, else None."""
    values = series.linear if isinstance(series, EntropySeries) else np.asarray(series)
    length = len(values)
    if length < 3:
        raise ValueError("series too short for period detection")
    for p in range(1, length - 1):
        if np.abs(values[p:] - values[:-p]).max() <= tol:
            return p
    return None
