"""Dicke-basis states, parity-adapted basis transforms, and Schmidt splits.

The permutation-symmetric sector of N qubits is spanned by the Dicke
states |w_q>, q = 0..N (q = number of qubits in |1>).  The parity
operator (tensor product of sigma_y over all qubits) splits this sector
into a positive and a negative block; the adapted basis pairs |w_q> with
|w_{N-q}> using a parity-dependent phase:

    even N:  (|w_q> +/- (-1)^(N/2 - q) |w_{N-q}>) / sqrt(2),  middle |w_{N/2}>
    odd  N:  (|w_q> +/- i^(N-2q) |w_{N-q}>) / sqrt(2)

Amplitudes are stored in the Dicke basis; the parity representation is a
view computed on demand.
"""

from dataclasses import dataclass
from math import lgamma

import numpy as np

NORM_TOL = 1e-12


def log_binomial(n: int, k: int) -> float:
    """ln C(n, k) via log-gamma; exact-scale safe for n up to ~1e6."""
    if k < 0 or k > n or n < 0:
        raise ValueError(f"binomial out of range: ({n}, {k})")
    return lgamma(n + 1) - lgamma(k + 1) - lgamma(n - k + 1)


def _log_binomial_row(n: int, k: np.ndarray) -> np.ndarray:
    return (lgamma(n + 1)
            - np.array([lgamma(x + 1) for x in k])
            - np.array([lgamma(n - x + 1) for x in k]))


@dataclass(frozen=True)
class CoherentParams:
    """Bloch angles of the single-qubit coherent state cos(t/2)|0> + e^{-i p} sin(t/2)|1>."""
    theta0: float
    phi0: float

    def __post_init__(self):
        if not (np.isfinite(self.theta0) and np.isfinite(self.phi0)):
            raise ValueError("coherent-state angles must be finite")
        object.__setattr__(self, "theta0", float(min(max(self.theta0, 0.0), np.pi)))
        object.__setattr__(self, "phi0", float(self.phi0))


@dataclass(frozen=True)
class SymmetricState:
    """Amplitudes c_q over the Dicke basis, q = 0..N."""
    n_qubits: int
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        object.__setattr__(self, "coeffs", c)
        if self.n_qubits < 1:
            raise ValueError("n_qubits must be >= 1")
        if c.shape != (self.n_qubits + 1,):
            raise ValueError(f"expected {self.n_qubits + 1} amplitudes, got {c.shape}")
        norm = np.linalg.norm(c)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state not normalized: |norm - 1| = {abs(norm - 1.0):.3e}")

    def fidelity(self, other: "SymmetricState") -> float:
        return abs(np.vdot(self.coeffs, other.coeffs))


@dataclass(frozen=True)
class ParityState:
    """Amplitudes over the parity-adapted basis, split by parity sector."""
    n_qubits: int
    plus: np.ndarray
    minus: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.plus, dtype=complex)
        m = np.asarray(self.minus, dtype=complex)
        object.__setattr__(self, "plus", p)
        object.__setattr__(self, "minus", m)
        n = self.n_qubits
        want = (n // 2 + 1, n // 2) if n % 2 == 0 else ((n + 1) // 2, (n + 1) // 2)
        if (len(p), len(m)) != want:
            raise ValueError(f"block lengths {(len(p), len(m))} != {want} for N={n}")
        norm2 = np.linalg.norm(p) ** 2 + np.linalg.norm(m) ** 2
        if abs(norm2 - 1.0) > NORM_TOL:
            raise ValueError(f"parity state not normalized: |norm^2 - 1| = {abs(norm2 - 1.0):.3e}")


@dataclass(frozen=True)
class SchmidtSpectrum:
    """Squared Schmidt coefficients of a bipartition, descending order."""
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if np.any(v < -1e-15):
            raise ValueError("negative Schmidt weight beyond clamp tolerance")
        v = np.clip(v, 0.0, None)
        object.__setattr__(self, "values", np.sort(v)[::-1])
        if abs(v.sum() - 1.0) > NORM_TOL:
            raise ValueError(f"Schmidt weights sum to {v.sum():.15f}")

    def entropy(self, base: float = 2.0) -> float:
        """Von Neumann entropy of the spectrum (0 log 0 := 0)."""
        v = self.values[self.values > 0.0]
        return float(-(v * np.log(v)).sum() / np.log(base))


def pair_phases(n: int) -> np.ndarray:
    """Phase attached to |w_{N-q}> in the positive parity combination.

    Real signs (-1)^(N/2 - q) for even N, units i^(N-2q) for odd N.
    Length floor(N/2) (the even-N middle state needs no phase).
    """
    if n % 2 == 0:
        j = n // 2
        q = np.arange(j)
        return ((-1.0) ** (j - q)).astype(complex)
    q = np.arange((n + 1) // 2)
    return 1j ** ((n - 2 * q) % 4)


def coherent_dicke(params: CoherentParams, n: int) -> SymmetricState:
    """Dicke amplitudes of the N-fold product of a coherent state.

    c_q = sqrt(C(N,q)) cos^(N-q)(t/2) sin^q(t/2) e^{-i q p}, assembled in
    log space so large N cannot overflow.  The poles t = 0, pi are exact
    single-amplitude states.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    theta, phi = params.theta0, params.phi0
    c = np.zeros(n + 1, dtype=complex)
    if theta == 0.0:
        c[0] = 1.0
        return SymmetricState(n, c)
    if theta == np.pi:
        c[n] = np.exp(-1j * n * phi)
        return SymmetricState(n, c)
    q = np.arange(n + 1)
    ln_mag = (0.5 * _log_binomial_row(n, q)
              + (n - q) * np.log(np.cos(theta / 2.0))
              + q * np.log(np.sin(theta / 2.0)))
    c = np.exp(ln_mag) * np.exp(-1j * q * phi)
    c /= np.linalg.norm(c)
    return SymmetricState(n, c)


def to_parity(state: SymmetricState) -> ParityState:
    """Rewrite Dicke amplitudes in the parity-adapted basis."""
    n = state.n_qubits
    c = state.coeffs
    ph = pair_phases(n)
    half = len(ph)
    lo = c[:half]
    hi = c[n - np.arange(half)]
    # <phi_q^+|psi> pairs c_q with conj(phase) * c_{N-q}
    plus = (lo + np.conj(ph) * hi) / np.sqrt(2.0)
    minus = (lo - np.conj(ph) * hi) / np.sqrt(2.0)
    if n % 2 == 0:
        plus = np.concatenate([plus, [c[n // 2]]])
    return ParityState(n, plus, minus)


def from_parity(state: ParityState) -> SymmetricState:
    """Inverse of to_parity."""
    n = state.n_qubits
    ph = pair_phases(n)
    half = len(ph)
    p = state.plus[:half]
    m = state.minus
    c = np.zeros(n + 1, dtype=complex)
    c[:half] = (p + m) / np.sqrt(2.0)
    c[n - np.arange(half)] = ph * (p - m) / np.sqrt(2.0)
    if n % 2 == 0:
        c[n // 2] = state.plus[n // 2]
    return SymmetricState(n, c)


def schmidt_weight_matrix(n: int, n_a: int) -> np.ndarray:
    """sqrt(C(N_A,k) C(N_B,l) / C(N,k+l)) on the (k, l) grid."""
    n_b = n - n_a
    ka = np.arange(n_a + 1)
    kb = np.arange(n_b + 1)
    ln_a = _log_binomial_row(n_a, ka)
    ln_b = _log_binomial_row(n_b, kb)
    ln_n = _log_binomial_row(n, np.arange(n + 1))
    s = np.add.outer(ka, kb)
    return np.exp(0.5 * (ln_a[:, None] + ln_b[None, :] - ln_n[s]))


def schmidt_matrix(state: SymmetricState, n_a: int) -> np.ndarray:
    """Coefficient matrix M with psi = sum_{k,l} M_{k,l} |w_k^A> |w_l^B>."""
    n = state.n_qubits
    if not 1 <= n_a <= n - 1:
        raise ValueError(f"n_a must be in [1, {n - 1}]")
    s = np.add.outer(np.arange(n_a + 1), np.arange(n - n_a + 1))
    return state.coeffs[s] * schmidt_weight_matrix(n, n_a)


def bipartite_schmidt(state: SymmetricState, n_a: int) -> SchmidtSpectrum:
    """Schmidt spectrum of an (n_a : N - n_a) bipartition.

    Uses the exact hypergeometric split of each Dicke state, so the
    reduced matrix is only (n_a + 1)-dimensional regardless of N.
    """
    m = schmidt_matrix(state, n_a)
    sv = np.linalg.svd(m, compute_uv=False)
    lam = sv**2
    lam = np.clip(lam, 0.0, None)
    return SchmidtSpectrum(lam / lam.sum())
