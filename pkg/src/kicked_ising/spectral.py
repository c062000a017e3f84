"""Quasi-energy spectra, unfolding, and Poisson-class spacing statistics.

Rational couplings give exact lattice phases (at most 4h distinct values
per sector); irrational couplings give nondegenerate spectra whose
nearest-neighbor and higher-order spacing/ratio statistics are tested
against the uncorrelated references

    P^(k)(s) = k^k/(k-1)! s^(k-1) exp(-k s)          (unit-mean spacings)
    P^(k)(r) = (2k-1)!/((k-1)!)^2 r^(k-1)/(1+r)^(2k) (non-overlapping ratios)

Quasi-energies live on a circle; the default treatment closes it
periodically (the wrap spacing is one sample among ~N/2).
"""

from dataclasses import dataclass
from math import factorial

import numpy as np
from scipy import special

from .errors import NumericGuardError
from .floquet import CouplingSpec, diagonal_blocks

DEDUP_TOL = 1e-10
MAX_ORDER = 8


@dataclass(frozen=True)
class PhaseSpectrum:
    """Distinct sorted quasi-energy phases with multiplicities."""
    phases: np.ndarray
    multiplicities: np.ndarray
    n_qubits: int
    coupling: str
    sector: str
    precision_bound: float
    dedup_tol: float = DEDUP_TOL

    @property
    def dimension(self) -> int:
        return int(self.multiplicities.sum())

    @property
    def distinct_count(self) -> int:
        return len(self.phases)


@dataclass(frozen=True)
class SpacingSamples:
    order: int
    kind: str  # "spacing" | "ratio"
    values: np.ndarray
    n_filtered: int = 0


@dataclass(frozen=True)
class UnfoldedLevels:
    """Levels with unit mean nearest-neighbor spacing."""
    values: np.ndarray
    closed: bool
    span: float  # circumference when closed, total length otherwise
    method: str = "rank"

    def __len__(self):
        return len(self.values)


def _dedup(phases: np.ndarray, tol: float):
    order = np.sort(phases)
    if len(order) == 0:
        return order, np.array([], dtype=np.int64)
    new_group = np.concatenate([[True], np.diff(order) > tol])
    idx = np.flatnonzero(new_group)
    mult = np.diff(np.concatenate([idx, [len(order)]]))
    return order[idx], mult.astype(np.int64)


def eigenphases(n: int, j: CouplingSpec, m: int = 1, sector: str = "plus",
                dedup_tol: float = DEDUP_TOL) -> PhaseSpectrum:
    """Analytic quasi-energy phases of one (or both pooled) parity sector(s)."""
    if n < 2:
        raise ValueError("n must be >= 2")
    blocks = diagonal_blocks(n, j, m)
    if sector == "both":
        raw = np.concatenate([blocks.phases("plus"), blocks.phases("minus")])
    elif sector in ("plus", "minus"):
        raw = blocks.phases(sector)
    else:
        raise ValueError(f"unknown sector {sector!r}")
    distinct, mult = _dedup(raw, dedup_tol)
    return PhaseSpectrum(distinct, mult, n, j.label(), sector,
                         blocks.precision_bound, dedup_tol)


def perturbed_rational_spectrum(n: int, r: int, h: int, epsilon: float,
                                m: int = 1, sector: str = "plus",
                                dedup_tol: float = DEDUP_TOL) -> PhaseSpectrum:
    """Spectrum at J = r/h + epsilon (epsilon read as its decimal literal).

    epsilon = 0 falls back to the exact rational lattice.  Note that a
    decimal epsilon keeps J rational, so residual exact degeneracies can
    survive the perturbation (pairs with d_q - d_q' killing both the r/h
    and the epsilon lattices); dedup reports them as multiplicities.
    """
    if epsilon < 0 or epsilon > 1e-4:
        raise ValueError("epsilon must lie in [0, 1e-4]")
    if epsilon == 0.0:
        return eigenphases(n, CouplingSpec.rational(r, h), m, sector, dedup_tol)
    return eigenphases(n, CouplingSpec.perturbed_rational(r, h, epsilon),
                       m, sector, dedup_tol)


def _circular_moving_average(s: np.ndarray, window: int) -> np.ndarray:
    pad = np.concatenate([s[-window:], s, s[:window]])
    avg = np.convolve(pad, np.ones(window) / window, mode="same")
    return avg[window:-window]


def unfold(spectrum, method: str = "rank", window: int = 100,
           closed: bool = True) -> UnfoldedLevels:
    """Rescale distinct phases to unit mean nearest-neighbor spacing.

    "rank" divides by the global mean density (the empirical CDF of these
    near-uniform circular spectra is linear, so rank unfolding reduces to
    that rescale).  "local_mean" divides each spacing by a moving average
    over `window` neighbors before accumulating.
    """
    phases = spectrum.phases if isinstance(spectrum, PhaseSpectrum) else np.asarray(spectrum)
    phases = np.sort(phases)
    m_count = len(phases)
    if m_count < 100:
        raise NumericGuardError(f"need >= 100 distinct phases, got {m_count}")
    if not closed:
        # cut at the largest gap and treat the spectrum as a line
        gaps = np.diff(np.concatenate([phases, [phases[0] + 2 * np.pi]]))
        cut = int(np.argmax(gaps)) + 1
        phases = np.concatenate([phases[cut:], phases[:cut] + 2 * np.pi])
    if method == "rank":
        if closed:
            levels = (phases - phases[0]) * (m_count / (2 * np.pi))
            return UnfoldedLevels(levels, True, float(m_count), "rank")
        length = phases[-1] - phases[0]
        levels = (phases - phases[0]) * ((m_count - 1) / length)
        return UnfoldedLevels(levels, False, float(m_count - 1), "rank")
    if method == "local_mean":
        if window < 2:
            raise ValueError("window must be >= 2")
        if closed:
            s = np.diff(np.concatenate([phases, [phases[0] + 2 * np.pi]]))
            sig = s / _circular_moving_average(s, window)
            sig *= m_count / sig.sum()
            levels = np.concatenate([[0.0], np.cumsum(sig)[:-1]])
            return UnfoldedLevels(levels, True, float(m_count), f"local_mean:{window}")
        s = np.diff(phases)
        pad = np.concatenate([s[:window][::-1], s, s[-window:][::-1]])
        avg = np.convolve(pad, np.ones(window) / window, mode="same")[window:-window]
        sig = s / avg
        sig *= (m_count - 1) / sig.sum()
        levels = np.concatenate([[0.0], np.cumsum(sig)])
        return UnfoldedLevels(levels, False, float(m_count - 1), f"local_mean:{window}")
    raise ValueError(f"unknown unfolding method {method!r}")


def _extended(levels: UnfoldedLevels) -> tuple[np.ndarray, int]:
    v = levels.values
    if levels.closed:
        return np.concatenate([v, v + levels.span]), len(v)
    return v, len(v)


def kth_spacings(levels: UnfoldedLevels, k: int) -> SpacingSamples:
    """Raw k-th order spacings E_{i+k} - E_i (mean k on unfolded levels)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    ext, m_count = _extended(levels)
    if k >= m_count:
        raise ValueError(f"k = {k} >= level count {m_count}")
    if levels.closed:
        s = ext[k:m_count + k] - ext[:m_count]
    else:
        s = ext[k:] - ext[:-k]
    return SpacingSamples(k, "spacing", s)


def kth_ratios(levels: UnfoldedLevels, k: int) -> SpacingSamples:
    """Non-overlapping k-th order ratios (E_{i+2k}-E_{i+k})/(E_{i+k}-E_i), stride k."""
    if k < 1:
        raise ValueError("k must be >= 1")
    ext, m_count = _extended(levels)
    if 2 * k >= m_count:
        raise ValueError(f"need more than 2k = {2 * k} levels")
    stop = m_count - 2 * k + (1 if levels.closed else 0)
    idx = np.arange(0, stop, k)
    den = ext[idx + k] - ext[idx]
    num = ext[idx + 2 * k] - ext[idx + k]
    keep = den > 0
    filtered = int((~keep).sum())
    return SpacingSamples(k, "ratio", num[keep] / den[keep], filtered)


def reference_pdf(kind: str, k: int, x) -> np.ndarray:
    """Poisson-class density for unit-mean k-th spacings or k-th ratios."""
    if not 1 <= k <= MAX_ORDER:
        raise ValueError(f"order k must be in [1, {MAX_ORDER}]")
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("densities are supported on x >= 0")
    if kind == "spacing":
        return (k**k / factorial(k - 1)) * x ** (k - 1) * np.exp(-k * x)
    if kind == "ratio":
        coef = factorial(2 * k - 1) / factorial(k - 1) ** 2
        return coef * x ** (k - 1) / (1.0 + x) ** (2 * k)
    raise ValueError(f"unknown kind {kind!r}")


def reference_cdf(kind: str, k: int, x) -> np.ndarray:
    if not 1 <= k <= MAX_ORDER:
        raise ValueError(f"order k must be in [1, {MAX_ORDER}]")
    x = np.asarray(x, dtype=float)
    if kind == "spacing":
        return special.gammainc(k, k * x)
    if kind == "ratio":
        return special.betainc(k, k, x / (1.0 + x))
    raise ValueError(f"unknown kind {kind!r}")


def ks_distance(samples: SpacingSamples) -> float:
    """Sup distance between the empirical CDF and the Poisson reference.

    Spacings are rescaled to unit mean (divide by k) to match the
    reference normalization; ratios compare as-is.
    """
    x = np.sort(samples.values)
    if samples.kind == "spacing":
        x = x / samples.order
    n = len(x)
    if n == 0:
        raise NumericGuardError("no samples")
    f = reference_cdf(samples.kind, samples.order, x)
    grid = np.arange(1, n + 1) / n
    return float(max((grid - f).max(), (f - (grid - 1.0 / n)).max()))


def adjacent_ratio_stats(levels) -> dict:
    """Mean adjacent gap ratio min(s_j, s_{j+1})/max(s_j, s_{j+1}) plus counts."""
    if isinstance(levels, PhaseSpectrum):
        lev = UnfoldedLevels(np.sort(levels.phases), True, 2 * np.pi, "raw")
    elif isinstance(levels, UnfoldedLevels):
        lev = levels
    else:
        arr = np.sort(np.asarray(levels, dtype=float))
        lev = UnfoldedLevels(arr, False, float(arr[-1] - arr[0]), "raw")
    s = kth_spacings(lev, 1).values if len(lev) > 2 else None
    if s is None or len(s) < 2:
        raise NumericGuardError("too few levels for the adjacent gap ratio")
    a, b = s[:-1], s[1:]
    keep = np.maximum(a, b) > 0
    r = np.minimum(a[keep], b[keep]) / np.maximum(a[keep], b[keep])
    return {"r_mean": float(r.mean()), "n_used": int(keep.sum()),
            "n_filtered": int((~keep).sum())}


def mean_adjacent_ratio(levels) -> float:
    return adjacent_ratio_stats(levels)["r_mean"]


def density_table(samples: SpacingSamples, bins: int = 50):
    """(bin centers, empirical density, reference density) for reports.

    Spacings are binned over [0, 5] after unit-mean rescale, ratios over
    [0, 10], matching the visual range of the reference curves.
    """
    x = samples.values / samples.order if samples.kind == "spacing" else samples.values
    hi = 5.0 if samples.kind == "spacing" else 10.0
    hist, edges = np.histogram(x, bins=bins, range=(0.0, hi), density=True)
    centers = (edges[:-1] + edges[1:]) / 2.0
    return centers, hist, reference_pdf(samples.kind, samples.order, centers)


POISSON_MEAN_R = 2.0 * np.log(2.0) - 1.0  # ~0.3863
GOE_MEAN_R = 0.536
