"""Kicked-top parameter bridge and the classical map utilities.

Matching exp(-i k'/(2N) sum sz sz) exp(-i p/2 sum sy) against the chain
operator at tau = m*pi/2 gives p = m*pi and k' = N J pi m, so the twist
strength grows with N and the usual classical limit (N -> inf at fixed
k') is unavailable.  The classical map itself is still useful as a
context check for the parameter bridge.
"""

from dataclasses import dataclass

import numpy as np

from .floquet import CouplingSpec


@dataclass(frozen=True)
class TopParams:
    p: float        # rotation angle about y
    k_prime: float  # twist strength

    def __post_init__(self):
        if not (np.isfinite(self.p) and np.isfinite(self.k_prime)):
            raise ValueError("top parameters must be finite")


@dataclass(frozen=True)
class BlochPoint:
    x: float
    y: float
    z: float

    def __post_init__(self):
        r = np.sqrt(self.x**2 + self.y**2 + self.z**2)
        if not np.isfinite(r) or r == 0.0:
            raise ValueError("invalid Bloch vector")
        object.__setattr__(self, "x", float(self.x / r))
        object.__setattr__(self, "y", float(self.y / r))
        object.__setattr__(self, "z", float(self.z / r))

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])


def map_params(n: int, j: CouplingSpec, m: int = 1) -> TopParams:
    """Kicked-top parameters equivalent to the chain at tau = m*pi/2."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return TopParams(p=m * np.pi, k_prime=n * j.value() * np.pi * m)


def classical_step(point: BlochPoint, params: TopParams) -> BlochPoint:
    """One kick of the classical top map (rotation about y, then twist)."""
    x, y, z = point.x, point.y, point.z
    p, k = params.p, params.k_prime
    a = x * np.cos(p) + z * np.sin(p)
    b = k * (z * np.cos(p) - x * np.sin(p))
    return BlochPoint(a * np.cos(b) - y * np.sin(b),
                      a * np.sin(b) + y * np.cos(b),
                      -x * np.sin(p) + z * np.cos(p))


def trajectory(point: BlochPoint, params: TopParams, steps: int) -> np.ndarray:
    out = np.empty((steps + 1, 3))
    out[0] = point.as_array()
    for i in range(steps):
        point = classical_step(point, params)
        out[i + 1] = point.as_array()
    return out


def lle_estimate(params: TopParams, mode: str = "analytic",
                 steps: int = 200000, separation: float = 1e-8,
                 start: BlochPoint | None = None, burn: int = 1000) -> float:
    """Largest Lyapunov exponent of the classical map.

    "analytic" returns ln(k' sin p) - 1, the large-k' estimate, except at
    p = m*pi where the exponent is zero by construction (the map is a
    rotation composed with a twist about the rotated pole).  The
    "two_trajectory" mode runs a renormalized two-orbit divergence
    estimate; it converges to the analytic value only for strong kicks.
    """
    p, k = params.p, params.k_prime
    if mode == "analytic":
        if abs(np.sin(p)) < 1e-12:
            return 0.0
        arg = k * np.sin(p)
        if arg <= 0.0:
            raise ValueError("analytic estimate needs k' sin(p) > 0")
        return float(np.log(arg) - 1.0)
    if mode != "two_trajectory":
        raise ValueError(f"unknown mode {mode!r}")

    x = (start or BlochPoint(0.3, 0.4, 0.8660254037844386)).as_array()
    for _ in range(burn):
        x = _step_array(x, p, k)
    # deterministic transverse offset
    t = np.array([-x[1], x[0], 0.0])
    if np.linalg.norm(t) < 1e-8:
        t = np.array([1.0, 0.0, 0.0])
    t /= np.linalg.norm(t)
    y = x + separation * t
    y /= np.linalg.norm(y)
    acc = 0.0
    for _ in range(steps):
        x = _step_array(x, p, k)
        y = _step_array(y, p, k)
        d = np.linalg.norm(y - x)
        acc += np.log(d / separation)
        y = x + (separation / d) * (y - x)
        y /= np.linalg.norm(y)
    return float(acc / steps)


def _step_array(v: np.ndarray, p: float, k: float) -> np.ndarray:
    x, y, z = v
    a = x * np.cos(p) + z * np.sin(p)
    b = k * (z * np.cos(p) - x * np.sin(p))
    out = np.array([a * np.cos(b) - y * np.sin(b),
                    a * np.sin(b) + y * np.cos(b),
                    -x * np.sin(p) + z * np.cos(p)])
    return out / np.linalg.norm(out)
