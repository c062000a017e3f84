"""Double-double (hi, lo) float arithmetic for exact-scale phase reduction.

Quasi-energy phases involve products J * d_q with |d_q| up to ~N^2/2
(~1.25e11 at N = 5e5).  A plain double product loses ~5 digits there,
which is larger than the mean level spacing, so spacing statistics would
be garbage.  Representing J as an unevaluated sum hi + lo (~32 digits)
and reducing mod 4 before any trig keeps the reduction error at the
~1e-21 level; collapsing the result to one double costs a final ulp of
the [-2, 2) window (~1e-16), still four decades inside the 1e-12 phase
budget.

All helpers are vectorized over numpy arrays.
"""

import mpmath as mp
import numpy as np

_SPLITTER = 134217729.0  # 2^27 + 1, Dekker split constant


def two_sum(a, b):
    """Error-free sum: returns (s, e) with s + e == a + b exactly."""
    s = a + b
    bb = s - a
    e = (a - (s - bb)) + (b - bb)
    return s, e


def two_prod(a, b):
    """Error-free product via Dekker splitting: p + e == a * b exactly."""
    p = a * b
    aa = _SPLITTER * a
    ahi = aa - (aa - a)
    alo = a - ahi
    bb = _SPLITTER * b
    bhi = bb - (bb - b)
    blo = b - bhi
    e = ((ahi * bhi - p) + ahi * blo + alo * bhi) + alo * blo
    return p, e


def from_mp(x) -> tuple[float, float]:
    """Round an mpmath value to a (hi, lo) pair (needs mp.dps >= 35)."""
    hi = float(x)
    lo = float(mp.mpf(x) - mp.mpf(hi))
    return hi, lo


def mul_mod4(hi: float, lo: float, k):
    """(hi + lo) * k reduced to [-2, 2), for exact double values k.

    k must be exactly representable (integers below 2^53 qualify).  The
    congruence is exact because 4 * round(p/4) is representable and the
    final subtraction is Sterbenz-exact.
    """
    k = np.asarray(k, dtype=np.float64)
    p, e = two_prod(hi, k)
    e = e + lo * k
    q = np.rint(p * 0.25)
    r = (p - 4.0 * q) + e
    # one more wrap in case r + e crossed a boundary
    r = r - 4.0 * np.rint(r * 0.25)
    return r
