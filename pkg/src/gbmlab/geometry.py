"""Latent-space primitives.

Vertices live either on the circle parameterized as [0, 1) with the
wraparound distance d(x, y) = min(|x - y|, 1 - |x - y|), or on the unit
sphere S^t in R^(t+1) with Euclidean (chord) distance.  This module
provides distances, uniform sampling, and the normalized cap and
cap-intersection areas that every threshold formula depends on.

Conventions: `t` is the sphere dimension (t >= 1), chord distances lie in
[0, 2], and all areas are fractions of the total sphere area (values in
[0, 1]).  Interval comparisons are closed on both ends.
"""

from __future__ import annotations

import hashlib
import math

import numpy as np
from scipy import integrate
from scipy.special import betainc, gamma

from .rng import normal_rows

# Cache for cap_intersection_fraction keyed by rounded arguments.
_LENS_CACHE: dict[tuple, float] = {}

DEFAULT_MC_SAMPLES = 1_000_000


def _check_dimension(t: int) -> int:
    t = int(t)
    if t < 1:
        raise ValueError(f"sphere dimension must be >= 1, got {t}")
    return t


def geodesic_distance(x, y):
    """Wraparound distance on the unit-circumference circle.

    Accepts scalars or arrays of coordinates in [0, 1); the result is in
    [0, 1/2].
    """
    d = np.abs(np.asarray(x, dtype=float) - np.asarray(y, dtype=float))
    out = np.minimum(d, 1.0 - d)
    return float(out) if np.isscalar(x) and np.isscalar(y) else out


def chord_of_geodesic(d):
    """Euclidean chord length between two unit-circle points at geodesic distance d.

    Strictly increasing on [0, 1/2], mapping 0 -> 0 and 1/2 -> 2.  Bands
    stated in geodesic form and in chord form therefore induce identical
    edge sets.
    """
    out = 2.0 * np.sin(np.pi * np.asarray(d, dtype=float))
    return float(out) if np.isscalar(d) else out


def sample_circle(rng: np.random.Generator, n: int) -> np.ndarray:
    """n i.i.d. uniform circle coordinates in [0, 1)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return rng.random(n)


def sample_sphere(rng: np.random.Generator, n: int, t: int) -> np.ndarray:
    """n i.i.d. uniform points on S^t, shape (n, t+1).

    Normalized isotropic Gaussian vectors: exactly uniform in any
    dimension, deterministic given the generator state.
    """
    t = _check_dimension(t)
    if n < 1:
        raise ValueError("n must be >= 1")
    g = normal_rows(rng, n, t + 1)
    norms = np.linalg.norm(g, axis=1, keepdims=True)
    # zero norm has probability zero; guard against pathological streams
    norms[norms == 0.0] = 1.0
    x = g / norms
    bad = np.abs(np.linalg.norm(x, axis=1) - 1.0) > 1e-12
    if np.any(bad):
        x[bad] /= np.linalg.norm(x[bad], axis=1, keepdims=True)
    return x


def _chord_angle(c: float) -> float:
    """Polar angle subtended by a chord of length c on the unit sphere."""
    return 2.0 * math.asin(min(1.0, max(0.0, 0.5 * c)))


def cap_fraction(t: int, r: float) -> float:
    """Fraction of S^t within chord distance r of a fixed point.

    Exact for all r in [0, 2] via the regularized incomplete beta
    function; for t = 2 this reduces to r^2 / 4.
    """
    t = _check_dimension(t)
    r = float(r)
    if not 0.0 <= r <= 2.0:
        raise ValueError(f"chord radius must lie in [0, 2], got {r}")
    cos_a = 1.0 - 0.5 * r * r
    x = max(0.0, 1.0 - cos_a * cos_a)
    half = 0.5 * betainc(0.5 * t, 0.5, x)
    return float(half if cos_a >= 0.0 else 1.0 - half)


def annulus_fraction(t: int, r1: float, r2: float) -> float:
    """Fraction of S^t at chord distance in [r1, r2] of a fixed point."""
    if r1 > r2:
        raise ValueError(f"need r1 <= r2, got r1={r1}, r2={r2}")
    return cap_fraction(t, r2) - cap_fraction(t, r1)


def cap_area_small_r(t: int, r: float) -> float:
    """Leading-order cap fraction c_t r^t / |S^t|, valid as r -> 0.

    Asymptotic cross-check only; use cap_fraction for exact values.
    """
    t = _check_dimension(t)
    c_t = math.pi ** (0.5 * t) / gamma(0.5 * t + 1.0)
    return c_t * float(r) ** t / sphere_surface_area(t)


def sphere_surface_area(t: int) -> float:
    """Total surface area of S^t embedded in R^(t+1)."""
    t = _check_dimension(t)
    return (t + 1) * math.pi ** (0.5 * (t + 1)) / gamma(0.5 * (t + 3))


def psi(t: int) -> float:
    """Isolated-vertex threshold constant sqrt(pi) (t+1) Gamma((t+2)/2) / Gamma((t+3)/2).

    Equals |S^t| / c_t, the reciprocal of the leading cap-area constant.
    psi(1) = pi, psi(2) = 4, psi(3) = 3 pi / 2.
    """
    t = _check_dimension(t)
    return math.sqrt(math.pi) * (t + 1) * gamma(0.5 * (t + 2)) / gamma(0.5 * (t + 3))


def _lens_circle(a1: float, a2: float, g: float) -> float:
    """Arc-overlap fraction for two circle caps of angular radii a1, a2 at separation g."""
    lo, hi = g - a2, g + a2
    overlap = max(0.0, min(a1, hi) - max(-a1, lo))
    # a second overlap lobe appears when the caps wrap around the far side
    overlap += max(0.0, min(a1, hi - 2.0 * math.pi) - max(-a1, lo - 2.0 * math.pi))
    return overlap / (2.0 * math.pi)


def _lens_sphere2(a1: float, a2: float, g: float) -> float:
    """Normalized intersection area on S^2 by polar quadrature about the first center."""
    ca2, cg, sg = math.cos(a2), math.cos(g), math.sin(g)

    def ring_arc(theta: float) -> float:
        st = math.sin(theta)
        denom = st * sg
        if denom < 1e-300:
            c = 1.0 if ca2 - math.cos(theta) * cg > 0 else -1.0
        else:
            c = (ca2 - math.cos(theta) * cg) / denom
        return st * math.acos(min(1.0, max(-1.0, c)))

    val, _ = integrate.quad(ring_arc, 0.0, a1, limit=200)
    return val / (2.0 * math.pi)


def _lens_monte_carlo(t: int, r1: float, r2: float, ell: float, samples: int) -> float:
    """Seeded rejection estimate of the cap-intersection fraction on S^t."""
    key = f"lens|{t}|{r1:.9f}|{r2:.9f}|{ell:.9f}|{samples}".encode()
    seed = int.from_bytes(hashlib.sha256(key).digest()[:8], "little")
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    g = _chord_angle(ell)
    c1 = np.zeros(t + 1)
    c1[0] = 1.0
    c2 = np.zeros(t + 1)
    c2[0], c2[1] = math.cos(g), math.sin(g)
    hits = 0
    block = 200_000
    remaining = samples
    while remaining > 0:
        m = min(block, remaining)
        x = rng.standard_normal((m, t + 1))
        x /= np.linalg.norm(x, axis=1, keepdims=True)
        d1 = np.linalg.norm(x - c1, axis=1)
        d2 = np.linalg.norm(x - c2, axis=1)
        hits += int(((d1 <= r1) & (d2 <= r2)).sum())
        remaining -= m
    return hits / samples


def cap_intersection_fraction(t: int, r1: float, r2: float, ell: float,
                              mc_samples: int = DEFAULT_MC_SAMPLES) -> float:
    """Fraction of S^t within chord distance r1 of one point and r2 of another.

    The two cap centers sit at chord distance ell.  Deterministic
    quadrature for t = 1, 2; seeded Monte Carlo (mc_samples points) for
    t >= 3.  Results are memoized per rounded argument tuple.

    Symmetric in (r1, r2), nonincreasing in ell, bounded by the smaller
    cap fraction, zero once the caps separate.
    """
    t = _check_dimension(t)
    for name, v in (("r1", r1), ("r2", r2), ("ell", ell)):
        if not 0.0 <= v <= 2.0:
            raise ValueError(f"{name} must lie in [0, 2], got {v}")
    r1, r2 = sorted((float(r1), float(r2)))
    key = (t, round(r1, 9), round(r2, 9), round(ell, 9), mc_samples if t >= 3 else 0)
    if key in _LENS_CACHE:
        return _LENS_CACHE[key]

    a1, a2, g = _chord_angle(r1), _chord_angle(r2), _chord_angle(ell)
    if g >= a1 + a2:
        out = 0.0
    elif g <= a2 - a1:
        # smaller cap nested inside the larger one
        out = cap_fraction(t, r1)
    elif t == 1:
        out = _lens_circle(a2, a1, g)
    elif t == 2:
        out = _lens_sphere2(a2, a1, g)
    else:
        out = _lens_monte_carlo(t, r1, r2, ell, mc_samples)
    _LENS_CACHE[key] = out
    return out
