"""Special functions and generic numerical machinery.

Fresnel integrals use the pi/2-argument convention throughout::

    C(x) = int_0^x cos(pi t^2 / 2) dt,    S(x) = int_0^x sin(pi t^2 / 2) dt

so that C, S -> 1/2 as x -> +inf.  Other conventions rescale the argument and
silently distort the position-difference density, so nothing in this package
should call a Fresnel routine except through :func:`fresnel_c` and
:func:`fresnel_s`.

Discrete transforms are unitary (1/sqrt(n) each way) and centred: sample index
``n // 2`` sits at coordinate zero on both the direct and conjugate axes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import special

from .errors import BadGrid, NoCrossing, NonConvergence

__all__ = [
    "Grid1D",
    "sinc",
    "fresnel_c",
    "fresnel_s",
    "integrate",
    "dft_1d",
    "full_width_at_fraction",
]


@dataclass(frozen=True)
class Grid1D:
    """Uniformly spaced samples ``values[j]`` at ``min + j * step``."""

    min: float
    max: float
    n_points: int
    values: np.ndarray | None = None

    def __post_init__(self):
        if int(self.n_points) != self.n_points or self.n_points < 2:
            raise BadGrid(f"n_points must be an integer >= 2, got {self.n_points}")
        if not (np.isfinite(self.min) and np.isfinite(self.max)) or self.max <= self.min:
            raise BadGrid(f"need finite max > min, got [{self.min}, {self.max}]")
        if self.values is not None:
            values = np.asarray(self.values)
            if values.shape[-1] != self.n_points:
                raise BadGrid(
                    f"values has {values.shape[-1]} samples, grid has {self.n_points}"
                )
            object.__setattr__(self, "values", values)

    @classmethod
    def centered(cls, n_points: int, step: float, values=None) -> "Grid1D":
        """Grid with coordinate zero at index ``n_points // 2`` (FFT layout)."""
        half = n_points // 2
        return cls(-half * step, (n_points - 1 - half) * step, n_points, values)

    @property
    def step(self) -> float:
        return (self.max - self.min) / (self.n_points - 1)

    @property
    def points(self) -> np.ndarray:
        step = self.step
        offset = -self.min / step
        j = np.arange(self.n_points)
        if abs(offset - round(offset)) < 1e-9:
            # zero lies on the grid: build around it so that sample is exactly 0
            return step * (j - round(offset))
        return self.min + step * j

    def with_values(self, values) -> "Grid1D":
        return Grid1D(self.min, self.max, self.n_points, values)

    def conjugate(self) -> "Grid1D":
        """Centred grid of the conjugate variable (k = 2 pi m / (n step))."""
        return Grid1D.centered(self.n_points, 2 * np.pi / (self.n_points * self.step))


def sinc(x):
    """Unnormalised sinc, ``sin(x)/x`` with ``sinc(0) = 1``."""
    # np.sinc is the normalised variant sin(pi x)/(pi x)
    return np.sinc(np.asarray(x, dtype=float) / np.pi)


def fresnel_c(x):
    return special.fresnel(x)[1]


def fresnel_s(x):
    return special.fresnel(x)[0]


# Gauss-Kronrod 7/15 rule on [-1, 1]: positive Kronrod nodes (descending) and
# weights; the Gauss-7 nodes are the odd-indexed Kronrod nodes plus zero.
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_W_KRONROD = np.concatenate([_WGK[:-1], _WGK[::-1]])
_W_GAUSS = np.zeros(15)
_W_GAUSS[[1, 3, 5]] = _WG[:3]
_W_GAUSS[7] = _WG[3]
_W_GAUSS[[9, 11, 13]] = _WG[2::-1]


def _map_infinite(lo: float, hi: float):
    """Return (g, t_lo, t_hi, to_t) where x = g(t) maps a finite t-range onto [lo, hi].

    [lo, inf)  : x = lo + t/(1-t),       t in [0, 1)
    (-inf, hi] : x = hi - t/(1-t),       t in [0, 1)   (orientation flipped)
    (-inf, inf): x = t/(1-t^2),          t in (-1, 1)
    g returns (x, dx/dt).
    """
    if math.isinf(lo) and math.isinf(hi):
        def g(t):
            d = 1.0 - t * t
            return t / d, (1.0 + t * t) / (d * d)

        def to_t(x):
            x = float(x)
            return 0.0 if x == 0 else (-1.0 + math.sqrt(1.0 + 4.0 * x * x)) / (2.0 * x)

        return g, -1.0, 1.0, to_t
    if math.isinf(hi):
        def g(t):
            d = 1.0 - t
            return lo + t / d, 1.0 / (d * d)

        return g, 0.0, 1.0, lambda x: (x - lo) / (1.0 + x - lo)

    def g(t):
        d = 1.0 - t
        return hi - t / d, 1.0 / (d * d)

    # flipped orientation: integral over x in (-inf, hi] equals integral over t in [0, 1)
    return g, 0.0, 1.0, lambda x: (hi - x) / (1.0 + hi - x)


def integrate(
    f: Callable[[np.ndarray], np.ndarray],
    lo: float,
    hi: float,
    rel_tol: float = 1e-10,
    abs_tol: float = 0.0,
    points=(),
    max_intervals: int = 200_000,
    initial_panels: int = 16,
) -> float:
    """Globally adaptive Gauss-Kronrod (7/15) quadrature of a vectorised ``f``.

    ``f`` is called with 1-D float arrays and must return arrays of the same
    shape.  Infinite limits are handled by the substitutions documented in
    :func:`_map_infinite`; ``points`` are interior break points (e.g. known
    peaks) that seed the initial subdivision.  Raises :class:`NonConvergence`
    if ``max_intervals`` is reached before the estimated error drops below
    ``max(rel_tol * |I|, abs_tol)``.
    """
    if rel_tol <= 0 and abs_tol <= 0:
        raise ValueError("need rel_tol > 0 or abs_tol > 0")
    if lo == hi:
        return 0.0
    sign = 1.0
    if lo > hi:
        lo, hi, sign = hi, lo, -1.0

    if math.isinf(lo) or math.isinf(hi):
        g, t_lo, t_hi, to_t = _map_infinite(lo, hi)

        def h(t):
            x, jac = g(t)
            return np.asarray(f(x), dtype=float) * jac

        brk = sorted(to_t(p) for p in points if lo < p < hi)
    else:
        h, t_lo, t_hi = f, lo, hi
        brk = sorted(p for p in points if lo < p < hi)

    edges = [t_lo]
    for seg_lo, seg_hi in zip([t_lo] + brk, brk + [t_hi]):
        edges.extend(np.linspace(seg_lo, seg_hi, initial_panels + 1)[1:])
    edges = np.asarray(edges)
    a, b = edges[:-1], edges[1:]

    done_sum = 0.0
    done_err = 0.0
    while True:
        centre = 0.5 * (a + b)
        half = 0.5 * (b - a)
        x = centre[:, None] + half[:, None] * _NODES[None, :]
        fx = np.asarray(h(x.ravel()), dtype=float).reshape(x.shape)
        if not np.all(np.isfinite(fx)):
            raise NonConvergence("integrand returned non-finite values")
        kron = half * (fx @ _W_KRONROD)
        gauss = half * (fx @ _W_GAUSS)
        err = np.abs(kron - gauss)
        # roundoff floor per panel
        err = np.maximum(err, 50 * np.finfo(float).eps * half * (np.abs(fx) @ _W_KRONROD))

        total = done_sum + kron.sum()
        total_err = done_err + err.sum()
        target = max(rel_tol * abs(total), abs_tol)
        if total_err <= target:
            return sign * total
        n_live = a.size
        if n_live * 2 + 1 > max_intervals:
            raise NonConvergence(
                f"integral over [{lo}, {hi}] not converged: estimate {total:.16g}, "
                f"error {total_err:.3g} > {target:.3g} after {n_live} panels"
            )
        # Panels below their share of the budget are frozen; the rest are bisected.
        share = (target - done_err) / n_live
        split = err > share
        if not split.any():
            split = err >= err.max()
        done_sum += kron[~split].sum()
        done_err += err[~split].sum()
        a, b = a[split], b[split]
        mid = 0.5 * (a + b)
        a, b = np.concatenate([a, mid]), np.concatenate([mid, b])


def _is_pow2(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


def _dft(values: np.ndarray, inverse: bool, axis: int = -1) -> np.ndarray:
    n = values.shape[axis]
    if not _is_pow2(n):
        raise BadGrid(f"transform length must be a power of two, got {n}")
    shifted = np.fft.ifftshift(values, axes=axis)
    out = (np.fft.ifft if inverse else np.fft.fft)(shifted, axis=axis, norm="ortho")
    return np.fft.fftshift(out, axes=axis)


def dft_1d(samples: Grid1D, direction: str = "forward") -> Grid1D:
    """Unitary centred DFT of ``samples.values``; returns samples on the conjugate axis.

    Forward uses ``exp(-i k x)``, inverse ``exp(+i k x)``; both carry 1/sqrt(n),
    so the l2 norm of the samples is preserved.  Multi-dimensional ``values``
    are transformed along the last axis.
    """
    if direction not in ("forward", "inverse"):
        raise ValueError(f"direction must be 'forward' or 'inverse', got {direction!r}")
    if samples.values is None:
        raise BadGrid("grid carries no samples")
    out = _dft(np.asarray(samples.values, dtype=complex), direction == "inverse")
    conj = samples.conjugate()
    return conj.with_values(out)


def full_width_at_fraction(
    f: Callable[[float], float],
    fraction: float,
    bracket: tuple[float, float],
    n_scan: int = 4001,
    rel_precision: float = 1e-10,
) -> float:
    """Distance between the two points where ``f`` falls to ``fraction * max f``.

    The peak is located on a uniform scan of ``bracket`` (then polished), and
    each crossing is bisected outward from the peak.  Raises
    :class:`NoCrossing` if ``f`` stays above the threshold up to either end of
    the bracket.
    """
    if not 0.0 < fraction < 1.0:
        raise ValueError(f"fraction must lie in (0, 1), got {fraction}")
    lo, hi = bracket
    xs = np.linspace(lo, hi, n_scan)
    fx = np.array([f(x) for x in xs], dtype=float)
    i = int(np.argmax(fx))
    x_peak, f_peak = xs[i], fx[i]
    # golden-section polish inside the neighbouring cells
    left, right = xs[max(i - 1, 0)], xs[min(i + 1, n_scan - 1)]
    gr = (math.sqrt(5) - 1) / 2
    for _ in range(80):
        c = right - gr * (right - left)
        d = left + gr * (right - left)
        if f(c) > f(d):
            right = d
        else:
            left = c
    x_try = 0.5 * (left + right)
    if f(x_try) > f_peak:
        x_peak, f_peak = x_try, f(x_try)
    threshold = fraction * f_peak

    def crossing(direction: int) -> float:
        idx = np.arange(i + 1, n_scan) if direction > 0 else np.arange(i - 1, -1, -1)
        below = idx[fx[idx] < threshold]
        if below.size == 0:
            raise NoCrossing(
                f"f does not fall below {fraction} of its maximum on the "
                f"{'right' if direction > 0 else 'left'} of the bracket"
            )
        outer = xs[below[0]]
        inner = xs[below[0] - direction] if below[0] - direction != i else x_peak
        tol = rel_precision * max(abs(hi - lo), 1e-300) * 1e-2
        for _ in range(200):
            if abs(outer - inner) <= tol:
                break
            mid = 0.5 * (inner + outer)
            if f(mid) >= threshold:
                inner = mid
            else:
                outer = mid
        return 0.5 * (inner + outer)

    return crossing(+1) - crossing(-1)
