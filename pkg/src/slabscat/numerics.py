"""Numerical substrate: adaptive quadrature, Fourier transforms, coefficient functions.

Conventions used throughout the package:

* Fourier transforms use the physics sign convention

      F(p) = INT exp(-i*p*y) f(y) dy,

  evaluated at arbitrary (off-grid) momenta ``p``.
* The Heaviside step takes the value 1 at the origin, ``heaviside(0) == 1``.
  Every step-gated formula in the package relies on this convention.
* Quadrature routines accept complex-valued integrands.  Integrands should be
  vectorized (accept an ndarray of abscissae and return the matching ndarray);
  scalar-only callables are detected and wrapped, at a performance cost.

The adaptive integrator is a nested Gauss-Kronrod (G7/K15) bisection scheme
with per-panel error estimates; the embedded 15-point Kronrod constants are
the classic QUADPACK values.
"""

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "SlabscatError",
    "AccuracyError",
    "TruncationError",
    "DomainError",
    "QuadratureSpec",
    "TransformSpec",
    "heaviside",
    "sinc",
    "sj",
    "integrate_1d",
    "integrate_2d",
    "fourier_1d",
    "fourier_2d",
    "transform_samples_1d",
    "transform_samples_2d",
    "gauss_legendre",
]


class SlabscatError(Exception):
    """Base class for all errors raised by this package."""


class AccuracyError(SlabscatError):
    """An adaptive routine failed to reach the requested tolerance.

    The best available estimate is attached as ``estimate`` and the error
    indicator of that estimate as ``error_estimate``.
    """

    def __init__(self, message, estimate=None, error_estimate=None):
        super().__init__(message)
        self.estimate = estimate
        self.error_estimate = error_estimate


class TruncationError(SlabscatError):
    """A transform's integrand is not small at the truncation boundary."""


class DomainError(SlabscatError):
    """Inputs lie outside the domain an operation is defined on."""


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and subdivision budget for the adaptive integrators."""

    rel_tol: float = 1e-8
    abs_tol: float = 1e-12
    max_subdivisions: int = 2000

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise DomainError("rel_tol must be positive")
        if self.abs_tol < 0:
            raise DomainError("abs_tol must be nonnegative")
        if self.max_subdivisions < 1:
            raise DomainError("max_subdivisions must be at least 1")


@dataclass(frozen=True)
class TransformSpec:
    """Truncation and sampling parameters for numeric Fourier transforms.

    ``truncation_radius`` is the half-width R of the sampled window [-R, R];
    ``sample_count`` is the number of uniform panels (a power of two for the
    numeric scheme, which uses sample_count + 1 nodes including both ends).
    """

    truncation_radius: float
    sample_count: int = 65536
    scheme: str = "numeric"

    def __post_init__(self):
        if not self.truncation_radius > 0:
            raise DomainError("truncation_radius must be positive")
        if self.scheme not in ("numeric", "analytic"):
            raise DomainError("scheme must be 'numeric' or 'analytic'")
        if self.scheme == "numeric":
            n = self.sample_count
            if n < 2 or (n & (n - 1)) != 0:
                raise DomainError("sample_count must be a power of two")


def heaviside(x):
    """Heaviside step function with the convention heaviside(0) == 1.

    Accepts scalars or arrays; returns 1.0 where x >= 0 and 0.0 elsewhere.
    """
    if np.isscalar(x):
        return 1.0 if x >= 0 else 0.0
    return np.where(np.asarray(x) >= 0, 1.0, 0.0)


# sin(x)/x = 1 - x^2/6 + x^4/120 - x^6/5040 + x^8/362880 - ...
_SINC_COEFFS = (1.0, -1.0 / 6.0, 1.0 / 120.0, -1.0 / 5040.0, 1.0 / 362880.0)
_SINC_SWITCH = 0.05


def sinc(x):
    """sin(x)/x with an even-series branch near 0 to avoid cancellation.

    Exactly 1 at x = 0.  Scalar or array input.
    """
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    out = np.empty_like(x)
    small = np.abs(x) < _SINC_SWITCH
    xs = x[small]
    x2 = xs * xs
    acc = np.full_like(xs, _SINC_COEFFS[-1])
    for c in _SINC_COEFFS[-2::-1]:
        acc = acc * x2 + c
    out[small] = acc
    xl = x[~small]
    out[~small] = np.sin(xl) / xl
    return float(out[0]) if scalar else out


def sj(j, x):
    """Coefficient function s_j(x) = (-1)^j x^(2j+1) / (2j+1)! * heaviside(x).

    Parameters
    ----------
    j : int
        Nonnegative order.
    x : float
        Argument; negative arguments give exactly 0.

    Raises
    ------
    OverflowError
        If x**(2j+1) overflows the double range.
    """
    if j < 0:
        raise DomainError("j must be nonnegative")
    if x < 0:
        return 0.0
    power = float(x) ** (2 * j + 1)
    if math.isinf(power):
        raise OverflowError(f"sj({j}, {x}) overflows the representable range")
    return (-1.0) ** j * power / math.factorial(2 * j + 1)


# 15-point Kronrod abscissae (nonnegative half) and weights, with the
# embedded 7-point Gauss weights, as published with QUADPACK's dqk15.
_XGK = np.array(
    [
        0.991455371120812639206854697526329,
        0.949107912342758524526189684047851,
        0.864864423359769072789712788640926,
        0.741531185599394439863864773280788,
        0.586087235467691130294144838258730,
        0.405845151377397166906606412076961,
        0.207784955007898467600689403773245,
        0.000000000000000000000000000000000,
    ]
)
_WGK = np.array(
    [
        0.022935322010529224963732008058970,
        0.063092092629978553290700663189204,
        0.104790010322250183839876322541518,
        0.140653259715525918745189590510238,
        0.169004726639267902826583426598550,
        0.190350578064785409913256402421014,
        0.204432940075298892414161999234649,
        0.209482141084727828012999174891714,
    ]
)
_WG = np.array(
    [
        0.129484966168869693270611432679082,
        0.279705391489276667901467771423780,
        0.381830050505118944950369775488975,
        0.417959183673469387755102040816327,
    ]
)

# Full 15-node arrays on [-1, 1], ordered left to right.
_GK_NODES = np.concatenate((-_XGK[:7], [0.0], _XGK[6::-1]))
_GK_WEIGHTS = np.concatenate((_WGK[:7], [_WGK[7]], _WGK[6::-1]))
# Positions of the embedded Gauss nodes within the 15-node array
# (indices 1, 3, 5, 7, 9, 11, 13) and their weights.
_G_IDX = np.arange(1, 14, 2)
_G_WEIGHTS = np.concatenate((_WG[:3], [_WG[3]], _WG[2::-1]))

_DEFAULT_QUAD = QuadratureSpec()


def _vectorize_integrand(f, probe):
    """Return a vectorized version of f, probing with the given abscissae."""
    try:
        out = np.asarray(f(probe))
        if out.shape == probe.shape:
            return f, out
    except Exception:
        pass

    def fvec(x):
        return np.array([f(xi) for xi in x], dtype=complex)

    return fvec, fvec(probe)


def _gk_panel(fx, half_width):
    """Kronrod and Gauss estimates of one panel from its 15 f-values."""
    kron = half_width * np.dot(_GK_WEIGHTS, fx)
    gauss = half_width * np.dot(_G_WEIGHTS, fx[_G_IDX])
    return kron, abs(kron - gauss)


_INITIAL_PANELS = 4


def integrate_1d(f, a, b, spec=None):
    """Adaptively integrate a complex-valued function over [a, b].

    Parameters
    ----------
    f : callable
        Integrand; should accept an ndarray of abscissae and return the
        matching ndarray of (possibly complex) values.
    a, b : float
        Integration limits, a < b allowed in either order (b < a negates).
    spec : QuadratureSpec, optional
        Tolerances; the result satisfies
        |error| <= max(abs_tol, rel_tol * |result|) per the G7/K15 estimator.

    Returns
    -------
    complex

    Raises
    ------
    AccuracyError
        If the tolerance is not met within max_subdivisions; the best
        estimate is attached to the exception.
    """
    spec = spec or _DEFAULT_QUAD
    a = float(a)
    b = float(b)
    if a == b:
        return 0j
    sign = 1.0
    if b < a:
        a, b = b, a
        sign = -1.0

    edges = np.linspace(a, b, _INITIAL_PANELS + 1)
    mid = 0.5 * (edges[0] + edges[1])
    half = 0.5 * (edges[1] - edges[0])
    f, _probe = _vectorize_integrand(f, mid + half * _GK_NODES)

    # panels: list of [neg_error, a, b, kron]
    panels = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        m, h = 0.5 * (lo + hi), 0.5 * (hi - lo)
        fx = np.asarray(f(m + h * _GK_NODES), dtype=complex)
        kron, err = _gk_panel(fx, h)
        panels.append([err, lo, hi, kron])

    subdivisions = 0
    while True:
        total = sum(p[3] for p in panels)
        total_err = sum(p[0] for p in panels)
        if total_err <= max(spec.abs_tol, spec.rel_tol * abs(total)):
            return sign * total
        if subdivisions >= spec.max_subdivisions:
            raise AccuracyError(
                f"integrate_1d did not converge within {spec.max_subdivisions} "
                f"subdivisions (error estimate {total_err:.3e})",
                estimate=sign * total,
                error_estimate=total_err,
            )
        worst = max(range(len(panels)), key=lambda i: panels[i][0])
        _, lo, hi, _ = panels[worst]
        m = 0.5 * (lo + hi)
        if m <= lo or m >= hi:
            raise AccuracyError(
                "integrate_1d hit the resolution limit of double precision",
                estimate=sign * total,
                error_estimate=total_err,
            )
        new = []
        for llo, lhi in ((lo, m), (m, hi)):
            mm, hh = 0.5 * (llo + lhi), 0.5 * (lhi - llo)
            fx = np.asarray(f(mm + hh * _GK_NODES), dtype=complex)
            kron, err = _gk_panel(fx, hh)
            new.append([err, llo, lhi, kron])
        panels[worst : worst + 1] = new
        subdivisions += 1


def integrate_2d(f, a, b, c, d, spec=None):
    """Iterated adaptive integration of f(x, y) over [a, b] x [c, d].

    The inner (y) integral runs at a tenth of the requested tolerances so the
    outer adaptive pass sees a consistent integrand ("tolerance splitting").
    f is called as f(x, y) with a scalar x and an ndarray of y values.
    """
    spec = spec or _DEFAULT_QUAD
    inner_spec = QuadratureSpec(
        rel_tol=0.1 * spec.rel_tol,
        abs_tol=0.1 * spec.abs_tol,
        max_subdivisions=spec.max_subdivisions,
    )

    def outer(xs):
        return np.array(
            [integrate_1d(lambda y: f(x, y), c, d, inner_spec) for x in xs],
            dtype=complex,
        )

    return integrate_1d(outer, a, b, spec)


def _trapezoid_weights(n_panels, h):
    w = np.full(n_panels + 1, h)
    w[0] = 0.5 * h
    w[-1] = 0.5 * h
    return w


def transform_samples_1d(values, radius, p, weights=None):
    """Fourier transform of uniformly sampled data at arbitrary momenta.

    ``values`` are f on the uniform grid y_j = -radius + j*h covering
    [-radius, radius] (h = 2*radius/(len(values)-1)); trapezoid end
    correction (half weights at both ends) is applied.  ``p`` may be a
    scalar or a 1D array; explicit phase factors support any off-grid p.
    """
    values = np.asarray(values, dtype=complex)
    n = values.size - 1
    h = 2.0 * radius / n
    if weights is None:
        weights = _trapezoid_weights(n, h)
    wf = weights * values
    wfr = wf.real.copy()
    wfi = wf.imag.copy()
    y = np.linspace(-radius, radius, n + 1)

    scalar = np.isscalar(p) or np.asarray(p).ndim == 0
    p_arr = np.atleast_1d(np.asarray(p, dtype=float))
    out = np.empty(p_arr.size, dtype=complex)
    for i, pi in enumerate(p_arr):
        ph = pi * y
        cs = np.cos(ph)
        sn = np.sin(ph)
        out[i] = (cs @ wfr + sn @ wfi) + 1j * (cs @ wfi - sn @ wfr)
    return out[0] if scalar else out


def fourier_1d(f, p, spec, analytic_transform=None, edge_rel_tol=1e-6):
    """Fourier transform INT exp(-i*p*y) f(y) dy of a decaying function.

    Parameters
    ----------
    f : callable
        Function of y, vectorized; must decay so its tail beyond the
        truncation radius is negligible.
    p : float or 1D ndarray
        Momentum (or momenta) at which to evaluate the transform.
    spec : TransformSpec
        Truncation radius and sampling density; with scheme="analytic" the
        registered analytic_transform is evaluated instead of sampling.
    analytic_transform : callable, optional
        Registered closed form of the transform, used when
        spec.scheme == "analytic".
    edge_rel_tol : float
        Decay check: |f(+-R)| must not exceed edge_rel_tol * max|f| on the
        grid, otherwise a TruncationError is raised.

    Returns
    -------
    complex (or ndarray of complex when p is an array)
    """
    if spec.scheme == "analytic":
        if analytic_transform is None:
            raise DomainError(
                "TransformSpec requests the analytic scheme but no analytic "
                "transform is registered"
            )
        return analytic_transform(p)
    radius = spec.truncation_radius
    y = np.linspace(-radius, radius, spec.sample_count + 1)
    values = np.asarray(f(y), dtype=complex)
    peak = np.max(np.abs(values))
    if peak > 0:
        edge = max(abs(values[0]), abs(values[-1]))
        if edge > edge_rel_tol * peak:
            raise TruncationError(
                f"integrand magnitude {edge:.3e} at the truncation boundary "
                f"exceeds {edge_rel_tol:.1e} of its peak {peak:.3e}; increase "
                "the truncation radius"
            )
    return transform_samples_1d(values, radius, p)


def transform_samples_2d(values, radius, pvec):
    """2D analog of transform_samples_1d on an (n+1) x (n+1) uniform grid.

    ``values[i, j]`` is f at (x_i, y_j); ``pvec`` is one momentum pair
    (px, py) or an array of shape (m, 2).
    """
    values = np.asarray(values, dtype=complex)
    n = values.shape[0] - 1
    h = 2.0 * radius / n
    w = _trapezoid_weights(n, h)
    x = np.linspace(-radius, radius, n + 1)

    pv = np.atleast_2d(np.asarray(pvec, dtype=float))
    single = np.asarray(pvec).ndim == 1
    out = np.empty(pv.shape[0], dtype=complex)
    for i, (px, py) in enumerate(pv):
        u = w * np.exp(-1j * px * x)
        v = w * np.exp(-1j * py * x)
        out[i] = u @ (values @ v)
    return out[0] if single else out


def fourier_2d(f, pvec, spec, analytic_transform=None, edge_rel_tol=1e-6):
    """2D Fourier transform INT exp(-i*p.r) f(r) d^2r of a decaying function.

    f is called on meshgrid arrays (X, Y); pvec is (px, py) or an (m, 2)
    array of momentum pairs.  See fourier_1d for the remaining semantics.
    """
    if spec.scheme == "analytic":
        if analytic_transform is None:
            raise DomainError(
                "TransformSpec requests the analytic scheme but no analytic "
                "transform is registered"
            )
        return analytic_transform(pvec)
    radius = spec.truncation_radius
    x = np.linspace(-radius, radius, spec.sample_count + 1)
    X, Y = np.meshgrid(x, x, indexing="ij")
    values = np.asarray(f(X, Y), dtype=complex)
    peak = np.max(np.abs(values))
    if peak > 0:
        edge = max(
            np.max(np.abs(values[0, :])),
            np.max(np.abs(values[-1, :])),
            np.max(np.abs(values[:, 0])),
            np.max(np.abs(values[:, -1])),
        )
        if edge > edge_rel_tol * peak:
            raise TruncationError(
                f"integrand magnitude {edge:.3e} on the truncation boundary "
                f"exceeds {edge_rel_tol:.1e} of its peak {peak:.3e}; increase "
                "the truncation radius"
            )
    return transform_samples_2d(values, radius, pvec)


_leggauss_cache = {}


def gauss_legendre(n):
    """Cached Gauss-Legendre nodes and weights on [-1, 1]."""
    if n not in _leggauss_cache:
        _leggauss_cache[n] = np.polynomial.legendre.leggauss(n)
    return _leggauss_cache[n]
