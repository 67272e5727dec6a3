"""Hermite polynomials, Hermite functions, and the closed-form Gaussian
integrals over them that the asymptotic constructions rely on.

Everything here is evaluated by upward three-term recurrences in double
precision. That is stable for the physicists' Hermite family and cheap for
the index range the rest of the package needs (n of order 10); a hard cap
keeps accidental huge-n requests from silently degrading.
"""

import math

import numpy as np

N_CAP = 200

_SQRT_2PI = math.sqrt(2.0 * math.pi)


def _check_index(n):
    if not isinstance(n, (int, np.integer)):
        raise ValueError(f"index must be an integer, got {n!r}")
    if n < 0:
        raise ValueError(f"index must be nonnegative, got {n}")
    if n > N_CAP:
        raise ValueError(f"index {n} exceeds the supported cap {N_CAP}")


def hermite_poly(n, z):
    """Evaluate the physicists' Hermite polynomial H_n(z).

    Uses H_{n+1} = 2 z H_n - 2 n H_{n-1} upward from H_0 = 1, H_1 = 2z.
    `z` may be a real or complex scalar or a numpy array; the result has
    matching shape. Complex arguments arise in the large-time series where
    the Gaussian width parameter changes sign.
    """
    _check_index(n)
    z = np.asarray(z)
    if not np.all(np.isfinite(z)):
        raise ValueError("hermite_poly requires finite arguments")
    h_prev = np.ones_like(z, dtype=z.dtype if z.dtype.kind == "c" else float)
    if n == 0:
        return h_prev if h_prev.ndim else h_prev[()]
    h = 2.0 * z * h_prev
    for k in range(1, n):
        h_prev, h = h, 2.0 * z * h - 2.0 * k * h_prev
    return h if h.ndim else h[()]


def hermite_function(n, x):
    """Evaluate the L2-normalized Hermite function
    u_n(x) = H_n(x) exp(-x^2/2) / sqrt(2^n n! sqrt(pi)).

    Computed with the normalized recurrence
    u_{n+1} = x sqrt(2/(n+1)) u_n - sqrt(n/(n+1)) u_{n-1},
    which avoids overflow of H_n and n! for large n.
    """
    _check_index(n)
    x = np.asarray(x, dtype=float)
    u_prev = np.pi ** (-0.25) * np.exp(-0.5 * x * x)
    if n == 0:
        return u_prev if u_prev.ndim else u_prev[()]
    u = math.sqrt(2.0) * x * u_prev
    for k in range(1, n):
        u_prev, u = u, x * math.sqrt(2.0 / (k + 1)) * u - math.sqrt(k / (k + 1.0)) * u_prev
    return u if u.ndim else u[()]


def hermite_gauss_integral(n):
    """Integral of H_n(y) exp(-y^2/2) over the real line.

    Vanishes for odd n; for n = 2l it equals sqrt(2 pi) (2l)!/l!.
    """
    _check_index(n)
    if n % 2 == 1:
        return 0.0
    l = n // 2
    ratio = 1.0
    for j in range(l + 1, 2 * l + 1):
        ratio *= j
    return _SQRT_2PI * ratio


def hermite_gauss_moment2(n):
    """Integral of y^2 H_{2n}(y) exp(-y^2/2) over the real line,
    equal to sqrt(2 pi) ((2n)!/n!) (1 + 4n).

    Note the argument indexes the even polynomial H_{2n}.
    """
    _check_index(n)
    ratio = 1.0
    for j in range(n + 1, 2 * n + 1):
        ratio *= j
    return _SQRT_2PI * ratio * (1.0 + 4.0 * n)


def gaussian_linear_integral(w, s):
    """Integral of exp(-w^2 y^2 + 2 s y) over the real line: (sqrt(pi)/w) exp(s^2/w^2)."""
    if not (w > 0.0):
        raise ValueError(f"width parameter must be positive, got {w}")
    return math.sqrt(math.pi) / w * math.exp((s / w) ** 2)
