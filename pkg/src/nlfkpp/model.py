"""Coefficient data for the nonlocal reaction-diffusion model

    u_t = D u_xx + a(x,t) u - d/dx [ V_x u + kappa u (W_x * u) ] - kappa u (b * u),

where * denotes integration against the kernel over the whole line. A model
is four coefficient handles (growth rate a, competition kernel b, local
convection potential V, nonlocal convection potential W) plus the scalars
D (diffusion, the small parameter) and kappa (nonlinearity strength).

Each handle can produce partial derivatives up to a declared order, either
analytically (built-in families) or by central finite differences with one
Richardson refinement (arbitrary callbacks). The moment system and the
associated linear operator consume these derivatives.

Convention carried throughout: the expansions of the convection terms are
taken on V_x and W_x (the x-derivatives of the potentials), so the k-th
Taylor datum of V is the (k+1)-th derivative of V itself, and likewise for
W in its first argument.
"""

import math
from dataclasses import dataclass

import numpy as np

from .hermite import hermite_poly

DEFAULT_K_MAX = 6

_EPS = np.finfo(float).eps


def _fd_step(order, x):
    """Step size for a central difference of the given derivative order.

    For orders <= 2 the classic h = max(1e-6, 1e-4 (1+|x|)) is accurate to
    ~1e-8 after Richardson. Higher orders divide by h^order, so roundoff
    forces a larger step; eps^(1/(order+4)) balances truncation against
    roundoff for the Richardson-refined stencil.
    """
    scale = 1.0 + float(np.max(np.abs(x)))
    if order <= 2:
        return max(1e-6, 1e-4 * scale)
    return _EPS ** (1.0 / (order + 4)) * scale


def _central_diff(fn, order, h):
    """Order-th derivative of a 1-argument function at 0 offset, one
    Richardson refinement of the (order+1)-point central stencil."""
    if order == 0:
        return fn(0.0)

    def stencil(step):
        acc = 0.0
        for j in range(order + 1):
            acc += (-1.0) ** j * math.comb(order, j) * fn((order / 2.0 - j) * step)
        return acc / step ** order

    d1 = stencil(h)
    d2 = stencil(h / 2.0)
    return (4.0 * d2 - d1) / 3.0


class CoefficientHandle:
    """A scalar coefficient c(x, t) with x-derivatives up to ``k_max``.

    ``mode`` is "analytic" for the built-in families and "finite-difference"
    for callback-backed handles.
    """

    def __init__(self, fn, deriv=None, k_max=DEFAULT_K_MAX, mode="analytic",
                 time_dependent=True):
        self._fn = fn
        self._deriv = deriv
        self.k_max = k_max
        self.mode = mode
        self.time_dependent = time_dependent

    def __call__(self, x, t):
        return self._fn(x, t)

    def derivative(self, k, x, t):
        if k < 0 or k > self.k_max:
            raise ValueError(f"derivative order {k} outside supported range 0..{self.k_max}")
        if self._deriv is not None:
            return self._deriv(k, x, t)
        if k == 0:
            return self._fn(x, t)
        h = _fd_step(k, x)
        return _central_diff(lambda o: self._fn(x + o, t), k, h)


class KernelHandle:
    """A two-point kernel K(x, y, t) with mixed partials up to total order
    ``k_max``. Evaluation is vectorized over the first argument."""

    def __init__(self, fn, deriv=None, k_max=DEFAULT_K_MAX, mode="analytic",
                 time_dependent=True):
        self._fn = fn
        self._deriv = deriv
        self.k_max = k_max
        self.mode = mode
        self.time_dependent = time_dependent

    def __call__(self, x, y, t):
        return self._fn(x, y, t)

    def derivative(self, k, l, x, y, t):
        if k < 0 or l < 0 or k + l > self.k_max:
            raise ValueError(
                f"mixed order ({k},{l}) outside supported total 0..{self.k_max}")
        if self._deriv is not None:
            return self._deriv(k, l, x, y, t)
        if k == 0 and l == 0:
            return self._fn(x, y, t)
        # the mixed stencil divides by hx^k hy^l, so roundoff control needs
        # steps sized for the total order
        hx = _fd_step(max(k + l, 1), x)
        hy = _fd_step(max(k + l, 1), y)

        def stencil(sx, sy):
            acc = 0.0
            for j in range(k + 1):
                cx = (-1.0) ** j * math.comb(k, j)
                xo = x + (k / 2.0 - j) * sx
                for i in range(l + 1):
                    cy = (-1.0) ** i * math.comb(l, i)
                    acc = acc + cx * cy * self._fn(xo, y + (l / 2.0 - i) * sy, t)
            return acc / sx ** k / sy ** l if k and l else (
                acc / sx ** k if k else acc / sy ** l)

        d1 = stencil(hx, hy)
        d2 = stencil(hx / 2.0, hy / 2.0)
        return (4.0 * d2 - d1) / 3.0


# ---------------------------------------------------------------------------
# built-in families

def constant_coefficient(c):
    c = float(c)

    def deriv(k, x, t):
        if k == 0:
            return c * np.ones_like(np.asarray(x, dtype=float))[()] if np.ndim(x) else c
        return np.zeros_like(np.asarray(x, dtype=float))[()] if np.ndim(x) else 0.0

    return CoefficientHandle(lambda x, t: deriv(0, x, t), deriv,
                             k_max=DEFAULT_K_MAX, time_dependent=False)


def polynomial_coefficient(coeffs, time_factor=None, k_max=DEFAULT_K_MAX):
    """c(x, t) = (c_0 + c_1 x + ... ) * time_factor(t); time_factor defaults to 1."""
    coeffs = [float(c) for c in coeffs]

    def deriv(k, x, t):
        x = np.asarray(x, dtype=float)
        acc = np.zeros_like(x)
        for j in range(k, len(coeffs)):
            fac = math.factorial(j) / math.factorial(j - k)
            acc = acc + coeffs[j] * fac * x ** (j - k)
        if time_factor is not None:
            acc = acc * time_factor(t)
        return acc[()] if acc.ndim == 0 else acc

    return CoefficientHandle(lambda x, t: deriv(0, x, t), deriv, k_max=k_max,
                             time_dependent=time_factor is not None)


def callback_coefficient(fn, k_max=DEFAULT_K_MAX, time_dependent=True):
    """Wrap an arbitrary (vectorized) callback; derivatives by finite differences."""
    return CoefficientHandle(fn, None, k_max=k_max, mode="finite-difference",
                             time_dependent=time_dependent)


def _gaussian_deriv_factory(b0, gamma):
    """Mixed partials of b0 exp(-(x-y)^2/gamma^2):
    d^k_x d^l_y = b0 (-1)^k gamma^-(k+l) H_{k+l}(s/gamma) exp(-s^2/gamma^2), s = x-y."""

    def deriv(k, l, x, y, t):
        s = (np.asarray(x, dtype=float) - y) / gamma
        val = b0 * (-1.0) ** k * gamma ** (-(k + l)) * hermite_poly(k + l, s) * np.exp(-s * s)
        return val[()] if np.ndim(val) == 0 else val

    return deriv


def gaussian_kernel(b0, gamma, k_max=DEFAULT_K_MAX):
    """Influence kernel b0 exp(-(x-y)^2 / gamma^2) with analytic partials."""
    if gamma <= 0:
        raise ValueError(f"kernel range must be positive, got {gamma}")
    d = _gaussian_deriv_factory(float(b0), float(gamma))
    return KernelHandle(lambda x, y, t: d(0, 0, x, y, t), d, k_max=k_max,
                        time_dependent=False)


def cosine_gaussian_kernel(b0, gamma, k0, k_max=DEFAULT_K_MAX):
    """Kernel b0 cos(k0 (x-y)) exp(-(x-y)^2/gamma^2).

    Derivatives come from the complex completion
    cos(k0 s) e^{-s^2/g^2} = e^{-k0^2 g^2/4} Re e^{-zeta^2},
    zeta = s/g - i k0 g / 2, differentiated through the Hermite recurrence
    on complex arguments.
    """
    if gamma <= 0:
        raise ValueError(f"kernel range must be positive, got {gamma}")
    b0, gamma, k0 = float(b0), float(gamma), float(k0)
    amp = b0 * math.exp(-(k0 * gamma) ** 2 / 4.0)

    def deriv(k, l, x, y, t):
        s = np.asarray(x, dtype=float) - y
        zeta = s / gamma - 1j * k0 * gamma / 2.0
        m = k + l
        g_m = amp * gamma ** (-m) * (-1.0) ** m * np.real(
            hermite_poly(m, zeta) * np.exp(-zeta * zeta))
        val = (-1.0) ** l * g_m
        return val[()] if np.ndim(val) == 0 else val

    return KernelHandle(lambda x, y, t: deriv(0, 0, x, y, t), deriv, k_max=k_max,
                        time_dependent=False)


def constant_kernel(b0, k_max=DEFAULT_K_MAX):
    b0 = float(b0)

    def deriv(k, l, x, y, t):
        base = np.zeros_like(np.asarray(x, dtype=float) + np.asarray(y, dtype=float))
        if k == 0 and l == 0:
            base = base + b0
        return base[()] if np.ndim(base) == 0 else base

    return KernelHandle(lambda x, y, t: deriv(0, 0, x, y, t), deriv, k_max=k_max,
                        time_dependent=False)


def callback_kernel(fn, k_max=DEFAULT_K_MAX, time_dependent=True):
    return KernelHandle(fn, None, k_max=k_max, mode="finite-difference",
                        time_dependent=time_dependent)


# ---------------------------------------------------------------------------

@dataclass
class ModelSpec:
    """The model data: diffusion D, nonlinearity kappa, and the four
    coefficient handles. V and W may be None (absent convection)."""

    D: float
    kappa: float
    a: CoefficientHandle
    b: KernelHandle
    V: CoefficientHandle = None
    W: KernelHandle = None

    def __post_init__(self):
        if not (self.D > 0):
            raise ValueError(f"diffusion coefficient must be positive, got {self.D}")
        if self.kappa < 0:
            raise ValueError(f"nonlinearity must be nonnegative, got {self.kappa}")

    @property
    def k_max(self):
        ks = [self.a.k_max, self.b.k_max]
        if self.V is not None:
            ks.append(self.V.k_max - 1)  # V enters through V_x
        if self.W is not None:
            ks.append(self.W.k_max - 1)
        return min(ks)

    # Taylor data at the trajectory point x = y = X

    def taylor_a(self, k, t, X):
        """k-th x-derivative of a at (X, t)."""
        return self.a.derivative(k, X, t)

    def taylor_b(self, k, l, t, X):
        """Mixed (k,l) derivative of the competition kernel at x = y = X."""
        return self.b.derivative(k, l, X, X, t)

    def taylor_v(self, k, t, X):
        """k-th x-derivative of V_x at (X, t), i.e. the (k+1)-th of V."""
        if self.V is None:
            return 0.0
        return self.V.derivative(k + 1, X, t)

    def taylor_w(self, k, l, t, X):
        """Mixed (k,l) derivative of W_x at x = y = X, i.e. order (k+1, l) of W."""
        if self.W is None:
            return 0.0
        return self.W.derivative(k + 1, l, X, X, t)

    def partial_kernel_y(self, which, l, x, x_u, t):
        """l-th y-derivative of the competition kernel b (which="b") or of
        the convection kernel W_x (which="W"), at y = x_u, as a function of
        the free first argument x (scalar or array)."""
        if which == "b":
            return self.b.derivative(0, l, x, x_u, t)
        if which == "W":
            if self.W is None:
                z = np.zeros_like(np.asarray(x, dtype=float))
                return z[()] if z.ndim == 0 else z
            return self.W.derivative(1, l, x, x_u, t)
        raise ValueError(f"kernel selector must be 'b' or 'W', got {which!r}")
