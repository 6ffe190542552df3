"""Evaluable complex 4-vector fields over wave vectors, and the pseudo-scalar product.

Components are stored with lower indices (f_0, f_1, f_2, f_3) and the metric is
diag(+1, -1, -1, -1).  The time component of every constructed field is derived
from its spatial part via |k| f_0 = k . f, so the constraint cannot be broken
by construction.
"""

from __future__ import annotations

import weakref
from typing import Callable, Sequence

import numpy as np

from .errors import DerivativeUnstable, NonFiniteError
from .quadrature import MomentumGrid

METRIC = np.diag([1.0, -1.0, -1.0, -1.0])

FD_STEP = 1e-4
FD_RTOL = 1e-6


def _as_points(k) -> np.ndarray:
    k = np.asarray(k, dtype=float)
    if k.ndim == 1:
        k = k[None, :]
    return k


def _kabs(k: np.ndarray) -> np.ndarray:
    return np.sqrt(np.einsum("ij,ij->i", k, k))


class FieldEvaluator:
    """A complex 4-component function of k, built as an immutable expression tree."""

    kind = "abstract"
    lorenz = True

    def __init__(self) -> None:
        self._cache = weakref.WeakKeyDictionary()

    def evaluate(self, k) -> np.ndarray:
        """Return an (N, 4) complex array of component values at the points k."""
        raise NotImplementedError

    def __call__(self, k) -> np.ndarray:
        return self.evaluate(k)

    def sample(self, grid: MomentumGrid) -> np.ndarray:
        """Evaluate on the grid nodes; cached per grid."""
        try:
            return self._cache[grid]
        except KeyError:
            values = self._sample_uncached(grid)
            values.setflags(write=False)
            self._cache[grid] = values
            return values

    def _sample_uncached(self, grid: MomentumGrid) -> np.ndarray:
        return self.evaluate(grid.nodes)

    def jacobian(self, k) -> np.ndarray:
        """Return d f_mu / d k_j as an (N, 4, 3) array.

        The generic fallback is a central difference with a Richardson check.
        """
        return fd_jacobian(self.evaluate, k)

    # real/complex linear structure
    def __add__(self, other: "FieldEvaluator") -> "FieldEvaluator":
        return LinearCombination([(1.0, self), (1.0, other)])

    def __sub__(self, other: "FieldEvaluator") -> "FieldEvaluator":
        return LinearCombination([(1.0, self), (-1.0, other)])

    def __neg__(self) -> "FieldEvaluator":
        return LinearCombination([(-1.0, self)])

    def __mul__(self, scalar) -> "FieldEvaluator":
        return LinearCombination([(complex(scalar), self)])

    __rmul__ = __mul__


def fd_jacobian(func: Callable, k, step: float = FD_STEP, rtol: float = FD_RTOL) -> np.ndarray:
    k = _as_points(k)
    n = len(k)
    coarse = np.empty((n, 4, 3), dtype=complex)
    fine = np.empty((n, 4, 3), dtype=complex)
    for j in range(3):
        e = np.zeros(3)
        e[j] = 1.0
        for h, out in ((step, coarse), (step / 2, fine)):
            out[:, :, j] = (func(k + h * e) - func(k - h * e)) / (2 * h)
    extrapolated = (4 * fine - coarse) / 3
    scale = max(float(np.max(np.abs(extrapolated), initial=0.0)), 1.0)
    err = float(np.max(np.abs(extrapolated - coarse), initial=0.0))
    if err > rtol * scale:
        raise DerivativeUnstable(
            f"Richardson-extrapolated derivative differs from single step by {err:.3e}")
    return extrapolated


class ZeroField(FieldEvaluator):
    kind = "zero"

    def evaluate(self, k) -> np.ndarray:
        return np.zeros((len(_as_points(k)), 4), dtype=complex)

    def jacobian(self, k) -> np.ndarray:
        return np.zeros((len(_as_points(k)), 4, 3), dtype=complex)


ZERO = ZeroField()


class GaussianPacket(FieldEvaluator):
    """amp * eps * exp(-|k - k0|^2 / (2 sigma^2)) in the spatial slots, Lorenz-completed."""

    kind = "gaussian_packet"

    def __init__(self, eps, center, sigma: float, amp: complex = 1.0) -> None:
        super().__init__()
        self.eps = np.asarray(eps, dtype=complex).reshape(3)
        self.center = np.asarray(center, dtype=float).reshape(3)
        if not sigma > 0:
            raise ValueError("packet width must be positive")
        self.sigma = float(sigma)
        self.amp = complex(amp)

    def _profile(self, k):
        d = k - self.center
        return self.amp * np.exp(-np.einsum("ij,ij->i", d, d) / (2 * self.sigma**2)), d

    def evaluate(self, k) -> np.ndarray:
        k = _as_points(k)
        g, _ = self._profile(k)
        out = np.empty((len(k), 4), dtype=complex)
        out[:, 1:] = g[:, None] * self.eps[None, :]
        out[:, 0] = (k @ self.eps) * g / _kabs(k)
        return out

    def jacobian(self, k) -> np.ndarray:
        k = _as_points(k)
        g, d = self._profile(k)
        r = _kabs(k)
        dg = -g[:, None] * d / self.sigma**2
        jac = np.empty((len(k), 4, 3), dtype=complex)
        jac[:, 1:, :] = self.eps[None, :, None] * dg[:, None, :]
        ke = k @ self.eps
        jac[:, 0, :] = (self.eps[None, :] * g[:, None] / r[:, None]
                        + ke[:, None] * dg / r[:, None]
                        - (ke * g / r**3)[:, None] * k)
        return jac

    def describe(self) -> dict:
        return {"type": "packet", "eps": [[e.real, e.imag] for e in self.eps],
                "center": self.center.tolist(), "sigma": self.sigma,
                "amp": [self.amp.real, self.amp.imag]}


class LorenzCompleted(FieldEvaluator):
    """Four-vector whose time slot is k . spatial(k) / |k|."""

    kind = "lorenz_completed"

    def __init__(self, spatial: Callable) -> None:
        super().__init__()
        self.spatial = spatial

    def evaluate(self, k) -> np.ndarray:
        k = _as_points(k)
        sp = np.asarray(self.spatial(k), dtype=complex).reshape(len(k), 3)
        out = np.empty((len(k), 4), dtype=complex)
        out[:, 1:] = sp
        out[:, 0] = np.einsum("ij,ij->i", k, sp) / _kabs(k)
        return out


def complete_lorenz(spatial: Callable) -> FieldEvaluator:
    """Build a field from its spatial components; the time component is derived.

    Evaluation at k = 0 is rejected.
    """
    return _RejectOrigin(LorenzCompleted(spatial))


class _RejectOrigin(FieldEvaluator):
    kind = "lorenz_completed"

    def __init__(self, inner: FieldEvaluator) -> None:
        super().__init__()
        self.inner = inner

    def evaluate(self, k) -> np.ndarray:
        k = _as_points(k)
        if np.any(_kabs(k) == 0.0):
            raise ValueError("Lorenz completion is undefined at k = 0")
        return self.inner.evaluate(k)


class LinearCombination(FieldEvaluator):
    kind = "linear_combination"

    def __init__(self, terms: Sequence) -> None:
        super().__init__()
        flat = []
        for coeff, f in terms:
            coeff = complex(coeff)
            if isinstance(f, ZeroField) or coeff == 0:
                continue
            if isinstance(f, LinearCombination):
                flat.extend((coeff * c, g) for c, g in f.terms)
            else:
                flat.append((coeff, f))
        self.terms = tuple(flat)
        self.lorenz = all(f.lorenz for _, f in self.terms)

    def evaluate(self, k) -> np.ndarray:
        k = _as_points(k)
        out = np.zeros((len(k), 4), dtype=complex)
        for c, f in self.terms:
            out += c * f.evaluate(k)
        return out

    def _sample_uncached(self, grid: MomentumGrid) -> np.ndarray:
        # reuse the children's cached samples
        out = np.zeros((len(grid), 4), dtype=complex)
        for c, f in self.terms:
            out += c * f.sample(grid)
        return out

    def jacobian(self, k) -> np.ndarray:
        k = _as_points(k)
        out = np.zeros((len(k), 4, 3), dtype=complex)
        for c, f in self.terms:
            out += c * f.jacobian(k)
        return out


class MatrixAction(FieldEvaluator):
    kind = "matrix_action"

    def __init__(self, matrix, inner: FieldEvaluator, lorenz: bool | None = None) -> None:
        super().__init__()
        self.matrix = np.asarray(matrix, dtype=complex).reshape(4, 4)
        self.inner = inner
        self.lorenz = inner.lorenz if lorenz is None else lorenz

    def evaluate(self, k) -> np.ndarray:
        return self.inner.evaluate(k) @ self.matrix.T

    def _sample_uncached(self, grid: MomentumGrid) -> np.ndarray:
        return self.inner.sample(grid) @ self.matrix.T

    def jacobian(self, k) -> np.ndarray:
        return np.einsum("mn,inj->imj", self.matrix, self.inner.jacobian(k))


class Reparameterized(FieldEvaluator):
    """inner evaluated at kmap(k); derivatives fall back to finite differences."""

    kind = "reparameterized"

    def __init__(self, kmap: Callable, inner: FieldEvaluator) -> None:
        super().__init__()
        self.kmap = kmap
        self.inner = inner
        self.lorenz = inner.lorenz

    def evaluate(self, k) -> np.ndarray:
        return self.inner.evaluate(self.kmap(_as_points(k)))


class PhaseModulated(FieldEvaluator):
    """Multiplication by exp(i|k| x0 - i k.x) for the spacetime shift x."""

    kind = "phase_modulated"

    def __init__(self, shift, inner: FieldEvaluator) -> None:
        super().__init__()
        self.shift = np.asarray(shift, dtype=float).reshape(4)
        self.inner = inner
        self.lorenz = inner.lorenz

    def phase(self, k) -> np.ndarray:
        k = _as_points(k)
        return np.exp(1j * (_kabs(k) * self.shift[0] - k @ self.shift[1:]))

    def evaluate(self, k) -> np.ndarray:
        k = _as_points(k)
        return self.phase(k)[:, None] * self.inner.evaluate(k)

    def _sample_uncached(self, grid: MomentumGrid) -> np.ndarray:
        return self.phase(grid.nodes)[:, None] * self.inner.sample(grid)

    def jacobian(self, k) -> np.ndarray:
        k = _as_points(k)
        p = self.phase(k)
        dp = 1j * p[:, None] * (self.shift[0] * k / _kabs(k)[:, None] - self.shift[1:][None, :])
        return (p[:, None, None] * self.inner.jacobian(k)
                + self.inner.evaluate(k)[:, :, None] * dp[:, None, :])


class MomentumWeighted(FieldEvaluator):
    """Multiplication by |k| (component=None) or by k_alpha (component=alpha in 1..3)."""

    kind = "momentum_weighted"

    def __init__(self, inner: FieldEvaluator, component: int | None = None) -> None:
        super().__init__()
        if component is not None and component not in (1, 2, 3):
            raise ValueError("component must be None or one of 1, 2, 3")
        self.inner = inner
        self.component = component
        self.lorenz = inner.lorenz

    def _weight(self, k):
        if self.component is None:
            return _kabs(k), k / _kabs(k)[:, None]
        grad = np.zeros_like(k)
        grad[:, self.component - 1] = 1.0
        return k[:, self.component - 1], grad

    def evaluate(self, k) -> np.ndarray:
        k = _as_points(k)
        w, _ = self._weight(k)
        return w[:, None] * self.inner.evaluate(k)

    def jacobian(self, k) -> np.ndarray:
        k = _as_points(k)
        w, dw = self._weight(k)
        return (w[:, None, None] * self.inner.jacobian(k)
                + self.inner.evaluate(k)[:, :, None] * dw[:, None, :])


class UnconstrainedPacket(GaussianPacket):
    """Packet with a freely chosen time polarization.

    Violates the Lorenz constraint on purpose; exists only so that failure modes
    of the positivity machinery can be exercised.
    """

    kind = "unconstrained_packet"
    lorenz = False

    def __init__(self, eps, center, sigma, amp=1.0, time_eps: complex = 0.0) -> None:
        super().__init__(eps, center, sigma, amp)
        self.time_eps = complex(time_eps)

    def evaluate(self, k) -> np.ndarray:
        k = _as_points(k)
        g, _ = self._profile(k)
        out = np.empty((len(k), 4), dtype=complex)
        out[:, 1:] = g[:, None] * self.eps[None, :]
        out[:, 0] = self.time_eps * g
        return out

    def jacobian(self, k) -> np.ndarray:
        return fd_jacobian(self.evaluate, k)


def longitudinal(scalar: Callable) -> FieldEvaluator:
    """The zero-norm family psi_alpha = (k_alpha/|k|) psi_0 with psi_0 = scalar(k)."""
    def spatial(k):
        return np.asarray(scalar(k), dtype=complex)[:, None] * k / _kabs(k)[:, None]
    return complete_lorenz(spatial)


# --- sampled-array kernels ---------------------------------------------------

def _check_finite(values: np.ndarray) -> None:
    if not np.all(np.isfinite(values)):
        raise NonFiniteError("field not integrable on grid")


def inner_samples(a: np.ndarray, psi: np.ndarray, grid: MomentumGrid) -> complex:
    """Pseudo-scalar product of two (N, 4) sample arrays on ``grid``."""
    value = complex(np.vdot(a, grid.pseudo_coefficients * psi))
    _check_finite(np.array(value))
    return value


def transverse_samples(psi: np.ndarray, grid: MomentumGrid) -> float:
    """Positive form  int dk/(2|k|^3) psi_a^* (|k|^2 delta_ab - k_a k_b) psi_b  from samples."""
    sp = psi[:, 1:]
    k = grid.nodes
    r = grid.norms
    kp = np.einsum("ij,ij->i", k, sp)
    quad = r**2 * np.einsum("ij,ij->i", np.conj(sp), sp).real - np.abs(kp) ** 2
    integrand = quad / (2.0 * r**3)
    _check_finite(integrand)
    return float(np.dot(grid.weights, integrand))


def euclid_samples(psi: np.ndarray, grid: MomentumGrid) -> float:
    value = np.vdot(psi, grid.half_inverse_weights[:, None] * psi).real
    _check_finite(np.array(value))
    return float(np.sqrt(value))


# --- public operations -------------------------------------------------------

def pseudo_inner(a: FieldEvaluator, psi: FieldEvaluator, grid: MomentumGrid) -> complex:
    """<a|psi> = -int dk/(2|k|) conj(a^mu) psi_mu, antilinear in a."""
    return inner_samples(a.sample(grid), psi.sample(grid), grid)


def smeared_field(a: FieldEvaluator, psi: FieldEvaluator, grid: MomentumGrid) -> float:
    return -2.0 * pseudo_inner(a, psi, grid).real


def transverse_form(psi: FieldEvaluator, grid: MomentumGrid) -> float:
    return transverse_samples(psi.sample(grid), grid)


def euclid_norm(psi: FieldEvaluator, grid: MomentumGrid) -> float:
    """Positive-definite L2 norm with measure dk/(2|k|) over all four components.

    Bounds |<a|psi>| by euclid_norm(a) * euclid_norm(psi); used to scale residuals.
    """
    return euclid_samples(psi.sample(grid), grid)


def lorenz_residual(psi: FieldEvaluator, k) -> np.ndarray:
    """|k| psi_0 - k . psi at the given points."""
    k = _as_points(k)
    v = psi.evaluate(k)
    return _kabs(k) * v[:, 0] - np.einsum("ij,ij->i", k, v[:, 1:])
