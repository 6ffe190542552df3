"""Gauge freedom of Fourier coefficients and equivalence of classical wave functions."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List

import numpy as np

from .fields import FieldEvaluator, ZeroField, _as_points, _kabs, euclid_norm, pseudo_inner
from .quadrature import MomentumGrid

EQUIVALENCE_TOL = 1e-10
DEFAULT_TRIALS = 16


class GaugeFunction:
    """Scalar c(k) = amp * exp(-|k - center|^2 / (2 sigma^2)); sigma=None gives the constant amp."""

    def __init__(self, amp: complex = 1.0, center=(0.0, 0.0, 0.0), sigma: float | None = None):
        self.amp = complex(amp)
        self.center = np.asarray(center, dtype=float).reshape(3)
        self.sigma = None if sigma is None else float(sigma)

    def evaluate(self, k) -> np.ndarray:
        k = _as_points(k)
        if self.sigma is None:
            return np.full(len(k), self.amp)
        d = k - self.center
        return self.amp * np.exp(-np.einsum("ij,ij->i", d, d) / (2 * self.sigma**2))

    def gradient(self, k) -> np.ndarray:
        k = _as_points(k)
        if self.sigma is None:
            return np.zeros((len(k), 3), dtype=complex)
        return -self.evaluate(k)[:, None] * (k - self.center) / self.sigma**2


class PureGauge(FieldEvaluator):
    """The coefficient shift i c(k) (|k|, k) produced by a gauge function."""

    kind = "pure_gauge"

    def __init__(self, c: GaugeFunction) -> None:
        super().__init__()
        self.c = c

    def evaluate(self, k) -> np.ndarray:
        k = _as_points(k)
        cv = 1j * self.c.evaluate(k)
        out = np.empty((len(k), 4), dtype=complex)
        out[:, 0] = cv * _kabs(k)
        out[:, 1:] = cv[:, None] * k
        return out

    def jacobian(self, k) -> np.ndarray:
        k = _as_points(k)
        r = _kabs(k)
        cv = 1j * self.c.evaluate(k)
        dc = 1j * self.c.gradient(k)
        jac = np.empty((len(k), 4, 3), dtype=complex)
        jac[:, 0, :] = dc * r[:, None] + cv[:, None] * k / r[:, None]
        jac[:, 1:, :] = k[:, :, None] * dc[:, None, :] + cv[:, None, None] * np.eye(3)[None]
        return jac


def apply_gauge(a: FieldEvaluator, c: GaugeFunction) -> FieldEvaluator:
    """a'_alpha = a_alpha + i c k_alpha, with the time slot re-derived (so a'_0 = a_0 + i c |k|)."""
    return a + PureGauge(c)


class RadiationRepresentative(FieldEvaluator):
    """phi_0 = 0, phi_alpha = psi_alpha - lambda k_alpha with lambda = k.psi / |k|^2."""

    kind = "radiation_representative"

    def __init__(self, psi: FieldEvaluator) -> None:
        super().__init__()
        self.psi = psi

    def evaluate(self, k) -> np.ndarray:
        k = _as_points(k)
        sp = self.psi.evaluate(k)[:, 1:]
        lam = np.einsum("ij,ij->i", k, sp) / np.einsum("ij,ij->i", k, k)
        out = np.zeros((len(k), 4), dtype=complex)
        out[:, 1:] = sp - lam[:, None] * k
        return out

    def jacobian(self, k) -> np.ndarray:
        k = _as_points(k)
        sp = self.psi.evaluate(k)[:, 1:]
        dsp = self.psi.jacobian(k)[:, 1:, :]
        r2 = np.einsum("ij,ij->i", k, k)
        proj = np.eye(3)[None] - k[:, :, None] * k[:, None, :] / r2[:, None, None]
        kp = np.einsum("ij,ij->i", k, sp)
        # d/dk_j of (k k^T / |k|^2) psi  =  (e_j (k.psi) + k psi_j) / |k|^2 - 2 k (k.psi) k_j / |k|^4
        dproj_psi = (np.eye(3)[None] * kp[:, None, None] + k[:, :, None] * sp[:, None, :]) / r2[:, None, None] \
            - 2 * (k * kp[:, None])[:, :, None] * k[:, None, :] / (r2**2)[:, None, None]
        jac = np.zeros((len(k), 4, 3), dtype=complex)
        jac[:, 1:, :] = np.einsum("iab,ibj->iaj", proj, dsp) - dproj_psi
        return jac


def radiation_gauge_representative(psi: FieldEvaluator) -> FieldEvaluator:
    if isinstance(psi, ZeroField):
        return psi
    return RadiationRepresentative(psi)


@dataclass
class EquivalenceReport:
    equivalent: bool
    residuals: List[float] = field(default_factory=list)
    scales: List[float] = field(default_factory=list)
    tol: float = EQUIVALENCE_TOL

    @property
    def max_ratio(self) -> float:
        ratios = [r / s if s > 0 else (0.0 if r == 0 else np.inf)
                  for r, s in zip(self.residuals, self.scales)]
        return max(ratios, default=0.0)

    def __bool__(self) -> bool:
        return self.equivalent


def are_equivalent(psi: FieldEvaluator, phi: FieldEvaluator, grid: MomentumGrid,
                   trials: int = DEFAULT_TRIALS, seed: int = 0,
                   tol: float = EQUIVALENCE_TOL) -> EquivalenceReport:
    """Randomized test of <a|psi> = <a|phi> over Lorenz-completed duals a.

    Residuals are compared against tol * (|psi| + |phi|) * |a| in the Euclidean
    dk/(2|k|) norm.
    """
    from .sampling import random_field

    rng = np.random.default_rng(seed)
    npsi = euclid_norm(psi, grid)
    nphi = euclid_norm(phi, grid)
    residuals, scales = [], []
    for _ in range(trials):
        a = random_field(rng)
        residuals.append(abs(pseudo_inner(a, psi, grid) - pseudo_inner(a, phi, grid)))
        scales.append((npsi + nphi) * euclid_norm(a, grid))
    ok = all(r <= tol * s for r, s in zip(residuals, scales))
    return EquivalenceReport(ok, residuals, scales, tol)
