"""The vacuum correlation functional and the matrix elements it determines.

Operators are never materialized.  Everything is a closed-form matrix element
between Weyl vectors W(x)*Omega, evaluated through pseudo-scalar products of
combined vectors a + i eta psi on a momentum grid.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Sequence

import numpy as np

from .errors import FormMismatch, NegativeNormError, PositivityViolation
from .fields import (ZERO, FieldEvaluator, euclid_samples, inner_samples, transverse_samples)
from .quadrature import MomentumGrid, default_grid

DEFAULT_ETA = 2.0

DEFAULT_TOLERANCES = {
    "negative_norm": 1e-12,
    "psd": 1e-10,
    "hermitian": 1e-12,
    "form_mismatch": 1e-10,
    "identity": 1e-10,
    "fd": 1e-6,
}


@dataclass(frozen=True)
class WeylLabel:
    """A pair (a, psi) indexing W(a, psi); the vacuum is (0, 0)."""

    a: FieldEvaluator = ZERO
    psi: FieldEvaluator = ZERO

    def __add__(self, other: "WeylLabel") -> "WeylLabel":
        return WeylLabel(self.a + other.a, self.psi + other.psi)

    def __sub__(self, other: "WeylLabel") -> "WeylLabel":
        return WeylLabel(self.a - other.a, self.psi - other.psi)

    def __neg__(self) -> "WeylLabel":
        return WeylLabel(-self.a, -self.psi)

    def __mul__(self, scalar: float) -> "WeylLabel":
        scalar = float(scalar)  # the group is a real vector space
        return WeylLabel(scalar * self.a, scalar * self.psi)

    __rmul__ = __mul__


VACUUM = WeylLabel()


@dataclass(frozen=True, eq=False)
class CorrelationKernel:
    eta: float = DEFAULT_ETA
    grid: MomentumGrid = field(default_factory=default_grid)
    tolerances: Dict[str, float] = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    max_gram: int = 32

    def __post_init__(self):
        if not self.eta > 0:
            raise ValueError("eta must be positive")
        tol = dict(DEFAULT_TOLERANCES)
        tol.update(self.tolerances)
        object.__setattr__(self, "tolerances", tol)

    def with_grid(self, grid: MomentumGrid) -> "CorrelationKernel":
        return CorrelationKernel(self.eta, grid, dict(self.tolerances), self.max_gram)

    def combined_samples(self, label: WeylLabel) -> np.ndarray:
        return label.a.sample(self.grid) + 1j * self.eta * label.psi.sample(self.grid)

    def inner(self, u: np.ndarray, v: np.ndarray) -> complex:
        return inner_samples(u, v, self.grid)


def combined_vector(label: WeylLabel, eta: float = DEFAULT_ETA) -> FieldEvaluator:
    """a + i eta psi as an evaluator."""
    return label.a + (1j * eta) * label.psi


def _correlation_from_samples(kernel: CorrelationKernel, A: np.ndarray, B: np.ndarray,
                              check_norm: bool = True) -> complex:
    eta = kernel.eta
    D = B - A
    dd = kernel.inner(D, D).real
    if check_norm and dd < -kernel.tolerances["negative_norm"] * euclid_samples(D, kernel.grid) ** 2:
        raise NegativeNormError(f"difference vector has negative norm {dd:.3e}")
    phase = kernel.inner(B, A).imag
    return complex(np.exp(-1j * phase / (2 * eta) - dd / (4 * eta)))


def correlation(kernel: CorrelationKernel, x: WeylLabel, y: WeylLabel) -> complex:
    """F(x; y) for x = (a, psi), y = (b, phi)."""
    return _correlation_from_samples(kernel, kernel.combined_samples(x), kernel.combined_samples(y))


def symplectic_form(kernel: CorrelationKernel, x: WeylLabel, y: WeylLabel) -> float:
    """s(x; y) = Im <a + i eta psi | b + i eta phi> / eta."""
    return kernel.inner(kernel.combined_samples(x), kernel.combined_samples(y)).imag / kernel.eta


def weyl_identity_residual(kernel: CorrelationKernel, x: WeylLabel, y: WeylLabel) -> float:
    """|F(x; y) - exp(-(i/2) s(y; x)) F(x - y; 0)|."""
    lhs = correlation(kernel, x, y)
    rhs = np.exp(-0.5j * symplectic_form(kernel, y, x)) * correlation(kernel, x - y, VACUUM)
    return float(abs(lhs - rhs))


def covariance_residuals(kernel: CorrelationKernel, x: WeylLabel, y: WeylLabel,
                         z: WeylLabel) -> Dict[str, float]:
    """Residuals of F(x+z; y+z) against F(x; y).

    ``raw`` is the plain difference.  ``cocycle`` multiplies by the phase that the
    explicit form of F predicts, exp((i/2)(s(y; z) + s(z; x))), and must vanish
    for all labels; ``raw`` vanishes only when that phase is trivial.
    """
    f0 = correlation(kernel, x, y)
    f1 = correlation(kernel, x + z, y + z)
    phase = np.exp(-0.5j * (symplectic_form(kernel, y, z) + symplectic_form(kernel, z, x)))
    return {"raw": float(abs(f1 - f0)), "cocycle": float(abs(f1 - phase * f0))}


def gram_matrix(kernel: CorrelationKernel, labels: Sequence[WeylLabel]) -> np.ndarray:
    """G[j, j'] = F(x_j; x_j'); raises PositivityViolation if not positive semidefinite.

    Entries are computed without the negative-norm guard so that labels outside
    the Lorenz class surface here, through the eigenvalue certificate.
    """
    n = len(labels)
    if not 1 <= n <= kernel.max_gram:
        raise ValueError(f"need 1 <= n <= {kernel.max_gram} labels, got {n}")
    samples = [kernel.combined_samples(x) for x in labels]
    G = np.empty((n, n), dtype=complex)
    for j in range(n):
        for jp in range(n):
            G[j, jp] = _correlation_from_samples(kernel, samples[j], samples[jp], check_norm=False)
    min_eig = gram_min_eigenvalue(G)
    bound = kernel.tolerances["psd"] * np.linalg.norm(G, 2)
    if min_eig < -bound:
        raise PositivityViolation(f"positivity violated: Gram eigenvalue {min_eig:.3e} < -{bound:.3e}",
                                  G, min_eig)
    return G


def gram_min_eigenvalue(G: np.ndarray) -> float:
    H = 0.5 * (G + G.conj().T)
    return float(np.linalg.eigvalsh(H)[0])


def field_op_matrix_element(kernel: CorrelationKernel, y: WeylLabel, chi: FieldEvaluator,
                            x: WeylLabel) -> complex:
    """<W(y)* Omega | A(chi) W(x)* Omega>."""
    A = kernel.combined_samples(x)
    B = kernel.combined_samples(y)
    c = chi.sample(kernel.grid)
    pre = 0.5 * (kernel.inner(A, c) + kernel.inner(c, B))
    return pre * _correlation_from_samples(kernel, A, B)


def f_op_matrix_element(kernel: CorrelationKernel, y: WeylLabel, d: FieldEvaluator,
                        x: WeylLabel) -> complex:
    """<W(y)* Omega | F(d) W(x)* Omega>."""
    A = kernel.combined_samples(x)
    B = kernel.combined_samples(y)
    dv = d.sample(kernel.grid)
    pre = 0.5j / kernel.eta * (kernel.inner(dv, B) - kernel.inner(A, dv))
    return pre * _correlation_from_samples(kernel, A, B)


def field_op_matrix_element_fd(kernel: CorrelationKernel, y: WeylLabel, chi: FieldEvaluator,
                               x: WeylLabel, step: float = 1e-4) -> complex:
    """i d/dlam of <W(y)*Omega | W(0, lam chi)* W(x)*Omega> at lam = 0, by central difference."""
    A = kernel.combined_samples(x)

    def overlap(lam):
        label = WeylLabel(x.a, x.psi + lam * chi)
        weyl_phase = np.exp(-0.5j * lam * kernel.inner(chi.sample(kernel.grid), A).real)
        return weyl_phase * correlation(kernel, label, y)

    return 1j * (overlap(step) - overlap(-step)) / (2 * step)


def f_op_matrix_element_fd(kernel: CorrelationKernel, y: WeylLabel, d: FieldEvaluator,
                           x: WeylLabel, step: float = 1e-4) -> complex:
    """i d/dlam of <W(y)*Omega | W(lam d, 0)* W(x)*Omega> at lam = 0, by central difference."""
    A = kernel.combined_samples(x)

    def overlap(lam):
        label = WeylLabel(x.a + lam * d, x.psi)
        weyl_phase = np.exp(0.5j * lam * kernel.inner(d.sample(kernel.grid), A).imag / kernel.eta)
        return weyl_phase * correlation(kernel, label, y)

    return 1j * (overlap(step) - overlap(-step)) / (2 * step)


def annihilator_vacuum_residual(kernel: CorrelationKernel, psi: FieldEvaluator,
                                probes: Sequence[WeylLabel]) -> float:
    """max over probes of |<W(y)* Omega | (A(psi) - i A(i psi)) Omega>|."""
    ipsi = 1j * psi
    worst = 0.0
    for y in probes:
        value = (field_op_matrix_element(kernel, y, psi, VACUUM)
                 - 1j * field_op_matrix_element(kernel, y, ipsi, VACUUM))
        worst = max(worst, abs(value))
    return worst


def one_photon_norm_sq(kernel: CorrelationKernel, psi: FieldEvaluator) -> float:
    """||A_+(psi) Omega||^2 = (eta/2) <psi|psi>, cross-checked against the transverse form."""
    s = psi.sample(kernel.grid)
    direct = kernel.inner(s, s).real
    transverse = transverse_samples(s, kernel.grid)
    scale = euclid_samples(s, kernel.grid) ** 2
    if abs(direct - transverse) > kernel.tolerances["form_mismatch"] * max(scale, np.finfo(float).tiny):
        raise FormMismatch(f"pseudo-norm {direct!r} disagrees with transverse form {transverse!r}")
    value = 0.5 * kernel.eta * direct
    if value < -kernel.tolerances["negative_norm"] * max(scale, 1.0):
        raise NegativeNormError(f"one-photon norm {value:.3e} is negative")
    return value


def part_norm_sq(kernel: CorrelationKernel, part: FieldEvaluator) -> float:
    """(eta/2) <part|part> without the Lorenz cross-check; for spin components."""
    s = part.sample(kernel.grid)
    return 0.5 * kernel.eta * kernel.inner(s, s).real


def commutator(kernel: CorrelationKernel, x: WeylLabel, y: WeylLabel) -> complex:
    """[G(x), G(y)] = -i s(x; y) for the generators W(lam x) = exp(i lam G(x))."""
    return -1j * symplectic_form(kernel, x, y)


def creation_annihilation_ccr_check(kernel: CorrelationKernel, psi: FieldEvaluator,
                                    phi: FieldEvaluator) -> Dict[str, float]:
    """Residuals of [A+(psi), A-(phi)] = -(eta/2)<psi|phi> and [A-(psi), A-(phi)] = 0.

    A-(u) = (A(u) - i A(i u))/2 and A+(u) = (A(u) + i A(i u))/2; each commutator
    of field operators is the scalar -i s((0,u); (0,v)).
    """
    def c(u, v):
        return commutator(kernel, WeylLabel(ZERO, u), WeylLabel(ZERO, v))

    ipsi, iphi = 1j * psi, 1j * phi
    plus_minus = 0.25 * (c(psi, phi) - 1j * c(psi, iphi) + 1j * c(ipsi, phi) + c(ipsi, iphi))
    minus_minus = 0.25 * (c(psi, phi) - 1j * c(psi, iphi) - 1j * c(ipsi, phi) - c(ipsi, iphi))
    plus_plus = 0.25 * (c(psi, phi) + 1j * c(psi, iphi) + 1j * c(ipsi, phi) - c(ipsi, iphi))
    expected = -0.5 * kernel.eta * kernel.inner(psi.sample(kernel.grid), phi.sample(kernel.grid))
    return {
        "plus_minus": float(abs(plus_minus - expected)),
        "minus_minus": float(abs(minus_minus)),
        "plus_plus": float(abs(plus_plus)),
        "plus_minus_value_re": float(plus_minus.real),
        "plus_minus_value_im": float(plus_minus.imag),
    }
