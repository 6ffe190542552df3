"""Spacetime test functions, their light-cone transforms, and vector-potential reconstruction.

Coordinates are q = (q0, q1, q2, q3) with c = 1.  Derivatives d/dq_mu are plain
partial derivatives in these coordinates; the Lorenz condition then reads
sum_mu dA_mu/dq_mu = 0 for the potential built from Lorenz-completed coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Tuple

import numpy as np

from .errors import RealityViolation
from .fields import FieldEvaluator, _as_points, _kabs
from .quadrature import MomentumGrid

TWO_PI = 2.0 * np.pi
REALITY_RTOL = 1e-10

LEVI_CIVITA = np.zeros((3, 3, 3))
for _i, _j, _k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
    LEVI_CIVITA[_i, _j, _k] = 1.0
    LEVI_CIVITA[_i, _k, _j] = -1.0


@dataclass(frozen=True)
class GaussianTerm:
    """amp * exp(-|q - center|^2 / (2 tau^2)) * trig(momentum . q + offset).

    ``phase`` selects cos or sin, so every term is real.  ``deriv`` optionally
    applies one partial derivative d/dq_deriv to the whole term.
    """

    amp: float
    center: Tuple[float, float, float, float]
    tau: float
    momentum: Tuple[float, float, float, float] = (0.0, 0.0, 0.0, 0.0)
    phase: str = "cos"
    offset: float = 0.0
    deriv: int | None = None

    def __post_init__(self):
        if self.phase not in ("cos", "sin"):
            raise ValueError("phase must be 'cos' or 'sin'")
        if not self.tau > 0:
            raise ValueError("tau must be positive")
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        object.__setattr__(self, "momentum", tuple(float(p) for p in self.momentum))

    def _pairs(self):
        # trig(t) written as sum over s = +-1 of coeff_s * exp(i s t)
        if self.phase == "cos":
            return ((1, 0.5 * self.amp), (-1, 0.5 * self.amp))
        return ((1, -0.5j * self.amp), (-1, 0.5j * self.amp))

    def evaluate(self, q: np.ndarray) -> np.ndarray:
        c = np.asarray(self.center)
        p = np.asarray(self.momentum)
        d = q - c
        g = np.exp(-np.einsum("ij,ij->i", d, d) / (2 * self.tau**2))
        out = np.zeros(len(q), dtype=complex)
        for s, coeff in self._pairs():
            term = coeff * g * np.exp(1j * s * (q @ p + self.offset))
            if self.deriv is not None:
                mu = self.deriv
                term = term * (-d[:, mu] / self.tau**2 + 1j * s * p[mu])
            out += term
        return out

    def transform(self, k: np.ndarray) -> np.ndarray:
        """(2 pi)^(-3/2) int d^4q exp(i q0 |k| - i q.k) term(q), in closed form."""
        w = np.empty((len(k), 4))
        w[:, 0] = _kabs(k)
        w[:, 1:] = -k
        c = np.asarray(self.center)
        p = np.asarray(self.momentum)
        norm = TWO_PI ** (-1.5) * (TWO_PI * self.tau**2) ** 2
        out = np.zeros(len(k), dtype=complex)
        for s, coeff in self._pairs():
            u = w + s * p
            out += coeff * np.exp(1j * (u @ c) - 0.5 * self.tau**2 * np.einsum("ij,ij->i", u, u)
                                  + 1j * s * self.offset)
        out *= norm
        if self.deriv is not None:
            out *= -1j * w[:, self.deriv]
        return out

    def derivative(self, mu: int, sign: float = 1.0) -> "GaussianTerm":
        if self.deriv is not None:
            raise ValueError("only first derivatives are representable in the Gaussian family")
        return replace(self, deriv=mu, amp=sign * self.amp)

    def shifted(self, x) -> "GaussianTerm":
        x = np.asarray(x, dtype=float)
        return replace(self, center=tuple(np.asarray(self.center) + x),
                       offset=self.offset - float(np.dot(self.momentum, x)))


@dataclass(frozen=True)
class TestFunction4D:
    """Four real spacetime test functions f_mu(q), each a finite sum of Gaussian terms."""

    __test__ = False  # not a pytest class

    components: Tuple[Tuple[GaussianTerm, ...], ...] = ((), (), (), ())

    def __post_init__(self):
        comps = tuple(tuple(c) for c in self.components)
        if len(comps) != 4:
            raise ValueError("a test function has exactly four components")
        object.__setattr__(self, "components", comps)

    def evaluate_complex(self, q) -> np.ndarray:
        q = np.atleast_2d(np.asarray(q, dtype=float))
        out = np.zeros((len(q), 4), dtype=complex)
        for mu, terms in enumerate(self.components):
            for t in terms:
                out[:, mu] += t.evaluate(q)
        return out

    def evaluate(self, q) -> np.ndarray:
        """Real (N, 4) values; the imaginary residue of the exponential pairs is dropped."""
        return self.evaluate_complex(q).real

    def shifted(self, x) -> "TestFunction4D":
        """q -> f(q - x)."""
        return TestFunction4D(tuple(tuple(t.shifted(x) for t in terms) for terms in self.components))

    def is_zero(self) -> bool:
        return all(len(c) == 0 for c in self.components)


class TestFunctionWave(FieldEvaluator):
    """Light-cone transform of a test function; not Lorenz-completed."""

    __test__ = False
    kind = "testfunction_wave"
    lorenz = False

    def __init__(self, f: TestFunction4D) -> None:
        super().__init__()
        self.f = f

    def evaluate(self, k) -> np.ndarray:
        k = _as_points(k)
        out = np.zeros((len(k), 4), dtype=complex)
        for mu, terms in enumerate(self.f.components):
            for t in terms:
                out[:, mu] += t.transform(k)
        return out


def wavefunction_from_testfunction(f: TestFunction4D) -> FieldEvaluator:
    return TestFunctionWave(f)


def em_smearing_transforms(f: TestFunction4D) -> Tuple[TestFunction4D, TestFunction4D]:
    """Test functions g, h with  int f.E = g(A)  and  int f.B = h(A)."""
    g0 = []
    for alpha in (1, 2, 3):
        g0.extend(t.derivative(alpha) for t in f.components[alpha])
    g = [tuple(g0)]
    for alpha in (1, 2, 3):
        g.append(tuple(t.derivative(0, -1.0) for t in f.components[alpha]))

    h = [()]
    for gamma in (1, 2, 3):
        terms = []
        for alpha in (1, 2, 3):
            for beta in (1, 2, 3):
                e = LEVI_CIVITA[alpha - 1, beta - 1, gamma - 1]
                if e != 0:
                    terms.extend(t.derivative(beta, e) for t in f.components[alpha])
        h.append(tuple(terms))
    return TestFunction4D(tuple(g)), TestFunction4D(tuple(h))


def smear(f: TestFunction4D, potential: np.ndarray, q: np.ndarray, weights: np.ndarray) -> float:
    """Quadrature of f^mu A_mu given potential samples (N, 4) at points q with weights."""
    fv = f.evaluate(q)
    contracted = fv[:, 0] * potential[:, 0] - np.einsum("ij,ij->i", fv[:, 1:], potential[:, 1:])
    return float(np.dot(weights, contracted))


def reconstruct_potential(a: FieldEvaluator, q, grid: MomentumGrid, chunk: int = 256) -> np.ndarray:
    """Real vector potential A_mu(q) from Fourier coefficients a, by quadrature.

    Accepts a single point (4,) or an array (M, 4); the imaginary residue is
    checked against a relative tolerance and then discarded.
    """
    q_arr = np.asarray(q, dtype=float)
    single = q_arr.ndim == 1
    q_arr = np.atleast_2d(q_arr)
    k = grid.nodes
    r = grid.norms
    a_plus = a.sample(grid)
    a_minus = np.conj(a.evaluate(-k))
    w = grid.weights / (2.0 * r) * TWO_PI ** (-1.5)
    scale = float(np.dot(w, np.abs(a_plus).max(axis=1) + np.abs(a_minus).max(axis=1)))

    out = np.empty((len(q_arr), 4), dtype=complex)
    for start in range(0, len(q_arr), chunk):
        qs = q_arr[start:start + chunk]
        spatial = qs[:, 1:] @ k.T
        t = np.outer(qs[:, 0], r)
        forward = np.exp(1j * (spatial - t)) * w
        backward = np.exp(1j * (spatial + t)) * w
        out[start:start + chunk] = forward @ a_plus + backward @ a_minus
    resid = float(np.max(np.abs(out.imag), initial=0.0))
    if resid > REALITY_RTOL * max(scale, np.finfo(float).tiny):
        raise RealityViolation(f"imaginary residue {resid:.3e} exceeds tolerance (scale {scale:.3e})")
    values = out.real
    return values[0] if single else values


def _stencil(q, h):
    q = np.asarray(q, dtype=float)
    pts = [q]
    for mu in range(4):
        e = np.zeros(4)
        e[mu] = h
        pts.extend([q + e, q - e])
    return np.array(pts)


def potential_derivatives(a: FieldEvaluator, q, grid: MomentumGrid, h: float):
    """Central first and second differences of A at q: (dA[mu, nu], d2A[mu, nu]) = d/dq_mu of A_nu."""
    vals = reconstruct_potential(a, _stencil(q, h), grid)
    center = vals[0]
    first = np.empty((4, 4))
    second = np.empty((4, 4))
    for mu in range(4):
        plus, minus = vals[1 + 2 * mu], vals[2 + 2 * mu]
        first[mu] = (plus - minus) / (2 * h)
        second[mu] = (plus - 2 * center + minus) / h**2
    return first, second


def wave_equation_residual(a: FieldEvaluator, q, grid: MomentumGrid, h: float = 0.05) -> np.ndarray:
    """Finite-difference d'Alembertian of each component A_mu at q."""
    _, second = potential_derivatives(a, q, grid, h)
    return second[0] - second[1:].sum(axis=0)


def lorenz_gauge_residual(a: FieldEvaluator, q, grid: MomentumGrid, h: float = 0.05) -> float:
    first, _ = potential_derivatives(a, q, grid, h)
    return float(np.trace(first))


def field_strengths(a: FieldEvaluator, q, grid: MomentumGrid, h: float = 1e-3):
    """Electric and magnetic fields at points q (M, 4) by central differences of A.

    E_alpha = -dA_0/dq_alpha - dA_alpha/dq_0 and B_alpha = eps_{alpha beta gamma} dA_gamma/dq_beta.
    """
    q = np.atleast_2d(np.asarray(q, dtype=float))
    offsets = np.concatenate([np.eye(4) * h, -np.eye(4) * h])
    pts = (q[:, None, :] + offsets[None, :, :]).reshape(-1, 4)
    vals = reconstruct_potential(a, pts, grid).reshape(len(q), 8, 4)
    first = (vals[:, :4, :] - vals[:, 4:, :]) / (2 * h)  # first[m, mu, nu] = dA_nu/dq_mu
    electric = -first[:, 1:, 0] - first[:, 0, 1:]
    magnetic = np.einsum("abc,mbc->ma", LEVI_CIVITA, first[:, 1:, 1:])
    return electric, magnetic
