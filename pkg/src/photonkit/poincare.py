"""Spacetime shifts, rotations and boosts acting on fields, and their generators.

A Lorentz element is stored as the 4x4 real matrix M acting on lower-index
field components.  It transforms a field as

    a'(k) = M a(k'),    (|k'|, k') = M^{-1} (|k|, k),

which is a representation: applying M1 and then M2 equals applying M2 @ M1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np

from .errors import DerivativeUnstable, LightConeViolation, NotRadiationGauge
from .fields import (METRIC, FieldEvaluator, MatrixAction, MomentumWeighted, Reparameterized,
                     PhaseModulated, ZeroField, _as_points, _kabs, euclid_samples)
from .quadrature import MomentumGrid, build_grid
from .vacuum import (CorrelationKernel, WeylLabel, _correlation_from_samples, correlation,
                     one_photon_norm_sq, part_norm_sq)

METRIC_TOL = 1e-12
LIGHT_CONE_TOL = 1e-12
FLOW_STEP = 1e-4

ROTATION_PLANES = ((1, 2), (2, 3), (3, 1))
BOOST_PLANES = ((0, 1), (0, 2), (0, 3))


# --- shifts ------------------------------------------------------------------

def apply_shift(label: WeylLabel, x) -> WeylLabel:
    """Translate both components of a label by the spacetime vector x."""
    x = np.asarray(x, dtype=float).reshape(4)
    if not np.all(np.isfinite(x)):
        raise ValueError("shift must be finite")
    return WeylLabel(_shift_field(label.a, x), _shift_field(label.psi, x))


def _shift_field(f: FieldEvaluator, x: np.ndarray) -> FieldEvaluator:
    if isinstance(f, ZeroField) or not np.any(x):
        return f
    if isinstance(f, PhaseModulated):
        # phases multiply, so nested shifts collapse into one
        return PhaseModulated(f.shift + x, f.inner)
    return PhaseModulated(x, f)


# --- Lorentz elements ----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class LorentzElement:
    matrix: np.ndarray
    kind: str = "composition"

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float).reshape(4, 4)
        if not np.all(np.isfinite(m)):
            raise ValueError("Lorentz matrix must be finite")
        defect = np.max(np.abs(m.T @ METRIC @ m - METRIC))
        if defect > METRIC_TOL * max(1.0, np.max(np.abs(m)) ** 2):
            raise ValueError(f"matrix does not preserve the metric (defect {defect:.3e})")
        if m[0, 0] < 1.0 - METRIC_TOL:
            raise ValueError("only orthochronous transformations are supported")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def inverse_matrix(self) -> np.ndarray:
        # M^{-1} = G M^T G for metric-preserving M
        return METRIC @ self.matrix.T @ METRIC

    def inverse(self) -> "LorentzElement":
        return LorentzElement(self.inverse_matrix, self.kind)

    def compose(self, other: "LorentzElement") -> "LorentzElement":
        """The element that applies ``other`` first and then ``self``."""
        return LorentzElement(self.matrix @ other.matrix, "composition")

    def wave_vector_map(self, k) -> np.ndarray:
        """k -> k' with a light-cone consistency check."""
        k = _as_points(k)
        four = np.empty((len(k), 4))
        four[:, 0] = _kabs(k)
        four[:, 1:] = k
        mapped = four @ self.inverse_matrix.T
        kp = mapped[:, 1:]
        gap = np.abs(_kabs(kp) - mapped[:, 0])
        if np.any(gap > LIGHT_CONE_TOL * np.maximum(four[:, 0], 1.0) * np.max(np.abs(self.matrix))):
            raise LightConeViolation(f"|k'| inconsistent with k'_0 by {float(np.max(gap)):.3e}")
        return kp

    def max_dilation(self) -> float:
        """Largest factor by which |k| can grow under the map (e^|rapidity|)."""
        m = self.inverse_matrix
        return float(abs(m[0, 0]) + np.linalg.norm(m[0, 1:]))


def identity() -> LorentzElement:
    return LorentzElement(np.eye(4), "identity")


def rotation(axis, angle: float) -> LorentzElement:
    """Right-handed rotation by ``angle`` about ``axis`` (Rodrigues formula)."""
    n = np.asarray(axis, dtype=float).reshape(3)
    norm = np.linalg.norm(n)
    if norm == 0:
        raise ValueError("rotation axis must be nonzero")
    n = n / norm
    cross = np.array([[0, -n[2], n[1]], [n[2], 0, -n[0]], [-n[1], n[0], 0]])
    r = np.eye(3) + np.sin(angle) * cross + (1 - np.cos(angle)) * cross @ cross
    m = np.eye(4)
    m[1:, 1:] = r
    return LorentzElement(m, "rotation")


def boost(direction, rapidity: float) -> LorentzElement:
    """Boost with rapidity along ``direction``; for e3 the field map is
    a'_0 = cosh a_0(k') - sinh a_3(k') with k'_3 = cosh k_3 + sinh |k|."""
    n = np.asarray(direction, dtype=float).reshape(3)
    n = n / np.linalg.norm(n)
    ch, sh = np.cosh(rapidity), np.sinh(rapidity)
    m = np.empty((4, 4))
    m[0, 0] = ch
    m[0, 1:] = -sh * n
    m[1:, 0] = -sh * n
    m[1:, 1:] = np.eye(3) + (ch - 1) * np.outer(n, n)
    return LorentzElement(m, "boost")


def boost3(rapidity: float) -> LorentzElement:
    return boost((0.0, 0.0, 1.0), rapidity)


def plane_element(plane: Tuple[int, int], chi: float) -> LorentzElement:
    """One-parameter subgroup for a generator index pair: rotations in (alpha, beta)
    or boosts along alpha for (0, alpha)."""
    mu, nu = plane
    if (mu, nu) in BOOST_PLANES:
        e = np.zeros(3)
        e[nu - 1] = 1.0
        return boost(e, chi)
    if (mu, nu) in ROTATION_PLANES:
        # rotation in the (mu, nu) plane taking e_mu towards e_nu
        axis = np.zeros(3)
        axis[6 - mu - nu - 1] = 1.0
        return rotation(axis, chi)
    raise ValueError(f"unsupported generator index pair {plane}")


class LorentzTransformed(FieldEvaluator):
    kind = "lorentz_transformed"

    def __init__(self, element: LorentzElement, inner: FieldEvaluator) -> None:
        super().__init__()
        self.element = element
        self.inner = inner
        self.lorenz = inner.lorenz
        self._composed = MatrixAction(element.matrix, Reparameterized(element.wave_vector_map, inner))

    def evaluate(self, k) -> np.ndarray:
        return self._composed.evaluate(k)


def _lorentz_field(f: FieldEvaluator, element: LorentzElement) -> FieldEvaluator:
    if isinstance(f, ZeroField):
        return f
    if isinstance(f, LorentzTransformed):
        return LorentzTransformed(element.compose(f.element), f.inner)
    return LorentzTransformed(element, f)


def apply_lorentz(label: WeylLabel, element: LorentzElement) -> WeylLabel:
    return WeylLabel(_lorentz_field(label.a, element), _lorentz_field(label.psi, element))


def boosted_grid(grid: MomentumGrid, element: LorentzElement) -> MomentumGrid:
    """Grid for transformed fields: the outer cutoff and every node count grow with
    the dilation factor of the element (counts rounded up to even numbers), since
    a boost both stretches packets radially and squeezes them in angle."""
    factor = element.max_dilation()
    if factor <= 1.0 + 1e-12:
        return grid
    resolution = tuple(2 * int(np.ceil(n * factor / 2)) for n in grid.resolution)
    return build_grid(grid.k_min, grid.k_max * factor, resolution)


# --- spin matrices -------------------------------------------------------------

def spin_matrix(mu: int, nu: int) -> np.ndarray:
    """S_{mu nu}: i at (mu, nu), -i at (nu, mu)."""
    s = np.zeros((4, 4), dtype=complex)
    if mu != nu:
        s[mu, nu] = 1j
        s[nu, mu] = -1j
    return s


def spin_action(mu: int, nu: int) -> np.ndarray:
    """The spin part acting on lower-index components, -S_{mu nu} G.

    Equal to S_{mu nu} for rotations; for boosts both off-diagonal entries are +i.
    """
    return -spin_matrix(mu, nu) @ METRIC


S12 = spin_matrix(1, 2)


def _combined_jacobian(kernel: CorrelationKernel, label: WeylLabel) -> np.ndarray:
    k = kernel.grid.nodes
    return label.a.jacobian(k) + 1j * kernel.eta * label.psi.jacobian(k)


def orbital_action(kernel: CorrelationKernel, label: WeylLabel, plane: Tuple[int, int]) -> np.ndarray:
    """L applied to the combined vector of ``label``, sampled on the grid.

    L_{ab} = i(k_a d/dk_b - k_b d/dk_a) and L_{0a} = i|k| d/dk_a.
    """
    mu, nu = plane
    jac = _combined_jacobian(kernel, label)
    k = kernel.grid.nodes
    if mu == 0:
        return 1j * kernel.grid.norms[:, None] * jac[:, :, nu - 1]
    return 1j * (k[:, mu - 1, None] * jac[:, :, nu - 1] - k[:, nu - 1, None] * jac[:, :, mu - 1])


# --- generator matrix elements ------------------------------------------------

def generator_K_matrix_element(kernel: CorrelationKernel, y: WeylLabel, mu: int,
                               x: WeylLabel) -> complex:
    """<W(y)* Omega | K_mu W(x)* Omega> = (1/2 eta) F(x; y) <A| w B>, w = |k| or k_alpha."""
    if mu not in (0, 1, 2, 3):
        raise ValueError("mu must be 0..3")
    A = kernel.combined_samples(x)
    B = kernel.combined_samples(y)
    w = kernel.grid.norms if mu == 0 else kernel.grid.nodes[:, mu - 1]
    return (kernel.inner(A, w[:, None] * B) / (2 * kernel.eta)
            * _correlation_from_samples(kernel, A, B))


def _central(func, step):
    coarse = (func(step) - func(-step)) / (2 * step)
    fine = (func(step / 2) - func(-step / 2)) / step
    return coarse, fine


def generator_K_matrix_element_fd(kernel: CorrelationKernel, y: WeylLabel, mu: int,
                                  x: WeylLabel, step: float = FLOW_STEP) -> complex:
    """K_0 = i d/dt and K_alpha = -i d/dt of F(shift(x, t e_mu); y) at t = 0."""
    e = np.zeros(4)
    e[mu] = 1.0
    coarse, _ = _central(lambda t: correlation(kernel, apply_shift(x, t * e), y), step)
    return (1j if mu == 0 else -1j) * coarse


def generator_M_matrix_element(kernel: CorrelationKernel, y: WeylLabel, plane: Tuple[int, int],
                               x: WeylLabel) -> complex:
    """Closed-form <W(y)* Omega | M_{mu nu} W(x)* Omega>.

    Rotations:  (1/2 eta) F <A|(S + L) B>.
    Boosts:    -(1/2 eta) F <A|(S - L) B>, with S the spin action on lower indices.
    """
    plane = tuple(plane)
    if plane not in ROTATION_PLANES + BOOST_PLANES:
        raise ValueError(f"unsupported generator index pair {plane}")
    A = kernel.combined_samples(x)
    B = kernel.combined_samples(y)
    spin = B @ spin_action(*plane).T
    orbital = orbital_action(kernel, y, plane)
    pref = _correlation_from_samples(kernel, A, B) / (2 * kernel.eta)
    if plane in ROTATION_PLANES:
        return pref * kernel.inner(A, spin + orbital)
    return -pref * kernel.inner(A, spin - orbital)


def generator_M_matrix_element_fd(kernel: CorrelationKernel, y: WeylLabel, plane: Tuple[int, int],
                                  x: WeylLabel, step: float = FLOW_STEP,
                                  rtol: float = 1e-6) -> complex:
    """Rotations: i d/dchi, boosts: -i d/dchi of F(apply_lorentz(x, g(chi)); y) at chi = 0."""
    plane = tuple(plane)

    def flow(chi):
        return correlation(kernel, apply_lorentz(x, plane_element(plane, chi)), y)

    coarse, fine = _central(flow, step)
    if abs(fine - coarse) > rtol * max(abs(fine), 1.0):
        raise DerivativeUnstable(f"flow derivative unstable: {abs(fine - coarse):.3e}")
    return (1j if plane in ROTATION_PLANES else -1j) * coarse


# --- one-photon observables ------------------------------------------------------

def one_photon_expectations(kernel: CorrelationKernel, psi: FieldEvaluator) -> Dict[str, float]:
    """norm^2 of A_+(psi) Omega and <K_mu> = <psi| w psi> / <psi|psi> for w = |k|, k_1, k_2, k_3."""
    norm_sq = one_photon_norm_sq(kernel, psi)
    s = psi.sample(kernel.grid)
    out = {"norm_sq": norm_sq}
    for mu, name in enumerate(("K0", "K1", "K2", "K3")):
        weighted = MomentumWeighted(psi, None if mu == 0 else mu).sample(kernel.grid)
        out[name] = 0.5 * kernel.eta * kernel.inner(s, weighted).real / norm_sq if norm_sq > 0 else np.nan
    return out


# --- spin decomposition -----------------------------------------------------------

PROJ_PLUS = np.zeros((4, 4), dtype=complex)
PROJ_PLUS[1:3, 1:3] = 0.5 * np.array([[1, 1j], [-1j, 1]])
PROJ_MINUS = np.zeros((4, 4), dtype=complex)
PROJ_MINUS[1:3, 1:3] = 0.5 * np.array([[1, -1j], [1j, 1]])
PROJ_ZERO = np.diag([1.0, 0.0, 0.0, 1.0]).astype(complex)


def spin12_decompose(psi: FieldEvaluator):
    """(psi_plus, psi_zero, psi_minus) with S12 psi_pm = +-psi_pm and S12 psi_zero = 0.

    The parts are generally not Lorenz-completed and are flagged as such.
    """
    return tuple(MatrixAction(p, psi, lorenz=False) for p in (PROJ_PLUS, PROJ_ZERO, PROJ_MINUS))


def spin_part_norms(kernel: CorrelationKernel, psi: FieldEvaluator,
                    radiation_gauge: bool = True) -> Dict[str, float]:
    """(eta/2) <part|part> for the three S12 parts, and their fractions of the total.

    By default psi is first replaced by its radiation-gauge representative.  With
    psi_0 = 0 every part has a non-negative norm, so the fractions lie in [0, 1];
    in Lorenz gauge the time slot gives the zero part a negative pseudo-norm.
    """
    if radiation_gauge:
        from .gauge import radiation_gauge_representative
        psi = radiation_gauge_representative(psi)
    plus, zero, minus = spin12_decompose(psi)
    norms = {"plus": part_norm_sq(kernel, plus), "zero": part_norm_sq(kernel, zero),
             "minus": part_norm_sq(kernel, minus)}
    total = part_norm_sq(kernel, psi)
    norms["total"] = total
    for key in ("plus", "zero", "minus"):
        norms[key + "_fraction"] = norms[key] / total if total > 0 else np.nan
    return norms


# --- polarization ------------------------------------------------------------------

def _weighted_norm(values: np.ndarray, grid: MomentumGrid) -> float:
    v = values.reshape(len(grid), -1)
    integrand = np.einsum("ij,ij->i", np.conj(v), v).real / (2.0 * grid.norms)
    return float(np.sqrt(np.dot(grid.weights, integrand)))


def polarization_audit(psi: FieldEvaluator, grid: MomentumGrid, bound: float = 0.25,
                       cone_angle: float = 0.6, axis_threshold: float = 0.99,
                       gauge_tol: float = 1e-10) -> Dict[str, object]:
    """Residuals of the helicity conditions psi_2 = -+i psi_1, (k_1 -+ i k_2) psi_1 = 0, k_3 psi_3 = 0.

    Residuals are relative to the norm of psi in the dk/(2|k|) measure.  A field
    is classified as "H+" or "H-" when all of that sign's residuals are below
    ``bound``; otherwise "mixed" (or "zero" for the zero field).
    """
    s = psi.sample(grid)
    total = euclid_samples(s, grid)
    if _weighted_norm(s[:, 0], grid) > gauge_tol * max(total, np.finfo(float).tiny):
        raise NotRadiationGauge("time component of the wave function is nonzero")
    k = grid.nodes
    r = grid.norms
    p1, p2, p3 = s[:, 1], s[:, 2], s[:, 3]

    def rel(values):
        return _weighted_norm(values, grid) / total if total > 0 else 0.0

    residuals = {}
    for sign, name in ((1, "plus"), (-1, "minus")):
        residuals[name] = {
            "circular": rel(p2 + sign * 1j * p1),
            "transverse": rel((k[:, 0] - sign * 1j * k[:, 1]) * p1 / r),
            "longitudinal": rel(k[:, 2] * p3 / r),
        }

    density = np.einsum("ij,ij->i", np.conj(s), s).real / (2.0 * r) * grid.weights
    near = np.arccos(np.clip(np.abs(k[:, 2]) / r, 0.0, 1.0)) <= cone_angle
    axis_fraction = float(density[near].sum() / density.sum()) if total > 0 else 1.0

    # H0 with psi_0 = 0 forces psi_1 = psi_2 = 0; transversality then forces k_3 psi_3 = 0.
    rows = np.zeros((len(k), 3, 3))
    rows[:, 0, 0] = 1.0
    rows[:, 1, 1] = 1.0
    rows[:, 2, :] = k / r[:, None]
    h0_min_singular = float(np.min(np.linalg.svd(rows, compute_uv=False)[:, -1]))

    if total == 0:
        classification = "zero"
    elif max(residuals["plus"].values()) < bound:
        classification = "H+"
    elif max(residuals["minus"].values()) < bound:
        classification = "H-"
    else:
        classification = "mixed"
    return {
        "norm": total,
        "residuals": residuals,
        "bound": bound,
        "classification": classification,
        "axis_fraction": axis_fraction,
        "near_axis": axis_fraction >= axis_threshold,
        "h0_min_singular": h0_min_singular,
        "h0_trivial": h0_min_singular > 0.0,
    }
