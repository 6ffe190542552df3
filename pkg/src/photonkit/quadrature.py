"""Spherical product quadrature over a radial shell in momentum space."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Tuple

import numpy as np

from .errors import InvalidGridError

DEFAULT_K_MIN = 1e-3
DEFAULT_K_MAX = 10.0
DEFAULT_RESOLUTION = (32, 16, 32)


@dataclass(frozen=True, eq=False)
class MomentumGrid:
    """Nodes and weights approximating the plain Lebesgue measure dk on a shell.

    Singular factors such as 1/(2|k|) are applied by the consumers, never folded
    into the weights.
    """

    nodes: np.ndarray
    weights: np.ndarray
    k_min: float
    k_max: float
    resolution: Tuple[int, int, int]
    norms: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return len(self.weights)

    @cached_property
    def half_inverse_weights(self) -> np.ndarray:
        """weights / (2|k|): the invariant measure dk/(2|k|) on the nodes."""
        out = self.weights / (2.0 * self.norms)
        out.setflags(write=False)
        return out

    @cached_property
    def pseudo_coefficients(self) -> np.ndarray:
        """(N, 4) array -g_mu w / (2|k|), so that <a|psi> = vdot(a, coeff * psi)."""
        out = -self.half_inverse_weights[:, None] * np.array([1.0, -1.0, -1.0, -1.0])[None, :]
        out.setflags(write=False)
        return out

    def describe(self) -> dict:
        return {
            "k_min": self.k_min,
            "k_max": self.k_max,
            "resolution": list(self.resolution),
        }

    def scaled(self, factor: float) -> "MomentumGrid":
        """Same resolution with the outer cutoff multiplied by ``factor``."""
        return build_grid(self.k_min, self.k_max * factor, self.resolution)

    def refined(self) -> "MomentumGrid":
        return build_grid(self.k_min, self.k_max, tuple(2 * n for n in self.resolution))


def build_grid(k_min: float = DEFAULT_K_MIN, k_max: float = DEFAULT_K_MAX,
               resolution=DEFAULT_RESOLUTION) -> MomentumGrid:
    """Gauss-Legendre in radius and cos(theta), uniform in azimuth."""
    k_min = float(k_min)
    k_max = float(k_max)
    if not (np.isfinite(k_min) and np.isfinite(k_max)) or k_min <= 0 or k_min >= k_max:
        raise InvalidGridError(f"need 0 < k_min < k_max, got k_min={k_min}, k_max={k_max}")
    resolution = tuple(int(n) for n in resolution)
    if len(resolution) != 3 or min(resolution) < 2:
        raise InvalidGridError(f"each resolution component must be >= 2, got {resolution}")
    n_r, n_t, n_p = resolution

    x, w_r = np.polynomial.legendre.leggauss(n_r)
    half = 0.5 * (k_max - k_min)
    r = k_min + half * (x + 1.0)
    w_r = w_r * half

    cos_t, w_t = np.polynomial.legendre.leggauss(n_t)
    sin_t = np.sqrt(1.0 - cos_t**2)

    phi = 2.0 * np.pi * np.arange(n_p) / n_p
    w_p = 2.0 * np.pi / n_p

    R, C, P = np.meshgrid(r, cos_t, phi, indexing="ij")
    S = np.broadcast_to(sin_t[None, :, None], R.shape)
    nodes = np.stack([R * S * np.cos(P), R * S * np.sin(P), R * C], axis=-1).reshape(-1, 3)
    weights = (w_r[:, None, None] * w_t[None, :, None] * w_p * r[:, None, None] ** 2)
    weights = np.broadcast_to(weights, R.shape).reshape(-1).copy()
    norms = np.broadcast_to(r[:, None, None], R.shape).reshape(-1).copy()

    nodes.setflags(write=False)
    weights.setflags(write=False)
    norms.setflags(write=False)
    return MomentumGrid(nodes=nodes, weights=weights, k_min=k_min, k_max=k_max,
                        resolution=resolution, norms=norms)


def default_grid() -> MomentumGrid:
    return build_grid(DEFAULT_K_MIN, DEFAULT_K_MAX, DEFAULT_RESOLUTION)


def integrate(grid: MomentumGrid, integrand) -> complex:
    """Sum of weight * integrand over the nodes, in node order.

    ``integrand`` is either a callable taking the (N, 3) node array or an array
    of length N already sampled on the grid.
    """
    values = integrand(grid.nodes) if callable(integrand) else integrand
    values = np.asarray(values)
    # np.dot reduces in a fixed order for fixed input, which keeps results bit-reproducible.
    return complex(np.dot(grid.weights, values))


def shell_volume(k_min: float, k_max: float) -> float:
    return 4.0 * np.pi / 3.0 * (k_max**3 - k_min**3)
