"""Seeded random packets, fields, and labels for invariant checks."""

from __future__ import annotations

import numpy as np

from .fields import FieldEvaluator, GaussianPacket

SIGMA_RANGE = (0.55, 0.9)
RADIUS_RANGE = (1.2, 2.4)


def random_direction(rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)


def random_complex(rng: np.random.Generator, size=None):
    return (rng.normal(size=size) + 1j * rng.normal(size=size)) / np.sqrt(2)


def random_packet(rng: np.random.Generator, amp_scale: float = 0.5,
                  sigma_range=SIGMA_RANGE, radius_range=RADIUS_RANGE) -> GaussianPacket:
    center = random_direction(rng) * rng.uniform(*radius_range)
    return GaussianPacket(eps=random_complex(rng, 3), center=center,
                          sigma=rng.uniform(*sigma_range), amp=amp_scale * random_complex(rng))


def random_field(rng: np.random.Generator, max_terms: int = 2, **kwargs) -> FieldEvaluator:
    n = int(rng.integers(1, max_terms + 1))
    field = random_packet(rng, **kwargs)
    for _ in range(n - 1):
        field = field + random_packet(rng, **kwargs)
    return field


def transverse_packet(rng: np.random.Generator, amp_scale: float = 0.5, **kwargs) -> GaussianPacket:
    """Packet whose polarization is orthogonal to its center (transverse at k = center)."""
    p = random_packet(rng, amp_scale=amp_scale, **kwargs)
    n = p.center / np.linalg.norm(p.center)
    eps = p.eps - n * np.dot(n, p.eps)
    return GaussianPacket(eps, p.center, p.sigma, p.amp)


def random_label(rng: np.random.Generator, **kwargs):
    from .vacuum import WeylLabel
    return WeylLabel(random_field(rng, **kwargs), random_field(rng, **kwargs))


def random_gauge(rng: np.random.Generator):
    from .gauge import GaugeFunction
    return GaugeFunction(amp=random_complex(rng), center=random_direction(rng) * rng.uniform(*RADIUS_RANGE),
                         sigma=rng.uniform(*SIGMA_RANGE))
