"""Numerical toolkit for the covariant construction of the free photon field."""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .quadrature import MomentumGrid, build_grid, default_grid, integrate
from .fields import (FieldEvaluator, GaussianPacket, ZERO, complete_lorenz, euclid_norm,
                     longitudinal, lorenz_residual, pseudo_inner, smeared_field, transverse_form)
from .vacuum import CorrelationKernel, WeylLabel, VACUUM, correlation, symplectic_form
