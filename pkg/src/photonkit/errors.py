"""Exception hierarchy for photonkit."""


class PhotonkitError(Exception):
    """Base class for all errors raised by photonkit."""


class InvalidGridError(PhotonkitError, ValueError):
    pass


class NonFiniteError(PhotonkitError, ArithmeticError):
    pass


class RealityViolation(PhotonkitError):
    pass


class NegativeNormError(PhotonkitError):
    pass


class PositivityViolation(PhotonkitError):
    def __init__(self, message, gram=None, min_eigenvalue=None):
        super().__init__(message)
        self.gram = gram
        self.min_eigenvalue = min_eigenvalue


class FormMismatch(PhotonkitError):
    pass


class LightConeViolation(PhotonkitError):
    pass


class DerivativeUnstable(PhotonkitError):
    pass


class NotRadiationGauge(PhotonkitError):
    pass


class DegenerateStateError(PhotonkitError):
    pass


class SceneError(PhotonkitError, ValueError):
    pass
