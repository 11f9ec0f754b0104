"""Exception types shared across the package."""


class MagheatError(Exception):
    """Base class of all package-specific failures."""


class PresetError(MagheatError, ValueError):
    """Invalid field preset tag or preset parameters."""


class QuadratureError(MagheatError, RuntimeError):
    """Adaptive quadrature failed to reach the requested tolerance."""


class ResolutionCapError(MagheatError, ValueError):
    """Requested self-similar time exceeds what the grid can resolve."""


class SolverConvergenceError(MagheatError, RuntimeError):
    """Eigensolver or linear solver failed to converge."""


class BoundaryContaminationError(MagheatError, RuntimeError):
    """Evolved solution reached the truncated domain boundary."""


class FrameMapError(MagheatError, ValueError):
    """Change of space-time frame would push the state off the target grid."""


class ConfigError(MagheatError, ValueError):
    """Experiment configuration failed validation."""
