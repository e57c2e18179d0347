"""Exception types shared across the package."""


class DomainError(ValueError):
    """Input outside an operation's mathematical domain."""


class GimbalError(DomainError):
    """Pitch too close to +/-pi/2 for the Euler-rate map to be invertible."""


class InsideObstacleError(DomainError):
    """Vehicle reference point is inside an obstacle's conservative circle."""


class AxisVelocityError(DomainError):
    """Cylinder obstacle velocity has a component along the cylinder axis."""


class DegenerateConstraintError(ValueError):
    """Zero-normal constraint with a strictly positive right-hand side."""


class IterationLimitError(RuntimeError):
    """Active-set pivot cap exceeded; indicates a numerical problem."""


class NumericError(RuntimeError):
    """Integration produced a non-finite state."""


class ScenarioError(ValueError):
    """Base class for scenario-file problems."""


class ParseError(ScenarioError):
    """Scenario file is not readable JSON."""


class SchemaError(ScenarioError):
    """Scenario document has missing, unknown, or ill-typed keys."""


class SemanticError(ScenarioError):
    """Schema-valid scenario that is physically inconsistent."""
