"""Exception types shared across the package."""


class UnsupportedDimension(ValueError):
    """Operation only defined for specific (sub)space dimensions."""


class UnsupportedSmoothness(ValueError):
    """Operation needs a twice-differentiable support function."""


class SchemaError(ValueError):
    """Body document violates the schema; message carries the field path."""


class ConeViolation(ValueError):
    """Valuation coefficients lie outside the required convex cone."""
