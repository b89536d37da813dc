class QDesignError(ValueError):
    """Base class for invalid-input errors raised by this package."""
