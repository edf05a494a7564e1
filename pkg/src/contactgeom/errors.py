"""Exception types shared across the package."""


class ContactGeomError(Exception):
    """Base class for all errors raised by contactgeom."""


class OffSphere(ContactGeomError):
    """A point meant to lie on the unit 3-sphere deviates too far from unit norm."""

    def __init__(self, message, node=None):
        super().__init__(message)
        self.node = node


class NotTangent(ContactGeomError):
    """A vector tagged as tangent has a normal component above tolerance."""


class DegenerateParametrization(ContactGeomError):
    """The parameter derivatives fail to span a 2-plane (Gram determinant ~ 0)."""

    def __init__(self, message, node=None):
        super().__init__(message)
        self.node = node


class DegenerateContact(ContactGeomError):
    """The surface tangent plane coincides with the contact plane (e1 undefined)."""


class DegenerateMetric(ContactGeomError):
    """First fundamental form is not positive definite at some node."""


class StepTooLarge(ContactGeomError):
    """A flow step collapsed the parametrization."""


class AmplitudeTooLarge(ContactGeomError):
    """Perturbation amplitude outside the supported bracket."""


class RangeError(ContactGeomError):
    """Parameter outside the bracket an operation supports."""


class ParseError(ContactGeomError):
    """Malformed sample file; carries the 1-based line number when known."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class NotConverged(ContactGeomError):
    """Descent hit its iteration cap or stalled before reaching tolerance."""
