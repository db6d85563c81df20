"""Exception hierarchy shared by all modules."""


class GeometryError(Exception):
    """Base class for every error raised by lieminimal."""


class JetError(GeometryError):
    pass


class JetOrderError(JetError):
    """Requested derivative or construction beyond the supported order."""


class DivisionBySmallValue(JetError):
    pass


class DomainError(JetError):
    """sqrt/log (or similar) evaluated outside its real domain."""


class SpaceFormError(GeometryError):
    """Vector not unit or not tangent to the quadric."""


class DegenerateMetric(GeometryError):
    pass


class DegenerateFrame(GeometryError):
    pass


class UmbilicPoint(GeometryError):
    def __init__(self, message, location=None):
        super().__init__(message)
        self.location = location


class NotCurvatureLine(GeometryError):
    pass


class NotIsothermic(GeometryError):
    pass


class FocalDegeneracy(GeometryError):
    pass


class ProfileError(GeometryError):
    """Invalid profile curve (r <= 0, broken normalization, neck collapse)."""


class CodazziViolation(GeometryError):
    pass


class SupportError(GeometryError):
    """Bump support leaves the patch interior."""


class UnknownFixture(GeometryError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else ""


class ConfigError(GeometryError, ValueError):
    pass
