"""Exception and warning types raised by innovgeo."""


class InnovGeoError(Exception):
    """Base class for all package errors."""


class ParameterError(InnovGeoError, ValueError):
    """A model parameter lies outside its admissible range."""

    def __init__(self, field: str, message: str):
        super().__init__(message)
        self.field = field


class DomainError(InnovGeoError, ValueError):
    pass


class SpecMismatch(InnovGeoError, TypeError):
    """The requested route is not available for this innovation spec."""


class AsymptoteError(InnovGeoError, ZeroDivisionError):
    """lambda*(z) evaluated on its vertical asymptote b = b_hat."""


class InvalidEquilibrium(InnovGeoError, ValueError):
    pass


class NotABreakPoint(InnovGeoError, ValueError):
    pass


class Unclassified(InnovGeoError):
    """No taxonomy entry matches the regime sequence of a diagram."""

    def __init__(self, regimes):
        super().__init__(f"no scenario matches regime sequence {list(regimes)}")
        self.regimes = list(regimes)


class GridTooCoarse(UserWarning):
    pass


class LinkingAmbiguity(UserWarning):
    pass
