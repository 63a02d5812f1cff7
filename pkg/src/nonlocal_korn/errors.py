"""Exception hierarchy shared by every module."""


class NonlocalKornError(ValueError):
    pass


class InvalidParameter(NonlocalKornError):
    pass


class ExcludedParameter(NonlocalKornError):
    """A parameter value lies in a range the underlying theorem excludes (ps = 1, s = 1/2, ...)."""


class DegeneratePair(NonlocalKornError):
    pass


class DomainError(NonlocalKornError):
    pass


class UnsupportedField(NonlocalKornError):
    pass


class BoundaryContact(NonlocalKornError):
    pass


class NullSeminorm(NonlocalKornError):
    pass
