"""Error types shared by the library and the command line."""


class AlgebraError(ValueError):
    """Base class for domain errors. The CLI maps these to exit code 1."""


class NotUnimodular(AlgebraError):
    """A row (or epimorphism) has no Bezout witness."""


class Unsupported(AlgebraError):
    """The ring family has no solver for the requested operation."""


class NotInvertible(AlgebraError):
    """A determinant, Pfaffian or ring element that must be a unit is not."""


class SizeLimit(AlgebraError):
    """An input exceeds a hard size cap."""


class VerificationError(AlgebraError):
    """
    A certificate or a construction failed its own exact check.

    The CLI maps this to exit code 2.
    """
