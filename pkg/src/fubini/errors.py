"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class FubiniError(Exception):
    """Base class.  ``witness`` carries a counterexample when one is known."""

    def __init__(self, message: str = "", witness=None):
        super().__init__(message)
        self.witness = witness


class FormulaSyntaxError(FubiniError, ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class SortError(FubiniError, ValueError):
    pass


class SignatureMismatch(FubiniError):
    pass


class ArityMismatch(FubiniError):
    pass


class NotInBase(FubiniError):
    pass


# map validation
class NotFunctional(FubiniError):
    pass


class NotTotal(FubiniError):
    pass


class ImageEscapesCodomain(FubiniError):
    pass


# fibering validation and calculus
class InvalidFibering(FubiniError):
    pass


class MalformedFibering(InvalidFibering):
    pass


class NotInjective(InvalidFibering):
    pass


class ImageEscapesBase(InvalidFibering):
    pass


class NoParameterForFiber(InvalidFibering):
    pass


class UnsupportedDepth(FubiniError):
    """Refusal to decide, never a pass."""


class NotASubset(FubiniError):
    pass


class AmbientMismatch(FubiniError):
    pass


class MissingDesignatedConstants(FubiniError):
    pass


class EmptyCombine(FubiniError):
    pass


# measurement
class FiberNotMeasurable(FubiniError):
    pass


class SectionNotMeasurable(FubiniError):
    pass


class CodomainNotMeasurable(FubiniError):
    pass


class TooManyValues(FubiniError):
    pass


class Counterexample(FubiniError):
    pass


# input files
class ScenarioError(FubiniError, ValueError):
    """A scenario element that does not resolve or type-check; ``element`` names it."""

    def __init__(self, message: str, element: str = ""):
        super().__init__(f"{element}: {message}" if element else message, {"element": element})
        self.element = element
