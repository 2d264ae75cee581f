"""Typed errors and warning categories shared across the toolkit."""

import re

_CAMEL = re.compile(r"(?<=[a-z0-9])(?=[A-Z])")


class GaitError(Exception):
    """Base class for every toolkit error.

    ``code`` is a stable machine-readable identifier derived from the class
    name; ``exit_code`` is the CLI process exit category (2 data, 3 I/O).
    """

    exit_code = 2

    @property
    def code(self) -> str:
        return _CAMEL.sub("_", type(self).__name__).lower()

    def __str__(self) -> str:
        detail = super().__str__()
        return detail if detail else self.code


class DataWarning(UserWarning):
    """Non-fatal data quirk (skipped variable, unknown unit, fallback)."""


# --- binary capture formats ---------------------------------------------

class MagicMismatch(GaitError):
    pass


class UnsupportedProcessor(GaitError):
    pass


class TruncatedData(GaitError):
    pass


class ParameterCorrupt(GaitError):
    pass


class CapacityExceeded(GaitError):
    pass


class HeaderMalformed(GaitError):
    pass


class MarkerCountMismatch(GaitError):
    pass


class NonUniformTime(GaitError):
    pass


class NotLevel5(GaitError):
    pass


class EndianUnsupported(GaitError):
    pass


class ElementCorrupt(GaitError):
    pass


# --- canonical tables ----------------------------------------------------

class SchemaMismatch(GaitError):
    pass


class RaggedRow(GaitError):
    pass


class NonMonotonicTime(GaitError):
    pass


# --- signal preparation --------------------------------------------------

class CutoffAboveNyquist(GaitError):
    pass


class MissingValuesPresent(GaitError):
    pass


class TooFewSamples(GaitError):
    pass


class AllMissingChannel(GaitError):
    pass


class TooSparse(GaitError):
    pass


# --- gait features -------------------------------------------------------

class MissingForceChannels(GaitError):
    pass


class NoContactsFound(GaitError):
    pass


class BodyWeightUnknown(GaitError):
    pass


class MarkerMissing(GaitError):
    pass


class InsufficientCycles(GaitError):
    pass


class CycleOutOfRange(GaitError):
    pass


class ChannelMissing(GaitError):
    pass


# --- ensemble statistics -------------------------------------------------

class EmptyEnsemble(GaitError):
    pass


class LengthMismatch(GaitError):
    pass


class EmptyInput(GaitError):
    pass


class EmptyGroupA(GaitError):
    pass


# --- trial store ---------------------------------------------------------

class PathInvalid(GaitError):
    pass


class ValidationFailed(GaitError):
    pass


class IoFailure(GaitError):
    exit_code = 3


class NotFound(GaitError):
    exit_code = 3


class CorruptFile(GaitError):
    exit_code = 3


# --- service -------------------------------------------------------------

class MissingEvents(GaitError):
    pass


class InsufficientData(GaitError):
    pass


class NoVideo(GaitError):
    exit_code = 3


class RangeNotSatisfiable(GaitError):
    pass
