"""Exception hierarchy shared across the pipeline."""

from __future__ import annotations


class S4ForgeError(Exception):
    """Base class for all errors raised by this package."""


class SchemaError(S4ForgeError):
    """A snapshot field is missing, ill-typed, or unknown.

    Carries the JSON path of the offending field so harvester bugs are
    locatable without a debugger.
    """

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


class TreeError(S4ForgeError):
    """The node collection does not form a single rooted tree."""


class GeometryError(S4ForgeError):
    """A bounding box is inverted or otherwise malformed."""


class UnknownNode(S4ForgeError):
    """A node id was requested that does not exist in the snapshot."""


class EmptyPage(S4ForgeError):
    """Nothing visible survived cleaning (or the page never had a body)."""


class BadExtent(S4ForgeError):
    """Coordinate quantization against a non-positive extent."""


class VocabMissing(S4ForgeError):
    """An operation needing the token vocabulary ran without one loaded."""


class BadRect(S4ForgeError):
    """A render directive rectangle is degenerate after clipping."""


class DuplicateId(S4ForgeError):
    """Two manifest fragments claim the same sample id."""


class ConfigError(S4ForgeError):
    """Pipeline configuration is unusable."""


class EmptyCorpus(S4ForgeError):
    """The input directory holds no usable snapshots."""


class NoTaskPossible(S4ForgeError):
    """No task kind with positive weight is constructible on this page."""


class TaskSkip(S4ForgeError):
    """A task constructor cannot run on this page; sampling may redraw.

    Subclasses name the missing precondition. These are expected,
    per-page conditions, not pipeline failures.
    """


class NoRegion(TaskSkip):
    pass


class NoImage(TaskSkip):
    pass


class NoCaption(TaskSkip):
    pass


class NoTextNode(TaskSkip):
    pass


class NoGroundableElement(TaskSkip):
    pass


class NoGroup(TaskSkip):
    pass


class TooFewElements(TaskSkip):
    pass


class NoTable(TaskSkip):
    pass


class NoTitle(TaskSkip):
    pass


class NoLayout(TaskSkip):
    pass
