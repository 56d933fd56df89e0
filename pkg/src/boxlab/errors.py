"""Exception types shared across boxlab."""


class BoxlabError(Exception):
    """Base class for all boxlab errors."""


class DimensionError(BoxlabError, ValueError):
    """Objects built over different vertex counts were combined."""


class PreconditionError(BoxlabError, ValueError):
    """An operation was called outside its stated hypotheses."""


class StructuralError(BoxlabError, ValueError):
    """A tree or fortress is missing required entries."""


class FormatError(BoxlabError, ValueError):
    """A text file could not be parsed.

    ``lineno`` is 1-based, or None when the problem is not tied to a line.
    """

    def __init__(self, message, lineno=None, source=None):
        self.lineno = lineno
        self.source = source
        where = ""
        if source is not None:
            where += f"{source}:"
        if lineno is not None:
            where += f"{lineno}:"
        super().__init__(f"{where} {message}" if where else message)
