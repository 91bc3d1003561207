"""Exception types shared across the package."""


class DytagError(Exception):
    """Base class for all package-specific errors."""


class EmptyGraph(DytagError):
    """Operation requires a graph with at least one edge."""


class SamplingExhausted(DytagError):
    """Negative-edge rejection sampling failed too many times in a row."""


class ParseError(DytagError):
    """Malformed dataset file.

    Carries the 1-based line number and, when known, the 1-based field index.
    """

    def __init__(self, message: str, line: int, field: int | None = None):
        self.line = line
        self.field = field
        where = f"line {line}" if field is None else f"line {line}, field {field}"
        super().__init__(f"{message} ({where})")


class DuplicateId(DytagError):
    """A text table contains the same id twice."""

    def __init__(self, dup_id: int):
        self.dup_id = dup_id
        super().__init__(f"duplicate id {dup_id}")


class DanglingReference(DytagError):
    """An edge references an entity or relation id absent from its table."""


class OutOfHorizon(DytagError):
    """Edge timestamp falls outside the observed range [0, T)."""


class DimMismatch(DytagError):
    """Vector/matrix dimensions do not line up."""


class FormatError(DytagError):
    """A binary or keyed-text artifact has a corrupt or unsupported header."""


class MissingKey(DytagError):
    """A file-backed embedding provider has no vector for a requested text.

    ``missing`` holds the lowercase-hex keys that were looked up and absent.
    """

    def __init__(self, missing: list[str]):
        self.missing = missing
        shown = ", ".join(missing[:8]) + (" ..." if len(missing) > 8 else "")
        super().__init__(f"{len(missing)} missing embedding key(s): {shown}")


class DegenerateMask(DytagError):
    """Every position of a loss target is masked; the mean is undefined."""


class DegenerateLabels(DytagError):
    """A metric needs both classes / more than one label and got fewer."""


class ConfigError(DytagError):
    """Invalid training or experiment configuration."""


class EmptyEvalSet(DytagError):
    """An evaluation subset (e.g. inductive) contains no edges."""
