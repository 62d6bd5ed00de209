"""Exception types shared across the package."""


class TreeFormKitError(Exception):
    """Base class for all package errors."""


class ParseError(TreeFormKitError):
    """Input is not well-formed JSON.

    ``offset`` is the byte offset into the raw input where decoding failed.
    """

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset


class SchemaError(TreeFormKitError):
    """Input is valid JSON but does not match the expected schema.

    ``path`` names the offending field, e.g. ``form[3].linking``.
    """

    def __init__(self, message: str, path: str = ""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


class ConfigError(TreeFormKitError):
    """Invalid configuration value."""


class EmptyCorpusError(TreeFormKitError):
    """Aggregation requested over zero documents."""


class EmptyTreeError(TreeFormKitError):
    """Normalized tree-edit distance against an empty ground-truth tree."""
