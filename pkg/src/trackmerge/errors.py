"""Exception types shared across the package."""


class TrackmergeError(ValueError):
    """Base class for all rejected-input and data errors."""


class MaskError(TrackmergeError):
    """Malformed RLE mask or mismatched mask dimensions."""


class FlowError(TrackmergeError):
    """Bad .flo file or mismatched flow dimensions."""


class ManifestError(TrackmergeError):
    """Manifest schema violation; message names the offending field."""
