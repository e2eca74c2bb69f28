"""Exception types shared across the package."""


class ShapeError(ValueError):
    """Array dimensions do not match the declared grid layout."""


class ConfigError(ValueError):
    """Invalid simulation or algorithm configuration."""


class RankDeficientError(ValueError):
    """A per-tone channel matrix is numerically rank deficient."""


class FrameError(ValueError):
    """Bit/symbol sequence length inconsistent with the link configuration."""
