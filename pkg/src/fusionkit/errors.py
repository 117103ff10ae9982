class ConfigError(ValueError):
    """Bad input: malformed files, unsupported parameters, inconsistent arguments."""


class ResourceError(RuntimeError):
    """A configured size or work budget would be exceeded."""
