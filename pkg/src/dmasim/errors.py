class ConfigurationError(ValueError):
    """Raised when a layout or experiment configuration is inconsistent."""


class ChannelFileError(ValueError):
    """Raised when a channel file cannot be parsed or does not match the layout."""
