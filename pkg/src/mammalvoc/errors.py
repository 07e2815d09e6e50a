"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument is outside the physically or numerically supported domain."""


class DurationCapError(DomainError):
    """A render was refused because it would exceed the duration cap."""


class UnknownPresetError(LookupError):
    """A preset name is not in the registry.

    Carries the sorted list of registered names so callers can show them.
    """

    def __init__(self, name, available):
        self.name = name
        self.available = sorted(available)
        super().__init__(
            f"unknown preset {name!r}; available: {', '.join(self.available)}"
        )


class WavFormatError(ValueError):
    """A WAV file could not be parsed or uses an unsupported layout."""
