"""Shared exception and warning types."""


class ConfigError(ValueError):
    """Invalid configuration: bad bounds, uncovered horizon, malformed file."""


class ScheduleRangeError(ValueError):
    """Time point outside the span of a transmission-reduction schedule."""


class DegeneratePopulationError(ValueError):
    """Force of infection requested with non-positive effective population."""


class ArtifactFormatError(ValueError):
    """Artifact file has the wrong kind tag or an unsupported schema version."""


class DataIntegrityWarning(UserWarning):
    """Observed case data needed an automatic repair (e.g. running-max)."""


class ProvenanceMismatchWarning(UserWarning):
    """An artifact is being consumed with a provenance hash it was not built for."""
