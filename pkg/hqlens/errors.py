"""
Exception hierarchy shared by all pipeline stages.
"""

from __future__ import annotations


class HqlensError(Exception):
    """
    Base class for every error raised by hqlens.
    """


class TaxonomyError(HqlensError):
    """
    Taxonomy file could not be loaded.
    """


class TaxonomyParseError(TaxonomyError):
    """
    Taxonomy file is not well-formed.
    """


class TaxonomyValidationError(TaxonomyError):
    """
    Taxonomy file parsed but violates a structural invariant.
    """

    def __init__(self, offending_id: str, reason: str) -> None:
        """
        Build the error.

        Parameters
        ----------
        offending_id : str
            Category or indicator id that violates the invariant.
        reason : str
            Human-readable description.
        """
        super().__init__(f"{offending_id}: {reason}")
        self.offending_id = offending_id


class IngestError(HqlensError):
    """
    A platform export could not be read.
    """


class BackendUnavailableError(HqlensError):
    """
    Extraction backend could not be reached after all retries.
    """


class AuthError(HqlensError):
    """
    Remote model endpoint rejected the credentials.
    """


class MalformedResponseError(HqlensError):
    """
    Model output could not be turned into a valid extraction result.
    """

    def __init__(self, message: str, diagnostics: list[str] | None = None) -> None:
        """
        Build the error.

        Parameters
        ----------
        message : str
            Summary of the failure.
        diagnostics : list[str] | None
            Details, quoting the offending fragment.
        """
        super().__init__(message)
        self.diagnostics = list(diagnostics or [])


class MissingPredictionError(HqlensError):
    """
    Prediction file has no record for a requested entry.
    """

    def __init__(self, entry_id: str) -> None:
        """
        Build the error.

        Parameters
        ----------
        entry_id : str
            Entry id with no prediction.
        """
        super().__init__(f"no prediction for entry {entry_id!r}")
        self.entry_id = entry_id


class DegenerateMassError(HqlensError):
    """
    Weight normalization has zero total mass.
    """


class GeoError(HqlensError):
    """
    Community boundary file could not be loaded.
    """


class ConfigError(HqlensError):
    """
    Run configuration is invalid.
    """

    def __init__(self, field: str, reason: str) -> None:
        """
        Build the error.

        Parameters
        ----------
        field : str
            Dotted name of the offending configuration field.
        reason : str
            Human-readable description.
        """
        super().__init__(f"{field}: {reason}")
        self.field = field
        self.reason = reason


class StageError(HqlensError):
    """
    A pipeline stage failed.
    """

    def __init__(self, stage: str, reason: str) -> None:
        """
        Build the error.

        Parameters
        ----------
        stage : str
            Name of the failing stage.
        reason : str
            Human-readable description.
        """
        super().__init__(f"{stage}: {reason}")
        self.stage = stage
        self.reason = reason


class MissingArtifactError(StageError):
    """
    A stage ran before the artifact it depends on was written.
    """

    def __init__(self, stage: str, artifact: str) -> None:
        """
        Build the error.

        Parameters
        ----------
        stage : str
            Stage that needs the artifact.
        artifact : str
            File name of the missing artifact.
        """
        super().__init__(stage, f"missing upstream artifact {artifact}")
        self.artifact = artifact
