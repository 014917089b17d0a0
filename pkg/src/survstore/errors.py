"""Domain error hierarchy.

Every raisable domain error carries a stable machine-readable ``code``
and the HTTP status class it maps to at the service boundary. Codes are
unique across the hierarchy (enforced by a test) so API clients can
switch on them.
"""

from __future__ import annotations

from typing import Any


class SurvStoreError(Exception):
    """Base for all domain errors."""

    code: str = "ERROR"
    http_status: int = 500

    def __init__(self, message: str, **details: Any):
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def to_payload(self) -> dict:
        payload: dict[str, Any] = {"code": self.code, "message": self.message}
        if self.details:
            payload["details"] = self.details
        return payload


# --- angles & units ---

class MalformedAngle(SurvStoreError):
    code = "MALFORMED_ANGLE"
    http_status = 422


class AngleOutOfRange(SurvStoreError):
    """DMS minutes or seconds outside [0, 60)."""
    code = "ANGLE_OUT_OF_RANGE"
    http_status = 422


class NonFiniteAngle(SurvStoreError):
    code = "NON_FINITE_ANGLE"
    http_status = 422


class NegativeArea(SurvStoreError):
    code = "NEGATIVE_AREA"
    http_status = 422


# --- computations ---

class InvalidCoordinate(SurvStoreError):
    code = "INVALID_COORDINATE"
    http_status = 422


class CoincidentPoints(SurvStoreError):
    code = "COINCIDENT_POINTS"
    http_status = 422


class TooFewVertices(SurvStoreError):
    code = "TOO_FEW_VERTICES"
    http_status = 422


class DegenerateEdge(SurvStoreError):
    code = "DEGENERATE_EDGE"
    http_status = 422


class EmptyObservations(SurvStoreError):
    code = "EMPTY_OBSERVATIONS"
    http_status = 422


class InvalidObservation(SurvStoreError):
    code = "INVALID_OBSERVATION"
    http_status = 422


class InvalidStationSetup(SurvStoreError):
    code = "INVALID_STATION_SETUP"
    http_status = 422


class DeflectionOutOfRange(SurvStoreError):
    code = "DEFLECTION_OUT_OF_RANGE"
    http_status = 422


class InconsistentRadiusLength(SurvStoreError):
    code = "INCONSISTENT_RADIUS_LENGTH"
    http_status = 422


class InvalidCurveInput(SurvStoreError):
    code = "INVALID_CURVE_INPUT"
    http_status = 422


class MalformedRow(SurvStoreError):
    code = "MALFORMED_ROW"
    http_status = 422


class NoBackSightFirst(SurvStoreError):
    code = "NO_BACKSIGHT_FIRST"
    http_status = 422


# --- registry & ledger ---

class NotFound(SurvStoreError):
    code = "NOT_FOUND"
    http_status = 404


class DuplicateName(SurvStoreError):
    code = "DUPLICATE_NAME"
    http_status = 409


class BadPhotoPath(SurvStoreError):
    code = "BAD_PHOTO_PATH"
    http_status = 422


class BadMediaPath(SurvStoreError):
    code = "BAD_MEDIA_PATH"
    http_status = 422


class UnknownInstrument(SurvStoreError):
    code = "UNKNOWN_INSTRUMENT"
    http_status = 422


class InsufficientStock(SurvStoreError):
    code = "INSUFFICIENT_STOCK"
    http_status = 409


class EmptyDetails(SurvStoreError):
    code = "EMPTY_DETAILS"
    http_status = 422


class AlreadyReturned(SurvStoreError):
    code = "ALREADY_RETURNED"
    http_status = 409


class AlreadyDeleted(SurvStoreError):
    code = "ALREADY_DELETED"
    http_status = 409


class NotDeleted(SurvStoreError):
    code = "NOT_DELETED"
    http_status = 409


class Deleted(SurvStoreError):
    """Operation attempted on a record sitting in the recycle bin."""
    code = "DELETED"
    http_status = 409


class WouldBreakConservation(SurvStoreError):
    code = "WOULD_BREAK_CONSERVATION"
    http_status = 409


class NegativeCount(SurvStoreError):
    code = "NEGATIVE_COUNT"
    http_status = 422


class InvalidRange(SurvStoreError):
    code = "INVALID_RANGE"
    http_status = 422


class InvalidRecord(SurvStoreError):
    code = "INVALID_RECORD"
    http_status = 422


class MalformedCsv(SurvStoreError):
    code = "MALFORMED_CSV"
    http_status = 422


# --- persistence & backup ---

class SchemaMismatch(SurvStoreError):
    code = "SCHEMA_MISMATCH"
    http_status = 500


class CorruptTable(SurvStoreError):
    code = "CORRUPT_TABLE"
    http_status = 500


class Inaccessible(SurvStoreError):
    code = "INACCESSIBLE"
    http_status = 500


class IoFailure(SurvStoreError):
    code = "IO_FAILURE"
    http_status = 500


class DigestMismatch(SurvStoreError):
    code = "DIGEST_MISMATCH"
    http_status = 422


class TargetNotEmpty(SurvStoreError):
    code = "TARGET_NOT_EMPTY"
    http_status = 409


class BadArchive(SurvStoreError):
    code = "BAD_ARCHIVE"
    http_status = 422


class NetworkUnreachable(SurvStoreError):
    code = "NETWORK_UNREACHABLE"
    http_status = 500


class RemoteRejected(SurvStoreError):
    code = "REMOTE_REJECTED"
    http_status = 500


class NoBackupUrl(SurvStoreError):
    code = "NO_BACKUP_URL"
    http_status = 422
