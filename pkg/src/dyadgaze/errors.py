"""Typed errors and warnings raised across the pipeline.

Every failure mode surfaces as a subclass of DyadGazeError so callers can
map failures to exit codes / HTTP statuses without string matching.
"""

from __future__ import annotations


class DyadGazeError(Exception):
    """Base class for all pipeline errors."""


# -- gaze stream ---------------------------------------------------------

class EmptyStream(DyadGazeError):
    """Gaze stream contained no valid records."""


class NonMonotonicClock(DyadGazeError):
    """Device timestamps regressed beyond the 1 ms tolerance."""


# -- face CSV ------------------------------------------------------------

class FaceCsvError(DyadGazeError):
    """Face CSV is structurally broken (corrupt export is fatal)."""


class MissingColumn(FaceCsvError):
    """A required header column is absent."""


class RowArity(FaceCsvError):
    """A row's cell count does not match the header."""


# -- frame index ---------------------------------------------------------

class OverlappingPts(DyadGazeError):
    """Frame presentation spans overlap."""


class InconsistentDuration(DyadGazeError):
    """Frame durations vary by more than 1 microsecond."""


# -- session loading -----------------------------------------------------

class ManifestError(DyadGazeError):
    """Manifest unreadable, malformed, or references missing files."""


class ValidationError(DyadGazeError):
    """A cross-file bundle invariant is violated."""


class MismatchedSceneWarning(UserWarning):
    """More than 5% of face frames have landmarks outside the scene."""


# -- synchronization -----------------------------------------------------

class NegativeSpan(DyadGazeError):
    """Frame PTS end precedes the first frame's PTS end."""


class ZeroDuration(DyadGazeError):
    """Frame duration must be positive."""


class EmptySignals(DyadGazeError):
    """Clock map requires at least one sync signal."""


class NoOverlap(DyadGazeError):
    """Shifted recordings share no common frame range."""


class FrameDriftWarning(UserWarning):
    """PTS residual after frame rounding exceeds a quarter frame."""


# -- geometry ------------------------------------------------------------

class Degenerate(DyadGazeError):
    """Point set has no 2-D convex hull (collinear or too few points)."""


class NoFace(DyadGazeError):
    """Operation requires a successfully detected face."""


# -- filters -------------------------------------------------------------

class LengthMismatch(DyadGazeError):
    """Signals must cover the same number of frames."""


class UnknownAU(DyadGazeError):
    """Requested action unit is not present in the face data."""


class UnknownEmotion(DyadGazeError):
    """Emotion name is not in the emotion table."""


class UnknownParticipant(DyadGazeError):
    """Participant id does not exist in the session."""


class ExprSyntaxError(DyadGazeError):
    """Filter expression failed to parse.

    `position` is the 0-based character offset of the offending token.
    """

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class ExprTypeError(DyadGazeError):
    """Filter expression is grammatical but ill-typed."""


# -- synthesis -----------------------------------------------------------

class InvalidScript(DyadGazeError):
    """Session script violates its own constraints."""
