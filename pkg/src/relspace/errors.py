"""Exception types shared across the package."""


class RelspaceError(Exception):
    """Base class for all errors raised by this package."""


# -- geometry ---------------------------------------------------------------

class UnknownObject(RelspaceError):
    """An object id does not resolve in the scene or catalog."""


class EmptyReferenceSet(RelspaceError):
    """A relation frame was requested for an empty reference set."""


# -- estimation -------------------------------------------------------------

class InsufficientSamples(RelspaceError):
    """Batch estimation requires at least two samples."""


class DegenerateDirections(RelspaceError):
    """All direction vectors cancel; no mean angle is defined."""


class EmptyAccumulator(RelspaceError):
    """Finalize was called on an accumulator that has seen no samples."""


# -- relation models --------------------------------------------------------

class RelationMismatch(RelspaceError):
    """A demonstration was fed to a model of a different relation."""


class EmptySampleSet(RelspaceError):
    """Batch update was called without any demonstrations."""


# -- grounding --------------------------------------------------------------

class GroundingError(RelspaceError):
    """Base class for command grounding failures."""


class NoRelationMatch(GroundingError):
    """No relation phrase was found in the command."""


class NoTargetMatch(GroundingError):
    """No object mention was found in the command."""


class InsufficientReferences(GroundingError):
    """The command mentions a target but no reference objects."""


class AmbiguousMatch(GroundingError):
    """Two different entities match the same or overlapping phrases."""


class ObjectNotInScene(GroundingError):
    """A mentioned object is known but not present in the current scene."""


# -- memory -----------------------------------------------------------------

class StorageFailure(RelspaceError):
    """A memory segment could not be persisted or read."""


class CorruptSnapshot(RelspaceError):
    """A snapshot failed its checksum verification."""


# -- baselines --------------------------------------------------------------

class DegenerateDirection(RelspaceError):
    """A baseline formula needs a direction but target and reference coincide."""


# -- harness ----------------------------------------------------------------

class InfeasibleGeneration(RelspaceError):
    """The synthetic demo generator exhausted its rejection budget."""


# -- service ----------------------------------------------------------------

class NoCommandContext(RelspaceError):
    """A demonstration cue arrived before any command was given."""
