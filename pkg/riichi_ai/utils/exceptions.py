"""Custom exception classes."""


class RiichiAIException(Exception):
    """Base exception for the riichi_ai system."""
    pass


class TileCountError(RiichiAIException):
    """Exception raised when a hand has the wrong number of effective tiles."""
    pass


class RoundFinishedError(RiichiAIException):
    """Exception raised when acting on a round that is already over."""
    pass


class InvalidSeatError(RiichiAIException):
    """Exception raised for a seat outside 0..3."""
    pass


class IllegalActionError(RiichiAIException):
    """Exception raised when apply_action receives an action outside the legal set."""

    def __init__(self, action, reason):
        self.action = action
        self.reason = reason
        super().__init__(f"Illegal action {action}: {reason}")


class NoYakuError(RiichiAIException):
    """Exception raised when a winning shape carries no yaku."""
    pass


class RuleConfigError(RiichiAIException):
    """Exception raised for malformed rule configuration files."""
    pass


class LayoutMismatchError(RiichiAIException):
    """Exception raised when feature planes and parameters disagree on layout."""
    pass


class EmptyLegalSetError(RiichiAIException):
    """Exception raised when a distribution is requested over no legal actions."""
    pass


class CheckpointError(RiichiAIException):
    """Exception raised for corrupt or incompatible checkpoint blobs."""
    pass


class VersionConflictError(RiichiAIException):
    """Exception raised when a parameter version does not increase."""
    pass


class StoreUnavailableError(RiichiAIException):
    """Exception raised when the parameter store has nothing to serve."""
    pass


class BufferNotReadyError(RiichiAIException):
    """Exception raised when sampling more trajectories than the buffer holds."""
    pass


class DatasetError(RiichiAIException):
    """Exception raised for empty datasets and label/mask conflicts."""
    pass


class TrainingDivergedError(RiichiAIException):
    """Exception raised when a training loss becomes non-finite."""

    def __init__(self, message, snapshot_path=None):
        self.snapshot_path = snapshot_path
        super().__init__(message)


class PoolInconsistencyError(RiichiAIException):
    """Exception raised when the unseen tile pool cannot be completed into a world."""
    pass


class ReplayLogError(RiichiAIException):
    """Exception raised for truncated or mismatched replay logs."""
    pass


class RankingTableError(RiichiAIException):
    """Exception raised for unknown levels or rooms."""
    pass


class ConfigurationError(RiichiAIException):
    """Exception raised for invalid runtime configuration."""
    pass
