"""Custom exception hierarchy for fgsynth error handling."""


class FgSynthException(Exception):
    """Base exception for all fgsynth errors."""

    exit_code = 1
    error_code = 'internal_error'

    def __init__(self, message, details=None):
        """Initialize fgsynth exception.

        Args:
            message: Human-readable error message
            details: Additional error details (dict)
        """
        super().__init__(message)
        self.message = message
        self.details = details or {}


class ContractViolationError(FgSynthException, ValueError):
    """A tensor or argument broke an operation's precondition."""

    exit_code = 2
    error_code = 'contract_violation'


class ConfigError(FgSynthException):
    """Configuration failed validation.

    ``details`` maps each offending key to its messages.
    """

    exit_code = 2
    error_code = 'config_error'


class GeneratorStateError(FgSynthException):
    """A network was used before the state it needs exists."""

    exit_code = 1
    error_code = 'state_error'


class NumericalError(FgSynthException):
    """A numerical routine met input outside its tolerance."""

    exit_code = 3
    error_code = 'numerical_error'


class TrainingAbortedError(NumericalError):
    """A loss became non-finite during training."""

    error_code = 'training_aborted'

    def __init__(self, loss_name, iteration, value=None):
        """Initialize training aborted error.

        Args:
            loss_name: Name of the loss term that went non-finite
            iteration: Iteration at which it happened
            value: Offending value (optional)
        """
        message = f"Non-finite loss '{loss_name}' at iteration {iteration}"
        details = {
            'loss_name': loss_name,
            'iteration': iteration,
            'value': None if value is None else str(value),
        }
        super().__init__(message, details)
        self.loss_name = loss_name
        self.iteration = iteration


class ResourceNotFoundError(FgSynthException):
    """A file or directory the command needs does not exist."""

    exit_code = 4
    error_code = 'resource_not_found'

    def __init__(self, resource_type, resource_id):
        """Initialize resource not found error.

        Args:
            resource_type: Type of resource (e.g., 'checkpoint', 'folder')
            resource_id: Path or identifier of the missing resource
        """
        message = f"{resource_type} not found: {resource_id}"
        details = {
            'resource_type': resource_type,
            'resource_id': str(resource_id)
        }
        super().__init__(message, details)


class DatasetError(FgSynthException):
    """Dataset is empty or inconsistent."""

    exit_code = 4
    error_code = 'dataset_error'


class CheckpointError(FgSynthException):
    """Checkpoint container is unreadable or of the wrong format."""

    exit_code = 4
    error_code = 'checkpoint_error'
