from typing import Any, Optional, Sequence


class HyfiException(Exception):
    def __init__(self, message: str, exception: Optional[Exception] = None) -> None:
        super().__init__()
        self.message = message
        self.exception = exception

    def __str__(self) -> str:
        return f"{type(self).__name__}: {self.message}"


class DatasetException(HyfiException):
    def __init__(
        self, message: str, path: Any = None, exception: Optional[Exception] = None
    ) -> None:
        super().__init__(message=message, exception=exception)
        self.path = path


class InvalidHypergraphException(HyfiException):
    pass


class AugmentationException(HyfiException):
    pass


class DimensionMismatchException(HyfiException):
    pass


class NonFiniteException(HyfiException):
    def __init__(
        self, tensor_name: str, epoch: Optional[int] = None, message: str = ""
    ) -> None:
        where = f" at epoch {epoch}" if epoch is not None else ""
        super().__init__(
            message=message or f"non-finite values in '{tensor_name}'{where}"
        )
        self.tensor_name = tensor_name
        self.epoch = epoch


class ZeroNormEmbeddingException(HyfiException):
    def __init__(self, what: str, rows: Sequence[int]) -> None:
        rows = list(rows)
        shown = ", ".join(str(r) for r in rows[:10])
        more = f" (+{len(rows) - 10} more)" if len(rows) > 10 else ""
        super().__init__(
            message=(
                f"{what} has {len(rows)} zero-norm row(s): {shown}{more}. Cosine"
                " similarity is undefined; the encoder produced dead embeddings."
            )
        )
        self.rows = rows


class LossConfigurationException(HyfiException):
    pass


class WeakWeightException(HyfiException):
    pass


class SplitException(HyfiException):
    pass


class CheckpointException(HyfiException):
    def __init__(
        self,
        message: str,
        tensor_name: Optional[str] = None,
        exception: Optional[Exception] = None,
    ) -> None:
        super().__init__(message=message, exception=exception)
        self.tensor_name = tensor_name


class HyfiWarning(Warning):
    def __init__(self, *args: object) -> None:
        super().__init__(*args)
