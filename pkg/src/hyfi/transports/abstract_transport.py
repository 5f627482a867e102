from abc import ABC, abstractmethod
from typing import Dict, List, Optional, Tuple


class AbstractTransport(ABC):
    """Where checkpoint tensors and their metadata are kept.

    A stored tensor is a tuple `(header, content)`: `header` is the ujson
    document describing shape, dtype and hash, `content` the raw bytes.
    """

    @property
    @abstractmethod
    def name(self):
        pass

    @abstractmethod
    def begin_write(self) -> None:
        """Optional: signals to the transport that writes are about to begin."""
        pass

    @abstractmethod
    def end_write(self) -> None:
        """
        Optional: signals to the transport that no more items will need to be written.
        """
        pass

    @abstractmethod
    def clear(self) -> None:
        """Removes every stored tensor and metadata entry."""
        pass

    @abstractmethod
    def save_tensor(self, name: str, header: str, content: bytes) -> None:
        """Saves (or replaces) the named tensor.

        Arguments:
            name {str} -- the parameter name, eg `encoder.0.edge_weight`
            header {str} -- serialized shape / dtype / hash
            content {bytes} -- the raw tensor bytes
        """
        pass

    @abstractmethod
    def get_tensor(self, name: str) -> Optional[Tuple[str, bytes]]:
        """Gets a tensor. Returns `None` if the tensor is not found."""
        pass

    @abstractmethod
    def has_tensors(self, names: List[str]) -> Dict[str, bool]:
        """Checks the presence of multiple tensors.

        Returns:
            Dict[str, bool] -- keys: input names, values:
                whether the transport has that tensor
        """
        pass

    @abstractmethod
    def tensor_names(self) -> List[str]:
        pass

    @abstractmethod
    def save_meta(self, key: str, value: str) -> None:
        pass

    @abstractmethod
    def get_meta(self, key: str) -> Optional[str]:
        pass
