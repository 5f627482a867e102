from typing import Dict, List, Optional, Tuple

from hyfi.transports.abstract_transport import AbstractTransport


class MemoryTransport(AbstractTransport):
    def __init__(self, name="Memory") -> None:
        super().__init__()
        self._name = name
        self.tensors: Dict[str, Tuple[str, bytes]] = {}
        self.meta: Dict[str, str] = {}
        self.saved_tensor_count = 0

    @property
    def name(self) -> str:
        return self._name

    def __repr__(self) -> str:
        return f"MemoryTransport(tensors: {len(self.tensors)})"

    def clear(self) -> None:
        self.tensors.clear()
        self.meta.clear()

    def save_tensor(self, name: str, header: str, content: bytes) -> None:
        self.tensors[name] = (header, content)
        self.saved_tensor_count += 1

    def get_tensor(self, name: str) -> Optional[Tuple[str, bytes]]:
        return self.tensors.get(name)

    def has_tensors(self, names: List[str]) -> Dict[str, bool]:
        return {name: (name in self.tensors) for name in names}

    def tensor_names(self) -> List[str]:
        return sorted(self.tensors)

    def save_meta(self, key: str, value: str) -> None:
        self.meta[key] = value

    def get_meta(self, key: str) -> Optional[str]:
        return self.meta.get(key)

    def begin_write(self) -> None:
        self.saved_tensor_count = 0

    def end_write(self) -> None:
        pass
