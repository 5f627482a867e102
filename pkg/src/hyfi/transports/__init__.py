from hyfi.transports.abstract_transport import AbstractTransport
from hyfi.transports.memory import MemoryTransport
from hyfi.transports.sqlite import SQLiteTransport

__all__ = ["AbstractTransport", "MemoryTransport", "SQLiteTransport"]
