import os
import sqlite3
from contextlib import closing
from typing import Dict, List, Optional, Tuple

import ujson

from hyfi.core.helpers import path_provider
from hyfi.logging.exceptions import CheckpointException
from hyfi.transports.abstract_transport import AbstractTransport

_Row = Tuple[str, str, str, str, bytes]


class SQLiteTransport(AbstractTransport):
    """Checkpoint store in a single `<scope>.db` file.

    Tables: `tensors(name, shape, dtype, hash, content)` and `meta(key, value)`.
    Tensor writes are batched and flushed on `end_write` or when the batch
    outgrows `max_batch_size_mb`.
    """

    def __init__(
        self,
        base_path: Optional[str] = None,
        scope: Optional[str] = None,
        max_batch_size_mb: float = 10.0,
        name: str = "SQLite",
    ) -> None:
        super().__init__()
        self._name = name
        self.scope = scope or "checkpoint"
        self._base_path = base_path or self.get_base_path()
        self.max_size = int(max_batch_size_mb * 1000 * 1000)
        self.saved_tensor_count = 0
        self._current_batch: List[_Row] = []
        self._current_batch_size = 0
        self.__connection: Optional[sqlite3.Connection] = None

        try:
            os.makedirs(self._base_path, exist_ok=True)
            self._root_path = os.path.join(self._base_path, f"{self.scope}.db")
            self.__initialise()
        except Exception as ex:
            raise CheckpointException(
                f"SQLiteTransport could not initialise {self.scope}.db at"
                f" {self._base_path}. Either provide a different `base_path` or use an"
                " alternative transport.",
                exception=ex,
            ) from ex

    def __repr__(self) -> str:
        return f"SQLiteTransport(path: '{self._root_path}')"

    @property
    def name(self) -> str:
        return self._name

    @property
    def path(self) -> str:
        return self._root_path

    @staticmethod
    def get_base_path() -> str:
        return str(path_provider.runs_folder_path())

    def clear(self) -> None:
        """Drop the pending batch and empty both tables."""
        self._current_batch = []
        self._current_batch_size = 0
        self.__check_connection()
        try:
            with closing(self.__connection.cursor()) as c:
                c.execute("DELETE FROM tensors")
                c.execute("DELETE FROM meta")
                self.__connection.commit()
        except Exception as ex:
            raise CheckpointException(
                f"Could not clear {self._root_path}. Inner exception: {ex}",
                exception=ex,
            ) from ex

    def save_tensor(self, name: str, header: str, content: bytes) -> None:
        """
        Adds a tensor to the current batch to be written to the db.
        If the current batch is full,
        the batch is written to the db and the current batch is reset.
        """
        try:
            fields = ujson.loads(header)
            row = (
                name,
                ujson.dumps(fields["shape"]),
                fields["dtype"],
                fields["hash"],
                bytes(content),
            )
        except (ValueError, KeyError, TypeError) as ex:
            raise CheckpointException(
                f"malformed header for tensor '{name}'", tensor_name=name, exception=ex
            ) from ex
        size = len(content)
        self.saved_tensor_count += 1
        if not self._current_batch or self._current_batch_size + size < self.max_size:
            self._current_batch.append(row)
            self._current_batch_size += size
            return

        self.save_current_batch()
        self._current_batch = [row]
        self._current_batch_size = size

    def save_current_batch(self) -> None:
        """Save the current batch of tensors to the db"""
        self.__check_connection()
        try:
            with closing(self.__connection.cursor()) as c:
                c.executemany(
                    "INSERT OR REPLACE INTO tensors(name, shape, dtype, hash, content)"
                    " VALUES(?,?,?,?,?)",
                    self._current_batch,
                )
                self.__connection.commit()
        except Exception as ex:
            raise CheckpointException(
                f"Could not save the batch of tensors to {self._root_path}. Inner"
                f" exception: {ex}",
                exception=ex,
            ) from ex

    def get_tensor(self, name: str) -> Optional[Tuple[str, bytes]]:
        self.__check_connection()
        with closing(self.__connection.cursor()) as c:
            row = c.execute(
                "SELECT shape, dtype, hash, content FROM tensors WHERE name = ? LIMIT 1",
                (name,),
            ).fetchone()
        if not row:
            return None
        shape, dtype, digest, content = row
        try:
            header = ujson.dumps(
                {"shape": ujson.loads(shape), "dtype": dtype, "hash": digest}
            )
        except ValueError as ex:
            raise CheckpointException(
                f"tensor '{name}' has an unreadable shape column: {shape!r}",
                tensor_name=name,
                exception=ex,
            ) from ex
        return header, bytes(content)

    def has_tensors(self, names: List[str]) -> Dict[str, bool]:
        ret = {}
        self.__check_connection()
        with closing(self.__connection.cursor()) as c:
            for name in names:
                row = c.execute(
                    "SELECT 1 FROM tensors WHERE name = ? LIMIT 1", (name,)
                ).fetchone()
                ret[name] = bool(row)
        return ret

    def tensor_names(self) -> List[str]:
        self.__check_connection()
        with closing(self.__connection.cursor()) as c:
            rows = c.execute("SELECT name FROM tensors ORDER BY name").fetchall()
        return [row[0] for row in rows]

    def save_meta(self, key: str, value: str) -> None:
        self.__check_connection()
        with closing(self.__connection.cursor()) as c:
            c.execute(
                "INSERT OR REPLACE INTO meta(key, value) VALUES(?,?)", (key, value)
            )
            self.__connection.commit()

    def get_meta(self, key: str) -> Optional[str]:
        self.__check_connection()
        with closing(self.__connection.cursor()) as c:
            row = c.execute(
                "SELECT value FROM meta WHERE key = ? LIMIT 1", (key,)
            ).fetchone()
        return row[0] if row else None

    def begin_write(self) -> None:
        self.saved_tensor_count = 0

    def end_write(self) -> None:
        if self._current_batch:
            self.save_current_batch()
        self._current_batch = []
        self._current_batch_size = 0

    def close(self) -> None:
        """Close the connection to the database"""
        if self.__connection:
            self.__connection.close()
            self.__connection = None

    def __initialise(self) -> None:
        self.__connection = sqlite3.connect(self._root_path, check_same_thread=False)
        with closing(self.__connection.cursor()) as c:
            c.execute(
                """ CREATE TABLE IF NOT EXISTS tensors(
                      name TEXT PRIMARY KEY,
                      shape TEXT,
                      dtype TEXT,
                      hash TEXT,
                      content BLOB
                    ) WITHOUT ROWID;"""
            )
            c.execute(
                """ CREATE TABLE IF NOT EXISTS meta(
                      key TEXT PRIMARY KEY,
                      value TEXT
                    ) WITHOUT ROWID;"""
            )
            c.execute("PRAGMA temp_store=MEMORY;")
            self.__connection.commit()

    def __check_connection(self) -> None:
        if not self.__connection:
            self.__connection = sqlite3.connect(self._root_path, check_same_thread=False)

    def __del__(self) -> None:
        try:
            self.close()
        except Exception:
            pass
