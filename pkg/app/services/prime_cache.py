"""File-backed cache of sieved prime tables."""

import logging
import struct
from pathlib import Path

import numpy as np

from app.core.arith import PrimeTable, sieve

logger = logging.getLogger(__name__)

MAGIC = b"ZBPT"
VERSION = 1
_HEADER = struct.Struct("<4sIQQ")


class PrimeCache:
    """Stores prime tables as delta-encoded binary files keyed by limit."""

    def __init__(self, storage_path: str | Path):
        """Initialize the cache.

        Args:
            storage_path: Directory holding the table files
        """
        self.storage_path = Path(storage_path)
        self.storage_path.mkdir(parents=True, exist_ok=True)
        logger.info("Prime cache initialized with storage at %s", self.storage_path)

    def _get_table_file(self, limit: int) -> Path:
        return self.storage_path / f"primes_{limit}.zbpt"

    def load(self, limit: int) -> PrimeTable | None:
        """Load the table for ``limit``.

        Returns:
            The table, or None on a miss, a version mismatch or a corrupt file
        """
        table_file = self._get_table_file(limit)
        if not table_file.exists():
            logger.debug("No cached prime table for limit %d", limit)
            return None

        try:
            data = table_file.read_bytes()
            magic, version, stored_limit, count = _HEADER.unpack_from(data)
            if magic != MAGIC or version != VERSION or stored_limit != limit:
                logger.warning("Discarding prime table %s with stale header", table_file)
                return None
            deltas = np.frombuffer(data, dtype="<u8", count=count, offset=_HEADER.size)
            primes = np.cumsum(deltas).astype(np.int64)
            logger.debug("Loaded %d primes up to %d", count, limit)
            return PrimeTable(limit=limit, primes=primes)
        except (struct.error, ValueError) as e:
            logger.error("Error loading prime table %s: %s", table_file, e)
            return None

    def save(self, table: PrimeTable) -> bool:
        """Save a table to disk.

        Returns:
            True if successful, False otherwise
        """
        table_file = self._get_table_file(table.limit)
        deltas = np.diff(table.primes, prepend=0).astype("<u8")
        tmp_file = table_file.with_suffix(".tmp")
        try:
            with tmp_file.open("wb") as f:
                f.write(_HEADER.pack(MAGIC, VERSION, table.limit, table.prime_count))
                f.write(deltas.tobytes())
            tmp_file.replace(table_file)
            logger.debug("Saved %d primes up to %d", table.prime_count, table.limit)
            return True
        except OSError as e:
            logger.error("Error saving prime table %s: %s", table_file, e)
            return False

    def get_or_build(self, limit: int) -> PrimeTable:
        """Return the cached table for ``limit``, sieving and storing it on a miss."""
        table = self.load(limit)
        if table is None:
            logger.info("Sieving primes up to %d", limit)
            table = sieve(limit)
            self.save(table)
        return table

    def clear(self, limit: int) -> bool:
        """Delete the table for ``limit``.

        Returns:
            True if a file was removed
        """
        table_file = self._get_table_file(limit)
        try:
            if table_file.exists():
                table_file.unlink()
                logger.info("Cleared prime table for limit %d", limit)
                return True
            return False
        except OSError as e:
            logger.error("Error clearing prime table %s: %s", table_file, e)
            return False
