"""
Persistent count cache: one line-delimited JSON file per class descriptor,
each line {"class": <descriptor>, "n": <int>, "count": "<decimal>"}.
"""
import json
import logging
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Optional, Union

from app.validation import InputValidator
from models.errors import CacheIOError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CacheRecord:
    descriptor: str
    n: int
    count: int

    def __post_init__(self):
        if self.n < 0 or self.count < 0:
            raise ValueError(f"Negative cache entry {self}")

    def to_line(self) -> str:
        return json.dumps({'class': self.descriptor, 'n': self.n, 'count': str(self.count)})

    @classmethod
    def from_line(cls, line: str) -> 'CacheRecord':
        data = json.loads(line)
        count_text = data['count']
        if not isinstance(count_text, str) or not count_text.isdigit():
            raise ValueError(f"count must be a decimal string, got {count_text!r}")
        n = data['n']
        if not isinstance(n, int) or isinstance(n, bool):
            raise ValueError(f"n must be an integer, got {n!r}")
        return cls(descriptor=str(data['class']), n=n, count=int(count_text))


class CountCache:
    """
    Reads are served from memory after the first load of a descriptor's file;
    every write goes through one lock and is appended and flushed immediately.
    """

    def __init__(self, cache_dir: Union[str, Path]):
        self.cache_dir = InputValidator.prepare_cache_dir(cache_dir)
        self._counts: Dict[str, Dict[int, int]] = {}
        self._lock = threading.Lock()

    def path_for(self, descriptor: str) -> Path:
        return InputValidator.validate_cache_path(self.cache_dir, descriptor)

    def load(self, descriptor: str) -> Dict[int, int]:
        """All cached counts of a descriptor, keyed by n"""
        with self._lock:
            if descriptor not in self._counts:
                self._counts[descriptor] = self._read_file(descriptor)
            return dict(self._counts[descriptor])

    def _read_file(self, descriptor: str) -> Dict[int, int]:
        path = self.path_for(descriptor)
        counts: Dict[int, int] = {}
        if not path.exists():
            return counts
        try:
            lines = path.read_text().splitlines()
        except OSError as e:
            raise CacheIOError(f"Cannot read cache file {path}: {e}") from e

        for line_no, line in enumerate(lines, start=1):
            if not line.strip():
                continue
            try:
                record = CacheRecord.from_line(line)
            except (ValueError, KeyError, TypeError) as e:
                logger.warning("Skipping malformed line %d of %s: %s", line_no, path, e)
                continue
            if record.descriptor != descriptor:
                logger.warning("Skipping line %d of %s: class %s does not belong here",
                               line_no, path, record.descriptor)
                continue
            previous = counts.get(record.n)
            if previous is not None and previous != record.count:
                raise CacheIOError(
                    f"{path} holds conflicting counts for n={record.n}: {previous} and {record.count}"
                )
            counts[record.n] = record.count
        logger.debug("Loaded %d cached counts for %s", len(counts), descriptor)
        return counts

    def lookup(self, descriptor: str, n: int) -> Optional[int]:
        return self.load(descriptor).get(n)

    def record(self, descriptor: str, n: int, count: int):
        """Append (descriptor, n) unless it is already cached"""
        entry = CacheRecord(descriptor, n, count)
        self.load(descriptor)
        with self._lock:
            known = self._counts[descriptor]
            if n in known:
                if known[n] != count:
                    raise CacheIOError(
                        f"Refusing to overwrite cached count {known[n]} for {descriptor} n={n} with {count}"
                    )
                return
            path = self.path_for(descriptor)
            try:
                with open(path, 'a') as f:
                    f.write(entry.to_line() + '\n')
                    f.flush()
            except OSError as e:
                raise CacheIOError(f"Cannot write cache file {path}: {e}") from e
            known[n] = count
