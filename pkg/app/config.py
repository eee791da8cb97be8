"""
Command-line configuration and logging setup
"""
import logging
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Optional

from models.errors import PreconditionError

OUTPUT_FORMATS = ('json', 'csv', 'text')
CACHE_ENV_VAR = 'PAVANE_CACHE'

LOG_FORMAT = '%(asctime)s %(levelname)s %(name)s: %(message)s'


@dataclass(frozen=True)
class CliConfig:
    cache_dir: Optional[Path] = None
    output_format: str = 'json'
    max_n: Optional[int] = None
    force_max_n: bool = False
    jobs: int = 1
    verbosity: int = 0

    def __post_init__(self):
        if self.output_format not in OUTPUT_FORMATS:
            raise PreconditionError(
                f"Output format must be one of {', '.join(OUTPUT_FORMATS)}, got '{self.output_format}'"
            )
        if self.max_n is not None and self.max_n < 0:
            raise PreconditionError(f"max n must be >= 0, got {self.max_n}")
        if self.jobs == 0:
            raise PreconditionError("--jobs must be a positive count or negative (joblib style), not 0")

    @classmethod
    def from_args(cls, args, environ: Optional[Mapping[str, str]] = None) -> 'CliConfig':
        """Build from parsed arguments; the cache directory falls back to $PAVANE_CACHE"""
        environ = os.environ if environ is None else environ
        cache = getattr(args, 'cache', None) or environ.get(CACHE_ENV_VAR) or None
        return cls(
            cache_dir=Path(cache) if cache else None,
            output_format=getattr(args, 'format', 'json'),
            max_n=getattr(args, 'ceiling', None),
            force_max_n=getattr(args, 'force_max_n', False),
            jobs=getattr(args, 'jobs', 1),
            verbosity=getattr(args, 'verbose', 0),
        )


def setup_logging(verbosity: int = 0, stream=None):
    """WARNING by default, INFO with -v, DEBUG with -vv; always to stderr"""
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity >= 2:
        level = logging.DEBUG

    root = logging.getLogger()
    for handler in list(root.handlers):
        if getattr(handler, '_pavane', False):
            root.removeHandler(handler)
    handler = logging.StreamHandler(stream or sys.stderr)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    handler._pavane = True
    root.addHandler(handler)
    root.setLevel(level)
