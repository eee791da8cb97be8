"""
Input validation for the command line and the count cache
"""
import logging
import re
from pathlib import Path
from typing import Optional, Union

from models.errors import CacheIOError, InvalidDescriptorError, ResourceCeilingError
from models.patterns import PatternSet

logger = logging.getLogger(__name__)


class InputValidator:
    """Validation helpers shared by the CLI and the cache"""

    CACHE_SUFFIX = '.jsonl'

    # Longest descriptor / permutation text accepted from the command line
    MAX_TEXT_LENGTH = 4096

    # Descriptor characters mapped to distinct filename-safe characters,
    # so canonical descriptors map to distinct file names.
    _FILENAME_MAP = {':': '_', ';': '+', ',': '.'}

    @staticmethod
    def sanitize_text_input(text: str, max_length: Optional[int] = None) -> str:
        """Trim a CLI text argument and reject control characters or excessive length"""
        if not isinstance(text, str):
            raise InvalidDescriptorError(f"Expected text, got {type(text).__name__}")
        max_length = max_length or InputValidator.MAX_TEXT_LENGTH
        text = text.strip()
        if len(text) > max_length:
            raise InvalidDescriptorError(f"Input longer than {max_length} characters")
        if re.search(r'[\x00-\x1f\x7f]', text):
            raise InvalidDescriptorError("Input contains control characters")
        return text

    @staticmethod
    def cache_filename(descriptor: str) -> str:
        """File name for a descriptor's cache file, e.g. 'Am:5:3' -> 'Am_5_3.jsonl'"""
        mapped = ''.join(InputValidator._FILENAME_MAP.get(ch, ch) for ch in descriptor)
        if not re.fullmatch(r'[A-Za-z0-9_+.\-]+', mapped) or mapped.startswith('.'):
            raise InvalidDescriptorError(f"Descriptor '{descriptor}' cannot be used as a cache key")
        return mapped + InputValidator.CACHE_SUFFIX

    @staticmethod
    def validate_cache_path(cache_dir: Union[str, Path], descriptor: str) -> Path:
        """
        Resolve the cache file for a descriptor and make sure it stays inside
        the cache directory.
        """
        base_path = Path(cache_dir).expanduser().resolve()
        requested_path = (base_path / InputValidator.cache_filename(descriptor)).resolve()
        try:
            requested_path.relative_to(base_path)
        except ValueError:
            raise CacheIOError(f"Cache path escapes the cache directory: {requested_path}")
        return requested_path

    @staticmethod
    def prepare_cache_dir(cache_dir: Union[str, Path]) -> Path:
        base_path = Path(cache_dir).expanduser().resolve()
        try:
            base_path.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise CacheIOError(f"Cannot create cache directory {base_path}: {e}") from e
        if not base_path.is_dir():
            raise CacheIOError(f"Cache path {base_path} is not a directory")
        return base_path


def ceiling_for(pattern_set: PatternSet, generic: int, a_family: int) -> int:
    return a_family if pattern_set.kind == 'A' else generic


def check_ceiling(n: int, pattern_set: PatternSet, generic: int, a_family: int,
                  force: bool = False) -> None:
    """
    Raises:
        ResourceCeilingError: n above the ceiling for this class and not forced
    """
    limit = ceiling_for(pattern_set, generic, a_family)
    if n <= limit:
        return
    if force:
        logger.warning("n=%d is above the ceiling %d for %s; continuing because it was forced",
                       n, limit, pattern_set.descriptor)
        return
    raise ResourceCeilingError(
        f"n={n} is above the ceiling {limit} for {pattern_set.descriptor} "
        f"(use --force-max-n to override)"
    )
