"""On-disk cache of built designs."""
from __future__ import annotations

import hashlib
import json
import logging
from pathlib import Path
from typing import Optional

from ..algebra.ring import RingSpec
from ..config import CACHE_DIR
from .serialization import DesignFormatError, dumps, design_to_dict, load_design
from .structure import Design

logger = logging.getLogger(__name__)


class DesignCache:
    """Stores designs as canonical JSON keyed by (p, n, modulus, m).

    Designs are deterministic functions of the key, so entries never expire.
    """

    def __init__(self, cache_dir: Path = CACHE_DIR):
        self.cache_dir = Path(cache_dir)

    @staticmethod
    def key(ring: RingSpec) -> str:
        field = ring.field
        raw = json.dumps([field.p, field.n, list(field.modulus), ring.m])
        return hashlib.sha256(raw.encode('utf-8')).hexdigest()[:16]

    def get(self, ring: RingSpec) -> Optional[Design]:
        """Cached design for ring, or None if absent or unreadable."""
        cache_file = self._get_cache_file(ring)
        if not cache_file.exists():
            return None
        try:
            design = load_design(cache_file)
        except (DesignFormatError, OSError) as e:
            logger.warning(f"Discarding unreadable cache entry {cache_file.name}: {e}")
            cache_file.unlink(missing_ok=True)
            return None
        if design.ring != ring:
            return None
        logger.debug(f"Cache hit for {ring.describe()}")
        return design

    def set(self, design: Design) -> None:
        cache_file = self._get_cache_file(design.ring)
        try:
            self.cache_dir.mkdir(parents=True, exist_ok=True)
            cache_file.write_text(dumps(design_to_dict(design)), encoding='utf-8')
        except OSError as e:
            logger.warning(f"Could not cache design: {e}")

    def clear(self) -> None:
        for cache_file in self.cache_dir.glob('*.json'):
            cache_file.unlink(missing_ok=True)

    def _get_cache_file(self, ring: RingSpec) -> Path:
        return self.cache_dir / f"design_{self.key(ring)}.json"
