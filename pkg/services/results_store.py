import hashlib
import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

import pandas as pd

from config import EXPERIMENTS_PATH, LIBRARY_VERSION, SOLUTIONS_PATH
from models import Provenance

logger = logging.getLogger(__name__)


class ResultsStore:
    """
    Writes result artifacts with content addressing: every artifact is
    identified by the SHA-256 digest of its bytes, and artifacts written
    without an explicit path are named after that digest.
    """

    def __init__(self, solutions_path: Path = SOLUTIONS_PATH, experiments_path: Path = EXPERIMENTS_PATH):
        self.solutions_path = solutions_path
        self.experiments_path = experiments_path

    def compute_digest(self, data_bytes: bytes) -> str:
        """SHA-256 hex digest of an artifact"""
        return hashlib.sha256(data_bytes).hexdigest()

    def config_hash(self, payload: Dict[str, Any]) -> str:
        """Digest of the canonical JSON of a validated configuration"""
        canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"), default=str)
        return self.compute_digest(canonical.encode("utf-8"))

    def provenance(
        self, payload: Dict[str, Any], seed: Optional[int], multiplicity_convention: str
    ) -> Provenance:
        return Provenance(
            config_hash=self.config_hash(payload),
            seed=seed,
            library_version=LIBRARY_VERSION,
            multiplicity_convention=multiplicity_convention,
        )

    def _store(self, data_bytes: bytes, path: Optional[Path], directory: Path, suffix: str) -> Tuple[Path, str]:
        digest = self.compute_digest(data_bytes)
        if path is None:
            path = directory / f"{digest}{suffix}"
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "wb") as f:
            f.write(data_bytes)
        logger.info("wrote %s (sha256 %s)", path, digest)
        return path, digest

    def write_json(self, record: Dict[str, Any], path: Optional[Path] = None) -> Tuple[Path, str]:
        """Store a JSON record; returns its path and digest"""
        text = json.dumps(record, indent=2, default=str) + "\n"
        return self._store(text.encode("utf-8"), path, self.solutions_path, ".json")

    def write_csv(self, frame: pd.DataFrame, path: Optional[Path] = None) -> Tuple[Path, str]:
        """Store a table with 17 significant digits per real"""
        text = frame.to_csv(index=False, float_format="%.17g", lineterminator="\n")
        return self._store(text.encode("utf-8"), path, self.experiments_path, ".csv")

    def verify_integrity(self, path: Path, digest: str) -> bool:
        """Recompute the digest of a stored artifact"""
        path = Path(path)
        if not path.exists():
            return False
        return self.compute_digest(path.read_bytes()) == digest


# Global instance
results_store = ResultsStore()
