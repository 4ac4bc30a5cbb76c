"""Reproducible random streams and campaign identifiers.

Every random stream in a campaign is keyed by a small JSON context (seed,
role, node index, purpose) hashed with SHA-256. The resulting streams do not
depend on the order in which work units run, so campaigns come out the same
under any degree of parallelism.
"""

import hashlib
import json
from pathlib import Path

import numpy as np
from platformdirs import user_cache_dir

__all__ = (
    "get_campaign_path",
    "generate_campaign_id",
    "stream_key",
    "stream_rng",
)


def get_campaign_path() -> Path:
    """Get the directory for storing campaign outputs"""
    base_dir = Path(user_cache_dir("crelay"))
    base_dir.mkdir(parents=True, exist_ok=True)
    return base_dir


def _digest(context: dict) -> str:
    context_str = json.dumps(context, sort_keys=True)
    return hashlib.sha256(context_str.encode()).hexdigest()


def generate_campaign_id(context: dict) -> str:
    """Generate a unique identifier for a campaign from its flattened config"""
    return _digest(context)[:16]


def stream_key(seed: int, *labels: str | int) -> int:
    """128-bit entropy for the stream addressed by ``seed`` and ``labels``"""
    return int(_digest({"seed": seed, "labels": list(labels)})[:32], 16)


def stream_rng(seed: int, *labels: str | int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(stream_key(seed, *labels)))
