"""
Pickle-based caching ("stubs") of expensive ensemble results.

A stub is keyed by a digest of the configuration document that produced it,
so a cached ensemble is re-read only by a run that would recompute exactly
the same numbers.
"""

import hashlib
import logging
import os
import pickle

logger = logging.getLogger(__name__)


def config_digest(document, label=""):
    """Short SHA-256 digest of a serialised configuration plus a label."""
    return hashlib.sha256(f"{label}\n{document}".encode("utf-8")).hexdigest()[:16]


def stub_file(stub_path, kind, label, digest):
    """``<stub_path>/<kind>-<label>-<digest>.pkl``, or ``None`` without a stub directory."""
    if not stub_path:
        return None
    return os.path.join(stub_path, f"{kind}-{label}-{digest}.pkl")


def read_stub(read_from_stub, stub_path):
    """Load a cached result.

    Returns ``None`` when reading is disabled, no path is given or the file
    does not exist yet.
    """
    if not read_from_stub:
        return None
    if stub_path is None or not os.path.exists(stub_path):
        return None

    with open(stub_path, "rb") as f:
        data = pickle.load(f)
    logger.debug("read stub %s", stub_path)
    return data


def save_stub(stub_path, data):
    """Persist ``data``; parent directories are created. ``None`` skips."""
    if stub_path is None:
        return

    os.makedirs(os.path.dirname(stub_path) or ".", exist_ok=True)
    with open(stub_path, "wb") as f:
        pickle.dump(data, f)
    logger.debug("saved stub %s", stub_path)


def cached(stub_path, compute):
    """Return the stub at ``stub_path`` if present, else compute and save it."""
    data = read_stub(True, stub_path)
    if data is None:
        data = compute()
        save_stub(stub_path, data)
    return data
