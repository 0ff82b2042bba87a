"""CSV/JSON serialisation with round-trip float formatting and atomic writes."""

from __future__ import annotations

import hashlib
import json
import math
import os
import tempfile
from pathlib import Path

import numpy as np

__all__ = ["fmt", "csv_bytes", "json_bytes", "write_atomic", "commit", "sha256"]


def fmt(v) -> str:
    """Shortest decimal string that parses back to the same value."""
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return "" if math.isnan(v) else repr(v)
    return str(v)


def csv_bytes(header, columns) -> bytes:
    """Columns of equal length -> CSV text. Float arrays are converted with
    ``tolist`` first, which keeps full precision."""
    cols = [c.tolist() if isinstance(c, np.ndarray) else list(c) for c in columns]
    lines = [",".join(header)]
    lines.extend(",".join(fmt(v) for v in row) for row in zip(*cols))
    return ("\n".join(lines) + "\n").encode()


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return None if not math.isfinite(v) else v
    return obj


def json_bytes(obj) -> bytes:
    return (json.dumps(_clean(obj), indent=2, allow_nan=False) + "\n").encode()


def sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def write_atomic(path: Path, data: bytes):
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def commit(out_dir, artifacts: dict, manifest: dict) -> dict:
    """Write every artifact, then ``manifest.json`` with their hashes.

    Artifacts are fully built in memory before anything touches the disk, so
    a failed computation leaves the output directory as it was.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    hashes = {name: sha256(data) for name, data in sorted(artifacts.items())}
    manifest = dict(manifest, artifacts=hashes)
    for name, data in sorted(artifacts.items()):
        write_atomic(out / name, data)
    write_atomic(out / "manifest.json", json_bytes(manifest))
    return manifest
