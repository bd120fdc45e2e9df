"""Content-addressed store for computed return sets.

Entries are keyed by the sha256 of a canonical system fingerprint (group,
rotation, starting point, set, polynomial, window).  Each entry is an RTS
file plus a sidecar holding the file checksum and the fingerprint; a
checksum mismatch or unparsable file is treated as a miss and the entry
is recomputed, with a warning.
"""

from __future__ import annotations

import hashlib
import os
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional

from .orbits import ReturnSet


def cache_key(fingerprint: str) -> str:
    """Stable hex name for a system fingerprint."""
    return hashlib.sha256(fingerprint.encode("utf-8")).hexdigest()


def _entry_paths(cache_dir: Path, key: str) -> tuple[Path, Path]:
    return cache_dir / f"{key}.rts", cache_dir / f"{key}.sha256"


def _file_digest(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def cache_lookup(cache_dir, fingerprint: str) -> Optional[ReturnSet]:
    """Return the stored set for this fingerprint, or None.

    Corrupt entries (checksum mismatch, truncated or unparsable file,
    missing sidecar) are removed and reported as a miss with a warning.
    """
    cache_dir = Path(cache_dir)
    key = cache_key(fingerprint)
    rts_path, sum_path = _entry_paths(cache_dir, key)
    if not rts_path.exists():
        return None
    if not sum_path.exists():
        warnings.warn(f"cache entry {key} has no checksum sidecar; recomputing")
        rts_path.unlink(missing_ok=True)
        return None
    recorded = sum_path.read_text(encoding="utf-8").splitlines()[0].strip()
    if _file_digest(rts_path) != recorded:
        warnings.warn(f"cache entry {key} failed its checksum; recomputing")
        rts_path.unlink(missing_ok=True)
        sum_path.unlink(missing_ok=True)
        return None
    try:
        return ReturnSet.load(rts_path)
    except (ValueError, OSError) as e:
        warnings.warn(f"cache entry {key} unreadable ({e}); recomputing")
        rts_path.unlink(missing_ok=True)
        sum_path.unlink(missing_ok=True)
        return None


def cache_store(cache_dir, fingerprint: str, rs: ReturnSet) -> Path:
    """Write an entry atomically; returns the RTS path."""
    cache_dir = Path(cache_dir)
    cache_dir.mkdir(parents=True, exist_ok=True)
    key = cache_key(fingerprint)
    rts_path, sum_path = _entry_paths(cache_dir, key)
    tmp = rts_path.with_suffix(".rts.tmp")
    tmp.write_text(rs.to_text(), encoding="utf-8")
    os.replace(tmp, rts_path)
    digest = _file_digest(rts_path)
    tmp2 = sum_path.with_suffix(".sha256.tmp")
    tmp2.write_text(f"{digest}\n{fingerprint}\n", encoding="utf-8")
    os.replace(tmp2, sum_path)
    return rts_path


def cached_return_set(
    cache_dir, fingerprint: str, compute: Callable[[], ReturnSet]
) -> tuple[ReturnSet, str]:
    """Lookup-or-compute; returns (set, 'hit' | 'miss').

    A None cache_dir disables caching entirely.
    """
    if cache_dir is None:
        return compute(), "miss"
    hit = cache_lookup(cache_dir, fingerprint)
    if hit is not None:
        return hit, "hit"
    rs = compute()
    cache_store(cache_dir, fingerprint, rs)
    return rs, "miss"


@dataclass(frozen=True)
class GcReport:
    """Outcome of a cache sweep."""

    checked: int
    kept: int
    corrupt_removed: int
    orphans_removed: int
    bytes_freed: int


def cache_gc(cache_dir) -> GcReport:
    """Validate every entry; drop corrupt pairs and orphaned halves."""
    cache_dir = Path(cache_dir)
    if not cache_dir.is_dir():
        return GcReport(0, 0, 0, 0, 0)
    rts_files = {p.stem: p for p in cache_dir.glob("*.rts")}
    sum_files = {p.stem: p for p in cache_dir.glob("*.sha256")}
    checked = kept = corrupt = orphans = freed = 0
    for stem in sorted(set(rts_files) | set(sum_files)):
        rts_path = rts_files.get(stem)
        sum_path = sum_files.get(stem)
        if rts_path is None or sum_path is None:
            present = rts_path or sum_path
            freed += present.stat().st_size
            present.unlink()
            orphans += 1
            continue
        checked += 1
        recorded = sum_path.read_text(encoding="utf-8").splitlines()[0].strip()
        ok = _file_digest(rts_path) == recorded
        if ok:
            try:
                ReturnSet.load(rts_path)
            except (ValueError, OSError):
                ok = False
        if ok:
            kept += 1
        else:
            freed += rts_path.stat().st_size + sum_path.stat().st_size
            rts_path.unlink()
            sum_path.unlink()
            corrupt += 1
    for leftover in cache_dir.glob("*.tmp"):
        freed += leftover.stat().st_size
        leftover.unlink()
        orphans += 1
    return GcReport(checked, kept, corrupt, orphans, freed)
