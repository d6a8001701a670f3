"""Append-only persistent store for point counts.

One JSON record per line: {"surface": hex-hash, "p": P, "r": R,
"count": N}, with N serialized as a decimal string when it exceeds 53-bit
JSON safety.  Loading deduplicates identical records and rejects
conflicting counts for the same key as corruption.  Meta events share the
stream: {"meta": "verify", "verified": true} marks the store as having
passed a verification pass; until then the cache serves counts but is not
authoritative.

Writes go through a single append per record, so several processes may
share a file as long as at most one writes a given (surface, p, r) key.
"""

import json
import os
from .count import CountRecord
from .errors import DataError, IntegrityError

_BIG = 2 ** 53  # JSON number safety line


def _encode_count(n: int):
    return str(n) if abs(n) >= _BIG else n


def _decode_count(v, where: str) -> int:
    if isinstance(v, bool):
        raise DataError(f"{where}: count must be an integer")
    if isinstance(v, int):
        return v
    if isinstance(v, str):
        try:
            return int(v, 10)
        except ValueError:
            raise DataError(f"{where}: unparsable count {v!r}") from None
    raise DataError(f"{where}: count must be an integer or decimal string")


class CountCache:
    """In-memory index over an optional append-only LDJSON file."""

    def __init__(self, path=None):
        self.path = os.fspath(path) if path is not None else None
        self._store = {}
        self._verified = False
        self.hits = 0
        self.misses = 0
        if self.path and os.path.exists(self.path):
            self._load()

    def _load(self):
        with open(self.path, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                where = f"{self.path}:{lineno}"
                try:
                    obj = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise DataError(f"{where}: invalid JSON: {exc}") from None
                if not isinstance(obj, dict):
                    raise DataError(f"{where}: record must be an object")
                if "meta" in obj:
                    if obj.get("verified"):
                        self._verified = True
                    continue
                try:
                    key = (obj["surface"], int(obj["p"]), int(obj["r"]))
                except (KeyError, TypeError, ValueError):
                    raise DataError(f"{where}: record needs surface/p/r/count "
                                    f"fields") from None
                count = _decode_count(obj.get("count"), where)
                if key in self._store and self._store[key] != count:
                    raise IntegrityError(
                        f"{where}: conflicting counts for {key}: "
                        f"{self._store[key]} vs {count}")
                self._store[key] = count

    def _append(self, obj) -> None:
        if self.path is None:
            return
        parent = os.path.dirname(self.path)
        if parent:
            os.makedirs(parent, exist_ok=True)
        with open(self.path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(obj, sort_keys=True) + "\n")

    def lookup(self, surface: str, p: int, r: int):
        """Stored count or None; tallies hit/miss statistics."""
        val = self._store.get((surface, p, r))
        if val is None:
            self.misses += 1
        else:
            self.hits += 1
        return val

    def record(self, surface: str, p: int, r: int, count: int) -> None:
        key = (surface, p, r)
        existing = self._store.get(key)
        if existing is not None:
            if existing != count:
                raise IntegrityError(
                    f"conflicting counts for {key}: cached {existing}, "
                    f"recording {count}")
            return  # benign duplicate, nothing to append
        self._store[key] = count
        self._append({"surface": surface, "p": p, "r": r,
                      "count": _encode_count(count)})

    def mark_verified(self, note: str = "") -> None:
        """Record a verification pass; thereafter the cache is
        authoritative for the keys it holds."""
        self._verified = True
        event = {"meta": "verify", "verified": True}
        if note:
            event["note"] = note
        self._append(event)

    @property
    def verified(self) -> bool:
        return self._verified

    @property
    def authoritative(self) -> bool:
        return self._verified

    def __len__(self) -> int:
        return len(self._store)

    def as_records(self):
        """All cached counts as CountRecord values, sorted by key."""
        return [CountRecord(surface=s, p=p, r=r, count=c)
                for (s, p, r), c in sorted(self._store.items())]

    @property
    def stats(self):
        return {"entries": len(self._store), "hits": self.hits,
                "misses": self.misses, "verified": self._verified}
