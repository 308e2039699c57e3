"""Per-vertex bucket stores for bucket-CH searches.

Entries are ``(key, stop_id, dist)`` tuples.  The key orders a bucket:
elliptic buckets use the negated remaining leeway (so the scan sees the
largest leeway first), last-stop and PD buckets use the distance itself.
Ties fall back to the stop id through plain tuple order.
"""
from bisect import insort


class BucketStore:
    def __init__(self, n, sorted_buckets=True):
        self.n = n
        self.sorted = sorted_buckets
        self.lists = [[] for _ in range(n)]
        self.size = 0

    def bucket(self, v):
        return self.lists[v]

    def insert_entry(self, v, stop_id, dist, key=None):
        """Insert (replacing any entry of the same stop at ``v``)."""
        self.remove_entries(v, stop_id)
        entry = (dist if key is None else key, stop_id, dist)
        lst = self.bucket(v)
        if self.sorted:
            insort(lst, entry)
        else:
            lst.append(entry)
        self.size += 1

    def remove_entries(self, v, stop_id):
        lst = self.bucket(v)
        before = len(lst)
        lst[:] = [e for e in lst if e[1] != stop_id]
        self.size -= before - len(lst)

    def scan(self, v, visitor, early_stop=None):
        """Visit entries in bucket order; returns how many were examined.

        ``early_stop`` is checked before visiting.  In sorted mode the first
        entry it accepts ends the scan; unsorted buckets only skip it.
        """
        scanned = 0
        for entry in self.bucket(v):
            scanned += 1
            if early_stop is not None and early_stop(entry):
                if self.sorted:
                    break
                continue
            visitor(entry)
        return scanned

    def entries(self, v):
        lst = self.bucket(v)
        return list(lst) if self.sorted else sorted(lst)

    def snapshot(self):
        """Canonical content for coherence checks: sorted entries per vertex."""
        return {v: sorted(self.bucket(v)) for v in range(self.n) if self.bucket(v)}


class TransientBucketStore(BucketStore):
    """Bucket store cleared in O(1) by bumping a generation counter."""

    def __init__(self, n, sorted_buckets=True):
        super().__init__(n, sorted_buckets)
        self.generation = 0
        self.stamp = [0] * n

    def clear(self):
        self.generation += 1
        self.size = 0

    def bucket(self, v):
        if self.stamp[v] != self.generation:
            self.stamp[v] = self.generation
            self.lists[v] = []
        return self.lists[v]
