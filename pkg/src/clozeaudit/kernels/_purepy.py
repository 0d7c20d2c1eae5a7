"""Pure-Python scanning kernels (fallback when the compiled extension is absent).

Functionally identical to ``clozeaudit._ckernels``; roughly 50-100x slower.
Operates on plain Python lists so no numpy round-trips happen in the inner
loops.
"""

from __future__ import annotations


def bm_contains(text: bytes, pattern: bytes, table) -> int:
    """Bad-character-rule Boyer-Moore: 1 iff pattern occurs contiguously in text."""
    n = len(text)
    m = len(pattern)
    s = 0
    while s <= n - m:
        j = m - 1
        while j >= 0 and pattern[j] == text[s + j]:
            j -= 1
        if j < 0:
            return 1
        shift = j - table[text[s + j]]
        s += shift if shift > 0 else 1
    return 0


class AcScanner:
    """List-backed twin of the compiled AcScanner."""

    def __init__(self, arrays):
        (self.n_dense, self.n_classes, self.byte_class, self.dense,
         self.sparse_start, self.sparse_bytes, self.sparse_next, self.fail,
         self.has_emit, self.emit_head, self.own_pid, self.dlink,
         self.pat_len) = arrays

    def _step(self, state: int, b: int, cls: int) -> int:
        while True:
            if state < self.n_dense:
                return self.dense[state * self.n_classes + cls]
            lo = self.sparse_start[state]
            hi = self.sparse_start[state + 1]
            nxt = -1
            while lo < hi:
                mid = (lo + hi) >> 1
                sb = self.sparse_bytes[mid]
                if sb < b:
                    lo = mid + 1
                elif sb > b:
                    hi = mid
                else:
                    nxt = self.sparse_next[mid]
                    break
            if nxt >= 0:
                return nxt
            state = self.fail[state]

    def scan_distinct(self, text: bytes, epoch_buf: list, epoch: int) -> list:
        """Distinct pattern ids occurring in ``text``, in first-hit order."""
        state = 0
        out: list[int] = []
        byte_class = self.byte_class
        for b in text:
            cls = byte_class[b]
            if cls == 0:
                state = 0
                continue
            state = self._step(state, b, cls)
            if self.has_emit[state]:
                e = self.emit_head[state]
                while e != -1:
                    pid = self.own_pid[e]
                    if epoch_buf[pid] != epoch:
                        epoch_buf[pid] = epoch
                        out.append(pid)
                    e = self.dlink[e]
        return out

    def scan_count(self, text: bytes, counts: list, is_word: bytes,
                   boundary: int, snippet_cap: int) -> list:
        """Count every occurrence; return capped (pid, start, end) snippet hits."""
        state = 0
        hits: list[tuple[int, int, int]] = []
        n = len(text)
        byte_class = self.byte_class
        for i in range(n):
            b = text[i]
            cls = byte_class[b]
            if cls == 0:
                state = 0
                continue
            state = self._step(state, b, cls)
            if not self.has_emit[state]:
                continue
            e = self.emit_head[state]
            while e != -1:
                pid = self.own_pid[e]
                start = i + 1 - self.pat_len[pid]
                if boundary:
                    if start > 0 and is_word[text[start - 1]]:
                        e = self.dlink[e]
                        continue
                    if i + 1 < n and is_word[text[i + 1]]:
                        e = self.dlink[e]
                        continue
                if counts[pid] < snippet_cap:
                    hits.append((pid, start, i + 1))
                counts[pid] += 1
                e = self.dlink[e]
        return hits
