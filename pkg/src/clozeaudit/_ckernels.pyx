# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled scanning kernels: Boyer-Moore contains and automaton scans.

Mirrors clozeaudit.kernels._purepy exactly; the dispatch layer feeds this
module numpy arrays instead of Python lists. AcScanner acquires the automaton
memoryviews once so per-record scan calls stay cheap.
"""


def bm_contains(const unsigned char[::1] text, const unsigned char[::1] pattern,
                const int[::1] table):
    """Bad-character-rule Boyer-Moore: 1 iff pattern occurs contiguously in text."""
    cdef Py_ssize_t n = text.shape[0]
    cdef Py_ssize_t m = pattern.shape[0]
    cdef Py_ssize_t s = 0
    cdef Py_ssize_t j, shift
    while s <= n - m:
        j = m - 1
        while j >= 0 and pattern[j] == text[s + j]:
            j -= 1
        if j < 0:
            return 1
        shift = j - table[text[s + j]]
        s += shift if shift > 0 else 1
    return 0


cdef class AcScanner:
    cdef int n_dense
    cdef int n_classes
    cdef const unsigned char[::1] byte_class
    cdef const int[::1] dense
    cdef const int[::1] sparse_start
    cdef const unsigned char[::1] sparse_bytes
    cdef const int[::1] sparse_next
    cdef const int[::1] fail
    cdef const unsigned char[::1] has_emit
    cdef const int[::1] emit_head
    cdef const int[::1] own_pid
    cdef const int[::1] dlink
    cdef const int[::1] pat_len

    def __init__(self, arrays):
        (self.n_dense, self.n_classes, self.byte_class, self.dense,
         self.sparse_start, self.sparse_bytes, self.sparse_next, self.fail,
         self.has_emit, self.emit_head, self.own_pid, self.dlink,
         self.pat_len) = arrays

    def scan_distinct(self, const unsigned char[::1] text, int[::1] epoch_buf, int epoch):
        """Distinct pattern ids occurring in ``text``, in first-hit order."""
        cdef Py_ssize_t i, n = text.shape[0]
        cdef int state = 0
        cdef int n_dense = self.n_dense
        cdef int n_classes = self.n_classes
        cdef int b, cls, e, pid, lo, hi, mid, nxt, sb
        out = []
        for i in range(n):
            b = text[i]
            cls = self.byte_class[b]
            if cls == 0:
                state = 0
                continue
            while True:
                if state < n_dense:
                    state = self.dense[state * n_classes + cls]
                    break
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
                    state = nxt
                    break
                state = self.fail[state]
            if self.has_emit[state]:
                e = self.emit_head[state]
                while e != -1:
                    pid = self.own_pid[e]
                    if epoch_buf[pid] != epoch:
                        epoch_buf[pid] = epoch
                        out.append(pid)
                    e = self.dlink[e]
        return out

    def scan_count(self, const unsigned char[::1] text, long long[::1] counts,
                   const unsigned char[::1] is_word, int boundary, int snippet_cap):
        """Count every occurrence; return capped (pid, start, end) snippet hits."""
        cdef Py_ssize_t i, n = text.shape[0]
        cdef int state = 0
        cdef int n_dense = self.n_dense
        cdef int n_classes = self.n_classes
        cdef int b, cls, e, pid, lo, hi, mid, nxt, sb
        cdef Py_ssize_t start
        hits = []
        for i in range(n):
            b = text[i]
            cls = self.byte_class[b]
            if cls == 0:
                state = 0
                continue
            while True:
                if state < n_dense:
                    state = self.dense[state * n_classes + cls]
                    break
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
                    state = nxt
                    break
                state = self.fail[state]
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
