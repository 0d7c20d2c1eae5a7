"""Kernel backend selection: compiled extension if importable, else pure Python.

Everything above this layer works with ``Automaton`` objects and bytes; the
backend difference (numpy arrays vs. Python lists, C loops vs. interpreted
loops) is contained here. ``BACKEND`` reports which one is active and
``force_backend`` exists so the benchmark and parity tests can pin either.
"""

from __future__ import annotations

from array import array

from .._acbuild import Automaton, build_bytes_automaton  # noqa: F401 (re-export)
from ..errors import InvalidPatternError
from . import _purepy

try:
    from .. import _ckernels  # type: ignore[attr-defined]

    _HAVE_EXT = True
except ImportError:
    _ckernels = None
    _HAVE_EXT = False

BACKEND = "c" if _HAVE_EXT else "python"


def have_extension() -> bool:
    return _HAVE_EXT


def _resolve(backend: str | None):
    name = backend or BACKEND
    if name == "c":
        if not _HAVE_EXT:
            raise RuntimeError("compiled kernels requested but not available")
        return _ckernels, "c"
    if name == "python":
        return _purepy, "python"
    raise ValueError(f"unknown kernel backend {name!r}")


# Word-byte classes for boundary mode: ASCII letters plus all bytes >= 0x80
# (UTF-8 lead/continuation bytes belong to non-ASCII letters in running text).
_IS_WORD = bytes(
    1 if (0x41 <= b <= 0x5A or 0x61 <= b <= 0x7A or b >= 0x80) else 0 for b in range(256)
)


def bm_table(pattern: bytes) -> array:
    """Last-occurrence table for the bad-character rule: byte -> last index, else -1."""
    if not pattern:
        raise InvalidPatternError("empty pattern")
    table = array("i", [-1]) * 256
    for i, b in enumerate(pattern):
        table[b] = i
    return table


def bm_contains(text: bytes, pattern: bytes, table=None, backend: str | None = None) -> int:
    """1 iff ``pattern`` occurs contiguously in ``text`` (bad-character Boyer-Moore)."""
    if not pattern:
        raise InvalidPatternError("empty pattern")
    if table is None:
        table = bm_table(pattern)
    impl, name = _resolve(backend)
    if name == "c":
        import numpy as np

        if not isinstance(table, np.ndarray):
            table = np.asarray(table, dtype=np.int32)
        return impl.bm_contains(text, pattern, table)
    return impl.bm_contains(text, pattern, table)


def _ext_arrays(auto: Automaton):
    """Backend-shaped view of the automaton arrays, cached on the instance."""
    if auto._ext_cache is None:
        import numpy as np

        auto._ext_cache = (
            auto.n_dense,
            auto.n_classes,
            np.asarray(auto.byte_class, dtype=np.uint8),
            np.asarray(auto.dense, dtype=np.int32),
            np.asarray(auto.sparse_start, dtype=np.int32),
            np.asarray(auto.sparse_bytes, dtype=np.uint8),
            np.asarray(auto.sparse_next, dtype=np.int32),
            np.asarray(auto.fail, dtype=np.int32),
            np.asarray(auto.has_emit, dtype=np.uint8),
            np.asarray(auto.emit_head, dtype=np.int32),
            np.asarray(auto.own_pid, dtype=np.int32),
            np.asarray(auto.dlink, dtype=np.int32),
            np.asarray(auto.pat_len, dtype=np.int32),
        )
    return auto._ext_cache


def _py_arrays(auto: Automaton):
    return (
        auto.n_dense,
        auto.n_classes,
        auto.byte_class,
        auto.dense,
        auto.sparse_start,
        auto.sparse_bytes,
        auto.sparse_next,
        auto.fail,
        auto.has_emit,
        auto.emit_head,
        auto.own_pid,
        auto.dlink,
        auto.pat_len,
    )


def _make_scanner(auto: Automaton, backend: str | None):
    impl, name = _resolve(backend)
    arrays = _ext_arrays(auto) if name == "c" else _py_arrays(auto)
    return impl.AcScanner(arrays), name


class DistinctScanner:
    """Streams texts through an automaton, reporting distinct pattern ids per text.

    Holds per-scanner scratch state (the epoch buffer), so share one instance
    per worker, not across threads.
    """

    def __init__(self, auto: Automaton, backend: str | None = None):
        self._kernel, self._name = _make_scanner(auto, backend)
        self._auto = auto
        self._epoch = 0
        if self._name == "c":
            import numpy as np

            self._epoch_buf = np.zeros(auto.n_patterns, dtype=np.int32)
        else:
            self._epoch_buf = [0] * auto.n_patterns

    def scan(self, data: bytes) -> list[int]:
        self._epoch += 1
        if self._epoch >= 2**31 - 1:  # epoch wraparound: reset scratch
            self._epoch = 1
            if self._name == "c":
                self._epoch_buf[:] = 0
            else:
                self._epoch_buf = [0] * self._auto.n_patterns
        return self._kernel.scan_distinct(data, self._epoch_buf, self._epoch)


class CountingScanner:
    """Streams texts through an automaton, accumulating per-pattern occurrence counts.

    ``counts[pid]`` holds the running total across all scanned texts. Each
    ``scan`` returns the (pid, start, end) hits recorded while that pattern's
    running count was still below ``snippet_cap``.
    """

    def __init__(self, auto: Automaton, *, boundary: bool = True, snippet_cap: int = 0,
                 backend: str | None = None):
        self._kernel, self._name = _make_scanner(auto, backend)
        self._auto = auto
        self.boundary = bool(boundary)
        self.snippet_cap = int(snippet_cap)
        if self._name == "c":
            import numpy as np

            self.counts = np.zeros(auto.n_patterns, dtype=np.int64)
        else:
            self.counts = [0] * auto.n_patterns

    def scan(self, data: bytes) -> list[tuple[int, int, int]]:
        return self._kernel.scan_count(data, self.counts, _IS_WORD,
                                       int(self.boundary), self.snippet_cap)

    def count_list(self) -> list[int]:
        return [int(c) for c in self.counts]
