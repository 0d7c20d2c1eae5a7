"""Multi-pattern automaton construction (trie + failure links + output links).

The automaton is built once in Python and scanned by whichever kernel backend
is active. States are numbered breadth-first, so all states at depth <=
``dense_depth`` form a prefix [0, n_dense); those states carry fully composed
256-way transition rows (goto with failure resolution baked in). Deeper states
keep sorted sparse child lists and are resolved by failure-following, which
must terminate because every failure link strictly decreases depth and the
root is dense.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

from .errors import InvalidPatternError

_EMPTY: dict[int, int] = {}


@dataclass
class Automaton:
    """Flat-array automaton over bytes.

    Transitions are indexed by byte *class*: every byte that occurs in some
    pattern gets its own class, and all remaining bytes share class 0, which
    transitions to the root from every state (no goto edge can consume them).
    That keeps the dense rows small enough to stay cache-resident.

    Per matching state, outputs are emitted by walking ``emit_head`` /
    ``dlink`` (the chain of suffix states that end a pattern); ``own_pid`` maps
    those states to pattern ids.
    """

    patterns: tuple[bytes, ...]
    n_states: int
    n_dense: int
    n_classes: int
    byte_class: list[int]     # 256 entries, 0 = byte absent from all patterns
    dense: list[int]          # n_dense * n_classes, composed next-state
    sparse_start: list[int]   # n_states + 1 (CSR offsets; dense rows are empty)
    sparse_bytes: list[int]
    sparse_next: list[int]
    fail: list[int]
    has_emit: list[int]       # state -> 1 iff any pattern ends here or on the fail chain
    emit_head: list[int]      # state -> first output state in chain, or -1
    own_pid: list[int]        # state -> pattern id ending exactly here, or -1
    dlink: list[int]          # output state -> next output state, or -1
    pat_len: list[int]
    _ext_cache: object = field(default=None, repr=False, compare=False)

    @property
    def n_patterns(self) -> int:
        return len(self.patterns)


def build_bytes_automaton(patterns: Sequence[bytes], dense_depth: int = 5) -> Automaton:
    """Build the automaton for a sequence of unique, nonempty byte patterns."""
    if not patterns:
        raise InvalidPatternError("pattern set is empty")
    seen = set()
    for p in patterns:
        if not p:
            raise InvalidPatternError("empty pattern")
        if p in seen:
            raise InvalidPatternError("duplicate pattern passed to builder")
        seen.add(p)

    # Trie with dict children, then BFS renumbering.
    children: list[dict[int, int]] = [{}]
    depth = [0]
    pid_at: list[int] = [-1]
    for pid, pat in enumerate(patterns):
        node = 0
        for b in pat:
            nxt = children[node].get(b)
            if nxt is None:
                nxt = len(children)
                children[node][b] = nxt
                children.append({})
                depth.append(depth[node] + 1)
                pid_at.append(-1)
            node = nxt
        pid_at[node] = pid

    # BFS renumbering puts shallow states first, so the dense prefix below is
    # exactly the depth <= dense_depth states.
    order: list[int] = [0]
    q = deque([0])
    while q:
        node = q.popleft()
        for child in children[node].values():
            order.append(child)
            q.append(child)
    renum = [0] * len(children)
    for new_id, old_id in enumerate(order):
        renum[old_id] = new_id

    n_states = len(children)
    kids: list[dict[int, int]] = [{}] * n_states
    own_pid = [-1] * n_states
    new_depth = [0] * n_states
    for old_id in range(n_states):
        nid = renum[old_id]
        own_pid[nid] = pid_at[old_id]
        new_depth[nid] = depth[old_id]
        old_kids = children[old_id]
        kids[nid] = {b: renum[c] for b, c in old_kids.items()} if old_kids else _EMPTY

    fail = [0] * n_states
    dlink = [-1] * n_states
    q = deque()
    for child in kids[0].values():
        q.append(child)
    while q:
        s = q.popleft()
        for b, child in kids[s].items():
            f = fail[s]
            while f and b not in kids[f]:
                f = fail[f]
            fail[child] = kids[f].get(b, 0)
            q.append(child)
        f = fail[s]
        dlink[s] = f if own_pid[f] >= 0 else dlink[f]

    emit_head = [s if own_pid[s] >= 0 else dlink[s] for s in range(n_states)]
    has_emit = [1 if e != -1 else 0 for e in emit_head]

    byte_class = [0] * 256
    n_classes = 1
    for b in sorted({b for p in patterns for b in p}):
        byte_class[b] = n_classes
        n_classes += 1
    class_byte = [0] * n_classes  # representative byte per class (class 0 unused)
    for b in range(256):
        if byte_class[b]:
            class_byte[byte_class[b]] = b

    n_dense = sum(1 for s in range(n_states) if new_depth[s] <= dense_depth)
    dense = [0] * (n_dense * n_classes)
    for s in range(n_dense):
        base = s * n_classes
        fbase = fail[s] * n_classes
        for cls in range(1, n_classes):
            b = class_byte[cls]
            child = kids[s].get(b)
            if child is not None:
                dense[base + cls] = child
            elif s == 0:
                dense[base + cls] = 0
            else:
                dense[base + cls] = dense[fbase + cls]

    sparse_start = [0] * (n_states + 1)
    sparse_bytes: list[int] = []
    sparse_next: list[int] = []
    for s in range(n_states):
        sparse_start[s] = len(sparse_bytes)
        if s >= n_dense:
            for b in sorted(kids[s]):
                sparse_bytes.append(b)
                sparse_next.append(kids[s][b])
    sparse_start[n_states] = len(sparse_bytes)

    return Automaton(
        patterns=tuple(patterns),
        n_states=n_states,
        n_dense=n_dense,
        n_classes=n_classes,
        byte_class=byte_class,
        dense=dense,
        sparse_start=sparse_start,
        sparse_bytes=sparse_bytes,
        sparse_next=sparse_next,
        fail=fail,
        has_emit=has_emit,
        emit_head=emit_head,
        own_pid=own_pid,
        dlink=dlink,
        pat_len=[len(p) for p in patterns],
    )
