"""Exhaustive enumeration of GL_d(F_p) in numpy batches.

Vectors of F_p^d are indexed by ``idx = sum_j v_j p^j``.  An invertible
matrix is a tuple of column indices (c_0, ..., c_{d-1}) with each column
outside the span of the previous ones; enumeration is lexicographic in
these indices, which is the canonical order of every search built on it.
"""
from __future__ import annotations

from collections import deque
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterator

import numpy as np

from .errors import SearchTooLarge


def gl_order(d: int, p: int) -> int:
    out = 1
    for i in range(d):
        out *= p**d - p**i
    return out


def check_cap(count: int, cap: int, what: str) -> None:
    if count > cap:
        raise SearchTooLarge(f"{what}: {count} candidates exceed the cap {cap}")


def all_vectors(d: int, p: int) -> np.ndarray:
    idx = np.arange(p**d, dtype=np.int64)
    if d == 0:
        return np.zeros((1, 0), dtype=np.int64)
    return np.stack([(idx // p**j) % p for j in range(d)], axis=1)


def _span_mask(prefix: np.ndarray, vecs: np.ndarray, p: int) -> np.ndarray:
    """(N, p^d) boolean: which vectors lie in the span of each prefix."""
    N, k = prefix.shape
    d = vecs.shape[1]
    coeffs = all_vectors(k, p)  # (p^k, k)
    cols = vecs[prefix]  # (N, k, d)
    span = np.einsum("ck,nkd->ncd", coeffs, cols) % p
    weights = p ** np.arange(d, dtype=np.int64)
    span_idx = span @ weights
    mask = np.zeros((N, p**d), dtype=bool)
    np.put_along_axis(mask, span_idx, True, axis=1)
    return mask


def independent_prefixes(d: int, p: int, k: int) -> np.ndarray:
    """All k-tuples of linearly independent column indices, lexicographic."""
    vecs = all_vectors(d, p)
    pref = np.zeros((1, 0), dtype=np.int64)
    for _ in range(k):
        free = ~_span_mask(pref, vecs, p)
        rows, cols = np.nonzero(free)
        pref = np.concatenate([pref[rows], cols[:, None]], axis=1)
    return pref


def gl_column_chunks(d: int, p: int, chunk: int = 20000) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    """Yield (prefixes (B, d-1), allowed last columns (B, p^d) mask)."""
    vecs = all_vectors(d, p)
    pref = independent_prefixes(d, p, d - 1)
    for start in range(0, len(pref), chunk):
        block = pref[start:start + chunk]
        yield block, ~_span_mask(block, vecs, p)


def gl_matrices(d: int, p: int, chunk: int = 20000) -> Iterator[np.ndarray]:
    """Yield stacks of at most ~``chunk`` invertible matrices (B, d, d), in canonical order."""
    vecs = all_vectors(d, p)
    for block, allowed in gl_column_chunks(d, p, max(1, chunk // p**d)):
        rows, last = np.nonzero(allowed)
        cols = np.concatenate([block[rows], last[:, None]], axis=1)
        yield np.transpose(vecs[cols], (0, 2, 1))


def map_chunks(fn: Callable, chunks, threads: int = 1) -> Iterator:
    """Lazily apply ``fn`` to each chunk, yielding results in input order.

    With several threads at most ``2 * threads`` chunks are in flight, so a
    caller that stops early does not pay for the whole enumeration.
    """
    if threads <= 1:
        for c in chunks:
            yield fn(c)
        return
    with ThreadPoolExecutor(max_workers=threads) as pool:
        pending = deque()
        try:
            for c in chunks:
                pending.append(pool.submit(fn, c))
                if len(pending) >= 2 * threads:
                    yield pending.popleft().result()
            while pending:
                yield pending.popleft().result()
        finally:
            for f in pending:
                f.cancel()
