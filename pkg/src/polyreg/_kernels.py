"""Array kernels for the linear-time atomic functions.

Each kernel has two implementations: a numba ``@njit`` loop and a pure numpy
formulation.  ``POLYREG_BACKEND=numpy`` (or ``POLYREG_DISABLE_NUMBA=1``)
selects the fallback; the default is numba when it imports.
"""

from __future__ import annotations

import os
from contextlib import contextmanager

import numpy as np

try:  # pragma: no cover - exercised implicitly
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f


def _initial_backend() -> str:
    if os.environ.get("POLYREG_DISABLE_NUMBA", "").strip() not in ("", "0"):
        return "numpy"
    choice = os.environ.get("POLYREG_BACKEND", "numba").strip().lower()
    if choice not in ("numba", "numpy"):
        raise ValueError(f"POLYREG_BACKEND must be 'numba' or 'numpy', not {choice!r}")
    if choice == "numba" and not HAVE_NUMBA:
        return "numpy"
    return choice


_BACKEND = _initial_backend()

# Chunk length for the numpy scans; bounds temporary memory.
_CHUNK = 1 << 18


def backend() -> str:
    return _BACKEND


def set_backend(name: str) -> None:
    global _BACKEND
    if name not in ("numba", "numpy"):
        raise ValueError(name)
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba is not available")
    _BACKEND = name


@contextmanager
def use_backend(name: str):
    previous = _BACKEND
    set_backend(name)
    try:
        yield
    finally:
        set_backend(previous)


def code_dtype(n_letters: int):
    if n_letters <= 255:
        return np.uint8
    if n_letters <= 65535:
        return np.uint16
    return np.int64


# ---------------------------------------------------------------------------
# numba implementations
# ---------------------------------------------------------------------------


@njit(cache=True)
def _dfa_run_nb(delta, q, codes):
    for i in range(codes.shape[0]):
        q = delta[q, codes[i]]
    return q


@njit(cache=True)
def _seq_eval_nb(delta, out_flat, out_start, out_len, end_flat, end_start, end_len, q, codes, out):
    pos = 0
    for i in range(codes.shape[0]):
        c = codes[i]
        s = out_start[q, c]
        for j in range(out_len[q, c]):
            out[pos] = out_flat[s + j]
            pos += 1
        q = delta[q, c]
    s = end_start[q]
    for j in range(end_len[q]):
        out[pos] = end_flat[s + j]
        pos += 1
    return pos


@njit(cache=True)
def _seq_length_nb(delta, out_len, end_len, q, codes):
    total = 0
    for i in range(codes.shape[0]):
        c = codes[i]
        total += out_len[q, c]
        q = delta[q, c]
    return total + end_len[q]


@njit(cache=True)
def _squaring_nb(codes, shift, out):
    n = codes.shape[0]
    for x in range(n):
        # copy the row, then underline the diagonal
        base = x * n
        for i in range(n):
            out[base + i] = codes[i]
        out[base + x] = codes[x] + shift


@njit(cache=True)
def _itrev_nb(codes, sep, out):
    n = codes.shape[0]
    start = 0
    for i in range(n + 1):
        if i == n or codes[i] == sep:
            # block is codes[start:i]
            for k in range(start, i):
                out[k] = codes[start + i - 1 - k]
            if i < n:
                out[i] = codes[i]
            start = i + 1


# ---------------------------------------------------------------------------
# numpy implementations
# ---------------------------------------------------------------------------


def _state_trace_np(delta: np.ndarray, q: int, codes: np.ndarray) -> tuple[np.ndarray, int]:
    """States before each symbol (and the final state) via a doubling scan."""
    n = codes.shape[0]
    states = np.empty(n, dtype=np.int32)
    n_states = delta.shape[0]
    chunk = max(1, _CHUNK // max(1, n_states))
    for lo in range(0, n, chunk):
        block = codes[lo : lo + chunk]
        prefix = delta[:, block].T.copy()  # prefix[i][p] = state after block[:i+1] from p
        d = 1
        while d < prefix.shape[0]:
            prefix[d:] = np.take_along_axis(prefix[d:], prefix[:-d], axis=1)
            d *= 2
        states[lo] = q
        if block.shape[0] > 1:
            states[lo + 1 : lo + block.shape[0]] = prefix[:-1, q]
        q = int(prefix[-1, q])
    return states, q


def _dfa_run_np(delta, q, codes):
    if codes.shape[0] == 0:
        return q
    return _state_trace_np(delta, q, codes)[1]


def _gather(flat: np.ndarray, starts: np.ndarray, lengths: np.ndarray) -> np.ndarray:
    total = int(lengths.sum())
    if total == 0:
        return flat[:0]
    offsets = np.cumsum(lengths) - lengths
    idx = np.repeat(starts - offsets, lengths) + np.arange(total)
    return flat[idx]


def _seq_eval_np(delta, out_flat, out_start, out_len, end_flat, end_start, end_len, q, codes, dtype):
    n = codes.shape[0]
    pieces = []
    chunk = _CHUNK
    for lo in range(0, n, chunk):
        block = codes[lo : lo + chunk]
        states, q_next = _state_trace_np(delta, q, block)
        pieces.append(_gather(out_flat, out_start[states, block], out_len[states, block]))
        q = q_next
    pieces.append(end_flat[end_start[q] : end_start[q] + end_len[q]])
    if not pieces:
        return np.zeros(0, dtype=dtype)
    return np.concatenate(pieces).astype(dtype, copy=False)


def _squaring_np(codes, shift, dtype):
    n = codes.shape[0]
    out = np.tile(codes.astype(dtype), n)
    diag = np.arange(n, dtype=np.int64) * (n + 1)
    out[diag] = out[diag] + shift
    return out


def _itrev_np(codes, sep):
    n = codes.shape[0]
    if n == 0:
        return codes.copy()
    idx = np.arange(n, dtype=np.int64)
    is_sep = codes == sep
    prev = np.where(is_sep, idx, -1)
    np.maximum.accumulate(prev, out=prev)
    nxt = np.where(is_sep, idx, n)
    nxt = np.minimum.accumulate(nxt[::-1])[::-1]
    # for non-separators: block is (prev, nxt); mirrored index is prev+nxt-i
    src = np.where(is_sep, idx, prev + nxt - idx)
    return codes[src]


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------


def dfa_run(delta: np.ndarray, q: int, codes: np.ndarray) -> int:
    if _BACKEND == "numba":
        return int(_dfa_run_nb(delta, np.int32(q), codes))
    return int(_dfa_run_np(delta, q, codes))


def dfa_trace(delta: np.ndarray, q: int, codes: np.ndarray) -> tuple[np.ndarray, int]:
    return _state_trace_np(delta, q, codes) if codes.shape[0] else (np.zeros(0, np.int32), q)


def seq_eval(tables, q: int, codes: np.ndarray, dtype) -> np.ndarray:
    delta, out_flat, out_start, out_len, end_flat, end_start, end_len = tables
    if _BACKEND == "numba":
        total = _seq_length_nb(delta, out_len, end_len, np.int32(q), codes)
        out = np.empty(total, dtype=dtype)
        _seq_eval_nb(delta, out_flat, out_start, out_len, end_flat, end_start, end_len, np.int32(q), codes, out)
        return out
    return _seq_eval_np(delta, out_flat, out_start, out_len, end_flat, end_start, end_len, q, codes, dtype)


def squaring(codes: np.ndarray, shift: int, dtype) -> np.ndarray:
    codes = codes.astype(dtype, copy=False)
    if _BACKEND == "numba":
        n = codes.shape[0]
        out = np.empty(n * n, dtype=dtype)
        _squaring_nb(codes, dtype(shift), out)
        return out
    return _squaring_np(codes, shift, dtype)


def iterated_reverse(codes: np.ndarray, sep: int) -> np.ndarray:
    if _BACKEND == "numba":
        out = np.empty_like(codes)
        _itrev_nb(codes, codes.dtype.type(sep), out)
        return out
    return _itrev_np(codes, sep)
