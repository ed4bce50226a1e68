"""Hot loops over F_p: Gaussian elimination and codeword enumeration.

Every kernel exists twice: a numba ``@njit`` version and a pure-numpy
version with the same signature.  The public names (``rank_mod``,
``solve_mod``, ``enumerate_codewords``) dispatch to numba unless it is
missing or ``SECURE_REGEN_NUMBA=0`` is set in the environment.

All arrays are int64 with entries already reduced into [0, p).  p must be
below 2**31 so that ``(p - f) * x`` never overflows a signed 64-bit word.
"""

from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    NUMBA_AVAILABLE = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        if args and callable(args[0]):
            return args[0]
        return wrap


def _env_wants_numba() -> bool:
    return os.environ.get("SECURE_REGEN_NUMBA", "1").strip().lower() not in ("0", "false", "no", "off")


USE_NUMBA = NUMBA_AVAILABLE and _env_wants_numba()

# The numba path returns -1 from solve on a singular system; this sentinel
# is turned into an exception by the caller.
SINGULAR = -1


# --------------------------------------------------------------------------
# numba kernels
# --------------------------------------------------------------------------


@njit(cache=True)
def _powmod_nb(base, exp, p):
    result = 1
    base = base % p
    while exp > 0:
        if exp & 1:
            result = (result * base) % p
        base = (base * base) % p
        exp >>= 1
    return result


@njit(cache=True)
def _rank_mod_nb(a, p):
    m = a.copy()
    rows, cols = m.shape
    r = 0
    for c in range(cols):
        if r == rows:
            break
        piv = -1
        for i in range(r, rows):
            if m[i, c] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            for j in range(cols):
                t = m[r, j]
                m[r, j] = m[piv, j]
                m[piv, j] = t
        inv = _powmod_nb(m[r, c], p - 2, p)
        for j in range(c, cols):
            m[r, j] = (m[r, j] * inv) % p
        for i in range(r + 1, rows):
            f = m[i, c]
            if f != 0:
                g = p - f
                for j in range(c, cols):
                    m[i, j] = (m[i, j] + g * m[r, j]) % p
        r += 1
    return r


@njit(cache=True)
def _solve_mod_nb(a, y, p):
    n = a.shape[0]
    aug = np.empty((n, n + 1), dtype=np.int64)
    for i in range(n):
        for j in range(n):
            aug[i, j] = a[i, j]
        aug[i, n] = y[i]
    for c in range(n):
        piv = -1
        for i in range(c, n):
            if aug[i, c] != 0:
                piv = i
                break
        if piv < 0:
            return np.full(n, SINGULAR, dtype=np.int64)
        if piv != c:
            for j in range(n + 1):
                t = aug[c, j]
                aug[c, j] = aug[piv, j]
                aug[piv, j] = t
        inv = _powmod_nb(aug[c, c], p - 2, p)
        for j in range(c, n + 1):
            aug[c, j] = (aug[c, j] * inv) % p
        for i in range(n):
            if i != c:
                f = aug[i, c]
                if f != 0:
                    g = p - f
                    for j in range(c, n + 1):
                        aug[i, j] = (aug[i, j] + g * aug[c, j]) % p
    out = np.empty(n, dtype=np.int64)
    for i in range(n):
        out[i] = aug[i, n]
    return out


@njit(cache=True)
def _enumerate_codewords_nb(g, p):
    dim, length = g.shape
    total = 1
    for _ in range(dim):
        total *= p
    msgs = np.zeros((total, dim), dtype=np.int64)
    words = np.zeros((total, length), dtype=np.int64)
    digits = np.zeros(dim, dtype=np.int64)
    acc = np.zeros(length, dtype=np.int64)
    for t in range(total):
        for i in range(dim):
            msgs[t, i] = digits[i]
        for j in range(length):
            words[t, j] = acc[j]
        # odometer increment; acc tracks digits @ g incrementally
        i = 0
        while i < dim:
            digits[i] += 1
            if digits[i] < p:
                for j in range(length):
                    acc[j] = (acc[j] + g[i, j]) % p
                break
            digits[i] = 0
            for j in range(length):
                acc[j] = (acc[j] + g[i, j]) % p
            i += 1
    return msgs, words


# --------------------------------------------------------------------------
# numpy fallbacks
# --------------------------------------------------------------------------


def _rank_mod_np(a: np.ndarray, p: int) -> int:
    m = a.copy()
    rows, cols = m.shape
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(m[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            m[[r, piv]] = m[[piv, r]]
        m[r] = (m[r] * pow(int(m[r, c]), p - 2, p)) % p
        below = m[r + 1 :, c]
        if below.any():
            m[r + 1 :] = (m[r + 1 :] + np.outer((p - below) % p, m[r])) % p
        r += 1
    return r


def _solve_mod_np(a: np.ndarray, y: np.ndarray, p: int) -> np.ndarray:
    n = a.shape[0]
    aug = np.concatenate([a, y.reshape(n, 1)], axis=1).astype(np.int64)
    for c in range(n):
        nz = np.nonzero(aug[c:, c])[0]
        if nz.size == 0:
            return np.full(n, SINGULAR, dtype=np.int64)
        piv = c + int(nz[0])
        if piv != c:
            aug[[c, piv]] = aug[[piv, c]]
        aug[c] = (aug[c] * pow(int(aug[c, c]), p - 2, p)) % p
        f = aug[:, c].copy()
        f[c] = 0
        aug = (aug + np.outer((p - f) % p, aug[c])) % p
    return aug[:, n].copy()


def _enumerate_codewords_np(g: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray]:
    dim = g.shape[0]
    total = p**dim
    idx = np.arange(total, dtype=np.int64)
    powers = p ** np.arange(dim, dtype=np.int64)
    msgs = (idx[:, None] // powers[None, :]) % p
    # chunked accumulation keeps every partial sum below p**2
    words = np.zeros((total, g.shape[1]), dtype=np.int64)
    for i in range(dim):
        words = (words + msgs[:, i : i + 1] * g[i][None, :]) % p
    return msgs, words


# --------------------------------------------------------------------------
# dispatch
# --------------------------------------------------------------------------


def rank_mod(a: np.ndarray, p: int) -> int:
    a = np.ascontiguousarray(a, dtype=np.int64)
    if a.size == 0:
        return 0
    if USE_NUMBA:
        return int(_rank_mod_nb(a, np.int64(p)))
    return _rank_mod_np(a, p)


def solve_mod(a: np.ndarray, y: np.ndarray, p: int) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.int64)
    y = np.ascontiguousarray(y, dtype=np.int64)
    if USE_NUMBA:
        return _solve_mod_nb(a, y, np.int64(p))
    return _solve_mod_np(a, y, p)


def enumerate_codewords(g: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray]:
    """All (message, message @ g mod p) pairs, messages in little-endian odometer order."""
    g = np.ascontiguousarray(g, dtype=np.int64)
    if USE_NUMBA:
        return _enumerate_codewords_nb(g, np.int64(p))
    return _enumerate_codewords_np(g, p)


def warmup() -> None:
    """Compile the numba kernels on tiny inputs so later timings exclude JIT."""
    if not USE_NUMBA:
        return
    eye = np.eye(2, dtype=np.int64)
    rank_mod(eye, 5)
    solve_mod(eye, np.array([1, 2], dtype=np.int64), 5)
    enumerate_codewords(eye, 3)
