"""Exact dense linear algebra over the coefficient field.

Two engines share one interface.  ``ModPLinAlg`` stores residues mod a
small prime in float64 arrays so products run through BLAS; every integer
that reaches a matmul is bounded so the float result is exact.
``GenericLinAlg`` handles the rationals and large primes with object arrays
and python-flint for echelon forms.

Vectors are rows throughout: a set of vectors is a 2-D array whose rows are
the vectors.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

try:  # pragma: no cover - exercised implicitly
    import flint
except ImportError:  # pragma: no cover
    flint = None

_EXACT = float(2**52)
_SAFE = float(2**44)


def _fmod(a, p, out=None):
    """Remainder mod p for float arrays whose entries are below 2**44.

    ``floor((a + 1/2) / p)`` stays at least ``1/(2p)`` away from an integer
    boundary, so a single rounding step cannot flip the quotient.  This is
    far faster than ``np.mod`` on floats.
    """
    p = float(p)
    q = np.add(a, 0.5)
    q *= 1.0 / p
    np.floor(q, out=q)
    q *= p
    return np.subtract(a, q, out=out)


def _fmod_wide(a, p, out=None):
    """Remainder mod p for entries up to 2**52 in magnitude."""
    r = np.fmod(a, float(p), out=out)
    r += float(p)
    return np.fmod(r, float(p), out=r)


_SAFE32 = float(2**24)


def _reduce(a, p, out=None):
    """Exact reduction for the working dtypes of the echelon engine.

    float64 gives residues in [0, p) (entries below 2**44).  float32 gives
    centered residues in (-p/2, p/2) for entries below 2**24; the float32
    quotient can be off by one, which the two corrections absorb.
    """
    if a.dtype != np.float32:
        return _fmod(a, p, out=out)
    out = _loose(a, p, out)
    pf = np.float32(p)
    half = np.float32(p / 2)
    out -= pf * (out > half)
    out += pf * (out < -half)
    return out


def _loose(a, p, out=None):
    """float32 reduction to magnitude at most 3p/2 (not canonical)."""
    if out is None:
        out = a.copy()
    elif out is not a:
        out[...] = a
    q = out * np.float32(1.0 / p)
    np.rint(q, out=q)
    q *= np.float32(p)
    out -= q
    return out


def _centered(a, p):
    """float32 copy of canonical residues shifted into (-p/2, p/2)."""
    a = np.asarray(a, dtype=np.float32)
    return a - np.float32(p) * (a > np.float32(p / 2))


def _to_work(a, p, dtype):
    """Reduced copy of ``a`` in the working dtype, converted in row chunks.

    Entries must be integers of magnitude below 2**44.
    """
    a = np.asarray(a)
    out = np.empty(a.shape, dtype=dtype, order="C")
    if a.ndim != 2:
        out[...] = _fmod_wide(a.astype(np.float64), p)
        return out
    step = max(1, (1 << 22) // max(1, a.shape[1]))
    for s in range(0, a.shape[0], step):
        out[s : s + step] = _fmod(np.array(a[s : s + step], dtype=np.float64), p)
    return out


class ModPLinAlg:
    """Linear algebra over F_p for p < 2**20 via float64 BLAS."""

    # column panel widths, outermost first
    widths = (256, 32)

    def __init__(self, p: int):
        if p >= 2**20:
            raise ValueError("ModPLinAlg requires p < 2**20")
        self.p = p
        self.dtype = np.float64
        self._sq = float((p - 1) ** 2)
        # largest inner dimension whose dot products stay exact
        self.chunk = max(1, int((_EXACT - p) // max(self._sq, 1.0)))
        self.storage_dtype = np.uint8 if p <= 256 else (np.uint16 if p <= 65536 else np.uint32)
        # echelon forms run in float32 when a 64-wide panel update stays exact
        self.work = np.float32 if 64 * self._sq + p < _SAFE32 else np.float64

    # -- construction -------------------------------------------------
    def array(self, data) -> np.ndarray:
        a = np.asarray(data)
        if a.dtype == object:
            a = np.vectorize(lambda v: int(v) % self.p, otypes=[np.int64])(a)
        if a.dtype.kind in "iub":
            return (a.astype(np.int64) % self.p).astype(np.float64)
        return _fmod_wide(a.astype(np.float64, copy=True), self.p)

    def zeros(self, shape) -> np.ndarray:
        return np.zeros(shape, dtype=np.float64)

    def eye(self, n: int) -> np.ndarray:
        return np.eye(n, dtype=np.float64)

    def from_raw(self, value) -> float:
        return float(int(value) % self.p)

    def to_raw(self, value) -> int:
        return int(value) % self.p

    def compact(self, a: np.ndarray) -> np.ndarray:
        return np.asarray(a).astype(self.storage_dtype)

    def expand(self, a: np.ndarray) -> np.ndarray:
        return np.asarray(a, dtype=np.float64)

    # -- arithmetic ---------------------------------------------------
    def reduce(self, a):
        return _fmod(a, self.p)

    def neg(self, a):
        return _fmod(-a, self.p)

    def add(self, a, b):
        return _fmod(a + b, self.p)

    def sub(self, a, b):
        return _fmod(a - b, self.p)

    def scale(self, c, a):
        return _fmod(float(int(c) % self.p) * a, self.p)

    def inv_scalar(self, c) -> int:
        c = int(c) % self.p
        if c == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(c, self.p - 2, self.p)

    def matmul(self, a, b):
        a = np.asarray(a, dtype=np.float64)
        b = np.asarray(b, dtype=np.float64)
        k = a.shape[-1]
        if k * self._sq < _SAFE:
            return _fmod(a @ b, self.p)
        if k <= self.chunk:
            return _fmod_wide(a @ b, self.p)
        out = np.zeros(a.shape[:-1] + b.shape[-1:], dtype=np.float64)
        for s in range(0, k, self.chunk):
            out += a[..., s : s + self.chunk] @ b[s : s + self.chunk]
            _fmod_wide(out, self.p, out=out)
        return out

    def is_zero(self, a) -> bool:
        return not np.any(_fmod(a, self.p))

    # -- echelon forms ------------------------------------------------
    def rref(self, a, rank_only: bool = False, stop_at: int | None = None):
        """Reduced row echelon form.

        Returns ``(R, pivots)`` where ``R`` holds the nonzero rows and
        ``pivots[i]`` is the pivot column of row ``i``.  With ``rank_only``
        the rows are only in echelon form (no back-substitution).
        ``stop_at`` ends the elimination once that many pivots are found.
        """
        if np.ndim(a) != 2:
            raise ValueError("rref expects a matrix")
        A = _to_work(a, self.p, self.work)
        m, n = A.shape
        if m == 0 or n == 0:
            return np.zeros((0, n)), []
        state = _EchelonState(A, self.p, rank_only, stop_at)
        state.run(self.widths)
        r = state.rank
        order = np.argsort(np.asarray(state.pivcols, dtype=np.int64), kind="stable")
        R = _fmod(A[:r][order].astype(np.float64), self.p)
        return R, [state.pivcols[i] for i in order]

    def rank(self, a, stop_at: int | None = None, overwrite: bool = False) -> int:
        """Rank of ``a``; ``overwrite`` allows reusing a float32 input as workspace."""
        if np.size(a) == 0:
            return 0
        if overwrite and isinstance(a, np.ndarray) and a.dtype == self.work and a.flags.c_contiguous and self.work == np.float32:
            A = _reduce(a, self.p, out=a)
        else:
            A = _to_work(a, self.p, self.work)
        state = _EchelonState(A, self.p, True, stop_at)
        state.run(self.widths)
        return state.rank

    def inverse(self, a):
        a = self.array(a)
        n = a.shape[0]
        R, piv = self.rref(np.hstack([a, self.eye(n)]))
        if piv[:n] != list(range(n)) or len(piv) < n:
            raise ZeroDivisionError("singular matrix")
        return R[:n, n:]

    def kernel(self, a):
        """Rows spanning ``{x : a @ x = 0}``."""
        a = np.asarray(a, dtype=np.float64)
        n = a.shape[1]
        if a.shape[0] == 0:
            return self.eye(n)
        R, piv = self.rref(a)
        return self._kernel_from_rref(R, piv, n)

    def _kernel_from_rref(self, R, piv, n):
        free = np.setdiff1d(np.arange(n), np.asarray(piv, dtype=np.int64))
        K = np.zeros((len(free), n), dtype=np.float64)
        K[np.arange(len(free)), free] = 1.0
        if len(piv):
            K[:, piv] = _fmod(-R[:, free].T, self.p)
        return K

    def left_kernel(self, a):
        """Rows spanning ``{c : c @ a = 0}``."""
        return self.kernel(np.asarray(a).T)

    def row_basis(self, a):
        R, piv = self.rref(a)
        return R, piv


class _EchelonState:
    """In-place blocked Gauss-Jordan with row swaps.

    Pivot rows are swapped to the top.  Column panels are eliminated with
    an unblocked kernel and the accumulated row transformation is applied
    to the trailing columns through one matmul per panel.  Trailing entries
    are reduced lazily; ``bound`` tracks the largest magnitude they can hold.
    """

    def __init__(self, A, p, rank_only, stop_at):
        self.A = A
        self.p = p
        self.rank_only = rank_only
        self.stop_at = stop_at
        self.rank = 0
        self.pivcols: list[int] = []
        self.saved: list[np.ndarray] = []
        self.sq = float((p - 1) ** 2)
        self.bound = float(p)
        self.single = A.dtype == np.float32
        self.safe = _SAFE32 if self.single else _SAFE
        if self.single:
            # centered residues: products of two reduced entries stay below (p/2)^2
            self.sq = float((p // 2) ** 2)
            self.bound = 1.5 * p

    def done(self):
        return self.rank >= self.A.shape[0] or (
            self.stop_at is not None and self.rank >= self.stop_at
        )

    def run(self, widths):
        n = self.A.shape[1]
        self._sweep(0, n, n, tuple(widths))

    def _sweep(self, c0, c1, T, widths):
        step = widths[0]
        for s0 in range(c0, c1, step):
            if self.done():
                break
            self._panel(s0, min(c1, s0 + step), c1, widths[1:])

    def _panel(self, c0, c1, T, widths):
        A, p = self.A, self.p
        _reduce(A[:, c0:c1], p, out=A[:, c0:c1])
        S = A[:, c0:c1].copy()
        self.saved.append(S)
        r0 = self.rank
        if not widths or c1 - c0 <= widths[-1]:
            self._unblocked(c0, c1)
        else:
            self._sweep(c0, c1, c1, widths)
        self.saved.pop()
        r1 = self.rank
        if r1 > r0 and c1 < T:
            self._apply(S, c0, r0, r1, c1, T)

    def _apply(self, S, c0, r0, r1, c1, T):
        A, p = self.A, self.p
        cols = np.asarray(self.pivcols[r0:r1], dtype=np.int64) - c0
        X = S[r0:r1][:, cols].astype(np.float64)
        Xinv = _small_inverse(X, p)
        B = _fmod(A[r0:r1, c1:T].astype(np.float64), p)
        newP = _fmod(Xinv @ B, p)
        k = r1 - r0
        m = A.shape[0]
        if self.single:
            if self.bound + k * self.sq >= self.safe:
                _loose(A[:, c1:T], p, out=A[:, c1:T])
                self.bound = 1.5 * p
            self.bound += k * self.sq
            P = _centered(newP, p)
            if r1 < m:
                A[r1:, c1:T] -= S[r1:, cols] @ P
            if not self.rank_only and r0 > 0:
                A[:r0, c1:T] -= S[:r0, cols] @ P
            A[r0:r1, c1:T] = P
            return
        if self.bound + k * self.sq >= self.safe:
            _fmod(A[:, c1:T], p, out=A[:, c1:T])
            self.bound = float(p)
        self.bound += k * self.sq
        single = k * self.sq < 2.0**24
        P = newP.astype(np.float32) if single else newP
        if r1 < m:
            L = S[r1:, cols]
            A[r1:, c1:T] -= (L.astype(np.float32) @ P) if single else (L @ P)
        if not self.rank_only and r0 > 0:
            L = S[:r0, cols]
            A[:r0, c1:T] -= (L.astype(np.float32) @ P) if single else (L @ P)
        A[r0:r1, c1:T] = newP

    def _permute(self, dst, src):
        """Row move ``A[dst] = A[src]`` (a permutation), mirrored on the saved panels."""
        A = self.A
        A[dst] = A[src]
        for S in self.saved:
            S[dst] = S[src]

    def _unblocked(self, c0, c1):
        """Eliminate columns [c0, c1) using small candidate row blocks.

        A few rows that are nonzero on the panel are echelonized directly;
        the resulting pivots are then cleared from every other row with a
        single matmul over the panel columns.  Repeats until no free row has
        a nonzero entry left on the panel.
        """
        A, p = self.A, self.p
        m = A.shape[0]
        w = c1 - c0
        found = set()
        while not self.done():
            r = self.rank
            live = np.flatnonzero(np.any(A[r:, c0:c1] != 0, axis=1))
            if len(live) == 0:
                return
            take = live[: 2 * w] + r
            h = len(take)
            if take[-1] != r + h - 1:
                block = set(range(r, r + h))
                chosen = set(int(i) for i in take)
                dst = list(range(r, r + h)) + [int(i) for i in take if int(i) not in block]
                src = [int(i) for i in take] + [i for i in range(r, r + h) if i not in chosen]
                self._permute(dst, src)
            B = A[r : r + h, c0:c1].astype(np.float64)
            piv = _tiny_echelon(B, p, found, c0)
            if self.stop_at is not None:
                piv = piv[: self.stop_at - r]
            k = len(piv)
            order = list(range(h))
            for t, (i, c) in enumerate(piv):
                order[t], order[i] = order[i], order[t]
            if order != list(range(h)):
                self._permute(list(range(r, r + h)), [r + i for i in order])
            cols = np.asarray([c for _, c in piv], dtype=np.int64)
            panel = A[:, c0:c1]
            X = panel[r : r + k][:, cols].astype(np.float64)
            newP = _fmod(_small_inverse(X, p) @ panel[r : r + k].astype(np.float64), p)
            newP = _centered(newP, p) if A.dtype == np.float32 else newP
            if r + k < m:
                panel[r + k :] = _reduce(panel[r + k :] - panel[r + k :, cols] @ newP, p)
            if not self.rank_only and r > 0:
                panel[:r] = _reduce(panel[:r] - panel[:r, cols] @ newP, p)
            panel[r : r + k] = newP
            self.rank += k
            for c in cols:
                found.add(int(c))
                self.pivcols.append(int(c) + c0)


def _tiny_echelon(B, p, skip, offset):
    """Greedy row-echelon pivots of a small block, as (row, col) pairs.

    Columns in ``skip`` (relative to ``offset``) already carry pivots.
    Works on an int64 copy of ``B``.
    """
    B = np.asarray(B, dtype=np.int64) % p
    h, w = B.shape
    out = []
    rows = list(range(h))
    for c in range(w):
        if c in skip or not rows:
            continue
        col = B[rows, c]
        nz = np.flatnonzero(col)
        if not len(nz):
            continue
        i = rows[int(nz[0])]
        rows.remove(i)
        B[i] = B[i] * pow(int(B[i, c]), p - 2, p) % p
        others = [rows[t] for t in range(len(rows)) if B[rows[t], c]]
        if others:
            B[others] = (B[others] - B[others, c][:, None] * B[i][None, :]) % p
        out.append((i, c))
    return _swap_targets(out)


def _swap_targets(piv):
    """Rewrite row indices so the sequential swaps ``(t, row_t)`` land right."""
    perm = list(range(max((i for i, _ in piv), default=-1) + len(piv) + 1))
    res = []
    for t, (i, c) in enumerate(piv):
        cur = perm.index(i)
        res.append((cur, c))
        perm[t], perm[cur] = perm[cur], perm[t]
    return res


def _small_inverse(X, p):
    k = X.shape[0]
    if k == 0:
        return X.copy()
    M = np.hstack([_fmod(np.asarray(X, dtype=np.float64), p), np.eye(k)])
    if k <= 48:
        B = M.astype(np.int64)
        for c in range(k):
            nz = np.flatnonzero(B[c:, c])
            if len(nz) == 0:
                raise ZeroDivisionError("pivot block is singular")
            i = c + int(nz[0])
            if i != c:
                B[[c, i]] = B[[i, c]]
            B[c] = B[c] * pow(int(B[c, c]), p - 2, p) % p
            f = B[:, c].copy()
            f[c] = 0
            B -= f[:, None] * B[c][None, :]
            B %= p
        return B[:, k:].astype(np.float64)
    st = _EchelonState(M, p, False, None)
    st.run((2 * k, 32))
    if st.rank < k or sorted(st.pivcols[:k]) != list(range(k)):
        raise ZeroDivisionError("pivot block is singular")
    order = np.argsort(st.pivcols)
    return _fmod(M[:k][order][:, k:], p)


class GenericLinAlg:
    """Object-array linear algebra over any ``Field`` (rationals, large p)."""

    def __init__(self, field):
        self.field = field
        self.p = field.characteristic or None
        self.dtype = object

    def array(self, data):
        a = np.asarray(data, dtype=object)
        f = self.field
        return np.vectorize(f.coerce, otypes=[object])(a) if a.size else a.astype(object)

    def zeros(self, shape):
        a = np.empty(shape, dtype=object)
        a.fill(self.field.zero)
        return a

    def eye(self, n):
        a = self.zeros((n, n))
        for i in range(n):
            a[i, i] = self.field.one
        return a

    def from_raw(self, value):
        return self.field.coerce(value)

    def to_raw(self, value):
        return self.field.coerce(value)

    def compact(self, a):
        return a

    def expand(self, a):
        return a

    def _map(self, fn, a):
        if a.size == 0:
            return a.copy()
        return np.vectorize(fn, otypes=[object])(a)

    def reduce(self, a):
        return self._map(self.field.coerce, a)

    def neg(self, a):
        return self._map(self.field.neg, a)

    def add(self, a, b):
        return self.reduce(a + b)

    def sub(self, a, b):
        return self.reduce(a - b)

    def scale(self, c, a):
        c = self.field.coerce(c)
        return self._map(lambda v: self.field.mul(c, v), a)

    def inv_scalar(self, c):
        return self.field.inv(self.field.coerce(c))

    def matmul(self, a, b):
        a = np.asarray(a, dtype=object)
        b = np.asarray(b, dtype=object)
        if a.shape[-1] == 0:
            return self.zeros(a.shape[:-1] + b.shape[-1:])
        return self.reduce(a.dot(b))

    def is_zero(self, a):
        return all(self.field.is_zero(v) for v in np.asarray(a).ravel())

    def rref(self, a, rank_only: bool = False, stop_at: int | None = None):
        a = np.asarray(a, dtype=object)
        m, n = a.shape
        if m == 0 or n == 0:
            return self.zeros((0, n)), []
        if flint is not None:
            R, piv = self._flint_rref(a)
        else:  # pragma: no cover
            R, piv = self._python_rref(a)
        return R, piv

    def _flint_rref(self, a):
        f = self.field
        if f.characteristic == 0:
            M = flint.fmpq_mat(a.shape[0], a.shape[1],
                               [flint.fmpq(v.numerator, v.denominator) for v in a.ravel()])
            R, rk = M.rref()
            conv = lambda e: Fraction(int(e.p), int(e.q))
        else:
            M = flint.nmod_mat(a.shape[0], a.shape[1], [int(v) for v in a.ravel()], f.characteristic)
            R, rk = M.rref()
            conv = lambda e: int(e)
        rows = [[conv(R[i, j]) for j in range(a.shape[1])] for i in range(rk)]
        out = np.empty((rk, a.shape[1]), dtype=object)
        piv = []
        for i, row in enumerate(rows):
            out[i, :] = row
            piv.append(next(j for j, v in enumerate(row) if v != 0))
        return out, piv

    def _python_rref(self, a):  # pragma: no cover - fallback without flint
        f = self.field
        A = [list(r) for r in a]
        m, n = len(A), len(A[0])
        piv, r = [], 0
        for c in range(n):
            i = next((i for i in range(r, m) if not f.is_zero(A[i][c])), None)
            if i is None:
                continue
            A[r], A[i] = A[i], A[r]
            inv = f.inv(A[r][c])
            A[r] = [f.mul(inv, v) for v in A[r]]
            for i in range(m):
                if i != r and not f.is_zero(A[i][c]):
                    fac = A[i][c]
                    A[i] = [f.sub(x, f.mul(fac, y)) for x, y in zip(A[i], A[r])]
            piv.append(c)
            r += 1
        out = np.empty((r, n), dtype=object)
        for i in range(r):
            out[i, :] = A[i]
        return out, piv

    def rank(self, a, stop_at=None, overwrite=False):
        return len(self.rref(a)[1])

    def inverse(self, a):
        a = np.asarray(a, dtype=object)
        n = a.shape[0]
        R, piv = self.rref(np.hstack([a, self.eye(n)]))
        if piv[:n] != list(range(n)) or len(piv) < n:
            raise ZeroDivisionError("singular matrix")
        return R[:n, n:]

    def kernel(self, a):
        a = np.asarray(a, dtype=object)
        n = a.shape[1]
        if a.shape[0] == 0:
            return self.eye(n)
        R, piv = self.rref(a)
        return self._kernel_from_rref(R, piv, n)

    def _kernel_from_rref(self, R, piv, n):
        free = [j for j in range(n) if j not in set(piv)]
        K = self.zeros((len(free), n))
        for t, fcol in enumerate(free):
            K[t, fcol] = self.field.one
            for i, pc in enumerate(piv):
                K[t, pc] = self.field.neg(R[i, fcol])
        return K

    def left_kernel(self, a):
        return self.kernel(np.asarray(a, dtype=object).T)

    def row_basis(self, a):
        return self.rref(a)


def engine_for(field):
    """Pick the fastest exact engine for ``field``."""
    p = field.characteristic
    if p and p < 2**20:
        return ModPLinAlg(p)
    return GenericLinAlg(field)
