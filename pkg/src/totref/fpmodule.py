"""Finitely presented modules over a quotient ring and their resolutions.

Everything is computed piece by piece on the internal grading: a module is
realized as finite-dimensional k-spaces M_j with matrices for the action of
each variable M_j -> M_{j+1}.  Ungraded input falls back to a single piece
(``step == 0``) holding the whole module.

Vectors are rows; a free module F = ⊕ R(-a_i) stores its piece F_j with the
generators sorted by degree and, inside a generator, the standard monomials
of R_{j-a_i} in ring order.
"""

from __future__ import annotations

import threading
from collections import Counter, defaultdict
from dataclasses import dataclass, field

import numpy as np

from .errors import NotArtinian, NotGraded
from .groebner import PolyMatrix
from .quotient import QuotientRing

DEFAULT_BOUND = 6
DEFAULT_DEGREE_BOUND = 12


# -- graded spaces with a variable action ------------------------------------

class FreeModule:
    """F = ⊕ R(-a_i) realized on the pieces of R."""

    def __init__(self, pieces, degrees, max_degree=None):
        self.pieces = pieces
        self.la = pieces.la
        self.step = pieces.step
        degrees = list(degrees)
        # generator g of the sorted layout is input generator order[g]
        self.order = sorted(range(len(degrees)), key=lambda i: degrees[i]) if self.step else list(range(len(degrees)))
        self.degrees = [degrees[i] for i in self.order] if self.step else [0] * len(degrees)
        self.rank = len(degrees)
        self.max_degree = max_degree
        groups = Counter(self.degrees)
        self.groups = []  # (degree, count, first generator index)
        start = 0
        for a in sorted(groups):
            self.groups.append((a, groups[a], start))
            start += groups[a]
        self._layout = {}

    def layout(self, j):
        """Segments of piece j: list of (degree a, count, first gen, offset, ring degree)."""
        if j not in self._layout:
            segs = []
            off = 0
            for a, n, g0 in self.groups:
                d = j - a if self.step else 0
                dim = self.pieces.dim(d)
                if dim:
                    segs.append((a, n, g0, off, d))
                    off += n * dim
            self._layout[j] = (segs, off)
        return self._layout[j]

    def dim(self, j):
        if self.max_degree is not None and j > self.max_degree:
            return 0
        return self.layout(j)[1]

    def piece_range(self):
        if not self.rank:
            return range(0)
        if not self.step:
            return range(0, 1)
        lo = self.degrees[0]
        hi = self.degrees[-1] + self.pieces.top
        if self.max_degree is not None:
            hi = min(hi, self.max_degree)
        return range(lo, hi + 1)

    def act(self, v, j, X):
        """Multiply the rows of X (vectors in F_j) by variable ``v``."""
        la = self.la
        t = j + self.step
        segs_t, dim_t = self.layout(t)
        rows = X.shape[0]
        out = la.zeros((rows, dim_t))
        if rows == 0 or dim_t == 0:
            return out
        dst = {a: (off, d) for a, n, g0, off, d in segs_t}
        for a, n, g0, off, d in self.layout(j)[0]:
            if a not in dst:
                continue
            doff, dd = dst[a]
            src_dim = self.pieces.dim(d)
            dst_dim = self.pieces.dim(dd)
            Mv = self.pieces.mult(v, d)
            block = X[:, off : off + n * src_dim].reshape(rows * n, src_dim)
            out[:, doff : doff + n * dst_dim] = la.matmul(block, Mv).reshape(rows, n * dst_dim)
        return out

    def act_mixed(self, j, X, coeffs, out=None):
        """Σ_v diag(coeffs[v]) · (v·X) for rows X of F_j, in one batched product per group.

        ``coeffs[v]`` is a column of scalars, one per row of X.
        """
        la = self.la
        t = j + self.step
        segs_t, dim_t = self.layout(t)
        rows = X.shape[0]
        if out is None:
            out = la.zeros((rows, dim_t))
        else:
            out[...] = 0
        if rows == 0 or dim_t == 0:
            return out
        dst = {a: (off, d) for a, n, g0, off, d in segs_t}
        for a, n, g0, off, d in self.layout(j)[0]:
            if a not in dst:
                continue
            doff, dd = dst[a]
            src_dim = self.pieces.dim(d)
            dst_dim = self.pieces.dim(dd)
            mix = None
            for v, c in enumerate(coeffs):
                term = c.reshape(rows, 1, 1) * self.pieces.mult(v, d)[None, :, :]
                mix = term if mix is None else mix + term
            mix = la.reduce(mix)
            block = X[:, off : off + n * src_dim].reshape(rows, n, src_dim)
            prod = la.reduce(np.matmul(block, mix))
            out[:, doff : doff + n * dst_dim] = prod.reshape(rows, n * dst_dim)
        return out

    def row_parents(self, j):
        """Per row of F_j: ('gen', generator index) or ('child', variable, parent row in F_{j-step}).

        Also returns each row's monomial degree (used to order the ungraded case).
        """
        out = []
        mdeg = []
        src_segs = {a: off for a, n, g0, off, d in self.layout(j - self.step)[0]} if self.step else None
        for a, n, g0, off, d in self.layout(j)[0]:
            par = self.pieces.parents(d)
            basis = self.pieces.basis[d]
            dim = len(basis)
            src_dim = self.pieces.dim(d - self.step) if self.step else dim
            for g in range(n):
                for idx, info in enumerate(par):
                    mdeg.append(sum(basis[idx]))
                    if info is None:
                        out.append(("gen", g0 + g))
                    else:
                        v, _, pidx = info
                        base = src_segs[a] if self.step else off
                        out.append(("child", v, base + g * src_dim + pidx))
        return out, mdeg

    def unit_coordinates(self, j):
        """Coordinates of F_j that carry the monomial 1 of some generator."""
        cols = []
        for a, n, g0, off, d in self.layout(j)[0]:
            basis = self.pieces.basis[d]
            for idx, m in enumerate(basis):
                if not any(m):
                    cols.extend(off + g * len(basis) + idx for g in range(n))
        return cols

    def element(self, j, vec):
        """A vector of F_j as a list of polynomials (one per generator)."""
        S = self.pieces.ring.S
        comps = [dict() for _ in range(self.rank)]
        vec = np.asarray(vec).ravel()
        for a, n, g0, off, d in self.layout(j)[0]:
            basis = self.pieces.basis[d]
            for g in range(n):
                for idx, m in enumerate(basis):
                    c = self.la.to_raw(vec[off + g * len(basis) + idx])
                    if c:
                        comps[g0 + g][m] = c
        return [S.from_terms(c) for c in comps]


class RealizedModule:
    """A module given by its pieces and explicit action matrices."""

    def __init__(self, la, step, dims: dict, actions: dict, name=""):
        self.la = la
        self.step = step
        self.dims = {j: d for j, d in dims.items() if d}
        self.actions = actions  # (v, j) -> matrix dims[j] x dims[j+step]
        self.name = name
        self.nvars = None

    def dim(self, j):
        return self.dims.get(j, 0)

    def piece_range(self):
        if not self.dims:
            return range(0)
        return range(min(self.dims), max(self.dims) + 1)

    @property
    def length(self):
        return sum(self.dims.values())

    def act_matrix(self, v, j):
        A = self.actions.get((v, j))
        if A is None:
            return self.la.zeros((self.dim(j), self.dim(j + self.step)))
        return A

    def act(self, v, j, X):
        if X.shape[0] == 0 or self.dim(j + self.step) == 0 or self.dim(j) == 0:
            return self.la.zeros((X.shape[0], self.dim(j + self.step)))
        return self.la.matmul(X, self.act_matrix(v, j))

    def total_actions(self, nvars):
        """Full action matrices on M (ungraded view), with piece offsets."""
        la = self.la
        order = sorted(self.dims)
        offs = {}
        o = 0
        for j in order:
            offs[j] = o
            o += self.dims[j]
        mats = []
        for v in range(nvars):
            A = la.zeros((o, o))
            for j in order:
                t = j + self.step
                if t in offs:
                    A[offs[j] : offs[j] + self.dims[j], offs[t] : offs[t] + self.dims[t]] = self.act_matrix(v, j)
            mats.append(A)
        return mats, offs


def _subspace_basis(la, rows):
    if rows.shape[0] == 0:
        return rows
    R, piv = la.rref(rows)
    return R


def _complement(la, K, mK):
    """Rows of K spanning a complement of span(mK) inside span(K)."""
    if K.shape[0] == 0:
        return K
    if mK is None or mK.shape[0] == 0:
        R, _ = la.rref(K)
        return R
    R1, piv1 = la.rref(mK)
    if not piv1:
        R, _ = la.rref(K)
        return R
    Kred = la.sub(K, la.matmul(K[:, piv1], R1))
    R2, piv2 = la.rref(Kred)
    return R2


# -- resolutions -------------------------------------------------------------

@dataclass
class BettiTable:
    graded: dict = field(default_factory=dict)  # (i, j) -> count

    def totals(self, N=None):
        top = max((i for i, _ in self.graded), default=-1) if N is None else N
        out = [0] * (top + 1)
        for (i, j), b in self.graded.items():
            if i <= top:
                out[i] += b
        return out

    def row(self, i):
        return {j: b for (ii, j), b in sorted(self.graded.items()) if ii == i and b}

    def to_dict(self):
        table = defaultdict(dict)
        for (i, j), b in sorted(self.graded.items()):
            if b:
                table[str(i)][str(j)] = b
        return dict(table)


@dataclass
class Level:
    degrees: list  # generator degrees of F_i
    images: dict  # piece j -> matrix whose rows are d_i(e) for generators of degree j (in F_{i-1} or M)


class Resolution:
    """Minimal graded free resolution F_N -> ... -> F_0 -> M."""

    def __init__(self, module, ring, pieces, bound, partial=False, degree_bound=None):
        self.module = module
        self.ring = ring
        self.pieces = pieces
        self.bound = bound
        self.levels: list[Level] = []
        self.betti = BettiTable()
        self.partial = partial
        self.degree_bound = degree_bound
        self.checks: dict = {"d_squared_zero": True, "minimal": True, "exact": True}

    @property
    def betti_numbers(self):
        return self.betti.totals(self.bound)

    def free(self, i) -> FreeModule:
        return FreeModule(self.pieces, self.levels[i].degrees, self.degree_bound)

    def differential(self, i) -> PolyMatrix:
        """d_i : F_i -> F_{i-1} as a polynomial matrix (i >= 1)."""
        S = self.ring.S
        src = self.levels[i]
        tgt = self.free(i - 1)
        cols = []
        for j in sorted(src.images):
            Y = src.images[j]
            for r in range(Y.shape[0]):
                cols.append(tgt.element(j, Y[r]))
        if not cols:
            return PolyMatrix(S, [[] for _ in range(tgt.rank)])
        return PolyMatrix.from_columns(S, cols, tgt.rank)


def _generator_vectors(la, M, j, mK_rows):
    """Minimal generators of a realized module in piece j (rows of identity mod 𝔪M)."""
    dim = M.dim(j)
    K = la.eye(dim)
    return _complement(la, K, mK_rows)


def resolve(M, pieces, bound: int, degree_bound=None, full_last=False, progress=None) -> Resolution:
    """Minimal free resolution of the realized module ``M`` up to F_bound.

    ``pieces`` are the ring's graded pieces (truncated when R is not artinian,
    in which case ``degree_bound`` caps every internal degree).  The last
    level only gets counted unless ``full_last`` asks for its maps too.
    """
    la = pieces.la
    step = pieces.step
    rng = np.random.default_rng(20240601)
    res = Resolution(M, pieces.ring, pieces, bound, partial=degree_bound is not None, degree_bound=degree_bound)

    def in_range(j):
        return degree_bound is None or j <= degree_bound

    # level 0: minimal generators of M
    images = {}
    degrees = []
    prev_K = None
    prev_j = None
    for j in M.piece_range():
        if not in_range(j):
            break
        dim = M.dim(j)
        if dim == 0:
            prev_K, prev_j = None, j
            continue
        mK = None
        if step and prev_K is not None and prev_j == j - 1:
            parts = [M.act(v, j - 1, prev_K) for v in range(pieces.nvars)]
            mK = np.vstack(parts)
        elif not step:
            parts = [M.act_matrix(v, j) for v in range(pieces.nvars)]
            mK = np.vstack(parts) if parts else None
        gens = _complement(la, la.eye(dim), mK)
        if gens.shape[0]:
            images[j] = gens
            degrees += [j] * gens.shape[0]
            res.betti.graded[(0, j)] = gens.shape[0]
        prev_K, prev_j = la.eye(dim), j
    res.levels.append(Level(degrees, images))
    target = M
    prev_kernel_dims = None
    for i in range(1, bound + 1):
        if not degrees:
            break
        F = FreeModule(pieces, degrees, degree_bound)
        last = i == bound and not full_last
        new_images = {}
        new_degrees = []
        kernel_dims = {}
        D_prev = None
        K_prev = None
        K_prev_full = False
        for j in F.piece_range():
            if not in_range(j):
                break
            rows = F.dim(j)
            if rows == 0:
                D_prev, K_prev, K_prev_full = None, None, False
                continue
            cols = target.dim(j)
            D = _build_piece(la, F, target, images, j, D_prev)
            # kernel of d restricted to F_j
            if cols == 0:
                K = None
                K_full = True
                kdim = rows
            else:
                K = la.left_kernel(D)
                K_full = False
                kdim = K.shape[0]
            kernel_dims[j] = kdim
            # exactness at the previous spot: image of F_i in F_{i-1} equals the old kernel
            if prev_kernel_dims is not None:
                rank = rows - kdim
                if prev_kernel_dims.get(j, 0) != rank:
                    res.checks["exact"] = False
            # generators of K_j modulo 𝔪K_j
            if step:
                prev_full = K_prev_full and (j - 1) in kernel_dims
                count, gens = _new_generators(la, F, j, K, kdim, K_prev, prev_full, pieces.nvars, not last, rng)
            else:
                basis = la.eye(rows) if K_full else K
                mK = np.vstack([F.act(v, j, basis) for v in range(pieces.nvars)]) if basis.shape[0] else la.zeros((0, rows))
                if last:
                    count, gens = kdim - (la.rank(mK) if mK.shape[0] else 0), None
                else:
                    gens = _complement(la, basis, mK)
                    count = gens.shape[0]
            if not last:
                if count:
                    # minimality: no generator component is a unit
                    unit = F.unit_coordinates(j)
                    if unit and not la.is_zero(gens[:, unit]):
                        res.checks["minimal"] = False
                    # d∘d = 0 on the new generators
                    if cols and not la.is_zero(la.matmul(gens, D)):
                        res.checks["d_squared_zero"] = False
                    new_images[j] = la.compact(gens)
            if count:
                new_degrees += [j] * count
                res.betti.graded[(i, j)] = count
            D_prev = D
            if K is not None and K.size > 10**7:
                K = la.compact(K)
            K_prev, K_prev_full = (K, K_full)
            if progress:
                progress(i, j, rows, cols, count)
        res.levels.append(Level(new_degrees, new_images))
        prev_kernel_dims = kernel_dims
        images = {j: la.expand(Y) for j, Y in new_images.items()}
        degrees = new_degrees
        target = F
    if degree_bound is not None:
        res.partial = True
    return res


_CHUNK = 2048


def _random_scalars(la, n, rng):
    bound = min(la.p or 10**6, 10**6)
    vals = rng.integers(1, bound, size=n) if bound > 2 else np.ones(n, dtype=np.int64)
    return la.array(vals.reshape(-1, 1))


def _compressed_products(la, F, j, K_prev, nvars, rng):
    """Σ_v diag(c_v)·(v·K_prev): as many rows as K_prev, all inside 𝔪K_j.

    Built in the echelon engine's working dtype so the rank needs no copy.
    """
    n = K_prev.shape[0]
    dtype = getattr(la, "work", None) or la.dtype
    out = np.empty((n, F.dim(j)), dtype=dtype) if dtype != object else la.zeros((n, F.dim(j)))
    coeffs = [_random_scalars(la, n, rng) for _ in range(nvars)]
    for s in range(0, n, _CHUNK):
        block = la.expand(K_prev[s : s + _CHUNK])
        out[s : s + _CHUNK] = F.act_mixed(j - 1, block, [c[s : s + _CHUNK] for c in coeffs])
    return out


def _full_products(la, F, j, K_prev, nvars):
    parts = []
    for v in range(nvars):
        for s in range(0, K_prev.shape[0], _CHUNK):
            parts.append(F.act(v, j - 1, la.expand(K_prev[s : s + _CHUNK])))
    return np.vstack(parts)


def _new_generators(la, F, j, K, kdim, K_prev, prev_full, nvars, need, rng):
    """Count (and, if ``need``, pick) generators of K_j modulo 𝔪K_j = Σ_v v·K_{j-1}.

    ``K`` is None when K_j is all of F_j; ``prev_full`` says the same of K_{j-1}.
    """
    rows = F.dim(j)
    if kdim == 0:
        return 0, None
    basis = K
    if prev_full:
        # v·F_{j-1} fills every coordinate except the degree-0 monomials of the generators
        unit = F.unit_coordinates(j)
        if not need:
            return kdim - (rows - len(unit)), None
        if not unit:
            return 0, None
        if basis is None:
            return len(unit), la.eye(rows)[unit]
        rest = [c for c in range(rows) if c not in set(unit)]
        perm = unit + rest
        R, piv = la.rref(basis[:, perm])
        keep = [r for r, c in enumerate(piv) if c < len(unit)]
        gens = la.zeros((len(keep), rows))
        gens[:, perm] = R[keep]
        return len(keep), gens
    if basis is None:
        basis = la.eye(rows)
    if K_prev is None or K_prev.shape[0] == 0:
        return kdim, (_subspace_basis(la, basis) if need else None)
    if K_prev.shape[0] >= kdim:
        # a random combination usually fills K_j already; a full rank certifies it
        Y = _compressed_products(la, F, j, K_prev, nvars, rng)
        if la.rank(Y, stop_at=kdim, overwrite=True) == kdim:
            return 0, (la.zeros((0, rows)) if need else None)
        del Y
    mK = _full_products(la, F, j, K_prev, nvars)
    if not need:
        return kdim - la.rank(mK, overwrite=True), None
    gens = _complement(la, basis, mK)
    return gens.shape[0], gens


def _build_piece(la, F, target, images, j, D_prev):
    """Matrix of d : F_j -> target_j (rows indexed by the basis of F_j)."""
    rows = F.dim(j)
    cols = target.dim(j)
    D = la.zeros((rows, cols))
    if cols == 0:
        return D
    info, mdeg = F.row_parents(j)
    gen_rows = [(r, t[1]) for r, t in enumerate(info) if t[0] == "gen"]
    # generator images sit in piece a_i of the target
    if F.step:
        if D_prev is None:
            D_prev = la.zeros((F.dim(j - 1), target.dim(j - 1)))
        deg_of = F.degrees
        by_deg = defaultdict(int)
        offsets = {}
        for g, a in enumerate(deg_of):
            offsets[g] = by_deg[a]
            by_deg[a] += 1
        for r, g in gen_rows:
            D[r] = images[deg_of[g]][offsets[g]]
        children = [(r, t[1], t[2]) for r, t in enumerate(info) if t[0] == "child"]
        byv = defaultdict(list)
        for r, v, src in children:
            byv[v].append((r, src))
        for v, lst in byv.items():
            rr = [r for r, _ in lst]
            ss = [s for _, s in lst]
            D[rr] = target.act(v, j - 1, D_prev[ss])
        return D
    # ungraded: one piece, fill layer by layer in monomial degree
    Y = images[0]
    for r, g in gen_rows:
        D[r] = Y[g]
    layers = defaultdict(lambda: defaultdict(list))
    for r, t in enumerate(info):
        if t[0] == "child":
            layers[mdeg[r]][t[1]].append((r, t[2]))
    for deg in sorted(layers):
        for v, lst in layers[deg].items():
            rr = [r for r, _ in lst]
            ss = [s for _, s in lst]
            D[rr] = target.act(v, 0, D[ss])
    return D


# -- finitely presented modules ----------------------------------------------

def infer_shifts(matrix: PolyMatrix):
    """Generator (row) and relation (column) degrees making every entry homogeneous.

    Returns ``(row_degrees, col_degrees)`` or ``None`` when no grading fits.
    The first row of each connected block is put in degree 0.
    """
    m, n = matrix.shape
    rdeg = [None] * m
    cdeg = [None] * n
    for i in range(m):
        for j in range(n):
            x = matrix.rows[i][j]
            if not x.is_zero() and not x.is_homogeneous():
                return None
    for start in range(m):
        if rdeg[start] is not None:
            continue
        rdeg[start] = 0
        stack = [("r", start)]
        while stack:
            kind, idx = stack.pop()
            if kind == "r":
                for j in range(n):
                    x = matrix.rows[idx][j]
                    if x.is_zero():
                        continue
                    want = rdeg[idx] + x.homogeneous_degree
                    if cdeg[j] is None:
                        cdeg[j] = want
                        stack.append(("c", j))
                    elif cdeg[j] != want:
                        return None
            else:
                for i in range(m):
                    x = matrix.rows[i][idx]
                    if x.is_zero():
                        continue
                    want = cdeg[idx] - x.homogeneous_degree
                    if rdeg[i] is None:
                        rdeg[i] = want
                        stack.append(("r", i))
                    elif rdeg[i] != want:
                        return None
    # zero columns carry no constraint; give them the largest row degree + 1
    top = max(rdeg) if rdeg else 0
    cdeg = [c if c is not None else top + 1 for c in cdeg]
    return rdeg, cdeg


class FPModule:
    """coker(P : R^c -> R^g) for a g×c matrix P over the quotient ring R."""

    def __init__(self, ring: QuotientRing, matrix, gen_degrees=None, name: str | None = None, graded=None):
        self.ring = ring
        S = ring.S
        if not isinstance(matrix, PolyMatrix):
            matrix = PolyMatrix(S, matrix)
        rows = [[ring.normal_form(x) for x in r] for r in matrix.rows]
        nrows = matrix.nrows if matrix.nrows else (len(gen_degrees) if gen_degrees else 0)
        self.matrix = PolyMatrix(S, rows) if rows else PolyMatrix(S, [])
        self.ngens = nrows
        self.name = name
        self._lock = threading.Lock()
        self._real = None
        self._res: dict = {}
        shifts = infer_shifts(self.matrix) if self.matrix.nrows else ([0] * nrows, [])
        if gen_degrees is not None and shifts is not None:
            # honour explicit degrees when they are consistent
            delta = gen_degrees[0] - shifts[0][0] if shifts[0] else 0
            if [d + delta for d in shifts[0]] == list(gen_degrees):
                shifts = (list(gen_degrees), [d + delta for d in shifts[1]])
        if graded is False or not ring.graded:
            shifts = None
        self.graded = shifts is not None
        self.gen_degrees = shifts[0] if shifts else [0] * nrows
        self.rel_degrees = shifts[1] if shifts else [0] * self.matrix.ncols

    # constructors
    @classmethod
    def free(cls, ring, rank=1, degrees=None, name=None):
        S = ring.S
        m = cls(ring, PolyMatrix(S, [[] for _ in range(rank)]), gen_degrees=degrees or [0] * rank, name=name)
        m.ngens = rank
        m.gen_degrees = list(degrees or [0] * rank)
        return m

    @classmethod
    def cyclic(cls, ring, gens, name=None):
        """R/(gens)."""
        S = ring.S
        gens = [S.coerce(g) for g in gens]
        gens = [g for g in gens if not ring.is_zero(g)]
        if not gens:
            return cls.free(ring, 1, name=name)
        return cls(ring, PolyMatrix(S, [gens]), name=name)

    @classmethod
    def residue_field(cls, ring, name="k"):
        if name != "k":
            return cls.cyclic(ring, ring.S.gens(), name=name)
        with ring._lock:
            k = getattr(ring, "_residue_module", None)
            if k is None:
                k = ring._residue_module = cls.cyclic(ring, ring.S.gens(), name=name)
        return k

    def __repr__(self):
        return f"FPModule({self.name or ''} coker {self.matrix} over {self.ring.name or 'R'})"

    # realization
    def pieces(self, degree_bound=None):
        R = self.ring
        if R.artinian:
            if self.graded:
                return R.pieces()
            return _ungraded_pieces(R)
        if not self.graded:
            raise NotArtinian("module realization", "non-graded input over a positive-dimensional ring")
        return R.pieces(degree_bound or DEFAULT_DEGREE_BOUND)

    def realize(self, degree_bound=None) -> RealizedModule:
        with self._lock:
            key = degree_bound if not self.ring.artinian else None
            if self._real is None or self._real[0] != key:
                self._real = (key, self._realize(degree_bound))
            return self._real[1]

    def _realize(self, degree_bound):
        P = self.pieces(degree_bound)
        la = P.la
        F = FreeModule(P, self.gen_degrees, degree_bound if not self.ring.artinian else None)
        self._free = F
        # relation images as vectors of F in their degree
        rel = defaultdict(list)
        for c in range(self.matrix.ncols):
            col = self.matrix.column(c)
            j = self.rel_degrees[c] if self.graded else 0
            rel[j].append(_vector_in_free(F, j, col))
        G = FreeModule(P, [self.rel_degrees[c] if self.graded else 0 for c in range(self.matrix.ncols)],
                       F.max_degree)
        gimages = {j: np.vstack(v) for j, v in rel.items()}
        dims, proj = {}, {}
        D_prev = None
        for j in F.piece_range():
            rows = F.dim(j)
            if rows == 0:
                D_prev = None
                continue
            if G.dim(j):
                Dg = _build_piece(la, G, F, gimages, j, D_prev if P.step else None)
                U, piv = la.rref(Dg)
            else:
                Dg = None
                U, piv = la.zeros((0, rows)), []
            D_prev = Dg
            free_cols = [c for c in range(rows) if c not in set(piv)]
            proj[j] = (U, piv, free_cols)
            dims[j] = len(free_cols)
        actions = {}
        for j in proj:
            U, piv, free = proj[j]
            t = j + P.step
            if not free or t not in proj or not proj[t][2]:
                continue
            basis = la.eye(F.dim(j))[free]
            for v in range(P.nvars):
                img = F.act(v, j, basis)
                actions[(v, j)] = _project(la, img, proj[t])
        M = RealizedModule(la, P.step, dims, actions, name=self.name or "")
        M.nvars = P.nvars
        M.proj = proj
        M.free = F
        return M

    def project(self, j, X):
        """Image in M_j of vectors of F_j."""
        M = self.realize()
        return _project(self.ring.la, X, M.proj[j])

    @property
    def length(self) -> int:
        if not self.ring.artinian:
            raise NotArtinian("length")
        return self.realize().length

    @property
    def nu(self) -> int:
        return self.resolution(0).betti_numbers[0]

    def resolution(self, bound=DEFAULT_BOUND, degree_bound=None, maps=False, progress=None) -> Resolution:
        """Minimal resolution up to F_bound; ``maps`` keeps the last differential as well."""
        if not self.ring.artinian and degree_bound is None:
            degree_bound = DEFAULT_DEGREE_BOUND
        dkey = degree_bound if not self.ring.artinian else None
        key = (bound, dkey, maps)
        with self._lock:
            for (b, d, full), res in self._res.items():
                if d == dkey and (b > bound or (b == bound and (full or not maps))):
                    return res
        M = self.realize(degree_bound)
        res = resolve(M, self.pieces(degree_bound), bound, dkey, full_last=maps, progress=progress)
        with self._lock:
            self._res[key] = res
        return res

    def betti(self, bound=DEFAULT_BOUND, degree_bound=None):
        return self.resolution(bound, degree_bound).betti_numbers

    def annihilated_by_square_of_max_ideal(self) -> bool:
        """𝔪²M = 0, i.e. every product of two variables kills M."""
        if not self.ring.artinian:
            raise NotArtinian("has_minimal_multiplicity", "reduce to an artinian ring first")
        M = self.realize()
        la = M.la
        n = self.ring.nvars
        for j in M.piece_range():
            if not M.dim(j):
                continue
            for v in range(n):
                A = M.act_matrix(v, j)
                for w in range(v, n):
                    B = M.act_matrix(w, j + M.step)
                    if A.shape[1] and B.shape[0] and not la.is_zero(la.matmul(A, B)):
                        return False
        return True

    def minimized(self) -> "FPModule":
        return minimize_presentation(self)


def _ungraded_pieces(R):
    key = "ungraded"
    with R._lock:
        if key not in R._pieces:
            from .quotient import GradedPieces
            R._pieces[key] = GradedPieces(R, R.standard_monomials_by_degree(), None, False, False)
        return R._pieces[key]


def _vector_in_free(F, j, column):
    """Coordinates in F_j of a column (list of polynomials, one per generator)."""
    la = F.la
    vec = la.zeros((F.dim(j),))
    segs, _ = F.layout(j)
    pieces = F.pieces
    for a, n, g0, off, d in segs:
        basis_index = pieces.index[d]
        size = pieces.dim(d)
        for g in range(n):
            f = column[F.order[g0 + g]]
            for e, c in f.terms.items():
                k = basis_index.get(e)
                if k is None:
                    if pieces.truncated:
                        continue
                    raise ValueError(f"entry {f} is not homogeneous of the expected degree")
                vec[off + g * size + k] = la.from_raw(c)
    return vec


def _project(la, X, proj):
    U, piv, free = proj
    if X.shape[0] == 0:
        return la.zeros((0, len(free)))
    if piv:
        X = la.sub(X, la.matmul(X[:, piv], U))
    return X[:, free]


# -- operations ----------------------------------------------------------------

def minimize_presentation(M: FPModule) -> FPModule:
    """Remove unit entries by row/column elimination (first unit in row-major order)."""
    R = M.ring
    S = R.S
    f = S.field
    rows = [list(r) for r in M.matrix.rows]
    gdeg = list(M.gen_degrees)
    rdeg = list(M.rel_degrees)
    while True:
        pos = None
        for i, r in enumerate(rows):
            for j, x in enumerate(r):
                if not x.is_zero() and x.is_constant():
                    pos = (i, j)
                    break
            if pos:
                break
        if pos is None:
            break
        i, j = pos
        u = rows[i][j].constant_term()
        inv = f.inv(u)
        # generator i is expressed through the others: e_i = -u^{-1} Σ_{k≠i} P_kj e_k
        new_rows = []
        for k, r in enumerate(rows):
            if k == i:
                continue
            factor = r[j].scale(inv)
            nr = []
            for c, x in enumerate(r):
                if c == j:
                    continue
                y = x - factor * rows[i][c]
                nr.append(R.normal_form(y))
            new_rows.append(nr)
        rows = new_rows
        gdeg.pop(i)
        rdeg.pop(j)
    ncols = len(rdeg)
    # drop zero columns
    keep = [c for c in range(ncols) if any(not r[c].is_zero() for r in rows)]
    rows = [[r[c] for c in keep] for r in rows]
    rdeg = [rdeg[c] for c in keep]
    out = FPModule(R, PolyMatrix(S, rows) if rows else PolyMatrix(S, []), gen_degrees=gdeg or None, name=M.name)
    out.ngens = len(gdeg)
    if not rows:
        out.gen_degrees = []
    return out


def minimize_and_nu(M: FPModule):
    mini = minimize_presentation(M)
    nu = M.nu
    length = M.length if M.ring.artinian else float("inf")
    return mini, nu, length


def min_resolution(M: FPModule, N: int = DEFAULT_BOUND, degree_bound=None) -> Resolution:
    return M.resolution(N, degree_bound)


def from_realization(ring: QuotientRing, Mr: RealizedModule, name=None) -> FPModule:
    """Present a realized module: minimal generators plus their first syzygies."""
    pieces = ring.pieces() if Mr.step else _ungraded_pieces(ring)
    res = resolve(Mr, pieces, 1, full_last=True)
    if not res.levels[0].degrees:
        return FPModule(ring, PolyMatrix(ring.S, []), name=name)
    mat = res.differential(1) if len(res.levels) > 1 and res.levels[1].degrees else None
    degs = res.levels[0].degrees
    if mat is None or mat.ncols == 0:
        out = FPModule.free(ring, len(degs), degs if Mr.step else None, name=name)
        return out
    out = FPModule(ring, mat, gen_degrees=degs if Mr.step else None, name=name,
                   graded=None if Mr.step else False)
    return out


def _hom_realized(M: FPModule, N: FPModule):
    """Hom_R(M, N) realized: φ ↦ (φ(e_1), ..., φ(e_g)) with P^T-constraints.

    Returns the realized module and, per piece t, the basis rows in
    ⊕_i N_{a_i + t} together with the coordinate layout.
    """
    R = M.ring
    if not R.artinian:
        raise NotArtinian("hom_module")
    la = R.la
    Nr = N.realize()
    graded = M.graded and N.graded and Nr.step == 1
    step = 1 if graded else 0
    g = M.ngens
    a = M.gen_degrees if graded else [0] * g
    b = M.rel_degrees if graded else [0] * M.matrix.ncols
    # multiplication by a ring element on N, from piece j to piece j + deg
    n_pieces = sorted(Nr.dims) if Nr.dims else []

    def mult_on_N(f, j):
        """Matrix of multiplication by polynomial f (homogeneous if graded) on N_j."""
        src = Nr.dim(j)
        if graded:
            d = f.homogeneous_degree if not f.is_zero() else 0
            tgt = j + d
        else:
            d, tgt = 0, 0
        out = la.zeros((src, Nr.dim(tgt)))
        if f.is_zero() or not src or not Nr.dim(tgt):
            return out, tgt
        for e, c in f.terms.items():
            A = la.eye(src)
            cur = j
            for v, k in enumerate(e):
                for _ in range(k):
                    A = la.matmul(A, Nr.act_matrix(v, cur)) if A.shape[1] else A
                    cur += step
                    if not Nr.dim(cur):
                        A = la.zeros((src, 0))
            if A.shape[1] == out.shape[1]:
                out = la.add(out, la.scale(c, A))
        return out, tgt

    if graded:
        lo = (min(n_pieces) - max(a)) if n_pieces and a else 0
        hi = (max(n_pieces) - min(a)) if n_pieces and a else -1
        trange = range(lo, hi + 1)
    else:
        trange = range(0, 1)
    dims, bases, layouts = {}, {}, {}
    for t in trange:
        layout = []
        off = 0
        for i in range(g):
            d = Nr.dim(a[i] + t) if graded else Nr.length
            layout.append((off, d))
            off += d
        total = off
        if total == 0:
            continue
        cons = []
        for c in range(M.matrix.ncols):
            tgt_piece = b[c] + t if graded else 0
            width = Nr.dim(tgt_piece) if graded else Nr.length
            if width == 0:
                continue
            C = la.zeros((total, width))
            for i in range(g):
                f = M.matrix.rows[i][c]
                o, d = layout[i]
                if f.is_zero() or d == 0:
                    continue
                if graded:
                    A, tt = mult_on_N(f, a[i] + t)
                    if tt != tgt_piece or A.shape[1] != width:
                        continue
                else:
                    A = _full_mult(N, Nr, f)
                C[o : o + d] = A
            cons.append(C)
        if cons:
            K = la.left_kernel(np.hstack(cons))
        else:
            K = la.eye(total)
        if K.shape[0]:
            dims[t] = K.shape[0]
            bases[t] = K
            layouts[t] = layout
    actions = {}
    for t in dims:
        tt = t + step
        if tt not in dims:
            continue
        for v in range(R.nvars):
            K = bases[t]
            img = la.zeros((K.shape[0], sum(d for _, d in layouts[tt])))
            for i in range(g):
                o, d = layouts[t][i]
                o2, d2 = layouts[tt][i]
                if d and d2:
                    A = Nr.act_matrix(v, a[i] + t) if graded else _full_actions(Nr)[v]
                    img[:, o2 : o2 + d2] = la.matmul(K[:, o : o + d], A)
            actions[(v, t)] = _coords_in(la, img, bases[tt])
    H = RealizedModule(la, step, dims, actions, name=f"Hom({M.name},{N.name})")
    H.nvars = R.nvars
    H.bases = bases
    H.layouts = layouts
    return H


def _coords_in(la, X, B):
    """Coordinates of the rows of X in the row basis B (rows of X lie in span B)."""
    if X.shape[0] == 0:
        return la.zeros((0, B.shape[0]))
    _, piv = la.rref(B)
    # B has full row rank, so its pivot columns form an invertible block
    Bp = B[:, piv]
    Xp = X[:, piv]
    Binv = la.inverse(Bp)
    return la.matmul(Xp, Binv)


_full_cache: dict = {}


def _full_actions(Nr):
    key = id(Nr)
    if key not in _full_cache:
        mats, _ = Nr.total_actions(Nr.nvars)
        _full_cache[key] = mats
    return _full_cache[key]


def _full_mult(N, Nr, f):
    la = Nr.la
    mats = _full_actions(Nr)
    L = Nr.length
    out = la.zeros((L, L))
    for e, c in f.terms.items():
        A = la.eye(L)
        for v, k in enumerate(e):
            for _ in range(k):
                A = la.matmul(A, mats[v])
        out = la.add(out, la.scale(c, A))
    return out


def hom_module(M: FPModule, N: FPModule, name=None) -> FPModule:
    H = _hom_realized(M, N)
    return from_realization(M.ring, H, name=name or f"Hom({M.name},{N.name})")


def dual(M: FPModule, name=None) -> FPModule:
    """M* = Hom_R(M, R)."""
    Rm = FPModule.free(M.ring, 1, name="R")
    return hom_module(M, Rm, name=name or f"{M.name or 'M'}*")


def hom_length(M: FPModule, N: FPModule) -> int:
    return _hom_realized(M, N).length


@dataclass
class BidualityResult:
    iso: bool
    witness: str | None = None
    lengths: tuple = ()

    def __bool__(self):
        return self.iso


def biduality_iso(M: FPModule) -> BidualityResult:
    """Is the evaluation map M -> M** bijective?"""
    R = M.ring
    if not R.artinian:
        raise NotArtinian("biduality_iso")
    la = R.la
    Ms = dual(M)
    Mss_len = hom_length(Ms, FPModule.free(R, 1))
    lm = M.length
    # evaluation: m ↦ (φ_k(m))_k for the generators φ_k of M*
    Hr = _hom_realized(M, FPModule.free(R, 1))
    gens = _hom_generators(Hr)  # list of (piece, vector) in ⊕_i R
    Rr = R.realize()
    Mr = M.realize()
    # lift each basis vector of M (a free coordinate of F_j) to (gen i, monomial)
    F = Mr.free
    rows = []
    for j in sorted(Mr.dims):
        U, piv, free = Mr.proj[j]
        segs, _ = F.layout(j)
        coords = []
        for a, n, g0, off, d in segs:
            basis = F.pieces.basis[d]
            for g in range(n):
                for idx, m in enumerate(basis):
                    coords.append((F.order[g0 + g], m))
        for c in free:
            gi, mono = coords[c]
            row = []
            for (t, phi, layout) in gens:
                o, dd = layout[gi]
                val = phi[o : o + dd]
                row.append(_phi_value(R, Rr, M, t, gi, val, mono))
            rows.append(np.concatenate(row) if row else la.zeros((0,)))
    E = np.vstack(rows) if rows else la.zeros((0, 0))
    rank = la.rank(E) if E.size else 0
    iso = rank == lm and Mss_len == lm
    witness = None
    if not iso:
        if rank < lm:
            witness = f"evaluation map has a kernel of dimension {lm - rank}"
        else:
            witness = f"length(M**) = {Mss_len} differs from length(M) = {lm}"
    return BidualityResult(iso, witness, (lm, Ms.length, Mss_len))


def _hom_generators(H):
    """Minimal generators of a realized Hom module, as (piece, vector, layout)."""
    la = H.la
    out = []
    for t in sorted(H.dims):
        dim = H.dim(t)
        if H.step:
            if (t - 1) in H.dims:
                mK = np.vstack([H.act(v, t - 1, la.eye(H.dim(t - 1))) for v in range(H.nvars)])
            else:
                mK = None
        else:
            mK = np.vstack([H.act_matrix(v, t) for v in range(H.nvars)])
        G = _complement(la, la.eye(dim), mK)
        for r in range(G.shape[0]):
            vec = la.matmul(G[r : r + 1], H.bases[t])[0]
            out.append((t, vec, H.layouts[t]))
    return out


def _phi_value(R, Rr, M, t, gi, val, mono):
    """Coordinates in R (full realization) of mono·φ(e_gi) where φ(e_gi) has piece coordinates ``val``."""
    la = R.la
    L = Rr.length
    out = la.zeros((L,))
    if M.graded:
        d = M.gen_degrees[gi] + t
        basis = R.pieces().basis[d] if 0 <= d <= R.pieces().top else []
    else:
        basis = Rr.basis
    elem = {}
    for k, m in enumerate(basis):
        c = la.to_raw(val[k]) if k < len(val) else 0
        if c:
            elem[m] = c
    if not elem:
        return out
    f = R.S.from_terms(elem) * R.S.monomial(mono)
    return Rr.vector(f)


def ext_dims(M: FPModule, N_range=range(1, DEFAULT_BOUND + 1)) -> list:
    """dim_k Ext^i_R(M, R) for i in the range, via Hom(F_•, R)."""
    R = M.ring
    if not R.artinian:
        raise NotArtinian("ext_dims")
    idx = list(N_range)
    top = max(idx) if idx else 0
    res = M.resolution(top + 1, maps=True)
    ranks = _dual_ranks(res, top + 1)
    out = []
    for i in idx:
        b = res.levels[i].degrees if i < len(res.levels) else []
        L = R.length
        dim_hom = len(b) * L
        r_out = ranks.get(i + 1, 0)
        r_in = ranks.get(i, 0)
        out.append(dim_hom - r_out - r_in)
    return out


def _dual_ranks(res: Resolution, top: int):
    """rank of d_i^* : Hom(F_{i-1}, R) -> Hom(F_i, R) for 1 <= i <= top."""
    R = res.ring
    la = R.la
    Rr = R.realize()
    L = Rr.length
    # monomial action matrices of R, indexed by the standard monomials
    mono_act = _monomial_actions(R)
    if res.pieces.step and not res.pieces.truncated:
        return _dual_ranks_graded(res, top, mono_act)
    out = {}
    for i in range(1, min(top, len(res.levels) - 1) + 1):
        src = res.levels[i]
        if not src.degrees:
            out[i] = 0
            continue
        tgt = res.free(i - 1)
        cols = []
        for j in sorted(src.images):
            Y = la.expand(src.images[j])
            for r in range(Y.shape[0]):
                cols.append((j, Y[r]))
        g = tgt.rank
        h = len(cols)
        B = la.zeros((g * L, h * L))
        for hh, (j, y) in enumerate(cols):
            for a, n, g0, off, d in tgt.layout(j)[0]:
                basis = tgt.pieces.basis[d]
                for gg in range(n):
                    seg = y[off + gg * len(basis) : off + (gg + 1) * len(basis)]
                    nz = np.flatnonzero(seg)
                    if not len(nz):
                        continue
                    blk = la.zeros((L, L))
                    for k in nz:
                        blk = la.add(blk, la.scale(la.to_raw(seg[k]), mono_act[basis[k]]))
                    gi = g0 + gg
                    B[gi * L : (gi + 1) * L, hh * L : (hh + 1) * L] = blk
        out[i] = la.rank(B)
    return out


def _dual_ranks_graded(res: Resolution, top: int, mono_act):
    """Same ranks, computed one internal degree at a time.

    A homomorphism F_{i-1} -> R of degree t sends e_g into R_{t+a_g}; composing
    with d_i keeps t, so d_i^* is block diagonal in t.
    """
    R = res.ring
    la = R.la
    pieces = res.pieces
    dims = [len(b) for b in pieces.basis]
    offs = np.concatenate([[0], np.cumsum(dims)]).astype(int)
    rtop = len(dims) - 1

    def rdim(s):
        return dims[s] if 0 <= s <= rtop else 0

    out = {}
    for i in range(1, min(top, len(res.levels) - 1) + 1):
        src = res.levels[i]
        if not src.degrees:
            out[i] = 0
            continue
        tgt = res.free(i - 1)
        a = tgt.degrees
        cols = []  # (b_h, {g: [(monomial, coeff)]})
        for j in sorted(src.images):
            Y = la.expand(src.images[j])
            for r in range(Y.shape[0]):
                y = Y[r]
                entry = defaultdict(list)
                for _, n, g0, off, d in tgt.layout(j)[0]:
                    basis = pieces.basis[d]
                    nb = len(basis)
                    for gg in range(n):
                        seg = y[off + gg * nb : off + (gg + 1) * nb]
                        for k in np.flatnonzero(seg):
                            entry[g0 + gg].append((basis[k], la.to_raw(seg[k])))
                cols.append((j, entry))
        lo = min(-a[-1], -cols[-1][0])
        hi = rtop - min(a[0], cols[0][0])
        total = 0
        for t in range(lo, hi + 1):
            row_off, r = [], 0
            for ag in a:
                row_off.append(r)
                r += rdim(t + ag)
            col_off, c = [], 0
            for b, _ in cols:
                col_off.append(c)
                c += rdim(t + b)
            if not r or not c:
                continue
            B = la.zeros((r, c))
            for h, (b, entry) in enumerate(cols):
                sc = t + b
                if not rdim(sc):
                    continue
                for g, terms in entry.items():
                    sr = t + a[g]
                    if not rdim(sr):
                        continue
                    blk = None
                    for m, coef in terms:
                        part = la.scale(coef, mono_act[m][offs[sr] : offs[sr + 1], offs[sc] : offs[sc + 1]])
                        blk = part if blk is None else la.add(blk, part)
                    B[row_off[g] : row_off[g] + dims[sr], col_off[h] : col_off[h] + dims[sc]] = blk
            total += la.rank(B)
        out[i] = total
    return out


def _monomial_actions(R: QuotientRing):
    Rr = R.realize()
    cache = getattr(R, "_mono_act", None)
    if cache is None:
        cache = {}
        for m in Rr.basis:
            cache[m] = Rr.monomial_action(m)
        R._mono_act = cache
    return cache


def bass_dims(R: QuotientRing, N_range=range(0, DEFAULT_BOUND)) -> list:
    """μ^i = dim_k Ext^i_R(k, R)."""
    k = FPModule.residue_field(R)
    idx = list(N_range)
    out = []
    top = max(idx) if idx else 0
    res = k.resolution(top + 1, maps=True)
    ranks = _dual_ranks(res, top + 1)
    L = R.length
    for i in idx:
        b = res.levels[i].degrees if i < len(res.levels) else []
        out.append(len(b) * L - ranks.get(i + 1, 0) - ranks.get(i, 0))
    return out


@dataclass
class KoszulResult:
    linear: bool
    bound: int
    violation: tuple | None = None

    def __bool__(self):
        return self.linear


def is_koszul(R: QuotientRing, N: int = DEFAULT_BOUND) -> KoszulResult:
    if not R.graded:
        raise NotGraded("is_koszul needs a graded ring")
    k = FPModule.residue_field(R)
    res = k.resolution(N)
    for (i, j), b in sorted(res.betti.graded.items()):
        if b and i <= N and j != i:
            return KoszulResult(False, N, (i, j))
    return KoszulResult(True, N)


def has_minimal_multiplicity(M: FPModule) -> bool:
    return M.annihilated_by_square_of_max_ideal()
