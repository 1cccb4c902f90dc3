"""Independent reference computations used to cross-check the package.

Nothing here imports totref's linear algebra, Gröbner or resolution code.  The dense
Betti oracle works directly with standard monomials of a monomial ideal and a small
Gaussian elimination mod p; the Gröbner oracle is sympy.
"""

from itertools import product

import numpy as np
import sympy

P = 101


def rank_mod_p(A, p=P):
    """Rank of an integer matrix mod p by plain row reduction."""
    A = np.array(A, dtype=np.int64) % p
    if A.size == 0:
        return 0
    rows, cols = A.shape
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if A[i, c]), None)
        if piv is None:
            continue
        A[[r, piv]] = A[[piv, r]]
        A[r] = (A[r] * pow(int(A[r, c]), p - 2, p)) % p
        nz = np.nonzero(A[:, c])[0]
        for i in nz:
            if i != r:
                A[i] = (A[i] - A[i, c] * A[r]) % p
        r += 1
        if r == rows:
            break
    return r


def nullspace_mod_p(A, p=P):
    """Basis (as rows) of {v : A v = 0} mod p."""
    A = np.array(A, dtype=np.int64) % p
    rows, cols = A.shape
    pivots = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if A[i, c]), None)
        if piv is None:
            continue
        A[[r, piv]] = A[[piv, r]]
        A[r] = (A[r] * pow(int(A[r, c]), p - 2, p)) % p
        for i in np.nonzero(A[:, c])[0]:
            if i != r:
                A[i] = (A[i] - A[i, c] * A[r]) % p
        pivots.append(c)
        r += 1
        if r == rows:
            break
    free = [c for c in range(cols) if c not in set(pivots)]
    basis = []
    for f in free:
        v = np.zeros(cols, dtype=np.int64)
        v[f] = 1
        for i, c in enumerate(pivots):
            v[c] = (-A[i, f]) % p
        basis.append(v)
    return np.array(basis, dtype=np.int64).reshape(len(basis), cols)


def standard_monomials(gens, nvars):
    """Exponent vectors outside the monomial ideal generated by ``gens`` (must be artinian)."""
    bound = max(max(g) for g in gens) + 1
    out = []
    for e in product(range(bound * nvars + 1), repeat=nvars):
        if not any(all(e[i] >= g[i] for i in range(nvars)) for g in gens):
            out.append(e)
    return out


class MonomialQuotient:
    """k[x_1..x_n]/J for a monomial ideal J, realized by its standard monomials."""

    def __init__(self, gens, nvars, p=P):
        self.p = p
        self.n = nvars
        self.basis = sorted(standard_monomials(gens, nvars), key=lambda e: (sum(e), e))
        self.index = {e: i for i, e in enumerate(self.basis)}
        self.L = len(self.basis)

    def var_matrix(self, j):
        """Matrix of multiplication by x_j acting on row vectors."""
        X = np.zeros((self.L, self.L), dtype=np.int64)
        for i, e in enumerate(self.basis):
            f = tuple(e[k] + (k == j) for k in range(self.n))
            if f in self.index:
                X[i, self.index[f]] = 1
        return X


def dense_betti_of_residue_field(gens, nvars, N, p=P):
    """β_0..β_N of k over a monomial artinian quotient, by brute-force linear algebra.

    A submodule of R^b is stored as a row basis in coordinates (generator, monomial).
    β_{i+1} = dim K_i − dim 𝔪K_i where K_i is the i-th syzygy module.
    """
    R = MonomialQuotient(gens, nvars, p)
    L = R.L
    Xs = [R.var_matrix(j) for j in range(nvars)]

    def act(rows, b):
        # multiply each row (element of R^b) by every variable
        out = []
        for X in Xs:
            for v in rows:
                out.append(np.concatenate([(v[g * L : (g + 1) * L] @ X) % p for g in range(b)]))
        return np.array(out, dtype=np.int64).reshape(len(out), b * L)

    betti = [1]
    # K_0 = maximal ideal inside R^1
    K = np.eye(L, dtype=np.int64)[1:]
    b = 1
    for _ in range(N):
        mK = act(K, b)
        nxt = rank_mod_p(K) - (rank_mod_p(mK) if len(mK) else 0)
        betti.append(nxt)
        if len(betti) > N:
            break
        # choose minimal generators: rows of K independent modulo mK
        gens_rows = []
        cur = mK.copy() if len(mK) else np.zeros((0, b * L), dtype=np.int64)
        base = rank_mod_p(cur) if len(cur) else 0
        for v in K:
            test = np.vstack([cur, v[None, :]])
            rk = rank_mod_p(test)
            if rk > base:
                cur, base = test, rk
                gens_rows.append(v)
        assert len(gens_rows) == nxt
        # kernel of R^nxt -> R^b sending e_g to gens_rows[g]; build the matrix of this linear map
        images = []
        for g in range(nxt):
            for mono in range(L):
                e = np.zeros(L, dtype=np.int64)
                e[mono] = 1
                # mono * gen: apply the monomial as a product of variable matrices
                vec = gens_rows[g]
                for j, k in enumerate(R.basis[mono]):
                    for _ in range(k):
                        vec = np.concatenate([(vec[h * L : (h + 1) * L] @ Xs[j]) % p for h in range(b)])
                images.append(vec)
        A = np.array(images, dtype=np.int64).T  # columns indexed by (g, mono)
        K = nullspace_mod_p(A, p)
        b = nxt
    return betti[: N + 1]


def sympy_reduced_groebner(polys, variables, p=P):
    """Reduced grevlex Gröbner basis mod p, as sorted strings of monic sympy expressions."""
    syms = sympy.symbols(variables)
    exprs = [sympy.sympify(str(f).replace("^", "**"), locals=dict(zip(variables, syms))) for f in polys]
    G = sympy.groebner(exprs, *syms, order="grevlex", modulus=p)
    return sorted(str(sympy.Poly(g, *syms, modulus=p).monic().as_expr()) for g in G.exprs)


def to_sympy_poly(f, variables, p=P):
    syms = sympy.symbols(variables)
    e = sympy.sympify(str(f).replace("^", "**"), locals=dict(zip(variables, syms)))
    return sympy.Poly(e, *syms, modulus=p)


def series_coefficients(num, den, N):
    """Coefficients of num/den with den[0] = 1, by the recurrence (pure integers)."""
    out = []
    for n in range(N):
        c = num[n] if n < len(num) else 0
        for k in range(1, min(n, len(den) - 1) + 1):
            c -= den[k] * out[n - k]
        out.append(c)
    return out
