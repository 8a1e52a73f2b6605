"""Independent reference computations used to cross-check the package.

Nothing here imports from ``semihoch``: boundaries are built from tuples of
basis indices with Python fractions, ranks come from sympy.
"""

import itertools
from fractions import Fraction

import sympy


def semigroup_products(table):
    """Structure constants of Q[S] as {(i, j): {k: 1}}."""
    n = len(table)
    return {(i, j): {table[i][j]: Fraction(1)} for i in range(n) for j in range(n)}


def naive_boundary(products, dim, n):
    """Dense sympy matrix of d_n: C_{n+1}(A, A) -> C_n(A, A) for structure constants ``products``."""
    src = list(itertools.product(range(dim), repeat=n + 2))
    tgt = {t: i for i, t in enumerate(itertools.product(range(dim), repeat=n + 1))}
    M = sympy.zeros(len(tgt), len(src))
    for col, t in enumerate(src):
        for j in range(n + 2):
            sign = 1 if j % 2 == 0 else -1
            if j <= n:
                # merge positions j and j+1
                for k, c in products[(t[j], t[j + 1])].items():
                    new = t[:j] + (k,) + t[j + 2:]
                    M[tgt[new], col] += sign * sympy.Rational(c.numerator, c.denominator)
            else:
                for k, c in products[(t[n + 1], t[0])].items():
                    new = (k,) + t[1:n + 1]
                    M[tgt[new], col] += sign * sympy.Rational(c.numerator, c.denominator)
    return M


def naive_betti(products, dim, max_degree):
    ranks = {-1: 0}
    for n in range(max_degree + 1):
        ranks[n] = naive_boundary(products, dim, n).rank()
    return [dim ** (n + 1) - ranks[n] - ranks[n - 1] for n in range(max_degree + 1)]


def commutator_quotient_dim(products, dim):
    """dim A/[A, A] from the span of all ab - ba."""
    rows = []
    for i in range(dim):
        for j in range(dim):
            v = [Fraction(0)] * dim
            for k, c in products[(i, j)].items():
                v[k] += c
            for k, c in products[(j, i)].items():
                v[k] -= c
            rows.append([sympy.Rational(x.numerator, x.denominator) for x in v])
    return dim - sympy.Matrix(rows).rank()


def is_associative(table):
    n = len(table)
    return all(table[table[a][b]][c] == table[a][table[b][c]]
               for a in range(n) for b in range(n) for c in range(n))


def brute_band_kind(table):
    """('none'|'band'|'normal'|'rect'|'semilattice') by checking identities directly."""
    n = len(table)
    r = range(n)
    m = lambda a, b: table[a][b]
    if any(m(a, a) != a for a in r):
        return "none"
    if all(m(a, b) == m(b, a) for a in r for b in r):
        return "semilattice"
    if all(m(m(a, b), c) == m(a, c) for a in r for b in r for c in r):
        return "rect"
    if all(m(m(m(a, b), c), a) == m(m(m(a, c), b), a) for a in r for b in r for c in r):
        return "normal"
    return "band"


def sympy_matrix(sparse):
    """sympy copy of a package SparseMatrix (only reads its dense entries)."""
    rows = sparse.to_dense()
    return sympy.Matrix([[sympy.Rational(int(x.numerator), int(x.denominator)) for x in row] for row in rows]) \
        if rows else sympy.zeros(sparse.nrows, sparse.ncols)
