"""Exact sparse linear algebra over the rationals.

Matrices are stored column-major as a tuple of ``{row: value}`` dicts with no
stored zeros.  Scalars are ``gmpy2.mpq`` when available (falls back to
``fractions.Fraction``); both are always reduced with positive denominator.

Elimination is done by column reduction with "low" pivots (the largest row
index of a column), in the order the columns are given.  The pivot columns
found this way are exactly the pivot columns of the reduced row-echelon form,
so particular solutions supported on them are the usual echelon solutions
with free variables set to zero.
"""

from __future__ import annotations

from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

try:
    from gmpy2 import mpq as Q
except ImportError:  # pragma: no cover
    from fractions import Fraction as Q

__all__ = [
    "Q",
    "Vector",
    "SparseMatrix",
    "SubspaceBasis",
    "ColumnReducer",
    "to_rational",
    "rational_str",
    "rank",
    "kernel_basis",
    "solve_particular",
    "l1_operator_norm",
    "vec_add",
    "vec_scale",
    "vec_sub",
]

Vector = Dict[int, "Q"]

ZERO = Q(0)
ONE = Q(1)


def to_rational(x) -> Q:
    """Coerce an int, Fraction, mpq or ``"num/den"`` string to a rational."""
    if isinstance(x, str):
        s = x.strip()
        if "/" in s:
            num, den = s.split("/")
            if int(den) == 0:
                raise ValueError(f"zero denominator in {x!r}")
            return Q(int(num), int(den))
        return Q(int(s))
    if isinstance(x, float):
        raise TypeError("floating-point values are not accepted")
    if hasattr(x, "numerator") and hasattr(x, "denominator"):
        return Q(int(x.numerator), int(x.denominator))
    return Q(x)


def rational_str(x) -> str:
    x = to_rational(x)
    return f"{int(x.numerator)}/{int(x.denominator)}"


def vec_add(u: Mapping[int, Q], v: Mapping[int, Q], scale=ONE) -> Vector:
    """Return ``u + scale*v`` as a fresh dict."""
    out = dict(u)
    for k, a in v.items():
        b = out.get(k, ZERO) + scale * a
        if b:
            out[k] = b
        else:
            out.pop(k, None)
    return out


def vec_sub(u: Mapping[int, Q], v: Mapping[int, Q]) -> Vector:
    return vec_add(u, v, -ONE)


def vec_scale(v: Mapping[int, Q], c) -> Vector:
    if not c:
        return {}
    return {k: c * a for k, a in v.items()}


def _iadd(out: Vector, v: Mapping[int, Q], scale) -> None:
    for k, a in v.items():
        b = out.get(k, ZERO) + scale * a
        if b:
            out[k] = b
        else:
            del out[k]


class SparseMatrix:
    """Immutable exact sparse matrix (column-major)."""

    __slots__ = ("nrows", "ncols", "_cols", "_hash")

    def __init__(self, nrows: int, ncols: int, columns: Optional[Sequence[Mapping[int, object]]] = None,
                 *, _trusted: bool = False):
        if nrows < 0 or ncols < 0:
            raise ValueError("negative dimension")
        self.nrows = nrows
        self.ncols = ncols
        self._hash = None
        if columns is None:
            self._cols: Tuple[Vector, ...] = tuple({} for _ in range(ncols))
            return
        if len(columns) != ncols:
            raise ValueError(f"expected {ncols} columns, got {len(columns)}")
        if _trusted:
            self._cols = tuple(columns)
            return
        cols = []
        for j, col in enumerate(columns):
            clean = {}
            for i, v in col.items():
                if not 0 <= i < nrows:
                    raise IndexError(f"row index {i} out of range for column {j}")
                q = to_rational(v)
                if q:
                    clean[i] = q
            cols.append(clean)
        self._cols = tuple(cols)

    # construction helpers
    @classmethod
    def from_dense(cls, rows: Sequence[Sequence[object]], ncols: Optional[int] = None) -> "SparseMatrix":
        nrows = len(rows)
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        cols: List[Vector] = [{} for _ in range(ncols)]
        for i, row in enumerate(rows):
            if len(row) != ncols:
                raise ValueError("ragged rows")
            for j, v in enumerate(row):
                q = to_rational(v)
                if q:
                    cols[j][i] = q
        return cls(nrows, ncols, cols, _trusted=True)

    @classmethod
    def from_entries(cls, nrows: int, ncols: int, entries: Mapping[Tuple[int, int], object]) -> "SparseMatrix":
        cols: List[Dict[int, object]] = [{} for _ in range(ncols)]
        for (i, j), v in entries.items():
            if not 0 <= j < ncols:
                raise IndexError(f"column index {j} out of range")
            cols[j][i] = v
        return cls(nrows, ncols, cols)

    @classmethod
    def identity(cls, n: int) -> "SparseMatrix":
        return cls(n, n, [{i: ONE} for i in range(n)], _trusted=True)

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "SparseMatrix":
        return cls(nrows, ncols)

    @classmethod
    def from_columns(cls, nrows: int, columns: Sequence[Mapping[int, Q]]) -> "SparseMatrix":
        """Build from already-clean columns (nonzero rationals, in-range rows)."""
        return cls(nrows, len(columns), [dict(c) for c in columns], _trusted=True)

    # access
    @property
    def shape(self) -> Tuple[int, int]:
        return (self.nrows, self.ncols)

    def column(self, j: int) -> Vector:
        return dict(self._cols[j])

    def columns(self) -> Tuple[Vector, ...]:
        """The internal column dicts.  Treat as read-only."""
        return self._cols

    def entries(self) -> Dict[Tuple[int, int], Q]:
        return {(i, j): v for j, col in enumerate(self._cols) for i, v in col.items()}

    def __getitem__(self, ij: Tuple[int, int]) -> Q:
        i, j = ij
        return self._cols[j].get(i, ZERO)

    def nnz(self) -> int:
        return sum(len(c) for c in self._cols)

    def to_dense(self) -> List[List[Q]]:
        out = [[ZERO] * self.ncols for _ in range(self.nrows)]
        for j, col in enumerate(self._cols):
            for i, v in col.items():
                out[i][j] = v
        return out

    def rows(self) -> List[Vector]:
        out: List[Vector] = [{} for _ in range(self.nrows)]
        for j, col in enumerate(self._cols):
            for i, v in col.items():
                out[i][j] = v
        return out

    def is_zero(self) -> bool:
        return not any(self._cols)

    # arithmetic
    def apply(self, v: Mapping[int, Q]) -> Vector:
        """Matrix-vector product on a sparse vector."""
        out: Vector = {}
        cols = self._cols
        for j, a in v.items():
            _iadd(out, cols[j], a)
        return out

    def __matmul__(self, other: "SparseMatrix") -> "SparseMatrix":
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        return SparseMatrix(self.nrows, other.ncols,
                            [self.apply(c) for c in other._cols], _trusted=True)

    def _combine(self, other: "SparseMatrix", scale) -> "SparseMatrix":
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        return SparseMatrix(self.nrows, self.ncols,
                            [vec_add(a, b, scale) for a, b in zip(self._cols, other._cols)],
                            _trusted=True)

    def __add__(self, other: "SparseMatrix") -> "SparseMatrix":
        return self._combine(other, ONE)

    def __sub__(self, other: "SparseMatrix") -> "SparseMatrix":
        return self._combine(other, -ONE)

    def __neg__(self) -> "SparseMatrix":
        return self.scale(-ONE)

    def scale(self, c) -> "SparseMatrix":
        c = to_rational(c)
        return SparseMatrix(self.nrows, self.ncols, [vec_scale(col, c) for col in self._cols], _trusted=True)

    def transpose(self) -> "SparseMatrix":
        return SparseMatrix(self.ncols, self.nrows, self.rows(), _trusted=True)

    @property
    def T(self) -> "SparseMatrix":
        return self.transpose()

    def kron(self, other: "SparseMatrix") -> "SparseMatrix":
        """Kronecker product with lexicographic (self-index major) ordering."""
        m2, n2 = other.shape
        cols = []
        for a in self._cols:
            for b in other._cols:
                col = {}
                for i, x in a.items():
                    base = i * m2
                    for k, y in b.items():
                        col[base + k] = x * y
                cols.append(col)
        return SparseMatrix(self.nrows * m2, self.ncols * n2, cols, _trusted=True)

    def restrict_columns(self, idx: Sequence[int]) -> "SparseMatrix":
        return SparseMatrix(self.nrows, len(idx), [self._cols[j] for j in idx], _trusted=True)

    def hstack(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.nrows != other.nrows:
            raise ValueError("row mismatch in hstack")
        return SparseMatrix(self.nrows, self.ncols + other.ncols, self._cols + other._cols, _trusted=True)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return self.shape == other.shape and self._cols == other._cols

    def key(self):
        """Hashable content of the matrix."""
        return (self.nrows, self.ncols, tuple(tuple(sorted(c.items())) for c in self._cols))

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.key())
        return self._hash

    def __repr__(self) -> str:
        return f"SparseMatrix({self.nrows}x{self.ncols}, nnz={self.nnz()})"


class ColumnReducer:
    """Incremental echelon basis of a column space.

    Columns are fed in order with :meth:`add`.  A column that is independent of
    the earlier ones becomes a basis vector, reduced and scaled so that its low
    (largest-row) entry is 1.  With ``track=True`` the reducer remembers how
    each basis vector was obtained, which is what :meth:`solve` needs.
    """

    def __init__(self, nrows: int, track: bool = False):
        self.nrows = nrows
        self.track = track
        self.basis: List[Vector] = []
        self.pivot_of_low: Dict[int, int] = {}
        self.source_columns: List[int] = []
        # basis k = (col_{source_k} - sum gamma[k][k'] * basis_{k'}) / scale_k
        self._gamma: List[Vector] = []
        self._scale: List[Q] = []

    @property
    def rank(self) -> int:
        return len(self.basis)

    def reduce(self, v: Mapping[int, Q]) -> Tuple[Vector, Vector]:
        """Reduce ``v`` against the basis.  Returns ``(residual, coeffs)`` with
        ``v = residual + sum(coeffs[k] * basis[k])``."""
        v = dict(v)
        coeffs: Vector = {}
        pivots = self.pivot_of_low
        basis = self.basis
        while v:
            low = max(v)
            k = pivots.get(low)
            if k is None:
                break
            c = v[low]
            if self.track:
                coeffs[k] = coeffs.get(k, ZERO) + c
            _iadd(v, basis[k], -c)
        return v, coeffs

    def add(self, v: Mapping[int, Q], source: int = -1) -> bool:
        residual, coeffs = self.reduce(v)
        if not residual:
            return False
        low = max(residual)
        piv = residual[low]
        if piv != ONE:
            inv = ONE / piv
            residual = {k: a * inv for k, a in residual.items()}
        self.pivot_of_low[low] = len(self.basis)
        self.basis.append(residual)
        self.source_columns.append(source)
        if self.track:
            self._gamma.append(coeffs)
            self._scale.append(piv)
        return True

    def contains(self, v: Mapping[int, Q]) -> bool:
        residual, _ = self.reduce(v)
        return not residual

    def solve(self, b: Mapping[int, Q]) -> Optional[Vector]:
        """Express ``b`` in the original columns (supported on pivot columns)."""
        if not self.track:
            raise RuntimeError("solve() needs a reducer built with track=True")
        residual, beta = self.reduce(b)
        if residual:
            return None
        x: Vector = {}
        while beta:
            k = max(beta)
            coef = beta.pop(k) / self._scale[k]
            x[self.source_columns[k]] = coef
            for k2, g in self._gamma[k].items():
                nb = beta.get(k2, ZERO) - coef * g
                if nb:
                    beta[k2] = nb
                else:
                    beta.pop(k2, None)
        return x


def _reducer_for(M: SparseMatrix, track: bool) -> ColumnReducer:
    red = ColumnReducer(M.nrows, track=track)
    for j, col in enumerate(M.columns()):
        if col:
            red.add(col, j)
    return red


def rank(M: SparseMatrix) -> int:
    """Rank over the rationals."""
    if M.nrows == 0 or M.ncols == 0:
        return 0
    # Reduce along the shorter side.
    if M.nrows < M.ncols:
        M = M.transpose()
    return _reducer_for(M, track=False).rank


class SubspaceBasis:
    """Subspace of Q^ambient_dim held as a reduced row-echelon basis.

    Each vector has leading (smallest) index equal to 1 and is zero at the
    leading indices of all other vectors; leading indices strictly increase.
    """

    __slots__ = ("ambient_dim", "vectors")

    def __init__(self, ambient_dim: int, vectors: Sequence[Mapping[int, Q]] = ()):
        self.ambient_dim = ambient_dim
        self.vectors: Tuple[Vector, ...] = _rref(ambient_dim, vectors)

    @property
    def dim(self) -> int:
        return len(self.vectors)

    def __len__(self) -> int:
        return len(self.vectors)

    def pivots(self) -> List[int]:
        return [min(v) for v in self.vectors]

    def contains(self, v: Mapping[int, Q]) -> bool:
        v = {k: to_rational(a) for k, a in v.items() if a}
        for vec in self.vectors:
            p = min(vec)
            c = v.get(p)
            if c:
                _iadd(v, vec, -c)
        return not v

    def __repr__(self) -> str:
        return f"SubspaceBasis(dim={self.dim}, ambient={self.ambient_dim})"


def _rref(ambient: int, vectors: Iterable[Mapping[int, Q]]) -> Tuple[Vector, ...]:
    rows: Dict[int, Vector] = {}  # leading index -> row
    for v in vectors:
        v = {k: to_rational(a) for k, a in v.items() if a}
        for k in v:
            if not 0 <= k < ambient:
                raise IndexError(f"index {k} outside ambient dimension {ambient}")
        while v:
            lead = min(v)
            row = rows.get(lead)
            if row is None:
                break
            _iadd(v, row, -v[lead])
        if not v:
            continue
        lead = min(v)
        c = v[lead]
        if c != ONE:
            v = {k: a / c for k, a in v.items()}
        rows[lead] = v
    # back-substitute to full reduction
    leads = sorted(rows)
    for idx in range(len(leads) - 1, -1, -1):
        row = rows[leads[idx]]
        for other_lead in leads[:idx]:
            other = rows[other_lead]
            c = other.get(leads[idx])
            if c:
                _iadd(other, row, -c)
    return tuple(rows[p] for p in leads)


def kernel_basis(M: SparseMatrix) -> SubspaceBasis:
    """Null space of ``M`` as an echelon basis."""
    red = ColumnReducer(M.nrows, track=True)
    kernel = []
    for j, col in enumerate(M.columns()):
        if not col:
            kernel.append({j: ONE})
            continue
        residual, _ = red.reduce(col)
        if residual:
            red.add(col, j)
            continue
        x = red.solve(col)
        x = {k: -a for k, a in x.items()}
        x[j] = ONE
        kernel.append(x)
    return SubspaceBasis(M.ncols, kernel)


def solve_particular(M: SparseMatrix, b) -> Optional[Vector]:
    """Some ``x`` with ``M x = b``: the echelon solution with free variables
    zero, or ``None`` when the system is inconsistent."""
    if isinstance(b, Mapping):
        bvec = {int(k): to_rational(v) for k, v in b.items() if v}
    else:
        if len(b) != M.nrows:
            raise ValueError(f"right-hand side has length {len(b)}, expected {M.nrows}")
        bvec = {i: to_rational(v) for i, v in enumerate(b) if v}
    return _reducer_for(M, track=True).solve(bvec)


def l1_operator_norm(M: SparseMatrix) -> Q:
    """Operator norm for the l1 norm on both sides: the largest absolute column sum."""
    best = ZERO
    for col in M.columns():
        s = sum((abs(v) for v in col.values()), ZERO)
        if s > best:
            best = s
    return best


def dense_vector(v: Mapping[int, Q], n: int) -> List[Q]:
    out = [ZERO] * n
    for k, a in v.items():
        out[k] = a
    return out
