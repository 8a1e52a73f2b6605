"""Finite semigroups given by multiplication tables.

Elements are indices ``0..n-1``; labels are presentation metadata only.
``table[i][j]`` is the index of the product of element ``i`` with ``j``.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

from .errors import BoundExceeded, IndexOutOfRange, InvalidDiagram, NonAssociative

FREE_SEMILATTICE_BOUND = 6


@dataclass(frozen=True)
class FiniteSemigroup:
    labels: Tuple[str, ...]
    table: Tuple[Tuple[int, ...], ...]

    @property
    def order(self) -> int:
        return len(self.labels)

    def __len__(self) -> int:
        return len(self.labels)

    def mul(self, i: int, j: int) -> int:
        return self.table[i][j]

    def product(self, items: Sequence[int]) -> int:
        it = iter(items)
        acc = next(it)
        for x in it:
            acc = self.table[acc][x]
        return acc

    def index(self, label: str) -> int:
        return self.labels.index(label)

    def is_commutative(self) -> bool:
        t = self.table
        n = len(t)
        return all(t[i][j] == t[j][i] for i in range(n) for j in range(i + 1, n))

    def idempotents(self) -> List[int]:
        return [i for i in range(len(self.table)) if self.table[i][i] == i]

    def identity(self) -> Optional[int]:
        t = self.table
        rn = range(len(t))
        for e in rn:
            if all(t[e][x] == x == t[x][e] for x in rn):
                return e
        return None

    def is_group(self) -> bool:
        e = self.identity()
        if e is None:
            return False
        return all(e in row for row in self.table)

    def inverse(self, x: int) -> int:
        e = self.identity()
        for y in range(len(self.table)):
            if self.table[x][y] == e and self.table[y][x] == e:
                return y
        raise ValueError(f"{self.labels[x]} has no inverse")

    def relabel(self, labels: Sequence[str]) -> "FiniteSemigroup":
        return FiniteSemigroup(tuple(labels), self.table)


def validate_semigroup(labels: Sequence[str], table: Sequence[Sequence[int]]) -> FiniteSemigroup:
    """Check shape, range and associativity; raise on the first failure."""
    n = len(labels)
    if len(table) != n:
        raise IndexOutOfRange(f"table has {len(table)} rows for {n} labels")
    rows = []
    for i, row in enumerate(table):
        if len(row) != n:
            raise IndexOutOfRange(f"row {i} has length {len(row)}, expected {n}")
        for j, v in enumerate(row):
            if not isinstance(v, int) or isinstance(v, bool) or not 0 <= v < n:
                raise IndexOutOfRange(f"entry ({i}, {j}) = {v!r} is not an element index")
        rows.append(tuple(row))
    if len(set(labels)) != n:
        raise IndexOutOfRange("element labels must be distinct")
    t = rows
    for i in range(n):
        ti = t[i]
        for j in range(n):
            ij = ti[j]
            tij_row = t[ij]
            tj = t[j]
            for k in range(n):
                if tij_row[k] != ti[tj[k]]:
                    raise NonAssociative(i, j, k)
    return FiniteSemigroup(tuple(str(x) for x in labels), tuple(rows))


def semigroup_from_function(elements: Sequence, op: Callable, labels: Optional[Sequence[str]] = None) -> FiniteSemigroup:
    index = {x: i for i, x in enumerate(elements)}
    table = [[index[op(x, y)] for y in elements] for x in elements]
    if labels is None:
        labels = [str(x) for x in elements]
    return validate_semigroup(labels, table)


# ---------------------------------------------------------------------------
# semilattices


@dataclass(frozen=True)
class FiniteSemilattice:
    """A commutative idempotent semigroup with its order ``f <= e iff ef = f``."""

    underlying: FiniteSemigroup
    order: Tuple[Tuple[bool, ...], ...]  # order[f][e]  <=>  f <= e

    @property
    def labels(self) -> Tuple[str, ...]:
        return self.underlying.labels

    @property
    def table(self) -> Tuple[Tuple[int, ...], ...]:
        return self.underlying.table

    def __len__(self) -> int:
        return len(self.underlying)

    @property
    def elements(self) -> range:
        return range(len(self.underlying))

    def meet(self, e: int, f: int) -> int:
        return self.underlying.table[e][f]

    def product(self, items: Sequence[int]) -> int:
        return self.underlying.product(items)

    def leq(self, f: int, e: int) -> bool:
        return self.order[f][e]

    def comparable_pairs(self) -> List[Tuple[int, int]]:
        """All ``(f, e)`` with ``f <= e``."""
        n = len(self)
        return [(f, e) for e in range(n) for f in range(n) if self.order[f][e]]

    def top(self) -> Optional[int]:
        return self.underlying.identity()

    def maximal_elements(self) -> List[int]:
        n = len(self)
        return [e for e in range(n)
                if not any(self.order[e][g] and g != e for g in range(n))]

    def index(self, label: str) -> int:
        return self.underlying.index(label)


def semilattice_violation(S: FiniteSemigroup) -> Optional[Tuple[int, int]]:
    """First pair showing ``S`` is not a semilattice, or None.

    A non-idempotent element ``x`` is reported as ``(x, x)``.
    """
    t = S.table
    n = len(t)
    for i in range(n):
        if t[i][i] != i:
            return (i, i)
    for i in range(n):
        for j in range(i + 1, n):
            if t[i][j] != t[j][i]:
                return (i, j)
    return None


def as_semilattice(S: FiniteSemigroup) -> Optional[FiniteSemilattice]:
    if semilattice_violation(S) is not None:
        return None
    t = S.table
    n = len(t)
    order = tuple(tuple(t[e][f] == f for e in range(n)) for f in range(n))
    return FiniteSemilattice(S, order)


def semilattice_from_table(labels: Sequence[str], table: Sequence[Sequence[int]]) -> FiniteSemilattice:
    S = validate_semigroup(labels, table)
    L = as_semilattice(S)
    if L is None:
        i, j = semilattice_violation(S)
        raise InvalidDiagram(f"not a semilattice: elements {S.labels[i]!r}, {S.labels[j]!r}")
    return L


def _subset_label(s: Tuple[int, ...]) -> str:
    return "{" + ",".join(str(x) for x in s) + "}"


def free_semilattice(k: int, bound: int = FREE_SEMILATTICE_BOUND) -> FiniteSemilattice:
    """Nonempty subsets of ``{1..k}`` under union.

    Elements are ordered by size and then lexicographically, so the
    generators ``{1}, ..., {k}`` are elements ``0..k-1`` and the full set is last.
    """
    if k < 1:
        raise ValueError("free semilattice needs at least one generator")
    if k > bound:
        raise BoundExceeded(f"free semilattice on {k} generators exceeds bound {bound}")
    subsets = [c for r in range(1, k + 1) for c in itertools.combinations(range(1, k + 1), r)]
    index = {frozenset(s): i for i, s in enumerate(subsets)}
    table = [[index[frozenset(a) | frozenset(b)] for b in subsets] for a in subsets]
    S = FiniteSemigroup(tuple(_subset_label(s) for s in subsets), tuple(tuple(r) for r in table))
    return as_semilattice(S)


def chain_semilattice(k: int, labels: Optional[Sequence[str]] = None) -> FiniteSemilattice:
    """The chain ``0 >= 1 >= ... >= k-1`` (product = larger index)."""
    if labels is None:
        labels = ["1"] + [f"e{i}" for i in range(1, k)]
    table = [[max(i, j) for j in range(k)] for i in range(k)]
    return semilattice_from_table(labels, table)


def diamond_semilattice() -> FiniteSemilattice:
    """Top 1, two incomparable a, b and bottom 0 = ab."""
    labels = ["1", "a", "b", "0"]
    table = [
        [0, 1, 2, 3],
        [1, 1, 3, 3],
        [2, 3, 2, 3],
        [3, 3, 3, 3],
    ]
    return semilattice_from_table(labels, table)


def semilattice_hom_check(source: FiniteSemilattice, target: FiniteSemilattice, mapping: Sequence[int]) -> Optional[Tuple[int, int]]:
    for x in source.elements:
        for y in source.elements:
            if mapping[source.meet(x, y)] != target.meet(mapping[x], mapping[y]):
                return (x, y)
    return None


# ---------------------------------------------------------------------------
# bands


class BandClass(enum.Enum):
    NOT_BAND = "NotBand"
    BAND = "Band"
    RECTANGULAR_BAND = "RectangularBand"
    NORMAL_BAND = "NormalBand"
    SEMILATTICE = "Semilattice"

    def implies(self, other: "BandClass") -> bool:
        """Whether membership in ``self`` implies membership in ``other``."""
        ladder = {
            BandClass.NOT_BAND: {BandClass.NOT_BAND},
            BandClass.BAND: {BandClass.BAND},
            BandClass.NORMAL_BAND: {BandClass.NORMAL_BAND, BandClass.BAND},
            BandClass.RECTANGULAR_BAND: {BandClass.RECTANGULAR_BAND, BandClass.NORMAL_BAND, BandClass.BAND},
            BandClass.SEMILATTICE: {BandClass.SEMILATTICE, BandClass.NORMAL_BAND, BandClass.BAND},
        }
        return other in ladder[self]


def is_band(S: FiniteSemigroup) -> bool:
    return all(S.table[i][i] == i for i in range(len(S)))


def is_rectangular_band(S: FiniteSemigroup) -> bool:
    t = S.table
    n = len(t)
    if not is_band(S):
        return False
    return all(t[t[a][b]][c] == t[a][c] for a in range(n) for b in range(n) for c in range(n))


def is_normal_band(S: FiniteSemigroup) -> bool:
    t = S.table
    n = len(t)
    if not is_band(S):
        return False
    return all(t[t[t[a][b]][c]][a] == t[t[t[a][c]][b]][a]
               for a in range(n) for b in range(n) for c in range(n))


def band_class(S: FiniteSemigroup) -> BandClass:
    """Most specific class; a one-element band reports ``SEMILATTICE``."""
    if not is_band(S):
        return BandClass.NOT_BAND
    if S.is_commutative():
        return BandClass.SEMILATTICE
    if is_rectangular_band(S):
        return BandClass.RECTANGULAR_BAND
    if is_normal_band(S):
        return BandClass.NORMAL_BAND
    return BandClass.BAND


def is_clifford(S: FiniteSemigroup) -> bool:
    """Union of groups with central idempotents."""
    t = S.table
    n = len(t)
    E = S.idempotents()
    for e in E:
        if any(t[e][x] != t[x][e] for x in range(n)):
            return False
    # every element lies in the group of its idempotent power
    for x in range(n):
        e = _idempotent_power(S, x)
        if t[e][x] != x:
            return False
        if not any(t[x][y] == e and t[e][y] == y for y in range(n)):
            return False
    return True


def _idempotent_power(S: FiniteSemigroup, x: int) -> int:
    t = S.table
    seen = []
    y = x
    while y not in seen:
        seen.append(y)
        y = t[y][x]
    # powers cycle; one of them is idempotent
    for z in seen:
        if t[z][z] == z:
            return z
    raise AssertionError("finite monogenic semigroup without idempotent")


# ---------------------------------------------------------------------------
# strong semilattices


@dataclass(frozen=True)
class DecompositionData:
    """Shape, components and transition maps of a strong semilattice.

    ``transitions[(f, e)]`` (for ``f <= e``) sends local indices of
    ``components[e]`` to local indices of ``components[f]``.  ``embedding``
    optionally records, for each shape element, the global element index of
    each local element (filled in by :func:`decompose_strong_semilattice`).
    """

    shape: FiniteSemilattice
    components: Tuple[FiniteSemigroup, ...]
    transitions: Mapping[Tuple[int, int], Tuple[int, ...]]
    embedding: Optional[Tuple[Tuple[int, ...], ...]] = field(default=None, compare=False)

    def validate(self) -> None:
        L = self.shape
        if len(self.components) != len(L):
            raise InvalidDiagram("one component per shape element is required")
        for f, e in L.comparable_pairs():
            if (f, e) not in self.transitions:
                raise InvalidDiagram(f"missing transition {L.labels[f]}<{L.labels[e]}")
        for (f, e), phi in self.transitions.items():
            if not L.leq(f, e):
                raise InvalidDiagram(f"transition {L.labels[f]}<{L.labels[e]} but not f <= e")
            Se, Sf = self.components[e], self.components[f]
            if len(phi) != len(Se) or any(not 0 <= v < len(Sf) for v in phi):
                raise InvalidDiagram(f"transition {L.labels[f]}<{L.labels[e]} has wrong size or range")
            for x in range(len(Se)):
                for y in range(len(Se)):
                    if phi[Se.table[x][y]] != Sf.table[phi[x]][phi[y]]:
                        raise InvalidDiagram(
                            f"transition {L.labels[f]}<{L.labels[e]} is not a homomorphism at ({x}, {y})")
        for e in L.elements:
            if tuple(self.transitions[(e, e)]) != tuple(range(len(self.components[e]))):
                raise InvalidDiagram(f"transition at {L.labels[e]} is not the identity")
        for g, f in L.comparable_pairs():
            for e in L.elements:
                if L.leq(f, e):
                    lhs = self.transitions[(g, f)]
                    mid = self.transitions[(f, e)]
                    rhs = self.transitions[(g, e)]
                    if any(lhs[mid[x]] != rhs[x] for x in range(len(mid))):
                        raise InvalidDiagram(
                            f"transitions do not compose along {L.labels[e]} >= {L.labels[f]} >= {L.labels[g]}")

    def offsets(self) -> List[int]:
        out, acc = [], 0
        for comp in self.components:
            out.append(acc)
            acc += len(comp)
        return out


def assemble_strong_semilattice(D: DecompositionData) -> FiniteSemigroup:
    """Semigroup on the disjoint union of the components.

    For ``x`` in ``S_e`` and ``y`` in ``S_f`` the product is
    ``phi_{ef,e}(x) * phi_{ef,f}(y)`` computed in ``S_{ef}``.  Blocks are laid
    out in shape order.
    """
    D.validate()
    L = D.shape
    offsets = D.offsets()
    elems = [(e, x) for e in L.elements for x in range(len(D.components[e]))]
    all_labels = [D.components[e].labels[x] for e, x in elems]
    if len(set(all_labels)) != len(all_labels):
        all_labels = [f"{L.labels[e]}:{D.components[e].labels[x]}" for e, x in elems]
    table = []
    for e, x in elems:
        row = []
        for f, y in elems:
            g = L.meet(e, f)
            Sg = D.components[g]
            row.append(offsets[g] + Sg.table[D.transitions[(g, e)][x]][D.transitions[(g, f)][y]])
        table.append(row)
    return validate_semigroup(all_labels, table)


def _principal_ideals(S: FiniteSemigroup) -> List[frozenset]:
    t = S.table
    n = len(t)
    ideals = []
    for x in range(n):
        J = {x}
        J.update(t[s][x] for s in range(n))
        J.update(t[x][s] for s in range(n))
        J.update(t[t[s][x]][u] for s in range(n) for u in range(n))
        ideals.append(frozenset(J))
    return ideals


def decompose_strong_semilattice(S: FiniteSemigroup) -> Optional[DecompositionData]:
    """Decompose a finite Clifford semigroup or normal band.

    The shape is the quotient by the J-relation (equal principal two-sided
    ideals); components are the J-classes.  Transitions are
    ``x -> f x f`` with ``f`` the identity of the group class (Clifford case)
    and ``x -> x y x`` with ``y`` any element of the rectangular class (band
    case).  Returns None when ``S`` is neither Clifford nor a normal band.
    Raises InvalidDiagram if the recovered data fails to reassemble to ``S``.
    """
    clifford = is_clifford(S)
    normal = is_normal_band(S)
    if not (clifford or normal):
        return None
    t = S.table
    n = len(t)
    ideals = _principal_ideals(S)
    classes: List[List[int]] = []
    cls_of = [-1] * n
    for x in range(n):
        if cls_of[x] >= 0:
            continue
        members = [y for y in range(x, n) if ideals[y] == ideals[x]]
        for y in members:
            cls_of[y] = len(classes)
        classes.append(members)
    k = len(classes)
    # quotient table
    qtable = [[None] * k for _ in range(k)]
    for a in range(n):
        for b in range(n):
            c = cls_of[t[a][b]]
            i, j = cls_of[a], cls_of[b]
            if qtable[i][j] is None:
                qtable[i][j] = c
            elif qtable[i][j] != c:
                raise InvalidDiagram("J-classes do not form a congruence")
    reps: List[int] = []
    components: List[FiniteSemigroup] = []
    for members in classes:
        local = {x: i for i, x in enumerate(members)}
        try:
            ctable = [[local[t[a][b]] for b in members] for a in members]
        except KeyError:
            raise InvalidDiagram("a J-class is not a subsemigroup") from None
        comp = validate_semigroup([S.labels[x] for x in members], ctable)
        if clifford:
            e = comp.identity()
            if e is None or not comp.is_group():
                raise InvalidDiagram("Clifford class is not a group")
            reps.append(members[e])
        else:
            if not is_rectangular_band(comp):
                raise InvalidDiagram("normal band class is not rectangular")
            reps.append(members[0])
        components.append(comp)
    shape = semilattice_from_table([S.labels[r] for r in reps], qtable)
    transitions: Dict[Tuple[int, int], Tuple[int, ...]] = {}
    for f, e in shape.comparable_pairs():
        y = reps[f]
        local_f = {x: i for i, x in enumerate(classes[f])}
        if clifford:
            images = [t[t[y][x]][y] for x in classes[e]]
        else:
            images = [t[t[x][y]][x] for x in classes[e]]
        try:
            transitions[(f, e)] = tuple(local_f[z] for z in images)
        except KeyError:
            raise InvalidDiagram(
                f"transition {shape.labels[f]}<{shape.labels[e]} leaves the target class") from None
    D = DecompositionData(shape, tuple(components), transitions, tuple(tuple(c) for c in classes))
    D.validate()
    if not _round_trip_ok(S, D):
        raise InvalidDiagram("decomposition does not reassemble to the input table")
    return D


def _round_trip_ok(S: FiniteSemigroup, D: DecompositionData) -> bool:
    T = assemble_strong_semilattice(D)
    # assembled element order follows blocks; map through the embedding
    order = [x for block in D.embedding for x in block]
    return all(order[T.table[i][j]] == S.table[order[i]][order[j]]
               for i in range(len(order)) for j in range(len(order)))


def relabel_by_embedding(S: FiniteSemigroup, D: DecompositionData) -> Tuple[int, ...]:
    """Permutation sending assembled indices to the original indices of ``S``."""
    return tuple(x for block in D.embedding for x in block)


# ---------------------------------------------------------------------------
# standard examples


def cyclic_group(n: int, prefix: str = "g") -> FiniteSemigroup:
    labels = ["1"] + [f"{prefix}{i}" if i > 1 else prefix for i in range(1, n)]
    return validate_semigroup(labels, [[(i + j) % n for j in range(n)] for i in range(n)])


def trivial_group(label: str = "1") -> FiniteSemigroup:
    return validate_semigroup([label], [[0]])


def symmetric_group_3() -> FiniteSemigroup:
    perms = list(itertools.permutations(range(3)))
    perms.sort(key=lambda p: (p != (0, 1, 2), p))

    def compose(p, q):  # (p*q)(i) = p(q(i))
        return tuple(p[q[i]] for i in range(3))

    labels = ["".join(str(v + 1) for v in p) for p in perms]
    return semigroup_from_function(perms, compose, labels)


def rectangular_band(rows: int, cols: int) -> FiniteSemigroup:
    """``I x J`` with ``(i, j)(k, l) = (i, l)``."""
    elems = [(i, j) for i in range(rows) for j in range(cols)]
    return semigroup_from_function(elems, lambda a, b: (a[0], b[1]),
                                   [f"r{i}c{j}" for i, j in elems])


def left_zero_band(n: int) -> FiniteSemigroup:
    return validate_semigroup([f"l{i}" for i in range(n)], [[i] * n for i in range(n)])


def adjoin_identity(S: FiniteSemigroup, label: str = "1") -> FiniteSemigroup:
    n = len(S)
    table = [list(row) + [i] for i, row in enumerate(S.table)]
    table.append(list(range(n + 1)))
    return validate_semigroup(list(S.labels) + [label], table)
