"""Shipped fixture instances.

Every fixture is built from the constructors in :mod:`semigroups` and
:mod:`diagrams`, then round-tripped through the JSON instance format.  The
same instances are stored as files under ``fixtures/``; ``write_fixture_files``
regenerates them.
"""

from __future__ import annotations

import itertools
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Dict, List, Sequence, Tuple

from .algebras import scalar_algebra, semigroup_algebra
from .diagrams import constant_diagram, unitisation_diagram
from .instances import InstanceFile, make_instance, parse_instance
from .semigroups import (DecompositionData, FiniteSemigroup, FiniteSemilattice, assemble_strong_semilattice,
                         chain_semilattice, cyclic_group, diamond_semilattice, free_semilattice,
                         left_zero_band, rectangular_band, semigroup_from_function, symmetric_group_3,
                         trivial_group)


def clifford_data(L: FiniteSemilattice, groups: Sequence[FiniteSemigroup],
                  homs: Dict[Tuple[int, int], Sequence[int]]) -> DecompositionData:
    """Fill in identity maps on the diagonal; ``homs`` lists the strict pairs."""
    trans = {(e, e): tuple(range(len(groups[e]))) for e in L.elements}
    trans.update({k: tuple(v) for k, v in homs.items()})
    dec = DecompositionData(L, tuple(groups), trans)
    dec.validate()
    return dec


def constant_clifford(L: FiniteSemilattice, G: FiniteSemigroup) -> DecompositionData:
    ident = tuple(range(len(G)))
    return clifford_data(L, [G] * len(L), {(f, e): ident for f, e in L.comparable_pairs() if f != e})


def sign_map() -> Tuple[int, ...]:
    """Parity of each element of ``symmetric_group_3`` as an index into ``cyclic_group(2)``."""
    S3 = symmetric_group_3()
    out = []
    for lab in S3.labels:
        p = [int(c) - 1 for c in lab]
        inv = sum(1 for i in range(3) for j in range(i + 1, 3) if p[i] > p[j])
        out.append(inv % 2)
    return tuple(out)


def normal_band_6() -> FiniteSemigroup:
    """Left-zero band ``{a, b}`` over the 2x2 rectangular band via ``(i, 0) -> (i, 0)``."""
    L = chain_semilattice(2, ["top", "bot"])
    top = semigroup_from_function([(0, 0), (1, 0)], lambda x, y: (x[0], y[1]), ["a", "b"])
    bot = rectangular_band(2, 2)
    phi = (bot.labels.index("r0c0"), bot.labels.index("r1c0"))
    dec = DecompositionData(L, (top, bot), {(0, 0): (0, 1), (1, 1): (0, 1, 2, 3), (1, 0): phi})
    return assemble_strong_semilattice(dec)


def _diagram_fixtures() -> List[Tuple[str, str, object, str]]:
    Qa = scalar_algebra()
    Z2, Z3, S3, T = cyclic_group(2), cyclic_group(3), symmetric_group_3(), trivial_group()
    c2, c3, dia = chain_semilattice(2), chain_semilattice(3), diamond_semilattice()
    out = [
        ("point-Q", "semilattice-diagram", constant_diagram(chain_semilattice(1), Qa),
         "singleton shape with scalar fibre"),
        ("point-S3", "clifford", constant_clifford(chain_semilattice(1), S3), "the group S3 alone"),
        ("chain2-Q", "semilattice-diagram", constant_diagram(c2, Qa), "constant scalar diagram on a 2-chain"),
        ("chain3-Q", "semilattice-diagram", constant_diagram(c3, Qa), "constant scalar diagram on a 3-chain"),
        ("chain2-Z2", "clifford", constant_clifford(c2, Z2), "2-chain of Z/2 with identity transitions"),
        ("chain2-Z2-over-1", "clifford", clifford_data(c2, [Z2, T], {(1, 0): (0, 0)}),
         "Z/2 on top of the trivial group"),
        ("chain2-Z3-over-1", "clifford", clifford_data(c2, [Z3, T], {(1, 0): (0, 0, 0)}),
         "Z/3 on top of the trivial group"),
        ("chain3-Z3", "clifford", constant_clifford(c3, Z3), "3-chain of Z/3 with identity transitions"),
        ("chain2-S3-over-Z2", "clifford", clifford_data(c2, [S3, Z2], {(1, 0): sign_map()}),
         "S3 over Z/2 through the sign homomorphism"),
        ("diamond-Q", "semilattice-diagram", constant_diagram(dia, Qa), "constant scalar diagram on the diamond"),
        ("diamond-Z2-mixed", "clifford",
         clifford_data(dia, [Z2, Z2, T, T], {(1, 0): (0, 1), (2, 0): (0, 0), (3, 0): (0, 0),
                                             (3, 1): (0, 0), (3, 2): (0,)}),
         "diamond with Z/2 on 1 and a, trivial groups on b and 0"),
        ("free2-Q", "semilattice-diagram", constant_diagram(free_semilattice(2), Qa),
         "constant scalar diagram on the free semilattice with 2 generators"),
        ("free3-Q", "semilattice-diagram", constant_diagram(free_semilattice(3), Qa),
         "constant scalar diagram on the free semilattice with 3 generators"),
        ("free2-Z2", "clifford", constant_clifford(free_semilattice(2), Z2),
         "free semilattice with 2 generators, constant Z/2"),
        ("free3-Z2", "clifford", constant_clifford(free_semilattice(3), Z2),
         "free semilattice with 3 generators, constant Z/2"),
        ("unitisation-Z2", "semilattice-diagram", unitisation_diagram(semigroup_algebra(Z2)),
         "Q above Q[Z/2] through the unit map"),
    ]
    return out


def _semigroup_fixtures() -> List[Tuple[str, str, object, str]]:
    out = [
        ("group-1", "semigroup", trivial_group(), "trivial group"),
        ("group-Z2", "semigroup", cyclic_group(2), "cyclic group of order 2"),
        ("group-Z3", "semigroup", cyclic_group(3), "cyclic group of order 3"),
        ("group-S3", "semigroup", symmetric_group_3(), "symmetric group on 3 letters"),
        ("semilattice-free2", "semigroup", free_semilattice(2).underlying, "free semilattice, 2 generators"),
        ("semilattice-free3", "semigroup", free_semilattice(3).underlying, "free semilattice, 3 generators"),
        ("semilattice-diamond", "semigroup", diamond_semilattice().underlying, "diamond semilattice"),
        ("normal-band-6", "band", normal_band_6(), "left-zero band over a 2x2 rectangular band"),
        ("left-zero-2", "band", left_zero_band(2), "two-element left-zero band"),
    ]
    for r, c in itertools.product(range(1, 4), range(1, 4)):
        out.append((f"rect-{r}x{c}", "band", rectangular_band(r, c), f"{r}x{c} rectangular band"))
    return out


def _clifford_semigroups() -> List[Tuple[str, str, object, str]]:
    return [(name + "-semigroup", "semigroup", assemble_strong_semilattice(obj), desc + " (as a semigroup)")
            for name, kind, obj, desc in _diagram_fixtures() if kind == "clifford"]


@lru_cache(maxsize=None)
def fixture_library() -> Dict[str, InstanceFile]:
    """All fixtures by name, in a fixed order."""
    out: Dict[str, InstanceFile] = {}
    for name, kind, obj, desc in _diagram_fixtures() + _semigroup_fixtures() + _clifford_semigroups():
        out[name] = make_instance(kind, name, obj, desc)
    return out


def fixture(name: str) -> InstanceFile:
    return fixture_library()[name]


def diagram_fixture_names() -> List[str]:
    return [n for n, inst in fixture_library().items() if inst.kind in ("clifford", "semilattice-diagram")]


def fixture_dir() -> Path:
    return Path(str(resources.files("semihoch") / "fixtures"))


def write_fixture_files(directory=None) -> List[Path]:
    directory = Path(directory) if directory is not None else fixture_dir()
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for name, inst in fixture_library().items():
        p = directory / f"{name}.json"
        p.write_text(inst.to_json(), encoding="utf-8")
        paths.append(p)
    return paths


def load_fixture_file(name: str) -> InstanceFile:
    p = fixture_dir() / f"{name}.json"
    return parse_instance(p.read_text(encoding="utf-8"), source=str(p))
