"""Finite quantum sets: ordered lists of labeled finite-dimensional atoms."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class QuantumSet:
    """An ordered list of atoms, each a label and a positive dimension.

    Atom order is part of the value and fixed at construction; block
    indexing elsewhere always uses atom indices.  The empty list is legal
    (the empty quantum set).
    """

    atoms: tuple[tuple[str, int], ...]

    def __post_init__(self):
        labels = [lab for lab, _ in self.atoms]
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate atom labels: {labels}")
        for lab, d in self.atoms:
            if d < 1:
                raise ValueError(f"atom {lab!r} has non-positive dimension {d}")

    @property
    def n_atoms(self) -> int:
        return len(self.atoms)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(lab for lab, _ in self.atoms)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(d for _, d in self.atoms)

    @property
    def total_dim(self) -> int:
        return sum(self.dims)

    def index_of(self, label: str) -> int:
        for i, (lab, _) in enumerate(self.atoms):
            if lab == label:
                return i
        raise KeyError(f"no atom labeled {label!r}")

    def is_classical(self) -> bool:
        return all(d == 1 for d in self.dims)

    def __repr__(self) -> str:  # pragma: no cover
        inner = ", ".join(f"{lab}:{d}" for lab, d in self.atoms)
        return f"QuantumSet({inner})"


def classical(labels) -> QuantumSet:
    """One dim-1 atom per label, in input order."""
    return QuantumSet(tuple((str(lab), 1) for lab in labels))


def qn(n: int) -> QuantumSet:
    """The quantum set with a single atom of dimension n."""
    if n < 1:
        raise ValueError(f"qn needs n >= 1, got {n}")
    return QuantumSet(((f"q{n}", n),))


def unit() -> QuantumSet:
    """The monoidal unit: a single dim-1 atom."""
    return QuantumSet((("*", 1),))


def product(x: QuantumSet, y: QuantumSet) -> QuantumSet:
    """Atoms are ordered pairs, lexicographic in the input orders."""
    atoms = tuple(
        (f"({xl},{yl})", xd * yd) for xl, xd in x.atoms for yl, yd in y.atoms
    )
    return QuantumSet(atoms)


def coproduct(x: QuantumSet, y: QuantumSet) -> QuantumSet:
    """Disjoint union with side-tagged labels."""
    atoms = tuple((f"L.{lab}", d) for lab, d in x.atoms)
    atoms += tuple((f"R.{lab}", d) for lab, d in y.atoms)
    return QuantumSet(atoms)
