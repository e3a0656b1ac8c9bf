"""Relations between quantum sets: a block-indexed family of subspaces.

A relation from X to Y assigns to every atom pair (i of X, j of Y) a
subspace of dim(j) x dim(i) matrices.  Composition is the blockwise span
of operator products over the middle atoms; in finite dimension the span
is already closed, so no extra closure step is needed.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .qsets import QuantumSet, classical, product
from .subspaces import (
    DEFAULT_TOL,
    Subspace,
    adjoint_span,
    full_subspace,
    join_spans,
    orthonormalize,
    zero_subspace,
)


@dataclass(frozen=True, eq=False)
class Relation:
    src: QuantumSet
    dst: QuantumSet
    blocks: tuple[tuple[Subspace, ...], ...]  # indexed [src atom][dst atom]

    def __post_init__(self):
        if len(self.blocks) != self.src.n_atoms:
            raise ValueError("block grid does not match source atoms")
        for i, row in enumerate(self.blocks):
            if len(row) != self.dst.n_atoms:
                raise ValueError("block grid does not match target atoms")
            for j, s in enumerate(row):
                want = (self.dst.dims[j], self.src.dims[i])
                if (s.rows, s.cols) != want:
                    raise ValueError(
                        f"block ({i},{j}') has shape {(s.rows, s.cols)}, expected {want}"
                    )

    def block(self, i: int, j: int) -> Subspace:
        return self.blocks[i][j]

    @property
    def tol(self) -> float:
        tols = [s.tol for row in self.blocks for s in row]
        return max(tols) if tols else DEFAULT_TOL

    def __repr__(self) -> str:  # pragma: no cover
        dims = [[s.dim for s in row] for row in self.blocks]
        return f"<Relation {self.src.labels} -> {self.dst.labels}, block dims {dims}>"


def _grid(src: QuantumSet, dst: QuantumSet, fn) -> Relation:
    blocks = tuple(
        tuple(fn(i, j) for j in range(dst.n_atoms)) for i in range(src.n_atoms)
    )
    return Relation(src, dst, blocks)


def zero(src: QuantumSet, dst: QuantumSet, tol: float = DEFAULT_TOL) -> Relation:
    return _grid(src, dst, lambda i, j: zero_subspace(dst.dims[j], src.dims[i], tol))


def full(src: QuantumSet, dst: QuantumSet, tol: float = DEFAULT_TOL) -> Relation:
    return _grid(src, dst, lambda i, j: full_subspace(dst.dims[j], src.dims[i], tol))


@lru_cache(maxsize=None)
def identity(x: QuantumSet, tol: float = DEFAULT_TOL) -> Relation:
    """span{1} on diagonal atom pairs, zero elsewhere."""

    def blk(i, j):
        d_j, d_i = x.dims[j], x.dims[i]
        if i == j:
            e = np.eye(d_i, dtype=np.complex128).reshape(1, -1) / np.sqrt(d_i)
            return Subspace(d_i, d_i, e, tol)
        return zero_subspace(d_j, d_i, tol)

    return _grid(x, x, blk)


def dagger(r: Relation) -> Relation:
    """Blockwise adjoint: block (j,i) of the result is block (i,j) daggered."""
    return Relation(
        r.dst,
        r.src,
        tuple(
            tuple(adjoint_span(r.blocks[i][j]) for i in range(r.src.n_atoms))
            for j in range(r.dst.n_atoms)
        ),
    )


def compose(s: Relation, r: Relation, tol: float | None = None) -> Relation:
    """The composite s after r, blockwise span of products over middle atoms."""
    if r.dst != s.src:
        raise ValueError("set mismatch: r.dst must equal s.src")
    if tol is None:
        tol = max(r.tol, s.tol)
    mid = r.dst.n_atoms
    out = []
    for i in range(r.src.n_atoms):
        row = []
        for k in range(s.dst.n_atoms):
            zdim, xdim = s.dst.dims[k], r.src.dims[i]
            pieces = []
            for j in range(mid):
                rij = r.blocks[i][j]
                sjk = s.blocks[j][k]
                if rij.dim and sjk.dim:
                    prod = np.einsum("azy,byx->abzx", sjk.mats, rij.mats)
                    pieces.append(prod.reshape(-1, zdim * xdim))
            if not pieces:
                row.append(zero_subspace(zdim, xdim, tol))
            else:
                stack = pieces[0] if len(pieces) == 1 else np.concatenate(pieces)
                row.append(
                    orthonormalize(stack.reshape(-1, zdim, xdim), zdim, xdim, tol)
                )
        out.append(tuple(row))
    return Relation(r.src, s.dst, tuple(out))


def join(*rels: Relation, tol: float | None = None) -> Relation:
    """Blockwise span union; accepts any number of parallel relations."""
    if not rels:
        raise ValueError("join of no relations")
    first = rels[0]
    for r in rels[1:]:
        if r.src != first.src or r.dst != first.dst:
            raise ValueError("set mismatch in join")
    if tol is None:
        tol = max(r.tol for r in rels)
    return _grid(
        first.src,
        first.dst,
        lambda i, j: join_spans([r.blocks[i][j] for r in rels], tol),
    )


def leq(r: Relation, s: Relation) -> bool:
    """Blockwise subspace containment r <= s."""
    if r.src != s.src or r.dst != s.dst:
        raise ValueError("set mismatch in leq")
    for i in range(r.src.n_atoms):
        for j in range(r.dst.n_atoms):
            if not r.blocks[i][j].leq(s.blocks[i][j]):
                return False
    return True


def equal(r: Relation, s: Relation) -> bool:
    if r.src != s.src or r.dst != s.dst:
        raise ValueError("set mismatch in equal")
    for i in range(r.src.n_atoms):
        for j in range(r.dst.n_atoms):
            if not r.blocks[i][j].equal(s.blocks[i][j]):
                return False
    return True


def tensor(r: Relation, s: Relation, tol: float | None = None) -> Relation:
    """Kronecker product relation on the product quantum sets."""
    if tol is None:
        tol = max(r.tol, s.tol)
    src = product(r.src, s.src)
    dst = product(r.dst, s.dst)
    n2s, n2d = s.src.n_atoms, s.dst.n_atoms
    out = []
    for i1 in range(r.src.n_atoms):
        for i2 in range(n2s):
            row = []
            for j1 in range(r.dst.n_atoms):
                for j2 in range(n2d):
                    a = r.blocks[i1][j1]
                    b = s.blocks[i2][j2]
                    zr, zc = a.rows * b.rows, a.cols * b.cols
                    if a.dim and b.dim:
                        # kron of orthonormal bases is orthonormal
                        k = np.einsum(
                            "aij,bkl->abikjl", a.mats, b.mats
                        ).reshape(a.dim * b.dim, zr * zc)
                        row.append(Subspace(zr, zc, k, tol))
                    else:
                        row.append(zero_subspace(zr, zc, tol))
            out.append(tuple(row))
    return Relation(src, dst, tuple(out))


def from_classical(src_labels, dst_labels, pairs, tol: float = DEFAULT_TOL) -> Relation:
    """The relation with a full 1-dim block exactly at the given pairs."""
    src = classical(src_labels)
    dst = classical(dst_labels)
    wanted = set()
    for a, b in pairs:
        wanted.add((src.index_of(str(a)), dst.index_of(str(b))))
    one = np.ones((1, 1), dtype=np.complex128)

    def blk(i, j):
        if (i, j) in wanted:
            return Subspace(1, 1, one.copy(), tol)
        return zero_subspace(1, 1, tol)

    return _grid(src, dst, blk)


def from_classical_map(src_labels, dst_labels, assignment: dict,
                       tol: float = DEFAULT_TOL) -> Relation:
    """Graph of a function between classical sets, as a relation."""
    pairs = [(g, assignment[g]) for g in src_labels]
    return from_classical(src_labels, dst_labels, pairs, tol)


def is_function(f: Relation) -> bool:
    """f^dagger o f >= Id on the source and f o f^dagger <= Id on the target."""
    fd = dagger(f)
    return leq(identity(f.src, f.tol), compose(fd, f)) and leq(
        compose(f, fd), identity(f.dst, f.tol)
    )


def inclusion_function(w: QuantumSet, x: QuantumSet, tol: float = DEFAULT_TOL) -> Relation:
    """The inclusion of a subset w (an atom sublist of x) into x."""
    positions = []
    for lab, d in w.atoms:
        i = x.index_of(lab)  # KeyError if missing
        if x.dims[i] != d:
            raise ValueError(f"atom {lab!r} has dim {d} in the subset, {x.dims[i]} in the whole")
        positions.append(i)

    def blk(i, j):
        d_j, d_i = x.dims[j], w.dims[i]
        if positions[i] == j:
            e = np.eye(d_i, dtype=np.complex128).reshape(1, -1) / np.sqrt(d_i)
            return Subspace(d_i, d_i, e, tol)
        return zero_subspace(d_j, d_i, tol)

    return _grid(w, x, blk)


def atom_bijection(x: QuantumSet, y: QuantumSet, mapping: dict[int, int] | None = None,
                   tol: float = DEFAULT_TOL) -> Relation:
    """Identity-pattern function relation along an atom index bijection.

    With no mapping, atoms are matched by position (a pure relabeling).
    Dimensions must agree on matched atoms.
    """
    if mapping is None:
        mapping = {i: i for i in range(x.n_atoms)}
    if sorted(mapping.values()) != list(range(y.n_atoms)) or len(mapping) != x.n_atoms:
        raise ValueError("mapping is not a bijection of atom indices")
    for i, j in mapping.items():
        if x.dims[i] != y.dims[j]:
            raise ValueError(f"dimension mismatch at atoms {i} -> {j}")

    def blk(i, j):
        d_j, d_i = y.dims[j], x.dims[i]
        if mapping[i] == j:
            e = np.eye(d_i, dtype=np.complex128).reshape(1, -1) / np.sqrt(d_i)
            return Subspace(d_i, d_i, e, tol)
        return zero_subspace(d_j, d_i, tol)

    return _grid(x, y, blk)
