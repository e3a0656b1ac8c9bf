"""Classical and quantum graphs, homomorphisms, and the box product.

A quantum graph is a quantum set with a dagger-symmetric relation on it.
Classical graphs embed as quantum graphs with one-dimensional atoms; the
embedding is full and faithful, and every quantum graph has a classical
part living on its one-dimensional atoms.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import relations as rel
from .qsets import QuantumSet, classical, coproduct as qset_coproduct, product, unit
from .relations import Relation
from .subspaces import DEFAULT_TOL, Subspace, zero_subspace


# ---------------------------------------------------------------------------
# classical graphs


@dataclass(frozen=True)
class Graph:
    """A finite graph: labeled vertices and a symmetric edge relation.

    Loops are allowed, multiple edges are not.  Edges are stored with both
    orientations so adjacency is a set lookup.
    """

    vertices: tuple[str, ...]
    edges: frozenset[tuple[str, str]] = field(default_factory=frozenset)

    def __post_init__(self):
        if len(set(self.vertices)) != len(self.vertices):
            raise ValueError("duplicate vertex labels")
        vs = set(self.vertices)
        for a, b in self.edges:
            if a not in vs or b not in vs:
                raise ValueError(f"edge ({a},{b}) uses an unknown vertex")
            if (b, a) not in self.edges:
                raise ValueError(f"edge set is not symmetric at ({a},{b})")

    @property
    def n(self) -> int:
        return len(self.vertices)

    def adjacent(self, a: str, b: str) -> bool:
        return (a, b) in self.edges

    def is_simple(self) -> bool:
        return all(a != b for a, b in self.edges)

    def edge_pairs(self) -> list[tuple[str, str]]:
        """One representative per undirected edge, loops included."""
        out = []
        for a, b in sorted(self.edges):
            if (b, a) not in out:
                out.append((a, b))
        return out


def graph(vertices, pairs=()) -> Graph:
    """Build a graph from vertex labels and undirected edge pairs."""
    vs = tuple(str(v) for v in vertices)
    edges = set()
    for a, b in pairs:
        edges.add((str(a), str(b)))
        edges.add((str(b), str(a)))
    return Graph(vs, frozenset(edges))


def complete_graph(k: int) -> Graph:
    vs = [str(i) for i in range(k)]
    return graph(vs, [(a, b) for a in vs for b in vs if a < b])


def cycle_graph(k: int) -> Graph:
    vs = [str(i) for i in range(k)]
    return graph(vs, [(vs[i], vs[(i + 1) % k]) for i in range(k)] if k > 2 else
                 ([(vs[0], vs[1])] if k == 2 else []))


def edgeless_graph(k: int) -> Graph:
    return graph([str(i) for i in range(k)])


def is_classical_hom(f: dict, g: Graph, h: Graph) -> bool:
    """Edge preservation of a total map f between classical graphs."""
    if set(f.keys()) != set(g.vertices):
        return False
    if any(f[v] not in h.vertices for v in g.vertices):
        return False
    return all(h.adjacent(f[a], f[b]) for a, b in g.edges)


def classical_homs(g: Graph, h: Graph) -> list[dict]:
    """All homomorphisms g -> h by exhaustive enumeration."""
    out = []
    for values in itertools.product(h.vertices, repeat=g.n):
        f = dict(zip(g.vertices, values))
        if all(h.adjacent(f[a], f[b]) for a, b in g.edges):
            out.append(f)
    return out


def classical_hom_adjacent(f1: dict, f2: dict, g: Graph, h: Graph) -> bool:
    """f1 ~ f2 iff f1(v) ~ f2(v) in h for every vertex v of g."""
    return all(h.adjacent(f1[v], f2[v]) for v in g.vertices)


# ---------------------------------------------------------------------------
# quantum graphs


@dataclass(frozen=True, eq=False)
class QuantumGraph:
    vertices: QuantumSet
    edges: Relation

    def __post_init__(self):
        e = self.edges
        if e.src != self.vertices or e.dst != self.vertices:
            raise ValueError("edge relation must live on the vertex quantum set")
        if not rel.equal(rel.dagger(e), e):
            raise ValueError("edge relation is not dagger-symmetric")

    @property
    def tol(self) -> float:
        return self.edges.tol

    def __repr__(self) -> str:  # pragma: no cover
        return f"<QuantumGraph on {self.vertices!r}>"


def k0(tol: float = DEFAULT_TOL) -> QuantumGraph:
    empty = QuantumSet(())
    return QuantumGraph(empty, rel.zero(empty, empty, tol))


def k1(tol: float = DEFAULT_TOL) -> QuantumGraph:
    """The monoidal unit: one dim-1 vertex, no edge."""
    v = unit()
    return QuantumGraph(v, rel.zero(v, v, tol))


def looped_vertex(tol: float = DEFAULT_TOL) -> QuantumGraph:
    """A single dim-1 vertex with a loop."""
    v = unit()
    return QuantumGraph(v, rel.full(v, v, tol))


def inc_graph(g: Graph, tol: float = DEFAULT_TOL) -> QuantumGraph:
    """The classical graph as a quantum graph on dim-1 atoms."""
    e = rel.from_classical(g.vertices, g.vertices, sorted(g.edges), tol)
    return QuantumGraph(classical(g.vertices), e)


def box_product(g: QuantumGraph, h: QuantumGraph, tol: float | None = None) -> QuantumGraph:
    """Vertex set is the product; edges are (E_G x Id) v (Id x E_H)."""
    if tol is None:
        tol = max(g.tol, h.tol)
    idg = rel.identity(g.vertices, tol)
    idh = rel.identity(h.vertices, tol)
    e = rel.join(rel.tensor(g.edges, idh, tol), rel.tensor(idg, h.edges, tol), tol=tol)
    return QuantumGraph(product(g.vertices, h.vertices), e)


def graph_coproduct(g: QuantumGraph, h: QuantumGraph, tol: float | None = None) -> QuantumGraph:
    """Disjoint union of vertices with block-diagonal edges."""
    if tol is None:
        tol = max(g.tol, h.tol)
    verts = qset_coproduct(g.vertices, h.vertices)
    ng, nh = g.vertices.n_atoms, h.vertices.n_atoms

    def blk(i, j):
        if i < ng and j < ng:
            return g.edges.blocks[i][j]
        if i >= ng and j >= ng:
            return h.edges.blocks[i - ng][j - ng]
        return zero_subspace(verts.dims[j], verts.dims[i], tol)

    blocks = tuple(
        tuple(blk(i, j) for j in range(ng + nh)) for i in range(ng + nh)
    )
    return QuantumGraph(verts, Relation(verts, verts, blocks))


def coproduct_injections(g: QuantumGraph, h: QuantumGraph) -> tuple[Relation, Relation]:
    s = graph_coproduct(g, h)
    left = _injection(g.vertices, s.vertices, 0)
    right = _injection(h.vertices, s.vertices, g.vertices.n_atoms)
    return left, right


def _injection(x: QuantumSet, y: QuantumSet, offset: int) -> Relation:
    def blk(i, j):
        d_j, d_i = y.dims[j], x.dims[i]
        if j == i + offset:
            e = np.eye(d_i, dtype=np.complex128).reshape(1, -1) / np.sqrt(d_i)
            return Subspace(d_i, d_i, e)
        return zero_subspace(d_j, d_i)

    blocks = tuple(
        tuple(blk(i, j) for j in range(y.n_atoms)) for i in range(x.n_atoms)
    )
    return Relation(x, y, blocks)


def is_homomorphism(phi: Relation, g: QuantumGraph, h: QuantumGraph) -> bool:
    """phi is a function and phi o E_G <= E_H o phi."""
    if phi.src != g.vertices or phi.dst != h.vertices:
        raise ValueError("set mismatch: phi must map V_G to V_H")
    if not rel.is_function(phi):
        return False
    return rel.leq(rel.compose(phi, g.edges), rel.compose(h.edges, phi))


def is_isomorphism(phi: Relation, g: QuantumGraph, h: QuantumGraph) -> bool:
    """phi is a bijection intertwining the edge relations exactly."""
    if phi.src != g.vertices or phi.dst != h.vertices:
        raise ValueError("set mismatch: phi must map V_G to V_H")
    phid = rel.dagger(phi)
    if not rel.equal(rel.compose(phi, phid), rel.identity(h.vertices, phi.tol)):
        return False
    if not rel.equal(rel.compose(phid, phi), rel.identity(g.vertices, phi.tol)):
        return False
    return rel.equal(rel.compose(phi, g.edges), rel.compose(h.edges, phi))


def hom_adjacent(phi1: Relation, phi2: Relation, g: QuantumGraph, h: QuantumGraph) -> bool:
    """Adjacency of homomorphisms: phi1^dagger o E_H o phi2 >= Id_G."""
    for p in (phi1, phi2):
        if p.src != g.vertices or p.dst != h.vertices:
            raise ValueError("set mismatch: homs must map V_G to V_H")
    middle = rel.compose(rel.compose(rel.dagger(phi1), h.edges), phi2)
    return rel.leq(rel.identity(g.vertices, middle.tol), middle)


def is_reflexive(g: QuantumGraph) -> bool:
    return rel.leq(rel.identity(g.vertices, g.tol), g.edges)


def is_loopless(g: QuantumGraph) -> bool:
    """Identity blocks orthogonal to the edge relation."""
    for i, (_, d) in enumerate(g.vertices.atoms):
        blk = g.edges.blocks[i][i]
        if blk.dim == 0:
            continue
        eye = np.eye(d, dtype=np.complex128)
        if np.linalg.norm(blk.project(eye)) > blk.tol * np.sqrt(d):
            return False
    return True


@dataclass(frozen=True, eq=False)
class GraphHom:
    """A validated homomorphism between quantum graphs."""

    source: QuantumGraph
    target: QuantumGraph
    map: Relation

    def __post_init__(self):
        if not is_homomorphism(self.map, self.source, self.target):
            raise ValueError("the given relation is not a homomorphism")


# ---------------------------------------------------------------------------
# classical part


def classical_part(g: QuantumGraph) -> tuple[QuantumGraph, Relation]:
    """The subgraph on the dim-1 atoms, with the inclusion function."""
    atoms = tuple(a for a in g.vertices.atoms if a[1] == 1)
    cl_verts = QuantumSet(atoms)
    j = rel.inclusion_function(cl_verts, g.vertices, g.tol)
    e = rel.compose(rel.compose(rel.dagger(j), g.edges), j)
    return QuantumGraph(cl_verts, e), j


def factor_through_classical_part(phi: Relation, g: QuantumGraph,
                                  h: QuantumGraph) -> GraphHom:
    """Factor a homomorphism from a classical graph through Cl(target).

    Requires every atom of the source to be one-dimensional.  Blocks of
    phi into atoms of dimension > 1 must vanish; a nonzero such block
    signals a broken function invariant.
    """
    if not g.vertices.is_classical():
        raise ValueError("source graph must be classical")
    cl_h, j = classical_part(h)
    keep = [jdx for jdx, (_, d) in enumerate(h.vertices.atoms) if d == 1]
    for i in range(g.vertices.n_atoms):
        for jdx, (_, d) in enumerate(h.vertices.atoms):
            if d > 1 and phi.blocks[i][jdx].dim:
                raise ValueError(
                    "nonzero block into a higher-dimensional atom: not a function"
                )
    blocks = tuple(
        tuple(phi.blocks[i][jdx] for jdx in keep) for i in range(g.vertices.n_atoms)
    )
    psi = Relation(g.vertices, cl_h.vertices, blocks)
    if not rel.equal(rel.compose(j, psi), phi):
        raise ValueError("factorization failed: J o Psi != Phi")
    return GraphHom(g, cl_h, psi)


def classical_hom_graph(g: QuantumGraph) -> Graph:
    """The classical graph on the dim-1 atoms with adjacency by nonzero blocks."""
    labels = [lab for lab, d in g.vertices.atoms if d == 1]
    idx = {lab: g.vertices.index_of(lab) for lab in labels}
    pairs = [
        (a, b)
        for a in labels
        for b in labels
        if g.edges.blocks[idx[a]][idx[b]].dim > 0
    ]
    return graph(labels, pairs)


def classical_map_into(g: Graph, h: QuantumGraph, assignment: dict,
                       tol: float = DEFAULT_TOL) -> Relation:
    """Lift a map from classical vertices to dim-1 atoms of a quantum graph."""
    src = classical(g.vertices)
    one = np.ones((1, 1), dtype=np.complex128)

    def blk(i, jdx):
        d_j = h.vertices.dims[jdx]
        lab = h.vertices.labels[jdx]
        if d_j == 1 and assignment[g.vertices[i]] == lab:
            return Subspace(1, 1, one.reshape(1, 1).copy(), tol)
        return zero_subspace(d_j, 1, tol)

    blocks = tuple(
        tuple(blk(i, jdx) for jdx in range(h.vertices.n_atoms))
        for i in range(len(g.vertices))
    )
    return Relation(src, h.vertices, blocks)
