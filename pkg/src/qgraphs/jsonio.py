"""JSON encoding of the library's value types.

Complex scalars are two-element arrays [re, im] (plain numbers are
accepted on input as reals).  Matrices are arrays of row arrays.  Zero
blocks of relations are omitted on output and implied on input.
"""

from __future__ import annotations

import numpy as np

from . import channels as ch
from . import graphs as gr
from . import relations as rel
from .games import Game, QuantumStrategy
from .graphs import Graph, QuantumGraph
from .qsets import QuantumSet
from .relations import Relation
from .subspaces import DEFAULT_TOL, Subspace, orthonormalize, zero_subspace


def encode_scalar(z: complex) -> list[float]:
    return [float(np.real(z)), float(np.imag(z))]


def decode_scalar(obj) -> complex:
    if isinstance(obj, (int, float)):
        return complex(obj)
    if isinstance(obj, list) and len(obj) == 2:
        return complex(obj[0], obj[1])
    raise ValueError(f"not a complex scalar: {obj!r}")


def encode_matrix(m: np.ndarray) -> list:
    return [[encode_scalar(z) for z in row] for row in np.asarray(m)]


def decode_matrix(obj) -> np.ndarray:
    if not isinstance(obj, list) or not all(isinstance(r, list) for r in obj):
        raise ValueError("matrix must be an array of row arrays")
    return np.array([[decode_scalar(z) for z in row] for row in obj],
                    dtype=np.complex128)


def encode_subspace(s: Subspace) -> dict:
    return {
        "rows": s.rows,
        "cols": s.cols,
        "basis": [encode_matrix(m) for m in s.mats],
    }


def decode_subspace(obj, tol: float = DEFAULT_TOL) -> Subspace:
    rows, cols = int(obj["rows"]), int(obj["cols"])
    mats = [decode_matrix(m) for m in obj.get("basis", [])]
    return orthonormalize(mats, rows, cols, tol)


def encode_qset(x: QuantumSet) -> dict:
    return {"atoms": [{"label": lab, "dim": d} for lab, d in x.atoms]}


def decode_qset(obj) -> QuantumSet:
    return QuantumSet(tuple((str(a["label"]), int(a["dim"])) for a in obj["atoms"]))


def encode_relation(r: Relation) -> dict:
    blocks = []
    for i in range(r.src.n_atoms):
        for j in range(r.dst.n_atoms):
            blk = r.blocks[i][j]
            if blk.dim:
                blocks.append(
                    {"i": i, "j": j, "basis": [encode_matrix(m) for m in blk.mats]}
                )
    return {"src": encode_qset(r.src), "dst": encode_qset(r.dst), "blocks": blocks}


def decode_relation(obj, tol: float = DEFAULT_TOL) -> Relation:
    src = decode_qset(obj["src"])
    dst = decode_qset(obj["dst"])
    given: dict[tuple[int, int], Subspace] = {}
    for entry in obj.get("blocks", []):
        i, j = int(entry["i"]), int(entry["j"])
        mats = [decode_matrix(m) for m in entry.get("basis", [])]
        given[(i, j)] = orthonormalize(mats, dst.dims[j], src.dims[i], tol)
    blocks = tuple(
        tuple(
            given.get((i, j), zero_subspace(dst.dims[j], src.dims[i], tol))
            for j in range(dst.n_atoms)
        )
        for i in range(src.n_atoms)
    )
    return Relation(src, dst, blocks)


def encode_graph(g: QuantumGraph) -> dict:
    return {"vertices": encode_qset(g.vertices), "edges": encode_relation(g.edges)}


def decode_graph(obj, tol: float = DEFAULT_TOL) -> QuantumGraph:
    """Accepts the full format or the classical shorthand with label lists."""
    verts = obj["vertices"]
    if isinstance(verts, list):
        labels = [str(v) for v in verts]
        pairs = [(str(a), str(b)) for a, b in obj.get("edges", [])]
        return gr.inc_graph(gr.graph(labels, pairs), tol)
    vertices = decode_qset(verts)
    edges = decode_relation(obj["edges"], tol)
    if edges.src != vertices:
        raise ValueError("edge relation does not match the vertex set")
    return QuantumGraph(vertices, edges)


def encode_classical_graph(g: Graph) -> dict:
    return {"vertices": list(g.vertices), "edges": [list(e) for e in g.edge_pairs()]}


def decode_classical_graph(obj) -> Graph:
    return gr.graph([str(v) for v in obj["vertices"]],
                    [(str(a), str(b)) for a, b in obj.get("edges", [])])


def encode_game(game: Game) -> dict:
    return {"G": encode_classical_graph(game.g), "H": encode_classical_graph(game.h)}


def decode_game(obj) -> Game:
    return Game(decode_classical_graph(obj["G"]), decode_classical_graph(obj["H"]))


def encode_strategy(s: QuantumStrategy) -> dict:
    return {
        "n": s.n,
        "projections": {
            f"{g},{h}": encode_matrix(m) for (g, h), m in sorted(s.projections.items())
        },
    }


def decode_strategy(obj) -> QuantumStrategy:
    n = int(obj["n"])
    proj = {}
    for key, mat in obj["projections"].items():
        g, h = key.split(",", 1)
        proj[(g, h)] = decode_matrix(mat)
    return QuantumStrategy(n, proj)


def decode_map(obj, tol: float = DEFAULT_TOL) -> Relation:
    """A relation, or the {"assignment": {...}} shorthand for classical maps."""
    if "assignment" in obj:
        src = [str(k) for k in obj["src"]]
        dst = [str(k) for k in obj["dst"]]
        assignment = {str(k): str(v) for k, v in obj["assignment"].items()}
        return rel.from_classical_map(src, dst, assignment, tol)
    return decode_relation(obj, tol)


def encode_algebra(a: ch.MatrixAlgebra) -> dict:
    if a.block_spec is not None:
        return {"ambient": a.ambient, "blocks": list(a.block_spec)}
    return {
        "ambient": a.ambient,
        "generators": [encode_matrix(m) for m in a.basis.mats],
    }


def decode_algebra(obj, tol: float = DEFAULT_TOL) -> ch.MatrixAlgebra:
    m = int(obj["ambient"])
    if "blocks" in obj:
        dims = tuple(int(d) for d in obj["blocks"])
        if sum(dims) != m:
            raise ValueError("block dims do not sum to the ambient dimension")
        return ch.block_diagonal_algebra(dims, tol)
    gens = [decode_matrix(g) for g in obj.get("generators", [])]
    return ch.algebra_from_generators(gens, m, tol)


def encode_cpmap(phi: ch.CPMap) -> dict:
    return {
        "src": encode_algebra(phi.src),
        "dst": encode_algebra(phi.dst),
        "kraus": [encode_matrix(v) for v in phi.kraus],
    }


def decode_cpmap(obj, tol: float = DEFAULT_TOL) -> ch.CPMap:
    src = decode_algebra(obj["src"], tol)
    dst = decode_algebra(obj["dst"], tol)
    kraus = tuple(decode_matrix(v) for v in obj["kraus"])
    return ch.CPMap(src, dst, kraus, tol)


def encode_algebra_relation(r: ch.AlgebraRelation) -> dict:
    return {"space": [encode_matrix(m) for m in r.space.mats]}


def decode_algebra_relation(obj, src: ch.MatrixAlgebra, dst: ch.MatrixAlgebra,
                            tol: float = DEFAULT_TOL) -> ch.AlgebraRelation:
    mats = [decode_matrix(m) for m in obj["space"]]
    space = orthonormalize(mats, dst.ambient, src.ambient, tol)
    return ch.AlgebraRelation(src, dst, space)
