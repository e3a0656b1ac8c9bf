"""Seeded random instances for property tests and the acceptance suite."""

from __future__ import annotations

import itertools

import numpy as np

from . import channels as ch
from . import games as gm
from . import graphs as gr
from . import relations as rel
from .games import Game, QuantumStrategy
from .graphs import Graph, QuantumGraph
from .qsets import QuantumSet
from .randutil import complex_gaussian, haar_unitary, random_hermitian
from .relations import Relation
from .subspaces import DEFAULT_TOL, Subspace, orthonormalize, zero_subspace


def random_quantum_set(rng, max_atoms: int = 3, max_dim: int = 3,
                       min_atoms: int = 1) -> QuantumSet:
    k = int(rng.integers(min_atoms, max_atoms + 1))
    return QuantumSet(
        tuple((f"a{i}", int(rng.integers(1, max_dim + 1))) for i in range(k))
    )


def random_subspace(rng, rows: int, cols: int, dim: int,
                    tol: float = DEFAULT_TOL) -> Subspace:
    dim = min(dim, rows * cols)
    if dim == 0:
        return zero_subspace(rows, cols, tol)
    return orthonormalize(complex_gaussian(rng, dim, rows, cols), rows, cols, tol)


def random_relation(rng, x: QuantumSet, y: QuantumSet, max_block_dim: int = 2,
                    tol: float = DEFAULT_TOL) -> Relation:
    blocks = tuple(
        tuple(
            random_subspace(
                rng, y.dims[j], x.dims[i], int(rng.integers(0, max_block_dim + 1)), tol
            )
            for j in range(y.n_atoms)
        )
        for i in range(x.n_atoms)
    )
    return Relation(x, y, blocks)


def random_quantum_graph(rng, max_atoms: int = 3, max_dim: int = 3,
                         tol: float = DEFAULT_TOL) -> QuantumGraph:
    x = random_quantum_set(rng, max_atoms, max_dim)
    r = random_relation(rng, x, x, max_block_dim=1, tol=tol)
    e = rel.join(r, rel.dagger(r), tol=tol)
    return QuantumGraph(x, e)


def random_mixed_graph(rng, tol: float = DEFAULT_TOL) -> QuantumGraph:
    """A quantum graph guaranteed to carry at least one dim-1 atom."""
    k1 = int(rng.integers(1, 3))
    atoms = [(f"c{i}", 1) for i in range(k1)]
    for i in range(int(rng.integers(1, 3))):
        atoms.append((f"q{i}", int(rng.integers(2, 4))))
    x = QuantumSet(tuple(atoms))
    r = random_relation(rng, x, x, max_block_dim=1, tol=tol)
    e = rel.join(r, rel.dagger(r), tol=tol)
    return QuantumGraph(x, e)


def random_classical_graph(rng, n: int, p: float = 0.5, loops: bool = False) -> Graph:
    vs = [str(i) for i in range(n)]
    pairs = []
    for i in range(n):
        start = i if loops else i + 1
        for j in range(start, n):
            if rng.random() < p:
                pairs.append((vs[i], vs[j]))
    return gr.graph(vs, pairs)


def random_classical_relation(rng, nx: int, ny: int, p: float = 0.5):
    xs = [str(i) for i in range(nx)]
    ys = [f"y{i}" for i in range(ny)]
    pairs = [(a, b) for a in xs for b in ys if rng.random() < p]
    return xs, ys, pairs


# ---------------------------------------------------------------------------
# strategy corpus


def strategy_corpus(rng, game: Game, sizes=(1, 2, 3)):
    """Winning and guaranteed-losing strategies for one game.

    Yields (strategy, expected_winning).  Losing entries carry at least
    one losing tuple of probability >= 1/2, which pins their win
    probability below 1 - 1/(2 |V_G|^2).
    """
    found = gm.classical_hom_search(game.g, game.h)
    if found is None:
        raise ValueError("strategy corpus needs a game with a classical solution")
    alts = _alternative_homs(game, found)
    out = []
    for n in sizes:
        lift = gm.lift_assignment(found, game, n)
        out.append((lift, True))
        out.append((gm.conjugate_strategy(lift, haar_unitary(rng, n)), True))
        recolored = _recolor(game, found, rng)
        bad = gm.lift_assignment(recolored, game, n)
        out.append((bad, False))
        out.append((gm.conjugate_strategy(bad, haar_unitary(rng, n)), False))
    for f2 in alts[:2]:
        s = gm.direct_sum(gm.lift_assignment(found, game, 1),
                          gm.lift_assignment(f2, game, 2))
        out.append((s, True))
        bad = gm.direct_sum(gm.lift_assignment(found, game, 1),
                            gm.lift_assignment(_recolor(game, f2, rng), game, 2))
        out.append((gm.conjugate_strategy(bad, haar_unitary(rng, 3)), False))
    return out


def _alternative_homs(game: Game, first: dict) -> list[dict]:
    out = []
    for f in gr.classical_homs(game.g, game.h):
        if f != first:
            out.append(f)
        if len(out) >= 4:
            break
    return out


def _recolor(game: Game, f: dict, rng) -> dict:
    """Break one edge of a homomorphism; at least one product stays full."""
    edges = sorted(game.g.edges)
    g1, g2 = edges[int(rng.integers(len(edges)))]
    bad = dict(f)
    bad[g1] = f[g2]
    if game.h.adjacent(bad[g1], bad[g2]):
        # f(g2) ~ f(g2) cannot hold in a simple graph, so this is unreachable
        raise AssertionError("recoloring failed to break the edge")
    return bad


def random_pvm_strategy(rng, game: Game, n: int) -> QuantumStrategy:
    """A valid PVM family with generically violated orthogonality."""
    vh = game.h.vertices
    proj = {}
    for g in game.g.vertices:
        u = haar_unitary(rng, n)
        d = rng.multinomial(n, np.full(len(vh), 1.0 / len(vh)))
        colors = np.repeat(np.arange(len(vh)), d)
        for i, h in enumerate(vh):
            cols = u[:, colors == i]
            proj[(g, h)] = cols @ cols.conj().T
    return QuantumStrategy(n, proj)


# ---------------------------------------------------------------------------
# channel corpus


def random_block_algebra(rng, max_blocks: int = 2, max_dim: int = 2,
                         tol: float = DEFAULT_TOL) -> ch.MatrixAlgebra:
    k = int(rng.integers(1, max_blocks + 1))
    dims = tuple(int(rng.integers(1, max_dim + 1)) for _ in range(k))
    return ch.block_diagonal_algebra(dims, tol)


def random_cp_map(rng, src: ch.MatrixAlgebra | None = None, n: int | None = None,
                  k_ops: int | None = None, tol: float = DEFAULT_TOL) -> ch.CPMap:
    """A trace-nonincreasing CP map into a full matrix algebra."""
    if src is None:
        src = random_block_algebra(rng, tol=tol)
    m = src.ambient
    n = n or int(rng.integers(1, 4))
    k_ops = k_ops or int(rng.integers(1, 5))
    kraus = [complex_gaussian(rng, n, m) for _ in range(k_ops)]
    total = sum(v.conj().T @ v for v in kraus)
    scale = 1.0 / np.sqrt(float(np.linalg.eigvalsh(total).max()) * (1 + 1e-6))
    kraus = tuple(v * scale for v in kraus)
    return ch.CPMap(src, ch.full_algebra(n, tol), kraus, tol)


def remix_kraus(rng, phi: ch.CPMap, extra: int = 2) -> ch.CPMap:
    """An equivalent Kraus list mixed by a random isometry."""
    k = len(phi.kraus)
    w, _ = np.linalg.qr(complex_gaussian(rng, k + extra, k))
    new = tuple(
        sum(w[j, i] * phi.kraus[i] for i in range(k)) for j in range(k + extra)
    )
    return ch.CPMap(phi.src, phi.dst, new, phi.tol)


def random_unital_homomorphism(rng, tol: float = DEFAULT_TOL):
    """A random unital dagger-homomorphism between block algebras.

    Returns (pi_apply, src, dst) with pi_apply mapping elements of dst
    into src; multiplicities are sampled so every source block is filled.
    """
    kn = int(rng.integers(1, 3))
    n_dims = [int(rng.integers(1, 3)) for _ in range(kn)]
    dst = ch.block_diagonal_algebra(tuple(n_dims), tol)
    n_blocks_m = int(rng.integers(1, 3))
    mult = []
    for _ in range(n_blocks_m):
        c = [int(rng.integers(0, 3)) for _ in n_dims]
        if sum(ci * di for ci, di in zip(c, n_dims)) == 0:
            c[int(rng.integers(len(c)))] = 1
        mult.append(c)
    m_dims = [sum(ci * di for ci, di in zip(c, n_dims)) for c in mult]
    src = ch.block_diagonal_algebra(tuple(m_dims), tol)
    us = [haar_unitary(rng, d) for d in m_dims]

    def pi_apply(b: np.ndarray) -> np.ndarray:
        n_offs = np.cumsum([0] + n_dims)
        blocks_b = [
            b[n_offs[i] : n_offs[i + 1], n_offs[i] : n_offs[i + 1]]
            for i in range(len(n_dims))
        ]
        out_blocks = []
        for c, d, u in zip(mult, m_dims, us):
            pieces = []
            for ci, bi in zip(c, blocks_b):
                pieces.extend([bi] * ci)
            inner = np.zeros((d, d), dtype=np.complex128)
            at = 0
            for p in pieces:
                w = p.shape[0]
                inner[at : at + w, at : at + w] = p
                at += w
            out_blocks.append(u @ inner @ u.conj().T)
        m = sum(m_dims)
        out = np.zeros((m, m), dtype=np.complex128)
        at = 0
        for blk in out_blocks:
            w = blk.shape[0]
            out[at : at + w, at : at + w] = blk
            at += w
        return out

    return pi_apply, src, dst


def random_tp_cohomomorphism(rng, tol: float = DEFAULT_TOL) -> ch.CPMap:
    pi_apply, src, dst = random_unital_homomorphism(rng, tol)
    return ch.cohom_from_adjoint(pi_apply, src, dst, tol)


def random_classical_dual(rng, tol: float = DEFAULT_TOL) -> ch.CPMap:
    nx = int(rng.integers(2, 5))
    ny = int(rng.integers(2, 5))
    xs = [str(i) for i in range(nx)]
    ys = [str(i) for i in range(ny)]
    f = {x: ys[int(rng.integers(ny))] for x in xs}
    return ch.classical_function_dual(f, xs, ys, tol)


def random_operator_system(rng, max_ambient: int = 4, max_dim: int = 8,
                           tol: float = DEFAULT_TOL) -> ch.AlgebraRelation:
    """A reflexive symmetric commutant bimodule on a random algebra."""
    while True:
        alg = random_block_algebra(rng, max_blocks=2, max_dim=2, tol=tol)
        if alg.ambient <= max_ambient:
            break
    m = alg.ambient
    n_h = int(rng.integers(0, 3))
    while True:
        kernels = [np.eye(m, dtype=np.complex128)]
        kernels += [random_hermitian(rng, m) for _ in range(n_h)]
        mats = []
        comm = alg.commutant.mats
        for x in kernels:
            for b in comm:
                for a in comm:
                    mats.append(b @ x @ a)
        space = orthonormalize(mats, m, m, tol)
        if space.dim <= max_dim:
            return ch.AlgebraRelation(alg, alg, space)
        n_h -= 1
