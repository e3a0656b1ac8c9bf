"""The graph homomorphism game.

Two provers receive vertices ``g1, g2`` of G and reply with vertices
``h1, h2`` of H; they win when equal questions get equal answers and
adjacent questions get adjacent answers.  A quantum strategy is a family
of n x n projections, one PVM per question vertex, measured against a
maximally entangled state; it wins with certainty exactly when the
projections of every losing answer tuple are orthogonal.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import graphs as gr
from . import relations as rel
from .graphs import Graph, QuantumGraph
from .qsets import classical, product, qn
from .randutil import haar_unitary
from .relations import Relation
from .subspaces import DEFAULT_TOL, orthonormalize, zero_subspace


@dataclass(frozen=True)
class Game:
    g: Graph
    h: Graph

    def __post_init__(self):
        for side, gph in (("G", self.g), ("H", self.h)):
            if not gph.is_simple():
                raise ValueError(f"game graph {side} must be simple (no loops)")


def win(game: Game, g1: str, h1: str, h2: str, g2: str) -> bool:
    """(g1 = g2 => h1 = h2) and (g1 ~ g2 => h1 ~ h2)."""
    for v in (g1, g2):
        if v not in game.g.vertices:
            raise ValueError(f"unknown question vertex {v!r}")
    for v in (h1, h2):
        if v not in game.h.vertices:
            raise ValueError(f"unknown answer vertex {v!r}")
    if g1 == g2 and h1 != h2:
        return False
    if game.g.adjacent(g1, g2) and not game.h.adjacent(h1, h2):
        return False
    return True


def losing_tuples(game: Game):
    for g1, g2 in itertools.product(game.g.vertices, repeat=2):
        if g1 == g2:
            for h1, h2 in itertools.product(game.h.vertices, repeat=2):
                if h1 != h2:
                    yield g1, h1, h2, g2
        elif game.g.adjacent(g1, g2):
            for h1, h2 in itertools.product(game.h.vertices, repeat=2):
                if not game.h.adjacent(h1, h2):
                    yield g1, h1, h2, g2


# ---------------------------------------------------------------------------
# strategies


@dataclass(eq=False)
class QuantumStrategy:
    """Per-question PVMs of n x n projections, keyed by (g, h)."""

    n: int
    projections: dict[tuple[str, str], np.ndarray]

    def p(self, g: str, h: str) -> np.ndarray:
        return self.projections[(g, h)]

    def pvm_at(self, g: str, hs) -> dict[str, np.ndarray]:
        return {h: self.projections[(g, h)] for h in hs}

    def validate(self, game: Game, tol: float = DEFAULT_TOL) -> None:
        """Type invariants: Hermitian idempotents forming one PVM per g."""
        want = {(g, h) for g in game.g.vertices for h in game.h.vertices}
        if set(self.projections.keys()) != want:
            raise ValueError("strategy keys do not match the game vertex sets")
        for (g, h), m in self.projections.items():
            if m.shape != (self.n, self.n):
                raise ValueError(f"projection ({g},{h}) has shape {m.shape}")
            if np.linalg.norm(m - m.conj().T) > tol or np.linalg.norm(m @ m - m) > tol:
                raise ValueError(f"entry ({g},{h}) is not a projection within tol")
        eye = np.eye(self.n)
        for g in game.g.vertices:
            tot = sum(self.projections[(g, h)] for h in game.h.vertices)
            if np.linalg.norm(tot - eye) > tol:
                raise ValueError(f"PVM at {g!r} does not sum to the identity")


@dataclass(frozen=True)
class ClassicalStrategy:
    """Deterministic assignments mixed by shared randomness."""

    assignments: tuple[dict, ...]
    weights: tuple[float, ...]

    @classmethod
    def deterministic(cls, assignment: dict) -> "ClassicalStrategy":
        return cls((dict(assignment),), (1.0,))

    def __post_init__(self):
        if len(self.assignments) != len(self.weights) or not self.assignments:
            raise ValueError("need one weight per assignment")
        if any(w < 0 for w in self.weights) or abs(sum(self.weights) - 1.0) > 1e-12:
            raise ValueError("weights must be a probability vector")


def lift_assignment(assignment: dict, game: Game, n: int) -> QuantumStrategy:
    """The rank-n lift: p(g,h) = identity when h = f(g), else 0."""
    eye = np.eye(n, dtype=np.complex128)
    zero_m = np.zeros((n, n), dtype=np.complex128)
    proj = {
        (g, h): (eye.copy() if assignment[g] == h else zero_m.copy())
        for g in game.g.vertices
        for h in game.h.vertices
    }
    return QuantumStrategy(n, proj)


def direct_sum(s1: QuantumStrategy, s2: QuantumStrategy) -> QuantumStrategy:
    """Block-diagonal sum of two strategies for the same game."""
    if set(s1.projections) != set(s2.projections):
        raise ValueError("strategies are for different games")
    n = s1.n + s2.n
    proj = {}
    for key in s1.projections:
        m = np.zeros((n, n), dtype=np.complex128)
        m[: s1.n, : s1.n] = s1.projections[key]
        m[s1.n :, s1.n :] = s2.projections[key]
        proj[key] = m
    return QuantumStrategy(n, proj)


def conjugate_strategy(s: QuantumStrategy, u: np.ndarray) -> QuantumStrategy:
    """Conjugate every projection by one unitary; preserves all residuals."""
    return QuantumStrategy(
        s.n, {k: u @ m @ u.conj().T for k, m in s.projections.items()}
    )


# ---------------------------------------------------------------------------
# verification


@dataclass
class StrategyReport:
    passed: bool
    projection_defect: float
    completeness_defect: float
    orthogonality_defect: float
    worst_tuple: tuple | None
    tol: float

    def residuals(self) -> dict[str, float]:
        return {
            "projection_defect": self.projection_defect,
            "completeness_defect": self.completeness_defect,
            "orthogonality_defect": self.orthogonality_defect,
        }


def verify_strategy(s: QuantumStrategy, game: Game,
                    tol: float = DEFAULT_TOL) -> StrategyReport:
    """Check the winning-strategy criterion, reporting per-check residuals.

    A strategy passes when every projection defect, the PVM completeness
    defect, and the product norm over all losing answer tuples are within
    tolerance.  Failed checks are report content, not errors.
    """
    want = {(g, h) for g in game.g.vertices for h in game.h.vertices}
    if set(s.projections.keys()) != want:
        raise ValueError("strategy keys do not match the game vertex sets")
    for m in s.projections.values():
        if m.shape != (s.n, s.n):
            raise ValueError(f"projection has shape {m.shape}, expected {(s.n, s.n)}")
    proj_defect = 0.0
    for m in s.projections.values():
        proj_defect = max(
            proj_defect,
            float(np.linalg.norm(m - m.conj().T)),
            float(np.linalg.norm(m @ m - m)),
        )
    eye = np.eye(s.n)
    comp_defect = 0.0
    for g in game.g.vertices:
        tot = sum(s.projections[(g, h)] for h in game.h.vertices)
        comp_defect = max(comp_defect, float(np.linalg.norm(tot - eye)))
    orth_defect, worst = 0.0, None
    for g1, h1, h2, g2 in losing_tuples(game):
        r = float(np.linalg.norm(s.projections[(g1, h1)] @ s.projections[(g2, h2)]))
        if r > orth_defect:
            orth_defect, worst = r, (g1, h1, h2, g2)
    passed = max(proj_defect, comp_defect, orth_defect) <= tol
    return StrategyReport(passed, proj_defect, comp_defect, orth_defect, worst, tol)


def pvm_vertex(p: dict[str, np.ndarray], n: int, tol: float = DEFAULT_TOL) -> bool:
    """Is p a PVM: projections, one per label, summing to the identity?"""
    tot = np.zeros((n, n), dtype=np.complex128)
    for m in p.values():
        if m.shape != (n, n):
            raise ValueError(f"matrix has shape {m.shape}, expected {(n, n)}")
        if np.linalg.norm(m - m.conj().T) > tol or np.linalg.norm(m @ m - m) > tol:
            return False
        tot = tot + m
    return bool(np.linalg.norm(tot - np.eye(n)) <= tol)


def pvm_adjacent(p1: dict[str, np.ndarray], p2: dict[str, np.ndarray],
                 graph: Graph, tol: float = DEFAULT_TOL) -> bool:
    """Adjacency in the measurement graph: products vanish on non-edges."""
    if set(p1) != set(graph.vertices) or set(p2) != set(graph.vertices):
        raise ValueError("PVM labels do not match the graph vertices")
    for g1 in graph.vertices:
        for g2 in graph.vertices:
            if not graph.adjacent(g1, g2):
                if np.linalg.norm(p1[g1] @ p2[g2]) > tol:
                    return False
    return True


# ---------------------------------------------------------------------------
# the bridge to quantum graphs


def box_game_source(game: Game, n: int, tol: float = DEFAULT_TOL) -> QuantumGraph:
    """The box product of the edgeless rank-n quantum vertex with Inc(G)."""
    qn_graph = QuantumGraph(qn(n), rel.zero(qn(n), qn(n), tol))
    return gr.box_product(qn_graph, gr.inc_graph(game.g, tol), tol)


def strategy_to_boxhom(s: QuantumStrategy, game: Game,
                       tol: float = DEFAULT_TOL) -> Relation:
    """The relation whose (g, h) block is the row space of p(g, h).

    Its source is the product of the rank-n quantum vertex with the
    question vertices; checked against ``box_game_source`` and Inc(H) it
    is a homomorphism exactly when the strategy wins.
    """
    src = product(qn(s.n), classical(game.g.vertices))
    dst = classical(game.h.vertices)
    blocks = []
    for g in game.g.vertices:
        row = []
        for h in game.h.vertices:
            p = s.projections[(g, h)]
            rows = p.reshape(s.n, 1, s.n)
            span = orthonormalize(rows, 1, s.n, tol)
            row.append(span if span.dim else zero_subspace(1, s.n, tol))
        blocks.append(tuple(row))
    return Relation(src, dst, tuple(blocks))


def strategy_hom_checks(s: QuantumStrategy, game: Game,
                        tol: float = DEFAULT_TOL) -> tuple[bool, bool, bool]:
    """Three independent winning tests that must agree.

    (1) the orthogonality verifier, (2) the box homomorphism test,
    (3) the measurement-graph vertex and adjacency predicates.
    """
    a = verify_strategy(s, game, tol).passed

    src = box_game_source(game, s.n, tol)
    dst = gr.inc_graph(game.h, tol)
    b = gr.is_homomorphism(strategy_to_boxhom(s, game, tol), src, dst)

    hs = game.h.vertices
    c = all(pvm_vertex(s.pvm_at(g, hs), s.n, tol) for g in game.g.vertices)
    if c:
        for g1, g2 in itertools.combinations(game.g.vertices, 2):
            if game.g.adjacent(g1, g2):
                if not pvm_adjacent(s.pvm_at(g1, hs), s.pvm_at(g2, hs), game.h, tol):
                    c = False
                    break
    return a, b, c


# ---------------------------------------------------------------------------
# correlations and simulation


def exact_win_probability(s: QuantumStrategy, game: Game,
                          tol: float = DEFAULT_TOL) -> float:
    """Winning probability against the uniform verifier.

    The second prover measures the entrywise transposes of the stored
    projections, so an answer pair has probability trace(p q)/n and the
    orthogonality criterion is equivalent to zero losing probability.
    """
    s.validate(game, tol)
    ng = len(game.g.vertices)
    total = 0.0
    for g1, g2 in itertools.product(game.g.vertices, repeat=2):
        for h1, h2 in itertools.product(game.h.vertices, repeat=2):
            if win(game, g1, h1, h2, g2):
                total += float(
                    np.trace(s.projections[(g1, h1)] @ s.projections[(g2, h2)]).real
                )
    return total / (s.n * ng * ng)


def classical_win_probability(cs: ClassicalStrategy, game: Game) -> float:
    ng = len(game.g.vertices)
    total = 0.0
    for w, f in zip(cs.weights, cs.assignments):
        hits = sum(
            win(game, g1, f[g1], f[g2], g2)
            for g1, g2 in itertools.product(game.g.vertices, repeat=2)
        )
        total += w * hits / (ng * ng)
    return total


def simulate(strategy, game: Game, rounds: int, seed: int) -> float:
    """Empirical win rate over seeded rounds of the game."""
    if rounds < 1:
        raise ValueError("need at least one round")
    rng = np.random.default_rng(seed)
    vg, vh = game.g.vertices, game.h.vertices
    ng, nh = len(vg), len(vh)
    if isinstance(strategy, ClassicalStrategy):
        a_idx = rng.choice(len(strategy.assignments), size=rounds, p=strategy.weights)
        q1 = rng.integers(ng, size=rounds)
        q2 = rng.integers(ng, size=rounds)
        wins = 0
        for k in range(rounds):
            f = strategy.assignments[a_idx[k]]
            g1, g2 = vg[q1[k]], vg[q2[k]]
            wins += win(game, g1, f[g1], f[g2], g2)
        return wins / rounds
    s: QuantumStrategy = strategy
    s.validate(game)
    # joint answer distributions and win masks per ordered question pair
    tables, masks = {}, {}
    for g1, g2 in itertools.product(vg, repeat=2):
        t = np.empty(nh * nh)
        m = np.empty(nh * nh, dtype=bool)
        for i1, h1 in enumerate(vh):
            for i2, h2 in enumerate(vh):
                pr = float(
                    np.trace(s.projections[(g1, h1)] @ s.projections[(g2, h2)]).real
                ) / s.n
                t[i1 * nh + i2] = max(pr, 0.0)
                m[i1 * nh + i2] = win(game, g1, h1, h2, g2)
        tables[(g1, g2)] = t / t.sum()
        masks[(g1, g2)] = m
    q1 = rng.integers(ng, size=rounds)
    q2 = rng.integers(ng, size=rounds)
    wins = 0
    for k in range(rounds):
        pair = (vg[q1[k]], vg[q2[k]])
        out = rng.choice(nh * nh, p=tables[pair])
        wins += bool(masks[pair][out])
    return wins / rounds


# ---------------------------------------------------------------------------
# classical search


def classical_hom_search(g: Graph, h: Graph) -> dict | None:
    """Backtracking homomorphism search with adjacency pruning.

    Returns an assignment or None after exhausting the search space; the
    search is complete, so None certifies that no homomorphism exists.
    """
    order = sorted(
        g.vertices, key=lambda v: -sum(1 for a, _ in g.edges if a == v)
    )
    assignment: dict = {}

    def extend(k: int) -> bool:
        if k == len(order):
            return True
        v = order[k]
        for cand in h.vertices:
            ok = True
            if g.adjacent(v, v) and not h.adjacent(cand, cand):
                ok = False
            if ok:
                for w in order[:k]:
                    if g.adjacent(v, w) and not h.adjacent(cand, assignment[w]):
                        ok = False
                        break
                    if g.adjacent(w, v) and not h.adjacent(assignment[w], cand):
                        ok = False
                        break
            if ok:
                assignment[v] = cand
                if extend(k + 1):
                    return True
                del assignment[v]
        return False

    return dict(assignment) if extend(0) else None


# ---------------------------------------------------------------------------
# numerical strategy search


@dataclass
class SearchConfig:
    restarts: int = 32
    max_iters: int = 3000
    seed: int = 0
    penalty_tol: float = 1e-18
    use_classical_seed: bool = True
    verify_tol: float = DEFAULT_TOL


def _qf(a: np.ndarray) -> np.ndarray:
    """Q factor with positive-phase diagonal; retraction onto unitaries."""
    q, r = np.linalg.qr(a)
    d = np.diagonal(r).copy()
    d[np.abs(d) < 1e-300] = 1.0
    return q * (d / np.abs(d))


class _Penalty:
    """Sum over losing tuples of |p(g1,h1) p(g2,h2)|^2 for allocated PVMs.

    With p(g,h) = U_g D_{g,h} U_g^dagger and coordinate projections D, the
    same-question terms vanish identically and the penalty reduces to
    masked entries of the cross-unitary overlaps U_{g1}^dagger U_{g2}.
    """

    def __init__(self, game: Game, n: int, colors: dict[str, np.ndarray]):
        self.game = game
        self.n = n
        self.colors = colors  # per vertex, length-n array of answer indices
        hs = game.h.vertices
        nh = len(hs)
        lose = np.ones((nh, nh), dtype=bool)
        for i1, h1 in enumerate(hs):
            for i2, h2 in enumerate(hs):
                lose[i1, i2] = not game.h.adjacent(h1, h2)
        self.edges = [
            (g1, g2)
            for g1 in game.g.vertices
            for g2 in game.g.vertices
            if game.g.adjacent(g1, g2)
        ]
        self.masks = {
            (g1, g2): lose[np.ix_(colors[g1], colors[g2])]
            for g1, g2 in self.edges
        }

    def loss(self, us: dict[str, np.ndarray]) -> float:
        total = 0.0
        for g1, g2 in self.edges:
            m = us[g1].conj().T @ us[g2]
            total += float((np.abs(m) ** 2 * self.masks[(g1, g2)]).sum())
        return total

    def loss_and_grads(self, us):
        grads = {g: np.zeros((self.n, self.n), dtype=np.complex128) for g in us}
        total = 0.0
        for g1, g2 in self.edges:
            u1, u2 = us[g1], us[g2]
            m = u1.conj().T @ u2
            a = m * self.masks[(g1, g2)]
            total += float((np.abs(a) ** 2).sum())
            grads[g2] += 2.0 * (u1 @ a)
            grads[g1] += 2.0 * (u2 @ a.conj().T)
        return total, grads


def _riemannian_descent(pen: _Penalty, us: dict, config: SearchConfig):
    """Armijo-safeguarded descent on the product of unitary groups."""
    loss, grads = pen.loss_and_grads(us)
    step = 0.5
    for _ in range(config.max_iters):
        if loss < config.penalty_tol:
            break
        xis = {}
        gn2 = 0.0
        for g, u in us.items():
            w = u.conj().T @ grads[g]
            skew = (w - w.conj().T) / 2.0
            xis[g] = u @ skew
            gn2 += float((np.abs(skew) ** 2).sum())
        if gn2 < 1e-300:
            break
        while True:
            trial = {g: _qf(us[g] - step * xis[g]) for g in us}
            new_loss = pen.loss(trial)
            if new_loss <= loss - 0.1 * step * gn2 or step < 1e-18:
                break
            step *= 0.5
        if new_loss >= loss:
            break
        us, loss = trial, new_loss
        _, grads = pen.loss_and_grads(us)
        step = min(step * 2.0, 1e6)
    return loss, us


def round_strategy(raw: dict[tuple[str, str], np.ndarray], game: Game, n: int,
                   tol: float = DEFAULT_TOL) -> QuantumStrategy | None:
    """Round near-projections to an exact PVM family.

    Eigenvalues at least 1/2 round to 1, the rest to 0; each question's
    kept eigenvectors are jointly re-orthonormalized so the rounded family
    is a PVM to machine precision.  Returns None when the rounded ranks
    cannot be completed to a PVM.
    """
    vg, vh = game.g.vertices, game.h.vertices
    projections = {}
    for g in vg:
        cols, groups = [], []
        for h in vh:
            evals, evecs = np.linalg.eigh(raw[(g, h)])
            keep = evecs[:, evals >= 0.5]
            groups.append((h, keep.shape[1]))
            cols.append(keep)
        v = np.concatenate(cols, axis=1)
        if v.shape[1] > n:
            return None
        if v.shape[1] < n:
            # re-completion: orthonormal complement goes to the best-overlap answer
            q, _ = np.linalg.qr(np.concatenate([v, np.eye(n)], axis=1))
            extra = q[:, v.shape[1] : n]
            scores = [
                sum(float(np.vdot(extra[:, k], raw[(g, h)] @ extra[:, k]).real)
                    for k in range(extra.shape[1]))
                for h in vh
            ]
            best = int(np.argmax(scores))
            groups[best] = (vh[best], groups[best][1] + extra.shape[1])
            cols.insert(best + 1, extra)
            v = np.concatenate(cols, axis=1)
        q = _qf(v)
        at = 0
        for h, cnt in groups:
            block = q[:, at : at + cnt]
            projections[(g, h)] = block @ block.conj().T
            at += cnt
    return QuantumStrategy(n, projections)


def _sample_allocation(rng: np.random.Generator, n: int, nh: int) -> np.ndarray:
    if rng.random() < 0.5:
        d = np.zeros(nh, dtype=int)
        d[rng.integers(nh)] = n
        return d
    return rng.multinomial(n, np.full(nh, 1.0 / nh))


def search_strategy(game: Game, n: int,
                    config: SearchConfig | None = None) -> QuantumStrategy | None:
    """Search for a winning quantum strategy at a fixed dimension n.

    n = 1 is decided exactly by complete backtracking; n >= 2 runs
    multi-restart Riemannian penalty descent over per-question dimension
    allocations, rounding and verifying any near-zero penalty point.  Only
    verifier-passing strategies are returned; None is not a certificate
    of non-existence.
    """
    if n < 1:
        raise ValueError("strategy dimension must be at least 1")
    config = config or SearchConfig()
    classical_hom = None
    if n == 1 or config.use_classical_seed:
        classical_hom = classical_hom_search(game.g, game.h)
    if n == 1:
        if classical_hom is None:
            return None
        s = lift_assignment(classical_hom, game, 1)
        return s if verify_strategy(s, game, config.verify_tol).passed else None
    if classical_hom is not None:
        s = lift_assignment(classical_hom, game, n)
        if verify_strategy(s, game, config.verify_tol).passed:
            return s
    vg, vh = game.g.vertices, game.h.vertices
    for restart in range(config.restarts):
        rng = np.random.default_rng([config.seed, restart])
        colors = {}
        for g in vg:
            d = _sample_allocation(rng, n, len(vh))
            colors[g] = np.repeat(np.arange(len(vh)), d)
        pen = _Penalty(game, n, colors)
        us = {g: haar_unitary(rng, n) for g in vg}
        loss, us = _riemannian_descent(pen, us, config)
        if loss < config.penalty_tol:
            raw = {}
            for g in vg:
                for i_h, h in enumerate(vh):
                    cols = us[g][:, colors[g] == i_h]
                    raw[(g, h)] = cols @ cols.conj().T
            s = round_strategy(raw, game, n, config.verify_tol)
            if s is not None and verify_strategy(s, game, config.verify_tol).passed:
                return s
    return None
