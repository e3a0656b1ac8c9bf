"""Matrix dagger-algebras, quantum channels, and confusability structure.

A quantum operation between matrix algebras is stored by a Kraus list.
Its transition span is the commutant-bimodule span of the Kraus
operators; it records which state transitions are possible at all, and
its adjoint product is the confusability structure of the channel.
Trace-preserving maps whose Hilbert-Schmidt adjoint is a unital
dagger-homomorphism correspond exactly to intertwiner spaces, and through
them to homomorphisms of quantum graphs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graphs import QuantumGraph
from .qsets import QuantumSet
from .relations import Relation
from .subspaces import (
    DEFAULT_TOL,
    Subspace,
    adjoint_span,
    as_matrix,
    hs_norm,
    join_spans,
    null_space,
    orthonormalize,
    product_span,
    psd_sqrt,
    zero_subspace,
)

# ---------------------------------------------------------------------------
# matrix dagger-algebras


@dataclass(frozen=True, eq=False)
class MatrixAlgebra:
    """A unital adjoint-closed algebra of m x m matrices.

    ``basis`` is an orthonormal basis of the algebra, ``commutant`` one of
    its commutant.  ``block_spec`` records the block dimensions for
    algebras built block-diagonally (multiplicity one); it enables the
    minimal central projections.
    """

    ambient: int
    basis: Subspace
    commutant: Subspace
    block_spec: tuple[int, ...] | None = None

    def __post_init__(self):
        m = self.ambient
        if (self.basis.rows, self.basis.cols) != (m, m):
            raise ValueError("basis shape does not match the ambient dimension")
        if (self.commutant.rows, self.commutant.cols) != (m, m):
            raise ValueError("commutant shape does not match the ambient dimension")
        if not self.basis.contains(np.eye(m)):
            raise ValueError("algebra does not contain the identity")

    @property
    def dim(self) -> int:
        return self.basis.dim

    def contains(self, x: np.ndarray) -> bool:
        return self.basis.contains(x)

    def central_projections(self) -> list[np.ndarray]:
        """Minimal central projections; needs a block specification."""
        if self.block_spec is None:
            raise ValueError("no block specification on this algebra")
        out, at = [], 0
        for d in self.block_spec:
            p = np.zeros((self.ambient, self.ambient), dtype=np.complex128)
            p[at : at + d, at : at + d] = np.eye(d)
            out.append(p)
            at += d
        return out

    def validate(self) -> None:
        """Exhaustive closure and commutant checks on basis pairs."""
        mats = self.basis.mats
        tol = self.basis.tol
        for a in mats:
            if not self.basis.contains(a.conj().T):
                raise ValueError("algebra basis is not adjoint-closed")
        if self.dim:
            prods = np.einsum("aij,bjk->abik", mats, mats).reshape(
                -1, self.ambient, self.ambient
            )
            for p in prods:
                if not self.basis.contains(p):
                    raise ValueError("algebra basis is not closed under products")
        for c in self.commutant.mats:
            for a in mats:
                if hs_norm(a @ c - c @ a) > tol * max(1.0, hs_norm(a)):
                    raise ValueError("claimed commutant does not commute")

    def __repr__(self) -> str:  # pragma: no cover
        return (
            f"<MatrixAlgebra dim {self.dim} in M_{self.ambient},"
            f" blocks {self.block_spec}>"
        )


def block_diagonal_algebra(dims, tol: float = DEFAULT_TOL) -> MatrixAlgebra:
    """The multiplicity-one block-diagonal algebra with the given dims."""
    dims = tuple(int(d) for d in dims)
    if not dims or any(d < 1 for d in dims):
        raise ValueError("block dims must be positive")
    m = sum(dims)
    basis_rows, comm_rows = [], []
    at = 0
    for d in dims:
        for i in range(d):
            for j in range(d):
                e = np.zeros((m, m), dtype=np.complex128)
                e[at + i, at + j] = 1.0
                basis_rows.append(e.ravel())
        p = np.zeros((m, m), dtype=np.complex128)
        p[at : at + d, at : at + d] = np.eye(d) / np.sqrt(d)
        comm_rows.append(p.ravel())
        at += d
    basis = Subspace(m, m, np.array(basis_rows), tol)
    commutant = Subspace(m, m, np.array(comm_rows), tol)
    return MatrixAlgebra(m, basis, commutant, dims)


def full_algebra(m: int, tol: float = DEFAULT_TOL) -> MatrixAlgebra:
    return block_diagonal_algebra((m,), tol)


def diagonal_algebra(m: int, tol: float = DEFAULT_TOL) -> MatrixAlgebra:
    return block_diagonal_algebra((1,) * m, tol)


def algebra_from_generators(generators, m: int, tol: float = DEFAULT_TOL) -> MatrixAlgebra:
    """Word closure of a generating set, with a numerically solved commutant.

    Starts from the identity, the generators and their adjoints, and
    multiplies basis pairs until the dimension stabilizes.
    """
    gens = [as_matrix(g) for g in generators]
    for g in gens:
        if g.shape != (m, m):
            raise ValueError(f"generator of shape {g.shape} is not {m}x{m}")
    seed = [np.eye(m, dtype=np.complex128)] + gens + [g.conj().T for g in gens]
    basis = orthonormalize(seed, m, m, tol)
    while True:
        mats = basis.mats
        prods = np.einsum("aij,bjk->abik", mats, mats).reshape(-1, m, m)
        grown = join_spans([basis, orthonormalize(prods, m, m, tol)], tol)
        if grown.dim == basis.dim:
            break
        basis = grown
    commutant = _commutant_of(seed, m, tol)
    return MatrixAlgebra(m, basis, commutant, None)


def _commutant_of(generators, m: int, tol: float) -> Subspace:
    """Null space of the stacked commutator maps x -> g x - x g."""
    eye = np.eye(m)
    blocks = [np.kron(g, eye) - np.kron(eye, g.T) for g in generators]
    stacked = np.concatenate(blocks, axis=0) if blocks else np.zeros((0, m * m))
    kernel = null_space(stacked, tol)
    flat = kernel.mats.reshape(kernel.dim, m * m)
    return Subspace(m, m, flat, tol)


def commutant_from_basis(alg: MatrixAlgebra) -> Subspace:
    """Recompute the commutant numerically from the algebra basis."""
    return _commutant_of(list(alg.basis.mats), alg.ambient, alg.basis.tol)


# ---------------------------------------------------------------------------
# quantum relations between algebras


@dataclass(frozen=True, eq=False)
class AlgebraRelation:
    """A commutant-bimodule subspace of n x m matrices between algebras."""

    src: MatrixAlgebra
    dst: MatrixAlgebra
    space: Subspace

    def __post_init__(self):
        want = (self.dst.ambient, self.src.ambient)
        if (self.space.rows, self.space.cols) != want:
            raise ValueError(f"space shape {self.space.rows, self.space.cols} != {want}")
        closed = product_span(
            product_span(self.dst.commutant, self.space), self.src.commutant
        )
        if not closed.leq(self.space):
            raise ValueError("subspace is not a commutant bimodule")

    @property
    def dim(self) -> int:
        return self.space.dim

    def dagger(self) -> "AlgebraRelation":
        return AlgebraRelation(self.dst, self.src, adjoint_span(self.space))

    def leq(self, other: "AlgebraRelation") -> bool:
        return self.space.leq(other.space)

    def equal(self, other: "AlgebraRelation") -> bool:
        return self.space.equal(other.space)


def bimodule_span(src: MatrixAlgebra, dst: MatrixAlgebra, mats,
                  tol: float = DEFAULT_TOL) -> AlgebraRelation:
    """Close a spanning set under the commutant bimodule action."""
    raw = orthonormalize(mats, dst.ambient, src.ambient, tol)
    closed = product_span(product_span(dst.commutant, raw), src.commutant, tol)
    return AlgebraRelation(src, dst, closed)


# ---------------------------------------------------------------------------
# completely positive maps


@dataclass(eq=False)
class CPMap:
    """A completely positive map between matrix algebras via Kraus operators."""

    src: MatrixAlgebra
    dst: MatrixAlgebra
    kraus: tuple[np.ndarray, ...]
    tol: float = DEFAULT_TOL
    trace_preserving: bool = field(init=False)
    trace_nonincreasing: bool = field(init=False)

    def __post_init__(self):
        n, m = self.dst.ambient, self.src.ambient
        self.kraus = tuple(as_matrix(v) for v in self.kraus)
        for v in self.kraus:
            if v.shape != (n, m):
                raise ValueError(f"Kraus operator of shape {v.shape}, expected {(n, m)}")
        total = sum((v.conj().T @ v for v in self.kraus), np.zeros((m, m), dtype=np.complex128))
        gap = np.linalg.eigvalsh(np.eye(m) - total)
        self.trace_nonincreasing = bool(gap.min() >= -self.tol)
        if not self.trace_nonincreasing:
            raise ValueError("Kraus operators exceed the trace-nonincreasing bound")
        devs = self.src.basis.flat.conj() @ (total - np.eye(m)).ravel()
        self.trace_preserving = bool(
            devs.size == 0 or np.abs(devs).max() <= self.tol
        )
        for a in self.src.basis.mats:
            if not self.dst.basis.contains(self.apply(a)):
                raise ValueError("map does not send the source algebra into the target")

    def apply(self, a: np.ndarray) -> np.ndarray:
        n = self.dst.ambient
        out = np.zeros((n, n), dtype=np.complex128)
        for v in self.kraus:
            out += v @ a @ v.conj().T
        return out


def identity_channel(alg: MatrixAlgebra, tol: float = DEFAULT_TOL) -> CPMap:
    return CPMap(alg, alg, (np.eye(alg.ambient, dtype=np.complex128),), tol)


def transition_space(phi: CPMap) -> AlgebraRelation:
    """The bimodule span of the Kraus operators.

    Independent of the chosen Kraus decomposition; its entries decide
    which transitions the channel can perform with nonzero probability.
    """
    return bimodule_span(phi.src, phi.dst, list(phi.kraus), phi.tol)


def confusability(phi: CPMap) -> AlgebraRelation:
    """The operator system T^dagger T on the source algebra."""
    t = transition_space(phi)
    space = product_span(adjoint_span(t.space), t.space, phi.tol)
    return AlgebraRelation(phi.src, phi.src, space)


def _state_cols(x, m: int) -> np.ndarray:
    x = np.asarray(x, dtype=np.complex128).reshape(-1, 1)
    if x.shape[0] != m:
        raise ValueError(f"state vector has length {x.shape[0]}, expected {m}")
    return x


def confusable(phi: CPMap, x1, x2) -> bool:
    """Can the channel confuse the two source states?

    Evaluates both the trace test on the channel outputs and the subspace
    test through the confusability system, and insists that they agree.
    """
    m = phi.src.ambient
    x1, x2 = _state_cols(x1, m), _state_cols(x2, m)
    out1 = phi.apply(x1 @ x1.conj().T)
    out2 = phi.apply(x2 @ x2.conj().T)
    tr = float(np.trace(out1 @ out2).real)
    n1, n2 = float(np.linalg.norm(x1)), float(np.linalg.norm(x2))
    trace_zero = tr <= phi.tol * (n1 * n2) ** 2
    conf = confusability(phi)
    vals = np.array([x1.conj().T @ b @ x2 for b in conf.space.mats]).ravel()
    space_zero = bool(vals.size == 0 or np.abs(vals).max() <= phi.tol * n1 * n2)
    if trace_zero != space_zero:
        raise ArithmeticError(
            "confusability tests disagree: numerical breakdown "
            f"(trace {tr:g}, couplings {np.abs(vals).max() if vals.size else 0.0:g})"
        )
    return not trace_zero


def transition_possible(phi: CPMap, x1, x2) -> bool:
    """Can the channel send source state x1 to target state x2?"""
    m, n = phi.src.ambient, phi.dst.ambient
    x1, x2 = _state_cols(x1, m), _state_cols(x2, n)
    out1 = phi.apply(x1 @ x1.conj().T)
    tr = float((x2.conj().T @ out1 @ x2).real)
    n1, n2 = float(np.linalg.norm(x1)), float(np.linalg.norm(x2))
    trace_zero = tr <= phi.tol * (n1 * n2) ** 2
    t = transition_space(phi)
    vals = np.array([x2.conj().T @ b @ x1 for b in t.space.mats]).ravel()
    space_zero = bool(vals.size == 0 or np.abs(vals).max() <= phi.tol * n1 * n2)
    if trace_zero != space_zero:
        raise ArithmeticError(
            "transition tests disagree: numerical breakdown "
            f"(trace {tr:g}, couplings {np.abs(vals).max() if vals.size else 0.0:g})"
        )
    return not trace_zero


def pushforward(phi: CPMap, r: AlgebraRelation) -> AlgebraRelation:
    """T . R . T^dagger, a quantum relation on the target algebra."""
    if r.src.ambient != phi.src.ambient or r.dst.ambient != phi.src.ambient:
        raise ValueError("relation does not live on the source algebra")
    t = transition_space(phi).space
    space = product_span(product_span(t, r.space), adjoint_span(t), phi.tol)
    return AlgebraRelation(phi.dst, phi.dst, space)


def pullback(phi: CPMap, s: AlgebraRelation) -> AlgebraRelation:
    """T^dagger . S . T, a quantum relation on the source algebra."""
    if s.src.ambient != phi.dst.ambient or s.dst.ambient != phi.dst.ambient:
        raise ValueError("relation does not live on the target algebra")
    t = transition_space(phi).space
    space = product_span(product_span(adjoint_span(t), s.space), t, phi.tol)
    return AlgebraRelation(phi.src, phi.src, space)


def is_cp_morphism(phi: CPMap, r: AlgebraRelation, s: AlgebraRelation) -> bool:
    """Does the pushforward of r land inside s?"""
    return pushforward(phi, r).space.leq(s.space)


# ---------------------------------------------------------------------------
# cohomomorphisms and intertwiners


def _adjoint_coords(phi: CPMap) -> np.ndarray:
    """Matrix of the HS-adjoint of phi, dst coords -> src coords."""
    e = phi.src.basis
    f = phi.dst.basis
    cols = []
    for a in e.mats:
        img = phi.apply(a)
        cols.append(f.flat.conj() @ img.ravel())
    big_phi = np.array(cols).T  # (dim N, dim M)
    return big_phi.conj().T  # (dim M, dim N)


def _pi_matrices(pi_coords: np.ndarray, src: MatrixAlgebra, dst: MatrixAlgebra):
    """Images of the dst basis under pi given by its coordinate matrix."""
    e_flat = src.basis.flat
    m = src.ambient
    return [
        (pi_coords[:, b] @ e_flat).reshape(m, m) for b in range(dst.basis.dim)
    ]


def _hom_defects(pi_coords: np.ndarray, src: MatrixAlgebra,
                 dst: MatrixAlgebra) -> dict[str, float]:
    """Residuals of pi being a unital dagger-homomorphism dst -> src."""
    m, n = src.ambient, dst.ambient
    f = dst.basis
    pi_mats = _pi_matrices(pi_coords, src, dst)

    def pi_of(b: np.ndarray) -> np.ndarray:
        coords = f.flat.conj() @ b.ravel()
        return (src.basis.flat.T @ (pi_coords @ coords)).reshape(m, m)

    unit_defect = float(np.linalg.norm(pi_of(np.eye(n)) - np.eye(m)))
    mult_defect = 0.0
    adj_defect = 0.0
    for b1 in range(f.dim):
        adj_defect = max(
            adj_defect,
            float(np.linalg.norm(pi_of(f.mats[b1].conj().T) - pi_mats[b1].conj().T)),
        )
        for b2 in range(f.dim):
            lhs = pi_of(f.mats[b1] @ f.mats[b2])
            rhs = pi_mats[b1] @ pi_mats[b2]
            mult_defect = max(mult_defect, float(np.linalg.norm(lhs - rhs)))
    return {
        "unit_defect": unit_defect,
        "mult_defect": mult_defect,
        "adjoint_defect": adj_defect,
    }


def cohom_defects(phi: CPMap) -> dict[str, float]:
    """Residuals of phi being a trace-preserving dagger-cohomomorphism."""
    defects = _hom_defects(_adjoint_coords(phi), phi.src, phi.dst)
    tp = 0.0
    for a in phi.src.basis.mats:
        tp = max(tp, abs(complex(np.trace(phi.apply(a)) - np.trace(a))))
    defects["trace_defect"] = tp
    return defects


def is_tp_cohomomorphism(phi: CPMap, tol: float | None = None) -> bool:
    """Is the HS-adjoint of phi a unital dagger-homomorphism, with phi TP?"""
    tol = phi.tol if tol is None else tol
    scale = max(1.0, float(phi.src.ambient))
    return max(cohom_defects(phi).values()) <= tol * scale


def intertwiner_space(phi: CPMap) -> AlgebraRelation:
    """All v with b v = v pi(b) over the target algebra; equals the
    transition span for trace-preserving dagger-cohomomorphisms, and that
    equality is asserted."""
    if not is_tp_cohomomorphism(phi):
        raise ValueError("map is not a trace-preserving dagger-cohomomorphism")
    m, n = phi.src.ambient, phi.dst.ambient
    pi_mats = _pi_matrices(_adjoint_coords(phi), phi.src, phi.dst)
    eye_m, eye_n = np.eye(m), np.eye(n)
    rows = []
    for b, pib in zip(phi.dst.basis.mats, pi_mats):
        rows.append(np.kron(b, eye_m) - np.kron(eye_n, pib.T))
    stacked = np.concatenate(rows, axis=0) if rows else np.zeros((0, n * m))
    kernel = null_space(stacked, phi.tol)
    space = Subspace(n, m, kernel.mats.reshape(kernel.dim, n * m), phi.tol)
    found = AlgebraRelation(phi.src, phi.dst, space)
    expected = transition_space(phi)
    if not found.equal(expected):
        raise ArithmeticError(
            "intertwiner space does not match the transition span"
        )
    return found


def _choi_kraus(phi_coords: np.ndarray, src: MatrixAlgebra, dst: MatrixAlgebra,
                tol: float) -> tuple[np.ndarray, ...]:
    """Kraus operators of phi extended by central compression of the source.

    The extension X -> phi(sum_j p_j X p_j) is completely positive on the
    full matrix algebra and agrees with phi on the source; its Choi
    eigenvectors give a Kraus list for phi.
    """
    if src.block_spec is None:
        raise ValueError("Kraus extraction needs a block-diagonal source algebra")
    m, n = src.ambient, dst.ambient
    block_of = np.concatenate(
        [np.full(d, j) for j, d in enumerate(src.block_spec)]
    )
    lam = np.zeros((n * n, m * m), dtype=np.complex128)
    e_flat, f_flat = src.basis.flat, dst.basis.flat
    for s in range(m):
        for t in range(m):
            if block_of[s] != block_of[t]:
                continue
            unit = np.zeros((m, m), dtype=np.complex128)
            unit[s, t] = 1.0
            coords = e_flat.conj() @ unit.ravel()
            lam[:, s * m + t] = f_flat.T @ (phi_coords @ coords)
    choi = lam.reshape(n, n, m, m).transpose(2, 0, 3, 1).reshape(m * n, m * n)
    choi = (choi + choi.conj().T) / 2.0
    evals, evecs = np.linalg.eigh(choi)
    top = float(evals.max(initial=0.0))
    if evals.size and evals.min() < -tol * max(1.0, top) * 10:
        raise ValueError("inconsistent system: the candidate map is not CP")
    kraus = []
    for k in range(evals.size):
        if evals[k] > tol * max(1.0, top):
            v = np.sqrt(evals[k]) * evecs[:, k].reshape(m, n).T
            kraus.append(v)
    return tuple(kraus)


def cohom_from_adjoint(pi_apply, src: MatrixAlgebra, dst: MatrixAlgebra,
                       tol: float = DEFAULT_TOL) -> CPMap:
    """The HS-adjoint channel of an explicit unital dagger-homomorphism.

    ``pi_apply`` maps an n x n element of the target algebra to its m x m
    image in the source algebra.  The result is a trace-preserving
    dagger-cohomomorphism with an explicit Kraus list.
    """
    cols = []
    for b in dst.basis.mats:
        img = as_matrix(pi_apply(b))
        if not src.basis.contains(img):
            raise ValueError("homomorphism image leaves the source algebra")
        cols.append(src.basis.flat.conj() @ img.ravel())
    pi_coords = np.array(cols).T  # (dim M, dim N)
    return _cohom_from_pi_coords(pi_coords, src, dst, tol)


def _cohom_from_pi_coords(pi_coords: np.ndarray, src: MatrixAlgebra,
                          dst: MatrixAlgebra, tol: float) -> CPMap:
    defects = _hom_defects(pi_coords, src, dst)
    scale = max(1.0, float(src.ambient))
    if max(defects.values()) > tol * scale:
        raise ValueError(
            f"adjoint is not a unital dagger-homomorphism: {defects}"
        )
    phi_coords = pi_coords.conj().T
    kraus = _choi_kraus(phi_coords, src, dst, tol)
    phi = CPMap(src, dst, kraus, tol)
    # guard the Choi plumbing: the Kraus list must reproduce the map
    for idx, a in enumerate(src.basis.mats):
        want = (dst.basis.flat.T @ phi_coords[:, idx]).reshape(
            dst.ambient, dst.ambient
        )
        if hs_norm(phi.apply(a) - want) > 100 * tol:
            raise ArithmeticError("Kraus extraction failed to reproduce the map")
    return phi


def intertwiner_to_cohom(f: AlgebraRelation, tol: float | None = None) -> CPMap:
    """Reconstruct the channel whose transition span is the given relation.

    Requires the structural conditions: the source commutant inside
    F^dagger F and F F^dagger inside the target commutant.  Solves a
    least-squares system for the adjoint homomorphism and extracts a
    Kraus list from its Choi matrix.
    """
    tol = f.space.tol if tol is None else tol
    src, dst = f.src, f.dst
    ffd = product_span(f.space, adjoint_span(f.space), tol)
    fdf = product_span(adjoint_span(f.space), f.space, tol)
    if not src.commutant.leq(fdf):
        raise ValueError("source commutant is not inside F^dagger F")
    if not ffd.leq(dst.commutant):
        raise ValueError("F F^dagger is not inside the target commutant")
    m, n = src.ambient, dst.ambient
    vs = f.space.mats
    # unknown pi(b) in source coordinates: v_i pi(b) = b v_i for all i
    a_cols = []
    for alpha in range(src.basis.dim):
        e_a = src.basis.mats[alpha]
        a_cols.append(np.concatenate([(v @ e_a).ravel() for v in vs]))
    a_mat = np.array(a_cols).T
    rhs = np.stack(
        [np.concatenate([(b @ v).ravel() for v in vs]) for b in dst.basis.mats],
        axis=1,
    )
    pi_coords, *_ = np.linalg.lstsq(a_mat, rhs, rcond=None)
    resid = float(np.linalg.norm(a_mat @ pi_coords - rhs))
    if resid > tol * max(1.0, float(np.linalg.norm(rhs))) * 100:
        raise ValueError(
            f"inconsistent system: not a valid intertwiner space (residual {resid:g})"
        )
    return _cohom_from_pi_coords(pi_coords, src, dst, tol)


@dataclass
class MorphismReport:
    """The three equivalent morphism conditions, evaluated independently."""

    intertwiner_condition: bool  # F.R inside S.F
    pushforward_condition: bool  # pushforward of R inside S
    pullback_condition: bool  # R inside pullback of S
    agree: bool
    phi: CPMap

    @property
    def conditions(self) -> tuple[bool, bool, bool]:
        return (
            self.intertwiner_condition,
            self.pushforward_condition,
            self.pullback_condition,
        )


def morphism_conditions(f: AlgebraRelation, r: AlgebraRelation,
                        s: AlgebraRelation, tol: float | None = None) -> MorphismReport:
    """Evaluate the three morphism conditions for an intertwiner relation."""
    tol = f.space.tol if tol is None else tol
    c1 = product_span(f.space, r.space, tol).leq(product_span(s.space, f.space, tol))
    phi = intertwiner_to_cohom(f, tol)
    c2 = is_cp_morphism(phi, r, s)
    c3 = r.space.leq(pullback(phi, s).space)
    return MorphismReport(c1, c2, c3, c1 == c2 == c3, phi)


# ---------------------------------------------------------------------------
# channels from operator systems


def channel_from_operator_system(r: AlgebraRelation, tol: float | None = None) -> CPMap:
    """Build a trace-preserving channel whose confusability system is r.

    The relation must be reflexive (contain the commutant) and symmetric.
    The construction splits the identity into positive multiples of a
    Hermitian basis of r and embeds the square roots block-orthogonally,
    so that cross terms vanish and the adjoint product of the transition
    span is exactly r; both facts are verified before returning.
    """
    tol = r.space.tol if tol is None else tol
    alg = r.src
    if r.dst is not alg and r.dst.ambient != alg.ambient:
        raise ValueError("operator system must live on one algebra")
    m = alg.ambient
    if not r.space.equal(adjoint_span(r.space)):
        raise ValueError("operator system is not symmetric")
    if not alg.commutant.leq(r.space):
        raise ValueError("operator system is not reflexive")
    closed = product_span(product_span(alg.commutant, r.space), alg.commutant, tol)
    if not closed.equal(r.space):
        raise ValueError("operator system is not a commutant bimodule")
    k = r.space.dim
    if k == 1:
        phi = identity_channel(alg, tol)
        _verify_operator_system_channel(phi, r, tol)
        return phi
    herms = _hermitian_basis_with_identity(r.space, tol)
    eps = 1.0 / (2.0 * max(
        float(np.abs(np.linalg.eigvalsh(h)).max()) for h in herms[1:]
    ))
    eye = np.eye(m, dtype=np.complex128)
    ps = [(eye + eps * h) / (2.0 * (k - 1)) for h in herms[1:]]
    ps.insert(0, eye - sum(ps))
    for p in ps:
        if np.linalg.eigvalsh(p).min() <= 0:
            raise ArithmeticError("identity splitting lost positive definiteness")
    span_p = orthonormalize(ps, m, m, tol)
    if not span_p.equal(r.space):
        raise ArithmeticError("identity splitting does not span the system")
    kraus = []
    for i, p in enumerate(ps):
        w = np.zeros((k * m, m), dtype=np.complex128)
        w[i * m : (i + 1) * m] = psd_sqrt(p, tol)
        kraus.append(w)
    phi = CPMap(alg, full_algebra(k * m, tol), tuple(kraus), tol)
    _verify_operator_system_channel(phi, r, tol)
    return phi


def _hermitian_basis_with_identity(space: Subspace, tol: float) -> list[np.ndarray]:
    """A Hermitian basis of a symmetric subspace, starting at the identity."""
    m = space.rows
    herms = [np.eye(m, dtype=np.complex128)]
    flat = [herms[0].ravel() / np.sqrt(m)]
    for b in space.mats:
        for h in (b + b.conj().T, 1j * (b - b.conj().T)):
            v = h.ravel()
            for _ in range(2):
                for u in flat:
                    v = v - np.vdot(u, v).real * u
            nrm = float(np.linalg.norm(v))
            if nrm > tol * max(1.0, float(np.linalg.norm(h))):
                v = v / nrm
                flat.append(v)
                herms.append(v.reshape(m, m))
    if len(herms) != space.dim:
        raise ArithmeticError("failed to build a Hermitian basis of the system")
    return herms


def _verify_operator_system_channel(phi: CPMap, r: AlgebraRelation, tol: float) -> None:
    m = phi.src.ambient
    total = sum(v.conj().T @ v for v in phi.kraus)
    if hs_norm(total - np.eye(m)) > 10 * tol:
        raise ArithmeticError("constructed channel is not trace preserving")
    if not confusability(phi).space.equal(r.space):
        raise ArithmeticError("constructed channel has the wrong confusability")


# ---------------------------------------------------------------------------
# the bridge to quantum graphs


def _atom_offsets(x: QuantumSet) -> list[int]:
    offs, at = [], 0
    for _, d in x.atoms:
        offs.append(at)
        at += d
    return offs


def _embed_relation_basis(relation: Relation) -> list[np.ndarray]:
    """Block-embed a relation's basis matrices into one rectangular space."""
    src, dst = relation.src, relation.dst
    m, n = src.total_dim, dst.total_dim
    soffs, doffs = _atom_offsets(src), _atom_offsets(dst)
    out = []
    for i in range(src.n_atoms):
        for j in range(dst.n_atoms):
            blk = relation.blocks[i][j]
            for mat in blk.mats:
                big = np.zeros((n, m), dtype=np.complex128)
                big[
                    doffs[j] : doffs[j] + dst.dims[j],
                    soffs[i] : soffs[i] + src.dims[i],
                ] = mat
                out.append(big)
    return out


def embed_graph(g: QuantumGraph, tol: float | None = None) -> tuple[MatrixAlgebra, AlgebraRelation]:
    """A quantum graph as a block algebra with its edge relation embedded."""
    tol = g.tol if tol is None else tol
    alg = block_diagonal_algebra(g.vertices.dims, tol)
    mats = _embed_relation_basis(g.edges)
    space = orthonormalize(mats, alg.ambient, alg.ambient, tol) if mats else \
        zero_subspace(alg.ambient, alg.ambient, tol)
    return alg, AlgebraRelation(alg, alg, space)


def function_to_intertwiner(phi: Relation, tol: float | None = None) -> AlgebraRelation:
    """Embed a function relation as an intertwiner between block algebras.

    Asserts the structural conditions: source commutant inside F^dagger F
    and F F^dagger inside the target commutant.
    """
    tol = phi.tol if tol is None else tol
    src_alg = block_diagonal_algebra(phi.src.dims, tol)
    dst_alg = block_diagonal_algebra(phi.dst.dims, tol)
    mats = _embed_relation_basis(phi)
    f = bimodule_span(src_alg, dst_alg, mats, tol) if mats else AlgebraRelation(
        src_alg, dst_alg, zero_subspace(dst_alg.ambient, src_alg.ambient, tol)
    )
    fdf = product_span(adjoint_span(f.space), f.space, tol)
    ffd = product_span(f.space, adjoint_span(f.space), tol)
    if not src_alg.commutant.leq(fdf):
        raise ValueError("embedded relation violates: commutant inside F^dagger F")
    if not ffd.leq(dst_alg.commutant):
        raise ValueError("embedded relation violates: F F^dagger inside commutant")
    return f


def hom_to_intertwiner(phi: Relation, g: QuantumGraph, h: QuantumGraph,
                       tol: float | None = None) -> AlgebraRelation:
    """The intertwiner of a graph homomorphism, with the edge condition checked."""
    tol = phi.tol if tol is None else tol
    f = function_to_intertwiner(phi, tol)
    _, rg = embed_graph(g, tol)
    _, rh = embed_graph(h, tol)
    lhs = product_span(f.space, rg.space, tol)
    rhs = product_span(rh.space, f.space, tol)
    if not lhs.leq(rhs):
        raise ValueError("embedded relation violates the edge condition")
    return f


def classical_function_dual(assignment: dict, src_labels, dst_labels,
                            tol: float = DEFAULT_TOL) -> CPMap:
    """The channel dual to the pullback of a function between finite sets."""
    src_labels = [str(x) for x in src_labels]
    dst_labels = [str(y) for y in dst_labels]
    m, n = len(src_labels), len(dst_labels)
    src = diagonal_algebra(m, tol)
    dst = diagonal_algebra(n, tol)
    kraus = []
    for i, x in enumerate(src_labels):
        v = np.zeros((n, m), dtype=np.complex128)
        v[dst_labels.index(str(assignment[x])), i] = 1.0
        kraus.append(v)
    return CPMap(src, dst, tuple(kraus), tol)
