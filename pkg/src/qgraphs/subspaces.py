"""Tolerance-governed arithmetic of matrix subspaces.

Everything in this package ultimately reduces to linear algebra over
subspaces of rectangular complex matrices, with the Hilbert-Schmidt inner
product ``<a, b> = trace(a^dagger b)``.  A :class:`Subspace` stores an
orthonormal basis (as flattened row vectors) together with the tolerance
that governed its construction; all rank and containment decisions route
through that tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_TOL = 1e-9


def as_matrix(m) -> np.ndarray:
    """Coerce to a 2-d complex128 array and reject non-finite entries."""
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2:
        raise ValueError(f"expected a matrix, got array of ndim {a.ndim}")
    if not np.isfinite(a).all():
        raise ValueError("matrix has non-finite entries")
    return a


def hs_inner(a: np.ndarray, b: np.ndarray) -> complex:
    """Hilbert-Schmidt inner product trace(a^dagger b)."""
    return complex(np.vdot(a, b))


def hs_norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(a))


@dataclass(frozen=True, eq=False)
class Subspace:
    """A linear subspace of ``rows x cols`` complex matrices.

    ``flat`` holds the orthonormal basis, one flattened (row-major) matrix
    per row.  Bases are not canonical; equality of subspaces is decided by
    mutual containment, never by comparing bases.
    """

    rows: int
    cols: int
    flat: np.ndarray  # shape (dim, rows*cols)
    tol: float = DEFAULT_TOL

    @property
    def dim(self) -> int:
        return self.flat.shape[0]

    @property
    def mats(self) -> np.ndarray:
        """Basis as a (dim, rows, cols) array."""
        return self.flat.reshape(-1, self.rows, self.cols)

    @property
    def basis(self) -> list[np.ndarray]:
        return [m.copy() for m in self.mats]

    def _check_shape(self, v: np.ndarray) -> np.ndarray:
        v = as_matrix(v)
        if v.shape != (self.rows, self.cols):
            raise ValueError(
                f"shape mismatch: expected {(self.rows, self.cols)}, got {v.shape}"
            )
        return v

    def project(self, v: np.ndarray) -> np.ndarray:
        """Orthogonal projection of ``v`` onto this subspace."""
        v = self._check_shape(v)
        w = v.ravel()
        return (self.flat.T @ (self.flat.conj() @ w)).reshape(self.rows, self.cols)

    def contains(self, v: np.ndarray) -> bool:
        """True iff the residual of ``v`` is below tol*max(1, |v|)."""
        v = self._check_shape(v)
        w = v.ravel()
        scale = max(1.0, float(np.linalg.norm(w)))
        # two projection passes keep the residual honest when v is large
        for _ in range(2):
            w = w - self.flat.T @ (self.flat.conj() @ w)
        return float(np.linalg.norm(w)) <= self.tol * scale

    def leq(self, other: "Subspace") -> bool:
        """Containment of self in other, basis-vector by basis-vector."""
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch between subspaces")
        if self.dim == 0:
            return True
        if self.dim > other.dim:
            return False
        tol = max(self.tol, other.tol)
        w = self.flat
        for _ in range(2):
            w = w - (other.flat.conj() @ w.T).T @ other.flat
        return bool(np.linalg.norm(w, axis=1).max() <= tol)

    def equal(self, other: "Subspace") -> bool:
        if self.dim != other.dim:
            return False
        return self.leq(other) and other.leq(self)

    def __repr__(self) -> str:  # pragma: no cover
        return f"<Subspace dim {self.dim} of {self.rows}x{self.cols}, tol {self.tol:g}>"


def zero_subspace(rows: int, cols: int, tol: float = DEFAULT_TOL) -> Subspace:
    return Subspace(rows, cols, np.zeros((0, rows * cols), dtype=np.complex128), tol)


def full_subspace(rows: int, cols: int, tol: float = DEFAULT_TOL) -> Subspace:
    """All of L: the matrix units are an orthonormal basis."""
    return Subspace(rows, cols, np.eye(rows * cols, dtype=np.complex128), tol)


def orthonormalize(mats, rows: int | None = None, cols: int | None = None,
                   tol: float = DEFAULT_TOL) -> Subspace:
    """Orthonormal basis of the span of ``mats``.

    Modified Gram-Schmidt with one reorthogonalization pass; vectors whose
    residual norm after projection is at most ``tol*max(1, input norm)``
    are dropped.  For an empty spanning set the shape must be supplied.
    """
    if isinstance(mats, np.ndarray) and mats.ndim == 3:
        stack = np.ascontiguousarray(mats, dtype=np.complex128)
    else:
        mats = list(mats)
        if not mats:
            if rows is None or cols is None:
                raise ValueError("empty spanning set needs an explicit shape")
            return zero_subspace(rows, cols, tol)
        first = as_matrix(mats[0])
        stack = np.empty((len(mats),) + first.shape, dtype=np.complex128)
        stack[0] = first
        for idx, m in enumerate(mats[1:], start=1):
            m = as_matrix(m)
            if m.shape != first.shape:
                raise ValueError(
                    f"shape mismatch in spanning set: {m.shape} vs {first.shape}"
                )
            stack[idx] = m
    k, r, c = stack.shape
    if rows is not None and k and (r, c) != (rows, cols):
        raise ValueError(f"shape mismatch: expected {(rows, cols)}, got {(r, c)}")
    rows, cols = (r, c) if rows is None else (rows, cols)
    if not np.isfinite(stack).all():
        raise ValueError("spanning set has non-finite entries")
    flat = stack.reshape(k, rows * cols)
    basis = np.empty((min(k, rows * cols), rows * cols), dtype=np.complex128)
    n = 0
    for i in range(k):
        v = flat[i]
        scale = max(1.0, float(np.linalg.norm(v)))
        for _ in range(2):
            if n:
                v = v - basis[:n].T @ (basis[:n].conj() @ v)
        nrm = float(np.linalg.norm(v))
        if nrm > tol * scale:
            basis[n] = v / nrm
            n += 1
    return Subspace(rows, cols, basis[:n].copy(), tol)


def join_spans(spaces: list[Subspace], tol: float | None = None) -> Subspace:
    """Span of the union of the given subspaces (all of one shape)."""
    if not spaces:
        raise ValueError("join of no subspaces")
    rows, cols = spaces[0].rows, spaces[0].cols
    if tol is None:
        tol = max(s.tol for s in spaces)
    nonzero = [s for s in spaces if s.dim]
    if not nonzero:
        return zero_subspace(rows, cols, tol)
    if len(nonzero) == 1:
        s = nonzero[0]
        return Subspace(rows, cols, s.flat, tol)
    flat = np.concatenate([s.flat for s in nonzero], axis=0)
    return orthonormalize(flat.reshape(-1, rows, cols), rows, cols, tol)


def adjoint_span(s: Subspace) -> Subspace:
    """The subspace of adjoints; orthonormality is preserved exactly."""
    adj = np.conj(np.swapaxes(s.mats, 1, 2))
    return Subspace(s.cols, s.rows, adj.reshape(s.dim, s.rows * s.cols), s.tol)


def product_span(a: Subspace, b: Subspace, tol: float | None = None) -> Subspace:
    """Span of pairwise products {x y : x in a, y in b}."""
    if a.cols != b.rows:
        raise ValueError(f"shape mismatch in product: {a.cols} vs {b.rows}")
    if tol is None:
        tol = max(a.tol, b.tol)
    if a.dim == 0 or b.dim == 0:
        return zero_subspace(a.rows, b.cols, tol)
    prod = np.einsum("aij,bjk->abik", a.mats, b.mats).reshape(-1, a.rows, b.cols)
    return orthonormalize(prod, a.rows, b.cols, tol)


def psd_sqrt(a: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Hermitian PSD square root of a Hermitian PSD matrix.

    Eigenvalues within -tol of zero are clipped to 0; genuinely negative
    eigenvalues are an error, as is a non-Hermitian input.
    """
    a = as_matrix(a)
    scale = max(1.0, hs_norm(a))
    if hs_norm(a - a.conj().T) > tol * scale:
        raise ValueError("psd_sqrt: input is not Hermitian within tolerance")
    evals, evecs = np.linalg.eigh(a)
    floor = -tol * max(1.0, float(abs(evals).max()) if evals.size else 1.0)
    if evals.size and evals.min() < floor:
        raise ValueError(f"psd_sqrt: eigenvalue {evals.min():g} below -tol")
    root = np.sqrt(np.clip(evals, 0.0, None))
    b = (evecs * root) @ evecs.conj().T
    return (b + b.conj().T) / 2.0


def null_space(m: np.ndarray, tol: float = DEFAULT_TOL) -> Subspace:
    """Orthonormal basis of {x : |Mx| <= tol*|M|*|x|} as column vectors."""
    m = as_matrix(m)
    if m.shape[0] == 0 or m.shape[1] == 0:
        return full_subspace(m.shape[1], 1, tol)
    _, svals, vh = np.linalg.svd(m)
    smax = float(svals[0]) if svals.size else 0.0
    rank = int((svals > tol * smax).sum()) if smax > 0 else 0
    kernel = vh[rank:].conj()
    return Subspace(m.shape[1], 1, kernel.reshape(-1, m.shape[1]), tol)


def vec(m: np.ndarray) -> np.ndarray:
    """Row-major flattening; the convention used by the *_mult_op helpers."""
    return np.asarray(m).reshape(-1)


def left_mult_op(a: np.ndarray, cols: int) -> np.ndarray:
    """Operator on row-major vec with vec(A X) = (A kron I) vec(X)."""
    return np.kron(a, np.eye(cols))


def right_mult_op(b: np.ndarray, rows: int) -> np.ndarray:
    """Operator on row-major vec with vec(X B) = (I kron B^T) vec(X)."""
    return np.kron(np.eye(rows), b.T)
