"""Lattice of subspaces of R^n: span, meet, complement.

Enough machinery to show that oblique subspaces violate the distributive
law while mutually orthogonal ones behave like sets.
"""

from __future__ import annotations

import itertools
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DimensionMismatch

RANK_TOL = 1e-10
# projector comparisons, looser than the rank decision
EQUAL_TOL = 1e-9


def _orthonormalize(vectors, dim: int, tol: float = RANK_TOL) -> np.ndarray:
    """Modified Gram-Schmidt with one re-orthogonalization pass.

    Vectors whose residual norm falls below ``tol`` are dropped. Returns an
    array of shape ``(rank, dim)``.
    """
    basis: list[np.ndarray] = []
    for v in vectors:
        w = np.array(v, dtype=float).reshape(dim)
        for _ in range(2):
            for q in basis:
                w = w - (q @ w) * q
        norm = np.linalg.norm(w)
        if norm > tol:
            basis.append(w / norm)
    if not basis:
        return np.zeros((0, dim))
    return np.vstack(basis)


class Subspace:
    """A subspace of R^ambient_dim held as an orthonormal basis (rows)."""

    __slots__ = ("ambient_dim", "basis")

    def __init__(self, ambient_dim: int, basis=None):
        if ambient_dim < 1:
            raise ValueError("ambient_dim must be positive")
        self.ambient_dim = int(ambient_dim)
        rows = []
        if basis is not None and len(basis):
            arr = np.asarray(basis, dtype=float)
            if arr.ndim == 1:
                arr = arr[None, :]
            if arr.shape[1] != ambient_dim:
                raise DimensionMismatch(f"vectors of length {arr.shape[1]} in R^{ambient_dim}")
            rows = list(arr)
        self.basis = _orthonormalize(rows, self.ambient_dim)

    @classmethod
    def span_of(cls, *vectors) -> "Subspace":
        dim = len(vectors[0])
        return cls(dim, vectors)

    @classmethod
    def null(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim)

    @classmethod
    def full(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, np.eye(ambient_dim))

    @property
    def rank(self) -> int:
        return self.basis.shape[0]

    def projector(self) -> np.ndarray:
        return self.basis.T @ self.basis

    def complement(self) -> "Subspace":
        # Gram-Schmidt the standard basis against our own basis; the survivors
        # span the orthogonal complement.
        q = list(self.basis) + list(np.eye(self.ambient_dim))
        full = _orthonormalize(q, self.ambient_dim)
        return Subspace(self.ambient_dim, full[self.rank:])

    def contains(self, other: "Subspace", tol: float = EQUAL_TOL) -> bool:
        _check_dims(self, other)
        if other.rank == 0:
            return True
        residual = other.basis - other.basis @ self.projector()
        return bool(np.all(np.linalg.norm(residual, axis=1) <= tol))

    def equals(self, other: "Subspace", tol: float = EQUAL_TOL) -> bool:
        _check_dims(self, other)
        if self.rank != other.rank:
            return False
        return bool(np.max(np.abs(self.projector() - other.projector()), initial=0.0) <= tol)

    def __repr__(self):
        return f"Subspace(ambient_dim={self.ambient_dim}, rank={self.rank})"


def _check_dims(*subspaces: Subspace) -> None:
    dims = {s.ambient_dim for s in subspaces}
    if len(dims) != 1:
        raise DimensionMismatch(f"subspaces live in different dimensions: {sorted(dims)}")


def span(a: Subspace, b: Subspace) -> Subspace:
    """Smallest subspace containing both ``a`` and ``b`` (the lattice join)."""
    _check_dims(a, b)
    return Subspace(a.ambient_dim, list(a.basis) + list(b.basis))


def meet(a: Subspace, b: Subspace) -> Subspace:
    """Intersection, computed as the complement of the span of complements."""
    _check_dims(a, b)
    return span(a.complement(), b.complement()).complement()


class DistributivityGap(NamedTuple):
    left: Subspace
    right: Subspace
    equal: bool


def distributivity_gap(a: Subspace, b: Subspace, c: Subspace) -> DistributivityGap:
    """Compare ``a ^ (b v c)`` with ``(a ^ b) v (a ^ c)``."""
    _check_dims(a, b, c)
    left = meet(a, span(b, c))
    right = span(meet(a, b), meet(a, c))
    return DistributivityGap(left, right, left.equals(right))


def oblique_configuration() -> tuple[Subspace, Subspace, Subspace]:
    """``(L_e2, L_y, L_x)`` in R^3 with x, y oblique inside the e1-e2 plane."""
    s = 1.0 / np.sqrt(2.0)
    e2 = Subspace.span_of([0.0, 1.0, 0.0])
    y = Subspace.span_of([s, -s, 0.0])
    x = Subspace.span_of([s, s, 0.0])
    return e2, y, x


def orthogonal_configuration() -> tuple[Subspace, Subspace, Subspace]:
    e = np.eye(3)
    return Subspace.span_of(e[1]), Subspace.span_of(e[0]), Subspace.span_of(e[2])


def regions_of_acceptance(vectors: Sequence) -> list[Subspace]:
    """All spans of subsets of an orthonormal family, smallest first.

    For two basis vectors this is the null subspace, each ray, and the whole
    plane: the four projective regions of acceptance.
    """
    vectors = [np.asarray(v, dtype=float) for v in vectors]
    dim = len(vectors[0])
    out = []
    for k in range(len(vectors) + 1):
        for combo in itertools.combinations(vectors, k):
            out.append(Subspace(dim, list(combo)))
    return out


def is_expressible(target: Subspace, vectors: Sequence) -> bool:
    """Whether ``target`` is one of the regions built from ``vectors`` by set-like operations."""
    return any(target.equals(r) for r in regions_of_acceptance(vectors) if r.ambient_dim == target.ambient_dim)
