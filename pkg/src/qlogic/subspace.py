"""Subspaces of C^n and their ortholattice operations.

A :class:`Subspace` stores an orthonormal basis as the *rows* of a ``d x n``
complex array.  The zero subspace is a ``0 x n`` array, so every operation
below works on it without special cases in calling code.

Only :func:`join` (and :func:`from_spanning`) make rank decisions; the
complement of an orthonormal basis is exact and the meet is computed as
``~(~S | ~T)``.  Rank decisions compare singular values against
``Tolerance.rank_threshold`` relative to the largest one.  The ``*_checked``
variants also report whether any singular value fell inside the guard band
around that cutoff, which randomized searches use to reject samples.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "Tolerance",
    "DEFAULT_TOL",
    "Subspace",
    "Isometry",
    "top",
    "bottom",
    "span_of",
    "from_spanning",
    "from_spanning_checked",
    "complement",
    "join",
    "join_checked",
    "meet",
    "meet_checked",
    "projector",
    "projector_distance",
    "contains",
    "equal",
    "random_subspace",
    "isometry_onto",
    "pushforward",
    "pullback",
    "apply_unitary",
    "random_unitary",
    "principal_angles",
    "subspace_to_json",
    "subspace_from_json",
    "AmbientMismatchError",
    "standard_basis",
]

CONTAINS_ATOL = 1e-8


class AmbientMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class Tolerance:
    """Rank cutoff and guard band, both relative to the largest singular value.

    A singular value ``s`` is *ambiguous* when
    ``rank_threshold**2 / guard_band <= s <= guard_band``, i.e. it lies within
    the same number of decades on either side of the cutoff.
    """

    rank_threshold: float = 1e-9
    guard_band: float = 1e-6

    def __post_init__(self):
        if not 0.0 < self.rank_threshold < 1.0:
            raise ValueError(f"rank_threshold must lie in (0, 1), got {self.rank_threshold}")
        if self.guard_band < 0.0:
            raise ValueError(f"guard_band must be nonnegative, got {self.guard_band}")

    @property
    def band(self) -> tuple[float, float]:
        if self.guard_band <= self.rank_threshold:
            return (self.rank_threshold, self.rank_threshold)
        return (self.rank_threshold**2 / self.guard_band, self.guard_band)

    def decide(self, singular_values: np.ndarray) -> tuple[int, bool]:
        """Return ``(rank, ambiguous)`` for a descending array of singular values."""
        if singular_values.size == 0 or singular_values[0] == 0.0:
            return 0, False
        rel = singular_values / singular_values[0]
        rank = int(np.count_nonzero(rel > self.rank_threshold))
        lo, hi = self.band
        ambiguous = bool(np.any((rel >= lo) & (rel <= hi)))
        return rank, ambiguous


DEFAULT_TOL = Tolerance()


@dataclass(frozen=True, eq=False)
class Subspace:
    ambient: int
    basis: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=complex)
        if b.ndim != 2 or b.shape[1] != self.ambient:
            raise ValueError(f"basis must have shape (d, {self.ambient}), got {b.shape}")
        b.setflags(write=False)
        object.__setattr__(self, "basis", b)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def __repr__(self):
        return f"<Subspace of dim {self.dim} in C^{self.ambient}>"

    def __invert__(self) -> Subspace:
        return complement(self)

    def __or__(self, other: Subspace) -> Subspace:
        return join(self, other)

    def __and__(self, other: Subspace) -> Subspace:
        return meet(self, other)


@dataclass(frozen=True, eq=False)
class Isometry:
    """Columns of ``map`` are an orthonormal basis of a subspace of C^n."""

    map: np.ndarray

    @property
    def source_dim(self) -> int:
        return self.map.shape[1]

    @property
    def ambient(self) -> int:
        return self.map.shape[0]


def _check_same(s: Subspace, t: Subspace) -> None:
    if s.ambient != t.ambient:
        raise AmbientMismatchError(f"ambient mismatch: C^{s.ambient} vs C^{t.ambient}")


def top(n: int) -> Subspace:
    return Subspace(n, np.eye(n, dtype=complex))


def bottom(n: int) -> Subspace:
    return Subspace(n, np.zeros((0, n), dtype=complex))


def _row_span(rows: np.ndarray, n: int, tol: Tolerance) -> tuple[Subspace, bool]:
    if rows.shape[0] == 0:
        return bottom(n), False
    _, sv, vh = np.linalg.svd(rows, full_matrices=False)
    rank, ambiguous = tol.decide(sv)
    return Subspace(n, vh[:rank]), ambiguous


def from_spanning_checked(vectors, ambient: int, tol: Tolerance = DEFAULT_TOL) -> tuple[Subspace, bool]:
    rows = [np.asarray(v, dtype=complex).ravel() for v in vectors]
    for v in rows:
        if v.shape[0] != ambient:
            raise ValueError(f"vector of length {v.shape[0]} in C^{ambient}")
    if not rows:
        return bottom(ambient), False
    return _row_span(np.vstack(rows), ambient, tol)


def from_spanning(vectors, ambient: int, tol: Tolerance = DEFAULT_TOL) -> Subspace:
    """Span of ``vectors`` (each of length ``ambient``); an empty list gives the zero subspace."""
    return from_spanning_checked(vectors, ambient, tol)[0]


def span_of(*vectors, ambient: int | None = None) -> Subspace:
    """Convenience wrapper: ``span_of(e1, e1 + e2)``."""
    if ambient is None:
        ambient = len(vectors[0])
    return from_spanning(vectors, ambient)


def complement(s: Subspace) -> Subspace:
    n, d = s.ambient, s.dim
    if d == 0:
        return top(n)
    if d == n:
        return bottom(n)
    # rows d.. of Vh are orthonormal and orthogonal to the row space of the basis
    _, _, vh = np.linalg.svd(s.basis, full_matrices=True)
    return Subspace(n, vh[d:])


def join_checked(s: Subspace, t: Subspace, tol: Tolerance = DEFAULT_TOL) -> tuple[Subspace, bool]:
    _check_same(s, t)
    if t.dim == 0 or s.dim == s.ambient:
        return s, False
    if s.dim == 0 or t.dim == t.ambient:
        return t, False
    return _row_span(np.vstack([s.basis, t.basis]), s.ambient, tol)


def join(s: Subspace, t: Subspace, tol: Tolerance = DEFAULT_TOL) -> Subspace:
    return join_checked(s, t, tol)[0]


def meet_checked(s: Subspace, t: Subspace, tol: Tolerance = DEFAULT_TOL) -> tuple[Subspace, bool]:
    _check_same(s, t)
    if t.dim == t.ambient or s.dim == 0:
        return s, False
    if s.dim == s.ambient or t.dim == 0:
        return t, False
    j, ambiguous = join_checked(complement(s), complement(t), tol)
    return complement(j), ambiguous


def meet(s: Subspace, t: Subspace, tol: Tolerance = DEFAULT_TOL) -> Subspace:
    return meet_checked(s, t, tol)[0]


def projector(s: Subspace) -> np.ndarray:
    """Orthogonal projector onto ``s`` as an ``n x n`` matrix acting on column vectors."""
    b = s.basis
    return b.T @ b.conj()


def projector_distance(s: Subspace, t: Subspace) -> float:
    _check_same(s, t)
    return float(np.linalg.norm(projector(s) - projector(t)))


def contains(s: Subspace, t: Subspace, atol: float = CONTAINS_ATOL) -> bool:
    """True iff every basis vector of ``t`` lies in ``s`` up to residual ``atol``."""
    _check_same(s, t)
    if t.dim == 0:
        return True
    if t.dim > s.dim:
        return False
    coeffs = t.basis @ s.basis.conj().T
    residual = t.basis - coeffs @ s.basis
    return bool(np.max(np.linalg.norm(residual, axis=1)) < atol)


def equal(s: Subspace, t: Subspace, atol: float = CONTAINS_ATOL) -> bool:
    _check_same(s, t)
    return s.dim == t.dim and contains(s, t, atol) and contains(t, s, atol)


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def random_subspace(n: int, d: int, seed=None) -> Subspace:
    """Haar-distributed ``d``-dimensional subspace of C^n.

    ``seed`` is an int (fully deterministic) or a ``numpy.random.Generator``
    whose state is advanced.
    """
    if not 0 <= d <= n:
        raise ValueError(f"need 0 <= d <= n, got d={d}, n={n}")
    if d == 0:
        return bottom(n)
    rng = _rng(seed)
    g = rng.standard_normal((n, d)) + 1j * rng.standard_normal((n, d))
    q, _ = np.linalg.qr(g)
    return Subspace(n, q.T)


def random_unitary(n: int, seed=None) -> np.ndarray:
    rng = _rng(seed)
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def isometry_onto(s: Subspace) -> Isometry:
    return Isometry(s.basis.T.copy())


def pushforward(iso: Isometry, p: Subspace) -> Subspace:
    """Image of a subspace of C^d under the isometry C^d -> C^n."""
    if p.ambient != iso.source_dim:
        raise ValueError(f"subspace lives in C^{p.ambient}, isometry expects C^{iso.source_dim}")
    return Subspace(iso.ambient, p.basis @ iso.map.T)


def pullback(iso: Isometry, s: Subspace, tol: Tolerance = DEFAULT_TOL) -> Subspace:
    """Coordinates of ``s`` (assumed inside the isometry's image) in C^d."""
    if s.ambient != iso.ambient:
        raise ValueError(f"subspace lives in C^{s.ambient}, isometry targets C^{iso.ambient}")
    coords = s.basis @ iso.map.conj()
    return _row_span(coords, iso.source_dim, tol)[0]


def apply_unitary(u: np.ndarray, s: Subspace, atol: float = 1e-10) -> Subspace:
    """Image ``u S`` of the subspace under the unitary ``u`` (acting on column vectors)."""
    u = np.asarray(u, dtype=complex)
    n = s.ambient
    if u.shape != (n, n):
        raise ValueError(f"unitary must be {n}x{n}, got {u.shape}")
    if not np.allclose(u.conj().T @ u, np.eye(n), atol=atol):
        raise ValueError("matrix is not unitary")
    return Subspace(n, s.basis @ u.T)


def principal_angles(s: Subspace, t: Subspace) -> list[float]:
    """Principal angles in ascending order, ``min(dim s, dim t)`` of them."""
    _check_same(s, t)
    k = min(s.dim, t.dim)
    if k == 0:
        return []
    cos = np.linalg.svd(s.basis.conj() @ t.basis.T, compute_uv=False)[:k]
    return sorted(float(a) for a in np.arccos(np.clip(cos, 0.0, 1.0)))


def subspace_to_json(s: Subspace) -> dict:
    return {
        "ambient": s.ambient,
        "basis": [[[float(z.real), float(z.imag)] for z in row] for row in s.basis],
    }


def subspace_from_json(data: dict, tol: Tolerance = DEFAULT_TOL) -> Subspace:
    n = int(data["ambient"])
    rows = data.get("basis", [])
    vecs = []
    for row in rows:
        if len(row) != n:
            raise ValueError(f"basis row has {len(row)} entries, expected {n}")
        vecs.append([complex(re, im) for re, im in row])
    s = from_spanning(vecs, n, tol)
    if s.dim != len(rows):
        raise ValueError(f"basis claims dimension {len(rows)} but spans dimension {s.dim}")
    return s


def standard_basis(n: int, i: int) -> np.ndarray:
    e = np.zeros(n, dtype=complex)
    e[i] = 1.0
    return e
