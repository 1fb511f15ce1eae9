"""Colligations classified up to a single shared inner conjugation.

Here one unitary of size ``alpha + slots * slot_dim`` carries ``slots`` inner
blocks of equal size ``slot_dim``, and the equivalence conjugates every inner
slot by the same unitary ``u``.  The inner coupling block is a full
``slots x slots`` array of ``slot_dim x slot_dim`` blocks, not block-diagonal,
which is what separates this construction from a family of independent
members: the same characteristic function recipe applies, but the diagonal
dilation law is lost.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import block_diag

from .errors import AlphaMismatch, ArityMismatch, BadSplit, NearSingular, OnEigensurface
from .linalg import (
    CharValue,
    DEFAULT_TOLERANCES,
    Tolerances,
    _haar_unitary,
    require_unitary,
    sigma_extremes,
    solve,
)

__all__ = [
    "TriColligation",
    "random_tri",
    "tri_conjugate",
    "tri_product",
    "tri_charfun",
    "tri_charfun_system",
    "tri_elimination_matrix",
]


class TriColligation:
    """Unitary with one exposed block and ``slots`` coupled inner slots."""

    __slots__ = ("alpha", "slot_dim", "slots", "matrix")

    def __init__(self, matrix, alpha: int, slot_dim: int, slots: int = 2, tol: Tolerances = DEFAULT_TOLERANCES):
        m = np.array(matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise BadSplit(f"matrix must be square, got shape {m.shape}")
        if alpha < 1 or slot_dim < 1 or slots < 1:
            raise BadSplit(f"invalid split alpha={alpha}, slot_dim={slot_dim}, slots={slots}")
        if m.shape[0] != alpha + slots * slot_dim:
            raise BadSplit(
                f"matrix size {m.shape[0]} does not match alpha + slots*slot_dim"
                f" = {alpha + slots * slot_dim}"
            )
        require_unitary(m, tol, "colligation matrix")
        m.flags.writeable = False
        self.alpha = int(alpha)
        self.slot_dim = int(slot_dim)
        self.slots = int(slots)
        self.matrix = m

    @property
    def size(self) -> int:
        return self.alpha + self.slots * self.slot_dim

    def _slot(self, i: int) -> slice:
        start = self.alpha + i * self.slot_dim
        return slice(start, start + self.slot_dim)

    @property
    def a(self) -> np.ndarray:
        return self.matrix[: self.alpha, : self.alpha]

    def b(self, i: int) -> np.ndarray:
        return self.matrix[: self.alpha, self._slot(i)]

    def c(self, i: int) -> np.ndarray:
        return self.matrix[self._slot(i), : self.alpha]

    def d(self, i: int, j: int) -> np.ndarray:
        return self.matrix[self._slot(i), self._slot(j)]

    def b_row(self) -> np.ndarray:
        """All exposed-from-inner blocks side by side (alpha x slots*slot_dim)."""
        return self.matrix[: self.alpha, self.alpha :]

    def c_col(self) -> np.ndarray:
        """All inner-from-exposed blocks stacked (slots*slot_dim x alpha)."""
        return self.matrix[self.alpha :, : self.alpha]

    def d_full(self) -> np.ndarray:
        """The full coupled inner block (slots*slot_dim x slots*slot_dim)."""
        return self.matrix[self.alpha :, self.alpha :]

    def __repr__(self):
        return f"TriColligation(alpha={self.alpha}, slot_dim={self.slot_dim}, slots={self.slots})"


def random_tri(alpha: int, slot_dim: int, slots: int, seed) -> TriColligation:
    rng = np.random.default_rng(seed)
    return _random_tri(rng, alpha, slot_dim, slots)


def _random_tri(rng: np.random.Generator, alpha: int, slot_dim: int, slots: int) -> TriColligation:
    return TriColligation(_haar_unitary(rng, alpha + slots * slot_dim), alpha, slot_dim, slots)


def tri_conjugate(tc: TriColligation, u, tol: Tolerances = DEFAULT_TOLERANCES) -> TriColligation:
    """Conjugate every inner slot by the same unitary ``u``."""
    w = require_unitary(u, tol, "inner conjugator")
    if w.shape[0] != tc.slot_dim:
        raise BadSplit(f"conjugator has dimension {w.shape[0]}, expected {tc.slot_dim}")
    big = block_diag(np.eye(tc.alpha), *([w] * tc.slots)).astype(complex)
    return TriColligation(big @ tc.matrix @ big.conj().T, tc.alpha, tc.slot_dim, tc.slots, tol)


def _embed_left(tc: TriColligation, extra: int) -> np.ndarray:
    # The left factor of the product: original blocks in the first half of
    # each enlarged slot, identity on the second half.
    al, p, n = tc.alpha, tc.slot_dim, tc.slots
    w = p + extra
    out = np.zeros((al + n * w, al + n * w), dtype=complex)
    out[:al, :al] = tc.a
    for i in range(n):
        ri = al + i * w
        out[ri : ri + p, :al] = tc.c(i)
        out[:al, ri : ri + p] = tc.b(i)
        out[ri + p : ri + w, ri + p : ri + w] = np.eye(extra)
        for j in range(n):
            rj = al + j * w
            out[ri : ri + p, rj : rj + p] = tc.d(i, j)
    return out


def _embed_right(tc: TriColligation, extra: int) -> np.ndarray:
    # The right factor: identity on the first half of each enlarged slot,
    # original blocks on the second half.
    al, p, n = tc.alpha, tc.slot_dim, tc.slots
    w = extra + p
    out = np.zeros((al + n * w, al + n * w), dtype=complex)
    out[:al, :al] = tc.a
    for i in range(n):
        ri = al + i * w
        out[ri : ri + extra, ri : ri + extra] = np.eye(extra)
        out[ri + extra : ri + w, :al] = tc.c(i)
        out[:al, ri + extra : ri + w] = tc.b(i)
        for j in range(n):
            rj = al + j * w
            out[ri + extra : ri + w, rj + extra : rj + w] = tc.d(i, j)
    return out


def tri_product(x: TriColligation, y: TriColligation, tol: Tolerances = DEFAULT_TOLERANCES) -> TriColligation:
    """Product; slot sizes add, inner coordinates concatenate per slot."""
    if x.alpha != y.alpha:
        raise AlphaMismatch(f"exposed dimensions differ: {x.alpha} vs {y.alpha}")
    if x.slots != y.slots:
        raise ArityMismatch(f"slot counts differ: {x.slots} vs {y.slots}")
    left = _embed_left(x, y.slot_dim)
    right = _embed_right(y, x.slot_dim)
    return TriColligation(left @ right, x.alpha, x.slot_dim + y.slot_dim, x.slots, tol)


def _check_argument(tc: TriColligation, s) -> np.ndarray:
    s = np.asarray(s, dtype=complex)
    n = tc.slots
    if s.shape != (n, n):
        raise ArityMismatch(f"argument must be {n}x{n}, got {s.shape}")
    if s.size and not np.all(np.isfinite(s.real) & np.isfinite(s.imag)):
        raise ValueError("argument contains non-finite entries")
    return s


def tri_elimination_matrix(tc: TriColligation, s) -> np.ndarray:
    """Eliminated inner system ``kron(S, I) - d_full`` on the stacked inner slots."""
    s = _check_argument(tc, s)
    return np.kron(s, np.eye(tc.slot_dim)) - tc.d_full()


def tri_charfun(tc: TriColligation, s, tol: Tolerances = DEFAULT_TOLERANCES) -> CharValue:
    """Characteristic function at a matrix argument; value is alpha x alpha."""
    elim = tri_elimination_matrix(tc, s)
    try:
        xsol, smin = solve(elim, tc.c_col(), tol)
    except NearSingular as err:
        raise OnEigensurface(err.sigma_min, "argument lies on the eigensurface") from None
    return CharValue(tc.a + tc.b_row() @ xsol, smin, True)


def tri_charfun_system(tc: TriColligation, s, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Brute-force evaluation via the literal (alpha + slots*slot_dim) system."""
    s = _check_argument(tc, s)
    al, p, n = tc.alpha, tc.slot_dim, tc.slots
    dim = al + n * p
    sys = np.zeros((dim, dim), dtype=complex)
    rhs = np.zeros((dim, al), dtype=complex)
    sys[:al, :al] = np.eye(al)
    rhs[:al, :] = tc.a
    eye_p = np.eye(p)
    for j in range(n):
        cols = slice(al + j * p, al + (j + 1) * p)
        sys[:al, cols] = -tc.b(j)
    for i in range(n):
        rows = slice(al + i * p, al + (i + 1) * p)
        rhs[rows, :] = tc.c(i)
        for j in range(n):
            cols = slice(al + j * p, al + (j + 1) * p)
            sys[rows, cols] = s[i, j] * eye_p - tc.d(i, j)
    smin, smax = sigma_extremes(sys)
    if smax == 0.0 or smin <= tol.surface_guard * smax:
        raise OnEigensurface(smin, "coupled system is singular")
    sol = np.linalg.solve(sys, rhs)
    return sol[:al, :]
