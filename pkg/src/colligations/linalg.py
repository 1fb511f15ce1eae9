"""Dense complex linear algebra substrate.

Everything downstream goes through the helpers here: operator norms, guarded
linear solves, rank-revealing kernels, and seeded Haar-distributed random
matrices.  All routines are pure functions of their inputs; randomness enters
only through explicit seeds or generators.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NearSingular, NotOrthogonal, NotUnitary

__all__ = [
    "Tolerances",
    "DEFAULT_TOLERANCES",
    "TOLERANCE_PROFILES",
    "tolerances_from_profile",
    "CharValue",
    "op_norm",
    "sigma_extremes",
    "solve",
    "kernel",
    "orthonormal_columns",
    "unitarity_defect",
    "require_unitary",
    "require_real_orthogonal",
    "haar_unitary",
    "haar_orthogonal",
    "rel_defect",
]


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds used across the package.

    unitarity_tol
        Relative Frobenius defect allowed when a matrix must be unitary.
    residual_tol
        Relative residual allowed in identities checked numerically.
    rank_tol
        Relative threshold for rank decisions and eigenvalue clustering.
    surface_guard
        Smallest relative singular value below which an eliminated system
        counts as singular (pole / eigensurface detection).
    """

    unitarity_tol: float = 1e-10
    residual_tol: float = 1e-9
    rank_tol: float = 1e-9
    surface_guard: float = 1e-8

    def __post_init__(self):
        for name in ("unitarity_tol", "residual_tol", "rank_tol", "surface_guard"):
            value = getattr(self, name)
            if not (0.0 < value < 1.0):
                raise ValueError(f"{name} must lie strictly between 0 and 1, got {value}")


DEFAULT_TOLERANCES = Tolerances()

TOLERANCE_PROFILES = {
    "default": DEFAULT_TOLERANCES,
    "strict": Tolerances(
        unitarity_tol=1e-11,
        residual_tol=1e-10,
        rank_tol=1e-10,
        surface_guard=1e-9,
    ),
}


def tolerances_from_profile(name: str) -> Tolerances:
    try:
        return TOLERANCE_PROFILES[name]
    except KeyError:
        known = ", ".join(sorted(TOLERANCE_PROFILES))
        raise ValueError(f"unknown tolerance profile {name!r} (known: {known})") from None


@dataclass(frozen=True)
class CharValue:
    """A characteristic-function value with its regularity certificate.

    ``sigma_min`` is the smallest singular value of the eliminated linear
    system; ``regular`` records that it cleared the surface guard (values are
    only ever returned for regular arguments, singular ones raise).
    """

    value: np.ndarray
    sigma_min: float
    regular: bool


def _as_complex(m, name="matrix") -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise ValueError(f"{name} must be two-dimensional, got shape {a.shape}")
    if a.size and not (np.all(np.isfinite(a.real)) and np.all(np.isfinite(a.imag))):
        raise ValueError(f"{name} contains non-finite entries")
    return a


def op_norm(m) -> float:
    """Largest singular value of ``m`` (0.0 for an empty matrix)."""
    a = _as_complex(m)
    if a.size == 0:
        return 0.0
    return float(np.linalg.svd(a, compute_uv=False)[0])


def sigma_extremes(m) -> tuple[float, float]:
    """Smallest and largest singular value of ``m``."""
    a = _as_complex(m)
    if a.size == 0:
        return 0.0, 0.0
    s = np.linalg.svd(a, compute_uv=False)
    return float(s[-1]), float(s[0])


def solve(m, rhs, tol: Tolerances = DEFAULT_TOLERANCES):
    """Solve ``m @ x = rhs`` for square ``m``, guarding against singularity.

    Returns ``(x, sigma_min)`` where ``sigma_min`` is the smallest singular
    value of ``m``.  Raises :class:`NearSingular` when
    ``sigma_min <= surface_guard * sigma_max``.
    """
    a = _as_complex(m, "coefficient matrix")
    rows, cols = a.shape
    if rows != cols:
        raise ValueError(f"coefficient matrix must be square, got {a.shape}")
    b = np.asarray(rhs, dtype=complex)
    vector_rhs = b.ndim == 1
    if vector_rhs:
        b = b[:, None]
    if b.shape[0] != rows:
        raise ValueError(f"rhs has {b.shape[0]} rows, expected {rows}")
    if rows == 0:
        x = np.zeros_like(b)
        return (x[:, 0] if vector_rhs else x), 0.0
    u, s, vh = np.linalg.svd(a)
    smax = float(s[0])
    smin = float(s[-1])
    if smax == 0.0 or smin <= tol.surface_guard * smax:
        raise NearSingular(smin, "linear system is singular or nearly so")
    x = vh.conj().T @ ((u.conj().T @ b) / s[:, None])
    return (x[:, 0] if vector_rhs else x), smin


def kernel(m, rtol: float) -> np.ndarray:
    """Orthonormal basis for the null space of ``m``.

    Singular values at or below ``rtol`` times the largest one count as zero.
    """
    a = _as_complex(m)
    rows, cols = a.shape
    if cols == 0:
        return np.zeros((0, 0), dtype=complex)
    if rows == 0 or not a.any():
        return np.eye(cols, dtype=complex)
    _, s, vh = np.linalg.svd(a)
    smax = float(s[0])
    rank = int(np.sum(s > rtol * smax)) if smax > 0.0 else 0
    return vh[rank:].conj().T


def orthonormal_columns(m, rtol: float) -> np.ndarray:
    """Orthonormal basis for the column span of ``m``, rank-truncated."""
    a = _as_complex(m)
    if a.shape[1] == 0 or not a.any():
        return np.zeros((a.shape[0], 0), dtype=complex)
    u, s, _ = np.linalg.svd(a, full_matrices=False)
    smax = float(s[0])
    rank = int(np.sum(s > rtol * smax)) if smax > 0.0 else 0
    return u[:, :rank]


def unitarity_defect(u) -> float:
    """Frobenius defect of ``u* u = 1``, scaled by the matrix dimension."""
    a = _as_complex(u)
    dim = a.shape[0]
    if a.shape != (dim, dim):
        return float("inf")
    if dim == 0:
        return 0.0
    gram = a.conj().T @ a
    return float(np.linalg.norm(gram - np.eye(dim)) / np.sqrt(dim))


def require_unitary(u, tol: Tolerances, what: str = "matrix") -> np.ndarray:
    a = _as_complex(u, what)
    if a.shape[0] != a.shape[1]:
        raise NotUnitary(f"{what} must be square, got shape {a.shape}")
    defect = unitarity_defect(a)
    if defect > tol.unitarity_tol:
        raise NotUnitary(f"{what} is not unitary (defect {defect:.3e} > {tol.unitarity_tol:.1e})")
    return a


def require_real_orthogonal(u, tol: Tolerances, what: str = "matrix") -> np.ndarray:
    a = _as_complex(u, what)
    if a.size and float(np.max(np.abs(a.imag))) > tol.unitarity_tol:
        raise NotOrthogonal(f"{what} must be real")
    try:
        require_unitary(a, tol, what)
    except NotUnitary as err:
        raise NotOrthogonal(str(err)) from None
    return a


def _haar_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r).copy()
    diag[diag == 0] = 1.0
    return q * (diag / np.abs(diag))


def _haar_orthogonal(rng: np.random.Generator, dim: int) -> np.ndarray:
    z = rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(z)
    signs = np.sign(np.diagonal(r))
    signs[signs == 0] = 1.0
    return (q * signs).astype(complex)


def haar_unitary(dim: int, seed: int) -> np.ndarray:
    """Haar-distributed ``dim x dim`` unitary, deterministic in ``seed``.

    QR of a complex Ginibre matrix with the R-diagonal phase normalization,
    which makes the distribution exactly Haar.
    """
    if dim < 1:
        raise ValueError(f"dim must be positive, got {dim}")
    return _haar_unitary(np.random.default_rng(seed), dim)


def haar_orthogonal(dim: int, seed: int) -> np.ndarray:
    """Haar-distributed real orthogonal matrix (returned as complex dtype)."""
    if dim < 1:
        raise ValueError(f"dim must be positive, got {dim}")
    return _haar_orthogonal(np.random.default_rng(seed), dim)


def rel_defect(x, y, floor: float = 1.0) -> float:
    """Norm of ``x - y`` relative to the larger operand (or ``floor``)."""
    a = np.asarray(x, dtype=complex)
    b = np.asarray(y, dtype=complex)
    scale = max(floor, op_norm(a), op_norm(b))
    return op_norm(a - b) / scale


# Seeded samplers shared by the verification suites and the command line.

def sample_disc(rng: np.random.Generator, radius: float = 1.0) -> complex:
    """Uniform sample from the open disc of the given radius."""
    r = radius * np.sqrt(rng.uniform(0.0, 1.0))
    theta = rng.uniform(0.0, 2.0 * np.pi)
    return complex(r * np.cos(theta), r * np.sin(theta))


def sample_ball(rng: np.random.Generator, dim: int, radius: float) -> np.ndarray:
    """Random ``dim x dim`` matrix with operator norm at most ``radius``."""
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    top = op_norm(g)
    if top == 0.0:
        return np.zeros((dim, dim), dtype=complex)
    return (radius * rng.uniform(0.05, 1.0) / top) * g


def sample_invertible(
    rng: np.random.Generator, dim: int, min_sigma_ratio: float = 0.1, max_tries: int = 64
) -> np.ndarray:
    """Random matrix whose condition number is kept moderate by resampling."""
    for _ in range(max_tries):
        g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        smin, smax = sigma_extremes(g)
        if smax > 0.0 and smin >= min_sigma_ratio * smax:
            return g
    raise RuntimeError("failed to sample a well-conditioned matrix")
