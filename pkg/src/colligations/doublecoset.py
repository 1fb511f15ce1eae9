"""Families of unitaries up to two-sided real-orthogonal inner equivalence.

Each member keeps the exposed/inner split of a colligation, but the
equivalence now multiplies the inner space on both sides, by one pair of
real orthogonal matrices shared across the family.  The matching
characteristic function takes two matrix arguments (S, R): a "plus" copy of
the system runs through the members and a "minus" copy through their
transposed inverses, with S coupling the inner outputs and R the inner
inputs.  Eliminating the coupled variables leaves a 2nm-dimensional core
system; the value acts on the doubled exposed space, plus coordinates first.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import block_diag

from .colligation import Colligation, _random_colligation, product
from .errors import (
    AlphaMismatch,
    ArityMismatch,
    NearSingular,
    NotUnitary,
    OnEigensurface,
)
from .linalg import (
    CharValue,
    DEFAULT_TOLERANCES,
    Tolerances,
    op_norm,
    require_real_orthogonal,
    sigma_extremes,
    solve,
)

__all__ = [
    "DoubleCosetFamily",
    "random_family",
    "transpose_inverse",
    "dc_equivalent",
    "dc_product",
    "dc_charfun",
    "dc_charfun_system",
    "dc_elimination_matrix",
    "dc_dilation_check",
    "indefinite_form",
    "skew_form",
    "FormReport",
    "form_checks",
    "adjoint_experiment",
]


class DoubleCosetFamily:
    """Tuple of split unitaries sharing one exposed/inner dimension pair."""

    __slots__ = ("members",)

    def __init__(self, members):
        members = tuple(members)
        if not members:
            raise ArityMismatch("a family needs at least one member")
        if any(not isinstance(g, Colligation) for g in members):
            raise TypeError("members must be Colligation instances")
        alpha, inner = members[0].alpha, members[0].inner
        for g in members[1:]:
            if g.alpha != alpha:
                raise AlphaMismatch("members disagree on the exposed dimension")
            if g.inner != inner:
                raise ArityMismatch("members disagree on the inner dimension")
        self.members = members

    @property
    def arity(self) -> int:
        return len(self.members)

    @property
    def alpha(self) -> int:
        return self.members[0].alpha

    @property
    def inner(self) -> int:
        return self.members[0].inner

    def __repr__(self):
        return f"DoubleCosetFamily(arity={self.arity}, alpha={self.alpha}, inner={self.inner})"


def random_family(alpha: int, inner: int, arity: int, seed) -> DoubleCosetFamily:
    rng = np.random.default_rng(seed)
    return _random_family(rng, alpha, inner, arity)


def _random_family(rng: np.random.Generator, alpha: int, inner: int, arity: int) -> DoubleCosetFamily:
    return DoubleCosetFamily(_random_colligation(rng, alpha, inner) for _ in range(arity))


def transpose_inverse(g, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Transposed inverse of a unitary, computed as the entrywise conjugate.

    The shortcut is cross-checked against an explicit solve of
    ``g^T x = 1``; disagreement means the input was not unitary enough.
    """
    m = np.asarray(g, dtype=complex)
    shortcut = m.conj()
    explicit = np.linalg.solve(m.T, np.eye(m.shape[0], dtype=complex))
    gap = op_norm(shortcut - explicit)
    if gap > tol.residual_tol * max(1.0, op_norm(explicit)):
        raise NotUnitary(f"transpose-inverse shortcut disagrees with direct solve (gap {gap:.3e})")
    return shortcut


def dc_equivalent(
    fam: DoubleCosetFamily, u, v, tol: Tolerances = DEFAULT_TOLERANCES
) -> DoubleCosetFamily:
    """Act by the two-sided inner equivalence with real orthogonal (u, v)."""
    uo = require_real_orthogonal(u, tol, "left inner factor")
    vo = require_real_orthogonal(v, tol, "right inner factor")
    if uo.shape[0] != fam.inner or vo.shape[0] != fam.inner:
        raise ArityMismatch("inner factors do not match the inner dimension")
    members = []
    for g in fam.members:
        m = np.block([[g.a, g.b @ vo], [uo @ g.c, uo @ g.d @ vo]])
        members.append(Colligation(m, g.alpha, tol))
    return DoubleCosetFamily(members)


def dc_product(x: DoubleCosetFamily, y: DoubleCosetFamily, tol: Tolerances = DEFAULT_TOLERANCES) -> DoubleCosetFamily:
    """Member-wise semigroup product of two families of equal arity."""
    if x.arity != y.arity:
        raise ArityMismatch(f"arities differ: {x.arity} vs {y.arity}")
    if x.alpha != y.alpha:
        raise AlphaMismatch(f"exposed dimensions differ: {x.alpha} vs {y.alpha}")
    return DoubleCosetFamily(product(g, h, tol) for g, h in zip(x.members, y.members))


def _check_arguments(fam: DoubleCosetFamily, s, r):
    n = fam.arity
    s = np.asarray(s, dtype=complex)
    r = np.asarray(r, dtype=complex)
    if s.shape != (n, n) or r.shape != (n, n):
        raise ArityMismatch(f"arguments must be {n}x{n}, got {s.shape} and {r.shape}")
    for name, m in (("S", s), ("R", r)):
        if m.size and not np.all(np.isfinite(m.real) & np.isfinite(m.imag)):
            raise ValueError(f"argument {name} contains non-finite entries")
    return s, r


def _tilde_blocks(fam: DoubleCosetFamily, tol: Tolerances):
    tildes = [transpose_inverse(g.matrix, tol) for g in fam.members]
    al = fam.alpha
    at = block_diag(*(t[:al, :al] for t in tildes)).astype(complex)
    bt = block_diag(*(t[:al, al:] for t in tildes)).astype(complex)
    ct = block_diag(*(t[al:, :al] for t in tildes)).astype(complex)
    dt = block_diag(*(t[al:, al:] for t in tildes)).astype(complex)
    return at, bt, ct, dt


def dc_elimination_matrix(fam: DoubleCosetFamily, s, r, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Core system on (x_plus, y_minus) after the coupled variables are
    substituted away: ``[[-D, S x I], [-Dt (R x I), I]]``."""
    s, r = _check_arguments(fam, s, r)
    m = fam.inner
    nm = fam.arity * m
    big_s = np.kron(s, np.eye(m))
    big_r = np.kron(r, np.eye(m))
    big_d = block_diag(*(g.d for g in fam.members)).astype(complex)
    _, _, _, dt = _tilde_blocks(fam, tol)
    return np.block([[-big_d, big_s], [-(dt @ big_r), np.eye(nm)]])


def dc_charfun(fam: DoubleCosetFamily, s, r, tol: Tolerances = DEFAULT_TOLERANCES) -> CharValue:
    """Two-argument characteristic function on the doubled exposed space.

    Block order: plus coordinates (through the members) first, minus
    coordinates (through the transposed inverses) second.
    """
    s, r = _check_arguments(fam, s, r)
    n, al, m = fam.arity, fam.alpha, fam.inner
    na, nm = n * al, n * m
    big_a = block_diag(*(g.a for g in fam.members)).astype(complex)
    big_b = block_diag(*(g.b for g in fam.members)).astype(complex)
    big_c = block_diag(*(g.c for g in fam.members)).astype(complex)
    at, bt, ct, _ = _tilde_blocks(fam, tol)
    big_r = np.kron(r, np.eye(m))
    core = dc_elimination_matrix(fam, s, r, tol)
    rhs = np.block(
        [
            [big_c, np.zeros((nm, na))],
            [np.zeros((nm, na)), ct],
        ]
    )
    try:
        sol, smin = solve(core, rhs, tol)
    except NearSingular as err:
        raise OnEigensurface(err.sigma_min, "arguments lie on the eigensurface") from None
    x_plus = sol[:nm, :]
    top = np.hstack([big_a, np.zeros((na, na))]) + big_b @ x_plus
    bottom = np.hstack([np.zeros((na, na)), at]) + (bt @ big_r) @ x_plus
    return CharValue(np.vstack([top, bottom]), smin, True)


def dc_charfun_system(fam: DoubleCosetFamily, s, r, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Brute-force evaluation via the full coupled system.

    Every defining equation appears as its own row: the member rows for the
    plus side, the transposed-inverse rows for the minus side, and the two
    coupling constraints.  Unknowns are (q_plus, q_minus, x_plus, x_minus,
    y_plus, y_minus); exposed inputs are probed with basis vectors.
    """
    s, r = _check_arguments(fam, s, r)
    n, al, m = fam.arity, fam.alpha, fam.inner
    na, nm = n * al, n * m
    dim = 2 * na + 4 * nm
    col_qp, col_qm = 0, na
    col_xp, col_xm = 2 * na, 2 * na + nm
    col_yp, col_ym = 2 * na + 2 * nm, 2 * na + 3 * nm
    sys = np.zeros((dim, dim), dtype=complex)
    rhs = np.zeros((dim, 2 * na), dtype=complex)
    tildes = [transpose_inverse(g.matrix, tol) for g in fam.members]
    row = 0
    for j, g in enumerate(fam.members):
        t = tildes[j]
        ta, tb = t[:al, :al], t[:al, al:]
        tc, td = t[al:, :al], t[al:, al:]
        qa = slice(j * al, (j + 1) * al)
        xa = slice(j * m, (j + 1) * m)
        # plus side: q+ = a p+ + b x+ ; y+ = c p+ + d x+
        sys[row : row + al, col_qp + j * al : col_qp + (j + 1) * al] = np.eye(al)
        sys[row : row + al, col_xp + j * m : col_xp + (j + 1) * m] = -g.b
        rhs[row : row + al, qa] = g.a
        row += al
        sys[row : row + m, col_yp + j * m : col_yp + (j + 1) * m] = np.eye(m)
        sys[row : row + m, col_xp + j * m : col_xp + (j + 1) * m] = -g.d
        rhs[row : row + m, qa] = g.c
        row += m
        # minus side through the transposed inverse
        sys[row : row + al, col_qm + j * al : col_qm + (j + 1) * al] = np.eye(al)
        sys[row : row + al, col_xm + j * m : col_xm + (j + 1) * m] = -tb
        rhs[row : row + al, na + j * al : na + (j + 1) * al] = ta
        row += al
        sys[row : row + m, col_ym + j * m : col_ym + (j + 1) * m] = np.eye(m)
        sys[row : row + m, col_xm + j * m : col_xm + (j + 1) * m] = -td
        rhs[row : row + m, na + j * al : na + (j + 1) * al] = tc
        row += m
        del xa
    # coupling: y+ = (S x I) y- and x- = (R x I) x+
    big_s = np.kron(s, np.eye(m))
    big_r = np.kron(r, np.eye(m))
    sys[row : row + nm, col_yp : col_yp + nm] = np.eye(nm)
    sys[row : row + nm, col_ym : col_ym + nm] = -big_s
    row += nm
    sys[row : row + nm, col_xm : col_xm + nm] = np.eye(nm)
    sys[row : row + nm, col_xp : col_xp + nm] = -big_r
    row += nm
    assert row == dim
    smin, smax = sigma_extremes(sys)
    if smax == 0.0 or smin <= tol.surface_guard * smax:
        raise OnEigensurface(smin, "coupled system is singular")
    sol = np.linalg.solve(sys, rhs)
    return sol[: 2 * na, :]


def dc_dilation_check(
    fam: DoubleCosetFamily, s, r, lam, tol: Tolerances = DEFAULT_TOLERANCES
) -> tuple[np.ndarray, np.ndarray]:
    """Both sides of the diagonal dilation identity for two arguments.

    Returns ``(Lam chi(S, R) Lam^{-1}, chi(lam S lam, lam^{-1} R lam^{-1}))``
    where ``Lam`` scales the plus blocks by ``lam_j`` and the minus blocks by
    ``1 / lam_j``.  Rescaling every plus-side variable of slot ``j`` by
    ``lam_j`` and every minus-side variable by ``1 / lam_j`` maps solutions of
    the coupled linear system onto solutions for the congruence-transformed
    arguments, so the two matrices agree wherever both are regular.  (More
    generally, independent plus/minus scalings ``mu``, ``nu`` conjugate the
    transfer matrix by ``diag(mu, nu)`` while sending the arguments to
    ``mu S nu^{-1}`` and ``nu R mu^{-1}``; this is the ``nu = mu^{-1}``
    slice, the one that keeps symmetric ``S`` symmetric.)
    """
    s, r = _check_arguments(fam, s, r)
    lam = np.asarray(lam, dtype=complex).reshape(-1)
    if lam.shape[0] != fam.arity:
        raise ArityMismatch(f"need {fam.arity} scalars, got {lam.shape[0]}")
    if np.any(lam == 0):
        raise ValueError("dilation scalars must be nonzero")
    eye_a = np.eye(fam.alpha)
    lam_big = block_diag(
        np.kron(np.diag(lam), eye_a), np.kron(np.diag(1.0 / lam), eye_a)
    ).astype(complex)
    lam_big_inv = block_diag(
        np.kron(np.diag(1.0 / lam), eye_a), np.kron(np.diag(lam), eye_a)
    ).astype(complex)
    chi = dc_charfun(fam, s, r, tol).value
    left = lam_big @ chi @ lam_big_inv
    scaled_s = lam[:, None] * s * lam[None, :]
    scaled_r = r / lam[:, None] / lam[None, :]
    right = dc_charfun(fam, scaled_s, scaled_r, tol).value
    return left, right


def indefinite_form(arity: int, alpha: int) -> np.ndarray:
    """Hermitian form ``diag(+I, -I)`` on the doubled exposed space."""
    eye = np.eye(arity * alpha)
    return block_diag(eye, -eye).astype(complex)


def skew_form(arity: int, alpha: int) -> np.ndarray:
    """Bilinear skew form ``[[0, I], [-I, 0]]`` on the doubled exposed space."""
    na = arity * alpha
    zero = np.zeros((na, na))
    eye = np.eye(na)
    return np.block([[zero, eye], [-eye, zero]]).astype(complex)


@dataclass(frozen=True)
class FormReport:
    """Form behaviour of one characteristic value.

    ``increase_samples`` holds ``M(q, q) - M(p, p)`` for random probes when
    both arguments lie in the open ball (else None); the defects are filled
    in when the respective hypothesis on (S, R) holds.
    """

    chi_norm: float
    increase_samples: list[float] | None
    pseudo_unitary_defect: float | None
    symplectic_defect: float | None
    transpose_defect: float


def form_checks(
    fam: DoubleCosetFamily,
    s,
    r,
    tol: Tolerances = DEFAULT_TOLERANCES,
    seed: int = 0,
    samples: int = 8,
) -> FormReport:
    """Evaluate the indefinite-form laws of the two-argument function."""
    s, r = _check_arguments(fam, s, r)
    n, al = fam.arity, fam.alpha
    chi = dc_charfun(fam, s, r, tol).value
    jm = indefinite_form(n, al)
    js = skew_form(n, al)
    chi_norm = op_norm(chi)

    increase = None
    if op_norm(s) < 1.0 and op_norm(r) < 1.0:
        rng = np.random.default_rng(seed)
        increase = []
        for _ in range(samples):
            pvec = rng.standard_normal(2 * n * al) + 1j * rng.standard_normal(2 * n * al)
            qvec = chi @ pvec
            m_p = float(np.real(pvec.conj() @ jm @ pvec))
            m_q = float(np.real(qvec.conj() @ jm @ qvec))
            increase.append(m_q - m_p)

    pseudo = None
    if _is_unitary_arg(s, tol) and _is_unitary_arg(r, tol):
        pseudo = op_norm(chi.conj().T @ jm @ chi - jm)

    symplectic = None
    if _is_symmetric(s, tol) and _is_symmetric(r, tol):
        symplectic = op_norm(chi.T @ js @ chi - js)

    chi_t = dc_charfun(fam, s.T, r.T, tol).value
    # Transpose with respect to the skew form, then invert: (js^-1 chi^T js)^-1.
    js_inv = -js
    target = js_inv @ np.linalg.inv(chi.T) @ js
    transpose_defect = op_norm(chi_t - target)

    return FormReport(
        chi_norm=chi_norm,
        increase_samples=increase,
        pseudo_unitary_defect=pseudo,
        symplectic_defect=symplectic,
        transpose_defect=transpose_defect,
    )


def _is_unitary_arg(m, tol: Tolerances) -> bool:
    dim = m.shape[0]
    return bool(np.linalg.norm(m.conj().T @ m - np.eye(dim)) <= tol.rank_tol * max(1.0, dim))


def _is_symmetric(m, tol: Tolerances) -> bool:
    return bool(np.linalg.norm(m - m.T) <= tol.rank_tol * max(1.0, np.linalg.norm(m)))


def adjoint_experiment(
    fam: DoubleCosetFamily, s, r, tol: Tolerances = DEFAULT_TOLERANCES
) -> dict[str, float]:
    """Compare two sign conventions for the indefinite-adjoint reflection law.

    For box(X) = J X* J (adjoint with respect to the signature form) the
    candidate identity is chi(box(S)^{-1}, box(R)^{-1}) = box(chi)^{-1}, read
    either with box on scalars acting as plain conjugate-transpose or with an
    extra sign.  Returns the relative defect of each reading; this is an
    experiment, not an assertion.
    """
    s, r = _check_arguments(fam, s, r)
    chi = dc_charfun(fam, s, r, tol).value
    jm = indefinite_form(fam.arity, fam.alpha)
    target = np.linalg.inv(jm @ chi.conj().T @ jm)
    scale = max(1.0, op_norm(target))
    out = {}
    for label, sign in (("conjugate-transpose", 1.0), ("negated-conjugate-transpose", -1.0)):
        try:
            cand = dc_charfun(
                fam,
                np.linalg.inv(sign * s.conj().T),
                np.linalg.inv(sign * r.conj().T),
                tol,
            ).value
            out[label] = op_norm(cand - target) / scale
        except (OnEigensurface, np.linalg.LinAlgError):
            out[label] = float("nan")
    return out
