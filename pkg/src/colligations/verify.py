"""Seeded property-check suites behind the ``verify`` subcommand.

Each suite draws random instances from a seeded generator, measures a defect
for one structural law, and compares it against an explicit budget.  A report
lists the trials that exceeded their budget together with the seed that
reproduces them.  Two kinds of suite deviate from the plain pattern:

* negative controls expect the measured identity to *fail* somewhere and
  report a problem only when it held everywhere;
* experiments record observations (in the per-trial detail strings and the
  ``max_defect`` field) without ever failing.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.linalg import block_diag

from .errors import BadSplit, NearPole, NearSingular, OnEigensurface
from .linalg import (
    DEFAULT_TOLERANCES,
    Tolerances,
    haar_orthogonal,
    haar_unitary,
    op_norm,
    rel_defect,
    sample_ball,
    sample_disc,
    sample_invertible,
    sigma_extremes,
    unitarity_defect,
)
from .colligation import (
    Colligation,
    charfun_z,
    conjugate_inner,
    equivalent_probe,
    pad,
    product,
    random_colligation,
    spectra_match,
    unit_spectrum,
)
from .multi import (
    MultiColligation,
    diag_conjugation,
    eigensurface_det,
    eigensurface_sigma,
    elimination_matrix,
    multi_charfun,
    multi_charfun_system,
    multi_conjugate,
    multi_product,
    random_multi,
)
from .relations import (
    ConstraintSubspace,
    LinearRelation,
    char_relation,
    compose_relations,
    form_on_subspace,
    graph_relation,
    identity_relation,
    on_eigensurface,
    signature_form,
    subspace_distance,
)
from .conjugacy import (
    random_tri,
    tri_charfun,
    tri_charfun_system,
    tri_conjugate,
    tri_elimination_matrix,
    tri_product,
)
from .doublecoset import (
    adjoint_experiment,
    dc_charfun,
    dc_charfun_system,
    dc_dilation_check,
    dc_elimination_matrix,
    dc_equivalent,
    dc_product,
    form_checks,
    indefinite_form,
    random_family,
    skew_form,
)

__all__ = [
    "CONTAINMENT_TOL",
    "CONTROL_THRESHOLD",
    "EXPANSION_SLACK",
    "GRAPH_TOL",
    "GROWTH_FACTOR",
    "RATIONAL_FIT_TOL",
    "Dims",
    "Suite",
    "SuiteReport",
    "TrialResult",
    "list_suites",
    "run_suite",
]

# Absolute thresholds shared with the acceptance tests.  These are pinned --
# they do not move with the tolerance profile.
EXPANSION_SLACK = 1e-8  # singular values may dip this far below 1
RATIONAL_FIT_TOL = 1e-6  # held-out error of a degree-true rational fit
CONTAINMENT_TOL = 1e-7  # residual of a subspace containment
GRAPH_TOL = 1e-9  # distance between two routes to one subspace
GROWTH_FACTOR = 10.0  # required blow-up over three dyadic steps
CONTROL_THRESHOLD = 1e-3  # a negative control must exceed this somewhere


@dataclass(frozen=True)
class Dims:
    """Upper bounds for randomly drawn dimensions (suites clamp further)."""

    max_alpha: int = 3
    max_inner: int = 4
    max_arity: int = 3


@dataclass(frozen=True)
class TrialResult:
    defect: float
    budget: float
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.defect <= self.budget


@dataclass(frozen=True)
class Suite:
    name: str
    describe: str
    run_trial: Callable[[np.random.Generator, Dims, Tolerances], TrialResult]
    # Controls and experiments judge the trial list as a whole; the callable
    # returns the failure records (empty meaning the suite passed).
    aggregate: Callable[[list[TrialResult], int], list[dict]] | None = None


@dataclass
class SuiteReport:
    suite: str
    trials: int
    failures: list[dict] = field(default_factory=list)
    max_defect: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_object(self) -> dict:
        return {
            "suite": self.suite,
            "trials": self.trials,
            "failures": self.failures,
            "max_defect": self.max_defect,
        }


_SUITES: dict[str, Suite] = {}


def _suite(name: str, describe: str, aggregate=None):
    def register(fn):
        _SUITES[name] = Suite(name, describe, fn, aggregate)
        return fn

    return register


def list_suites() -> list[Suite]:
    """All registered suites, sorted by name."""
    return [_SUITES[name] for name in sorted(_SUITES)]


def run_suite(
    name: str,
    trials: int = 200,
    seed: int = 0,
    dims: Dims | None = None,
    tol: Tolerances = DEFAULT_TOLERANCES,
    threads: int | None = None,
) -> SuiteReport:
    """Run one suite; trial ``t`` draws from a generator seeded ``seed + t``.

    Results do not depend on ``threads``; it only sets the worker count.
    """
    try:
        suite = _SUITES[name]
    except KeyError:
        known = ", ".join(sorted(_SUITES))
        raise ValueError(f"unknown suite {name!r} (known: {known})") from None
    if trials < 1:
        raise ValueError(f"trials must be positive, got {trials}")
    bounds = dims if dims is not None else Dims()

    def one(trial: int) -> TrialResult:
        rng = np.random.default_rng(seed + trial)
        return suite.run_trial(rng, bounds, tol)

    if threads is not None and threads > 1:
        with ThreadPoolExecutor(max_workers=min(threads, trials)) as pool:
            results = list(pool.map(one, range(trials)))
    else:
        results = [one(t) for t in range(trials)]

    if suite.aggregate is not None:
        failures = suite.aggregate(results, seed)
    else:
        failures = [
            {
                "trial": t,
                "seed": seed + t,
                "defect": r.defect,
                "budget": r.budget,
                "detail": r.detail,
            }
            for t, r in enumerate(results)
            if not r.passed
        ]
    max_defect = max((r.defect for r in results), default=0.0)
    return SuiteReport(suite=name, trials=trials, failures=failures, max_defect=max_defect)


# --- shared drawing utilities -------------------------------------------------


class _Retry(Exception):
    """Drawn instance was unusable (near a singular locus); draw again."""


_ATTEMPTS = 64
_SIGMA_FLOOR = 1e-3  # relative smallest singular value for "comfortably regular"


def _retrying(draw):
    for _ in range(_ATTEMPTS):
        try:
            return draw()
        except _Retry:
            continue
    raise RuntimeError("exhausted retries while drawing a regular instance")


def _draw(rng: np.random.Generator, lo: int, hi: int) -> int:
    return int(rng.integers(lo, hi + 1))


def _complex_gauss(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    g = rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))
    return g / math.sqrt(2.0)


def _budget(tol: Tolerances) -> float:
    # Defects below are already normalized by the operand norms, so the
    # budget is a plain multiple of the residual tolerance.
    return 10.0 * tol.residual_tol


def _require_regular(system: np.ndarray) -> None:
    smin, smax = sigma_extremes(system)
    if smax == 0.0 or smin < _SIGMA_FLOOR * smax:
        raise _Retry


def _boundary_point(rng, col, tol):
    """A unit-circle point where the colligation is comfortably regular."""

    def draw():
        z = complex(np.exp(1j * rng.uniform(0.0, 2.0 * np.pi)))
        _require_regular(np.eye(col.inner, dtype=complex) - z * col.d)
        return z, charfun_z(col, z, tol)

    return _retrying(draw)


def _regular_multi_arg(rng, mc, tol, radius=None, extra=()):
    """An argument at which every listed family is comfortably regular."""

    def draw():
        n = mc.arity
        s = sample_ball(rng, n, radius) if radius is not None else _complex_gauss(rng, n, n)
        for fam in (mc, *extra):
            _require_regular(elimination_matrix(fam, s))
        return s

    return _retrying(draw)


def _regular_tri_arg(rng, tc, tol, radius=None, extra=()):
    def draw():
        n = tc.slots
        s = sample_ball(rng, n, radius) if radius is not None else _complex_gauss(rng, n, n)
        for fam in (tc, *extra):
            _require_regular(tri_elimination_matrix(fam, s))
        return s

    return _retrying(draw)


def _symmetric_ball(rng, n: int) -> np.ndarray:
    g = _complex_gauss(rng, n, n)
    sym = (g + g.T) / 2.0
    top = op_norm(sym)
    if top == 0.0:
        raise _Retry
    return sym * (rng.uniform(0.3, 0.9) / top)


def _regular_dc_args(rng, fam, tol, radius=None, extra=(), symmetric=False, unitary=False):
    def draw():
        n = fam.arity
        if unitary:
            s, r = haar_unitary(n, rng), haar_unitary(n, rng)
        elif symmetric:
            s, r = _symmetric_ball(rng, n), _symmetric_ball(rng, n)
        elif radius is not None:
            s, r = sample_ball(rng, n, radius), sample_ball(rng, n, radius)
        else:
            s, r = _complex_gauss(rng, n, n), _complex_gauss(rng, n, n)
        for f in (fam, *extra):
            _require_regular(dc_elimination_matrix(f, s, r, tol))
        return s, r

    return _retrying(draw)


_PHASE_GRID = 12


def _phase_colligation(rng, alpha, indices, tol):
    """Decoupled colligation whose inner block has the given grid phases.

    ``indices`` selects points ``exp(2 pi i k / 12)`` on the unit circle,
    repeats giving multiplicity; the inner block is a conjugated diagonal so
    the spectrum is planted exactly.
    """
    phases = np.exp(2j * np.pi * np.asarray(indices, dtype=float) / _PHASE_GRID)
    u = haar_unitary(len(indices), rng)
    inner = u @ np.diag(phases) @ u.conj().T
    return Colligation(block_diag(haar_unitary(alpha, rng), inner), alpha, tol)


def _expected_phase_spectrum(*index_lists) -> list[tuple[complex, int]]:
    counts: dict[int, int] = {}
    for indices in index_lists:
        for k in indices:
            counts[k % _PHASE_GRID] = counts.get(k % _PHASE_GRID, 0) + 1
    return [
        (complex(np.exp(2j * np.pi * k / _PHASE_GRID)), mult)
        for k, mult in sorted(counts.items())
        if k != 0  # the fixed phase 1 is excluded from the unit spectrum
    ]


def _blaschke_colligation(alpha, lam, tol):
    """Colligation whose transfer function is ``diag(b, 1, ..., 1)`` with
    ``b(z) = (z - conj(lam)) / (1 - lam z)``: a single planted inner pole."""
    s = math.sqrt(1.0 - abs(lam) ** 2)
    m = np.eye(alpha + 1, dtype=complex)
    m[0, 0] = -np.conj(lam)
    m[0, alpha] = s
    m[alpha, 0] = s
    m[alpha, alpha] = lam
    return Colligation(m, alpha, tol)


def _pole_ray_points(lam) -> tuple[list[complex], list[float]]:
    """Four points marching toward the pole of the planted transfer function.

    Starts on the unit circle and halves the distance to the pole three
    times; returns the points and the closed-form scalar magnitudes."""
    rho = 1.0 / abs(lam)
    direction = complex(np.exp(-1j * np.angle(lam)))
    radii = [rho - (rho - 1.0) / 2**k for k in range(4)]
    points = [r * direction for r in radii]
    model = [(r - abs(lam)) / (abs(lam) * (rho - r)) for r in radii]
    return points, model


def _rational_line_defect(rng, evaluate, degree):
    """Worst held-out error of a degree-bounded rational fit along a line.

    ``evaluate(t)`` returns a sample or None where the function is singular.
    Returns None when too few samples survive; the caller then retries with a
    fresh line.
    """
    count = 2 * (degree + 1) + 8
    offset = rng.uniform(0.0, 1.0)
    train = 0.7 * np.exp(2j * np.pi * (np.arange(count) + offset) / count)
    rows = []
    for t in train:
        f = evaluate(t)
        if f is None:
            continue
        powers = t ** np.arange(degree + 1)
        rows.append(np.concatenate([powers, -f * powers]) / max(1.0, abs(f)))
    if len(rows) < 2 * (degree + 1) + 4:
        return None
    _, _, vh = np.linalg.svd(np.array(rows))
    coeffs = vh[-1].conj()
    num, den = coeffs[: degree + 1], coeffs[degree + 1 :]
    den_scale = float(np.abs(npoly.polyval(train, den)).max())
    if den_scale == 0.0:
        return None
    holdout = 0.55 * np.exp(2j * np.pi * (np.arange(10) + rng.uniform(0.0, 1.0)) / 10)
    worst, used = 0.0, 0
    for t in holdout:
        f = evaluate(t)
        q = complex(npoly.polyval(t, den))
        if f is None or abs(q) < 1e-8 * den_scale:
            continue
        p = complex(npoly.polyval(t, num))
        worst = max(worst, abs(p / q - f) / max(1.0, abs(f)))
        used += 1
    return worst if used >= 5 else None


def _containment_residual(big, small) -> float:
    """How far the small relation sticks out of the big one (0 if inside)."""
    if small.dim == 0:
        return 0.0
    inside = big.basis @ (big.basis.conj().T @ small.basis)
    return op_norm(small.basis - inside)


def _expect_some_failure(threshold: float, message: str):
    """Aggregate for negative controls: the law must break somewhere."""

    def aggregate(results: list[TrialResult], seed: int) -> list[dict]:
        worst = max((r.defect for r in results), default=0.0)
        if worst >= threshold:
            return []
        return [
            {
                "trial": -1,
                "seed": seed,
                "defect": worst,
                "budget": threshold,
                "detail": message,
            }
        ]

    return aggregate


def _observational(results: list[TrialResult], seed: int) -> list[dict]:
    return []


# --- one-variable colligations ------------------------------------------------


@_suite("product-welldefined", "the product respects inner equivalence of both factors")
def _product_welldefined(rng, dims, tol):
    alpha = _draw(rng, 1, dims.max_alpha)
    mx, my = _draw(rng, 1, dims.max_inner), _draw(rng, 1, dims.max_inner)
    x = random_colligation(alpha, mx, rng)
    y = random_colligation(alpha, my, rng)
    u, v = haar_unitary(mx, rng), haar_unitary(my, rng)
    direct = product(conjugate_inner(x, u, tol), conjugate_inner(y, v, tol), tol)
    expected = conjugate_inner(product(x, y, tol), block_diag(u, v), tol)
    defect = rel_defect(direct.matrix, expected.matrix)
    if not equivalent_probe(direct, expected, tol=tol):
        defect = max(defect, 1.0)
    return TrialResult(defect, _budget(tol))


@_suite("product-associative", "the triple product agrees bracketed either way")
def _product_associative(rng, dims, tol):
    alpha = _draw(rng, 1, dims.max_alpha)
    cols = [random_colligation(alpha, _draw(rng, 1, dims.max_inner), rng) for _ in range(3)]
    left = product(product(cols[0], cols[1], tol), cols[2], tol)
    right = product(cols[0], product(cols[1], cols[2], tol), tol)
    return TrialResult(rel_defect(left.matrix, right.matrix), _budget(tol))


@_suite("charfun-multiplicative", "the transfer function of a product is the product of transfer functions")
def _charfun_multiplicative(rng, dims, tol):
    alpha = _draw(rng, 1, dims.max_alpha)
    x = random_colligation(alpha, _draw(rng, 1, dims.max_inner), rng)
    y = random_colligation(alpha, _draw(rng, 1, dims.max_inner), rng)
    prod = product(x, y, tol)
    worst = 0.0
    for _ in range(3):
        z = sample_disc(rng, 0.95)  # no poles inside the open disc
        vx = charfun_z(x, z, tol).value
        vy = charfun_z(y, z, tol).value
        vp = charfun_z(prod, z, tol).value
        worst = max(worst, rel_defect(vp, vx @ vy))
    return TrialResult(worst, _budget(tol))


@_suite("charfun-contractive", "transfer values inside the open disc are contractions")
def _charfun_contractive(rng, dims, tol):
    col = random_colligation(_draw(rng, 1, dims.max_alpha), _draw(rng, 1, dims.max_inner), rng)
    worst = 0.0
    for _ in range(4):
        z = sample_disc(rng, 0.999)
        worst = max(worst, op_norm(charfun_z(col, z, tol).value) - 1.0)
    return TrialResult(max(worst, 0.0), EXPANSION_SLACK)


@_suite("charfun-boundary-unitary", "transfer values on the unit circle are unitary")
def _charfun_boundary_unitary(rng, dims, tol):
    col = random_colligation(_draw(rng, 1, dims.max_alpha), _draw(rng, 1, dims.max_inner), rng)
    _, value = _boundary_point(rng, col, tol)
    return TrialResult(unitarity_defect(value.value), _budget(tol))


@_suite("charfun-reflection", "reflecting the point across the circle inverts the adjoint value")
def _charfun_reflection(rng, dims, tol):
    col = random_colligation(_draw(rng, 1, dims.max_alpha), _draw(rng, 1, dims.max_inner), rng)

    def draw():
        radius = rng.uniform(0.35, 0.8)
        z = radius * np.exp(1j * rng.uniform(0.0, 2.0 * np.pi))
        inner = charfun_z(col, z, tol).value
        _require_regular(inner)
        try:
            outer = charfun_z(col, 1.0 / np.conj(z), tol).value
        except NearPole:
            raise _Retry from None
        return inner, outer

    inner, outer = _retrying(draw)
    target = np.linalg.inv(inner.conj().T)
    return TrialResult(rel_defect(outer, target), _budget(tol))


@_suite("charfun-conjugation-invariant", "inner conjugation leaves the transfer function unchanged")
def _charfun_conjugation_invariant(rng, dims, tol):
    inner = _draw(rng, 1, dims.max_inner)
    col = random_colligation(_draw(rng, 1, dims.max_alpha), inner, rng)
    other = conjugate_inner(col, haar_unitary(inner, rng), tol)
    worst = 0.0
    for _ in range(3):
        z = sample_disc(rng, 0.95)
        worst = max(worst, rel_defect(charfun_z(col, z, tol).value, charfun_z(other, z, tol).value))
    return TrialResult(worst, _budget(tol))


@_suite("spectrum-union", "unit spectra of factors merge into the product's unit spectrum")
def _spectrum_union(rng, dims, tol):
    alpha = _draw(rng, 1, dims.max_alpha)
    # Plant exact grid phases; sometimes include the excluded fixed phase 1.
    ks_x = [_draw(rng, 1, _PHASE_GRID - 1) for _ in range(_draw(rng, 1, 3))]
    if rng.uniform() < 0.5:
        ks_x.append(0)
    ks_y = [_draw(rng, 1, _PHASE_GRID - 1) for _ in range(_draw(rng, 1, 2))]
    x = product(
        _phase_colligation(rng, alpha, ks_x, tol),
        random_colligation(alpha, _draw(rng, 1, 3), rng),
        tol,
    )
    y = _phase_colligation(rng, alpha, ks_y, tol)
    got = unit_spectrum(product(x, y, tol), tol)
    expected = _expected_phase_spectrum(ks_x, ks_y)
    ok = spectra_match(got, expected, 4.0 * tol.rank_tol)
    return TrialResult(0.0 if ok else 1.0, 0.5, "" if ok else f"got {got}, expected {expected}")


@_suite("pole-witness", "a planted inner eigenvalue forces the closed-form blow-up toward its pole")
def _pole_witness(rng, dims, tol):
    alpha = _draw(rng, 1, dims.max_alpha)
    lam = rng.uniform(0.3, 0.899) * np.exp(1j * rng.uniform(0.0, 2.0 * np.pi))
    col = _blaschke_colligation(alpha, lam, tol)
    points, model = _pole_ray_points(lam)
    measured = [op_norm(charfun_z(col, z, tol).value) for z in points]
    defect = max(abs(m - c) / c for m, c in zip(measured, model))
    ratio = measured[3] / measured[0]
    if ratio < GROWTH_FACTOR:
        defect = max(defect, 1.0)
    return TrialResult(defect, _budget(tol), f"growth {ratio:.2f}x over three halvings")


@_suite("pole-growth", "the blow-up survives multiplication by a random factor")
def _pole_growth(rng, dims, tol):
    alpha = _draw(rng, 1, dims.max_alpha)
    inner = _draw(rng, 1, dims.max_inner)
    lam = rng.uniform(0.3, 0.899) * np.exp(1j * rng.uniform(0.0, 2.0 * np.pi))
    planted = _blaschke_colligation(alpha, lam, tol)
    points, _ = _pole_ray_points(lam)

    def draw():
        prod = product(random_colligation(alpha, inner, rng), planted, tol)
        try:
            return [op_norm(charfun_z(prod, z, tol).value) for z in points]
        except NearPole:
            raise _Retry from None

    measured = _retrying(draw)
    ratio = measured[3] / measured[0]
    defect = max(0.0, (GROWTH_FACTOR - ratio) / GROWTH_FACTOR)
    return TrialResult(defect, 1e-9, f"growth {ratio:.2f}x over three halvings")


@_suite("padding-invariance", "padding the inner space changes neither transfer nor unit spectrum")
def _padding_invariance(rng, dims, tol):
    alpha = _draw(rng, 1, dims.max_alpha)
    col = random_colligation(alpha, _draw(rng, 1, dims.max_inner), rng)
    padded = pad(col, _draw(rng, 1, 2))
    worst = 0.0
    for _ in range(3):
        z = sample_disc(rng, 0.95)
        worst = max(worst, rel_defect(charfun_z(col, z, tol).value, charfun_z(padded, z, tol).value))
    planted = _phase_colligation(rng, alpha, [_draw(rng, 1, _PHASE_GRID - 1) for _ in range(2)], tol)
    padded_planted = pad(planted, _draw(rng, 1, 2))
    ok = spectra_match(
        unit_spectrum(padded_planted, tol), unit_spectrum(planted, tol), 4.0 * tol.rank_tol
    )
    return TrialResult(max(worst, 0.0 if ok else 1.0), _budget(tol))


# --- several-variable families ------------------------------------------------


def _multi_dims(rng, dims) -> tuple[int, int, int]:
    return (
        _draw(rng, 1, min(3, dims.max_alpha)),
        _draw(rng, 1, min(4, dims.max_inner)),
        _draw(rng, 1, min(3, dims.max_arity)),
    )


@_suite("multi-oracle", "the several-variable value matches the interleaved full-system solve")
def _multi_oracle(rng, dims, tol):
    alpha, inner, arity = _multi_dims(rng, dims)
    mc = random_multi(alpha, inner, arity, rng)
    s = _regular_multi_arg(rng, mc, tol)
    fast = multi_charfun(mc, s, tol).value
    slow = multi_charfun_system(mc, s, tol)
    return TrialResult(rel_defect(fast, slow), _budget(tol))


@_suite("multi-rational", "entries are rational of the sharp degree along a generic line")
def _multi_rational(rng, dims, tol):
    alpha, inner, arity = _multi_dims(rng, dims)
    mc = random_multi(alpha, inner, arity, rng)
    degree = arity * inner
    row = _draw(rng, 0, arity * alpha - 1)
    col = _draw(rng, 0, arity * alpha - 1)

    def attempt():
        base = _complex_gauss(rng, arity, arity)
        direction = _complex_gauss(rng, arity, arity)
        direction /= max(op_norm(direction), 1e-300)

        def evaluate(t):
            try:
                return complex(multi_charfun(mc, base + t * direction, tol).value[row, col])
            except OnEigensurface:
                return None

        worst = _rational_line_defect(rng, evaluate, degree)
        if worst is None:
            raise _Retry
        return worst

    return TrialResult(_retrying(attempt), RATIONAL_FIT_TOL)


@_suite("multi-conjugation-invariant", "shared inner conjugation leaves the several-variable value unchanged")
def _multi_conjugation_invariant(rng, dims, tol):
    alpha, inner, arity = _multi_dims(rng, dims)
    mc = random_multi(alpha, inner, arity, rng)
    other = multi_conjugate(mc, haar_unitary(inner, rng), tol)
    s = _regular_multi_arg(rng, mc, tol, extra=(other,))
    defect = rel_defect(multi_charfun(mc, s, tol).value, multi_charfun(other, s, tol).value)
    return TrialResult(defect, _budget(tol))


@_suite("multi-multiplicative", "slotwise products multiply the several-variable values")
def _multi_multiplicative(rng, dims, tol):
    alpha, _, arity = _multi_dims(rng, dims)
    x = random_multi(alpha, _draw(rng, 1, min(4, dims.max_inner)), arity, rng)
    y = random_multi(alpha, _draw(rng, 1, min(4, dims.max_inner)), arity, rng)
    prod = multi_product(x, y, tol)
    s = _regular_multi_arg(rng, prod, tol, extra=(x, y))
    vx = multi_charfun(x, s, tol).value
    vy = multi_charfun(y, s, tol).value
    vp = multi_charfun(prod, s, tol).value
    return TrialResult(rel_defect(vp, vx @ vy), _budget(tol))


@_suite("multi-expanding", "values on the closed argument ball expand in every direction")
def _multi_expanding(rng, dims, tol):
    alpha, inner, arity = _multi_dims(rng, dims)
    mc = random_multi(alpha, inner, arity, rng)
    s = _regular_multi_arg(rng, mc, tol, radius=0.95)
    smin, _ = sigma_extremes(multi_charfun(mc, s, tol).value)
    return TrialResult(max(0.0, 1.0 - smin), EXPANSION_SLACK)


@_suite("multi-boundary-unitary", "unitary arguments give unitary several-variable values")
def _multi_boundary_unitary(rng, dims, tol):
    alpha, inner, arity = _multi_dims(rng, dims)
    mc = random_multi(alpha, inner, arity, rng)

    def draw():
        s = haar_unitary(arity, rng)
        _require_regular(elimination_matrix(mc, s))
        return s

    s = _retrying(draw)
    return TrialResult(unitarity_defect(multi_charfun(mc, s, tol).value), _budget(tol))


@_suite("multi-reflection", "inverting the adjoint argument inverts the adjoint value")
def _multi_reflection(rng, dims, tol):
    alpha, inner, arity = _multi_dims(rng, dims)
    mc = random_multi(alpha, inner, arity, rng)

    def draw():
        s = sample_invertible(rng, arity)
        _require_regular(s)
        reflected = np.linalg.inv(s.conj().T)
        _require_regular(elimination_matrix(mc, s))
        _require_regular(elimination_matrix(mc, reflected))
        value = multi_charfun(mc, s, tol).value
        _require_regular(value)
        return value, multi_charfun(mc, reflected, tol).value

    value, reflected_value = _retrying(draw)
    target = np.linalg.inv(value.conj().T)
    return TrialResult(rel_defect(reflected_value, target), _budget(tol))


@_suite("multi-dilation", "diagonal dilations conjugate the several-variable value")
def _multi_dilation(rng, dims, tol):
    alpha, inner, arity = _multi_dims(rng, dims)
    mc = random_multi(alpha, inner, arity, rng)

    def draw():
        s = _regular_multi_arg(rng, mc, tol)
        lam = rng.uniform(0.5, 2.0, size=arity) * np.exp(1j * rng.uniform(0.0, 2.0 * np.pi, size=arity))
        try:
            return diag_conjugation(mc, s, lam, tol)
        except OnEigensurface:
            raise _Retry from None

    left, right = _retrying(draw)
    return TrialResult(rel_defect(left, right), _budget(tol))


@_suite(
    "multi-boundary-inverse-experiment",
    "observation: how far values drift from isometry on the non-unitary sphere",
    aggregate=_observational,
)
def _multi_boundary_inverse_experiment(rng, dims, tol):
    alpha, inner, _ = _multi_dims(rng, dims)
    arity = _draw(rng, 2, max(2, min(3, dims.max_arity)))
    mc = random_multi(alpha, inner, arity, rng)

    def draw():
        g = _complex_gauss(rng, arity, arity)
        top = op_norm(g)
        if top == 0.0:
            raise _Retry
        s = g / top  # operator norm exactly 1, but not unitary
        _require_regular(elimination_matrix(mc, s))
        return multi_charfun(mc, s, tol).value

    value = _retrying(draw)
    smin, _ = sigma_extremes(value)
    detail = f"smin(value)-1={smin - 1.0:+.3e} unitarity={unitarity_defect(value):.3e}"
    return TrialResult(max(0.0, 1.0 - smin), EXPANSION_SLACK, detail)


@_suite("surface-consistency", "determinant and singular-value surface tests agree with evaluation")
def _surface_consistency(rng, dims, tol):
    alpha = _draw(rng, 1, min(3, dims.max_alpha))
    inner = _draw(rng, 1, 2)
    arity = _draw(rng, 1, 2)
    mc = random_multi(alpha, inner, arity, rng)
    nm = arity * inner

    def draw():
        s = _complex_gauss(rng, arity, arity)
        smin, smax = eigensurface_sigma(mc, s)
        if smax == 0.0 or smin < 0.05 * smax:
            raise _Retry
        return s, smin, smax

    s, smin, smax = _retrying(draw)
    problems = []
    if abs(eigensurface_det(mc, s)) <= tol.surface_guard * smax**nm:
        problems.append("generic point flagged by the determinant test")
    try:
        multi_charfun(mc, s, tol)
    except OnEigensurface:
        problems.append("generic point rejected by evaluation")
    # A scalar matrix built from an inner eigenvalue lies on the surface.
    member = _draw(rng, 0, arity - 1)
    eigenvalues = np.linalg.eigvals(mc.members[member].d)
    mu = eigenvalues[_draw(rng, 0, inner - 1)]
    on = np.eye(arity, dtype=complex) * mu
    smin_on, smax_on = eigensurface_sigma(mc, on)
    if not (smax_on == 0.0 or smin_on <= tol.surface_guard * smax_on):
        problems.append("planted point not flagged by the singular-value test")
    if abs(eigensurface_det(mc, on)) > tol.surface_guard * max(smax_on, 1.0) ** nm:
        problems.append("planted point not flagged by the determinant test")
    try:
        multi_charfun(mc, on, tol)
        problems.append("planted point accepted by evaluation")
    except OnEigensurface:
        pass
    return TrialResult(0.0 if not problems else 1.0, 0.5, "; ".join(problems))


@_suite("single-vs-multi", "a one-member family evaluates like the one-variable transfer at the inverse point")
def _single_vs_multi(rng, dims, tol):
    alpha = _draw(rng, 1, dims.max_alpha)
    inner = _draw(rng, 1, dims.max_inner)
    col = random_colligation(alpha, inner, rng)
    mc = MultiColligation([col])

    def draw():
        s = rng.uniform(0.4, 2.5) * np.exp(1j * rng.uniform(0.0, 2.0 * np.pi))
        _require_regular(elimination_matrix(mc, np.array([[s]])))
        try:
            single = charfun_z(col, 1.0 / s, tol).value
        except NearPole:
            raise _Retry from None
        return np.array([[s]]), single

    s, single = _retrying(draw)
    return TrialResult(rel_defect(multi_charfun(mc, s, tol).value, single), _budget(tol))


# --- relation-valued arguments ------------------------------------------------


def _relation_dims(rng, dims) -> tuple[int, int, int]:
    return (
        _draw(rng, 1, min(2, dims.max_alpha)),
        _draw(rng, 1, min(3, dims.max_inner)),
        _draw(rng, 1, min(3, dims.max_arity)),
    )


@_suite("relation-compose", "relation composition matches matrix composition on graphs")
def _relation_compose(rng, dims, tol):
    dv, dm, dw = (_draw(rng, 1, 3) for _ in range(3))
    a = _complex_gauss(rng, dm, dv)
    b = _complex_gauss(rng, dw, dm)
    composed = compose_relations(graph_relation(a, tol), graph_relation(b, tol), tol)
    defect = subspace_distance(composed, graph_relation(b @ a, tol))
    # Composing with an identity graph must not move a general relation.
    k = _draw(rng, 1, dv + dm)
    basis = np.linalg.qr(_complex_gauss(rng, dv + dm, k))[0]
    rel = LinearRelation(dv, dm, basis, tol)
    neutral = compose_relations(rel, identity_relation(dm, tol), tol)
    defect = max(defect, subspace_distance(neutral, rel))
    return TrialResult(defect, GRAPH_TOL)


@_suite("relation-containment", "the composed factor relations sit inside the product relation")
def _relation_containment(rng, dims, tol):
    alpha, _, arity = _relation_dims(rng, dims)
    first = random_multi(alpha, _draw(rng, 1, 3), arity, rng)
    second = random_multi(alpha, _draw(rng, 1, 3), arity, rng)
    prod = multi_product(first, second, tol)

    def draw():
        try:
            constraint = ConstraintSubspace.from_equations(
                _complex_gauss(rng, arity, arity), _complex_gauss(rng, arity, arity), tol
            )
        except BadSplit:
            raise _Retry from None
        for fam in (prod, first, second):
            if on_eigensurface(fam, constraint, tol):
                raise _Retry
        return constraint

    constraint = _retrying(draw)
    big = char_relation(prod, constraint, tol)
    small = compose_relations(
        char_relation(second, constraint, tol), char_relation(first, constraint, tol), tol
    )
    detail = f"dims big={big.dim} small={small.dim}"
    return TrialResult(_containment_residual(big, small), CONTAINMENT_TOL, detail)


@_suite("relation-containment-surface", "the containment persists on the eigensurface")
def _relation_containment_surface(rng, dims, tol):
    alpha, _, arity = _relation_dims(rng, dims)
    first = random_multi(alpha, _draw(rng, 1, 3), arity, rng)
    second = random_multi(alpha, _draw(rng, 1, 3), arity, rng)
    prod = multi_product(first, second, tol)

    def draw():
        member = _draw(rng, 0, arity - 1)
        d = prod.members[member].d
        values, vectors = np.linalg.eig(d)
        idx = _draw(rng, 0, len(values) - 1)
        mu, xi = values[idx], vectors[:, idx]
        if np.linalg.norm(d @ xi - mu * xi) > 1e-10 * max(1.0, np.linalg.norm(d)):
            raise _Retry
        sigma = _complex_gauss(rng, arity, arity)
        s = _complex_gauss(rng, arity, arity)
        s[:, member] = -mu * sigma[:, member]
        try:
            constraint = ConstraintSubspace.from_equations(s, sigma, tol)
        except BadSplit:
            raise _Retry from None
        if not on_eigensurface(prod, constraint, tol):
            raise _Retry
        return constraint

    constraint = _retrying(draw)
    big = char_relation(prod, constraint, tol)
    small = compose_relations(
        char_relation(second, constraint, tol), char_relation(first, constraint, tol), tol
    )
    detail = f"dims big={big.dim} small={small.dim}"
    return TrialResult(_containment_residual(big, small), CONTAINMENT_TOL, detail)


@_suite("relation-definiteness", "a definite constraint subspace forces the opposite definiteness downstream")
def _relation_definiteness(rng, dims, tol):
    alpha = _draw(rng, 1, min(2, dims.max_alpha))
    arity = _draw(rng, 1, min(3, dims.max_arity))
    # Strictness of the downstream definiteness needs an inner space at least
    # as large as the exposed one.
    inner = _draw(rng, alpha, max(alpha, min(3, dims.max_inner)))
    mc = random_multi(alpha, inner, arity, rng)

    def draw():
        s = sample_ball(rng, arity, 0.9)
        constraint = ConstraintSubspace.graph_of(s, tol)
        relation = char_relation(mc, constraint, tol)
        if relation.dim != arity * alpha:
            raise _Retry
        return constraint, relation

    constraint, relation = _retrying(draw)
    problems = []
    upstairs = form_on_subspace(signature_form(arity, arity), constraint.basis(), tol)
    if upstairs != "positive-definite":
        problems.append(f"constraint side classified {upstairs}")
    na = arity * alpha
    downstairs = form_on_subspace(signature_form(na, na), relation.basis, tol)
    if downstairs != "negative-definite":
        problems.append(f"relation side classified {downstairs}")
    return TrialResult(0.0 if not problems else 1.0, 0.5, "; ".join(problems))


@_suite("relation-charfun-consistency", "off the surface the relation is the graph of the evaluated function")
def _relation_charfun_consistency(rng, dims, tol):
    alpha, inner, arity = _relation_dims(rng, dims)
    mc = random_multi(alpha, inner, arity, rng)
    s = _regular_multi_arg(rng, mc, tol)
    relation = char_relation(mc, ConstraintSubspace.graph_of(s, tol), tol)
    graph = graph_relation(multi_charfun(mc, s, tol).value, tol)
    defect = subspace_distance(relation, graph)
    # The equation and basis presentations must cut out the same relation.
    rebuilt = ConstraintSubspace.from_basis(ConstraintSubspace.graph_of(s, tol).basis(), tol)
    defect = max(defect, subspace_distance(relation, char_relation(mc, rebuilt, tol)))
    return TrialResult(defect, GRAPH_TOL)


# --- coupled-slot families ----------------------------------------------------


def _tri_dims(rng, dims) -> tuple[int, int, int]:
    alpha = _draw(rng, 1, min(3, dims.max_alpha))
    slot_dim = _draw(rng, 1, min(3, dims.max_inner))
    slots = 2 if rng.uniform() < 0.7 or dims.max_arity < 3 else 3
    return alpha, slot_dim, slots


@_suite("conjugacy-oracle", "the coupled-slot value matches the interleaved full-system solve")
def _conjugacy_oracle(rng, dims, tol):
    alpha, slot_dim, slots = _tri_dims(rng, dims)
    tc = random_tri(alpha, slot_dim, slots, rng)
    s = _regular_tri_arg(rng, tc, tol)
    fast = tri_charfun(tc, s, tol).value
    slow = tri_charfun_system(tc, s, tol)
    return TrialResult(rel_defect(fast, slow), _budget(tol))


@_suite("conjugacy-multiplicative", "coupled-slot products multiply the transfer values")
def _conjugacy_multiplicative(rng, dims, tol):
    alpha, _, slots = _tri_dims(rng, dims)
    x = random_tri(alpha, _draw(rng, 1, min(3, dims.max_inner)), slots, rng)
    y = random_tri(alpha, _draw(rng, 1, min(3, dims.max_inner)), slots, rng)
    prod = tri_product(x, y, tol)
    s = _regular_tri_arg(rng, prod, tol, extra=(x, y))
    vx = tri_charfun(x, s, tol).value
    vy = tri_charfun(y, s, tol).value
    vp = tri_charfun(prod, s, tol).value
    return TrialResult(rel_defect(vp, vx @ vy), _budget(tol))


@_suite("conjugacy-expanding", "coupled-slot values on the closed argument ball expand")
def _conjugacy_expanding(rng, dims, tol):
    alpha, slot_dim, slots = _tri_dims(rng, dims)
    tc = random_tri(alpha, slot_dim, slots, rng)
    s = _regular_tri_arg(rng, tc, tol, radius=0.95)
    smin, _ = sigma_extremes(tri_charfun(tc, s, tol).value)
    return TrialResult(max(0.0, 1.0 - smin), EXPANSION_SLACK)


@_suite("conjugacy-boundary-unitary", "unitary arguments give unitary coupled-slot values")
def _conjugacy_boundary_unitary(rng, dims, tol):
    alpha, slot_dim, slots = _tri_dims(rng, dims)
    tc = random_tri(alpha, slot_dim, slots, rng)

    def draw():
        s = haar_unitary(slots, rng)
        _require_regular(tri_elimination_matrix(tc, s))
        return s

    s = _retrying(draw)
    return TrialResult(unitarity_defect(tri_charfun(tc, s, tol).value), _budget(tol))


@_suite("conjugacy-conjugation-invariant", "one shared slot conjugation leaves the value unchanged")
def _conjugacy_conjugation_invariant(rng, dims, tol):
    alpha, slot_dim, slots = _tri_dims(rng, dims)
    tc = random_tri(alpha, slot_dim, slots, rng)
    other = tri_conjugate(tc, haar_unitary(slot_dim, rng), tol)
    s = _regular_tri_arg(rng, tc, tol, extra=(other,))
    defect = rel_defect(tri_charfun(tc, s, tol).value, tri_charfun(other, s, tol).value)
    return TrialResult(defect, _budget(tol))


@_suite(
    "conjugacy-dilation-control",
    "negative control: coupled slots must break the diagonal dilation law",
    aggregate=_expect_some_failure(
        CONTROL_THRESHOLD,
        "the diagonal dilation law held on every coupled-slot instance; "
        "the slot coupling appears to be inert",
    ),
)
def _conjugacy_dilation_control(rng, dims, tol):
    alpha = _draw(rng, 1, min(3, dims.max_alpha))
    slot_dim = _draw(rng, 1, min(3, dims.max_inner))
    tc = random_tri(alpha, slot_dim, 2, rng)
    lam = np.empty(2, dtype=complex)
    lam[0] = rng.uniform(0.6, 0.9) * np.exp(1j * rng.uniform(0.0, 2.0 * np.pi))
    lam[1] = lam[0] * rng.uniform(1.5, 2.5) * np.exp(1j * rng.uniform(0.0, 2.0 * np.pi))

    def draw():
        s = _regular_tri_arg(rng, tc, tol)
        scaled = (lam[:, None] * s) / lam[None, :]
        _require_regular(tri_elimination_matrix(tc, scaled))
        return s, scaled

    s, scaled = _retrying(draw)
    # The value has a single exposed block, so the dilation candidate is plain
    # invariance; it holds exactly when the slots do not couple.
    left = tri_charfun(tc, scaled, tol).value
    right = tri_charfun(tc, s, tol).value
    return TrialResult(rel_defect(left, right), CONTROL_THRESHOLD)


# --- paired families ----------------------------------------------------------


def _dc_dims(rng, dims) -> tuple[int, int, int]:
    return (
        _draw(rng, 1, min(2, dims.max_alpha)),
        _draw(rng, 1, min(3, dims.max_inner)),
        _draw(rng, 1, min(2, dims.max_arity)),
    )


@_suite("doublecoset-oracle", "the two-argument value matches the coupled full-system solve")
def _doublecoset_oracle(rng, dims, tol):
    alpha, inner, arity = _dc_dims(rng, dims)
    fam = random_family(alpha, inner, arity, rng)
    s, r = _regular_dc_args(rng, fam, tol)
    fast = dc_charfun(fam, s, r, tol).value
    slow = dc_charfun_system(fam, s, r, tol)
    return TrialResult(rel_defect(fast, slow), _budget(tol))


@_suite("doublecoset-rational", "entries are rational of the sharp degree along each argument line")
def _doublecoset_rational(rng, dims, tol):
    alpha, inner, arity = _dc_dims(rng, dims)
    fam = random_family(alpha, inner, arity, rng)
    degree = arity * inner
    size = 2 * arity * alpha
    row, col = _draw(rng, 0, size - 1), _draw(rng, 0, size - 1)
    worst = 0.0
    for vary_first in (True, False):

        def attempt():
            base_s = _complex_gauss(rng, arity, arity)
            base_r = _complex_gauss(rng, arity, arity)
            direction = _complex_gauss(rng, arity, arity)
            direction /= max(op_norm(direction), 1e-300)

            def evaluate(t):
                s = base_s + t * direction if vary_first else base_s
                r = base_r if vary_first else base_r + t * direction
                try:
                    return complex(dc_charfun(fam, s, r, tol).value[row, col])
                except OnEigensurface:
                    return None

            fit = _rational_line_defect(rng, evaluate, degree)
            if fit is None:
                raise _Retry
            return fit

        worst = max(worst, _retrying(attempt))
    return TrialResult(worst, RATIONAL_FIT_TOL)


@_suite("doublecoset-equivalence", "two-sided real orthogonal inner moves leave the value unchanged")
def _doublecoset_equivalence(rng, dims, tol):
    alpha, inner, arity = _dc_dims(rng, dims)
    fam = random_family(alpha, inner, arity, rng)
    other = dc_equivalent(fam, haar_orthogonal(inner, rng), haar_orthogonal(inner, rng), tol)
    s, r = _regular_dc_args(rng, fam, tol, extra=(other,))
    defect = rel_defect(dc_charfun(fam, s, r, tol).value, dc_charfun(other, s, r, tol).value)
    return TrialResult(defect, _budget(tol))


@_suite("doublecoset-multiplicative", "paired products multiply the two-argument values")
def _doublecoset_multiplicative(rng, dims, tol):
    alpha, _, arity = _dc_dims(rng, dims)
    x = random_family(alpha, _draw(rng, 1, min(3, dims.max_inner)), arity, rng)
    y = random_family(alpha, _draw(rng, 1, min(3, dims.max_inner)), arity, rng)
    prod = dc_product(x, y, tol)
    s, r = _regular_dc_args(rng, prod, tol, extra=(x, y))
    vx = dc_charfun(x, s, r, tol).value
    vy = dc_charfun(y, s, r, tol).value
    vp = dc_charfun(prod, s, r, tol).value
    return TrialResult(rel_defect(vp, vx @ vy), _budget(tol))


@_suite("doublecoset-dilation", "congruence dilations of the arguments conjugate the value")
def _doublecoset_dilation(rng, dims, tol):
    alpha, inner, arity = _dc_dims(rng, dims)
    fam = random_family(alpha, inner, arity, rng)

    def draw():
        s, r = _regular_dc_args(rng, fam, tol)
        lam = rng.uniform(0.5, 2.0, size=arity) * np.exp(
            1j * rng.uniform(0.0, 2.0 * np.pi, size=arity)
        )
        try:
            return dc_dilation_check(fam, s, r, lam, tol)
        except OnEigensurface:
            raise _Retry from None

    left, right = _retrying(draw)
    return TrialResult(rel_defect(left, right), _budget(tol))


@_suite("doublecoset-form-increase", "inside the bi-ball the split form never decreases")
def _doublecoset_form_increase(rng, dims, tol):
    alpha, inner, arity = _dc_dims(rng, dims)
    fam = random_family(alpha, inner, arity, rng)
    s, r = _regular_dc_args(rng, fam, tol, radius=0.9)
    report = form_checks(fam, s, r, tol, seed=_draw(rng, 0, 2**31 - 1), samples=8)
    smallest = min(report.increase_samples)
    return TrialResult(max(0.0, -smallest), 1e-10, f"smallest increase {smallest:.3e}")


@_suite("doublecoset-pseudo-unitary", "unitary arguments preserve the split form")
def _doublecoset_pseudo_unitary(rng, dims, tol):
    alpha, inner, arity = _dc_dims(rng, dims)
    fam = random_family(alpha, inner, arity, rng)
    s, r = _regular_dc_args(rng, fam, tol, unitary=True)
    chi = dc_charfun(fam, s, r, tol).value
    form = indefinite_form(arity, alpha)
    defect = op_norm(chi.conj().T @ form @ chi - form) / max(1.0, op_norm(chi) ** 2)
    return TrialResult(defect, _budget(tol))


@_suite("doublecoset-transpose", "transposing both arguments inverts the skew-transposed value")
def _doublecoset_transpose(rng, dims, tol):
    alpha, inner, arity = _dc_dims(rng, dims)
    fam = random_family(alpha, inner, arity, rng)

    def draw():
        s, r = _regular_dc_args(rng, fam, tol)
        _require_regular(dc_elimination_matrix(fam, s.T, r.T, tol))
        chi = dc_charfun(fam, s, r, tol).value
        _require_regular(chi)
        return chi, dc_charfun(fam, s.T, r.T, tol).value

    chi, transposed = _retrying(draw)
    skew = skew_form(arity, alpha)
    target = -skew @ np.linalg.inv(chi.T) @ skew
    return TrialResult(rel_defect(transposed, target), _budget(tol))


@_suite("doublecoset-symplectic", "symmetric arguments give values symplectic for the skew form")
def _doublecoset_symplectic(rng, dims, tol):
    alpha, inner, arity = _dc_dims(rng, dims)
    fam = random_family(alpha, inner, arity, rng)
    s, r = _regular_dc_args(rng, fam, tol, symmetric=True)
    chi = dc_charfun(fam, s, r, tol).value
    skew = skew_form(arity, alpha)
    defect = op_norm(chi.T @ skew @ chi - skew) / max(1.0, op_norm(chi) ** 2)
    return TrialResult(defect, _budget(tol))


@_suite(
    "doublecoset-adjoint-experiment",
    "observation: which adjoint sign convention the reflection law selects",
    aggregate=_observational,
)
def _doublecoset_adjoint_experiment(rng, dims, tol):
    alpha, inner, arity = _dc_dims(rng, dims)
    fam = random_family(alpha, inner, arity, rng)

    def draw():
        s, r = _regular_dc_args(rng, fam, tol)
        try:
            return adjoint_experiment(fam, s, r, tol)
        except (OnEigensurface, NearSingular):
            raise _Retry from None

    outcome = _retrying(draw)
    plain = outcome["conjugate-transpose"]
    negated = outcome["negated-conjugate-transpose"]
    detail = f"conjugate-transpose={plain:.3e} negated={negated:.3e}"
    return TrialResult(plain, EXPANSION_SLACK, detail)
