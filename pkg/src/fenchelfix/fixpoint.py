"""Solvers, classifier and residual verifiers for the fixed-point equation.

The equation under study is ``f(x) = tau f*(Ex + c) + <w, x> + beta`` with
``f*`` the Legendre-Fenchel transform.  Depending on E and the scalars it
has a unique solution, many solutions, or none; this module constructs the
closed-form quadratic solutions where they exist, detects the proven
nonexistence patterns, classifies everything else honestly, and provides
residual checks for every identity a solution must satisfy.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Tuple

import numpy as np

from . import linalg
from .errors import (
    BadDeterminant,
    DimMismatch,
    NotInvolution,
    NotPositiveDefinite,
    NotPSD,
    NotSymmetric,
    Singular,
)
from .quadratic import QuadraticFn, TransformParams, apply_transform, is_strictly_convex
from .reports import ResidualReport, report_from_residuals
from .sampling import instance_seed, sample_points
from .tolerances import DEFAULT_TOL, Tolerances


class Tag(enum.Enum):
    UNIQUE_ALL_FUNCTIONS = "UniqueAllFunctions"
    UNIQUE_IN_QUADRATIC_INVERTIBLE_CLASS = "UniqueInQuadraticInvertibleClass"
    UNIQUE_IN_C2_CLASS = "UniqueInC2Class"
    QUADRATIC_SOLUTION_EXISTS = "QuadraticSolutionExists"
    NO_SOLUTION = "NoSolution"
    NO_QUADRATIC_SOLUTION_IN_CONSTRUCTION = "NoQuadraticSolutionInConstruction"
    UNDETERMINED = "Undetermined"


@dataclass(frozen=True)
class Classification:
    """Tagged outcome of the case analysis, with the constructed solution
    when the tag implies one and the distinguished point x0 for the
    C2-class uniqueness branch."""

    tag: Tag
    solution: Optional[QuadraticFn] = None
    x0: Optional[np.ndarray] = None
    note: str = ""


def _require_symmetric_params(p: TransformParams, tol: Tolerances) -> np.ndarray:
    if not linalg.is_symmetric(p.E, tol):
        raise NotSymmetric("E must be symmetric for this construction")
    return 0.5 * (p.E + p.E.T)


def solve_positive_definite(p: TransformParams, tol: Tolerances = DEFAULT_TOL) -> QuadraticFn:
    """Closed-form strictly convex quadratic solution for positive definite E.

    A = sqrt(tau) E,  b = (w + sqrt(tau) c) / (1 + sqrt(tau)),
    gamma = (beta (1 + sqrt(tau))^2 + sqrt(tau)/2 <c - w, E^{-1}(c - w)>)
            / ((1 + sqrt(tau))^2 (tau + 1)).
    """
    e = _require_symmetric_params(p, tol)
    spec = linalg.eigendecompose(e, tol)
    if float(np.min(spec.eigenvalues)) <= tol.pd:
        raise NotPositiveDefinite("E must be positive definite")
    rt = np.sqrt(p.tau)
    a = rt * e
    b = (p.w + rt * p.c) / (1.0 + rt)
    e_inv = spec.apply(lambda d: 1.0 / d)
    diff = p.c - p.w
    gamma = (p.beta * (1.0 + rt) ** 2 + 0.5 * rt * float(diff @ e_inv @ diff)) / (
        (1.0 + rt) ** 2 * (p.tau + 1.0)
    )
    return QuadraticFn(a, b, gamma)


def self_adjoint_system(
    p: TransformParams, tol: Tolerances = DEFAULT_TOL
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Pieces of the construction for symmetric invertible E.

    Returns (A, M, rhs) where A = sqrt(tau) U |D| U^T from E = U D U^T,
    M = tau E A^{-1} + I = sqrt(tau) U sign(D) U^T + I, and
    rhs = w + tau E A^{-1} c.  The slope coefficient b of a quadratic
    solution must satisfy M b = rhs.
    """
    e = _require_symmetric_params(p, tol)
    spec = linalg.eigendecompose(e, tol)
    if float(np.min(np.abs(spec.eigenvalues))) <= tol.sing_rel * max(
        1.0, float(np.max(np.abs(spec.eigenvalues)))
    ):
        raise Singular("E must be invertible")
    rt = np.sqrt(p.tau)
    a = spec.apply(lambda d: rt * np.abs(d))
    s = spec.apply(lambda d: rt * np.sign(d))  # tau E A^{-1}
    m = s + np.eye(p.dim)
    rhs = p.w + s @ p.c
    return a, m, rhs


def solve_self_adjoint(
    p: TransformParams, tol: Tolerances = DEFAULT_TOL
) -> Optional[QuadraticFn]:
    """Quadratic solution for symmetric invertible E of any definiteness.

    Uses the spectral absolute value for the leading coefficient and the
    minimum-norm solution of the (possibly singular) slope system, which
    pins down b deterministically when the system has many solutions.
    Returns None when that system is inconsistent: the construction then
    produces no quadratic solution.
    """
    a, m, rhs = self_adjoint_system(p, tol)
    b = linalg.solve_min_norm(m, rhs, tol)
    if b is None:
        return None
    a_inv = linalg.spectral_inverse(a, tol)
    diff = p.c - b
    gamma = (p.beta + 0.5 * p.tau * float(diff @ a_inv @ diff)) / (p.tau + 1.0)
    return QuadraticFn(a, b, gamma)


def verify_form_quadratic(
    p: TransformParams, q: QuadraticFn, tol: Tolerances = DEFAULT_TOL
) -> ResidualReport:
    """Residuals of the coefficient relations a quadratic fixed point obeys.

    Checks A = tau E^T A^{-1} E, the slope system
    (tau E^T A^{-1} + I) b = w + tau E^T A^{-1} c, the constant relation
    gamma = (beta + tau/2 <c - b, A^{-1}(c - b)>) / (tau + 1), and the
    square-root identity (sqrt(tau) A^{-1} E)^2 = I.
    """
    if p.dim != q.dim:
        raise DimMismatch("transform and quadratic dimensions differ")
    a_inv = linalg.spectral_inverse(q.A, tol)
    e, tau = p.E, p.tau
    r1 = float(np.max(np.abs(q.A - tau * e.T @ a_inv @ e)))
    m = tau * e.T @ a_inv
    r2 = float(np.max(np.abs((m + np.eye(p.dim)) @ q.b - (p.w + m @ p.c))))
    diff = p.c - q.b
    gamma_expected = (p.beta + 0.5 * tau * float(diff @ a_inv @ diff)) / (tau + 1.0)
    r3 = abs(q.gamma - gamma_expected)
    root = np.sqrt(tau) * a_inv @ e
    r4 = float(np.max(np.abs(root @ root - np.eye(p.dim))))
    return report_from_residuals([r1, r2, r3, r4])


def x0_point(p: TransformParams, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """The point (1/(1-tau)) E^{-1}(w - c) where C2 regularity is assumed."""
    if abs(p.tau - 1.0) <= tol.param_match:
        raise ValueError("x0 is defined only for tau != 1")
    e_inv = linalg.invert(p.E, tol)
    return (e_inv @ p.w - e_inv @ p.c) / (1.0 - p.tau)


def _matches_nonexistence_pattern(p: TransformParams, eps: float) -> bool:
    minus_i = float(np.max(np.abs(p.E + np.eye(p.dim)))) <= eps
    if not (minus_i and abs(p.tau - 1.0) <= eps and abs(p.beta) <= eps):
        return False
    c0 = float(np.max(np.abs(p.c))) <= eps
    w0 = float(np.max(np.abs(p.w))) <= eps
    return (c0 and not w0) or (w0 and not c0)


def classify(
    p: TransformParams,
    candidate: Optional[QuadraticFn] = None,
    points: Optional[np.ndarray] = None,
    tol: Tolerances = DEFAULT_TOL,
) -> Classification:
    """Case analysis of the fixed-point equation for the given parameters.

    Branches, in order: positive definite E with tau = 1 and c = w (unique
    among all functions); positive definite E with tau != 1 (unique in the
    class with second derivative continuous at x0); positive definite E
    otherwise (unique among quadratics with invertible leading coefficient);
    the sign-flip nonexistence patterns (E = -I, tau = 1, beta = 0, exactly
    one of c, w zero); symmetric non-definite E (run the spectral
    construction); non-symmetric E (undetermined — no decision procedure is
    known, so only a best-effort residual scan of a supplied candidate).
    """
    eps = tol.param_match
    if not linalg.is_symmetric(p.E, tol):
        linalg.invert(p.E, tol)  # still insist on invertibility
        note = "E is not symmetric; no decision procedure is available"
        if candidate is not None:
            pts = points if points is not None else _default_points(p)
            scan = transform_residual(p, candidate, pts, tol)
            note += f"; candidate residual max {scan.max_abs:.3e} over {scan.sample_points} points"
        return Classification(Tag.UNDETERMINED, note=note)

    spec = linalg.eigendecompose(p.E, tol)
    eigs = spec.eigenvalues
    if float(np.min(np.abs(eigs))) <= tol.sing_rel * max(1.0, float(np.max(np.abs(eigs)))):
        raise Singular("E must be invertible")

    if float(np.min(eigs)) > tol.pd:
        solution = solve_positive_definite(p, tol)
        if abs(p.tau - 1.0) <= eps and float(np.max(np.abs(p.c - p.w))) <= eps:
            return Classification(
                Tag.UNIQUE_ALL_FUNCTIONS,
                solution=solution,
                note="unique among all extended-real functions",
            )
        if abs(p.tau - 1.0) > eps:
            return Classification(
                Tag.UNIQUE_IN_C2_CLASS,
                solution=solution,
                x0=x0_point(p, tol),
                note="unique among functions with second derivative continuous at x0",
            )
        return Classification(
            Tag.UNIQUE_IN_QUADRATIC_INVERTIBLE_CLASS,
            solution=solution,
            note="unique among quadratics with invertible leading coefficient",
        )

    if _matches_nonexistence_pattern(p, eps):
        return Classification(
            Tag.NO_SOLUTION,
            note="matches a proven sign-flip nonexistence pattern",
        )

    constructed = solve_self_adjoint(p, tol)
    if constructed is None:
        return Classification(
            Tag.NO_QUADRATIC_SOLUTION_IN_CONSTRUCTION,
            note="slope system of the spectral construction is inconsistent",
        )
    return Classification(
        Tag.QUADRATIC_SOLUTION_EXISTS,
        solution=constructed,
        note="construction succeeded; solutions are non-unique in general",
    )


def _default_points(p: TransformParams, count: int = 100) -> np.ndarray:
    seed = instance_seed(p.E, p.c, p.w, [p.tau, p.beta])
    return sample_points(p.dim, count, seed=seed)


def transform_residual(
    p: TransformParams,
    q: QuadraticFn,
    points: Iterable,
    tol: Tolerances = DEFAULT_TOL,
) -> ResidualReport:
    """Pointwise gap between q and its transform: zero exactly at fixed points."""
    tq = apply_transform(p, q, tol)
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    residuals = [q(x) - tq(x) for x in pts]
    return report_from_residuals(residuals, pts)


Variant = str  # "Tsquared" | "General" | "SelfAdjoint"


def functional_eq_residual(
    p: TransformParams,
    f: Callable[[np.ndarray], float],
    variant: Variant,
    points: Iterable,
    tol: Tolerances = DEFAULT_TOL,
) -> ResidualReport:
    """Residual of a functional identity every solution satisfies.

    ``Tsquared`` checks the identity obtained by applying the transform
    twice and expanding the inner conjugate:

        f(x) = tau^2 f(tau^{-1} (E^{-1})^T (Ex + c - w))
               + <w - tau E^T E^{-1} c, x>
               + tau <w, E^{-1} c> - tau <E^{-1} c, c> + beta (1 - tau).

    ``General`` checks the forward form obtained through biconjugation,
    with y = tau E^{-1} E^T x + E^{-1} w - E^{-1} c:

        f(y) = tau^2 f(x) + <w, y> - tau^2 <c, x> + beta (1 - tau).

    ``SelfAdjoint`` is the same with E^{-1} E^T = I, requiring symmetric E.
    All three are exact consequences of the fixed-point equation; the
    closed-form solutions drive every one of them to roundoff.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[1] != p.dim:
        raise DimMismatch("points dimension does not match the transform")
    e_inv = linalg.invert(p.E, tol)
    tau, c, w, beta = p.tau, p.c, p.w, p.beta
    e_inv_c = e_inv @ c
    residuals = np.empty(len(pts))
    if variant == "Tsquared":
        back = e_inv.T / tau
        lin = w - tau * (p.E.T @ e_inv_c)
        const = tau * float(w @ e_inv_c) - tau * float(e_inv_c @ c) + beta * (1.0 - tau)
        for i, x in enumerate(pts):
            inner = back @ (p.E @ x + c - w)
            residuals[i] = f(x) - (tau**2 * f(inner) + float(lin @ x) + const)
    elif variant in ("General", "SelfAdjoint"):
        if variant == "SelfAdjoint":
            if not linalg.is_symmetric(p.E, tol):
                raise NotSymmetric("SelfAdjoint variant requires symmetric E")
            fwd = tau * np.eye(p.dim)
        else:
            fwd = tau * (e_inv @ p.E.T)
        shift = e_inv @ w - e_inv_c
        for i, x in enumerate(pts):
            y = fwd @ x + shift
            residuals[i] = f(y) - (
                tau**2 * f(x) + float(w @ y) - tau**2 * float(c @ x) + beta * (1.0 - tau)
            )
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return report_from_residuals(residuals, pts)


def shift_equation_residual(
    f: Callable[[float], float], w: float, points: Iterable
) -> ResidualReport:
    """Residual of f(x) - f(x + w) - w x on the real line.

    For w != 0 no proper convex lower semicontinuous function satisfies
    this identity, so a nonzero residual on reasonable samples is the
    expected outcome; w = 0 gives the trivial identity.
    """
    pts = np.asarray(points, dtype=float).ravel()
    residuals = [f(x) - f(x + w) - w * x for x in pts]
    return report_from_residuals(residuals, pts)


def lower_envelope(p: TransformParams, tol: Tolerances = DEFAULT_TOL) -> QuadraticFn:
    """Quadratic minorant every solution dominates.

    Q = 2 tau/(tau+1) E (symmetrized), q = (w + tau c)/(tau + 1),
    theta = beta/(tau + 1); a direct consequence of the Fenchel-Young
    inequality at s = Ex + c.
    """
    tau = p.tau
    q_mat = (2.0 * tau / (tau + 1.0)) * 0.5 * (p.E + p.E.T)
    q_vec = (p.w + tau * p.c) / (tau + 1.0)
    theta = p.beta / (tau + 1.0)
    return QuadraticFn(q_mat, q_vec, theta)


def upper_envelope(p: TransformParams, tol: Tolerances = DEFAULT_TOL) -> QuadraticFn:
    """Quadratic majorant of every solution, for symmetric PSD invertible E.

    Computed compositionally: the transform reverses pointwise order, so
    applying it to the lower envelope yields an upper bound.  This route
    gives leading coefficient (tau+1)/2 E.  (An alternative closed form
    with leading coefficient (tau+1)/2 E^{-1} circulates but fails the
    bound already for E = 2I, tau = 1; the regression tests pin this down.)
    """
    if not linalg.is_symmetric(p.E, tol):
        raise NotPSD("upper envelope requires positive semidefinite (hence symmetric) E")
    e = 0.5 * (p.E + p.E.T)
    spec = linalg.eigendecompose(e, tol)
    if float(np.min(spec.eigenvalues)) < -tol.psd:
        raise NotPSD("upper envelope requires positive semidefinite E")
    if float(np.min(np.abs(spec.eigenvalues))) <= tol.sing_rel * max(
        1.0, float(np.max(np.abs(spec.eigenvalues)))
    ):
        raise Singular("upper envelope requires invertible E")
    return apply_transform(p, lower_envelope(p, tol), tol)


def g_scaling_residual(
    p: TransformParams,
    f: Callable[[np.ndarray], float],
    p2: Callable[[np.ndarray], float],
    points: Iterable,
    tol: Tolerances = DEFAULT_TOL,
) -> ResidualReport:
    """Scaling-law residual for the difference g = f - p2 of two solutions.

    For symmetric PSD invertible E, any two solutions differ by a
    continuous g with g(tau x + E^{-1} w - E^{-1} c) = tau^2 g(x).
    """
    if not linalg.is_symmetric(p.E, tol):
        raise NotPSD("the scaling law requires positive semidefinite (hence symmetric) E")
    e = 0.5 * (p.E + p.E.T)
    spec = linalg.eigendecompose(e, tol)
    if float(np.min(spec.eigenvalues)) < -tol.psd:
        raise NotPSD("the scaling law requires positive semidefinite E")
    e_inv = spec.apply(lambda d: 1.0 / d)
    shift = e_inv @ p.w - e_inv @ p.c
    pts = np.atleast_2d(np.asarray(points, dtype=float))

    def g(z):
        return f(z) - p2(z)

    residuals = np.empty(len(pts))
    for i, x in enumerate(pts):
        residuals[i] = g(p.tau * x + shift) - p.tau**2 * g(x)
    return report_from_residuals(residuals, pts)


def solve_lql(l_matrix, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Unique monotone solution Q of L Q L = Q^{-1} for positive definite L.

    Restricted to linear operators the answer is Q = L^{-1}.
    """
    spec = linalg.eigendecompose(l_matrix, tol)
    if float(np.min(spec.eigenvalues)) <= tol.pd:
        raise NotPositiveDefinite("solve_lql requires a positive definite matrix")
    return spec.apply(lambda d: 1.0 / d)


def check_involution_psd(q_matrix, tol: Tolerances = DEFAULT_TOL) -> ResidualReport:
    """Distance of a PSD involution from the identity (it must be I).

    Requires Q PSD with ||Q^2 - I||_max within the involution gate; the
    reported max_abs is ||Q - I||_max.
    """
    q = linalg.as_symmetric(q_matrix, tol)
    spec = linalg.eigendecompose(q, tol)
    if float(np.min(spec.eigenvalues)) < -tol.psd:
        raise NotPSD("check_involution_psd requires a PSD matrix")
    n = q.shape[0]
    if float(np.max(np.abs(q @ q - np.eye(n)))) > tol.involution:
        raise NotInvolution("Q^2 differs from the identity beyond tolerance")
    gap = np.abs(q - np.eye(n))
    return report_from_residuals(gap.ravel())


def functional_differential_residual(
    p: TransformParams,
    q: QuadraticFn,
    points: Iterable,
    tol: Tolerances = DEFAULT_TOL,
) -> ResidualReport:
    """Residual of the gradient-inverse form of the fixed-point equation.

    For differentiable f the conjugate satisfies
    f*(y) = <y, u> - f(u) with u = (f')^{-1}(y), so a solution obeys
    f(x) = tau (<y, u> - f(u)) + <w, x> + beta at y = Ex + c.  For a
    quadratic with positive definite A the gradient inverse is explicit:
    u = A^{-1}(y - b).
    """
    spec = linalg.eigendecompose(q.A, tol)
    if float(np.min(spec.eigenvalues)) <= tol.pd:
        raise NotPositiveDefinite("explicit gradient inverse needs positive definite A")
    a_inv = spec.apply(lambda d: 1.0 / d)
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    residuals = np.empty(len(pts))
    for i, x in enumerate(pts):
        y = p.E @ x + p.c
        u = a_inv @ (y - q.b)
        residuals[i] = q(x) - (p.tau * (float(y @ u) - q(u)) + float(p.w @ x) + p.beta)
    return report_from_residuals(residuals, pts)


def quarter_turn_params(beta: float = 0.0) -> TransformParams:
    """Planar rotation parameters (x1, x2) -> (x2, -x1) with tau = 1, c = w = 0."""
    return TransformParams(
        E=np.array([[0.0, 1.0], [-1.0, 0.0]]),
        c=np.zeros(2),
        w=np.zeros(2),
        tau=1.0,
        beta=beta,
    )


def skew_solution(b_matrix, tol: Tolerances = DEFAULT_TOL) -> QuadraticFn:
    """Solution 1/2 <Bx, x> of the planar rotation equation.

    Any symmetric positive semidefinite 2x2 B with det(B) = 1 works, which
    is how the rotation case acquires infinitely many quadratic solutions.
    """
    b = linalg.as_symmetric(b_matrix, tol)
    if b.shape[0] != 2:
        raise DimMismatch("skew_solution is a 2x2 construction")
    spec = linalg.eigendecompose(b, tol)
    if float(np.min(spec.eigenvalues)) < -tol.psd:
        raise NotPSD("B must be positive semidefinite")
    det = b[0, 0] * b[1, 1] - b[0, 1] * b[1, 0]
    if abs(det - 1.0) > 1e-9:
        raise BadDeterminant(f"det(B) = {det} but must equal 1")
    return QuadraticFn(b, np.zeros(2), 0.0)
