"""Base-manifold invariants assembled from polytope integrals.

All quantities are defined through the polytope normalisation

    volume class:    int_P  h^(n)(<x, xi>) dx
    boundary class:  int_dP h^(n-1)(<x, xi>) dsigma

so with weights v = f^(n)(<xi, x>), w = g^(n+1)(<xi, x>):

    Vol_w = int_P w dx,   Per_v = int_dP v dsigma,   s_hat = Per_v / Vol_w,

    F(beta) = s_hat * int_P <x, beta> w dx - int_dP <x, beta> v dsigma.

F(beta) is (minus) the classical toric Donaldson pairing in the unweighted
case and equals the invariant of the product degeneration generated by beta.
Both a cubature and a vertex-localisation evaluation path are provided and
can be run together to cross-check each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import localize, quadrature
from .profiles import require_positive
from .quadrature import DEFAULT_RULE


class BackendError(RuntimeError):
    """The two evaluation backends disagree beyond tolerance."""


@dataclass(frozen=True)
class ExtremalData:
    """Affine extremal potential w_ext(x) = <x, chi> + a."""

    chi: tuple
    a: float
    residual: float

    def value(self, x):
        x = np.asarray(x, dtype=float)
        return x @ np.asarray(self.chi) + self.a


@dataclass(frozen=True)
class SolitonResult:
    xi: tuple
    residual: float
    iterations: int
    converged: bool
    oracle_xi: tuple
    oracle_gap: float
    normalization_consistent: bool


@dataclass(frozen=True)
class InvariantReport:
    vol_w: float
    per_v: float
    s_hat: float
    futaki: tuple
    gram: tuple
    extremal: ExtremalData
    backend_discrepancy: float


def _weight_key(W):
    return (W.n, tuple(float(x) for x in W.xi), W.f, W.g)


_scalar_cache = {}


def _cached(tag, P, W, rule, compute):
    key = (tag, P, _weight_key(W), rule)
    if key not in _scalar_cache:
        _scalar_cache[key] = compute()
    return _scalar_cache[key]


def vol_w(P, W, rule=DEFAULT_RULE, backend="quadrature"):
    """int_P w dx."""
    if backend == "localization":
        return localize.eval_class(P, W.g.derivative(1), W.xi)
    return _cached("vol", P, W, rule,
                   lambda: quadrature.integrate(P, W.w, rule).value)


def per_v(P, W, rule=DEFAULT_RULE, backend="quadrature"):
    """int_dP v dsigma (lattice boundary measure)."""
    if backend == "localization":
        return localize.eval_c1_class(P, W.f.derivative(1), W.xi)
    return _cached("per", P, W, rule,
                   lambda: quadrature.integrate_boundary(P, W.v, rule).value)


def s_hat(P, W, rule=DEFAULT_RULE, backend="quadrature", agree_tol=1e-8):
    """Average weighted scalar curvature Per_v / Vol_w."""
    require_positive(W, P)
    if backend == "both":
        q = per_v(P, W, rule) / vol_w(P, W, rule)
        l = (per_v(P, W, rule, "localization")
             / vol_w(P, W, rule, "localization"))
        if abs(q - l) > agree_tol * (1 + abs(q)):
            raise BackendError(f"s_hat backends disagree: {q} vs {l}")
        return q
    return per_v(P, W, rule, backend) / vol_w(P, W, rule, backend)


def _moment_w(P, W, beta, rule):
    beta = np.asarray(beta, dtype=float)
    return quadrature.integrate(P, lambda x: (x @ beta) * W.w(x), rule).value


def _moment_boundary_v(P, W, beta, rule):
    beta = np.asarray(beta, dtype=float)
    return quadrature.integrate_boundary(P, lambda x: (x @ beta) * W.v(x), rule).value


def futaki(P, W, beta, rule=DEFAULT_RULE, backend="quadrature",
           shat=None, agree_tol=1e-8):
    """Weighted Futaki character evaluated on beta.

    With the localisation backend the two beta-moments are directional
    derivatives of the g- and f-classes along beta.
    """
    if backend == "both":
        q = futaki(P, W, beta, rule, "quadrature", shat)
        l = futaki(P, W, beta, rule, "localization", shat)
        if abs(q - l) > agree_tol * (1 + abs(q)):
            raise BackendError(f"futaki backends disagree: {q} vs {l}")
        return q
    if backend == "localization":
        sh = shat if shat is not None else s_hat(P, W, rule, "localization")
        mom = localize.directional_derivative("volume", P, W.g, W.xi, beta)
        bmom = localize.directional_derivative("c1", P, W.f, W.xi, beta)
        return sh * mom - bmom
    sh = shat if shat is not None else s_hat(P, W, rule)
    return sh * _moment_w(P, W, beta, rule) - _moment_boundary_v(P, W, beta, rule)


def futaki_vector(P, W, rule=DEFAULT_RULE, backend="quadrature"):
    """F evaluated on the standard lattice basis."""
    sh = s_hat(P, W, rule, backend if backend != "both" else "quadrature")
    basis = np.eye(P.dim)
    return tuple(futaki(P, W, b, rule, backend, shat=sh) for b in basis)


def barycenter_w(P, W, rule=DEFAULT_RULE):
    """w-weighted barycenter of the polytope."""
    def compute():
        vw = vol_w(P, W, rule)
        bary = [_moment_w(P, W, e, rule) / vw for e in np.eye(P.dim)]
        return tuple(bary)

    return np.array(_cached("bary", P, W, rule, compute))


def gram(P, W, basis=None, rule=DEFAULT_RULE):
    """Weighted inner product matrix of centered affine generators.

    G_ij = int_P (<x, b_i> - mean_i)(<x, b_j> - mean_j) w dx, which is
    symmetric positive definite for a linearly independent basis.
    """
    if basis is None:
        basis = np.eye(P.dim)
    basis = np.asarray(basis, dtype=float)
    if np.linalg.matrix_rank(basis) < len(basis):
        raise ValueError("gram basis is linearly dependent")

    def compute():
        vw = vol_w(P, W, rule)
        means = np.array([_moment_w(P, W, b, rule) for b in basis]) / vw
        r = len(basis)
        g = np.zeros((r, r))
        for i in range(r):
            for j in range(i, r):
                bi, bj = basis[i], basis[j]
                mi, mj = means[i], means[j]

                def f(x, bi=bi, bj=bj, mi=mi, mj=mj):
                    return (x @ bi - mi) * (x @ bj - mj) * W.w(x)

                g[i, j] = g[j, i] = quadrature.integrate(P, f, rule).value
        return tuple(tuple(row) for row in g)

    key = ("gram", P, _weight_key(W), rule, basis.tobytes())
    if key not in _scalar_cache:
        _scalar_cache[key] = compute()
    return np.array(_scalar_cache[key])


def extremal_field(P, W, rule=DEFAULT_RULE):
    """The unique affine candidate w_ext = <x, chi> + a.

    chi solves G chi = -F in the standard basis, and a matches the w-average
    of w_ext to s_hat.  The returned residual is the worst violation of
    F(beta) + <w_ext, beta> = 0 over the basis directions.
    """
    g = gram(P, W, rule=rule)
    f = np.array(futaki_vector(P, W, rule))
    try:
        chi = np.linalg.solve(g, -f)
    except np.linalg.LinAlgError as e:
        raise ValueError(f"gram matrix is singular: {e}") from e
    sh = s_hat(P, W, rule)
    bary = barycenter_w(P, W, rule)
    a = sh - float(chi @ bary)
    residual = float(np.max(np.abs(f + g @ chi)))
    return ExtremalData(tuple(float(c) for c in chi), a, residual)


def futaki_signed(P, W, affine, beta, rule=DEFAULT_RULE, zero_tol=1e-12):
    """Futaki pairing with the signed second weight w' = (affine) * w.

    ``affine`` is an ExtremalData or a pair (chi, a).  The average uses
    Per_v / int w' when the w'-mass is nonzero; for sign-balanced w' with
    vanishing mass, the average is replaced by 1.
    """
    if isinstance(affine, ExtremalData):
        chi, a = np.asarray(affine.chi, dtype=float), affine.a
    else:
        chi, a = np.asarray(affine[0], dtype=float), float(affine[1])
    beta = np.asarray(beta, dtype=float)

    def wprime(x):
        return (x @ chi + a) * W.w(x)

    mass = quadrature.integrate(P, wprime, rule).value
    pv = per_v(P, W, rule)
    scale = abs(pv) + abs(mass)
    sh = pv / mass if abs(mass) > zero_tol * (1 + scale) else 1.0
    mom = quadrature.integrate(P, lambda x: (x @ beta) * wprime(x), rule).value
    bmom = _moment_boundary_v(P, W, beta, rule)
    return sh * mom - bmom


def soliton_field(P, rule=DEFAULT_RULE, tol=1e-10, max_iter=50,
                  oracle_tol=1e-8, start=None):
    """Soliton direction on a reflexive polytope by damped Newton iteration.

    At each xi the exponential weights v = w = exp(<xi, x>) give a Futaki
    character F_xi and a Gram form G_xi; the soliton equation is the
    self-consistency of the extremal direction,

        R(xi)(beta) = F_xi(beta) + <xi, beta>_{G_xi} = 0 for all beta,

    whose solution is the unique critical point of the strictly convex
    volume xi -> int_P exp(<xi, x>) dx.  That critical point, found by
    direct minimisation of the closed-form volume, serves as an independent
    oracle; disagreement is flagged as a normalisation inconsistency.
    """
    from .profiles import builtin

    n = P.dim
    if any(f.offset != 1 for f in P.facets):
        raise ValueError(
            "soliton_field needs a reflexive polytope (all facet offsets 1)")
    xi = np.zeros(n) if start is None else np.asarray(start, dtype=float)
    resid = np.full(n, np.inf)
    iterations = 0
    for iterations in range(1, max_iter + 1):
        W = builtin("soliton", n, xi=xi)
        g = gram(P, W, rule=rule)
        f = np.array([futaki(P, W, e, rule) for e in np.eye(n)])
        resid = f + g @ xi
        if float(np.max(np.abs(resid))) <= tol:
            break
        vw = vol_w(P, W, rule)
        bary = barycenter_w(P, W, rule)
        m = g + vw * np.outer(bary, bary)
        step = np.linalg.solve(m, resid)
        # Damped update: R is the negative exponential barycenter, whose
        # Jacobian is -m.
        scale = 1.0
        for _ in range(30):
            cand = xi + scale * step
            Wc = builtin("soliton", n, xi=cand)
            gc = gram(P, Wc, rule=rule)
            fc = np.array([futaki(P, Wc, e, rule) for e in np.eye(n)])
            rc = fc + gc @ cand
            if np.linalg.norm(rc) < np.linalg.norm(resid) or scale < 1e-4:
                xi = cand
                break
            scale *= 0.5
    converged = float(np.max(np.abs(resid))) <= tol
    oracle = soliton_oracle(P)
    gap = float(np.max(np.abs(np.asarray(oracle) - xi)))
    return SolitonResult(tuple(float(c) for c in xi),
                         float(np.max(np.abs(resid))), iterations, converged,
                         tuple(float(c) for c in oracle), gap,
                         gap <= oracle_tol)


def soliton_oracle(P):
    """Critical point of xi -> int_P exp(<xi, x>) dx.

    Solved through the barycenter condition int_P x exp(<xi, x>) dx = 0
    using the closed-form exponential moments (divided differences), entirely
    independent of the Futaki/Newton machinery.  A coarse convex line
    search seeds the root finder.
    """
    from scipy.optimize import minimize, root

    n = P.dim

    def logvol(xi):
        return math.log(quadrature.moments(P, None, xi, "exponential"))

    seed = minimize(logvol, np.zeros(n), method="Nelder-Mead",
                    options={"xatol": 1e-8, "fatol": 1e-12, "maxiter": 2000}).x

    def grad(xi):
        return np.array([quadrature.moments(P, e, xi, "exponential")
                         for e in np.eye(n, dtype=int)])

    res = root(grad, seed, method="hybr", options={"xtol": 1e-13})
    return tuple(float(c) for c in res.x)


def invariant_report(P, W, rule=DEFAULT_RULE, backend="quadrature",
                     agree_tol=1e-8):
    """Assemble the headline invariants, optionally cross-checking backends."""
    require_positive(W, P)
    vw_q = vol_w(P, W, rule)
    pv_q = per_v(P, W, rule)
    discrepancy = 0.0
    if backend in ("both", "localization"):
        vw_l = vol_w(P, W, rule, "localization")
        pv_l = per_v(P, W, rule, "localization")
        discrepancy = max(abs(vw_q - vw_l) / (1 + abs(vw_q)),
                          abs(pv_q - pv_l) / (1 + abs(pv_q)))
        if backend == "both" and discrepancy > agree_tol:
            raise BackendError(
                f"backend discrepancy {discrepancy:.3e} exceeds {agree_tol}")
    sh = pv_q / vw_q
    fvec = futaki_vector(P, W, rule)
    g = gram(P, W, rule=rule)
    ext = extremal_field(P, W, rule)
    return InvariantReport(vw_q, pv_q, sh, fvec,
                           tuple(tuple(float(x) for x in row) for row in g),
                           ext, discrepancy)
