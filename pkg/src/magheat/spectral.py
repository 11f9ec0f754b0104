"""Smallest eigenvalues of the assembled operators: the lambda(s) curve, its
limit estimate, the variational upper bound, the Hardy constant and the
infimum gap above 1/2."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.sparse.linalg import LinearOperator, eigsh, splu

from .discretize import Grid2D, assemble_magnetic, peierls_phases
from .errors import ResolutionCapError, SolverConvergenceError
from .field import GaugeField, alpha_batch, alpha_infinity, beta_of, make_field

DIAMAGNETIC_SLACK = 1e-9    # floor tolerance of the discrete diamagnetic bound
DEGENERACY_FLUX_TOL = 1e-6  # half-integer detection for block solves

_ZERO_FIELD = make_field("radial-step", {"b0": 0.0, "r": 1.0})


@dataclass(frozen=True)
class SpectralSample:
    """One point of the lambda(s) curve with solver diagnostics."""

    s: float
    lam: float
    residual: float
    iterations: int
    r_dom: float
    n: int


@dataclass(frozen=True)
class HardyEstimate:
    """Variational Hardy constant on one truncated grid."""

    c_est: float
    r_dom: float
    n: int


class _CountingSolve:
    def __init__(self, solve):
        self.solve = solve
        self.count = 0

    def __call__(self, v):
        self.count += 1
        return self.solve(v)


def smallest_eigs(op, k, tol=1e-8, seed=0):
    """k smallest eigenpairs of a Hermitian positive definite operator.

    Shift-inverted Lanczos iteration (implicitly restarted, fully
    reorthogonalized) on the sparse factorization of the operator; residuals
    ``|L v - lam v| / |v|`` are verified against ``tol`` explicitly.  Returns
    ``(pairs, worst_residual, solve_count)`` where ``pairs`` lists
    (eigenvalue, eigenvector) ascending, each eigenvector's largest-modulus
    component rotated to the positive real axis.
    """
    dim = op.dimension
    if k < 1:
        raise ValueError("k must be >= 1")
    if k >= dim:
        raise ValueError(f"k = {k} must be smaller than the dimension {dim}")
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    lu = splu(op.matrix.tocsc())
    counting = _CountingSolve(lu.solve)
    opinv = LinearOperator(op.matrix.shape, matvec=counting, dtype=op.matrix.dtype)
    rng = np.random.default_rng(seed)
    v0 = rng.standard_normal(dim)
    if np.issubdtype(op.matrix.dtype, np.complexfloating):
        v0 = v0 + 1j * rng.standard_normal(dim)
    ncv = min(dim - 1, max(2 * k + 1, 24))
    try:
        vals, vecs = eigsh(op.matrix, k=k, sigma=0.0, which="LM", OPinv=opinv,
                           v0=v0, ncv=ncv, maxiter=400, tol=0.0)
    except Exception as exc:
        raise SolverConvergenceError(f"shift-inverted eigensolve failed: {exc}") from exc
    order = np.argsort(vals)
    vals = vals[order]
    vecs = vecs[:, order]
    pairs = []
    worst = 0.0
    for j in range(k):
        v = vecs[:, j]
        res = float(np.linalg.norm(op.apply(v) - vals[j] * v) / np.linalg.norm(v))
        worst = max(worst, res)
        if res > tol:
            raise SolverConvergenceError(
                f"eigenpair {j} residual {res:.2e} exceeds tol {tol:.2e}")
        pivot = np.argmax(np.abs(v))
        phase = v[pivot] / abs(v[pivot])
        pairs.append((float(vals[j]), v / phase))
    return pairs, worst, counting.count


def _lambda_once(field, s, grid, tol, seed, k):
    gauge = GaugeField(field)
    phases = peierls_phases(grid, gauge, s=s)
    op = assemble_magnetic(grid, phases, harmonic=True)
    pairs, residual, iterations = smallest_eigs(op, k=k, tol=tol, seed=seed)
    return pairs[0][0], residual, iterations


def check_s_cap(grid, field, s_values):
    """Reject self-similar times whose rescaled flux tube is under-resolved."""
    if field.is_zero:
        return
    cap = grid.s_max(field.support_radius)
    bad = [s for s in s_values if s > cap + 1e-12]
    if bad:
        raise ResolutionCapError(
            f"s values {bad} exceed the resolution cap s_max = {cap:.3f} "
            f"(support {field.support_radius}, h = {grid.h:.4f})")


_FLOOR_CACHE = {}


def _diamagnetic_floor(grid, tol, seed):
    key = (grid.r_dom, grid.n)
    if key not in _FLOOR_CACHE:
        _FLOOR_CACHE[key] = _lambda_once(_ZERO_FIELD, 0.0, grid, tol, seed, 1)[0]
    return _FLOOR_CACHE[key]


def lambda_curve(field, s_values, grid, tol=1e-8, seed=0):
    """Lowest eigenvalue of the rescaled confined operator at each s.

    Every sample is checked against the discrete diamagnetic floor: the
    same-grid zero-field eigenvalue minus a round-off slack.
    """
    s_values = [float(s) for s in s_values]
    if any(s < 0 for s in s_values):
        raise ValueError("s values must be >= 0")
    check_s_cap(grid, field, s_values)
    beta = beta_of(field)
    k = 2 if abs(beta - 0.5) < DEGENERACY_FLUX_TOL else 1
    lam_floor = _diamagnetic_floor(grid, tol, seed)
    samples = []
    for s in s_values:
        lam, residual, iterations = _lambda_once(field, s, grid, tol, seed, k)
        if lam < lam_floor - DIAMAGNETIC_SLACK:
            raise SolverConvergenceError(
                f"lambda({s}) = {lam:.8f} violates the diamagnetic floor "
                f"{lam_floor:.8f}")
        samples.append(SpectralSample(s=s, lam=lam, residual=residual,
                                      iterations=iterations, r_dom=grid.r_dom, n=grid.n))
    return samples


def lambda_limit_estimate(samples):
    """Extrapolated limit of lambda(s): linear fit in e^{-s/2} on the tail.

    The raw final sample is the model-free companion; acceptance checks use
    it directly, the extrapolation only sharpens the reported limit.
    """
    if len(samples) < 3:
        raise ValueError("need at least 3 samples to extrapolate")
    ss = [smp.s for smp in samples]
    if any(b <= a for a, b in zip(ss, ss[1:])):
        raise ValueError("samples must have strictly increasing s")
    tail = samples[-3:]
    x = np.array([math.exp(-smp.s / 2.0) for smp in tail])
    y = np.array([smp.lam for smp in tail])
    design = np.vstack([x, np.ones_like(x)]).T
    (_, intercept), *_ = np.linalg.lstsq(design, y, rcond=None)
    return float(intercept)


def variational_upper_bound(field, s, n, r_infinity=30.0, theta_points=64):
    """Rayleigh quotient of the logarithmically cut off trial state.

    The trial function is the confined ground profile e^{-r^2/8} times the
    cutoff vanishing like log(n^2 r)/log(n) on [1/n^2, 1/n], carrying the
    angular phase e^{i int_0^theta alpha_inf}; an upper bound for lambda(s)
    up to quadrature error by the variational principle.
    """
    if n < 2:
        raise ValueError("cutoff index n must be >= 2")
    ln = math.log(n)
    lo, hi = 1.0 / n**2, 1.0 / n
    breakpoints = sorted({lo, hi, min(field.support_radius * math.exp(-s / 2.0), r_infinity / 2)})

    def phi2(r):
        return math.exp(-r * r / 4.0)

    def eta(r):
        if r <= lo:
            return 0.0
        if r >= hi:
            return 1.0
        return math.log(n * n * r) / ln

    def eta_prime(r):
        if lo < r < hi:
            return 1.0 / (r * ln)
        return 0.0

    def dphi(r):
        return -(r / 4.0) * math.exp(-r * r / 8.0)

    def radial_kinetic(r):
        return (dphi(r) * eta(r) + math.exp(-r * r / 8.0) * eta_prime(r)) ** 2 * r

    def harmonic_term(r):
        return phi2(r) * eta(r) ** 2 * r**3 / 16.0

    def norm_term(r):
        return phi2(r) * eta(r) ** 2 * r

    pts = [p for p in breakpoints if 0 < p < r_infinity]
    t1, _ = quad(radial_kinetic, 0.0, r_infinity, points=pts, limit=400,
                 epsabs=1e-12, epsrel=1e-10)
    t3, _ = quad(harmonic_term, 0.0, r_infinity, points=pts, limit=400,
                 epsabs=1e-12, epsrel=1e-10)
    den, _ = quad(norm_term, 0.0, r_infinity, points=pts, limit=400,
                  epsabs=1e-12, epsrel=1e-10)

    # angular mismatch |alpha_inf(theta) - alpha(e^{s/2} r, theta)|^2 / r
    nodes, weights = np.polynomial.legendre.leggauss(theta_points)
    thetas = math.pi * (nodes + 1.0)
    w_theta = math.pi * weights
    a_inf = np.array([alpha_infinity(field, th) for th in thetas])
    scale = math.exp(s / 2.0)

    def mismatch(r):
        vals = alpha_batch(field, np.full_like(thetas, scale * r), thetas)
        return float(np.sum(w_theta * (a_inf - vals) ** 2)) * phi2(r) * eta(r) ** 2 / r

    support_scaled = field.support_radius / scale
    t2, _ = quad(mismatch, lo, max(support_scaled, hi) * 1.001,
                 points=[p for p in (hi, support_scaled) if lo < p], limit=400,
                 epsabs=1e-11, epsrel=1e-9)

    numerator = 2.0 * math.pi * (t1 + t3) + t2
    return numerator / (2.0 * math.pi * den)


def hardy_constant(field, r_dom, n, seed=0, max_iter=400, rtol=1e-10):
    """Variational constant of the weighted bound H_B >= c / (1 + |x|^2).

    Smallest generalized eigenvalue of (magnetic Laplacian, weight) on the
    truncated grid by inverse-power iteration on the weighted problem.
    """
    grid = Grid2D(r_dom=float(r_dom), n=int(n))
    phases = peierls_phases(grid, GaugeField(field), s=None)
    op = assemble_magnetic(grid, phases, harmonic=False)
    X, Y = grid.mesh()
    w = 1.0 / (1.0 + (X**2 + Y**2).ravel())
    lu = splu(op.matrix.tocsc())
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(grid.size).astype(op.matrix.dtype)
    if np.issubdtype(op.matrix.dtype, np.complexfloating):
        v = v + 1j * rng.standard_normal(grid.size)
    v /= np.linalg.norm(v)
    c_prev = math.inf
    for _ in range(max_iter):
        v = lu.solve(w * v)
        v /= np.linalg.norm(v)
        num = float(np.vdot(v, op.apply(v)).real)
        den = float(np.vdot(v, w * v).real)
        c_est = num / den
        if abs(c_est - c_prev) <= rtol * max(abs(c_est), 1e-30):
            return HardyEstimate(c_est=c_est, r_dom=grid.r_dom, n=grid.n)
        c_prev = c_est
    raise SolverConvergenceError(
        f"inverse-power iteration did not converge in {max_iter} iterations")


def c_b_estimate(field, s_grid, grid, tol=1e-8, seed=0):
    """Infimum gap inf_s lambda(s) - 1/2 over the sampled grid, floored at 0."""
    s_grid = sorted(float(s) for s in s_grid)
    if len(s_grid) < 2:
        raise ValueError("s_grid needs at least two points")
    spacing = max(b - a for a, b in zip(s_grid, s_grid[1:]))
    if spacing > 0.5 + 1e-12:
        raise ValueError(f"s_grid spacing {spacing} exceeds 0.5")
    samples = lambda_curve(field, s_grid, grid, tol=tol, seed=seed)
    return max(0.0, min(smp.lam for smp in samples) - 0.5)
