"""Shared numerical kernels.

Bound-state eigensolver, damped Gauss-Newton least squares, adaptive ODE
integration, tensor-product quadrature, and the error function. All energies
are ordinary frequencies (Hz); positions are metres.

Everything here is a pure function of its arguments; no module state.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.integrate import solve_ivp
import scipy.special

from .constants import H_PLANCK, HBAR
from .errors import (
    ConfigError,
    DataFormatError,
    DegenerateFitError,
    DomainError,
    ResolutionError,
    StiffnessError,
)


# ---------------------------------------------------------------------------
# grids and containers


@dataclass(frozen=True)
class Grid1D:
    """Strictly increasing 1D sample positions in metres."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        object.__setattr__(self, "points", pts)
        if pts.ndim != 1 or pts.size < 3:
            raise ConfigError("grid needs at least 3 points")
        d = np.diff(pts)
        if np.any(d <= 0):
            raise ConfigError("grid points must be strictly increasing")

    @classmethod
    def from_range(cls, lo: float, hi: float, n: int) -> "Grid1D":
        return cls(np.linspace(lo, hi, n))

    @property
    def uniform(self) -> bool:
        # 1e-12 relative spacing deviation, forgiving float representation
        # noise of the endpoints (linspace diffs jitter by a few ulp)
        d = np.diff(self.points)
        slack = 8.0 * np.finfo(float).eps * float(np.max(np.abs(self.points)))
        return float(np.ptp(d)) < 1e-12 * float(np.mean(d)) + slack

    @property
    def spacing(self) -> float:
        # only meaningful on uniform grids
        d = np.diff(self.points)
        return float(d[0])

    @property
    def n(self) -> int:
        return self.points.size


@dataclass(frozen=True)
class EigenSystem:
    """Bound-state energies (Hz, ascending) and wavefunctions on a grid.

    Wavefunctions are real, one row per state, normalized so that
    sum(psi**2) * dz = 1 on the defining grid. The array may be empty
    (zero rows) when no bound state exists below the solver cutoff.
    """

    grid: Grid1D
    energies: np.ndarray  # (k,) Hz
    wavefunctions: np.ndarray  # (k, n)

    @property
    def n_states(self) -> int:
        return int(self.energies.size)


@dataclass(frozen=True)
class FitResult:
    """Outcome of a weighted nonlinear least-squares fit."""

    parameters: dict
    param_names: tuple
    covariance: np.ndarray  # ordered like param_names
    chi2: float
    dof: int
    converged: bool
    n_iter: int = 0

    def error(self, name: str) -> float:
        """1-sigma uncertainty of one parameter from the covariance."""
        i = self.param_names.index(name)
        return float(np.sqrt(max(self.covariance[i, i], 0.0)))


# ---------------------------------------------------------------------------
# bound states


def _count_sign_changes(psi: np.ndarray) -> int:
    # node count, ignoring the near-zero tail samples
    a = psi[np.abs(psi) > 1e-8 * np.max(np.abs(psi))]
    return int(np.sum(np.signbit(a[1:]) != np.signbit(a[:-1])))


def _fd_eigs(v: np.ndarray, dz: float, mass: float, e_hi: float, vectors: bool):
    """3-point finite-difference eigenpairs below e_hi, hard walls at the ends."""
    c = HBAR / (4.0 * np.pi * mass)  # m^2 Hz, kinetic prefactor in E/h units
    vin = v[1:-1]
    diag = 2.0 * c / dz**2 + vin
    off = np.full(vin.size - 1, -c / dz**2)
    e_lo = float(np.min(vin)) - 1.0  # kinetic part is positive semi-definite
    if e_hi <= e_lo:
        return np.empty(0), np.empty((0, v.size))
    if vectors:
        w, vec = eigh_tridiagonal(diag, off, select="v", select_range=(e_lo, e_hi))
        psi = np.zeros((w.size, v.size))
        psi[:, 1:-1] = vec.T / np.sqrt(dz)
        return w, psi
    w = eigh_tridiagonal(
        diag, off, select="v", select_range=(e_lo, e_hi), eigvals_only=True
    )
    return w, None


def _check_resolution(v: np.ndarray, dz: float, mass: float, max_energy: float):
    span = max_energy - float(np.min(v))
    if span <= 0:
        return
    lam = np.sqrt(H_PLANCK / (2.0 * mass * span))  # de Broglie length at the cutoff
    if dz > lam / 10.0:
        raise ResolutionError(
            f"grid spacing {dz:.3e} m exceeds a tenth of the shortest "
            f"de Broglie wavelength {lam:.3e} m below the energy cutoff"
        )


def _order_degenerate(w: np.ndarray, psi: np.ndarray):
    # ties within 1e-12 relative are ordered by node count for determinism
    if w.size < 2 or psi is None:
        return w, psi
    order = np.arange(w.size)
    i = 0
    while i < w.size - 1:
        j = i + 1
        scale = max(abs(w[i]), 1.0)
        while j < w.size and abs(w[j] - w[i]) < 1e-12 * scale:
            j += 1
        if j - i > 1:
            nodes = [_count_sign_changes(psi[k]) for k in order[i:j]]
            order[i:j] = order[i:j][np.argsort(nodes, kind="stable")]
        i = j
    return w[order], psi[order]


def solve_bound_states(
    potential,
    grid: Grid1D,
    mass: float,
    max_energy: float,
    hard_walls: bool = False,
    extrapolate: bool = True,
) -> EigenSystem:
    """All bound eigenpairs with E < max_energy of the 1D Schrodinger problem.

    Parameters
    ----------
    potential : callable
        Vectorized map from positions (m) to energy (Hz).
    grid : Grid1D
        Uniform grid spanning the well plus evanescent tails. The potential
        at both ends must exceed max_energy unless hard_walls is set, in
        which case the grid ends are treated as physical infinite walls.
    mass : float
        Particle mass in kg.
    max_energy : float
        Energy cutoff in Hz, same reference as the potential.
    extrapolate : bool
        Refine energies by one Richardson step from a spacing-halved solve.
        Wavefunctions always stay on the caller's grid.

    Returns
    -------
    EigenSystem, possibly empty when nothing is bound below the cutoff.
    """
    if not grid.uniform:
        raise ConfigError("bound-state solver requires a uniform grid")
    pts = grid.points
    v = np.asarray(potential(pts), dtype=float)
    if v.shape != pts.shape or not np.all(np.isfinite(v)):
        raise DomainError("potential returned non-finite or misshapen values")
    if not hard_walls and not (v[0] > max_energy and v[-1] > max_energy):
        raise ConfigError(
            "grid ends do not confine the requested states; enlarge the grid "
            "or pass hard_walls=True"
        )
    _check_resolution(v, grid.spacing, mass, max_energy)

    w, psi = _fd_eigs(v, grid.spacing, mass, max_energy, vectors=True)
    if w.size == 0:
        return EigenSystem(grid, np.empty(0), np.empty((0, grid.n)))

    if extrapolate:
        fine = np.linspace(pts[0], pts[-1], 2 * grid.n - 1)
        vf = np.asarray(potential(fine), dtype=float)
        wf, _ = _fd_eigs(vf, grid.spacing / 2.0, mass, max_energy, vectors=False)
        k = min(w.size, wf.size)
        w = (4.0 * wf[:k] - w[:k]) / 3.0
        psi = psi[:k]
        keep = w < max_energy
        w, psi = w[keep], psi[keep]
        if w.size == 0:
            return EigenSystem(grid, np.empty(0), np.empty((0, grid.n)))

    # deterministic sign: largest-amplitude sample positive
    for i in range(psi.shape[0]):
        if psi[i, np.argmax(np.abs(psi[i]))] < 0:
            psi[i] = -psi[i]
    w, psi = _order_degenerate(w, psi)
    return EigenSystem(grid, w, psi)


def bound_state_energies(
    potential,
    grid: Grid1D,
    mass: float,
    max_energy: float,
    hard_walls: bool = False,
    extrapolate: bool = True,
) -> np.ndarray:
    """Energies-only fast path of solve_bound_states (no eigenvectors)."""
    if not grid.uniform:
        raise ConfigError("bound-state solver requires a uniform grid")
    pts = grid.points
    v = np.asarray(potential(pts), dtype=float)
    if not np.all(np.isfinite(v)):
        raise DomainError("potential returned non-finite values")
    if not hard_walls and not (v[0] > max_energy and v[-1] > max_energy):
        raise ConfigError("grid ends do not confine the requested states")
    _check_resolution(v, grid.spacing, mass, max_energy)
    w, _ = _fd_eigs(v, grid.spacing, mass, max_energy, vectors=False)
    if w.size and extrapolate:
        fine = np.linspace(pts[0], pts[-1], 2 * grid.n - 1)
        vf = np.asarray(potential(fine), dtype=float)
        wf, _ = _fd_eigs(vf, grid.spacing / 2.0, mass, max_energy, vectors=False)
        k = min(w.size, wf.size)
        w = (4.0 * wf[:k] - w[:k]) / 3.0
        w = w[w < max_energy]
    return w


# ---------------------------------------------------------------------------
# nonlinear least squares


def fit_nonlinear(
    model,
    x,
    y,
    sigma,
    initial: dict,
    bounds: dict | None = None,
    scales: dict | None = None,
    max_iter: int = 500,
) -> FitResult:
    """Minimize sum(((y - model(x, **p)) / sigma)**2) over the named parameters.

    Damped Gauss-Newton with a Levenberg-Marquardt damping schedule and a
    central-difference Jacobian (step 1e-6 times the parameter scale; the
    scale is |initial| unless overridden in `scales`, which is required for
    parameters starting at zero with non-unit magnitude). Bounds are applied
    by clipping. Convergence: relative chi2 change < 1e-10 on an accepted
    step, or scaled gradient norm < 1e-8. The covariance is the inverse of
    the sigma-weighted normal matrix at the optimum (no chi2/dof rescaling).
    """
    y = np.asarray(y, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    if y.size != sigma.size:
        raise DataFormatError("y and sigma lengths differ")
    if np.any(sigma <= 0) or not np.all(np.isfinite(sigma)):
        raise DataFormatError("all sigma must be positive and finite")

    names = tuple(initial)
    k = len(names)
    if y.size - k < 1:
        raise DegenerateFitError(f"{y.size} points cannot constrain {k} parameters")
    p = np.array([float(initial[n]) for n in names])
    bounds = bounds or {}
    lo = np.array([bounds.get(n, (-np.inf, np.inf))[0] for n in names], dtype=float)
    hi = np.array([bounds.get(n, (-np.inf, np.inf))[1] for n in names], dtype=float)
    if np.any(p < lo) or np.any(p > hi):
        raise ConfigError("initial parameters violate bounds")
    scales = scales or {}
    scale = np.array(
        [abs(scales.get(n, initial[n])) or 1.0 for n in names], dtype=float
    )

    def evaluate(pv):
        f = np.asarray(model(x, **dict(zip(names, pv))), dtype=float)
        return (y - f) / sigma

    def jacobian(pv):
        J = np.empty((y.size, k))
        for j in range(k):
            h = 1e-6 * scale[j]
            up = np.clip(pv[j] + h, lo[j], hi[j])
            dn = np.clip(pv[j] - h, lo[j], hi[j])
            if up == dn:
                raise DegenerateFitError(f"parameter '{names[j]}' is pinned by bounds")
            pu, pd = pv.copy(), pv.copy()
            pu[j], pd[j] = up, dn
            J[:, j] = (evaluate(pd) - evaluate(pu)) / (up - dn)  # sigma-weighted df/dp
        return J

    r = evaluate(p)
    if not np.all(np.isfinite(r)):
        raise DomainError("model is non-finite at the initial point")
    chi2 = float(r @ r)
    lam = 1e-3
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        J = jacobian(p)
        g = J.T @ r  # -(1/2) d(chi2)/dp
        if 2.0 * float(np.max(np.abs(g * scale))) < 1e-8:
            converged = True
            break
        H = J.T @ J
        d = np.diag(H)
        if np.any(~np.isfinite(d)) or np.any(d <= 0):
            raise DegenerateFitError("singular normal matrix: a parameter has no effect")
        accepted = False
        for _ in range(60):
            try:
                step = np.linalg.solve(H + lam * np.diag(d), g)
            except np.linalg.LinAlgError:
                lam *= 10.0
                continue
            p_try = np.clip(p + step, lo, hi)
            r_try = evaluate(p_try)
            chi2_try = float(r_try @ r_try) if np.all(np.isfinite(r_try)) else np.inf
            if chi2_try < chi2:
                lam = max(lam / 10.0, 1e-12)
                rel = (chi2 - chi2_try) / max(chi2, 1e-300)
                p, r, chi2 = p_try, r_try, chi2_try
                accepted = True
                if rel < 1e-10:
                    converged = True
                break
            lam *= 10.0
            if lam > 1e14:
                break
        if not accepted:
            break  # damping exhausted, no downhill step left; flag stays as-is
        if converged:
            break

    J = jacobian(p)
    H = J.T @ J
    # conditioning is judged in scaled (dimensionless) parameters, otherwise
    # honest fits with wildly different parameter magnitudes would trip it.
    # exactly redundant parameters leave the scaled normal matrix singular up
    # to finite-difference noise (condition ~1e16 or worse); a merely flat
    # direction at a boundary stays orders of magnitude below that
    H_scaled = H * np.outer(scale, scale)
    if not np.all(np.isfinite(H_scaled)) or np.linalg.cond(H_scaled) > 1e15:
        raise DegenerateFitError("parameters are degenerate at the optimum")
    try:
        cov = np.linalg.inv(H)
    except np.linalg.LinAlgError:
        raise DegenerateFitError("covariance is singular at the optimum") from None
    if not np.all(np.isfinite(cov)):
        raise DegenerateFitError("covariance is non-finite at the optimum")
    return FitResult(
        parameters=dict(zip(names, p.tolist())),
        param_names=names,
        covariance=cov,
        chi2=chi2,
        dof=y.size - k,
        converged=converged,
        n_iter=it,
    )


# ---------------------------------------------------------------------------
# ODE integration


def integrate_ode(rhs, y0, t_span, tol: float = 1e-8, t_eval=None):
    """Adaptive RK45 integration of dy/dt = rhs(t, y).

    Returns (t, y) with y shaped (len(t), len(y0)). tol is the relative
    tolerance; the absolute floor is tol * 1e-3 * max(1, |y0|).
    """
    if not (0.0 < tol <= 1e-2):
        raise ConfigError("tol must lie in (0, 1e-2]")
    y0 = np.atleast_1d(np.asarray(y0, dtype=float))
    atol = tol * 1e-3 * max(1.0, float(np.max(np.abs(y0))))
    sol = solve_ivp(
        rhs, t_span, y0, method="RK45", rtol=tol, atol=atol, t_eval=t_eval
    )
    if sol.status < 0:
        raise StiffnessError(f"integrator stalled: {sol.message}")
    return sol.t, sol.y.T


# ---------------------------------------------------------------------------
# quadrature


def gauss_legendre_panels(lo: float, hi: float, panels: int, order: int = 8):
    """Composite Gauss-Legendre nodes and weights on [lo, hi]."""
    xg, wg = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(lo, hi, panels + 1)
    half = 0.5 * (edges[1:] - edges[:-1])  # (panels,)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * xg[None, :]).ravel()
    weights = (half[:, None] * wg[None, :]).ravel()
    return nodes, weights


def quad_nd(f, lo, hi, tol: float = 1e-6, max_points: float = 6e6) -> float:
    """Deterministic tensor-product quadrature of f over an axis-aligned box.

    f maps an (N, d) array of points to (N,) values. Panels per axis double
    until two successive estimates agree to the relative tolerance.
    """
    lo = np.atleast_1d(np.asarray(lo, dtype=float))
    hi = np.atleast_1d(np.asarray(hi, dtype=float))
    if lo.size != hi.size or np.any(hi <= lo):
        raise ConfigError("box must have hi > lo on every axis")
    d = lo.size
    prev = None
    m = 1
    while (8 * m) ** d <= max_points:
        axes = [gauss_legendre_panels(lo[i], hi[i], m) for i in range(d)]
        mesh = np.meshgrid(*[a[0] for a in axes], indexing="ij")
        pts = np.stack([g.ravel() for g in mesh], axis=-1)
        vals = np.asarray(f(pts), dtype=float)
        if not np.all(np.isfinite(vals)):
            raise DomainError("integrand returned non-finite values")
        w = axes[0][1]
        for i in range(1, d):
            w = np.multiply.outer(w, axes[i][1])
        est = float(np.sum(vals.reshape(w.shape) * w))
        if prev is not None and abs(est - prev) <= tol * max(abs(est), abs(prev), 1e-300):
            return est
        prev = est
        m *= 2
    raise ResolutionError(f"quadrature did not reach tol={tol:g} within {max_points:g} points")


def erf(x):
    """Error function, elementwise."""
    return scipy.special.erf(x)
