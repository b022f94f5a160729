"""Sharp constants, radial Sobolev quotients and conformal transfer to the sphere.

Flat space carries no scalar curvature, so the Yamabe quotient of a radial
profile reduces (after dropping the constant c_n) to the Sobolev quotient

    Q[u] = omega^{2/n} int u'^2 r^{n-1} dr / (int u^p r^{n-1} dr)^{(n-2)/n},

p = 2n/(n-2), omega = |S^{n-1}|.  Its infimum is S_n, attained by the bubble
(1 + r^2)^{-(n-2)/2}.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np
from scipy import linalg, optimize, special

from .quadrature import pairwise_sum, sphere_volume

__all__ = [
    "sphere_volume",
    "sobolev_constant",
    "yamabe_sphere",
    "conformal_constant",
    "ConstantsReport",
    "constants_report",
    "talenti_bubble",
    "RadialProfile",
    "log_nodes",
    "sobolev_quotient",
    "sobolev_quotient_gradient",
    "gradient_check",
    "DegenerateProfileError",
    "DescentResult",
    "radial_descent",
    "fit_bubble",
    "pushforward_potential",
    "sphere_integral",
    "sphere_Ln_norm",
    "sphere_spinor_norm_check",
    "yamabe_functional_sphere_check",
]


def sobolev_constant(n: int) -> float:
    if n < 3:
        raise ValueError("the Sobolev constant needs n >= 3")
    return n * (n - 2) / 4 * sphere_volume(n) ** (2 / n)


def yamabe_sphere(n: int) -> float:
    if n < 2:
        raise ValueError("n must be at least 2")
    return n * (n - 1) * sphere_volume(n) ** (2 / n)


def conformal_constant(n: int) -> float:
    """c_n = 4(n-1)/(n-2)."""
    return 4 * (n - 1) / (n - 2)


@dataclass(frozen=True)
class ConstantsReport:
    n: int
    sphere_volume: float
    S_n: float
    Y_sphere: float
    chain_defects: tuple[float, float]

    def to_dict(self) -> dict:
        return asdict(self)


def constants_report(n: int) -> ConstantsReport:
    """n/(4(n-1)) Y = n^2/4 |S^n|^{2/n} = n/(n-2) S_n, as relative residuals."""
    vol = sphere_volume(n)
    S = sobolev_constant(n)
    Y = yamabe_sphere(n)
    mid = n * n / 4 * vol ** (2 / n)
    left = n / (4 * (n - 1)) * Y
    right = n / (n - 2) * S
    return ConstantsReport(
        n=n,
        sphere_volume=vol,
        S_n=S,
        Y_sphere=Y,
        chain_defects=(abs(left - mid) / mid, abs(right - mid) / mid),
    )


def talenti_bubble(n: int, r) -> np.ndarray:
    """(1 + r^2)^{-(n-2)/2}; ``r`` may be a radius array or points of shape (..., n)."""
    if n < 3:
        raise ValueError("n must be at least 3")
    r = np.asarray(r, dtype=float)
    r2 = np.sum(r * r, axis=-1) if r.ndim and r.shape[-1] == n and r.ndim > 1 else r * r
    return (1.0 + r2) ** (-(n - 2) / 2)


# --- radial profiles ------------------------------------------------------


class DegenerateProfileError(ValueError):
    pass


def log_nodes(r_max: float = 1e3, count: int = 4000, r_min: float = 1e-3) -> np.ndarray:
    """0 followed by ``count - 1`` log-spaced radii in [r_min, r_max]."""
    return np.concatenate([[0.0], np.geomspace(r_min, r_max, count - 1)])


@dataclass(frozen=True)
class RadialProfile:
    """Nodal values of a radial function; beyond the last node u ~ r^{-(n-2)}."""

    nodes: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.nodes, dtype=float)
        u = np.asarray(self.values, dtype=float)
        if r.ndim != 1 or r.shape != u.shape or r.size < 3:
            raise ValueError("nodes and values must be matching 1-D arrays")
        if r[0] != 0.0 or np.any(np.diff(r) <= 0):
            raise ValueError("nodes must start at 0 and increase strictly")
        if not np.all(np.isfinite(u)):
            raise ValueError("profile values must be finite")
        if np.any(u < 0):
            raise ValueError("profile values must be nonnegative")
        if not np.any(u > 0):
            raise DegenerateProfileError("profile vanishes identically")
        object.__setattr__(self, "nodes", r)
        object.__setattr__(self, "values", u)

    @classmethod
    def from_function(cls, f, nodes=None) -> "RadialProfile":
        r = log_nodes() if nodes is None else np.asarray(nodes, dtype=float)
        return cls(r, np.asarray(f(r), dtype=float))

    def with_values(self, values) -> "RadialProfile":
        return RadialProfile(self.nodes, values)


@dataclass(frozen=True)
class _Discretization:
    """Weights of the discrete numerator u^T K u and denominator."""

    n: int
    dr: np.ndarray
    grad_w: np.ndarray  # (r_{i+1}^n - r_i^n) / n, exact per interval
    mass_w: np.ndarray  # trapezoid weight times r^{n-1}
    tail_num: float  # coefficient of u_m^2
    tail_den: float  # coefficient of u_m^p

    @classmethod
    def build(cls, r: np.ndarray, n: int) -> "_Discretization":
        dr = np.diff(r)
        tw = np.zeros_like(r)
        tw[:-1] += dr / 2
        tw[1:] += dr / 2
        return cls(
            n=n,
            dr=dr,
            grad_w=(r[1:] ** n - r[:-1] ** n) / n,
            mass_w=tw * r ** (n - 1),
            tail_num=(n - 2) * r[-1] ** (n - 2),
            tail_den=r[-1] ** n / n,
        )

    @property
    def p(self) -> float:
        return 2 * self.n / (self.n - 2)

    def numerator(self, u):
        s = np.diff(u) / self.dr
        return pairwise_sum(self.grad_w * s * s) + self.tail_num * u[-1] ** 2

    def denominator(self, u):
        a = np.abs(u)
        return pairwise_sum(self.mass_w * a**self.p) + self.tail_den * a[-1] ** self.p

    def numerator_grad(self, u):
        flux = self.grad_w * np.diff(u) / self.dr**2
        g = np.zeros_like(u)
        g[:-1] -= 2 * flux
        g[1:] += 2 * flux
        g[-1] += 2 * self.tail_num * u[-1]
        return g

    def denominator_grad(self, u):
        p = self.p
        g = p * self.mass_w * np.abs(u) ** (p - 1) * np.sign(u)
        g[-1] += p * self.tail_den * abs(u[-1]) ** (p - 1) * np.sign(u[-1])
        return g

    def stiffness_banded(self) -> np.ndarray:
        """Upper banded form of K with u^T K u = numerator(u)."""
        k = self.grad_w / self.dr**2
        diag = np.zeros(k.size + 1)
        diag[:-1] += k
        diag[1:] += k
        diag[-1] += self.tail_num
        ab = np.zeros((2, diag.size))
        ab[0, 1:] = -k
        ab[1] = diag
        return ab


def _quotient(disc: _Discretization, u) -> float:
    n = disc.n
    den = disc.denominator(u)
    if not den > 0:
        raise DegenerateProfileError("zero denominator")
    return sphere_volume(n - 1) ** (2 / n) * disc.numerator(u) / den ** ((n - 2) / n)


def _quotient_grad(disc: _Discretization, u) -> np.ndarray:
    n = disc.n
    q = (n - 2) / n
    num, den = disc.numerator(u), disc.denominator(u)
    return sphere_volume(n - 1) ** (2 / n) * (
        disc.numerator_grad(u) / den**q - q * num * den ** (-q - 1) * disc.denominator_grad(u)
    )


def sobolev_quotient(profile: RadialProfile, n: int) -> float:
    """Discrete Sobolev quotient of a radial profile.

    The derivative is the difference quotient on each interval, integrated
    against the exact interval weight of r^{n-1}; the denominator uses the
    trapezoid rule on the nodes.  Both carry the analytic tail of u_m (r_m/r)^{n-2}.
    """
    return _quotient(_Discretization.build(profile.nodes, n), profile.values)


def sobolev_quotient_gradient(profile: RadialProfile, n: int) -> np.ndarray:
    return _quotient_grad(_Discretization.build(profile.nodes, n), profile.values)


def gradient_check(profile: RadialProfile, n: int, count: int = 5, seed: int = 0,
                   rel_step: float = 1e-3) -> float:
    """Max relative gap between the analytic gradient and Richardson-extrapolated
    central differences, over ``count`` random coordinates carrying mass."""
    disc = _Discretization.build(profile.nodes, n)
    u = profile.values
    g = _quotient_grad(disc, u)
    eligible = np.flatnonzero((u > 1e-3 * u.max()) & (np.abs(g) > 1e-3 * np.abs(g).max()))
    rng = np.random.default_rng(seed)
    worst = 0.0
    for i in rng.choice(eligible, size=min(count, eligible.size), replace=False):

        def central(h):
            up, um = u.copy(), u.copy()
            up[i] += h
            um[i] -= h
            return (_quotient(disc, up) - _quotient(disc, um)) / (2 * h)

        h = rel_step * u[i]
        fd = (4 * central(h / 2) - central(h)) / 3
        worst = max(worst, abs(fd - g[i]) / abs(g[i]))
    return worst


@dataclass(frozen=True)
class DescentResult:
    profile: RadialProfile
    trace: np.ndarray
    step_sizes: np.ndarray
    converged: bool


def radial_descent(
    initial: RadialProfile,
    n: int,
    steps: int = 500,
    step_size: float = 1.0,
    armijo: float = 1e-4,
    shrink: float = 0.5,
    min_step: float = 1e-12,
    tol: float = 1e-13,
) -> DescentResult:
    """Projected, H^1-preconditioned gradient descent on the discrete quotient.

    Each step solves K d = grad Q (K the stiffness matrix of the numerator),
    backtracks from ``step_size`` until the Armijo condition holds, clips to
    u >= 0 and rescales so that the denominator equals 1.
    """
    disc = _Discretization.build(initial.nodes, n)
    ab = disc.stiffness_banded()
    p = disc.p

    def normalize(v):
        den = disc.denominator(v)
        if not den > 0 or not np.isfinite(den):
            raise DegenerateProfileError("descent collapsed the profile")
        return v / den ** (1 / p)

    u = normalize(initial.values.copy())
    Q = _quotient(disc, u)
    trace, sizes = [Q], []
    converged = False
    for _ in range(steps):
        g = _quotient_grad(disc, u)
        d = linalg.solveh_banded(ab, g)
        slope = float(g @ d)
        if slope <= tol * abs(Q):
            converged = True
            break
        t = step_size
        while True:
            trial = np.maximum(u - t * d, 0.0)
            if np.any(trial > 0):
                trial = normalize(trial)
                Qt = _quotient(disc, trial)
                if Qt <= Q - armijo * t * slope:
                    break
            t *= shrink
            if t < min_step:
                raise DegenerateProfileError("line search collapsed")
        u, Q = trial, Qt
        trace.append(Q)
        sizes.append(t)
    return DescentResult(
        profile=initial.with_values(u),
        trace=np.array(trace),
        step_sizes=np.array(sizes),
        converged=converged,
    )


def fit_bubble(profile: RadialProfile, n: int) -> tuple[float, float, float]:
    """Fit c (1 + (lam r)^2)^{-(n-2)/2}; return (c, lam, relative L-infinity misfit)."""
    r, u = profile.nodes, profile.values
    scale = float(np.max(u))

    def resid(params):
        c, log_lam = params
        return c * talenti_bubble(n, np.exp(log_lam) * r) - u / scale

    sol = optimize.least_squares(resid, x0=[1.0, 0.0], xtol=1e-14, ftol=1e-14)
    c, log_lam = sol.x
    misfit = float(np.max(np.abs(resid(sol.x))))
    return c * scale, float(np.exp(log_lam)), misfit


# --- conformal transfer ---------------------------------------------------


def pushforward_potential(A, x) -> np.ndarray:
    """Frame components of the potential on the sphere: (1 + |x|^2)/2 * A(x)."""
    A = np.asarray(A, dtype=float)
    x = np.asarray(x, dtype=float)
    return 0.5 * (1.0 + np.sum(x * x, axis=-1))[..., None] * A


def _inverse_stereographic(p: np.ndarray) -> np.ndarray:
    """Sphere point (..., n+1) -> x in R^n, projecting from (0, ..., 0, 1)."""
    return p[..., :-1] / (1.0 - p[..., -1:])


def sphere_integral(F, n: int, order: int = 48) -> float:
    """Integral over the unit sphere S^n in R^{n+1} of F(points (..., n+1)).

    Product rule in hyperspherical angles: Gauss-Legendre in cos(theta_k) with
    the sin^{n-k-1} weights absorbed by Gauss-Jacobi nodes, and the periodic
    trapezoid rule on the last angle.
    """
    angle_nodes, angle_weights = [], []
    for k in range(n - 1):
        # cos(theta) = t, weight (1 - t^2)^{(n-k-2)/2}
        a = (n - k - 2) / 2
        t, w = special.roots_jacobi(order, a, a)
        angle_nodes.append(t)
        angle_weights.append(w)
    m = 2 * order
    phi = 2 * np.pi * np.arange(m) / m
    grids = np.meshgrid(*angle_nodes, phi, indexing="ij")
    wgrid = np.ones(grids[0].shape)
    for k, w in enumerate(angle_weights):
        shape = [1] * n
        shape[k] = w.size
        wgrid = wgrid * w.reshape(shape)
    wgrid = wgrid * (2 * np.pi / m)

    coords = []
    sin_prod = np.ones(grids[0].shape)
    for k in range(n - 1):
        t = grids[k]
        coords.append(sin_prod * t)
        sin_prod = sin_prod * np.sqrt(np.maximum(1.0 - t * t, 0.0))
    coords.append(sin_prod * np.cos(grids[-1]))
    coords.append(sin_prod * np.sin(grids[-1]))
    p = np.stack(coords[::-1], axis=-1)  # last coordinate is the polar axis
    return pairwise_sum(wgrid * F(p))


def sphere_Ln_norm(A_fn, n: int, order: int = 48) -> float:
    """||A-bar||_{L^n(S^n)} of the pushforward of a flat potential ``A_fn``."""

    def F(p):
        with np.errstate(divide="ignore", invalid="ignore"):
            x = _inverse_stereographic(p)
        ok = np.all(np.isfinite(x), axis=-1)
        out = np.zeros(p.shape[:-1])
        xs = x[ok]
        out[ok] = np.linalg.norm(pushforward_potential(A_fn(xs), xs), axis=-1) ** n
        return out

    return sphere_integral(F, n, order) ** (1 / n)


def sphere_spinor_norm_check(n: int, psi_fn, points) -> float:
    """max | ((1+|x|^2)/2)^{(n-1)/2} |psi(x)| - 2^{-(n-1)/2} | over ``points``."""
    x = np.asarray(points, dtype=float)
    w = (0.5 * (1.0 + np.sum(x * x, axis=-1))) ** ((n - 1) / 2)
    phi = w * np.linalg.norm(psi_fn(x), axis=-1)
    return float(np.max(np.abs(phi - 2.0 ** (-(n - 1) / 2))))


def yamabe_functional_sphere_check(n: int, phi_norm: float | None = None) -> float:
    """Residual of the sphere equality with constant |phi|.

    With |phi| = c the gradient term drops and the identity reads
    Y/c_n (c^{2n/(n-1)} |S^n|)^{(n-2)/n} = n(n-1)/c_n c^{2(n-2)/(n-1)} |S^n|.
    """
    c = 2.0 ** (-(n - 1) / 2) if phi_norm is None else phi_norm
    cn = conformal_constant(n)
    vol = sphere_volume(n)
    lhs = yamabe_sphere(n) / cn * (c ** (2 * n / (n - 1)) * vol) ** ((n - 2) / n)
    rhs = n * (n - 1) / cn * c ** (2 * (n - 2) / (n - 1)) * vol
    return abs(lhs - rhs) / abs(rhs)
