"""Closed-form sharp zero modes on R^n (n odd).

The pair is

    A(x)   = n (1+|x|^2)^-2 [ (1-|x|^2) e1 + 2 x1 x + 2 L x ],
    psi(x) = (1+|x|^2)^(-n/2) (1 + c x.) psi0,

with L the block rotation generator below.  Under the skew-adjoint convention
(g_i^2 = -1) the equation D psi = i A.psi at x = 0 forces g_1 psi0 = i c psi0,
so c must be real: c = s.  The imaginary coefficient c = i s is kept as
``phase="imaginary"`` for comparison; its admissible set is empty.

The sign s picks which of the two inequivalent odd-dimensional Clifford
modules carries the solution (see ``zero_mode_representation``).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .clifford import CliffordRep, ShapeError, build_representation, clifford_apply
from .quadrature import RadialIntegral, radial_integral

NULLSPACE_RTOL = 1e-10


class ParityError(ValueError):
    pass


def _check_odd(n: int) -> None:
    if n < 3 or n % 2 == 0:
        raise ParityError(f"sharp zero modes need odd n >= 3, got {n}")


def zero_mode_representation(n: int, s: int) -> CliffordRep:
    """The Clifford module in which the sign-s family solves the equation."""
    if s not in (1, -1):
        raise ValueError("s must be +1 or -1")
    return build_representation(n, orientation=s)


def _coefficient(s: int, phase: str) -> complex:
    if phase == "real":
        return complex(s)
    if phase == "imaginary":
        return 1j * s
    raise ValueError(f"unknown phase convention {phase!r}")


@dataclass(frozen=True)
class ZeroModeParams:
    n: int
    s: int
    psi0: np.ndarray
    phase: str = "real"
    rep: CliffordRep = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        _check_odd(self.n)
        if self.s not in (1, -1):
            raise ValueError("s must be +1 or -1")
        psi0 = np.asarray(self.psi0, dtype=complex)
        N = 2 ** (self.n // 2)
        if psi0.shape != (N,):
            raise ShapeError(f"psi0 must have {N} components")
        if abs(np.linalg.norm(psi0) - 1.0) > 1e-12:
            raise ValueError("psi0 must have unit norm")
        object.__setattr__(self, "psi0", psi0)
        if self.rep is None:
            object.__setattr__(self, "rep", zero_mode_representation(self.n, self.s))

    @property
    def coefficient(self) -> complex:
        return _coefficient(self.s, self.phase)


def build_skew_generator(n: int) -> np.ndarray:
    """Zero first row/column, then 2x2 blocks [[0, -1], [1, 0]]."""
    _check_odd(n)
    L = np.zeros((n, n))
    for k in range(1, n, 2):
        L[k, k + 1] = -1.0
        L[k + 1, k] = 1.0
    return L


def eval_potential(n: int, x) -> np.ndarray:
    """A(x) for x of shape (..., n)."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != n:
        raise ShapeError(f"point has {x.shape[-1]} coordinates, expected {n}")
    L = build_skew_generator(n)
    r2 = np.sum(x * x, axis=-1)[..., None]
    e1 = np.zeros(n)
    e1[0] = 1.0
    a = (1.0 - r2) * e1 + 2.0 * x[..., :1] * x + 2.0 * x @ L.T
    return n * a / (1.0 + r2) ** 2


def spinor_matrix(rep: CliffordRep, c: complex, x) -> np.ndarray:
    """M(x) with psi(x) = M(x) psi0; shape (..., N, N)."""
    x = np.asarray(x, dtype=float)
    n = rep.n
    r2 = np.sum(x * x, axis=-1)[..., None, None]
    eye = np.eye(rep.N)
    return (1.0 + r2) ** (-n / 2) * (eye + c * rep.matrix(x))


def dirac_matrix(rep: CliffordRep, c: complex, x) -> np.ndarray:
    """Analytic D applied to M(x): -n (1+|x|^2)^(-n/2-1) (x. + c)."""
    x = np.asarray(x, dtype=float)
    n = rep.n
    r2 = np.sum(x * x, axis=-1)[..., None, None]
    eye = np.eye(rep.N)
    return -n * (1.0 + r2) ** (-n / 2 - 1) * (rep.matrix(x) + c * eye)


def eval_zero_mode(params: ZeroModeParams, x) -> np.ndarray:
    M = spinor_matrix(params.rep, params.coefficient, x)
    return M @ params.psi0


def closed_form_dirac(params: ZeroModeParams, x) -> np.ndarray:
    M = dirac_matrix(params.rep, params.coefficient, x)
    return M @ params.psi0


def residual_matrix(n: int, s: int, x, phase: str = "real", rep: CliffordRep | None = None):
    """R(x) with R(x) psi0 = D psi(x) - i A(x).psi(x); shape (..., N, N)."""
    _check_odd(n)
    rep = rep or zero_mode_representation(n, s)
    c = _coefficient(s, phase)
    A = eval_potential(n, x)
    return dirac_matrix(rep, c, x) - 1j * rep.matrix(A) @ spinor_matrix(rep, c, x)


@dataclass(frozen=True)
class NullspaceResult:
    basis: np.ndarray  # (d, N), orthonormal rows
    singular_values: np.ndarray
    threshold: float

    @property
    def dimension(self) -> int:
        return self.basis.shape[0]


def admissible_spinor_basis(
    n: int,
    s: int,
    sample_points,
    phase: str = "real",
    rtol: float = NULLSPACE_RTOL,
    rep: CliffordRep | None = None,
) -> NullspaceResult:
    """Orthonormal basis of the common nullspace of R(x) over the sample points."""
    pts = np.asarray(sample_points, dtype=float)
    N = 2 ** (n // 2)
    if pts.ndim != 2 or pts.shape[0] < N:
        raise ValueError(f"need at least {N} sample points of dimension {n}")
    stacked = residual_matrix(n, s, pts, phase, rep).reshape(-1, N)
    _, sv, vh = np.linalg.svd(stacked)
    thr = rtol * sv[0]
    rank = int(np.sum(sv > thr))
    basis = np.conj(vh[rank:])
    basis = basis / np.linalg.norm(basis, axis=1, keepdims=True)
    return NullspaceResult(basis=basis, singular_values=sv, threshold=thr)


def sharp_params(n: int, s: int = 1, seed: int = 0, n_points: int = 50) -> ZeroModeParams:
    """Parameters with psi0 taken from the numerically admissible set."""
    rng = np.random.default_rng(seed)
    ns = admissible_spinor_basis(n, s, rng.normal(size=(n_points, n)))
    if ns.dimension == 0:
        raise LookupError(f"no admissible base spinor for n={n}, s={s}")
    return ZeroModeParams(n=n, s=s, psi0=ns.basis[0])


def potential_Ln_norm(n: int, scale: float = 1.0) -> RadialIntegral:
    """||scale * A||_{L^n(R^n)} via radial quadrature of |A| = n / (1 + r^2).

    Returns a RadialIntegral whose ``value`` is the norm (not its n-th power).
    """
    _check_odd(n)
    q = radial_integral(lambda r: (scale * n / (1.0 + r * r)) ** n, n)
    p = 1.0 / n
    return RadialIntegral(
        value=q.value**p,
        core=q.core,
        tail=q.tail,
        r_split=q.r_split,
        error_estimate=q.error_estimate * p * q.value ** (p - 1.0),
    )


FD4 = (np.array([1.0, -8.0, 8.0, -1.0]) / 12.0, np.array([-2, -1, 1, 2]))
FD2 = (np.array([-0.5, 0.5]), np.array([-1, 1]))


def fd_dirac_at_points(fn, rep: CliffordRep, x, h: float, order: int = 4) -> np.ndarray:
    """Pointwise central-difference Dirac operator of a spinor-valued callable."""
    weights, offsets = FD4 if order == 4 else FD2
    x = np.asarray(x, dtype=float)
    out = 0.0
    for i in range(rep.n):
        e = np.zeros(rep.n)
        e[i] = h
        d = sum(w * fn(x + k * e) for w, k in zip(weights, offsets)) / h
        out = out + d @ rep.generators[i].T
    return out
