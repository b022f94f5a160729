"""Pointwise and integrated identities for the regularized zero-mode quotient.

Notation: rho = |psi|_eps = sqrt(|psi|^2 + eps^2), a = n/(n-1), b = (n-2)/(n-1).
Every identity is checked by assembling its two sides from different
finite-difference paths, so agreement is a genuine consistency test.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .clifford import CliffordRep, clifford_apply
from .grid import (
    GridField,
    ScalarField,
    SpinorField,
    common_trim,
    dirac_fd,
    gradient_fd,
    integrate,
    laplacian_fd,
    regularized_norm,
    restrict,
    spinor_norm,
    squared_norm,
    twistor_fd,
)
from .quadrature import exterior_of_cube_integral


class DegenerateInputError(ValueError):
    pass


def _exponents(n: int) -> tuple[float, float]:
    return n / (n - 1), (n - 2) / (n - 1)


def _scalar(field: GridField, values) -> ScalarField:
    return ScalarField(field.grid, np.asarray(values), field.trim)


def _max_in_region(values: np.ndarray, field: GridField, region: float | None) -> float:
    if region is None:
        return float(np.max(values)) if values.size else 0.0
    x = field.grid.coords(field.trim)
    mask = np.max(np.abs(x), axis=-1) <= region + 1e-12
    sel = values[mask]
    return float(np.max(sel)) if sel.size else 0.0


def _rho(field: SpinorField, eps: float | None) -> ScalarField:
    return regularized_norm(field, eps) if eps else spinor_norm(field)


# --- pointwise steps ------------------------------------------------------


def step0_defect(field: SpinorField, eps: float, region: float | None = None) -> float:
    """Max defect among Re<psi, grad psi>, |psi| grad|psi|, rho grad rho."""
    grad = gradient_fd(field)
    m = grad.trim
    psi = restrict(field, m).values
    a = np.real(np.einsum("...c,...jc->...j", np.conj(psi), grad.values))

    mod = spinor_norm(field)
    b = restrict(mod, m).values[..., None] * gradient_fd(mod).values
    rho = regularized_norm(field, eps)
    c = restrict(rho, m).values[..., None] * gradient_fd(rho).values

    def dist(u, v):
        return np.linalg.norm(u - v, axis=-1)

    d = np.maximum(np.maximum(dist(a, b), dist(a, c)), dist(b, c))
    return _max_in_region(d, grad, region)


def _step_parts(field: SpinorField, eps: float):
    n = field.grid.n
    a, b = _exponents(n)
    rho = regularized_norm(field, eps)
    phi = SpinorField(field.grid, field.values / rho.values[..., None] ** a, field.trim)
    rho_b = _scalar(rho, rho.values**b)
    return rho, phi, rho_b


def step1_defect(rep: CliffordRep, field: SpinorField, eps: float,
                 region: float | None = None) -> float:
    """|grad(psi/rho^a)|^2 rho^2 against its expansion through grad psi and grad rho^b."""
    n = field.grid.n
    rho, phi, rho_b = _step_parts(field, eps)
    gphi = gradient_fd(phi)
    m = gphi.trim
    r = restrict(rho, m).values
    lhs = np.sum(np.abs(gphi.values) ** 2, axis=(-2, -1)) * r**2

    gpsi2 = np.sum(np.abs(gradient_fd(field).values) ** 2, axis=(-2, -1))
    grb2 = np.sum(gradient_fd(rho_b).values ** 2, axis=-1)
    psi2 = restrict(squared_norm(field), m).values
    bracket = (n / (n - 2)) ** 2 * psi2 / r**2 - 2 * n * (n - 1) / (n - 2) ** 2
    rhs = gpsi2 / r ** (2 / (n - 1)) + grb2 * bracket
    return _max_in_region(np.abs(lhs - rhs), gphi, region)


def step2_defect(rep: CliffordRep, field: SpinorField, eps: float,
                 region: float | None = None) -> float:
    """|D(psi/rho^a)|^2 rho^2 against its expansion with the cross term Re<D psi, grad rho . psi>."""
    n = field.grid.n
    rho, phi, rho_b = _step_parts(field, eps)
    dphi = dirac_fd(rep, phi)
    m = dphi.trim
    r = restrict(rho, m).values
    lhs = np.sum(np.abs(dphi.values) ** 2, axis=-1) * r**2

    dpsi = dirac_fd(rep, field).values
    grb2 = np.sum(gradient_fd(rho_b).values ** 2, axis=-1)
    grho = gradient_fd(rho).values
    psi = restrict(field, m).values
    psi2 = np.sum(np.abs(psi) ** 2, axis=-1)
    cross = np.real(np.sum(np.conj(dpsi) * clifford_apply(rep, grho, psi), axis=-1))
    rhs = (
        np.sum(np.abs(dpsi) ** 2, axis=-1) / r ** (2 / (n - 1))
        + (n / (n - 2)) ** 2 * grb2 * psi2 / r**2
        - 2 * n / (n - 1) * cross / r ** (2 / (n - 1) + 1)
    )
    return _max_in_region(np.abs(lhs - rhs), dphi, region)


def twistor_identity_defect(rep: CliffordRep, field: SpinorField, exact_gradient,
                            region: float | None = None) -> float:
    """Max |sum_j |T_j psi|^2 - (|grad psi|^2 - |D psi|^2 / n)|.

    The left side comes from ``twistor_fd``; the right side from the analytic
    gradient ``exact_gradient(x) -> (..., n, N)``.
    """
    n = field.grid.n
    tw = twistor_fd(rep, field)
    lhs = np.sum(np.abs(tw.values) ** 2, axis=(-2, -1))
    g = exact_gradient(tw.coords())
    d = np.einsum("jab,...jb->...a", rep.generators, g)
    rhs = np.sum(np.abs(g) ** 2, axis=(-2, -1)) - np.sum(np.abs(d) ** 2, axis=-1) / n
    return _max_in_region(np.abs(lhs - rhs), tw, region)


def diamagnetic_excess(field: SpinorField, region: float | None = None) -> float:
    """max(|grad|psi||^2 - |grad psi|^2); nonpositive up to discretization."""
    mod = spinor_norm(field)
    gm = gradient_fd(mod)
    lhs = np.sum(gm.values**2, axis=-1)
    rhs = np.sum(np.abs(gradient_fd(field).values) ** 2, axis=(-2, -1))
    return _max_in_region(lhs - rhs, gm, region)


# --- integral identity ----------------------------------------------------


@dataclass(frozen=True)
class IdentityReport:
    lhs: float
    term_dirac: float
    term_grad: float
    term_K: float
    defect: float
    n: int
    eps: float
    h: float
    provenance: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def integral_identity_report(rep: CliffordRep, field: SpinorField, eps: float,
                             K_field: GridField | None = None,
                             tails: dict | None = None) -> IdentityReport:
    """Integrate both sides of the regularized twistor identity.

    lhs        = int |T(psi/rho^a)|^2 rho^2
    term_dirac = (n-1)/n int |D psi|^2 / rho^{2/(n-1)}
    term_grad  = (n-1)/(n-2)^2 int |grad rho^b|^2 [2(n-1) - n |psi|^2/rho^2]
    term_K     = int Re<psi, K psi> / rho^{2/(n-1)}

    ``tails`` may add the part of each raw integral (before the constant
    prefactors) lying outside the integrated box, under keys ``lhs``,
    ``dirac`` and ``grad``; see ``sharp_identity_tails``.
    """
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")
    n = field.grid.n
    rho, phi, rho_b = _step_parts(field, eps)

    tw = twistor_fd(rep, phi)
    m = tw.trim
    r = restrict(rho, m).values
    tails = tails or {}
    lhs = integrate(_scalar(tw, np.sum(np.abs(tw.values) ** 2, axis=(-2, -1)) * r**2))
    lhs += tails.get("lhs", 0.0)

    w = r ** (-2 / (n - 1))
    dpsi = dirac_fd(rep, field)
    term_dirac = (n - 1) / n * (
        integrate(_scalar(dpsi, np.sum(np.abs(dpsi.values) ** 2, axis=-1) * w)) + tails.get("dirac", 0.0)
    )

    grb = gradient_fd(rho_b)
    psi2 = restrict(squared_norm(field), m).values
    bracket = 2 * (n - 1) - n * psi2 / r**2
    term_grad = (n - 1) / (n - 2) ** 2 * (
        integrate(_scalar(grb, np.sum(grb.values**2, axis=-1) * bracket)) + tails.get("grad", 0.0)
    )

    if K_field is None:
        term_K = 0.0
        k_path = "flat: K = 0"
    else:
        K = restrict(K_field, m).values
        psi = restrict(field, m).values
        kpsi = np.einsum("...ab,...b->...a", K, psi)
        term_K = integrate(_scalar(tw, np.real(np.sum(np.conj(psi) * kpsi, axis=-1)) * w))
        k_path = "K_field"

    defect = abs(lhs - (term_dirac - term_grad - term_K)) / max(abs(lhs), 1.0)
    return IdentityReport(
        lhs=lhs,
        term_dirac=term_dirac,
        term_grad=term_grad,
        term_K=term_K,
        defect=defect,
        n=n,
        eps=eps,
        h=field.grid.h,
        provenance={
            "lhs": "twistor_fd(psi / rho^a)",
            "term_dirac": "dirac_fd(psi)",
            "term_grad": "gradient_fd(rho^b)",
            "term_K": k_path,
            "tails": ",".join(sorted(tails)) or "none",
        },
    )


# --- equality ledger ------------------------------------------------------


@dataclass(frozen=True)
class EqualityLedger:
    n: int
    P: float
    R1: float
    R2: float
    S: float
    balance: float
    dirac_term: float
    norm_A_sq: float
    yamabe_constant_used: float
    holder_lambda: float
    holder_residual: float
    eps: float | None = None
    P_eps: float | None = None
    R_eps: float | None = None
    R1_eps: float | None = None
    R2_eps: float | None = None
    S1_eps: float | None = None
    S2_eps: float | None = None
    balance_eps: float | None = None

    def to_dict(self) -> dict:
        return asdict(self)


def holder_fit(A_abs: np.ndarray, psi_abs: np.ndarray, n: int) -> tuple[float, float]:
    """Weighted least squares for |A| = lam |psi|^{2/(n-1)}, weight |psi|^{2/(n-1)}."""
    v = psi_abs ** (2 / (n - 1))
    lam = float(np.sum(v * v * A_abs) / np.sum(v * v * v))
    resid = float(np.max(np.abs(A_abs - lam * v)) / np.max(A_abs))
    return lam, resid


def equality_ledger(
    rep: CliffordRep,
    psi: SpinorField,
    A: GridField,
    yamabe_constant: float,
    eps: float | None = None,
    norm_A_sq: float | None = None,
    tails: dict | None = None,
) -> EqualityLedger:
    """Terms of the decomposition P + R1 + R2 = S for a flat pair (A, psi).

    Each integral is a trapezoid sum over the common interior box; ``tails``
    optionally adds the contribution of R^n outside that box, keyed by
    integral name (see ``sharp_pair_tails``).  The norm ||A||^2_{L^n} is taken
    from ``norm_A_sq`` if given, else from the (tail-completed) grid integral.
    """
    n = psi.grid.n
    a, b = _exponents(n)
    cn = 4 * (n - 1) / (n - 2)
    q = (n - 2) / n
    tails = tails or {}
    m = psi.grid.margin

    def integ(name, f: GridField):
        return integrate(restrict(f, m)) + tails.get(name, 0.0)

    mod = spinor_norm(psi)
    inner = restrict(mod, m).values
    if np.min(inner) <= 0.0:
        raise DegenerateInputError("|psi| vanishes at an interior site")

    A_abs = np.linalg.norm(A.values, axis=-1)
    I_An = integ("An", _scalar(A, A_abs**n))
    nA2 = I_An ** (2 / n) if norm_A_sq is None else norm_A_sq

    phi = SpinorField(psi.grid, psi.values / mod.values[..., None] ** a)
    tw = twistor_fd(rep, phi)
    P = integ("twist", _scalar(tw, np.sum(np.abs(tw.values) ** 2, axis=(-2, -1)) * inner**2))

    u = _scalar(mod, mod.values**b)
    gu = gradient_fd(u)
    I_grad = integ("grad", _scalar(gu, np.sum(gu.values**2, axis=-1)))
    I_psi = integ("psi", _scalar(mod, mod.values ** (2 * n / (n - 1))))
    I_A2 = integ("A2psi", _scalar(mod, A_abs**2 * mod.values ** (2 * (n - 2) / (n - 1))))

    dpsi = dirac_fd(rep, psi)
    dirac_term = (n - 1) / n * integ(
        "dirac", _scalar(dpsi, np.sum(np.abs(dpsi.values) ** 2, axis=-1) * inner ** (-2 / (n - 1)))
    )

    J = I_psi**q
    R1 = (n - 1) / n * (nA2 * J - I_A2)
    R2 = (n - 1) / (n - 2) * (I_grad - yamabe_constant / cn * J)
    S = ((n - 1) / n * nA2 - yamabe_constant / 4) * J
    lam, resid = holder_fit(restrict(_scalar(A, A_abs), m).values, inner, n)

    out = dict(
        n=n, P=P, R1=R1, R2=R2, S=S, balance=P + R1 + R2 - S, dirac_term=dirac_term,
        norm_A_sq=nA2, yamabe_constant_used=yamabe_constant,
        holder_lambda=lam, holder_residual=resid,
    )
    if eps is not None:
        if not eps > 0:
            raise ValueError(f"eps must be positive, got {eps}")
        rho = regularized_norm(psi, eps)
        phi_e = SpinorField(psi.grid, psi.values / rho.values[..., None] ** a)
        tw_e = twistor_fd(rep, phi_e)
        r_in = restrict(rho, m).values
        P_e = integ("twist_eps", _scalar(tw_e, np.sum(np.abs(tw_e.values) ** 2, axis=(-2, -1)) * r_in**2))
        rb = _scalar(rho, rho.values**b)
        grb = gradient_fd(rb)
        grb2 = np.sum(grb.values**2, axis=-1)
        I_grad_e = integ("grad_eps", _scalar(grb, grb2))
        R_e = n * (n - 1) / (n - 2) ** 2 * integ("R_eps", _scalar(grb, grb2 * eps**2 / r_in**2))
        w = mod.values**2 * rho.values ** (-2 / (n - 1))
        J1 = integ("J1", _scalar(mod, w ** (n / (n - 2))))
        I_A2e = integ("A2psi_eps", _scalar(mod, A_abs**2 * w))
        ut = np.maximum(rho.values**b - eps**b, 0.0)
        J2 = integ("J2", _scalar(mod, ut ** (2 * n / (n - 2))))
        R1_e = (n - 1) / n * (nA2 * J1**q - I_A2e)
        R2_e = (n - 1) / (n - 2) * (I_grad_e - yamabe_constant / cn * J2**q)
        S1_e = (n - 1) / n * nA2 * J1**q - (n - 1) / (n - 2) * yamabe_constant / cn * J2**q
        S2_e = 0.0  # scalar curvature vanishes on flat space
        out.update(
            eps=eps, P_eps=P_e, R_eps=R_e, R1_eps=R1_e, R2_eps=R2_e, S1_eps=S1_e, S2_eps=S2_e,
            balance_eps=P_e + R_e + R1_e + R2_e - S1_e - S2_e,
        )
    return EqualityLedger(**out)


def sharp_pair_profiles(n: int, eps: float | None = None) -> dict:
    """Radial integrands of every ledger integral for the sharp pair.

    All of them depend on |x| only: |psi| = (1+r^2)^{-(n-1)/2}, |A| = n/(1+r^2),
    and for phi = g(r) (1 + s x.)psi0 one has |T phi|^2 = (1 - 1/n) g'^2 (1+r^2).
    """
    a, b = _exponents(n)

    def q(r):
        return (1 + r * r) ** (-(n - 1) / 2)

    def qp(r):
        return -(n - 1) * r * (1 + r * r) ** (-(n + 1) / 2)

    prof = {
        "twist": lambda r: 0.0 * r,
        "grad": lambda r: (n - 2) ** 2 * r * r * (1 + r * r) ** (-n),
        "psi": lambda r: (1 + r * r) ** (-n),
        "A2psi": lambda r: n * n * (1 + r * r) ** (-n),
        "An": lambda r: n**n * (1 + r * r) ** (-n),
        "dirac": lambda r: n * n * (1 + r * r) ** (-n),
    }
    if eps is not None:

        def rho(r):
            return np.sqrt(q(r) ** 2 + eps * eps)

        def rhop(r):
            return q(r) * qp(r) / rho(r)

        def gp(r):
            f = (1 + r * r) ** (-n / 2)
            fp = -n * r * (1 + r * r) ** (-n / 2 - 1)
            return fp * rho(r) ** (-a) - a * f * rho(r) ** (-a - 1) * rhop(r)

        def grb2(r):
            return (b * rho(r) ** (b - 1) * rhop(r)) ** 2

        def w(r):
            return q(r) ** 2 * rho(r) ** (-2 / (n - 1))

        def id_dirac(r):
            return n * n * (1 + r * r) ** (-n - 1) * rho(r) ** (-2 / (n - 1))

        def id_grad(r):
            return grb2(r) * (2 * (n - 1) - n * q(r) ** 2 / rho(r) ** 2)

        prof.update(
            id_dirac=id_dirac,
            id_grad=id_grad,
            twist_eps=lambda r: (1 - 1 / n) * gp(r) ** 2 * (1 + r * r) * rho(r) ** 2,
            grad_eps=grb2,
            R_eps=lambda r: grb2(r) * eps**2 / rho(r) ** 2,
            J1=lambda r: w(r) ** (n / (n - 2)),
            A2psi_eps=lambda r: (n / (1 + r * r)) ** 2 * w(r),
            J2=lambda r: np.maximum(rho(r) ** b - eps**b, 0.0) ** (2 * n / (n - 2)),
        )
    return prof


def sharp_identity_tails(n: int, half_width: float, eps: float) -> dict:
    """Exterior contributions for ``integral_identity_report`` on the sharp pair."""
    prof = sharp_pair_profiles(n, eps)
    keys = {"lhs": "twist_eps", "dirac": "id_dirac", "grad": "id_grad"}
    return {k: exterior_of_cube_integral(prof[v], n, half_width) for k, v in keys.items()}


def sharp_pair_tails(n: int, half_width: float, eps: float | None = None) -> dict:
    """Contributions from outside [-a, a]^n for each ledger integral of the sharp pair.

    The ``dirac`` entry is the raw integral of |D psi|^2/|psi|^{2/(n-1)}; the
    ledger applies the (n-1)/n factor itself.
    """
    return {
        name: exterior_of_cube_integral(g, n, half_width)
        for name, g in sharp_pair_profiles(n, eps).items()
        if not name.startswith("id_")
    }


def weitzenboeck_pointwise(rep: CliffordRep, field: SpinorField, region: float | None = None) -> float:
    """Max |D^2 psi + Laplacian psi| over the interior (flat space, K = 0)."""
    d2 = dirac_fd(rep, dirac_fd(rep, field))
    lap = restrict(laplacian_fd(field), d2.trim)
    return _max_in_region(np.linalg.norm(d2.values + lap.values, axis=-1), d2, region)
