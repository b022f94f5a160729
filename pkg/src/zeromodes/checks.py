"""Check runners behind the command-line subcommands.

Each runner takes a ``RunConfig`` and returns a list of ``VerificationReport``.
Random inputs come from ``numpy.random.default_rng`` seeded by the config, so
repeated runs reproduce every number.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import special

from . import clifford
from .fields import (
    admissible_spinor_basis,
    closed_form_dirac,
    eval_potential,
    eval_zero_mode,
    fd_dirac_at_points,
    potential_Ln_norm,
    residual_matrix,
    zero_mode_representation,
    ZeroModeParams,
)
from .grid import GridField, GridSpec, sample_field
from .identities import (
    equality_ledger,
    integral_identity_report,
    sharp_identity_tails,
    sharp_pair_tails,
    step0_defect,
    step1_defect,
    step2_defect,
    twistor_identity_defect,
    weitzenboeck_pointwise,
)
from .reports import DEFAULT_TOLERANCES, VerificationReport, timed
from .samples import BumpSpinor, compact_vector_bump, windowed
from .yamabe import (
    RadialProfile,
    constants_report,
    fit_bubble,
    gradient_check,
    radial_descent,
    sobolev_constant,
    sobolev_quotient,
    sphere_Ln_norm,
    sphere_spinor_norm_check,
    talenti_bubble,
    yamabe_functional_sphere_check,
    yamabe_sphere,
)


@dataclass(frozen=True)
class RunConfig:
    dim: int = 3
    s: int = 1
    grid: int = 129
    radius: float = 8.0
    eps: tuple[float, ...] = (0.1,)
    order: int = 4
    seed: int = 0
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))

    # small-box settings for pointwise convergence studies
    step_box: float = 1.6
    step_region: float = 0.8
    step_spacings: tuple[float, ...] = (0.2, 0.1, 0.05)
    bump_count: int = 5

    def tol(self, name: str) -> float:
        return float(self.tolerances[name])

    def settings(self) -> dict:
        d = asdict(self)
        d.pop("tolerances")
        d["eps"] = list(self.eps)
        d["step_spacings"] = list(self.step_spacings)
        return d


def _report(name, params, computed, target, tol, box) -> VerificationReport:
    return VerificationReport(name, params, computed, target, tol, runtime_ms=box[0])


def _slope(hs, errs) -> float:
    return float(np.polyfit(np.log(hs), np.log(errs), 1)[0])


# --- clifford ---------------------------------------------------------------


def gamma_check(cfg: RunConfig, dims=None, builder=None) -> list[VerificationReport]:
    builder = builder or clifford.build_representation
    out = []
    for n in dims or (cfg.dim,):
        for orientation in (1, -1):
            with timed() as box:
                rep = builder(n, orientation)
                defects = {
                    "anticommutation": clifford.anticommutation_defect(rep),
                    "skew_adjoint": clifford.skew_adjoint_defect(rep),
                    "unitarity": clifford.unitarity_defect(rep),
                }
            for key, val in defects.items():
                out.append(_report(f"clifford.{key}", {"n": n, "orientation": orientation},
                                   val, None, cfg.tol("clifford"), box))
    return out


# --- sharp zero modes -------------------------------------------------------


def _admissible(cfg: RunConfig):
    rng = np.random.default_rng(cfg.seed)
    fit_pts = rng.normal(size=(50, cfg.dim))
    held_out = rng.normal(size=(100, cfg.dim))
    return admissible_spinor_basis(cfg.dim, cfg.s, fit_pts), held_out


def nullspace_check(cfg: RunConfig) -> list[VerificationReport]:
    with timed() as box:
        ns, held_out = _admissible(cfg)
        R = residual_matrix(cfg.dim, cfg.s, held_out)
        worst = max((float(np.max(np.linalg.norm(R @ b, axis=-1))) for b in ns.basis), default=np.inf)
        imag = admissible_spinor_basis(cfg.dim, cfg.s, held_out[:50], phase="imaginary")
    p = {"n": cfg.dim, "s": cfg.s, "seed": cfg.seed}
    return [
        _report("nullspace.dimension", p, ns.dimension, 1, cfg.tol("nullspace_dimension"), box),
        _report("nullspace.held_out_residual", p, worst, None, cfg.tol("zeromode_residual"), box),
        _report("nullspace.imaginary_phase_dimension", p, imag.dimension, 0,
                cfg.tol("nullspace_dimension"), box),
    ]


def zeromode_check(cfg: RunConfig) -> list[VerificationReport]:
    out = []
    ns, held_out = _admissible(cfg)
    rep = zero_mode_representation(cfg.dim, cfg.s)
    hs = np.array(cfg.step_spacings)
    for k, psi0 in enumerate(ns.basis):
        params = ZeroModeParams(cfg.dim, cfg.s, psi0, rep=rep)
        p = {"n": cfg.dim, "s": cfg.s, "basis_index": k, "seed": cfg.seed}
        with timed() as box:
            lhs = closed_form_dirac(params, held_out)
            A = eval_potential(cfg.dim, held_out)
            rhs = 1j * clifford.clifford_apply(rep, A, eval_zero_mode(params, held_out))
            res = float(np.max(np.linalg.norm(lhs - rhs, axis=-1)))
        out.append(_report("zeromode.closed_form_residual", p, res, None,
                           cfg.tol("zeromode_residual"), box))
        with timed() as box:
            errs = [
                float(np.max(np.linalg.norm(
                    fd_dirac_at_points(lambda x: eval_zero_mode(params, x), rep, held_out, h, cfg.order)
                    - lhs, axis=-1)))
                for h in hs
            ]
            slope = _slope(hs, errs)
        out.append(_report("zeromode.fd_dirac_order", {**p, "h": hs.tolist(), "errors": errs},
                           slope, float(cfg.order), cfg.tol("fd_slope"), box))
    return out


# --- identities ---------------------------------------------------------------


def _bumps(cfg: RunConfig, N: int):
    return [BumpSpinor.random(cfg.dim, N, cfg.seed + 1000 + k) for k in range(cfg.bump_count)]


def _margin_max(psi) -> float:
    g = psi.grid
    m = g.margin
    inner = np.zeros(psi.values.shape[: g.n], dtype=bool)
    inner[(slice(m, -m),) * g.n] = True
    mod = np.linalg.norm(psi.values, axis=-1)
    return float(np.max(mod[~inner]))


def identity_fields(cfg: RunConfig, rep):
    """Named test spinors for the integral identity.

    ``sharp`` is the raw sharp spinor, integrated with analytic exterior
    tails because it does not decay inside the box; ``sharp_windowed`` is the
    same spinor under a smooth radial cutoff; the bumps are seeded Gaussians.
    """
    ns, _ = _admissible(cfg)
    params = ZeroModeParams(cfg.dim, cfg.s, ns.basis[0], rep=rep)
    R = cfg.radius
    fields = {
        "sharp": lambda x: eval_zero_mode(params, x),
        "sharp_windowed": windowed(lambda x: eval_zero_mode(params, x), R / 2, 7 * R / 8),
    }
    for k, b in enumerate(_bumps(cfg, rep.N)):
        fields[f"bump{k}"] = b
    return fields


def identity_check(cfg: RunConfig, grid_points: int | None = None,
                   pointwise: bool = True) -> list[VerificationReport]:
    rep = zero_mode_representation(cfg.dim, cfg.s)
    grid = GridSpec(cfg.dim, cfg.radius, grid_points or cfg.grid, cfg.order)
    inner = cfg.radius - grid.margin * grid.h
    out = []
    for name, fn in identity_fields(cfg, rep).items():
        psi = sample_field(fn, grid)
        with_tails = name == "sharp"
        p = {"n": cfg.dim, "field": name, "grid": grid.points, "radius": cfg.radius,
             "exterior_tails": with_tails}
        if not with_tails:
            with timed() as box:
                edge = _margin_max(psi)
            out.append(_report("identity.margin_precondition", p, edge, None,
                               cfg.tol("margin_precondition"), box))
        for eps in cfg.eps:
            with timed() as box:
                tails = sharp_identity_tails(cfg.dim, inner, eps) if with_tails else None
                r = integral_identity_report(rep, psi, eps, tails=tails)
            out.append(_report("identity.integral_defect",
                               {**p, "eps": eps, "lhs": r.lhs, "term_dirac": r.term_dirac,
                                "term_grad": r.term_grad, "term_K": r.term_K},
                               r.defect, None, cfg.tol("identity_defect"), box))
    if pointwise:
        out += pointwise_checks(cfg, rep)
    return out


def pointwise_checks(cfg: RunConfig, rep=None) -> list[VerificationReport]:
    """Step, twistor and Weitzenboeck defects on nested small-box grids."""
    rep = rep or zero_mode_representation(cfg.dim, cfg.s)
    hs = np.array(cfg.step_spacings)
    grids = [GridSpec.from_spacing(cfg.dim, cfg.step_box, h, cfg.order) for h in hs]
    region = cfg.step_region
    ref = int(np.argmin(np.abs(hs - 0.1)))
    out = []

    def emit(name, p, errs, box):
        out.append(_report(f"{name}.at_h{hs[ref]:g}", {**p, "h": float(hs[ref])},
                           errs[ref], None, cfg.tol("step_defect"), box))
        out.append(_report(f"{name}.order", {**p, "h": hs.tolist(), "errors": errs},
                           _slope(hs, errs), float(cfg.order), cfg.tol("step_slope"), box))

    for k, b in enumerate(_bumps(cfg, rep.N)):
        samples = [sample_field(b, g) for g in grids]
        p = {"n": cfg.dim, "field": f"bump{k}", "region": region}
        with timed() as box:
            errs = [twistor_identity_defect(rep, f, b.gradient, region) for f in samples]
        emit("pointwise.twistor", p, errs, box)
        with timed() as box:
            errs = [weitzenboeck_pointwise(rep, f, region) for f in samples]
        emit("pointwise.weitzenboeck", p, errs, box)
        for eps in cfg.eps:
            q = {**p, "eps": eps}
            for label, fn in (("step0", lambda f: step0_defect(f, eps, region)),
                              ("step1", lambda f: step1_defect(rep, f, eps, region)),
                              ("step2", lambda f: step2_defect(rep, f, eps, region))):
                with timed() as box:
                    errs = [fn(f) for f in samples]
                emit(f"pointwise.{label}", q, errs, box)
    return out


# --- equality ledger -------------------------------------------------------------


def sharp_ledger(cfg: RunConfig, grid_points: int, eps: float | None = None):
    ns, _ = _admissible(cfg)
    rep = zero_mode_representation(cfg.dim, cfg.s)
    params = ZeroModeParams(cfg.dim, cfg.s, ns.basis[0], rep=rep)
    grid = GridSpec(cfg.dim, cfg.radius, grid_points, cfg.order)
    psi = sample_field(lambda x: eval_zero_mode(params, x), grid)
    A = GridField(grid, eval_potential(cfg.dim, grid.coords()))
    tails = sharp_pair_tails(cfg.dim, cfg.radius - grid.margin * grid.h, eps)
    return equality_ledger(rep, psi, A, yamabe_sphere(cfg.dim), eps=eps, tails=tails)


def ledger_check(cfg: RunConfig) -> list[VerificationReport]:
    out = []
    with timed() as box:
        L = sharp_ledger(cfg, cfg.grid)
    p = {"n": cfg.dim, "s": cfg.s, "grid": cfg.grid, "radius": cfg.radius,
         "dirac_term": L.dirac_term}
    for key in ("P", "R1", "R2", "S"):
        out.append(_report(f"ledger.{key}_relative", {**p, "value": getattr(L, key)},
                           abs(getattr(L, key)) / L.dirac_term, None, cfg.tol("ledger_relative"), box))
    out.append(_report("ledger.twistor_relative", p, abs(L.P) / L.dirac_term, None,
                       cfg.tol("ledger_twistor"), box))
    out.append(_report("ledger.holder_residual", {**p, "lambda": L.holder_lambda},
                       L.holder_residual, None, cfg.tol("holder_residual"), box))
    eps_terms = []
    for eps in cfg.eps:
        with timed() as box:
            Le = sharp_ledger(cfg, cfg.grid, eps)
        terms = {k: getattr(Le, k) for k in ("P_eps", "R_eps", "R1_eps", "R2_eps", "S1_eps", "S2_eps")}
        eps_terms.append(terms)
        out.append(_report("ledger.eps_balance", {**p, "eps": eps, **terms},
                           abs(Le.balance_eps) / L.dirac_term, None, cfg.tol("ledger_relative"), box))
    if len(cfg.eps) > 1:
        order = np.argsort(cfg.eps)[::-1]
        for key in ("P_eps", "R_eps", "R1_eps", "R2_eps"):
            seq = [eps_terms[i][key] for i in order]
            ratio = max(seq[i + 1] / seq[i] for i in range(len(seq) - 1))
            out.append(_report(f"ledger.{key}_trend",
                               {**p, "eps": [cfg.eps[i] for i in order], "values": seq},
                               ratio, None, cfg.tol("eps_trend"), [0]))
    return out


# --- constants and sphere side ----------------------------------------------------


def constants_check(cfg: RunConfig, chain_dims=None) -> list[VerificationReport]:
    n = cfg.dim
    out = []
    with timed() as box:
        normA = potential_Ln_norm(n).value
        target = n / (4 * (n - 1)) * yamabe_sphere(n)
    out.append(_report("constants.sharp_norm_squared", {"n": n}, normA**2, target,
                       cfg.tol("sharp_norm") * target, box))
    for k in chain_dims or (n,):
        with timed() as box:
            c = constants_report(k)
        for i, d in enumerate(c.chain_defects):
            out.append(_report(f"constants.chain_{i}", {"n": k, "S_n": c.S_n, "Y_sphere": c.Y_sphere},
                               d, None, cfg.tol("constant_chain"), box))
    out += sphere_checks(cfg)
    with timed() as box:
        b = RadialProfile.from_function(lambda r: talenti_bubble(n, r))
        Q = sobolev_quotient(b, n)
    S = sobolev_constant(n)
    out.append(_report("constants.bubble_quotient", {"n": n, "nodes": b.nodes.size}, Q, S,
                       cfg.tol("bubble_quotient") * S, box))
    return out


def sphere_checks(cfg: RunConfig) -> list[VerificationReport]:
    n = cfg.dim
    rng = np.random.default_rng(cfg.seed + 7)
    ns, _ = _admissible(cfg)
    params = ZeroModeParams(n, cfg.s, ns.basis[0])
    out = []
    with timed() as box:
        pts = 3.0 * rng.normal(size=(200, n))
        d = sphere_spinor_norm_check(n, lambda x: eval_zero_mode(params, x), pts)
    out.append(_report("sphere.spinor_norm", {"n": n, "points": 200}, d, None,
                       cfg.tol("sphere_spinor"), box))
    with timed() as box:
        flat = potential_Ln_norm(n).value
        sph = sphere_Ln_norm(lambda x: eval_potential(n, x), n)
    out.append(_report("sphere.pullback_norm", {"n": n, "field": "sharp", "flat": flat}, sph, flat,
                       cfg.tol("pullback_norm") * flat, box))
    if n == 3:
        for k in range(5):
            A_fn = compact_vector_bump(n, cfg.seed + 100 + k)
            with timed() as box:
                flat = cube_integral_vector(A_fn, n, 4.0) ** (1 / n)
                sph = sphere_Ln_norm(A_fn, n, order=96)
            out.append(_report("sphere.pullback_norm", {"n": n, "field": f"compact{k}", "flat": flat},
                               sph, flat, cfg.tol("pullback_norm") * flat, box))
    with timed() as box:
        r = yamabe_functional_sphere_check(n)
    out.append(_report("sphere.yamabe_functional", {"n": n}, r, None, cfg.tol("sphere_functional"), box))
    return out


def cube_integral_vector(A_fn, n: int, half_width: float, panels: int = 12, order: int = 10) -> float:
    """int |A|^n over [-a, a]^n by product Gauss-Legendre (non-radial integrands)."""
    t, w = special.roots_legendre(order)
    edges = np.linspace(-half_width, half_width, panels + 1)
    lo, hi = edges[:-1, None], edges[1:, None]
    nodes = (0.5 * (hi - lo) * t + 0.5 * (hi + lo)).ravel()
    weights = (0.5 * (hi - lo) * w).ravel()
    x = np.stack(np.meshgrid(*([nodes] * n), indexing="ij"), axis=-1)
    wt = np.ones(())
    for _ in range(n):
        wt = wt[..., None] * weights
    return float(np.sum(wt * np.linalg.norm(A_fn(x), axis=-1) ** n))


# --- variational ------------------------------------------------------------------


def yamabe_check(cfg: RunConfig, steps: int = 500) -> list[VerificationReport]:
    n = cfg.dim
    S = sobolev_constant(n)
    out = []
    with timed() as box:
        g = RadialProfile.from_function(lambda r: np.exp(-r * r / 2))
        grad_err = gradient_check(g, n, count=5, seed=cfg.seed)
    out.append(_report("yamabe.gradient_vs_fd", {"n": n, "profile": "gaussian"}, grad_err, None,
                       cfg.tol("quotient_gradient"), box))
    with timed() as box:
        res = radial_descent(g, n, steps=steps)
        c, lam, misfit = fit_bubble(res.profile, n)
    p = {"n": n, "steps": int(res.trace.size - 1), "converged": res.converged}
    out.append(_report("yamabe.descent_quotient", p, res.trace[-1], S, cfg.tol("descent_quotient") * S, box))
    out.append(_report("yamabe.descent_bubble_fit", {**p, "c": c, "lambda": lam}, misfit, None,
                       cfg.tol("descent_profile"), box))
    rise = float(np.max(np.diff(res.trace))) if res.trace.size > 1 else 0.0
    out.append(_report("yamabe.trace_monotone", p, max(rise, 0.0), None, 1e-12 * S, box))
    return out


SUBCOMMANDS = {
    "gamma-check": gamma_check,
    "zeromode-verify": zeromode_check,
    "nullspace-psi0": nullspace_check,
    "identity-check": identity_check,
    "equality-ledger": ledger_check,
    "constants": constants_check,
    "yamabe-min": yamabe_check,
}


def run_all(cfg: RunConfig) -> list[VerificationReport]:
    out = gamma_check(cfg, dims=range(2, 10))
    out += nullspace_check(cfg)
    out += zeromode_check(cfg)
    out += constants_check(cfg, chain_dims=range(3, 10))
    out += yamabe_check(cfg)
    out += identity_check(cfg)
    out += ledger_check(cfg)
    return out
