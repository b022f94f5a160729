"""Deterministic reductions and radial quadrature with polynomial tails."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate, special


def pairwise_sum(values) -> float:
    """Sum with a fixed binary-tree order over the C-ordered flattening.

    The tree shape depends only on the number of entries, so the result is
    bit-reproducible regardless of how the array was produced.
    """
    x = np.ascontiguousarray(values, dtype=float).ravel()
    if x.size == 0:
        return 0.0
    while x.size > 1:
        if x.size % 2:
            x = np.append(x, 0.0)
        x = x[0::2] + x[1::2]
    return float(x[0])


def sphere_volume(n: int) -> float:
    """Volume of the unit n-sphere in R^{n+1}: 2 pi^{(n+1)/2} / Gamma((n+1)/2).

    n = 0 gives 2, the counting measure of S^0, as needed by radial integrals on R^1.
    """
    if n < 0:
        raise ValueError("sphere dimension must be nonnegative")
    return 2.0 * math.pi ** ((n + 1) / 2) / math.gamma((n + 1) / 2)


@dataclass(frozen=True)
class RadialIntegral:
    value: float
    core: float
    tail: float
    r_split: float
    error_estimate: float


def radial_integral(
    g: Callable[[float], float],
    n: int,
    *,
    r_split: float = 50.0,
    rel_tol: float = 1e-12,
) -> RadialIntegral:
    """Integral over R^n of the radial function g(|x|).

    Adaptive Gauss-Kronrod on [0, r_split]; the tail is mapped onto (0, 1]
    with r = r_split / t, which is regular for integrands decaying at least
    like r^{-n-1}.
    """
    omega = sphere_volume(n - 1)

    def core_f(r):
        return g(r) * r ** (n - 1)

    def tail_f(t):
        if t == 0.0:
            return 0.0
        r = r_split / t
        return g(r) * r ** (n - 1) * r_split / (t * t)

    core, e1 = integrate.quad(core_f, 0.0, r_split, epsabs=0.0, epsrel=rel_tol, limit=400)
    tail, e2 = integrate.quad(tail_f, 0.0, 1.0, epsabs=0.0, epsrel=rel_tol, limit=400)
    return RadialIntegral(
        value=omega * (core + tail),
        core=omega * core,
        tail=omega * tail,
        r_split=r_split,
        error_estimate=omega * (e1 + e2),
    )


def cube_integral(g: Callable[[np.ndarray], np.ndarray], n: int, half_width: float,
                  panels: int = 16, order: int = 8) -> float:
    """Integral of the radial function g(|x|) over [-a, a]^n by composite Gauss-Legendre.

    Uses the reflection symmetry of radial integrands: integrates over [0, a]^n
    and multiplies by 2^n.
    """
    t, w = special.roots_legendre(order)
    edges = np.linspace(0.0, half_width, panels + 1)
    lo, hi = edges[:-1, None], edges[1:, None]
    nodes = (0.5 * (hi - lo) * t + 0.5 * (hi + lo)).ravel()
    weights = (0.5 * (hi - lo) * w).ravel()
    r2 = np.zeros(())
    wt = np.ones(())
    for _ in range(n):
        r2 = r2[..., None] + nodes**2
        wt = wt[..., None] * weights
    return float(2**n * pairwise_sum(wt * g(np.sqrt(r2))))


def exterior_of_cube_integral(g: Callable, n: int, half_width: float, **kw) -> float:
    """Integral of g(|x|) over R^n minus the cube [-a, a]^n.

    Whole-space radial quadrature minus the cube quadrature; ``g`` must accept
    both scalars and arrays.
    """
    whole = radial_integral(lambda r: float(g(np.asarray(r))), n, **kw).value
    return whole - cube_integral(g, n, half_width)
