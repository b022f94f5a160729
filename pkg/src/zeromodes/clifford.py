"""Clifford algebra representations with the geometric sign convention.

Generators satisfy ``g_i g_j + g_j g_i = -2 delta_ij`` and are skew-adjoint,
so Clifford multiplication by a real vector is skew-adjoint for the standard
Hermitian inner product on spinors.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_I = np.eye(2, dtype=complex)

ALGEBRA_TOL = 1e-14


class DimensionError(ValueError):
    pass


class ShapeError(ValueError):
    pass


def _kron(*factors: np.ndarray) -> np.ndarray:
    return reduce(np.kron, factors, np.eye(1, dtype=complex))


def hermitian_generators(n: int, orientation: int = 1) -> list[np.ndarray]:
    """Hermitian matrices a_1..a_n with a_i a_j + a_j a_i = 2 delta_ij.

    Even part is the Jordan-Wigner tower (Z...Z X I...I, Z...Z Y I...I).
    For odd n the last generator is ``orientation * Z^{(x)k}``, the chirality
    element of the even-dimensional tower; the two orientations give the two
    inequivalent irreducible modules.
    """
    if n < 1:
        raise DimensionError(f"dimension must be >= 1, got {n}")
    if orientation not in (1, -1):
        raise ValueError("orientation must be +1 or -1")
    k = n // 2
    out = []
    for j in range(k):
        pre = [_Z] * j
        post = [_I] * (k - j - 1)
        out.append(_kron(*pre, _X, *post))
        out.append(_kron(*pre, _Y, *post))
    if n % 2:
        out.append(orientation * _kron(*([_Z] * k)))
    return out


@dataclass(frozen=True)
class CliffordRep:
    """Complex N x N generators of Cl(n) with N = 2**(n // 2)."""

    n: int
    generators: np.ndarray  # shape (n, N, N)
    orientation: int = 1

    @property
    def N(self) -> int:
        return self.generators.shape[-1]

    def __getitem__(self, i: int) -> np.ndarray:
        return self.generators[i]

    def matrix(self, v) -> np.ndarray:
        """The matrix of Clifford multiplication by ``v``: sum_i v_i g_i."""
        v = np.asarray(v)
        if v.shape[-1] != self.n:
            raise ShapeError(f"vector of length {v.shape[-1]} for Cl({self.n})")
        return np.tensordot(v, self.generators, axes=([-1], [0]))


def build_representation(n: int, orientation: int = 1) -> CliffordRep:
    """Skew-adjoint generators g_i = i * a_i for n >= 2.

    Deterministic: the same (n, orientation) always yields the same matrices.
    """
    if n < 2:
        raise DimensionError(f"Clifford representation needs n >= 2, got {n}")
    gens = np.array([1j * a for a in hermitian_generators(n, orientation)])
    return CliffordRep(n=n, generators=gens, orientation=orientation)


def clifford_apply(rep: CliffordRep, v, psi) -> np.ndarray:
    """(sum_i v_i g_i) psi.

    Broadcasts over leading axes: ``v`` of shape (..., n) and ``psi`` of shape
    (..., N) give a result of shape (..., N).
    """
    v = np.asarray(v)
    psi = np.asarray(psi)
    if v.shape[-1] != rep.n:
        raise ShapeError(f"vector has {v.shape[-1]} components, rep has n={rep.n}")
    if psi.shape[-1] != rep.N:
        raise ShapeError(f"spinor has {psi.shape[-1]} components, rep has N={rep.N}")
    # sum_i v_i (g_i psi)
    gpsi = np.einsum("iab,...b->...ia", rep.generators, psi)
    return np.einsum("...i,...ia->...a", v, gpsi)


def anticommutation_defect(rep: CliffordRep) -> float:
    """max_ij ||g_i g_j + g_j g_i + 2 delta_ij I||_inf (entrywise max)."""
    g = rep.generators
    eye = np.eye(g.shape[-1])
    worst = 0.0
    for i in range(len(g)):
        for j in range(len(g)):
            d = g[i] @ g[j] + g[j] @ g[i] + 2.0 * (i == j) * eye
            worst = max(worst, float(np.abs(d).max()))
    return worst


def skew_adjoint_defect(rep: CliffordRep) -> float:
    g = rep.generators
    return float(np.abs(g + np.conj(np.swapaxes(g, -1, -2))).max())


def unitarity_defect(rep: CliffordRep) -> float:
    g = rep.generators
    gh = np.conj(np.swapaxes(g, -1, -2))
    return float(np.abs(gh @ g - np.eye(g.shape[-1])).max())


def volume_element(rep: CliffordRep) -> np.ndarray:
    return reduce(np.matmul, rep.generators)
