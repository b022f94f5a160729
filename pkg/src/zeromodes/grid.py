"""Uniform box grids on R^n and finite-difference operators on sampled fields.

Derivative operators are evaluated on the interior subgrid only: each
application trims ``stencil_order // 2`` sites from every side.  A field
remembers how many sites it has lost (``trim``); binary operations first
``restrict`` both operands to the larger trim.
"""

from __future__ import annotations

import csv
import struct
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .clifford import CliffordRep
from .quadrature import pairwise_sum

# first derivative, second derivative: (weights, offsets)
_D1 = {
    2: (np.array([-0.5, 0.5]), (-1, 1)),
    4: (np.array([1.0, -8.0, 8.0, -1.0]) / 12.0, (-2, -1, 1, 2)),
}
_D2 = {
    2: (np.array([1.0, -2.0, 1.0]), (-1, 0, 1)),
    4: (np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0, (-2, -1, 0, 1, 2)),
}


class StencilError(ValueError):
    pass


@dataclass(frozen=True)
class GridSpec:
    n: int
    half_width: float
    points: int
    stencil_order: int = 4

    def __post_init__(self):
        if self.half_width <= 0:
            raise ValueError("half_width must be positive")
        if self.stencil_order not in _D1:
            raise ValueError("stencil_order must be 2 or 4")
        if self.points < max(9, 2 * self.stencil_order + 1):
            raise StencilError(
                f"{self.points} points per axis is too few for order {self.stencil_order}"
            )

    @property
    def h(self) -> float:
        return 2.0 * self.half_width / (self.points - 1)

    @property
    def margin(self) -> int:
        return self.stencil_order // 2

    def axis(self, trim: int = 0) -> np.ndarray:
        x = np.linspace(-self.half_width, self.half_width, self.points)
        return x[trim : self.points - trim] if trim else x

    def coords(self, trim: int = 0) -> np.ndarray:
        """Site coordinates, shape (k,)*n + (n,) with k = points - 2*trim."""
        ax = self.axis(trim)
        return np.stack(np.meshgrid(*([ax] * self.n), indexing="ij"), axis=-1)

    def refined(self) -> "GridSpec":
        """Same box, half the spacing (coarse sites stay grid sites)."""
        return replace(self, points=2 * self.points - 1)

    @classmethod
    def from_spacing(cls, n: int, half_width: float, h: float, stencil_order: int = 4):
        m = int(round(2 * half_width / h)) + 1
        return cls(n=n, half_width=half_width, points=m, stencil_order=stencil_order)


@dataclass(frozen=True)
class GridField:
    """Values on the grid sites left after trimming ``trim`` sites per side.

    ``values`` has shape (k,)*n + component_shape.
    """

    grid: GridSpec
    values: np.ndarray
    trim: int = 0

    @property
    def site_shape(self) -> tuple:
        k = self.grid.points - 2 * self.trim
        return (k,) * self.grid.n

    @property
    def component_shape(self) -> tuple:
        return self.values.shape[self.grid.n :]

    def coords(self) -> np.ndarray:
        return self.grid.coords(self.trim)

    def with_values(self, values) -> "GridField":
        return type(self)(self.grid, np.asarray(values), self.trim)


class SpinorField(GridField):
    pass


class ScalarField(GridField):
    pass


class VectorField(GridField):
    pass


def restrict(field: GridField, trim: int) -> GridField:
    """Crop a field to a deeper interior."""
    extra = trim - field.trim
    if extra < 0:
        raise StencilError("cannot restrict to a shallower trim")
    if extra == 0:
        return field
    sl = (slice(extra, -extra),) * field.grid.n
    return type(field)(field.grid, field.values[sl], trim)


def common_trim(*fields: GridField) -> list[GridField]:
    t = max(f.trim for f in fields)
    return [restrict(f, t) for f in fields]


def sample_field(f, grid: GridSpec, kind=SpinorField) -> GridField:
    """Evaluate a vectorized callable on all sites; ``f`` maps (..., n) -> (..., *comp)."""
    return kind(grid, np.asarray(f(grid.coords())))


def _shifted(values: np.ndarray, n: int, axis: int, shift: int, margin: int) -> np.ndarray:
    size = values.shape[0]
    sl = [slice(margin, size - margin)] * n
    sl[axis] = slice(margin + shift, size - margin + shift)
    return values[tuple(sl)]


def _check_size(field: GridField, margin: int) -> None:
    k = field.values.shape[0]
    if k - 2 * margin < 1:
        raise StencilError(f"{k} sites per axis cannot absorb a margin of {margin}")


def partial_fd(field: GridField, axis: int) -> np.ndarray:
    """Central difference along ``axis`` on the interior; values only."""
    grid = field.grid
    m = grid.margin
    _check_size(field, m)
    weights, offsets = _D1[grid.stencil_order]
    out = 0.0
    for w, k in zip(weights, offsets):
        out = out + w * _shifted(field.values, grid.n, axis, k, m)
    return out / grid.h


def gradient_fd(field: GridField) -> GridField:
    """Per-direction derivatives, component shape (n,) + field components."""
    grid = field.grid
    parts = [partial_fd(field, a) for a in range(grid.n)]
    axis = grid.n  # first component axis
    kind = VectorField if isinstance(field, ScalarField) else GridField
    return kind(grid, np.stack(parts, axis=axis), field.trim + grid.margin)


def _clifford_contract(rep: CliffordRep, grad: np.ndarray, n: int) -> np.ndarray:
    # grad has shape sites + (n, N); returns sum_j g_j grad_j
    return np.einsum("jab,...jb->...a", rep.generators, grad)


def dirac_fd(rep: CliffordRep, field: SpinorField) -> SpinorField:
    grad = gradient_fd(field)
    return SpinorField(field.grid, _clifford_contract(rep, grad.values, field.grid.n), grad.trim)


def twistor_fd(rep: CliffordRep, field: SpinorField) -> GridField:
    """Components nabla_j psi + (1/n) g_j D psi, shape sites + (n, N)."""
    n = field.grid.n
    grad = gradient_fd(field)
    d = _clifford_contract(rep, grad.values, n)
    gd = np.einsum("jab,...b->...ja", rep.generators, d)
    return GridField(field.grid, grad.values + gd / n, grad.trim)


def laplacian_fd(field: GridField) -> GridField:
    grid = field.grid
    m = grid.margin
    _check_size(field, m)
    weights, offsets = _D2[grid.stencil_order]
    out = 0.0
    for a in range(grid.n):
        for w, k in zip(weights, offsets):
            out = out + w * _shifted(field.values, grid.n, a, k, m)
    return type(field)(grid, out / grid.h**2, field.trim + m)


def weitzenboeck_defect(rep: CliffordRep, field: SpinorField) -> float:
    """||D^2 psi + Laplacian psi|| / ||Laplacian psi|| on the common interior; 0/0 -> 0."""
    d2 = dirac_fd(rep, dirac_fd(rep, field))
    lap = restrict(laplacian_fd(field), d2.trim)
    num = np.sqrt(pairwise_sum(np.abs(d2.values + lap.values) ** 2))
    den = np.sqrt(pairwise_sum(np.abs(lap.values) ** 2))
    if den == 0.0:
        return 0.0
    return float(num / den)


def spinor_norm(field: GridField) -> ScalarField:
    v = field.values
    return ScalarField(field.grid, np.sqrt(np.sum(v.real**2 + v.imag**2, axis=-1)), field.trim)


def squared_norm(field: GridField, ncomp_axes: int = 1) -> ScalarField:
    """Sum of |.|^2 over the trailing ``ncomp_axes`` component axes."""
    v = field.values
    axes = tuple(range(v.ndim - ncomp_axes, v.ndim))
    return ScalarField(field.grid, np.sum(v.real**2 + v.imag**2, axis=axes), field.trim)


def regularized_norm(field: GridField, eps: float) -> ScalarField:
    """sqrt(|psi|^2 + eps^2)."""
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")
    sq = squared_norm(field).values
    return ScalarField(field.grid, np.sqrt(sq + eps * eps), field.trim)


def trapezoid_weights_1d(k: int) -> np.ndarray:
    w = np.ones(k)
    w[0] = w[-1] = 0.5
    return w


def integrate(field: GridField) -> float:
    """Composite trapezoid rule over the field's own (interior) box.

    The product weights times h^n are applied and the terms are reduced with
    a fixed pairwise tree.
    """
    grid = field.grid
    vals = np.asarray(field.values)
    if vals.ndim != grid.n:
        raise ValueError("integrate expects a scalar field")
    k = vals.shape[0]
    w1 = trapezoid_weights_1d(k)
    weighted = vals
    for a in range(grid.n):
        shape = [1] * grid.n
        shape[a] = k
        weighted = weighted * w1.reshape(shape)
    return pairwise_sum(weighted) * grid.h**grid.n


# --- serialization --------------------------------------------------------

_HEADER = struct.Struct("<qqdq")  # n, m, R, N


def write_binary(field: SpinorField, path) -> None:
    """Header (n, m, R, N) then row-major complex pairs as little-endian float64."""
    grid = field.grid
    vals = np.asarray(field.values, dtype=complex)
    N = vals.shape[-1] if vals.ndim > grid.n else 1
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(grid.n, vals.shape[0], grid.half_width - field.trim * grid.h, N))
        fh.write(np.ascontiguousarray(vals).astype("<c16").tobytes())


def read_binary(path, stencil_order: int = 4) -> SpinorField:
    raw = Path(path).read_bytes()
    n, m, R, N = _HEADER.unpack_from(raw)
    data = np.frombuffer(raw, dtype="<c16", offset=_HEADER.size)
    shape = (m,) * n + ((N,) if N > 1 else ())
    grid = GridSpec(n=n, half_width=R, points=m, stencil_order=stencil_order)
    return SpinorField(grid, data.reshape(shape).astype(complex))


def write_csv(field: GridField, path) -> None:
    """One row per site: coordinates, then real/imag parts of each component."""
    n = field.grid.n
    coords = field.coords().reshape(-1, n)
    vals = np.asarray(field.values).reshape(coords.shape[0], -1)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        head = [f"x{i}" for i in range(n)]
        for c in range(vals.shape[1]):
            head += [f"re{c}", f"im{c}"]
        w.writerow(head)
        for x, v in zip(coords, vals):
            row = [repr(float(t)) for t in x]
            for z in v:
                row += [repr(float(np.real(z))), repr(float(np.imag(z)))]
            w.writerow(row)
