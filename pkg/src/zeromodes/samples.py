"""Smooth test fields with analytic derivatives."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class BumpSpinor:
    """exp(-|x-c|^2 / (2 w^2)) * (p0 + (x-c) @ P)."""

    center: np.ndarray
    width: float
    p0: np.ndarray
    P: np.ndarray  # (n, N)

    @classmethod
    def random(cls, n: int, N: int, seed: int, width: float = 1.0,
               slope: float = 0.3, offset: float = 0.2) -> "BumpSpinor":
        rng = np.random.default_rng(seed)

        def cvec(*shape):
            return rng.normal(size=shape) + 1j * rng.normal(size=shape)

        p0 = cvec(N)
        p0 /= np.linalg.norm(p0)
        P = slope * cvec(n, N) / np.sqrt(2 * N)
        return cls(offset * rng.normal(size=n), width, p0, P)

    def _parts(self, x):
        y = np.asarray(x, dtype=float) - self.center
        env = np.exp(-np.sum(y * y, axis=-1) / (2 * self.width**2))[..., None]
        poly = self.p0 + y @ self.P
        return y, env, poly

    def __call__(self, x) -> np.ndarray:
        _, env, poly = self._parts(x)
        return env * poly

    def gradient(self, x) -> np.ndarray:
        """Shape (..., n, N)."""
        y, env, poly = self._parts(x)
        dpoly = self.P  # (n, N)
        denv = -y / self.width**2  # (..., n), relative to env
        return env[..., None] * (dpoly + denv[..., :, None] * poly[..., None, :])

    def scaled(self, c: complex) -> "BumpSpinor":
        return BumpSpinor(self.center, self.width, c * self.p0, c * self.P)


def _flat_bump(t):
    out = np.zeros_like(t)
    pos = t > 0
    out[pos] = np.exp(-1.0 / t[pos])
    return out


def smooth_cutoff(r, r_in: float, r_out: float) -> np.ndarray:
    """C-infinity step: 1 for r <= r_in, 0 for r >= r_out."""
    t = (np.asarray(r, dtype=float) - r_in) / (r_out - r_in)
    a = _flat_bump(1.0 - t)
    b = _flat_bump(t)
    return a / (a + b)


def windowed(fn, r_in: float, r_out: float):
    """x -> chi(|x|) fn(x) for a spinor-valued callable."""

    def g(x):
        x = np.asarray(x, dtype=float)
        chi = smooth_cutoff(np.linalg.norm(x, axis=-1), r_in, r_out)
        return chi[..., None] * fn(x)

    return g


def compact_vector_bump(n: int, seed: int):
    """Random smooth compactly supported vector field (support in a ball of radius < 3)."""
    rng = np.random.default_rng(seed)
    c = rng.uniform(-1.0, 1.0, size=n)
    v = rng.normal(size=n)
    rad = rng.uniform(1.0, 2.0)

    def A(x):
        x = np.asarray(x, dtype=float)
        t = np.sum((x - c) ** 2, axis=-1) / rad**2
        out = np.zeros_like(t)
        inside = t < 1
        out[inside] = np.exp(-1.0 / (1.0 - t[inside]))
        return out[..., None] * v

    return A
