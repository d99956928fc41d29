"""Schwartz-class test potentials with analytic Fourier transforms.

The expansion-coefficient machinery needs potentials whose Fourier
transform is known in closed form, positive up to phases, and rapidly
decaying, so that theta-space Monte Carlo can importance-sample from a
normalizable envelope.  Gaussians and finite signed sums of Gaussians cover
that: V(x) = sum_i c_i exp(-|x - x_i|^2 / s_i^2), with

    Vhat(xi) = sum_i c_i (s_i sqrt(pi))^d exp(-s_i^2 |xi|^2 / 4) exp(-i <x_i, xi>)

under the convention Vhat(xi) = int exp(-i<x, xi>) V(x) dx.
"""

from __future__ import annotations

import itertools
import math
import numpy as np
from scipy import integrate, optimize

__all__ = [
    "GaussianPotential",
    "GaussianMixturePotential",
    "integral_power",
    "dirichlet_energy",
    "biharmonic_energy",
    "weighted_gradient",
]


class GaussianMixturePotential:
    """A finite signed sum of isotropic Gaussian bumps in R^d."""

    def __init__(self, amplitudes, widths, centers, d: int | None = None):
        self.c = np.atleast_1d(np.asarray(amplitudes, dtype=float))
        self.s = np.atleast_1d(np.asarray(widths, dtype=float))
        centers = np.asarray(centers, dtype=float)
        if centers.ndim == 1 and d in (None, 1):
            centers = centers[:, None]
        self.x0 = centers
        if np.any(self.s <= 0):
            raise ValueError("widths must be positive")
        if not (len(self.c) == len(self.s) == len(self.x0)):
            raise ValueError("amplitudes, widths, centers must have equal length")
        self.d = int(self.x0.shape[1]) if d is None else int(d)
        if self.x0.shape[1] != self.d:
            raise ValueError("center dimension mismatch")

    # -- pointwise values ------------------------------------------------

    def _as_points(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.d == 1 and (x.ndim == 0 or x.shape[-1] != 1):
            x = x[..., None]
        return x

    def evaluate(self, x):
        x = self._as_points(x)
        d2 = ((x[..., None, :] - self.x0) ** 2).sum(axis=-1)
        val = (self.c * np.exp(-d2 / self.s**2)).sum(axis=-1)
        return float(val) if val.ndim == 0 else val

    def gradient(self, x):
        x = self._as_points(x)
        diff = x[..., None, :] - self.x0
        g = self.c * np.exp(-(diff**2).sum(axis=-1) / self.s**2) * (-2.0 / self.s**2)
        return (g[..., None] * diff).sum(axis=-2)

    def laplacian(self, x):
        x = self._as_points(x)
        diff = x[..., None, :] - self.x0
        r2 = (diff**2).sum(axis=-1)
        val = (
            self.c
            * np.exp(-r2 / self.s**2)
            * (4.0 * r2 / self.s**4 - 2.0 * self.d / self.s**2)
        ).sum(axis=-1)
        return float(val) if val.ndim == 0 else val

    def fourier(self, xi):
        """Vhat(xi); complex in general, real when every center is zero."""
        xi = self._as_points(xi)
        amp = self.c * (self.s * math.sqrt(math.pi)) ** self.d
        envelope = amp * np.exp(-self.s**2 * (xi**2).sum(axis=-1)[..., None] / 4.0)
        if np.any(self.x0):
            phase = np.exp(-1j * (xi[..., None, :] * self.x0).sum(axis=-1))
            out = (envelope * phase).sum(axis=-1)
            return complex(out) if out.ndim == 0 else out
        out = envelope.sum(axis=-1)
        return float(out) if out.ndim == 0 else out

    # -- exact functionals -----------------------------------------------

    def integral_power(self, k: int) -> float:
        """int V^k, exact: multinomial expansion over Gaussian products."""
        if k < 1:
            raise ValueError("k must be >= 1")
        prec = 1.0 / self.s**2
        total = 0.0
        for combo in itertools.product(range(len(self.c)), repeat=k):
            idx = list(combo)
            a = prec[idx]
            xs = self.x0[idx]
            A = a.sum()
            mu = (a[:, None] * xs).sum(axis=0) / A
            B = (a * (xs**2).sum(axis=1)).sum() - A * (mu**2).sum()
            total += np.prod(self.c[idx]) * math.exp(-B) * (math.pi / A) ** (self.d / 2.0)
        return float(total)

    # Quadrature fallbacks; exact closed forms live on GaussianPotential.

    def _quad_over_space(self, f):
        reach = float(np.abs(self.x0).max(initial=0.0) + 10.0 * self.s.max())
        if self.d == 1:
            val, _ = integrate.quad(
                lambda x: f(np.array([x])), -reach, reach, epsabs=1e-13, epsrel=1e-11, limit=400
            )
            return val
        if self.d == 2:
            val, _ = integrate.dblquad(
                lambda y, x: f(np.array([x, y])),
                -reach,
                reach,
                lambda x: -reach,
                lambda x: reach,
                epsabs=1e-11,
                epsrel=1e-9,
            )
            return val
        raise NotImplementedError("quadrature functionals implemented for d <= 2")

    def dirichlet_energy(self) -> float:
        return float(self._quad_over_space(lambda x: (self.gradient(x) ** 2).sum()))

    def biharmonic_energy(self) -> float:
        return float(self._quad_over_space(lambda x: self.laplacian(x) ** 2))

    def weighted_gradient(self) -> float:
        return float(
            self._quad_over_space(lambda x: self.evaluate(x) * (self.gradient(x) ** 2).sum())
        )

    # -- norms -------------------------------------------------------------

    @property
    def sup_norm(self) -> float:
        if len(self.c) == 1:
            return float(abs(self.c[0]))
        best = 0.0
        for i in range(len(self.c)):
            res = optimize.minimize(
                lambda x: -abs(self.evaluate(x)), self.x0[i], method="Nelder-Mead"
            )
            best = max(best, float(-res.fun))
        return best

    @property
    def l1_norm(self) -> float:
        if len(self.c) == 1 or (self.c > 0).all() or (self.c < 0).all():
            return float(
                np.abs(self.c * (self.s * math.sqrt(math.pi)) ** self.d).sum()
            )
        return float(self._quad_over_space(lambda x: abs(self.evaluate(x))))

    # -- theta-space importance proposal -----------------------------------

    @property
    def proposal_mass(self) -> float:
        """Normalizer of the dominating envelope sum_i |Vhat_i|; equals (2 pi)^d sum_i |c_i|."""
        return float((2.0 * math.pi) ** self.d * np.abs(self.c).sum())

    def proposal_density(self, theta):
        """Density of the envelope proposal sum_i |Vhat_i| / proposal_mass."""
        theta = self._as_points(theta)
        amp = np.abs(self.c) * (self.s * math.sqrt(math.pi)) ** self.d
        env = amp * np.exp(-self.s**2 * (theta**2).sum(axis=-1)[..., None] / 4.0)
        return env.sum(axis=-1) / self.proposal_mass

    def proposal_sample(self, rng: np.random.Generator, size) -> np.ndarray:
        """Draw theta in R^d from the envelope proposal; shape (*size, d)."""
        size = (size,) if isinstance(size, int) else tuple(size)
        weights = np.abs(self.c) / np.abs(self.c).sum()
        comp = rng.choice(len(self.c), size=size, p=weights)
        sigma = np.sqrt(2.0) / self.s[comp]
        return rng.normal(0.0, 1.0, size + (self.d,)) * sigma[..., None]


class GaussianPotential(GaussianMixturePotential):
    """Single Gaussian bump c exp(-|x - x0|^2 / s^2) with closed-form functionals."""

    def __init__(self, c: float, s: float, center=None, d: int = 1):
        if center is None:
            center = np.zeros(d)
        center = np.atleast_1d(np.asarray(center, dtype=float))
        super().__init__([c], [s], center[None, :], d=len(center))
        self.amplitude = float(c)
        self.width = float(s)

    def integral_power(self, k: int) -> float:
        if k < 1:
            raise ValueError("k must be >= 1")
        c, s, d = self.amplitude, self.width, self.d
        return c**k * (s * math.sqrt(math.pi / k)) ** d

    def dirichlet_energy(self) -> float:
        c, s, d = self.amplitude, self.width, self.d
        return c**2 * d * (math.pi / 2.0) ** (d / 2.0) * s ** (d - 2)

    def biharmonic_energy(self) -> float:
        c, s, d = self.amplitude, self.width, self.d
        return c**2 * d * (d + 2) * (math.pi / 2.0) ** (d / 2.0) * s ** (d - 4)

    def weighted_gradient(self) -> float:
        c, s, d = self.amplitude, self.width, self.d
        return (2.0 / 3.0) * c**3 * d * (math.pi / 3.0) ** (d / 2.0) * s ** (d - 2)


def integral_power(v, k: int) -> float:
    """int V^k; for k = 1 this equals fourier(0)."""
    return v.integral_power(k)


def dirichlet_energy(v) -> float:
    """int |grad V|^2, the Dirichlet form of V against the Laplacian."""
    return v.dirichlet_energy()


def biharmonic_energy(v) -> float:
    """int |Delta V|^2."""
    return v.biharmonic_energy()


def weighted_gradient(v) -> float:
    """int V |grad V|^2."""
    return v.weighted_gradient()
