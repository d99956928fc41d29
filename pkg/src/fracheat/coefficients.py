"""Expansion coefficients of the normalized heat-trace difference.

The small-time expansion of Tr(exp(-t H_V) - exp(-t H_alpha)) / p_t(0) is

    -t int V + sum_{n,j} (-1)^{n+j} C_{n,j}(V) t^{2n/alpha + j} + remainder,

with

    C_{n,j}(V) = C_{d,alpha} / ((2 pi)^{jd} n!) *
        int_{I_j} int E[S_1^{-d/2} L_j^n] Vhat(theta_1)...Vhat(theta_{j-1})
                                          Vhat(-(theta_1+...+theta_{j-1})) dtheta dlam,

where I_j is the ordered simplex 0 < lam_j < ... < lam_1 < 1,
C_{d,alpha} = pi^{d/2} / p_1^{(alpha)}(0), and L_j is a nonnegative random
quadratic form in the partial sums gamma_k = theta_1 + ... + theta_k weighted
by the subordinator increments.  This module evaluates L_j, estimates the
C_{n,j} and the closed-family constants K1/K2/K3 and L/M/N by Monte Carlo
(deterministic quadrature at alpha = 2), and generates exponent schedules
with their validity conditions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .heat_kernel import kernel_at_zero
from .subordinator import IncrementPartition, increments_batch

__all__ = [
    "CoefficientEstimate",
    "ScheduleEntry",
    "ExponentSchedule",
    "ValidityReport",
    "c_d_alpha",
    "eval_Lj",
    "eval_Lj_compact",
    "mc_constant_K",
    "deterministic_constant_K",
    "constant_L",
    "constant_M",
    "constant_N",
    "mc_coefficient_Cnj",
    "exponent_schedule",
    "matrix_AJ",
    "validate_params",
    "phi_exponent",
    "remainder_bound",
]

_CHUNK = 1 << 20


@dataclass(frozen=True)
class CoefficientEstimate:
    value: float
    stderr: float
    n_samples: int
    params: dict = field(default_factory=dict)

    def within(self, target: float, n_sigma: float = 3.0) -> bool:
        return abs(self.value - target) <= n_sigma * self.stderr


@dataclass(frozen=True)
class ScheduleEntry:
    exponent: float
    n: int
    j: int
    sign: int


@dataclass(frozen=True)
class ExponentSchedule:
    entries: tuple
    cutoff: float

    @property
    def exponents(self) -> np.ndarray:
        return np.array([e.exponent for e in self.entries])


@dataclass(frozen=True)
class ValidityReport:
    d: int
    alpha: float
    M: int
    basic_ok: bool
    improved_ok: bool
    max_M: int


def c_d_alpha(d: int, alpha: float) -> float:
    """C_{d,alpha} = pi^{d/2} / p_1^{(alpha)}(0); equals (2 pi)^d at alpha = 2."""
    return math.pi ** (d / 2.0) / kernel_at_zero(d, alpha)


# ---------------------------------------------------------------------------
# L_j functional


def _as_theta(thetas, j: int):
    th = np.asarray(thetas, dtype=float)
    if th.ndim == 1:
        th = th[:, None]
    if th.shape[0] != j - 1:
        raise ValueError(f"need {j - 1} theta vectors, got {th.shape[0]}")
    return th


def eval_Lj(partition: IncrementPartition, thetas) -> float:
    """L_j via the manifestly nonnegative expanded form.

    L_j = S_1^{-1} [ head * sum_k inc_k |gamma_k|^2
                     + sum_{r<s} inc_r inc_s |gamma_r - gamma_s|^2 ],
    a sum of nonnegative terms, immune to the cancellation of the compact
    form near degenerate lambda.
    """
    th = _as_theta(thetas, partition.j)
    gam = np.cumsum(th, axis=0)
    inc = np.asarray(partition.increments)
    g2 = (gam**2).sum(axis=1)
    val = partition.head * float((inc * g2).sum())
    jm1 = inc.size
    for r in range(jm1 - 1):
        cross = ((gam[r] - gam[r + 1 :]) ** 2).sum(axis=1)
        val += float((inc[r] * inc[r + 1 :] * cross).sum())
    val /= partition.total
    if val < 0.0:
        if val > -1e-12 * (partition.total * g2.sum() + 1e-300):
            return 0.0
        raise FloatingPointError(f"L_j came out negative: {val}")
    return val


def eval_Lj_compact(partition: IncrementPartition, thetas) -> float:
    """L_j by its defining compact form (subtractive; testing only)."""
    th = _as_theta(thetas, partition.j)
    gam = np.cumsum(th, axis=0)
    inc = np.asarray(partition.increments)
    g2 = (gam**2).sum(axis=1)
    lead = float((inc * g2).sum())
    vec = (inc[:, None] * gam).sum(axis=0)
    return lead - float((vec**2).sum()) / partition.total


def _lj_batch(heads, incs, totals, thetas):
    # thetas: (n, j-1, d);  heads/totals: (n,);  incs: (n, j-1)
    gam = np.cumsum(thetas, axis=1)
    g2 = (gam**2).sum(axis=2)
    val = heads * (incs * g2).sum(axis=1)
    jm1 = incs.shape[1]
    for r in range(jm1 - 1):
        cross = ((gam[:, r, None, :] - gam[:, r + 1 :, :]) ** 2).sum(axis=2)
        val += (incs[:, r, None] * incs[:, r + 1 :] * cross).sum(axis=1)
    return val / totals


# ---------------------------------------------------------------------------
# K constants


def _k_validity(which: str, d: int, alpha: float) -> None:
    if alpha == 2.0:
        return
    if which in ("K1", "K3"):
        ok = (d >= 2) or (alpha > 0.5)
    elif which == "K2":
        ok = alpha > {1: 1.5, 2: 1.0, 3: 0.5}.get(d, 0.0)
    else:
        raise ValueError(f"unknown constant {which!r}")
    if not ok:
        raise ValueError(f"{which} is outside its validity range at d={d}, alpha={alpha}")


def _sorted_simplex(rng, n, j):
    # uniform on I_j: sort j uniforms, descending; density j! on the simplex
    return np.sort(rng.uniform(0.0, 1.0, (n, j)), axis=1)[:, ::-1]


def _mc_accumulate(sample_fn, n_samples):
    total = 0.0
    total2 = 0.0
    done = 0
    while done < n_samples:
        m = min(_CHUNK, n_samples - done)
        f = sample_fn(m)
        total += f.sum()
        total2 += (f * f).sum()
        done += m
    mean = total / n_samples
    var = max(total2 - n_samples * mean * mean, 0.0) / max(n_samples - 1, 1)
    return mean, math.sqrt(var / n_samples)


def mc_constant_K(
    which: str, d: int, alpha: float, n_samples: int, rng: np.random.Generator
) -> CoefficientEstimate:
    """Monte Carlo estimate of K1, K2 or K3.

    K1 = int_{I_2} E[ S*_{1-w} S*_w / (S*_{1-w}+S*_w)^{1+d/2} ],  w = lam_1-lam_2,
    K2 the same with squared numerator and exponent 2 + d/2, and K3 the
    I_3 integral of the symmetrized pair products over (head, inc_1, inc_2).
    Sampling: lam uniform on the simplex, increments exact; the estimator
    averages the integrand times the simplex volume.
    """
    _k_validity(which, d, alpha)
    j = 3 if which == "K3" else 2
    vol = 1.0 / math.factorial(j)

    def sample_fn(m):
        lam = _sorted_simplex(rng, m, j)
        heads, incs, totals = increments_batch(alpha, lam, rng)
        if which == "K1":
            return incs[:, 0] * heads / totals ** (1.0 + d / 2.0)
        if which == "K2":
            return (incs[:, 0] * heads) ** 2 / totals ** (2.0 + d / 2.0)
        pair = heads * incs[:, 0] + heads * incs[:, 1] + incs[:, 0] * incs[:, 1]
        return pair / totals ** (1.0 + d / 2.0)

    mean, se = _mc_accumulate(sample_fn, n_samples)
    return CoefficientEstimate(
        value=vol * mean,
        stderr=vol * se,
        n_samples=n_samples,
        params={"which": which, "d": d, "alpha": alpha},
    )


def deterministic_constant_K(which: str, d: int) -> float:
    """Exact quadrature of K1/K2/K3 at alpha = 2 (deterministic increments).

    Values are d-independent there since the total is exactly 1:
    K1 = 1/12, K2 = 1/60, K3 = 1/24.
    """
    if which == "K1":
        f = lambda l2, l1: (1.0 - (l1 - l2)) * (l1 - l2)
    elif which == "K2":
        f = lambda l2, l1: ((1.0 - (l1 - l2)) * (l1 - l2)) ** 2
    elif which == "K3":
        def g(l3, l2, l1):
            s1, s2 = l1 - l2, l2 - l3
            s0 = 1.0 - (l1 - l3)
            return s0 * s1 + s0 * s2 + s1 * s2

        val, _ = integrate.tplquad(
            g, 0, 1, lambda l1: 0, lambda l1: l1, lambda l1, l2: 0, lambda l1, l2: l2,
            epsabs=1e-13, epsrel=1e-13,
        )
        return val
    else:
        raise ValueError(f"unknown constant {which!r}")
    val, _ = integrate.dblquad(
        f, 0, 1, lambda l1: 0, lambda l1: l1, epsabs=1e-14, epsrel=1e-14
    )
    return val


def _scaled_constant(which, d, alpha, n_samples, rng, factor):
    if alpha == 2.0:
        k = deterministic_constant_K(which, d)
        return CoefficientEstimate(
            value=factor * k, stderr=0.0, n_samples=0,
            params={"which": which, "d": d, "alpha": alpha, "path": "quadrature"},
        )
    est = mc_constant_K(which, d, alpha, n_samples, rng)
    return CoefficientEstimate(
        value=factor * est.value, stderr=factor * est.stderr,
        n_samples=n_samples, params=est.params,
    )


def constant_L(d, alpha, n_samples, rng) -> CoefficientEstimate:
    """L_{d,alpha} = C_{d,alpha} K1 / (2 pi)^d, the t^{2+2/alpha} prefactor:
    C_{1,2}(V) = L_{d,alpha} int |grad V|^2.  Tends to 1/12 as alpha -> 2."""
    factor = c_d_alpha(d, alpha) / (2.0 * math.pi) ** d
    return _scaled_constant("K1", d, alpha, n_samples, rng, factor)


def constant_N(d, alpha, n_samples, rng) -> CoefficientEstimate:
    """N_{d,alpha} = C_{d,alpha} K2 / (2 (2 pi)^d):
    C_{2,2}(V) = N_{d,alpha} int |Delta V|^2.  Tends to 1/120 as alpha -> 2."""
    factor = c_d_alpha(d, alpha) / (2.0 * (2.0 * math.pi) ** d)
    return _scaled_constant("K2", d, alpha, n_samples, rng, factor)


def constant_M(d, alpha, n_samples, rng) -> CoefficientEstimate:
    """M_{d,alpha} = 2 C_{d,alpha} K3 / (2 pi)^d, the t^{3+2/alpha} prefactor:
    C_{1,3}(V) = M_{d,alpha} int V |grad V|^2.  Tends to 1/12 as alpha -> 2.

    The factor 2 comes from int V^2 (-Delta V) = 2 int V |grad V|^2 when the
    three quadratic slots of L_3 are reduced to the weighted-gradient
    functional; with it, the alpha -> 2 limit of the prefactor is
    2 * K3 = 1/12 as expected from the classical expansion.
    """
    factor = 2.0 * c_d_alpha(d, alpha) / (2.0 * math.pi) ** d
    return _scaled_constant("K3", d, alpha, n_samples, rng, factor)


# ---------------------------------------------------------------------------
# Full Fourier-side coefficients


def mc_coefficient_Cnj(
    V, n: int, j: int, d: int, alpha: float, n_samples: int, rng: np.random.Generator
) -> CoefficientEstimate:
    """Importance-sampled Monte Carlo estimate of C_{n,j}(V).

    lam is uniform on the simplex I_j; each theta_i is drawn from the
    normalized envelope of |Vhat| (exact for the Gaussian family); the
    estimator carries the sign and phase through the product
    Vhat(-(theta_1+..+theta_{j-1})) * prod_i Vhat(theta_i) divided by the
    proposal density.  For n = 0 this reduces to int V^j / j!, the
    convention gate for all (2 pi) powers and simplex volumes.
    """
    if j < 2:
        raise ValueError("j must be >= 2 (the j = 1 term is -t int V)")
    if n < 0:
        raise ValueError("n must be >= 0")
    if V.d != d:
        raise ValueError(f"potential dimension {V.d} != d={d}")
    if n > 0 and alpha < 2.0:
        max_m = validate_params(d, alpha, max(n, 1)).max_M
        if n > max_m:
            raise ValueError(
                f"validity violated for n={n} at d={d}, alpha={alpha}: "
                f"M < (d+alpha)/2 violated and (d<=3, M<=2) M/2 - d/4 < alpha/2 "
                f"violated for every M >= {n} (max admissible M = {max_m})"
            )
    if V.proposal_mass == 0.0:
        return CoefficientEstimate(0.0, 0.0, n_samples,
                                   params={"n": n, "j": j, "d": d, "alpha": alpha})
    pref = c_d_alpha(d, alpha) / (
        (2.0 * math.pi) ** (j * d) * math.factorial(n) * math.factorial(j)
    )

    def sample_fn(m):
        lam = _sorted_simplex(rng, m, j)
        heads, incs, totals = increments_batch(alpha, lam, rng)
        th = V.proposal_sample(rng, (m, j - 1))
        gam_last = th.sum(axis=1)
        w = V.fourier(-gam_last)
        for i in range(j - 1):
            w = w * V.fourier(th[:, i, :])
        w = np.real(w) / np.prod(V.proposal_density(th), axis=1)
        ljn = _lj_batch(heads, incs, totals, th) ** n if n > 0 else 1.0
        return totals ** (-d / 2.0) * ljn * w

    mean, se = _mc_accumulate(sample_fn, n_samples)
    return CoefficientEstimate(
        value=pref * mean,
        stderr=pref * se,
        n_samples=n_samples,
        params={"n": n, "j": j, "d": d, "alpha": alpha},
    )


# ---------------------------------------------------------------------------
# Schedules and validity


def phi_exponent(J: int, M: int, alpha: float) -> float:
    """Cutoff Phi_{J+1}(M) = min{J+1, 2 + 2M/alpha} of the expansion error."""
    return min(J + 1.0, 2.0 + 2.0 * M / alpha)


def exponent_schedule(J: int, M: int, alpha: float, d: int) -> ExponentSchedule:
    """All admissible powers 2n/alpha + j below the cutoff, with labels and signs.

    Includes the (n, j) = (0, 1) linear term; the (n, j) range is
    0 <= n <= M-1, 2 <= j <= J filtered by exponent < Phi_{J+1}(M).
    """
    if J < 2 or M < 1:
        raise ValueError("need J >= 2 and M >= 1")
    cutoff = phi_exponent(J, M, alpha)
    entries = [ScheduleEntry(exponent=1.0, n=0, j=1, sign=-1)]
    for j in range(2, J + 1):
        for n in range(0, M):
            e = 2.0 * n / alpha + j
            if e < cutoff:
                entries.append(ScheduleEntry(e, n, j, (-1) ** (n + j)))
    entries.sort(key=lambda s: (s.exponent, s.j, s.n))
    return ExponentSchedule(entries=tuple(entries), cutoff=cutoff)


def matrix_AJ(J: int, alpha: float) -> np.ndarray:
    """The (J-1)x(J-1) lower-triangular matrix of candidate powers.

    a_{r,s} = (r - s + 2) + (2/alpha)(s - 1) for s <= r (1-indexed), i.e.
    n = s - 1 and j = r - s + 2 with n + j = r + 1; zero above the diagonal.
    """
    if J < 2:
        raise ValueError("J must be >= 2")
    A = np.zeros((J - 1, J - 1))
    for r in range(1, J):
        for s in range(1, r + 1):
            A[r - 1, s - 1] = (r - s + 2) + (2.0 / alpha) * (s - 1)
    return A


def validate_params(d: int, alpha: float, M: int) -> ValidityReport:
    """Admissibility of the Taylor order M at (d, alpha).

    basic_ok is the moment condition M < (d + alpha)/2; improved_ok the
    d <= 3, M <= 2 refinement M/2 - d/4 < alpha/2 (equivalently
    M < alpha + d/2).  max_M is the largest M admissible under either.
    """
    if d < 1 or M < 1 or not (0.0 < alpha < 2.0):
        raise ValueError("need d >= 1, M >= 1, 0 < alpha < 2")

    def basic(m):
        return m < (d + alpha) / 2.0

    def improved(m):
        return d <= 3 and m <= 2 and m < alpha + d / 2.0

    max_m = 0
    m = 1
    while basic(m) or improved(m):
        max_m = m
        m += 1
    return ValidityReport(
        d=d, alpha=alpha, M=M, basic_ok=basic(M), improved_ok=improved(M), max_M=max_m
    )


def remainder_bound(V, J: int, d: int, t: float) -> float:
    """Diagnostic constant bounding |r_{J+1}(t)| / p_t^{(alpha)}(0):

    (2 pi)^{(J+2)d} ||V||_inf^J exp(t ||V||_inf) ||V||_1 / (J+1)!  for t in (0,1).
    """
    if not (0.0 < t < 1.0):
        raise ValueError("t must lie in (0, 1)")
    sup = V.sup_norm
    return (
        (2.0 * math.pi) ** ((J + 2) * d)
        * sup**J
        * math.exp(t * sup)
        * V.l1_norm
        / math.factorial(J + 1)
    )
