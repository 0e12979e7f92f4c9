"""Gibbs transition kernels for the four shrinkage regression samplers.

All four samplers share the Gaussian linear model on centered/standardized
data, an inverse-gamma prior IG(nu0/2, eta0/2) on the error variance, and a
conditional Laplace prior on the coefficients expressed through its
normal-exponential mixture: ``beta_j | sigma2, tau2_j ~ N(0, sigma2*tau2_j)``
with ``tau2_j ~ Exponential(lambda1_sq/2)`` and ``lambda1_sq ~ Gamma(r1,
delta1)``. They differ in how coefficient differences are fused:

* ``blasso`` — no fusion (plain Bayesian lasso).
* ``bfl``    — Laplace fusion of successive differences through a second
  normal-exponential mixture with per-difference scales ``tilde_tau2_j`` and
  hyperparameter ``lambda2_sq ~ Gamma(r2, delta2)``.
* ``bfh``    — horseshoe fusion of successive differences: local scales
  ``lambda2_j`` and a global scale ``tilde_tau2``, each half-Cauchy through
  the inverse-gamma auxiliary decomposition (auxiliaries ``nu_j`` and ``xi``).
* ``bhh``    — horseshoe fusion of every pairwise difference; the global
  scale ``tilde_tau2`` is held fixed as a tuning value and never updated
  (nor is any ``xi`` auxiliary kept).

Every ``*_step`` performs one systematic scan in a fixed order and draws each
block exactly from its full conditional, so a chain is a pure function of
``(state, data, config, stream state)``. The update distributions are spelled
out in each kernel's docstring; the joint-distribution tests in the test
suite check them against forward simulation from the hierarchy.
"""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np

from .data import StandardizedDataset
from .errors import ConfigError, NumericalSingularityError
from .linalg import (
    PrecisionMatrix,
    build_fused_precision,
    build_horses_precision,
    diagonal_precision,
    pair_indices,
    sample_beta_conditional,
)
from .rng import RngStream

__all__ = [
    "MODELS",
    "SamplerConfig",
    "BaselineChainState",
    "FusedChainState",
    "HorsesChainState",
    "PosteriorDraws",
    "init_state",
    "blasso_step",
    "bfl_step",
    "bfh_step",
    "bhh_step",
    "sigma2_shape_count",
    "run_chain",
]

MODELS = ("blasso", "bfl", "bfh", "bhh")

# Exact zeros occur at initialization; keeps the inverse-Gaussian mean finite.
_BETA_SQ_FLOOR = 1e-12
# Anti-underflow floor for drawn positive latents (statistically invisible).
_TINY = 1e-300


@dataclass(frozen=True)
class SamplerConfig:
    """Chain length, seed, and hyperparameters shared by all kernels.

    ``tilde_tau2_fixed`` is required by ``bhh`` only; the other kernels
    ignore it.
    """

    iterations: int = 5000
    burn_in: int = 2000
    seed: int = 0
    nu0: float = 1.0
    eta0: float = 1.0
    r1: float = 1.0
    delta1: float = 10.0
    r2: float = 1.0
    delta2: float = 10.0
    thinning: int = 1
    tilde_tau2_fixed: float | None = None

    def validate(self) -> None:
        if self.iterations < 1:
            raise ConfigError("iterations must be >= 1")
        if not 0 <= self.burn_in < self.iterations:
            raise ConfigError("burn_in must satisfy 0 <= burn_in < iterations")
        if self.thinning < 1:
            raise ConfigError("thinning must be >= 1")
        if (self.iterations - self.burn_in) // self.thinning < 1:
            raise ConfigError("retained draw count (iterations - burn_in)//thinning must be >= 1")
        for name in ("nu0", "eta0", "r1", "delta1", "r2", "delta2"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be strictly positive")
        if self.seed < 0:
            raise ConfigError("seed must be non-negative")
        if self.tilde_tau2_fixed is not None and not self.tilde_tau2_fixed > 0:
            raise ConfigError("tilde_tau2_fixed must be strictly positive when set")


@dataclass
class BaselineChainState:
    """Latents of the lasso baseline; fused fields set only for ``bfl``."""

    beta: np.ndarray
    sigma2: float
    tau2: np.ndarray
    lambda1_sq: float
    tilde_tau2_j: np.ndarray | None = None
    lambda2_sq: float | None = None


@dataclass
class FusedChainState:
    """Latents of the successive-difference horseshoe sampler (``bfh``)."""

    beta: np.ndarray
    sigma2: float
    tau2: np.ndarray
    tilde_lambda1_sq: float
    tilde_tau2: float
    lambda2: np.ndarray
    nu: np.ndarray
    xi: float


@dataclass
class HorsesChainState:
    """Latents of the pairwise-difference horseshoe sampler (``bhh``).

    Pairwise arrays store the lower triangle in :func:`fusedhs.linalg.pair_indices`
    order; ``tilde_tau2`` is the fixed tuning value.
    """

    beta: np.ndarray
    sigma2: float
    tau2: np.ndarray
    tilde_lambda1_sq: float
    lambda2_pairs: np.ndarray
    nu_pairs: np.ndarray
    tilde_tau2: float


def sigma2_shape_count(model: str, n: int, p: int, nu0: float) -> float:
    """The count n1 in the error-variance conditional IG(n1/2, s1/2).

    Equals the number of Gaussian terms whose variance carries sigma2 (data
    plus coefficient-prior factors), plus the prior degrees nu0.
    """
    if model == "blasso":
        return n + p + nu0
    if model in ("bfl", "bfh"):
        return n + 2 * p - 1 + nu0
    if model == "bhh":
        return n + p * (p + 1) / 2 + nu0
    raise ConfigError(f"unknown model {model!r}")


def _draw_sigma2(data, beta, Binv, n1, eta0, rng) -> float:
    resid = data.y_c - data.X_s @ beta
    s1 = float(resid @ resid) + float(beta @ Binv.matrix @ beta) + eta0
    return max(float(rng.inverse_gamma(n1 / 2.0, s1 / 2.0)), _TINY)


def _draw_tau2(beta, sigma2, lambda1_sq, rng) -> np.ndarray:
    # 1/tau2_j ~ InvGaussian(sqrt(sigma2*lambda1_sq/beta_j^2), lambda1_sq)
    bsq = np.maximum(beta * beta, _BETA_SQ_FLOOR)
    mean = np.sqrt(sigma2 * lambda1_sq / bsq)
    return 1.0 / np.maximum(rng.inverse_gaussian(mean, lambda1_sq), _TINY)


def blasso_step(state: BaselineChainState, data: StandardizedDataset, cfg: SamplerConfig, rng: RngStream) -> BaselineChainState:
    """One sweep of the Bayesian-lasso sampler.

    Updates in order:

    * ``beta ~ N_p(A^{-1} X'y, sigma2 A^{-1})`` with ``A = X'X + diag(1/tau2)``
    * ``sigma2 ~ IG((n+p+nu0)/2, (|y-Xb|^2 + b' diag(1/tau2) b + eta0)/2)``
    * ``1/tau2_j ~ IGauss(sqrt(sigma2*lambda1_sq/beta_j^2), lambda1_sq)``
    * ``lambda1_sq ~ Gamma(p + r1, sum(tau2)/2 + delta1)``

    These follow from the normal-exponential mixture by conjugacy.
    """
    n, p = data.n, data.p
    Binv = diagonal_precision(state.tau2)
    beta = sample_beta_conditional(data.XtX, data.Xty, Binv, state.sigma2, rng)
    sigma2 = _draw_sigma2(data, beta, Binv, sigma2_shape_count("blasso", n, p, cfg.nu0), cfg.eta0, rng)
    tau2 = _draw_tau2(beta, sigma2, state.lambda1_sq, rng)
    lambda1_sq = float(rng.gamma(p + cfg.r1, 0.5 * float(tau2.sum()) + cfg.delta1))
    return BaselineChainState(beta=beta, sigma2=sigma2, tau2=tau2, lambda1_sq=max(lambda1_sq, _TINY))


def bfl_step(state: BaselineChainState, data: StandardizedDataset, cfg: SamplerConfig, rng: RngStream) -> BaselineChainState:
    """One sweep of the Bayesian fused-lasso sampler.

    The coefficient precision is tridiagonal, ``diag(1/tau2)`` plus fusion
    weights ``1/tilde_tau2_j`` on successive differences. Updates in order:

    * ``beta ~ N_p(A^{-1} X'y, sigma2 A^{-1})``
    * ``sigma2 ~ IG((n+2p-1+nu0)/2, (|y-Xb|^2 + b'Binv b + eta0)/2)``
    * ``1/tau2_j ~ IGauss(sqrt(sigma2*lambda1_sq/beta_j^2), lambda1_sq)``
    * ``1/tilde_tau2_j ~ IGauss(sqrt(sigma2*lambda2_sq/(beta_j-beta_{j-1})^2), lambda2_sq)``
    * ``lambda1_sq ~ Gamma(p + r1, sum(tau2)/2 + delta1)``
    * ``lambda2_sq ~ Gamma(p-1 + r2, sum(tilde_tau2_j)/2 + delta2)``
    """
    n, p = data.n, data.p
    Binv = build_fused_precision(state.tau2, state.tilde_tau2_j, 1.0)
    beta = sample_beta_conditional(data.XtX, data.Xty, Binv, state.sigma2, rng)
    sigma2 = _draw_sigma2(data, beta, Binv, sigma2_shape_count("bfl", n, p, cfg.nu0), cfg.eta0, rng)
    tau2 = _draw_tau2(beta, sigma2, state.lambda1_sq, rng)
    dsq = np.maximum(np.diff(beta) ** 2, _BETA_SQ_FLOOR)
    mean = np.sqrt(sigma2 * state.lambda2_sq / dsq)
    tilde_tau2_j = 1.0 / np.maximum(rng.inverse_gaussian(mean, state.lambda2_sq), _TINY)
    lambda1_sq = float(rng.gamma(p + cfg.r1, 0.5 * float(tau2.sum()) + cfg.delta1))
    lambda2_sq = float(rng.gamma(p - 1 + cfg.r2, 0.5 * float(tilde_tau2_j.sum()) + cfg.delta2))
    return BaselineChainState(
        beta=beta,
        sigma2=sigma2,
        tau2=tau2,
        lambda1_sq=max(lambda1_sq, _TINY),
        tilde_tau2_j=tilde_tau2_j,
        lambda2_sq=max(lambda2_sq, _TINY),
    )


def bfh_step(state: FusedChainState, data: StandardizedDataset, cfg: SamplerConfig, rng: RngStream) -> FusedChainState:
    """One sweep of the successive-difference horseshoe sampler.

    Scan order: beta, sigma2, {1/tau2_j}, tilde_lambda1_sq, tilde_tau2,
    {lambda2_j}, {nu_j}, xi. The draws are

    * ``beta ~ N_p(A^{-1} X'y, sigma2 A^{-1})`` with the tridiagonal precision
    * ``sigma2 ~ IG(n1/2, s1/2)``, ``n1 = n + 2p - 1 + nu0``,
      ``s1 = |y-Xb|^2 + b'Binv b + eta0``
    * ``1/tau2_j ~ IGauss(sqrt(sigma2*tilde_lambda1_sq/beta_j^2), tilde_lambda1_sq)``
    * ``tilde_lambda1_sq ~ Gamma(p + r1, sum(tau2)/2 + delta1)``
    * ``tilde_tau2 ~ IG(p/2, sum_j d_j^2/lambda2_j / (2 sigma2) + 1/xi)``
    * ``lambda2_j ~ IG(1, d_j^2/(2 sigma2 tilde_tau2) + 1/nu_j)``
    * ``nu_j ~ IG(1, 1/lambda2_j + 1)``
    * ``xi ~ IG(1, 1/tilde_tau2 + 1)``

    where ``d_j = beta_j - beta_{j-1}``.
    """
    n, p = data.n, data.p
    Binv = build_fused_precision(state.tau2, state.lambda2, state.tilde_tau2)
    beta = sample_beta_conditional(data.XtX, data.Xty, Binv, state.sigma2, rng)
    sigma2 = _draw_sigma2(data, beta, Binv, sigma2_shape_count("bfh", n, p, cfg.nu0), cfg.eta0, rng)
    tau2 = _draw_tau2(beta, sigma2, state.tilde_lambda1_sq, rng)
    tilde_lambda1_sq = max(float(rng.gamma(p + cfg.r1, 0.5 * float(tau2.sum()) + cfg.delta1)), _TINY)

    diffs_sq = np.diff(beta) ** 2
    rate_tt = float((diffs_sq / np.maximum(state.lambda2, _TINY)).sum()) / (2.0 * sigma2) + 1.0 / max(state.xi, _TINY)
    tilde_tau2 = max(float(rng.inverse_gamma(p / 2.0, rate_tt)), _TINY)
    lambda2 = np.maximum(
        rng.inverse_gamma(1.0, diffs_sq / (2.0 * sigma2 * tilde_tau2) + 1.0 / np.maximum(state.nu, _TINY)),
        _TINY,
    )
    nu = np.maximum(rng.inverse_gamma(1.0, 1.0 / lambda2 + 1.0), _TINY)
    xi = max(float(rng.inverse_gamma(1.0, 1.0 / tilde_tau2 + 1.0)), _TINY)
    return FusedChainState(
        beta=beta,
        sigma2=sigma2,
        tau2=tau2,
        tilde_lambda1_sq=tilde_lambda1_sq,
        tilde_tau2=tilde_tau2,
        lambda2=lambda2,
        nu=nu,
        xi=xi,
    )


def bhh_step(state: HorsesChainState, data: StandardizedDataset, cfg: SamplerConfig, rng: RngStream) -> HorsesChainState:
    """One sweep of the pairwise-difference horseshoe sampler.

    Scan order: beta, sigma2, {1/tau2_j}, tilde_lambda1_sq, {lambda2_{jk}},
    {nu_{jk}}. ``tilde_tau2`` stays fixed at its tuning value. The draws are

    * ``beta ~ N_p(A^{-1} X'y, sigma2 A^{-1})`` with the dense pairwise precision
    * ``sigma2 ~ IG(n1/2, s1/2)``, ``n1 = n + p(p+1)/2 + nu0``
    * ``1/tau2_j ~ IGauss(sqrt(sigma2*tilde_lambda1_sq/beta_j^2), tilde_lambda1_sq)``
    * ``tilde_lambda1_sq ~ Gamma(p + r1, sum(tau2)/2 + delta1)``
    * ``lambda2_{jk} ~ IG(1, (beta_j-beta_k)^2/(2 sigma2 tilde_tau2) + 1/nu_{jk})``
    * ``nu_{jk} ~ IG(1, 1/lambda2_{jk} + 1)``
    """
    n, p = data.n, data.p
    Binv = build_horses_precision(state.tau2, state.lambda2_pairs, state.tilde_tau2)
    beta = sample_beta_conditional(data.XtX, data.Xty, Binv, state.sigma2, rng)
    sigma2 = _draw_sigma2(data, beta, Binv, sigma2_shape_count("bhh", n, p, cfg.nu0), cfg.eta0, rng)
    tau2 = _draw_tau2(beta, sigma2, state.tilde_lambda1_sq, rng)
    tilde_lambda1_sq = max(float(rng.gamma(p + cfg.r1, 0.5 * float(tau2.sum()) + cfg.delta1)), _TINY)

    ii, jj = pair_indices(p)
    diffs_sq = (beta[ii] - beta[jj]) ** 2
    lambda2_pairs = np.maximum(
        rng.inverse_gamma(
            1.0,
            diffs_sq / (2.0 * sigma2 * state.tilde_tau2) + 1.0 / np.maximum(state.nu_pairs, _TINY),
        ),
        _TINY,
    )
    nu_pairs = np.maximum(rng.inverse_gamma(1.0, 1.0 / lambda2_pairs + 1.0), _TINY)
    return HorsesChainState(
        beta=beta,
        sigma2=sigma2,
        tau2=tau2,
        tilde_lambda1_sq=tilde_lambda1_sq,
        lambda2_pairs=lambda2_pairs,
        nu_pairs=nu_pairs,
        tilde_tau2=state.tilde_tau2,
    )


def init_state(model: str, p: int, cfg: SamplerConfig):
    """Neutral start: zero coefficients, unit variance and unit scale latents."""
    beta = np.zeros(p)
    if model == "blasso":
        return BaselineChainState(beta=beta, sigma2=1.0, tau2=np.ones(p), lambda1_sq=1.0)
    if model == "bfl":
        return BaselineChainState(
            beta=beta,
            sigma2=1.0,
            tau2=np.ones(p),
            lambda1_sq=1.0,
            tilde_tau2_j=np.ones(p - 1),
            lambda2_sq=1.0,
        )
    if model == "bfh":
        return FusedChainState(
            beta=beta,
            sigma2=1.0,
            tau2=np.ones(p),
            tilde_lambda1_sq=1.0,
            tilde_tau2=1.0,
            lambda2=np.ones(p - 1),
            nu=np.ones(p - 1),
            xi=1.0,
        )
    if model == "bhh":
        if cfg.tilde_tau2_fixed is None:
            raise ConfigError("bhh requires tilde_tau2_fixed in the sampler config")
        m = p * (p - 1) // 2
        return HorsesChainState(
            beta=beta,
            sigma2=1.0,
            tau2=np.ones(p),
            tilde_lambda1_sq=1.0,
            lambda2_pairs=np.ones(m),
            nu_pairs=np.ones(m),
            tilde_tau2=float(cfg.tilde_tau2_fixed),
        )
    raise ConfigError(f"unknown model {model!r}; expected one of {MODELS}")


def _blasso_columns(p: int) -> list[str]:
    return [f"beta_{j}" for j in range(1, p + 1)] + ["sigma2"] + [f"tau2_{j}" for j in range(1, p + 1)] + ["lambda1_sq"]


def _blasso_flatten(s: BaselineChainState) -> np.ndarray:
    return np.concatenate([s.beta, [s.sigma2], s.tau2, [s.lambda1_sq]])


def _bfl_columns(p: int) -> list[str]:
    return (
        [f"beta_{j}" for j in range(1, p + 1)]
        + ["sigma2"]
        + [f"tau2_{j}" for j in range(1, p + 1)]
        + [f"tilde_tau2_{j}" for j in range(2, p + 1)]
        + ["lambda1_sq", "lambda2_sq"]
    )


def _bfl_flatten(s: BaselineChainState) -> np.ndarray:
    return np.concatenate([s.beta, [s.sigma2], s.tau2, s.tilde_tau2_j, [s.lambda1_sq, s.lambda2_sq]])


def _bfh_columns(p: int) -> list[str]:
    return (
        [f"beta_{j}" for j in range(1, p + 1)]
        + ["sigma2"]
        + [f"tau2_{j}" for j in range(1, p + 1)]
        + ["tilde_lambda1_sq", "tilde_tau2"]
        + [f"lambda2_{j}" for j in range(2, p + 1)]
    )


def _bfh_flatten(s: FusedChainState) -> np.ndarray:
    return np.concatenate([s.beta, [s.sigma2], s.tau2, [s.tilde_lambda1_sq, s.tilde_tau2], s.lambda2])


def _bhh_columns(p: int) -> list[str]:
    ii, jj = pair_indices(p)
    pair_names = [f"lambda2_{i + 1}_{j + 1}" for i, j in zip(ii, jj)]
    return (
        [f"beta_{j}" for j in range(1, p + 1)]
        + ["sigma2"]
        + [f"tau2_{j}" for j in range(1, p + 1)]
        + ["tilde_lambda1_sq"]
        + pair_names
    )


def _bhh_flatten(s: HorsesChainState) -> np.ndarray:
    return np.concatenate([s.beta, [s.sigma2], s.tau2, [s.tilde_lambda1_sq], s.lambda2_pairs])


@dataclass(frozen=True)
class _Kernel:
    step: Callable
    columns: Callable[[int], list[str]]
    flatten: Callable


_KERNELS = {
    "blasso": _Kernel(blasso_step, _blasso_columns, _blasso_flatten),
    "bfl": _Kernel(bfl_step, _bfl_columns, _bfl_flatten),
    "bfh": _Kernel(bfh_step, _bfh_columns, _bfh_flatten),
    "bhh": _Kernel(bhh_step, _bhh_columns, _bhh_flatten),
}


@dataclass
class PosteriorDraws:
    """Retained post-burn-in draws of beta, sigma2, and all scale latents."""

    values: np.ndarray
    columns: list[str]
    model: str
    p: int
    config: dict
    wall_time_s: float

    @property
    def n_draws(self) -> int:
        return self.values.shape[0]

    @property
    def beta(self) -> np.ndarray:
        return self.values[:, : self.p]

    @property
    def sigma2(self) -> np.ndarray:
        return self.values[:, self.p]

    def column(self, name: str) -> np.ndarray:
        return self.values[:, self.columns.index(name)]


def run_chain(
    model: str,
    data: StandardizedDataset,
    cfg: SamplerConfig,
    rng: RngStream | None = None,
) -> PosteriorDraws:
    """Run one chain: ``cfg.iterations`` sweeps, discard burn-in, thin.

    The retained draw count is ``(iterations - burn_in) // thinning``. A
    factorization failure aborts the chain with the iteration index attached.
    """
    cfg.validate()
    if model not in _KERNELS:
        raise ConfigError(f"unknown model {model!r}; expected one of {MODELS}")
    kernel = _KERNELS[model]
    state = init_state(model, data.p, cfg)
    stream = rng if rng is not None else RngStream(cfg.seed)

    retained = (cfg.iterations - cfg.burn_in) // cfg.thinning
    columns = kernel.columns(data.p)
    values = np.empty((retained, len(columns)))

    start = time.perf_counter()
    row = 0
    for t in range(1, cfg.iterations + 1):
        try:
            state = kernel.step(state, data, cfg, stream)
        except NumericalSingularityError as err:
            raise NumericalSingularityError(str(err), jitters=err.jitters, iteration=t) from err
        if t > cfg.burn_in and (t - cfg.burn_in) % cfg.thinning == 0 and row < retained:
            values[row] = kernel.flatten(state)
            row += 1
    wall = time.perf_counter() - start

    return PosteriorDraws(
        values=values,
        columns=columns,
        model=model,
        p=data.p,
        config=asdict(cfg),
        wall_time_s=wall,
    )
