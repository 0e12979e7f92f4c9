"""Joint-distribution validation of the Gibbs kernels.

Compares two ways of sampling the joint law of (latents, response):

* forward: draw the latents from the prior hierarchy, then the response from
  the likelihood — independent draws, implemented here with plain numpy
  generators and difference-operator precision assembly so nothing is shared
  with the kernels under test except the model definition itself;
* successive-conditional: start at a prior draw, then alternate one Gibbs
  sweep with a fresh likelihood draw of the response.

If every full conditional is correct, both procedures target the same joint
distribution, so any functional of the latents must agree in distribution.
The comparison uses z-scores of first and second moments (and indicator
probabilities, which are sharper for the heavy-tailed scales): forward-side
standard errors are i.i.d.; chain-side standard errors use batch means to
absorb autocorrelation.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from fusedhs.data import StandardizedDataset
from fusedhs.models import (
    BaselineChainState,
    FusedChainState,
    HorsesChainState,
    SamplerConfig,
    bfh_step,
    bfl_step,
    bhh_step,
    blasso_step,
)
from fusedhs.rng import RngStream

GEWEKE_SWEEPS = 10_000
GEWEKE_N = 20
GEWEKE_P = 5
BHH_FIXED_SCALE = 2.0

_STEPS = {"blasso": blasso_step, "bfl": bfl_step, "bfh": bfh_step, "bhh": bhh_step}


def _inv_gamma(gen: np.random.Generator, shape, scale, size=None):
    if size is None and np.ndim(scale):
        size = np.shape(scale)
    return np.asarray(scale, dtype=float) / gen.standard_gamma(shape, size=size)


def _fused_precision(tau2, fusion_scales):
    # diag(1/tau2) + D' diag(1/fusion_scales) D with D the first-difference map
    p = tau2.shape[0]
    D = np.zeros((p - 1, p))
    k = np.arange(p - 1)
    D[k, k] = -1.0
    D[k, k + 1] = 1.0
    w = 1.0 / fusion_scales
    return np.diag(1.0 / tau2) + D.T @ (w[:, None] * D)


def _pairwise_precision(tau2, pair_scales):
    p = tau2.shape[0]
    ii, jj = np.tril_indices(p, -1)
    P = np.zeros((ii.shape[0], p))
    rows = np.arange(ii.shape[0])
    P[rows, ii] = 1.0
    P[rows, jj] = -1.0
    w = 1.0 / pair_scales
    return np.diag(1.0 / tau2) + P.T @ (w[:, None] * P)


def _beta_from_precision(gen: np.random.Generator, Binv, sigma2):
    cov = sigma2 * np.linalg.inv(Binv)
    cov = 0.5 * (cov + cov.T)
    return gen.multivariate_normal(np.zeros(cov.shape[0]), cov, method="cholesky")


def forward_state(model: str, gen: np.random.Generator, p: int, cfg: SamplerConfig):
    """One independent draw of all latents from the prior hierarchy."""
    sigma2 = float(_inv_gamma(gen, cfg.nu0 / 2.0, cfg.eta0 / 2.0))
    lam1 = float(gen.gamma(cfg.r1, 1.0 / cfg.delta1))
    tau2 = gen.exponential(2.0 / lam1, size=p)

    if model == "blasso":
        beta = _beta_from_precision(gen, np.diag(1.0 / tau2), sigma2)
        return BaselineChainState(beta=beta, sigma2=sigma2, tau2=tau2, lambda1_sq=lam1)

    if model == "bfl":
        lam2 = float(gen.gamma(cfg.r2, 1.0 / cfg.delta2))
        tilde_tau2_j = gen.exponential(2.0 / lam2, size=p - 1)
        beta = _beta_from_precision(gen, _fused_precision(tau2, tilde_tau2_j), sigma2)
        return BaselineChainState(
            beta=beta, sigma2=sigma2, tau2=tau2, lambda1_sq=lam1,
            tilde_tau2_j=tilde_tau2_j, lambda2_sq=lam2,
        )

    if model == "bfh":
        xi = float(_inv_gamma(gen, 0.5, 1.0))
        tilde_tau2 = float(_inv_gamma(gen, 0.5, 1.0 / xi))
        nu = _inv_gamma(gen, 0.5, np.ones(p - 1))
        lambda2 = _inv_gamma(gen, 0.5, 1.0 / nu)
        beta = _beta_from_precision(gen, _fused_precision(tau2, lambda2 * tilde_tau2), sigma2)
        return FusedChainState(
            beta=beta, sigma2=sigma2, tau2=tau2, tilde_lambda1_sq=lam1,
            tilde_tau2=tilde_tau2, lambda2=lambda2, nu=nu, xi=xi,
        )

    if model == "bhh":
        m = p * (p - 1) // 2
        tilde_tau2 = float(cfg.tilde_tau2_fixed)
        nu_pairs = _inv_gamma(gen, 0.5, np.ones(m))
        lambda2_pairs = _inv_gamma(gen, 0.5, 1.0 / nu_pairs)
        beta = _beta_from_precision(gen, _pairwise_precision(tau2, lambda2_pairs * tilde_tau2), sigma2)
        return HorsesChainState(
            beta=beta, sigma2=sigma2, tau2=tau2, tilde_lambda1_sq=lam1,
            lambda2_pairs=lambda2_pairs, nu_pairs=nu_pairs, tilde_tau2=tilde_tau2,
        )

    raise ValueError(f"unknown model {model!r}")


def monitored(model: str, state) -> dict[str, float]:
    """Scalar functionals compared between the two simulation schemes."""
    out = {
        "beta_1": float(state.beta[0]),
        "sigma2": float(state.sigma2),
        "tau2_1": float(state.tau2[0]),
    }
    if model == "blasso":
        out["lambda1_sq"] = float(state.lambda1_sq)
    elif model == "bfl":
        out["lambda2_sq"] = float(state.lambda2_sq)
        out["tilde_tau2_2"] = float(state.tilde_tau2_j[0])
    elif model == "bfh":
        out["lambda2_2"] = float(state.lambda2[0])
        out["tilde_tau2"] = float(state.tilde_tau2)
    elif model == "bhh":
        out["lambda2_21"] = float(state.lambda2_pairs[0])
    return out


def _standardized_design(gen: np.random.Generator, n: int, p: int) -> np.ndarray:
    X = gen.standard_normal((n, p))
    X = X - X.mean(axis=0)
    return X / np.sqrt((X**2).mean(axis=0))


@lru_cache(maxsize=8)
def run_geweke(
    model: str,
    n: int = GEWEKE_N,
    p: int = GEWEKE_P,
    sweeps: int = GEWEKE_SWEEPS,
    seed: int = 2024,
):
    """Return (names, forward samples, chain samples), each (sweeps, k)."""
    cfg = SamplerConfig(
        iterations=sweeps,
        burn_in=0,
        seed=seed,
        tilde_tau2_fixed=BHH_FIXED_SCALE if model == "bhh" else None,
    )
    gen = np.random.default_rng(seed + 77_000)
    X = _standardized_design(gen, n, p)
    names = list(monitored(model, forward_state(model, np.random.default_rng(0), p, cfg)))

    fwd = np.empty((sweeps, len(names)))
    for s in range(sweeps):
        state = forward_state(model, gen, p, cfg)
        vals = monitored(model, state)
        fwd[s] = [vals[name] for name in names]

    # successive-conditional: the initial state is a prior draw, so the chain
    # starts in stationarity; the response is refreshed after every sweep
    step = _STEPS[model]
    stream = RngStream(seed).child(13)
    state = forward_state(model, gen, p, cfg)
    y = X @ state.beta + np.sqrt(state.sigma2) * gen.standard_normal(n)
    chain = np.empty((sweeps, len(names)))
    for s in range(sweeps):
        data = StandardizedDataset(
            y_c=y, X_s=X, y_mean=0.0,
            col_means=np.zeros(p), col_scales=np.ones(p),
            column_names=[f"x{j}" for j in range(p)], provenance="geweke",
        )
        state = step(state, data, cfg, stream)
        y = X @ state.beta + np.sqrt(state.sigma2) * stream.standard_normal(n)
        vals = monitored(model, state)
        chain[s] = [vals[name] for name in names]

    return names, fwd, chain


def batch_means_se(series: np.ndarray, batches: int = 100) -> float:
    """Standard error of the mean of an autocorrelated series."""
    size = series.shape[0] // batches
    means = series[: batches * size].reshape(batches, size).mean(axis=1)
    return float(means.std(ddof=1) / np.sqrt(batches))


def _zscore(fwd_series: np.ndarray, chain_series: np.ndarray) -> float:
    se_f = fwd_series.std(ddof=1) / np.sqrt(fwd_series.shape[0])
    se_c = batch_means_se(chain_series)
    denom = np.sqrt(se_f**2 + se_c**2)
    if denom == 0.0:
        return 0.0
    return float(abs(fwd_series.mean() - chain_series.mean()) / denom)


def moment_zscores(names, fwd, chain) -> list[tuple[str, str, float]]:
    """z-scores of first and second moments per monitored functional."""
    records = []
    for j, name in enumerate(names):
        records.append((name, "mean", _zscore(fwd[:, j], chain[:, j])))
        records.append((name, "second_moment", _zscore(fwd[:, j] ** 2, chain[:, j] ** 2)))
    return records


def indicator_zscores(names, fwd, chain) -> list[tuple[str, str, float]]:
    """z-scores of P(x <= pooled median); bounded, so sharp for heavy tails."""
    records = []
    for j, name in enumerate(names):
        threshold = np.median(np.concatenate([fwd[:, j], chain[:, j]]))
        records.append(
            (name, "prob_below_median", _zscore((fwd[:, j] <= threshold).astype(float),
                                                (chain[:, j] <= threshold).astype(float)))
        )
    return records
