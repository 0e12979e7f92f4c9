"""Synthetic benchmark cases and the replication harness.

Four case families generate rows from a mean-zero multivariate normal with
either compound-symmetric (cases 1 and 3) or AR-style geometric (cases 2 and
4) correlation at rho = 0.5, plus Gaussian noise on the response. Cases 1
and 2 use 20-dimensional blockwise-constant truths; cases 3 and 4 use a
four-block signal padded with zeros to dimension p.

The harness fits each requested sampler to each replicate, maps the
posterior-mean coefficients back to the generation scale, and reports three
metrics per method: squared estimation error (mse), squared error of the
non-zero successive differences (mse_diff), and the covariance-weighted
prediction error (pse), each with its sample standard deviation over
replicates.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .data import Dataset, destandardize_coefficients, standardize
from .errors import ConfigError, NumericalSingularityError, ParameterError
from .inference import summarize
from .models import MODELS, SamplerConfig, run_chain
from .rng import RngStream

__all__ = [
    "COMPOUND",
    "AR1",
    "SimulationCaseSpec",
    "make_case",
    "covariance_matrix",
    "generate_case",
    "nonzero_difference_pairs",
    "mse",
    "mse_diff",
    "pse",
    "MethodCaseMetrics",
    "MetricsReport",
    "run_benchmark",
]

COMPOUND = "compound"
AR1 = "ar1"

_GEN_TAG = 101
_FIT_TAG = 202

_RHO = 0.5


@dataclass(frozen=True)
class SimulationCaseSpec:
    case_id: int
    beta_star: np.ndarray
    sigma: float
    n: int
    covariance_kind: str
    replications: int

    @property
    def p(self) -> int:
        return self.beta_star.shape[0]


def _beta_cases12(variant: int) -> np.ndarray:
    if variant == 1:
        return np.repeat([0.0, 1.0, 0.0, 1.0], 5)
    if variant == 2:
        return np.repeat([0.0, 2.0, 0.0, 2.0], 5)
    raise ConfigError(f"beta_variant must be 1 or 2, got {variant}")


def _beta_cases34(p: int) -> np.ndarray:
    if p < 20:
        raise ConfigError(f"cases 3 and 4 need p >= 20, got {p}")
    head = np.repeat([3.0, -1.5, 1.0, 2.0], 5)
    return np.concatenate([head, np.zeros(p - 20)])


def make_case(
    case_id: int,
    sigma: float,
    n: int,
    beta_variant: int = 1,
    p: int | None = None,
    replications: int = 20,
) -> SimulationCaseSpec:
    """Build a case spec; cases 1/2 fix p = 20, cases 3/4 default to p = 50."""
    if not sigma > 0:
        raise ConfigError(f"sigma must be positive, got {sigma}")
    if n < 2:
        raise ConfigError(f"n must be at least 2, got {n}")
    if replications < 1:
        raise ConfigError(f"replications must be at least 1, got {replications}")
    if case_id in (1, 2):
        if p is not None and p != 20:
            raise ConfigError("cases 1 and 2 are 20-dimensional")
        beta_star = _beta_cases12(beta_variant)
        kind = COMPOUND if case_id == 1 else AR1
    elif case_id in (3, 4):
        beta_star = _beta_cases34(50 if p is None else p)
        kind = COMPOUND if case_id == 3 else AR1
    else:
        raise ConfigError(f"case_id must be 1..4, got {case_id}")
    return SimulationCaseSpec(
        case_id=case_id,
        beta_star=beta_star,
        sigma=float(sigma),
        n=int(n),
        covariance_kind=kind,
        replications=int(replications),
    )


def covariance_matrix(spec: SimulationCaseSpec) -> np.ndarray:
    p = spec.p
    if spec.covariance_kind == COMPOUND:
        return np.full((p, p), _RHO) + (1.0 - _RHO) * np.eye(p)
    if spec.covariance_kind == AR1:
        idx = np.arange(p)
        return _RHO ** np.abs(idx[:, None] - idx[None, :])
    raise ConfigError(f"unknown covariance kind {spec.covariance_kind!r}")


def generate_case(spec: SimulationCaseSpec, replicate_index: int, rng: RngStream) -> Dataset:
    """One synthetic replicate; deterministic in (seed, case_id, replicate).

    Rows of X are i.i.d. mean-zero multivariate normal (Cholesky of the case
    covariance); y = X beta_star + sigma * eps.
    """
    if replicate_index < 0:
        raise ParameterError("replicate_index must be non-negative")
    stream = rng.child(_GEN_TAG, spec.case_id, replicate_index)
    L = np.linalg.cholesky(covariance_matrix(spec))
    Z = stream.standard_normal((spec.n, spec.p))
    X = Z @ L.T
    eps = stream.standard_normal(spec.n)
    y = X @ spec.beta_star + spec.sigma * eps
    return Dataset(
        y=y,
        X=X,
        column_names=[f"x{j}" for j in range(1, spec.p + 1)],
        provenance=f"case{spec.case_id}/rep{replicate_index}",
    )


def _mean_sd(values: np.ndarray) -> tuple[float, float]:
    values = np.asarray(values, dtype=float)
    sd = float(values.std(ddof=1)) if values.shape[0] > 1 else 0.0
    return float(values.mean()), sd


def mse(beta_hats: np.ndarray, beta_star: np.ndarray) -> tuple[float, float]:
    """Mean and s.d. over replicates of the squared estimation error norm."""
    B = np.atleast_2d(np.asarray(beta_hats, dtype=float))
    beta_star = np.asarray(beta_star, dtype=float)
    if B.shape[1] != beta_star.shape[0]:
        raise ParameterError(f"estimate dimension {B.shape[1]} != truth dimension {beta_star.shape[0]}")
    return _mean_sd(((B - beta_star) ** 2).sum(axis=1))


def nonzero_difference_pairs(beta_star: np.ndarray) -> list[tuple[int, int]]:
    """1-based index pairs (j, j+1) where successive true coefficients differ."""
    beta_star = np.asarray(beta_star, dtype=float)
    where = np.nonzero(np.diff(beta_star))[0]
    return [(int(k) + 1, int(k) + 2) for k in where]


def mse_diff(beta_hats: np.ndarray, beta_star: np.ndarray) -> tuple[float, float]:
    """Mean/s.d. of the squared error of the non-zero successive differences.

    Positions come from the truth: only differences that are non-zero in
    ``beta_star`` contribute. With no such positions the metric is defined
    as 0 (with a warning).
    """
    B = np.atleast_2d(np.asarray(beta_hats, dtype=float))
    beta_star = np.asarray(beta_star, dtype=float)
    if B.shape[1] != beta_star.shape[0]:
        raise ParameterError(f"estimate dimension {B.shape[1]} != truth dimension {beta_star.shape[0]}")
    pairs = nonzero_difference_pairs(beta_star)
    if not pairs:
        warnings.warn("true coefficient vector has no non-zero successive differences; mse_diff = 0")
        return 0.0, 0.0
    idx = np.array([j for j, _ in pairs]) - 1  # 0-based left endpoints
    d_true = np.diff(beta_star)[idx]
    d_hat = np.diff(B, axis=1)[:, idx]
    return _mean_sd(((d_hat - d_true) ** 2).sum(axis=1))


def pse(beta_hats: np.ndarray, beta_star: np.ndarray, Sigma: np.ndarray) -> tuple[float, float]:
    """Mean/s.d. of the covariance-weighted quadratic estimation error."""
    B = np.atleast_2d(np.asarray(beta_hats, dtype=float))
    beta_star = np.asarray(beta_star, dtype=float)
    Sigma = np.asarray(Sigma, dtype=float)
    if B.shape[1] != beta_star.shape[0] or Sigma.shape != (beta_star.shape[0], beta_star.shape[0]):
        raise ParameterError("dimension mismatch among estimates, truth, and Sigma")
    if not np.allclose(Sigma, Sigma.T):
        raise ParameterError("Sigma must be symmetric")
    E = B - beta_star
    return _mean_sd(np.einsum("ki,ij,kj->k", E, Sigma, E))


@dataclass
class MethodCaseMetrics:
    case_id: int
    sigma: float
    n: int
    p: int
    method: str
    replications: int
    completed: int
    failed: int
    mse: float
    mse_sd: float
    mse_diff: float
    mse_diff_sd: float
    pse: float
    pse_sd: float


@dataclass
class MetricsReport:
    rows: list[MethodCaseMetrics]

    CSV_HEADER = (
        "case_id,sigma,n,p,method,replications,completed,failed,"
        "mse,mse_sd,mse_diff,mse_diff_sd,pse,pse_sd"
    )


def run_benchmark(
    cases: list[SimulationCaseSpec],
    methods: list[str],
    cfg: SamplerConfig,
    rng: RngStream | None = None,
) -> MetricsReport:
    """Generate, standardize, fit, and score every (case, replicate, method).

    Coefficient estimates are posterior means mapped back to the generation
    scale so they are comparable to the true vector. Replicates whose fit
    hits a numerical singularity are excluded from the averages and counted
    in ``failed`` instead of aborting the batch.
    """
    if not cases or not methods:
        raise ConfigError("need at least one case and one method")
    for method in methods:
        if method not in MODELS:
            raise ConfigError(f"unknown method {method!r}; expected one of {MODELS}")
    root = rng if rng is not None else RngStream(cfg.seed)

    rows: list[MethodCaseMetrics] = []
    for spec in cases:
        Sigma = covariance_matrix(spec)
        estimates: dict[str, list[np.ndarray]] = {m: [] for m in methods}
        failures: dict[str, int] = {m: 0 for m in methods}
        for k in range(spec.replications):
            ds = generate_case(spec, k, root)
            std = standardize(ds)
            for method in methods:
                stream = root.child(_FIT_TAG, spec.case_id, k, MODELS.index(method))
                try:
                    draws = run_chain(method, std, cfg, rng=stream)
                except NumericalSingularityError:
                    failures[method] += 1
                    continue
                est = summarize(draws)
                _, beta_raw = destandardize_coefficients(std, est.point)
                estimates[method].append(beta_raw)

        for method in methods:
            fitted = estimates[method]
            if fitted:
                B = np.vstack(fitted)
                m, m_sd = mse(B, spec.beta_star)
                d, d_sd = mse_diff(B, spec.beta_star)
                q, q_sd = pse(B, spec.beta_star, Sigma)
            else:
                m = m_sd = d = d_sd = q = q_sd = float("nan")
            rows.append(
                MethodCaseMetrics(
                    case_id=spec.case_id,
                    sigma=spec.sigma,
                    n=spec.n,
                    p=spec.p,
                    method=method,
                    replications=spec.replications,
                    completed=len(fitted),
                    failed=failures[method],
                    mse=m,
                    mse_sd=m_sd,
                    mse_diff=d,
                    mse_diff_sd=d_sd,
                    pse=q,
                    pse_sd=q_sd,
                )
            )
    return MetricsReport(rows=rows)
