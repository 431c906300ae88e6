"""Weighted empirical distribution of residuals and its limiting covariance."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import integrate, stats

from .errors import DomainError, UsageError

# Stated prefactor of the limiting covariance of the residual process.
LIMIT_KERNEL_SCALE = 8.0 * math.pi**2 / 3.0
# lim n * sum_k w_k^2 for the lambda-cell weights: (16 / pi^2) * int_0^1 (1 - s^2) ds.
WEIGHT_NORMALIZATION_LIMIT = 32.0 / (3.0 * math.pi**2)

__all__ = [
    "LIMIT_KERNEL_SCALE",
    "WEIGHT_NORMALIZATION_LIMIT",
    "ErrorLaw",
    "EmpiricalProcessEval",
    "residuals",
    "weighted_ecdf",
    "weighted_ecdf_batch",
    "process",
    "linearization_gap",
    "covariance_kernel",
    "covariance_matrix",
    "weight_normalization",
    "default_t_grid",
]


@dataclass(frozen=True)
class ErrorLaw:
    """Centred error distribution with cdf, density and truncated first moment.

    Use the constructors :meth:`gaussian`, :meth:`uniform`, :meth:`student_t`,
    :meth:`custom` and :meth:`degenerate`.
    """

    kind: str
    params: dict = field(default_factory=dict)
    _cdf: Optional[Callable] = field(default=None, repr=False, compare=False)
    _pdf: Optional[Callable] = field(default=None, repr=False, compare=False)
    _sampler: Optional[Callable] = field(default=None, repr=False, compare=False)
    _variance: Optional[float] = field(default=None, repr=False, compare=False)
    _ppf: Optional[Callable] = field(default=None, repr=False, compare=False)

    @classmethod
    def gaussian(cls, sigma: float = 1.0) -> "ErrorLaw":
        if sigma <= 0:
            raise DomainError("sigma must be positive")
        return cls("gaussian", {"sigma": float(sigma)})

    @classmethod
    def uniform(cls, a: float, b: float) -> "ErrorLaw":
        if not b > a:
            raise DomainError("need a < b")
        if abs(a + b) > 1e-12 * (b - a):
            raise DomainError("uniform errors must be centred (a = -b)")
        return cls("uniform", {"a": float(a), "b": float(b)})

    @classmethod
    def student_t(cls, df: float, scale: float = 1.0) -> "ErrorLaw":
        if df <= 3:
            raise DomainError("student_t needs df > 3 (moments of order above 3)")
        if scale <= 0:
            raise DomainError("scale must be positive")
        return cls("student_t", {"df": float(df), "scale": float(scale)})

    @classmethod
    def custom(
        cls, cdf: Callable, pdf: Callable, sampler: Callable, variance: float, ppf: Optional[Callable] = None,
        name: str = "custom",
    ) -> "ErrorLaw":
        """User-supplied law; ``sampler(rng, size)`` draws errors."""
        return cls("custom", {"name": name}, cdf, pdf, sampler, float(variance), ppf)

    @classmethod
    def degenerate(cls) -> "ErrorLaw":
        """Point mass at zero; only useful for noise-free simulation."""

        def pdf(t):
            raise DomainError("the degenerate law has no density")

        return cls.custom(
            cdf=lambda t: (np.asarray(t, dtype=float) >= 0).astype(float),
            pdf=pdf,
            sampler=lambda rng, size: np.zeros(size),
            variance=0.0,
            name="degenerate",
        )

    @property
    def _frozen(self):
        p = self.params
        if self.kind == "gaussian":
            return stats.norm(scale=p["sigma"])
        if self.kind == "uniform":
            return stats.uniform(loc=p["a"], scale=p["b"] - p["a"])
        if self.kind == "student_t":
            return stats.t(p["df"], scale=p["scale"])
        return None

    def cdf(self, t):
        if self.kind == "custom":
            return np.asarray(self._cdf(t), dtype=float)
        return self._frozen.cdf(t)

    def pdf(self, t):
        if self.kind == "custom":
            return np.asarray(self._pdf(t), dtype=float)
        return self._frozen.pdf(t)

    def ppf(self, u):
        if self.kind == "custom":
            if self._ppf is None:
                raise UsageError("this custom law has no quantile function")
            return np.asarray(self._ppf(u), dtype=float)
        return self._frozen.ppf(u)

    @property
    def variance(self) -> float:
        p = self.params
        if self.kind == "gaussian":
            return p["sigma"] ** 2
        if self.kind == "uniform":
            return (p["b"] - p["a"]) ** 2 / 12.0
        if self.kind == "student_t":
            return p["scale"] ** 2 * p["df"] / (p["df"] - 2.0)
        return self._variance

    def truncated_mean(self, t):
        """``E[eps * 1{eps <= t}]``."""
        t = np.asarray(t, dtype=float)
        p = self.params
        if self.kind == "gaussian":
            return -p["sigma"] ** 2 * self.pdf(t)
        if self.kind == "uniform":
            a, b = p["a"], p["b"]
            tc = np.clip(t, a, b)
            return (tc * tc - a * a) / (2.0 * (b - a))
        if self.kind == "student_t":
            df, sc = p["df"], p["scale"]
            u = t / sc
            return -sc * (df + u * u) / (df - 1.0) * stats.t.pdf(u, df)
        return np.vectorize(self._numeric_truncated_mean)(t)

    def _numeric_truncated_mean(self, t: float) -> float:
        val, _ = integrate.quad(lambda x: x * float(self.pdf(x)), -np.inf, t)
        return val

    def sample(self, rng: np.random.Generator, size) -> np.ndarray:
        p = self.params
        if self.kind == "gaussian":
            return p["sigma"] * rng.standard_normal(size)
        if self.kind == "uniform":
            return rng.uniform(p["a"], p["b"], size)
        if self.kind == "student_t":
            return p["scale"] * rng.standard_t(p["df"], size)
        return np.asarray(self._sampler(rng, size), dtype=float)

    def describe(self) -> dict:
        return {"kind": self.kind, **self.params}

    @property
    def has_full_support(self) -> bool:
        return self.kind in ("gaussian", "student_t")


@dataclass(frozen=True, eq=False)
class EmpiricalProcessEval:
    """Weighted residual ECDF and derived quantities on a grid of thresholds."""

    t_grid: np.ndarray
    f_hat: np.ndarray
    process: np.ndarray
    n: int
    lin_gap: Optional[np.ndarray] = None


def residuals(y, trace) -> np.ndarray:
    """``Y_k - (R g_hat)(z_k)``; ``y`` may also be a :class:`SinogramData`."""
    y = np.asarray(getattr(y, "y", y), dtype=float)
    trace = np.asarray(trace, dtype=float)
    if y.shape != trace.shape:
        raise UsageError(f"observations {y.shape} and trace {trace.shape} are misaligned")
    return y - trace


def _check_weights(weights) -> np.ndarray:
    w = np.asarray(weights, dtype=float)
    if np.any(w < 0):
        raise DomainError("weights must be nonnegative")
    if abs(w.sum() - 1.0) > 1e-9:
        raise DomainError(f"weights must sum to 1 (got {w.sum()!r})")
    return w


def weighted_ecdf(res, weights, t: float) -> float:
    """``sum_k w_k 1{res_k <= t}``."""
    res = np.asarray(res, dtype=float)
    w = _check_weights(weights)
    if res.shape != w.shape:
        raise UsageError("residuals and weights are misaligned")
    return float(np.sum(w[res <= t]))


def weighted_ecdf_batch(res, weights, t_grid) -> np.ndarray:
    """Weighted ECDF on a grid; one sort of the residuals plus binary searches."""
    res = np.asarray(res, dtype=float)
    w = _check_weights(weights)
    if res.shape != w.shape:
        raise UsageError("residuals and weights are misaligned")
    order = np.argsort(res, kind="stable")
    cum = np.concatenate([[0.0], np.cumsum(w[order])])
    pos = np.searchsorted(res[order], np.asarray(t_grid, dtype=float), side="right")
    return cum[pos]


def process(res, weights, n: int, law: ErrorLaw, t_grid) -> EmpiricalProcessEval:
    """``sqrt(n) (F_hat(t) - F(t))`` on ``t_grid``."""
    t_grid = np.asarray(t_grid, dtype=float)
    f_hat = weighted_ecdf_batch(res, weights, t_grid)
    proc = math.sqrt(n) * (f_hat - law.cdf(t_grid))
    return EmpiricalProcessEval(t_grid, f_hat, proc, int(n))


def linearization_gap(res, raw_errors, weights, law: ErrorLaw, t_grid) -> np.ndarray:
    """``sum_k w_k [1{res_k <= t} - 1{eps_k <= t} - eps_k f(t)]`` per threshold.

    Needs the true errors, so it is a simulation-only diagnostic.
    """
    if raw_errors is None:
        raise UsageError("the linearization gap needs the true errors")
    raw = np.asarray(raw_errors, dtype=float)
    w = _check_weights(weights)
    t_grid = np.asarray(t_grid, dtype=float)
    drift = float(np.dot(w, raw)) * law.pdf(t_grid)
    return weighted_ecdf_batch(res, w, t_grid) - weighted_ecdf_batch(raw, w, t_grid) - drift


def covariance_kernel(t, t_other, law: ErrorLaw, scale: float = LIMIT_KERNEL_SCALE):
    """Covariance of the limiting Gaussian process of the residual ECDF.

    ``scale * (F(min) - F F~ + f E[eps 1{eps <= t~}] + f~ E[eps 1{eps <= t}] + sigma^2 f f~)``.
    The default prefactor is the stated limit constant ``8 pi^2 / 3``; pass
    :func:`weight_normalization` of a design for its finite-sample counterpart.
    """
    t, tt = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(t_other, dtype=float))
    f_t, f_tt = law.pdf(t), law.pdf(tt)
    # grouped so that swapping the arguments is bit-exact
    val = (
        law.cdf(np.minimum(t, tt))
        - law.cdf(t) * law.cdf(tt)
        + (f_t * law.truncated_mean(tt) + f_tt * law.truncated_mean(t))
        + law.variance * (f_t * f_tt)
    )
    out = scale * val
    return float(out) if out.ndim == 0 else out


def covariance_matrix(t_grid, law: ErrorLaw, scale: float = LIMIT_KERNEL_SCALE) -> np.ndarray:
    t_grid = np.asarray(t_grid, dtype=float)
    return covariance_kernel(t_grid[:, None], t_grid[None, :], law, scale=scale)


def weight_normalization(weights) -> float:
    """``n * sum_k w_k^2``, the variance inflation of a weighted mean over ``n`` cells."""
    w = np.asarray(weights, dtype=float)
    return float(len(w) * np.sum(w * w))


def default_t_grid(law: ErrorLaw, size: int = 41, lo: float = 0.005, hi: float = 0.995) -> np.ndarray:
    """Equispaced thresholds between the ``lo`` and ``hi`` quantiles of the law."""
    a, b = law.ppf([lo, hi])
    return np.linspace(float(a), float(b), size)
