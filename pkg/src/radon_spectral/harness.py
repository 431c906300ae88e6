"""Phantoms, synthetic sinograms and Monte Carlo studies.

Replication ``i`` of every study draws its errors from
``numpy.random.Generator(PCG64(base_seed + i))``.  Replications are mapped over a
thread pool and reduced in index order, so outputs do not depend on the number
of threads.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.special import zeta

from .basis import DEFAULT_DEGREE_CAP, as_index
from .design import DesignGrid, build_grid
from .empirical import (
    LIMIT_KERNEL_SCALE,
    ErrorLaw,
    covariance_matrix,
    default_t_grid,
    linearization_gap,
    process,
    residuals,
    weight_normalization,
)
from .errors import DomainError, UsageError
from .estimator import (
    BandwidthRule,
    FilterSpec,
    SinogramData,
    default_bandwidth,
    detector_trace,
    ellipsoid_norm,
    spectral_estimate,
)
from .radon import BRAIN, CoefficientField, evaluate_expansion, svd_forward

RNG_ALGORITHM = "numpy.random.Generator(PCG64(base_seed + replication))"

__all__ = [
    "RNG_ALGORITHM",
    "PhantomSpec",
    "DEGREE_TWO_PHANTOM",
    "residual_process_eval",
    "ExperimentConfig",
    "make_rng",
    "parallel_map",
    "polar_eval_grid",
    "generate_data",
    "sup_error",
    "rate_study",
    "linearization_study",
    "covariance_study",
    "law_from_dict",
]


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(int(seed)))


def parallel_map(fn: Callable[[int], object], count: int, threads: int = 1) -> list:
    """``[fn(0), ..., fn(count - 1)]``, evaluated on ``threads`` workers."""
    if threads <= 1:
        return [fn(i) for i in range(count)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(count)))


@dataclass(frozen=True)
class PhantomSpec:
    """Conjugate-symmetric test image given by its brain coefficients.

    ``kind="finite"`` takes explicit ``entries`` as ``(l, m, coefficient)``
    triples.  ``kind="decaying"`` draws ``c(l, m) = amplitude (m+1)^-exponent
    e^{i theta_lm}`` for ``m <= max_degree`` with random phases (random signs for
    ``l = 0``); the default exponent ``v + 3`` keeps
    ``sum (m+1)^v |<Rg, psi>|`` below ``amplitude * zeta(exponent - v - 1/2)``.
    """

    kind: str = "decaying"
    entries: tuple = ()
    v: float = 5.0
    amplitude: float = 1.0
    max_degree: int = 10
    seed: int = 0
    exponent: Optional[float] = None

    def __post_init__(self):
        if self.kind not in ("finite", "decaying"):
            raise UsageError(f"unknown phantom kind {self.kind!r}")
        if self.kind == "decaying" and self.decay_exponent - self.v - 0.5 <= 1.0:
            raise DomainError("decay exponent must exceed v + 3/2 for the smoothness sum to converge")
        c = self.field()
        if not c.is_real_symmetric():
            raise DomainError("phantom coefficients must be conjugate symmetric")
        if self.kind == "decaying" and self.smoothness_sum() > self.smoothness_bound() * (1 + 1e-12):
            raise DomainError("decaying phantom violates its smoothness bound")

    @classmethod
    def finite(cls, entries) -> "PhantomSpec":
        return cls(kind="finite", entries=tuple((int(l), int(m), complex(c)) for l, m, c in entries))

    @classmethod
    def decaying(cls, v: float = 5.0, amplitude: float = 1.0, max_degree: int = 10, seed: int = 0,
                 exponent: Optional[float] = None) -> "PhantomSpec":
        return cls(kind="decaying", v=v, amplitude=amplitude, max_degree=max_degree, seed=seed, exponent=exponent)

    @property
    def decay_exponent(self) -> float:
        return self.v + 3.0 if self.exponent is None else float(self.exponent)

    def field(self, cap: int = DEFAULT_DEGREE_CAP) -> CoefficientField:
        if self.kind == "finite":
            return CoefficientField({as_index((l, m)): c for l, m, c in self.entries}, space=BRAIN, cap=cap)
        rng = make_rng(self.seed)
        a = self.decay_exponent
        entries = {}
        for m in range(self.max_degree + 1):
            mag = self.amplitude * (m + 1.0) ** (-a)
            for l in range(m % 2, m + 1, 2):
                if l == 0:
                    entries[(0, m)] = mag * (1.0 if rng.random() < 0.5 else -1.0)
                else:
                    c = mag * np.exp(1j * rng.uniform(0.0, 2.0 * math.pi))
                    entries[(l, m)] = c
                    entries[(-l, m)] = np.conj(c)
        return CoefficientField(entries, space=BRAIN, cap=cap)

    def smoothness_sum(self, v: Optional[float] = None) -> float:
        """``sum (m+1)^v |<Rg, psi_(l,m)>|`` for the (finite) expansion."""
        v = self.v if v is None else v
        return float(sum((idx.m + 1.0) ** (v - 0.5) * abs(c) for idx, c in self.field().items()))

    def smoothness_bound(self) -> float:
        return float(self.amplitude * zeta(self.decay_exponent - self.v - 0.5))

    @property
    def label(self) -> str:
        if self.kind == "finite":
            return f"finite(degree={self.field().max_degree})"
        return f"decaying(v={self.v:g},amplitude={self.amplitude:g},max_degree={self.max_degree},seed={self.seed})"

    def to_dict(self) -> dict:
        if self.kind == "finite":
            return {"kind": "finite", "entries": [[l, m, c.real, c.imag] for l, m, c in self.entries]}
        d = {"kind": "decaying", "v": self.v, "amplitude": self.amplitude, "max_degree": self.max_degree,
             "seed": self.seed}
        if self.exponent is not None:
            d["exponent"] = self.exponent
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "PhantomSpec":
        d = dict(d)
        kind = d.pop("kind", "decaying")
        if kind == "finite":
            return cls.finite([(l, m, complex(re, im)) for l, m, re, im in d["entries"]])
        return cls.decaying(**d)


# Exact-degree test image: every index with m <= 2 is active.
DEGREE_TWO_PHANTOM = PhantomSpec.finite(
    [
        (0, 0, 1.0),
        (1, 1, 0.5 - 0.3j),
        (-1, 1, 0.5 + 0.3j),
        (0, 2, 0.4),
        (2, 2, 0.25 + 0.2j),
        (-2, 2, 0.25 - 0.2j),
    ]
)


def law_from_dict(d: dict) -> ErrorLaw:
    d = dict(d)
    kind = d.pop("kind", "gaussian")
    if kind == "gaussian":
        return ErrorLaw.gaussian(d.get("sigma", 1.0))
    if kind == "uniform":
        return ErrorLaw.uniform(d["a"], d["b"])
    if kind == "student_t":
        return ErrorLaw.student_t(d["df"], d.get("scale", 1.0))
    if kind in ("degenerate", "zero"):
        return ErrorLaw.degenerate()
    raise UsageError(f"error law {kind!r} cannot be built from a config")


def polar_eval_grid(nr: int = 50, ntheta: int = 50, r_max: float = 0.99):
    """Flattened polar grid: ``r`` uniform in ``[0, r_max]``, ``theta`` uniform in ``[0, 2 pi)``."""
    r = np.linspace(0.0, r_max, nr)
    theta = np.linspace(0.0, 2.0 * math.pi, ntheta, endpoint=False)
    rr, tt = np.meshgrid(r, theta, indexing="ij")
    return rr.ravel(), tt.ravel()


def generate_data(phantom: PhantomSpec, grid: DesignGrid, law: ErrorLaw, seed: int) -> SinogramData:
    """Noisy chord averages ``Y_k = Rg(z_k) + eps_k`` with iid errors from ``law``."""
    trace = detector_trace(svd_forward(phantom.field()), grid)
    eps = law.sample(make_rng(seed), grid.n)
    meta = {"seed": int(seed), "law": law.describe(), "phantom": phantom.label, "rng": RNG_ALGORITHM}
    return SinogramData(grid, trace + eps, meta=meta, errors=eps)


def sup_error(g_hat: CoefficientField, truth_vals: np.ndarray, r, theta) -> float:
    return float(np.max(np.abs(evaluate_expansion(g_hat, r, theta).real - truth_vals)))


@dataclass
class ExperimentConfig:
    """Settings shared by the simulation studies and the command line.

    ``t=None`` selects the rate-balancing default bandwidth from ``rule``.
    """

    q_list: tuple = (16, 32, 64)
    q: int = 32
    ratio: float = 2.0 * math.pi
    phantom: PhantomSpec = field(default_factory=PhantomSpec)
    law: dict = field(default_factory=lambda: {"kind": "gaussian", "sigma": 1.0})
    t: Optional[int] = None
    rule: BandwidthRule = field(default_factory=BandwidthRule)
    filter: str = "hard"
    replications: int = 50
    base_seed: int = 0
    t_grid: Optional[tuple] = None
    t_grid_size: int = 41
    eval_nr: int = 50
    eval_ntheta: int = 50
    eval_r_max: float = 0.99
    tau: Optional[float] = None
    threads: int = 1

    def __post_init__(self):
        if self.replications < 1:
            raise DomainError("replications must be at least 1")
        if any(q < 1 for q in self.q_list) or self.q < 1:
            raise DomainError("all q must be positive")
        self.q_list = tuple(int(q) for q in self.q_list)
        if self.t_grid is not None:
            self.t_grid = tuple(float(x) for x in self.t_grid)

    @property
    def error_law(self) -> ErrorLaw:
        return law_from_dict(self.law)

    @property
    def filter_spec(self) -> FilterSpec:
        return FilterSpec.from_name(self.filter)

    def bandwidth(self, n: int) -> int:
        return int(self.t) if self.t is not None else default_bandwidth(n, self.rule)

    def thresholds(self) -> np.ndarray:
        if self.t_grid is not None:
            return np.asarray(self.t_grid, dtype=float)
        return default_t_grid(self.error_law, size=self.t_grid_size)

    def to_dict(self) -> dict:
        """JSON-ready settings; ``threads`` is left out because results do not depend on it."""
        return {
            "q_list": list(self.q_list),
            "q": self.q,
            "ratio": self.ratio,
            "phantom": self.phantom.to_dict(),
            "law": dict(self.law),
            "t": "auto" if self.t is None else self.t,
            "v": self.rule.v,
            "scale": self.rule.scale,
            "filter": self.filter,
            "replications": self.replications,
            "base_seed": self.base_seed,
            "t_grid": None if self.t_grid is None else list(self.t_grid),
            "t_grid_size": self.t_grid_size,
            "eval_grid": {"nr": self.eval_nr, "ntheta": self.eval_ntheta, "r_max": self.eval_r_max},
            "tau": self.tau,
            "rng": RNG_ALGORITHM,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        d = dict(d)
        kw = {}
        for key in ("q_list", "q", "ratio", "law", "filter", "replications", "base_seed", "t_grid",
                    "t_grid_size", "tau", "threads"):
            if key in d:
                kw[key] = d.pop(key)
        if "phantom" in d:
            kw["phantom"] = PhantomSpec.from_dict(d.pop("phantom"))
        t = d.pop("t", "auto")
        kw["t"] = None if t in (None, "auto") else int(t)
        kw["rule"] = BandwidthRule(v=float(d.pop("v", 5.0)), scale=float(d.pop("scale", 1.0)))
        ev = d.pop("eval_grid", {})
        kw["eval_nr"] = ev.get("nr", 50)
        kw["eval_ntheta"] = ev.get("ntheta", 50)
        kw["eval_r_max"] = ev.get("r_max", 0.99)
        d.pop("rng", None)
        if d:
            raise UsageError(f"unknown config keys: {sorted(d)}")
        return cls(**kw)

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def _one_fit(cfg: ExperimentConfig, grid: DesignGrid, t: int, seed: int):
    data = generate_data(cfg.phantom, grid, cfg.error_law, seed)
    return data, spectral_estimate(data, t, cfg.filter_spec)


def rate_study(cfg: ExperimentConfig) -> dict:
    """Median sup-norm error of the estimate per grid size, plus the log-log slope in ``n``.

    Returns a dict with ``rows`` (``q, n, t, median_sup_error, iqr,
    median_ellipsoid_norm``) and ``slope``.
    """
    truth = cfg.phantom.field()
    r, theta = polar_eval_grid(cfg.eval_nr, cfg.eval_ntheta, cfg.eval_r_max)
    truth_vals = evaluate_expansion(truth, r, theta).real
    truth_det = svd_forward(truth)
    tau = cfg.rule.v if cfg.tau is None else cfg.tau
    rows = []
    for q in cfg.q_list:
        grid = build_grid(q, cfg.ratio)
        t = cfg.bandwidth(grid.n)

        def rep(i, grid=grid, t=t):
            _, g_hat = _one_fit(cfg, grid, t, cfg.base_seed + i)
            return sup_error(g_hat, truth_vals, r, theta), ellipsoid_norm(truth_det - svd_forward(g_hat), tau)

        out = np.array(parallel_map(rep, cfg.replications, cfg.threads))
        q25, q50, q75 = np.percentile(out[:, 0], [25, 50, 75])
        rows.append({
            "q": q,
            "n": grid.n,
            "t": t,
            "median_sup_error": float(q50),
            "iqr": float(q75 - q25),
            "median_ellipsoid_norm": float(np.median(out[:, 1])),
        })
    slope = float("nan")
    if len(rows) >= 2:
        slope = float(np.polyfit(np.log([row["n"] for row in rows]),
                                 np.log([row["median_sup_error"] for row in rows]), 1)[0])
    return {"rows": rows, "slope": slope}


def linearization_study(cfg: ExperimentConfig) -> dict:
    """Median over replications of ``sqrt(n) sup_t |gap(t)|`` per grid size."""
    law = cfg.error_law
    t_grid = cfg.thresholds()
    rows = []
    for q in cfg.q_list:
        grid = build_grid(q, cfg.ratio)
        t = cfg.bandwidth(grid.n)

        def rep(i, grid=grid, t=t):
            data, g_hat = _one_fit(cfg, grid, t, cfg.base_seed + i)
            res = residuals(data, detector_trace(svd_forward(g_hat), grid))
            gap = linearization_gap(res, data.errors, grid.weights, law, t_grid)
            return math.sqrt(grid.n) * float(np.max(np.abs(gap)))

        vals = np.array(parallel_map(rep, cfg.replications, cfg.threads))
        rows.append({"q": q, "n": grid.n, "t": t, "median_scaled_sup_gap": float(np.median(vals))})
    return {"rows": rows}


def residual_process_eval(data: SinogramData, t: int, law: ErrorLaw, t_grid, filt: FilterSpec):
    """Residual process (and the gap, when true errors are known) for one data set."""
    g_hat = spectral_estimate(data, t, filt)
    res = residuals(data, detector_trace(svd_forward(g_hat), data.grid))
    ev = process(res, data.grid.weights, data.grid.n, law, t_grid)
    if data.errors is not None:
        gap = linearization_gap(res, data.errors, data.grid.weights, law, t_grid)
        ev = replace(ev, lin_gap=gap)
    return ev


def _covariance_se(x: np.ndarray) -> np.ndarray:
    # Monte Carlo standard error of each sample covariance entry.
    d = x - x.mean(axis=0)
    prod = d[:, :, None] * d[:, None, :]
    return prod.std(axis=0, ddof=1) / math.sqrt(len(x))


def covariance_study(cfg: ExperimentConfig, t_grid: Optional[Sequence[float]] = None, rel_tol: float = 0.15,
                     se_mult: float = 3.0) -> dict:
    """Monte Carlo covariance of the residual process at ``cfg.q`` against the limit kernel.

    The kernel is compared twice: with the stated limit prefactor ``8 pi^2 / 3`` and with
    the design's own ``n * sum w_k^2``.  Entrywise tolerance is
    ``max(rel_tol * |Sigma|, se_mult * MC standard error)``.
    """
    law = cfg.error_law
    t_grid = np.asarray(t_grid if t_grid is not None else
                        (cfg.t_grid if cfg.t_grid is not None else default_t_grid(law, size=5)), dtype=float)
    grid = build_grid(cfg.q, cfg.ratio)
    t = cfg.bandwidth(grid.n)
    filt = cfg.filter_spec

    def rep(i):
        data = generate_data(cfg.phantom, grid, law, cfg.base_seed + i)
        return residual_process_eval(data, t, law, t_grid, filt).process

    samples = np.array(parallel_map(rep, cfg.replications, cfg.threads))
    emp = np.cov(samples, rowvar=False, ddof=1).reshape(len(t_grid), len(t_grid))
    se = _covariance_se(samples)
    norm = weight_normalization(grid.weights)

    def compare(scale):
        theo = covariance_matrix(t_grid, law, scale=scale)
        tol = np.maximum(rel_tol * np.abs(theo), se_mult * se)
        ok = np.abs(emp - theo) <= tol
        return {
            "scale": scale,
            "theoretical": theo.tolist(),
            "tolerance": tol.tolist(),
            "within_tolerance": ok.tolist(),
            "match": bool(ok.all()),
            "max_abs_deviation": float(np.max(np.abs(emp - theo))),
        }

    limit = compare(LIMIT_KERNEL_SCALE)
    finite = compare(norm)
    theo = np.asarray(limit["theoretical"])
    return {
        "config": cfg.to_dict(),
        "q": cfg.q,
        "n": grid.n,
        "t": t,
        "t_grid": t_grid.tolist(),
        "replications": cfg.replications,
        "empirical": emp.tolist(),
        "mc_standard_error": se.tolist(),
        "weight_normalization": norm,
        "limit_kernel": limit,
        "finite_n_kernel": finite,
        "kernel_min_eigenvalue": float(np.linalg.eigvalsh(theo).min()),
        "kernel_symmetric": bool(np.array_equal(theo, theo.T)),
    }
