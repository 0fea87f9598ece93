"""
Covariance matrix adaptation evolution strategy on a box

Standard non-elitist (mu/mu_w, lambda)-CMA-ES with weighted recombination,
cumulative step-size adaptation and rank-one plus rank-mu covariance updates.
The search runs in box-normalized coordinates [0, 1]^n starting from the box
center. Samples outside the box are redrawn; a sample still outside after
MAX_RESAMPLES draws is scored PENALTY_BASE + squared distance to the box.
"""
import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from pydantic import BaseModel, Field

logger = logging.getLogger(__name__)

MAX_RESAMPLES = 100
PENALTY_BASE = 1e10
STAGNATION_WINDOW = 30  # generations
TOL_X = 1e-12           # normalized coordinates
MAX_CONDITION = 1e14


class CmaesConfig(BaseModel):
    """Optimizer settings; defaults follow the 3-parameter LPPLS search"""

    population_size: int = Field(default=4 + int(3 * math.log(3)), ge=4)
    sigma0: float = Field(default=0.3, gt=0.0)  # fraction of box width
    max_iterations: int = Field(default=500, ge=1)
    tol_fun: float = Field(default=1e-12, ge=0.0)  # relative
    restarts: int = Field(default=3, ge=1)
    seed: int = 0


@dataclass
class CmaesResult:
    """Best in-box point found by one run"""
    x: np.ndarray
    fun: float
    evaluations: int
    generations: int
    stop: str


def _box_distance_sq(z: np.ndarray) -> float:
    return float(np.sum((z - np.clip(z, 0.0, 1.0)) ** 2))


def cmaes_minimize(objective: Callable[[np.ndarray], float],
                   bounds: Sequence[Sequence[float]],
                   config: Optional[CmaesConfig] = None,
                   seed: Optional[int] = None) -> CmaesResult:
    """
    Minimize a total objective over a box

    Args:
        objective: maps a point in original coordinates to a real value; must not raise
        bounds: (n, 2) array of [lower, upper] per coordinate
        config: population, step size, budget and stopping settings
        seed: overrides config.seed

    Returns:
        CmaesResult; deterministic for a given seed
    """
    config = config or CmaesConfig()
    bounds = np.asarray(bounds, dtype=float)
    lower, upper = bounds[:, 0], bounds[:, 1]
    if np.any(upper <= lower):
        raise ValueError(f"empty search box {bounds.tolist()}")
    width = upper - lower
    n = len(lower)
    rng = np.random.default_rng(config.seed if seed is None else seed)

    def to_box(z: np.ndarray) -> np.ndarray:
        return lower + z * width

    # Strategy parameters
    lam = config.population_size
    mu = lam // 2
    weights = math.log(mu + 0.5) - np.log(np.arange(1, mu + 1))
    weights /= weights.sum()
    mueff = 1.0 / np.sum(weights ** 2)
    cc = (4 + mueff / n) / (n + 4 + 2 * mueff / n)
    cs = (mueff + 2) / (n + mueff + 5)
    c1 = 2 / ((n + 1.3) ** 2 + mueff)
    cmu = min(1 - c1, 2 * (mueff - 2 + 1 / mueff) / ((n + 2) ** 2 + mueff))
    damps = 1 + 2 * max(0.0, math.sqrt((mueff - 1) / (n + 1)) - 1) + cs
    chi_n = math.sqrt(n) * (1 - 1 / (4 * n) + 1 / (21 * n ** 2))

    # Dynamic state
    mean = np.full(n, 0.5)
    sigma = config.sigma0
    pc = np.zeros(n)
    ps = np.zeros(n)
    B = np.eye(n)
    D = np.ones(n)
    C = np.eye(n)
    inv_sqrt_C = np.eye(n)

    best_z = mean.copy()
    best_f = float(objective(to_box(mean)))
    evaluations = 1
    history = [best_f]
    stop = "max_iterations"
    generation = 0

    while generation < config.max_iterations:
        generation += 1
        zs = np.empty((lam, n))
        ys = np.empty((lam, n))
        fs = np.empty(lam)

        for k in range(lam):
            for _ in range(MAX_RESAMPLES):
                y = B @ (D * rng.standard_normal(n))
                z = mean + sigma * y
                if np.all((z >= 0.0) & (z <= 1.0)):
                    break
            zs[k], ys[k] = z, y
            distance = _box_distance_sq(z)
            if distance > 0.0:
                fs[k] = PENALTY_BASE + distance
            else:
                fs[k] = float(objective(to_box(z)))
                evaluations += 1
                if fs[k] < best_f:
                    best_f, best_z = fs[k], z.copy()

        order = np.argsort(fs, kind="stable")
        y_sel = ys[order[:mu]]
        y_w = weights @ y_sel
        mean = mean + sigma * y_w

        ps = (1 - cs) * ps + math.sqrt(cs * (2 - cs) * mueff) * (inv_sqrt_C @ y_w)
        ps_norm = np.linalg.norm(ps)
        hsig = ps_norm / math.sqrt(1 - (1 - cs) ** (2 * generation)) / chi_n < 1.4 + 2 / (n + 1)
        pc = (1 - cc) * pc + hsig * math.sqrt(cc * (2 - cc) * mueff) * y_w

        rank_mu = (y_sel.T * weights) @ y_sel
        C = ((1 - c1 - cmu) * C
             + c1 * (np.outer(pc, pc) + (1 - hsig) * cc * (2 - cc) * C)
             + cmu * rank_mu)
        sigma *= math.exp((cs / damps) * (ps_norm / chi_n - 1))

        C = np.triu(C) + np.triu(C, 1).T
        eigenvalues, B = np.linalg.eigh(C)
        eigenvalues = np.maximum(eigenvalues, 1e-300)
        D = np.sqrt(eigenvalues)
        inv_sqrt_C = B @ np.diag(1.0 / D) @ B.T

        history.append(best_f)
        if len(history) > STAGNATION_WINDOW:
            reference = history[-STAGNATION_WINDOW - 1]
            if reference - best_f <= config.tol_fun * max(abs(reference), 1e-300):
                stop = "tol_fun"
                break
        if sigma * D.max() < TOL_X:
            stop = "tol_x"
            break
        if eigenvalues.max() / eigenvalues.min() > MAX_CONDITION:
            stop = "condition"
            break

    logger.debug(f"CMA-ES stopped ({stop}) after {generation} generations, "
                 f"{evaluations} evaluations, best {best_f:.6g}")
    return CmaesResult(
        x=np.clip(to_box(best_z), lower, upper),
        fun=best_f,
        evaluations=evaluations,
        generations=generation,
        stop=stop,
    )
