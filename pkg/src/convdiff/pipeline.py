"""Iterative inference loop and training-sample generation.

Inference starts from the blurred observation and walks the degradation
trajectory backwards. At step t (from n down to 1):

1. the restorer predicts a sharp estimate from the current intermediate
   at strength t/n;
2. a temporary blur transfer is re-estimated by Wiener inversion between
   the prediction and the *original* observation;
3. the next intermediate is the prediction re-degraded to strength
   (t-1)/n.

The kernel is always re-measured against the original observation, never
against the previous intermediate; that is the literal formulation, and
it is also the mechanism behind the error accumulation the per-step
validity diagnostics are there to quantify. The final answer is the last
sharp prediction (the loop's last re-degradation uses beta = 0, which is
the identity).

Intermediates are chained unclamped to keep the fractional-power algebra
exact; the returned image is clamped once, at the boundary.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .degradation import KernelValidityReport, degrade, validate_kernel
from .restorers import RestorerError, RestorerHandle
from .spectral import ensure_image
from .wiener import WienerConfig, estimate_from_images

__all__ = [
    "InferenceConfig",
    "InferenceResult",
    "StepRecord",
    "TrainingTriple",
    "PipelineDivergenceError",
    "infer",
    "gen_training_samples",
    "mse",
]

#: Intermediates whose mean drifts from the observation's mean by more
#: than this abort the run: DC gain 1 should conserve it, so a larger
#: drift means the loop is emitting garbage.
MEAN_DRIFT_LIMIT = 0.1


class PipelineDivergenceError(RuntimeError):
    """An intermediate went non-finite or lost DC conservation."""


@dataclass(frozen=True)
class InferenceConfig:
    n: int = 5
    wiener: WienerConfig = field(default_factory=WienerConfig)
    record_intermediates: bool = False
    validate_each_step: bool = False
    validity_support: int = 15

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"need at least one step, got n={self.n}")


@dataclass(frozen=True)
class StepRecord:
    """One loop iteration: inputs, estimate, and the produced intermediate."""

    t: int
    beta: float
    x_t: np.ndarray = field(repr=False)
    x_hat0: np.ndarray = field(repr=False)
    transfer_estimate: np.ndarray = field(repr=False)
    x_next: np.ndarray = field(repr=False)
    validity: KernelValidityReport | None = None


@dataclass(frozen=True)
class InferenceResult:
    restored: np.ndarray = field(repr=False)
    steps: tuple[StepRecord, ...] = ()


def infer(y: np.ndarray, restorer: RestorerHandle,
          cfg: InferenceConfig | None = None) -> InferenceResult:
    """Run the iterative restoration loop on a blurred observation.

    Restorer failures propagate as :class:`RestorerError` with the step
    index attached; non-finite or mean-drifting intermediates raise
    :class:`PipelineDivergenceError`.
    """
    cfg = cfg or InferenceConfig()
    obs = ensure_image(y)
    mean_y = obs.mean()
    x_t = obs.copy()
    records: list[StepRecord] = []
    x_hat = obs
    for t in range(cfg.n, 0, -1):
        beta = t / cfg.n
        try:
            x_hat = restorer.restore(x_t, beta)
        except RestorerError as exc:
            exc.step = t
            raise RestorerError(f"step t={t}: {exc}", returncode=exc.returncode,
                                stderr=exc.stderr, step=t) from exc
        x_hat = np.asarray(x_hat, dtype=np.float64)
        if x_hat.shape != obs.shape:
            raise ValueError(
                f"restorer {restorer.name!r} changed shape {obs.shape} -> {x_hat.shape}")
        if not np.isfinite(x_hat).all():
            raise PipelineDivergenceError(f"non-finite sharp estimate at step t={t}")
        h_est = estimate_from_images(x_hat, obs, cfg.wiener)
        x_next = degrade(x_hat, h_est, (t - 1) / cfg.n, clamp=False)
        if not np.isfinite(x_next).all():
            raise PipelineDivergenceError(f"non-finite intermediate at step t={t - 1}")
        drift = abs(x_next.mean() - mean_y)
        if drift > MEAN_DRIFT_LIMIT:
            raise PipelineDivergenceError(
                f"mean drift {drift:.3g} at step t={t - 1} exceeds {MEAN_DRIFT_LIMIT}")
        if cfg.record_intermediates or cfg.validate_each_step:
            validity = (validate_kernel(h_est, cfg.validity_support)
                        if cfg.validate_each_step else None)
            records.append(StepRecord(t=t, beta=beta, x_t=x_t, x_hat0=x_hat,
                                      transfer_estimate=h_est, x_next=x_next,
                                      validity=validity))
        x_t = x_next
    return InferenceResult(restored=np.clip(x_hat, 0.0, 1.0), steps=tuple(records))


@dataclass(frozen=True)
class TrainingTriple:
    """A degraded image, its strength, and the sharp original.

    ``x_beta`` is exactly ``degrade(x0, transfer, beta)``; the generating
    transfer rides along so the triple is self-describing.
    """

    x_beta: np.ndarray = field(repr=False)
    beta: float
    x0: np.ndarray = field(repr=False)
    transfer: np.ndarray | None = field(repr=False, default=None)


def _draw_betas(rng: np.random.Generator, count: int, beta_law: str) -> np.ndarray:
    if beta_law == "half_open":
        # 1 - U[0,1) lies in (0, 1]
        return 1.0 - rng.random(count)
    if beta_law == "open":
        betas = rng.random(count)
        while (betas == 0.0).any():  # measure-zero, but keep the contract exact
            redo = betas == 0.0
            betas[redo] = rng.random(int(redo.sum()))
        return betas
    raise ValueError(f"beta_law must be 'half_open' or 'open', got {beta_law!r}")


def gen_training_samples(x0: np.ndarray, tf: np.ndarray, count: int,
                         beta_law: str = "half_open",
                         seed: int | None = None) -> list[TrainingTriple]:
    """Draw training triples with independent degradation strengths.

    ``half_open`` samples beta uniformly on (0, 1], ``open`` on (0, 1).
    Deterministic for a given seed.
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    sharp = ensure_image(x0)
    rng = np.random.default_rng(seed)
    betas = _draw_betas(rng, count, beta_law)
    return [TrainingTriple(x_beta=degrade(sharp, tf, b), beta=float(b),
                           x0=sharp.copy(), transfer=np.asarray(tf))
            for b in betas]


def mse(a: np.ndarray, b: np.ndarray) -> float:
    """Mean squared error over all samples."""
    x = np.asarray(a, dtype=np.float64)
    y = np.asarray(b, dtype=np.float64)
    if x.shape != y.shape:
        raise ValueError(f"shapes differ: {x.shape} vs {y.shape}")
    return float(np.mean((x - y) ** 2))
