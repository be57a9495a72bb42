"""Dynamic projection techniques.

PCA and t-SNE run under two strategies: *global* fits one model on the
row-concatenation of all revisions (t-SNE embeds all T*N rows in one
optimization and splits the result into frames), *per-timeframe* fits each
revision independently with per-revision seeds. The third technique couples
the frames directly: a t-SNE variant that jointly optimizes all frames while
penalizing per-point movement between consecutive frames with weight
``movement_penalty``.

All projectors are deterministic functions of (input, config, seed).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np

from .dataset import DynamicDataset, ProjectionSequence
from .neighbors import pairwise_sq_distances

# Joint t-SNE embeddings hold several (T*N)^2 float64 matrices.
MAX_JOINT_ROWS = 20000


# ---------------------------------------------------------------------------
# PCA
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PCAModel:
    """Top-2 principal axes of a fitted data matrix.

    ``components`` rows are orthonormal; ``eigenvalues`` are the matching
    covariance eigenvalues in descending order. Each component's
    largest-magnitude entry is made positive so fits are reproducible
    across platforms.
    """

    mean: np.ndarray
    components: np.ndarray
    eigenvalues: np.ndarray


def fit_pca(m: np.ndarray) -> PCAModel:
    """Mean-centered covariance eigendecomposition, keeping the top 2 axes."""
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] < 3:
        raise ValueError(f"need at least 3 rows, got shape {m.shape}")
    if m.shape[1] < 2:
        raise ValueError("need at least 2 columns for a 2D projection")
    mean = m.mean(axis=0)
    centered = m - mean
    cov = centered.T @ centered / (m.shape[0] - 1)
    eigvals, eigvecs = np.linalg.eigh(cov)
    if float(np.clip(eigvals, 0.0, None).sum()) == 0.0:
        raise ValueError("zero variance: all rows identical")
    top = eigvals[::-1][:2]
    components = eigvecs[:, ::-1][:, :2].T.copy()
    for row in components:
        if row[np.argmax(np.abs(row))] < 0:
            row *= -1.0
    return PCAModel(
        mean=mean,
        components=components,
        eigenvalues=np.clip(top, 0.0, None),
    )


def transform_pca(model: PCAModel, m: np.ndarray) -> np.ndarray:
    m = np.asarray(m, dtype=np.float64)
    if m.shape[1] != model.mean.shape[0]:
        raise ValueError(
            f"dimension mismatch: model fitted on {model.mean.shape[0]} columns, "
            f"input has {m.shape[1]}"
        )
    return (m - model.mean) @ model.components.T


# ---------------------------------------------------------------------------
# t-SNE
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TSNEConfig:
    perplexity: float = 30.0
    iterations: int = 1000
    learning_rate: float = 200.0
    momentum_start: float = 0.5
    momentum_final: float = 0.8
    momentum_switch_iter: int = 250
    early_exaggeration: float = 12.0
    exaggeration_iters: int = 250
    seed: int = 0
    init_scale: float = 1e-4
    bisection_tol: float = 1e-5
    bisection_max_iter: int = 50

    def __post_init__(self):
        if self.perplexity <= 0:
            raise ValueError("perplexity must be positive")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")

    def as_dict(self) -> dict:
        return {
            "perplexity": self.perplexity,
            "iterations": self.iterations,
            "learning_rate": self.learning_rate,
            "momentum_start": self.momentum_start,
            "momentum_final": self.momentum_final,
            "momentum_switch_iter": self.momentum_switch_iter,
            "early_exaggeration": self.early_exaggeration,
            "exaggeration_iters": self.exaggeration_iters,
            "seed": self.seed,
            "init_scale": self.init_scale,
        }


@dataclass(frozen=True)
class DTSNEConfig:
    base: TSNEConfig = TSNEConfig()
    movement_penalty: float = 0.1

    def __post_init__(self):
        if self.movement_penalty < 0:
            raise ValueError("movement_penalty must be >= 0")

    def as_dict(self) -> dict:
        d = self.base.as_dict()
        d["movement_penalty"] = self.movement_penalty
        return d


def conditional_affinities(
    sq_dists: np.ndarray,
    perplexity: float,
    tol: float = 1e-5,
    max_iter: int = 50,
) -> tuple[np.ndarray, np.ndarray, int]:
    """Per-row Gaussian conditional distributions calibrated by bisection so
    each row's perplexity matches the target.

    Returns ``(P_conditional, precisions, n_unconverged)`` where
    ``precisions[i]`` is the row's Gaussian precision beta = 1/(2*sigma^2).
    Rows whose bisection does not converge within ``max_iter`` are kept at
    their last estimate and counted, not failed.
    """
    n = sq_dists.shape[0]
    target_entropy = np.log(perplexity)
    d2 = np.ascontiguousarray(sq_dists, dtype=np.float64)

    # start each row's precision at the scale of its distances
    row_mean = d2.sum(axis=1) / max(n - 1, 1)
    beta = np.where(row_mean > 0, 1.0 / np.maximum(row_mean, 1e-300), 1.0)
    beta_lo = np.zeros(n)
    beta_hi = np.full(n, np.inf)
    p = np.zeros((n, n))
    active = np.arange(n)
    d2_buf = np.empty_like(d2)
    w_buf = np.empty_like(d2)
    for _ in range(max_iter):
        k = active.size
        d2a = np.take(d2, active, axis=0, out=d2_buf[:k])
        w = w_buf[:k]
        np.multiply(d2a, -beta[active, None], out=w)
        np.exp(w, out=w)
        w[np.arange(k), active] = 0.0  # exclude self
        sum_w = np.maximum(w.sum(axis=1), 1e-300)
        # entropy of w/sum_w: H = log(sum_w) + beta * E[d2]
        mean_d2 = np.einsum("ij,ij->i", w, d2a) / sum_w
        entropy = np.log(sum_w) + beta[active] * mean_d2
        np.divide(w, sum_w[:, None], out=w)
        p[active] = w

        diff = entropy - target_entropy
        done = np.abs(diff) < tol
        still = active[~done]
        if still.size == 0:
            active = still
            break
        diff = diff[~done]
        too_flat = diff > 0  # entropy too high -> sharpen -> raise beta
        idx_up = still[too_flat]
        beta_lo[idx_up] = beta[idx_up]
        beta[idx_up] = np.where(
            np.isinf(beta_hi[idx_up]),
            beta[idx_up] * 2.0,
            (beta[idx_up] + beta_hi[idx_up]) / 2.0,
        )
        idx_dn = still[~too_flat]
        beta_hi[idx_dn] = beta[idx_dn]
        beta[idx_dn] = np.where(
            beta_lo[idx_dn] == 0.0,
            beta[idx_dn] / 2.0,
            (beta[idx_dn] + beta_lo[idx_dn]) / 2.0,
        )
        active = still

    np.fill_diagonal(p, 0.0)
    return p, beta, int(active.size)


def _affinities_diag(m: np.ndarray, cfg: TSNEConfig) -> tuple[np.ndarray, int]:
    n = m.shape[0]
    if n < 5:
        raise ValueError(f"need at least 5 points, got {n}")
    if cfg.perplexity >= (n - 1) / 3:
        raise ValueError(
            f"perplexity {cfg.perplexity} infeasible for {n} points "
            f"(needs perplexity < {(n - 1) / 3:.2f})"
        )
    cond, _, unconverged = conditional_affinities(
        pairwise_sq_distances(m), cfg.perplexity, cfg.bisection_tol, cfg.bisection_max_iter
    )
    if unconverged:
        warnings.warn(
            f"perplexity bisection did not converge for {unconverged} of {n} rows",
            RuntimeWarning,
            stacklevel=3,
        )
    p = (cond + cond.T) / (2.0 * n)
    return np.maximum(p, 1e-12), unconverged


def joint_affinities(m: np.ndarray, cfg: TSNEConfig) -> np.ndarray:
    """Symmetrized input affinities for one t-SNE problem."""
    return _affinities_diag(m, cfg)[0]


def _student_t_kernel(y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Unnormalized Student-t similarities of an embedding and the normalized
    probabilities Q."""
    ws = _TsneWorkspace(y.shape[0])
    num, q = ws.kernel(y)
    return num.copy(), q.copy()


class _TsneWorkspace:
    """Preallocated N x N buffers for the optimization loop. Large-N runs are
    memory-bandwidth bound; reusing buffers and splitting the 2D distance
    into per-column broadcasts beats a fresh k=2 GEMM every iteration."""

    def __init__(self, n: int, dtype=np.float64):
        self.num = np.empty((n, n), dtype)
        self.tmp = np.empty((n, n), dtype)
        self.w = np.empty((n, n), dtype)

    def kernel(self, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Student-t similarities of a 2D embedding: ``num`` unnormalized
        (zero diagonal) and ``q`` normalized and floored, in shared buffers."""
        x0, x1 = y[:, 0], y[:, 1]
        np.subtract(x0[:, None], x0[None, :], out=self.num)
        np.multiply(self.num, self.num, out=self.num)
        np.subtract(x1[:, None], x1[None, :], out=self.tmp)
        np.multiply(self.tmp, self.tmp, out=self.tmp)
        self.num += self.tmp
        self.num += 1.0
        np.reciprocal(self.num, out=self.num)
        np.fill_diagonal(self.num, 0.0)
        np.multiply(self.num, 1.0 / self.num.sum(), out=self.tmp)
        np.maximum(self.tmp, 1e-12, out=self.tmp)
        return self.num, self.tmp

    def gradient(self, p: np.ndarray, y: np.ndarray) -> np.ndarray:
        num, q = self.kernel(y)
        np.subtract(p, q, out=self.w)
        self.w *= num
        return 4.0 * (self.w.sum(axis=1)[:, None] * y - self.w @ y)

    def kl(self, p: np.ndarray, y: np.ndarray) -> float:
        _, q = self.kernel(y)
        return kl_divergence(p, q)


def kl_divergence(p: np.ndarray, q: np.ndarray) -> float:
    return float(np.sum(p * np.log(p / q)))


def _update_gains(gains: np.ndarray, grad: np.ndarray, velocity: np.ndarray) -> None:
    """Per-coordinate adaptive gains of the classic optimizer: grow when the
    gradient keeps pointing against the velocity, shrink otherwise."""
    same_sign = (grad > 0) == (velocity > 0)
    gains[same_sign] *= 0.8
    gains[~same_sign] += 0.2
    np.maximum(gains, 0.01, out=gains)


@dataclass
class TSNEDiagnostics:
    kl_after_exaggeration: float
    kl_final: float
    unconverged_rows: int


def tsne(
    m: np.ndarray, cfg: TSNEConfig | None = None, return_diagnostics: bool = False
):
    """Embed the rows of ``m`` into 2D with t-SNE.

    Standard formulation: perplexity-calibrated Gaussian input affinities,
    Student-t low-dimensional kernel, gradient descent with momentum and an
    early exaggeration phase, seeded Gaussian initialization. Deterministic
    given the seed.
    """
    cfg = cfg or TSNEConfig()
    m = np.asarray(m, dtype=np.float64)
    p, unconverged = _affinities_diag(m, cfg)
    n = m.shape[0]

    # optimization runs in single precision: the loop is memory-bandwidth
    # bound and the layout is far less precise than float32 anyway; the
    # affinity calibration above stays in double
    p = p.astype(np.float32)
    rng = np.random.default_rng(cfg.seed)
    y = rng.normal(0.0, cfg.init_scale, size=(n, 2)).astype(np.float32)
    velocity = np.zeros_like(y)
    gains = np.ones_like(y)
    kl_after_exaggeration = np.nan
    ws = _TsneWorkspace(n, np.float32)
    lr = np.float32(cfg.learning_rate)
    p_exag = p * np.float32(cfg.early_exaggeration)

    exag_end = min(cfg.exaggeration_iters, cfg.iterations)
    for it in range(cfg.iterations):
        p_used = p_exag if it < exag_end else p
        momentum = (
            cfg.momentum_start if it < cfg.momentum_switch_iter else cfg.momentum_final
        )
        grad = ws.gradient(p_used, y)
        _update_gains(gains, grad, velocity)
        velocity = np.float32(momentum) * velocity - lr * gains * grad
        y = y + velocity
        y = y - y.mean(axis=0)
        if it == exag_end - 1:
            kl_after_exaggeration = ws.kl(p, y)

    kl_final = ws.kl(p, y)
    out = y.astype(np.float64)
    if return_diagnostics:
        return out, TSNEDiagnostics(
            kl_after_exaggeration=kl_after_exaggeration,
            kl_final=kl_final,
            unconverged_rows=unconverged,
        )
    return out


def dtsne(d: DynamicDataset, cfg: DTSNEConfig | None = None) -> ProjectionSequence:
    """Jointly embed all revisions, coupling consecutive frames.

    Minimizes the sum of per-frame KL divergences plus
    ``movement_penalty / (2 N (T-1))`` times the total squared per-point
    movement between consecutive frames. All frames start from one shared
    seeded layout; updates are synchronous across frames.
    """
    cfg = cfg or DTSNEConfig()
    base = cfg.base
    t_count, n = d.num_timesteps, d.num_samples

    p_frames = [joint_affinities(rev, base) for rev in d.revisions]

    p_frames = [pf.astype(np.float32) for pf in p_frames]
    rng = np.random.default_rng(base.seed)
    shared = rng.normal(0.0, base.init_scale, size=(n, 2)).astype(np.float32)
    y = np.repeat(shared[None, :, :], t_count, axis=0)
    velocity = np.zeros_like(y)
    gains = np.ones_like(y)
    move_scale = cfg.movement_penalty / (2.0 * n * (t_count - 1)) if t_count > 1 else 0.0
    move_scale = np.float32(move_scale)
    ws = _TsneWorkspace(n, np.float32)
    lr = np.float32(base.learning_rate)
    p_exag = [pf * np.float32(base.early_exaggeration) for pf in p_frames]

    exag_end = min(base.exaggeration_iters, base.iterations)
    for it in range(base.iterations):
        frames_p = p_exag if it < exag_end else p_frames
        momentum = (
            base.momentum_start if it < base.momentum_switch_iter else base.momentum_final
        )
        grad = np.empty_like(y)
        for t in range(t_count):
            grad[t] = ws.gradient(frames_p[t], y[t])
        if move_scale > 0.0:
            diff = y[1:] - y[:-1]
            grad[:-1] += np.float32(-2.0) * move_scale * diff
            grad[1:] += np.float32(2.0) * move_scale * diff
        _update_gains(gains, grad, velocity)
        velocity = np.float32(momentum) * velocity - lr * gains * grad
        y = y + velocity
        y = y - y.mean(axis=1, keepdims=True)

    return ProjectionSequence(
        dataset_name=d.name,
        technique="dt-SNE",
        frames=tuple(y[t].astype(np.float64) for t in range(t_count)),
    )


# ---------------------------------------------------------------------------
# Strategy wrapper
# ---------------------------------------------------------------------------

GLOBAL = "global"
PER_TIMEFRAME = "per_timeframe"

_STRATEGY_ALIASES = {
    "global": GLOBAL,
    "g": GLOBAL,
    "per_timeframe": PER_TIMEFRAME,
    "tf": PER_TIMEFRAME,
}


def normalize_strategy(strategy: str) -> str:
    key = strategy.lower()
    if key not in _STRATEGY_ALIASES:
        raise ValueError(f"unknown strategy {strategy!r} (use global/G or per_timeframe/TF)")
    return _STRATEGY_ALIASES[key]


def technique_label(technique: str, strategy: str) -> str:
    if technique == "dtsne":
        return "dt-SNE"
    prefix = "G" if normalize_strategy(strategy) == GLOBAL else "TF"
    return f"{prefix}-{'PCA' if technique == 'pca' else 'tSNE'}"


def project_dynamic(
    d: DynamicDataset,
    technique: str,
    strategy: str = GLOBAL,
    config: TSNEConfig | DTSNEConfig | None = None,
) -> ProjectionSequence:
    """Project a dynamic dataset with one technique under one strategy.

    ``technique`` is ``pca``, ``tsne`` or ``dtsne``; ``strategy`` is
    ``global`` (fit once on all revisions concatenated) or ``per_timeframe``
    (independent fit per revision, seeds derived as seed + t). The joint
    technique ignores the strategy.
    """
    technique = technique.lower()
    if technique == "dtsne":
        if config is not None and not isinstance(config, DTSNEConfig):
            config = DTSNEConfig(base=config)
        return dtsne(d, config)

    strategy = normalize_strategy(strategy)
    label = technique_label(technique, strategy)

    if technique == "pca":
        if strategy == GLOBAL:
            model = fit_pca(d.stacked())
            frames = tuple(transform_pca(model, rev) for rev in d.revisions)
        else:
            frames = tuple(
                transform_pca(fit_pca(rev), rev) for rev in d.revisions
            )
    elif technique == "tsne":
        cfg = config if isinstance(config, TSNEConfig) else TSNEConfig()
        if strategy == GLOBAL:
            stacked = d.stacked()
            if stacked.shape[0] > MAX_JOINT_ROWS:
                raise ValueError(
                    f"joint embedding of {stacked.shape[0]} rows exceeds the "
                    f"{MAX_JOINT_ROWS}-row guard (T*N too large for an exact "
                    "O((T*N)^2) optimization)"
                )
            flat = tsne(stacked, cfg)
            n = d.num_samples
            frames = tuple(
                flat[t * n : (t + 1) * n].copy() for t in range(d.num_timesteps)
            )
        else:
            frames = tuple(
                tsne(rev, replace(cfg, seed=cfg.seed + t))
                for t, rev in enumerate(d.revisions)
            )
    else:
        raise ValueError(f"unknown technique {technique!r} (use pca, tsne or dtsne)")

    return ProjectionSequence(dataset_name=d.name, technique=label, frames=frames)
