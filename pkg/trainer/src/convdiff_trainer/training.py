"""Training loop: minimize ||prediction - sharp||^2 over stored triples."""

from __future__ import annotations

import random
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np
import torch

from .model import RestorerUNet
from .tensorfile import read_tensor


@dataclass(frozen=True)
class TrainerConfig:
    patch_size: int = 64
    steps: int = 2000
    learning_rate: float = 2e-3
    seed: int = 0
    channels: int = 1
    base_width: int = 16
    batch_size: int = 8
    log_every: int = 50

    def __post_init__(self):
        if self.patch_size % 4:
            raise ValueError(f"patch_size must divide by 4, got {self.patch_size}")
        if self.steps < 1 or self.batch_size < 1:
            raise ValueError("steps and batch_size must be positive")


@dataclass(frozen=True)
class Triple:
    x_beta: np.ndarray
    beta: float
    x0: np.ndarray


def load_triples(data_dir) -> list[Triple]:
    """Load every triple_*_{xbeta,beta,x0}.cdt group from a directory."""
    data_dir = Path(data_dir)
    xbeta_files = sorted(data_dir.glob("triple_*_xbeta.cdt"))
    if not xbeta_files:
        raise ValueError(f"no triples found in {data_dir}")
    triples = []
    for xb_path in xbeta_files:
        stem = xb_path.name[:-len("_xbeta.cdt")]
        beta_path = data_dir / f"{stem}_beta.cdt"
        x0_path = data_dir / f"{stem}_x0.cdt"
        if not beta_path.exists() or not x0_path.exists():
            raise ValueError(f"incomplete triple {stem} in {data_dir}")
        x_beta = read_tensor(xb_path)
        x0 = read_tensor(x0_path)
        if x_beta.shape != x0.shape:
            raise ValueError(f"{stem}: x_beta {x_beta.shape} vs x0 {x0.shape}")
        beta = float(read_tensor(beta_path).reshape(-1)[0])
        triples.append(Triple(x_beta=x_beta, beta=beta, x0=x0))
    return triples


def _as_chw(arr: np.ndarray, channels: int) -> np.ndarray:
    chw = arr[np.newaxis] if arr.ndim == 2 else arr
    if chw.shape[0] != channels:
        raise ValueError(f"triple has {chw.shape[0]} channel(s), config says {channels}")
    return chw


def _crop(chw: np.ndarray, patch: int, rng: random.Random) -> np.ndarray:
    _, h, w = chw.shape
    if h < patch or w < patch:
        raise ValueError(f"images ({h}x{w}) smaller than patch_size {patch}")
    i = rng.randrange(h - patch + 1)
    j = rng.randrange(w - patch + 1)
    return chw[:, i:i + patch, j:j + patch]


def train(data_dir, cfg: TrainerConfig, out_path, *,
          loss_log_path=None) -> list[float]:
    """Train on the triples in ``data_dir``; save the model artifact.

    Returns the per-step loss history (also written to ``loss_log_path``
    or ``<out_path>.loss.txt`` as plain text, one value per line).
    """
    triples = load_triples(data_dir)
    torch.manual_seed(cfg.seed)
    rng = random.Random(cfg.seed)
    model = RestorerUNet(channels=cfg.channels, base_width=cfg.base_width)
    optimizer = torch.optim.Adam(model.parameters(), lr=cfg.learning_rate)
    planes = [(_as_chw(t.x_beta, cfg.channels), t.beta, _as_chw(t.x0, cfg.channels))
              for t in triples]
    losses: list[float] = []
    model.train()
    for step in range(cfg.steps):
        batch = [planes[rng.randrange(len(planes))] for _ in range(cfg.batch_size)]
        xs, betas, targets = [], [], []
        for x_beta, beta, x0 in batch:
            i = rng.randrange(2**31)
            crop_rng = random.Random(i)
            xs.append(_crop(x_beta, cfg.patch_size, crop_rng))
            targets.append(_crop(x0, cfg.patch_size, random.Random(i)))
            betas.append(beta)
        x = torch.from_numpy(np.stack(xs)).float()
        target = torch.from_numpy(np.stack(targets)).float()
        beta_t = torch.tensor(betas, dtype=torch.float32)
        optimizer.zero_grad()
        loss = torch.mean((model(x, beta_t) - target) ** 2)
        loss.backward()
        optimizer.step()
        value = float(loss.detach())
        if not np.isfinite(value):
            raise RuntimeError(f"training diverged at step {step}: loss={value}")
        losses.append(value)
        if step % cfg.log_every == 0 or step == cfg.steps - 1:
            print(f"step={step} loss={value:.6g}")
    out_path = Path(out_path)
    torch.save({"state_dict": model.state_dict(), "config": asdict(cfg)}, out_path)
    log_path = Path(loss_log_path) if loss_log_path else out_path.with_suffix(".loss.txt")
    log_path.write_text("".join(f"{v!r}\n" for v in losses))
    return losses


def load_model(path) -> RestorerUNet:
    artifact = torch.load(path, map_location="cpu", weights_only=True)
    cfg = artifact["config"]
    model = RestorerUNet(channels=cfg["channels"], base_width=cfg["base_width"])
    model.load_state_dict(artifact["state_dict"])
    model.eval()
    return model
