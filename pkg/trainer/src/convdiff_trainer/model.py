"""Small two-level U-Net conditioned on the degradation strength.

The strength beta enters through a sinusoidal embedding projected by an
MLP and added to the feature maps at every stage, mirroring the timestep
conditioning of diffusion denoisers. The network predicts a residual on
top of its input, scaled by beta: the required correction vanishes
linearly as beta -> 0 (the degraded image converges to the sharp one),
so the scaling bakes identity-at-zero into the architecture instead of
hoping training extrapolates below the smallest sampled strength.
"""

from __future__ import annotations

import math

import torch
import torch.nn as nn

EMBED_DIM = 64


def strength_embedding(beta: torch.Tensor, dim: int = EMBED_DIM) -> torch.Tensor:
    """Sinusoidal features of beta in [0, 1], shape (batch, dim)."""
    half = dim // 2
    freqs = torch.exp(torch.arange(half, dtype=beta.dtype, device=beta.device)
                      * (-math.log(10000.0) / (half - 1)))
    # scale beta into the usual timestep range so the frequencies spread
    angles = beta[:, None] * 1000.0 * freqs[None, :]
    return torch.cat([torch.sin(angles), torch.cos(angles)], dim=1)


class _Block(nn.Module):
    def __init__(self, in_ch: int, out_ch: int):
        super().__init__()
        self.conv1 = nn.Conv2d(in_ch, out_ch, 3, padding=1)
        self.conv2 = nn.Conv2d(out_ch, out_ch, 3, padding=1)
        self.norm1 = nn.GroupNorm(8, out_ch)
        self.norm2 = nn.GroupNorm(8, out_ch)
        self.act = nn.SiLU()
        self.embed = nn.Linear(EMBED_DIM, out_ch)

    def forward(self, x, emb):
        h = self.act(self.norm1(self.conv1(x)))
        h = h + self.embed(emb)[:, :, None, None]
        return self.act(self.norm2(self.conv2(h)))


class RestorerUNet(nn.Module):
    """(image, beta) -> sharp estimate; spatial dims must divide by 4."""

    def __init__(self, channels: int = 1, base_width: int = 32):
        super().__init__()
        w = base_width
        self.embed_mlp = nn.Sequential(
            nn.Linear(EMBED_DIM, EMBED_DIM), nn.SiLU(),
            nn.Linear(EMBED_DIM, EMBED_DIM))
        self.enc1 = _Block(channels, w)
        self.down1 = nn.Conv2d(w, w, 3, stride=2, padding=1)
        self.enc2 = _Block(w, 2 * w)
        self.down2 = nn.Conv2d(2 * w, 2 * w, 3, stride=2, padding=1)
        self.mid = _Block(2 * w, 2 * w)
        self.up2 = nn.ConvTranspose2d(2 * w, 2 * w, 2, stride=2)
        self.dec2 = _Block(4 * w, w)
        self.up1 = nn.ConvTranspose2d(w, w, 2, stride=2)
        self.dec1 = _Block(2 * w, w)
        self.out = nn.Conv2d(w, channels, 1)
        self.channels = channels
        self.base_width = base_width

    def forward(self, x: torch.Tensor, beta: torch.Tensor) -> torch.Tensor:
        if x.shape[-1] % 4 or x.shape[-2] % 4:
            raise ValueError(f"spatial dims must be divisible by 4, got {tuple(x.shape[-2:])}")
        emb = self.embed_mlp(strength_embedding(beta.to(x.dtype)))
        e1 = self.enc1(x, emb)
        e2 = self.enc2(self.down1(e1), emb)
        m = self.mid(self.down2(e2), emb)
        d2 = self.dec2(torch.cat([self.up2(m), e2], 1), emb)
        d1 = self.dec1(torch.cat([self.up1(d2), e1], 1), emb)
        scale = beta.to(x.dtype).reshape(-1, 1, 1, 1)
        return x + scale * self.out(d1)
