"""CLI: ``train`` on tensor triples, ``serve`` one restoration request.

``serve`` implements the subprocess restorer contract: it is invoked with
``--input <tensor> --beta <float> --output <tensor>`` and exits 0 on
success, 2 on any processing failure.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np
import torch

from .tensorfile import read_tensor, write_tensor
from .training import TrainerConfig, load_model, train


def _cmd_train(args) -> int:
    cfg = TrainerConfig(patch_size=args.patch, steps=args.steps,
                        learning_rate=args.lr, seed=args.seed,
                        channels=args.channels, base_width=args.width,
                        batch_size=args.batch)
    losses = train(args.data, cfg, args.out)
    print(f"final_loss={losses[-1]:.6g}")
    print(f"model={args.out}")
    return 0


def _serve_once(model, in_path, beta, out_path) -> None:
    arr = read_tensor(in_path)
    chw = arr[np.newaxis] if arr.ndim == 2 else arr
    if chw.ndim != 3 or chw.shape[0] != model.channels:
        raise ValueError(f"expected {model.channels}-channel image, got shape {arr.shape}")
    h, w = chw.shape[1:]
    pad_h = (-h) % 4
    pad_w = (-w) % 4
    x = torch.from_numpy(chw).float()[None]
    if pad_h or pad_w:
        x = torch.nn.functional.pad(x, (0, pad_w, 0, pad_h), mode="reflect")
    with torch.no_grad():
        out = model(x, torch.tensor([beta], dtype=torch.float32))
    out = out[0, :, :h, :w].clamp(0.0, 1.0).numpy().astype(np.float64)
    write_tensor(out_path, out if arr.ndim == 3 else out[0])


def _cmd_serve(args) -> int:
    model = load_model(args.model)
    _serve_once(model, args.input, args.beta, args.output)
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="convdiff-trainer", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="fit the restorer on a triple directory")
    p.add_argument("--data", required=True, help="directory of triple_*.cdt files")
    p.add_argument("--out", required=True, help="model artifact path")
    p.add_argument("--steps", type=int, default=2000)
    p.add_argument("--lr", type=float, default=2e-3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--patch", type=int, default=64)
    p.add_argument("--channels", type=int, default=1)
    p.add_argument("--width", type=int, default=16)
    p.add_argument("--batch", type=int, default=8)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("serve", help="restore one tensor file")
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--output", required=True)
    p.set_defaults(func=_cmd_serve)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"convdiff-trainer: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
