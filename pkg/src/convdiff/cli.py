"""Command-line interface.

Subcommands: blur, trajectory, estimate-kernel, restore, gen-data,
evaluate. Exit codes: 0 success, 1 usage error, 2 processing error.
Option precedence is CLI flag > config file (--config, key=value lines)
> built-in default.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .degradation import degrade, trajectory, validate_kernel
from .fileio import read_image, read_kernel, write_image, write_kernel, write_tensor
from .metrics import evaluate_pair
from .pipeline import (InferenceConfig, PipelineDivergenceError,
                       gen_training_samples, infer)
from .restorers import (RestorerError, external_restorer, identity_restorer,
                        wiener_deconv_restorer)
from .spectral import kernel_to_transfer, spectrum_image, transfer_to_kernel
from .synth import GaussianSpec, make_gaussian_kernel
from .wiener import WienerConfig, estimate_from_images, luminance

_DEFAULTS = {
    "steps": 5,
    "size": 15,
    "support": 15,
    "s": 1e-8,
    "snr": 1e-2,
    "maxval": 255,
    "timeout": 120.0,
}


class _Parser(argparse.ArgumentParser):
    # usage problems must exit 1, not argparse's default 2
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _read_config(path) -> dict:
    cfg = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key=value")
        key, value = line.split("=", 1)
        cfg[key.strip()] = value.strip()
    return cfg


def _resolve(args, key, cast):
    given = getattr(args, key.replace("-", "_"), None)
    if given is not None:
        return given
    if args.config and key in args._config_values:
        return cast(args._config_values[key])
    return _DEFAULTS[key]


def _load_transfer(args, shape):
    """Blur transfer from --kernel FILE or --sigma/--size flags."""
    if args.kernel is not None:
        taps, _ = read_kernel(args.kernel)
    elif args.sigma is not None:
        size = _resolve(args, "size", int)
        taps = make_gaussian_kernel(GaussianSpec(size=size, sigma=args.sigma))
    else:
        raise ValueError("a blur kernel is required: pass --kernel FILE or --sigma S")
    return kernel_to_transfer(taps, *shape)


def _add_kernel_flags(sub):
    sub.add_argument("--kernel", help="kernel text file")
    sub.add_argument("--sigma", type=float, help="Gaussian kernel sigma")
    sub.add_argument("--size", type=int, help="Gaussian kernel size (odd, default 15)")


def _write_plane_or_planes(path, img, maxval):
    write_image(path, img, maxval=maxval)


def _cmd_blur(args) -> int:
    img = read_image(args.input)
    tf = _load_transfer(args, img.shape[-2:])
    out = degrade(img, tf, args.beta)
    _write_plane_or_planes(args.output, out, _resolve(args, "maxval", int))
    return 0


def _cmd_trajectory(args) -> int:
    img = read_image(args.input)
    tf = _load_transfer(args, img.shape[-2:])
    n = _resolve(args, "steps", int)
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    maxval = _resolve(args, "maxval", int)
    ext = "pgm" if img.ndim == 2 else "ppm"
    for t, x_t in enumerate(trajectory(img, tf, n)):
        write_image(outdir / f"x_{t:03d}.{ext}", x_t, maxval=maxval)
        write_image(outdir / f"spectrum_{t:03d}.pgm", spectrum_image(luminance(x_t)),
                    maxval=maxval)
    print(f"wrote {n + 1} trajectory images and spectra to {outdir}")
    return 0


def _cmd_estimate_kernel(args) -> int:
    sharp = read_image(args.sharp)
    blurred = read_image(args.blurred)
    cfg = WienerConfig(regularization=_resolve(args, "s", float))
    estimate, diag = estimate_from_images(sharp, blurred, cfg, return_diagnostics=True)
    support = _resolve(args, "support", int)
    taps, discarded = transfer_to_kernel(estimate, support)
    write_kernel(args.output, taps, sigma_hint=None)
    report = validate_kernel(estimate, support)
    print(f"max_negative_tap={report.max_negative_tap:.6g}")
    print(f"imag_residue={report.imag_residue:.6g}")
    print(f"dc_gain_error={report.dc_gain_error:.6g}")
    print(f"tail_mass={report.tail_mass:.6g}")
    print(f"is_valid={'true' if report.is_valid else 'false'}")
    print(f"discarded_energy={discarded:.6g}")
    print(f"excited_bin_fraction={diag.excitation_mask.mean():.6g}")
    return 0


def _make_restorer(args, shape):
    choice = args.restorer
    if choice == "identity":
        return identity_restorer()
    if choice == "wiener":
        tf = _load_transfer(args, shape)
        return wiener_deconv_restorer(tf, snr_reg=_resolve(args, "snr", float))
    if choice.startswith("external:"):
        command = choice[len("external:"):]
        if not command:
            raise ValueError("external restorer needs a command: external:<cmd>")
        return external_restorer(command, timeout=_resolve(args, "timeout", float))
    raise ValueError(f"unknown restorer {choice!r}; use wiener, identity, or external:<cmd>")


def _restore_one(args, in_path, out_path) -> None:
    img = read_image(in_path)
    restorer = _make_restorer(args, img.shape[-2:])
    cfg = InferenceConfig(
        n=_resolve(args, "steps", int),
        wiener=WienerConfig(regularization=_resolve(args, "s", float)),
        record_intermediates=args.dump_steps is not None,
    )
    result = infer(img, restorer, cfg)
    write_image(out_path, result.restored, maxval=_resolve(args, "maxval", int))
    if args.dump_steps is not None:
        dump = Path(args.dump_steps)
        dump.mkdir(parents=True, exist_ok=True)
        for rec in result.steps:
            stem = f"step_{rec.t:03d}"
            # 16-bit dumps: 8-bit quantization would corrupt the chained algebra
            write_image(dump / f"{stem}_xhat.pgm", luminance(np.clip(rec.x_hat0, 0, 1)),
                        maxval=65535)
            write_image(dump / f"{stem}_spectrum.pgm",
                        spectrum_image(luminance(rec.x_hat0)), maxval=65535)
            write_tensor(dump / f"{stem}_xnext.cdt", rec.x_next)
    if args.reference is not None:
        ref = read_image(args.reference)
        before = evaluate_pair(img, ref)
        after = evaluate_pair(result.restored, ref)
        print(f"psnr_input={before.psnr_db:.4f}")
        print(f"psnr_restored={after.psnr_db:.4f}")
        print(f"ssim_input={before.ssim:.4f}")
        print(f"ssim_restored={after.ssim:.4f}")


def _cmd_restore(args) -> int:
    if args.batch:
        indir = Path(args.input)
        outdir = Path(args.output)
        if not indir.is_dir():
            raise ValueError(f"--batch expects an input directory, got {indir}")
        outdir.mkdir(parents=True, exist_ok=True)
        paths = sorted(p for p in indir.iterdir() if p.suffix in (".pgm", ".ppm"))
        if not paths:
            raise ValueError(f"no .pgm/.ppm files in {indir}")
        for p in paths:
            _restore_one(args, p, outdir / p.name)
        print(f"restored {len(paths)} images to {outdir}")
        return 0
    _restore_one(args, args.input, args.output)
    return 0


def _cmd_gen_data(args) -> int:
    img = read_image(args.input)
    tf = _load_transfer(args, img.shape[-2:])
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    triples = gen_training_samples(img, tf, args.count, beta_law=args.beta_law,
                                   seed=args.seed)
    for i, triple in enumerate(triples):
        write_tensor(outdir / f"triple_{i:04d}_xbeta.cdt", triple.x_beta)
        write_tensor(outdir / f"triple_{i:04d}_beta.cdt", np.array([triple.beta]))
        write_tensor(outdir / f"triple_{i:04d}_x0.cdt", triple.x0)
    if args.sigma is not None:
        taps = make_gaussian_kernel(GaussianSpec(size=_resolve(args, "size", int),
                                                 sigma=args.sigma))
        write_kernel(outdir / "kernel.txt", taps, sigma_hint=args.sigma)
    elif args.kernel is not None:
        taps, hint = read_kernel(args.kernel)
        write_kernel(outdir / "kernel.txt", taps, sigma_hint=hint)
    print(f"wrote {len(triples)} triples to {outdir}")
    return 0


def _cmd_evaluate(args) -> int:
    a = read_image(args.image_a)
    b = read_image(args.image_b)
    report = evaluate_pair(a, b)
    print(f"psnr={report.psnr_db:.4f}")
    print(f"ssim={report.ssim:.4f}")
    print(f"mse={report.mse:.6g}")
    return 0


def _build_parser() -> _Parser:
    parser = _Parser(prog="convdiff",
                     description="Frequency-domain progressive blur and deblur")
    parser.add_argument("--config", help="key=value config file (flags win)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("blur", help="degrade an image with a blur kernel")
    p.add_argument("input")
    p.add_argument("output")
    _add_kernel_flags(p)
    p.add_argument("--beta", type=float, default=1.0,
                   help="degradation strength in [0,1] (default 1)")
    p.add_argument("--maxval", type=int, choices=(255, 65535))
    p.set_defaults(func=_cmd_blur)

    p = sub.add_parser("trajectory",
                       help="emit the n-step degradation trajectory and spectra")
    p.add_argument("input")
    p.add_argument("outdir")
    _add_kernel_flags(p)
    p.add_argument("--steps", type=int, help="trajectory steps n (default 5)")
    p.add_argument("--maxval", type=int, choices=(255, 65535))
    p.set_defaults(func=_cmd_trajectory)

    p = sub.add_parser("estimate-kernel",
                       help="Wiener-estimate the blur kernel from a sharp/blurred pair")
    p.add_argument("sharp")
    p.add_argument("blurred")
    p.add_argument("output", help="kernel text file to write")
    p.add_argument("--support", type=int, help="extraction window (odd, default 15)")
    p.add_argument("--s", type=float, help="Wiener regularization (default 1e-8)")
    p.set_defaults(func=_cmd_estimate_kernel)

    p = sub.add_parser("restore", help="iterative restoration of a blurred image")
    p.add_argument("input", help="blurred image (or directory with --batch)")
    p.add_argument("output", help="restored image (or directory with --batch)")
    p.add_argument("--restorer", default="wiener",
                   help="wiener | identity | external:<cmd> (default wiener)")
    _add_kernel_flags(p)
    p.add_argument("--steps", type=int, help="inference steps n (default 5)")
    p.add_argument("--snr", type=float,
                   help="deconvolution regularization (default 1e-2)")
    p.add_argument("--s", type=float, help="Wiener regularization (default 1e-8)")
    p.add_argument("--timeout", type=float, help="external restorer timeout seconds")
    p.add_argument("--reference", help="sharp reference; prints PSNR/SSIM lines")
    p.add_argument("--dump-steps", help="directory for per-step dumps")
    p.add_argument("--batch", action="store_true", help="process a directory")
    p.add_argument("--maxval", type=int, choices=(255, 65535))
    p.set_defaults(func=_cmd_restore)

    p = sub.add_parser("gen-data", help="generate training triples as tensor files")
    p.add_argument("input", help="sharp source image")
    p.add_argument("outdir")
    _add_kernel_flags(p)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--beta-law", choices=("half_open", "open"), default="half_open")
    p.set_defaults(func=_cmd_gen_data)

    p = sub.add_parser("evaluate", help="PSNR/SSIM report for an image pair")
    p.add_argument("image_a")
    p.add_argument("image_b")
    p.set_defaults(func=_cmd_evaluate)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args._config_values = _read_config(args.config) if args.config else {}
        return args.func(args)
    except (ValueError, OSError, RestorerError, PipelineDivergenceError) as exc:
        print(f"convdiff: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
