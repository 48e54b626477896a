"""Command-line front end.

    chaosjpeg keygen   --out K.key [--seed S]
    chaosjpeg encrypt  --in img.ppm --key K.key --out ct.jpg
    chaosjpeg decrypt  --in ct.jpg --key K.key --out rec.ppm
    chaosjpeg analyze  --a x --b y
    chaosjpeg attack   --in any.jpg --kind dcm|ncc|eac|plz --out map.pgm [--component y|cb|cr]
    chaosjpeg simulate --in ct.jpg --out ct2.jpg [--qf 71]

Exit codes: 0 success, 1 usage error, 2 input or format error, 3 policy
rejection. Every output is written to a temporary file in the target
directory and renamed into place only once the command has succeeded.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import tempfile
from pathlib import Path

from . import __version__
from .analysis import ATTACK_KINDS, channel_entropy, psnr, run_attack
from .chaos import format_key, generate_key, read_key_file
from .cipher import CiphertextImage, decrypt_coefficients, encrypt_image
from .errors import ChaosJpegError, ImageTooLarge, MalformedBitstream, Unsupported
from .jpeg import decode_jpeg, render
from .netpbm import NetpbmError, decode_netpbm, encode_netpbm
from .osn import PlatformPolicy, platform_process, survival_report

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INPUT = 2
EXIT_POLICY = 3

COMPONENTS = ("y", "cb", "cr")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad arguments; route it to our usage code
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _atomic_write(path, data: bytes):
    path = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent or ".")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise


class InputError(ChaosJpegError, ValueError):
    pass


def _parse(path, decoder):
    """Read ``path`` and decode it, naming the file in any format error."""
    data = Path(path).read_bytes()
    try:
        return decoder(data)
    except (MalformedBitstream, NetpbmError) as exc:
        raise InputError(f"{path}: {exc}") from exc


def _load_pixels(path):
    """8-bit pixels from a PGM/PPM file or a baseline JPEG."""
    with open(path, "rb") as fh:
        magic = fh.read(2)
    if magic == b"\xff\xd8":
        return render(_parse(path, decode_jpeg))
    return _parse(path, decode_netpbm)


def _check_output_dir(path):
    parent = Path(path).parent
    if not parent.is_dir():
        raise FileNotFoundError(f"output directory does not exist: {parent}")


def cmd_keygen(args):
    _check_output_dir(args.out)
    key = generate_key(args.seed)
    _atomic_write(args.out, format_key(key).encode("ascii"))
    return EXIT_OK


def cmd_encrypt(args):
    key = read_key_file(args.key)
    img = _parse(args.input, decode_netpbm)
    _check_output_dir(args.out)
    ct = encrypt_image(img, key)
    _atomic_write(args.out, ct.data)
    return EXIT_OK


def cmd_decrypt(args):
    key = read_key_file(args.key)
    image = _parse(args.input, decode_jpeg)
    _check_output_dir(args.out)
    img = render(decrypt_coefficients(image, key))
    _atomic_write(args.out, encode_netpbm(img))
    return EXIT_OK


def _channel_names(img):
    return ("gray",) if img.ndim == 2 else ("r", "g", "b")


def cmd_analyze(args):
    a = _load_pixels(args.a)
    b = _load_pixels(args.b)
    lines = []
    channels = a[..., None] if a.ndim == 2 else a
    for name, i in zip(_channel_names(a), range(channels.shape[-1])):
        lines.append(f"entropy.{name}={channel_entropy(channels[..., i]):.4f}")
    value = psnr(a, b)
    lines.append("psnr=identical" if math.isinf(value) else f"psnr={value:.4f}")
    sys.stdout.write("\n".join(lines) + "\n")
    return EXIT_OK


def cmd_attack(args):
    image = _parse(args.input, decode_jpeg)
    index = COMPONENTS.index(args.component)
    if index >= len(image.planes):
        raise ValueError(f"{args.input}: has no {args.component} component")
    _check_output_dir(args.out)
    amap = run_attack(args.kind, image.planes[index])
    out = Path(args.out)
    big = out.with_name(f"{out.stem}_x8{out.suffix or '.pgm'}")
    _atomic_write(out, encode_netpbm(amap.intensities))
    _atomic_write(big, encode_netpbm(amap.upscaled(8)))
    return EXIT_OK


def cmd_simulate(args):
    policy = PlatformPolicy(recompress_qf=args.qf)
    _check_output_dir(args.out)
    # the size guard only needs the frame header, so run it before decoding
    processed = _parse(args.input, lambda d: platform_process(d, policy))
    upload = _parse(args.input, CiphertextImage.from_bytes)
    report = survival_report(upload, processed)
    _atomic_write(args.out, processed.data)
    sys.stdout.write(report.format())
    return EXIT_OK


def _quality(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 1 <= value <= 100:
        raise argparse.ArgumentTypeError(f"quality must be in 1..100, got {value}")
    return value


def build_parser():
    parser = _Parser(prog="chaosjpeg", description="Format-compliant chaotic JPEG encryption.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("keygen", help="draw a random key inside the chaotic ranges")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_keygen)

    p = sub.add_parser("encrypt", help="compress a PGM/PPM image and encrypt it")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--key", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_encrypt)

    p = sub.add_parser("decrypt", help="decrypt a ciphertext JPEG to PGM/PPM")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--key", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_decrypt)

    p = sub.add_parser("analyze", help="entropy per channel of A and PSNR(A, B)")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("attack", help="render a sketch-attack map of one component")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--kind", required=True, choices=ATTACK_KINDS)
    p.add_argument("--out", required=True)
    p.add_argument("--component", default="y", choices=COMPONENTS)
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("simulate", help="run the upload recompression and report coefficient survival")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--qf", type=_quality, default=71)
    p.set_defaults(func=cmd_simulate)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:
        # --help and --version
        return EXIT_OK if not exc.code else EXIT_USAGE
    try:
        return args.func(args)
    except (ImageTooLarge, Unsupported) as exc:
        print(f"chaosjpeg {args.command}: rejected: {exc}", file=sys.stderr)
        return EXIT_POLICY
    except (ChaosJpegError, ValueError, OSError) as exc:
        print(f"chaosjpeg {args.command}: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
