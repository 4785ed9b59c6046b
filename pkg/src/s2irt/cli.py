"""Command-line front end: hide, extract, capacity, calibrate, sweep."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .attacks import AttackSpec, apply
from .bigcomb import bits_to_bytes, bytes_to_bits
from .codec import CapacityError, FramingError, Scheme, StegParams, capacity_bits, extract, hide, max_payload_bits
from .experiments import make_mapper, parse_grid, sweep, to_csv
from .formats import FormatError, read_image, write_image
from .latent import InfeasibleParametersError, sample_pool
from .mapper import calibrate, image_shape_for
from .metrics import bpp, capacity_report, crack_probability, ie_accuracy, scientific
from .prng import parse_key

EXIT_OK = 0
EXIT_CAPACITY = 2
EXIT_INTEGRITY = 3
EXIT_FORMAT = 4
EXIT_CONFIG = 5

ZERO_KEY = "0" * 64


class ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _add_params(p: argparse.ArgumentParser, key_required: bool) -> None:
    p.add_argument("--scheme", default="s2irt", help="s2irt or se (sweep: comma list)")
    p.add_argument("--K", type=int, default=8, help="number of groups")
    p.add_argument("--n", type=int, default=32, help="elements chosen per group")
    p.add_argument("--dim", type=int, help="latent dimension (default 3072 = 32x32x3)")
    p.add_argument("--width", type=int)
    p.add_argument("--height", type=int)
    p.add_argument("--channels", type=int)
    p.add_argument("--key", required=key_required, default=None if key_required else ZERO_KEY, help="64 hex characters")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mapper", default="toy", help="toy, identity or noise:SIGMA")
    p.add_argument("--flow-seed", type=int, default=0, help="parameter seed of the toy flow")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="s2irt", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("hide", help="hide a secret file in a generated RTI1 image")
    _add_params(p, key_required=True)
    p.add_argument("--in", dest="input", required=True, help="secret file")
    p.add_argument("--out", required=True, help="RTI1 image to write")
    p.add_argument("--attack", help="KIND:MAG[:SEED] applied to the written image")

    p = sub.add_parser("extract", help="recover a secret from an RTI1 image")
    _add_params(p, key_required=True)
    p.add_argument("--in", dest="input", required=True, help="RTI1 image")
    p.add_argument("--out", required=True, help="recovered secret file")
    p.add_argument("--ref", help="reference secret for IE_A")
    p.add_argument("--attack", help="KIND:MAG[:SEED] applied before extraction")

    p = sub.add_parser("capacity", help="exact capacity, Stirling estimate and crack probability")
    _add_params(p, key_required=False)

    p = sub.add_parser("calibrate", help="measure mapping error against group margins")
    _add_params(p, key_required=False)
    p.add_argument("--trials", type=int, default=100)

    p = sub.add_parser("sweep", help="capacity and IE_A over a (K, n) grid, CSV output")
    _add_params(p, key_required=False)
    p.add_argument("--grid", required=True, help="'K1,K2,.. x n1,n2,..'")
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--attack", help="KIND:MAG[:SEED]")
    p.add_argument("--out", help="CSV path (default stdout)")
    return parser


def _shape(args) -> tuple[int, int, int]:
    if args.width or args.height or args.channels:
        if not (args.width and args.height and args.channels):
            raise ConfigError("--width, --height and --channels must be given together")
        shape = (args.width, args.height, args.channels)
        if args.dim is not None and args.dim != shape[0] * shape[1] * shape[2]:
            raise ConfigError("--dim disagrees with --width/--height/--channels")
        return shape
    return image_shape_for(args.dim if args.dim is not None else 3072)


def _schemes(text: str) -> list[Scheme]:
    try:
        return [Scheme(s.strip().lower()) for s in text.split(",") if s.strip()]
    except ValueError as exc:
        raise ConfigError(f"unknown scheme in {text!r}") from exc


def _params(args, shape) -> StegParams:
    schemes = _schemes(args.scheme)
    if len(schemes) != 1:
        raise ConfigError("exactly one --scheme is required for this command")
    try:
        key = parse_key(args.key)
    except ValueError as exc:
        raise ConfigError(f"bad --key: {exc}") from exc
    dim = shape[0] * shape[1] * shape[2]
    try:
        return StegParams(args.K, args.n, dim, key, schemes[0])
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _mapper(args, dim):
    try:
        return make_mapper(args.mapper, dim, seed=args.flow_seed)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _attack(text):
    if not text:
        return None
    try:
        return AttackSpec.parse(text)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def cmd_hide(args) -> int:
    shape = _shape(args)
    params = _params(args, shape)
    mapper = _mapper(args, params.n_total)
    attack = _attack(args.attack)
    secret = Path(args.input).read_bytes()
    bits = bytes_to_bits(secret)
    cap = capacity_bits(params)
    try:
        img = hide(bits, params, mapper, args.seed, shape)
    except CapacityError as exc:
        print(f"error: secret is {exc.message_bits} bits, payload capacity is {exc.max_payload_bits} bits", file=sys.stderr)
        return EXIT_CAPACITY
    except FramingError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    if attack:
        img = apply(img, attack)
    write_image(args.out, img)
    print(f"capacity_bits={cap}")
    print(f"max_payload_bits={max_payload_bits(params)}")
    print(f"payload_bits={len(bits)}")
    print(f"bpp={bpp(len(bits), *shape):.6f}")
    return EXIT_OK


def cmd_extract(args) -> int:
    try:
        img = read_image(args.input)
    except FormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    shape = (img.width, img.height, img.channels)
    if args.dim is not None and args.dim != img.size:
        raise ConfigError(f"--dim {args.dim} does not match image size {img.size}")
    args.width, args.height, args.channels = shape
    params = _params(args, shape)
    mapper = _mapper(args, params.n_total)
    attack = _attack(args.attack)
    if attack:
        img = apply(img, attack)
    result = extract(img, params, mapper)
    payload = result.payload[: len(result.payload) - len(result.payload) % 8]
    Path(args.out).write_bytes(bits_to_bytes(payload))
    print(f"payload_bits={len(result.payload)}")
    print(f"integrity={'ok' if result.ok else 'FAILED'}")
    if args.ref:
        ref_bits = bytes_to_bits(Path(args.ref).read_bytes())
        print(f"ie_accuracy={ie_accuracy(ref_bits, result.payload):.6f}")
    return EXIT_OK if result.ok else EXIT_INTEGRITY


def cmd_capacity(args) -> int:
    shape = _shape(args)
    params = _params(args, shape)
    report = capacity_report(params, *shape)
    sys.stdout.write(report.to_text())
    mantissa, exponent = scientific(crack_probability(params))
    print(f"crack_probability={mantissa:.3f}e{exponent}")
    return EXIT_OK


def cmd_calibrate(args) -> int:
    shape = _shape(args)
    params = _params(args, shape)
    mapper = _mapper(args, params.n_total)
    spec = params.grouping()
    try:
        pools = [sample_pool(spec, params.n_total, args.seed + t) for t in range(args.trials)]
    except InfeasibleParametersError as exc:
        raise ConfigError(str(exc)) from exc
    sys.stdout.write(calibrate(mapper, spec, pools, seed=args.seed).to_text())
    return EXIT_OK


def cmd_sweep(args) -> int:
    shape = _shape(args)
    dim = shape[0] * shape[1] * shape[2]
    try:
        Ks, ns = parse_grid(args.grid)
        key = parse_key(args.key)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    mapper = _mapper(args, dim)
    results = sweep(_schemes(args.scheme), Ks, ns, dim, key, mapper, args.trials, _attack(args.attack), args.seed)
    text = to_csv(results)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


COMMANDS = {
    "hide": cmd_hide,
    "extract": cmd_extract,
    "capacity": cmd_capacity,
    "calibrate": cmd_calibrate,
    "sweep": cmd_sweep,
}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
