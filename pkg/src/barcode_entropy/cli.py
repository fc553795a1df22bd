"""Command line: ``barcode-entropy <subcommand> ...``.

Exit codes: 0 ok, 2 parse or usage error, 3 invariant violation,
4 failure of an entropy-family member.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from .barcode import format_barcode, format_real, parse_barcode
from .complex import (
    endpoint_conservation_check,
    format_complex,
    parse_complex,
    reduce,
    split_at,
)
from .distances import bottleneck
from .entropy import FamilyMember, ScalingFamily, barcode_entropy, format_counts, format_report
from .errors import InvariantError, ParseError, PipelineError
from .families import profile_family, spectrum_family
from .geometry import PlaneCurve, TrigPoly, crofton_lines, curve_family, tomograph_census
from .reparam import parse_profile
from .spectra import (
    GapModel,
    TRIVIAL,
    exp_spectrum,
    format_spectrum,
    parse_spectrum,
    schottky_spectrum,
    SCHOTTKY_P,
    SCHOTTKY_Q,
    standard_schottky_pair,
    torus_spectrum,
)

EXIT_OK, EXIT_USAGE, EXIT_INVARIANT, EXIT_PIPELINE = 0, 2, 3, 4


class CliError(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise CliError(EXIT_USAGE, f"{path}: {exc.strerror}") from None


def _write(path, text: str) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _load_complex(path):
    try:
        return parse_complex(_read(path))
    except ParseError as exc:
        raise CliError(EXIT_USAGE, f"{path}: {exc}") from None
    except InvariantError as exc:
        raise CliError(EXIT_INVARIANT, f"{path}: {exc}") from None


def _load_barcode(path):
    try:
        return parse_barcode(_read(path))
    except ParseError as exc:
        raise CliError(EXIT_USAGE, f"{path}: {exc}") from None


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _schedule(text: str) -> list[float]:
    """``lo:hi:n`` (n evenly spaced values) or an explicit comma list."""
    if ":" in text:
        try:
            lo, hi, n = text.split(":")
            return np.linspace(float(lo), float(hi), int(n)).tolist()
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected lo:hi:n, got {text!r}") from None
    return _floats(text)


# ---------------------------------------------------------------------------
# subcommands


def cmd_reduce(args):
    cx = _load_complex(args.complex)
    _write(args.output, format_barcode(reduce(cx)))


def cmd_distance(args):
    d = bottleneck(_load_barcode(args.a), _load_barcode(args.b))
    print("inf" if math.isinf(d) else f"{d:.12g}")


def cmd_check(args):
    cx = _load_complex(args.complex)
    rep = endpoint_conservation_check(cx, args.eps, args.t)
    if not rep:
        raise CliError(EXIT_INVARIANT, f"conservation: {rep.message}")
    print(f"ok\t{len(cx)} generators")


def cmd_split(args):
    cx = _load_complex(args.complex)
    try:
        tri = split_at(cx, args.tau)
    except ValueError as exc:
        raise CliError(EXIT_INVARIANT, str(exc)) from None
    _write(args.low, format_complex(tri.low))
    _write(args.quotient, format_complex(tri.quotient))


def cmd_spectrum(args):
    if args.system == "exp":
        spec = exp_spectrum(args.h, args.t_max)
    elif args.system == "torus":
        spec = torus_spectrum(args.p, args.q, args.t_max)
    else:
        p = complex(*args.p) if args.p else SCHOTTKY_P
        q = complex(*args.q) if args.q else SCHOTTKY_Q
        spec = schottky_spectrum(standard_schottky_pair(), p, q, args.max_word)
    _write(args.output, format_spectrum(spec))


def _gap_model(tokens, lineno):
    # model trivial | model planted <distribution> <params...> [seed <n>]
    if tokens == ["trivial"]:
        return TRIVIAL
    if tokens and tokens[0] == "planted" and len(tokens) >= 3:
        seed = 0
        if len(tokens) >= 5 and tokens[-2] == "seed":
            seed = int(tokens[-1])
            tokens = tokens[:-2]
        return GapModel("planted", tokens[1], tuple(float(x) for x in tokens[2:]), seed)
    raise ParseError("expected 'model trivial' or 'model planted <distribution> <params>'", lineno)


MANIFEST_HEADER = "entropy-manifest v1"


def parse_manifest(text: str, base: Path) -> dict:
    """Manifest records, one per line::

        entropy-manifest v1
        spectrum <path>                  # or: generate exp <h> <t_max>
        zeros <count>
        model trivial | model planted <distribution> <params..> [seed <n>]
        complex <name> <x> <level> <path>

    Relative paths are resolved against the manifest's directory.
    """
    out = {"spectrum": None, "zeros": 0, "model": TRIVIAL, "complexes": []}
    seen_header = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if not seen_header:
            if line != MANIFEST_HEADER:
                raise ParseError(f"expected header {MANIFEST_HEADER!r}", lineno)
            seen_header = True
            continue
        try:
            if parts[0] == "spectrum" and len(parts) == 2:
                out["spectrum"] = ("file", str(base / parts[1]))
            elif parts[0] == "generate" and len(parts) >= 2:
                out["spectrum"] = ("generate", parts[1:])
            elif parts[0] == "zeros" and len(parts) == 2:
                out["zeros"] = int(parts[1])
            elif parts[0] == "model":
                out["model"] = _gap_model(parts[1:], lineno)
            elif parts[0] == "complex" and len(parts) == 5:
                out["complexes"].append((parts[1], float(parts[2]), float(parts[3]), str(base / parts[4])))
            else:
                raise ParseError(f"unknown manifest record {raw!r}", lineno)
        except ValueError as exc:
            if isinstance(exc, ParseError):
                raise
            raise ParseError(str(exc), lineno) from None
    if not seen_header:
        raise ParseError(f"missing header {MANIFEST_HEADER!r}")
    return out


def _manifest_spectrum(entry):
    kind, value = entry
    if kind == "file":
        return parse_spectrum(_read(value))
    system, *params = value
    nums = [float(x) for x in params]
    if system == "exp" and len(nums) == 2:
        return exp_spectrum(*nums)
    if system == "torus" and len(nums) == 5:
        return torus_spectrum(nums[0:2], nums[2:4], nums[4])
    if system == "schottky" and len(nums) == 1:
        return schottky_spectrum(standard_schottky_pair(), SCHOTTKY_P, SCHOTTKY_Q, int(nums[0]))
    raise ValueError(f"cannot generate {' '.join(value)!r}")


def _build_family(man, args) -> ScalingFamily:
    if man["spectrum"] is None and not man["complexes"]:
        raise PipelineError("manifest", "no members listed")
    if man["spectrum"] is not None and man["complexes"]:
        raise PipelineError("manifest", "list either a spectrum or complexes, not both")
    if man["complexes"]:
        members = []
        for name, x, level, path in man["complexes"]:
            try:
                cx = parse_complex(_read(path))
            except (ParseError, InvariantError, CliError) as exc:
                raise PipelineError(name, str(exc)) from None
            members.append(FamilyMember(name, x, level, complex=cx))
        return ScalingFamily(tuple(members), "t")
    try:
        spec = _manifest_spectrum(man["spectrum"])
    except (ValueError, CliError) as exc:
        raise PipelineError("spectrum", str(exc)) from None
    if args.schedule is None:
        raise CliError(EXIT_USAGE, "a spectrum manifest needs --schedule")
    if args.profile:
        try:
            prof = parse_profile(_read(args.profile))
        except (ParseError, InvariantError) as exc:
            raise CliError(EXIT_USAGE, f"{args.profile}: {exc}") from None
        try:
            return profile_family(spec, prof, args.schedule, man["model"], man["zeros"])
        except ValueError as exc:
            raise PipelineError("profile", str(exc)) from None
    try:
        return spectrum_family(spec, args.schedule, man["model"], man["zeros"])
    except ValueError as exc:
        raise PipelineError("spectrum", str(exc)) from None


def cmd_entropy(args):
    path = Path(args.manifest)
    try:
        man = parse_manifest(_read(args.manifest), path.parent)
    except ParseError as exc:
        raise CliError(EXIT_USAGE, f"{args.manifest}: {exc}") from None
    try:
        family = _build_family(man, args)
        report = barcode_entropy(family, sorted(args.eps, reverse=True),
                                 window_length=args.window, workers=args.workers)
    except PipelineError as exc:
        raise CliError(EXIT_PIPELINE, str(exc)) from None
    except ValueError as exc:
        raise CliError(EXIT_PIPELINE, f"member 'family': {exc}") from None
    _write(args.output, format_report(report))
    if args.counts:
        _write(args.counts, format_counts(report))


def _curve_by_name(name: str) -> PlaneCurve:
    curves = {c.name: c for c in curve_family()}
    if name not in curves:
        raise CliError(EXIT_USAGE, f"unknown curve {name!r}; choose from {', '.join(sorted(curves))}")
    return curves[name]


def _load_table(path: str) -> np.ndarray:
    rows = []
    for lineno, raw in enumerate(_read(path).splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            x, y = (float(v) for v in line.split())
        except ValueError:
            raise CliError(EXIT_USAGE, f"{path}: line {lineno}: expected 'x y'") from None
        rows.append((x, y))
    return np.array(rows, dtype=float)


def cmd_crofton(args):
    if args.table:
        curve, label = _load_table(args.table), Path(args.table).name
    else:
        curve, label = _curve_by_name(args.curve), args.curve
        if args.scale != 1.0:
            curve = curve.scaled(args.scale)
    try:
        res = crofton_lines(curve, args.samples, args.seed, closed=args.closed)
    except ValueError as exc:
        raise CliError(EXIT_INVARIANT, str(exc)) from None
    head = "curve\testimate\tstderr\tlength\tratio\tsamples\tseed"
    row = "\t".join([label] + [format_real(v) for v in (res.estimate, res.stderr, res.length, res.ratio)]
                    + [str(res.n_samples), str(res.seed)])
    _write(args.output, head + "\n" + row + "\n")


def cmd_tomograph(args):
    g = TrigPoly(tuple(args.cos), tuple(args.sin))
    try:
        res = tomograph_census(g, args.d, args.r, args.samples, args.seed)
    except ValueError as exc:
        raise CliError(EXIT_INVARIANT, str(exc)) from None
    head = "mean_n\tstderr\tmax_n\tdegenerate_fraction\tgraph_length\tsamples\tseed"
    vals = [format_real(res.mean_n), format_real(res.stderr), str(res.max_n),
            format_real(res.degenerate_fraction), format_real(g.graph_length()),
            str(res.n_samples), str(res.seed)]
    _write(args.output, head + "\n" + "\t".join(vals) + "\n")


# ---------------------------------------------------------------------------
# parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise CliError(EXIT_USAGE, message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="barcode-entropy", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("reduce", help="barcode of a filtered complex")
    s.add_argument("complex", help="filtered-complex v1 file, or - for stdin")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_reduce)

    s = sub.add_parser("distance", help="bottleneck distance of two barcode files")
    s.add_argument("a")
    s.add_argument("b")
    s.set_defaults(func=cmd_distance)

    s = sub.add_parser("check", help="validate a complex and check endpoint conservation")
    s.add_argument("complex")
    s.add_argument("--eps", type=float, help="also check the bar-type census at this eps")
    s.add_argument("--t", type=float, help="census window (0, t]")
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("split", help="subcomplex below tau and quotient above it")
    s.add_argument("complex")
    s.add_argument("--tau", type=float, required=True)
    s.add_argument("--low", required=True, help="output path for the subcomplex")
    s.add_argument("--quotient", required=True, help="output path for the quotient")
    s.set_defaults(func=cmd_split)

    s = sub.add_parser("spectrum", help="generate a chord-length spectrum")
    s.add_argument("system", choices=("exp", "torus", "schottky"))
    s.add_argument("--h", type=float, default=0.5, help="growth rate (exp)")
    s.add_argument("--t-max", type=float, default=20.0, help="length cutoff (exp, torus)")
    s.add_argument("--p", type=_floats, help="start point x,y (torus; schottky uses x,y with y > 0)")
    s.add_argument("--q", type=_floats, help="end point")
    s.add_argument("--max-word", type=int, default=6, help="word length bound (schottky)")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_spectrum)

    s = sub.add_parser("entropy", help="barcode-entropy report for a manifest")
    s.add_argument("manifest")
    s.add_argument("--eps", type=_floats, default=[0.4, 0.2, 0.1], help="comma-separated eps grid")
    s.add_argument("--schedule", type=_schedule,
                   help="truncation levels (or scales with --profile): lo:hi:n or a comma list")
    s.add_argument("--profile", help="profile v1 file; the schedule is then the scales s")
    s.add_argument("--window", type=int, help="fit window length (schedule points)")
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--counts", help="write the gnuplot counts table here")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_entropy)

    s = sub.add_parser("crofton", help="Monte Carlo Crofton integral of a plane curve")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--curve", help="named reference curve")
    g.add_argument("--table", help="file of 'x y' points along the curve")
    s.add_argument("--closed", action="store_true", help="the table is a closed curve")
    s.add_argument("--scale", type=float, default=1.0)
    s.add_argument("--samples", type=int, default=100_000)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_crofton)

    s = sub.add_parser("tomograph", help="critical-point census of f_s - g on the circle")
    s.add_argument("--cos", type=_floats, default=[], help="cos(kx) coefficients of g, k = 1, 2, ...")
    s.add_argument("--sin", type=_floats, default=[], help="sin(kx) coefficients of g")
    s.add_argument("--d", type=int, default=4, help="tomograph dimension")
    s.add_argument("--r", type=float, default=0.1, help="radius of the parameter ball")
    s.add_argument("--samples", type=int, default=100_000)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_tomograph)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        args.func(args)
    except CliError as exc:
        print(f"barcode-entropy: error: {exc}", file=sys.stderr)
        return exc.code
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
