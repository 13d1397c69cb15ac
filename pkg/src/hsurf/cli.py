"""Command-line entry point: ``hsurf {surface,rotational,verify,scan}``.

Exit codes: 0 success, 2 a verification check failed, 1 usage or runtime error.
"""

from __future__ import annotations

import argparse
import math
import shlex
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .datasets import Domain
from .errors import HsurfError
from .field import FieldClass, HoloData
from .holo import parse_expr
from .mesh import GridSpec, export_obj, export_profile_csv, sample_surface
from .rotational import RadialField, RotH1Params, RotH2Params, count_kinds, profile_samples, singularity_scan
from .verify import SuiteConfig, all_passed, format_kv, format_table, run_suite

DEFAULT_GRID = (-2.0, 2.0, -math.pi, math.pi, 129, 129)
DEFAULT_SEED = 42


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); usage errors are exit 1 here
        raise UsageError(f"{self.prog}: error: {message}")


def _complex(text: str) -> complex:
    try:
        return complex(text.replace("i", "j").replace(" ", ""))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from None


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--class", dest="klass", choices=["h1", "h2"], type=str.lower)
    for name in ("g", "A", "B", "f"):
        p.add_argument(f"--{name}", dest=name, metavar="EXPR")
    for name in ("a1", "a2", "a3", "c2"):
        p.add_argument(f"--{name}", dest=name, type=float)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--c1", type=float, default=None)
    p.add_argument("--z0", type=_complex, default=0j, help="base point of the H1 antiderivative")
    p.add_argument("--grid", type=float, nargs=6, default=list(DEFAULT_GRID),
                   metavar=("U_MIN", "U_MAX", "V_MIN", "V_MAX", "NU", "NV"))
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--config", metavar="FILE", help="key = value defaults; flags override")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hsurf", description="Surfaces from holomorphic data: meshes, profiles, checks.")
    parser.add_argument("--version", action="version", version=f"hsurf {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("surface", help="sample X, eta, N or the sphere on a grid and write OBJ")
    _add_common(p)
    p.add_argument("--target", choices=["x", "eta", "n", "sphere"], default="x", type=str.lower)
    p.add_argument("--out")

    p = sub.add_parser("rotational", help="profile curves of a rotational family as CSV")
    _add_common(p)
    p.add_argument("--target", choices=["x", "eta", "n", "sphere"], default="x", type=str.lower)
    p.add_argument("--u-range", dest="u_range", type=float, nargs=2, default=None)
    p.add_argument("--samples", type=int, default=None, help="profile samples (default: grid NU)")
    p.add_argument("--out")
    p.add_argument("--mesh", help="also write the rotated surface as OBJ")

    p = sub.add_parser("verify", help="run the residual suite")
    _add_common(p)
    p.add_argument("--points", type=int, default=100)
    p.add_argument("--fd-step", dest="fd_step", type=float, default=1e-4)
    p.add_argument("--stencil-step", dest="stencil_step", type=float, default=1e-2)
    p.add_argument("--report")

    p = sub.add_parser("scan", help="locate singular parallels of a rotational family")
    _add_common(p)
    p.add_argument("--u-range", dest="u_range", type=float, nargs=2, default=[-4.0, 4.0])
    p.add_argument("--resolution", type=int, default=2001)
    p.add_argument("--surface", choices=["x", "eta"], default="x", type=str.lower)
    return parser


# --------------------------------------------------------------------------
# config file


def _config_tokens(path: str) -> list[str]:
    """``key = value`` lines rendered as flag tokens placed ahead of the real flags."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config {path!r}: {exc}") from exc
    tokens: list[str] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if key in ("config", "command", ""):
            raise UsageError(f"{path}:{lineno}: key {key!r} not allowed in a config file")
        tokens.append("--" + key.replace("_", "-") if key in ("u_range", "fd_step", "stencil_step") else "--" + key)
        tokens.extend(shlex.split(value))
    return tokens


def _extract_config(argv: list[str]) -> tuple[list[str], str | None]:
    out, cfg, i = [], None, 0
    while i < len(argv):
        a = argv[i]
        if a == "--config":
            if i + 1 >= len(argv):
                raise UsageError("--config needs a file argument")
            cfg = argv[i + 1]
            i += 2
            continue
        if a.startswith("--config="):
            cfg = a.split("=", 1)[1]
        else:
            out.append(a)
        i += 1
    return out, cfg


def parse_args(argv: Sequence[str]) -> argparse.Namespace:
    argv, cfg = _extract_config(list(argv))
    parser = build_parser()
    if cfg is not None:
        # the subcommand is the first positional token; config flags go right after it
        cmd_at = next((k for k, a in enumerate(argv) if not a.startswith("-")), None)
        if cmd_at is None:
            raise UsageError("a subcommand is required")
        argv = argv[: cmd_at + 1] + _config_tokens(cfg) + argv[cmd_at + 1:]
    args = parser.parse_args(argv)
    if args.command is None:
        raise UsageError(parser.format_usage().strip() + "\nhsurf: error: a subcommand is required")
    args.config_file = cfg
    return args


# --------------------------------------------------------------------------
# run configuration


@dataclass(frozen=True)
class RunConfig:
    command: str
    klass: FieldClass
    source: object  # HoloData or rotational params
    grid: GridSpec
    seed: int
    args: argparse.Namespace

    @property
    def rotational(self) -> bool:
        return isinstance(self.source, (RotH1Params, RotH2Params))

    @property
    def c(self) -> float:
        return float(self.source.c)


def _require(args, names: Sequence[str], why: str) -> None:
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        flags = ", ".join("--" + n for n in missing)
        raise UsageError(f"hsurf {args.command}: error: missing required {flags} ({why})")


def _rot_params(args):
    if args.klass == "h1":
        _require(args, ["a1", "a2"], "rotational H1 family")
        return RotH1Params(args.a1, args.a2, args.c)
    _require(args, ["a2", "a3", "c1", "c2"], "rotational H2 family")
    return RotH2Params(args.a2, args.a3, args.c1, args.c2, args.c)


def _holo_data(args) -> HoloData:
    kind = FieldClass(args.klass)
    if args.f is not None:
        _require(args, ["g"], "f-family data")
        return HoloData(g=parse_expr(args.g), f=parse_expr(args.f), c=args.c, kind=kind)
    names = ["g", "A"] + (["B"] if kind is FieldClass.H2 else [])
    _require(args, names, f"class {args.klass} data")
    if kind is FieldClass.H1 and args.B is not None:
        raise UsageError("hsurf: error: --B is derived for class h1; drop it or use --class h2")
    return HoloData(g=parse_expr(args.g), A=parse_expr(args.A), B=parse_expr(args.B) if args.B else None,
                    c=args.c, c1=args.c1 or 0.0, kind=kind, z0=args.z0)


def make_config(args: argparse.Namespace) -> RunConfig:
    _require(args, ["klass"], "choose h1 or h2")
    target = getattr(args, "target", "x")
    u0, u1, v0, v1, nu, nv = args.grid
    if not (float(nu).is_integer() and float(nv).is_integer()):
        raise UsageError("hsurf: error: grid NU and NV must be integers")
    grid = GridSpec(u0, u1, v0, v1, int(nu), int(nv), target)
    has_rot = any(getattr(args, n) is not None for n in ("a1", "a2", "a3", "c2"))
    if args.command in ("rotational", "scan") or (has_rot and args.g is None and args.f is None):
        source = _rot_params(args)
    else:
        source = _holo_data(args)
    if args.command in ("surface", "rotational"):
        _require(args, ["out"], "output path")
    return RunConfig(args.command, FieldClass(args.klass), source, grid, args.seed, args)


# --------------------------------------------------------------------------
# commands


def _header(cfg: RunConfig) -> str:
    a = cfg.args
    items = {"hsurf_version": __version__, "command": cfg.command, "class": cfg.klass.value,
             "grid": " ".join(_fmt_num(x) for x in a.grid), "seed": str(cfg.seed), "c": _fmt_num(a.c)}
    for name in ("g", "A", "B", "f"):
        if getattr(a, name) is not None:
            items[name] = getattr(a, name)
    for name in ("c1", "a1", "a2", "a3", "c2"):
        if getattr(a, name) is not None:
            items[name] = _fmt_num(getattr(a, name))
    if not cfg.rotational and cfg.klass is FieldClass.H1:
        items["z0"] = f"{_fmt_num(a.z0.real)}{a.z0.imag:+.12g}i"
    for name in ("points", "fd_step", "stencil_step", "u_range", "resolution", "surface", "target"):
        if hasattr(a, name) and getattr(a, name) is not None:
            v = getattr(a, name)
            items[name] = " ".join(_fmt_num(x) for x in v) if isinstance(v, list) else (
                _fmt_num(v) if isinstance(v, float) else str(v))
    return "".join(f"# {k} = {v}\n" for k, v in items.items())


def _fmt_num(x) -> str:
    return "%.12g" % float(x)


def cmd_surface(cfg: RunConfig, out) -> int:
    mesh = sample_surface(cfg.source, cfg.grid)
    n = export_obj(mesh, cfg.args.out)
    masked = int(np.sum(mesh.singular_mask))
    out.write(f"wrote {cfg.args.out}: {len(mesh.vertices) - masked} vertices ({masked} masked), {n} bytes\n")
    return 0


def _profile_us(cfg: RunConfig) -> np.ndarray:
    a = cfg.args
    lo, hi = a.u_range if a.u_range is not None else (cfg.grid.u_min, cfg.grid.u_max)
    n = a.samples if a.samples is not None else cfg.grid.nu
    if n < 2:
        raise UsageError("hsurf rotational: error: --samples must be >= 2")
    return np.linspace(lo, hi, int(n))


def cmd_rotational(cfg: RunConfig, out) -> int:
    samples = profile_samples(cfg.source, _profile_us(cfg))
    n = export_profile_csv(samples, cfg.args.out)
    out.write(f"wrote {cfg.args.out}: {len(samples)} samples, {n} bytes\n")
    if cfg.args.mesh:
        mesh = sample_surface(cfg.source, cfg.grid)
        m = export_obj(mesh, cfg.args.mesh)
        out.write(f"wrote {cfg.args.mesh}: {m} bytes\n")
    return 0


def cmd_verify(cfg: RunConfig, out) -> int:
    a = cfg.args
    if cfg.rotational:
        field = RadialField(cfg.source)
    else:
        field = cfg.source.field()
    g = cfg.grid
    suite = SuiteConfig(n_points=a.points, seed=cfg.seed, fd_step=a.fd_step, stencil_step=a.stencil_step)
    reports = run_suite(field, cfg.c, cfg.klass, Domain(g.u_min, g.u_max, g.v_min, g.v_max), suite)
    text = _header(cfg) + "\n" + format_table(reports) + "\n" + format_kv(reports)
    ok = all_passed(reports)
    text += f"overall.pass={str(ok).lower()}\n"
    if a.report:
        Path(a.report).write_text(text)
    out.write(text)
    return 0 if ok else 2


def cmd_scan(cfg: RunConfig, out) -> int:
    a = cfg.args
    surface = "X" if a.surface == "x" else "eta"
    sings = singularity_scan(cfg.source, tuple(a.u_range), a.resolution, surface=surface)
    out.write(_header(cfg))
    for s in sings:
        out.write(f"u={s.u:.10f} kind={s.kind} surface={s.surface}\n")
    counts = count_kinds(sings)
    out.write(f"total isolated={counts['isolated']} circle={counts['circle']}\n")
    return 0


COMMANDS = {"surface": cmd_surface, "rotational": cmd_rotational, "verify": cmd_verify, "scan": cmd_scan}


def run(argv: Sequence[str], out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    try:
        args = parse_args(argv)
        cfg = make_config(args)
        return COMMANDS[cfg.command](cfg, out)
    except UsageError as exc:
        err.write(f"usage: hsurf {{surface,rotational,verify,scan}} [options]\n{exc}\n")
        return 1
    except (HsurfError, ValueError, OSError) as exc:
        err.write(f"hsurf: error: {exc}\n")
        return 1


def main(argv: Sequence[str] | None = None) -> None:
    sys.exit(run(sys.argv[1:] if argv is None else argv))


if __name__ == "__main__":  # pragma: no cover
    main()
