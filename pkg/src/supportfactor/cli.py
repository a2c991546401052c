"""Command line front end: ``supportfactor {support,check,example}``.

Exit codes: 0 success, 2 input error, 3 invalid distribution, 4 numeric
failure.  Reports are written as sorted-key JSON into the output
directory (``--out``, else ``$SUPPORTFACTOR_OUT``, else ``./supportfactor-out``)
and echoed to stdout.
"""

from __future__ import annotations

import argparse
import inspect
import math
import os
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

from . import __version__
from ._validation import MIN_GRID, check_grid_shape
from .bundles import EXAMPLE_NAMES, run_example
from .distributions import Univariate
from .exceptions import InvalidInputError, SupportFactorError
from .independence import ORACLE_CHOICES, check, necessary_condition
from .ingest import read_joint_table, read_samples
from .registry import JOINT_BUILDERS, UNIVARIATE_BUILDERS, builtin_names, parse_name
from .reporting import SCHEMA_VERSION, dump_json
from .support import empirical_report, points_of_increase_1d, support, support_continuous_1d

OUT_ENV = "SUPPORTFACTOR_OUT"


@dataclass(frozen=True)
class RunConfig:
    command: str
    source: str
    grid: tuple[int, int]
    clip: float | None
    tol_area: float | None
    tol_dist: float | None
    seed: int
    min_count: int
    oracle: str
    renormalize: bool
    out: str

    def __post_init__(self):
        check_grid_shape(self.grid, minimum=MIN_GRID)
        for name in ("tol_area", "tol_dist", "clip"):
            v = getattr(self, name)
            if v is not None and not (math.isfinite(v) and v > 0):
                raise InvalidInputError(f"{name} must be a positive finite number, got {v}")
        if self.min_count < 1:
            raise InvalidInputError(f"--min-count must be >= 1, got {self.min_count}")

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("out")
        d["grid"] = list(self.grid)
        return d


def _grid_arg(text: str) -> tuple[int, int]:
    parts = text.lower().replace(",", "x").split("x")
    try:
        vals = [int(p) for p in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must look like 512 or 512x256, got {text!r}") from None
    if len(vals) == 1:
        vals = vals * 2
    if len(vals) != 2:
        raise argparse.ArgumentTypeError(f"grid must look like 512 or 512x256, got {text!r}")
    return vals[0], vals[1]


def _add_common(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--builtin", help=f"named distribution: {', '.join(builtin_names())}")
    src.add_argument("--table", type=Path, help="joint PMF table (CSV x,y,p or JSON)")
    src.add_argument("--samples", type=Path, help="bivariate samples (CSV x,y)")
    p.add_argument("--grid", type=_grid_arg, default=(512, 512), help="grid cells per axis (default 512)")
    p.add_argument("--min-count", type=int, default=1, help="samples per cell for empirical supports")
    p.add_argument("--clip", type=float, help="clip extent for unbounded supports")
    p.add_argument("--tol-area", type=float, help="symmetric-difference tolerance (default 10 cell areas)")
    p.add_argument("--tol-dist", type=float, help="Hausdorff tolerance (default 2h)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--renormalize", action="store_true", help="rescale table masses that do not sum to 1")
    p.add_argument("--out", type=Path, help=f"output directory (default ${OUT_ENV} or ./supportfactor-out)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="supportfactor", description="Support sets and the support-factorization screen for independence.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    p_support = sub.add_parser("support", help="compute marginal and joint supports")
    _add_common(p_support)
    p_check = sub.add_parser("check", help="screen for dependence and run a factorization oracle")
    _add_common(p_check)
    p_check.add_argument("--oracle", choices=ORACLE_CHOICES, default="auto")
    p_ex = sub.add_parser("example", help="reproduce a worked example")
    p_ex.add_argument("name", help=f"one of: {', '.join(EXAMPLE_NAMES)}")
    p_ex.add_argument("--seed", type=int, default=0)
    p_ex.add_argument("--grid", type=_grid_arg, default=(512, 512))
    p_ex.add_argument("--out", type=Path)
    return parser


def _out_dir(arg) -> Path:
    return Path(arg) if arg is not None else Path(os.environ.get(OUT_ENV, "supportfactor-out"))


def _load_builtin(label: str, clip: float | None):
    name, args = parse_name(label)
    builder = JOINT_BUILDERS.get(name) or UNIVARIATE_BUILDERS.get(name)
    if builder is None:
        raise InvalidInputError(f"unknown builtin {name!r}; available: {', '.join(builtin_names())}")
    kwargs = {}
    notes = []
    if clip is not None:
        if "clip" in inspect.signature(builder).parameters:
            kwargs["clip"] = clip
        else:
            notes.append(f"--clip {clip:g} ignored: {name} has no clipped extent")
    try:
        return builder(*args, **kwargs), notes
    except TypeError as exc:
        raise InvalidInputError(f"bad arguments for builtin {name!r}: {exc}") from None


def _load(cfg: RunConfig, args):
    """Returns (kind, object, notes) with kind in {joint, univariate, samples}."""
    if args.builtin is not None:
        obj, notes = _load_builtin(args.builtin, cfg.clip)
        return ("univariate" if isinstance(obj, Univariate) else "joint"), obj, notes
    if args.table is not None:
        joint, notes = read_joint_table(args.table, cfg.renormalize)
        return "joint", joint, notes
    return "samples", read_samples(args.samples), []


def _univariate_doc(u: Univariate) -> dict:
    closure = support_continuous_1d(u, grid_n=3**11 + 1) if u.pdf is not None or u.positivity is not None else None
    poi = points_of_increase_1d(u)
    return {
        "kind": "univariate",
        "name": u.name,
        "s_x": (closure or poi).to_dict(),
        "method": "canonical-pdf-grid" if closure is not None else "points-of-increase",
        "points_of_increase": poi.to_dict(),
    }


def _write_masks(out: Path, region, artifacts: list[str]) -> None:
    if hasattr(region, "to_pgm"):
        region.to_pgm(out / "support_xy.pgm")
        region.to_csv(out / "support_xy.csv")
        artifacts += ["support_xy.pgm", "support_xy.csv"]


def _run_pipeline(cfg: RunConfig, args) -> dict:
    kind, obj, notes = _load(cfg, args)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    doc = {"schema_version": SCHEMA_VERSION, "command": cfg.command, "config": cfg.to_dict(), "notes": notes}
    artifacts: list[str] = []
    if kind == "univariate":
        if cfg.command == "check":
            raise InvalidInputError("check needs a bivariate distribution; this builtin is univariate")
        doc["support"] = _univariate_doc(obj)
    else:
        if kind == "samples":
            report = empirical_report(obj, cfg.grid, cfg.min_count)
        else:
            report = support(obj, cfg.grid)
        doc["support"] = report.to_dict()
        _write_masks(out, report.s_xy, artifacts)
        if cfg.command == "check":
            if kind == "samples":
                if cfg.oracle not in ("none", "auto"):
                    raise InvalidInputError("factorization oracles need a model, not samples")
                verdict = necessary_condition(report.s_xy, report.s_x, report.s_y, cfg.tol_area, cfg.tol_dist)
            else:
                _, verdict = check(obj, oracle=cfg.oracle, tol_area=cfg.tol_area, tol_dist=cfg.tol_dist, seed=cfg.seed, report=report)
            doc["verdict"] = verdict.to_dict()
    name = "check.json" if cfg.command == "check" else "support.json"
    artifacts.append(name)
    doc["artifacts"] = sorted(artifacts)
    (out / name).write_text(dump_json(doc))
    return doc


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "example":
            check_grid_shape(args.grid, minimum=MIN_GRID)
            if args.name not in EXAMPLE_NAMES:
                raise InvalidInputError(f"unknown example {args.name!r}; available: {', '.join(EXAMPLE_NAMES)}")
            out = _out_dir(args.out) / args.name
            doc = run_example(args.name, out, seed=args.seed, grid=args.grid)
        else:
            source = args.builtin or str(args.table or args.samples)
            cfg = RunConfig(
                command=args.command, source=source, grid=tuple(args.grid), clip=args.clip,
                tol_area=args.tol_area, tol_dist=args.tol_dist, seed=args.seed, min_count=args.min_count,
                oracle=getattr(args, "oracle", "none"), renormalize=args.renormalize, out=str(_out_dir(args.out)),
            )
            doc = _run_pipeline(cfg, args)
    except SupportFactorError as exc:
        print(f"supportfactor: error: {exc}", file=sys.stderr)
        return exc.exit_code
    sys.stdout.write(dump_json(doc))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
