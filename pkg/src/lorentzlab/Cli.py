"""Command-line front end: JSON reports on stdout, a one-line summary on stderr.

Exit status 0 means every check passed, 1 that a check failed (the report holds
the witness) and 2 a structural or usage error.
"""

import argparse
import json
import logging
import re
import sys
from pathlib import Path
from typing import Any

import jmespath
import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from .Axioms import check_axioms, check_causality_ladder, check_length_space, check_localisable
from .Catalog import Catalog
from .Config import (
    SCHEMA_VERSION,
    TOOL_VERSION,
    Budget,
    Tolerances,
    load_config_file,
)
from .Curvature import DIRECTIONS, check_curvature_bound, singularity_sweep
from .Curves import CausalCurve, check_TC, is_geodesic, tau_length
from .Errors import LorentzError
from .Exemplars import ExemplarSpec, SprinklingSpec, build_exemplar, sprinkle
from .Extension import (
    DEFAULT_K_GRID,
    ExtensionCandidate,
    check_extension,
    check_tau_monotone,
    compute_boundary,
    cross_check_inextendibility,
    inclusion_map,
)
from .ExtReal import ExtReal
from .Models import ModelSpace, TriangleSides, check_size_bounds, corresponding_point, realize_triangle
from .Schema import load_space, save_space
from .Space import SpaceDescription, ball

log = logging.getLogger(__name__)

CHECKS = {
    "axioms": check_axioms,
    "ladder": check_causality_ladder,
    "localisable": check_localisable,
    "length-space": check_length_space,
}

SIDE_SAMPLES = 5

_POINT = re.compile(r"^\(\s*(?P<body>[^()]*)\)$")


class RunConfig(BaseModel):
    """Everything one invocation needs besides its subcommand arguments."""

    model_config = ConfigDict(frozen=True)

    command: str
    tolerances: Tolerances = Field(default_factory=Tolerances)
    budget: Budget = Field(default_factory=Budget)
    out: Path | None = None
    query: str | None = None
    verbosity: int = Field(default=0, ge=0)

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        """Config file first, then environment, then explicit flags."""
        file = load_config_file(args.config) if args.config else {}
        tolerances = Tolerances.from_env(Tolerances(**file.get("tolerances", {})))
        overrides = {
            field: getattr(args, field)
            for field in ("max_seeds", "max_chains", "max_triangles", "max_witnesses", "seed")
            if getattr(args, field, None) is not None
        }
        if getattr(args, "count_sample_exits", False):
            overrides["count_sample_exits"] = True
        budget = Budget(**{**file.get("budget", {}), **overrides})
        return cls(
            command=args.command,
            tolerances=tolerances,
            budget=budget,
            out=args.out,
            query=args.query,
            verbosity=args.verbose,
        )


# argument parsing


def parse_coords(text: str) -> list[float]:
    match = _POINT.match(text.strip())
    if not match:
        raise ValueError(f"expected coordinates like (t,x), got {text!r}")
    return [float(v) for v in match.group("body").split(",")]


def resolve_point(space: SpaceDescription, text: str) -> int:
    """A carrier id given either as an integer or as "(c1,c2,...)"."""
    text = text.strip()
    if text.lstrip("-").isdigit():
        p = int(text)
        if not 0 <= p < space.n:
            raise KeyError(f"point id {p} outside 0..{space.n - 1}")
        return p
    return space.index_of(parse_coords(text))


def resolve_points(space: SpaceDescription, text: str) -> list[int]:
    """Semicolon-separated points; plain comma lists are read as ids."""
    if "(" not in text:
        return [resolve_point(space, part) for part in text.split(",") if part.strip()]
    return [resolve_point(space, part) for part in text.split(";") if part.strip()]


def resolve_region(space: SpaceDescription, args: argparse.Namespace) -> list[int]:
    if args.region:
        return resolve_points(space, args.region)
    if args.around is None or args.radius is None:
        raise ValueError("give --region or both --around and --radius")
    return ball(space.metric, resolve_point(space, args.around), args.radius).tolist()


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("-v", "--verbose", action="count", default=0)
    parser.add_argument("--config", type=Path, help="JSON file with tolerances and budget")
    parser.add_argument("--out", type=Path, help="write the JSON report here instead of stdout")
    parser.add_argument("--query", help="JMESPath expression applied to the report")
    parser.add_argument("--max-seeds", type=int)
    parser.add_argument("--max-chains", type=int)
    parser.add_argument("--max-triangles", type=int)
    parser.add_argument("--max-witnesses", type=int)
    parser.add_argument("--seed", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lorentzlab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"lorentzlab {TOOL_VERSION}")
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name: str, help: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help)
        _add_common(p)
        return p

    p = command("check", "run an axiom suite")
    p.add_argument("suite", choices=sorted(CHECKS))
    p.add_argument("space", type=Path)

    p = command("tau", "time separation between two points")
    p.add_argument("space", type=Path)
    p.add_argument("--from", dest="source", required=True)
    p.add_argument("--to", dest="target", required=True)

    for name, help in (("length", "τ-length of a curve"), ("geodesic", "local maximality of a curve")):
        p = command(name, help)
        p.add_argument("space", type=Path)
        p.add_argument("--curve", required=True, help='ids "0,4,9" or points "(0,0);(1,0)"')

    p = command("tc", "search for a finite inextendible timelike geodesic")
    p.add_argument("space", type=Path)
    p.add_argument("--count-sample-exits", action="store_true")

    p = command("triangle", "realize a comparison triangle in a model space")
    p.add_argument("--K", type=float, default=0.0)
    p.add_argument("--sides", required=True, help="a,b,c")

    for name, help in (("curvature", "triangle comparison on a region"), ("sweep", "curvature sweep and branching")):
        p = command(name, help)
        p.add_argument("space", type=Path)
        p.add_argument("--region")
        p.add_argument("--around")
        p.add_argument("--radius", type=float)
        p.add_argument("--timelike-only", action="store_true")
    sub.choices["curvature"].add_argument("--K", type=float, default=0.0)
    sub.choices["curvature"].add_argument("--direction", choices=DIRECTIONS, default="bounded_below")
    sub.choices["sweep"].add_argument("--K-grid", dest="K_grid", default=",".join(str(K) for K in DEFAULT_K_GRID))

    for name, help in (("extend", "audit an extension candidate"), ("boundary", "future and past boundary")):
        p = command(name, help)
        p.add_argument("--base", required=True)
        p.add_argument("--ambient", required=True)
        p.add_argument("--catalog", type=Path, help="read --base and --ambient as keys of this catalog")
        p.add_argument("--map", type=Path, help="JSON list of [base_id, ambient_id]; default: coordinate inclusion")
    sub.choices["extend"].add_argument("--weak-regularity", action="store_true")
    sub.choices["extend"].add_argument("--count-sample-exits", action="store_true")

    p = command("build", "build an exemplar space")
    p.add_argument("--kind", required=True)
    p.add_argument("--h", type=float, default=0.25)
    p.add_argument("--K", type=float, default=0.0)
    p.add_argument("--ray-length", type=float, default=3.0)
    p.add_argument("--extent", help="tmin,tmax,xmin,xmax")
    p.add_argument("--fan-compatible", action="store_true")
    p.add_argument("--catalog", type=Path)

    p = command("sprinkle", "Poisson sprinkling into a model space")
    p.add_argument("--density", type=float, required=True)
    p.add_argument("--K", type=float, default=0.0)
    p.add_argument("--shape", choices=("box", "diamond"), default="box")
    p.add_argument("--region", help="tmin,tmax,xmin,xmax")
    p.add_argument("--catalog", type=Path)
    return parser


# commands


def _bounds(text: str) -> tuple[tuple[float, float], tuple[float, float]]:
    t0, t1, x0, x1 = _floats(text)
    return (t0, t1), (x0, x1)


def _candidate(args: argparse.Namespace) -> ExtensionCandidate:
    if args.catalog is None:
        base, ambient = load_space(Path(args.base)), load_space(Path(args.ambient))
    else:
        catalog = Catalog(args.catalog)
        base, ambient = catalog.fetch(args.base), catalog.fetch(args.ambient)
    if args.map is None:
        embedding = inclusion_map(base, ambient)
    else:
        with open(args.map) as f:
            pairs = json.load(f)
        embedding = np.full(base.n, -1, dtype=np.int64)
        for b, a in pairs:
            embedding[int(b)] = int(a)
    return ExtensionCandidate(base=base, ambient=ambient, embedding=embedding)


def _stored(space: SpaceDescription, args: argparse.Namespace, config: RunConfig) -> dict:
    record: dict[str, Any] = {"space": space.name, "points": space.n, "resolution": space.resolution}
    if args.catalog is not None:
        record["key"] = Catalog(args.catalog).save(space)
    if config.out is not None:
        save_space(space, config.out)
        record["path"] = str(config.out)
    return record


def _triangle(args: argparse.Namespace, config: RunConfig) -> dict:
    a, b, c = _floats(args.sides)
    sides = TriangleSides(a=a, b=b, c=c)
    tol = config.tolerances
    if not check_size_bounds(sides, args.K, tol):
        return {"sides": sides.model_dump(), "K": args.K, "size_bounds": False}
    triangle = realize_triangle(ModelSpace.of(args.K), sides, tol)
    samples = {}
    for name in ("xy", "yz", "xz"):
        if triangle.side(name).causal_type != "timelike":
            continue
        fractions = np.linspace(0.0, 1.0, SIDE_SAMPLES)
        samples[name] = [
            {"s": float(s), "coords": list(corresponding_point(triangle, name, float(s)).coords)}
            for s in fractions
        ]
    return {
        "sides": sides.model_dump(),
        "K": args.K,
        "size_bounds": True,
        "vertices": {v: list(getattr(triangle, v).coords) for v in ("x", "y", "z")},
        "samples": samples,
    }


def run(args: argparse.Namespace, config: RunConfig) -> tuple[Any, bool]:
    """Execute one subcommand; returns the payload and whether every check passed."""
    tol, budget = config.tolerances, config.budget
    cmd = config.command
    if cmd == "check":
        report = CHECKS[args.suite](load_space(args.space), tol)
        return report, report.ok
    if cmd == "tau":
        space = load_space(args.space)
        x, y = resolve_point(space, args.source), resolve_point(space, args.target)
        value = ExtReal(space.tau[x, y])
        return {"space": space.name, "from": space.label(x), "to": space.label(y), "tau": value.to_json()}, True
    if cmd == "length":
        space = load_space(args.space)
        return tau_length(space, CausalCurve.of(resolve_points(space, args.curve))), True
    if cmd == "geodesic":
        space = load_space(args.space)
        verdict = is_geodesic(space, CausalCurve.of(resolve_points(space, args.curve)), tol)
        return verdict, verdict.is_geodesic
    if cmd == "tc":
        report = check_TC(load_space(args.space), budget, tol)
        return report, report.ok
    if cmd == "triangle":
        return _triangle(args, config), True
    if cmd == "curvature":
        space = load_space(args.space)
        region = resolve_region(space, args)
        verdict = check_curvature_bound(
            space, region, args.K, args.direction, args.timelike_only, budget=budget, tol=tol
        )
        return verdict, verdict.ok
    if cmd == "sweep":
        space = load_space(args.space)
        report = singularity_sweep(
            space, resolve_region(space, args), _floats(args.K_grid), args.timelike_only, budget, tol
        )
        return report, True
    if cmd == "boundary":
        report = compute_boundary(_candidate(args), tol)
        return report, report.ok
    if cmd == "extend":
        cand = _candidate(args)
        extension = check_extension(cand, budget, tol)
        monotone = check_tau_monotone(cand, tol)
        boundary = compute_boundary(cand, tol)
        consistency = cross_check_inextendibility(
            cand, budget, tol, weak_regularity=args.weak_regularity
        )
        payload = {
            "extension": extension,
            "tau_monotone": monotone,
            "boundary": boundary,
            "consistency": consistency,
        }
        return payload, extension.ok and monotone.ok and boundary.ok and consistency.ok
    if cmd == "build":
        extent = {} if args.extent is None else {"extent": _bounds(args.extent)}
        spec = ExemplarSpec(
            kind=args.kind,
            resolution=args.h,
            K=args.K,
            ray_length=args.ray_length,
            fan_compatible=args.fan_compatible,
            seed=budget.seed,
            **extent,
        )
        return _stored(build_exemplar(spec), args, config), True
    if cmd == "sprinkle":
        region = {} if args.region is None else {"region": _bounds(args.region)}
        spec = SprinklingSpec(
            density=args.density, shape=args.shape, model=ModelSpace.of(args.K), seed=budget.seed, **region
        )
        return _stored(sprinkle(spec), args, config), True
    raise ValueError(f"unknown command {cmd!r}")


# output


def to_document(payload: Any, config: RunConfig) -> dict:
    """JSON-ready document; every one carries the version and tolerances used."""
    if isinstance(payload, BaseModel):
        body = payload.model_dump(mode="json")
    elif isinstance(payload, dict):
        body = {
            k: v.model_dump(mode="json") if isinstance(v, BaseModel) else v for k, v in payload.items()
        }
    else:
        body = {"result": payload}
    return {
        "tool_version": TOOL_VERSION,
        "schema_version": SCHEMA_VERSION,
        "tolerances": config.tolerances.model_dump(),
        **body,
    }


def summary_line(payload: Any, passed: bool) -> str:
    if isinstance(payload, dict) and not any(isinstance(v, BaseModel) for v in payload.values()):
        return json.dumps(payload, sort_keys=True)
    if isinstance(payload, dict):
        return "; ".join(v.summary() for v in payload.values() if hasattr(v, "summary"))
    if hasattr(payload, "summary"):
        return payload.summary()
    return "ok" if passed else "FAILED"


def configure_logging(verbosity: int) -> None:
    level = (logging.WARNING, logging.INFO, logging.DEBUG)[min(verbosity, 2)]
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        config = RunConfig.from_args(args)
        configure_logging(config.verbosity)
        payload, passed = run(args, config)
    except (LorentzError, ValidationError, ValueError, KeyError, OSError) as e:
        print(f"lorentzlab {args.command}: {e}", file=sys.stderr)
        return 2
    document = to_document(payload, config)
    if config.query:
        document = jmespath.search(config.query, document)
    text = json.dumps(document, indent=2, sort_keys=True)
    if config.out is not None and config.command not in ("build", "sprinkle"):
        with open(config.out, "w") as f:
            f.write(text + "\n")
    else:
        print(text)
    print(summary_line(payload, passed), file=sys.stderr)
    return 0 if passed else 1


if __name__ == "__main__":
    sys.exit(main())
