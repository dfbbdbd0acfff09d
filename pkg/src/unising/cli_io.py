"""Command-line entry point.

Exit codes: 0 verdict produced, 1 usage error, 2 internal invariant
violation, 3 enumeration budget exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import covering_engine as ce
from . import grp_model as gm
from . import weight_lab as wl
from .errors import BudgetExceeded, InvariantViolation
from .ff_core import multiplicative_order
from .matfq import char_poly, fixed_space_dim, has_eigenvalue_one, min_poly, parse_matrix

EXIT_OK, EXIT_USAGE, EXIT_INVARIANT, EXIT_BUDGET = 0, 1, 2, 3
FORMATS = ("json", "csv", "text")
WORKERS_ENV = "UNISING_WORKERS"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse would exit with status 2
        raise UsageError(message)


@dataclass
class RunConfig:
    command: str
    workers: int = 1
    strategy: str = "scalar_normalized"
    deterministic: bool = False
    force_scan: bool = False
    functional_seed: int | None = None
    output_format: str = "json"
    checkpoint: str | None = None
    args: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.workers < 1:
            raise UsageError("workers must be >= 1")
        if self.strategy not in ce.STRATEGIES:
            raise UsageError(f"strategy must be one of {ce.STRATEGIES}")
        if self.output_format not in FORMATS:
            raise UsageError(f"format must be one of {FORMATS}")


def _resolve_workers(flag: int | None) -> int:
    if flag is not None:
        return flag
    env = os.environ.get(WORKERS_ENV)
    if env:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"{WORKERS_ENV}={env!r} is not an integer") from None
    return 1


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="unising", description="Eigenvalue-1 questions for finite linear groups.")
    parser.add_argument("--format", dest="output_format", default="json", choices=FORMATS)
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("order", help="multiplicative order of r modulo p")
    p.add_argument("r", type=int)
    p.add_argument("p", type=int)

    p = sub.add_parser("grp-cover", help="unisingularity verdict for G_{r,p} via the covering problem")
    p.add_argument("r", type=int)
    p.add_argument("p", type=int)
    p.add_argument("--force-scan", action="store_true", help="cross-check shortcut rules by a full scan")
    p.add_argument("--strategy", default="scalar_normalized", choices=ce.STRATEGIES)
    p.add_argument("--kernel", default="auto", choices=ce.KERNELS)
    p.add_argument("--workers", type=int, default=None, help=f"worker threads (default ${WORKERS_ENV} or 1)")
    p.add_argument("--deterministic", action="store_true", help="report the least witness")
    p.add_argument("--checkpoint", default=None, help="resumable record of completed chunks")
    p.add_argument("--random-functional", action="store_true", help="use a random functional instead of the first coordinate")
    p.add_argument("--seed", type=int, default=0, help="seed for --random-functional")
    p.add_argument("--improved-bound", action="store_true", help="enable the scan-verified p < 3(r+1)/2 shortcut")
    p.add_argument("--all-hyperplanes", action="store_true", help="enable the scan-verified p = (r^d-1)/(r-1) shortcut")
    p.add_argument("--no-witness", action="store_true", help="report negative shortcut verdicts without scanning for a witness")

    for name, helptext in (
        ("grp-perm", "compare the covering, derangement and representation verdicts"),
        ("grp-rep", "eigenvalue-1 scan of the monomial representation over A"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("r", type=int)
        p.add_argument("p", type=int)
        p.add_argument("--ell", type=int, default=None, help="prime = 1 mod r (default: least such prime)")
        p.add_argument("--random-functional", action="store_true")
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("gl2", help="unisingularity criterion for irreducible GL_n(2)-modules")
    p.add_argument("n", type=int)
    p.add_argument("bits", type=int, nargs="*")

    p = sub.add_parser("root-lattice", help="is a weight in the root lattice")
    p.add_argument("family")
    p.add_argument("rank", type=int)
    p.add_argument("coeffs", type=int, nargs="*")

    p = sub.add_parser("s21", help="weight conditions forcing eigenvalue 1 on semisimple elements")
    p.add_argument("family")
    p.add_argument("rank", type=int)
    p.add_argument("q", type=int)
    p.add_argument("--weights", required=True, help="weight file")

    for name in ("minpoly", "eig1"):
        p = sub.add_parser(name)
        p.add_argument("--matrix", required=True, help="matrix file")
    return parser


# -- commands --------------------------------------------------------------


def _functional(spec: gm.GrpSpec, args: argparse.Namespace) -> np.ndarray | None:
    if not getattr(args, "random_functional", False):
        return None
    return gm.random_functional(spec.d, spec.r, np.random.default_rng(args.seed))


def cmd_order(args: argparse.Namespace, cfg: RunConfig) -> dict:
    d = multiplicative_order(args.r, args.p)
    return {"base": args.r, "modulus": args.p, "order": d, "divides_modulus_minus_one": (args.p - 1) % d == 0}


def cmd_grp_cover(args: argparse.Namespace, cfg: RunConfig) -> dict:
    functional = None
    if args.random_functional:
        spec = gm.construct_grp(args.r, args.p)
        functional = _functional(spec, args)
    opts = ce.VerdictOptions(
        force_scan=cfg.force_scan,
        functional=functional,
        strategy=cfg.strategy,
        workers=cfg.workers,
        deterministic=cfg.deterministic,
        kernel=args.kernel,
        checkpoint=cfg.checkpoint,
        improved_bound=args.improved_bound,
        all_hyperplanes=args.all_hyperplanes,
        want_witness=not args.no_witness,
    )
    return ce.unisingularity_verdict(args.r, args.p, opts).to_dict()


def triangulate(r: int, p: int, ell: int | None = None, functional=None) -> dict:
    """Covering, derangement and representation verdicts for G_{r,p}, side by side."""
    spec = gm.construct_grp(r, p)
    inst = ce.build_instance(spec, functional)
    cover = ce.scan(inst, "exhaustive", deterministic=True)
    fpf = gm.has_fixed_point_free_r_element(spec, functional)
    rep = gm.monomial_unisingular(spec, ell, functional)
    action = gm.coset_permutation_action(spec, functional)
    derangement_ok = None
    if fpf.witness is not None:
        perm = gm.vector_permutation(action, fpf.witness, r)
        derangement_ok = all(perm[x] != x for x in range(action.degree))
    agree = cover.covered == (not fpf.found) == rep.all_have_eigenvalue_one
    return {
        "r": r,
        "p": p,
        "d": spec.d,
        "covered": cover.covered,
        "covering_witness": list(cover.witness) if cover.witness else None,
        "fixed_point_free_r_element": fpf.found,
        "derangement_witness": list(fpf.witness) if fpf.witness else None,
        "witness_is_derangement": derangement_ok,
        "monomial_all_eigenvalue_one": rep.all_have_eigenvalue_one,
        "ell": rep.ell,
        "perm_degree": action.degree,
        "transitive": action.is_transitive(),
        "agree": agree,
    }


def cmd_grp_perm(args: argparse.Namespace, cfg: RunConfig) -> dict:
    spec = gm.construct_grp(args.r, args.p)
    report = triangulate(args.r, args.p, args.ell, _functional(spec, args))
    if not report["agree"]:
        raise InvariantViolation(f"triangulation disagreement: {report}")
    return report


def cmd_grp_rep(args: argparse.Namespace, cfg: RunConfig) -> dict:
    spec = gm.construct_grp(args.r, args.p)
    res = gm.monomial_unisingular(spec, args.ell, _functional(spec, args))
    return {
        "r": spec.r,
        "p": spec.p,
        "d": spec.d,
        "ell": res.ell,
        "zeta": res.zeta,
        "elements_scanned": res.elements_scanned,
        "all_have_eigenvalue_one": res.all_have_eigenvalue_one,
        "witness": list(res.witness) if res.witness else None,
    }


def cmd_gl2(args: argparse.Namespace, cfg: RunConfig) -> dict:
    if len(args.bits) != args.n - 1:
        raise UsageError(f"gl2 {args.n} needs {args.n - 1} bits")
    if args.n >= 2 and not any(args.bits):
        return {"n": args.n, "bits": args.bits, "unisingular": True,
                "note": "trivial module; every element fixes every vector"}
    return {"n": args.n, "bits": args.bits, "unisingular": wl.gl2_unisingular_criterion(args.n, args.bits)}


def cmd_root_lattice(args: argparse.Namespace, cfg: RunConfig) -> dict:
    t = wl.LieTypeSpec(args.family, args.rank)
    w = wl.WeightVec(t, tuple(args.coeffs))
    return {
        "type": str(t),
        "weight": list(w.coeffs),
        "in_root_lattice": wl.in_root_lattice(w),
        "root_coordinates": [str(x) for x in wl.root_coordinates(w)],
    }


def cmd_s21(args: argparse.Namespace, cfg: RunConfig) -> dict:
    t = wl.LieTypeSpec(args.family, args.rank)
    file_type, weights = wl.parse_weight_file(Path(args.weights).read_text())
    if file_type != t:
        raise UsageError(f"weight file is for {file_type}, command asked for {t}")
    res = wl.s21_condition(t, args.q, weights)
    return {"type": str(t), "q": args.q, "holds": res.holds, "witnesses": res.witnesses, "caveat": res.caveat}


def cmd_minpoly(args: argparse.Namespace, cfg: RunConfig) -> dict:
    m = parse_matrix(Path(args.matrix).read_text())
    mp, cp = min_poly(m), char_poly(m)
    return {
        "modulus": m.modulus,
        "n": m.n,
        "min_poly": list(mp.coefficients),
        "min_poly_degree": mp.degree,
        "char_poly": list(cp.coefficients),
    }


def cmd_eig1(args: argparse.Namespace, cfg: RunConfig) -> dict:
    m = parse_matrix(Path(args.matrix).read_text())
    return {"modulus": m.modulus, "n": m.n, "has_eigenvalue_one": has_eigenvalue_one(m),
            "fixed_space_dim": fixed_space_dim(m)}


COMMANDS = {
    "order": cmd_order,
    "grp-cover": cmd_grp_cover,
    "grp-perm": cmd_grp_perm,
    "grp-rep": cmd_grp_rep,
    "gl2": cmd_gl2,
    "root-lattice": cmd_root_lattice,
    "s21": cmd_s21,
    "minpoly": cmd_minpoly,
    "eig1": cmd_eig1,
}


# -- output ------------------------------------------------------------------


def _flat(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, (list, tuple)):
        return ";".join(str(v) for v in value)
    if isinstance(value, dict):
        return ";".join(f"{k}={v}" for k, v in value.items())
    return str(value)


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(report.keys())
        writer.writerow(_flat(v) for v in report.values())
        return buf.getvalue()
    return "".join(f"{k}: {_flat(v) if v is not None else '-'}\n" for k, v in report.items())


def run(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        if args.verbose:
            logging.basicConfig(level=logging.INFO, stream=err)
        cfg = RunConfig(
            command=args.command,
            workers=_resolve_workers(getattr(args, "workers", None)),
            strategy=getattr(args, "strategy", "scalar_normalized"),
            deterministic=getattr(args, "deterministic", False),
            force_scan=getattr(args, "force_scan", False),
            functional_seed=getattr(args, "seed", None),
            output_format=args.output_format,
            checkpoint=getattr(args, "checkpoint", None),
            args=vars(args),
        )
        report = COMMANDS[args.command](args, cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=err)
        return EXIT_USAGE
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_USAGE
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=err)
        return EXIT_INVARIANT
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=err)
        return EXIT_BUDGET
    out.write(render(report, cfg.output_format))
    return EXIT_OK


def main() -> None:
    sys.exit(run())
