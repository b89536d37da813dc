"""Command-line front end.

Every subcommand prints (or writes to ``--out``) one JSON certificate.
Exit status: 0 pass, 1 verification failed, 2 invalid input or arguments.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys

import numpy as np

from . import certificate as cert
from . import dual_design, geometry, mub, quantum_net, sic, toy_model
from .errors import QDesignError
from .finite_field import FiniteField
from .kernels import BACKEND

log = logging.getLogger("qdesign")


class InputError(Exception):
    """Bad file or malformed artifact; maps to exit status 2."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise InputError(message)


def _read_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc


def _emit(args, c: dict) -> int:
    text = cert.dumps(c)
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if not c["pass"]:
        worst = max(c["deviations"], key=lambda k: c["deviations"][k])
        print(f"verification failed: {worst} = {c['deviations'][worst]:.3e} "
              f"exceeds tol {c['tol']:.1e}", file=sys.stderr)
    return 0 if c["pass"] else 1


def _field(order: int) -> FiniteField:
    return FiniteField.of_order(order)


# -- subcommands -------------------------------------------------------------

def cmd_field(args) -> int:
    F = _field(args.order)
    nonzero = range(1, F.q)
    bad_inv = sum(F.mul(a, F.inv(a)) != 1 for a in nonzero)
    # full distributivity only for small fields
    bad_dist = 0
    if F.q <= 32:
        for a in range(F.q):
            for b in range(F.q):
                for c in range(F.q):
                    bad_dist += F.mul(a, F.add(b, c)) != F.add(F.mul(a, b), F.mul(a, c))
    c = cert.certificate(
        "field", {"order": F.q}, {"inverse_failures": bad_inv, "distributivity_failures": bad_dist},
        args.tol, report={"p": F.p, "k": F.k}, artifact=F.to_json(),
    )
    return _emit(args, c)


def cmd_plane(args) -> int:
    plane = geometry.build_affine_plane(_field(args.order))
    ax = geometry.check_affine_axioms(plane.structure)
    st = [plane.striation(s) for s in range(len(plane.striations))]
    biased = sum(
        not geometry.check_striations_unbiased(st[i], st[j])
        for i in range(len(st)) for j in range(i + 1, len(st))
    )
    devs = {
        "axiom_failures": sum(not x for x in (ax.joining_line, ax.unique_parallel,
                                              ax.noncollinear_triple)),
        "striation_failures": int(not ax.striation_decomposable),
        "biased_pairs": biased,
    }
    c = cert.certificate(
        "plane", {"order": args.order}, devs, args.tol,
        report={"n_points": ax.n_points, "n_lines": ax.n_lines,
                "parallel_classes": ax.parallel_classes, "witnesses": ax.witnesses},
        artifact=plane.to_json(),
    )
    return _emit(args, c)


def cmd_mols(args) -> int:
    squares = geometry.mols_from_plane(geometry.build_affine_plane(_field(args.order)))
    bad = sum(
        not geometry.are_orthogonal(squares[i], squares[j])
        for i in range(len(squares)) for j in range(i + 1, len(squares))
    )
    c = cert.certificate(
        "mols", {"order": args.order}, {"non_orthogonal_pairs": bad,
                                        "missing_squares": args.order - 1 - len(squares)},
        args.tol, artifact={"squares": [[list(r) for r in sq.cells] for sq in squares]},
    )
    return _emit(args, c)


def cmd_mate(args) -> int:
    data = cert.unwrap(_read_json(args.input))
    cells = data.get("square", data.get("cells")) if isinstance(data, dict) else data
    if cells is None:
        raise InputError("expected a square as a nested list or under key 'square'")
    sq = geometry.LatinSquare.from_array(cells)
    res = geometry.search_orthogonal_mate(sq, budget=args.budget)
    art = {"square": [list(r) for r in sq.cells]}
    if res.mate is not None:
        art["mate"] = [list(r) for r in res.mate.cells]
    c = cert.certificate(
        "mols", {"order": sq.order, "budget": args.budget},
        {"undecided": int(res.status == geometry.MateStatus.BUDGET_EXHAUSTED)}, args.tol,
        report={"status": res.status, "nodes": res.nodes}, artifact=art,
    )
    return _emit(args, c)


def cmd_mub(args) -> int:
    m = mub.build_mubs(_field(args.order))
    r = mub.verify_mubs(m, args.tol)
    devs = {"orthonormality": r.orthonormality, "unbiasedness": r.unbiasedness,
            "missing_bases": args.order + 1 - r.n_bases}
    c = cert.certificate(
        "mub", {"order": args.order}, devs, args.tol,
        report={"n_bases": r.n_bases, "within_bound": r.within_bound},
        artifact=None if args.check_only else m.to_json(),
    )
    return _emit(args, c)


def cmd_net(args) -> int:
    F = _field(args.order)
    plane = geometry.build_affine_plane(F)
    net = quantum_net.build_quantum_net(mub.build_mubs(F), plane)
    r = quantum_net.verify_net(net, args.tol)
    k = quantum_net.trace_cardinality_check(net, args.tol)
    devs = {
        "trace": r.trace, "orthogonality": r.orthogonality, "line_sums": r.line_sums,
        "parallel": r.parallel, "nonparallel": r.nonparallel,
        "cardinality": max(k.singleton, k.intersection, k.line_cardinality,
                           k.line_intersection, k.identity),
    }
    report = {}
    if args.state:
        data = cert.unwrap(_read_json(args.state))
        raw = data.get("rho") if isinstance(data, dict) else data
        try:
            rho = cert.decode_complex(raw)
        except (TypeError, ValueError) as exc:
            raise InputError(f"density matrix: {exc}") from exc
        W = quantum_net.wigner_function(rho, net, args.tol)
        born = np.einsum("ij,lji->l", rho, net.line_projectors).real
        sums = np.array([W.line_sum(j) for j in range(len(net.line_projectors))])
        devs["wigner_total"] = abs(W.values.sum() - 1)
        devs["born"] = float(np.abs(sums - born).max())
        devs["wigner_imag"] = W.max_imag
        report["wigner"] = W.values.tolist()
    c = cert.certificate("net", {"order": args.order}, devs, args.tol, report=report or None)
    return _emit(args, c)


def _sic_devs(cand: sic.SicCandidate, tol: float) -> tuple[dict, dict]:
    r = sic.verify_sic(cand, tol)
    devs = {"overlap": r.overlap, "resolution": r.resolution,
            "rank_deficit": cand.N**2 - r.gram_rank}
    return devs, {"gram_rank": r.gram_rank, "witness": list(r.witness)}


def cmd_sic_search(args) -> int:
    cfg = sic.SearchConfig(
        restarts=args.restarts, seed=args.seed, jobs=args.jobs,
        max_iterations=args.max_iterations,
    )
    fid = sic.search_fiducial(args.dim, cfg)
    cand = fid.orbit()
    devs, report = _sic_devs(cand, args.tol)
    report.update(residual=fid.residual, restart=fid.restart,
                  fiducial=cert.encode_complex(fid.vector))
    c = cert.certificate(
        "sic", {"dim": args.dim, "restarts": args.restarts,
                "max_iterations": args.max_iterations},
        devs, args.tol, seed=args.seed, report=report, artifact=cand.to_json(),
    )
    return _emit(args, c)


def _load_sic(data: dict) -> tuple[sic.SicCandidate, float]:
    """Candidate with rows renormalized, plus the raw norm deviation."""
    try:
        N = int(data["N"])
        v = cert.decode_complex(data["vectors"])
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed SIC candidate: {exc}") from exc
    if v.ndim != 2:
        raise InputError("vectors must be a list of [re, im] lists")
    norms = np.linalg.norm(v, axis=1)
    if np.any(norms == 0):
        raise InputError("zero vector in candidate")
    cand = sic.SicCandidate(N, v / norms[:, None], data.get("provenance", "imported"),
                            data.get("seed"))
    return cand, float(np.abs(norms - 1).max())


def cmd_sic_verify(args) -> int:
    cand, norm_dev = _load_sic(cert.unwrap(_read_json(args.input)))
    devs, report = _sic_devs(cand, args.tol)
    devs["norm"] = norm_dev
    c = cert.certificate("sic", {"dim": cand.N}, devs, args.tol, seed=cand.seed, report=report)
    return _emit(args, c)


def cmd_dual_solve(args) -> int:
    cand, _ = _load_sic(cert.unwrap(_read_json(args.sic)))
    if args.order is not None and args.order != cand.N:
        raise InputError(f"--order {args.order} does not match SIC dimension {cand.N}")
    a = dual_design.solve_b_from_sic(cand)
    r = dual_design.verify_b_conditions(a, args.tol)
    c = cert.certificate(
        "dual", {"order": cand.N}, {"constraint_residual": a.constraint_residual}, args.tol,
        report={"conditions": r.to_json()}, artifact=a.to_json(),
    )
    return _emit(args, c)


def cmd_dual_verify(args) -> int:
    data = cert.unwrap(_read_json(args.input))
    try:
        a = dual_design.BAssignment.from_json(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed B assignment: {exc}") from exc
    r = dual_design.verify_b_conditions(a, args.tol)
    devs = {"normalization": r.normalization, "self_trace": r.self_trace,
            "shared_line": r.shared_line, "non_shared": r.non_shared, "line_sum": r.line_sum}
    c = cert.certificate("dual", {"order": a.N}, devs, args.tol,
                         report={"witnesses": r.witnesses})
    return _emit(args, c)


def cmd_toy(args) -> int:
    N = args.order
    model = toy_model.ToyModel.of_order(N)
    target = 1 / (N + 1)
    n = model.n_states
    err_off = err_diag = 0.0
    for i in range(n):
        for j in range(n):
            p = toy_model.yes_probability(model, i, j)
            if i == j:
                err_diag = max(err_diag, abs(float(p) - 1))
            else:
                err_off = max(err_off, abs(float(p) - target))
    devs = {"offdiagonal": err_off, "diagonal": err_diag}
    report = {"yes_probability": f"1/{N + 1}"}
    seed = None
    if args.simulate:
        i, j = args.simulate
        seed = args.seed
        freq = toy_model.simulate(model, i, j, args.trials, args.seed)
        exact = toy_model.yes_probability(model, i, j)
        report["simulation"] = {"i": i, "j": j, "trials": args.trials, "frequency": freq,
                                "exact": str(exact)}
    c = cert.certificate("toy", {"order": N}, devs, args.tol, seed=seed, report=report)
    return _emit(args, c)


# -- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qdesign", description="Construct and verify quantum designs.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, tol, **kw):
        sp = sub.add_parser(name, **kw)
        sp.set_defaults(func=func)
        sp.add_argument("--tol", type=float, default=tol)
        sp.add_argument("--out")
        return sp

    add("field", cmd_field, 0.0).add_argument("--order", type=int, required=True)
    add("plane", cmd_plane, 0.0).add_argument("--order", type=int, required=True)
    add("mols", cmd_mols, 0.0).add_argument("--order", type=int, required=True)
    sp = add("mate", cmd_mate, 0.0)
    sp.add_argument("--input", required=True)
    sp.add_argument("--budget", type=int, default=10**9)
    sp = add("mub", cmd_mub, mub.DEFAULT_TOL)
    sp.add_argument("--order", type=int, required=True)
    sp.add_argument("--check-only", action="store_true")
    sp = add("net", cmd_net, quantum_net.DEFAULT_TOL)
    sp.add_argument("--order", type=int, required=True)
    sp.add_argument("--state")

    sic_p = sub.add_parser("sic").add_subparsers(dest="action", required=True,
                                                 parser_class=_Parser)
    sp = sic_p.add_parser("search")
    sp.set_defaults(func=cmd_sic_search)
    sp.add_argument("--dim", type=int, required=True)
    sp.add_argument("--restarts", type=int, default=sic.SearchConfig.restarts)
    sp.add_argument("--max-iterations", type=int, default=sic.SearchConfig.max_iterations)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--tol", type=float, default=sic.DEFAULT_TOL)
    sp.add_argument("--out")
    sp = sic_p.add_parser("verify")
    sp.set_defaults(func=cmd_sic_verify)
    sp.add_argument("--input", required=True)
    sp.add_argument("--tol", type=float, default=sic.DEFAULT_TOL)
    sp.add_argument("--out")

    dual_p = sub.add_parser("dual").add_subparsers(dest="action", required=True,
                                                   parser_class=_Parser)
    sp = dual_p.add_parser("solve")
    sp.set_defaults(func=cmd_dual_solve)
    sp.add_argument("--sic", required=True)
    sp.add_argument("--order", type=int)
    sp.add_argument("--tol", type=float, default=1e-8)
    sp.add_argument("--out")
    sp = dual_p.add_parser("verify")
    sp.set_defaults(func=cmd_dual_verify)
    sp.add_argument("--input", required=True)
    sp.add_argument("--tol", type=float, default=dual_design.DEFAULT_TOL)
    sp.add_argument("--out")

    sp = add("toy", cmd_toy, 0.0)
    sp.add_argument("--order", type=int, required=True)
    sp.add_argument("--simulate", type=int, nargs=2, metavar=("I", "J"))
    sp.add_argument("--trials", type=int, default=10**5)
    sp.add_argument("--seed", type=int, default=0)
    return p


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:       # --help
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    log.debug("kernel backend: %s", BACKEND)
    try:
        return args.func(args)
    except (InputError, QDesignError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())
