"""Command-line front end.

Each subcommand writes a table to ``--out`` (stdout by default) as CSV or
JSON and a short ``key=value`` summary to stderr. Exit codes: 0 when all
checks pass, 1 when a check fails, 2 on usage or input errors.
"""
import argparse
import json
import sys
from dataclasses import dataclass

import numpy as np

from .errors import ConstructionError, DomainError, ValidationError

EXIT_OK, EXIT_CHECK, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    restarts: int = 20
    grid_points: int = 101
    n_quad: int = 200
    delta: float = 0.2
    output_path: str = "-"
    format: str = "csv"

    def __post_init__(self):
        if self.restarts < 1:
            raise UsageError("--restarts must be >= 1")
        if self.grid_points < 2:
            raise UsageError("--grid must be >= 2")
        if self.n_quad < 1:
            raise UsageError("--n-quad must be >= 1")
        if not 0.0 < self.delta <= 2.0:
            raise UsageError("--delta must lie in (0, 2]")
        if not 0 <= self.seed < 2 ** 64:
            raise UsageError("--seed must be a 64-bit unsigned integer")


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.17g" % float(v)
    return str(v)


def _jsonable(v):
    if isinstance(v, np.generic):
        return v.item()
    if isinstance(v, np.ndarray):
        return v.tolist()
    return v


def emit(cfg, command, columns, rows, summary):
    """Write the table to ``cfg.output_path`` and the summary to stderr."""
    if cfg.format == "json":
        doc = {
            "command": command,
            "columns": list(columns),
            "rows": [{c: _jsonable(v) for c, v in zip(columns, r)} for r in rows],
            "summary": {k: _jsonable(v) for k, v in summary.items()},
        }
        text = json.dumps(doc, indent=1) + "\n"
    else:
        lines = [",".join(columns)] + [",".join(_fmt(v) for v in r) for r in rows]
        text = "\n".join(lines) + "\n"
    if cfg.output_path == "-":
        sys.stdout.write(text)
    else:
        with open(cfg.output_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    for k, v in summary.items():
        print(f"{k}={_fmt(v)}", file=sys.stderr)


def _grid(cfg):
    return np.linspace(0.0, 1.0, cfg.grid_points)


def cmd_curve_match(args, cfg):
    from .curve_match import build_matching_channel, channel_mi_curve, mi_curve_quantum

    r, s = np.array(args.r, float), np.array(args.s, float)
    try:
        g = _grid(cfg)
        q = mi_curve_quantum(r, s, g)
        w = build_matching_channel(r, s, cfg.n_quad)
        c = channel_mi_curve(w, g)
    except (DomainError, ValidationError) as exc:
        raise UsageError(str(exc)) from exc
    diff = np.abs(q.values - c.values)
    rows = list(zip(g, q.values, c.values, diff))
    worst = float(diff.max())
    ok = worst <= 1e-4
    emit(cfg, "curve-match", ("p", "mi_quantum", "mi_classical", "abs_diff"), rows,
         {"max_abs_diff": worst, "outputs": w.shape[1], "pass": ok})
    return EXIT_OK if ok else EXIT_CHECK


TYPO_VECTOR = (1, 0, 0, 1)


def cmd_ks_verify(args, cfg):
    from . import ks_witness as ks

    table = None if not args.inject_typo else ks.INT_VECTORS.copy()
    if table is not None:
        table[0] = TYPO_VECTOR
    try:
        system = ks.build_ks(table)
    except ConstructionError as exc:
        emit(cfg, "ks-verify", ("check", "value"), [("construction", str(exc))], {"pass": False})
        return EXIT_CHECK
    alpha = ks.independence_number(system.adjacency)
    point = ks.ks_entropy_point(system)
    dev = ks.clique_average_check(system)
    margin, _ = ks.classical_gap_search(args.card, cfg.restarts, cfg.seed, system)
    err = float(np.max(np.abs(point - ks.TARGET)))
    ok = alpha == 5 and err <= 1e-9 and dev <= 1e-12
    rows = [
        ("independence_number", alpha),
        ("H(X|F)", point[0]),
        ("H(M|F)", point[1]),
        ("H(Y|F)", point[2]),
        ("clique_average_deviation", dev),
        (f"gap_margin_card{args.card}", margin),
    ]
    emit(cfg, "ks-verify", ("check", "value"), rows,
         {"entropy_error": err, "gap_margin": margin, "pass": ok})
    return EXIT_OK if ok else EXIT_CHECK


def cmd_chsh(args, cfg):
    from .chsh_bounds import curve_sweep

    lo, hi = args.eps_min, args.eps_max
    if not 0.0 <= lo <= hi <= 1.0:
        raise UsageError("need 0 <= --eps-min <= --eps-max <= 1")
    grid = [lo] if lo == hi else list(np.linspace(lo, hi, cfg.grid_points))
    rows = curve_sweep(grid, args.n_max)
    dominance = all(r.ic_lower_bound <= r.classical_cost + 2e-3 for r in rows)
    endpoints = True
    for r in rows:
        if r.eps == 1.0:
            endpoints &= abs(r.classical_cost - 1.0) <= 2e-3 and r.ic_lower_bound == 1.0
        if r.eps <= 0.5:
            endpoints &= r.classical_cost <= 1e-3
    ok = dominance and endpoints
    emit(cfg, "chsh", ("eps", "p", "classical_cost", "ic_lower_bound", "one_minus_h_eps"),
         [(r.eps, r.p, r.classical_cost, r.ic_lower_bound, r.one_minus_h_eps) for r in rows],
         {"dominance": dominance, "endpoints": endpoints, "pass": ok})
    return EXIT_OK if ok else EXIT_CHECK


def load_instance(path):
    """Parse ``{"sizes": [nx, ny, nz], "p": [...]}`` into a joint array."""
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
        sizes = [int(n) for n in doc["sizes"]]
        flat = np.asarray(doc["p"], dtype=float)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"cannot read instance {path}: {exc}") from exc
    if len(sizes) != 3 or min(sizes) < 1 or flat.size != int(np.prod(sizes)):
        raise UsageError("instance sizes must be three positive integers matching len(p)")
    if not np.all(np.isfinite(flat)) or flat.min() < -1e-12 or abs(flat.sum() - 1.0) > 1e-9:
        raise UsageError("instance probabilities must be nonnegative and sum to 1 within 1e-9")
    return flat.reshape(sizes)


def cmd_regions(args, cfg):
    from . import region_opt as ro

    joint = load_instance(args.instance)
    rows, summary = [], {}
    if args.mode in ("classical", "quantum", "both"):
        try:
            q = ro.TripleDist(joint)
        except ValidationError as exc:
            raise UsageError(str(exc)) from exc
        dim = args.dim or q.sizes[0]
        cols = ("mode", "dim", "value", "restarts", "converged")
        if args.mode in ("classical", "both"):
            c = ro.opt_classical_diff(q, cfg.restarts, cfg.seed)
            rows.append(("classical", q.sizes[0], c.value, c.restarts_used, c.converged))
            summary["classical"] = c.value
        if args.mode in ("quantum", "both"):
            r = ro.opt_quantum_diff(q, dim, cfg.restarts, cfg.seed)
            rows.append(("quantum", dim, r.value, r.restarts_used, r.converged))
            summary["quantum"] = r.value
        ok = True
        if args.mode == "both" and dim >= q.sizes[0]:
            ok = summary["quantum"] >= summary["classical"] - 1e-4
        summary["pass"] = ok
    else:
        card = args.card or joint.size
        dim = args.dim or 2
        cl = ro.gw_classical_region(joint, card, args.samples, cfg.seed)
        qu = ro.gw_quantum_sample(joint, dim, args.samples, cfg.seed)
        h = ro.marginal_entropies(joint)
        hx = float(-np.sum(joint[joint > 0] * np.log2(joint[joint > 0])))
        extremes = [np.array([0.0] + h), np.array([hx] + [0.0] * len(h))]
        present = all(np.min(np.abs(cl - p).max(axis=1)) <= 1e-9 for p in extremes)
        qdist = max(ro.hull_distance(p, cl) for p in qu)
        defect = min(ro.region_dominance_defect(cl, h), ro.region_dominance_defect(qu, h))
        ncoord = cl.shape[1]
        cols = ("source",) + tuple(f"c{i}" for i in range(ncoord))
        rows = [("classical",) + tuple(p) for p in cl] + [("quantum",) + tuple(p) for p in qu]
        ok = present and defect >= -1e-6
        summary.update({"extremes_present": present, "max_quantum_hull_distance": qdist,
                        "dominance_defect": defect, "pass": ok})
    emit(cfg, "regions", cols, rows, summary)
    return EXIT_OK if summary["pass"] else EXIT_CHECK


def minimax_instance(seed, dict_size=3):
    """Seeded random binary-input qubit ensemble with a dictionary of channels."""
    from .infotheory import CqEnsemble
    from .qmath import random_density

    rng = np.random.default_rng(seed)
    q = rng.uniform(0.2, 0.8)
    e = CqEnsemble(np.array([q, 1.0 - q]), np.stack([random_density(2, rng) for _ in range(2)]))
    dictionary = [rng.dirichlet(np.ones(2), size=2) for _ in range(dict_size)]
    return e, dictionary


def cmd_minimax(args, cfg):
    from . import epsnet_minimax as em

    seeds = np.random.SeedSequence(cfg.seed).generate_state(args.instances, dtype=np.uint64)
    rows = []
    ok = True
    worst_mid = 0.0
    for k, s in enumerate(seeds):
        e, dictionary = minimax_instance(int(s), args.dict_size)
        rep = em.maxmin_minmax_check(e, dictionary, args.alphabet, cfg.restarts, int(s) % 2 ** 32)
        gap = rep.minmax - rep.maxmin
        rng = np.random.default_rng(int(s))
        mid = max(em.convexity_midpoint_check(rng.dirichlet(np.ones(4), size=2).reshape(2, 2, 2),
                                              rng.dirichlet(np.ones(4), size=2).reshape(2, 2, 2),
                                              e, dictionary) for _ in range(args.midpoint_pairs))
        worst_mid = max(worst_mid, mid)
        ok &= abs(gap) <= 5e-3 and rep.maxmin <= rep.minmax + 2e-3 and mid <= 1e-9
        rows.append((k, rep.maxmin, rep.minmax, gap, mid))
    emit(cfg, "minimax", ("instance", "maxmin", "minmax", "gap", "midpoint_deviation"), rows,
         {"max_gap": max((abs(r[3]) for r in rows), default=0.0), "max_midpoint_deviation": worst_mid,
          "pass": ok})
    return EXIT_OK if ok else EXIT_CHECK


def _common(defaults):
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=0, help="64-bit seed for all randomness")
    p.add_argument("--restarts", type=int, default=defaults.get("restarts", 20))
    p.add_argument("--grid", type=int, default=defaults.get("grid", 101), dest="grid_points",
                   help="number of grid points")
    p.add_argument("--n-quad", type=int, default=200, help="quadrature nodes for curve matching")
    p.add_argument("--delta", type=float, default=0.2, help="net spacing parameter")
    p.add_argument("--out", default="-", dest="output_path", help="output file ('-' for stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    return p


def build_parser():
    parser = argparse.ArgumentParser(prog="qcond", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("curve-match", parents=[_common({})],
                       help="match a qubit ensemble's information curve with a classical channel")
    p.add_argument("--r", nargs=3, type=float, required=True, metavar=("R1", "R2", "R3"))
    p.add_argument("--s", nargs=3, type=float, required=True, metavar=("S1", "S2", "S3"))
    p.set_defaults(func=cmd_curve_match)

    p = sub.add_parser("ks-verify", parents=[_common({"restarts": 8})],
                       help="verify the 24-vector system and its entropy point")
    p.add_argument("--card", type=int, default=6, help="|C| for the classical gap search")
    p.add_argument("--inject-typo", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_ks_verify)

    p = sub.add_parser("chsh", parents=[_common({"grid": 21})],
                       help="classical cost and Information Causality bound on an eps grid")
    p.add_argument("--eps-min", type=float, default=0.0)
    p.add_argument("--eps-max", type=float, default=1.0)
    p.add_argument("--n-max", type=int, default=25)
    p.set_defaults(func=cmd_chsh)

    p = sub.add_parser("regions", parents=[_common({})],
                       help="auxiliary-register optimisation and region sampling for an instance")
    p.add_argument("instance", help='JSON file {"sizes": [nx, ny, nz], "p": [...]}')
    p.add_argument("--mode", choices=("classical", "quantum", "both", "gw"), default="both")
    p.add_argument("--dim", type=int, default=None, help="quantum register dimension")
    p.add_argument("--card", type=int, default=None, help="|C| for gw sampling")
    p.add_argument("--samples", type=int, default=200)
    p.set_defaults(func=cmd_regions)

    p = sub.add_parser("minimax", parents=[_common({})],
                       help="max-min versus min-max on seeded random instances")
    p.add_argument("--instances", type=int, default=10)
    p.add_argument("--dict-size", type=int, default=3)
    p.add_argument("--alphabet", type=int, default=2, help="|Y| = |Z| in the searches")
    p.add_argument("--midpoint-pairs", type=int, default=10)
    p.set_defaults(func=cmd_minimax)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = RunConfig(args.seed, args.restarts, args.grid_points, args.n_quad, args.delta,
                        args.output_path, args.format)
        return args.func(args, cfg)
    except UsageError as exc:
        print(f"qcond: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
