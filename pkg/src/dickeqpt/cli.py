"""Command-line front end: coupling scans, critical ladder, closed-form branch rows (p = 0..4), tau surface.

Exit codes: 0 success, 1 usage error, 2 internal invariant violation,
3 self-check mismatch.
"""

import argparse
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor

from . import __version__
from .eigen import ConvergenceError
from .entangle import (
    ckw_report_p1,
    closed_form_concurrence,
    concurrence,
    dicke_weights,
    entanglement_report,
    two_atom_rdm,
)
from .fieldstats import photon_statistics
from .oracle import MAX_ATOMS as ORACLE_MAX_ATOMS
from .oracle import CutoffTooSmall, equivalence_suite
from .phase import (
    PhaseError,
    build_phase_diagram,
    closed_form_kappa,
    closed_form_slope,
    ground_energy,
    ground_excitation,
)
from .subspace import ModelParams

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INTERNAL = 2
EXIT_MISMATCH = 3

SCAN_FIELDS = (
    "kappa",
    "p_star",
    "energy",
    "d_energy_d_kappa",
    "concurrence",
    "tau_a",
    "entropy_nats",
    "mean_photons",
    "photon_variance",
    "mandel_q",
)

SELF_CHECK_RTOL = 1e-9
CKW_ATOL = 1e-9
ORACLE_CLI_MAX_ATOMS = 4
DEFAULT_MAX_CELLS = 200_000
MONOTONE_RTOL = 1e-12


class UsageError(Exception):
    pass


class InvariantError(Exception):
    pass


class SelfCheckError(Exception):
    def __init__(self, message, rows=None, fields=None):
        super().__init__(message)
        self.rows = rows
        self.fields = fields


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# formatting
# ---------------------------------------------------------------------------

def _num(x):
    if x is None:
        return None
    if isinstance(x, bool):
        return int(x)
    if isinstance(x, int):
        return x
    x = float(x)
    if math.isnan(x):
        return None
    return float(format(x, ".12g"))


def _csv_cell(x):
    if x is None:
        return "nan"
    if isinstance(x, bool):
        return str(int(x))
    if isinstance(x, int):
        return str(x)
    if isinstance(x, str):
        return x
    x = float(x)
    if math.isnan(x):
        return "nan"
    return format(x, ".12g")


def render(rows, fields, fmt):
    if fmt == "json":
        out = [{f: (r[f] if isinstance(r[f], str) else _num(r[f])) for f in fields} for r in rows]
        return json.dumps(out, indent=1) + "\n"
    buf = io.StringIO()
    buf.write(",".join(fields) + "\n")
    for r in rows:
        buf.write(",".join(_csv_cell(r[f]) for f in fields) + "\n")
    return buf.getvalue()


def _parallel_map(func, items, threads):
    if threads <= 1:
        return [func(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, items))


# ---------------------------------------------------------------------------
# commands (return rows and field names; never touch stdout)
# ---------------------------------------------------------------------------

def scan_row(params):
    p_star, branch = ground_excitation(params)
    ent = entanglement_report(branch, params.n_atoms)
    stats = photon_statistics(branch)
    return {
        "kappa": params.kappa,
        "p_star": p_star,
        "energy": ground_energy(params, p_star),
        "d_energy_d_kappa": branch.k_slope,
        "concurrence": ent.concurrence,
        "tau_a": ent.tau_a,
        "entropy_nats": ent.entropy_nats,
        "mean_photons": stats.mean,
        "photon_variance": stats.variance,
        "mandel_q": stats.mandel_q_variance,
    }


def check_scan_monotone(rows):
    for prev, cur in zip(rows, rows[1:]):
        if cur["p_star"] < prev["p_star"]:
            raise InvariantError(f"p_star decreased at kappa={cur['kappa']!r}")
        tol = MONOTONE_RTOL * max(1.0, abs(prev["energy"]))
        if cur["energy"] > prev["energy"] + tol:
            raise InvariantError(f"ground energy increased at kappa={cur['kappa']!r}")


def cmd_scan(n_atoms, kappa_min, kappa_max, steps, omega=1.0, threads=1):
    if kappa_min < 0:
        raise UsageError("--kappa-min must be >= 0")
    if kappa_max < kappa_min:
        raise UsageError("--kappa-max must be >= --kappa-min")
    if steps < 2:
        raise UsageError("--steps must be >= 2")
    base = ModelParams(n_atoms, omega)
    kappas = [kappa_min + (kappa_max - kappa_min) * i / (steps - 1) for i in range(steps)]
    kappas[-1] = kappa_max
    # warm the branch cache up to the largest coupling, serially
    ground_excitation(base.with_kappa(kappa_max))
    rows = _parallel_map(lambda k: scan_row(base.with_kappa(k)), kappas, threads)
    check_scan_monotone(rows)
    return rows, SCAN_FIELDS


CRITICAL_FIELDS = ("j", "kappa", "k_slope", "d_energy_jump", "kappa_closed_form", "rel_diff")


def cmd_critical(n_atoms, max_j, omega=1.0):
    if max_j < 1:
        raise UsageError("--max-j must be >= 1")
    diagram = build_phase_diagram(n_atoms, max_j, omega)
    rows = []
    bad = []
    for (j, kappa), br, prev in zip(diagram.criticals, diagram.branches[1:], diagram.branches):
        closed = closed_form_kappa(n_atoms, j, omega) if j <= 3 else None
        rel = abs(kappa - closed) / abs(closed) if closed is not None else None
        if rel is not None and rel > SELF_CHECK_RTOL:
            bad.append(j)
        rows.append(
            {
                "j": j,
                "kappa": kappa / omega,
                "k_slope": br.k_slope,
                "d_energy_jump": br.k_slope - prev.k_slope,
                "kappa_closed_form": None if closed is None else closed / omega,
                "rel_diff": rel,
            }
        )
    if bad:
        raise SelfCheckError(f"closed-form mismatch at j={bad}", rows, CRITICAL_FIELDS)
    return rows, CRITICAL_FIELDS


TABLE1_FIELDS = (
    "p",
    "kappa_lo",
    "kappa_hi",
    "e0",
    "k_slope",
    "k_slope_closed_form",
    "energy_mid",
    "energy_mid_closed_form",
    "concurrence",
    "concurrence_closed_form",
)


def cmd_table1(n_atoms, omega=1.0):
    if n_atoms < 2:
        raise UsageError("table1 needs --atoms >= 2")
    diagram = build_phase_diagram(n_atoms, 5, omega)
    rows = []
    bad = []
    for p in range(5):
        lo, hi = diagram.window(p)
        mid = 0.5 * (lo + hi)
        params = ModelParams(n_atoms, omega, mid)
        branch = diagram.branches[p]
        k_closed = closed_form_slope(n_atoms, p)
        e_mid = ground_energy(params, p)
        e_closed = (p - n_atoms / 2) * omega + mid * k_closed
        c = concurrence(two_atom_rdm(dicke_weights(branch), n_atoms))
        c_closed = closed_form_concurrence(n_atoms, p) if p <= 2 else None
        if abs(branch.k_slope - k_closed) > SELF_CHECK_RTOL * max(1.0, abs(k_closed)):
            bad.append(p)
        elif c_closed is not None and abs(c - c_closed) > SELF_CHECK_RTOL:
            bad.append(p)
        rows.append(
            {
                "p": p,
                "kappa_lo": lo / omega,
                "kappa_hi": hi / omega,
                "e0": (p - n_atoms / 2) * omega,
                "k_slope": branch.k_slope,
                "k_slope_closed_form": k_closed,
                "energy_mid": e_mid,
                "energy_mid_closed_form": e_closed,
                "concurrence": c,
                "concurrence_closed_form": c_closed,
            }
        )
    if bad:
        raise SelfCheckError(f"closed-form mismatch at p={bad}", rows, TABLE1_FIELDS)
    return rows, TABLE1_FIELDS


TAU_FIELDS = ("n_atoms", "p", "concurrence", "tau_a", "entropy_nats", "mean_photons", "photon_variance")


def tau_cell(cell):
    from .phase import ground_branch

    n, p = cell
    branch = ground_branch(n, p)
    ent = entanglement_report(branch, n)
    stats = photon_statistics(branch)
    return {
        "n_atoms": n,
        "p": p,
        "concurrence": ent.concurrence,
        "tau_a": ent.tau_a,
        "entropy_nats": ent.entropy_nats,
        "mean_photons": stats.mean,
        "photon_variance": stats.variance,
    }


def cmd_tau_surface(n_max, p_max, threads=1, max_cells=DEFAULT_MAX_CELLS):
    if n_max < 2:
        raise UsageError("tau-surface needs --atoms >= 2")
    if p_max < 1:
        raise UsageError("--p-max must be >= 1")
    cells = [(n, p) for n in range(2, n_max + 1) for p in range(p_max + 1)]
    if len(cells) > max_cells:
        raise UsageError(f"grid of {len(cells)} cells exceeds --max-cells={max_cells}")
    return _parallel_map(tau_cell, cells, threads), TAU_FIELDS


CKW_FIELDS = ("qubit", "tangle", "concurrence_sq_sum", "residual", "pair_concurrence")


def cmd_ckw(n_atoms):
    if n_atoms < 2:
        raise UsageError("ckw needs --atoms >= 2")
    rep = ckw_report_p1(n_atoms)
    rows = [
        {
            "qubit": "field",
            "tangle": rep.field_tangle,
            "concurrence_sq_sum": rep.field_concurrence_sq_sum,
            "residual": rep.field_residual,
            "pair_concurrence": rep.c_field_atom,
        },
        {
            "qubit": "atom",
            "tangle": rep.atom_tangle,
            "concurrence_sq_sum": rep.atom_concurrence_sq_sum,
            "residual": rep.atom_residual,
            "pair_concurrence": rep.c_atom_atom,
        },
    ]
    worst = max(abs(rep.field_residual), abs(rep.atom_residual))
    if worst > CKW_ATOL:
        raise SelfCheckError(f"CKW residual {worst:.3e} above {CKW_ATOL}", rows, CKW_FIELDS)
    return rows, CKW_FIELDS


ORACLE_FIELDS = ("check", "max_error", "tolerance", "passed")


def cmd_oracle_check(n_atoms, cutoff, samples, omega=1.0):
    if not 1 <= n_atoms <= ORACLE_CLI_MAX_ATOMS:
        raise UsageError(f"oracle-check supports 1 <= --atoms <= {ORACLE_CLI_MAX_ATOMS}")
    if cutoff < 1:
        raise UsageError("--cutoff must be >= 1")
    if samples < 2:
        raise UsageError("--kappa-samples must be >= 2")
    try:
        results = equivalence_suite(n_atoms, cutoff, samples, omega)
    except CutoffTooSmall as exc:
        rows = [{"check": "cutoff", "max_error": math.inf, "tolerance": 0.0, "passed": False}]
        raise SelfCheckError(str(exc), rows, ORACLE_FIELDS) from exc
    rows = [
        {"check": r.name, "max_error": r.max_error, "tolerance": r.tolerance, "passed": r.passed}
        for r in results
    ]
    failed = [r["check"] for r in rows if not r["passed"]]
    if failed:
        raise SelfCheckError(f"oracle checks failed: {', '.join(failed)}", rows, ORACLE_FIELDS)
    return rows, ORACLE_FIELDS


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--omega", type=float, default=1.0, help="atom/field frequency (default 1)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--output", default="-", help="output path (default: standard output)")
    common.add_argument("--threads", type=int, default=1, help="worker threads for grid evaluation")

    parser = _Parser(prog="dickeqpt", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("scan", parents=[common], help="ground-state quantities on a coupling grid")
    p.add_argument("--atoms", type=int, required=True)
    p.add_argument("--kappa-min", type=float, required=True)
    p.add_argument("--kappa-max", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--entropy-bits", action="store_true", help="report entropy in bits (column entropy_bits)")

    p = sub.add_parser("critical", parents=[common], help="critical-coupling ladder")
    p.add_argument("--atoms", type=int, required=True)
    p.add_argument("--max-j", type=int, required=True)

    p = sub.add_parser("table1", parents=[common], help="branches p = 0..4 with closed forms")
    p.add_argument("--atoms", type=int, required=True)

    p = sub.add_parser("tau-surface", parents=[common], help="tau_A over (N, p)")
    p.add_argument("--atoms", type=int, required=True, help="largest atom number")
    p.add_argument("--p-max", type=int, required=True)
    p.add_argument("--max-cells", type=int, default=DEFAULT_MAX_CELLS)

    p = sub.add_parser("ckw", parents=[common], help="monogamy saturation in the p = 1 window")
    p.add_argument("--atoms", type=int, required=True)

    p = sub.add_parser("oracle-check", parents=[common], help="dense brute-force cross-check")
    p.add_argument("--atoms", type=int, required=True)
    p.add_argument("--cutoff", type=int, default=10)
    p.add_argument("--kappa-samples", type=int, default=50)
    return parser


def _dispatch(args):
    if args.threads < 1:
        raise UsageError("--threads must be >= 1")
    if not args.omega > 0 or not math.isfinite(args.omega):
        raise UsageError("--omega must be positive")
    if args.atoms < 1:
        raise UsageError("--atoms must be >= 1")
    if args.command == "scan":
        rows, fields = cmd_scan(args.atoms, args.kappa_min, args.kappa_max, args.steps, args.omega, args.threads)
        if args.entropy_bits:
            for r in rows:
                r["entropy_bits"] = r.pop("entropy_nats") / math.log(2)
            fields = tuple("entropy_bits" if f == "entropy_nats" else f for f in fields)
        return rows, fields
    if args.command == "critical":
        return cmd_critical(args.atoms, args.max_j, args.omega)
    if args.command == "table1":
        return cmd_table1(args.atoms, args.omega)
    if args.command == "tau-surface":
        return cmd_tau_surface(args.atoms, args.p_max, args.threads, args.max_cells)
    if args.command == "ckw":
        return cmd_ckw(args.atoms)
    if args.command == "oracle-check":
        if args.atoms > ORACLE_MAX_ATOMS:
            raise UsageError(f"dense oracle limited to {ORACLE_MAX_ATOMS} atoms")
        return cmd_oracle_check(args.atoms, args.cutoff, args.kappa_samples, args.omega)
    raise UsageError(f"unknown command {args.command!r}")  # pragma: no cover


def _emit(text, path):
    if path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        rows, fields = _dispatch(args)
    except (UsageError, ValueError) as exc:
        print(f"dickeqpt: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SelfCheckError as exc:
        if exc.rows is not None:
            _emit(render(exc.rows, exc.fields, args.format), args.output)
        print(f"dickeqpt: self-check failed: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    except (InvariantError, PhaseError, ConvergenceError) as exc:
        print(f"dickeqpt: internal invariant violated: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    _emit(render(rows, fields, args.format), args.output)
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
