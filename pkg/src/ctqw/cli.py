"""Command-line entry point.

Subcommands: gen, spectrum, walk, pst, pgst, quotient, scheme, um-scan,
avgmix.  Every analysis prints a JSON report to stdout (sorted keys, so runs
diff cleanly); matrices go inline or to CSV files under ``--out``.  Exit
codes: 0 analysis completed (whatever the mathematical verdict), 1 usage
error, 2 input format error, 3 internal consistency failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
from fractions import Fraction

import numpy as np

from . import __version__
from . import avgmix as avgmix_mod
from . import graphs as graphs_mod
from . import scheme as scheme_mod
from . import transfer as transfer_mod
from . import walk as walk_mod
from .quotient import INVARIANCE_TOL, is_equitable, lift_pst, parse_partition
from .quotient import quotient as quotient_op
from .errors import ConsistencyError, FormatError, NotApplicableError
from .spectral import decompose

TOL_ENV_VAR = "CTQW_TOL"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _default_tol(fallback: float) -> float:
    raw = os.environ.get(TOL_ENV_VAR)
    if raw is None:
        return fallback
    try:
        value = float(raw)
    except ValueError:
        raise UsageError(f"{TOL_ENV_VAR} must be a float, got {raw!r}") from None
    if value <= 0:
        raise UsageError(f"{TOL_ENV_VAR} must be positive")
    return value


def annotate_time(t: float) -> dict:
    """12-significant-digit display plus a symbolic tag for landmark times.

    Times within 1e-9 of pi*p/q (|p|, q <= 64) or pi/sqrt(k) (k <= 64) get a
    symbolic annotation; these cover every landmark time this toolkit
    produces.
    """
    symbolic = None
    for q in range(1, 65):
        p = round(t * q / math.pi)
        if abs(p) <= 64 and abs(t - math.pi * p / q) <= 1e-9:
            frac = Fraction(p, q)
            p, q = frac.numerator, frac.denominator
            if p == 0:
                symbolic = "0"
            elif q == 1:
                symbolic = "pi" if p == 1 else f"{p}*pi"
            elif p == 1:
                symbolic = f"pi/{q}"
            else:
                symbolic = f"{p}*pi/{q}"
            break
    if symbolic is None:
        for k in range(2, 65):
            if abs(t - math.pi / math.sqrt(k)) <= 1e-9:
                symbolic = f"pi/sqrt({k})"
                break
    return {"value": float(t), "display": f"{t:.12g}", "symbolic": symbolic}


def _phase_json(z: complex) -> dict:
    return {"re": float(z.real), "im": float(z.imag), "display": f"{z:.12g}"}


def _matrix_list(m: np.ndarray) -> list:
    return [[float(x) for x in row] for row in np.asarray(m)]


def _write_csv(path: str, m: np.ndarray) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for row in np.asarray(m):
            fh.write(",".join(repr(float(x)) for x in row) + "\n")


def _emit_matrix(payload: dict, key: str, m: np.ndarray, out: str | None) -> None:
    """Inline a real matrix, or write CSV(s) and reference the path."""
    if out is None:
        payload[key] = _matrix_list(m)
    else:
        path = f"{out}.{key}.csv"
        _write_csv(path, m)
        payload[key] = {"csv": path}


def _emit_complex_matrix(payload: dict, key: str, m: np.ndarray, out: str | None) -> None:
    if out is None:
        payload[key] = {"re": _matrix_list(m.real), "im": _matrix_list(m.imag)}
    else:
        re_path = f"{out}.{key}.re.csv"
        im_path = f"{out}.{key}.im.csv"
        _write_csv(re_path, m.real)
        _write_csv(im_path, m.imag)
        payload[key] = {"re_csv": re_path, "im_csv": im_path}


def _load_input(args) -> tuple[graphs_mod.Graph, str]:
    """Resolve --graph/--family into a graph and a stable content digest."""
    if getattr(args, "graph", None) and getattr(args, "family", None):
        raise UsageError("give either --graph or --family, not both")
    if getattr(args, "graph", None):
        try:
            with open(args.graph, "rb") as fh:
                blob = fh.read()
        except OSError as exc:
            raise FormatError(f"cannot read graph file: {exc}") from None
        graph = graphs_mod.parse_edge_list(blob.decode("utf-8"))
        return graph, hashlib.sha256(blob).hexdigest()
    if getattr(args, "family", None):
        graph = graphs_mod.build_family(args.family)
        return graph, hashlib.sha256(args.family.encode("utf-8")).hexdigest()
    raise UsageError("an input graph is required: --graph FILE or --family NAME:SIZE")


def _parse_pair(raw: str, n: int) -> tuple[int, int]:
    try:
        u, v = (int(x) for x in raw.split(","))
    except ValueError:
        raise UsageError(f"--pair must be 'u,v', got {raw!r}") from None
    for x in (u, v):
        if not 0 <= x < n:
            raise FormatError(f"vertex {x} out of range for n={n}")
    return u, v


def _pst_payload(result: transfer_mod.PSTResult) -> dict:
    payload = {
        "occurs": result.occurs,
        "status": result.status,
        "certified": result.certified,
        "reason": result.reason,
        "residual": result.residual,
        "fidelity": result.fidelity,
    }
    payload["time"] = annotate_time(result.time) if result.time is not None else None
    payload["phase"] = _phase_json(result.phase) if result.phase is not None else None
    if result.certificate is not None:
        payload["certificate"] = {
            "g": result.certificate.g,
            "support_eigenvalues": list(result.certificate.support_eigenvalues),
            "parities": list(result.certificate.parities),
        }
    else:
        payload["certificate"] = "numeric-only" if result.certified == "numeric" else None
    return payload


# ---------------------------------------------------------------------------
# subcommand handlers (each returns a payload dict)


def _cmd_gen(args) -> int:
    graph = graphs_mod.build_family(args.family)
    text = graphs_mod.format_edge_list(graph)
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    return 0


def _cmd_spectrum(args, graph, payload):
    dec = decompose(graph, cluster_tol=args.cluster_tol)
    payload["eigenvalues"] = [float(x) for x in dec.eigenvalues]
    payload["multiplicities"] = [int(x) for x in dec.multiplicities]
    payload["integer_spectrum"] = dec.integer_spectrum
    payload["tolerances"] = {"cluster_tol": dec.cluster_tol, "integer_tol": 1e-8}
    if args.out:
        path = f"{args.out}.spectrum.csv"
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("eigenvalue,multiplicity\n")
            for theta, m in zip(dec.eigenvalues, dec.multiplicities):
                fh.write(f"{theta!r},{m}\n")
        payload["spectrum_csv"] = path
    if args.idempotents:
        paths = []
        for r in range(dec.d + 1):
            path = f"{args.idempotents}.E{r}.csv"
            _write_csv(path, dec.idempotents[r])
            paths.append(path)
        payload["idempotent_csvs"] = paths


def _cmd_walk(args, graph, payload):
    dec = decompose(graph)
    payload["time"] = annotate_time(args.time)
    if args.matrix == "U":
        u = walk_mod.transition(dec, args.time).matrix
        _emit_complex_matrix(payload, "U", u, args.out)
        dev = float(np.max(np.abs(u @ u.conj().T - np.eye(dec.n))))
        payload["unitarity_deviation"] = dev
        payload["tolerances"] = {"unitarity": 1e-9 * dec.n}
    else:
        m = walk_mod.mixing(dec, args.time).matrix
        _emit_matrix(payload, "M", m, args.out)
        payload["row_sum_deviation"] = float(np.max(np.abs(m.sum(axis=1) - 1)))
        payload["tolerances"] = {"double_stochasticity": 1e-9}


def _cmd_pst(args, graph, payload):
    dec = decompose(graph)
    u, v = _parse_pair(args.pair, graph.n)
    sc = transfer_mod.strong_cospectral(dec, u, v)
    payload["pair"] = [u, v]
    payload["cospectral"] = sc.cospectral
    payload["strongly_cospectral"] = sc.strongly_cospectral
    payload["sigmas"] = [s if s is None else int(s) for s in sc.sigmas]
    payload["support"] = sorted(sc.support)
    result = transfer_mod.detect_pst(dec, u, v, horizon=args.horizon)
    payload["pst"] = _pst_payload(result)
    if result.occurs:
        bounds = transfer_mod.check_bounds(graph, result, dec, u)
        payload["bounds"] = {
            "diameter": bounds.diameter,
            "edge_count": bounds.edge_count,
            "diameter_bound_ok": bounds.diameter_bound_ok,
            "time_bound_ok": bounds.time_bound_ok,
            "min_support_gap": bounds.min_support_gap,
            "gap_bound_ok": bounds.gap_bound_ok,
        }
    payload["tolerances"] = {
        "pst_residual": transfer_mod.PST_RESIDUAL_TOL,
        "inconclusive_ceiling": transfer_mod.INCONCLUSIVE_CEILING,
        "cospectral": transfer_mod.COSPECTRAL_TOL,
        "parallel": transfer_mod.PARALLEL_TOL,
    }


def _cmd_pgst(args, graph, payload):
    dec = decompose(graph)
    u, v = _parse_pair(args.pair, graph.n)
    res = transfer_mod.pgst_scan(dec, u, v, horizon=args.horizon, step=args.step)
    payload["pair"] = [u, v]
    payload["best_time"] = annotate_time(res.best_time)
    payload["best_fidelity"] = res.best_fidelity
    payload["records"] = [[t, f] for t, f in res.records]
    payload["horizon"] = res.horizon
    payload["step"] = res.step
    payload["tolerances"] = {"grid_step": res.step}


def _cmd_quotient(args, graph, payload):
    try:
        with open(args.partition, "r", encoding="utf-8") as fh:
            part = parse_partition(fh.read(), graph.n)
    except OSError as exc:
        raise FormatError(f"cannot read partition file: {exc}") from None
    eq = is_equitable(graph, part)
    payload["blocks"] = [list(b) for b in part.blocks]
    payload["weights"] = [str(w) for w in part.vertex_weights]
    payload["equitable"] = eq.equitable
    if eq.witness:
        payload["witness"] = list(eq.witness)
    q = quotient_op(graph, part)
    _emit_matrix(payload, "B", q.matrix, args.out)
    payload["residual"] = q.residual
    payload["tolerances"] = {"invariance_residual": INVARIANCE_TOL}
    if args.lift:
        u, v = _parse_pair(args.lift, graph.n)
        blocks = {x: i for i, b in enumerate(part.blocks) for x in b}
        try:
            result = lift_pst(graph, part, blocks[u], blocks[v])
            payload["lift"] = _pst_payload(result)
        except NotApplicableError as exc:
            payload["lift"] = {"applicable": False, "reason": str(exc)}


def _cmd_scheme(args, graph, payload):
    try:
        sch = scheme_mod.scheme_from_drg(graph)
    except NotApplicableError as exc:
        payload["distance_regular"] = False
        payload["reason"] = str(exc)
        return
    payload["distance_regular"] = True
    payload["classes"] = sch.d
    payload["eigenvalues"] = [float(x) for x in sch.eigenvalues]
    payload["multiplicities"] = [int(x) for x in sch.multiplicities]
    payload["tolerances"] = {"pq_identity": scheme_mod.PQ_TOL}
    if args.pq:
        payload["P"] = _matrix_list(sch.P)
        payload["Q"] = _matrix_list(sch.Q)
    if args.mix_eigs is not None:
        lam = scheme_mod.mixing_eigenvalues(sch, args.mix_eigs)
        payload["mixing_eigenvalues"] = {
            "time": annotate_time(args.mix_eigs),
            "values": [float(x) for x in lam.values],
            "uniform": scheme_mod.uniform_mixing_test(sch, args.mix_eigs),
        }
    if args.um_scan:
        t_max, step = args.um_scan
        rep = scheme_mod.uniform_mixing_scan(
            sch.decomposition, t_max, step, tol=_default_tol(scheme_mod.UM_SCAN_TOL),
            threads=args.threads,
        )
        payload["um_scan"] = _um_report(rep)
    if args.roots:
        tau, max_order = args.roots
        rep = scheme_mod.roots_of_unity_probe(sch.decomposition, tau, int(max_order))
        payload["roots_of_unity"] = {
            "tau": annotate_time(tau),
            "max_order": int(max_order),
            "all_near_roots": rep.all_near_roots,
            "entries": [list(e) for e in rep.entries],
        }


def _um_report(rep: scheme_mod.UniformMixingReport) -> dict:
    return {
        "t_max": rep.t_max,
        "step": rep.step,
        "best_time": annotate_time(rep.best_time),
        "deviation": rep.deviation,
        "verdict": rep.verdict,
        "tolerance": rep.tol,
    }


def _cmd_um_scan(args, graph, payload):
    dec = decompose(graph)
    rep = scheme_mod.uniform_mixing_scan(
        dec, args.tmax, args.step, tol=_default_tol(scheme_mod.UM_SCAN_TOL),
        threads=args.threads,
    )
    payload.update(_um_report(rep))


def _cmd_avgmix(args, graph, payload):
    dec = decompose(graph)
    analysis = avgmix_mod.average_mixing(dec)
    _emit_matrix(payload, "average_mixing", analysis.matrix, args.out)
    payload["rank"] = analysis.rank
    payload["trace"] = analysis.trace
    payload["psd_certified"] = analysis.psd_certified
    payload["singular_values"] = [float(x) for x in analysis.singular_values]
    payload["rank_threshold"] = analysis.rank_threshold
    payload["tolerances"] = {"rank_eps": avgmix_mod.RANK_EPS, "psd": avgmix_mod.PSD_TOL}
    if args.interval is not None:
        avg = avgmix_mod.interval_average(dec, args.interval)
        _emit_matrix(payload, "interval_average", avg, args.out)
        payload["interval_T"] = args.interval
    if args.dist:
        spec = _parse_dist(args.dist)
        da = avgmix_mod.distribution_average(dec, spec)
        _emit_matrix(payload, "distribution_average", da.matrix, args.out)
        payload["distribution"] = {"spec": args.dist, "rank": da.rank, "trace": da.trace}
        if da.mc_standard_error is not None:
            payload["distribution"]["mc_standard_error"] = da.mc_standard_error
    if args.cp:
        try:
            cp = avgmix_mod.cp_factorize(dec)
            payload["cp"] = {
                "applicable": True,
                "residual": cp.residual,
                "cp_rank_bound": cp.cp_rank_bound,
                "nonneg_rank_bound": cp.nonneg_rank_bound,
                "factors": [[float(x) for x in f] for f in cp.vectors],
            }
        except NotApplicableError as exc:
            payload["cp"] = {"applicable": False, "reason": str(exc)}
    if args.rank:
        probe = avgmix_mod.drg_rank_probe(graph)
        payload["rank_probe"] = {
            "distance_regular": probe.distance_regular,
            "is_primitive_drg": probe.is_primitive_drg,
            "rank": probe.rank,
            "equals_n": probe.equals_n,
        }


def _parse_dist(raw: str) -> avgmix_mod.DistributionSpec:
    name, _, argstr = raw.partition(":")
    try:
        params = [float(x) for x in argstr.split(",")] if argstr else []
    except ValueError:
        raise UsageError(f"bad distribution parameters in {raw!r}") from None
    try:
        if name == "point" and len(params) == 1:
            return avgmix_mod.DistributionSpec.point(params[0])
        if name == "uniform" and len(params) == 1:
            return avgmix_mod.DistributionSpec.uniform_interval(params[0])
        if name == "gaussian" and len(params) == 2:
            return avgmix_mod.DistributionSpec.gaussian(params[0], params[1])
        if name in ("exp", "exponential") and len(params) == 1:
            return avgmix_mod.DistributionSpec.exponential(params[0])
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    raise UsageError(
        f"unknown distribution {raw!r}; use point:tau | uniform:T | gaussian:mu,sigma | exp:rate"
    )


# ---------------------------------------------------------------------------


def _build_parser() -> _Parser:
    parser = _Parser(prog="ctqw", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_graph_opts(p, pair=False):
        p.add_argument("--graph", help="edge-list file")
        p.add_argument("--family", help="family descriptor, e.g. hypercube:4")
        p.add_argument("--out", help="path prefix for CSV matrix dumps")
        p.add_argument("--threads", type=int, default=os.cpu_count() or 1)
        p.add_argument("--json", action="store_true", help="JSON output (always on)")
        if pair:
            p.add_argument("--pair", required=True, help="vertex pair 'u,v'")

    p = sub.add_parser("gen", help="emit an edge list for a named family")
    p.add_argument("--family", required=True)
    p.add_argument("--out", default="-", help="output file, '-' for stdout")

    p = sub.add_parser("spectrum", help="distinct eigenvalues and idempotents")
    add_graph_opts(p)
    p.add_argument("--cluster-tol", type=float, default=None)
    p.add_argument("--idempotents", help="path prefix to dump idempotent CSVs")

    p = sub.add_parser("walk", help="evaluate U(t) or M(t)")
    add_graph_opts(p)
    p.add_argument("--time", type=float, required=True)
    p.add_argument("--matrix", choices=["U", "M"], default="U")

    p = sub.add_parser("pst", help="decide perfect state transfer for a pair")
    add_graph_opts(p, pair=True)
    p.add_argument("--horizon", type=float, default=None,
                   help="numeric search horizon (default pi/sqrt(2))")

    p = sub.add_parser("pgst", help="fidelity scan for a pair")
    add_graph_opts(p, pair=True)
    p.add_argument("--horizon", type=float, required=True)
    p.add_argument("--step", type=float, default=None)

    p = sub.add_parser("quotient", help="partition quotient and PST lifting")
    add_graph_opts(p)
    p.add_argument("--partition", required=True, help="partition file")
    p.add_argument("--lift", help="vertex pair 'u,v' in singleton blocks")

    p = sub.add_parser("scheme", help="association scheme of a distance-regular graph")
    add_graph_opts(p)
    p.add_argument("--pq", action="store_true", help="include the eigenmatrices P and Q")
    p.add_argument("--mix-eigs", type=float, default=None, metavar="T")
    p.add_argument("--um-scan", type=float, nargs=2, metavar=("TMAX", "STEP"))
    p.add_argument("--roots", type=float, nargs=2, metavar=("TAU", "N"))

    p = sub.add_parser("um-scan", help="scan for instantaneous uniform mixing")
    add_graph_opts(p)
    p.add_argument("--tmax", type=float, required=True)
    p.add_argument("--step", type=float, required=True)

    p = sub.add_parser("avgmix", help="average mixing matrix analyses")
    add_graph_opts(p)
    p.add_argument("--interval", type=float, default=None, metavar="T")
    p.add_argument("--dist", help="point:tau | uniform:T | gaussian:mu,sigma | exp:rate")
    p.add_argument("--cp", action="store_true", help="completely positive factorization")
    p.add_argument("--rank", action="store_true", help="distance-regular rank probe")
    return parser


_HANDLERS = {
    "spectrum": _cmd_spectrum,
    "walk": _cmd_walk,
    "pst": _cmd_pst,
    "pgst": _cmd_pgst,
    "quotient": _cmd_quotient,
    "scheme": _cmd_scheme,
    "um-scan": _cmd_um_scan,
    "avgmix": _cmd_avgmix,
}


def _fail(code: int, category: str, message: str) -> int:
    one_line = " ".join(str(message).split())
    sys.stderr.write(json.dumps({"error": category, "reason": one_line, "exit": code}) + "\n")
    return code


def run(argv: list[str]) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "gen":
            return _cmd_gen(args)
        graph, digest = _load_input(args)
        payload: dict = {}
        _HANDLERS[args.command](args, graph, payload)
        report = {
            "command": [args.command] + list(argv[1:]),
            "input_digest": digest,
            "version": __version__,
            "payload": payload,
            "warnings": [],
        }
        sys.stdout.write(json.dumps(report, sort_keys=True, indent=2) + "\n")
        return 0
    except UsageError as exc:
        return _fail(1, "usage", str(exc))
    except FormatError as exc:
        return _fail(2, "input-format", str(exc))
    except ConsistencyError as exc:
        return _fail(3, "internal-consistency", str(exc))


def main() -> int:
    return run(sys.argv[1:])


if __name__ == "__main__":
    sys.exit(main())
