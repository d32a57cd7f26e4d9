"""Batch front end: parse a JSON config, run one of the engines, emit
JSON reports, delimited scan data and companion figures.

Exit codes: 0 success, 2 configuration or validation error, 3 lattice
enumeration budget exceeded, 4 internal invariant violation (an engine
cross-check failed; never silently ignored).

Subcommands
    verdict   series report with a convergence/divergence verdict
    content   closed-form content of a rectangle, oracle cross-check
    transfer  solvability tests and dual-condition scans
    limsup    profile scan, radius selection, MC and content ratios
    baseline  classical volume- and dimension-series partial sums
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from datetime import datetime, timezone
from pathlib import Path

from .content_engine import (
    Hyperrectangle,
    gamma_via_cover,
    rect_content_closed,
    rect_content_oracle,
)
from .core_model import (
    ApproxFunction,
    DimensionFunction,
    IntegerVector,
    WeightVector,
)
from .errors import (
    BudgetError,
    ConfigError,
    ConstructionError,
    DirichletLabError,
    InvariantViolation,
)
from .limsup_lab import (
    LimsupParams,
    active_representatives,
    lambda_selection,
    mc_measure,
    phi_profile,
    qi_pair,
    rprime_exact_measure,
    rprime_region,
    scan_shell,
)
from .series_engine import (
    SeriesParams,
    dyadic_spread,
    gamma_u,
    jarnik_partial,
    khintchine_groshev_partial,
    lower_bound_onset,
    series_verdict,
)
from .transference_lab import (
    AffineSystem,
    cassels_backward_scan,
    dual_condition,
    is_dirichlet_at_t,
    transfer_constants,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_BUDGET = 3
EXIT_INVARIANT = 4

_DEFAULTS = {
    "r_max": 512,
    "samples": 20000,
    "seed": 0,
    "workers": 1,
    "t_values": [4.0, 8.0, 16.0],
    "c": 0.25,
    "t_scale": 1.0,
    "u_range": 10,
    "totient_a": 3.0,
    "qi_pairs": 20,
    "q_max": 1000,
}


def _load_config(path: str) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"config {path} is not valid JSON: line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    resolved = dict(_DEFAULTS)
    resolved.update(cfg)
    return resolved


def _need(cfg: dict, key: str):
    if key not in cfg:
        raise ConfigError(f"config field '{key}' is required for this subcommand")
    return cfg[key]


def _int_field(cfg: dict, key: str, minimum: int | None = None) -> int:
    value = _need(cfg, key)
    if not isinstance(value, int) or isinstance(value, bool):
        raise ConfigError(f"config field '{key}' must be an integer")
    if minimum is not None and value < minimum:
        raise ConfigError(f"config field '{key}' must be >= {minimum}")
    return value


def _float_list(cfg: dict, key: str) -> list[float]:
    value = _need(cfg, key)
    if not isinstance(value, list) or not all(isinstance(x, (int, float)) for x in value):
        raise ConfigError(f"config field '{key}' must be a list of numbers")
    return [float(x) for x in value]


def _build_psi(cfg: dict) -> ApproxFunction:
    spec = _need(cfg, "psi")
    if not isinstance(spec, dict) or "family" not in spec:
        raise ConfigError("config field 'psi' must be an object with a 'family'")
    try:
        return ApproxFunction(
            family=spec["family"],
            c=float(spec.get("c", 1.0)),
            sigma=float(spec.get("sigma", 1.0)),
            rho=float(spec.get("rho", 0.0)),
            t0=float(spec.get("t0", 2.0)),
        )
    except DirichletLabError as exc:
        raise ConfigError(f"config field 'psi': {exc}") from exc


def _build_f(cfg: dict, ambient: int) -> DimensionFunction:
    spec = _need(cfg, "f")
    if not isinstance(spec, dict) or "family" not in spec:
        raise ConfigError("config field 'f' must be an object with a 'family'")
    try:
        return DimensionFunction(
            family=spec["family"],
            s=float(spec.get("s", 1.0)),
            tau=float(spec.get("tau", 0.0)),
            ambient=ambient,
        )
    except DirichletLabError as exc:
        raise ConfigError(f"config field 'f': {exc}") from exc


def _build_weights(cfg: dict) -> tuple[WeightVector, WeightVector]:
    m = _int_field(cfg, "m", 1)
    n = _int_field(cfg, "n", 1)
    alpha_list = _float_list(cfg, "alpha")
    beta_list = _float_list(cfg, "beta")
    if len(alpha_list) != m:
        raise ConfigError(f"config field 'alpha' must have length m = {m}")
    if len(beta_list) != n:
        raise ConfigError(f"config field 'beta' must have length n = {n}")
    try:
        return WeightVector.alpha(alpha_list), WeightVector.beta(beta_list)
    except DirichletLabError as exc:
        raise ConfigError(str(exc)) from exc


def _check_seed_field(cfg: dict) -> int:
    seed = _int_field(cfg, "seed", 0)
    if seed >= 2 ** 64:
        raise ConfigError("config field 'seed' must fit in 64 bits")
    return seed


def _timestamp() -> str:
    return datetime.now(timezone.utc).isoformat()


def _write_json(path: Path, document: dict) -> None:
    path.write_text(json.dumps(document, sort_keys=True, indent=2) + "\n",
                    encoding="utf-8")


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _document(cfg: dict, subcommand: str, report: dict, extra: dict | None = None) -> dict:
    doc = {
        "subcommand": subcommand,
        "generated_at": _timestamp(),
        "config": cfg,
        "report": report,
    }
    if extra:
        doc.update(extra)
    return doc


# ---------------------------------------------------------------------------
# subcommands


def _run_verdict(cfg: dict, out: Path, figures: bool) -> int:
    alpha, beta = _build_weights(cfg)
    psi = _build_psi(cfg)
    f = _build_f(cfg, alpha.dim * beta.dim)
    params = SeriesParams(psi, alpha, beta, f)
    r_max = _int_field(cfg, "r_max", 1)
    report = series_verdict(params, r_max)

    # independent-path cross-check on a few vectors
    for r in (1, max(2, r_max // 2), r_max):
        u = IntegerVector((r,) + (0,) * (alpha.dim - 1))
        direct = gamma_u(psi, alpha, beta, f, u).gamma
        cover = gamma_via_cover(u, psi, alpha, beta, f)
        if abs(direct - cover) > 1e-9 * max(direct, cover):
            raise InvariantViolation(
                f"series weight mismatch at |u| = {r}: {direct} vs {cover}"
            )

    onset_cap = min(r_max, 256)
    doc = _document(cfg, "verdict", {
        "shell_sums": {str(r): v for r, v in sorted(report.shell_sums.items())},
        "dyadic_sums": {str(l): v for l, v in sorted(report.dyadic_sums.items())},
        "partial_total": report.partial_total,
        "tail_exponent_fit": report.tail_exponent_fit,
        "verdict": report.verdict,
    }, extra={"diagnostics": {
        "lower_bound_onset": lower_bound_onset(params, onset_cap),
        "dyadic_spread": dyadic_spread(report),
    }})
    _write_json(out / "verdict_report.json", doc)
    rows = [[r, report.shell_sums[r]] for r in sorted(report.shell_sums)]
    _write_csv(out / "verdict_shells.csv", ["r", "shell_sum"], rows)
    if figures:
        from . import figures as figmod
        figmod.render_verdict_figure(report, out / "verdict_shells.png")
    return EXIT_OK


def _run_content(cfg: dict, out: Path, figures: bool) -> int:
    sides = _float_list(cfg, "rectangle")
    try:
        rect = Hyperrectangle.from_sides(sides)
    except DirichletLabError as exc:
        raise ConfigError(f"config field 'rectangle': {exc}") from exc
    f = _build_f(cfg, rect.dim)
    closed = rect_content_closed(f, rect)
    diagnostics: dict = {}
    if rect.dim <= 3:
        oracle = rect_content_oracle(f, rect)
        ratio = oracle.value / closed.value
        if not (1.0 - 1e-12 <= ratio <= 4.0 ** rect.dim):
            raise InvariantViolation(
                f"cover oracle ratio {ratio} outside [1, 4**{rect.dim}]"
            )
        diagnostics["oracle"] = {
            "value": oracle.value,
            "argmin_index": oracle.argmin_index,
            "method": oracle.method,
            "ratio_to_closed": ratio,
        }
    doc = _document(cfg, "content", {
        "value": closed.value,
        "argmin_index": closed.argmin_index,
        "method": closed.method,
    }, extra={"diagnostics": diagnostics})
    _write_json(out / "content_report.json", doc)
    return EXIT_OK


def _run_transfer(cfg: dict, out: Path, figures: bool) -> int:
    alpha, beta = _build_weights(cfg)
    psi = _build_psi(cfg)
    b = _float_list(cfg, "b")
    matrix = _need(cfg, "matrix")
    if not isinstance(matrix, list):
        raise ConfigError("config field 'matrix' must be a list of rows")
    try:
        system = AffineSystem(tuple(tuple(float(x) for x in row) for row in matrix),
                              tuple(b), alpha, beta)
        constants = transfer_constants(psi, alpha, beta, b)
    except DirichletLabError as exc:
        if isinstance(exc, BudgetError):
            raise
        raise ConfigError(str(exc)) from exc

    t_values = [float(t) for t in cfg["t_values"]]
    dirichlet = []
    for t in t_values:
        ok, witness = is_dirichlet_at_t(system, psi, t)
        dirichlet.append({
            "t": t,
            "solvable": ok,
            "witness": list(witness.entries) if witness else None,
        })

    m, n = alpha.dim, beta.dim
    dual_c = float(math.factorial(m + n)) ** 2
    dual_scale = 2.0 ** (-constants.tau_const)
    u_range = _int_field(cfg, "u_range", 1)
    hits = []
    total_hits = 0
    from .core_model import shell as shell_iter
    for r in range(1, u_range + 1):
        for u in shell_iter(m, r):
            if dual_condition(system, psi, u, dual_c, dual_scale):
                total_hits += 1
                if len(hits) < 50:
                    hits.append(list(u.entries))
    holds, counter = cassels_backward_scan(system, float(cfg["c"]),
                                           max(t_values), u_range)
    doc = _document(cfg, "transfer", {
        "constants": {
            "eps_b": constants.eps_b,
            "c_b": constants.c_b,
            "tau_const": constants.tau_const,
            "c_tilde": constants.c_tilde,
            "lambda": constants.lam,
        },
        "dirichlet_tests": dirichlet,
        "dual_scan": {
            "c": dual_c,
            "t_scale": dual_scale,
            "u_range": u_range,
            "hit_count": total_hits,
            "hits": hits,
        },
        "backward_hypothesis": {
            "holds_on_range": holds,
            "range_limited": True,
            "counterexample": list(counter.entries) if counter else None,
        },
    })
    _write_json(out / "transfer_report.json", doc)
    return EXIT_OK


def _run_limsup(cfg: dict, out: Path, figures: bool) -> int:
    alpha, beta = _build_weights(cfg)
    psi = _build_psi(cfg)
    f = _build_f(cfg, alpha.dim * beta.dim)
    b = _float_list(cfg, "b")
    try:
        params = LimsupParams.build(psi, alpha, beta, f, b)
    except DirichletLabError as exc:
        raise ConfigError(str(exc)) from exc
    r_max = _int_field(cfg, "r_max", 1)
    samples = _int_field(cfg, "samples", 1)
    seed = _check_seed_field(cfg)
    workers = _int_field(cfg, "workers", 1)

    stats = []
    for r in range(1, r_max + 1):
        st = scan_shell(params, r, content=True)
        if st.active_count and st.max_product_dev > 1e-9:
            raise InvariantViolation(
                f"profile product identity violated at r = {r}: dev {st.max_product_dev}"
            )
        if not (st.chain_ok and st.sandwich_ok):
            raise InvariantViolation(f"profile ordering violated at r = {r}")
        stats.append(st)

    lam_status = "ok"
    members: tuple[int, ...] = ()
    lam_info: dict = {}
    try:
        sel = lambda_selection(params, r_max, float(cfg["totient_a"]))
        members = sel.members
        lam_info = {
            "density": sel.density,
            "totient_a": sel.totient_a,
            "totient_density": sel.totient_density,
            "phi_sum": sel.phi_sum,
            "series_partial": sel.series_partial,
            "ratio": sel.ratio,
        }
    except ConstructionError as exc:
        lam_status = "empty"
        lam_info = {"error": str(exc)}
    member_set = set(members)

    # quasi-independence pairs: within-shell when possible, otherwise
    # against the previous selected radius
    qi_by_r: dict[int, float] = {}
    qi_max = 0.0
    qi_budget = _int_field(cfg, "qi_pairs", 0)
    prev_rep = None
    pairs_done = 0
    for r in members:
        if pairs_done >= qi_budget:
            break
        reps = active_representatives(params, r, 2)
        pair = None
        if len(reps) >= 2:
            pair = (reps[0], reps[1])
        elif reps and prev_rep is not None:
            pair = (reps[0], prev_rep)
        if reps:
            prev_rep = reps[0]
        if pair is None:
            continue
        p1, p2 = phi_profile(pair[0], params), phi_profile(pair[1], params)
        if not (p1.active and p2.active and p1.k and p2.k):
            continue
        if max(p1.phi) >= 0.5 or max(p2.phi) >= 0.5:
            continue
        rec = qi_pair(pair[0], p1.phi, pair[1], p2.phi, samples,
                      (seed + 7919 * r) % 2 ** 64, workers)
        pairs_done += 1
        if rec.measure1 > 0 and rec.measure2 > 0:
            qi_by_r[r] = rec.ratio
            qi_max = max(qi_max, rec.ratio)

    # Monte Carlo spot check on the first usable profile
    mc_check = None
    for r in members or range(1, r_max + 1):
        reps = active_representatives(params, r, 1)
        if not reps:
            continue
        prof = phi_profile(reps[0], params)
        if not prof.active or not prof.k or max(prof.phi) >= 0.5:
            continue
        est = mc_measure(rprime_region(reps[0], prof.phi),
                         params.m * params.n, samples, seed, workers)
        mc_check = {
            "u": list(reps[0].entries),
            "mc_mean": est.mean,
            "mc_stderr": est.stderr,
            "samples": est.samples,
        }
        if params.m == 1:
            exact = rprime_exact_measure(reps[0], prof.phi)
            mc_check["exact"] = exact
            if abs(est.mean - exact) > max(4.0 * est.stderr, 1e-12):
                raise InvariantViolation(
                    f"MC estimate {est.mean} disagrees with exact measure {exact}"
                )
        break

    rows = []
    content_ratios = [s.min_content_ratio for s in stats
                      if not math.isnan(s.min_content_ratio)]
    for st in stats:
        rows.append({
            "r": st.r,
            "shell_sum": st.shell_sum,
            "lambda_member": 1 if st.r in member_set else 0,
            "min_content_ratio": st.min_content_ratio,
            "qi_ratio_max": qi_by_r.get(st.r, math.nan),
        })
    csv_rows = [[row["r"], row["shell_sum"], row["lambda_member"],
                 row["min_content_ratio"], row["qi_ratio_max"]] for row in rows]
    _write_csv(out / "limsup_scan.csv",
               ["r", "shell_sum", "lambda_member", "min_content_ratio", "qi_ratio_max"],
               csv_rows)

    doc = _document(cfg, "limsup", {
        "r_max": r_max,
        "active_vectors": sum(s.active_count for s in stats),
        "no_ladder_index": sum(s.no_k_count for s in stats),
        "clamped_vectors": sum(s.clamped_count for s in stats),
        "max_product_dev": max((s.max_product_dev for s in stats), default=0.0),
        "min_content_ratio": min(content_ratios) if content_ratios else None,
        "lambda_status": lam_status,
        "lambda_members": list(members),
        "lambda": lam_info,
        "qi_max_ratio": qi_max,
        "mc_check": mc_check,
    })
    _write_json(out / "limsup_report.json", doc)
    if figures:
        from . import figures as figmod
        figmod.render_limsup_figure(rows, out / "limsup_scan.png")
    return EXIT_OK


def _run_baseline(cfg: dict, out: Path, figures: bool) -> int:
    m = _int_field(cfg, "m", 1)
    n = _int_field(cfg, "n", 1)
    psi = _build_psi(cfg)
    q_max = _int_field(cfg, "q_max", 1)
    f = None
    if "f" in cfg:
        f = _build_f(cfg, m * n)
    qs = []
    q = 1
    while q < q_max:
        qs.append(q)
        q *= 2
    qs.append(q_max)
    rows = []
    for q in qs:
        row = {"Q": q, "kg_partial": khintchine_groshev_partial(psi, m, n, q)}
        if f is not None:
            row["jarnik_partial"] = jarnik_partial(psi, f, m, n, q)
        else:
            row["jarnik_partial"] = math.nan
        rows.append(row)
    _write_csv(out / "baseline_partials.csv",
               ["Q", "kg_partial", "jarnik_partial"],
               [[r["Q"], r["kg_partial"], r["jarnik_partial"]] for r in rows])
    doc = _document(cfg, "baseline", {
        "q_max": q_max,
        "kg_partial": rows[-1]["kg_partial"],
        "jarnik_partial": rows[-1]["jarnik_partial"],
    })
    _write_json(out / "baseline_report.json", doc)
    if figures:
        from . import figures as figmod
        figmod.render_baseline_figure(rows, out / "baseline_partials.png")
    return EXIT_OK


_RUNNERS = {
    "verdict": _run_verdict,
    "content": _run_content,
    "transfer": _run_transfer,
    "limsup": _run_limsup,
    "baseline": _run_baseline,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dirichlet-lab",
        description="batch tests for the weighted inhomogeneous "
                    "non-improvability criterion",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in _RUNNERS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="path to a JSON config")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--workers", type=int, default=None,
                       help="worker pool size (results are worker-independent)")
        p.add_argument("--seed", type=int, default=None,
                       help="override the config seed")
        p.add_argument("--no-figures", action="store_true",
                       help="skip PNG rendering next to the data files")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _load_config(args.config)
        if args.seed is not None:
            cfg["seed"] = args.seed
        if args.workers is not None:
            cfg["workers"] = args.workers
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        return _RUNNERS[args.subcommand](cfg, out, not args.no_figures)
    except BudgetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except InvariantViolation as exc:
        print(f"internal invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except DirichletLabError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
