"""Command-line front end.

Subcommands: ``analyze`` (classify a density-matrix file), ``sweep``
(noise thresholds and margin curves as CSV, optionally with figures),
``decompose`` (biseparability certificates for GHZ-diagonal inputs),
``decohere`` (relaxation survival analysis), ``soundness`` (Monte-Carlo
criterion checks) and ``fidelity`` (the fidelity form of the W test).

Exit codes: 0 analyzed/ok, 1 check failed, 2 unreadable or malformed input.
"""

import argparse
import csv
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

from . import criteria, decoherence, fileio, oracle
from .criteria import evaluate_criterion
from .decompose import GmeRefusal, decompose as run_decompose, verify_decomposition
from .filters import optimize_violation
from .qstate import EntcritError

PARSE_ERROR = 2
CHECK_FAILED = 1


@dataclass
class AnalysisReport:
    """Classification of one input state."""

    descriptor: str
    reports: list
    verdict: str
    ppt_note: str = ""
    certificate: dict | None = None

    def to_dict(self):
        out = {
            "input": self.descriptor,
            "criteria": [fileio.report_dict(r) for r in self.reports],
            "verdict": self.verdict,
        }
        if self.ppt_note:
            out["ppt"] = self.ppt_note
        if self.certificate is not None:
            out["certificate"] = self.certificate
        return out


def _split_criteria(selected):
    gme, fullsep = [], []
    for report in selected:
        cid = report.criterion_id.removeprefix("filtered-")
        if cid.startswith("derived:") or cid.split(":")[0] in criteria.GME_CRITERIA:
            gme.append(report)
        else:
            fullsep.append(report)
    return gme, fullsep


def analysis_verdict(reports, certificate_verified):
    gme, fullsep = _split_criteria(reports)
    if any(r.violated for r in gme):
        return "GME-certified"
    if certificate_verified:
        return "biseparable-certified"
    if any(r.violated for r in fullsep):
        return "not-fully-separable"
    return "undetected"


def cmd_analyze(args):
    doc = fileio.load_state_document(args.file)
    rho = doc.rho
    if args.criterion:
        ids = args.criterion.split(",")
    else:
        ids = list(criteria.applicable_criteria(rho.n_qubits))
    reports = [evaluate_criterion(cid, rho) for cid in ids]

    if args.filter_opt:
        for cid in ids:
            base = cid.split(":")[0]
            if not (cid.startswith("derived:") or base in criteria.GME_CRITERIA):
                continue
            _, filtered = optimize_violation(
                rho, cid, restarts=args.restarts, budget=args.budget,
                seed=args.seed)
            reports.append(replace(
                filtered, criterion_id=f"filtered-{filtered.criterion_id}"))

    certificate = None
    certificate_verified = False
    if doc.ghz_diagonal is not None:
        try:
            cert = run_decompose(doc.ghz_diagonal)
            certificate_verified, _ = verify_decomposition(rho, cert)
            if certificate_verified:
                certificate = fileio.certificate_dict(cert, True)
        except GmeRefusal:
            pass

    ppt_note = ""
    if rho.n_qubits <= 6:
        all_ok, results = oracle.ppt_all_bipartitions(rho)
        failing = [label for label, (ok, _) in results.items() if not ok]
        ppt_note = ("all bipartitions PPT" if all_ok
                    else f"negative partial transpose across {', '.join(failing)}")

    analysis = AnalysisReport(doc.descriptor, reports,
                              analysis_verdict(reports, certificate_verified),
                              ppt_note, certificate)
    for r in reports:
        flag = "VIOLATED" if r.violated else "ok"
        print(f"{r.criterion_id}: lhs={r.lhs:.9g} rhs={r.rhs:.9g} "
              f"margin={r.margin:.9g} [{flag}]")
    if ppt_note:
        print(f"ppt: {ppt_note}")
    print(f"verdict: {analysis.verdict}")
    if args.out:
        fileio.dump_json(analysis.to_dict(), args.out)
    return 0


def _parse_n_range(text):
    if ".." in text:
        lo, hi = text.split("..")
        return list(range(int(lo), int(hi) + 1))
    return [int(part) for part in text.split(",")]


def _sweep_rows(result):
    rows = []
    for p, report in zip(result.grid, result.reports):
        rows.append([result.n_qubits, float(p), report.lhs, report.rhs,
                     report.margin, report.violated])
    return rows


def _write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        writer.writerows(rows)


def fullsep_noise_boundary(n_qubits):
    """Known full-separability boundary of noisy GHZ states."""
    return 1.0 / (1.0 + 2.0 ** (1 - n_qubits))


def cmd_sweep(args):
    ns = _parse_n_range(args.n)
    results = []
    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(
                lambda n: oracle.sweep_noise_family(
                    args.family, n, args.criterion, args.tol, args.points), ns))
    else:
        results = [oracle.sweep_noise_family(args.family, n, args.criterion,
                                             args.tol, args.points) for n in ns]
    rows = []
    for result in results:
        rows.extend(_sweep_rows(result))
        line = (f"family={result.family_id} n={result.n_qubits} "
                f"criterion={result.criterion_id} threshold={result.threshold:.9f}")
        if args.family == "ghz-noise":
            line += f" fullsep-boundary={fullsep_noise_boundary(result.n_qubits):.9f}"
        print(line)
    if args.out:
        _write_csv(args.out, ["n", "p", "lhs", "rhs", "margin", "violated"], rows)
    if args.plot:
        from . import plotting
        if args.family == "ghz-noise" and len(results) > 1:
            plotting.save_ghz_threshold_figure(
                args.plot, [r.n_qubits for r in results],
                [r.threshold for r in results],
                [fullsep_noise_boundary(r.n_qubits) for r in results])
        else:
            for result in results:
                path = args.plot
                if len(results) > 1:
                    stem, dot, ext = args.plot.rpartition(".")
                    path = f"{stem}_n{result.n_qubits}{dot}{ext}" if dot else \
                        f"{args.plot}_n{result.n_qubits}"
                plotting.save_margin_curve_figure(path, result)
    return 0


def cmd_decompose(args):
    doc = fileio.load_state_document(args.file)
    if doc.ghz_diagonal is None:
        raise EntcritError("decompose needs the compact ghz_diagonal input form")
    try:
        cert = run_decompose(doc.ghz_diagonal)
    except GmeRefusal as refusal:
        print(f"verdict: GME (margin {refusal.report.margin:.9g}); "
              f"no biseparable decomposition exists")
        if args.out:
            fileio.dump_json({"verdict": "GME",
                              "report": fileio.report_dict(refusal.report)},
                             args.out)
        return 0
    ok, problems = verify_decomposition(doc.rho, cert)
    if not ok:
        print("internal error: certificate failed verification", file=sys.stderr)
        for problem in problems:
            print(f"  {problem}", file=sys.stderr)
        return CHECK_FAILED
    document = fileio.certificate_dict(cert, True)
    print(f"verdict: biseparable; certificate with {len(cert.terms)} terms "
          f"(verified, reconstruction within 1e-10 * trace)")
    text = fileio.dump_json(document, args.out)
    if not args.out:
        print(text)
    return 0


def cmd_decohere(args):
    analytic = decoherence.gme_survival_threshold(args.n, args.gamma)
    tmax = args.tmax if args.tmax is not None else (
        2.0 * analytic if analytic != float("inf") else 4.0 / args.gamma)
    rows = []
    for i in range(args.points):
        t = tmax * i / (args.points - 1) if args.points > 1 else 0.0
        x = math.exp(-args.gamma * t)
        state = decoherence.relaxed_ghz_shells(args.n, x)
        if x < 1.0:
            state = decoherence.apply_balance_filter(state, x)
        report = criteria.ghzN_biseparability(state)
        rows.append([t, x, report.lhs, report.rhs, report.margin, report.violated])
    print(f"analytic threshold t* = {analytic:.9g}")
    if analytic != float("inf"):
        numeric = decoherence.gme_survival_numeric(args.n, args.gamma, args.tol)
        print(f"numeric threshold  t* = {numeric:.9g}")
    if args.out:
        _write_csv(args.out, ["t", "x", "lhs", "rhs", "margin", "gme"], rows)
    if args.plot:
        from . import plotting
        plotting.save_decoherence_figure(args.plot, rows, analytic, args.n,
                                         args.gamma)
    return 0


def cmd_soundness(args):
    ids = (list(criteria.criterion_ids()) if args.criterion == "all"
           else args.criterion.split(","))
    rows = []
    failed = False
    for cid in ids:
        n = args.n
        try:
            report = oracle.soundness_sweep(cid, n, args.samples, args.seed)
        except EntcritError as err:
            print(f"{cid}: skipped ({err})")
            continue
        rows.append([report.criterion_id, report.n_qubits, report.samples,
                     report.max_margin, report.passed])
        status = "pass" if report.passed else "FAIL"
        print(f"{cid}: n={n} samples={report.samples} "
              f"max_margin={report.max_margin:.3e} [{status}]")
        if not report.passed:
            failed = True
            print(f"  reproduce with seed={report.seed}, "
                  f"sample indices {report.failures[:10]}")
    if args.out:
        _write_csv(args.out, ["criterion", "n", "samples", "max_margin", "passed"],
                   rows)
    return CHECK_FAILED if failed else 0


def cmd_fidelity(args):
    diagonals = [float(v) for v in args.diagonals.split(",")]
    report = criteria.w3_fidelity_form(args.fidelity, diagonals)
    flag = "VIOLATED (genuine tripartite entanglement)" if report.violated else "ok"
    print(f"{report.criterion_id}: lhs={report.lhs:.9g} rhs={report.rhs:.9g} "
          f"margin={report.margin:.9g} [{flag}]")
    if args.out:
        fileio.dump_json(fileio.report_dict(report), args.out)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="entcrit",
        description="Classify multiqubit states by entanglement class "
                    "directly from density-matrix elements.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="run criteria on a state file")
    p.add_argument("file")
    p.add_argument("--criterion", help="comma-separated criterion ids "
                                       "(default: all applicable)")
    p.add_argument("--filter-opt", action="store_true",
                   help="also maximize violations over local filters")
    p.add_argument("--restarts", type=int, default=20)
    p.add_argument("--budget", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write the analysis as JSON")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("sweep", help="noise thresholds for a state family")
    p.add_argument("--family", required=True,
                   choices=["ghz-noise", "w-noise", "dicke-noise"])
    p.add_argument("--n", required=True, help="qubit count, list or range (3..8)")
    p.add_argument("--criterion")
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--points", type=int, default=41)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", help="CSV path (columns n,p,lhs,rhs,margin,violated)")
    p.add_argument("--plot", help="render a figure to this path")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("decompose",
                       help="biseparability certificate for a GHZ-diagonal state")
    p.add_argument("file")
    p.add_argument("--out", help="write the certificate as JSON")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("decohere", help="GME survival under relaxation")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--tmax", type=float)
    p.add_argument("--points", type=int, default=101)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--out", help="CSV path (columns t,x,lhs,rhs,margin,gme)")
    p.add_argument("--plot", help="render a figure to this path")
    p.set_defaults(func=cmd_decohere)

    p = sub.add_parser("soundness", help="Monte-Carlo criterion soundness check")
    p.add_argument("--criterion", default="all")
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="CSV summary path")
    p.set_defaults(func=cmd_soundness)

    p = sub.add_parser("fidelity", help="W-state test from fidelity and populations")
    p.add_argument("--fidelity", type=float, required=True)
    p.add_argument("--diagonals", required=True,
                   help="eight comma-separated populations")
    p.add_argument("--out", help="write the report as JSON")
    p.set_defaults(func=cmd_fidelity)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except EntcritError as err:
        print(f"error: {err}", file=sys.stderr)
        return PARSE_ERROR


if __name__ == "__main__":
    sys.exit(main())
