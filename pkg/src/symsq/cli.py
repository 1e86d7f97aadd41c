"""Command-line interface.

Every operation is exposed as a subcommand printing CSV (header row) to
stdout, or JSON with --json.  Output is byte-deterministic for fixed inputs.
Exit codes: 0 success, 1 domain/validation/usage errors, 2 internal faults.
"""

import argparse
import json
import sys
from math import floor

import numpy as np

from . import arith, eigenform, quadforms, sigma_dde, sparse_sums
from ._kernels import BACKEND
from .errors import SymsqError

DEFAULT_LIMIT = 10**6


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2
        self.exit(1, f"{self.prog}: error: {message}\n")


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def _emit(args, header, rows, json_obj=None):
    if args.json:
        if json_obj is None:
            json_obj = [dict(zip(header, row)) for row in rows]
        print(json.dumps(json_obj, sort_keys=True, indent=2))
    else:
        print(",".join(header))
        for row in rows:
            print(",".join(_fmt(v) for v in row))


def _parse_grid(text: str) -> list:
    if ":" in text:
        lo_s, hi_s, fac_s = text.split(":")
        lo, hi, fac = int(lo_s), int(hi_s), float(fac_s)
        if lo < 1 or hi < lo or fac <= 1.0:
            raise SymsqError(f"bad grid spec {text!r}")
        out = []
        x = lo
        while x <= hi:
            out.append(x)
            x = max(x + 1, int(x * fac))
        return out
    return [int(t) for t in text.split(",") if t]


def _load_eigentable(args, limit: int) -> eigenform.EigenvalueTable:
    form = args.form
    if form == "delta":
        return eigenform.delta_eigenvalue_table(limit)
    if form.startswith("file:"):
        path = form[5:]
        try:
            with open(path, "rb") as fh:
                q = eigenform.load_qexpansion(fh)
        except OSError as exc:
            raise SymsqError(f"cannot read {path}: {exc}") from None
        ev = eigenform.normalize(q)
        if ev.n_max < limit:
            raise SymsqError(
                f"{path} provides coefficients to {ev.n_max}, but --limit/--cap is {limit}"
            )
        return ev
    raise SymsqError(f"--form must be 'delta' or 'file:<path>', got {form!r}")


def _cmd_delta(args):
    q = eigenform.delta_qexpansion(args.limit, exact_limit=args.exact_limit)
    _emit(args, ["n", "a_n"], [(n, q.a[n]) for n in range(1, q.n_max + 1)])
    return 0


def _cmd_load(args):
    if not args.form.startswith("file:"):
        raise SymsqError("load requires --form file:<path>")
    path = args.form[5:]
    with open(path, "rb") as fh:
        q = eigenform.load_qexpansion(fh)
    _emit(
        args,
        ["level", "weight", "n_max", "a_2"],
        [(q.level, q.weight, q.n_max, q.a[2] if q.n_max >= 2 else "")],
        json_obj={"level": q.level, "weight": q.weight, "n_max": q.n_max},
    )
    return 0


def _cmd_symsq_coeffs(args):
    ev = _load_eigentable(args, args.limit)
    s2 = eigenform.sym_square(ev, args.limit)
    rows = []
    for n in range(1, args.limit + 1):
        v = s2.lam2[n]
        rows.append((n, "" if np.isnan(v) else float(v)))
    if args.json:
        obj = [
            {"n": n, "lambda_sym2": (None if v == "" else v)} for n, v in rows
        ]
        _emit(args, [], [], json_obj=obj)
    else:
        _emit(args, ["n", "lambda_sym2"], rows)
    return 0


def _cmd_classgroup(args):
    cg = quadforms.enumerate_reduced(args.disc)
    rows = [(f.a, f.b, f.c) for f in cg.forms]
    obj = {"D": cg.D, "h": cg.h, "w": cg.w, "forms": [list(r) for r in rows]}
    _emit(args, ["a", "b", "c"], rows, json_obj=obj)
    return 0


def _cmd_rd(args):
    cg = quadforms.enumerate_reduced(args.disc) if args.oracle else None
    header = ["n", "r_formula"] + (["r_enumerate"] if args.oracle else [])
    rows = []
    for n in range(1, args.limit + 1):
        row = [n, quadforms.r_formula(n, args.disc)]
        if args.oracle:
            row.append(quadforms.r_enumerate(n, cg))
        rows.append(tuple(row))
    _emit(args, header, rows)
    return 0


def _sym2_for(args, limit):
    ev = _load_eigentable(args, limit)
    return eigenform.sym_square(ev, limit)


def _cmd_sum(args):
    if args.y is not None:
        # minorant mode: one value of the h_Y-weighted sum at X = floor(Y^u)
        u = args.u if args.u is not None else 1.6334
        X = int(floor(args.y**u))
        p_max = min(args.limit, max(X, 3))
        ev = _load_eigentable(args, p_max)
        nf = sparse_sums.exceptional_set(ev, args.y, p_max)
        sb = sigma_dde.StepBeta(args.m)
        hy = sparse_sums.h_Y_table(args.y, max(X, 3), nf, sb)
        val = sparse_sums.lower_bound_sum(hy, args.disc, ev.level, X)
        _emit(args, ["Y", "u", "X", "hY_sum"], [(args.y, u, X, val)])
        return 0
    grid = _parse_grid(args.grid)
    cg = quadforms.enumerate_reduced(args.disc)
    s2 = _sym2_for(args, max(grid))
    series = sparse_sums.sum_series(s2, cg, grid)
    _emit(args, ["X", "S"], list(zip(series.grid.tolist(), (float(s) for s in series.S))))
    return 0


def _cmd_fit(args):
    grid = _parse_grid(args.grid)
    cg = quadforms.enumerate_reduced(args.disc)
    s2 = _sym2_for(args, max(grid))
    series = sparse_sums.sum_series(s2, cg, grid)
    slope = sparse_sums.exponent_fit(series)
    _emit(args, ["slope"], [(slope,)])
    return 0


def _cmd_find_neg(args):
    s2 = _sym2_for(args, args.cap)
    if args.disc is not None:
        cg = quadforms.enumerate_reduced(args.disc)
        n = sparse_sums.first_negative_sparse(
            s2, cg, args.cap, squarefree_only=args.squarefree_only
        )
    else:
        n = sparse_sums.first_negative(s2, args.cap, squarefree_only=args.squarefree_only)
    _emit(
        args,
        ["n_first_negative"],
        [(n if n is not None else "not_found",)],
        json_obj={"n_first_negative": n},
    )
    return 0


def _cmd_sigma(args):
    sb = sigma_dde.StepBeta(args.m)
    sol = sigma_dde.solve_sigma(sb, args.umax, args.step)
    if args.at is not None:
        v = sol.at(args.at)
        _emit(args, ["u", "sigma", "positive"], [(args.at, v, v > 0)])
    else:
        rows = list(zip((float(u) for u in sol.grid), (float(s) for s in sol.sigma)))
        _emit(args, ["u", "sigma"], rows)
    return 0


def _cmd_meanvalue(args):
    level = 1
    if args.form != "delta":
        level = _load_eigentable(args, 1).level
    value, predicted = sparse_sums.mean_value_sum(args.eta, args.limit, args.disc, level)
    ratio = value / predicted if predicted else float("nan")
    _emit(args, ["value", "predicted", "ratio"], [(value, predicted, ratio)])
    return 0


def _cmd_factor_check(args):
    ev = _load_eigentable(args, args.limit)
    d = sparse_sums.factorization_diagnostic(ev, args.disc, args.s, args.limit)
    _emit(
        args,
        ["lhs", "rhs", "rel_dev", "series_plain", "series_twisted", "correction"],
        [(d.lhs, d.rhs, d.rel_dev, d.series_plain, d.series_twisted, d.correction)],
    )
    return 0


def _cmd_verify(args):
    failures = 0

    def check(name, ok, detail=""):
        nonlocal failures
        tag = "PASS" if ok else "FAIL"
        if not ok:
            failures += 1
        print(f"{tag} {name}" + (f": {detail}" if detail and not ok else ""))

    # class numbers
    h1 = [-3, -4, -7, -8, -11, -19, -43, -67, -163, -12, -16, -27, -28]
    bad = [D for D in h1 if quadforms.enumerate_reduced(D).h != 1]
    check("classgroup.h1_list", not bad, f"h!=1 for {bad}")
    check("classgroup.h_minus23", quadforms.enumerate_reduced(-23).h == 3)

    # representation counts against the lattice oracle
    for D in (-3, -4, -7, -8, -11, -19, -163, -23):
        mism = quadforms.compare_representation_counts(D, 300)
        check(f"quadforms.r_oracle[D={D}]", not mism, f"first mismatch {mism[:1]}")
    for D in (-12, -16, -27, -28):
        mism = quadforms.compare_representation_counts(D, 200)
        print(f"INFO quadforms.r_oracle[D={D}]: non-fundamental, {len(mism)} of 200 counts differ from the lattice")

    # kronecker properties
    rng = np.random.default_rng(7)
    ok = True
    for D in (-3, -4, -23, -12):
        for _ in range(1500):
            m, n = int(rng.integers(1, 5000)), int(rng.integers(1, 5000))
            if arith.kronecker(D, m * n) != arith.kronecker(D, m) * arith.kronecker(D, n):
                ok = False
        for _ in range(500):
            n = int(rng.integers(1, 10000)) * 2 + 1
            if arith.kronecker(D, n) != arith.kronecker(D, n + abs(D)):
                ok = False
    check("arith.kronecker_properties", ok)

    # eigenform suite on Delta
    lim = min(args.limit, 2 * 10**4)
    ev = eigenform.delta_eigenvalue_table(lim)
    rep = eigenform.verify_eigenform(ev, 2000)
    check("eigenform.hecke_relation", not rep.hecke_violations, str(rep.hecke_violations[:2]))
    check("eigenform.deligne_bound", not rep.deligne_violations, str(rep.deligne_violations[:2]))
    tau = eigenform.delta_qexpansion(6).a
    check("eigenform.tau_head", tau[1:7] == [1, -24, 252, -1472, 4830, -6048])
    worst = max(
        eigenform.chebyshev_check(ev, int(p), 6)
        for p in arith.build_factor_sieve(200).primes
    )
    check("eigenform.chebyshev_identity", worst <= 1e-9, f"max dev {worst}")
    s2 = eigenform.sym_square(ev, lim)
    pr = arith.build_factor_sieve(lim).primes
    vals = s2.lam2[pr]
    check("eigenform.sym2_prime_range", bool(np.all((vals >= -1 - 1e-9) & (vals <= 3 + 1e-9))))

    # sparse sums
    cg4 = quadforms.enumerate_reduced(-4)
    check("sparse.sum_at_1", sparse_sums.sparse_sum(s2, cg4, 1) == 4.0)
    grid = [1, 2, 4, 8, 16, 32]
    series = sparse_sums.sum_series(s2, cg4, grid)
    ok = all(
        abs(series.S[i] - sparse_sums.sparse_sum(s2, cg4, grid[i])) < 1e-12
        for i in range(len(grid))
    )
    check("sparse.series_consistency", ok)
    check("sparse.first_negative", sparse_sums.first_negative(s2, lim) == 2)
    check(
        "sparse.first_negative_sparse",
        sparse_sums.first_negative_sparse(s2, cg4, lim) == 2,
    )

    # minorant machinery
    sb = sigma_dde.StepBeta(25)
    nf = sparse_sums.exceptional_set(ev, 50.0, min(lim, 10**4))
    hy = sparse_sums.h_Y_table(50.0, 10**4, nf, sb)
    prep = sparse_sums.convolution_positivity_check(s2, hy, -4, min(lim, 2000))
    check("sparse.convolution_positivity", prep.ok)
    hvals = hy.values
    hp = hvals[arith.build_factor_sieve(10**4).primes]
    check("sparse.hY_prime_range", bool(np.all((hp >= -1 - 1e-12) & (hp <= 3 + 1e-12))))

    # sigma
    sol = sigma_dde.solve_sigma(sb, 2.0, 5e-4)
    v = sol.at(1.6334)
    check("sigma.positive_at_1.6334", v > 0, f"sigma = {v}")
    res = sigma_dde.sigma_residual(sol, sb, 20)
    check("sigma.integral_residual", res < 1e-5, f"residual {res}")

    print(f"{'OK' if not failures else 'FAILED'}: {failures} failing checks (backend={BACKEND})")
    return 1 if failures else 0


def _add_form(p):
    p.add_argument("--form", default="delta", help="delta or file:<path>")


def _add_json(p):
    p.add_argument("--json", action="store_true", help="emit JSON instead of CSV")


def build_parser() -> _Parser:
    ap = _Parser(prog="symsq", description=__doc__)
    ap.add_argument(
        "--threads",
        type=int,
        default=0,
        help="accepted for interface compatibility; computation is sequential "
        "and results never depend on it",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("delta", help="exact tau(n) coefficients")
    p.add_argument("--limit", type=int, default=DEFAULT_LIMIT)
    p.add_argument("--exact-limit", type=int, default=eigenform.DEFAULT_EXACT_LIMIT)
    _add_json(p)
    p.set_defaults(fn=_cmd_delta)

    p = sub.add_parser("load", help="parse and validate a q-expansion file")
    _add_form(p)
    _add_json(p)
    p.set_defaults(fn=_cmd_load)

    p = sub.add_parser("symsq-coeffs", help="symmetric-square coefficients")
    _add_form(p)
    p.add_argument("--limit", type=int, default=1000)
    _add_json(p)
    p.set_defaults(fn=_cmd_symsq_coeffs)

    p = sub.add_parser("classgroup", help="reduced forms of a discriminant")
    p.add_argument("--disc", type=int, required=True)
    _add_json(p)
    p.set_defaults(fn=_cmd_classgroup)

    p = sub.add_parser("rd", help="representation counts r_D(n)")
    p.add_argument("--disc", type=int, required=True)
    p.add_argument("--limit", type=int, default=100)
    p.add_argument("--oracle", action="store_true", help="add the lattice-scan column")
    _add_json(p)
    p.set_defaults(fn=_cmd_rd)

    p = sub.add_parser("sum", help="sparse first-moment sums S(X), or the h_Y minorant sum with --y")
    _add_form(p)
    p.add_argument("--disc", type=int, required=True)
    p.add_argument("--grid", default="1:1000000:2", help="comma list or lo:hi:factor")
    p.add_argument("--limit", type=int, default=DEFAULT_LIMIT)
    p.add_argument("--y", type=float, default=None, help="minorant threshold Y")
    p.add_argument("--u", type=float, default=None, help="exponent u (X = Y^u), default 1.6334")
    p.add_argument("--m", type=int, default=25, help="band count for the step kernel")
    _add_json(p)
    p.set_defaults(fn=_cmd_sum)

    p = sub.add_parser("fit", help="growth exponent of |S(X)| on a grid")
    _add_form(p)
    p.add_argument("--disc", type=int, required=True)
    p.add_argument("--grid", default="1000:1000000:2")
    _add_json(p)
    p.set_defaults(fn=_cmd_fit)

    p = sub.add_parser("find-neg", help="first negative symmetric-square coefficient")
    _add_form(p)
    p.add_argument("--disc", type=int, default=None)
    p.add_argument("--cap", type=int, default=DEFAULT_LIMIT)
    p.add_argument("--squarefree-only", action="store_true")
    _add_json(p)
    p.set_defaults(fn=_cmd_find_neg)

    p = sub.add_parser("sigma", help="solve the delayed equation for sigma(u)")
    p.add_argument("--m", type=int, default=25)
    p.add_argument("--umax", type=float, default=3.0)
    p.add_argument("--step", type=float, default=1e-4)
    p.add_argument("--at", type=float, default=None, help="report sigma at this u only")
    _add_json(p)
    p.set_defaults(fn=_cmd_sigma)

    p = sub.add_parser("meanvalue", help="square-free character mean value vs model")
    _add_form(p)
    p.add_argument("--eta", type=int, default=1)
    p.add_argument("--disc", type=int, required=True)
    p.add_argument("--limit", type=int, default=DEFAULT_LIMIT)
    _add_json(p)
    p.set_defaults(fn=_cmd_meanvalue)

    p = sub.add_parser("factor-check", help="three-factor Dirichlet series diagnostic")
    _add_form(p)
    p.add_argument("--disc", type=int, required=True)
    p.add_argument("--s", type=float, default=2.0)
    p.add_argument("--limit", type=int, default=10**5)
    _add_json(p)
    p.set_defaults(fn=_cmd_factor_check)

    p = sub.add_parser("verify", help="run the cross-module property suite")
    p.add_argument("--limit", type=int, default=2 * 10**4)
    _add_json(p)
    p.set_defaults(fn=_cmd_verify)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.fn(args)
    except (SymsqError, OSError) as exc:
        print(f"symsq: error: {exc}", file=sys.stderr)
        return 1
    except BrokenPipeError:
        return 0
    except Exception as exc:  # internal fault
        print(f"symsq: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
