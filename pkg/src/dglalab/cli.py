"""Command-line interface: ``dglalab <command> FIXTURE [flags]``.

Exit codes: 0 when every check passes, 1 when a check fails, 2 for usage,
parse and missing-file errors.
"""

import argparse
import os
import sys
import time

from . import acceptance
from .cartan import (
    aj_cohomology, aj_value, aj_via_tw2, aj_well_defined, check_aj_cube, cohomology_injective,
    period_obstruction_check, period_pair,
)
from .deformations import (
    dgla_problem, gauge_check_sample, mc_check, mc_lift_probe, pair_problem, primary_obstruction,
)
from .dgla import (
    AffAlgebra, EndAlgebra, FiniteLie, check_aff_matrix_model, check_dgla, complex_of,
    identity_on_keys,
)
from .exact import ArtinError, check_artin, parse_artin_spec
from .fibers import (
    TW2Fiber, TWFiber, bundle_projection, bundle_section, default_bound, grass, jac_fiber,
    jacobian, q_bundle, truncated_bracket_check, tw_cohomology,
)
from .fixtures import FixtureError, load
from .graded import check_complex, cohomology, quotient_complex, sub_complex
from .iterated import (
    PipelineError, ainfty_relation_check, aj_pipeline, build_b_module, end_module,
    functoriality_check, iterint_closed_form_check,
)
from .lie import ArtinTensor
from .linalg import ONE, axpy, sub
from .report import CheckResult, Report

COMMANDS = ("check", "cohomology", "tw", "tw2", "jacobian", "grassmann", "qbundle", "mc", "gauge",
            "lift", "period", "aj", "ainf-check", "pipeline", "selftest")


class UsageError(Exception):
    pass


def threads():
    """Optional DGLA_LAB_THREADS cap; computations currently use one thread."""
    raw = os.environ.get("DGLA_LAB_THREADS")
    if raw is None:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"DGLA_LAB_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise UsageError("DGLA_LAB_THREADS must be >= 1")
    return 1


def build_parser():
    p = argparse.ArgumentParser(prog="dglalab", description="Exact DG-Lie algebra computations.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("fixture", nargs="?", help="fixture file (bundled names work too)")
    p.add_argument("--artin", default=None, help="vars:order, e.g. 1:3 for Q[eps]/eps^3")
    p.add_argument("--degree-bound", type=int, default=None)
    p.add_argument("--max-len", type=int, default=3)
    p.add_argument("--max-polydeg", type=int, default=4)
    p.add_argument("--format", choices=("text", "machine"), default="text")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=500, help="sample count for gauge")
    p.add_argument("--only", default=None, help="selftest: criteria such as 1-3,7")
    p.add_argument("--timing", action="store_true", help="include wall-clock time in reports")
    return p


# ---------------------------------------------------------------------------
# shared helpers


def _artin(args, default="1:2"):
    """(ring, number of variables) from --artin."""
    spec = args.artin or default
    try:
        A = parse_artin_spec(spec)
    except ArtinError as exc:
        raise UsageError(str(exc)) from None
    return A, int(spec.split(":")[0])


def _one_variable_order(args, default):
    A, nvars = _artin(args, default)
    if nvars != 1:
        raise UsageError(f"{args.command} lifts order by order in one variable: use --artin 1:N")
    return A, A.nilpotency_index


def _bound(args, fixture_degrees):
    if args.degree_bound is not None:
        if args.degree_bound < 0:
            raise UsageError("--degree-bound must be >= 0")
        return args.degree_bound
    amplitude = max(fixture_degrees) - min(fixture_degrees) if fixture_degrees else 0
    return min(default_bound(amplitude), 4)


def _degrees(fx):
    out = set()
    for C in fx.complexes.values():
        out |= set(C.degrees())
    for g in fx.dglas.values():
        out |= {g.degree(k) for k in g.basis}
    return out


def _all_algebras(fx):
    out = [(g.name, g) for g in fx.dglas.values()]
    out += [(f"End({c})", EndAlgebra(V)) for c, V in fx.complexes.items()]
    return out


def _sub_inclusions(fx):
    out = []
    for sname, (parent, keys) in fx.subs.items():
        if parent in fx.dglas:
            g = fx.dglas[parent]
            f = identity_on_keys(FiniteLie(g, [k for k in g.basis if k in keys]), g)
            out.append((f"{sname} -> {parent}", TWFiber(f, name=f"TW({sname}->{parent})")))
    return out


def _fiber_report(rep, label, fib, bound, expect=None):
    res = tw_cohomology(fib, bound)
    rep.data[f"{label}: H*"] = res["dims"]
    rep.data[f"{label}: quotient H*"] = res["quotient_dims"]
    rep.add(CheckResult(f"{label}: truncated cohomology stabilized", res["stabilized"],
                        detail={"bound": bound, "next": res["dims_next"],
                                "heuristic": res["heuristic"]}))
    if res["quotient_dims"] is not None:
        rep.add(CheckResult(f"{label}: matches the quotient complex",
                            res["dims"] == res["quotient_dims"],
                            witness=None if res["dims"] == res["quotient_dims"] else
                            {"truncated": res["dims"], "quotient": res["quotient_dims"]}))
    if expect is not None:
        rep.add(CheckResult(f"{label}: matches {expect[0]}", res["dims"] == expect[1],
                            witness=None if res["dims"] == expect[1] else
                            {"truncated": res["dims"], "expected": expect[1]}))
    return res


def _first_order_reps(problem, degree):
    coh = cohomology(problem.obstruction_complex, only={degree})
    return coh.reps.get(degree, [])


def _candidates(reps):
    out = [(f"class {i}", r) for i, r in enumerate(reps)]
    for i in range(len(reps)):
        for j in range(i + 1, len(reps)):
            out.append((f"class {i} + class {j}", axpy(dict(reps[i]), ONE, reps[j])))
    return out


# ---------------------------------------------------------------------------
# commands


def cmd_check(args, fx, rep):
    rep.add(fx.checks)
    for name, C in fx.complexes.items():
        rep.add(CheckResult(f"complex {name}: {check_complex(C).name}", check_complex(C).passed))
    for pname, pair in fx.dg_pairs().items():
        V, F = pair.total, pair.sub
        for L in (EndAlgebra(V), EndAlgebra(V, (F,)), AffAlgebra(V), AffAlgebra(V, F)):
            for r in check_dgla(L):
                rep.add(CheckResult(f"{L.name} [{pname}]: {r.name}", r.passed, witness=r.witness))
        rep.add(check_aff_matrix_model(AffAlgebra(V, F)))
    for name, A in fx.artins.items():
        for r in check_artin(A):
            rep.add(CheckResult(f"artin {name}: {r.name}", r.passed, witness=r.witness))
    rep.data["objects"] = {
        "complexes": sorted(fx.complexes), "subs": sorted(fx.subs), "dglas": sorted(fx.dglas),
        "morphisms": sorted(fx.morphisms), "cartans": sorted(fx.cartans),
        "periods": sorted(fx.periods), "ajdata": sorted(fx.ajdata), "artins": sorted(fx.artins),
    }


def cmd_cohomology(args, fx, rep):
    for name, C in fx.complexes.items():
        rep.data[f"H*({name})"] = cohomology(C).nonzero_dims()
    for pname, pair in fx.dg_pairs().items():
        rep.data[f"H*({pname})"] = cohomology(sub_complex(pair)).nonzero_dims()
        Q, _ = quotient_complex(pair)
        rep.data[f"H*(V/{pname})"] = cohomology(Q).nonzero_dims()
        rep.add(CheckResult(f"H*({pname}) -> H*(V) injective", True,
                            detail={"injective": cohomology_injective(pair)}))
    for name, g in fx.dglas.items():
        rep.data[f"H*({name})"] = cohomology(complex_of(g)).nonzero_dims()


def cmd_tw(args, fx, rep):
    bound = _bound(args, _degrees(fx))
    rep.bounds["degree_bound"] = bound
    for pname, pair in fx.dg_pairs().items():
        for fib in (grass(pair.total, pair.sub), q_bundle(pair.total, pair.sub)):
            _fiber_report(rep, f"{fib.name} [{pname}]", fib, bound)
    for label, fib in _sub_inclusions(fx):
        _fiber_report(rep, label, fib, bound)


def cmd_tw2(args, fx, rep):
    bound = _bound(args, _degrees(fx))
    rep.bounds["degree_bound"] = bound
    for pname, pair in fx.dg_pairs().items():
        J = jacobian(pair.total, pair.sub)
        for sq in (J.square, J.abel_jacobi_face()):
            rep.add(sq.maps_checked())
            _fiber_report(rep, f"TW2({sq.name}) [{pname}]", TW2Fiber(sq, name=sq.name), bound)


def cmd_jacobian(args, fx, rep):
    bound = _bound(args, _degrees(fx))
    rep.bounds["degree_bound"] = bound
    rep.bounds["bracket_bound"] = 2 * bound
    for pname, pair in fx.dg_pairs().items():
        fib = jac_fiber(pair.total, pair.sub)
        Q, _ = quotient_complex(pair)
        expect = {d + 2: n for d, n in cohomology(Q).nonzero_dims().items()}
        res = _fiber_report(rep, f"Jac [{pname}]", fib, bound, ("H*(V/F)[-2]", expect))
        table, zero = truncated_bracket_check(fib, bound)
        rep.add(CheckResult(f"Jac [{pname}]: bracket on cohomology vanishes", zero,
                            witness=None if zero else {k: v for k, v in table.items() if any(v)}))
        H, HQ = res["cohomology"], cohomology(fib.quotient_complex())
        images = {}
        for deg in H.degrees():
            for j, e in enumerate(H.reps.get(deg, [])):
                images[(deg, j)] = HQ.project(deg, fib.to_double_quotient(e))
        rep.data[f"Jac [{pname}]: double integral on H"] = images


def cmd_grassmann(args, fx, rep):
    bound = _bound(args, _degrees(fx))
    rep.bounds["degree_bound"] = bound
    for pname, pair in fx.dg_pairs().items():
        _fiber_report(rep, f"Grass [{pname}]", grass(pair.total, pair.sub), bound)


def cmd_qbundle(args, fx, rep):
    bound = _bound(args, _degrees(fx))
    rep.bounds["degree_bound"] = bound
    for pname, pair in fx.dg_pairs().items():
        qb, gr = q_bundle(pair.total, pair.sub), grass(pair.total, pair.sub)
        _fiber_report(rep, f"Q [{pname}]", qb, bound)
        pr, sec = bundle_projection(qb, gr), bundle_section(gr, qb)
        T = gr.truncated(bound)
        bad = None
        for deg in gr.degrees():
            for b in T.basis(deg):
                if sub(pr(sec(b)), b):
                    bad = {"degree": deg, "element": b}
                    break
            if bad:
                break
        rep.add(CheckResult(f"Q [{pname}]: projection after section is the identity",
                            bad is None, witness=bad))


def cmd_mc(args, fx, rep):
    A, order = _one_variable_order(args, "1:3")
    rep.bounds["artin"] = A.name
    for label, g in _all_algebras(fx):
        problem = dgla_problem(g)
        reps = _first_order_reps(problem, 1)
        rep.data[f"{label}: H^1"] = len(reps)
        for cname, u in _candidates(reps):
            res = mc_lift_probe(problem, u, order)
            entry = {"first_order": u, "lifted": res["lifted"]}
            if not res["lifted"]:
                entry.update(order=res["order"], obstruction_class=res["class"])
            else:
                L = ArtinTensor(g, A)
                x = {}
                for k, v in res["coefficients"].items():
                    axpy(x, ONE, L.lift(v, A.basis[k - 1]))
                rep.add(CheckResult(f"{label} {cname}: lift is Maurer-Cartan", mc_check(L, x)))
            rep.data[f"{label} {cname}"] = entry


def cmd_gauge(args, fx, rep):
    import random
    A, nvars = _artin(args, "1:3")
    rng = random.Random(args.seed)
    rep.bounds.update(artin=A.name, samples=args.samples, seed=args.seed)
    if A.nilpotency_index is None or A.nilpotency_index < 2:
        raise UsageError("gauge needs a ring with nonzero maximal ideal")
    for label, g in _all_algebras(fx):
        L, pool = acceptance._mc_pool(g, A) if nvars == 1 else (ArtinTensor(g, A), [{}])
        bad = None
        for _ in range(args.samples):
            x = rng.choice(pool)
            a = acceptance._random_element(rng, L, 0)
            if not gauge_check_sample(L, a, x):
                bad = {"a": a, "x": x}
                break
        rep.add(CheckResult(f"{label}: gauge action preserves MC", bad is None, witness=bad,
                            detail={"pool": len(pool)}))


def cmd_lift(args, fx, rep):
    A, order = _one_variable_order(args, "1:3")
    rep.bounds["artin"] = A.name
    for pname, pair in fx.dg_pairs().items():
        J = jacobian(pair.total, pair.sub)
        problem = pair_problem(J.endF, J.end, name=f"Grass[{pname}]")
        reps = _first_order_reps(problem, 0)
        rep.data[f"Grass [{pname}]: first-order classes"] = reps
        for cname, u in _candidates(reps):
            res = mc_lift_probe(problem, u, order)
            _, cls = primary_obstruction(problem, u)
            entry = {"first_order": u, "lifted": res["lifted"], "primary_class": cls}
            if not res["lifted"]:
                entry.update(order=res["order"], obstruction_class=res["class"])
                if res["order"] == 2:
                    search = acceptance.brute_force_order2(problem, J, u)
                    entry["brute_force"] = {k: search[k] for k in ("tried", "shift_rank", "grid")}
                    rep.add(CheckResult(f"Grass [{pname}] {cname}: brute-force order-2 search "
                                        "agrees with the obstruction", search["found"] is None,
                                        witness=search["found"]))
            rep.data[f"Grass [{pname}] {cname}"] = entry
            verdict = "lifts" if res["lifted"] else f"obstructed at order {res['order']}"
            rep.data[f"Grass [{pname}] {cname}: verdict"] = verdict
    for label, g in [(g.name, g) for g in fx.dglas.values()]:
        problem = dgla_problem(g)
        for cname, u in _candidates(_first_order_reps(problem, 1)):
            res = mc_lift_probe(problem, u, order)
            rep.data[f"{label} {cname}: verdict"] = (
                "lifts" if res["lifted"] else f"obstructed at order {res['order']}")


def cmd_period(args, fx, rep):
    A, _ = _artin(args, "1:2")
    rep.bounds["artin"] = A.name
    for name, pd in fx.periods.items():
        rep.add([CheckResult(f"period {name}: {r.name}", r.passed, r.witness) for r in pd.check()])
        inj = cohomology_injective(pd.pair)
        rep.data[f"period {name}: H*(F) -> H*(V) injective"] = inj
        L = ArtinTensor(pd.g, A)
        reps = cohomology(complex_of(pd.g)).reps.get(1, [])
        for j, u in enumerate(reps):
            x = L.lift(u, A.basis[0])
            if not mc_check(L, x):
                rep.data[f"period {name}: class {j}"] = "eps * class is not MC over this ring"
                continue
            lx, minus_ix = period_pair(pd, A, x)
            rep.data[f"period {name}: class {j}"] = {"l_x": lx, "-i_x": minus_ix}
        if inj:
            for r in period_obstruction_check(pd):
                rep.add(CheckResult(f"period {name}: {r.name}", r.passed, r.witness, r.detail))


def _pipeline_inputs(datum, A, one_var):
    """Degree-0 relative classes, lifted to MC of (sub -> g) over A when possible."""
    g = datum.g
    reps = acceptance._first_order_classes(datum)
    out = []
    problem = pair_problem(FiniteLie(g, [k for k in g.basis if k in datum.sub]), g)
    for cname, x0 in _candidates(reps):
        if one_var and A.nilpotency_index > 2:
            lift = mc_lift_probe(problem, x0, A.nilpotency_index)
            if not lift["lifted"]:
                out.append((cname, x0, None))
                continue
            x = {}
            for k, v in lift["coefficients"].items():
                axpy(x, ONE, {(j, A.basis[k - 1]): c for j, c in v.items()})
        else:
            x = {(k, A.basis[0]): c for k, c in x0.items()}
        out.append((cname, x0, x))
    return out


def _run_pipeline(rep, name, datum, A, nvars, compare):
    inputs = _pipeline_inputs(datum, A, nvars == 1)
    if not inputs:
        rep.data[f"{name}: pipeline"] = "no degree-0 classes; MC of sub -> g is trivial"
        return
    for cname, x0, x in inputs:
        if x is None:
            rep.data[f"{name} {cname}: pipeline"] = "class does not lift over this ring"
            continue
        try:
            res = aj_pipeline(datum, A, x)
        except PipelineError as exc:
            rep.data[f"{name} {cname}: pipeline"] = f"not an MC input: {exc}"
            continue
        rep.add([CheckResult(f"{name} {cname}: {c.name}", c.passed, c.witness)
                 for c in res["checks"]])
        rep.data[f"{name} {cname}: pipeline output"] = res["output"]
        if compare:
            lin = {e: c for (e, m), c in res["output"].items() if m == A.basis[0]}
            expect = aj_value(datum, x0)
            ok = not sub(lin, expect)
            rep.add(CheckResult(f"{name} {cname}: pipeline first order agrees with aj", ok,
                                witness=None if ok else {"pipeline": lin, "aj": expect}))


def cmd_aj(args, fx, rep):
    A, nvars = _artin(args, "1:2")
    rep.bounds["artin"] = A.name
    for name, datum in fx.ajdata.items():
        res = aj_cohomology(datum)
        rep.data[f"{name}: aj matrix"] = res["matrix"]
        rep.data[f"{name}: aj values"] = res["values"]
        rep.add(res["checks"])
        rep.add(aj_well_defined(datum))
        rep.add([CheckResult(f"{name}: cube {r.name}", r.passed, r.witness)
                 for r in check_aj_cube(datum)])
        H = res["source"]
        for p in H.degrees():
            for j, x in enumerate(H.reps[p]):
                val, _, _ = aj_via_tw2(datum, x)
                expect = res["values"][(p, j)]
                ok = not sub(val, expect)
                rep.add(CheckResult(f"{name}: TW2 double integral = aj on class ({p},{j})", ok,
                                    witness=None if ok else {"tw2": val, "aj": expect}))
        _run_pipeline(rep, name, datum, A, nvars, compare=True)


def cmd_pipeline(args, fx, rep):
    A, nvars = _artin(args, "1:3")
    rep.bounds["artin"] = A.name
    for name, datum in fx.ajdata.items():
        _run_pipeline(rep, name, datum, A, nvars, compare=True)


def cmd_ainf(args, fx, rep):
    if args.max_len < 1 or args.max_polydeg < 0:
        raise UsageError("--max-len must be >= 1 and --max-polydeg >= 0")
    rep.bounds.update(max_len=args.max_len, max_polydeg=args.max_polydeg)
    pairs = fx.dg_pairs()
    for cname, V in fx.complexes.items():
        B = build_b_module(end_module(V))
        r = ainfty_relation_check(B, args.max_len, args.max_polydeg)
        rep.add(CheckResult(f"B(End({cname}), {cname}): {r.name}", r.passed, r.witness, r.detail))
        for pname, pair in pairs.items():
            if pair.total is V:
                rep.add(functoriality_check(V, pair.sub, min(args.max_len, 2),
                                            min(args.max_polydeg, 3)))
    rep.add(iterint_closed_form_check())


def cmd_selftest(args, rep):
    try:
        only = acceptance.parse_only(args.only) if args.only else None
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    summary = {}
    for n, title, results, secs in acceptance.run(args.seed, only):
        ok = all(r.passed for r in results)
        rep.add(CheckResult(f"criterion {n}: {title}", ok,
                            witness=None if ok else [r.as_dict() for r in results if not r.passed],
                            detail={"checks": len(results)}))
        summary[str(n)] = {r.name: r.passed for r in results}
    if args.format == "machine":
        rep.data["criteria"] = summary
    rep.bounds["seed"] = args.seed


HANDLERS = {
    "check": cmd_check, "cohomology": cmd_cohomology, "tw": cmd_tw, "tw2": cmd_tw2,
    "jacobian": cmd_jacobian, "grassmann": cmd_grassmann, "qbundle": cmd_qbundle, "mc": cmd_mc,
    "gauge": cmd_gauge, "lift": cmd_lift, "period": cmd_period, "aj": cmd_aj,
    "ainf-check": cmd_ainf, "pipeline": cmd_pipeline,
}


def run_command(argv):
    """(report or None, exit code, error message, parsed args)."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return None, 2 if exc.code else 0, None, None
    rep = Report(command=["dglalab"] + list(argv))
    start = time.perf_counter()
    try:
        threads()
        if args.command == "selftest":
            cmd_selftest(args, rep)
        else:
            if not args.fixture:
                raise UsageError(f"{args.command} needs a fixture file")
            fx = load(args.fixture)
            rep.digest = fx.digest
            HANDLERS[args.command](args, fx, rep)
    except FileNotFoundError as exc:
        return None, 2, str(exc), args
    except FixtureError as exc:
        msg = f"{exc}" + (f" (witness: {exc.witness})" if exc.witness is not None else "")
        return None, (1 if exc.failed_check else 2), msg, args
    except UsageError as exc:
        return None, 2, str(exc), args
    if args.timing:
        rep.timing = time.perf_counter() - start
    return rep, (0 if rep.passed else 1), None, args


def render(rep, fmt):
    return rep.to_machine(with_timing=rep.timing is not None) if fmt == "machine" else rep.to_text()


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    rep, code, err, args = run_command(argv)
    if err:
        print(f"dglalab: error: {err}", file=sys.stderr)
    if rep is not None:
        sys.stdout.write(render(rep, args.format))
    return code


if __name__ == "__main__":
    sys.exit(main())
