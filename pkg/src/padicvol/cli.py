"""Command-line front end: JSON specs in, machine-readable reports out.

Subcommands: volume, inertia, torsors, hasse, fourier, isogeny,
verify-all.  All numeric output is rendered exactly ("3/4",
"1 + 5^{-1/2}"), never as decimals, so reports are stable golden files;
reports are byte-identical across runs and across --jobs settings
(timing goes to stderr).  Exit status: 0 all checks pass, 1 at least one
oracle/check failure, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

from . import fourier as fr
from . import hasse as hs
from . import neron as nr
from . import orbifold as orb
from . import torsor as tor
from .fields import make_field
from .groups import cyclic_constant_group, mu_group
from .integrate import AffineSchemeDesc, Polynomial, count_smooth_points, lift_count, weil_volume
from .series import RamifiedContext
from .volumes import VolumeValue


class SpecError(ValueError):
    pass


def _emit(report: dict, fmt: str, out=None) -> None:
    out = out or sys.stdout
    if fmt == "json":
        out.write(json.dumps(report, sort_keys=True, indent=2) + "\n")
    elif fmt == "csv":
        checks = report.get("checks", [])
        out.write("check,pass\n")
        for c in checks:
            out.write(f"{c['name']},{str(c['pass']).lower()}\n")
    else:
        for key in sorted(report):
            if key == "checks":
                continue
            out.write(f"{key}: {json.dumps(report[key], sort_keys=True)}\n")
        for c in report.get("checks", []):
            out.write(f"[{'PASS' if c['pass'] else 'FAIL'}] {c['name']}\n")


def _checks_pass(report: dict) -> bool:
    return all(c["pass"] for c in report.get("checks", []))


def _parallel_map(fn, items, jobs: int):
    """Deterministic map: results are gathered in input order regardless of jobs."""
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# scheme/stack specs


def _scheme_from_spec(spec: dict) -> tuple[AffineSchemeDesc, int]:
    q = spec["p"] ** spec.get("r", 1)
    p = spec["p"]
    ctx = RamifiedContext(make_field(p, spec.get("r", 1)), 1)
    eqs = []
    for eq in spec.get("equations", []):
        terms = {}
        for term in eq["terms"]:
            expo = tuple(term["e"])
            coeff = term["c"]
            if isinstance(coeff, int):
                terms[expo] = ctx.from_int(coeff)
            else:
                terms[expo] = ctx.from_t_poly([(int(j), int(c)) for j, c in coeff])
        eqs.append(Polynomial(ctx, spec["n"], terms))
    return AffineSchemeDesc(spec["n"], eqs, spec["rel_dim"]), q


def run_volume(spec: dict, level: int, jobs: int, max_cells: int) -> dict:
    kind = spec.get("kind", "stack")
    checks = []
    if kind == "scheme":
        X, q = _scheme_from_spec(spec)
        vol, per_fiber = weil_volume(X, q)
        count = count_smooth_points(X, q)
        results = {
            "count_smooth_points": count,
            "weil_volume": str(vol),
            "per_fiber_volume": str(per_fiber),
        }
        checks.append({
            "name": "weil_volume * q^d == count",
            "pass": vol * VolumeValue.q_power(q, -X.rel_dim) == Fraction(count),
        })
        for m in (1, 2, 3):
            lc = lift_count(X, q, m)
            results[f"lift_count_m{m}"] = lc
            checks.append({
                "name": f"lift_count(m={m}) == count * q^((m-1)d)",
                "pass": lc == count * q ** ((m - 1) * X.rel_dim),
            })
    elif kind == "stack":
        stack = orb.stack_from_spec(spec, max_points=max_cells)
        classes = orb.twisted_inertia(stack)
        total, naive, agree, _ = orb.stringy_volume(stack)

        def one(cls):
            exact = orb.fiber_volume(cls, stack.q)
            interval = orb.fiber_volume_oracle(cls, stack, level=level, classes=classes)
            return cls, exact, interval

        rows = _parallel_map(one, classes, jobs)
        class_rows = []
        for cls, exact, interval in rows:
            ok = interval.contains(exact)
            class_rows.append({
                "class": orb.class_report(cls, stack.q),
                "oracle_interval": str(interval),
                "oracle_contains_exact": ok,
            })
            checks.append({
                "name": f"fiber oracle contains q^-w/aut at class {list(cls.key[0])}"
                        f" g={cls.key[1]} a={cls.key[2]}",
                "pass": ok,
            })
        results = {
            "stringy_volume": str(total),
            "naive_count_over_qd": str(naive),
            "agree": agree,
            "classes": class_rows,
        }
    else:
        raise SpecError(f"unknown volume spec kind {kind!r}")
    return {"inputs": spec, "results": results, "checks": checks}


def run_inertia(spec: dict, level: int, jobs: int, max_cells: int) -> dict:
    stack = orb.stack_from_spec(spec, max_points=max_cells)
    report = orb.inertia_report(stack)
    return {"inputs": spec, "results": report, "checks": []}


def _group_from_spec(gspec: dict, q: int):
    kind = gspec.get("kind", "cyclic")
    if kind == "cyclic":
        return tor.with_q(cyclic_constant_group(gspec["n"], q), q)
    if kind == "muN":
        from .fields import splitting_degree

        p = _char_of(q)
        s = splitting_degree(q, gspec["N"])
        fld = make_field(p, s if q == p else s * _r_of(q, p))
        return tor.with_q(mu_group(gspec["N"], fld, q), q)
    raise SpecError(f"unknown torsor group kind {kind!r}")


def _char_of(q: int) -> int:
    for p in range(2, q + 1):
        if q % p == 0:
            return p
    raise SpecError("bad q")


def _r_of(q: int, p: int) -> int:
    r = 0
    while q > 1:
        q //= p
        r += 1
    return r


def run_torsors(spec: dict, level: int, jobs: int, max_cells: int) -> dict:
    q = spec["p"] ** spec.get("r", 1)
    if q % spec["group"].get("n", spec["group"].get("N", 1)) == 0:
        raise SpecError("group order must be coprime to p")
    G = _group_from_spec(spec["group"], q)
    classes = tor.enumerate_h1(G)
    n_order = spec["group"].get("n", spec["group"].get("N"))
    rows = []
    checks = []
    for cls in classes:
        shape = tor.orbit_decomposition(G, cls.rep)
        rows.append({
            "x_beta": _render_group_elem(G, cls.rep.x_beta),
            "x_gamma": _render_group_elem(G, cls.rep.x_gamma),
            "tag": cls.tag,
            "algebra_shape": shape.factors,
        })
        checks.append({
            "name": f"sum e*f*mult == |Gamma| at class {rows[-1]['x_beta']},{rows[-1]['x_gamma']}",
            "pass": shape.total_degree() == G.order,
        })
    if G.is_abelian() and G.order == n_order:
        kummer = tor.kummer_h1_order(n_order, q)
        checks.append({
            "name": f"|H^1| == Kummer count {kummer}",
            "pass": len(classes) == kummer,
        })
    results = {"num_classes": len(classes), "classes": rows}
    return {"inputs": spec, "results": results, "checks": checks}


def _render_group_elem(G, x):
    key = G.sort_key(x)
    return key if isinstance(key, int) else list(key) if not isinstance(key, tuple) else _tuplify(key)


def _tuplify(k):
    if isinstance(k, tuple):
        return [_tuplify(x) for x in k]
    return k


def run_hasse(spec: dict, level: int, jobs: int, max_cells: int) -> dict:
    q = spec["p"] ** spec.get("r", 1)
    N = spec.get("N", 2)
    chi = spec.get("chi", 1)
    max_val = spec.get("max_val", 4)
    stack = orb.QuotientStackDesc.mu_n_diagonal(N, [1], q, max_points=max_cells)
    classes = orb.twisted_inertia(stack)
    fld = make_field(spec["p"], spec.get("r", 1))
    ctx = RamifiedContext(fld, 1, default_prec=max_val + 8)
    t = ctx.t()
    one = ctx.one()
    checks = []
    rows = []
    points = []
    for v in range(0, max_val + 1):
        for ub in range(1, q):
            points.append((v, ub, 0))
            points.append((v, ub, 1))

    def one_point(pt):
        v, ub, tail = pt
        u = ctx.from_int(ub) * t ** v
        if tail:
            u = u * (one + t + ctx.from_int(2) * t ** 2)
        lhs, rhs, eq = hs.hasse_specialization_check(stack, chi, u, classes=classes)
        return pt, str(lhs), str(rhs), eq

    for pt, l, r, eq in _parallel_map(one_point, points, jobs):
        rows.append({"v": pt[0], "unit": pt[1], "tail": pt[2], "lhs": l, "rhs": r, "equal": eq})
        checks.append({"name": f"inv == chi(e(x)) at v={pt[0]} unit={pt[1]} tail={pt[2]}",
                       "pass": eq})
    gerbes = []
    for nn in range(1, 13):
        for c in range(nn):
            inv = hs.invariant(hs.torsor_gerbe(hs.MuNCharacter(nn, c)))
            gerbes.append({"N": nn, "chi": c, "invariant": str(inv)})
            checks.append({"name": f"torsor gerbe invariant {c}/{nn}",
                           "pass": inv.value == Fraction(c, nn) % 1})
    return {"inputs": spec, "results": {"points": rows, "gerbe_invariants": gerbes},
            "checks": checks}


def run_fourier(spec: dict, level: int, jobs: int, max_cells: int) -> dict:
    checks = []
    results = {}
    if "table" in spec:
        T = fr.count_table_from_json(spec["table"])
        if not T.values:
            raise SpecError("empty table")
        ft = fr.fourier_transform(T)
        results["transform"] = {
            fr._char_key(chi): v.to_json() for chi, v in sorted(
                ft.items(), key=lambda kv: kv[0].exponents)
        }
        results["stable_count"] = fr.stable_count(T).to_json()
        back = fr.inverse_transform(T.group, ft)
        checks.append({
            "name": "transform roundtrip",
            "pass": all(back.values[t] == T.values[t] for t in T.group.elements()),
        })
    if "main_identity" in spec:
        D = fr.main_identity_from_json(spec["main_identity"])
        failing = fr.verify_main_identity(D)
        results["failing_pairs"] = [[list(s), list(t)] for s, t in failing]
        checks.append({"name": "aggregation identity at all (s,t)", "pass": not failing})
        if not failing:
            sl, sr, eq = fr.derive_stable_equality(D)
            results["stable_left"] = sl.to_json()
            results["stable_right"] = sr.to_json()
            checks.append({"name": "stable-count equality", "pass": eq})
            kappa_rows = []
            for lam in fr.characters(D.twists_g):
                iso, st, tfac, eq2 = fr.derive_kappa_identity(D, lam)
                kappa_rows.append({
                    "lambda": fr._char_key(lam),
                    "isotypic": iso.to_json(),
                    "stable_block": st.to_json(),
                    "transfer": tfac.to_json(),
                    "equal": eq2,
                })
                checks.append({"name": f"character identity at {fr._char_key(lam)}",
                               "pass": eq2})
            results["character_identities"] = kappa_rows
    if not results:
        raise SpecError("fourier spec needs a 'table' or 'main_identity' block")
    return {"inputs": spec, "results": results, "checks": checks}


def run_isogeny(spec: dict, level: int, jobs: int, max_cells: int) -> dict:
    q = spec["p"] ** spec.get("r", 1)
    checks = []
    rows = []
    if spec.get("suite") == "full_two_torsion":
        curves = nr.full_two_torsion_curves(q)
    else:
        curves = [nr.WeierstrassCurve.from_ints(q, *c) for c in spec["curves"]]

    def one_curve(E):
        out = []
        for T in nr.two_torsion_points(E):
            E2 = nr.two_isogenous(E, T)
            rep = nr.verify_volume_equality(E, E2, q)
            out.append((E, T, rep))
        return out

    for group in _parallel_map(one_curve, curves, jobs):
        for E, T, rep in group:
            rows.append({
                "curve": [E.a1.encoding(), E.a2.encoding(), E.a3.encoding(),
                          E.a4.encoding(), E.a6.encoding()],
                "kernel_x": T[0].encoding(),
                "count_source": rep["count_source"],
                "count_target": rep["count_target"],
                "volume_source": str(rep["volume_source"]),
                "volume_target": str(rep["volume_target"]),
            })
            checks.append({
                "name": f"equal counts at curve {rows[-1]['curve']} T.x={rows[-1]['kernel_x']}",
                "pass": rep["counts_equal"] and rep["hasse_bound_ok"],
            })
    return {"inputs": spec, "results": {"pairs": rows}, "checks": checks}


# ---------------------------------------------------------------------------
# verify-all battery


def run_verify_all(spec: dict, level: int, jobs: int, max_cells: int) -> dict:
    battery = []

    for q in (3, 5, 7):
        battery.append(("volume", {
            "kind": "scheme", "p": q, "n": 2, "rel_dim": 1,
            "equations": [{"terms": [{"c": 1, "e": [1, 1]}, {"c": -1, "e": [0, 0]}]}],
        }))
    battery.append(("volume", {"kind": "stack", "p": 5, "n": 1,
                               "group": {"kind": "muN", "N": 2, "exponents": [1]}}))
    battery.append(("inertia", {"p": 5, "n": 1,
                                "group": {"kind": "muN", "N": 2, "exponents": [1]}}))
    battery.append(("torsors", {"p": 5, "group": {"kind": "cyclic", "n": 2}}))
    battery.append(("torsors", {"p": 7, "group": {"kind": "cyclic", "n": 3}}))
    battery.append(("hasse", {"p": 5, "N": 2, "chi": 1, "max_val": 2}))
    import random as _random

    rng = _random.Random(20240801)
    D = fr.mirror_data(rng)
    battery.append(("fourier", {"main_identity": fr.main_identity_to_json(D)}))
    battery.append(("isogeny", {"p": 5, "suite": "full_two_torsion"}))

    sub_reports = []
    ok = True
    for name, sub in battery:
        rep = _RUNNERS[name](sub, level, jobs, max_cells)
        passed = _checks_pass(rep)
        ok = ok and passed
        sub_reports.append({
            "command": name,
            "inputs": sub,
            "results": rep["results"],
            "pass": passed,
        })
    return {
        "inputs": {"battery_size": len(battery)},
        "results": {"reports": sub_reports},
        "checks": [{"name": "verify-all battery", "pass": ok}],
    }


_RUNNERS = {
    "volume": run_volume,
    "inertia": run_inertia,
    "torsors": run_torsors,
    "hasse": run_hasse,
    "fourier": run_fourier,
    "isogeny": run_isogeny,
    "verify-all": run_verify_all,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="padicvol",
        description="Exact volumes, torsor counts, Hasse invariants and "
                    "character sums over F_q((t)), with oracle cross-checks.",
    )
    sub = ap.add_subparsers(dest="command", required=True)
    for name in ("volume", "inertia", "torsors", "hasse", "fourier", "isogeny",
                 "verify-all"):
        sp = sub.add_parser(name)
        if name != "verify-all":
            sp.add_argument("--spec", required=True, help="path to the JSON spec")
        sp.add_argument("--level", type=int, default=8,
                        help="refinement level for interval oracles")
        sp.add_argument("--format", choices=("json", "csv", "text"), default="json")
        sp.add_argument("--jobs", type=int, default=1, help="parallelism degree")
        sp.add_argument("--max-cells", type=int, default=10 ** 8,
                        help="guard on enumeration sizes")
        sp.add_argument("--out", default=None, help="write the report to a file")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.level < 1:
        ap.error("--level must be >= 1")
    spec = {}
    if getattr(args, "spec", None):
        try:
            with open(args.spec) as fh:
                spec = json.load(fh)
        except (OSError, json.JSONDecodeError) as e:
            print(f"error: cannot read spec: {e}", file=sys.stderr)
            return 2
    t0 = time.monotonic()
    try:
        report = _RUNNERS[args.command](spec, args.level, args.jobs, args.max_cells)
    except (SpecError, KeyError, ValueError, TypeError) as e:
        print(f"error: {e!r}", file=sys.stderr)
        return 2
    print(f"elapsed: {time.monotonic() - t0:.3f}s", file=sys.stderr)
    if args.out:
        with open(args.out, "w") as fh:
            _emit(report, args.format, fh)
    else:
        _emit(report, args.format)
    return 0 if _checks_pass(report) else 1


if __name__ == "__main__":
    sys.exit(main())
