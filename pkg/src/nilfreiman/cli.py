"""Command line front end.

Every subcommand writes a JSON report, to ``--output`` when given (with a
one-line summary on stdout) or to stdout otherwise.  Exit codes: 0 success,
1 a checked inequality or invariant failed, 2 usage or resource error.
Errors are reported on stderr as a JSON object.
"""

from __future__ import annotations

import argparse
import json
import random
import sys

from . import kernels
from .approxcert import cert_clauses, certify, check_calculus, doubling
from .finset import NotSymmetricError, SymSet
from .freiman import check_a10, check_centralizer_bound, cover, gleason_check, verify_cover
from .generators import CORPUS, InstanceSpec, random_subalgebra
from .kernels import ResourceCapExceeded
from .ratlinalg import DimensionError, format_rational, parse_rational
from .subalg import InvariantViolation, Subalgebra, lie_closure, subalgebra_to_json
from .unigroup import NilVec


class UsageError(ValueError):
    pass


def dumps(obj) -> str:
    """Canonical JSON text used for every report and golden file."""
    return json.dumps(obj, indent=2, ensure_ascii=True) + "\n"


# -- report builders ----------------------------------------------------------


def instance_json(spec: InstanceSpec | None, A: SymSet) -> dict:
    out = {"instance": None if spec is None else spec.name, "size": len(A)}
    if spec is not None and spec.raw_size() is not None:
        out["raw_size"] = spec.raw_size()
    return out


def certify_report(A: SymSet, spec: InstanceSpec | None = None) -> tuple[dict, bool]:
    c = certify(A)
    clauses = cert_clauses(A, c)
    ok = all(cl.passed for cl in clauses)
    report = {
        **instance_json(spec, A),
        "doubling": format_rational(doubling(A)),
        "certificate": c.to_json(),
        "clauses": [cl.to_json() for cl in clauses],
    }
    return report, ok


def cover_report(A: SymSet, spec: InstanceSpec | None = None, exhaustive: bool = False,
                 with_a10: bool = True) -> tuple[dict, bool]:
    c = certify(A)
    r = cover(A, c, exhaustive_gamma=exhaustive)
    verified = verify_cover(A, r)
    report = {**instance_json(spec, A), "cover": r.to_json(), "verified": verified}
    ok = r.ok and verified
    if with_a10:
        a10 = check_a10(A, r)
        report["a10"] = [cl.to_json() for cl in a10]
        ok = ok and all(cl.passed is not False for cl in a10)
    return report, ok


def centralize_report(A: SymSet, spec: InstanceSpec | None = None, exhaustive: bool = False) -> tuple[dict, bool]:
    rep = check_centralizer_bound(A, certify(A), exhaustive=exhaustive)
    return {**instance_json(spec, A), **rep.to_json()}, rep.ok


def gleason_report(A: SymSet, chain: list[Subalgebra] | None, spec: InstanceSpec | None = None) -> tuple[dict, bool]:
    source = "given"
    if chain is None:
        r = cover(A, certify(A))
        chain = [step.H for step in r.trace]
        source = "cover"
    w = gleason_check(A, chain, strict=False)
    report = {**instance_json(spec, A), "chain_source": source, **w.to_json()}
    return report, not (w.hypothesis_met and w.passed is False)


def calculus_report(A: SymSet, H: Subalgebra, kmax: int, spec: InstanceSpec | None = None) -> tuple[dict, bool]:
    c = certify(A)
    clauses = check_calculus(A, c, H, kmax)
    report = {
        **instance_json(spec, A),
        "K": format_rational(c.K),
        "H": subalgebra_to_json(H),
        "clauses": [cl.to_json() for cl in clauses],
    }
    return report, all(cl.passed is not False for cl in clauses)


def golden_report(spec: InstanceSpec) -> dict:
    """Full deterministic pipeline output stored in the golden files."""
    A = spec.build()
    cert, _ = certify_report(A, spec)
    cent, _ = centralize_report(A, spec)
    cov, _ = cover_report(A, spec)
    return {
        "instance": spec.name,
        "size": len(A),
        "raw_size": spec.raw_size(),
        "set": A.to_json(),
        "certificate": cert,
        "centralizer": cent,
        "cover": cov,
    }


def selftest(kmax: int = 3, n_subalgebras: int = 3, seed: int = 0) -> tuple[dict, bool]:
    rng = random.Random(seed)
    rows, ok = [], True
    for spec in CORPUS:
        A = spec.build()
        c = certify(A)
        entry = {"instance": spec.name, "size": len(A), "K": format_rational(c.K)}
        checks = {"certificate": all(cl.passed for cl in cert_clauses(A, c))}
        checks["centralizer"] = check_centralizer_bound(A, c).ok
        r = cover(A, c)
        checks["cover"] = r.ok
        checks["verify_cover"] = verify_cover(A, r)
        calc = True
        for _ in range(n_subalgebras):
            H = random_subalgebra(A.n, rng)
            calc = calc and all(cl.passed is not False for cl in check_calculus(A, c, H, kmax))
        checks["calculus"] = calc
        entry["final_dim"] = r.final_dim
        entry["checks"] = checks
        ok = ok and all(checks.values())
        rows.append(entry)
    return {"selftest": rows, "ok": ok}, ok


# -- argument handling ------------------------------------------------------------


def _parse_vectors(text: str, n: int) -> list[NilVec]:
    vecs = []
    for part in filter(None, (p.strip() for p in text.split(";"))):
        coords = tuple(parse_rational(x.strip()) for x in part.split(","))
        vecs.append(NilVec.from_coords(n, coords))
    return vecs


def _load_set(args) -> tuple[SymSet, InstanceSpec | None]:
    if args.input and args.instance:
        raise UsageError("give either --input or --instance, not both")
    if args.input:
        with open(args.input) as fh:
            obj = json.load(fh)
        if "elements" not in obj and "set" in obj:
            obj = obj["set"]
        return SymSet.from_json(obj), None
    if args.instance:
        spec = InstanceSpec.parse(args.instance)
        if "n=" not in args.instance and args.n is not None:
            spec = InstanceSpec(spec.kind, spec.params, n=args.n, seed=spec.seed, path=spec.path)
        return spec.build(), spec
    raise UsageError("an input set is required: pass --input FILE or --instance NAME")


def _summary(cmd: str, report: dict, ok: bool) -> str:
    name = report.get("instance") or "input"
    size = report.get("size", len(report.get("elements", ())))
    bits = [f"{cmd}: {name}", f"|A|={size}"]
    if cmd == "cover":
        bits.append(f"k={report['cover']['final_dim']} cosets={len(report['cover']['cosets'])}")
    bits.append("ok" if ok else "FAILED")
    return " ".join(bits)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nilfreiman", description="Exact approximate-group checks in U_n(Q).")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", help="JSON file holding a set {n, elements}")
    common.add_argument("--instance", help="built-in instance, e.g. 'heisenberg_box(2,2,8)'")
    common.add_argument("--output", help="write the JSON report here")
    common.add_argument("--n", type=int, default=None, help="ambient size U_n")
    common.add_argument("--max-set-size", type=int, default=10**7)
    common.add_argument("--max-pairs", type=int, default=None)
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--backend", choices=("numba", "numpy"), default=None)
    sub = ap.add_subparsers(dest="cmd", required=True)
    sub.add_parser("gen", parents=[common], help="emit instance JSON")
    sub.add_parser("certify", parents=[common], help="approximate-group certificate")
    p = sub.add_parser("cover", parents=[common], help="iterative subgroup cover")
    p.add_argument("--exhaustive-gamma", action="store_true")
    p.add_argument("--no-a10", action="store_true", help="skip the |A^10| check")
    p = sub.add_parser("centralize", parents=[common], help="large-centralizer bound")
    p.add_argument("--exhaustive-gamma", action="store_true")
    p = sub.add_parser("gleason", parents=[common], help="growth along a subalgebra chain")
    p.add_argument("--chain", action="append", default=None,
                   help="extra generators for the next H_i as 'v1;v2', comma-separated coordinates; repeat per step")
    p = sub.add_parser("calculus", parents=[common], help="product-set calculus for a subgroup")
    p.add_argument("--h", default="", help="generators of H as 'v1;v2', comma-separated coordinates")
    p.add_argument("--kmax", type=int, default=5)
    p = sub.add_parser("selftest", parents=[common], help="invariant suite on the built-in corpus")
    p.add_argument("--kmax", type=int, default=3)
    return ap


def _dispatch(args) -> tuple[dict, bool]:
    if args.cmd == "selftest":
        return selftest(kmax=args.kmax)
    A, spec = _load_set(args)
    if args.cmd == "gen":
        return A.to_json(), True
    A.require_symmetric()
    if args.cmd == "certify":
        return certify_report(A, spec)
    if args.cmd == "cover":
        return cover_report(A, spec, exhaustive=args.exhaustive_gamma, with_a10=not args.no_a10)
    if args.cmd == "centralize":
        return centralize_report(A, spec, exhaustive=args.exhaustive_gamma)
    if args.cmd == "gleason":
        chain = None
        if args.chain is not None:
            # each --chain adds generators on top of the previous term
            chain = [Subalgebra.zero(A.n)]
            for t in args.chain:
                chain.append(lie_closure(chain[-1].basis_nilvecs() + _parse_vectors(t, A.n), A.n))
        return gleason_report(A, chain, spec)
    if args.cmd == "calculus":
        vecs = _parse_vectors(args.h, A.n)
        H = lie_closure(vecs, A.n) if vecs else Subalgebra.zero(A.n)
        return calculus_report(A, H, args.kmax, spec)
    raise UsageError(f"unknown command {args.cmd}")  # pragma: no cover


def _error(kind: str, exc: BaseException, code: int) -> int:
    print(json.dumps({"error": kind, "message": str(exc)}), file=sys.stderr)
    return code


def run_cli(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    lim = {"max_set_size": args.max_set_size, "workers": args.workers}
    if args.max_pairs is not None:
        lim["max_pairs"] = args.max_pairs
    try:
        if args.backend:
            kernels.set_backend(args.backend)
        with kernels.limits(**lim):
            report, ok = _dispatch(args)
    except InvariantViolation as exc:
        return _error("invariant_violation", exc, 1)
    except ResourceCapExceeded as exc:
        return _error("resource_cap", exc, 2)
    except (OSError, json.JSONDecodeError) as exc:
        return _error("input", exc, 2)
    except (UsageError, NotSymmetricError, DimensionError, ValueError, KeyError) as exc:
        return _error("usage", exc, 2)
    text = dumps(report)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
        print(_summary(args.cmd, report, ok))
    else:
        sys.stdout.write(text)
    return 0 if ok else 1


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":  # pragma: no cover
    main()
