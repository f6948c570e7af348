"""Batch driver: ``orderforge run``, ``orderforge check``, ``orderforge list``."""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import re
import sys
import time
from importlib import resources

from . import __version__
from .algebra import Poly
from .azumaya import (azumaya_test, module_end, reduced_norm_deg2,
                      sc_algebra_as_order, twisted_cokernel)
from .fpmod import (FPModule, annihilator, bidual_map, ext, fitting_nonfree_locus,
                    generic_rank, hom)
from .groebner import INF, Ideal, colon, krull_dimension, resolve, syzygy_vecs, vec_to_polys
from .homological import (AtLeast, ab_verify, depth_regseq, depth_at_prime, depth_ext,
                          is_regular_element, projective_dimension, reflexive_certificate,
                          torsionfree_test)
from .orders import (maximality_certificate, module_text, pair_search,
                     surface_order, syzygy_order, theorem1_construct)
from .taskfile import REQUIRED, Resolver, TaskFileError, parse_task_file

TOOL = "orderforge"
CERTIFIED_ALIAS = {"certified": "certified_non_azumaya_maximal_order"}


# ---------------------------------------------------------------- formatting


def jsonable(x):
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, int):
        return x
    if isinstance(x, float):
        return "inf" if x == INF else x
    if isinstance(x, FPModule):
        return module_text(x)
    if isinstance(x, AtLeast):
        return str(x)
    return str(x)


# ---------------------------------------------------------------- operations

OPS: dict = {}


def op(name, **signature):
    def wrap(fn):
        OPS[name] = (fn, {k: (v if isinstance(v, tuple) else (v, REQUIRED)) for k, v in signature.items()})
        return fn
    return wrap


@op("gb", ideal="ideal")
def _gb(a, ctx):
    gens = a["ideal"].reduced_gens()
    return Ideal(a["ideal"].ring, gens), {"gb": [str(g) for g in gens], "size": len(gens)}


@op("normal_form", ideal="ideal", poly="poly")
def _normal_form(a, ctx):
    return a["ideal"].normal_form(a["poly"]), {}


@op("dimension", ideal="ideal")
def _dimension(a, ctx):
    dim, codim = krull_dimension(a["ideal"])
    return dim, {"dim": dim, "codim": codim}


@op("colon", ideal="ideal", by="ideal")
def _colon(a, ctx):
    by = a["by"]
    arg = by.gens[0] if len(by.gens) == 1 else by
    return colon(a["ideal"], arg), {}


@op("syzygies", matrix="matrix")
def _syzygies(a, ctx):
    rows = a["matrix"]
    ring = ctx.ring
    cols = [{(r, e): c for r in range(len(rows)) for e, c in rows[r][j].terms.items()}
            for j in range(len(rows[0]))]
    syz = [vec_to_polys(ring, v, len(cols)) for v in syzygy_vecs(ring, cols, len(rows))]
    return len(syz), {"syzygies": [[str(p) for p in s] for s in syz]}


@op("resolution", module="module", length=("int", None), minimal=("bool", True))
def _resolution(a, ctx):
    M = a["module"]
    length = a["length"] if a["length"] is not None else ctx.ring.nvars + 1
    F = resolve(M.ring, M.rank, list(M.rels), length, minimal=a["minimal"])
    return F.betti(), {"betti": F.betti(), "length": F.length, "complete": F.complete,
                       "complex": F.check_complex(), "exact": F.check_exact()}


@op("depth", ideal="ideal", module="module", max_search=("int", 50))
def _depth(a, ctx):
    rep = depth_regseq(a["ideal"], a["module"], max_search=a["max_search"], seed=ctx.seed)
    return rep.depth, rep.to_dict()


@op("depth_ext", ideal="ideal", module="module")
def _depth_ext(a, ctx):
    d = depth_ext(a["ideal"], a["module"])
    return d, {"depth": d}


@op("depth_at_prime", prime="ideal", module="module")
def _depth_at_prime(a, ctx):
    d = depth_at_prime(a["prime"], a["module"])
    return d, {"depth": d}


@op("depth_drop", ideal="ideal", module="module", element="poly")
def _depth_drop(a, ctx):
    I, M, r = a["ideal"], a["module"], a["element"]
    if not I.contains(r):
        raise ValueError(f"{r} is not in {I}")
    if not is_regular_element(r, M):
        raise ValueError(f"{r} is not a non-zero-divisor on the module")
    d0 = depth_ext(I, M)
    d1 = depth_ext(I, M.mod_element(r))
    drop = d0 - d1
    return drop, {"depth": d0, "depth_quotient": d1, "drop": drop, "regular": True}


@op("pd", module="module")
def _pd(a, ctx):
    p = projective_dimension(a["module"])
    return p, {"pd": p}


@op("ab", module="module", ideal="ideal")
def _ab(a, ctx):
    rep = ab_verify(a["module"], a["ideal"])
    return rep.holds, rep.to_dict()


@op("torsion_free", module="module")
def _torsion_free(a, ctx):
    rep = torsionfree_test(a["module"])
    return rep.torsion_free, rep.to_dict()


@op("reflexive", module="module", primes=("ideals", None))
def _reflexive(a, ctx):
    cert = reflexive_certificate(a["module"], primes=a["primes"] or ())
    return cert.verdict, cert.to_dict()


@op("bidual", module="module")
def _bidual(a, ctx):
    b = bidual_map(a["module"])
    return b.is_iso, {"injective": b.is_injective, "surjective": b.is_surjective, "iso": b.is_iso,
                      "dual": b.Mdual.pruned(), "bidual": b.Mbidual.pruned()}


@op("double_dual", ideal="ideal")
def _double_dual(a, ctx):
    J = a["ideal"]
    b = bidual_map(FPModule.from_ideal(J))
    P = b.Mbidual.pruned()
    trivial = P.rank == 1 and not P.rels
    return ("R" if trivial else module_text(P)), {
        "bidual": P, "free_rank_one": trivial, "eta_injective": b.is_injective,
        "eta_iso": b.is_iso, "cokernel": b.cokernel.pruned()}


@op("rank", module="module")
def _rank(a, ctx):
    r = generic_rank(a["module"])
    return r, {"rank": r}


@op("fitting_locus", module="module")
def _fitting(a, ctx):
    loc = fitting_nonfree_locus(a["module"])
    return loc.locus_codim, {"rank": loc.rank, "locus": loc.locus_ideal, "codim": loc.locus_codim}


@op("annihilator", module="module")
def _annihilator(a, ctx):
    return annihilator(a["module"]), {}


@op("ext", i="int", source="module", target=("module", "R"))
def _ext(a, ctx):
    E = ext(a["i"], a["source"], a["target"]).pruned()
    zero = E.is_zero()
    return ("0" if zero else module_text(E)), {"zero": zero, "module": E}


@op("hom", source="module", target=("module", "R"))
def _hom(a, ctx):
    H = hom(a["source"], a["target"]).pruned()
    return module_text(H), {"module": H, "rank": generic_rank(H) if H.ring.domain else None}


@op("azumaya", algebra="algebra")
def _azumaya(a, ctx):
    rep = azumaya_test(a["algebra"])
    return rep.is_azumaya, rep.to_dict()


@op("nrd", algebra="algebra", element="element")
def _nrd(a, ctx):
    return reduced_norm_deg2(a["element"]), {}


@op("twisted", algebra="algebra", f="element", g="element", point=("ideal", None))
def _twisted(a, ctx):
    E = twisted_cokernel(a["algebra"], a["f"], a["g"])
    loc = fitting_nonfree_locus(E.unfolded)
    out = {"injective": E.injective, "injective_by": E.injective_by,
           "presentation": E.unfolded, "rank": loc.rank,
           "locus": loc.locus_ideal, "codim": loc.locus_codim}
    if a["point"] is not None:
        # V(point) inside the locus iff locus ideal inside point
        out["contains_point"] = loc.locus_ideal.issubset(a["point"])
    return loc.locus_codim, out


@op("theorem1", algebra="algebra", f="element", g="element", primes=("ideals", None),
    target=("ideal", None))
def _theorem1(a, ctx):
    cert = theorem1_construct(a["algebra"], a["f"], a["g"], primes=a["primes"] or (),
                              target=a["target"])
    return cert.verdict, cert.to_dict()


@op("pair_search", algebra="algebra", target="ideal", pool_degree=("int", 2), budget=("int", 500),
    seed=("int", None))
def _pair_search(a, ctx):
    seed = ctx.seed if a["seed"] is None else a["seed"]
    res = pair_search(a["algebra"], a["target"], pool_degree=a["pool_degree"], budget=a["budget"],
                      threads=ctx.threads, seed=seed)
    verdict = res.certificate.verdict if res.found else "budget_exhausted"
    out = res.to_dict()
    out["verdict"] = verdict
    out["seed"] = seed
    return verdict, out


@op("syzygy_order", n=("int", 2))
def _syzygy_order(a, ctx):
    cert = syzygy_order(ctx.ring, a["n"])
    return cert.verdict, cert.to_dict()


@op("surface_order", module="module")
def _surface_order(a, ctx):
    cert = surface_order(ctx.ring, a["module"])
    return cert.verdict, cert.to_dict()


@op("maximality", algebra=("algebra", None), module=("module", None), max_tries=("int", 5000))
def _maximality(a, ctx):
    if (a["algebra"] is None) == (a["module"] is None):
        raise ValueError("maximality needs exactly one of algebra= or module=")
    L = sc_algebra_as_order(a["algebra"]) if a["algebra"] is not None else module_end(a["module"])
    rec = maximality_certificate(L, max_tries=a["max_tries"])
    return rec.holds, rec.to_dict()


SIGNATURES = {name: sig for name, (_, sig) in OPS.items()}


# ---------------------------------------------------------------- running


class Context:
    def __init__(self, ring, seed, threads):
        self.ring = ring
        self.seed = seed
        self.threads = threads


def _norm(text: str) -> str:
    return re.sub(r"\s+", "", str(text)).lower()


def _scalar_text(x) -> str:
    x = jsonable(x)
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (list, dict)):
        return json.dumps(x, separators=(",", ":"))
    return str(x)


def _matches(block, expected: str, actual) -> bool:
    want = CERTIFIED_ALIAS.get(expected.strip(), expected)
    if want.strip() == "rejected" and isinstance(actual, str):
        return actual.startswith("rejected(")
    if _norm(want) == _norm(_scalar_text(actual)):
        return True
    # algebraic comparison for ideals and polynomials
    res = Resolver(block)
    try:
        if isinstance(actual, Ideal):
            return res.ideal(want, 0, 0) == actual
        if isinstance(actual, Poly):
            return res.poly(want, 0, 0) == actual
        if isinstance(actual, str) and actual.startswith("(") and want.strip().startswith("("):
            return res.ideal(want, 0, 0) == res.ideal(actual, 0, 0)
    except (TaskFileError, ValueError):
        return False
    return False


def _field(result: dict, path: str):
    cur = result
    for part in path.split("."):
        if isinstance(cur, dict) and part in cur:
            cur = cur[part]
        elif isinstance(cur, list) and part.isdigit() and int(part) < len(cur):
            cur = cur[int(part)]
        elif isinstance(cur, list) and all(isinstance(c, dict) and "name" in c for c in cur):
            hit = next((c for c in cur if c["name"] == part), None)
            if hit is None:
                raise KeyError(path)
            cur = hit
        else:
            raise KeyError(path)
    return cur


_ERROR_EXPECT = re.compile(r"error(?:\((\w+)\))?")


def _is_internal(exc: BaseException) -> bool:
    return isinstance(exc, AssertionError) or not isinstance(exc, (ValueError, RuntimeError, ArithmeticError))


def run_task(block, task, seed: int, threads: int) -> dict:
    fn, sig = OPS[task.op]
    args = {k: task.args[k].value for k in sig}
    ctx = Context(block.ring, seed, threads)
    entry = {"line": task.line, "op": task.op,
             "args": {k: task.args[k].text for k in sig if task.args[k].text != ""},
             "expect": dict(task.expect)}
    t0 = time.perf_counter()
    value = result = error = None
    internal = False
    try:
        value, result = fn(args, ctx)
    except Exception as exc:  # noqa: BLE001  (each task is isolated)
        error = {"type": type(exc).__name__, "message": str(exc)}
        internal = _is_internal(exc)
        err_names = {c.__name__ for c in type(exc).__mro__}
    entry["wall_time"] = round(time.perf_counter() - t0, 4)
    failures = []
    if error is not None:
        want = task.expect.get("value", "")
        m = _ERROR_EXPECT.fullmatch(want.strip())
        if m and (m.group(1) is None or m.group(1) in err_names) and not internal:
            status = "pass"
        else:
            status = "error"
    else:
        for key, want in task.expect.items():
            if key == "value":
                actual = value
            else:
                try:
                    actual = _field(result, key)
                except KeyError:
                    failures.append(f"no field {key!r}")
                    continue
            if not _matches(block, want, actual):
                failures.append(f"{key}: expected {want}, got {_scalar_text(actual)}")
        status = "fail" if failures else "pass"
    entry.update({"status": status, "value": jsonable(value), "result": jsonable(result),
                  "error": error, "failures": failures, "internal": internal})
    return entry


def determinism_hash(report: dict) -> str:
    stripped = json.loads(json.dumps(report))
    stripped.pop("determinism_hash", None)
    for t in stripped.get("tasks", []):
        t.pop("wall_time", None)
    stripped.get("summary", {}).pop("wall_time", None)
    blob = json.dumps(stripped, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


def run_source(source: str, name: str, seed: int = 0, threads: int = 1, log=None) -> dict:
    """Parse and run a task file; returns the report dict (raises TaskFileError)."""
    tf = parse_task_file(source, name, SIGNATURES)
    tasks = []
    t0 = time.perf_counter()
    for block, task in tf.tasks:
        entry = run_task(block, task, seed, threads)
        tasks.append(entry)
        if log:
            log(entry)
    counts = {s: sum(1 for t in tasks if t["status"] == s) for s in ("pass", "fail", "error")}
    report = {
        "tool": TOOL, "version": __version__, "seed": seed,
        "source": {"name": os.path.basename(name), "sha256": hashlib.sha256(source.encode()).hexdigest(),
                   "text": source},
        "tasks": tasks,
        "summary": dict(counts, total=len(tasks), wall_time=round(time.perf_counter() - t0, 4)),
    }
    report["determinism_hash"] = determinism_hash(report)
    return report


def exit_code(report: dict) -> int:
    if any(t["internal"] for t in report["tasks"]):
        return 2
    if any(t["status"] != "pass" for t in report["tasks"]):
        return 1
    return 0


# ---------------------------------------------------------------- builtins


def builtin_names() -> list:
    files = resources.files("orderforge").joinpath("tasks")
    return sorted(p.name[:-5] for p in files.iterdir() if p.name.endswith(".task"))


def builtin_source(name: str) -> str:
    path = resources.files("orderforge").joinpath("tasks", f"{name}.task")
    if not path.is_file():
        raise FileNotFoundError(f"no built-in task file {name!r}; see 'orderforge list'")
    return path.read_text(encoding="utf-8")


def load(target: str):
    if target.startswith("builtin:"):
        name = target[len("builtin:"):]
        return builtin_source(name), f"{name}.task"
    with open(target, encoding="utf-8") as fh:
        return fh.read(), target


# ---------------------------------------------------------------- commands


def _print_entry(entry, out=sys.stdout):
    val = _scalar_text(entry["value"]) if entry["error"] is None else \
        f"{entry['error']['type']}: {entry['error']['message']}"
    if len(val) > 100:
        val = val[:97] + "..."
    print(f"line {entry['line']:>3}  {entry['op']:<15} {entry['status']:<5}  {val}  "
          f"({entry['wall_time']:.2f}s)", file=out)
    for f in entry["failures"]:
        print(f"          {f}", file=out)
    out.flush()


def cmd_run(ns) -> int:
    try:
        source, name = load(ns.taskfile)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        report = run_source(source, name, seed=ns.seed, threads=ns.threads,
                            log=None if ns.quiet else _print_entry)
    except TaskFileError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    s = report["summary"]
    print(f"{s['pass']} passed, {s['fail']} failed, {s['error']} errors  "
          f"hash {report['determinism_hash'][:16]}")
    if ns.out:
        with open(ns.out, "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
            fh.write("\n")
    code = exit_code(report)
    if ns.check:
        ok = _compare(ns.check, report)
        code = code if ok else max(code, 1)
    return code


def _compare(prior_path: str, report: dict) -> bool:
    with open(prior_path, encoding="utf-8") as fh:
        prior = json.load(fh)
    if prior.get("determinism_hash") == report["determinism_hash"]:
        print(f"check: matches {prior_path}")
        return True
    old = {t["line"]: t for t in prior.get("tasks", [])}
    for t in report["tasks"]:
        p = old.get(t["line"])
        if p is None or (p.get("value"), p.get("result"), p.get("status")) != \
                (t["value"], t["result"], t["status"]):
            print(f"check: line {t['line']} ({t['op']}) differs from {prior_path}")
    print("check: determinism hash differs")
    return False


def cmd_check(ns) -> int:
    try:
        with open(ns.report, encoding="utf-8") as fh:
            prior = json.load(fh)
        source = prior["source"]["text"]
        seed = prior["seed"]
    except (OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: cannot read report: {exc}", file=sys.stderr)
        return 2
    if determinism_hash(prior) != prior.get("determinism_hash"):
        print("check: stored hash does not match the report contents")
        return 1
    try:
        report = run_source(source, prior["source"]["name"], seed=seed, threads=ns.threads)
    except TaskFileError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    ok = _compare(ns.report, report)
    if exit_code(report) == 2:
        return 2
    return 0 if ok else 1


def cmd_list(ns) -> int:
    for name in builtin_names():
        first = builtin_source(name).splitlines()[0].lstrip("# ").strip()
        print(f"builtin:{name:<22} {first}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog=TOOL, description="Certifying computations for orders over polynomial rings.")
    p.add_argument("--version", action="version", version=f"{TOOL} {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run a task file")
    r.add_argument("taskfile", help="path, or builtin:NAME")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--threads", type=int, default=1)
    r.add_argument("--out", help="write the JSON report here")
    r.add_argument("--check", metavar="PRIOR", help="compare against a prior report")
    r.add_argument("-q", "--quiet", action="store_true")
    r.set_defaults(func=cmd_run)
    c = sub.add_parser("check", help="re-run a report's embedded task file and compare")
    c.add_argument("report")
    c.add_argument("--threads", type=int, default=1)
    c.set_defaults(func=cmd_check)
    lst = sub.add_parser("list", help="list built-in task files")
    lst.set_defaults(func=cmd_list)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    if getattr(ns, "seed", 0) < 0 or getattr(ns, "seed", 0) >= 2 ** 64:
        print("error: --seed must be an unsigned 64-bit integer", file=sys.stderr)
        return 2
    if getattr(ns, "threads", 1) < 1:
        print("error: --threads must be at least 1", file=sys.stderr)
        return 2
    return ns.func(ns)


if __name__ == "__main__":
    sys.exit(main())
