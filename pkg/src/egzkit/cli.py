"""Command-line front end: JSON artifacts in, canonical JSON out.

Exit codes: 0 success or verified, 1 negative answer, 2 error.
"""
from __future__ import annotations

import hashlib
import json
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import click

from . import __version__
from .exact_core import DimensionError, rat_str, rvec, to_rat, vec_str

EXIT_OK, EXIT_NEGATIVE, EXIT_ERROR = 0, 1, 2

DEFAULTS = {
    "budget": None,  # module defaults: 10^8 DP states, 5*10^7 search checks
    "jobs": 1,
    "growth": "affine:8,64",
    "max_steps": 200,
    "crit_window": 50,
}


# ---------------------------------------------------------------- artifacts

def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def digest(obj) -> str:
    return hashlib.sha256(canonical_json(obj).encode()).hexdigest()


class SchemaError(ValueError):
    def __init__(self, pointer, message):
        super().__init__(f"{pointer or '/'}: {message}")
        self.pointer, self.message = pointer, message


class DigestError(ValueError):
    pass


@dataclass(frozen=True)
class Artifact:
    kind: str
    payload: object
    digest: str


def _need(obj, key, ptr, kind=None):
    if not isinstance(obj, dict) or key not in obj:
        raise SchemaError(ptr, f"missing key {key!r}")
    val = obj[key]
    if kind is not None and not isinstance(val, kind):
        raise SchemaError(f"{ptr}/{key}", f"expected {kind.__name__}")
    return val


def _int(val, ptr, lo=None):
    if isinstance(val, bool) or not isinstance(val, int):
        raise SchemaError(ptr, "expected an integer")
    if lo is not None and val < lo:
        raise SchemaError(ptr, f"must be at least {lo}")
    return val


def _rational_vec(val, ptr, length=None):
    if not isinstance(val, list):
        raise SchemaError(ptr, "expected a list")
    if length is not None and len(val) != length:
        raise SchemaError(ptr, f"length {len(val)} differs from {length}")
    for i, a in enumerate(val):
        try:
            to_rat(a)
        except (ValueError, TypeError, ZeroDivisionError):
            raise SchemaError(f"{ptr}/{i}", f"not a rational: {a!r}") from None
    return val


def _check_multiset(obj):
    n = _int(_need(obj, "n", ""), "/n", 2)
    dim = _int(_need(obj, "dim", ""), "/dim", 1)
    for i, e in enumerate(_need(obj, "elements", "", list)):
        vec = _need(e, "vec", f"/elements/{i}", list)
        if len(vec) != dim:
            raise SchemaError(f"/elements/{i}/vec", f"length {len(vec)} differs from dim {dim}")
        for j, a in enumerate(vec):
            _int(a, f"/elements/{i}/vec/{j}")
        _int(_need(e, "mult", f"/elements/{i}"), f"/elements/{i}/mult", 1)
    return n


def _check_polytope(obj):
    d = _int(_need(obj, "ambient_dim", ""), "/ambient_dim", 0)
    verts = _need(obj, "vertices", "", list)
    if not verts:
        raise SchemaError("/vertices", "at least one vertex is required")
    for i, v in enumerate(verts):
        _rational_vec(v, f"/vertices/{i}", d)


def _check_flag(obj):
    ids = set()
    for i, node in enumerate(_need(obj, "nodes", "", list)):
        ids.add(_need(node, "id", f"/nodes/{i}", str))
        d = _int(_need(node, "ambient_dim", f"/nodes/{i}"), f"/nodes/{i}/ambient_dim", 0)
        for j, v in enumerate(_need(node, "vertices", f"/nodes/{i}", list)):
            _rational_vec(v, f"/nodes/{i}/vertices/{j}", d)
    for i, e in enumerate(_need(obj, "order", "", list)):
        if not (isinstance(e, list) and len(e) == 2 and all(x in ids for x in e)):
            raise SchemaError(f"/order/{i}", "expected [lower, upper] with known node ids")
    for i, m in enumerate(_need(obj, "maps", "", list)):
        for key in ("from", "to"):
            if _need(m, key, f"/maps/{i}") not in ids:
                raise SchemaError(f"/maps/{i}/{key}", "unknown node id")
        for j, row in enumerate(_need(m, "matrix", f"/maps/{i}", list)):
            _rational_vec(row, f"/maps/{i}/matrix/{j}")
        _rational_vec(_need(m, "offset", f"/maps/{i}"), f"/maps/{i}/offset")
    for i, g in enumerate(obj.get("omega", [])):
        if _need(g, "node", f"/omega/{i}") not in ids:
            raise SchemaError(f"/omega/{i}/node", "unknown node id")
        _rational_vec(_need(g, "coords", f"/omega/{i}"), f"/omega/{i}/coords")
    return ids


def _check_decomposition(obj):
    ids = _check_flag(obj)
    _int(_need(obj, "p", ""), "/p", 3)
    d = _int(_need(obj, "d", ""), "/d", 1)
    for key in ("spaces", "phi", "f", "K"):
        sec = _need(obj, key, "", dict)
        for x in ids:
            if x not in sec:
                raise SchemaError(f"/{key}", f"missing node {x!r}")
    for x in ids:
        base = _need(obj["spaces"][x], "base", f"/spaces/{x}", list)
        if len(base) != d:
            raise SchemaError(f"/spaces/{x}/base", f"length {len(base)} differs from d {d}")
        for i, e in enumerate(obj["f"][x]):
            if len(_need(e, "vec", f"/f/{x}/{i}", list)) != d:
                raise SchemaError(f"/f/{x}/{i}/vec", f"length differs from d {d}")
            _int(_need(e, "w", f"/f/{x}/{i}"), f"/f/{x}/{i}/w", 1)


def _check_certificate(obj):
    _int(_need(obj, "n", ""), "/n", 2)
    chosen = _need(obj, "chosen", "", list)
    for i, e in enumerate(chosen):
        _need(e, "vec", f"/chosen/{i}", list)
        _int(_need(e, "count", f"/chosen/{i}"), f"/chosen/{i}/count", 1)
    lens = {len(e["vec"]) for e in chosen}
    if len(lens) > 1:
        raise SchemaError("/chosen", "vectors of different lengths")


def detect_kind(obj):
    if isinstance(obj, list):
        return "points"
    if not isinstance(obj, dict):
        raise SchemaError("", "expected a JSON object or list")
    if obj.get("kind") == "zero_sum_certificate":
        return "certificate"
    if "spaces" in obj or isinstance(obj.get("decomposition"), dict):
        return "decomposition"
    if "nodes" in obj:
        return "flag"
    if "elements" in obj:
        return "multiset"
    if "vertices" in obj:
        return "polytope"
    raise SchemaError("", "cannot tell the artifact kind")


def _check_list(obj):
    """Vectors, scalar weights, or weighted flag points."""
    for i, v in enumerate(obj):
        if isinstance(v, list):
            _rational_vec(v, f"/{i}")
        elif isinstance(v, dict):
            _need(v, "node", f"/{i}", str)
            _rational_vec(_need(v, "coords", f"/{i}"), f"/{i}/coords")
            _rational_vec([_need(v, "w", f"/{i}")], f"/{i}/w")
        else:
            _rational_vec([v], f"/{i}")


CHECKS = {"multiset": _check_multiset, "polytope": _check_polytope, "flag": _check_flag,
          "decomposition": _check_decomposition, "certificate": _check_certificate, "points": _check_list}


def load_artifact(path, kind=None) -> Artifact:
    """Read, schema-check and digest a JSON artifact."""
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise SchemaError("", f"invalid JSON: {e}") from None
    found = detect_kind(obj)
    if kind is not None and found != kind:
        raise SchemaError("", f"expected a {kind} artifact, found {found}")
    if found == "decomposition" and "spaces" not in obj:
        # a decomp run result: check the decomposition it carries
        try:
            CHECKS[found](obj["decomposition"])
        except SchemaError as e:
            raise SchemaError("/decomposition" + e.pointer, e.message) from None
    else:
        CHECKS[found](obj)
    return Artifact(found, obj, digest(obj))


def parse_vector(text):
    return rvec([s.strip() for s in text.split(",") if s.strip()])


# ------------------------------------------------------------------ runner

class Outcome(Exception):
    """Carries a result payload and exit code out of a command."""

    def __init__(self, payload, code=EXIT_OK):
        super().__init__()
        self.payload, self.code = payload, code


def emit(payload, code=EXIT_OK):
    raise Outcome(payload, code)


class Runner(click.Group):
    def invoke(self, ctx):
        start = time.perf_counter()
        code = EXIT_OK
        try:
            super().invoke(ctx)
            return
        except Outcome as out:
            payload, code = out.payload, out.code
        except (click.exceptions.Exit, click.exceptions.Abort):
            raise
        except click.ClickException as e:
            payload = {"kind": "error", "type": type(e).__name__, "reason": e.format_message()}
            code = EXIT_ERROR
        except Exception as e:  # every failure is reported as machine-readable JSON
            payload = {"kind": "error", "type": type(e).__name__, "reason": str(e)}
            if isinstance(e, SchemaError):
                payload["pointer"] = e.pointer
            code = EXIT_ERROR
        _write(ctx, payload, code, time.perf_counter() - start)
        ctx.exit(code)


def _write(ctx, payload, code, seconds):
    state = ctx.find_object(State) or State()
    text = canonical_json(payload)
    if state.out:
        Path(state.out).write_text(text + "\n")
    else:
        click.echo(text, err=code == EXIT_ERROR)
    if state.record:
        rec = {"kind": "run_record", "argv": sys.argv[1:], "inputs": state.inputs, "output": digest(payload),
               "exit": code, "seconds": round(seconds, 6), "config": state.config()}
        Path(state.record).write_text(canonical_json(rec) + "\n")


@dataclass
class State:
    jobs: int = 1
    budget: int | None = None
    out: str | None = None
    record: str | None = None

    def __post_init__(self):
        self.inputs = {}

    def config(self):
        cfg = dict(DEFAULTS)
        cfg.update({"jobs": self.jobs, "budget": self.budget, "version": __version__})
        return cfg

    def load(self, path, kind=None):
        art = load_artifact(path, kind)
        self.inputs[str(path)] = art.digest
        return art


pass_state = click.make_pass_decorator(State)


def rational(ctx, param, value):
    if value is None:
        return None
    try:
        return to_rat(value)
    except (ValueError, ZeroDivisionError):
        raise click.BadParameter(f"not a rational: {value}") from None


@click.group(cls=Runner)
@click.option("--jobs", default=1, show_default=True, help="Worker count (throughput only).")
@click.option("--budget", type=int, default=None, help="Cap on search states.")
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Write the result here.")
@click.option("--record", type=click.Path(dir_okay=False), default=None, help="Write a run record here.")
@click.version_option(__version__)
@click.pass_context
def main(ctx, jobs, budget, out, record):
    """Exact zero-sum, hollow polytope, convex flag and decomposition tools."""
    ctx.obj = State(jobs, budget, out, record)


@main.command("config")
@pass_state
def config_cmd(state):
    """Print the configuration snapshot."""
    emit({"kind": "config", **state.config()})


def _cap(state, default):
    return state.budget if state.budget is not None else default


# ----------------------------------------------------------------- zerosum

@main.group()
def zerosum():
    """Zero-sum search and certificate checks."""


@zerosum.command("find")
@click.option("--input", "input_", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--n", "length", type=int, default=None, help="Length of the zero-sum (default: modulus).")
@pass_state
def zerosum_find(state, input_, length):
    from .zerosum import DEFAULT_STATE_CAP, FpMultiset, find_zero_sum

    art = state.load(input_, "multiset")
    X = FpMultiset.from_json(art.payload)
    cert = find_zero_sum(X, length, state_cap=_cap(state, DEFAULT_STATE_CAP), input_digest=art.digest)
    if cert is None:
        emit({"kind": "zero_sum_result", "found": False, "input_digest": art.digest}, EXIT_NEGATIVE)
    assert cert.verify(X)
    emit(cert.to_json())


@zerosum.command("verify")
@click.option("--cert", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--input", "input_", required=True, type=click.Path(exists=True, dir_okay=False))
@pass_state
def zerosum_verify(state, cert, input_):
    from .zerosum import FpMultiset, ZeroSumCertificate

    c = state.load(cert, "certificate")
    art = state.load(input_, "multiset")
    C = ZeroSumCertificate.from_json(c.payload)
    if C.input_digest is not None and C.input_digest != art.digest:
        raise DigestError(f"certificate was issued for {C.input_digest}, input is {art.digest}")
    X = FpMultiset.from_json(art.payload)
    if not C.verify(X):
        raise ValueError("certificate does not verify against the input")
    emit({"kind": "verification", "verified": True, "input_digest": art.digest})


# --------------------------------------------------------------------- egz

@main.group()
def egz():
    """Exact EGZ constants."""


@egz.command("s")
@click.option("--n", "n", required=True, type=int)
@click.option("--d", "d", required=True, type=int)
@pass_state
def egz_s(state, n, d):
    from .zerosum import DEFAULT_STATE_CAP, egz_constant, find_zero_sum

    s, X = egz_constant(n, d, state_cap=_cap(state, DEFAULT_STATE_CAP))
    assert X.size == s - 1 and find_zero_sum(X) is None
    emit({"kind": "egz_constant", "n": n, "d": d, "s": s, "witness": X.to_json()})


@egz.command("w")
@click.option("--p", "p", required=True, type=int)
@click.option("--d", "d", required=True, type=int)
@pass_state
def egz_w(state, p, d):
    from .zerosum import DEFAULT_STATE_CAP, weak_egz_check, weak_egz_constant

    w, S = weak_egz_constant(p, d, state_cap=_cap(state, DEFAULT_STATE_CAP))
    assert weak_egz_check(S, p) is None
    emit({"kind": "weak_egz_constant", "p": p, "d": d, "w": w, "witness": [list(v.coords) for v in S]})


# ------------------------------------------------------------------- poly

@main.group()
def poly():
    """Lattice polytopes."""


def _polytope(state, path):
    from .polytopes import Polytope

    return Polytope.from_json(state.load(path, "polytope").payload)


INPUT = click.option("--input", "input_", required=True, type=click.Path(exists=True, dir_okay=False))


@poly.command("hollow")
@INPUT
@pass_state
def poly_hollow(state, input_):
    from .polytopes import DEFAULT_ENUM_CAP, is_hollow

    P = _polytope(state, input_)
    rep = is_hollow(P, _cap(state, DEFAULT_ENUM_CAP))
    out = rep.to_json()
    out["verdict"] = "hollow" if rep.hollow else "not hollow"
    emit(out, EXIT_OK if rep.hollow else EXIT_NEGATIVE)


@poly.command("integer-points")
@INPUT
@pass_state
def poly_points(state, input_):
    from .polytopes import DEFAULT_ENUM_CAP, integer_points

    P = _polytope(state, input_)
    pts = integer_points(P, _cap(state, DEFAULT_ENUM_CAP))
    emit({"kind": "integer_points", "points": [{"point": vec_str(z), "face": list(f)} for z, f in pts]})


@poly.command("classify2d")
@INPUT
@pass_state
def poly_classify(state, input_):
    from .polytopes import classify_hollow_polygon

    out = classify_hollow_polygon(_polytope(state, input_))
    emit({"kind": "polygon_class", **out}, EXIT_NEGATIVE if out["class"] == "NotHollow" else EXIT_OK)


@poly.command("product")
@click.option("--left", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--right", required=True, type=click.Path(exists=True, dir_okay=False))
@pass_state
def poly_product(state, left, right):
    from .polytopes import is_hollow, product

    P = product(_polytope(state, left), _polytope(state, right))
    out = P.to_json()
    out["hollow"] = is_hollow(P).hollow
    emit(out)


@poly.command("crit")
@INPUT
@click.option("--point", required=True, help="Comma-separated rationals.")
@click.option("--window", default=DEFAULTS["crit_window"], show_default=True, help="Window length above n0.")
@pass_state
def poly_crit(state, input_, point, window):
    from .polytopes import crit_check

    P = _polytope(state, input_)
    first = crit_check(P, parse_vector(point), range(1, 1))
    rep = crit_check(P, parse_vector(point), range(first.n0 + 1, first.n0 + 1 + window))
    emit(rep.to_json(), EXIT_OK if rep.cond1 else EXIT_NEGATIVE)


@poly.command("search")
@click.option("--d", "d", required=True, type=int)
@click.option("--box", required=True, type=int)
@click.option("--k", "k", required=True, type=int)
@pass_state
def poly_search(state, d, box, k):
    from .polytopes import search_hollow

    kw = {} if state.budget is None else {"max_checks": state.budget}
    res = search_hollow(d, box, k, jobs=state.jobs, **kw)
    emit(res.to_json(), EXIT_OK if res.polytopes else EXIT_NEGATIVE)


# ---------------------------------------------------------------- balance

@main.command("balance")
@click.option("--points", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--weights", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--center", required=True, help="Comma-separated rationals.")
@click.option("--theta", required=True, callback=rational)
@click.option("--epsilon", required=True, callback=rational)
@click.option("--n", "n", required=True, type=int)
@pass_state
def balance(state, points, weights, center, theta, epsilon, n):
    from .balanced import WeightedPointSet, integer_balanced

    pts = state.load(points, "points").payload
    ws = state.load(weights, "points").payload
    if len(ws) != len(pts):
        raise SchemaError("", "one weight per point is required")
    S = WeightedPointSet(tuple(pts), tuple(to_rat(w) for w in ws))
    emit(integer_balanced(S, parse_vector(center), theta, epsilon, n).to_json())


# ------------------------------------------------------------------- flag

@main.group()
def flag():
    """Convex flags."""


def _flag(state, path):
    from .flags import ConvexFlag

    return ConvexFlag.from_json(state.load(path, "flag").payload)


@flag.command("validate")
@INPUT
@pass_state
def flag_validate(state, input_):
    from .flags import validate_flag

    rep = validate_flag(_flag(state, input_))
    emit({"kind": "flag_validation", **rep}, EXIT_OK if rep["valid"] else EXIT_NEGATIVE)


@flag.command("helly")
@INPUT
@pass_state
def flag_helly(state, input_):
    from .flags import helly_constants

    emit(helly_constants(_flag(state, input_)).to_json())


@flag.command("centerpoint")
@INPUT
@click.option("--weights", required=True, type=click.Path(exists=True, dir_okay=False),
              help='List of {"node", "coords", "w"}.')
@pass_state
def flag_centerpoint(state, input_, weights):
    from .flags import FlagPoint, centerpoint

    F = _flag(state, input_)
    raw = state.load(weights, "points").payload
    weighted = [(FlagPoint(e["node"], rvec(e["coords"])), to_rat(e["w"])) for e in raw]
    res = centerpoint(F, weighted)
    emit({"kind": "flag_centerpoint", "point": res.point.to_json(), "threshold": rat_str(res.threshold),
          "trace": [{"node": y, "weight": rat_str(v)} for y, v in res.trace]})


@flag.command("hollow")
@INPUT
@pass_state
def flag_hollow(state, input_):
    from .flags import is_hollow_flag

    rep = is_hollow_flag(_flag(state, input_))
    emit({"kind": "flag_hollowness", "hollow": rep.hollow, "violation": rep.violation},
         EXIT_OK if rep.hollow else EXIT_NEGATIVE)


# ----------------------------------------------------------------- expand

@main.group()
def expand():
    """Set-expansion zero-sum pipelines."""


def _pipeline(state, name, input_, K, epsilon, T=None):
    from . import expansion
    from .zerosum import FpMultiset

    art = state.load(input_, "multiset")
    X = FpMultiset.from_json(art.payload)
    fn = getattr(expansion, f"{name}_zero_sum")
    res = fn(X, K, epsilon, T) if name == "tube" else fn(X, K, epsilon)
    out = res.to_json()
    out["kind"] = f"{name}_pipeline"
    out["input_digest"] = art.digest
    if res.certificate is not None:
        assert res.certificate.verify(X)
        out["certificate"]["input_digest"] = art.digest
    emit(out, EXIT_OK if res.certificate is not None else EXIT_NEGATIVE)


EXPAND_OPTS = [
    click.option("--input", "input_", required=True, type=click.Path(exists=True, dir_okay=False)),
    click.option("--K", "K", required=True, type=int),
    click.option("--epsilon", required=True, callback=rational),
]


def expand_options(fn):
    for opt in reversed(EXPAND_OPTS):
        fn = opt(fn)
    return fn


@expand.command("thick")
@expand_options
@pass_state
def expand_thick(state, input_, K, epsilon):
    _pipeline(state, "thick", input_, K, epsilon)


@expand.command("thin")
@expand_options
@pass_state
def expand_thin(state, input_, K, epsilon):
    _pipeline(state, "thin", input_, K, epsilon)


@expand.command("tube")
@expand_options
@click.option("--T", "T", type=int, default=None, help="Dependence norm cap (default 8R).")
@pass_state
def expand_tube(state, input_, K, epsilon, T):
    _pipeline(state, "tube", input_, K, epsilon, T)


# ----------------------------------------------------------------- decomp

@main.group()
def decomp():
    """Flag decompositions of weight functions on F_p^d."""


def _weights_of(art):
    from .exact_core import is_prime

    obj = art.payload
    if not is_prime(obj["n"]) or obj["n"] < 3:
        raise SchemaError("/n", "decompositions need an odd prime modulus")
    return {tuple(e["vec"]): e["mult"] for e in obj["elements"]}, obj["n"], obj["dim"]


@decomp.command("run")
@INPUT
@click.option("--epsilon", callback=rational, default=None, help="Default 4^-d/2.")
@click.option("--delta0", callback=rational, default=None, help="Default 3^-(d+1) eps/2.")
@click.option("--growth", default=DEFAULTS["growth"], show_default=True)
@click.option("--max-steps", default=DEFAULTS["max_steps"], show_default=True)
@pass_state
def decomp_run(state, input_, epsilon, delta0, growth, max_steps):
    from .decomposition import Growth, decompose

    f, p, d = _weights_of(state.load(input_, "multiset"))
    res = decompose(f, p, d, epsilon, delta0, Growth.parse(growth), max_steps)
    out = res.to_json()
    ok = res.terminated and all(res.conclusions[k]["holds"] for k in ("boundedness", "completeness", "large_gap"))
    emit(out, EXIT_OK if ok else EXIT_NEGATIVE)


@decomp.command("verify")
@INPUT
@click.option("--against", required=True, type=click.Path(exists=True, dir_okay=False))
@pass_state
def decomp_verify(state, input_, against):
    from .decomposition import FlagDecomposition, validate_decomposition

    art = state.load(input_, "decomposition")
    obj = art.payload.get("decomposition", art.payload)
    D = FlagDecomposition.from_json(obj)
    f, p, d = _weights_of(state.load(against, "multiset"))
    if (p, d) != (D.p, D.d):
        raise DimensionError(f"decomposition is over F_{D.p}^{D.d}, weights over F_{p}^{d}")
    rep = validate_decomposition(D, f)
    emit(rep.to_json(), EXIT_OK if rep.valid else EXIT_NEGATIVE)


@decomp.command("wstr")
@INPUT
@click.option("--set", "set_", required=True, type=click.Path(exists=True, dir_okay=False),
              help="JSON list of vectors in F_p^d.")
@pass_state
def decomp_wstr(state, input_, set_):
    from .decomposition import FlagDecomposition, wstr_verify

    art = state.load(input_, "decomposition")
    D = FlagDecomposition.from_json(art.payload.get("decomposition", art.payload))
    S = [tuple(int(a) for a in v) for v in state.load(set_, "points").payload]
    out = wstr_verify(S, D)
    emit(out, EXIT_OK if out["accepted"] else EXIT_NEGATIVE)


# ----------------------------------------------------------------- report

@main.command("report")
@click.option("--out", "report_out", required=True, type=click.Path(dir_okay=False))
@click.option("--only", default=None, help="Comma-separated criterion numbers.")
@pass_state
def report(state, report_out, only):
    """Run the acceptance criteria and write a markdown table."""
    from .acceptance import CRITERIA, run_criterion

    wanted = None if only is None else {int(s) for s in only.split(",")}
    rows = []
    for crit in CRITERIA:
        if wanted is not None and crit.number not in wanted:
            continue
        rows.append(run_criterion(crit, jobs=state.jobs))
    lines = ["| # | criterion | result | seconds | detail |", "|---|---|---|---|---|"]
    for r in rows:
        lines.append(f"| {r['number']} | {r['title']} | {'pass' if r['passed'] else 'FAIL'} | "
                     f"{r['seconds']:.1f} | {r['detail']} |")
    Path(report_out).write_text("\n".join(lines) + "\n")
    passed = all(r["passed"] for r in rows)
    emit({"kind": "acceptance_report", "out": report_out, "passed": passed,
          "criteria": [{k: v for k, v in r.items() if k != "seconds"} for r in rows]},
         EXIT_OK if passed else EXIT_NEGATIVE)


def run_command(argv) -> int:
    """Run the CLI in-process and return its exit code."""
    try:
        rv = main.main(args=list(argv), prog_name="egzkit", standalone_mode=False)
    except click.exceptions.Exit as e:
        return e.exit_code
    except click.ClickException as e:
        e.show()
        return EXIT_ERROR
    except click.exceptions.Abort:
        return EXIT_ERROR
    return rv if isinstance(rv, int) else EXIT_OK
