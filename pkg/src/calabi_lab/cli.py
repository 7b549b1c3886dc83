"""Command-line front end.

Subcommands:

* ``verify``      -- run the full identity suite (exit 0 iff every check passes)
* ``spectrum``    -- eigenvalues and the k-positivity ladder of a model space
* ``thresholds``  -- the Upsilon / Gamma threshold table for a given n
* ``certify``     -- per-bidegree vanishing certificates for a model space

Spaces are described by a small grammar::

    chsc:n=3,c=1        constant holomorphic sectional curvature c
    quadric:n=4         the rank-2 symmetric quadric (c=-1 gives the dual)
    flat:k=2            flat factor of complex dimension k
    random:n=3,seed=9   seeded random Kaehler tensor
    randomke:n=3,seed=9 seeded random Kaehler--Einstein tensor
    product:[A;B;...]   product of the bracketed factor descriptors
    file:PATH           json input (see schemas/input.schema.json)

Exit codes: 0 all checks pass, 1 a check failed, 2 usage or config error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from . import certify as ct
from . import curvature as cv
from . import model_spaces as ms
from .checks import run_verify_suite, stress_probe
from .frames import FrameConvention
from .report import make_envelope, to_csv, to_json, to_table, validate_report
from .spectral import eigensystem, k_test

USAGE_ERROR = 2


class SpaceParseError(ValueError):
    def __init__(self, text: str, pos: int, message: str):
        self.pos = pos
        super().__init__(f"cannot parse space descriptor at position {pos}: {message} "
                         f"(in {text!r})")


def parse_space(text: str, offset: int = 0) -> ms.SpaceDescriptor | dict:
    """Parse the --space grammar; file: inputs return the loaded json payload."""
    text = text.strip()
    if not text:
        raise SpaceParseError(text, offset, "empty descriptor")
    head, sep, rest = text.partition(":")
    head = head.strip().lower()
    if head == "file":
        if not rest:
            raise SpaceParseError(text, offset + len(head), "file: needs a path")
        return _load_input_file(rest.strip())
    if head == "product":
        body = rest.strip()
        if not (body.startswith("[") and body.endswith("]")):
            raise SpaceParseError(text, offset + len(head) + 1,
                                  "product factors must be bracketed, e.g. product:[chsc:n=1;flat:k=1]")
        inner = body[1:-1]
        factors = []
        depth = 0
        start = 0
        for i, ch in enumerate(inner):
            if ch == "[":
                depth += 1
            elif ch == "]":
                depth -= 1
            elif ch == ";" and depth == 0:
                factors.append(parse_space(inner[start:i], offset + start))
                start = i + 1
        factors.append(parse_space(inner[start:], offset + start))
        if any(isinstance(f, dict) for f in factors):
            raise SpaceParseError(text, offset, "file: descriptors cannot be product factors")
        return ms.SpaceDescriptor("product", factors=tuple(factors))

    params: dict[str, float] = {}
    if rest:
        for chunk in rest.split(","):
            if not chunk.strip():
                continue
            key, eq, val = chunk.partition("=")
            if not eq:
                raise SpaceParseError(text, offset + text.find(chunk),
                                      f"expected key=value, got {chunk!r}")
            try:
                params[key.strip()] = float(val)
            except ValueError:
                raise SpaceParseError(text, offset + text.find(chunk),
                                      f"non-numeric value in {chunk!r}") from None
    variants = {"chsc": "chsc", "quadric": "quadric", "flat": "flat",
                "random": "random", "randomke": "random_ke"}
    if head not in variants:
        raise SpaceParseError(text, offset, f"unknown space kind {head!r}")
    n = int(params.pop("n", params.pop("k", 0)))
    c = float(params.pop("c", 1.0))
    seed = int(params.pop("seed", 0))
    if params:
        raise SpaceParseError(text, offset, f"unknown parameters {sorted(params)}")
    desc = ms.SpaceDescriptor(variants[head], n=n, c=c, seed=seed)
    desc.validate()
    return desc


def _load_input_file(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    kind = data.get("kind")
    if kind not in ("calabi", "components"):
        raise ValueError(f"input file kind must be 'calabi' or 'components', got {kind!r}")
    if not isinstance(data.get("n"), int) or data["n"] < 1:
        raise ValueError("input file needs an integer n >= 1")
    return data


def _tensor_from_input(data: dict) -> cv.AlgebraicCurvatureTensor:
    n = data["n"]
    conv = FrameConvention(n)
    if data["kind"] == "calabi":
        return cv.tensor_from_calabi(_calabi_matrix_from_input(data), conv)
    d = 2 * n
    r = np.zeros((d,) * 4)
    for row in data["entries"]:
        i, j, k, l, val = row
        i, j, k, l = (int(i) - 1, int(j) - 1, int(k) - 1, int(l) - 1)
        if not all(0 <= x < d for x in (i, j, k, l)):
            raise ValueError(f"component indices out of range in {row}")
        for (a, b, sa) in ((i, j, 1.0), (j, i, -1.0)):
            for (cc, e, sc) in ((k, l, 1.0), (l, k, -1.0)):
                r[a, b, cc, e] = sa * sc * val
                r[cc, e, a, b] = sa * sc * val
    return cv.validate_tensor(r, conv)


def _calabi_matrix_from_input(data: dict) -> np.ndarray:
    n = data["n"]
    m = n * (n + 1) // 2
    tri = data["hermitian"]
    if len(tri) != m * (m + 1) // 2:
        raise ValueError(
            f"hermitian upper triangle for n={n} needs {m * (m + 1) // 2} entries, got {len(tri)}")
    h = np.zeros((m, m), dtype=complex)
    it = iter(tri)
    for i in range(m):
        for j in range(i, m):
            re, im = next(it)
            h[i, j] = complex(re, im)
            h[j, i] = complex(re, -im)
    return h


def _space_to_spectrum(space) -> tuple[int, np.ndarray, str]:
    """Calabi spectrum of a space descriptor or file payload."""
    if isinstance(space, dict):
        n = space["n"]
        if space["kind"] == "calabi":
            spec = eigensystem(_calabi_matrix_from_input(space), source="calabi")
            return n, spec, "file:calabi"
        t = _tensor_from_input(space)
        return n, cv.calabi_from_tensor(t).spectrum(), "file:components"
    t = ms.build(space)
    return space.complex_dim, cv.calabi_from_tensor(t).spectrum(), space.variant


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_verify(args) -> dict:
    import contextlib

    bug = cv.inject_sign_bug() if args.inject_sign_bug else contextlib.nullcontext()
    with bug:
        records = run_verify_suite(args.n, args.trials, args.seed, max_degree=args.max_degree)
        if args.stress:
            records.append(stress_probe(args.n, args.seed, max_degree=args.max_degree))
    if args.tol_scale != 1.0:
        for r in records:
            if r.get("residual") is not None and r.get("tolerance") is not None:
                r["tolerance"] = r["tolerance"] * args.tol_scale
                r["status"] = "pass" if r["residual"] <= r["tolerance"] else "fail"
    config = {"n": args.n, "trials": args.trials, "seed": args.seed,
              "max_degree": args.max_degree, "tol_scale": args.tol_scale,
              "stress": bool(args.stress),
              "inject_sign_bug": bool(args.inject_sign_bug)}
    return make_envelope("verify", config, records)


def _ladder(n: int, m: int) -> list[float]:
    ks = {1.0, n / 2.0, n / 2.0 + 1.0}
    for p in range(n + 1):
        for q in range(n + 1):
            if 1 <= p + q <= n:
                ks.add(ct.upsilon(n, p, q))
    return sorted(min(k, float(m)) for k in ks if k >= 1.0)


def cmd_spectrum(args) -> dict:
    space = parse_space(args.space)
    n, spec, label = _space_to_spectrum(space)
    records = [{
        "name": "eigenvalues",
        "anchor": "calabi-spectrum",
        "status": "info",
        "residual": None,
        "values": {"space": label, "n": n,
                   "eigenvalues": [float(v) for v in spec.eigenvalues]},
    }]
    for k in _ladder(n, spec.size):
        rep = k_test(spec, k)
        records.append({
            "name": f"k_test[{k:g}]",
            "anchor": "fractional-partial-sum-test",
            "status": "info",
            "residual": None,
            "values": {"k": k, "partial_sum": rep.partial_sum,
                       "nonneg": rep.nonneg, "positive": rep.positive},
        })
    config = {"space": args.space}
    return make_envelope("spectrum", config, records)


def _keep(args, p: int, q: int) -> bool:
    return (args.p is None or p == args.p) and (args.q is None or q == args.q)


def cmd_thresholds(args) -> dict:
    tb = ct.thresholds(args.n)
    records = []
    for (p, q) in sorted(tb.upsilons):
        if not _keep(args, p, q):
            continue
        exact = tb.upsilons_exact[(p, q)]
        g = tb.gammas[(p, q)]
        records.append({
            "name": f"threshold[{p},{q}]",
            "anchor": "vanishing-thresholds",
            "status": "info",
            "residual": None,
            "values": {
                "p": p, "q": q,
                "upsilon": tb.upsilons[(p, q)],
                "upsilon_exact": exact,
                "gamma": g,
            },
        })
    records.append({
        "name": "upsilon_min",
        "anchor": "threshold-lower-bound",
        "status": "pass" if ct.upsilon_min_holds(args.n) else "fail",
        "residual": None,
        "values": {"claim": "upsilon >= n/2 for 1 <= p+q <= n"},
    })
    return make_envelope("thresholds", {"n": args.n, "p": args.p, "q": args.q}, records)


def cmd_certify(args) -> dict:
    space = parse_space(args.space)
    eps = ct.STRICTNESS_EPS if args.eps is None else float(args.eps)
    if args.mode == "calabi":
        n, spec, label = _space_to_spectrum(space)
        cert = ct.certify_calabi(spec, n, eps=eps)
    else:
        if isinstance(space, dict) and space["kind"] == "calabi":
            t = cv.tensor_from_calabi(_calabi_matrix_from_input(space), FrameConvention(space["n"]))
            label = "file:calabi"
        elif isinstance(space, dict):
            t = _tensor_from_input(space)
            label = "file:components"
        else:
            t = ms.build(space)
            label = space.variant
        n = t.convention.n
        ric = cv.ricci(t)
        ksu = cv.restrict_su(cv.kaehler_operator(t), ric)
        cert = ct.certify_ke(ksu.spectrum(), n, eps=eps)
    records = [{
        "name": "summary",
        "anchor": "vanishing-certificate-summary",
        "status": "info",
        "residual": None,
        "values": {"space": label, "mode": cert.mode, "n": cert.n,
                   "summary_certified": cert.summary_certified,
                   "eigenvalues": list(cert.eigenvalues),
                   "notes": cert.notes},
    }]
    for (p, q) in sorted(cert.verdicts):
        if not _keep(args, p, q):
            continue
        v = cert.verdicts[(p, q)]
        records.append({
            "name": f"verdict[{p},{q}]",
            "anchor": "per-bidegree-verdict",
            "status": "info",
            "residual": None,
            "values": {"p": p, "q": q, "status": v.status, "k": v.k,
                       "partial_sum": v.partial_sum, "provenance": v.provenance},
        })
    return make_envelope("certify", {"space": args.space, "mode": args.mode,
                                     "p": args.p, "q": args.q, "eps": eps}, records)


# ---------------------------------------------------------------------------
# argument parsing and entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="calabi-lab", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=f"calabi-lab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--format", choices=("table", "json", "csv"), default="table")
        p.add_argument("--out", default=None, help="output path (default stdout)")

    pv = sub.add_parser("verify", help="run the identity suite")
    pv.add_argument("--n", type=int, default=3)
    pv.add_argument("--trials", type=int, default=50)
    pv.add_argument("--seed", type=int, default=0)
    pv.add_argument("--max-degree", type=int, default=4, dest="max_degree")
    pv.add_argument("--tol-scale", type=float, default=1.0, dest="tol_scale",
                    help="multiply every check tolerance by this factor")
    pv.add_argument("--stress", action="store_true",
                    help="append the estimate-tightness gradient-ascent probe")
    pv.add_argument("--inject-sign-bug", action="store_true", help=argparse.SUPPRESS)
    common(pv)
    pv.set_defaults(fn=cmd_verify)

    ps = sub.add_parser("spectrum", help="Calabi spectrum and k-positivity ladder")
    ps.add_argument("--space", required=True)
    common(ps)
    ps.set_defaults(fn=cmd_spectrum)

    pt = sub.add_parser("thresholds", help="Upsilon/Gamma threshold table")
    pt.add_argument("--n", type=int, required=True)
    pt.add_argument("--p", type=int, default=None, help="restrict to one p")
    pt.add_argument("--q", type=int, default=None, help="restrict to one q")
    common(pt)
    pt.set_defaults(fn=cmd_thresholds)

    pc = sub.add_parser("certify", help="vanishing certificates")
    pc.add_argument("--space", required=True)
    pc.add_argument("--mode", choices=("calabi", "ke"), default="calabi")
    pc.add_argument("--p", type=int, default=None, help="restrict verdicts to one p")
    pc.add_argument("--q", type=int, default=None, help="restrict verdicts to one q")
    pc.add_argument("--eps", type=float, default=None,
                    help="strictness margin relative to the spectral radius")
    common(pc)
    pc.set_defaults(fn=cmd_certify)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        env = args.fn(args)
    except (SpaceParseError, ValueError, OSError, cv.NotKaehler, cv.NotEinstein,
            cv.NotHermitian, cv.SymmetryViolation) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR

    problems = validate_report(env)
    if problems:
        print(f"internal error: report failed schema validation: {problems}", file=sys.stderr)
        return USAGE_ERROR

    if args.format == "json":
        text = to_json(env)
    elif args.format == "csv":
        text = to_csv(env)
    else:
        text = to_table(env)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if env["passed"] else 1


if __name__ == "__main__":
    sys.exit(main())
