"""Command-line interface: ``heiscf <command> ...``.

Exit codes: 0 success, 2 parse or validation error, 3 numeric certification
failure, 4 internal invariant violation (including failed ``verify`` checks).
"""

from __future__ import annotations

import argparse
import itertools
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .cf import (
    DigitSeq, DigitUncertain, InvalidDigits, InvariantViolation, RationalSiegel, expand,
    expand_exact, pringsheim_eval, reconstruct,
)
from .dynamics import (
    CylinderWord, PrecisionPolicy, budgeted_histogram, cylinder_nesting, cylinder_probe,
    digit_stats, relative_fluctuation,
)
from .geometric import HPoint, dist4
from .io import (
    ParseError, RunManifest, digits_from_json, digits_to_json, fmt_point, fmt_scalar,
    parse_grid, parse_lattice_point, parse_point, parse_word, read_json, write_csv, write_json,
)
from .lattice import DomainKind
from .report import certificates, verify_digits
from .scalars import to_bigfloat
from .siegel import NotNull

EXIT_OK, EXIT_PARSE, EXIT_NUMERIC, EXIT_INVARIANT = 0, 2, 3, 4

DEFAULT_SEED = "pi-3,e-3,0"
DEFAULT_SEED2 = "sqrt2-1,e-3,pi-3"


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _domain(text: str) -> DomainKind:
    try:
        return DomainKind.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive(text: str) -> int:
    try:
        v = int(float(text)) if "e" in text.lower() else int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return v


def _out_dir(args) -> Path | None:
    if getattr(args, "out_dir", None) is None:
        return None
    path = Path(args.out_dir)
    try:
        path.mkdir(parents=True, exist_ok=True)
        probe = path / ".write-test"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        raise CliError(f"output directory {path} is not writable: {exc.strerror}", EXIT_PARSE) from None
    return path


def _emit(doc: dict, args, name: str, manifest: RunManifest) -> None:
    out = getattr(args, "out", None)
    out_dir = _out_dir(args)
    text = json.dumps(doc, indent=2)
    if out:
        try:
            Path(out).write_text(text + "\n")
        except OSError as exc:
            raise CliError(f"cannot write {out}: {exc.strerror}", EXIT_PARSE) from None
    if out_dir is not None:
        write_json(out_dir / name, doc)
        manifest.write(out_dir / "manifest.json")
    if not out and out_dir is None:
        print(text)


def _plots(args) -> bool:
    return not getattr(args, "no_plots", False)


# -- expand / reconstruct / verify ---------------------------------------------------------

def cmd_expand(args) -> int:
    spec = parse_point(args.point)
    h = spec.evaluate(args.precision)
    manifest = RunManifest("expand", seed=args.point, domain=args.domain.value,
                           iterations=args.max_digits, precision=None if spec.exact else args.precision)
    try:
        e = expand(h, args.domain, args.max_digits)
    except DigitUncertain as exc:
        raise CliError(f"digit uncertain: {exc}", EXIT_NUMERIC) from None
    certs = certificates(e, h)
    doc_extra = {"kind": args.domain.value, "reason": e.reason, "point": args.point,
                 "certified": e.certified, "precision": e.precision}
    if spec.exact:
        ex = expand_exact(RationalSiegel.from_point(h), args.domain)
        if ex.digits != e.digits:
            raise InvariantViolation("integer and geometric expansions disagree")
        doc_extra["denominators"] = [[q.re, q.im] for q in ex.denominators]
    doc = digits_to_json(e.digits, certificates=certs, **doc_extra, manifest=manifest.to_dict())
    out_dir = _out_dir(args)
    if out_dir is not None:
        manifest.outputs = ["digits.json", "manifest.json"]
        if _plots(args) and certs:
            from .plotting import convergence_curve
            convergence_curve([c["n"] for c in certs],
                              {"dist4": [float(Fraction(c["dist4"])) if spec.exact else float(c["dist4"])
                                         for c in certs],
                               "(1/2)^(n+1)": [0.5 ** (c["n"] + 1) for c in certs]},
                              out_dir / "convergence.png", "gauge distance^4 to h")
            manifest.outputs.append("convergence.png")
        doc["manifest"] = manifest.to_dict()
    _emit(doc, args, "digits.json", manifest)
    if args.max_digits is not None and e.reason == "uncertain":
        print(f"digit uncertain after {e.certified} certified digits", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def _load_digits(path) -> tuple[DigitSeq, dict]:
    doc = read_json(path)
    return digits_from_json(doc), doc


def cmd_reconstruct(args) -> int:
    d, _ = _load_digits(args.digits)
    h = reconstruct(d)
    manifest = RunManifest("reconstruct", options={"digits": str(args.digits)})
    doc = {"point": fmt_point(h), "exact": True, "manifest": manifest.to_dict()}
    if getattr(args, "out_dir", None):
        manifest.outputs = ["point.json", "manifest.json"]
        doc["manifest"] = manifest.to_dict()
    _emit(doc, args, "point.json", manifest)
    return EXIT_OK


def cmd_verify(args) -> int:
    d, doc = _load_digits(args.digits)
    if not d.finite:
        raise CliError("verify needs a finite digit sequence", EXIT_PARSE)
    point = None
    source = args.point or doc.get("point")
    if source:
        spec = parse_point(source)
        if spec.exact:
            point = spec.evaluate()
    checks, extra = verify_digits(d, point, doc.get("certificates"))
    width = max(len(c.name) for c in checks)
    lines = [f"{'check'.ljust(width)}  status  detail"]
    lines += [f"{c.name.ljust(width)}  {c.status:<6}  {c.detail}" for c in checks]
    print("\n".join(lines))
    if "pringsheim" in extra:
        print("\nn   bound        dist to final")
        for row in extra["pringsheim"]:
            print(f"{row['n']:<3} {row['bound']:.6e} {row['dist_to_final']:.6e}")
    out_dir = _out_dir(args)
    if out_dir is not None:
        manifest = RunManifest("verify", options={"digits": str(args.digits)},
                               outputs=["verify.json", "manifest.json"])
        write_json(out_dir / "verify.json", {
            "checks": [c.__dict__ for c in checks], "point": fmt_point(extra["point"]),
            "pringsheim": extra.get("pringsheim"), "manifest": manifest.to_dict()})
        manifest.write(out_dir / "manifest.json")
    return EXIT_OK if all(c.ok for c in checks) else EXIT_INVARIANT


# -- pringsheim ------------------------------------------------------------------------

def cmd_pringsheim(args) -> int:
    if args.digits:
        d, _ = _load_digits(args.digits)
        stream, desc = iter(d.digits), str(args.digits)
    else:
        word = parse_word(args.word) if args.word else [parse_lattice_point(args.digit)]
        stream, desc = itertools.cycle(word), args.word or args.digit
    res = pringsheim_eval(stream, args.tolerance, strict=args.strict, max_terms=args.max_terms)
    manifest = RunManifest("pringsheim", seed=desc, iterations=args.max_terms,
                           options={"tolerance": args.tolerance, "strict": args.strict})
    prec = 128
    history = []
    prev = None
    for n, pt, bound in res.history:
        step = float(dist4(prev, pt)) ** 0.25 if prev is not None else None
        history.append({"n": n, "point": [fmt_scalar(to_bigfloat(c, prec)) for c in pt],
                        "bound": bound, "step": step})
        prev = pt
    doc = {"n": len(res.digits), "point": [fmt_scalar(to_bigfloat(c, prec)) for c in res.approximant],
           "bound": res.bound, "converged": res.bound < args.tolerance, "history": history,
           "manifest": manifest.to_dict()}
    out_dir = _out_dir(args)
    if out_dir is not None:
        manifest.outputs = ["pringsheim.json", "manifest.json"]
        if _plots(args):
            from .plotting import convergence_curve
            convergence_curve([r["n"] for r in history],
                              {"certified bound": [r["bound"] for r in history],
                               "successive gap": [r["step"] or 0.0 for r in history]},
                              out_dir / "pringsheim.png", "gauge distance")
            manifest.outputs.append("pringsheim.png")
        doc["manifest"] = manifest.to_dict()
    _emit(doc, args, "pringsheim.json", manifest)
    return EXIT_OK if doc["converged"] else EXIT_NUMERIC


# -- orbit / measure / stats / cylinder ------------------------------------------------

def _seed(args, text: str) -> tuple[HPoint, bool]:
    spec = parse_point(text)
    return spec.evaluate(args.precision), spec.exact


def cmd_orbit(args) -> int:
    from .dynamics import orbit
    h, exact = _seed(args, args.point)
    policy = PrecisionPolicy(args.precision, tail=not args.no_tail)
    try:
        rec = orbit(h, args.domain, args.steps, policy)
    except DigitUncertain as exc:
        raise CliError(f"digit uncertain: {exc}", EXIT_NUMERIC) from None
    manifest = RunManifest("orbit", seed=args.point, domain=args.domain.value, iterations=args.steps,
                           precision=None if exact else args.precision, tail=policy.tail,
                           options={"certified": rec.certified, "terminated": rec.terminated,
                                    "truncated": rec.truncated})
    header = ["n", "x", "y", "t", "gx", "gy", "gt", "gauge4"]

    def rows():
        from .geometric import gauge4
        h0 = rec.start
        coords = fmt_point(h0) if exact else [repr(float(c)) for c in h0]
        g4 = fmt_scalar(gauge4(h0)) if exact else repr(float(gauge4(h0)))
        yield [0, *coords, *rec.gamma0.as_ints(), g4]
        if exact:
            for i, (p, g) in enumerate(zip(rec.exact_points, rec.digits), start=1):
                yield [i, *fmt_point(p), *map(int, g), fmt_scalar(gauge4(p))]
        else:
            g4 = rec.gauge4
            for i in range(len(rec)):
                yield [i + 1, *map(repr, rec.points[i].tolist()), *map(int, rec.digits[i]), repr(float(g4[i]))]

    out_dir = _out_dir(args)
    if out_dir is None:
        import csv
        sys.stdout.write("# manifest: " + json.dumps(manifest.to_dict(), separators=(",", ":")) + "\n")
        csv.writer(sys.stdout).writerows([header, *rows()])
    else:
        manifest.outputs = ["orbit.csv", "manifest.json"]
        if _plots(args) and len(rec):
            from .plotting import orbit_projections
            orbit_projections(rec.points, out_dir / "orbit.png", rec.certified)
            manifest.outputs.append("orbit.png")
        write_csv(out_dir / "orbit.csv", header, rows(), manifest)
        manifest.write(out_dir / "manifest.json")
    print(f"{len(rec)} steps, certified prefix {rec.certified}"
          + (", terminated" if rec.terminated else "") + (", truncated" if rec.truncated else ""),
          file=sys.stderr)
    return EXIT_NUMERIC if rec.truncated else EXIT_OK


def cmd_measure(args) -> int:
    policy = PrecisionPolicy(args.precision)
    h, _ = _seed(args, args.seed)
    out_dir = _out_dir(args)
    try:
        hist, rec, complete = budgeted_histogram(h, args.domain, args.steps, args.grid, policy, args.time_budget)
    except DigitUncertain as exc:
        raise CliError(f"digit uncertain: {exc}", EXIT_NUMERIC) from None
    summary = {"total": hist.total, "steps_requested": args.steps, "certified": rec.certified,
               "complete": complete, "dropped": hist.dropped, "grid": list(hist.shape)}
    if args.stability:
        h2, _ = _seed(args, args.seed2)
        hist2, rec2, complete2 = budgeted_histogram(h2, args.domain, args.steps, args.grid, policy,
                                                    args.time_budget)
        summary["stability"] = {"seed2": args.seed2, "total2": hist2.total, "complete2": complete2,
                                "tv_distance": hist.tv_distance(hist2)}
    manifest = RunManifest("measure", seed=args.seed, domain=args.domain.value, iterations=args.steps,
                           precision=args.precision, tail=True, grid=list(hist.shape),
                           options={"stability": args.stability, "seed2": args.seed2 if args.stability else None,
                                    "time_budget": args.time_budget})
    header = ["ix", "iy", "it", "count"]
    if out_dir is None:
        import csv
        sys.stdout.write("# manifest: " + json.dumps(manifest.to_dict(), separators=(",", ":")) + "\n")
        csv.writer(sys.stdout).writerows([header, *hist.rows()])
        print(json.dumps(summary), file=sys.stderr)
    else:
        manifest.outputs = ["histogram.csv", "summary.json", "manifest.json"]
        if _plots(args):
            from .plotting import histogram_scatter
            histogram_scatter(hist, out_dir / "histogram.png")
            manifest.outputs.append("histogram.png")
        write_csv(out_dir / "histogram.csv", header, hist.rows(), manifest)
        write_json(out_dir / "summary.json", {**summary, "manifest": manifest.to_dict()})
        manifest.write(out_dir / "manifest.json")
        print(json.dumps(summary))
    return EXIT_OK


def cmd_stats(args) -> int:
    from .dynamics import orbit
    h, _ = _seed(args, args.seed)
    bits = args.precision
    rec = orbit(h, args.domain, args.digits, PrecisionPolicy(bits, tail=True))
    st = digit_stats(rec, args.growth_limit)
    growth = st.growth
    summary = {"digits": len(rec), "certified": rec.certified, "distinct_digits": len(st.counts),
               "growth_last": float(growth[-1]) if len(growth) else None,
               "norm_drops": st.norm_drops,
               "growth_fluctuation": relative_fluctuation(growth) if len(growth) >= 4 else None}
    manifest = RunManifest("stats", seed=args.seed, domain=args.domain.value, iterations=args.digits,
                           precision=bits, tail=True, options={"growth_limit": args.growth_limit})
    freq_rows = [[*k, v, st.frequencies[k]] for k, v in st.counts.most_common()]
    out_dir = _out_dir(args)
    if out_dir is None:
        print(json.dumps({**summary, "top_digits": [[list(k), v] for k, v in st.counts.most_common(10)]}, indent=2))
        return EXIT_OK
    manifest.outputs = ["digit_frequencies.csv", "growth.csv", "summary.json", "manifest.json"]
    if _plots(args):
        from .plotting import digit_frequencies, growth_curve
        digit_frequencies(st.frequencies, out_dir / "digit_frequencies.png")
        manifest.outputs.append("digit_frequencies.png")
        if len(growth):
            growth_curve(growth, out_dir / "growth.png")
            manifest.outputs.append("growth.png")
    write_csv(out_dir / "digit_frequencies.csv", ["gx", "gy", "gt", "count", "frequency"], freq_rows, manifest)
    write_csv(out_dir / "growth.csv", ["n", "log_norm_q_over_n"],
              ([i + 1, repr(float(g))] for i, g in enumerate(growth)), manifest)
    write_json(out_dir / "summary.json", {**summary, "manifest": manifest.to_dict()})
    manifest.write(out_dir / "manifest.json")
    print(json.dumps(summary))
    return EXIT_OK


def cmd_cylinder(args) -> int:
    word = parse_word(args.word)
    rng = np.random.default_rng(args.rng_seed)
    rows = []
    probes = []
    for k in range(1, len(word) + 1):
        w = CylinderWord(tuple(word[:k]), args.domain)
        probe = cylinder_probe(w, args.samples, rng)
        probes.append(probe)
        rows.append({"length": k, "samples": probe.samples, "hits": probe.hits,
                     "diameter": probe.diameter, "empirically_full": probe.full,
                     "prefix_consistency": cylinder_nesting(w, probe)})
    manifest = RunManifest("cylinder", seed=args.word, domain=args.domain.value, iterations=args.samples,
                           options={"rng_seed": args.rng_seed})
    doc = {"word": [list(g.as_ints()) for g in word], "prefixes": rows, "manifest": manifest.to_dict()}
    out_dir = _out_dir(args)
    if out_dir is not None:
        manifest.outputs = ["cylinder.json", "manifest.json"]
        if _plots(args):
            from .plotting import cylinder_scatter
            cylinder_scatter(probes[-1].points, out_dir / "cylinder.png",
                             f"sampled cylinder of length {len(word)}")
            manifest.outputs.append("cylinder.png")
        doc["manifest"] = manifest.to_dict()
    _emit(doc, args, "cylinder.json", manifest)
    return EXIT_OK


# -- parser --------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="heiscf", description="Continued fractions on the Heisenberg group.")
    p.add_argument("--version", action="version", version=f"heiscf {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, domain=True, precision=True, out=False):
        if domain:
            sp.add_argument("--domain", type=_domain, default=DomainKind.CUBE,
                            help="fundamental domain: cube or dirichlet (default cube)")
        if precision:
            sp.add_argument("--precision", type=_positive, default=256,
                            help="bits for named irrational seeds (default 256)")
        if out:
            sp.add_argument("--out", help="write the JSON result to this file")
        sp.add_argument("--out-dir", help="write outputs, manifest and figures to this directory")
        sp.add_argument("--no-plots", action="store_true", help="skip figures when writing to --out-dir")

    sp = sub.add_parser("expand", help="continued fraction digits of a point")
    sp.add_argument("--point", required=True, help="x,y,t as a/b, decimals or pi-3, e-3, sqrt2-1")
    sp.add_argument("--max-digits", type=_positive)
    common(sp, out=True)
    sp.set_defaults(func=cmd_expand)

    sp = sub.add_parser("reconstruct", help="evaluate a digit file exactly")
    sp.add_argument("--digits", required=True, help="digits.json")
    common(sp, domain=False, precision=False, out=True)
    sp.set_defaults(func=cmd_reconstruct)

    sp = sub.add_parser("verify", help="check exact identities along a digit file")
    sp.add_argument("--digits", required=True)
    sp.add_argument("--point", help="expected exact value (defaults to the file's point)")
    common(sp, domain=False, precision=False)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("pringsheim", help="evaluate a stream of digits of gauge >= 3")
    src = sp.add_mutually_exclusive_group(required=True)
    src.add_argument("--digit", help="constant stream of this digit, e.g. 3,0,0")
    src.add_argument("--word", help="periodic stream, e.g. '3,0,0;0,0,9'")
    src.add_argument("--digits", help="finite stream from a digits.json file")
    sp.add_argument("--tolerance", type=float, default=1e-10)
    sp.add_argument("--strict", action="store_true", help="require gauge strictly above 3")
    sp.add_argument("--max-terms", type=_positive, default=10_000)
    common(sp, domain=False, precision=False, out=True)
    sp.set_defaults(func=cmd_pringsheim)

    sp = sub.add_parser("orbit", help="Gauss-map orbit as CSV")
    sp.add_argument("--point", default=DEFAULT_SEED)
    sp.add_argument("--steps", type=_positive, default=1000)
    sp.add_argument("--no-tail", action="store_true", help="stop at the end of the certified prefix")
    common(sp)
    sp.set_defaults(func=cmd_orbit)

    sp = sub.add_parser("measure", help="histogram of a long orbit")
    sp.add_argument("--seed", default=DEFAULT_SEED)
    sp.add_argument("--seed2", default=DEFAULT_SEED2, help="second seed for --stability")
    sp.add_argument("--steps", type=_positive, default=1_000_000)
    sp.add_argument("--grid", type=parse_grid, default=(8, 8, 8))
    sp.add_argument("--stability", action="store_true", help="compare against a run from --seed2")
    sp.add_argument("--time-budget", type=float, help="seconds per run before returning partial results")
    common(sp)
    sp.set_defaults(func=cmd_measure)

    sp = sub.add_parser("stats", help="digit frequencies and denominator growth")
    sp.add_argument("--seed", default=DEFAULT_SEED)
    sp.add_argument("--digits", type=_positive, default=1000)
    sp.add_argument("--growth-limit", type=_positive,
                    help="digits used for the growth sequence (default: certified prefix)")
    common(sp)
    sp.set_defaults(func=cmd_stats)

    sp = sub.add_parser("cylinder", help="sample the cylinders of a digit word")
    sp.add_argument("--word", required=True, help="digits separated by ';'")
    sp.add_argument("--samples", type=_positive, default=20000)
    sp.add_argument("--rng-seed", type=int, default=0)
    common(sp, precision=False, out=True)
    sp.set_defaults(func=cmd_cylinder)
    return p


_VALUE_FLAGS = ("--point", "--seed", "--seed2", "--digit", "--word")


def _glue_negative_values(argv: list[str]) -> list[str]:
    # "--point -1,0,0" would otherwise be read as an unknown option
    out, i = [], 0
    while i < len(argv):
        a = argv[i]
        if a in _VALUE_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{a}={argv[i + 1]}")
            i += 2
            continue
        out.append(a)
        i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = parser.parse_args(_glue_negative_values(argv))
    except SystemExit as exc:
        # argparse exits 2 on usage errors and 0 for --help/--version
        return int(exc.code or 0)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (ParseError, InvalidDigits, NotNull) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except DigitUncertain as exc:
        print(f"error: digit uncertain: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (InvariantViolation, ArithmeticError) as exc:
        print(f"error: internal invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
