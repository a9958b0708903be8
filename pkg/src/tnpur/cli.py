"""Command line front end.

Subcommands map one-to-one onto the library surface: build the d=7
matrix-product tensor of an integer instance, scan its weights for a
negative word, compute canonical decompositions, run power-sum
utilities, fit and verify local purifications, and drive the combined
fit/scan loop.  Exit codes: 0 on clean or successful outcomes, 2 when a
negative witness is found or a verification fails, 1 on usage, schema
or numeric errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction

import numpy as np

from .canonical import canonicalize
from .errors import TnpurError
from .positivity import heuristic_negative_search, scan_classical
from .purifier import (
    PurifySearchConfig,
    fit_purification,
    semi_decision_loop,
    theoretical_length_bound,
    verify_purification,
)
from .reduction import (
    build_reduction,
    oracle_trace,
    random_instance,
    sym_basis_isometry,
    sym_pair_maps,
)
from .serialize import (
    canonical_to_json,
    jsonable,
    load_tensor,
    load_zulc,
    save_tensor,
    tensor_to_json,
)
from .powersum import (
    PowerSumFamily,
    first_nonzero_power,
    multiset_from_power_sums,
    power_sums,
    proportional_powersum_families,
)
from .tensors import (
    MpsTensor,
    PurificationTensor,
    exact_eye,
    flip_operator,
    sym_projector,
    word_trace,
)

__all__ = ["main"]


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on bad usage; we reserve 2 for findings."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _parse_lengths(spec: str) -> tuple[int, ...]:
    """Accept "1..8" or a comma list like "1,2,5"."""
    spec = spec.strip()
    if ".." in spec:
        lo, hi = spec.split("..", 1)
        out = tuple(range(int(lo), int(hi) + 1))
    else:
        out = tuple(int(x) for x in spec.split(","))
    if not out or min(out) < 1:
        raise ValueError(f"invalid length specification {spec!r}")
    return out


def _parse_rationals(spec: str) -> list[Fraction]:
    try:
        return [Fraction(part.strip()) for part in spec.split(",") if part.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"invalid rational list {spec!r}: {exc}") from exc


def _parse_pair(spec: str) -> tuple[list[Fraction], list[Fraction]]:
    if spec.count(":") != 1:
        raise ValueError(f"a pair must look like 'mu1,mu2:nu1,nu2', got {spec!r}")
    left, right = spec.split(":")
    return _parse_rationals(left), _parse_rationals(right)


def _write_json(path: str, payload) -> None:
    text = json.dumps(jsonable(payload), sort_keys=True, separators=(",", ":"))
    with open(path, "w") as fh:
        fh.write(text + "\n")


def _print_json(payload) -> None:
    print(json.dumps(jsonable(payload), sort_keys=True, indent=2))


def _exact_weight(t: MpsTensor, word) -> Fraction:
    val = word_trace(t.to_exact(), word)
    if val.im != 0:
        raise ValueError(f"word {tuple(word)} has a non-real weight")
    return val.re


def _load_mps(path: str) -> MpsTensor:
    t = load_tensor(path)
    if not isinstance(t, MpsTensor):
        raise ValueError(f"{path} holds a purification-form tensor, expected a plain one")
    return t


def _load_purification(path: str) -> PurificationTensor:
    t = load_tensor(path)
    if not isinstance(t, PurificationTensor):
        raise ValueError(f"{path} holds a plain tensor, expected a purification-form one")
    return t


# ---------------------------------------------------------------------------
# subcommands


def _cmd_reduce(args) -> int:
    z = load_zulc(args.input)
    t = build_reduction(z, mode=args.mode)
    save_tensor(t, args.out)
    report = {
        "command": "reduce",
        "config": {"input": args.input, "mode": args.mode, "out": args.out},
        "outcome": {"d": t.d, "D": t.D, "mode": t.mode},
    }
    if args.json:
        _print_json(report)
    else:
        print(f"built d={t.d} D={t.D} tensor ({t.mode}) and wrote {args.out}")
    return 0


def _cmd_scan(args) -> int:
    t = _load_mps(args.tensor)
    if not args.heuristic and args.max_len is None:
        raise ValueError("scan needs --max-len (or --heuristic)")
    start = time.perf_counter()
    if args.heuristic:
        rng = np.random.default_rng(args.seed)
        hit = heuristic_negative_search(
            t,
            rng,
            samples=args.heuristic_samples,
            max_len=args.heuristic_max_len,
            bias_letter=args.bias_letter,
            bias=args.bias,
        )
        certificate = {
            "method": "heuristic-sample",
            "samples": args.heuristic_samples,
            "status": "negative-witness" if hit else "nothing-sampled-negative",
            "word": list(hit[0]) if hit else None,
            "trace": (
                {"num": hit[1].numerator, "den": hit[1].denominator} if hit else None
            ),
        }
        found = hit is not None
    else:
        exact = args.exact or t.is_exact
        report = scan_classical(
            t,
            args.max_len,
            exact=exact,
            tol=args.tol,
            threads=args.threads,
            cap=args.cap,
        )
        trace = None
        if report.found:
            weight = _exact_weight(t, report.witness)
            trace = {"num": weight.numerator, "den": weight.denominator}
        certificate = {
            "method": "exhaustive",
            "status": report.status,
            "word": list(report.witness) if report.found else None,
            "trace": trace,
            "first_length": report.first_length,
            "lengths_scanned": list(report.lengths_scanned),
            "word_count": report.word_count,
        }
        found = report.found
    elapsed = time.perf_counter() - start
    if args.out:
        _write_json(args.out, certificate)
    if args.json:
        _print_json(
            {
                "command": "scan",
                "config": {
                    "tensor": args.tensor,
                    "max_len": args.max_len,
                    "exact": args.exact,
                    "heuristic": args.heuristic,
                    "threads": args.threads,
                    "seed": args.seed,
                },
                "certificate": certificate,
                "timings": {"seconds": elapsed},
            }
        )
    elif found:
        word = tuple(certificate["word"])
        tr = certificate["trace"]
        print(f"negative witness {word} with weight {tr['num']}/{tr['den']}")
        if not args.heuristic:
            print(
                f"first bad length {certificate['first_length']}; "
                f"checked {certificate['word_count']} cyclic words"
            )
    else:
        if args.heuristic:
            print(f"no negative weight in {args.heuristic_samples} sampled words")
        else:
            lo, hi = certificate["lengths_scanned"]
            print(
                f"all weights nonnegative for lengths {lo}..{hi} "
                f"({certificate['word_count']} cyclic words)"
            )
    return 2 if found else 0


def _cmd_canonical(args) -> int:
    t = _load_mps(args.tensor)
    cf = canonicalize(t.to_float(), tol=args.tol)
    if args.out:
        _write_json(args.out, canonical_to_json(cf))
    if args.json:
        _print_json(
            {
                "command": "canonical",
                "config": {"tensor": args.tensor, "tol": args.tol},
                "outcome": canonical_to_json(cf),
            }
        )
    else:
        print(f"{cf.block_count} block(s)")
        for k, blk in enumerate(cf.blocks):
            diag = np.asarray(blk.fixed_point, dtype=float)
            print(
                f"  block {k}: weight {blk.weight:.9g}, D={blk.D}, "
                f"multiplicity {blk.multiplicity}, "
                f"fixed point diag {np.array2string(diag, precision=6)}"
            )
        if args.out:
            print(f"wrote {args.out}")
    return 0


def _require(value, option: str, action: str):
    if value is None:
        raise ValueError(f"powersum {action} needs {option}")
    return value


def _cmd_powersum(args) -> int:
    if args.action == "sums":
        values = _parse_rationals(_require(args.values, "--values", args.action))
        out = power_sums(values, args.count)
        if args.json:
            _print_json({"command": "powersum", "action": "sums", "sums": out})
        else:
            for k, s in enumerate(out, start=1):
                print(f"s_{k} = {s}")
        return 0
    if args.action == "recover":
        sums = _parse_rationals(_require(args.sums, "--sums", args.action))
        roots = multiset_from_power_sums(sums)
        if args.json:
            _print_json({"command": "powersum", "action": "recover", "roots": roots})
        else:
            for r in roots:
                print(f"{r.real:+.12g}{r.imag:+.12g}j")
        return 0
    if args.action == "first-nonzero":
        values = _parse_rationals(_require(args.values, "--values", args.action))
        L = first_nonzero_power(values)
        if args.json:
            _print_json({"command": "powersum", "action": "first-nonzero", "L": L})
        else:
            print(f"first nonzero power sum at L = {L}")
        return 0
    # proportional
    if not args.pair:
        raise ValueError("need at least one --pair")
    family = PowerSumFamily.from_pairs([_parse_pair(p) for p in args.pair])
    verdict = proportional_powersum_families(family, window=args.window)
    if args.json:
        _print_json(
            {
                "command": "powersum",
                "action": "proportional",
                "window": args.window or family.total_size**2,
                "verdict": verdict if verdict is not None else "indeterminate",
            }
        )
    elif verdict is True:
        print("proportional: one constant per length relates all groups")
    elif verdict is False:
        print("not proportional")
    else:
        print("indeterminate: the constant is forced to zero at some lengths")
    return 0


def _cmd_purify(args) -> int:
    t = _load_mps(args.tensor)
    config = PurifySearchConfig(
        bond=args.bond,
        d_env=args.env,
        lengths=_parse_lengths(args.lengths),
        restarts=args.restarts,
        max_iters=args.max_iters,
        tol=args.tol,
        seed=args.seed,
        threads=args.threads,
    )
    start = time.perf_counter()
    result = fit_purification(t, config)
    elapsed = time.perf_counter() - start
    payload = {
        "status": result.status,
        "best_residual": result.best_residual,
        "residuals": {str(L): r for L, r in sorted(result.residuals.items())},
        "constants": {str(L): c for L, c in sorted(result.constants.items())},
        "winning_restart": result.winning_restart,
        "certified_length_bound": theoretical_length_bound(t.D, args.bond**2),
        "tensor": tensor_to_json(result.b),
    }
    if args.out:
        # bare tensor so the file feeds straight into `verify --purification`
        _write_json(args.out, payload["tensor"])
    if args.json:
        _print_json(
            {
                "command": "purify",
                "config": {
                    "tensor": args.tensor,
                    "bond": args.bond,
                    "env": config.env_dim(t.d),
                    "lengths": list(config.lengths),
                    "restarts": args.restarts,
                    "seed": args.seed,
                    "threads": args.threads,
                },
                "outcome": payload,
                "timings": {"seconds": elapsed},
            }
        )
    else:
        print(f"status: {result.status}")
        print(f"best residual: {result.best_residual:.3e}")
        if result.found:
            print(f"winning restart {result.winning_restart}")
        if args.out:
            print(f"wrote {args.out}")
    return 0 if result.found else 2


def _cmd_verify(args) -> int:
    t = _load_mps(args.tensor)
    b = _load_purification(args.purification)
    report = verify_purification(t, b, _parse_lengths(args.lengths), tol=args.tol)
    if args.json:
        _print_json(
            {
                "command": "verify",
                "config": {
                    "tensor": args.tensor,
                    "purification": args.purification,
                    "lengths": args.lengths,
                    "tol": args.tol,
                },
                "outcome": {
                    "passed": report.passed,
                    "mode": report.mode,
                    "per_length": {
                        str(L): entry for L, entry in sorted(report.per_length.items())
                    },
                },
            }
        )
    else:
        for L, entry in sorted(report.per_length.items()):
            print(f"L={L}: residual {float(entry['residual']):.3e}")
        print("PASS" if report.passed else "FAIL")
    return 0 if report.passed else 2


def _cmd_loop(args) -> int:
    t = _load_mps(args.tensor)
    result = semi_decision_loop(
        t,
        max_bond=args.max_bond,
        max_len=args.max_len,
        base_window=args.base_window,
        verify_margin=args.verify_margin,
        tol=args.tol,
        seed=args.seed,
        restarts=args.restarts,
        threads=args.threads,
    )
    details = dict(result.details)
    if "b" in details:
        details["b"] = tensor_to_json(details.pop("b"))
    if args.out and result.status == "purification-found":
        _write_json(args.out, details["b"])
    if args.json:
        _print_json(
            {
                "command": "loop",
                "config": {
                    "tensor": args.tensor,
                    "max_bond": args.max_bond,
                    "max_len": args.max_len,
                    "seed": args.seed,
                },
                "outcome": {"status": result.status, "details": details},
                "steps": result.steps,
            }
        )
    else:
        for step in result.steps:
            extra = ""
            if "best_residual" in step:
                extra = f" (best residual {step['best_residual']:.3e})"
            print(f"step {step['step']}: {step['action']} -> {step['outcome']}{extra}")
        print(f"status: {result.status}")
        if result.status == "case2-witness":
            print(
                f"witness {tuple(result.details['word'])} with weight "
                f"{result.details['trace']}"
            )
        elif result.status == "purification-found":
            print(f"purification at bond dimension {result.details['bond']}")
            if args.out:
                print(f"wrote {args.out}")
    return 2 if result.status == "case2-witness" else 0


def _close(x, y, tol: float) -> bool:
    return abs(x - y) <= tol * max(1.0, abs(x), abs(y))


def _cmd_verify_identities(args) -> int:
    rng = np.random.default_rng(args.seed)
    failures = []

    def check(tag: str, ok: bool, detail: str = "") -> None:
        if ok:
            print(f"ok   {tag}")
        else:
            print(f"FAIL {tag}" + (f": {detail}" if detail else ""))
            failures.append(tag)

    o = sym_basis_isometry()
    check("isometry-rows", np.max(np.abs(o @ o.T - np.eye(6))) <= 1e-12)
    check(
        "isometry-projector",
        np.max(np.abs(o.T @ o - sym_projector(3))) <= 1e-12,
    )
    v, w = sym_pair_maps()
    check("pair-maps-exact", bool(np.all(v @ w == exact_eye(6))))
    check(
        "pair-projector-exact",
        bool(np.all(w @ v == sym_projector(3, exact=True))),
    )
    flip = flip_operator(3)
    ok = True
    for _ in range(20):
        g = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        lhs = np.trace(flip @ np.kron(g, g))
        rhs = np.trace(g @ g)
        if not _close(lhs, rhs, 1e-10):
            ok = False
            break
    check("flip-square-trace", ok)
    proj = sym_projector(3)
    ok = True
    for _ in range(20):
        g = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        h = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        lhs = np.trace(proj @ np.kron(g, h))
        rhs = (np.trace(g) * np.trace(h) + np.trace(g @ h)) / 2
        if not _close(lhs, rhs, 1e-10):
            ok = False
            break
    check("sym-projector-trace", ok)

    fixed = load_zulc(args.input) if args.input else None
    file_tensor = _load_mps(args.tensor) if args.tensor else None
    modes_ok = True
    oracle_ok = True
    file_ok = True
    detail = ""
    for _ in range(args.samples):
        z = fixed if fixed is not None else random_instance(rng)
        t_rat = build_reduction(z, mode="rational")
        t_ortho = build_reduction(z, mode="orthonormal")
        L = int(rng.integers(1, 9))
        word = tuple(int(x) for x in rng.integers(0, 7, size=L))
        exact = word_trace(t_rat, word)
        if exact.im != 0:
            oracle_ok = False
            detail = f"non-real weight at {word}"
            break
        expected = oracle_trace(z, word)
        if exact.re != expected:
            oracle_ok = False
            detail = f"word {word}: tensor {exact.re}, formula {expected}"
            break
        approx = word_trace(t_ortho, word)
        if not _close(approx, complex(expected), 1e-9):
            modes_ok = False
            detail = f"word {word}: float {approx}, exact {expected}"
            break
        if file_tensor is not None:
            got = word_trace(file_tensor.to_exact(), word)
            if got.im != 0 or got.re != expected:
                file_ok = False
                detail = f"word {word}: file {got}, formula {expected}"
                break
    check("oracle-agreement", oracle_ok, detail)
    check("mode-trace-agreement", modes_ok, detail)
    if file_tensor is not None:
        check("file-oracle-agreement", file_ok, detail)
    if failures:
        print(f"{len(failures)} check(s) failed")
        return 2
    print("all checks passed")
    return 0


# ---------------------------------------------------------------------------
# parser


def _build_parser() -> _Parser:
    parser = _Parser(prog="tnpur", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("reduce", help="build the d=7 tensor of an integer instance")
    p.add_argument("--input", required=True, help="JSON file with five 3x3 integer matrices")
    p.add_argument("--mode", choices=["rational", "orthonormal"], default="rational")
    p.add_argument("--out", required=True, help="where to write the tensor")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_reduce)

    p = sub.add_parser("scan", help="search ring sizes for a negative weight")
    p.add_argument("--tensor", required=True)
    p.add_argument("--max-len", type=int, default=None)
    p.add_argument("--exact", action="store_true", help="force exact arithmetic")
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--cap", type=int, default=None)
    p.add_argument("--heuristic", action="store_true", help="sample words instead of enumerating")
    p.add_argument("--heuristic-samples", type=int, default=2000)
    p.add_argument("--heuristic-max-len", type=int, default=12)
    p.add_argument("--bias-letter", type=int, default=None, help="oversample this letter")
    p.add_argument("--bias", type=float, default=4.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write the certificate JSON here")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_scan)

    p = sub.add_parser("canonical", help="decompose into irreducible normalized blocks")
    p.add_argument("--tensor", required=True)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--out", help="write the decomposition JSON here")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_canonical)

    p = sub.add_parser("powersum", help="power-sum utilities")
    p.add_argument("action", choices=["sums", "recover", "first-nonzero", "proportional"])
    p.add_argument("--values", help="comma list of rationals")
    p.add_argument("--sums", help="comma list of rationals (recover)")
    p.add_argument("--count", type=int, default=8)
    p.add_argument("--pair", action="append", help="mu1,mu2:nu1,nu2 (repeatable)")
    p.add_argument("--window", type=int, default=None)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_powersum)

    p = sub.add_parser("purify", help="fit a purification at fixed bond dimension")
    p.add_argument("--tensor", required=True)
    p.add_argument("--bond", type=int, required=True)
    p.add_argument("--env", type=int, default=None, help="environment dimension (default bond*d)")
    p.add_argument("--lengths", default="1..8", help='window, e.g. "1..8" or "1,2,4"')
    p.add_argument("--restarts", type=int, default=32)
    p.add_argument("--max-iters", type=int, default=20000, help="objective evaluations per descent pass")
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", help="write the fitted tensor here (loadable by verify)")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_purify)

    p = sub.add_parser("verify", help="check a purification against a target tensor")
    p.add_argument("--tensor", required=True)
    p.add_argument("--purification", required=True)
    p.add_argument("--lengths", default="1..8")
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("loop", help="interleave purification fits with negativity scans")
    p.add_argument("--tensor", required=True)
    p.add_argument("--max-bond", type=int, required=True)
    p.add_argument("--max-len", type=int, required=True)
    p.add_argument("--base-window", type=int, default=4)
    p.add_argument("--verify-margin", type=int, default=4)
    p.add_argument("--restarts", type=int, default=8)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", help="write the purification here when one is found")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_loop)

    p = sub.add_parser(
        "verify-identities",
        help="internal consistency checks of the construction",
    )
    p.add_argument("--input", help="check this instance instead of random ones")
    p.add_argument("--tensor", help="also check a stored tensor against the formula")
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_verify_identities)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (TnpurError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
