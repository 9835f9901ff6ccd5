"""Command-line front end.

Exit status: 0 success, 1 negative result, 2 unknown, 3 error.
"""

from __future__ import annotations

import argparse
import random
import sys
from typing import List, Optional

from .autalg import (AutMatrix, RestrictedStructure, check_main_theorem, homotopic_to_identity,
                     is_automorphism)
from .dga import FiniteAlgebra, Morphism, QuasiFreeAlgebra, homology_in_range, truncate
from .errors import NotAComplexError, ObstructionError, QuasiFreeError
from .homotopy import build_homotopy, extend_homotopy, extend_map, homotopic, verify_homotopy
from .koszul import ce_cochains, check_finite_generation, minimalize, quillen_L
from .textio import (format_algebra, format_homotopy, format_morphism, parse_morphisms,
                     read_algebra)

OK, NEGATIVE, UNKNOWN, ERROR = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}")


class _UsageError(Exception):
    pass


def _yes(v) -> str:
    return {True: "yes", False: "no", None: "unknown"}[v]


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _quasi_free(path: str) -> QuasiFreeAlgebra:
    A = read_algebra(path)
    if not isinstance(A, QuasiFreeAlgebra):
        raise QuasiFreeError(f"{path}: expected an 'algebra' file, got a finite presentation")
    return A


def _maps(path: str, source, target, check=True) -> List[Morphism]:
    return parse_morphisms(_read(path), source, target, check)


def _one_map(path: str, source, target) -> Morphism:
    found = _maps(path, source, target)
    if len(found) != 1:
        raise QuasiFreeError(f"{path}: expected one morphism, found {len(found)}")
    return found[0]


# ---------------------------------------------------------------------------
# verbs


def cmd_check(args, out) -> int:
    try:
        A = read_algebra(args.file)
    except NotAComplexError as e:
        print(f"d²=0: no ({e})", file=out)
        return NEGATIVE
    if isinstance(A, FiniteAlgebra):
        print("finite algebra: d²=0 and Leibniz rule hold", file=out)
        return OK
    print(f"minimal: {_yes(A.is_minimal())}, sparse: {_yes(A.is_sparsely_generated())}, d²=0: yes", file=out)
    return OK


def cmd_truncate(args, out) -> int:
    A = _quasi_free(args.file)
    T = truncate(A, args.degree)
    if args.cutoff is not None:
        T = QuasiFreeAlgebra(T.flavor, T.generators, {g: T.d[g] for g in T.gens}, args.cutoff)
    out.write(format_algebra(T))
    return OK


def cmd_homology(args, out) -> int:
    A = read_algebra(args.file)
    hi = args.to if args.to is not None else A.cutoff - 1
    if isinstance(A, FiniteAlgebra):
        dims = [A.homology_dim(k) for k in range(args.lo, hi + 1)]
    else:
        dims = homology_in_range(A, args.lo, hi)
    mark = "^" if A.flavor.direction == "cochain" else "_"
    for k, b in zip(range(args.lo, hi + 1), dims):
        print(f"H{mark}{k}: {b}", file=out)
    return OK


def cmd_extend_map(args, out) -> int:
    A = _quasi_free(args.source)
    B = _quasi_free(args.target)
    An = truncate(A, args.degree)
    f = _one_map(args.map, An, B)
    rng = random.Random(args.seed) if args.seed is not None else None
    try:
        F = extend_map(f, A, rng=rng)
    except ObstructionError as e:
        print(f"obstruction at {e.generator}: {e.cocycle}", file=out)
        return NEGATIVE
    out.write(format_morphism(F))
    return OK


def cmd_extend_homotopy(args, out) -> int:
    A = _quasi_free(args.source)
    B = _quasi_free(args.target)
    f = _one_map(args.f, A, B)
    g = _one_map(args.g, A, B)
    An = truncate(A, args.degree)
    try:
        h = build_homotopy(f.restrict(An), g.restrict(An))
    except ObstructionError as e:
        print(f"no homotopy on the truncation at {args.degree}: obstruction at {e.generator}: {e.cocycle}", file=out)
        return NEGATIVE
    try:
        H = extend_homotopy(h, f, g)
    except ObstructionError as e:
        print(f"obstruction at {e.generator}: {e.cocycle}", file=out)
        return NEGATIVE
    ok, bad = verify_homotopy(H)
    if not ok:
        raise QuasiFreeError(f"extended homotopy fails at {bad}")
    out.write(format_homotopy(H))
    return OK


def cmd_homotopic(args, out) -> int:
    A = _quasi_free(args.source)
    B = _quasi_free(args.target)
    f = _one_map(args.f, A, B)
    g = _one_map(args.g, A, B)
    v = homotopic(f, g, args.degree)
    print(f"homotopic: {_yes(v.value)}", file=out)
    print(f"reason: {v.reason}", file=out)
    if v.certificate is not None and args.certificate:
        out.write(format_homotopy(v.certificate))
    return v.exit_code


def cmd_ce(args, out) -> int:
    g = read_algebra(args.file)
    out.write(format_algebra(ce_cochains(g, args.cutoff)))
    return OK


def cmd_quillen(args, out) -> int:
    A = read_algebra(args.file)
    out.write(format_algebra(quillen_L(A, args.cutoff)))
    return OK


def cmd_minimalize(args, out) -> int:
    A = _quasi_free(args.file)
    M, _, _ = minimalize(A)
    out.write(format_algebra(M))
    return OK


def cmd_finite_gen(args, out) -> int:
    A = read_algebra(args.file)
    rep = check_finite_generation(A, args.cutoff)
    print(f"finitely generated: {_yes(rep.value)}", file=out)
    print("betti: " + " ".join(str(b) for b in rep.betti), file=out)
    degs = " ".join(str(d) for d in rep.generator_degrees)
    print(f"generators: {rep.generators}" + (f" (degrees {degs})" if degs else ""), file=out)
    print(f"reason: {rep.reason}", file=out)
    return rep.exit_code


def cmd_aut_check(args, out) -> int:
    A = _quasi_free(args.file)
    S = RestrictedStructure(A, args.level)
    status = OK
    for k, phi in enumerate(_maps(args.samples, A, A, check=False), 1):
        label = phi.name or f"sample {k}"
        M = AutMatrix.from_morphism(phi, args.level)
        ok, why = is_automorphism(M, S)
        line = f"{label}: automorphism: {_yes(ok)}"
        if not ok:
            print(f"{line} ({why})", file=out)
            status = NEGATIVE
            continue
        line += f", unipotent: {_yes(M.is_unipotent())}"
        if M.is_unipotent():
            v = homotopic_to_identity(phi)
            line += f", homotopic to identity: {_yes(v.value)}"
        print(line, file=out)
    return status


def cmd_main_theorem(args, out) -> int:
    a = _quasi_free(args.lie)
    A = _quasi_free(args.com) if args.com else None
    if args.samples:
        samples = [(f.name or f"sample {k}", f) for k, f in enumerate(_maps(args.samples, a, a), 1)]
    else:
        samples = [("identity", Morphism.identity(a))]
    rep = check_main_theorem(a, args.level, samples, A=A)
    print(rep.format(), file=out)
    return OK if rep.ok else NEGATIVE


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="quasifree", description="Exact computations with quasi-free dg algebras.")
    sub = p.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    s = sub.add_parser("check", help="d²=0, minimality and sparseness")
    s.add_argument("file")
    s.set_defaults(run=cmd_check)

    s = sub.add_parser("truncate", help="subalgebra on generators of degree <= n")
    s.add_argument("file")
    s.add_argument("--degree", type=int, required=True)
    s.add_argument("--cutoff", type=int)
    s.set_defaults(run=cmd_truncate)

    s = sub.add_parser("homology", help="Betti numbers in a range of degrees")
    s.add_argument("file")
    s.add_argument("--from", dest="lo", type=int, default=1)
    s.add_argument("--to", type=int)
    s.set_defaults(run=cmd_homology)

    s = sub.add_parser("extend-map", help="extend a map given on A_n over A")
    s.add_argument("map")
    s.add_argument("--source", required=True)
    s.add_argument("--target", required=True)
    s.add_argument("--degree", type=int, required=True)
    s.add_argument("--seed", type=int)
    s.set_defaults(run=cmd_extend_map)

    s = sub.add_parser("extend-homotopy", help="homotopy on A_n, then extended over A")
    s.add_argument("f")
    s.add_argument("g")
    s.add_argument("--source", required=True)
    s.add_argument("--target", required=True)
    s.add_argument("--degree", type=int, required=True)
    s.set_defaults(run=cmd_extend_homotopy)

    s = sub.add_parser("homotopic", help="decide f ≃ g")
    s.add_argument("f")
    s.add_argument("g")
    s.add_argument("--source", required=True)
    s.add_argument("--target", required=True)
    s.add_argument("--degree", type=int, help="homology of the target is concentrated <= n")
    s.add_argument("--certificate", action="store_true", help="print the homotopy found")
    s.set_defaults(run=cmd_homotopic)

    for verb, fn, text in (("ce", cmd_ce, "Chevalley–Eilenberg cochains of a chain Lie algebra"),
                           ("quillen", cmd_quillen, "Quillen Lie algebra of a cochain algebra")):
        s = sub.add_parser(verb, help=text)
        s.add_argument("file")
        s.add_argument("--cutoff", type=int)
        s.set_defaults(run=fn)

    s = sub.add_parser("minimalize", help="minimal model of a quasi-free algebra")
    s.add_argument("file")
    s.set_defaults(run=cmd_minimalize)

    s = sub.add_parser("finite-gen", help="is the minimal Quillen model finitely generated")
    s.add_argument("file")
    s.add_argument("--cutoff", type=int)
    s.set_defaults(run=cmd_finite_gen)

    s = sub.add_parser("aut-check", help="restricted automorphism test for sample maps")
    s.add_argument("file")
    s.add_argument("--level", type=int, required=True)
    s.add_argument("--samples", required=True)
    s.set_defaults(run=cmd_aut_check)

    s = sub.add_parser("main-theorem", help="desk check of Aut^h(a) ≅ Aut^h(A_n)")
    s.add_argument("--lie", required=True)
    s.add_argument("--com")
    s.add_argument("--level", type=int, required=True)
    s.add_argument("--samples")
    s.set_defaults(run=cmd_main_theorem)
    return p


def main(argv: Optional[List[str]] = None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        return args.run(args, out)
    except _UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return ERROR
    except (QuasiFreeError, OSError, KeyError, ValueError) as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return ERROR


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
