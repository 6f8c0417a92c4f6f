"""Command-line front end: ``symwebs <command> ...``.

Exit codes: 0 success, 1 usage, 2 parse/format error, 3 domain error,
4 resource cap exceeded.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import endoalg, equivalence, quadauto
from .errors import DomainError, FormatError, ResourceCapExceeded
from .exactfield import FieldSpec
from .mpoly import parse_poly, render
from .swt import read_swt, render_swt, write_swt
from .symweb import GroupElem, WebClass, act, classify, normalized_act

EXIT_OK, EXIT_USAGE, EXIT_FORMAT, EXIT_DOMAIN, EXIT_CAP = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _matrix_text(F: FieldSpec, mat) -> str:
    return ";".join(" ".join(F.render(x) for x in row) for row in mat)


def _parse_matrix(F: FieldSpec, text: str):
    rows = [r.replace(",", " ").split() for r in text.split(";")]
    if not rows or any(len(r) != len(rows) for r in rows):
        raise FormatError(f"expected a square matrix as 'a b;c d', got {text!r}")
    return [[F.parse_scalar(x) for x in r] for r in rows]


def _caps(args, default):
    return default if args.max_enum is None else args.max_enum


# -- commands ---------------------------------------------------------------------

def cmd_disc(args, out):
    M = read_swt(args.file)
    out.write(render(M.disc) + "\n")
    return EXIT_OK


def cmd_grcheck(args, out):
    M = read_swt(args.file)
    cls = classify(M)
    out.write(f"{cls.value}\n")
    return EXIT_DOMAIN if cls is WebClass.ZERO_DISC else EXIT_OK


def cmd_act(args, out):
    M = read_swt(args.file)
    F = M.field
    A = _parse_matrix(F, args.A) if args.A else [[F.one if i == j else F.zero for j in range(M.m + 1)] for i in range(M.m + 1)]
    P = _parse_matrix(F, args.P) if args.P else [[F.one if i == j else F.zero for j in range(M.size)] for i in range(M.size)]
    g = GroupElem(F, A, P)
    result = normalized_act(M, g) if args.normalized else act(M, g)
    if args.output:
        write_swt(args.output, result)
    else:
        out.write(render_swt(result))
    return EXIT_OK


def _na(x):
    if x is None:
        return "n/a"
    if isinstance(x, bool):
        return "true" if x else "false"
    return str(x)


def cmd_endo(args, out):
    M = read_swt(args.file)
    alg = endoalg.endomorphism_algebra(M)
    rep = endoalg.etale_report(alg)
    kern = None
    if M.field.is_finite:
        kern = endoalg.norm_kernel_order(alg, _caps(args, endoalg.DEFAULT_ENUM_CAP))
    for key, val in (("dim", alg.dim), ("commutative", rep.commutative), ("sigma_identity", rep.sigma_identity),
                     ("etale", rep.etale), ("r", rep.factor_count_r), ("fiber_group_order", rep.fiber_group_order),
                     ("norm_kernel_order", kern)):
        out.write(f"{key}={_na(val)}\n")
    return EXIT_OK


def cmd_fiber(args, out):
    M = read_swt(args.file)
    report = equivalence.fiber_enumerate(M, _caps(args, equivalence.DEFAULT_CAP), args.threads)
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    for i, W in enumerate(report.reps):
        write_swt(outdir / f"fiber_{i}.swt", W)
        out.write(f"fiber_{i}.swt\n")
    out.write(f"pairwise_inequivalent={_na(report.pairwise_inequivalent)}\n")
    out.write(f"group_order={report.group_order}\n")
    return EXIT_OK


_GROUPS = {"cong": equivalence.EquivKind.CONGRUENCE, "full": equivalence.EquivKind.FULL_ORBIT,
           "module": equivalence.EquivKind.MODULE_ISO}


def cmd_equiv(args, out):
    M, Mp = read_swt(args.a), read_swt(args.b)
    kind = _GROUPS[args.group]
    w = equivalence.equivalent(M, Mp, kind, _caps(args, equivalence.DEFAULT_CAP), args.threads)
    if w is equivalence.PROBABLY_ABSENT:
        out.write("inequivalent(probabilistic)\n")
        return EXIT_DOMAIN
    if w is None:
        out.write("inequivalent\n")
        return EXIT_OK
    F = M.field
    out.write("equivalent\n")
    if kind is equivalence.EquivKind.CONGRUENCE:
        out.write(f"a={F.render(w[0].value)}\nP={_matrix_text(F, w[1])}\n")
    elif kind is equivalence.EquivKind.FULL_ORBIT:
        out.write(f"A={_matrix_text(F, w.A)}\nP={_matrix_text(F, w.P)}\n")
    else:
        out.write(f"U={_matrix_text(F, w[0])}\nV={_matrix_text(F, w[1])}\n")
    return EXIT_OK


def cmd_census(args, out):
    F = FieldSpec.parse(args.field)
    target = parse_poly(args.disc, F, args.m + 1)
    table = equivalence.census(F, args.m, args.n, target, _caps(args, equivalence.DEFAULT_CAP), args.threads)
    out.write(f"total_webs={table.total_webs}\nmatching_webs={table.matching_webs}\n"
              f"congruence_classes={table.congruence_classes}\n")
    out.write(table.render())
    return EXIT_OK


def cmd_autgroup(args, out):
    M = read_swt(args.file)
    Q = quadauto.QuadricSystem(M)
    rep = quadauto.stabilizer_groups(Q, _caps(args, quadauto.DEFAULT_GL_CAP), args.threads)
    for key, val in rep.orders().items():
        out.write(f"{key}={val}\n")
    out.write(f"exactness_ok={_na(rep.exactness_ok)}\n")
    if args.ext:
        q = M.field.p
        for t in range(1, args.ext + 1):
            pts = quadauto.base_locus_points(Q, t, _caps(args, quadauto.DEFAULT_POINT_CAP))
            out.write(f"#X_Q(F_{q}^{t})={len(pts)}\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="symwebs", description="Webs of symmetric matrices over exact fields.")
    parser.add_argument("--threads", type=int, default=1, help="worker threads for enumerations")
    parser.add_argument("--max-enum", type=int, default=None, help="override enumeration caps")
    # the same flags are accepted after the subcommand; SUPPRESS keeps the top-level values otherwise
    common = _Parser(add_help=False)
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS)
    common.add_argument("--max-enum", type=int, default=argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("disc", parents=[common], help="print the discriminant")
    p.add_argument("file")
    p.set_defaults(func=cmd_disc)

    p = sub.add_parser("grcheck", parents=[common], help="classify as zero_disc / nonreduced / geometrically_reduced")
    p.add_argument("file")
    p.set_defaults(func=cmd_grcheck)

    p = sub.add_parser("act", parents=[common], help="apply (A, P)")
    p.add_argument("file")
    p.add_argument("--A", help="(m+1)x(m+1) matrix as 'rows;separated'")
    p.add_argument("--P", help="(n+1)x(n+1) matrix as 'rows;separated'")
    p.add_argument("--normalized", action="store_true", help="scale the result by det(A)^-1")
    p.add_argument("-o", "--output", help="output file (default: stdout)")
    p.set_defaults(func=cmd_act)

    p = sub.add_parser("endo", parents=[common], help="endomorphism algebra report")
    p.add_argument("file")
    p.set_defaults(func=cmd_endo)

    p = sub.add_parser("fiber", parents=[common], help="write one representative per fiber class")
    p.add_argument("file")
    p.add_argument("--outdir", default=".", help="directory for fiber_i.swt")
    p.set_defaults(func=cmd_fiber)

    p = sub.add_parser("equiv", parents=[common], help="test equivalence of two webs")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--group", choices=sorted(_GROUPS), required=True)
    p.set_defaults(func=cmd_equiv)

    p = sub.add_parser("census", parents=[common], help="exhaustive census by discriminant")
    p.add_argument("--field", required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--disc", required=True)
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("autgroup", parents=[common], help="automorphism groups of the intersection of quadrics")
    p.add_argument("file")
    p.add_argument("--ext", type=int, default=0, help="also count points over F_{q^t}, t <= ext")
    p.set_defaults(func=cmd_autgroup)
    return parser


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        if args.threads < 1:
            raise UsageError("--threads must be positive")
        return args.func(args, out)
    except UsageError as exc:
        err.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except (FormatError, OSError) as exc:
        err.write(f"format error: {exc}\n")
        return EXIT_FORMAT
    except ResourceCapExceeded as exc:
        err.write(f"resource cap: {exc}\n")
        return EXIT_CAP
    except DomainError as exc:
        err.write(f"domain error: {exc}\n")
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
