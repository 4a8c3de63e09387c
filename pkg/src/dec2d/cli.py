"""``dec2d`` command-line entry point."""
import argparse
import logging
import sys

from .errors import AdmissibilityError, Dec2dError
from .report import emit_report
from .studies import STUDIES, StudyConfig, run_study

log = logging.getLogger("dec2d")


def _int_list(text):
    try:
        return tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _float_list(text):
    try:
        return tuple(float(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _str_list(text):
    return tuple(t.strip() for t in text.split(",") if t.strip())


def build_parser():
    p = argparse.ArgumentParser(
        prog="dec2d",
        description="DEC and FEEC on 2D triangulations: mesh audits, norm and "
                    "inner-product studies, and mixed Hodge-Laplace convergence tables.")
    p.add_argument("study", help="one of: " + ", ".join(STUDIES))
    p.add_argument("--family", default="square",
                   help="domain[:kind[:perturbation]], e.g. square:structured_perturbed:0.2")
    p.add_argument("--levels", type=int, default=4)
    p.add_argument("--base", type=int, default=4,
                   help="lattice subdivisions per unit length on the coarsest level")
    p.add_argument("--k", type=_int_list, default=(0, 1, 2))
    p.add_argument("--flavor", type=_str_list, default=("dec", "feec"))
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--eps", type=_float_list, default=None,
                   help="decreasing angle gaps for the counterexample study")
    p.add_argument("--jobs", type=int, default=1, help="levels processed concurrently")
    p.add_argument("--out", default="-", help="output path, '-' for stdout")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    cfg = StudyConfig(study=args.study, family=args.family, levels=args.levels, k=args.k,
                      flavors=args.flavor, samples=args.samples, seed=args.seed,
                      out=args.out, format=args.format, base=args.base, jobs=args.jobs)
    if args.eps is not None:
        cfg.eps = args.eps
    try:
        result = run_study(cfg)
        text = emit_report(result, None if args.out == "-" else args.out, args.format)
    except AdmissibilityError as exc:
        print(f"dec2d: inadmissible mesh: {exc}", file=sys.stderr)
        return 2
    except (Dec2dError, OSError) as exc:
        print(f"dec2d: error: {exc}", file=sys.stderr)
        return 1
    if args.out == "-":
        sys.stdout.write(text)
    else:
        log.info("wrote %s", args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
