"""Command-line entry point.

Exit codes: 0 success, 1 usage or parse error, 2 precondition violated
(non-primitive substitution, non-contracting length change), 3 numerical
non-convergence or exhausted budget.  Diagnostics go to stderr only.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from .. import __version__, balance, spectral, symbolic, tiling, verdict
from ..errors import (ConsistencyError, ConvergenceError, InputError, LimitError,
                      PreconditionError)
from .definition import read_definition
from .report import Report, flatten

EXIT_OK, EXIT_USAGE, EXIT_PRECONDITION, EXIT_CONVERGENCE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _lengths(text: str, n: int, flag: str) -> tuple:
    try:
        vals = tuple(float(x) for x in text.split(","))
    except ValueError:
        raise InputError(f"{flag}: expected comma-separated numbers, got {text!r}") from None
    if len(vals) != n:
        raise InputError(f"{flag}: expected {n} lengths, got {len(vals)}")
    if any(not math.isfinite(v) or v <= 0 for v in vals):
        raise InputError(f"{flag}: lengths must be positive")
    return vals


def _default_lengths(defn) -> tuple:
    return defn.lengths if defn.lengths is not None else (1.0,) * len(defn.alphabet)


def _profile_rows(profiles, one_sided: bool = False):
    for prof in profiles:
        label = prof.label()
        for n, lo, hi, b in prof.rows():
            yield (label, n, lo, hi, b, prof.one_sided) if one_sided else (label, n, lo, hi, b)


def _profiles_result(profiles) -> list:
    return [
        {
            "target": p.label(),
            "one_sided": p.one_sided,
            "observed_constant": p.observed_constant,
            "rows": [{"n": n, "min": lo, "max": hi, "balance": b} for n, lo, hi, b in p.rows()],
        }
        for p in profiles
    ]


def cmd_factors(args) -> Report:
    defn = read_definition(args.file)
    sub = defn.substitution
    sub.require_primitive()
    if args.n < 1:
        raise InputError("--n must be positive")
    words = [sub.alphabet.render(w) for w in symbolic.factors(sub, args.n).sorted()]
    return Report("factors", {"n": args.n}, {"n": args.n, "count": len(words), "factors": words},
                  defn.digest, (("factor",), [(w,) for w in words]), "".join(w + "\n" for w in words))


def cmd_balance(args) -> Report:
    defn = read_definition(args.file)
    sub = defn.substitution
    sub.require_primitive()
    if args.collar:
        sub = balance.collar(sub, args.collar).collared_substitution()
        sub.require_primitive()
    if args.max_n < 1:
        raise InputError("--max-n must be positive")
    if args.word:
        targets = sorted({sub.alphabet.word(w) for w in args.word})
    else:
        targets = [(i,) for i in range(len(sub.alphabet))]
    profiles = [balance.balance_profile(sub, t, args.max_n) for t in targets]
    params = {"max_n": args.max_n, "word": sorted(args.word or []), "collar": args.collar}
    header = ("target", "n", "min", "max", "balance")
    return Report("balance", params, _profiles_result(profiles), defn.digest,
                  (header, list(_profile_rows(profiles))))


def cmd_spectral(args) -> Report:
    defn = read_definition(args.file)
    data = spectral.perron_data(defn.substitution)
    res = data.as_dict()
    res.pop("left_perron")
    res["certificate"] = data.certificate_label if data.pisot_certificate else None
    return Report("spectral", {}, res, defn.digest, (("key", "value"), flatten(res)))


def cmd_plasticity(args) -> Report:
    defn = read_definition(args.file)
    sub = defn.substitution
    sub.require_primitive()
    n = len(sub.alphabet)
    l0 = _lengths(args.from_, n, "--from") if args.from_ else _default_lengths(defn)
    l1 = _lengths(args.to, n, "--to")
    spec = spectral.perron_data(sub)
    dec = spectral.decompose_length_change(l0, l1, spec)
    letters, words = verdict.collect_evidence(sub, args.max_n, args.word_len)
    v = verdict.plasticity_verdict(sub, letters, words, spec)
    res = v.as_dict()
    res["decomposition"] = dec.as_dict()
    res["from_lengths"] = list(l0)
    res["to_lengths"] = list(l1)
    params = {"from": list(l0), "to": list(l1), "max_n": args.max_n, "word_len": args.word_len}
    return Report("plasticity", params, res, defn.digest, (("key", "value"), flatten(res)))


def cmd_conjugacy(args) -> Report:
    defn = read_definition(args.file)
    sub = defn.substitution
    sub.require_primitive()
    n = len(sub.alphabet)
    l0 = _lengths(args.from_, n, "--from") if args.from_ else _default_lengths(defn)
    l1 = _lengths(args.to, n, "--to")
    if args.samples < 0 or args.ensemble < 0:
        raise InputError("--samples and --ensemble must be nonnegative")
    base = tiling.canonical_tiling(sub, l0, args.at)
    trace = tiling.conjugacy(base, l1, args.tolerance, args.max_level)
    shifts = np.linspace(-args.shift_range, args.shift_range, args.samples) if args.samples else []
    resid = tiling.equivariance_residuals(base, l1, shifts, args.tolerance, args.max_level)
    summary = {
        "c": trace.scale,
        "decay_rate": trace.decay_rate,
        "target_lengths": trace.target_lengths,
        "converged_level": trace.converged_level,
        "limit_offset": trace.limit.offset - base.offset,
        "orbit_fitted_rate": trace.fitted_rate(),
        "equivariance_samples": int(len(shifts)),
        "equivariance_max_residual": float(resid.max()) if len(resid) else 0.0,
        "equivariance_ok": bool((resid <= args.tolerance).all()) if len(resid) else True,
    }
    if args.ensemble:
        ens = tiling.ensemble_gaps(sub, l0, l1, points=args.ensemble, max_level=args.ensemble_levels)
        summary["ensemble_points"] = args.ensemble
        summary["ensemble_fitted_rate"] = ens.fitted_rate(5, min(15, args.ensemble_levels))
        summary["ensemble_mean_gaps"] = ens.mean_gaps
    summary["trace"] = [{"level": lv, "offset": off, "gap": g} for lv, _, off, g in trace.rows()]
    params = {
        "from": list(l0), "to": list(l1), "at": args.at, "max_level": args.max_level,
        "tolerance": args.tolerance, "samples": args.samples, "shift_range": args.shift_range,
        "ensemble": args.ensemble, "ensemble_levels": args.ensemble_levels,
    }
    rows = [(lv, off, g) for lv, _, off, g in trace.rows()]
    return Report("conjugacy", params, summary, defn.digest, (("level", "offset", "gap"), rows))


def cmd_sturmian(args) -> Report:
    if args.max_n < 1 or args.max_n > args.length:
        raise InputError("--max-n must lie in [1, --length]")
    word = symbolic.sturmian_array(args.alpha, args.rho, args.length)
    profiles = balance.letter_profiles(word, args.max_n, symbolic.STURMIAN_ALPHABET)
    params = {"alpha": args.alpha, "rho": args.rho, "length": args.length, "max_n": args.max_n}
    header = ("target", "n", "min", "max", "balance", "one_sided")
    return Report("sturmian", params, _profiles_result(profiles), None,
                  (header, list(_profile_rows(profiles, one_sided=True))))


def cmd_tm_adversary(args) -> Report:
    if args.m < 1:
        raise InputError("--m must be a positive integer")
    res = balance.tm_adversary_report(args.m).as_dict()
    return Report("tm-adversary", {"m": args.m}, res, None, (("key", "value"), flatten(res)))


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="plasticity", description="Balance, spectral and conjugacy reports for substitutions.")
    p.add_argument("--version", action="version", version=f"plasticity {__version__}")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def add(name, func, default_format, help_text, needs_file=True):
        sp = sub.add_parser(name, help=help_text)
        if needs_file:
            sp.add_argument("file", help="substitution-definition file")
        sp.add_argument("--out", help="output path (default stdout)")
        sp.add_argument("--format", choices=("csv", "json"), default=default_format)
        sp.set_defaults(func=func)
        return sp

    sp = add("factors", cmd_factors, "csv", "list the length-N factors")
    sp.add_argument("--n", type=int, required=True)

    sp = add("balance", cmd_balance, "csv", "balance profiles of letters or words")
    sp.add_argument("--max-n", type=int, required=True)
    sp.add_argument("--word", action="append", help="target word (repeatable)")
    sp.add_argument("--collar", type=int, default=0, help="work on the radius-R collared substitution")

    add("spectral", cmd_spectral, "json", "Perron data and spectral certificate")

    sp = add("plasticity", cmd_plasticity, "json", "plasticity verdict and length-change decomposition")
    sp.add_argument("--from", dest="from_", help="original lengths (default: file lengths or all 1)")
    sp.add_argument("--to", required=True, help="new lengths L1,L2,...")
    sp.add_argument("--max-n", type=int, default=400)
    sp.add_argument("--word-len", type=int, default=2)

    sp = add("conjugacy", cmd_conjugacy, "csv", "psi_n trace toward the conjugacy")
    sp.add_argument("--from", dest="from_", help="original lengths (default: file lengths or all 1)")
    sp.add_argument("--to", required=True, help="new lengths L1,L2,...")
    sp.add_argument("--max-level", type=int, default=60)
    sp.add_argument("--tolerance", type=float, default=1e-9)
    sp.add_argument("--samples", type=int, default=0, help="equivariance shifts in [-R, R]")
    sp.add_argument("--shift-range", type=float, default=10.0)
    sp.add_argument("--at", type=float, default=0.5, help="position of the origin along the fixed point")
    sp.add_argument("--ensemble", type=int, default=0, help="points for the ensemble gap-rate fit")
    sp.add_argument("--ensemble-levels", type=int, default=16)

    sp = add("sturmian", cmd_sturmian, "csv", "one-sided balance of a mechanical word", needs_file=False)
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--rho", type=float, default=0.0)
    sp.add_argument("--length", type=int, required=True)
    sp.add_argument("--max-n", type=int, required=True)

    sp = add("tm-adversary", cmd_tm_adversary, "json", "Thue-Morse adversarial word statistics",
             needs_file=False)
    sp.add_argument("--m", type=int, required=True)
    return p


def _render(report: Report, fmt: str) -> str:
    if fmt == "json":
        return report.to_json(__version__)
    return report.plain if report.plain is not None else report.to_csv()


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout if stdout is not None else sys.stdout
    stderr = stderr if stderr is not None else sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("plasticity: a subcommand is required")
        text = _render(args.func(args), args.format)
        if args.out:
            Path(args.out).write_text(text, encoding="utf-8")
        else:
            stdout.write(text)
        return EXIT_OK
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    except UsageError as exc:
        print(str(exc), file=stderr)
        return EXIT_USAGE
    except InputError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_USAGE
    except PreconditionError as exc:
        print(f"precondition failed: {exc}", file=stderr)
        return EXIT_PRECONDITION
    except (ConvergenceError, LimitError, ConsistencyError) as exc:
        print(f"did not converge: {exc}", file=stderr)
        return EXIT_CONVERGENCE
    except OSError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())
