"""Command-line interface: deterministic CSV scans and the verification suite.

Every command writes CSV with provenance comment lines (prefixed ``#``)
recording the package version and all effective parameters, then a header
row, then data rows with floats in 12-significant-digit scientific
notation.  No timestamps are written, so identical invocations produce
byte-identical files.

Exit codes: 0 success, 1 usage or parameter error, 2 verification failure.
"""

from __future__ import annotations

import argparse
import math
import sys
from fractions import Fraction

import numpy as np

from . import __version__, arith, eulerphase as ep, gammaphase as gp, lfunction as lf
from .arith import SPoint
from .errors import DomainError, ResourceLimitError, SingularityError, TruncationError

_P_MAX_DEFAULT = 10 ** 6
_P_MAX_CAP = 10 ** 8


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 1 on usage errors, not argparse's default 2
        raise _UsageError(message)


def _fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.11e}"
    return str(x)


def _write_csv(path: str | None, command: str, params: dict, header: list[str],
               rows: list[list]) -> None:
    lines = [f"# lphase {__version__}", f"# command: {command}"]
    lines += [f"# {k}={v}" for k, v in params.items()]
    lines.append(",".join(header))
    lines += [",".join(_fmt(x) for x in row) for row in rows]
    text = "\n".join(lines) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _resolve_character(args) -> arith.DirichletCharacter:
    chars = arith.enumerate_characters(args.q)
    if getattr(args, "match_phase", None):
        wanted = {}
        for spec in args.match_phase:
            try:
                n_str, frac = spec.split("=", 1)
                wanted[int(n_str)] = Fraction(frac)
            except (ValueError, ZeroDivisionError) as exc:
                raise _UsageError(f"--match-phase expects n=num/den, got {spec!r} ({exc})")
        hits = [c for c in chars
                if all(c.phase_turns[n % args.q] == r for n, r in wanted.items())]
        if len(hits) != 1:
            raise _UsageError(
                f"--match-phase selects {len(hits)} characters mod {args.q}; "
                f"candidates: {[c.index for c in hits]}"
            )
        return hits[0]
    if args.chi_index is None:
        raise _UsageError("--chi-index (or --match-phase) is required")
    if not 0 <= args.chi_index < len(chars):
        raise _UsageError(f"--chi-index must be in [0, {len(chars) - 1}] for q={args.q}")
    return chars[args.chi_index]


def _check_p_max(args) -> None:
    if args.p_max > _P_MAX_CAP and not args.allow_large:
        raise _UsageError(
            f"--p-max {args.p_max} exceeds the cap {_P_MAX_CAP}; pass --allow-large"
        )
    if args.p_max < 2:
        raise _UsageError("--p-max must be at least 2")


def _table(args) -> arith.PrimeTable:
    _check_p_max(args)
    return arith.sieve_primes(args.p_max, args.q, p_budget=max(args.p_max, 10 ** 8))


def _t_grid(args) -> np.ndarray:
    if args.t_step <= 0:
        raise _UsageError("--t-step must be positive")
    if args.t_max <= args.t_min:
        raise _UsageError("--t-max must exceed --t-min")
    return np.round(np.arange(args.t_min, args.t_max + args.t_step / 2, args.t_step), 12)


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------

def _cmd_characters(args) -> int:
    chars = arith.enumerate_characters(args.q)
    header = ["chi_index", "conductor", "parity", "is_principal", "is_primitive"]
    header += [f"angle_turns_n{n}" for n in range(args.q)]
    rows = []
    for c in chars:
        row = [c.index, c.conductor, c.parity, int(c.is_principal), int(c.is_primitive)]
        row += ["" if r is None else str(r) for r in c.phase_turns]
        rows.append(row)
    _write_csv(args.out, "characters", {"q": args.q}, header, rows)
    return 0


def _cmd_gauss(args) -> int:
    rows = []
    for c in arith.enumerate_characters(args.q):
        tau = arith.gauss_sum(c)
        rows.append([c.index, int(c.is_primitive), tau.real, tau.imag,
                     abs(tau) ** 2, args.q - abs(tau) ** 2])
    _write_csv(args.out, "gauss", {"q": args.q},
               ["chi_index", "is_primitive", "tau_re", "tau_im", "abs_tau_sq", "q_minus_abs_tau_sq"],
               rows)
    return 0


def _cmd_figure_mixed(args) -> int:
    grid = _t_grid(args)
    rows = []
    for t in grid:
        t = float(t)
        row = [t]
        for alpha in (0, 1, 2):
            row.append(gp.mixed_second_derivative(t, alpha, route="gw", n_terms=args.gw_terms))
        row += [(2 * a - 1) / (4.0 * t * t) for a in (0, 1, 2)]
        rows.append(row)
    _write_csv(args.out, "figure-mixed",
               {"t_min": args.t_min, "t_max": args.t_max, "t_step": args.t_step,
                "gw_terms": args.gw_terms},
               ["t", "mixed_alpha0", "mixed_alpha1", "mixed_alpha2",
                "ref_alpha0", "ref_alpha1", "ref_alpha2"], rows)
    return 0


def _cmd_figure_prefactor(args, alpha: int, name: str) -> int:
    params = gp.PrefactorParams.for_alpha(alpha, args.q)
    grid = _t_grid(args)
    rows = []
    for t in grid:
        t = float(t)
        val = gp.prefactor_dphase_dt(SPoint(args.eps, t), params, args.gw_terms)
        asym = 0.5 * math.log(abs(t) * args.q / (2.0 * math.pi)) if t != 0 else float("nan")
        rows.append([t, val, asym])
    _write_csv(args.out, name,
               {"q": args.q, "alpha": alpha, "eps": args.eps,
                "t_min": args.t_min, "t_max": args.t_max, "t_step": args.t_step,
                "gw_terms": args.gw_terms},
               ["t", "prefactor_dphase_dt", "asymptote_log_sqrt"], rows)
    return 0


def _cmd_figure_symmetries(args) -> int:
    chi = _resolve_character(args)
    table = _table(args)
    window = ep.WindowParams(p_star=args.p_star, p_max=args.p_max)
    grid = _t_grid(args)
    sc = ep.scan(chi, args.eps, grid, table, window)
    rows = []
    for t, v in zip(sc.t_grid, sc.values):
        lvl = (-0.5 * math.log(abs(t) * args.q / (2.0 * math.pi))
               if t != 0 else float("nan"))
        rows.append([float(t), float(v), lvl])
    _write_csv(args.out, "figure-symmetries",
               {"q": args.q, "chi_index": chi.index, "eps": args.eps,
                "p_star": args.p_star, "p_max": args.p_max,
                "t_min": args.t_min, "t_max": args.t_max, "t_step": args.t_step},
               ["t", "windowed_ratio_exact", "minus_log_sqrt_level"], rows)
    return 0


def _cmd_table_odd(args) -> int:
    rows = []
    for q in (3, 4, 5, 7, 8, 9):
        t = gp.find_t_cross(gp.PrefactorParams.for_alpha(1, q), n_terms=args.gw_terms)
        rows.append([q, "always-positive" if t is None else t])
    _write_csv(args.out, "table-odd", {"gw_terms": args.gw_terms},
               ["q", "t_cross"], rows)
    return 0


def _cmd_scan_zeros(args) -> int:
    chi = _resolve_character(args)
    if not chi.is_primitive or chi.is_principal:
        raise _UsageError("--chi-index must select a primitive non-principal character")
    records = lf.find_zeros_on_line(chi, args.t_min, args.t_max, args.t_step)
    rows = [[("" if r.t_zero is None else r.t_zero), r.bracket[0], r.bracket[1],
             r.tol, r.sign_before, r.sign_after, int(r.suspected_multiple)]
            for r in records]
    _write_csv(args.out, "scan-zeros",
               {"q": args.q, "chi_index": chi.index, "t_min": args.t_min,
                "t_max": args.t_max, "t_step": args.t_step},
               ["t_zero", "bracket_lo", "bracket_hi", "tol",
                "sign_before", "sign_after", "suspected_multiple"], rows)
    return 0


def _cmd_level_check(args) -> int:
    chi = _resolve_character(args)
    if not chi.is_primitive or chi.is_principal:
        raise _UsageError("--chi-index must select a primitive non-principal character")
    table = _table(args)
    window = ep.WindowParams(p_star=args.p_star, p_max=args.p_max)
    res = ep.level_check(args.t, args.eps, chi, table, window)
    target = -0.5 * math.log(args.t * args.q / (2.0 * math.pi))
    _write_csv(args.out, "level-check",
               {"q": args.q, "chi_index": chi.index, "t": args.t, "eps": args.eps,
                "p_star": args.p_star, "p_max": args.p_max},
               ["t", "eps", "windowed_ratio", "lhs", "xi_phase_dt", "defect", "target_level"],
               [[res.t, res.eps, res.windowed, res.lhs, res.xi_phase_dt, res.defect, target]])
    return 0


def _cmd_ledger(args) -> int:
    chi = _resolve_character(args)
    table = _table(args)
    window = ep.WindowParams(p_star=args.p_star, p_max=args.p_max)
    k_max = args.k_max
    if k_max is None:
        k_max = ep.max_k_for_bound(args.t, chi, float(min(args.p_max, args.p_star)))
    led = ep.build_oscillation_ledger(args.t, args.eps, chi, table, window, k_max)
    rows = [[e.k, e.h, e.x_up, e.x_down, e.x_up_next,
             e.o_plus_sum, e.o_minus_sum, e.o_plus_li, e.o_minus_li]
            for e in led.entries]
    _write_csv(args.out, "ledger",
               {"q": args.q, "chi_index": chi.index, "t": args.t, "eps": args.eps,
                "p_star": args.p_star, "p_max": args.p_max, "k_max": k_max},
               ["k", "h", "x_up", "x_down", "x_up_next",
                "o_plus_sum", "o_minus_sum", "o_plus_li", "o_minus_li"], rows)
    return 0


def _cmd_verify(args) -> int:
    from . import verify

    ids = None
    if args.criteria:
        try:
            ids = sorted({int(x) for x in args.criteria.split(",")})
        except ValueError:
            raise _UsageError("--criteria expects a comma-separated list of integers")
        known = {num for num, _, _, _ in verify.CRITERIA}
        if not set(ids) <= known:
            raise _UsageError(f"--criteria contains unknown ids: {sorted(set(ids) - known)}")
    results = verify.run_acceptance(ids)
    if args.out:
        _write_csv(args.out, "verify", {"criteria": args.criteria or "all"},
                   ["criterion", "passed", "elapsed_s", "title", "detail"],
                   [[r.cid, int(r.passed), r.elapsed, r.title, r.detail.replace(",", ";")]
                    for r in results])
    return 0 if all(r.passed for r in results) else 2


# --------------------------------------------------------------------------
# argument wiring
# --------------------------------------------------------------------------

def _add_out(p):
    p.add_argument("--out", default=None, help="output CSV path (default: stdout)")


def _add_character_opts(p):
    p.add_argument("--chi-index", type=int, default=None,
                   help="character index in the deterministic enumeration")
    p.add_argument("--match-phase", action="append", default=None, metavar="N=NUM/DEN",
                   help="select the character with phase_turns[N] = NUM/DEN (repeatable)")


def _add_prime_opts(p):
    p.add_argument("--p-star", type=float, default=float(_P_MAX_DEFAULT),
                   help="window prime scale p* (real, default 1e6)")
    p.add_argument("--p-max", type=int, default=_P_MAX_DEFAULT,
                   help="prime summation cutoff (default 1e6)")
    p.add_argument("--allow-large", action="store_true",
                   help="permit p_max beyond the 1e8 guardrail")


def _add_grid_opts(p, t_min, t_max, t_step):
    p.add_argument("--t-min", type=float, default=t_min)
    p.add_argument("--t-max", type=float, default=t_max)
    p.add_argument("--t-step", type=float, default=t_step)


def build_parser() -> _Parser:
    parser = _Parser(prog="lphase",
                     description="Dirichlet L-function phase scans and verification")
    parser.add_argument("--version", action="version", version=f"lphase {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("characters", help="exact character phase table mod q")
    p.add_argument("--q", type=int, required=True)
    _add_out(p)
    p.set_defaults(fn=_cmd_characters)

    p = sub.add_parser("gauss", help="Gauss sums and the |tau|^2 = q law")
    p.add_argument("--q", type=int, required=True)
    _add_out(p)
    p.set_defaults(fn=_cmd_gauss)

    p = sub.add_parser("figure-mixed", help="mixed-derivative curves for alpha = 0, 1, 2")
    _add_grid_opts(p, 0.25, 10.0, 0.25)
    p.add_argument("--gw-terms", type=int, default=2 * 10 ** 5)
    _add_out(p)
    p.set_defaults(fn=_cmd_figure_mixed)

    p = sub.add_parser("figure-q3", help="odd prefactor-phase derivative curve")
    p.add_argument("--q", type=int, default=3)
    p.add_argument("--eps", type=float, default=0.0)
    _add_grid_opts(p, 0.05, 10.0, 0.05)
    p.add_argument("--gw-terms", type=int, default=2 * 10 ** 5)
    _add_out(p)
    p.set_defaults(fn=lambda a: _cmd_figure_prefactor(a, 1, "figure-q3"))

    p = sub.add_parser("figure-q5", help="even prefactor-phase derivative curve")
    p.add_argument("--q", type=int, default=5)
    p.add_argument("--eps", type=float, default=0.0)
    _add_grid_opts(p, 0.05, 10.0, 0.05)
    p.add_argument("--gw-terms", type=int, default=2 * 10 ** 5)
    _add_out(p)
    p.set_defaults(fn=lambda a: _cmd_figure_prefactor(a, 0, "figure-q5"))

    p = sub.add_parser("figure-symmetries", help="windowed estimator scan over a +/- t grid")
    p.add_argument("--q", type=int, required=True)
    _add_character_opts(p)
    p.add_argument("--eps", type=float, default=0.0)
    _add_grid_opts(p, -15.0, 15.0, 0.1)
    _add_prime_opts(p)
    _add_out(p)
    p.set_defaults(fn=_cmd_figure_symmetries)

    p = sub.add_parser("table-odd", help="crossing thresholds t_cross for q = 3..9")
    p.add_argument("--gw-terms", type=int, default=10 ** 6)
    _add_out(p)
    p.set_defaults(fn=_cmd_table_odd)

    p = sub.add_parser("scan-zeros", help="critical-line zeros of eta by sign changes")
    p.add_argument("--q", type=int, required=True)
    _add_character_opts(p)
    _add_grid_opts(p, 0.0, 30.0, 0.05)
    _add_out(p)
    p.set_defaults(fn=_cmd_scan_zeros)

    p = sub.add_parser("level-check", help="windowed level against the xi phase derivative")
    p.add_argument("--q", type=int, required=True)
    _add_character_opts(p)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--eps", type=float, default=0.0)
    _add_prime_opts(p)
    _add_out(p)
    p.set_defaults(fn=_cmd_level_check)

    p = sub.add_parser("ledger", help="oscillation masses per (k, h) by sum and Li integral")
    p.add_argument("--q", type=int, required=True)
    _add_character_opts(p)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--eps", type=float, default=0.0)
    p.add_argument("--k-max", type=int, default=None,
                   help="largest oscillation index (default: largest fitting p_max)")
    _add_prime_opts(p)
    _add_out(p)
    p.set_defaults(fn=_cmd_ledger)

    p = sub.add_parser("verify", help="run the acceptance suite (exit 2 on failure)")
    p.add_argument("--criteria", default=None,
                   help="comma-separated criterion ids (default: all)")
    _add_out(p)
    p.set_defaults(fn=_cmd_verify)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.fn(args)
    except _UsageError as exc:
        print(f"lphase: usage error: {exc}", file=sys.stderr)
        return 1
    except (DomainError, ResourceLimitError, TruncationError, SingularityError) as exc:
        print(f"lphase: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
