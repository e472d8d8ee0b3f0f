"""Command-line front end.

Every subcommand accepts ``--config FILE`` or ``--preset NAME`` plus one flag
per config key (``--omega_R1 2`` ...); flags override the document.  Exit
codes: 0 success, 1 usage/parse/numerical error, 2 failed ``validate``.
"""

import argparse
import sys

import numpy as np

from . import analytic, estimation, model, sweep
from .errors import MetrologyError
from .sweep import format_value

SINGLE_POINT = ("state", "qfi", "qfim", "hss", "bounds", "ratio", "witness")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_common(p: argparse.ArgumentParser):
    src = p.add_mutually_exclusive_group()
    src.add_argument("--config", help="key = value configuration file")
    src.add_argument("--preset", help="shipped preset name (fig2a ... fig10b)")
    for key in sweep.CONFIG_KEYS:
        p.add_argument(f"--{key}", dest=f"key_{key}", metavar="VALUE", default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lambda-metrology", description="Quantum estimation of the level energies of a driven Lambda atom.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    helps = {
        "state": "evolved state, populations and CPT flag at --time",
        "qfi": "quantum Fisher information of one level energy",
        "qfim": "quantum Fisher information matrix over a parameter subset",
        "hss": "Hilbert-Schmidt speed of one level energy",
        "bounds": "independent and simultaneous variance bounds",
        "ratio": "performance ratio R of simultaneous vs independent estimation",
        "witness": "max |Tr(rho [L_i, L_j])| over parameter pairs",
    }
    for name in SINGLE_POINT:
        p = sub.add_parser(name, help=helps[name])
        _add_common(p)
        if name in ("qfi", "hss"):
            p.add_argument("--param", default="wa", help="wa, wb or wc (default wa)")
        if name == "qfi":
            p.add_argument("--method", choices=("sld", "pure", "closed"), default="sld")
        if name in ("qfim", "bounds", "ratio", "witness"):
            p.add_argument("--subset", default="wa+wb", help="e.g. wa+wb (default)")

    p = sub.add_parser("sweep", help="evaluate quantities on a grid and write CSV")
    _add_common(p)
    p.add_argument("--output", help="CSV destination (default: standard output)")
    p.add_argument("--list-presets", action="store_true", help="list shipped presets and exit")
    p.add_argument("--quiet", action="store_true", help="suppress the summary on standard error")

    p = sub.add_parser("validate", help="cross-check closed forms against the numeric QFI paths")
    _add_common(p)
    p.add_argument("--t-max", type=float, default=20.0, help="grid end, in units of 1/Omega (default 20)")
    p.add_argument("--grid", type=int, default=100, help="number of grid points (default 100)")
    p.add_argument("--tolerance", type=float, default=1e-8)
    return parser


def _entries(args) -> dict:
    if args.preset:
        entries = sweep.read_entries(sweep.preset_text(args.preset))
    elif args.config:
        with open(args.config) as fh:
            entries = sweep.read_entries(fh.read())
    else:
        entries = {}
    for key in sweep.CONFIG_KEYS:
        value = getattr(args, f"key_{key}")
        if value is not None:
            if key == "alpha":
                entries.pop("psi", None)
            elif key == "psi":
                entries.pop("alpha", None)
            entries[key] = (0, value)
    return entries


def _time(entries) -> float:
    t = sweep._number(entries, "time", 1.0)
    if t < 0:
        raise MetrologyError("time must be non-negative")
    return t


def _print(pairs, out):
    for k, v in pairs:
        out.write(f"{k} = {v if isinstance(v, str) else format_value(v)}\n")


def _single_point(args, out) -> int:
    entries = _entries(args)
    params = sweep.params_from_entries(entries)
    t = _time(entries)
    cfg = estimation.EstimationConfig(M=sweep._integer(entries, "M", 1))
    cmd = args.command
    if cmd == "state":
        state = model.evolve(params, t)
        pairs = [("t", t), ("Omega", params.Omega), ("alpha", params.alpha)]
        for lvl, amp, pop in zip("abc", state.amplitudes, state.populations):
            pairs.append((f"psi_{lvl}", f"{format_value(amp.real)}{'+' if amp.imag >= 0 else '-'}{format_value(abs(amp.imag))}j"))
            pairs.append((f"P_{lvl}", pop))
        pairs += [("norm", state.norm), ("cpt", model.is_cpt(params))]
    elif cmd in ("qfi", "hss"):
        k = model.parameter_id(args.param)
        if cmd == "hss":
            pairs = [(f"HSS_{k}", estimation.hss(params, t, k))]
        elif args.method == "sld":
            pairs = [(f"F_{k}", estimation.qfi_single(params, t, k))]
        elif args.method == "pure":
            pairs = [(f"F_{k}", estimation.qfi_pure(params, t, k))]
        else:
            pairs = [(f"F_{k}", analytic.eval_closed_form(analytic.GENERAL[k], params, t))]
    else:
        ids = estimation.parse_subset(args.subset)
        s = "_".join(ids)
        if cmd == "witness":
            pairs = [(f"W_{s}", estimation.saturability_witness(params, t, ids))]
        else:
            F = estimation.qfim(params, t, ids)
            if cmd == "qfim":
                pairs = [(f"F_{a}_{b}", F[a, b]) for i, a in enumerate(ids) for b in ids[i:]]
                pairs.append((f"detF_{s}", F.det))
            elif cmd == "bounds":
                b = estimation.variance_bounds(F, cfg)
                pairs = [(f"delta_i_{s}", b.delta_independent), (f"delta_s_{s}", b.delta_simultaneous)]
                pairs += [(f"var_s_{k}", v) for k, v in zip(ids, b.per_parameter_simultaneous)]
            else:
                pairs = [(f"R_{s}", estimation.performance_ratio(F, cfg))]
    _print(pairs, out)
    return 0


def _sweep(args, out, err) -> int:
    if args.list_presets:
        out.write("\n".join(sweep.preset_names()) + "\n")
        return 0
    spec = sweep.spec_from_entries(_entries(args))
    result = sweep.run_sweep(spec)
    if args.output:
        with open(args.output, "w", newline="\n") as fh:
            sweep.emit_csv(result, fh)
    else:
        sweep.emit_csv(result, out)
    if not args.quiet:
        err.write(spec.describe() + "\n" + result.summary() + "\n")
    return 0


def _validate(args, out) -> int:
    entries = _entries(args)
    params = sweep.params_from_entries(entries)
    grid = np.linspace(0.0, args.t_max / params.Omega, args.grid)
    report = analytic.cross_validate(params, grid, tolerance=args.tolerance)
    out.write(report.summary() + "\n")
    for k, t, a, b, va, vb in report.failures[:10]:
        out.write(f"  {k} t={t!r}: {a}={va!r} vs {b}={vb!r}\n")
    out.write("PASS\n" if report.passed else "FAIL\n")
    return 0 if report.passed else 2


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        if args.command == "sweep":
            return _sweep(args, out, err)
        if args.command == "validate":
            return _validate(args, out)
        return _single_point(args, out)
    except (MetrologyError, OSError) as exc:
        err.write(f"error: {exc}\n")
        return 1


def main_entry():
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
