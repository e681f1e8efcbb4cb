"""Command-line interface.

Every command writes a table as CSV (header line first) or JSON. Numbers are
printed with ``--precision`` significant digits (10 by default) and the same
rounded values go into both formats. Angle files are plain text with one
value per line (radians unless ``--degrees``); ``-`` reads standard input.

Exit status: 0 on success, 1 for usage or domain errors, 2 when a numerical
procedure does not converge.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import __version__, eeg, estimate, infer, pin, resultant, rng, vm_approx
from .errors import ConvergenceError, PinsyncError

COMMANDS = ("density", "approx", "sample", "estimate", "test", "ci", "spectrum",
            "report", "synth", "montecarlo", "tables")

TABLE3_GAMMAS = (0.05, 0.25, 0.5, 0.75, 1.0, 2.0, 2.5, 3.75, 5.0)
FIG2_GAMMAS = (0.0, 0.25, 0.5, 2.5)
FIG4_GAMMAS = (0.5, 1.0, 1.5, 2.0, 2.5, 3.0)
FIG4_GRID = np.geomspace(1e-3, 100.0, 501)


class UsageError(PinsyncError):
    pass


@dataclass
class CommandPlan:
    command: str
    options: dict
    output: str = "csv"
    output_path: str = "-"
    precision: int = 10


@dataclass
class Table:
    name: str
    columns: list
    rows: list = field(default_factory=list)
    json: dict | None = None  # replaces the record list in JSON output


# ---------------------------------------------------------------------------
# studies behind ``tables``

def fig2_summary(gammas=FIG2_GAMMAS, n=10, reps=100_000, seed=1, workers=None):
    """Simulated CSM against its plug-in density for each ``gamma``.

    Rows: ``gamma, n, reps, mean, var, mean_theory, ks``. The plug-in model is
    the uniform null at ``gamma = 0`` and the Approx 1 von Mises otherwise.
    """
    rows = []
    for g in gammas:
        sim = resultant.monte_carlo_csm(g, n, reps, seed, workers)
        model = "uniform" if g == 0.0 else "pin_approx1"
        spec = resultant.ResultantDensitySpec(n, model, g)
        ks = resultant.ks_distance(sim, lambda v: resultant.csm_cdf(v, spec))
        theory = resultant.rbar_asymptotics(g, n).mean_CSM
        rows.append([g, n, reps, float(sim.mean()), float(sim.var()), theory, ks])
    return Table("fig2", ["gamma", "n", "reps", "mean", "var", "mean_theory", "ks"], rows)


def _pin_rows(gamma, n):
    def draw(gen, count):
        return pin.draw_pin_angles(gen, (count, n), gamma)
    return draw


def fig4_study(gammas=FIG4_GAMMAS, n=10, replicates=200, seed=1, grid=FIG4_GRID, workers=None):
    """Shape of the hybrid log-likelihood in ``gamma`` over seeded replicates.

    Returns a summary table (``gamma, n, replicates, unimodal_frac,
    median_argmax``) and the scans of replicate 0 (``gamma_true, gamma, loglik``).
    """
    summary, scans = [], []
    for g in gammas:
        theta = rng.run_blocks(replicates, seed, _pin_rows(g, n), workers)
        prof = estimate.gamma_profile(theta, grid)
        maxima = estimate.count_local_maxima(prof)
        argmax = grid[np.argmax(prof, axis=1)]
        summary.append([g, n, replicates, float(np.mean(maxima == 1)), float(np.median(argmax))])
        scans.extend([g, float(x), float(y)] for x, y in zip(grid, prof[0]))
    return (Table("fig4", ["gamma", "n", "replicates", "unimodal_frac", "median_argmax"], summary),
            Table("fig4_scan", ["gamma_true", "gamma", "loglik"], scans))


def table3():
    rows = [[g, vm_approx.approx1_kappa(g), vm_approx.approx2_kappa(g)] for g in TABLE3_GAMMAS]
    return Table("table3", ["gamma", "kappa1", "kappa2"], rows)


# ---------------------------------------------------------------------------
# input helpers

def _read_text(path):
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def read_angles(path, degrees=False):
    """Angles from a file with one value per line (blank lines and ``#`` comments skipped)."""
    vals = []
    for lineno, line in enumerate(_read_text(path).splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        for tok in line.replace(",", " ").split():
            try:
                vals.append(float(tok))
            except ValueError:
                from .errors import ParseError

                raise ParseError(f"not a number: {tok!r}", lineno) from None
    if not vals:
        raise UsageError(f"no angles in {path}")
    return pin.AngleSample.from_degrees(vals) if degrees else pin.AngleSample(vals)


def _trace(opts):
    text = _read_text(opts["input"])
    return eeg.parse_trace(io.StringIO(text), opts["fs"], opts["header"], opts["input"])


def _float_or_fraction(text):
    try:
        return float(Fraction(text))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _float_list(text):
    try:
        return [float(Fraction(t)) for t in text.replace(",", " ").split()]
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a list of numbers: {text!r}") from None


# ---------------------------------------------------------------------------
# commands

def cmd_density(o):
    g = o["gamma"]
    if o["statistic"] == "angle":
        if o["theta"] is not None:
            theta = np.deg2rad(o["theta"]) if o["degrees"] else np.asarray(o["theta"])
        else:
            theta = np.linspace(-math.pi, math.pi, o["points"])
        p = pin.PinParams(o["mu"], g)
        k1, k2 = vm_approx.approx1_kappa(g), vm_approx.approx2_kappa(g)
        f = pin.pin_pdf(theta, p)
        v1 = vm_approx.vm_pdf(theta, vm_approx.VonMisesParams(p.mu, k1))
        v2 = vm_approx.vm_pdf(theta, vm_approx.VonMisesParams(p.mu, k2))
        out = np.rad2deg(theta) if o["degrees"] else theta
        return [Table("density", ["theta", "pin", "vm_approx1", "vm_approx2"],
                      [list(map(float, r)) for r in zip(out, f, v1, v2)])]
    if o["n"] is None:
        raise UsageError("--statistic csm needs --n")
    model = o["model"] or ("uniform" if g == 0.0 else "pin_approx1")
    spec = resultant.ResultantDensitySpec(o["n"], model, g)
    v = np.asarray(o["theta"]) if o["theta"] is not None else (np.arange(o["points"]) + 0.5) / o["points"]
    pdf = resultant.csm_pdf(v, spec)
    cdf = resultant.csm_cdf(v, spec)
    return [Table("csm_density", ["v", "pdf", "cdf"], [list(map(float, r)) for r in zip(v, pdf, cdf)])]


def cmd_approx(o):
    cols = ["gamma", "snr", "kappa1", "kappa2"] + (["kl1", "kl2"] if o["kl"] else [])
    rows = []
    for g in o["gamma"]:
        k1, k2 = vm_approx.approx1_kappa(g), vm_approx.approx2_kappa(g)
        row = [g, 2.0 * g, k1, k2]
        if o["kl"]:
            row += [vm_approx.kl_pin_vm(g, k1), vm_approx.kl_pin_vm(g, k2)]
        rows.append(row)
    return [Table("approx", cols, rows)]


def cmd_sample(o):
    s = pin.pin_sample(o["n"], pin.PinParams(o["mu"], o["gamma"]), o["seed"])
    vals = np.rad2deg(s.angles) if o["degrees"] else s.angles
    return [Table("sample", ["theta"], [[float(x)] for x in vals])]


def _estimate_row(sample):
    summ = estimate.circ_summary(sample)
    hyb = estimate.pin_mle(sample, "hybrid")
    joint = estimate.pin_mle(sample, "joint")
    r = min(summ.R_bar, 1.0 - 1e-15)
    return [summ.n, summ.C_bar, summ.S_bar, summ.R_bar, math.degrees(summ.theta_bar) % 360.0 if summ.theta_defined else math.nan,
            summ.csm, hyb.gamma_hat, hyb.loglik, joint.mu_hat, joint.gamma_hat, joint.loglik,
            estimate.mom_gamma_approx1(r), estimate.mom_gamma_approx2(r), estimate.csm_mle(hyb.gamma_hat)]


def cmd_estimate(o):
    cols = ["n", "C_bar", "S_bar", "R_bar", "theta_bar_deg", "csm", "gamma_hybrid", "loglik_hybrid",
            "mu_joint", "gamma_joint", "loglik_joint", "gamma_mom1", "gamma_mom2", "csm_mle"]
    return [Table("estimate", cols, [_estimate_row(read_angles(o["angles"], o["degrees"]))])]


def _test_row(res):
    return [res.method, res.statistic, res.critical_value,
            math.nan if res.p_value is None else res.p_value,
            math.nan if res.df is None else res.df, int(res.reject)]


def cmd_test(o):
    cols = ["method", "statistic", "critical_value", "p_value", "df", "reject"]
    alpha = o["alpha"]
    rows = []
    if o["two_sample"]:
        a = read_angles(o["two_sample"][0], o["degrees"])
        b = read_angles(o["two_sample"][1], o["degrees"])
        rows.append(_test_row(infer.two_sample_lrt(a, b, alpha, o["null"])))
        rows.append(_test_row(infer.two_sample_F(estimate.circ_summary(a), estimate.circ_summary(b), alpha)))
    elif o["angles"]:
        s = read_angles(o["angles"], o["degrees"])
        summ = estimate.circ_summary(s)
        for flavor in ("chi2", "normal", "stephens_exact_table"):
            try:
                rows.append(_test_row(infer.rayleigh_test(summ, alpha, flavor)))
            except infer.UnsupportedCaseError:
                if o["flavor"] == flavor:
                    raise
        rows.append(_test_row(infer.lrt_uniformity(s, alpha)))
        if o["flavor"]:
            rows = [r for r in rows if r[0] in (f"rayleigh_{o['flavor']}", "lrt_uniformity")]
    else:
        raise UsageError("test needs --angles FILE or --two-sample FILE1 FILE2")
    return [Table("test", cols, rows)]


def cmd_ci(o):
    if o["angles"]:
        s = estimate.circ_summary(read_angles(o["angles"], o["degrees"]))
        R, n = s.n * s.R_bar, s.n
    elif o["R"] is not None and o["n"] is not None:
        R, n = o["R"], o["n"]
    else:
        raise UsageError("ci needs --angles FILE or both --R and --n")
    k = infer.kappa_ci(R, n, o["alpha"])
    g = infer.gamma_ci(k, o["mode"])
    c = infer.csm_ci(g)
    rows = [[iv.target, iv.lower, iv.upper, iv.level] for iv in (k, g, c)]
    return [Table("ci", ["target", "lower", "upper", "level"], rows)]


def cmd_spectrum(o):
    segs = eeg.segment(_trace(o), o["segment_seconds"])
    spec = eeg.csm_spectrum(segs, o["max_freq"], o["alpha"], o["demean"])
    return [Table("spectrum", ["freq_hz", "csm", "crit_value"], [list(r) for r in spec.rows()],
                  spec.to_json_dict())]


def cmd_report(o):
    segs = eeg.segment(_trace(o), o["segment_seconds"])
    spec = eeg.csm_spectrum(segs, o["max_freq"], o["alpha"], o["demean"])
    rows = [[r.freq_hz, r.csm, r.gamma_hat, r.csm_ci.lower, r.csm_ci.upper, int(r.csm >= spec.crit_value)]
            for r in eeg.harmonic_report(spec, segs, o["harmonics"], o["alpha"], o["demean"])]
    return [Table("report", ["freq_hz", "csm", "gamma_hat", "ci_lower", "ci_upper", "above_crit"], rows)]


def cmd_synth(o):
    spec = eeg.ImpulseTrainSpec(o["period"], o["amplitude"], o["duration"], o["noise_mean"],
                                o["noise_sd"], o["fs"])
    ts = eeg.synth_impulse_eeg(spec, o["seed"])
    if o["with_time"]:
        t = np.arange(ts.samples.size) / ts.sample_rate_hz
        return [Table("synth", ["time_s", "voltage"], [[float(a), float(b)] for a, b in zip(t, ts.samples)])]
    return [Table("synth", ["voltage"], [[float(x)] for x in ts.samples])]


def cmd_montecarlo(o):
    sim = resultant.monte_carlo_csm(o["gamma"], o["n"], o["reps"], o["seed"], o["workers"])
    if not o["summary"]:
        return [Table("montecarlo", ["csm"], [[float(x)] for x in sim])]
    if o["n"] < 2:
        raise UsageError("--summary needs --n >= 2")
    model = "uniform" if o["gamma"] == 0.0 else "pin_approx1"
    spec = resultant.ResultantDensitySpec(o["n"], model, o["gamma"])
    ks = resultant.ks_distance(sim, lambda v: resultant.csm_cdf(v, spec))
    return [Table("montecarlo", ["gamma", "n", "reps", "mean", "var", "ks"],
                  [[o["gamma"], o["n"], o["reps"], float(sim.mean()), float(sim.var()), ks]])]


def cmd_tables(o):
    which = o["which"]
    out = []
    if which in ("table3", "all"):
        out.append(table3())
    if which in ("fig2", "all"):
        out.append(fig2_summary(reps=o["reps"], seed=o["seed"], workers=o["workers"]))
    if which in ("fig4", "fig4_scan", "all"):
        summ, scan = fig4_study(replicates=o["replicates"], seed=o["seed"], workers=o["workers"])
        if which in ("fig4", "all"):
            out.append(summ)
        if which in ("fig4_scan", "all"):
            out.append(scan)
    return out


HANDLERS = {name: globals()[f"cmd_{name}"] for name in COMMANDS}


# ---------------------------------------------------------------------------
# parsing and output

def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1: {text!r}")
    return v


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--output", choices=("csv", "json"), default="csv")
    common.add_argument("--out", default="-", help="output path ('-' for stdout)")
    common.add_argument("--precision", type=_positive_int, default=10, help="significant digits")
    seeded = _Parser(add_help=False)
    seeded.add_argument("--seed", type=int, default=1)
    seeded.add_argument("--workers", type=_positive_int, default=None,
                        help="worker threads (default from PINSYNC_THREADS)")
    angles = _Parser(add_help=False)
    angles.add_argument("--degrees", action="store_true", help="angles are in degrees")
    trace = _Parser(add_help=False)
    trace.add_argument("--input", required=True, help="CSV trace ('-' for stdin)")
    trace.add_argument("--fs", type=float, default=None, help="sample rate in Hz")
    trace.add_argument("--header", action="store_true", help="skip the first line")
    trace.add_argument("--segment-seconds", type=float, default=2.0)
    trace.add_argument("--alpha", type=float, default=0.05)
    trace.add_argument("--max-freq", type=float, default=None)
    trace.add_argument("--demean", action="store_true")

    p = _Parser(prog="pinsync", description="PIN phase model, CSM inference and EEG phase synchrony.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("density", parents=[common, angles], help="PIN and von Mises densities, or the CSM density")
    s.add_argument("--gamma", type=float, required=True)
    s.add_argument("--mu", type=float, default=0.0)
    s.add_argument("--statistic", choices=("angle", "csm"), default="angle")
    s.add_argument("--n", type=int, default=None)
    s.add_argument("--model", choices=resultant.MODELS, default=None)
    s.add_argument("--points", type=_positive_int, default=361)
    s.add_argument("--theta", type=_float_list, default=None, help="evaluation points (angles or CSM values)")

    s = sub.add_parser("approx", parents=[common], help="von Mises concentrations for PIN(gamma)")
    s.add_argument("--gamma", type=float, nargs="+", required=True)
    s.add_argument("--kl", action="store_true", help="also report KL divergences")

    s = sub.add_parser("sample", parents=[common, seeded, angles], help="draw PIN angles")
    s.add_argument("--gamma", type=float, required=True)
    s.add_argument("--mu", type=float, default=0.0)
    s.add_argument("--n", type=_positive_int, required=True)

    s = sub.add_parser("estimate", parents=[common, angles], help="summaries and estimates of gamma")
    s.add_argument("--angles", required=True)

    s = sub.add_parser("test", parents=[common, angles], help="uniformity and two-sample tests")
    s.add_argument("--angles", default=None)
    s.add_argument("--two-sample", nargs=2, metavar="FILE", default=None)
    s.add_argument("--alpha", type=float, default=0.05)
    s.add_argument("--flavor", choices=("chi2", "normal", "stephens_exact_table"), default=None)
    s.add_argument("--null", choices=("common", "common_gamma"), default="common")

    s = sub.add_parser("ci", parents=[common, angles], help="intervals for kappa, gamma and CSM")
    s.add_argument("--angles", default=None)
    s.add_argument("--R", type=float, default=None, help="resultant length n * Rbar")
    s.add_argument("--n", type=int, default=None)
    s.add_argument("--alpha", type=float, default=0.05)
    s.add_argument("--mode", choices=("exact", "div4"), default="exact")

    sub.add_parser("spectrum", parents=[common, trace], help="CSM spectrum of a trace")

    s = sub.add_parser("report", parents=[common, trace], help="estimates and intervals at harmonics")
    s.add_argument("--harmonics", type=_float_list, required=True)

    s = sub.add_parser("synth", parents=[common, seeded], help="synthetic impulse-train trace")
    s.add_argument("--period", type=_float_or_fraction, default=1.0 / 6.0, help="seconds; fractions like 1/6 allowed")
    s.add_argument("--amplitude", type=float, default=1.0)
    s.add_argument("--duration", type=float, default=24.0)
    s.add_argument("--noise-mean", type=float, default=0.0)
    s.add_argument("--noise-sd", type=float, default=1.0)
    s.add_argument("--fs", type=float, default=256.0)
    s.add_argument("--with-time", action="store_true")

    s = sub.add_parser("montecarlo", parents=[common, seeded], help="simulated CSM values")
    s.add_argument("--gamma", type=float, required=True)
    s.add_argument("--n", type=_positive_int, required=True)
    s.add_argument("--reps", type=_positive_int, default=100_000)
    s.add_argument("--summary", action="store_true", help="emit mean, variance and KS distance only")

    s = sub.add_parser("tables", parents=[common, seeded], help="regenerate the reference tables")
    s.add_argument("--which", choices=("table3", "fig2", "fig4", "fig4_scan", "all"), default="table3")
    s.add_argument("--reps", type=_positive_int, default=100_000, help="replicates per gamma for fig2")
    s.add_argument("--replicates", type=_positive_int, default=200, help="replicates per gamma for fig4")
    return p


_GLOBAL = ("output", "out", "precision", "command")


def parse_args(argv):
    """Validate ``argv`` into a :class:`CommandPlan`; raises ``UsageError``."""
    ns = build_parser().parse_args(argv)
    opts = {k: v for k, v in vars(ns).items() if k not in _GLOBAL}
    return CommandPlan(ns.command, opts, ns.output, ns.out, ns.precision)


def _fmt(x, precision):
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.{precision}g}"


def _json_value(x, precision):
    s = _fmt(x, precision)
    if isinstance(x, str):
        return x
    if s in ("nan", "inf", "-inf"):
        return None if s == "nan" else s
    return int(s) if isinstance(x, (int, np.integer)) else float(s)


def _json_obj(obj, precision):
    if isinstance(obj, dict):
        return {k: _json_obj(v, precision) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_json_obj(v, precision) for v in obj]
    return _json_value(obj, precision)


def render(tables, output="csv", precision=10):
    """Serialize tables to text."""
    if output == "json":
        def one(t):
            if t.json is not None:
                return _json_obj(t.json, precision)
            return [{c: _json_value(v, precision) for c, v in zip(t.columns, row)} for row in t.rows]
        payload = one(tables[0]) if len(tables) == 1 else {t.name: one(t) for t in tables}
        return json.dumps(payload, indent=None, separators=(",", ":")) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for i, t in enumerate(tables):
        if len(tables) > 1:
            if i:
                buf.write("\n")
            buf.write(f"# {t.name}\n")
        w.writerow(t.columns)
        for row in t.rows:
            w.writerow([_fmt(v, precision) for v in row])
    return buf.getvalue()


def run(plan):
    """Execute ``plan`` and write its output; returns the exit status."""
    tables = HANDLERS[plan.command](plan.options)
    text = render(tables, plan.output, plan.precision)
    if plan.output_path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(plan.output_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return 0


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    try:
        plan = parse_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            code = run(plan)
        except ConvergenceError as exc:
            print(f"error: {plan.command}: {exc}", file=sys.stderr)
            code = 2
        except (PinsyncError, ValueError, OSError) as exc:
            print(f"error: {plan.command}: {exc}", file=sys.stderr)
            code = 1
    seen = set()
    for w in caught:
        msg = str(w.message)
        if msg not in seen:
            seen.add(msg)
            print(f"warning: {msg}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
