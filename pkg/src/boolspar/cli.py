"""Command-line experiment runner.

Every subcommand builds a report dict, writes it as canonical JSON (or a
versioned CSV), and exits with 0 on success, 2 when a probability-1 check
failed, 3 when a statistical bound exceeded its slack, and 4 on bad input.
"""

from __future__ import annotations

import argparse
import csv
import io as _io
import math
import sys
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from . import io
from .approx import (
    amplify,
    check_thr_approximation,
    chebyshev_or_approximator,
    chebyshev_T,
    max_error,
    or_approx_degree,
    or_level,
    sparsify_by_sampling,
    symmetric_max_error,
    thr_approximator,
)
from .boolfun import (
    critical_inputs,
    is_separating,
    mbs,
    or_fn,
    parse_function,
    sensitivity,
    sink_fn,
    sink_genpoly,
    thr_fn,
    zero_restriction_survival,
)
from .dtree import RandomizedTree, randomized_to_genpoly, tree_table, tree_to_genpoly
from .genpoly import gen_max_error, gen_measures, gen_values
from .maxdeg import default_monomials, verify_max_degree_distribution
from .maxsens import default_gen_monomials, verify_max_sens_distribution
from .poly import BOOLEAN, mask_of, measures, mobius_from_table, poly_values, popcount
from .stats import hoeffding_slack

EXIT_OK, EXIT_ASSERT, EXIT_STAT, EXIT_INPUT = 0, 2, 3, 4
CSV_SCHEMA = "1"
CSV_COLUMNS = ("schema", "section", "key", "value")


class InputError(Exception):
    """Bad command-line arguments or input files."""


@dataclass
class ExperimentConfig:
    kind: str
    fn: str | None = None
    trials: int = 1000
    seed: int = 0
    threads: int = 1
    out: str | None = None
    fmt: str = "json"
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.trials < 1:
            raise InputError("--trials must be at least 1")
        if self.threads < 1:
            raise InputError("--threads must be at least 1")
        if self.fmt not in ("json", "csv"):
            raise InputError("--format must be json or csv")


@dataclass
class Report:
    config: dict
    result: dict
    status: int = EXIT_OK
    wall_time: float = 0.0

    def as_dict(self) -> dict:
        return {"config": self.config, "result": self.result, "status": self.status,
                "passed": self.status == EXIT_OK, "wall_time": self.wall_time}


# --------------------------------------------------------------------------
# helpers
# --------------------------------------------------------------------------

def _function(spec: str | None, table_path: str | None = None):
    if table_path:
        return "table:" + table_path, io.read_table(table_path)
    if not spec:
        raise InputError("a function is required (--fn family:N or --table FILE)")
    try:
        nf = parse_function(spec)
    except ValueError as e:
        raise InputError(str(e)) from e
    return nf.spec, nf.table


def _parse_monomials(text: str | None, n: int) -> dict[str, int]:
    """``full``, ``half`` or dash-joined 1-based indices such as ``1-2-5``; comma separated."""
    if not text:
        return default_monomials(n)
    named = default_monomials(n)
    out = {}
    for tok in text.split(","):
        tok = tok.strip()
        if tok in named:
            out[tok] = named[tok]
            continue
        try:
            idx = [int(v) for v in tok.split("-")]
        except ValueError:
            raise InputError(f"bad monomial {tok!r}") from None
        if any(i < 1 or i > n for i in idx):
            raise InputError(f"monomial {tok!r} mentions variables outside 1..{n}")
        out["x" + "x".join(str(i) for i in sorted(idx))] = mask_of(i - 1 for i in idx)
    return out


def _parse_gen_monomials(text: str | None, n: int) -> list[tuple[int, int]]:
    """Semicolon separated; each is comma separated signed 1-based indices, e.g. ``1,2,-3,-4``."""
    if not text:
        return default_gen_monomials(n)
    out = []
    for tok in text.split(";"):
        pos = neg = 0
        for v in tok.split(","):
            try:
                i = int(v)
            except ValueError:
                raise InputError(f"bad literal {v!r}") from None
            if i == 0 or abs(i) > n:
                raise InputError(f"literal {i} outside +-1..{n}")
            if i > 0:
                pos |= 1 << (i - 1)
            else:
                neg |= 1 << (-i - 1)
        if pos & neg:
            raise InputError(f"monomial {tok!r} uses a variable and its negation")
        out.append((pos, neg))
    return out


def _input_set(choice: str, f):
    if choice.startswith("file:"):
        F = io.read_input_set(choice[5:], f.n)
        if len(set(F)) != len(F):
            raise InputError("input set file contains duplicates")
        return frozenset(F)
    try:
        crit = critical_inputs(f)
    except ValueError as e:
        raise InputError(str(e)) from e
    sets = {"minterms": crit.M1, "maxterms": crit.M0, "both": crit.M0 | crit.M1}
    if choice not in sets:
        raise InputError("--set must be minterms, maxterms, both or file:<path>")
    return sets[choice]


def _status(per_run_ok: bool, stats_ok: bool = True) -> int:
    if not per_run_ok:
        return EXIT_ASSERT
    if not stats_ok:
        return EXIT_STAT
    return EXIT_OK


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------

def cmd_measure(cfg: ExperimentConfig) -> tuple[dict, int]:
    o = cfg.options
    if o.get("poly"):
        p = io.poly_from_json(io.read_json(o["poly"]))
        return {"n": p.n, **measures(p)}, EXIT_OK
    name, f = _function(cfg.fn, o.get("table"))
    p = mobius_from_table(f)
    out = {"function": name, "n": f.n, **measures(p)}
    if f.value_kind == BOOLEAN:
        out["sensitivity"] = sensitivity(f)
    return out, EXIT_OK


def cmd_maxdeg(cfg: ExperimentConfig) -> tuple[dict, int]:
    name, f = _function(cfg.fn, cfg.options.get("table"))
    if f.value_kind != BOOLEAN or f.is_constant:
        raise InputError("maxdeg needs a non-constant Boolean function")
    monos = _parse_monomials(cfg.options.get("monomials"), f.n)
    rep = verify_max_degree_distribution(f, cfg.trials, cfg.seed, monos, cfg.options.get("slack"),
                                         cfg.threads, name=name)
    return rep.as_dict(), _status(rep.per_run_ok, rep.stats_ok)


def cmd_maxsens(cfg: ExperimentConfig) -> tuple[dict, int]:
    name, f = _function(cfg.fn, cfg.options.get("table"))
    if f.value_kind != BOOLEAN:
        raise InputError("maxsens needs a Boolean function")
    F = _input_set(cfg.options.get("set", "both"), f)
    if not F:
        raise InputError("the input set is empty")
    if not is_separating(F, f):
        raise InputError("the input set is not separating for this function")
    monos = _parse_gen_monomials(cfg.options.get("monomials"), f.n)
    rep = verify_max_sens_distribution(f, F, cfg.trials, cfg.seed, monos, cfg.options.get("slack"),
                                       cfg.threads, name=name)
    return rep.as_dict(), _status(rep.per_run_ok, rep.stats_ok)


def _poly_metrics(p, f=None) -> dict:
    out = measures(p)
    if f is not None:
        out["max_error"] = max_error(p, f)
    return out


def cmd_approx(cfg: ExperimentConfig) -> tuple[dict, int]:
    o = cfg.options
    which = o["which"]
    if which == "or":
        n = o.get("n")
        if n is None:
            raise InputError("approx or needs --n")
        try:
            q = chebyshev_or_approximator(n)
        except ValueError as e:
            raise InputError(str(e)) from e
        err = symmetric_max_error(q, or_level)
        d = q.deg
        T = chebyshev_T(or_approx_degree(n))
        out = {
            "n": n,
            "chebyshev_degree": T.d,
            "level_coeffs": [str(c) for c in q.exact],
            "metrics": {"deg": d, "spar": q.spar, "l1": q.l1, "max_error": err},
            "coeff_bound_ok": T.max_abs_coeff <= 3 ** T.d,
        }
        ok = err <= 1 / 3 and out["coeff_bound_ok"]
        return out, _status(ok)
    if which == "thr":
        n = o.get("n")
        if n is None:
            raise InputError("approx thr needs --n")
        try:
            a = thr_approximator(n, o.get("t"), cfg.seed)
        except ValueError as e:
            raise InputError(str(e)) from e
        except RuntimeError as e:
            return {"n": n, "error": str(e)}, EXIT_ASSERT
        chk = check_thr_approximation(a)
        out = {
            "n": n,
            "t": a.t,
            "attempts": a.attempts,
            "separation": str(a.collection.delta),
            "scaled_poly": io.poly_to_json(a.scaled),
            "metrics": {**measures(a.scaled), "l1": a.scaled.l1 / a.t, "max_error": chk["max_error"]},
            "checks": {**chk, "spar_le_9t": a.spar <= 9 * a.t},
        }
        ok = chk["ones_exact"] and chk["zeros_within_third"] and a.spar <= 9 * a.t
        return out, _status(ok)
    if not o.get("input"):
        raise InputError(f"approx {which} needs --in poly.json")
    p = io.poly_from_json(io.read_json(o["input"]))
    f = None
    if cfg.fn or o.get("table"):
        f = _function(cfg.fn, o.get("table"))[1]
        if f.n != p.n:
            raise InputError("function and polynomial have different n")
    if which == "sparsify":
        k = o.get("k") or 100
        q = sparsify_by_sampling(p, k, cfg.seed)
        dev = float(np.max(np.abs(_values(q) - _values(p))))
        out = {
            "k": k,
            "poly": io.poly_to_json(q),
            "metrics": _poly_metrics(q, f),
            "max_deviation": dev,
            "predicted_deviation": p.l1 * math.sqrt(math.log(2 ** (p.n + 1)) / (2 * k)),
        }
        return out, EXIT_OK
    if which == "amplify":
        k = o.get("k") or 4
        try:
            q = amplify(p, k)
        except ValueError as e:
            raise InputError(str(e)) from e
        return {"k": k, "poly": io.poly_to_json(q), "metrics": _poly_metrics(q, f)}, EXIT_OK
    raise InputError(f"unknown approx mode {which!r}")


def _values(p):
    return poly_values(p).astype(np.float64)


def cmd_mbs(cfg: ExperimentConfig) -> tuple[dict, int]:
    name, f = _function(cfg.fn, cfg.options.get("table"))
    if f.value_kind != BOOLEAN:
        raise InputError("MBS needs a Boolean function")
    exact = not cfg.options.get("greedy") and f.n <= 14
    out = {"function": name, "n": f.n, "mbs": mbs(f, exact), "exact": exact}
    # survival of a few monomials under the independent-zero restriction
    monos = [(1 << d) - 1 for d in range(1, min(f.n, 6) + 1)]
    rates = zero_restriction_survival(f.n, monos, cfg.trials, cfg.seed)
    slack = hoeffding_slack(cfg.trials, 1e-4 / len(monos))
    rows = [{"deg": popcount(m), "survival": r, "expected": 2.0 ** -popcount(m), "slack": slack,
             "ok": abs(r - 2.0 ** -popcount(m)) <= slack} for m, r in zip(monos, rates)]
    out["zero_restriction"] = rows
    return out, _status(True, all(r["ok"] for r in rows))


def cmd_convert(cfg: ExperimentConfig) -> tuple[dict, int]:
    o = cfg.options
    if o.get("tree"):
        t = io.tree_from_json(io.read_json(o["tree"]))
        g = tree_to_genpoly(t)
        exact = bool(np.array_equal(gen_values(g), tree_table(t).values))
        m = gen_measures(g)
        out = {"genpoly": io.genpoly_to_json(g), "metrics": m, "size": t.size, "depth": t.depth,
               "pointwise_equal": exact,
               "bounds_ok": m["gspar_ub"] <= t.size and m["gl1_ub"] <= t.size and m["deg"] <= t.depth}
        return out, _status(exact and out["bounds_ok"])
    if o.get("randomized"):
        d = io.read_json(o["randomized"])
        try:
            support = tuple((io.tree_from_json(e["tree"]), Fraction(str(e["weight"]))) for e in d["support"])
            r = RandomizedTree(support)
        except (KeyError, TypeError, ValueError) as e:
            raise InputError(f"bad randomized tree file: {e}") from e
        f = _function(cfg.fn, o.get("table"))[1] if (cfg.fn or o.get("table")) else None
        try:
            g = randomized_to_genpoly(r, f)
        except ValueError as e:
            return {"error": str(e)}, EXIT_ASSERT
        out = {"genpoly": io.genpoly_to_json(g), "metrics": gen_measures(g)}
        if f is not None:
            out["max_error"] = gen_max_error(g, f)
        return out, EXIT_OK
    raise InputError("convert needs --tree FILE or --randomized FILE")


def compare_scaling(family: str, ns: list[int], trials: int, seed: int, threads: int = 1) -> list[dict]:
    """Per n: log2 of spar and l1, approximator log2 spar where one exists, mean maxdeg free count."""
    rows = []
    for n in ns:
        try:
            nf = parse_function(f"{family}:{n}")
        except ValueError as e:
            raise InputError(str(e)) from e
        f = nf.table
        p = mobius_from_table(f)
        row = {"param": n, "n": f.n, "spar": p.spar, "log2_spar": math.log2(p.spar), "log2_l1": math.log2(p.l1)}
        if family == "or" and f.n >= 2:
            row["approx_log2_spar"] = math.log2(chebyshev_or_approximator(f.n).spar)
        elif family == "thr" and f.n >= 3:
            row["approx_log2_spar"] = math.log2(thr_approximator(f.n, seed=seed).spar)
        if family == "sink":
            row["log2_gl1_ub"] = math.log2(sink_genpoly(n).l1)
        if not f.is_constant and f.n >= 2:
            rep = verify_max_degree_distribution(f, trials, seed, {}, threads=threads)
            total = sum(k * c for k, c in rep.free_hist.items())
            row["mean_free"] = total / trials
            row["maxdeg_ok"] = rep.per_run_ok
        rows.append(row)
    return rows


def cmd_compare_scaling(cfg: ExperimentConfig) -> tuple[dict, int]:
    fam = cfg.options["family"]
    ns = cfg.options["ns"]
    rows = compare_scaling(fam, ns, cfg.trials, cfg.seed, cfg.threads)
    ok = all(r.get("maxdeg_ok", True) for r in rows)
    return {"family": fam, "rows": rows}, _status(ok)


def selftest_checks() -> dict[str, bool]:
    """Fast exact checks across the modules."""
    checks = {}
    checks["spar_or8"] = mobius_from_table(or_fn(8)).spar == 255
    thr = mobius_from_table(thr_fn(8))
    checks["thr8_spar_l1"] = (thr.spar, thr.l1) == (9, 15)
    checks["chebyshev_or16"] = symmetric_max_error(chebyshev_or_approximator(16), or_level) <= 1 / 3
    checks["sink4_genpoly"] = bool(np.array_equal(gen_values(sink_genpoly(4)), sink_fn(4).values))
    rep = verify_max_degree_distribution(or_fn(6), 500, 1, slack=0.1)
    checks["maxdeg_or6"] = rep.per_run_ok and rep.stats_ok
    f = parse_function("majority:5").table
    rs = verify_max_sens_distribution(f, critical_inputs(f).M1, 500, 1, slack=0.1)
    checks["maxsens_maj5"] = rs.per_run_ok and rs.stats_ok
    return checks


def cmd_selftest(cfg: ExperimentConfig) -> tuple[dict, int]:
    checks = selftest_checks()
    return {"checks": checks}, _status(all(checks.values()))


COMMANDS = {
    "measure": cmd_measure,
    "maxdeg": cmd_maxdeg,
    "maxsens": cmd_maxsens,
    "approx": cmd_approx,
    "mbs": cmd_mbs,
    "convert": cmd_convert,
    "compare-scaling": cmd_compare_scaling,
    "selftest": cmd_selftest,
}


def run(cfg: ExperimentConfig) -> Report:
    t0 = time.perf_counter()
    result, status = COMMANDS[cfg.kind](cfg)
    return Report(asdict(cfg), result, status, round(time.perf_counter() - t0, 3))


# --------------------------------------------------------------------------
# output
# --------------------------------------------------------------------------

def _flatten(prefix: str, obj, rows: list):
    if isinstance(obj, dict):
        for k in sorted(obj):
            _flatten(f"{prefix}.{k}" if prefix else str(k), obj[k], rows)
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            _flatten(f"{prefix}.{i}", v, rows)
    else:
        rows.append((prefix, obj))


def to_csv(report: dict) -> str:
    """One row per leaf value: ``schema, section, key, value``."""
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for section in sorted(report):
        leaves: list = []
        _flatten("", report[section], leaves)
        for key, value in leaves:
            w.writerow((CSV_SCHEMA, section, key, value))
    return buf.getvalue()


def render(report: Report, fmt: str) -> str:
    d = report.as_dict()
    return io.dumps(d) if fmt == "json" else to_csv(d)


# --------------------------------------------------------------------------
# argument parsing
# --------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    """Usage errors exit with the input-error code rather than argparse's 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--trials", type=int, default=1000)
    common.add_argument("--threads", type=int, default=1, help="worker processes for trial batches")
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--format", dest="fmt", choices=("json", "csv"), default="json")

    fn = argparse.ArgumentParser(add_help=False)
    fn.add_argument("--fn", help="zoo function, e.g. or:8, thr:8, majority:5, sink:4")
    fn.add_argument("--table", help="truth-table file instead of --fn")

    ap = _Parser(prog="boolspar", description="Sparsity, restriction and approximation experiments.")
    sub = ap.add_subparsers(dest="kind", required=True, parser_class=_Parser)

    p = sub.add_parser("measure", parents=[common, fn], help="exact deg, spar and l1")
    p.add_argument("--poly", help="polynomial JSON instead of a function")

    p = sub.add_parser("maxdeg", parents=[common, fn], help="max-degree restriction sampler")
    p.add_argument("--monomials", help="comma list of full, half or 1-2-3 style index sets")
    p.add_argument("--slack", type=float, help="fixed slack instead of the Hoeffding default")

    p = sub.add_parser("maxsens", parents=[common, fn], help="max-sensitivity restriction sampler")
    p.add_argument("--set", default="both", help="minterms | maxterms | both | file:<path>")
    p.add_argument("--monomials", help="semicolon list of signed literal lists, e.g. '1,2,-3,-4'")
    p.add_argument("--slack", type=float)

    p = sub.add_parser("approx", parents=[common, fn], help="approximator constructions")
    p.add_argument("which", choices=("or", "thr", "sparsify", "amplify"))
    p.add_argument("--n", type=int)
    p.add_argument("--t", type=int, help="collection size for thr")
    p.add_argument("--k", type=int, help="terms for sparsify, rounds of h for amplify")
    p.add_argument("--in", dest="input", help="polynomial JSON for sparsify/amplify")

    p = sub.add_parser("mbs", parents=[common, fn], help="monotone block sensitivity")
    p.add_argument("--greedy", action="store_true", help="greedy lower bound instead of exact packing")

    p = sub.add_parser("convert", parents=[common, fn], help="decision tree to generalized polynomial")
    p.add_argument("--tree", help="tree JSON")
    p.add_argument("--randomized", help="JSON {support: [{tree, weight}]}")

    p = sub.add_parser("compare-scaling", parents=[common], help="scaling table over a zoo family")
    p.add_argument("--family", required=True)
    p.add_argument("--ns", default="4,8,12", help="comma list of family parameters")

    sub.add_parser("selftest", parents=[common], help="quick exact checks")
    return ap


_GLOBAL = ("kind", "fn", "trials", "seed", "threads", "out", "fmt")


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    d = vars(args).copy()
    if "ns" in d:
        try:
            d["ns"] = [int(v) for v in d["ns"].split(",") if v]
        except ValueError:
            raise InputError("--ns must be a comma list of integers") from None
    opts = {k: v for k, v in d.items() if k not in _GLOBAL and v is not None and v is not False}
    return ExperimentConfig(kind=d["kind"], fn=d.get("fn"), trials=d["trials"], seed=d["seed"],
                            threads=d["threads"], out=d.get("out"), fmt=d["fmt"], options=opts)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        report = run(cfg)
    except (InputError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    text = render(report, cfg.fmt)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return report.status


if __name__ == "__main__":
    sys.exit(main())
