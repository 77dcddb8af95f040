"""Command-line front end.

Parses number tokens, dispatches to the library, runs parameter sweeps
over a bounded worker pool, and emits CSV/JSON artifacts.  Every
artifact starts with a reproducibility record (tool version, command,
full parameter echo, working precision) and contains no timestamps, so
identical invocations produce identical bytes.

Exit codes: 0 on success, 2 on domain or usage errors, 3 when a result
is flagged unreliable by its own truncation diagnostics.
"""

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

import mpmath as mp

from . import __version__
from .cf import expand
from .complexbf import TruncationPolicy, boundary_scan, complex_brjuno
from .errors import (
    BadWeights,
    DomainError,
    InsufficientDepth,
    NoConvergence,
    PrecisionExhausted,
    SmallDivisorZero,
    SolvabilityViolation,
    TruncationUnreliable,
    UnstableEstimate,
)
from .exactreal import QuadraticSurd, as_float, as_real, golden_mean, parse_real
from .gridop import (
    bmo_seminorm,
    contraction_check,
    neg_log_grid,
    neumann_inverse,
    neumann_term_ratios,
)
from .lindstedt import (
    critical_constant_estimate,
    default_bits,
    semi_standard_series,
    standard_map_series,
)
from .series import brjuno_series, log_power, neg_log, power

ENV_PRECISION = "BRJUNO_PRECISION"

_USAGE_ERRORS = (
    DomainError,
    BadWeights,
    InsufficientDepth,
    NoConvergence,
    PrecisionExhausted,
    SmallDivisorZero,
    SolvabilityViolation,
    ValueError,
    ZeroDivisionError,
)


# ---------------------------------------------------------------------------
# artifact emission

def _resolve_prec(ns, fallback=96):
    explicit = getattr(ns, "prec", None)
    if explicit:
        if explicit < 24:
            raise DomainError("--prec must be at least 24 bits")
        return explicit
    raw = os.environ.get(ENV_PRECISION)
    if raw:
        try:
            bits = int(raw)
        except ValueError:
            raise DomainError(
                f"{ENV_PRECISION} must be an integer, got {raw!r}") from None
        if bits < 24:
            raise DomainError(f"{ENV_PRECISION} must be at least 24 bits")
        return bits
    return fallback


def _csv_cell(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        if math.isnan(v):
            return "nan"
        return "%.17e" % v
    return str(v)


def _jsonable(v):
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, float):
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        if math.isnan(v):
            return "nan"
        return v
    if isinstance(v, (mp.mpf, mp.mpc)):
        return _jsonable(float(v)) if isinstance(v, mp.mpf) else str(v)
    if isinstance(v, Fraction):
        return str(v)
    if v is None or isinstance(v, (bool, int, str)):
        return v
    return str(v)


def _preamble_lines(command, params, prec):
    lines = [
        f"# tool: brjuno {__version__}",
        f"# command: {command}",
        f"# precision_bits: {prec}",
    ]
    for k in sorted(params):
        lines.append(f"# {k}: {params[k]}")
    return lines


def _emit_csv(command, params, prec, header, rows):
    buf = io.StringIO()
    for line in _preamble_lines(command, params, prec):
        buf.write(line + "\r\n")
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(list(header) + ["precision_bits"])
    for row in rows:
        w.writerow([_csv_cell(v) for v in row] + [str(prec)])
    return buf.getvalue()


def _emit_json(command, params, prec, payload):
    doc = dict(payload)
    doc["meta"] = {
        "tool": "brjuno",
        "version": __version__,
        "command": command,
        "precision_bits": prec,
        "params": {k: str(v) for k, v in params.items()},
    }
    return json.dumps(_jsonable(doc), sort_keys=True, indent=2) + "\n"


def _emit(ns, command, params, prec, payload, header, rows):
    if ns.format == "csv":
        return _emit_csv(command, params, prec, header, rows)
    return _emit_json(command, params, prec, payload)


def _write_artifact(text, out):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="", encoding="utf-8") as fh:
            fh.write(text)


def _require(ns, attr, flag):
    v = getattr(ns, attr, None)
    if v is None:
        raise DomainError(f"{ns.cmd} needs {flag}")
    return v


# ---------------------------------------------------------------------------
# number and weight tokens

def _parse_weight(token):
    name, _, arg = token.partition(":")
    if name == "neg_log":
        return neg_log()
    if name == "power":
        if not arg:
            raise DomainError("power weight needs an exponent, e.g. power:0.5")
        return power(float(Fraction(arg)))
    if name == "log_power":
        if not arg:
            raise DomainError("log_power weight needs an exponent, e.g. log_power:2")
        return log_power(float(Fraction(arg)))
    raise DomainError(
        f"unknown weight {token!r}; use neg_log, power:NU, or log_power:P")


def _named_set(token):
    """Deterministic surd families for --set.

    noble:N enumerates 1/(m + g) for m = 1..N (expansions [0; m, 1, 1, ...],
    golden tail); metallic:N enumerates (sqrt(m^2+4) - m)/2 for m = 1..N
    (expansions with constant digit m).
    """
    name, _, count = token.partition(":")
    if not count:
        raise DomainError(f"named set needs a size, e.g. {name or 'noble'}:10")
    n = int(count)
    if n < 0:
        raise DomainError("set size must be >= 0")
    if name == "noble":
        g = golden_mean()
        return [(g + m).reciprocal() for m in range(1, n + 1)]
    if name == "metallic":
        return [QuadraticSurd(-m, 1, m * m + 4, 2) for m in range(1, n + 1)]
    raise DomainError(f"unknown set {name!r}; use noble:N or metallic:N")


# ---------------------------------------------------------------------------
# subcommand handlers: each returns (exit_code, artifact_text, summary_row)

def _cmd_cf(ns):
    x_tok = _require(ns, "x", "--x")
    x = parse_real(x_tok)
    alpha = parse_real(ns.alpha)
    prec = _resolve_prec(ns)
    exp = expand(x, alpha, max_depth=ns.depth, stop_at_period=not ns.full)
    params = {"x": x_tok, "alpha": ns.alpha, "depth": ns.depth, "full": ns.full}
    period = list(exp.period) if exp.period is not None else None
    payload = {
        "digits": exp.a,
        "eps": exp.eps,
        "p": exp.p,
        "q": exp.q,
        "x_n": exp.x_floats(),
        "beta": exp.beta_floats(),
        "period": period,
        "terminated_at": exp.terminated_at,
        "truncated": exp.truncated,
        "truncation_reason": exp.truncation_reason,
    }
    header = ("n", "a", "eps", "p", "q", "x_n", "beta")
    xf, bf = exp.x_floats(), exp.beta_floats()
    rows = [
        (n, exp.a[n], exp.eps[n], exp.p[n], exp.q[n], xf[n], bf[n])
        for n in range(len(exp.a))
    ]
    text = _emit(ns, "cf", params, prec, payload, header, rows)
    row = {
        "x": x_tok,
        "alpha": ns.alpha,
        "digits": len(exp.a),
        "q_last": exp.q[-1],
        "period_start": period[0] if period else None,
        "period_length": period[1] if period else None,
        "terminated_at": exp.terminated_at,
    }
    return (3 if exp.truncated else 0), text, row


def _series_common(ns, command, f, f_token):
    x_tok = _require(ns, "x", "--x")
    x = parse_real(x_tok)
    alpha = parse_real(ns.alpha)
    prec = _resolve_prec(ns)
    ev = brjuno_series(x, alpha=alpha, f=f, max_depth=ns.depth, prec=prec)
    params = {"x": x_tok, "alpha": ns.alpha, "depth": ns.depth, "f": f_token}
    payload = {"x": x_tok, **ev.to_dict()}
    header = ("x", "alpha", "value", "partial_sum", "tail_bound",
              "depth", "diverged", "tail_kind", "uncertainty")
    rows = [(x_tok, ns.alpha, ev.value, ev.partial_sum, ev.tail_bound,
             ev.depth, ev.diverged, ev.tail_kind, ev.uncertainty)]
    text = _emit(ns, command, params, prec, payload, header, rows)
    row = {
        "x": x_tok,
        "alpha": ns.alpha,
        "value": ev.value,
        "tail_bound": ev.tail_bound,
        "diverged": ev.diverged,
        "tail_kind": ev.tail_kind,
    }
    truncated = getattr(ev.expansion, "truncated", False)
    return (3 if truncated else 0), text, row


def _cmd_brjuno(ns):
    return _series_common(ns, "brjuno", neg_log(), "neg_log")


def _cmd_bseries(ns):
    return _series_common(ns, "bseries", _parse_weight(ns.f), ns.f)


def _cmd_dioph(ns):
    from .series import diophantine_estimate

    x_tok = _require(ns, "x", "--x")
    x = parse_real(x_tok)
    alpha = parse_real(ns.alpha)
    prec = _resolve_prec(ns)
    est = diophantine_estimate(x, alpha=alpha, depth=ns.depth)
    params = {"x": x_tok, "alpha": ns.alpha, "depth": ns.depth}
    header = ("x", "tau_hat", "slope", "c_hat", "points", "q_last")
    rows = [(x_tok, est["tau_hat"], est["slope"], est["c_hat"],
             est["points"], est["q_last"])]
    text = _emit(ns, "dioph", params, prec, dict(est), header, rows)
    row = {"x": x_tok, "alpha": ns.alpha, **est}
    return 0, text, row


def _cmd_operator(ns):
    alpha = parse_real(ns.alpha)
    prec = _resolve_prec(ns, 53)
    params = {"n": ns.n, "action": ns.action, "alpha": ns.alpha,
              "gamma": ns.gamma, "tol": ns.tol}
    src = neg_log_grid(ns.n)
    if ns.action == "neumann":
        g, terms = neumann_inverse(src, alpha=alpha, tol=ns.tol)
        ratios = neumann_term_ratios(src, alpha=alpha, count=12)
        payload = {
            "n": ns.n,
            "terms": terms,
            "sup": float(g.values.max()),
            "term_ratios": [float(r) for r in ratios[-6:]],
        }
        header = ("node", "value")
        rows = list(zip(g.nodes.tolist(), g.values.tolist()))
        row = {"n": ns.n, "action": ns.action, "terms": terms,
               "sup": payload["sup"], "ratio_last": payload["term_ratios"][-1]}
    elif ns.action == "contraction":
        A = 1.0
        B = ns.B if ns.B is not None else 2.0 / (2.0 ** ns.gamma - 2.0 ** -ns.gamma)
        rep = contraction_check(src, ns.gamma, A, B)
        payload = rep.to_dict()
        header = ("gamma", "A", "B", "lhs", "rhs", "slack", "ok")
        rows = [(rep.gamma, rep.A, rep.B, rep.lhs, rep.rhs, rep.slack, rep.ok)]
        row = {"n": ns.n, "action": ns.action, "gamma": ns.gamma,
               "lhs": rep.lhs, "rhs": rep.rhs, "ok": rep.ok}
    else:
        g, terms = neumann_inverse(src, alpha=alpha, tol=ns.tol)
        s = bmo_seminorm(g)
        payload = {"n": ns.n, "terms": terms, "bmo_seminorm": s}
        header = ("n", "terms", "bmo_seminorm")
        rows = [(ns.n, terms, s)]
        row = {"n": ns.n, "action": ns.action, "terms": terms, "bmo_seminorm": s}
    text = _emit(ns, "operator", params, prec, payload, header, rows)
    return 0, text, row


def _policy_from(ns):
    return TruncationPolicy(
        q_max=ns.q_max,
        n_max=ns.n_max,
        series_tol=ns.series_tol,
        bits=ns.bits,
        switch_radius=ns.switch_radius,
    )


def _cmd_complex(ns):
    x_tok = _require(ns, "x", "--x")
    x = parse_real(x_tok)
    eps = float(ns.eps)
    policy = _policy_from(ns)
    res = complex_brjuno(as_float(x) + 1j * eps, policy)
    params = {"x": x_tok, "eps": ns.eps, "q_max": ns.q_max, "n_max": ns.n_max,
              "series_tol": ns.series_tol, "switch_radius": ns.switch_radius}
    payload = {"x": x_tok, "eps": eps, **res.to_dict()}
    header = ("x", "eps", "re", "im", "tail_estimate", "unreliable",
              "q_max", "n_max")
    rows = [(x_tok, eps, res.value.real, res.value.imag, res.tail_estimate,
             res.unreliable, res.q_max, res.n_max)]
    text = _emit(ns, "complex", params, ns.bits, payload, header, rows)
    row = {"x": x_tok, "eps": eps, "re": res.value.real, "im": res.value.imag,
           "tail_estimate": res.tail_estimate, "unreliable": res.unreliable}
    return (3 if res.unreliable else 0), text, row


def _cmd_scan(ns):
    policy = _policy_from(ns)
    res = boundary_scan(ns.x0, ns.x1, float(ns.eps), ns.samples, policy,
                        jump_q_max=ns.jump_q_max, jump_delta=ns.jump_delta,
                        max_jumps=ns.max_jumps)
    params = {"x0": ns.x0, "x1": ns.x1, "eps": ns.eps, "samples": ns.samples,
              "q_max": ns.q_max, "n_max": ns.n_max,
              "jump_q_max": ns.jump_q_max, "jump_delta": ns.jump_delta}
    payload = {
        "eps": res.eps,
        "rows": [
            {"x": r.x, "re": r.re, "im": r.im,
             "tail_estimate": r.tail_estimate, "unreliable": r.unreliable}
            for r in res.rows
        ],
        "jumps": [
            {"p": j.p, "q": j.q, "x": j.x, "jump": j.jump,
             "expected": j.expected}
            for j in res.jumps
        ],
        "any_unreliable": res.any_unreliable,
    }
    header = ("x", "re", "im", "tail_estimate", "unreliable")
    rows = [(r.x, r.re, r.im, r.tail_estimate, r.unreliable) for r in res.rows]
    text = _emit(ns, "scan", params, ns.bits, payload, header, rows)
    row = {"eps": res.eps, "samples": len(res.rows),
           "jumps": len(res.jumps), "any_unreliable": res.any_unreliable}
    return (3 if res.any_unreliable else 0), text, row


def _coeff_magnitudes(series):
    mags = []
    with mp.workprec(series.bits):
        for entry in series.coeffs:
            if isinstance(entry, dict):
                m = max(abs(v) for v in entry.values())
            else:
                m = abs(entry)
            mags.append(mp.nstr(m, 17))
    return mags


def _estimate_block(series, want):
    """Run the radius extrapolation unless disabled; fold errors into the
    payload instead of crashing, so the coefficient artifact survives."""
    if want == "no" or (want == "auto" and series.order < 10):
        return 0, {"k_hat": None, "two_B": None, "delta": None,
                   "ln_k_hat_inv": None, "estimate_skipped": True}
    try:
        k_hat, diag = critical_constant_estimate(series)
    except UnstableEstimate as exc:
        block = {"k_hat": None, "two_B": None, "delta": None,
                 "ln_k_hat_inv": None, "unstable": True,
                 "reason": str(exc), "diagnostics": dict(exc.diagnostics or {})}
        return 3, block
    block = {
        "k_hat": k_hat,
        "two_B": diag["two_B"],
        "delta": diag["delta"],
        "ln_k_hat_inv": (-math.log(k_hat)) if k_hat > 0 else None,
        "diagnostics": {k: v for k, v in diag.items()
                        if k not in ("two_B", "delta", "k_hat")},
    }
    if "reason" in diag:
        block["reason"] = diag["reason"]
    return 0, block


def _cmd_lindstedt(ns):
    rho_tok = _require(ns, "rho", "--rho")
    rho = parse_real(rho_tok)
    order = ns.order
    prec = _resolve_prec(ns, default_bits(order))
    if ns.map == "semi":
        series = semi_standard_series(rho, order, prec=prec)
    else:
        series = standard_map_series(rho, order, prec=prec,
                                     mode0_tol=ns.mode0_tol)
    code, est = _estimate_block(series, ns.estimate)
    params = {"rho": rho_tok, "order": order, "map": ns.map,
              "estimate": ns.estimate}
    payload = {
        "rho": rho_tok,
        "order": order,
        "map": ns.map,
        "k_hat": est.get("k_hat"),
        "two_B": est.get("two_B"),
        "delta": est.get("delta"),
        "radius_estimates": series.radius_estimates,
    }
    for k in ("ln_k_hat_inv", "unstable", "reason", "diagnostics",
              "estimate_skipped"):
        if k in est and est[k] is not None:
            payload[k] = est[k]
    mags = _coeff_magnitudes(series)
    header = ("n", "coeff_mag", "radius_estimate")
    rows = [(n + 1, mags[n], series.radius_estimates[n])
            for n in range(order)]
    text = _emit(ns, "lindstedt", params, prec, payload, header, rows)
    row = {"rho": rho_tok, "order": order, "map": ns.map,
           "k_hat": est.get("k_hat"), "two_B": est.get("two_B"),
           "delta": est.get("delta")}
    return code, text, row


def _cmd_compare(ns):
    if ns.set:
        rhos = _named_set(ns.set)
    elif ns.rhos:
        rhos = [parse_real(t) for t in ns.rhos.split(",") if t.strip()]
    else:
        raise DomainError("compare needs --set or --rhos")
    order = ns.order
    prec = _resolve_prec(ns, default_bits(order))
    params = {"set": ns.set or "", "rhos": ns.rhos or "", "order": order}
    out_rows = []
    worst = 0
    for rho in rhos:
        series = semi_standard_series(rho, order, prec=prec)
        code, est = _estimate_block(series, "yes")
        worst = max(worst, code)
        out_rows.append({
            "rho": str(rho),
            "ln_k_hat_inv": est.get("ln_k_hat_inv"),
            "two_B": est.get("two_B"),
            "delta": est.get("delta"),
            "unstable": bool(est.get("unstable", False)),
        })
    payload = {"order": order, "rows": out_rows}
    header = ("rho", "ln_k_hat_inv", "two_B", "delta", "unstable")
    rows = [(r["rho"], r["ln_k_hat_inv"], r["two_B"], r["delta"],
             r["unstable"]) for r in out_rows]
    text = _emit(ns, "compare", params, prec, payload, header, rows)
    row = {"order": order, "count": len(out_rows)}
    return worst, text, row


_HANDLERS = {
    "cf": _cmd_cf,
    "brjuno": _cmd_brjuno,
    "bseries": _cmd_bseries,
    "dioph": _cmd_dioph,
    "operator": _cmd_operator,
    "complex": _cmd_complex,
    "scan": _cmd_scan,
    "lindstedt": _cmd_lindstedt,
    "compare": _cmd_compare,
}

# attribute a swept variable lands on, per base command
_SWEEP_ATTR = {"x": "x", "rho": "rho", "alpha": "alpha", "eps": "eps",
               "gamma": "gamma"}


# ---------------------------------------------------------------------------
# sweeps

def _sweep_values(ns):
    if ns.values is not None:
        return [t.strip() for t in ns.values.split(",") if t.strip()]
    if ns.grid is not None:
        parts = ns.grid.split(":")
        if len(parts) != 3:
            raise DomainError("--grid needs start:stop:count")
        start, stop = float(parts[0]), float(parts[1])
        count = int(parts[2])
        if count < 0:
            raise DomainError("grid count must be >= 0")
        if count == 0:
            return []
        if count == 1:
            return ["%.17g" % start]
        step = (stop - start) / (count - 1)
        return ["%.17g" % (start + i * step) for i in range(count)]
    if ns.set is not None:
        return [str(v) for v in _named_set(ns.set)]
    raise DomainError("sweep needs --values, --grid, or --set")


def _sweep_child(task):
    idx, cmd, base_vars, attr, token = task
    child = argparse.Namespace(**base_vars)
    setattr(child, attr, token)
    try:
        code, text, row = _HANDLERS[cmd](child)
    except _USAGE_ERRORS as exc:
        code = 2
        params = {attr: token}
        text = _emit_json(cmd, params, 0, {"error": str(exc)})
        row = {attr: token, "error": str(exc)}
    except (TruncationUnreliable, UnstableEstimate) as exc:
        code = 3
        params = {attr: token}
        text = _emit_json(cmd, params, 0, {"error": str(exc)})
        row = {attr: token, "error": str(exc)}
    return idx, token, code, text, row


def _canonical_sort_key(token):
    try:
        return (0, as_float(parse_real(token)), token)
    except Exception:
        return (1, 0.0, token)


def _merge_flag_values(tokens):
    """Rewrite ["--x", "-1+sqrt(2)"] as ["--x=-1+sqrt(2)"] so argparse
    does not mistake leading-minus values for option names."""
    merged, i = [], 0
    while i < len(tokens):
        tok = tokens[i]
        nxt = tokens[i + 1] if i + 1 < len(tokens) else None
        if (tok.startswith("--") and "=" not in tok
                and nxt is not None and not nxt.startswith("--")):
            merged.append(f"{tok}={nxt}")
            i += 2
        else:
            merged.append(tok)
            i += 1
    return merged


def _cmd_sweep(ns):
    cmd = ns.command
    base_parser = argparse.ArgumentParser(prog=f"brjuno {cmd}", add_help=False)
    _PARSER_BUILDERS[cmd](base_parser)
    base_tokens = list(ns.base_args)
    if base_tokens and base_tokens[0] == "--":
        base_tokens = base_tokens[1:]
    base_ns = base_parser.parse_args(_merge_flag_values(base_tokens))
    base_ns.cmd = cmd
    base_ns.format = ns.format
    attr = _SWEEP_ATTR[ns.variable]
    if not hasattr(base_ns, attr):
        raise DomainError(
            f"{cmd} has no --{ns.variable} flag to sweep over")
    values = _sweep_values(ns)
    if not values:
        return 0, "sweep: empty grid, no artifacts written\n", {"count": 0}
    os.makedirs(ns.out_dir, exist_ok=True)
    base_vars = dict(vars(base_ns))
    tasks = [(i, cmd, base_vars, attr, tok) for i, tok in enumerate(values)]
    results = None
    if ns.workers > 1 and len(tasks) > 1:
        try:
            with ProcessPoolExecutor(max_workers=min(ns.workers, len(tasks))) as ex:
                results = list(ex.map(_sweep_child, tasks))
        except (OSError, PermissionError):
            results = None
    if results is None:
        results = [_sweep_child(t) for t in tasks]
    results.sort(key=lambda r: r[0])
    ext = ns.format
    for idx, token, code, text, _row in results:
        path = os.path.join(ns.out_dir, f"{cmd}_{ns.variable}_{idx:03d}.{ext}")
        _write_artifact(text, path)
    keys = sorted({k for _, _, _, _, row in results for k in row} - {attr})
    agg_rows = []
    for _idx, token, code, _text, row in results:
        agg_rows.append((token, [row.get(k) for k in keys], code))
    agg_rows.sort(key=lambda r: _canonical_sort_key(r[0]))
    params = {"command": cmd, "variable": ns.variable, "count": len(values)}
    header = [ns.variable] + keys + ["exit_code"]
    body = [[tok] + vals + [code] for tok, vals, code in agg_rows]
    agg_text = _emit_csv("sweep", params, _resolve_prec(ns), header, body)
    agg_path = os.path.join(ns.out_dir, "aggregate.csv")
    _write_artifact(agg_text, agg_path)
    codes = [c for _, _, c, _, _ in results]
    overall = 2 if 2 in codes else (3 if 3 in codes else 0)
    summary = (f"sweep: wrote {len(values)} artifacts and aggregate.csv "
               f"to {ns.out_dir}\n")
    return overall, summary, {"count": len(values)}


# ---------------------------------------------------------------------------
# parser construction

def _add_common(p, prec_help="working precision in bits"):
    p.add_argument("--format", choices=["csv", "json"], default="json")
    p.add_argument("--out", default=None, help="output path (default stdout)")
    p.add_argument("--prec", type=int, default=None, help=prec_help)


def _add_policy(p):
    p.add_argument("--q-max", type=int, default=240)
    p.add_argument("--n-max", type=int, default=1024)
    p.add_argument("--series-tol", type=float, default=1e-12)
    p.add_argument("--bits", type=int, default=53,
                   help="truncation-policy precision (53 = double path)")
    p.add_argument("--switch-radius", type=float, default=32.0)


def _build_cf(p):
    p.add_argument("--x", default=None, help="number token, e.g. '(-1+sqrt(5))/2'")
    p.add_argument("--alpha", default="1")
    p.add_argument("--depth", type=int, default=40)
    p.add_argument("--full", action="store_true",
                   help="keep expanding past a detected period")
    _add_common(p)


def _build_brjuno(p):
    p.add_argument("--x", default=None)
    p.add_argument("--alpha", default="1", help="1 for B, 1/2 for the folded variant")
    p.add_argument("--depth", type=int, default=60)
    _add_common(p)


def _build_bseries(p):
    p.add_argument("--x", default=None)
    p.add_argument("--alpha", default="1")
    p.add_argument("--f", default="neg_log",
                   help="weight: neg_log, power:NU, or log_power:P")
    p.add_argument("--depth", type=int, default=60)
    _add_common(p)


def _build_dioph(p):
    p.add_argument("--x", default=None)
    p.add_argument("--alpha", default="1")
    p.add_argument("--depth", type=int, default=48)
    _add_common(p)


def _build_operator(p):
    p.add_argument("--n", type=int, default=1024)
    p.add_argument("--action", choices=["neumann", "contraction", "bmo"],
                   default="neumann")
    p.add_argument("--alpha", default="1/2")
    p.add_argument("--gamma", type=float, default=0.4)
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--B", type=float, default=None,
                   help="seminorm weight (default 2/(2^g - 2^-g))")
    _add_common(p)


def _build_complex(p):
    p.add_argument("--x", default=None)
    p.add_argument("--eps", type=float, default=1e-3,
                   help="height: evaluates at z = x + i*eps")
    _add_policy(p)
    _add_common(p)


def _build_scan(p):
    p.add_argument("--x0", type=float, default=0.05)
    p.add_argument("--x1", type=float, default=0.95)
    p.add_argument("--eps", type=float, default=1e-3)
    p.add_argument("--samples", type=int, default=181)
    p.add_argument("--jump-q-max", type=int, default=12)
    p.add_argument("--jump-delta", type=float, default=1e-3)
    p.add_argument("--max-jumps", type=int, default=64)
    _add_policy(p)
    _add_common(p)


def _build_lindstedt(p):
    p.add_argument("--rho", default=None)
    p.add_argument("--order", type=int, default=30)
    p.add_argument("--map", choices=["semi", "standard"], default="semi")
    p.add_argument("--mode0-tol", type=float, default=1e-10)
    p.add_argument("--estimate", choices=["auto", "yes", "no"], default="auto")
    _add_common(p, "bits for the recursion (default max(160, 8*order))")


def _build_compare(p):
    p.add_argument("--set", default=None, help="noble:N or metallic:N")
    p.add_argument("--rhos", default=None, help="comma-separated number tokens")
    p.add_argument("--order", type=int, default=50)
    _add_common(p)


_PARSER_BUILDERS = {
    "cf": _build_cf,
    "brjuno": _build_brjuno,
    "bseries": _build_bseries,
    "dioph": _build_dioph,
    "operator": _build_operator,
    "complex": _build_complex,
    "scan": _build_scan,
    "lindstedt": _build_lindstedt,
    "compare": _build_compare,
}


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="brjuno",
        description="Continued fractions, Brjuno sums, transfer-operator "
                    "diagnostics, the complexified Brjuno function, and "
                    "Lindstedt series.",
        epilog=f"The {ENV_PRECISION} environment variable sets the default "
               "working precision for series evaluations when --prec is "
               "not given.",
    )
    parser.add_argument("--version", action="version",
                        version=f"brjuno {__version__}")
    sub = parser.add_subparsers(dest="cmd", required=True)
    for name, build in _PARSER_BUILDERS.items():
        build(sub.add_parser(name))
    p_sw = sub.add_parser(
        "sweep",
        help="run one subcommand over a list/grid/set of values",
    )
    p_sw.add_argument("--command", required=True,
                      choices=sorted(_PARSER_BUILDERS))
    p_sw.add_argument("--variable", required=True,
                      choices=sorted(_SWEEP_ATTR))
    p_sw.add_argument("--values", default=None,
                      help="comma-separated value tokens")
    p_sw.add_argument("--grid", default=None, help="start:stop:count")
    p_sw.add_argument("--set", default=None, help="noble:N or metallic:N")
    p_sw.add_argument("--out-dir", required=True)
    p_sw.add_argument("--workers", type=int, default=4)
    p_sw.add_argument("--format", choices=["csv", "json"], default="json")
    p_sw.add_argument("--prec", type=int, default=None)
    p_sw.add_argument("base_args", nargs=argparse.REMAINDER,
                      help="base-command flags, after --")
    return parser


def main(argv=None):
    parser = _build_parser()
    tokens = list(sys.argv[1:] if argv is None else argv)
    ns = parser.parse_args(_merge_flag_values(tokens))
    try:
        if ns.cmd == "sweep":
            code, text, _row = _cmd_sweep(ns)
            sys.stdout.write(text)
        else:
            code, text, _row = _HANDLERS[ns.cmd](ns)
            _write_artifact(text, ns.out)
    except _USAGE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (TruncationUnreliable, UnstableEstimate) as exc:
        print(f"unreliable: {exc}", file=sys.stderr)
        return 3
    return code


if __name__ == "__main__":
    sys.exit(main())
