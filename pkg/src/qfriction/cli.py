"""Batch command line front end.

Reads a flat key = value configuration file (format documented in the
README and exhaustively by _KEYS below), runs one of four modes, and
writes CSV plus a human-readable summary on stdout:

    point     one force evaluation at the configured scenario
    sweep     forces over a velocity or distance grid, plus exponent fit
    compare   both models over one velocity grid, exponent pair
    selftest  invariant battery: oddness, free+source = combined, and
              dense-grid oracle spot checks

Every run also writes an "effective configuration" echo file
(<output_path>.effective) holding every key at full precision;
parse_config on that file reproduces the RunConfig exactly.  CSV bodies
are deterministic for a given config; the only timestamp lives in a
leading comment line.  Exit codes: 0 success, 1 usage/config/I-O error,
2 numerical non-convergence, 3 selftest failure.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, replace
from datetime import datetime, timezone

from .analysis import ComparisonResult, SweepResult, SweepSpec, compare_models, log_grid, run_sweep
from .atom import AtomParams
from .forces import (
    Model,
    QuadratureSpec,
    Scenario,
    osc_force_combined,
    osc_force_free,
    osc_force_source,
    tla_force_free,
    tla_force_ground,
    tla_force_source,
    tla_force_total,
    FORCE_UNIT,
)
from .material import MaterialParams
from .quadrature import QuadratureError
from .reference import reference_force

_MODES = ("point", "sweep", "compare", "selftest")
_MODELS = {m.value: m for m in Model}
_VARIABLES = ("velocity", "distance")


class ConfigError(ValueError):
    """Malformed configuration text; message names the key and line."""


def _parse_float(key, text, lineno):
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"line {lineno}: key '{key}': not a number: {text!r}") from None


def _parse_int(key, text, lineno):
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"line {lineno}: key '{key}': not an integer: {text!r}") from None


def _parse_choice(choices):
    def conv(key, text, lineno):
        if text not in choices:
            raise ConfigError(
                f"line {lineno}: key '{key}': expected one of {'/'.join(choices)}, got {text!r}")
        return text
    return conv


def _parse_components(key, text, lineno):
    parts = frozenset(p.strip() for p in text.split(","))
    if not parts <= frozenset({"f0", "fs", "total"}) or not parts:
        raise ConfigError(
            f"line {lineno}: key '{key}': expected a comma list drawn from f0,fs,total, got {text!r}")
    return parts


def _parse_str(key, text, lineno):
    return text


# the complete configuration vocabulary: key -> (converter, default)
_KEYS = {
    # atom
    "d2": (_parse_float, 3.0),
    "omega_a": (_parse_float, 1.0),
    "gamma": (_parse_float, 1e-4),
    "p_lower": (_parse_float, 1.0),
    "p_upper": (_parse_float, 0.0),
    # material
    "omega_p": (_parse_float, 1.0),
    "omega_0": (_parse_float, 1.0),
    "gamma_big": (_parse_float, 0.1),
    # scenario
    "z": (_parse_float, 1.0),
    "v": (_parse_float, 0.01),
    "model": (_parse_choice(tuple(_MODELS)), "tla"),
    # quadrature
    "rel_tol": (_parse_float, 1e-7),
    "abs_tol": (_parse_float, 1e-30),
    "k_cut": (_parse_float, 30.0),
    "peak_pad": (_parse_float, 40.0),
    "max_subdivisions": (_parse_int, 2000),
    # sweep grid
    "sweep_variable": (_parse_choice(_VARIABLES), "velocity"),
    "sweep_min": (_parse_float, 1e-3),
    "sweep_max": (_parse_float, 1e-2),
    "sweep_points": (_parse_int, 8),
    "sweep_components": (_parse_components, frozenset({"f0", "fs", "total"})),
    # run
    "mode": (_parse_choice(_MODES), "point"),
    "output_path": (_parse_str, "qfriction_out.csv"),
}


@dataclass(frozen=True)
class RunConfig:
    scenario: Scenario
    quadrature: QuadratureSpec
    sweep_variable: str
    sweep_min: float
    sweep_max: float
    sweep_points: int
    sweep_components: frozenset
    mode: str
    output_path: str


def parse_config(text: str) -> RunConfig:
    """Parse a flat key = value document ('#' starts a comment) into a
    validated RunConfig; absent keys take the documented defaults.
    Unknown or duplicate keys, malformed values, and invariant violations
    raise ConfigError naming the key (and line where known)."""
    entries = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _KEYS:
            raise ConfigError(f"line {lineno}: unknown key '{key}'")
        if key in entries:
            raise ConfigError(f"line {lineno}: duplicate key '{key}'")
        if not value:
            raise ConfigError(f"line {lineno}: key '{key}': empty value")
        entries[key] = (_KEYS[key][0](key, value, lineno), lineno)

    def get(key):
        return entries[key][0] if key in entries else _KEYS[key][1]

    try:
        atom = AtomParams(d2=get("d2"), omega_a=get("omega_a"), gamma=get("gamma"),
                          p_lower=get("p_lower"), p_upper=get("p_upper"))
        material = MaterialParams(omega_p=get("omega_p"), omega_0=get("omega_0"),
                                  gamma_big=get("gamma_big"))
        scenario = Scenario(atom=atom, material=material, z=get("z"), v=get("v"),
                            model=_MODELS[get("model")])
        quadrature = QuadratureSpec(rel_tol=get("rel_tol"), abs_tol=get("abs_tol"),
                                    k_cut=get("k_cut"), peak_pad=get("peak_pad"),
                                    max_subdivisions=get("max_subdivisions"))
    except ValueError as exc:
        msg = str(exc)
        for key, (_, lineno) in entries.items():
            if key in msg:
                msg += f" (line {lineno})"
                break
        raise ConfigError(msg) from None
    return RunConfig(scenario=scenario, quadrature=quadrature,
                     sweep_variable=get("sweep_variable"), sweep_min=get("sweep_min"),
                     sweep_max=get("sweep_max"), sweep_points=get("sweep_points"),
                     sweep_components=get("sweep_components"),
                     mode=get("mode"), output_path=get("output_path"))


def format_config(config: RunConfig) -> str:
    """Canonical echo of a RunConfig; parse_config inverts it exactly."""
    s, q = config.scenario, config.quadrature
    comps = ",".join(c for c in ("f0", "fs", "total") if c in config.sweep_components)
    pairs = [
        ("d2", repr(s.atom.d2)), ("omega_a", repr(s.atom.omega_a)),
        ("gamma", repr(s.atom.gamma)), ("p_lower", repr(s.atom.p_lower)),
        ("p_upper", repr(s.atom.p_upper)), ("omega_p", repr(s.material.omega_p)),
        ("omega_0", repr(s.material.omega_0)), ("gamma_big", repr(s.material.gamma_big)),
        ("z", repr(s.z)), ("v", repr(s.v)), ("model", s.model.value),
        ("rel_tol", repr(q.rel_tol)), ("abs_tol", repr(q.abs_tol)),
        ("k_cut", repr(q.k_cut)), ("peak_pad", repr(q.peak_pad)),
        ("max_subdivisions", repr(q.max_subdivisions)),
        ("sweep_variable", config.sweep_variable), ("sweep_min", repr(config.sweep_min)),
        ("sweep_max", repr(config.sweep_max)), ("sweep_points", repr(config.sweep_points)),
        ("sweep_components", comps), ("mode", config.mode),
        ("output_path", config.output_path),
    ]
    return "# effective configuration, all keys explicit\n" + \
        "".join(f"{k} = {v}\n" for k, v in pairs)


def _fmt(x: float) -> str:
    return format(x, ".17g")


def _timestamp_comment(mode: str) -> str:
    ts = datetime.now(timezone.utc).isoformat(timespec="seconds")
    return f"# qfriction {mode} output, generated {ts}"


def _write(path: str, lines):
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def _total_op(model: Model):
    return tla_force_total if model is Model.TLA else osc_force_combined


def _fit_lines(tag: str, result: SweepResult):
    lines = []
    if result.fit is not None:
        f = result.fit
        lines.append(f"# fit: {tag}exponent = {_fmt(f.exponent)} stderr = {_fmt(f.stderr)} "
                     f"r_squared = {_fmt(f.r_squared)} prefactor_log = {_fmt(f.prefactor_log)}")
        if result.fit_low is not None:
            lines.append(
                f"# fit: {tag}half-windows low = {_fmt(result.fit_low.exponent)} "
                f"high = {_fmt(result.fit_high.exponent)} "
                f"flagged = {'yes' if result.window_flag else 'no'}")
    elif result.fit_note:
        lines.append(f"# fit: {tag}{result.fit_note}")
    return lines


def _run_point(config: RunConfig, say) -> int:
    s, q = config.scenario, config.quadrature
    r = _total_op(s.model)(s, q)
    lines = [_timestamp_comment("point"),
             "variable_value,f0,fs,total,err_estimate",
             ",".join(_fmt(x) for x in (s.v, r.f0, r.fs, r.total, r.err_estimate))]
    _write(config.output_path, lines)
    say(f"total = {r.total:.6e} (f0 = {r.f0:.6e}, fs = {r.fs:.6e}, "
        f"err = {r.err_estimate:.2e}) [{FORCE_UNIT}] at v = {s.v}, model = {s.model.value}")
    say(f"wrote {config.output_path}")
    return 0


def _sweep_rows(result: SweepResult, components) -> list:
    rows = []
    nan = float("nan")
    for p in result.points:
        if p.ok:
            f0 = p.result.f0 if "f0" in components else nan
            fs = p.result.fs if "fs" in components else nan
            total = p.result.total if "total" in components else nan
            err = p.result.err_estimate
        else:
            f0 = fs = total = err = nan
        rows.append(",".join(_fmt(x) for x in (p.variable_value, f0, fs, total, err)))
    return rows


def _run_sweep(config: RunConfig, say, verbose: bool) -> int:
    s, q = config.scenario, config.quadrature
    grid = log_grid(config.sweep_min, config.sweep_max, config.sweep_points)
    spec = SweepSpec(config.sweep_variable, grid, s, config.sweep_components)
    say(f"sweeping {config.sweep_variable} over {len(grid)} points "
        f"in [{grid[0]:g}, {grid[-1]:g}], model = {s.model.value}")
    result = run_sweep(spec, q)
    lines = [_timestamp_comment("sweep"), "variable_value,f0,fs,total,err_estimate"]
    lines += _sweep_rows(result, config.sweep_components)
    for p in result.points:
        if not p.ok:
            lines.append(f"# failed: variable_value = {_fmt(p.variable_value)}: {p.failure}")
    lines += _fit_lines("", result)
    _write(config.output_path, lines)
    if verbose:
        for p in result.points:
            say(f"  {config.sweep_variable} = {p.variable_value:.6e}: " +
                (f"total = {p.result.total:.6e}" if p.ok else f"FAILED ({p.failure})"))
    if result.fit is not None:
        say(f"fitted exponent = {result.fit.exponent:.4f} +/- {result.fit.stderr:.4f} "
            f"(r^2 = {result.fit.r_squared:.6f})")
        if result.window_flag:
            say("note: half-window fits disagree beyond 2x stderr; "
                "the grid may be leaving the asymptotic regime")
    elif result.fit_note:
        say(result.fit_note)
    say(f"wrote {config.output_path}")
    if not all(p.ok for p in result.points):
        say("some sweep points failed to converge")
        return 2
    return 0


def _run_compare(config: RunConfig, say, verbose: bool) -> int:
    s, q = config.scenario, config.quadrature
    grid = log_grid(config.sweep_min, config.sweep_max, config.sweep_points)
    say(f"comparing models over {len(grid)} velocities in [{grid[0]:g}, {grid[-1]:g}]")
    result = compare_models(s, grid, q)
    lines = [_timestamp_comment("compare"), "variable_value,f_tla,f_osc,ratio"]
    for row in result.rows:
        lines.append(",".join(_fmt(x) for x in
                              (row.variable_value, row.f_tla, row.f_osc, row.ratio)))
    for tag, fit in (("tla ", result.fit_tla), ("oscillator ", result.fit_osc)):
        if fit is not None:
            lines.append(f"# fit: {tag}exponent = {_fmt(fit.exponent)} "
                         f"stderr = {_fmt(fit.stderr)} r_squared = {_fmt(fit.r_squared)} "
                         f"prefactor_log = {_fmt(fit.prefactor_log)}")
    _write(config.output_path, lines)
    if verbose:
        for row in result.rows:
            say(f"  v = {row.variable_value:.6e}: f_tla = {row.f_tla:.6e}, "
                f"f_osc = {row.f_osc:.6e}, ratio = {row.ratio:.3e}")
    ok = result.fit_tla is not None and result.fit_osc is not None
    if ok:
        say(f"exponents: tla = {result.fit_tla.exponent:.4f}, "
            f"oscillator = {result.fit_osc.exponent:.4f}")
        say(f"ratio f_osc/f_tla falls from {result.rows[-1].ratio:.3e} at the top "
            f"of the grid to {result.rows[0].ratio:.3e} at the bottom")
    say(f"wrote {config.output_path}")
    if not ok or any(math.isnan(row.ratio) for row in result.rows):
        say("comparison incomplete: some points failed to converge")
        return 2
    return 0


def _selftest_checks(config: RunConfig):
    s, q = config.scenario, config.quadrature
    v = abs(s.v) if s.v != 0 else 0.01
    tla = replace(s, model=Model.TLA, v=v)
    osc = replace(s, model=Model.OSCILLATOR, v=v)
    checks = []

    def record(name, passed, detail):
        checks.append((name, bool(passed), detail))

    # forces vanish identically at rest
    for name, op, st in (("tla_total_at_rest", tla_force_total, tla),
                         ("osc_combined_at_rest", osc_force_combined, osc)):
        r = op(replace(st, v=0.0), q)
        record(name, abs(r.total) <= q.abs_tol, f"|F(0)| = {abs(r.total):.3e}")

    # oddness under v -> -v, within 2x combined error estimates
    for name, op, st in (("tla_free_odd", tla_force_free, tla),
                         ("tla_source_odd", tla_force_source, tla),
                         ("osc_free_odd", osc_force_free, osc),
                         ("osc_source_odd", osc_force_source, osc)):
        plus = op(st, q)
        minus = op(replace(st, v=-v), q)
        bound = 2.0 * (plus.err_estimate + minus.err_estimate)
        record(name, abs(plus.value + minus.value) <= bound,
               f"|F(v)+F(-v)| = {abs(plus.value + minus.value):.3e}, bound {bound:.3e}")

    # free + source = combined for the oscillator
    r = osc_force_combined(osc, q)
    record("osc_sum_identity", abs(r.f0 + r.fs - r.total) <= r.err_estimate,
           f"|f0+fs-total| = {abs(r.f0 + r.fs - r.total):.3e}, bound {r.err_estimate:.3e}")

    # dense-grid oracle spot checks
    for name, op, st, kind in (("oracle_tla_ground", tla_force_ground, tla, "tla_ground"),
                               ("oracle_osc_combined", osc_force_combined, osc, "osc_combined")):
        fast = op(st, q)
        val = fast.total if kind == "osc_combined" else fast.value
        ref = reference_force(kind, st)
        rel = abs(val - ref) / max(abs(ref), 1e-300)
        record(name, rel <= 1e-3, f"relative gap vs oracle = {rel:.3e}")
    return checks


def _run_selftest(config: RunConfig, say) -> int:
    checks = _selftest_checks(config)
    lines = [_timestamp_comment("selftest")]
    for name, passed, detail in checks:
        line = f"{'PASS' if passed else 'FAIL'} {name}: {detail}"
        lines.append(line)
        say(line)
    _write(config.output_path, lines)
    say(f"wrote {config.output_path}")
    if all(passed for _, passed, _ in checks):
        say("selftest: all checks passed")
        return 0
    say("selftest: FAILURES present")
    return 3


def run(config: RunConfig, verbose: bool = False) -> int:
    """Execute one configured run; returns the process exit code."""
    say = print  # the summary always goes to stdout; verbose adds per-point detail
    try:
        with open(config.output_path + ".effective", "w") as fh:
            fh.write(format_config(config))
        if config.mode == "point":
            return _run_point(config, say)
        if config.mode == "sweep":
            return _run_sweep(config, say, verbose)
        if config.mode == "compare":
            return _run_compare(config, say, verbose)
        return _run_selftest(config, say)
    except QuadratureError as exc:
        print(f"error: quadrature failed to converge: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit 1, not argparse's default 2
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(1)


def main(argv=None) -> int:
    parser = _Parser(
        prog="qfriction",
        description="Friction forces on an atom moving parallel to an absorbing "
                    "surface: two-level atom vs linear-oscillator model.")
    parser.add_argument("--config", required=True, help="path to key = value config file")
    parser.add_argument("--output", help="output CSV path (overrides config)")
    parser.add_argument("--mode", choices=_MODES, help="run mode (overrides config)")
    parser.add_argument("--verbose", action="store_true", help="per-point progress")
    args = parser.parse_args(argv)
    try:
        with open(args.config) as fh:
            text = fh.read()
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 1
    try:
        config = parse_config(text)
    except ConfigError as exc:
        print(f"error: bad configuration: {exc}", file=sys.stderr)
        return 1
    if args.output is not None:
        config = replace(config, output_path=args.output)
    if args.mode is not None:
        config = replace(config, mode=args.mode)
    return run(config, verbose=args.verbose)


def entrypoint():
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
