"""qdef-osc command-line interface.

Exit codes: 0 ok, 1 invalid input, 2 numerical failure, 3 verify suite failed.
"""

import argparse
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from . import classical as C
from . import quantum as Q
from . import verify as V
from ._version import __version__
from .config import (
    RunConfig, merge, natural_units_enabled, parse_float, parse_float_list, parse_int_list,
    parse_ratio, read_config_file,
)
from .errors import ConfigError, DomainError, IntegrationError, QDefError, RegimeError, UnboundStateError
from .series import SeriesTable, base_meta
from .special import IntegrationWarning

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL, EXIT_VERIFY = 0, 1, 2, 3

# per-command defaults; --gamma is gamma_q times the scale (A for classical
# commands, x0 for quantum ones)
COMMANDS = {
    "classical": {"gamma": "0,0.5,0.9", "delta": "0", "periods": "3"},
    "phase-space": {"gamma": "0,0.5,0.9,1.5", "periods": "3"},
    "lissajous": {"gamma": "0,0.5", "ratio": "4/3", "phase": "1.5707963267948966", "periods": "3"},
    "spectrum": {"gamma": "0.3"},
    "wavefunctions": {"gamma": "0,0.1,0.2,0.3", "n": "0,1,2,3", "extent": "8"},
    "density2d": {"gamma": "0.2", "n1": "0", "n2": "0", "extent": "5"},
    "correspondence": {"gamma": "0.2", "n": "10", "window": "1", "clip": "0.02"},
    "uncertainty": {"gamma": "0,0.05,0.1,0.15,0.2,0.25,0.3,0.35", "n": "0,1,2,3,4,5"},
    "verify": {"gamma": "", "mutation": ""},
}
COMMON = {"scale": "1", "out": "out", "format": "csv", "samples": "2000", "tol": "1",
          "m0": "1", "omega0": "1", "hbar": "1"}
UNIT_KEYS = ("m0", "omega0", "hbar")


def build_parser():
    p = argparse.ArgumentParser(prog="qdef-osc", description="Deformed position-dependent-mass oscillator toolkit.")
    p.add_argument("--version", action="version", version=f"qdef-osc {__version__}")
    sub = p.add_subparsers(dest="command", required=True, metavar="command")
    helps = {
        "classical": "trajectories x(t), v, a, theta_q for each gamma*A",
        "phase-space": "orbits in (x, p) and (x_q, p_q)",
        "lissajous": "curves of two deformed oscillators",
        "spectrum": "bound levels and the Morse potential curve",
        "wavefunctions": "psi_n(x) for each gamma*x0",
        "density2d": "separable 2D probability density",
        "correspondence": "window-averaged quantum vs classical density",
        "uncertainty": "Delta x, Delta p and their product",
        "verify": "run the invariant suite and write a JSON report",
    }
    for name, extra in COMMANDS.items():
        sp = sub.add_parser(name, help=helps[name])
        sp.add_argument("--config", help="flat key=value file (flags override it)")
        sp.add_argument("--gamma", help="comma list of gamma_q*scale (scale = A or x0)")
        sp.add_argument("--q", help="deformation q instead of --gamma (gamma_q*scale = 1 - q)")
        sp.add_argument("--scale", help="length scale: amplitude A (classical) or x0 (quantum)")
        sp.add_argument("--out", help="output directory (verify: report file, '-' for stdout)")
        sp.add_argument("--format", choices=("csv", "json"))
        sp.add_argument("--samples", help="points per period (classical) or grid points (quantum)")
        sp.add_argument("--tol", help="tolerance multiplier for verify")
        for key in UNIT_KEYS:
            sp.add_argument(f"--{key}", help=f"{key} (only with QDEF_OSC_NATURAL_UNITS=0)")
        for key in extra:
            if key in ("gamma",):
                continue
            sp.add_argument(f"--{key}", help=argparse.SUPPRESS if key == "mutation" else None)
    return p


def _resolve(args, environ=None):
    cmd = args.command
    defaults = dict(COMMON)
    defaults.update(COMMANDS[cmd])
    defaults["q"] = ""
    natural = natural_units_enabled(environ)
    file_values = read_config_file(args.config) if args.config else {}
    cli = {k: getattr(args, k.replace("-", "_"), None) for k in defaults}
    merged = merge(defaults, file_values, cli)

    def get(key):
        return merged[key]

    if natural:
        for key in UNIT_KEYS:
            value, where = get(key)
            if where != "default" and float(value) != 1.0:
                raise ConfigError(f"{where}: --{key} needs QDEF_OSC_NATURAL_UNITS=0 (natural units fix it to 1)")
    else:
        missing = [k for k in UNIT_KEYS if get(k)[1] == "default"]
        if missing:
            raise ConfigError(f"QDEF_OSC_NATURAL_UNITS=0 requires explicit {', '.join('--' + k for k in missing)}")

    q_raw, q_where = get("q")
    g_raw, g_where = get("gamma")
    if q_raw not in ("", None):
        if g_where != "default":
            raise ConfigError("give either --gamma or --q, not both")
        gammas = [1.0 - v for v in parse_float_list(q_raw, "q", q_where)]
    else:
        gammas = parse_float_list(g_raw, "gamma", g_where) if cmd != "verify" else []
    if cmd != "verify" and not gammas:
        raise ConfigError(f"{g_where}: the gamma list is empty")

    samples_raw, s_where = get("samples")
    samples = parse_float(samples_raw, "samples", s_where)
    if samples != int(samples):
        raise ConfigError(f"{s_where}: samples must be an integer")
    cfg = RunConfig(
        command=cmd, gamma=gammas,
        scale=parse_float(get("scale")[0], "scale", get("scale")[1]),
        m0=parse_float(get("m0")[0], "m0", get("m0")[1]),
        omega0=parse_float(get("omega0")[0], "omega0", get("omega0")[1]),
        hbar=parse_float(get("hbar")[0], "hbar", get("hbar")[1]),
        out=str(get("out")[0]), format=str(get("format")[0]), samples=int(samples),
        tol=parse_float(get("tol")[0], "tol", get("tol")[1]),
        options={k: merged[k] for k in COMMANDS[cmd] if k != "gamma"},
        natural_units=natural,
    )
    return cfg.validate()


def _units_meta(cfg):
    return {"units": "natural (m0 = omega0 = hbar = 1)" if cfg.natural_units else "SI"}


def _write(cfg, table, stem):
    table.meta.update(_units_meta(cfg))
    path = Path(cfg.out) / f"{stem}.{cfg.format}"
    table.write(path, cfg.format)
    print(path)
    return path


def _tag(v):
    return f"{v:g}".replace("-", "m")


def _opt(cfg, key, parser=parse_float):
    raw, where = cfg.options[key]
    return parser(raw, key, where)


# ---------------------------------------------------------------------------
# classical commands
# ---------------------------------------------------------------------------

def _osc(cfg, g, **kw):
    A = cfg.scale
    return C.OscillatorConfig(m0=cfg.m0, omega0=cfg.omega0, gamma_q=g / A, A=A, **kw)


def _open_table(osc, t):
    """Open-orbit trajectory sampled on t >= 0 with the same columns as the periodic one."""
    x = C.open_orbit_position(osc, t)
    g, w, A = osc.gamma_q, osc.omega0, osc.A
    y = 1.0 + g * x
    tt = np.asarray(t) + osc.delta / w
    v = -np.sign(tt) * y * w * np.sqrt(np.maximum(A * A - x * x, 0.0))
    a = w * w * (g * y * (A * A - x * x) - x * y * y)
    theta = np.sign(tt) * np.arccos(np.clip(x / A, -1.0, 1.0))
    return SeriesTable.from_columns(
        {"t": t, "x": x, "v": v, "a": a, "theta_q": theta},
        meta=C._cfg_meta(osc, t, regime="open", t_star=C.t_star(osc), integrator="rk4-deformed-chart"),
    )


def cmd_classical(cfg):
    delta = _opt(cfg, "delta")
    periods = _opt(cfg, "periods")
    written = []
    for g in cfg.gamma:
        if g == 1.0:
            raise RegimeError("gamma*A = 1 is the separatrix; choose a value below or above 1")
        osc = _osc(cfg, g, delta=delta)
        t = np.linspace(0.0, periods * osc.tau0, int(periods * cfg.samples) + 1)
        if osc.is_periodic:
            full = C.trajectory_table(osc, t)
            tab = SeriesTable.from_columns({k: full[k] for k in ("t", "x", "v", "a", "theta_q")}, meta=full.meta)
            tab.meta["regime"] = "closed"
            tab.meta["period"] = C.period(osc)
        else:
            tab = _open_table(osc, t)
        written.append(_write(cfg, tab, f"classical_gA{_tag(g)}"))
    return written


def cmd_phase_space(cfg):
    periods = _opt(cfg, "periods")
    written = []
    for g in cfg.gamma:
        if g == 1.0:
            raise RegimeError("gamma*A = 1 is the separatrix; choose a value below or above 1")
        osc = _osc(cfg, g)
        if osc.is_periodic:
            tau = C.period(osc)
            tab = C.phase_space_orbit(osc, np.linspace(0.0, tau, cfg.samples + 1))
        else:
            tab = C.phase_space_orbit(osc, np.linspace(0.0, periods * osc.tau0, int(periods * cfg.samples) + 1))
        written.append(_write(cfg, tab, f"phase_space_gA{_tag(g)}"))
    return written


def cmd_lissajous(cfg):
    ratio = _opt(cfg, "ratio", parse_ratio)
    phase = _opt(cfg, "phase")
    periods = _opt(cfg, "periods")
    if ratio <= 0:
        raise ConfigError("ratio must be positive")
    written = []
    for g in cfg.gamma:
        cx = _osc(cfg, g)
        cy = C.OscillatorConfig(m0=cfg.m0, omega0=cfg.omega0 * ratio, gamma_q=g / cfg.scale, A=cfg.scale, delta=phase)
        for c in (cx, cy):
            if not c.is_periodic:
                raise RegimeError("Lissajous curves need closed orbits (gamma*A < 1)")
        t = np.linspace(0.0, periods * C.period(cx), int(periods * cfg.samples) + 1)
        tab = C.lissajous(cx, cy, t)
        tab.meta["ratio"] = ratio
        written.append(_write(cfg, tab, f"lissajous_gA{_tag(g)}"))
    return written


# ---------------------------------------------------------------------------
# quantum commands
# ---------------------------------------------------------------------------

def _model(cfg, g):
    x0 = cfg.scale
    if cfg.natural_units:
        return Q.QuantumModel.from_gamma_x0(g, x0=x0)
    model = Q.QuantumModel(m0=cfg.m0, omega0=cfg.omega0, gamma_q=0.0, hbar=cfg.hbar)
    return Q.QuantumModel(m0=cfg.m0, omega0=cfg.omega0, gamma_q=g / model.x0, hbar=cfg.hbar)


def _qmeta(model, **extra):
    return base_meta(gamma_q_x0=model.gamma_x0, gamma_q=model.gamma_q, m0=model.m0, omega0=model.omega0,
                     hbar=model.hbar, x0=model.x0, **extra)


def cmd_spectrum(cfg):
    written = []
    for g in cfg.gamma:
        model = _model(cfg, g)
        rows = Q.spectrum(model)
        levels = SeriesTable(("n", "E_n", "E_over_eps0", "b", "a_qn"), np.array(rows, dtype=float),
                             _qmeta(model, n_levels=len(rows), n_max=model.n_max, W_q=model.W_q,
                                    eps0=model.eps0, sampling_step=None))
        written.append(_write(cfg, levels, f"spectrum_gx0{_tag(g)}"))
        osc = C.OscillatorConfig(m0=model.m0, omega0=model.omega0, gamma_q=model.gamma_q, A=0.0)
        mp = osc.morse
        xq_hi = 3.0 * model.x0 * math.sqrt(model.d)
        xq = np.linspace(-xq_hi / 3.0, xq_hi, cfg.samples)
        curve = SeriesTable.from_columns(
            {"x_q": xq, "V": C.morse_potential(osc, xq), "V_over_eps0": C.morse_potential(osc, xq) / model.eps0},
            meta=_qmeta(model, W_q=mp.W_q, alpha_q=mp.alpha_q, sampling_step=float(xq[1] - xq[0])),
        )
        written.append(_write(cfg, curve, f"morse_gx0{_tag(g)}"))
    return written


def _grid(model, extent, samples):
    x0 = model.x0
    lo, hi = -extent * x0, extent * x0
    if not model.is_sho:
        pole = -1.0 / model.gamma_q
        if model.gamma_q > 0:
            lo = max(lo, pole + 1e-6 * x0)
        else:
            hi = min(hi, pole - 1e-6 * x0)
    return np.linspace(lo, hi, samples)


def cmd_wavefunctions(cfg):
    ns = _opt(cfg, "n", parse_int_list)
    extent = _opt(cfg, "extent")
    written = []
    for g in cfg.gamma:
        model = _model(cfg, g)
        for n in ns:
            model.check_bound(n)
        x = _grid(model, extent, cfg.samples)
        cols = {"x": x}
        for n in ns:
            cols[f"psi_{n}"] = Q.wavefunction(model, n, x)
        for n in ns:
            cols[f"rho_{n}"] = cols[f"psi_{n}"] ** 2
        tab = SeriesTable.from_columns(cols, meta=_qmeta(
            model, n=ns, E_n=[Q.energy_level(model, n) for n in ns], sampling_step=float(x[1] - x[0])))
        written.append(_write(cfg, tab, f"wavefunctions_gx0{_tag(g)}"))
    return written


def cmd_density2d(cfg):
    n1 = _opt(cfg, "n1", parse_int_list)
    n2 = _opt(cfg, "n2", parse_int_list)
    extent = _opt(cfg, "extent")
    if len(n1) != 1 or len(n2) != 1:
        raise ConfigError("density2d takes a single n1 and n2")
    samples = min(cfg.samples, 400)
    written = []
    for g in cfg.gamma:
        model = _model(cfg, g)
        x = _grid(model, extent, samples)
        tab = Q.density_2d(model, model, n1[0], n2[0], x, x)
        tab.meta["norm_quadrature"] = Q.density_2d_norm(model, model, n1[0], n2[0])
        tab.meta["gamma_q_a0"] = model.gamma_q * Q.amplitude(model, 0)
        written.append(_write(cfg, tab, f"density2d_gx0{_tag(g)}_n{n1[0]}_{n2[0]}"))
    return written


def cmd_correspondence(cfg):
    ns = _opt(cfg, "n", parse_int_list)
    factor = _opt(cfg, "window")
    clip = _opt(cfg, "clip")
    if not 0 <= clip < 0.5:
        raise ConfigError("clip must lie in [0, 0.5)")
    written = []
    for g in cfg.gamma:
        model = _model(cfg, g)
        for n in ns:
            a = Q.amplitude(model, n)
            window = factor * 2.0 * math.pi * model.hbar / (model.m0 * model.omega0 * a)
            x, avg, cl, window = Q.correspondence_profile(model, n, window, clip)
            res = Q.correspondence_check(model, n, window, clip)
            step = max(1, len(x) // cfg.samples)
            tab = SeriesTable.from_columns(
                {"x": x[::step], "rho_avg": avg[::step], "rho_classical": cl[::step]},
                meta=_qmeta(model, n=n, a_qn=a, window=window, clip=clip, mean_abs=res.mean_abs, l1=res.l1,
                            sampling_step=float(x[step] - x[0]) if len(x) > step else None),
            )
            written.append(_write(cfg, tab, f"correspondence_gx0{_tag(g)}_n{n}"))
            print(f"gamma*x0={g:g} n={n}: mean |diff| = {res.mean_abs:.4g} /x0, L1 = {res.l1:.4g}")
    return written


def cmd_uncertainty(cfg):
    ns = _opt(cfg, "n", parse_int_list)
    rows, divergent = [], []
    for g in cfg.gamma:
        model = _model(cfg, g)
        for n in ns:
            if not model.is_sho and n > model.n_max:
                continue
            u = Q.uncertainties(model, n)
            if not math.isfinite(u.dp):
                divergent.append([g, n])
                continue
            rows.append((g, n, u.dx, u.dp, u.product, u.product / model.hbar))
    if not rows:
        raise RegimeError("no bound state with finite Delta p in the requested range")
    model = _model(cfg, cfg.gamma[0])
    tab = SeriesTable(("gamma_q_x0", "n", "dx", "dp", "dxdp", "dxdp_over_hbar"), np.array(rows, dtype=float),
                      base_meta(gamma_q_x0=cfg.gamma, m0=model.m0, omega0=model.omega0, hbar=model.hbar,
                                x0=model.x0, divergent_dp=divergent, sampling_step=None))
    return [_write(cfg, tab, "uncertainty")]


def cmd_verify(cfg):
    mutation = cfg.options["mutation"][0] or None
    if mutation is not None and mutation not in V.MUTATIONS:
        raise ConfigError(f"unknown mutation {mutation!r}")
    report = V.run(tol_scale=cfg.tol, mutation=mutation)
    text = V.report_json(report)
    for c in report["checks"]:
        flag = "PASS" if c["passed"] else "FAIL"
        print(f"{flag} {c['group']:<10} {c['name']:<32} measured={c['measured']:.3e} "
              f"tol={c['tolerance']:.1e} margin={c['margin']:+.2e}", file=sys.stderr)
    if cfg.out == "-":
        sys.stdout.write(text)
    else:
        path = Path(cfg.out)
        if path.suffix != ".json":
            path = path / "verify_report.json"
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
        print(path)
    print(f"{report['n_checks'] - report['n_failed']}/{report['n_checks']} checks passed", file=sys.stderr)
    return EXIT_OK if report["passed"] else EXIT_VERIFY


HANDLERS = {
    "classical": cmd_classical, "phase-space": cmd_phase_space, "lissajous": cmd_lissajous,
    "spectrum": cmd_spectrum, "wavefunctions": cmd_wavefunctions, "density2d": cmd_density2d,
    "correspondence": cmd_correspondence, "uncertainty": cmd_uncertainty, "verify": cmd_verify,
}


def main(argv=None, environ=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_VALIDATION
    try:
        cfg = _resolve(args, environ)
        with warnings.catch_warnings():
            warnings.simplefilter("error", IntegrationWarning)
            result = HANDLERS[args.command](cfg)
        return result if isinstance(result, int) else EXIT_OK
    except (ConfigError, DomainError, RegimeError, UnboundStateError) as exc:
        print(f"qdef-osc: error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (IntegrationError, IntegrationWarning, FloatingPointError, QDefError) as exc:
        print(f"qdef-osc: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
