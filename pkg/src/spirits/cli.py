"""Command-line entry point ``spirits``.

Every command builds its artifacts in memory, then writes them atomically
together with ``manifest.json`` (effective config, seed, artifact hashes).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .artifacts import commit, csv_bytes, json_bytes
from .config import RunConfig, defaults_text, parse_config
from .dynamics import simulate
from .errors import ConfigError, FitError, SpiritsError
from .feedback import (
    boundary_hyperbola,
    boundary_tangency,
    fixed_points,
    phase_diagram_scan,
)
from .inflation import PolicyParams, inflation_path
from .micro import closed_form_consumption, solve_equilibrium
from .rare_events import (
    Direction,
    arrhenius_fit,
    auto_sigma_grid,
    kramers_rate,
    kramers_slope,
    potential,
    rate_scan,
)

COMMANDS = ("micro", "fixed-points", "phase-diagram", "simulate", "rates", "kramers",
            "inflation", "defaults", "replay")


# ---------------------------------------------------------------- commands

def cmd_micro(cfg: RunConfig) -> dict:
    m = cfg["micro"]
    prefs, firm = cfg.preferences(), cfg.firm()
    eq = solve_equilibrium(prefs, firm, m["f"], m["z"])
    out = {"c": eq.c, "n": eq.n, "u": eq.u, "lambda_p": eq.lambda_p}
    if prefs.is_standard and math.isclose(firm.alpha, 1.0 / 3.0, rel_tol=1e-15):
        out["c_closed_form"] = closed_form_consumption(m["f"], m["z"], prefs.gamma)
    return {"micro.json": json_bytes(out)}


def cmd_fixed_points(cfg: RunConfig) -> dict:
    mp = cfg.map_params()
    fps = fixed_points(mp)
    out = {
        "phase": fps.phase.value,
        "roots": [{"c": r.value, "slope": r.slope, "stable": r.stable} for r in fps.roots],
        "max_h_prime": fps.max_h_prime,
        "distance_ratio": fps.distance_ratio,
        "c0_hyperbola": boundary_hyperbola(mp, mp.theta),
        "c0_tangency": list(boundary_tangency(mp, mp.theta) or []) or None,
    }
    return {"fixed_points.json": json_bytes(out)}


def cmd_phase_diagram(cfg: RunConfig) -> dict:
    s = cfg["scan"]
    c0 = np.linspace(s["c0_min"], s["c0_max"], s["n_c0"])
    theta = np.linspace(s["theta_min"], s["theta_max"], s["n_theta"])
    diag = phase_diagram_scan(cfg.map_params(), c0, theta, threads=cfg.threads)
    rows = list(diag.rows())
    cols = list(zip(*rows))
    return {"phase.csv": csv_bytes(["c0", "theta", "phase", "distance_ratio"], cols)}


def cmd_simulate(cfg: RunConfig) -> dict:
    traj = simulate(cfg.sim_config())
    t = np.arange(traj.x.size)
    basin = traj.basin_labels() if traj.basin is not None else [None] * t.size
    st = traj.stats
    edges, density = st["hist_edges"], st["hist_density"]
    stats = {k: st.get(k) for k in ("mean_x", "var_delta", "var_delta_predicted",
                                    "occupancy_high", "occupancy_low")}
    arts = {
        "traj.csv": csv_bytes(["t", "x", "c", "basin"], [t, traj.x, traj.c, basin]),
        "hist.csv": csv_bytes(["bin_left", "bin_right", "density"],
                              [edges[:-1], edges[1:], density]),
        "stats.json": json_bytes(stats),
    }
    if cfg["sim"]["dump_shocks"] == "yes":
        arts["shocks.csv"] = csv_bytes(["t", "xi"], [t, traj.xi])
    return arts


def cmd_rates(cfg: RunConfig) -> dict:
    r = cfg["rates"]
    sim = cfg.sim_config()
    mp = sim.map
    prof = potential(mp)
    dirs = list(Direction) if r["direction"] == "both" else [Direction(r["direction"])]
    rows, fits = [], []
    common = dict(members=r["members"], threads=cfg.threads)
    for d in dirs:
        if r["sigmas"] == "auto":
            sigmas = auto_sigma_grid(sim, n_sigma=r["n_sigma"], t_range=(r["t_min"], r["t_max"]),
                                     target=d, **common)
        else:
            sigmas = sorted(r["sigmas"], reverse=True)
        ests = rate_scan(sim, sigmas, r["n_min"], r["max_steps"], target=d, **common)
        for e in ests:
            rows.append((e.sigma, 1.0 / e.sigma**2, d.value, e.mean_T(d), e.std_err_logT(d),
                         e.n_transitions(d)))
        fit = arrhenius_fit(ests, d)
        w_k = kramers_slope(mp, d, sim.ema_epsilon, prof)
        fits.append({"direction": d.value, "w_fit": fit.w_fit, "intercept": fit.intercept,
                     "r_squared": fit.r_squared, "w_kramers": w_k, "ratio": w_k / fit.w_fit,
                     "n_points": fit.n_points})
    cols = list(zip(*rows))
    return {
        "rates.csv": csv_bytes(["sigma", "inv_sigma2", "direction", "mean_T", "std_err_logT",
                                "n_transitions"], cols),
        "fit.json": json_bytes(fits[0] if len(fits) == 1 else fits),
    }


def cmd_kramers(cfg: RunConfig) -> dict:
    sim = cfg.sim_config()
    mp = sim.map
    prof = potential(mp)
    out = {"sigma": sim.shocks.sigma, "epsilon": sim.ema_epsilon,
           "prefactor": cfg["rates"]["prefactor"],
           "w_high_to_low": prof.w_high_to_low, "w_low_to_high": prof.w_low_to_high,
           "slope_high_to_low": kramers_slope(mp, Direction.HIGH_TO_LOW, sim.ema_epsilon, prof),
           "slope_low_to_high": kramers_slope(mp, Direction.LOW_TO_HIGH, sim.ema_epsilon, prof)}
    if sim.shocks.sigma > 0:
        h2l, l2h = kramers_rate(mp, sim.shocks.sigma, sim.ema_epsilon,
                                cfg["rates"]["prefactor"], prof)
        out.update(rate_high_to_low=h2l, rate_low_to_high=l2h,
                   mean_T_high_to_low=1.0 / h2l, mean_T_low_to_high=1.0 / l2h)
    return {"kramers.json": json_bytes(out)}


def cmd_inflation(cfg: RunConfig) -> dict:
    sim = cfg.sim_config()
    p = cfg["policy"]
    policy = PolicyParams.from_map(sim.map, p["phi_taylor"], cfg["micro"]["beta"],
                                   p["crisis_prob"])
    traj = simulate(sim, classify=False)
    path = inflation_path(traj, policy, sim.map, sim.shocks)
    t = np.arange(1, traj.x.size)
    summary = {"kappa_high": path.kappa_high, "delta_pi_crisis": path.delta_pi_crisis,
               "mean_pi": path.mean_pi,
               "forward_coefficient_negative": path.forward_coefficient_negative}
    return {"inflation.csv": csv_bytes(["t", "pi", "r"], [t, path.pi, path.r]),
            "inflation.json": json_bytes(summary)}


RUNNERS = {
    "micro": cmd_micro,
    "fixed-points": cmd_fixed_points,
    "phase-diagram": cmd_phase_diagram,
    "simulate": cmd_simulate,
    "rates": cmd_rates,
    "kramers": cmd_kramers,
    "inflation": cmd_inflation,
}


def run(command: str, cfg: RunConfig, out_dir) -> dict:
    """Execute one command and write its artifacts; returns the manifest."""
    artifacts = RUNNERS[command](cfg)
    manifest = {"command": command, "version": __version__, "seed": cfg.seed,
                "config": cfg.as_dict()}
    return commit(out_dir, artifacts, manifest)


# ---------------------------------------------------------------- parsing

def _split_overrides(tokens):
    """``--section.key=value`` / ``--key value`` tokens -> dict, errors."""
    out, errors = {}, []
    i = 0
    while i < len(tokens):
        tok = tokens[i]
        if not tok.startswith("--") or len(tok) < 3:
            errors.append(f"unexpected argument {tok!r}")
            i += 1
            continue
        body = tok[2:]
        if "=" in body:
            name, val = body.split("=", 1)
        elif i + 1 < len(tokens) and not tokens[i + 1].startswith("--"):
            name, val = body, tokens[i + 1]
            i += 1
        else:
            errors.append(f"flag --{body} has no value")
            i += 1
            continue
        out[name.replace("-", "_")] = val
        i += 1
    return out, errors


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="spirits",
        description="Confidence-driven business cycles: fixed points, phase diagrams, "
                    "simulations, crisis rates and inflation.",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="Any configuration key can be set with --section.key=value (or --key=value "
               "when the key name is unique). Precedence: defaults < --config file < flags.\n"
               "Exit codes: 0 ok, 2 config error, 3 phase/domain error, "
               "4 insufficient transitions, 5 numeric failure.\n\nDefaults:\n" + defaults_text(),
    )
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("manifest", nargs="?", help="manifest.json to re-run (replay only)")
    p.add_argument("--config", type=Path, help="configuration file")
    p.add_argument("--seed", help="master seed (64-bit unsigned)")
    p.add_argument("--threads", help="worker threads, integer or 'auto'")
    p.add_argument("--out", type=Path, default=Path("."), help="output directory")
    return p


def _build_config(ns, extra, base=None) -> RunConfig:
    overrides, errors = _split_overrides(extra)
    if ns.seed is not None:
        overrides["run.seed"] = ns.seed
    if ns.threads is not None:
        overrides["run.threads"] = ns.threads
    try:
        cfg = parse_config(ns.config, overrides, base=base)
    except ConfigError as exc:
        raise ConfigError(errors + exc.violations) from None
    if errors:
        raise ConfigError(errors)
    return cfg


def _replay(ns, extra) -> int:
    if ns.manifest is None:
        raise ConfigError(["replay needs the path of a manifest.json"])
    try:
        old = json.loads(Path(ns.manifest).read_text())
        command, base = old["command"], old["config"]
    except (OSError, ValueError, KeyError) as exc:
        raise ConfigError([f"{ns.manifest}: unreadable manifest ({exc})"]) from None
    if command not in RUNNERS:
        raise ConfigError([f"{ns.manifest}: unknown command {command!r}"])
    cfg = _build_config(ns, extra, base=base)
    new = run(command, cfg, ns.out)
    same = new["artifacts"] == old.get("artifacts")
    print(f"replay {command}: artifact hashes {'match' if same else 'DIFFER'}")
    return 0 if same else 5


def main(argv=None) -> int:
    parser = _parser()
    ns, extra = parser.parse_known_args(argv)
    try:
        if ns.command == "defaults":
            sys.stdout.write(defaults_text())
            return 0
        if ns.command == "replay":
            return _replay(ns, extra)
        if ns.manifest is not None:
            extra = [ns.manifest] + extra
        cfg = _build_config(ns, extra)
        manifest = run(ns.command, cfg, ns.out)
    except ConfigError as exc:
        print("configuration error:", file=sys.stderr)
        for v in exc.violations:
            print(f"  {v}", file=sys.stderr)
        return exc.exit_code
    except FitError as exc:
        print(f"spirits: {exc}", file=sys.stderr)
        return exc.exit_code
    except SpiritsError as exc:
        print(f"spirits: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    for name in sorted(manifest["artifacts"]):
        print(ns.out / name)
    return 0


if __name__ == "__main__":
    sys.exit(main())
