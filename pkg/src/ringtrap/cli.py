"""Command-line surface: config ingestion, report commands, CSV/JSON/figures.

Usage: ringtrap <command> [--config PATH] [--out DIR] [--seed N] [--plot]

Commands: potential, raman, spectrum, decay, spill, lifetime, calibrate.
Configs are JSON with a schema_version field; unknown keys are errors, so a
misspelled field can never fall back to a default silently. Each command
stages its files in a temporary directory and publishes them only after the
whole command has succeeded, so failed runs leave nothing behind. CSV/JSON
outputs are byte-reproducible for a fixed config and seed; figures (--plot)
are a viewing aid.

Exit codes: 0 ok, 2 usage/config, 3 data, 4 physics or fit failure.
"""

import argparse
import json
import os
import shutil
import sys
import tempfile

import numpy as np

from . import ensemble, kinetics, spinmotion, synthetic, trapmodel
from ._tables import read_columns, write_columns
from .cavity import (
    CollectiveCoupling,
    DecayDataset,
    ResonatorParams,
    SpectrumDataset,
    averaged_spectrum,
    decay_rate_model,
    fit_bare_resonator,
    fit_cooperativity,
    fit_pulsed_decay,
    transmission,
)
from .constants import Hz_to_uK, uK_to_Hz
from .errors import ConfigError, DataFormatError, PhysicsError

SCHEMA_VERSION = 1

_RESONATOR_KEYS = ("kappa_e", "kappa_i", "beta", "gamma0", "gamma_prime")

_DEFAULT_RESONATOR = {
    "kappa_e": 0.76e9,
    "kappa_i": 0.94e9,
    "beta": 0.60e9,
    "gamma0": 5.2e6,
    "gamma_prime": None,
}

# Per-command blocks. None means "no default, optional".
_DEFAULT_BLOCKS = {
    "ensemble": {"temperature": 23e-6, "peak_density": 1e19, "m_F": 3},
    "calibrate": {
        "z_full": 440e-9,
        "z_probe": 360e-9,
        "probe_fraction": 0.1,
        "probe_depth": 250e-6,
        "raman_target": 1e4,
        "cooperativity_target": 0.05,
    },
    "potential": {
        "z_lo": 50e-9,
        "z_hi": 2.5e-6,
        "z_points": 1226,
        "x_halfwidth": 450e-9,
        "x_points": 121,
        "map_z_points": 176,
        "contour_levels_uK": [-200.0, -100.0, -50.0, 0.0, 100.0],
    },
    "raman": {"axes": ["x", "y", "z"], "n_states": 12, "m_F": 3, "delta_m": -1},
    "spectrum": {
        "mode": "atoms",
        "data": None,
        "cn_mean": 3.6,
        "gamma_shape": 4.0,
        "detuning_offset": 0.0,
        "span": 5e9,
        "points": 161,
        "noise": 0.02,
        "fit_offset": True,
    },
    "decay": {
        "data": None,
        "background": 20.0,
        "rate_ratio": 2.33,
        "peak_counts": 2000.0,
        "bin_width": 0.5e-9,
        "window": [0.0, 35e-9],
        "cn_max": 4.0,
    },
    "spill": {
        "data": None,
        "temperature": 23e-6,
        "amplitude": 3.6,
        "noise": 0.05,
        "power_fraction": 0.1,
        "onset_uK": 250.0,
        "maps": True,
    },
    "lifetime": {
        "data": None,
        "model": "one+three",
        "signal": "cooperativity",
        "continuous": False,
        "fixed": {"n0": 1e19},
        "generator": {
            "tau": 0.23,
            "L2": 0.0,
            "L3": 2.6e-37,
            "n0": 1e19,
            "t_max": 0.5,
            "points": 26,
            "noise": 0.02,
        },
    },
}

_FIXABLE = ("tau", "n0")


def _check_keys(block, allowed, where):
    for key in block:
        if key not in allowed:
            raise ConfigError(f"unknown key '{key}' in {where}")


class RunConfig:
    """Resolved configuration for one command invocation."""

    def __init__(self, raw: dict):
        if not isinstance(raw, dict):
            raise ConfigError("config root must be a JSON object")
        version = raw.get("schema_version")
        if version != SCHEMA_VERSION:
            raise ConfigError(
                f"config schema_version must be {SCHEMA_VERSION}, got {version!r}"
            )
        top = ("schema_version", "seed", "trap", "resonator") + tuple(_DEFAULT_BLOCKS)
        _check_keys(raw, top, "config")
        self.raw = raw
        self.seed = int(raw.get("seed", 0))
        self.trap = trapmodel.TrapConfig.from_dict(raw.get("trap", {}))
        rers = dict(_DEFAULT_RESONATOR)
        block = raw.get("resonator", {})
        _check_keys(block, _RESONATOR_KEYS, "resonator")
        rers.update(block)
        self.resonator = ResonatorParams(**rers)

    @classmethod
    def load(cls, path) -> "RunConfig":
        if path is None:
            return cls({"schema_version": SCHEMA_VERSION})
        try:
            with open(path) as fh:
                raw = json.load(fh)
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}") from None
        except json.JSONDecodeError as e:
            raise ConfigError(f"config is not valid JSON: {e}") from None
        return cls(raw)

    def block(self, name: str) -> dict:
        merged = json.loads(json.dumps(_DEFAULT_BLOCKS[name]))  # deep copy
        given = self.raw.get(name, {})
        _check_keys(given, tuple(merged), name)
        for key, value in given.items():
            if isinstance(merged.get(key), dict) and isinstance(value, dict):
                _check_keys(value, tuple(merged[key]), f"{name}.{key}")
                merged[key].update(value)
            else:
                merged[key] = value
        return merged


def _write_json(path, obj):
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            json.dump(obj, fh, indent=2, sort_keys=True)
            fh.write("\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fit_block(res):
    return {
        "parameters": res.parameters,
        "errors": {k: res.error(k) for k in res.param_names},
        "chi2": res.chi2,
        "dof": res.dof,
        "converged": res.converged,
        "n_iter": res.n_iter,
    }


def cmd_calibrate(rc: RunConfig, stage: str, plot: bool):
    block = rc.block("calibrate")
    ens = rc.block("ensemble")
    cal = trapmodel.calibrate(
        template=rc.trap,
        z_full=block["z_full"],
        z_probe=block["z_probe"],
        probe_fraction=block["probe_fraction"],
        probe_depth=block["probe_depth"],
    )
    cal = spinmotion.calibrate_alpha_scale(cal, target=block["raman_target"])
    probe = trapmodel.with_barrier_power(cal, block["probe_fraction"])
    coupling_ref = ensemble.calibrate_coupling_ref(
        probe,
        target_cooperativity=block["cooperativity_target"],
        temperature=ens["temperature"],
        m_F=ens["m_F"],
        kappa=rc.resonator.kappa,
        gamma0=rc.resonator.gamma0,
    )
    z_full, u_full = trapmodel.trap_minimum(cal)
    z_probe, u_probe = trapmodel.trap_minimum(probe)
    rows = {
        "guide_depth_Hz": cal.guide_depth,
        "barrier_peak_Hz": cal.barrier_peak,
        "evanescent_decay_per_m": cal.evanescent_decay,
        "effective_index": cal.effective_index,
        "alpha_scale_T": cal.alpha_scale,
        "coupling_ref_Hz": coupling_ref,
        "xi": trapmodel.xi_coefficient(
            rc.resonator.kappa, rc.resonator.beta, cal.field_ratio
        ),
        "eta": rc.resonator.eta,
        "corrugation_visibility": trapmodel.barrier_visibility(
            rc.resonator.kappa, rc.resonator.beta, cal.field_ratio
        ),
        "z_min_full_m": z_full,
        "z_min_probe_m": z_probe,
        "depth_full_uK": Hz_to_uK(-u_full),
        "depth_probe_uK": Hz_to_uK(-u_probe),
    }
    write_columns(
        os.path.join(stage, "calibration.csv"),
        ("name", "value"),
        (list(rows), list(rows.values())),
    )
    _write_json(
        os.path.join(stage, "calibration.json"),
        {"command": "calibrate", "schema_version": SCHEMA_VERSION, **rows},
    )


def cmd_potential(rc: RunConfig, stage: str, plot: bool):
    block = rc.block("potential")
    full = rc.trap
    probe = trapmodel.probe_config(full)
    z = np.linspace(block["z_lo"], block["z_hi"], int(block["z_points"]))
    cuts = {
        "guide": trapmodel.guide_potential(full, 0.0, 0.0, z),
        "barrier": trapmodel.barrier_potential(full, 0.0, 0.0, z),
        "surface": trapmodel.casimir_polder(full, z),
        "total_full": trapmodel.total_potential(full, 0.0, 0.0, z),
        "total_probe": trapmodel.total_potential(probe, 0.0, 0.0, z),
        "spin33_full": trapmodel.full_spin_potential(full, 0.0, 0.0, z, 3),
    }
    write_columns(
        os.path.join(stage, "potential_z.csv"),
        ("z_m",) + tuple(f"{k}_Hz" for k in cuts),
        (z,) + tuple(cuts.values()),
    )

    hw = block["x_halfwidth"]
    x = np.linspace(-hw, hw, int(block["x_points"]))
    zg = np.linspace(block["z_lo"], block["z_hi"], int(block["map_z_points"]))
    X, Z = np.meshgrid(x, zg, indexing="ij")
    b = np.abs(trapmodel.fictitious_field(full, X, 0.0, Z))
    u = trapmodel.total_potential(full, X, 0.0, Z)
    write_columns(
        os.path.join(stage, "field_map.csv"),
        ("x_m", "z_m", "b_fict_T", "total_Hz"),
        (X.ravel(), Z.ravel(), b.ravel(), u.ravel()),
    )

    def extrema(config, m_F=None):
        minima, maxima = trapmodel.axial_extrema(
            config, m_F=m_F, z_lo=block["z_lo"], z_hi=block["z_hi"]
        )
        out = {"minima_m": list(minima), "maxima_m": list(maxima)}
        if minima.size:
            zc, umin = trapmodel.trap_minimum(config)
            out["z_min_m"] = zc
            out["depth_uK"] = Hz_to_uK(-umin)
        else:
            out["z_min_m"] = None
            out["depth_uK"] = None
        return out

    _write_json(
        os.path.join(stage, "potential_report.json"),
        {
            "command": "potential",
            "schema_version": SCHEMA_VERSION,
            "full": extrema(full),
            "probe": extrema(probe),
            "spin33_full": extrema(full, m_F=3),
        },
    )

    if plot:
        from . import figures

        figures.potential_linecuts(
            os.path.join(stage, "potential_linecuts.png"), z, cuts
        )
        figures.field_map(
            os.path.join(stage, "field_map.png"),
            x,
            zg,
            b,
            u,
            block["contour_levels_uK"],
        )


def cmd_raman(rc: RunConfig, stage: str, plot: bool):
    block = rc.block("raman")
    n = int(block["n_states"])
    spacings = {}
    adjacent = {}
    for axis in block["axes"]:
        es = spinmotion.axis_levels(rc.trap, axis)
        k = min(n, es.n_states)
        energies = es.energies[:k]
        om = spinmotion.raman_matrix(
            rc.trap, axis, n_states=k, m_F=block["m_F"], delta_m=block["delta_m"]
        )
        write_columns(
            os.path.join(stage, f"raman_levels_{axis}.csv"),
            ("nu", "energy_Hz"),
            (np.arange(k), energies),
        )
        write_columns(
            os.path.join(stage, f"raman_rates_{axis}.csv"),
            ("nu",) + tuple(str(j) for j in range(k)),
            (np.arange(k),) + tuple(om[:, j] for j in range(k)),
        )
        spacings[axis] = np.diff(energies)
        adjacent[axis] = np.abs(np.diag(om, -1))
    _write_json(
        os.path.join(stage, "raman_report.json"),
        {
            "command": "raman",
            "schema_version": SCHEMA_VERSION,
            "zeeman_splitting_Hz": spinmotion.zeeman_splitting(rc.trap),
            "adjacent_rates_Hz": {a: list(v) for a, v in adjacent.items()},
            "level_spacings_Hz": {a: list(v) for a, v in spacings.items()},
        },
    )
    if plot:
        from . import figures

        figures.raman_ladder(
            os.path.join(stage, "raman_ladder.png"), spacings, adjacent
        )


def cmd_spectrum(rc: RunConfig, stage: str, plot: bool):
    block = rc.block("spectrum")
    mode = block["mode"]
    if mode not in ("atoms", "bare"):
        raise ConfigError("spectrum mode must be 'atoms' or 'bare'")
    if block["data"] is not None:
        data = SpectrumDataset.from_csv(block["data"])
        source = {"data": block["data"]}
    elif mode == "bare":
        data = synthetic.bare_spectrum(
            rc.resonator,
            span=block["span"],
            n=int(block["points"]),
            noise=block["noise"],
            seed=rc.seed,
        )
        source = {"generator": "bare_spectrum", "noise": block["noise"], "seed": rc.seed}
    else:
        data = synthetic.atom_spectrum(
            CollectiveCoupling(
                block["cn_mean"], block["gamma_shape"], block["detuning_offset"]
            ),
            rc.resonator,
            span=block["span"],
            n=int(block["points"]),
            noise=block["noise"],
            seed=rc.seed,
        )
        source = {
            "generator": "atom_spectrum",
            "cn_mean": block["cn_mean"],
            "gamma_shape": block["gamma_shape"],
            "detuning_offset": block["detuning_offset"],
            "noise": block["noise"],
            "seed": rc.seed,
        }
    write_columns(
        os.path.join(stage, "spectrum_data.csv"),
        ("detuning_Hz", "value", "sigma"),
        (data.detunings, data.transmissions, data.uncertainties),
    )
    fine = np.linspace(float(data.detunings[0]), float(data.detunings[-1]), 401)
    report = {"command": "spectrum", "schema_version": SCHEMA_VERSION, "mode": mode}
    report["source"] = source
    if mode == "bare":
        rp_fit, res = fit_bare_resonator(data)
        _, model = transmission(fine, 0.0, rp_fit)
        report["resonator"] = {
            "kappa_e_Hz": rp_fit.kappa_e,
            "kappa_i_Hz": rp_fit.kappa_i,
            "beta_Hz": rp_fit.beta,
            "eta": rp_fit.eta,
        }
    else:
        cc, res = fit_cooperativity(data, rc.resonator, fit_offset=block["fit_offset"])
        model = averaged_spectrum(fine, cc, rc.resonator)
        report["cooperativity"] = {
            "cn_mean": cc.CN_mean,
            "gamma_shape": cc.gamma_shape,
            "detuning_offset_Hz": cc.detuning_offset,
        }
    report["fit"] = _fit_block(res)
    write_columns(
        os.path.join(stage, "spectrum_fit.csv"),
        ("detuning_Hz", "value"),
        (fine, model),
    )
    _write_json(os.path.join(stage, "spectrum_report.json"), report)
    if plot:
        from . import figures

        figures.spectrum_overlay(
            os.path.join(stage, "spectrum.png"), data, fine, model
        )


def cmd_decay(rc: RunConfig, stage: str, plot: bool):
    block = rc.block("decay")
    if block["data"] is not None:
        data = DecayDataset.from_csv(block["data"], background=block["background"])
        source = {"data": block["data"]}
    else:
        data = synthetic.pulsed_decay(
            rate_ratio=block["rate_ratio"],
            rp=rc.resonator,
            bin_width=block["bin_width"],
            peak_counts=block["peak_counts"],
            background=block["background"],
            seed=rc.seed,
        )
        source = {
            "generator": "pulsed_decay",
            "rate_ratio": block["rate_ratio"],
            "peak_counts": block["peak_counts"],
            "background": block["background"],
            "seed": rc.seed,
        }
    write_columns(
        os.path.join(stage, "decay_data.csv"),
        ("time_s", "value"),
        (data.times, data.counts),
    )
    window = tuple(block["window"])
    gamma, ratio, res = fit_pulsed_decay(data, rc.resonator, window=window)
    fine = np.linspace(float(data.times[0]), float(data.times[-1]), 351)
    model = res.parameters["amplitude"] * np.exp(
        -2.0 * np.pi * gamma * fine
    ) + data.background
    write_columns(
        os.path.join(stage, "decay_fit.csv"), ("time_s", "value"), (fine, model)
    )
    cn = np.linspace(0.0, block["cn_max"], 81)
    line = np.array([decay_rate_model(c, rc.resonator) for c in cn])
    write_columns(
        os.path.join(stage, "decay_line.csv"),
        ("cn_mean", "rate_ratio"),
        (cn, line),
    )
    _write_json(
        os.path.join(stage, "decay_report.json"),
        {
            "command": "decay",
            "schema_version": SCHEMA_VERSION,
            "source": source,
            "gamma_Hz": gamma,
            "rate_ratio": ratio,
            "rate_ratio_error": res.error("rate") / rc.resonator.gamma0,
            "eta": rc.resonator.eta,
            "window_s": list(window),
            "fit": _fit_block(res),
        },
    )
    if plot:
        from . import figures

        figures.decay_trace(os.path.join(stage, "decay_trace.png"), data, fine, model)
        figures.decay_line(
            os.path.join(stage, "decay_line.png"), cn, line, rc.resonator.eta
        )


def cmd_spill(rc: RunConfig, stage: str, plot: bool):
    block = rc.block("spill")
    ens = rc.block("ensemble")
    trap = trapmodel.with_barrier_power(rc.trap, block["power_fraction"])
    if block["data"] is not None:
        rows = read_columns(block["data"], ("dU_min_uK", "CN", "sigma"))
        du_uk, values, sigmas = rows[:, 0], rows[:, 1], rows[:, 2]
        source = {"data": block["data"]}
    else:
        du_uk, values, sigmas = synthetic.spill_curve(
            trap,
            block["temperature"],
            amplitude=block["amplitude"],
            noise=block["noise"],
            seed=rc.seed,
        )
        source = {
            "generator": "spill_curve",
            "temperature": block["temperature"],
            "amplitude": block["amplitude"],
            "noise": block["noise"],
            "seed": rc.seed,
        }
    write_columns(
        os.path.join(stage, "spill_data.csv"),
        ("dU_min_uK", "CN", "sigma"),
        (du_uk, values, sigmas),
    )
    res = ensemble.fit_temperature(
        trap, uK_to_Hz(du_uk), values, sigmas, m_F=ens["m_F"]
    )
    t_fit = res.parameters["temperature"]
    amp = res.parameters["amplitude"]
    state = ensemble.ThermalState(
        trap, t_fit, m_F=ens["m_F"], peak_density=ens["peak_density"]
    )
    fine = np.linspace(0.0, float(np.max(du_uk)) * 1.05, 201)
    curve = amp * ensemble.survival_probability(state, uK_to_Hz(fine))
    write_columns(
        os.path.join(stage, "spill_fit.csv"), ("dU_min_uK", "CN"), (fine, curve)
    )
    coupling = ensemble.mean_coupling(
        state, kappa=rc.resonator.kappa, gamma0=rc.resonator.gamma0
    )
    _write_json(
        os.path.join(stage, "spill_report.json"),
        {
            "command": "spill",
            "schema_version": SCHEMA_VERSION,
            "source": source,
            "temperature_K": t_fit,
            "temperature_error_K": res.error("temperature"),
            "amplitude": amp,
            "escape_energy_Hz": state.escape_energy,
            "single_cooperativity": coupling.cooperativity,
            "atom_number": ensemble.atom_number(amp, coupling.cooperativity),
            "fit": _fit_block(res),
        },
    )
    maps = ensemble.density_maps(state) if block["maps"] else None
    if maps is not None:
        X, Z = np.meshgrid(maps.x, maps.z, indexing="ij")
        write_columns(
            os.path.join(stage, "density_xz.csv"),
            ("x_m", "z_m", "column_density_per_m2"),
            (X.ravel(), Z.ravel(), maps.xz.ravel()),
        )
        Y, Z = np.meshgrid(maps.y, maps.z, indexing="ij")
        write_columns(
            os.path.join(stage, "density_yz.csv"),
            ("y_m", "z_m", "column_density_per_m2"),
            (Y.ravel(), Z.ravel(), maps.yz.ravel()),
        )
    if plot:
        from . import figures

        figures.spill_overlay(
            os.path.join(stage, "spill_curve.png"),
            du_uk,
            values,
            sigmas,
            fine,
            curve,
            onset_uk=block["onset_uK"],
        )
        if maps is not None:
            figures.density_panels(os.path.join(stage, "density_maps.png"), maps)


def cmd_lifetime(rc: RunConfig, stage: str, plot: bool):
    block = rc.block("lifetime")
    fixed = dict(block["fixed"])
    for key in fixed:
        if key not in _FIXABLE:
            raise ConfigError(f"lifetime.fixed can only pin {_FIXABLE}, not '{key}'")
    if block["data"] is not None:
        t, values, sigmas = kinetics.load_time_series(block["data"])
        source = {"data": block["data"]}
    else:
        gen = block["generator"]
        lm = kinetics.LossModel(
            tau=gen["tau"], n0=gen["n0"], L2=gen["L2"], L3=gen["L3"]
        )
        t, values, sigmas = synthetic.loss_series(
            lm,
            np.linspace(0.0, gen["t_max"], int(gen["points"])),
            noise=gen["noise"],
            seed=rc.seed,
        )
        source = {"generator": "loss_series", "seed": rc.seed, **gen}
    write_columns(
        os.path.join(stage, "lifetime_data.csv"),
        ("t_s", "value", "sigma"),
        (t, values, sigmas),
    )
    report = {"command": "lifetime", "schema_version": SCHEMA_VERSION, "source": source}
    fine = np.linspace(float(t[0]), float(t[-1]), 301)
    if block["continuous"]:
        tau, res = kinetics.continuous_cooling_lifetime(t, values, sigmas)
        amp = res.parameters["amplitude"] if res is not None else float(values[0])
        model = amp * np.exp(-fine / tau) if np.isfinite(tau) else np.full_like(fine, amp)
        report["tau_s"] = tau if np.isfinite(tau) else None
        # d(tau) = d(rate) / rate^2
        report["tau_error_s"] = (
            res.error("rate") * tau * tau if res is not None and np.isfinite(tau) else None
        )
    else:
        lm_fit, res = kinetics.fit_lifetime(
            t,
            values,
            sigmas,
            block["model"],
            rp=rc.resonator,
            fixed=fixed,
            signal=block["signal"],
        )
        model = kinetics.evolve_atom_number(lm_fit, fine)
        report["model"] = block["model"]
        report["loss_model"] = {
            "tau_s": lm_fit.tau,
            "n0_per_m3": lm_fit.n0,
            "N0": lm_fit.N0,
            "L2_m3_per_s": lm_fit.L2,
            "L3_m6_per_s": lm_fit.L3,
        }
    report["fit"] = _fit_block(res) if res is not None else None
    write_columns(
        os.path.join(stage, "lifetime_fit.csv"), ("t_s", "value"), (fine, model)
    )
    _write_json(os.path.join(stage, "lifetime_report.json"), report)
    if plot:
        from . import figures

        figures.lifetime_overlay(
            os.path.join(stage, "lifetime.png"), t, values, sigmas, fine, model
        )


_COMMANDS = {
    "potential": cmd_potential,
    "raman": cmd_raman,
    "spectrum": cmd_spectrum,
    "decay": cmd_decay,
    "spill": cmd_spill,
    "lifetime": cmd_lifetime,
    "calibrate": cmd_calibrate,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ringtrap",
        description="Evanescent ring-trap reports: potentials, spectra, spill thermometry.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name, help=f"run the {name} report")
        p.add_argument("--config", default=None, help="JSON config file")
        p.add_argument("--out", default="out", help="output directory (default: out)")
        p.add_argument("--seed", type=int, default=None, help="override config seed")
        p.add_argument("--plot", action="store_true", help="also render figures")
    return parser


def run(command: str, rc: RunConfig, out: str, plot: bool) -> list:
    """Run one command, staging outputs so failures leave nothing behind."""
    os.makedirs(out, exist_ok=True)
    stage = tempfile.mkdtemp(dir=out, prefix=".stage-")
    try:
        _COMMANDS[command](rc, stage, plot)
        published = []
        for name in sorted(os.listdir(stage)):
            os.replace(os.path.join(stage, name), os.path.join(out, name))
            published.append(os.path.join(out, name))
        return published
    finally:
        shutil.rmtree(stage, ignore_errors=True)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        rc = RunConfig.load(args.config)
        if args.seed is not None:
            rc.seed = args.seed
        published = run(args.command, rc, args.out, args.plot)
    except ConfigError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 2
    except DataFormatError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 3
    except PhysicsError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 4
    for path in published:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
