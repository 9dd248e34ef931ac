"""Seeded command-line experiment runner.

Every experiment emits tab-separated tables with a '#'-prefixed header
block echoing the full configuration, the seed and the package version,
so an identical configuration and seed reproduce the output byte for
byte.  Floats are printed with 17 significant digits.

Exit codes: 0 success, 2 configuration error, 3 numerical-budget error,
4 property-check failure.
"""

from __future__ import annotations

import argparse
import math
import sys
from typing import Optional

import numpy as np

from . import __version__, audit, gates, measure, metrology, optics, states

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_BUDGET = 3
EXIT_PROPERTY = 4


class ConfigError(ValueError):
    pass


class BudgetError(ValueError):
    pass


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def parse_config_file(path: str) -> dict[str, str]:
    """key=value lines; '#' starts a comment; keys normalized to underscores."""
    out: dict[str, str] = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {raw.strip()!r}")
        key, _, value = line.partition("=")
        key = key.strip().replace("-", "_")
        value = value.strip()
        if not key or not value:
            raise ConfigError(f"{path}:{lineno}: empty key or value")
        out[key] = value
    return out


def _coerce(key: str, raw: str, kind: type):
    try:
        if kind is bool:
            low = raw.lower()
            if low in ("1", "true", "yes"):
                return True
            if low in ("0", "false", "no"):
                return False
            raise ValueError(raw)
        return kind(raw)
    except ValueError as exc:
        raise ConfigError(f"config field {key!r}: cannot parse {raw!r} as {kind.__name__}") from exc


def resolve_config(args: argparse.Namespace, schema: dict[str, tuple[type, object]]) -> dict:
    """Merge defaults < config file < explicit command-line flags."""
    cfg = {key: default for key, (_, default) in schema.items()}
    if args.config:
        for key, raw in parse_config_file(args.config).items():
            if key not in schema:
                raise ConfigError(f"unknown config field {key!r}")
            cfg[key] = _coerce(key, raw, schema[key][0])
    for key in schema:
        flag_value = getattr(args, key, None)
        if flag_value is not None:
            cfg[key] = flag_value
    missing = [k for k, v in cfg.items() if v is None]
    if missing:
        raise ConfigError(f"missing required field(s): {', '.join(missing)}")
    return cfg


def emit(
    out,
    experiment: str,
    seed: int,
    cfg: dict,
    columns: list[str],
    rows: list[list],
) -> None:
    out.write(f"# catsim {__version__}\n")
    out.write(f"# experiment {experiment}\n")
    out.write(f"# seed {seed}\n")
    for key in sorted(cfg):
        out.write(f"# {key} = {_fmt(cfg[key])}\n")
    out.write("\t".join(columns) + "\n")
    for row in rows:
        out.write("\t".join(_fmt(v) for v in row) + "\n")


def _alpha_grid(cfg: dict) -> list[float]:
    steps = cfg["alpha_steps"]
    if steps < 1:
        raise ConfigError("alpha_steps must be >= 1")
    if steps == 1:
        return [cfg["alpha_min"]]
    return list(np.linspace(cfg["alpha_min"], cfg["alpha_max"], steps))


# ---------------------------------------------------------------------------
# experiments

def run_bell_stats(cfg: dict, seed: int) -> tuple[list[str], list[list], int]:
    if cfg["alpha_max"] > 6 or cfg["alpha_steps"] > 1000 or cfg["trials"] > 10_000_000:
        raise BudgetError("bell-stats budget: alpha <= 6, alpha_steps <= 1000, trials <= 1e7")
    columns = [
        "alpha", "p_correct_i", "p_correct_ii", "p_correct_iii", "p_correct_iv",
        "p_fail_teleport", "completeness_error",
    ]
    if cfg["trials"] > 0:
        columns += ["freq_identity", "freq_z", "freq_fail"]
    rows = []
    status = EXIT_OK
    for index, alpha in enumerate(_alpha_grid(cfg)):
        row = [alpha]
        worst_completeness = 0.0
        for kind, name in zip(("i", "ii", "iii", "iv"), ("I", "II", "III", "IV")):
            state = states.bell_cat(alpha, kind)
            recs = measure.bell_outcomes(state, 0, 1)
            total = sum(r.probability for r in recs.values())
            worst_completeness = max(worst_completeness, abs(total - 1.0))
            row.append(recs[name].probability)
        plus = gates.encode(1.0, 1.0, gates.QubitEncoding(alpha))
        joint = optics.tensor(plus, optics.bell_resource(alpha))
        fail = measure.bell_outcomes(joint, 0, 1)["FAIL"].probability
        row += [fail, worst_completeness]
        if worst_completeness > 1e-10:
            status = EXIT_PROPERTY
        if cfg["trials"] > 0:
            rng = np.random.default_rng(seed ^ index)
            counts = {"identity": 0, "z": 0, "fail": 0}
            for _ in range(cfg["trials"]):
                out = gates.teleport(plus, gates.QubitEncoding(alpha), rng=rng)
                if not out.success:
                    counts["fail"] += 1
                elif out.applied == "Z":
                    counts["z"] += 1
                else:
                    counts["identity"] += 1
            row += [
                counts["identity"] / cfg["trials"],
                counts["z"] / cfg["trials"],
                counts["fail"] / cfg["trials"],
            ]
        rows.append(row)
    return columns, rows, status


def run_gate_check(cfg: dict, seed: int) -> tuple[list[str], list[list], int]:
    if cfg["alpha_max"] > 6 or cfg["alpha_steps"] > 1000:
        raise BudgetError("gate-check budget: alpha <= 6, alpha_steps <= 1000")
    columns = [
        "alpha", "theta", "rz_phase", "rz_phase_err",
        "zz_step_phase_err", "rx_fidelity", "x_fidelity",
    ]
    rows = []
    status = EXIT_OK
    mu, nu = 0.6 + 0.2j, 0.7 - 0.3j
    for alpha in _alpha_grid(cfg):
        enc = gates.QubitEncoding(alpha)
        theta = cfg["theta_alpha2"] / alpha**2
        psi = gates.encode(mu, nu, enc)
        # Rz decoded relative phase
        out = gates.gate_rz(psi, enc, theta)
        m2, n2, _ = gates.decode(out.state, enc)
        rz_phase = float(np.angle((n2 / m2) / (nu / mu)))
        rz_err = abs(rz_phase - 4 * theta * alpha**2)
        # entangling step phase on (|--> + |-+>)/norm
        enc_b = gates.QubitEncoding(alpha, mode=1)
        two = optics.tensor(gates.encode(1, 1, enc), gates.encode(1, 1, enc))
        zz = gates.entangling_gate(two, enc, enc_b, theta)
        x4, _ = gates.decode_two(zz.state, enc, enc_b)
        phases = np.angle(x4 / x4[0])
        expected = np.array([0.0, -2 * theta * alpha**2, -2 * theta * alpha**2, 0.0])
        zz_err = float(np.max(np.abs(phases - expected)))
        # Rx(pi/2) fidelity against its 2x2 target
        phi = math.pi / 4
        target = np.array(
            [[np.exp(1j * phi), np.exp(-1j * phi)], [np.exp(-1j * phi), np.exp(1j * phi)]]
        ) / math.sqrt(2)
        rx = gates.gate_rx(psi, enc)
        mr, nr, _ = gates.decode(rx.state, enc)
        v = np.array([mr, nr])
        v = v / np.linalg.norm(v)
        t = target @ np.array([mu, nu])
        t = t / np.linalg.norm(t)
        rx_fid = float(abs(np.vdot(t, v)) ** 2)
        # X gate round trip
        xx = gates.gate_x(gates.gate_x(psi, enc), enc)
        x_fid = states.fidelity(xx, psi)
        if rz_err > 1e-6 or zz_err > 1e-6 or rx_fid < 1 - 10 * math.exp(-2 * alpha**2):
            status = EXIT_PROPERTY
        rows.append([alpha, theta, rz_phase, rz_err, zz_err, rx_fid, x_fid])
    return columns, rows, status


def run_weak_force(cfg: dict, seed: int) -> tuple[list[str], list[list], int]:
    if cfg["trials"] > 10_000_000 or cfg["batches"] > 100_000 or cfg["n_max"] > 64:
        raise BudgetError("weak-force budget: trials <= 1e7, batches <= 1e5, n <= 64")
    columns = [
        "alpha", "n_modes", "n_tot", "qfi", "epsilon_min", "epsilon", "snr",
        "trials", "estimate_mean", "estimate_var", "crb_var", "saturation",
    ]
    rows = []
    n_values = [n for n in range(1, cfg["n_max"] + 1)] if cfg["sweep_n"] else [cfg["n"]]
    for index, n in enumerate(n_values):
        alpha = cfg["alpha"]
        eps = cfg["epsilon"]
        if eps < 0:  # mid-fringe operating point
            eps = math.pi / (4 * math.sqrt(n) * alpha)
        if cfg["trials"] > 0:
            rng = np.random.default_rng(seed ^ index)
            rep = metrology.weak_force_experiment(
                alpha, n, eps, cfg["trials"], rng, cfg["batches"]
            )
        else:
            bound = metrology.sensitivity_bound(alpha, n)
            rep = bound
        rows.append([
            alpha, n, rep.n_tot, rep.qfi, rep.epsilon_min, eps,
            metrology.classical_snr(alpha, eps), cfg["trials"],
            rep.estimate_mean, rep.estimate_var, rep.crb_var, rep.saturation,
        ])
    return columns, rows, EXIT_OK


def run_ruler(cfg: dict, seed: int) -> tuple[list[str], list[list], int]:
    if cfg["points"] > 200_001 or cfg["alpha"] > 16:
        raise BudgetError("ruler budget: points <= 200001, alpha <= 16")
    scan = metrology.quantum_ruler(cfg["alpha"], cfg["wavelength"], points=cfg["points"])
    columns = ["theta", "length_m", "probability", "spacing_theta", "spacing_length_m"]
    rows = [
        [float(t), float(l), float(p), scan.spacing_theta, scan.spacing_length]
        for t, l, p in zip(scan.theta, scan.length, scan.probability)
    ]
    return columns, rows, EXIT_OK


def run_ramsey(cfg: dict, seed: int) -> tuple[list[str], list[list], int]:
    if cfg["n_max"] > 64:
        raise BudgetError("ramsey budget: n <= 64")
    columns = [
        "n", "theta", "p_product", "p_entangled",
        "fisher_product", "fisher_entangled", "fisher_ratio",
    ]
    rows = []
    status = EXIT_OK
    theta = cfg["theta"]
    for n in range(1, cfg["n_max"] + 1):
        fp = metrology.ramsey_fisher(theta, n, entangled=False)
        fe = metrology.ramsey_fisher(theta, n, entangled=True)
        ratio = fe / fp
        if abs(ratio - n) > 1e-6 * n:
            status = EXIT_PROPERTY
        rows.append([
            n, theta,
            metrology.ramsey_probability(theta, n, False),
            metrology.ramsey_probability(theta, n, True),
            fp, fe, ratio,
        ])
    return columns, rows, status


def run_oracle_audit(cfg: dict, seed: int) -> tuple[list[str], list[list], int]:
    if cfg["alpha_max"] > 4 or cfg["cases"] > 1000:
        raise BudgetError("oracle-audit budget: alpha_max <= 4, cases <= 1000")
    rows_out = audit.run_audit(
        seed, cases_per_check=cfg["cases"], alpha_max=cfg["alpha_max"]
    )
    columns = ["check", "cases", "max_error", "tolerance", "passed"]
    status = EXIT_OK if all(r.passed for r in rows_out) else EXIT_PROPERTY
    rows = [[r.name, r.cases, r.max_error, r.tolerance, r.passed] for r in rows_out]
    return columns, rows, status


# ---------------------------------------------------------------------------
# wiring

_EXPERIMENTS = {
    "bell-stats": (
        run_bell_stats,
        {
            "alpha_min": (float, 1.0),
            "alpha_max": (float, 3.0),
            "alpha_steps": (int, 5),
            "trials": (int, 0),
        },
    ),
    "gate-check": (
        run_gate_check,
        {
            "alpha_min": (float, 1.5),
            "alpha_max": (float, 3.0),
            "alpha_steps": (int, 4),
            "theta_alpha2": (float, 0.01),
        },
    ),
    "weak-force": (
        run_weak_force,
        {
            "alpha": (float, 2.0),
            "n": (int, 1),
            "n_max": (int, 4),
            "sweep_n": (bool, False),
            "epsilon": (float, -1.0),
            "trials": (int, 10_000),
            "batches": (int, 2000),
        },
    ),
    "ruler": (
        run_ruler,
        {
            "alpha": (float, 10.0),
            "wavelength": (float, 10e-6),
            "points": (int, 2001),
        },
    ),
    "ramsey": (
        run_ramsey,
        {
            "n_max": (int, 10),
            "theta": (float, 0.3),
        },
    ),
    "oracle-audit": (
        run_oracle_audit,
        {
            "alpha_max": (float, 3.0),
            "cases": (int, 20),
        },
    ),
}

_FLAG_ALIASES = {"wavelength": ["--lambda"], "epsilon": ["--eps"]}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="catsim",
        description="Seeded coherent-state quantum computing and metrology experiments.",
    )
    parser.add_argument("--version", action="version", version=f"catsim {__version__}")
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name, (_, schema) in _EXPERIMENTS.items():
        p = sub.add_parser(name)
        p.add_argument("--config", help="key=value config file")
        p.add_argument("--seed", type=int, default=None, help="RNG seed (default 0)")
        p.add_argument("--output", help="output file (default stdout)")
        for key, (kind, default) in schema.items():
            flags = [f"--{key.replace('_', '-')}"] + _FLAG_ALIASES.get(key, [])
            if kind is bool:
                p.add_argument(*flags, dest=key, default=None,
                               action=argparse.BooleanOptionalAction)
            else:
                p.add_argument(*flags, dest=key, type=kind, default=None,
                               help=f"default {default}")
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    run, schema = _EXPERIMENTS[args.experiment]
    try:
        cfg = resolve_config(args, schema)
        seed = args.seed if args.seed is not None else 0
        columns, rows, status = run(cfg, seed)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BudgetError as exc:
        print(f"budget error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            emit(fh, args.experiment, seed, cfg, columns, rows)
    else:
        emit(sys.stdout, args.experiment, seed, cfg, columns, rows)
    return status


if __name__ == "__main__":
    sys.exit(main())
