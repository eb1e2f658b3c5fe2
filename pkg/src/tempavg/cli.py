"""Command-line front end.

Subcommands: ``simulate`` (run a protocol from a JSON config and emit
CSV), ``snr-curves`` (tabulate the closed-form SNR lower bounds),
``sample-group`` (draw group elements as JSON records), ``verify`` (run
a named check suite) and ``example-nmr`` (the two-spin worked example).

Exit codes: 0 ok, 2 config error, 3 dimension error, 4 verification
failure.  CSV uses '.' decimals, 17 significant digits and LF line
endings so outputs are byte-identical across runs.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import analytics, groups, protocols, qcore, verify
from . import circuits as qc

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DIMENSION = 3
EXIT_VERIFY = 4

PROTOCOLS = ("exhaustive", "flip_swap", "randomized_flip_swap",
             "labeled_flip_swap", "fully_randomized_flip_swap",
             "group_randomization", "entanglement")

CURVE_METHODS = ("exhaustive", "randomized_flip_swap", "labeled_flip_swap",
                 "two_transitive", "conditional_normalizer")

_CONFIG_KEYS = {
    "protocol": str,
    "n": int,
    "deltas": (int, float, list),
    "noise_std": (int, float),
    "repetitions": int,
    "seed": int,
    "k_steps": int,
    "computation": str,
    "thermal_mode": str,
    "delta_convention": str,
}
_REQUIRED_KEYS = ("protocol", "n", "deltas", "noise_std", "repetitions", "seed")


class ConfigError(ValueError):
    pass


class DimensionError(ValueError):
    pass


def load_config(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(raw) - set(_CONFIG_KEYS)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    for key in _REQUIRED_KEYS:
        if key not in raw:
            raise ConfigError(f"missing config key {key!r}")
    for key, value in raw.items():
        if not isinstance(value, _CONFIG_KEYS[key]) or isinstance(value, bool):
            raise ConfigError(f"config key {key!r} has the wrong type")
    if raw["protocol"] not in PROTOCOLS:
        raise ConfigError(f"unknown protocol {raw['protocol']!r}")
    if raw["n"] < 2:
        raise ConfigError("n must be >= 2")
    if raw["noise_std"] < 0:
        raise ConfigError("noise_std must be >= 0")
    if raw["repetitions"] < 1:
        raise ConfigError("repetitions must be >= 1")
    mode = raw.get("thermal_mode", "first-order")
    if mode not in ("first-order", "exact-product"):
        raise ConfigError(f"unknown thermal_mode {mode!r}")
    convention = raw.get("delta_convention", "polarization")
    if convention not in ("polarization", "deviation"):
        raise ConfigError(f"unknown delta_convention {convention!r}")
    if convention == "deviation" and mode != "first-order":
        raise ConfigError("delta_convention 'deviation' requires first-order mode")
    return raw


def build_plan(config: dict) -> protocols.PreparationPlan:
    name = config["protocol"]
    n = config["n"]
    k = config.get("k_steps")
    if name == "exhaustive":
        return protocols.exhaustive_plan(n)
    if name == "flip_swap":
        return protocols.flip_swap_plan(n)
    if name == "randomized_flip_swap":
        return protocols.randomized_flip_swap_plan(n)
    if name == "labeled_flip_swap":
        return protocols.labeled_flip_swap_plan(n)
    if name == "fully_randomized_flip_swap":
        return protocols.fully_randomized_flip_swap_plan(
            n, protocols.choose_k(n) if k is None else k)
    if name == "group_randomization":
        return protocols.group_randomization_plan(
            n, protocols.choose_k(n) if k is None else k)
    if name == "entanglement":
        prep = protocols.entanglement_prepare(n)
        return protocols.PreparationPlan(
            "entanglement", n, 2 * n,
            (protocols.Experiment(prep, weight=1.0),))
    raise ConfigError(f"unknown protocol {name!r}")


def build_input_state(config: dict, n_total: int) -> np.ndarray:
    deltas = config["deltas"]
    if isinstance(deltas, (int, float)):
        deltas = [float(deltas)] * n_total
    deltas = [float(d) for d in deltas]
    if len(deltas) != n_total:
        raise ConfigError(
            f"deltas must be a scalar or a list of length {n_total}")
    if config.get("delta_convention", "polarization") == "deviation":
        # Deviation amplitudes: diagonal entries 1/N + sum_i (-1)^(b_i) d_i,
        # i.e. first-order polarizations scaled by the dimension.
        deltas = [d * (1 << n_total) for d in deltas]
    spec = qcore.ThermalSpec(tuple(deltas),
                             config.get("thermal_mode", "first-order"))
    return qcore.thermal_state(spec)


def load_computation(config: dict, plan: protocols.PreparationPlan
                     ) -> qc.Circuit | None:
    path = config.get("computation")
    if path is None:
        return None
    try:
        with open(path, "r", encoding="utf-8") as fh:
            circuit = qc.circuit_from_json(fh.read())
    except (OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
        raise ConfigError(f"cannot read computation {path}: {exc}") from exc
    if circuit.n_qubits not in (plan.n_compute, plan.n_total):
        raise DimensionError(
            f"computation acts on {circuit.n_qubits} qubits, plan expects "
            f"{plan.n_compute} (or {plan.n_total} with ancillas)")
    return circuit


def _open_out(path: str | None):
    if path is None:
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline="\n"), True


def cmd_simulate(args) -> int:
    config = load_config(args.config)
    if args.seed is not None:
        config["seed"] = args.seed
    plan = build_plan(config)
    rho0 = build_input_state(config, plan.n_total)
    computation = load_computation(config, plan)
    model = qcore.MeasurementModel(float(config["noise_std"]))
    result = protocols.run_protocol(plan, rho0, computation, model,
                                    config["repetitions"], config["seed"],
                                    threads=args.threads)
    out, close = _open_out(args.out)
    try:
        out.write("record,repetition,experiment,value,weighted_mean,"
                  "empirical_variance,n_runs\n")
        reps, n_exp = result.per_experiment_values.shape
        for r in range(reps):
            for e in range(n_exp):
                value = result.per_experiment_values[r, e]
                out.write(f"measurement,{r},{e},{value:.17g},,,\n")
        out.write(f"summary,,,,{result.weighted_mean:.17g},"
                  f"{result.empirical_variance:.17g},{result.n_runs}\n")
    finally:
        if close:
            out.close()
    return EXIT_OK


def cmd_snr_curves(args) -> int:
    if args.methods.strip() == "all":
        methods = list(CURVE_METHODS)
    else:
        methods = [m.strip() for m in args.methods.split(",") if m.strip()]
        for m in methods:
            if m not in analytics.SNR_METHODS:
                raise ConfigError(f"unknown method {m!r}")
    if args.n_min < 2 or args.n_max < args.n_min:
        raise ConfigError("need 2 <= n-min <= n-max")
    out, close = _open_out(args.out)
    try:
        out.write("# SNR lower bounds per run: one experiment for group "
                  "randomization, two for the flip&swap pairs, 2^n-1 for "
                  "exhaustive averaging\n")
        out.write("method,n,snr1,x,snr_bound\n")
        for method in methods:
            for n in range(args.n_min, args.n_max + 1):
                value = analytics.snr_bound(
                    method, analytics.SNRInputs(n, args.snr1, args.x))
                out.write(f"{method},{n},{args.snr1:.17g},{args.x:.17g},"
                          f"{value:.17g}\n")
    finally:
        if close:
            out.close()
    return EXIT_OK


def cmd_sample_group(args) -> int:
    samplers = {
        "diagonal": groups.sample_diagonal,
        "linear": groups.sample_linear_perm,
        "cyclic": groups.sample_cyclic,
        "normalizer": groups.sample_normalizer,
        "conditional_normalizer": groups.sample_conditional_normalizer,
    }
    if args.group not in samplers:
        raise ConfigError(f"unknown group {args.group!r}")
    if args.count < 1 or args.n < 1:
        raise ConfigError("need count >= 1 and n >= 1")
    rng = np.random.default_rng(args.seed)
    out, close = _open_out(args.out)
    try:
        for _ in range(args.count):
            element = samplers[args.group](args.n, rng)
            record = groups.element_to_json_dict(element)
            record["seed"] = args.seed
            out.write(json.dumps(record) + "\n")
    finally:
        if close:
            out.close()
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.suite not in verify.SUITES:
        raise ConfigError(f"unknown suite {args.suite!r}; choose from "
                          f"{sorted(verify.SUITES)}")
    checks = verify.run_suite(args.suite, seed=args.seed or 20240801)
    failed = 0
    for name, passed, detail in checks:
        status = "PASS" if passed else "FAIL"
        print(f"[{status}] {name}: {detail}")
        failed += 0 if passed else 1
    if failed:
        print(f"{failed} of {len(checks)} checks failed", file=sys.stderr)
        return EXIT_VERIFY
    print(f"all {len(checks)} checks passed")
    return EXIT_OK


def cmd_example_nmr(args) -> int:
    """Two-spin worked example: exhaustive averaging of a thermal-like
    diagonal input with deviation amplitudes a = 0.8e-5, b = 0.2e-5."""
    a, b = 0.8e-5, 0.2e-5
    dev = np.array([a + b, a - b, -a + b, -a - b])
    rho = np.diag((0.25 + dev).astype(complex))
    plan = protocols.exhaustive_plan(2)
    print("two-spin input diagonal deviations (from I/4):")
    print("  " + " ".join(f"{d:+.3e}" for d in dev))
    for idx, e in enumerate(plan.experiments):
        prepared = qc.apply_circuit(rho, e.prep)
        devs = np.real(np.diag(prepared)) - 0.25
        print(f"experiment {idx}: prepared deviations "
              + " ".join(f"{d:+.3e}" for d in devs))
    avg = protocols.prepared_average(plan, rho)
    avg_dev = np.real(np.diag(avg)) - 0.25
    print("averaged deviations: " + " ".join(f"{d:+.3e}" for d in avg_dev))
    result = protocols.run_protocol(plan, rho, None,
                                    qcore.MeasurementModel(0.0), 1, 0)
    print(f"averaged signal = {result.weighted_mean:.17g}")
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tempavg",
        description="Temporal-averaging effective-pure-state simulator")
    parser.add_argument("--threads", type=int,
                        default=int(os.environ.get("TEMPAVG_THREADS", "1")),
                        help="worker threads for repetitions (default 1, "
                             "or TEMPAVG_THREADS)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run a protocol from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int, default=None,
                   help="override the config seed")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("snr-curves", help="tabulate SNR lower bounds")
    p.add_argument("--methods", default="all")
    p.add_argument("--n-min", type=int, default=2)
    p.add_argument("--n-max", type=int, default=10)
    p.add_argument("--snr1", type=float, default=1e3)
    p.add_argument("--x", type=float, default=1.0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_snr_curves)

    p = sub.add_parser("sample-group", help="draw group elements as JSON")
    p.add_argument("--group", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_sample_group)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("--suite", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("example-nmr", help="two-spin worked example")
    p.set_defaults(func=cmd_example_nmr)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    if args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DimensionError as exc:
        print(f"dimension error: {exc}", file=sys.stderr)
        return EXIT_DIMENSION
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
