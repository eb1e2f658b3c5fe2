"""Preparation plans and simulated bulk-ensemble experiment runs.

A plan is either a fixed list of experiments (preparation circuit,
optional readout circuit, classical readout sign, weight) or a sampler
that draws such a list per repetition.  Weights are positive and sum to
1; a plan-level ``scale`` turns the weighted mean into the reported
value (the paired flip&swap protocol reports the *sum* of its two
measurements, i.e. scale 2).  Running a plan prepares the input state,
applies the computation and readout circuits, and measures the z spin
of qubit 0 with additive Gaussian noise.

Random plans are replayable: repetition r uses a generator spawned from
the master seed and r, so a fixed master seed reproduces every sampled
circuit and noise draw bit-exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import circuits as qc
from . import gf2
from .field import GF2Field
from .groups import (CyclicElement, element_to_circuit, sample_conditional_normalizer,
                     sample_diagonal, sample_linear_perm)
from .qcore import N_QUBITS_MAX, MeasurementModel, measure_sigma_z1, n_qubits_of


@dataclass(frozen=True)
class Experiment:
    prep: qc.Circuit
    readout: qc.Circuit | None = None
    sign: float = 1.0
    weight: float = 1.0


@dataclass(frozen=True)
class PreparationPlan:
    protocol: str
    n_compute: int
    n_total: int
    experiments: tuple[Experiment, ...] | None = None
    sampler: Callable[[np.random.Generator], tuple[Experiment, ...]] | None = None
    k_steps: int | None = None
    scale: float = 1.0

    def __post_init__(self):
        if (self.experiments is None) == (self.sampler is None):
            raise ValueError("exactly one of experiments/sampler must be set")
        if self.experiments is not None:
            weights = [e.weight for e in self.experiments]
            if any(w <= 0 for w in weights) or abs(sum(weights) - 1.0) > 1e-12:
                raise ValueError("weights must be positive and sum to 1")

    @property
    def deterministic(self) -> bool:
        return self.experiments is not None


@dataclass(frozen=True)
class RunResult:
    per_experiment_values: np.ndarray  # shape (repetitions, experiments)
    rep_values: np.ndarray  # combined value per repetition
    weighted_mean: float
    empirical_variance: float
    n_runs: int
    seed: int

    def csv_row(self, protocol: str, n: int) -> str:
        return (f"{protocol},{n},{self.seed},{self.weighted_mean:.17g},"
                f"{self.empirical_variance:.17g},{self.n_runs}")


def exhaustive_plan(n: int) -> PreparationPlan:
    """All 2^n - 1 cyclic permutations of the non-ground states.

    Experiment k prepares with multiplication by g^k in GF(2^n)
    (k = 0 is the identity), at equal weights.  For any diagonal input
    the weighted average of prepared states is exactly the effective
    pure target.
    """
    if not 2 <= n <= N_QUBITS_MAX:
        raise ValueError(f"n must be in [2, {N_QUBITS_MAX}]")
    fld = GF2Field(n)
    count = fld.order - 1
    experiments = []
    for k in range(count):
        circ = (qc.Circuit(n) if k == 0
                else element_to_circuit(CyclicElement(k, fld)))
        experiments.append(Experiment(circ, weight=1.0 / count))
    return PreparationPlan("exhaustive", n, n, tuple(experiments))


def flip_swap_circuit(n: int) -> qc.Circuit:
    """Invert every qubit, then swap the all-zero and all-one states.

    The net permutation fixes |0...0> and |1...1> and maps every other
    basis state to its bitwise complement.  Linear cost: n NOTs,
    2(n-1) CNOTs and one generalized Toffoli.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    gates: list[qc.Gate] = [qc.not_(q) for q in range(n)]
    fan = [qc.cnot(0, t) for t in range(1, n)]
    gates += fan
    gates.append(qc.gen_toffoli(tuple((t, 0) for t in range(1, n)), 0))
    gates += fan[::-1]
    return qc.Circuit(n, tuple(gates))


def flip_swap_plan(n: int) -> PreparationPlan:
    """Two experiments: no preparation, and flip&swap."""
    fs = flip_swap_circuit(n)
    return PreparationPlan("flip_swap", n, n, (
        Experiment(qc.Circuit(n), weight=0.5),
        Experiment(fs, weight=0.5),
    ))


def map_ones_to_circuit(n: int, b: int) -> qc.Circuit:
    """Linear-permutation circuit sending |1...1> to |b>, fixing |0...0>.

    Uses one CNOT per zero bit of b (n - weight(b) in total), fanned out
    from one fixed set bit of b.
    """
    if not 1 <= b < (1 << n):
        raise ValueError("b must be a nonzero basis index")
    bits = gf2.int_to_bits(b, n)
    pivot = int(np.nonzero(bits)[0][0])
    gates = tuple(qc.cnot(pivot, i) for i in range(n) if not bits[i])
    return qc.Circuit(n, gates)


def randomized_flip_swap_plan(n: int, rng: np.random.Generator | None = None
                              ) -> PreparationPlan:
    """Flip&swap followed by a random relabeling of the all-one state.

    Per repetition a non-ground target |b> is drawn uniformly and the
    linear map sending |1...1> to |b> is appended to both branches.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    fs = flip_swap_circuit(n)

    def sampler(rep_rng: np.random.Generator) -> tuple[Experiment, ...]:
        b = int(rep_rng.integers(1, 1 << n))
        relabel = map_ones_to_circuit(n, b)
        return (
            Experiment(relabel, weight=0.5),
            Experiment(fs.then(relabel), weight=0.5),
        )

    return PreparationPlan("randomized_flip_swap", n, n, sampler=sampler)


def labeled_flip_swap_plan(n: int) -> PreparationPlan:
    """Flip&swap on n+1 qubits with the extra qubit used as a label.

    Both experiments end with controlled flips of the computational
    qubits on the label being |1>, and the readout flips the answer spin
    conditionally on the label, so the deficiency sector contributes
    with reversed sign to the measured value.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    m = n + 1
    label = n
    cond_flip = qc.Circuit(m, tuple(qc.cnot(label, q) for q in range(n)))
    readout = qc.Circuit(m, (qc.cnot(label, 0),))
    fs = flip_swap_circuit(m)
    return PreparationPlan("labeled_flip_swap", n, m, (
        Experiment(cond_flip, readout=readout, weight=0.5),
        Experiment(fs.then(cond_flip), readout=readout, weight=0.5),
    ))


def choose_k(n: int) -> int:
    """Smallest k with (e^(1/(N+2)) / 2)^k <= 1 / (2 (N + 2))."""
    if n < 2:
        raise ValueError("n must be >= 2")
    N = 1 << n
    lam = math.exp(1.0 / (N + 2)) / 2.0
    threshold = 1.0 / (2.0 * (N + 2))
    k = 0
    value = 1.0
    while value > threshold:
        value *= lam
        k += 1
    return k


def randomization_pipeline(n: int, k: int, rng: np.random.Generator,
                           include_diagonal: bool = True) -> qc.Circuit:
    """One sampled preparation: diagonal phases (optional), a linear
    permutation, then k rounds of conditional-normalizer + linear
    permutation, each element drawn independently and uniformly."""
    gates: list[qc.Gate] = []
    if include_diagonal:
        gates += element_to_circuit(sample_diagonal(n, rng)).gates
    gates += element_to_circuit(sample_linear_perm(n, rng)).gates
    for _ in range(k):
        gates += element_to_circuit(sample_conditional_normalizer(n, rng)).gates
        gates += element_to_circuit(sample_linear_perm(n, rng)).gates
    return qc.Circuit(n, tuple(gates))


def group_randomization_plan(n: int, k: int,
                             rng: np.random.Generator | None = None
                             ) -> PreparationPlan:
    if n < 2 or k < 0:
        raise ValueError("need n >= 2 and k >= 0")

    def sampler(rep_rng: np.random.Generator) -> tuple[Experiment, ...]:
        return (Experiment(randomization_pipeline(n, k, rep_rng), weight=1.0),)

    return PreparationPlan("group_randomization", n, n, sampler=sampler,
                           k_steps=k)


def fully_randomized_flip_swap_plan(n: int, k: int,
                                    rng: np.random.Generator | None = None
                                    ) -> PreparationPlan:
    """Flip&swap pair sharing one random conditional-normalizer sequence.

    The same sampled sequence is appended to the bare and the
    flip&swapped branch and the two measurements are added (the plan
    reports weighted mean times 2), which matches a single randomized
    experiment on the symmetrized input with doubled signal and noise
    variance 2 s^2.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    fs = flip_swap_circuit(n)

    def sampler(rep_rng: np.random.Generator) -> tuple[Experiment, ...]:
        seq = randomization_pipeline(n, k, rep_rng, include_diagonal=False)
        return (
            Experiment(seq, weight=0.5),
            Experiment(fs.then(seq), weight=0.5),
        )

    return PreparationPlan("fully_randomized_flip_swap", n, n, sampler=sampler,
                           k_steps=k, scale=2.0)


def entanglement_prepare(n: int) -> qc.Circuit:
    """Entangling preparation on 2n qubits.

    A y rotation on each ancilla qubit (a phase variant of the basis
    transform, valid for diagonal inputs) followed by ancilla-controlled
    multiplications of the computational register by successive squares
    of the field generator.
    """
    if not 2 <= n <= N_QUBITS_MAX // 2:
        raise ValueError(f"n must be in [2, {N_QUBITS_MAX // 2}]")
    fld = GF2Field(n)
    g = fld.generator()
    gates: list[qc.Gate] = [qc.rot_y90(n + j) for j in range(n)]
    for i in range(n):
        mult = fld.pow(g, 1 << i)
        ops = gf2.gaussian_decompose(fld.mult_matrix(mult))
        inner = qc.Circuit(n, tuple(qc.cnot(s, t) for s, t in ops))
        control = 2 * n - 1 - i
        gates.append(qc.conditioned(control, 1, inner, tuple(range(n))))
    return qc.Circuit(2 * n, tuple(gates))


def prepared_average(plan: PreparationPlan, rho0: np.ndarray) -> np.ndarray:
    """Exact weighted average of prepared states (deterministic plans)."""
    if not plan.deterministic:
        raise ValueError("plan has no fixed experiment list")
    out = np.zeros_like(rho0, dtype=complex)
    for e in plan.experiments:
        out += e.weight * qc.apply_circuit(rho0, e.prep)
    return out


def _map_repetitions(func, repetitions: int, threads: int) -> list:
    if threads <= 1 or repetitions == 1:
        return [func(r) for r in range(repetitions)]
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, range(repetitions)))


def _experiment_value(rho0: np.ndarray, experiment: Experiment,
                      computation: qc.Circuit | None,
                      model: MeasurementModel,
                      rng: np.random.Generator | None) -> float:
    rho = qc.apply_circuit(rho0, experiment.prep)
    if computation is not None:
        rho = qc.apply_circuit(rho, computation)
    if experiment.readout is not None:
        rho = qc.apply_circuit(rho, experiment.readout)
    return experiment.sign * measure_sigma_z1(rho, model, rng)


def run_protocol(plan: PreparationPlan, rho0: np.ndarray,
                 computation: qc.Circuit | None, model: MeasurementModel,
                 repetitions: int, rng: int | np.random.Generator,
                 threads: int = 1) -> RunResult:
    """Simulate a plan: prepare, compute, read out, measure with noise.

    ``rng`` may be an integer master seed (recommended: replayable) or a
    Generator.  Repetition r draws from a child generator spawned from
    (master seed, r); deterministic plans evaluate their noiseless
    values once and add per-repetition noise.  With ``threads`` > 1
    repetitions run on a thread pool; results do not depend on the
    scheduling because every repetition owns its generator.
    """
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    n = n_qubits_of(rho0)
    if n != plan.n_total:
        raise ValueError(
            f"input state has {n} qubits, plan needs {plan.n_total}")
    if computation is not None:
        if computation.n_qubits == plan.n_compute:
            computation = qc.on_register(computation, plan.n_total)
        elif computation.n_qubits != plan.n_total:
            raise ValueError("computation circuit does not fit the register")
    if isinstance(rng, (int, np.integer)):
        seed = int(rng)
        seq = np.random.SeedSequence(seed)
    else:
        seq = rng.bit_generator.seed_seq
        seed = seq.entropy if isinstance(seq.entropy, int) else -1
    children = seq.spawn(repetitions)

    if plan.deterministic:
        noiseless = np.array([
            _experiment_value(rho0, e, computation, MeasurementModel(0.0), None)
            for e in plan.experiments])
        weights = np.array([e.weight for e in plan.experiments])

        def one_rep(r: int) -> list[float]:
            values = noiseless
            if model.noise_std > 0:
                rep_rng = np.random.default_rng(children[r])
                values = values + rep_rng.normal(0.0, model.noise_std,
                                                 size=len(values))
            return list(values)

        rows = _map_repetitions(one_rep, repetitions, threads)
        rep_values = np.array([plan.scale * float(weights @ np.array(v))
                               for v in rows])
    else:

        def one_rep(r: int) -> list[float]:
            rep_rng = np.random.default_rng(children[r])
            experiments = plan.sampler(rep_rng)
            values = [
                _experiment_value(rho0, e, computation, model,
                                  rep_rng if model.noise_std > 0 else None)
                for e in experiments]
            weights = np.array([e.weight for e in experiments])
            return [plan.scale * float(weights @ np.array(values))] + values

        packed = _map_repetitions(one_rep, repetitions, threads)
        rep_values = np.array([row[0] for row in packed])
        rows = [row[1:] for row in packed]

    per_experiment = np.array(rows)
    mean = float(rep_values.mean())
    variance = float(rep_values.var(ddof=1)) if repetitions > 1 else 0.0
    return RunResult(per_experiment, rep_values, mean, variance,
                     repetitions, seed)


def plan_manifest(plan: PreparationPlan, seed: int | None = None) -> dict:
    """JSON-serializable description; deterministic plans carry full
    gate lists, random plans carry the protocol id and seed."""
    manifest: dict = {
        "protocol": plan.protocol,
        "n_compute": plan.n_compute,
        "n_total": plan.n_total,
        "scale": plan.scale,
    }
    if plan.k_steps is not None:
        manifest["k_steps"] = plan.k_steps
    if seed is not None:
        manifest["seed"] = seed
    if plan.deterministic:
        manifest["experiments"] = [
            {"prep": qc.circuit_to_dict(e.prep),
             "readout": None if e.readout is None else qc.circuit_to_dict(e.readout),
             "sign": e.sign, "weight": e.weight}
            for e in plan.experiments]
    else:
        manifest["experiments"] = "sampled per repetition"
    return manifest
