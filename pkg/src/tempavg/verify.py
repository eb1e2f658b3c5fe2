"""Self-contained verification suites driven by the command line.

Each suite runs a set of enumeration / Monte-Carlo checks and returns
(name, passed, detail) triples; the CLI prints one line per check and
exits nonzero if any fails.
"""

from __future__ import annotations

import numpy as np

from . import analytics, gf2, groups, protocols, qcore
from . import circuits as qc
from .field import GF2Field

CHI2_99_DF5 = 15.086272469388987  # 0.99 quantile of chi-squared with 5 dof


def _check(name: str, passed: bool, detail: str) -> tuple[str, bool, str]:
    return name, bool(passed), detail


def _random_diagonal_rho(n: int, rng: np.random.Generator) -> np.ndarray:
    w = rng.random(1 << n)
    return qcore.diagonal_density(w / w.sum())


def suite_symplectic(rng: np.random.Generator):
    checks = []
    for n, expected in ((1, 6), (2, 720)):
        count = sum(1 for _ in gf2.enumerate_symplectic(n))
        formula = gf2.symplectic_count(n)
        checks.append(_check(
            f"symplectic group order n={n}",
            count == expected == formula,
            f"enumerated={count} formula={formula} expected={expected}"))
    ok = True
    for n in (1, 2, 3):
        for _ in range(50):
            if not gf2.is_symplectic(gf2.random_symplectic(n, rng)):
                ok = False
    checks.append(_check("sampled matrices preserve the form", ok, "150 draws"))
    draws = 12000
    seen: dict[bytes, int] = {}
    for _ in range(draws):
        key = gf2.random_symplectic(1, rng).tobytes()
        seen[key] = seen.get(key, 0) + 1
    counts = np.array(list(seen.values()), dtype=float)
    stat = float(np.sum((counts - draws / 6) ** 2) / (draws / 6))
    checks.append(_check(
        "n=1 sampling uniformity (chi-squared, p>0.01)",
        len(seen) == 6 and stat < CHI2_99_DF5,
        f"support={len(seen)} statistic={stat:.3f} critical={CHI2_99_DF5:.3f}"))
    return checks


def suite_groups(rng: np.random.Generator):
    checks = []
    for n in (1, 2):
        checks.append(_check(
            f"phase independence n={n}",
            groups.verify_phase_independence(n), "exhaustive over (x, B)"))
    fld = GF2Field(3)
    perms = [groups.CyclicElement(k, fld).permutation() for k in range(7)]
    distinct = len({p.tobytes() for p in perms})
    composed_ok = all(
        np.array_equal(perms[(k1 + k2) % 7], perms[k1][perms[k2]])
        for k1 in range(7) for k2 in range(7))
    checks.append(_check("cyclic group composition n=3",
                         distinct == 7 and composed_ok,
                         f"distinct={distinct} composition={composed_ok}"))
    n = 2
    targets = set()
    for el in groups.group_elements("linear", n):
        perm = el.permutation()
        for i in range(1, 4):
            for j in range(1, 4):
                if i != j:
                    targets.add((i, j, int(perm[i]), int(perm[j])))
    want = {(i, j, k, l) for i in range(1, 4) for j in range(1, 4)
            for k in range(1, 4) for l in range(1, 4) if i != j and k != l}
    checks.append(_check("linear maps act two-transitively n=2",
                         targets == want,
                         f"pairs covered={len(targets)}/{len(want)}"))
    ok = True
    for n in (1, 2):
        for _ in range(20):
            e = groups.sample_normalizer(n, rng)
            x, L = groups.conjugation_action(groups.element_to_circuit(e))
            if not (np.array_equal(x, e.x) and np.array_equal(L, e.L)):
                ok = False
    checks.append(_check("normalizer synthesis round-trip", ok, "40 samples"))
    return checks


def suite_variances(rng: np.random.Generator):
    checks = []
    n = 2
    fld = GF2Field(n)
    sigma = qcore.sigma_z1_matrix(n)
    err_tt = err_cyc = 0.0
    for _ in range(5):
        rho = _random_diagonal_rho(n, rng)
        check = qcore.deviation_parts(rho).check
        brute_tt = _brute_force_variance(check, sigma, "linear", n)
        brute_cy = _brute_force_variance(check, sigma, "cyclic", n)
        err_tt = max(err_tt, abs(
            analytics.variance_exact_two_transitive(rho, sigma) - brute_tt))
        err_cyc = max(err_cyc, abs(
            analytics.variance_exact_cyclic(rho, sigma, fld) - brute_cy))
    checks.append(_check("two-transitive variance matches enumeration",
                         err_tt < 1e-12, f"max|diff|={err_tt:.2e}"))
    checks.append(_check("cyclic variance matches enumeration",
                         err_cyc < 1e-12, f"max|diff|={err_cyc:.2e}"))
    ok = True
    worst = 0.0
    for m in (2, 3):
        for _ in range(25):
            rho = _random_diagonal_rho(m, rng)
            exact = analytics.variance_exact_two_transitive(
                rho, qcore.sigma_z1_matrix(m))
            bound = analytics.variance_bound_two_transitive(rho)
            worst = max(worst, exact - bound)
            ok = ok and exact <= bound + 1e-12
    checks.append(_check("closed-form bound dominates exact variance",
                         ok, f"max(exact-bound)={worst:.2e}"))
    return checks


def _brute_force_variance(check: np.ndarray, sigma: np.ndarray, kind: str,
                          n: int) -> float:
    total = 0.0
    count = 0
    for d in groups.group_elements("diagonal", n):
        ud = groups.element_unitary(d)
        mid = ud @ check @ ud.conj().T
        for g in groups.group_elements(kind, n):
            ug = groups.element_unitary(g)
            m = ug @ mid @ ug.conj().T
            total += float(np.real(np.einsum("ij,ji->", m, sigma))) ** 2
            count += 1
    return total / count


def suite_protocols(rng: np.random.Generator):
    checks = []
    model = qcore.MeasurementModel(0.0)
    worst = 0.0
    for plan in (protocols.exhaustive_plan(2), protocols.exhaustive_plan(3),
                 protocols.flip_swap_plan(3),
                 protocols.labeled_flip_swap_plan(2)):
        rho = qcore.maximally_mixed(plan.n_total)
        res = protocols.run_protocol(plan, rho, None, model, 1, 7)
        worst = max(worst, abs(res.weighted_mean))
    checks.append(_check("uniform mixture gives zero signal",
                         worst < 1e-14, f"max|signal|={worst:.2e}"))
    err = 0.0
    for n in (2, 3):
        plan = protocols.exhaustive_plan(n)
        for _ in range(5):
            rho = _random_diagonal_rho(n, rng)
            avg = protocols.prepared_average(plan, rho)
            err = max(err, float(np.abs(
                avg - qcore.effective_pure_target(rho)).max()))
    checks.append(_check("exhaustive averaging hits the effective pure target",
                         err < 1e-12, f"max|diff|={err:.2e}"))
    n = 3
    deltas = (2e-4, 1e-4, 0.5e-4)
    rho = qcore.thermal_state(qcore.ThermalSpec(deltas))
    avg = protocols.prepared_average(protocols.flip_swap_plan(n), rho)
    dt = sum(deltas)
    want = np.eye(8, dtype=complex) / 8
    want[0, 0] += dt / 8
    want[7, 7] -= dt / 8
    err_fs = float(np.abs(avg - want).max())
    checks.append(_check("flip&swap average equals the symmetrized state",
                         err_fs < 1e-15, f"max|diff|={err_fs:.2e}"))
    n = 2
    delta = 1e-4
    plan = protocols.labeled_flip_swap_plan(n)
    rho = qcore.thermal_state(qcore.ThermalSpec((delta,) * (n + 1)))
    res = protocols.run_protocol(plan, rho, None, model, 1, 3)
    want_sig = (n + 1) * delta / 2**n
    err_lab = abs(res.weighted_mean - want_sig)
    checks.append(_check("labeled flip&swap noiseless signal",
                         err_lab < 1e-15,
                         f"measured={res.weighted_mean:.6e} want={want_sig:.6e}"))
    prep = protocols.entanglement_prepare(2)
    rho_in = qcore.basis_density(4, 2 * 4 + 1)  # |a=2>|b=1>
    out = qcore.partial_trace_last(qc.apply_circuit(rho_in, prep), 2)
    want_red = (np.eye(4, dtype=complex) - qcore.basis_density(2, 0)
                + qcore.basis_density(2, 2)) / 4
    err_ent = float(np.abs(out - want_red).max())
    checks.append(_check("entanglement method reduced state",
                         err_ent < 1e-10, f"max|diff|={err_ent:.2e}"))
    return checks


SUITES = {
    "symplectic": suite_symplectic,
    "groups": suite_groups,
    "variances": suite_variances,
    "protocols": suite_protocols,
}


def run_suite(name: str, seed: int = 20240801):
    if name not in SUITES:
        raise KeyError(name)
    rng = np.random.default_rng(seed)
    return SUITES[name](rng)
