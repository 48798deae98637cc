"""Acceptance criteria 1-11, one PASS/FAIL line each at the pinned tolerance and time limit.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines as they
happen; they are also collected into the terminal summary.
"""
import time

import numpy as np
import pytest
from conftest import ACCEPTANCE_LINES

from hyperam.activations import ActivationFn
from hyperam.algebra import cayley_dickson, check_re_ahn, complex_numbers, get_algebra, octonion, quaternion
from hyperam.cli import monotone
from hyperam.config import load_config
from hyperam.dynamics import build_graph, classify
from hyperam.imaging import Codec, GrayImage, decode, encode, recall_experiment, synthetic_images
from hyperam.rcnn import ExcitationFn, MemorySet, Network, NetworkConfig
from hyperam.verify import CHECKS, run_checks


def report(n, ok, elapsed, limit, detail):
    ok = bool(ok) and elapsed < limit
    line = f"[criterion {n}] {'PASS' if ok else 'FAIL'} ({elapsed:.2f} s, limit {limit:g} s) {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def dynamics(preset):
    cfg = load_config(preset)
    alg, tau, act = cfg.algebra(), cfg.involution(), cfg.activation()
    mem = cfg.memories(alg.dim)
    net_cfg = cfg.network(cfg.excitation(mem.N, act.codomain(alg.dim).max_self_form(alg, tau)))
    graph = build_graph(net_cfg, mem)
    return graph, classify(graph)


def energy_runs(preset, max_sweeps=None):
    cfg = load_config(preset)
    n, p = cfg.get_int("experiment", "N"), cfg.get_int("experiment", "P")
    runs, seed = cfg.get_int("experiment", "runs"), cfg.get_int("experiment", "seed")
    alg, tau, act = cfg.algebra(), cfg.involution(), cfg.activation()
    alphabet = act.codomain(alg.dim)
    ex = cfg.excitation(n, alphabet.max_self_form(alg, tau))
    out = {}
    for mode in cfg.update_modes():
        net_cfg = cfg.network(ex, mode)
        if max_sweeps is not None:
            assert net_cfg.max_sweeps == max_sweeps
        results = []
        for r in range(runs):
            rng = np.random.default_rng(seed + r)
            mem = MemorySet(alphabet.sample(rng, (p, n)))
            results.append(Network(net_cfg, mem).run(alphabet.sample(rng, (n,))))
        out[mode] = results
    return n, p, ex, out


@pytest.mark.parametrize("preset", ["example1", "example1_caption"])
def test_criterion_1(preset):
    t = time.perf_counter()
    graph, res = dynamics(preset)
    elapsed = time.perf_counter() - t
    mem = set(graph.memory_indices)
    ok = (
        len(graph) == 16
        and set(res.fixed_points) == mem
        and set(res.async_fixed_points) == mem
        and not res.spurious
        and not res.cycles
        and not res.async_cycles
    )
    report(1, ok, elapsed, 1, f"{preset}: fixed {sorted(k + 1 for k in res.fixed_points)}, "
           f"spurious {len(res.spurious)}, cycles {len(res.cycles)}+{len(res.async_cycles)}")


def test_criterion_2():
    t = time.perf_counter()
    graph, res = dynamics("example2")
    elapsed = time.perf_counter() - t
    ones = graph.index_of([[1, 0], [1, 0]])
    want = set(graph.memory_indices) | {ones}
    ok = set(res.fixed_points) == want and res.spurious == [ones] and set(res.async_fixed_points) == want
    report(2, ok, elapsed, 1, f"fixed {sorted(k + 1 for k in res.fixed_points)}, spurious {[k + 1 for k in res.spurious]}")


def test_criterion_3():
    t = time.perf_counter()
    graph, res = dynamics("example3")
    elapsed = time.perf_counter() - t
    pair = set(graph.memory_indices[1:])
    sync = [c for c in res.cycles if pair <= set(c)]
    asyn = [c for c in res.async_cycles if pair <= set(c)]
    ok = bool(sync) and bool(asyn)
    report(3, ok, elapsed, 1, f"sync cycles {[[k + 1 for k in c] for c in sync]}, "
           f"async cycles {[[k + 1 for k in c] for c in asyn]}")


def test_criterion_4():
    t = time.perf_counter()
    graph, res = dynamics("example4")
    elapsed = time.perf_counter() - t
    u1 = graph.memory_indices[0]
    every_state_settles = all(len(res.attractors[a]) == 1 for a in res.attractor_of)
    ok = every_state_settles and not res.async_cycles and u1 not in res.fixed_points and u1 not in res.async_fixed_points
    report(4, ok, elapsed, 1, f"fixed {sorted(k + 1 for k in res.fixed_points)}, u1 = state {u1 + 1} not fixed")


def test_criterion_5():
    t = time.perf_counter()
    details, ok = [], True
    for preset in ("energy_bipolar", "energy_complex", "energy_quaternion", "energy_octonion", "energy_octonion_sigma"):
        n, p, _, out = energy_runs(preset)
        assert (n, p) == (100, 160)
        for mode, results in out.items():
            conv = sum(r.converged for r in results)
            mono = sum(monotone(r, 1e-10) for r in results)
            steps = [np.diff(r.energies)[np.asarray(r.changes) > 0] for r in results]
            worst = max((s.max() for s in steps if s.size), default=-np.inf)
            ok &= len(results) == 20 and conv == 20 and mono == 20
            details.append(f"{preset[7:]}/{mode[:4]} {conv}/20 conv, worst step {worst:.2g}")
    report(5, ok, time.perf_counter() - t, 120, "; ".join(details))


def test_criterion_6():
    t = time.perf_counter()
    n, p, _, out = energy_runs("energy_hyperbolic", max_sweeps=200)
    elapsed = time.perf_counter() - t
    failed = {mode: sum(not r.converged for r in res) for mode, res in out.items()}
    ok = (n, p) == (100, 160) and all(len(res) == 10 for res in out.values()) and any(v >= 1 for v in failed.values())
    report(6, ok, elapsed, 60, ", ".join(f"{m}: {v}/10 not converged" for m, v in failed.items()))


def test_criterion_7():
    names = [name for name in CHECKS if name.startswith("bfunction_")]
    t = time.perf_counter()
    results = run_checks(names, samples=1000, seed=0)
    again = run_checks(names, samples=1000, seed=0)
    elapsed = time.perf_counter() - t
    neg = next(r for r in results if r.name == "bfunction_csgn_hyperbolic")
    positives = [r for r in results if r.expect_pass]
    ok = (
        len(positives) == 6
        and all(r.passed for r in positives)
        and not neg.passed
        and "counterexample" in neg.detail
        and results == again
    )
    report(7, ok, elapsed, 10, f"{sum(r.passed for r in positives)}/6 pass; hyperbolic csgn: {neg.detail}")


def test_criterion_8():
    t = time.perf_counter()
    n, p = 100, 160
    ex = ExcitationFn.exponential_scaled(10, n, 1.0)
    cfg = NetworkConfig(get_algebra("reals"), "trivial", ActivationFn("bipolar_sign"), ex, "asynchronous")
    rng = np.random.default_rng(8)
    U = rng.choice([-1.0, 1.0], size=(p, n))
    x = rng.choice([-1.0, 1.0], size=n)
    net = Network(cfg, MemorySet(U[:, :, None]))
    w = net.weights(x)
    changed = 0
    for _ in range(1000):
        x_new, w = net.step_async(x, int(rng.integers(n)), w)
        changed += int(np.any(x_new != x))
        x = x_new
    full = ex.beta * np.exp(ex.alpha * (U @ x[:, 0]))
    err = float(np.max(np.abs(w - full) / full))
    report(8, err <= 1e-9 and changed > 0, time.perf_counter() - t, 10,
           f"max relative error {err:.2e} after 1000 steps ({changed} changes)")


def test_criterion_9():
    t = time.perf_counter()
    rng = np.random.default_rng(9)
    images = [GrayImage(rng.integers(0, 256, (32, 32))) for _ in range(100)]
    bad = 0
    for codec in Codec:
        for img in images:
            v = encode(img, codec)
            bad += not np.all(codec.alphabet.contains(v)) or decode(v, codec, 32, 32) != img
    report(9, bad == 0, time.perf_counter() - t, 10, f"{bad} failures over 100 images x 4 codecs")


@pytest.mark.slow
def test_criterion_10():
    cfg = load_config("image_recall")
    levels = cfg.get_float_list("experiment", "noise_levels")
    trials = cfg.get_int("experiment", "trials")
    a = cfg.get_float("excitation", "a")
    slack = cfg.get_int("expect", "slack")
    assert (levels, trials, a, slack) == ([25, 50, 75, 100], 30, 20, 1)
    images = synthetic_images(20, 32, 32, seed=0, kind="smooth")
    t = time.perf_counter()
    rows = []
    for codec in ("quaternion_twin", "bipolar8"):
        rows += recall_experiment(codec, images, levels, trials, seed=0, a=a, max_sweeps=100)
    elapsed = time.perf_counter() - t
    s = {(r.codec, r.mode, r.noise_stdev): r.successes for r in rows}
    modes = ("synchronous", "asynchronous")
    ordering = all(s[("quaternion_twin", m, v)] + slack >= s[("bipolar8", m, v)] for m in modes for v in levels)
    q_sync = np.mean([s[("quaternion_twin", "synchronous", v)] for v in levels])
    q_async = np.mean([s[("quaternion_twin", "asynchronous", v)] for v in levels])
    table = " ".join(
        f"{c[:4]}/{m[:4]}=" + ",".join(str(s[(c, m, v)]) for v in levels)
        for c in ("quaternion_twin", "bipolar8") for m in modes
    )
    report(10, ordering and q_async >= q_sync, elapsed, 600,
           f"successes/30 at sigma 25,50,75,100: {table}; quaternion async mean {q_async:.2f} >= sync {q_sync:.2f}")


def test_criterion_11():
    t = time.perf_counter()
    worst = {}
    for spec in (complex_numbers(), quaternion(), octonion()):
        worst[spec.name] = check_re_ahn(spec, "natural", 1000, seed=11).max_violation
    tables = all(np.array_equal(cayley_dickson(k).table, ref.table) for k, ref in ((2, quaternion()), (3, octonion())))
    ok = tables and all(v <= 1e-10 for v in worst.values())
    report(11, ok, time.perf_counter() - t, 5,
           ", ".join(f"{k} {v:.1e}" for k, v in worst.items()) + f"; CD tables {'match' if tables else 'differ'}")
