"""Benchmark per-slot scheduling cost."""
import statistics
import time

import numpy as np

from wcsched.config import load_config
from wcsched.feasible.system import SystemSpectra, baseline
from wcsched.sim import Scenario, SchedulingEngine, random_dual_system


def random_scenario(n: int, horizon: int, slots: int, seed: int) -> Scenario:
    rng = np.random.default_rng(seed)
    services, backlogs = random_dual_system(rng, n, 4 * n, horizon)
    return Scenario.model_validate({
        "c": 4 * n,
        "horizon": horizon,
        "flows": [{"service": s.to_json(), "b": b} for s, b in zip(services, backlogs)],
        "arrivals": {"generator": {"kind": "token_bucket", "slots": slots, "rate": 1, "burst": 2, "seed": seed}},
        "policy": {"policy": "max_slack"},
    })


def time_run(scenario: Scenario, representation: str) -> float:
    config = load_config("configs/default.yaml")
    engine = SchedulingEngine.from_scenario(scenario, config, representation=representation)
    start = time.time()
    log = engine.run()
    return (time.time() - start) * 1000 / max(len(log), 1)


def time_baseline(n: int, horizon: int, repeats: int = 5) -> float:
    rng = np.random.default_rng(n)
    services, backlogs = random_dual_system(rng, n, 4 * n, horizon)
    system = SystemSpectra.build(services, backlogs, backlogs, 4 * n)
    times = []
    for _ in range(repeats):
        start = time.time()
        beta = baseline(system)
        beta(beta.full)
        times.append((time.time() - start) * 1000)
    return statistics.median(times)


def run_benchmark():
    print('-' * 60)
    print('SCHEDULING BENCHMARK')
    print('-' * 60)

    results = {'per_slot_ms': {}, 'baseline_ms': {}}

    print('\n⏱️  Per-slot cost, 3 flows, 64 slots')
    for horizon in (16, 64, 256):
        scenario = random_scenario(3, horizon, 64, seed=horizon)
        dual = time_run(scenario, 'dual')
        spectral = time_run(scenario, 'spectral')
        results['per_slot_ms'][horizon] = {'dual': dual, 'spectral': spectral}
        print(f'   H={horizon:<4} dual: {dual:.1f}ms   spectral: {spectral:.1f}ms')

    print('\n📊 Baseline function, H=32')
    for n in (2, 4, 6, 8):
        ms = time_baseline(n, 32)
        results['baseline_ms'][n] = ms
        print(f'   n={n:<2} {2 ** n:>4} subsets: {ms:.1f}ms')

    print('\n' + '=' * 60)

    return results


if __name__ == "__main__":
    run_benchmark()
