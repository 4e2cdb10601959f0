"""Exit criteria for the simulator. Each test records a one-line verdict that
``conftest.py`` prints in the terminal summary."""
import random
import subprocess
import sys
import time
from dataclasses import replace
from fractions import Fraction

from slegp import experiments
from slegp.engine import SimConfig, Simulation, run
from slegp.metrics import total_deliveries
from slegp.protocol import (
    GROUP_OWNER,
    PERSONAL,
    DeviceState,
    Message,
    MessageId,
    QueueProfile,
    attached_to,
    queue_utility_rate,
)
from slegp.world import initial_world

VERDICTS = []

PAPER = SimConfig()
SEEDS = list(range(10))

def verdict(criterion, ok, detail):
    VERDICTS.append(f"[{'PASS' if ok else 'FAIL'}] {criterion}: {detail}")
    assert ok, detail

def test_1_cli_determinism_and_runtime(tmp_path):
    outputs, times = [], []
    for name in ("first.csv", "second.csv"):
        path = tmp_path / name
        start = time.perf_counter()
        subprocess.run(
            [sys.executable, "-m", "slegp", "run", "--seed", "42", "--out", str(path)],
            check=True, capture_output=True,
        )
        times.append(time.perf_counter() - start)
        outputs.append(path.read_bytes())
    ok = outputs[0] == outputs[1] and max(times) < 10.0
    verdict("1 determinism", ok, f"identical={outputs[0] == outputs[1]}, slowest run {max(times):.2f}s (< 10s)")

def test_2_two_device_oracle():
    expected = {(MessageId(o, k), 1 - o) for o in (0, 1) for k in range(3)}
    failures = []
    for seed in range(50):
        # speed 0 pins the pair D/2 = 10 m apart, well inside the 200 m range
        result = run(SimConfig(n=1, messages=3, speed=0, seed=seed))
        got = {(r.message_id, r.device_id) for r in result.ledger}
        if got != expected or len(result.ledger) != 6 or result.final_throughput != 1.0:
            failures.append(seed)
    verdict("2 two-device oracle", not failures, f"6/6 deliveries and throughput 1.0 on {50 - len(failures)}/50 seeds")

def random_configs(count):
    rng = random.Random(20240611)
    for _ in range(count):
        n = rng.randint(1, 12)
        spacing = rng.choice([10.0, 20.0, 40.0])
        yield SimConfig(
            n=n,
            circuit_length=max(n * spacing, rng.choice([200.0, 500.0, 1000.0])),
            spacing=spacing,
            speed=rng.choice([0.0, 0.5, 1.0, 2.0]),
            messages=rng.randint(1, 4),
            min_go=rng.randint(0, 15),
            min_gm=rng.randint(0, 15),
            switch_prob=rng.uniform(0.05, 1.0),
            radio_range=rng.choice([30.0, 100.0, 200.0]),
            bandwidth=rng.randint(1, 3),
            total_ticks=rng.randint(1, 400),
            seed=rng.getrandbits(64),
        )

def test_3_throughput_bounds_and_ledger_sanity():
    problems = []
    for cfg in random_configs(20):
        result = run(cfg)
        values = [p.throughput for p in result.series]
        records = list(result.ledger)
        pairs = [(r.message_id, r.device_id) for r in records]
        bound = total_deliveries(cfg.n, cfg.messages)
        if not all(0.0 <= v <= 1.0 for v in values):
            problems.append((cfg, "out of [0,1]"))
        if any(b < a for a, b in zip(values, values[1:])):
            problems.append((cfg, "decreasing"))
        if len(records) > bound or len(set(pairs)) != len(pairs):
            problems.append((cfg, "ledger overflow or duplicate"))
        if any(mid.origin == dev for mid, dev in pairs):
            problems.append((cfg, "self-delivery"))
    verdict("3 throughput bounds", not problems, f"{20 - len(problems)}/20 random configs clean")

def test_4_residence_time_statistics():
    cfg = replace(PAPER, total_ticks=2000, seed=1)
    sim = Simulation.from_config(cfg)
    overshoot = []
    while not sim.finished:
        before = [(d.mode.is_owner, d.ticks_in_mode) for d in sim.devices]
        sim.step()
        for (was_owner, ticks), d in zip(before, sim.devices):
            if d.mode.is_owner != was_owner:
                overshoot.append(ticks - (cfg.min_go if was_owner else cfg.min_gm))
    mean = sum(overshoot) / len(overshoot)
    ok = len(overshoot) >= 10_000 and abs(mean - 2.0) <= 0.5
    verdict("4 residence time", ok, f"mean overshoot {mean:.3f} ticks over {len(overshoot)} switches (2.0 +/- 0.5)")

def test_5_marking_alternation():
    cfg = SimConfig(n=1, speed=0, min_go=10**9, min_gm=10**9, total_ticks=20)
    owner = DeviceState(0, GROUP_OWNER)
    owner.seed_personal(Message(MessageId(0, 0)))
    member = DeviceState(1, attached_to(0))
    sim = Simulation(cfg, initial_world(1, v=0), [owner, member], random.Random(0), trace=True)
    while not sim.finished:
        sim.step()
    pattern = ["send" if t.message_id else "skip" for t in sim.transmissions if t.sender == 0]
    ok = pattern == ["send", "skip"] * 10
    verdict("5 marking alternation", ok, " ".join(s[:2] for s in pattern))

def test_6_personal_bandwidth_bound():
    worst = 100
    windows = 0
    for messages in (1, 3):
        sim = Simulation.from_config(replace(PAPER, messages=messages, seed=7), trace=True)
        while not sim.finished:
            sim.step()
        per_device = {}
        for t in sim.transmissions:
            per_device.setdefault(t.sender, []).append(t.source == PERSONAL)
        for slots in per_device.values():
            for i in range(len(slots) - 99):
                worst = min(worst, sum(slots[i:i + 100]))
                windows += 1
    verdict("6 personal bandwidth", windows > 0 and worst >= 49,
            f"min personal slots in any 100-slot window = {worst} (>= 49) over {windows} windows")

def test_7a_throughput_vs_personal_messages():
    rows = experiments.sweep_personal_messages(PAPER, [1, 2, 4, 8], seeds=SEEDS)
    inversions = experiments.adjacent_inversions(rows)
    tolerated = len(inversions) == 0 or (
        len(inversions) == 1
        and inversions[0][1].mean_throughput - inversions[0][0].mean_throughput
        <= max(inversions[0][0].std_throughput, inversions[0][1].std_throughput)
    )
    means = ", ".join(f"M={r.param}: {r.mean_throughput:.4f}" for r in rows)
    verdict("7a throughput vs M", tolerated, f"{means}; {len(inversions)} inversion(s)")

def test_7b_time_series_milestones():
    start = time.perf_counter()
    base = replace(PAPER, bandwidth=experiments.CALIBRATED_BANDWIDTH, total_ticks=94 * 60)
    result = experiments.time_series_experiment(base, seeds=SEEDS)
    elapsed = time.perf_counter() - start
    t90, t100 = result.mean_minutes_to_90, result.mean_minutes_to_100
    ok = t90 is not None and t100 is not None and t90 <= 30 and t100 <= 94 and elapsed < 300

    def fmt(v):
        return "never" if v is None else f"{v:.2f}"

    verdict(
        "7b time-series milestones", ok,
        f"bandwidth={experiments.CALIBRATED_BANDWIDTH}: 90% at {fmt(t90)} min (<= 30), "
        f"100% at {fmt(t100)} min (<= 94), {elapsed:.1f}s wall (< 300s)",
    )

def _describe(rows):
    return ", ".join(f"{r.param}: {r.mean_throughput:.4f}" for r in rows)

def test_7c_interior_optimum_of_mode_timers():
    gm_rows = experiments.sweep_gm_min(replace(PAPER, min_go=9), [3, 5, 7, 9, 11], seeds=SEEDS)
    go_rows = experiments.sweep_go_min(replace(PAPER, min_gm=7), [5, 7, 9, 11, 13], seeds=SEEDS)
    gm_peak, go_peak = experiments.peak_row(gm_rows), experiments.peak_row(go_rows)
    ok = bool(experiments.interior_maxima(gm_rows)) and bool(experiments.interior_maxima(go_rows))
    verdict(
        "7c interior timer optimum", ok,
        f"min_gm sweep [{_describe(gm_rows)}] argmax {gm_peak.param} (reference 7); "
        f"min_go sweep [{_describe(go_rows)}] argmax {go_peak.param} (reference 9)",
    )

def test_8_utility_rate_matches_exact_arithmetic():
    rng = random.Random(8)
    worst = 0.0
    for _ in range(1000):
        u, bs, p, v, a, b = (
            rng.uniform(0, 10), rng.uniform(0.01, 100), rng.uniform(0.01, 60),
            rng.uniform(0.001, 5), rng.uniform(0, 50), rng.uniform(0, 50),
        )
        got = queue_utility_rate(QueueProfile(u_M=u, B_s=bs, P_reload=p, v_M=v, A=a, B=b))
        exact = Fraction(u) * (Fraction(a) * Fraction(bs) / Fraction(p) + Fraction(b) * Fraction(v))
        if exact:
            worst = max(worst, abs(Fraction(got) - exact) / exact)
        else:
            assert got == 0
    verdict("8 utility rate", worst <= 1e-12, f"max relative error {float(worst):.2e} over 1000 draws (<= 1e-12)")
