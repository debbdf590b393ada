"""Acceptance suite.

Each criterion runs at its stated tolerance and prints one pass/fail line
(run with `pytest -s` to see them inline). Criteria follow the named game
families; the property criterion uses seeded random games.
"""

import math
import time
from fractions import Fraction

import numpy as np

from conftest import random_game
from xorq import games, heuristics, linalg, relaxations, strategies
from xorq.report import BiasReport

CFG50 = heuristics.OptimizerConfig(restarts=50, seed=0)
TOL = 1e-6


def _criterion(name: str, ok: bool, detail: str):
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    assert ok, f"{name}: {detail}"


def test_criterion_1_chsh():
    t0 = time.monotonic()
    bsdp = relaxations.beta_sdp(games.chsh(), TOL).value
    g = games.from_classical(games.chsh())
    om = heuristics.omega_lower(g, CFG50).value
    oc = heuristics.omega_c_lower(g, CFG50).value
    elapsed = time.monotonic() - t0
    ok = (
        abs(bsdp - 0.7071068) <= 1e-4
        and abs(om - 0.5) <= 1e-6
        and abs(oc - 0.7071) <= 1e-3
        and elapsed < 5.0
    )
    _criterion(
        "criterion 1 (CHSH)",
        ok,
        f"beta_sdp={bsdp:.7f} omega={om:.7f} omega_c={oc:.7f} ({elapsed:.1f}s)",
    )


def test_criterion_2_t_family():
    t0 = time.monotonic()
    details = []
    ok = True
    for n in range(1, 6):
        want = 1.0 / math.sqrt(n)
        nc = relaxations.beta_nc(games.t_game(n), TOL).value
        om = heuristics.omega_lower(games.t_game(n), CFG50).value
        ok &= abs(nc - want) <= 1e-4 and abs(om - want) <= 1e-3
        details.append(f"T{n}: nc={nc:.6f} om={om:.6f}")
    for n in range(1, 5):
        want = 1.0 / math.sqrt(n)
        os_ = relaxations.beta_os(games.t_game(n), TOL).value
        me = heuristics.me_lower(games.t_game(n), n, CFG50).value
        ok &= abs(os_ - 1.0) <= 1e-3 and me <= want + 1e-4
        details.append(f"T{n}: os={os_:.6f} me(d={n})={me:.6f}")
    elapsed = time.monotonic() - t0
    ok &= elapsed < 180.0
    _criterion(
        "criterion 2 (T family)", ok, "; ".join(details) + f" ({elapsed:.1f}s)"
    )


def test_criterion_3_h1():
    t0 = time.monotonic()
    g = games.h_game(1)
    nc = relaxations.beta_nc(g, TOL).value
    os_ = relaxations.beta_os(g, TOL).value
    om = heuristics.omega_lower(g, CFG50).value
    oc = heuristics.omega_c_lower(g, CFG50).value
    me = heuristics.me_lower(g, 3, CFG50).value
    explicit = strategies.bias(g, strategies.h1_me_strategy())
    elapsed = time.monotonic() - t0
    ok = (
        abs(nc - 0.6) <= 1e-4
        and abs(os_ - 0.6) <= 1e-4
        and abs(om - 0.4) <= 1e-3
        and abs(oc - 0.4) <= 1e-3
        and me >= 5.0 / 9.0 - 1e-3
        and abs(explicit - 5.0 / 9.0) <= 1e-9
        and elapsed < 120.0
    )
    _criterion(
        "criterion 3 (H1)",
        ok,
        f"nc={nc:.6f} os={os_:.6f} om={om:.6f} oc={oc:.6f} me={me:.6f} "
        f"explicit={explicit:.9f} ({elapsed:.1f}s)",
    )


def test_criterion_4_h2():
    t0 = time.monotonic()
    om, nc_exact = relaxations.h_n_closed_forms(2)
    exact_ok = om == Fraction(2, 7) and nc_exact == Fraction(10, 21)
    nc = relaxations.beta_nc(games.h_game(2), TOL).value
    elapsed = time.monotonic() - t0
    ok = exact_ok and abs(nc - 10.0 / 21.0) <= 5e-4 and elapsed < 300.0
    _criterion(
        "criterion 4 (H2)",
        ok,
        f"closed forms {om}={Fraction(2, 7)}, {nc_exact}={Fraction(10, 21)}; "
        f"beta_nc={nc:.6f} vs {10 / 21:.6f}; beta_os excluded at this size "
        f"({elapsed:.1f}s)",
    )


def test_criterion_5_c_family():
    t0 = time.monotonic()
    details = []
    ok = True
    for n in range(2, 5):
        os_ = relaxations.beta_os(games.c_game(n), TOL).value
        doubled = games.tensor_games(games.c_game(n), games.c_game(n))
        om = heuristics.omega_lower(doubled, CFG50).value
        ok &= abs(os_ - 1.0 / n) <= 1e-4 and om >= 1.0 / (2 * n) - 1e-3
        details.append(f"C{n}: os={os_:.6f} om(CxC)={om:.6f}")
    elapsed = time.monotonic() - t0
    ok &= elapsed < 180.0
    _criterion(
        "criterion 5 (C family)", ok, "; ".join(details) + f" ({elapsed:.1f}s)"
    )


def test_criterion_6_normalization():
    corpus = (
        [(f"T{n}", games.t_game(n)) for n in range(1, 6)]
        + [(f"H{n}", games.h_game(n)) for n in (1, 2)]
        + [(f"C{n}", games.c_game(n)) for n in range(1, 5)]
        + [("CHSH", games.from_classical(games.chsh()))]
    )
    worst = max(abs(linalg.trace_norm(g.m) - 1.0) for _, g in corpus)
    ok = worst <= 1e-8
    _criterion("criterion 6 (normalization)", ok, f"max |trace_norm - 1| = {worst:.2e}")


def test_criterion_7_property_suite():
    t0 = time.monotonic()
    cfg = heuristics.OptimizerConfig(restarts=4, seed=0)
    ok = True
    worst_gap = 0.0
    bias_checks = 0
    for idx in range(50):
        n = 2 + (idx % 2)
        g = random_game(n, seed=4000 + idx)
        rep = BiasReport(
            game=f"rand{idx}", n=n, trace_norm=linalg.trace_norm(g.m), tol=TOL
        )
        rep.omega_lower = heuristics.omega_lower(g, cfg).value
        rep.omega_c_lower = heuristics.omega_c_lower(g, cfg).value
        rep.me_d = 2
        rep.me_lower = heuristics.me_lower(g, 2, cfg).value
        rep.entangled_dims = (2, 2)
        rep.entangled_lower = heuristics.entangled_lower(g, 2, 2, cfg).value
        rep.beta_nc = relaxations.beta_nc(g, TOL).value
        rep.beta_os = relaxations.beta_os(g, TOL).value
        checks = relaxations.check_chains(g, rep, TOL)
        ok &= all(c.passed for c in checks if c.hard)
        ok &= rep.beta_os >= rep.beta_nc - 2e-4
        ok &= rep.beta_nc <= 1.0 + 1e-6 and rep.beta_os <= 1.0 + 1e-6
        slack = 4.0 * TOL
        ok &= rep.omega_lower <= rep.beta_nc + slack
        ok &= rep.omega_c_lower <= rep.beta_nc + slack
        ok &= rep.me_lower <= rep.beta_nc + slack
        ok &= rep.entangled_lower <= rep.beta_os + slack
        worst_gap = max(worst_gap, rep.beta_nc - rep.beta_os)
        for kind, dims in [
            ("unentangled", None),
            ("complex", None),
            ("maxent", 2),
            ("entangled", (2, 2)),
        ]:
            s = strategies.random_strategy(kind, g, dims, seed=idx)
            ok &= abs(strategies.bias(g, s)) <= rep.trace_norm + 1e-8
            bias_checks += 1
    elapsed = time.monotonic() - t0
    ok &= bias_checks == 200
    _criterion(
        "criterion 7 (property suite)",
        ok,
        f"50 games, {bias_checks} strategy biases, max(beta_nc - beta_os) = "
        f"{worst_gap:.2e} ({elapsed:.1f}s)",
    )


def test_criterion_8_embezzlement():
    t0 = time.monotonic()
    ok = True
    details = []
    for d in (2, 3, 4):
        s = strategies.t_entangled_strategy(2, d)
        b = strategies.bias(games.t_game(2), s)
        bound = strategies.max_bias_upper_bound_tn(2, s.d_a)
        ok &= abs(b - (1.0 - 1.0 / d)) <= 1e-8 and b <= bound + 1e-9
        details.append(f"d={d}: bias={b:.9f} bound={bound:.6f}")
    elapsed = time.monotonic() - t0
    _criterion(
        "criterion 8 (embezzlement)", ok, "; ".join(details) + f" ({elapsed:.1f}s)"
    )


def test_criterion_9_rank_one_round_trips():
    ok = True
    worst = 0.0
    for seed in range(20):
        g = random_game(2, seed=7000 + seed)
        s_vals = np.linalg.svd(g.m, compute_uv=False)
        back = games.rank_one_to_xor(games.xor_to_rank_one(g))
        w = np.linalg.eigvalsh(back.m)
        pad = np.zeros(back.m.shape[0] - 2 * s_vals.size)
        want = np.sort(np.concatenate([s_vals / 2, -s_vals / 2, pad]))
        got = np.sort(w)
        err = float(np.max(np.abs(got - want)))
        worst = max(worst, err)
        ok &= err <= 1e-8
    for n in range(1, 5):
        w = np.linalg.eigvalsh(games.rank_one_to_xor(games.t_rank_one(n)).m)
        nonzero = np.sort(w[np.abs(w) > 1e-10])
        ok &= np.allclose(nonzero, [-0.5, 0.5], atol=1e-8)
        tw = np.linalg.eigvalsh(games.t_game(n).m)
        ok &= np.allclose(np.sort(tw[np.abs(tw) > 1e-10]), nonzero, atol=1e-8)
    _criterion(
        "criterion 9 (rank-one round trips)", ok, f"max spectrum error {worst:.2e}"
    )


def test_criterion_10_linalg_suite():
    rng = np.random.default_rng(31337)
    ok = True
    for _ in range(100):
        n = int(rng.integers(1, 5))
        d = int(rng.integers(n, n + 3))
        a1 = rng.standard_normal((n, d)) + 1j * rng.standard_normal((n, d))
        a2 = rng.standard_normal((n, d)) + 1j * rng.standard_normal((n, d))
        res = linalg.gsvd(a1, a2)
        pad = np.zeros((res.k, d - res.k))
        scale = max(1.0, np.linalg.norm(a1), np.linalg.norm(a2))
        ok &= np.linalg.norm(a1 @ res.u1 - res.r @ np.hstack([res.d1, pad])) <= 1e-7 * scale
        ok &= np.linalg.norm(a2 @ res.u2 - res.r @ np.hstack([res.d2, pad])) <= 1e-7 * scale
        ok &= np.linalg.norm(res.d1**2 + res.d2**2 - np.eye(res.k)) <= 1e-7

    from test_linalg import _check_proportional, _random_feasible_quad

    for _ in range(100):
        a1, a2, b1, b2 = _random_feasible_quad(rng)
        v1, v2 = linalg.proportionality_isometries(a1, a2, b1, b2)
        _check_proportional(a1, a2, b1, b2, v1, v2)

    def inversion_sign(perm):
        inv = sum(
            1
            for i in range(len(perm))
            for j in range(i + 1, len(perm))
            if perm[i] > perm[j]
        )
        return -1 if inv % 2 else 1

    for _ in range(1000):
        m = int(rng.integers(1, 10))
        perm = list(rng.permutation(m) + 1)
        ok &= linalg.permutation_sign(perm) == inversion_sign(perm)
    _criterion("criterion 10 (linear algebra suite)", ok, "100+100+1000 instances")


def test_criterion_11_documented_limits():
    # Exact omega*(H1) and the upper-bound certification of the maximally
    # entangled T value are out of desk scope. The suite asserts only the
    # sandwich: see-saw lower bounds meet the nc upper bound 1/sqrt(n).
    ok = True
    for n in (2, 3):
        nc = relaxations.beta_nc(games.t_game(n), TOL).value
        me = heuristics.me_lower(
            games.t_game(n), n, heuristics.OptimizerConfig(restarts=8, seed=0)
        ).value
        ok &= me <= nc + 4e-6 and nc - me <= 1e-3  # the sandwich pins the value
    _criterion(
        "criterion 11 (documented limits)",
        ok,
        "omega*(H1) and the maximally entangled T upper bound are recorded "
        "as externally known; sandwich assertions only",
    )
