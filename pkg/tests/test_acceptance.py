"""Acceptance suite: one test per criterion, each printing a single PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` (the PASS/FAIL lines are
printed even without ``-s``).
"""

import io
import itertools
import json
import math
import os
import time
import warnings

import numpy as np
import pytest

from korobov_tract import (Criterion, GaussianDrawConfig, LpBallQuery, Outcome, SequenceFamily,
                           SpectralFunction, TractabilityQuery, WeightSpec, avg_error, brute_force_spectrum,
                           chain_check, classify, count_lattice, error_curve, fit_lemma_constant,
                           grid_count, h_norm, info_complexity_avg, initial_avg_error,
                           initial_error_log_bounds, mc_avg_error, probe_ratio, threshold, top_eigenvalues,
                           top_frequencies, trace_tau, worst_case_error_of_truncation, worst_error)
from korobov_tract.cli import run
from korobov_tract.entropy import grid_count_by_dimension, lemma_expression
from korobov_tract.spectrum import aggregate

from conftest import spec


@pytest.fixture
def report(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {number}: {detail}")
        assert ok, detail
    return emit


# twelve specs covering every family kind in both roles
SPECS = [
    spec(0.5, "power:c=1,p=1", "const:c=1"),
    spec(0.5, "const:c=1", "const:c=1"),
    spec(0.5, "const:c=2.5", "power:c=1,p=0.5"),
    spec(0.3, "logpower:c=1.5,p=1", "const:c=1"),
    spec(0.5, "logpower:c=2,p=2", "power:c=1,p=1"),
    spec(0.5, "exp:c=1,gamma=0.5", "const:c=1.5"),
    spec(0.2, "exp:c=0.8,gamma=1", "logpower:c=1.5,p=1"),
    spec(0.5, "list:1,1.5,2,3", "list:1,2,1.5"),
    spec(0.5, "power:c=2,p=0.5", "exp:c=1,gamma=0.3"),
    spec(0.6, "const:c=3", "const:c=0.5"),
    spec(0.5, "power:c=1.2,p=2", "logpower:c=2,p=0.5"),
    spec(0.4, "list:1.1", "power:c=0.7,p=1"),
]


def ranks_below(pairs, L):
    """Ranks with exponent strictly below ``L`` (same boundary rule as the counter)."""
    return sum(m for e, m in pairs if e < L - 1e-12 * max(1.0, L))


# -- 1 -------------------------------------------------------------------------

def test_criterion_1_eigenvalue_oracle(report):
    t0 = time.perf_counter()
    mismatches = []
    for i, s in enumerate(SPECS):
        for d in (1, 2, 3, 4):
            want = brute_force_spectrum(s, d, 10.0)
            total = sum(m for _, m in want)
            got_pairs = top_eigenvalues(s, d, total)
            prev = 0
            mults = []
            for value, cum in got_pairs:
                mults.append((value, cum - prev))
                prev = cum
            got = aggregate(mults)
            same = prev == total and [m for _, m in got] == [m for _, m in want] and all(
                abs(x - y) <= 1e-12 * max(1.0, y) for (x, _), (y, _) in zip(got, want))
            if not same:
                mismatches.append((i, d))
    elapsed = time.perf_counter() - t0
    ok = not mismatches and elapsed < 10
    report(1, ok, f"12 specs x d=1..4, E_max=10: {len(mismatches)} mismatches, {elapsed:.2f}s (< 10s)")


# -- 2 -------------------------------------------------------------------------

def test_criterion_2_counting_vs_ranks(report):
    t0 = time.perf_counter()
    bad = []
    cases = 0
    for i, s in enumerate(SPECS):
        for d in (1, 2, 3):
            for eps in (1e-1, 1e-2, 1e-3, 1e-4):
                L = threshold(s, eps)
                oracle = ranks_below(brute_force_spectrum(s, d, L), L)
                cases += 1
                if count_lattice(s, d, L) != oracle:
                    bad.append((i, d, eps))
    elapsed = time.perf_counter() - t0
    report(2, not bad and elapsed < 30,
           f"{cases} (spec, d, eps) cases: {len(bad)} mismatches {bad[:3]}, {elapsed:.2f}s (< 30s)")


# -- 3 -------------------------------------------------------------------------

def test_criterion_3_closed_form_trace(report):
    s = spec(0.5, "const:c=1", "const:c=1")
    trace_err = max(abs(trace_tau(s, d).point - 3.0**d) / 3.0**d for d in range(1, 7))
    e0 = avg_error(s, 1, 0)
    e3 = avg_error(s, 1, 3)
    checks = {
        "trace(d)=3^d, d<=6": trace_err <= 1e-12,
        "e_avg(0,1)=sqrt(3)": abs(e0 - math.sqrt(3)) <= 1e-12,
        "avg_error(3,1)=sqrt(0.75)": abs(e3 - math.sqrt(0.75)) <= 1e-12,
    }
    failed = [k for k, v in checks.items() if not v]
    report(3, not failed, f"max trace rel err {trace_err:.1e}; e_avg(0,1)={e0:.15g}; "
           f"avg_error(3,1)={e3:.15g} (sqrt(0.75)={math.sqrt(0.75):.15g}); failed: {failed or 'none'}")


# -- 4 -------------------------------------------------------------------------

def random_spec(rng):
    omega = rng.uniform(0.05, 0.6)
    kind = rng.integers(5)
    if kind == 0:
        a = SequenceFamily.constant(rng.uniform(0.5, 3))
    elif kind == 1:
        a = SequenceFamily.power(rng.uniform(0.5, 2), rng.uniform(0, 2))
    elif kind == 2:
        a = SequenceFamily.log_power(rng.uniform(0.8, 3), rng.uniform(0, 2))
    elif kind == 3:
        a = SequenceFamily.exponential(rng.uniform(0.5, 1.5), rng.uniform(0.05, 1))
    else:
        a = SequenceFamily.from_list(np.sort(rng.uniform(0.5, 3, size=rng.integers(1, 6))))
    kind = rng.integers(4)
    if kind == 0:
        b = SequenceFamily.constant(rng.uniform(0.6, 2))
    elif kind == 1:
        b = SequenceFamily.power(rng.uniform(0.6, 1.5), rng.uniform(0, 1))
    elif kind == 2:
        b = SequenceFamily.log_power(rng.uniform(0.9, 2), rng.uniform(0, 1))
    else:
        b = SequenceFamily.from_list(rng.uniform(0.6, 2, size=rng.integers(1, 6)))
    return WeightSpec(omega, a, b)


def test_criterion_4_bound_suites(report):
    rng = np.random.default_rng(2024)
    sandwich_bad = initial_bad = 0
    for _ in range(200):
        s = random_spec(rng)
        d = int(rng.integers(1, 11))
        tau = float(rng.uniform(0.5, 2))
        t = trace_tau(s, d, tau)
        ln_trace = math.log(t.point)
        if not (t.log_lower <= ln_trace <= t.log_upper):
            sandwich_bad += 1
        outer_lo, lo, hi, outer_hi = initial_error_log_bounds(s, d)
        v = math.log(initial_avg_error(s, d))
        # outer and inner bounds coincide exactly for constant a; compare those links loosely
        nested = outer_lo <= lo * (1 + 1e-12) and hi <= outer_hi * (1 + 1e-12)
        if not (nested and outer_lo <= v and lo <= v <= hi and v <= outer_hi):
            initial_bad += 1

    identity_bad = 0
    for _ in range(100):
        s = random_spec(rng)
        d = int(rng.integers(1, 4))
        eps = float(10 ** rng.uniform(-1.5, -0.05))
        cri = initial_avg_error(s, d)
        n_abs = info_complexity_avg(s, d, eps, Criterion.ABS)
        n_nor = info_complexity_avg(s, d, eps, Criterion.NOR)
        if not (n_nor <= n_abs == info_complexity_avg(s, d, eps / cri, Criterion.NOR)):
            identity_bad += 1

    curve_bad = 0
    curves = 0
    for s in SPECS[:6]:
        for d in (1, 2, 3):
            curves += 1
            with warnings.catch_warnings():
                warnings.simplefilter("error")
                rows = error_curve(s, d, 60)
            curve_bad += sum(1 for _, w, a in rows if a < w)
    ok = sandwich_bad == initial_bad == identity_bad == curve_bad == 0
    report(4, ok, f"sandwich {sandwich_bad}/200, initial-error {initial_bad}/200, NOR/ABS identity "
           f"{identity_bad}/100, e_avg<e_wor in {curve_bad} rows over {curves} curves")


# -- 5 -------------------------------------------------------------------------

def random_function(rng, d, terms=20, radius=3):
    coeffs = {}
    for _ in range(terms):
        h = tuple(int(x) for x in rng.integers(-radius, radius + 1, size=d))
        coeffs[h] = complex(rng.normal(), rng.normal())
    return SpectralFunction(d, coeffs)


def test_criterion_5_optimal_algorithm(report):
    rng = np.random.default_rng(5)
    cases = [(SPECS[0], d) for d in (1, 2, 3)] + [(SPECS[2], 2), (SPECS[5], 3)]
    violations = equality_bad = 0
    weighted_excess = []
    for s, d in cases:
        for n in (0, 1, 2, 3, 5, 8, 13, 20):
            bound = worst_error(s, d, n)
            for _ in range(50):
                f = random_function(rng, d)
                err = worst_case_error_of_truncation(s, d, n, f)
                if err > bound * 1.0 + 1e-12:
                    violations += 1
            h_next = top_frequencies(s, d, n + 1)[-1][0]
            ext = SpectralFunction.eigenfunction(s, h_next)
            if abs(worst_case_error_of_truncation(s, d, n, ext) - bound) > 1e-12:
                equality_bad += 1
            # the variant that rescales kept coefficients by their eigenvalue
            g = random_function(rng, d)
            weighted_excess.append(worst_case_error_of_truncation(s, d, n, g, weighted=True)
                                   - worst_case_error_of_truncation(s, d, n, g))
    assert h_norm(SPECS[0], SpectralFunction.eigenfunction(SPECS[0], (1, 0))) == pytest.approx(1)
    report(5, violations == 0 and equality_bad == 0,
           f"{violations} bound violations, {equality_bad} extremal mismatches; weighted variant error "
           f"exceeds projection by up to {max(weighted_excess):.3g} (min {min(weighted_excess):.3g})")


# -- 6 -------------------------------------------------------------------------

def test_criterion_6_monte_carlo(report):
    s = SPECS[0]
    t0 = time.perf_counter()
    lines, ok = [], True
    for seed in (1, 2, 3):
        for n in (0, 4, 16):
            r = mc_avg_error(s, 2, n, GaussianDrawConfig(samples=10_000, seed=seed))
            ok &= r.consistent(3.0)
            lines.append(f"seed{seed}/n{n}: z={r.z:+.2f}")
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 60
    report(6, ok, f"{'; '.join(lines)}; {elapsed:.1f}s (< 60s)")


# -- 7 -------------------------------------------------------------------------

def naive_grid_count(p, m, d):
    r = int(m ** (1 / p)) + 1
    axis = np.abs(np.arange(-r, r + 1, dtype=float)) ** p
    limit = m + 1e-12 * max(1.0, m)
    if d == 1:
        return int(np.count_nonzero(axis <= limit))
    rest = np.zeros(1)
    for _ in range(d - 1):
        rest = np.add.outer(rest, axis).ravel()
        rest = rest[rest <= limit]
    # loop over the first coordinate to keep memory flat
    return int(sum(np.count_nonzero(rest + x <= limit) for x in axis))


def test_criterion_7_entropy(report):
    rng = np.random.default_rng(7)
    chain_bad = 0
    for i in range(30):
        d = 1 + i % 3
        n = int(rng.integers(20, 201))
        pts = rng.uniform(-1, 1, size=(n, d))
        if i % 5 == 0:
            pts = np.round(pts * 4) / 4  # lattice-like sets exercise distance ties
        eps = float(rng.uniform(0.05, 0.6))
        if not chain_check(pts, eps).holds:
            chain_bad += 1

    count_bad = []
    cells = [(p, d) for p in (1.0, 2.0, 3.0) for d in (1, 2, 3, 4)] + [(0.5, 1), (0.5, 2), (1.5, 3)]
    for (p, d), m in itertools.product(cells, (0, 0.5, 1, 2.5, 7, 13, 29, 50)):
        if grid_count(LpBallQuery(p, m, d)) != naive_grid_count(p, m, d):
            count_bad.append((p, d, m))

    shape = {}
    for p in (1.0, 2.0):
        c_hat = fit_lemma_constant(p, range(1, 33), range(1, 33))
        worst = 0.0
        for m in range(33, 65):
            counts = grid_count_by_dimension(p, m, 64)
            for d in range(33, 65):
                worst = max(worst, math.log(counts[d - 1]) / lemma_expression(m, d))
        shape[p] = (c_hat, worst)
    shape_ok = all(w <= c for c, w in shape.values())
    ok = chain_bad == 0 and not count_bad and shape_ok
    desc = ", ".join(f"p={p:g}: C_hat={c:.4f} vs validation max {w:.4f}" for p, (c, w) in shape.items())
    report(7, ok, f"chain violations {chain_bad}/30; grid-count mismatches {len(count_bad)}; "
           f"Lemma shape {'holds' if shape_ok else 'violated'} ({desc})")


# -- 8 -------------------------------------------------------------------------

K = "power:c=1,p=1"
LOG = "logpower:c=1,p=1"
EXP = "exp:c=1,gamma=1"
ONE = "const:c=1"
TRUTH_TABLE = [
    # a, b, notion, setting, s, t, expected outcome, expected tag
    (K, ONE, "EC-(s,t)-WT", "worst", 1, 0.5, "holds", "(1.7)"),
    (K, ONE, "EC-(s,t)-WT", "worst", 1, 0.9, "holds", "(1.7)"),
    (K, ONE, "EC-(s,t)-WT", "worst", 0.6, 1, "holds", "(1.8)"),
    (K, ONE, "EC-(s,t)-WT", "worst", 0.5, 1, "fails", "(1.8)"),
    (K, ONE, "EC-(s,t)-WT", "worst", 0.4, 1, "fails", "(1.8)"),
    (K, ONE, "EC-(s,t)-WT", "avg-abs", 1, 0.5, "holds", "(1.10)"),
    (K, ONE, "EC-(s,t)-WT", "avg-abs", 0.6, 1, "holds", "(1.11)"),
    (K, ONE, "EC-(s,t)-WT", "avg-nor", 2, 0.5, "holds", "(1.12)"),
    (K, ONE, "EC-UWT", "worst", None, None, "fails", "bullet:EC-UWT"),
    (LOG, ONE, "EC-WT", "worst", None, None, "holds", "bullet:EC-WT"),
    (LOG, ONE, "EC-(s,t)-WT", "worst", 1, 0.5, "fails", "(1.7)"),
    (EXP, ONE, "EC-SPT", "worst", None, None, "fails", "bullet:EC-SPT"),
    (EXP, ONE, "EC-QPT", "worst", None, None, "fails", "bullet:EC-QPT"),
    (EXP, "power:c=1,p=1", "EC-SPT", "worst", None, None, "holds", "bullet:EC-SPT"),
    (EXP, "power:c=1,p=1", "EC-QPT", "worst", None, None, "holds", "bullet:EC-QPT"),
    (EXP, "power:c=1,p=2", "EC-SPT", "worst", None, None, "holds", "bullet:EC-SPT"),
    (EXP, ONE, "EC-UWT", "avg-nor", None, None, "holds", "bullet:EC-UWT"),
    ("const:c=2", ONE, "EC-WT", "worst", None, None, "fails", "bullet:EC-WT"),
    ("const:c=2", ONE, "EC-(s,t)-WT", "avg-abs", 2, 0.5, "fails", "(1.12)"),
    ("const:c=2", ONE, "EC-(s,t)-WT", "worst", 1.5, 0.5, "holds", "bullet:max(s,t)>1"),
]


def test_criterion_8_truth_table(report):
    wrong = []
    for a, b, notion, setting, s, t, outcome, tag in TRUTH_TABLE:
        v = classify(spec(0.5, a, b), TractabilityQuery(notion, setting, s, t))
        if v.outcome.value != outcome or v.tag != tag:
            wrong.append(f"{a} | {b} | {notion}({s},{t}) {setting}: got {v.outcome.value} via {v.tag}, "
                         f"table says {outcome} via {tag}")
    report(8, not wrong, f"{len(TRUTH_TABLE)} cells, {len(wrong)} mismatches" +
           (": " + " ; ".join(wrong) if wrong else ""))


# -- 9 -------------------------------------------------------------------------

def test_criterion_9_probe(report):
    t0 = time.perf_counter()
    eps = [10.0**-k for k in range(1, 7)]
    ds = list(range(1, 9))
    holds = probe_ratio(spec(0.5, K, ONE), 1, 0.5, "worst", eps, ds, jobs=4)
    fails = probe_ratio(spec(0.5, ONE, ONE), 1, 1, "worst", eps, ds, jobs=4)
    elapsed = time.perf_counter() - t0
    decreasing = holds.maxima_strictly_decreasing
    floor = min(fails.antidiagonal_min)
    ok = decreasing and floor > 0.05 and elapsed < 120
    maxima = ", ".join(f"{m:.3f}" for m in holds.antidiagonal_max)
    report(9, ok, f"a_k=k maxima strictly decreasing: {decreasing} [{maxima}]; "
           f"a=1 minima floor {floor:.3f} (> 0.05); {elapsed:.1f}s")


# -- 10 ------------------------------------------------------------------------

def test_criterion_10_determinism(report, monkeypatch):
    from test_cli import CASES, GOLDEN, variants
    monkeypatch.delenv("KOROBOV_TRACT_CAPS", raising=False)
    monkeypatch.chdir(GOLDEN)
    bad = []
    for case in CASES:
        expected = (GOLDEN / "expected" / f"{case['name']}.out").read_text()
        for argv in variants(case):
            for _ in range(2):
                out = io.StringIO()
                run(argv, stdout=out, stderr=io.StringIO())
                if out.getvalue() != expected:
                    bad.append(case["name"])
    report(10, not bad, f"{len(CASES)} golden cases, two runs each, jobs 1 and 4 where parallel: "
           f"{len(set(bad))} differ {sorted(set(bad))}")
