"""Acceptance suite: every certified property at its full sample budget
and pinned tolerance, one pass/fail line per criterion.

Run with ``pytest -s tests/test_acceptance.py`` to see the lines as they
complete; the same sweeps are reachable from the command line via
``hypflow verify``.
"""

import subprocess
import sys
import time

import numpy as np
import pytest

from hypflow import FoliatedBundle, standard_genus2
from hypflow.config import RunConfig
from hypflow.verify import (
    check_anosov_estimators,
    check_busemann_suite,
    check_census,
    check_cone_certification,
    check_holonomy_bound,
    check_mollifier_suite,
    check_periodic_holonomy,
    check_radon_nikodym,
)

SEED = 20260809


@pytest.fixture(scope="module")
def cfg():
    return RunConfig(seed=SEED)


@pytest.fixture(scope="module")
def acceptance_bundle():
    return FoliatedBundle(standard_genus2(), k=1)


@pytest.fixture(scope="module")
def rngs():
    return [np.random.default_rng(s) for s in np.random.SeedSequence(SEED).spawn(8)]


def _report(name, result, elapsed, cap=None):
    flag = "PASS" if result.passed else "FAIL"
    line = f"[{flag}] {name} ({elapsed:.1f}s"
    if cap is not None:
        line += f" < {cap:.0f}s cap"
    line += ")"
    print(line)
    assert result.passed, (name, result.measured)


def test_criterion_1_busemann_visual_suite(acceptance_bundle, rngs, cfg):
    t0 = time.monotonic()
    res = check_busemann_suite(acceptance_bundle, rngs[0], cfg.n_busemann, cfg.tol_busemann)
    dt = time.monotonic() - t0
    assert cfg.n_busemann >= 10**4
    assert dt < 10.0
    _report("criterion 1: busemann/visual suite, 1e4 configs", res, dt, cap=10)


def test_criterion_2_radon_nikodym(acceptance_bundle, rngs, cfg):
    t0 = time.monotonic()
    res = check_radon_nikodym(acceptance_bundle, rngs[1], cfg.n_rn, 4, cfg.tol_rn)
    dt = time.monotonic() - t0
    assert cfg.n_rn >= 10**3
    assert dt < 60.0
    _report("criterion 2: measure derivative vs finite differences", res, dt, cap=60)


def test_criterion_3_periodic_holonomy(acceptance_bundle, cfg):
    t0 = time.monotonic()
    res = check_periodic_holonomy(
        acceptance_bundle, cfg.holonomy_word_len, cfg.tol_holonomy, cfg.n_first_return
    )
    dt = time.monotonic() - t0
    _report("criterion 3: one-period holonomy + first-return contraction", res, dt)


def test_criterion_4_holonomy_bound(acceptance_bundle, rngs, cfg):
    t0 = time.monotonic()
    res = check_holonomy_bound(
        acceptance_bundle, rngs[3], cfg.n_lemma42, cfg.tol_bound_slack, cfg.exponent_window
    )
    dt = time.monotonic() - t0
    assert cfg.n_lemma42 >= 10**3
    _report("criterion 4: two-sided holonomy bound on 1e3 segments", res, dt)


def test_criterion_5_anosov_estimators(acceptance_bundle, rngs, cfg):
    t0 = time.monotonic()
    res = check_anosov_estimators(acceptance_bundle, rngs[4], cfg)
    dt = time.monotonic() - t0
    assert cfg.n_separation_pairs * len(cfg.separation_gaps) >= 10**3
    _report("criterion 5: asymptoticity + uniform-time separation", res, dt)


def test_criterion_6_mollifier_suite(rngs):
    t0 = time.monotonic()
    res = check_mollifier_suite(rngs[5])
    dt = time.monotonic() - t0
    assert dt < 30.0
    _report("criterion 6: mollifier suite", res, dt, cap=30)


def test_criterion_7_cone_certification(acceptance_bundle, rngs, cfg):
    t0 = time.monotonic()
    res = check_cone_certification(acceptance_bundle, rngs[6], cfg)
    dt = time.monotonic() - t0
    assert cfg.n_cone >= 10**3 and cfg.n_leaves >= 100
    _report("criterion 7: cone field + expansion + fellow traveling", res, dt)


def test_criterion_8_census_scaling(acceptance_bundle, cfg):
    t0 = time.monotonic()
    res = check_census(acceptance_bundle, cfg)
    dt = time.monotonic() - t0
    assert tuple(cfg.census_covers) == (1, 2, 3, 4) and cfg.census_word_len == 4
    assert dt < 300.0
    _report("criterion 8: census count scaling + inverse pairing", res, dt, cap=300)


QUICK_VERIFY_INI = """[run]
seed = 77
[samples]
n_busemann = 500
n_rn = 100
holonomy_word_len = 2
n_first_return = 2
n_lemma42 = 400
n_asymptotic = 30
n_separation_pairs = 25
n_cone = 30
n_leaves = 10
[census]
census_word_len = 2
census_covers = 1 2
[field]
quasigeodesic_T = 8.0
cone_T = 2.0
[tolerances]
exponent_window = 0.15
"""


def test_criterion_9_verify_byte_deterministic(tmp_path):
    # the full CLI path twice with one seed: byte-identical reports
    t0 = time.monotonic()
    cfgfile = tmp_path / "verify.ini"
    cfgfile.write_text(QUICK_VERIFY_INI)
    blobs = []
    for name in ("first", "second"):
        out = tmp_path / name
        proc = subprocess.run(
            [
                sys.executable,
                "-m",
                "hypflow.cli",
                "--config",
                str(cfgfile),
                "--out",
                str(out),
                "verify",
            ],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0, proc.stdout + proc.stderr
        blobs.append(((out / "report.txt").read_bytes(), (out / "report.csv").read_bytes()))
    dt = time.monotonic() - t0
    identical = blobs[0] == blobs[1]
    print(f"[{'PASS' if identical else 'FAIL'}] criterion 9: byte-identical verify reports ({dt:.1f}s)")
    assert identical
