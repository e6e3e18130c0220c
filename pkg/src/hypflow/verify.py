"""The certification sweep: runs every quantitative property of the
construction at configured sample sizes and emits a deterministic report.

Each property is measured, compared against its pinned tolerance, and
recorded with the slack actually achieved; the report is reproducible
byte-for-byte from (config, seed).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .circle_action import CirclePoint
from .config import RunConfig
from .census import homotopic_inverse_pairs, minimal_exponent, orbit_census
from .diagnostics import (
    horizontal_asymptoticity,
    leafwise_stable_contraction,
    vertical_separation_times,
)
from .flow import FoliatedBundle, first_return, flow_phi, holonomy_derivative, periodic_orbit
from .geometry import (
    ORIGIN,
    BoundaryPoint,
    HyperbolicPoint,
    TWO_PI,
    apply_boundary,
    apply_isometry,
    busemann,
    classify_and_fixed_points,
    flow_toward,
    hyperbolic_distance,
    visual_density_ratio,
)
from .measure import ChartAtlas, PullbackMeasure
from .smoothing import (
    GeodesicField,
    MollifiedField,
    PerturbedField,
    cone_sweep_multi,
    field_c1_distance,
    fiber_expansion_profile,
    mollify,
    quasigeodesic_radius,
    shear_bound,
    triangle_wave,
)
from .surface_group import Word, group_preset, primitive_cyclic_root, surface_conjugacy_key


@dataclass
class PropertyResult:
    name: str
    passed: bool
    measured: dict[str, object] = field(default_factory=dict)
    notes: str = ""


@dataclass
class CertificationReport:
    preset: str
    k: int
    seed: int
    results: list[PropertyResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def render_text(self) -> str:
        lines = [
            "certification report",
            f"preset: {self.preset}",
            f"cover index: {self.k}",
            f"seed: {self.seed}",
            "",
        ]
        for r in self.results:
            lines.append(f"[{'PASS' if r.passed else 'FAIL'}] {r.name}")
            for key in r.measured:
                lines.append(f"    {key} = {_fmt(r.measured[key])}")
            if r.notes:
                lines.append(f"    note: {r.notes}")
        lines.append("")
        lines.append(f"overall: {'PASS' if self.passed else 'FAIL'}")
        lines.append("")
        return "\n".join(lines)

    def csv_rows(self) -> list[tuple[str, str, str, str]]:
        rows = [("property", "key", "value", "passed")]
        for r in self.results:
            for key in r.measured:
                rows.append((r.name, key, _fmt(r.measured[key]), str(r.passed)))
        return rows


def _fmt(v) -> str:
    if isinstance(v, float):
        return format(v, ".12g")
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_fmt(x) for x in v) + "]"
    return str(v)


def _random_disk_point(rng, radius=0.85) -> HyperbolicPoint:
    r = radius * math.sqrt(rng.uniform())
    th = rng.uniform(0.0, TWO_PI)
    return HyperbolicPoint(r * math.cos(th), r * math.sin(th))


def _random_word(rng, max_len: int) -> Word:
    n = int(rng.integers(1, max_len + 1))
    letters = []
    for _ in range(n):
        choices = [l for l in (1, 2, 3, 4, -1, -2, -3, -4) if not letters or l != -letters[-1]]
        letters.append(int(choices[int(rng.integers(0, len(choices)))]))
    return Word.from_letters(letters)


# -- suite 1: Busemann / visual measure -------------------------------------


def check_busemann_suite(bundle: FoliatedBundle, rng, n: int, tol: float) -> PropertyResult:
    """Vectorized sweep of the Busemann and visual-measure identities."""
    group = bundle.group

    def rand_pts(m, radius=0.85):
        r = radius * np.sqrt(rng.uniform(size=m))
        return r * np.exp(1j * rng.uniform(0.0, TWO_PI, m))

    def log_poisson(w, xi):
        return np.log1p(-np.abs(w) ** 2) - 2.0 * np.log(np.abs(w - xi))

    def bus(xi, a, b):
        return log_poisson(b, xi) - log_poisson(a, xi)

    x, y, z = rand_pts(n), rand_pts(n), rand_pts(n)
    xi = np.exp(1j * rng.uniform(0.0, TWO_PI, n))
    b_xy = bus(xi, x, y)
    worst_cocycle = float(np.abs(bus(xi, x, z) - b_xy - bus(xi, y, z)).max())
    dist = 2.0 * np.arctanh(np.abs(x - y) / np.abs(1.0 - np.conjugate(x) * y))
    worst_bound = float((np.abs(b_xy) - dist).max())

    # equivariance under a pool of group elements, applied blockwise
    n_words = 64
    blocks = np.array_split(np.arange(n), n_words)
    worst_equiv = 0.0
    for idx in blocks:
        alpha, beta = group.evaluate(_random_word(rng, 4)).su11()

        def mob(w):
            return (alpha * w + beta) / (np.conjugate(beta) * w + np.conjugate(alpha))

        gxi = mob(xi[idx])
        gxi /= np.abs(gxi)
        defect = np.abs(bus(gxi, mob(x[idx]), mob(y[idx])) - b_xy[idx])
        worst_equiv = max(worst_equiv, float(defect.max()))

    # density ratio against the independent arc-mass finite difference
    h = 1e-5
    rot = complex(math.cos(h), math.sin(h))

    def arc_mass(p, a, b):
        za = (a - p) / (1.0 - np.conjugate(p) * a)
        zb = (b - p) / (1.0 - np.conjugate(p) * b)
        return np.abs(np.angle(zb / za))

    a_pt, b_pt = xi / rot, xi * rot
    fd = arc_mass(x, a_pt, b_pt) / arc_mass(y, a_pt, b_pt)
    ratio = np.exp(-bundle.delta * b_xy)
    worst_ratio = float((np.abs(ratio - fd) / ratio).max())

    # radial exactness: moving toward xi changes the cocycle by the time
    t = rng.uniform(-2.0, 2.0, n)
    target = (xi - x) / (1.0 - np.conjugate(x) * xi)
    target /= np.abs(target)
    moved = np.tanh(0.5 * t) * target
    y_t = (moved + x) / (1.0 + np.conjugate(x) * moved)
    worst_radial = float(np.abs(bus(xi, x, y_t) - t).max())

    measured = {
        "samples": n,
        "max_cocycle_defect": worst_cocycle,
        "max_distance_bound_excess": worst_bound,
        "max_equivariance_defect": worst_equiv,
        "max_density_vs_arc_mass_rel": worst_ratio,
        "max_radial_defect": worst_radial,
        "tolerance": tol,
    }
    passed = (
        worst_cocycle <= tol
        and worst_bound <= tol
        and worst_equiv <= tol
        and worst_ratio <= 1e-6  # finite-difference oracle resolution
        and worst_radial <= tol
    )
    return PropertyResult("busemann_visual_suite", passed, measured)


# -- suite 2: Radon-Nikodym vs finite differences ----------------------------


def _adaptive_lift_derivative(action, w: Word, s: float) -> float:
    """Richardson-extrapolated central difference of the lifted circle map
    over a ladder of steps, keeping the value where successive rungs agree
    best (distortion near repelling points forces tiny steps, rounding
    noise forbids them; the crossover is sample-dependent)."""

    def richardson(h):
        f1 = (action.lift(w, s + h) - action.lift(w, s - h)) / (2 * h)
        f2 = (action.lift(w, s + 2 * h) - action.lift(w, s - 2 * h)) / (4 * h)
        return (4.0 * f1 - f2) / 3.0

    ladder = [richardson(1e-4 * 0.25**j) for j in range(7)]
    best, best_gap = ladder[1], math.inf
    for a, b in zip(ladder, ladder[1:]):
        gap = abs(b - a) / max(abs(b), 1e-300)
        if gap < best_gap:
            best, best_gap = b, gap
    return best


def check_radon_nikodym(bundle: FoliatedBundle, rng, n: int, max_len: int, tol: float) -> PropertyResult:
    measure = bundle.measure
    action = bundle.action
    worst = 0.0
    for _ in range(n):
        w = _random_word(rng, max_len)
        p = CirclePoint.of(rng.uniform(0.0, bundle.k), bundle.k)
        rn = measure.rn_derivative(w, p)
        if rn >= 1.0:
            fd = _adaptive_lift_derivative(action, w, p.s)
        else:
            # differentiate the expanding inverse at the image point: the
            # contracting side's finite differences sit below rounding noise
            q = action.act(w, p)
            fd = 1.0 / _adaptive_lift_derivative(action, w.inverse(), q.s)
        worst = max(worst, abs(fd - rn) / rn)
    measured = {"samples": n, "word_len": max_len, "max_rel_error": worst, "tolerance": tol}
    return PropertyResult("radon_nikodym_derivative", worst <= tol, measured)


# -- suite 3: periodic-orbit holonomy ----------------------------------------


def check_periodic_holonomy(bundle: FoliatedBundle, max_len: int, tol: float, n_first_return: int) -> PropertyResult:
    from .flow import orbit_closure_gap

    group = bundle.group
    worst_rel = 0.0
    worst_gap = 0.0
    n_orbits = 0
    classes = group.conjugacy_classes(max_len)
    for w in classes:
        cls = classify_and_fixed_points(group.evaluate(w))
        ell = cls.translation_length
        for fx in cls.fixed:
            p = CirclePoint.of((fx.theta / TWO_PI) % 1.0, 1)
            seg = periodic_orbit(bundle, w, p, step=0.2, refine_crossings=False, start_offset=0.2309)
            rec = holonomy_derivative(bundle, seg.start, -ell)
            worst_rel = max(worst_rel, abs(rec.derivative - math.exp(-ell)) * math.exp(ell))
            worst_gap = max(worst_gap, orbit_closure_gap(bundle, seg))
            n_orbits += 1
    # backward first-return contraction on a subsample of classes; the
    # section's first return comes at the period of the primitive root
    monotone_ok = True
    ratios = []
    for i, w in enumerate(classes):
        if i >= n_first_return:
            break
        cls = classify_and_fixed_points(group.evaluate(w))
        root, _ = primitive_cyclic_root(w)
        ell_root = classify_and_fixed_points(group.evaluate(root)).translation_length
        p = CirclePoint.of((cls.fixed[0].theta / TWO_PI) % 1.0, 1)
        fr = first_return(bundle, w, p, n_samples=5, n_backward_iterates=8)
        gaps = [abs(q - p.s) for q in fr.backward_iterates]
        monotone_ok = monotone_ok and all(b < a for a, b in zip(gaps, gaps[1:]))
        ratios.append(fr.backward_derivative * math.exp(ell_root))
    measured = {
        "classes": len(classes),
        "orbits": n_orbits,
        "max_rel_holonomy_error": worst_rel,
        "max_closure_gap": worst_gap,
        "first_return_orbits": min(n_first_return, len(classes)),
        "backward_monotone": monotone_ok,
        "max_return_derivative_rel_error": max(abs(r - 1.0) for r in ratios),
        "tolerance": tol,
    }
    passed = worst_rel <= tol and monotone_ok and worst_gap <= 1e-7
    return PropertyResult("periodic_orbit_holonomy", passed, measured)


# -- suite 4: transverse holonomy bound --------------------------------------


def check_holonomy_bound(bundle: FoliatedBundle, rng, n: int, slack_tol: float, window: float) -> PropertyResult:
    worst_slack = -math.inf
    pts_t, pts_log = [], []
    for _ in range(n):
        x = _random_disk_point(rng, 0.8)
        p = CirclePoint.of(rng.uniform(0.0, bundle.k), bundle.k)
        pt = bundle.point(x, p)
        t = rng.uniform(-20.0, -0.5)
        rec = holonomy_derivative(bundle, pt, t)
        worst_slack = max(worst_slack, rec.bound_check)
        pts_t.append(t)
        pts_log.append(math.log(rec.derivative))
    slope = float(np.polyfit(pts_t, pts_log, 1)[0])
    measured = {
        "samples": n,
        "max_bound_slack": worst_slack,
        "fit_exponent": slope,
        "diameter": bundle.group.domain.diameter,
        "tolerance": slack_tol,
    }
    passed = worst_slack <= slack_tol and abs(slope - bundle.delta) <= window * bundle.delta
    return PropertyResult("transverse_holonomy_bound", passed, measured)


# -- suite 5: topological-Anosov estimators ----------------------------------


def check_anosov_estimators(bundle: FoliatedBundle, rng, cfg: RunConfig) -> PropertyResult:
    asym = horizontal_asymptoticity(bundle, rng, n_pairs=cfg.n_asymptotic)
    sep = vertical_separation_times(
        bundle,
        rng,
        gaps=list(cfg.separation_gaps),
        eps=cfg.separation_eps,
        n_pairs=cfg.n_separation_pairs,
    )
    leaf = leafwise_stable_contraction(bundle, rng, n_samples=50)
    measured = {
        "asymptotic_pairs": asym.n_pairs,
        "min_decay_exponent": asym.min_exponent,
        "median_decay_exponent": asym.median_exponent,
        "stable_contraction_min_exponent": leaf.min_exponent,
        "separation_eps": sep.eps,
        "separation_gaps": list(sep.gaps),
        "separation_max_times": list(sep.max_times),
        "separation_mean_times": list(sep.mean_times),
        "separation_pairs_per_gap": sep.n_pairs_per_gap,
        "separation_monotone": sep.monotone,
        "separation_all_finite": sep.all_finite,
        "min_decay_required": cfg.min_decay,
    }
    passed = (
        asym.min_exponent >= cfg.min_decay
        and leaf.min_exponent >= cfg.min_decay
        and sep.monotone
        and sep.all_finite
    )
    return PropertyResult("topological_anosov_estimators", passed, measured)


# -- suite 6: mollifier --------------------------------------------------------


def check_mollifier_suite(rng) -> PropertyResult:
    n = 2048
    y = np.arange(n) / n
    const_err = float(np.abs(mollify(np.full(n, 2.31), 16).b - 2.31).max())

    tri = triangle_wave(y)
    errs = {k: float(np.abs(mollify(tri, k).b - tri).max()) for k in (16, 32, 64)}
    ratios = [errs[16] / errs[32], errs[32] / errs[64]]
    halving_ok = all(1.6 <= r <= 2.4 for r in ratios)

    sine = np.sin(2 * np.pi * y)
    sine_errs = {k: float(np.abs(mollify(sine, k).b - sine).max()) for k in (32, 64)}

    # leafwise partial: 2-d grid smooth in x, mollified in y
    nx = 64
    x = np.arange(nx) / nx
    grid = np.sin(2 * np.pi * x)[:, None] * (1.0 + 0.5 * np.cos(2 * np.pi * y))[None, :]
    dadx = 2 * np.pi * np.cos(2 * np.pi * x)[:, None] * (1.0 + 0.5 * np.cos(2 * np.pi * y))[None, :]
    dx_errs = {}
    for k in (16, 32):
        mg = mollify(grid, k, x_step=1.0 / nx)
        dx_errs[k] = float(np.abs(mg.db_dx - dadx).max())
    dy_ok = True
    mg64 = mollify(sine, 64)
    dy_err = float(np.abs(mg64.db_dy - 2 * np.pi * np.cos(2 * np.pi * y)).max())

    measured = {
        "constant_error": const_err,
        "triangle_errors": [errs[16], errs[32], errs[64]],
        "halving_ratios": ratios,
        "sine_errors": [sine_errs[32], sine_errs[64]],
        "x_partial_errors": [dx_errs[16], dx_errs[32]],
        "y_partial_error_k64": dy_err,
    }
    passed = (
        const_err <= 1e-10
        and halving_ok
        and sine_errs[64] < sine_errs[32]
        and dx_errs[32] < dx_errs[16]
    )
    return PropertyResult("mollifier_suite", passed, measured)


# -- suite 7: cone field -------------------------------------------------------


def check_cone_certification(bundle: FoliatedBundle, rng, cfg: RunConfig) -> PropertyResult:
    exact = GeodesicField()
    pert = PerturbedField(amp=cfg.perturbation_amp)
    field_k = MollifiedField(pert, cfg.mollifier_k)

    # leafwise C1 distance of the mollified field against the exact one,
    # capped at a tenth of the hyperbolicity margin (contraction rate 1)
    xs = np.array([_random_disk_point(rng, 0.6).z for _ in range(200)], dtype=complex)
    sc = rng.uniform(0.0, bundle.k, 200)
    c1_dist = field_c1_distance(field_k, exact, xs, sc)

    pts = [bundle.point(_random_disk_point(rng, 0.55), CirclePoint.of(rng.uniform(0.0, bundle.k), bundle.k)) for _ in range(cfg.n_cone)]
    T = cfg.cone_T
    t_window = (T, 1.5 * T, 2.0 * T)
    step = 4e-3

    sub = pts[: max(50, cfg.n_cone // 10)]
    c4_samples = shear_bound(bundle, field_k, sub, t_window, step=step)
    c4 = max(c4_samples)
    beta = 2.2 * c4

    checks = cone_sweep_multi(bundle, field_k, pts, t_window, beta, step=step)
    contained = all(r.contained for batch in checks.values() for r in batch)
    width_max = max(r.width_ratio for batch in checks.values() for r in batch)
    c3 = max(r.leaf_contraction for batch in checks.values() for r in batch)

    prof = fiber_expansion_profile(bundle, field_k, pts, [0.5 * T, T, 1.5 * T, 2.0 * T], step=step)
    ts = np.array([t for t, _ in prof])
    logs = np.log(np.array([v for _, v in prof]))
    a_mat = np.vstack([ts, np.ones_like(ts)]).T
    coeff, _, _, _ = np.linalg.lstsq(a_mat, logs, rcond=None)
    c2 = float(np.median(coeff[0]))
    c1 = float(np.exp(np.min(logs - c2 * ts[:, None])))

    leaves = [bundle.point(_random_disk_point(rng, 0.4), CirclePoint.of(rng.uniform(0.0, bundle.k), bundle.k)) for _ in range(cfg.n_leaves)]
    r_full = quasigeodesic_radius(bundle, field_k, leaves, cfg.quasigeodesic_T, step=step, n_checks=40)
    r_half = quasigeodesic_radius(bundle, field_k, leaves, 0.5 * cfg.quasigeodesic_T, step=step, n_checks=20)
    r_bound = max(r_full)
    r_stability = r_bound / max(r_half)

    measured = {
        "n_cone_points": cfg.n_cone,
        "c1_distance_vs_margin": c1_dist,
        "beta": beta,
        "c4": c4,
        "c3_leafwise": c3,
        "cone_contained_all": contained,
        "max_width_ratio": width_max,
        "c2_expansion": c2,
        "c1_expansion": c1,
        "R_bound": r_bound,
        "R_quartiles": [float(np.quantile(r_full, q)) for q in (0.0, 0.25, 0.5, 0.75, 1.0)],
        "R_window_stability": r_stability,
        "min_c2_required": cfg.min_c2,
    }
    passed = (
        contained
        and c2 > cfg.min_c2
        and c1 > 0.0
        and c1_dist <= 0.1
        and abs(r_stability - 1.0) <= 0.1
    )
    return PropertyResult("cone_field_certification", passed, measured)


# -- suite 8: census -----------------------------------------------------------


def check_census(bundle: FoliatedBundle, cfg: RunConfig) -> PropertyResult:
    group = bundle.group
    covers = sorted(set(cfg.census_covers) | {1})
    censuses = {k: orbit_census(group, k, cfg.census_word_len) for k in covers}
    base = {e.class_key: e for e in censuses[1]}
    scaling_exact = True
    for k, entries in censuses.items():
        table = {e.class_key: e for e in entries}
        if set(table) != set(base):
            scaling_exact = False
            continue
        for key, e1 in base.items():
            if table[key].count != k * e1.count:
                scaling_exact = False
    worst_period = 0.0
    kinds_alternate = True
    pairs_ok = True
    n_pairs = 0
    for k, entries in censuses.items():
        for e in entries:
            expect = e.exponent * e.translation_length
            for orb in e.orbits:
                worst_period = max(worst_period, abs(orb.period - expect))
            orbs = sorted(e.orbits, key=lambda o: o.fiber_point.s)
            for a, b in zip(orbs, orbs[1:] + orbs[:1]):
                if a.kind == b.kind:
                    kinds_alternate = False
        pairs = homotopic_inverse_pairs(entries)
        n_pairs += len(pairs)
        pairs_ok = pairs_ok and all(p.keys_inverse for p in pairs)
    measured = {
        "covers": covers,
        "word_len": cfg.census_word_len,
        "classes": len(base),
        "scaling_exact": scaling_exact,
        "max_period_defect": worst_period,
        "kinds_alternate": kinds_alternate,
        "inverse_pairs": n_pairs,
        "inverse_pairs_ok": pairs_ok,
        "max_closure_gap": max(e.closure_gap for es in censuses.values() for e in es),
        "tolerance_period": cfg.tol_period,
    }
    passed = scaling_exact and kinds_alternate and pairs_ok and worst_period <= cfg.tol_period
    return PropertyResult("orbit_census_scaling", passed, measured)


# -- the full sweep -------------------------------------------------------------


def certify(cfg: RunConfig) -> CertificationReport:
    """Run the full property sweep at the configured budgets."""
    seed = cfg.require_seed()
    group = group_preset(cfg.preset)
    bundle = FoliatedBundle(group, cfg.k)
    streams = np.random.SeedSequence(seed).spawn(8)
    rngs = [np.random.default_rng(s) for s in streams]

    report = CertificationReport(preset=cfg.preset, k=cfg.k, seed=seed)
    report.results.append(check_busemann_suite(bundle, rngs[0], cfg.n_busemann, cfg.tol_busemann))
    report.results.append(check_radon_nikodym(bundle, rngs[1], cfg.n_rn, 4, cfg.tol_rn))
    report.results.append(
        check_periodic_holonomy(bundle, cfg.holonomy_word_len, cfg.tol_holonomy, cfg.n_first_return)
    )
    report.results.append(
        check_holonomy_bound(bundle, rngs[3], cfg.n_lemma42, cfg.tol_bound_slack, cfg.exponent_window)
    )
    report.results.append(check_anosov_estimators(bundle, rngs[4], cfg))
    report.results.append(check_mollifier_suite(rngs[5]))
    report.results.append(check_cone_certification(bundle, rngs[6], cfg))
    report.results.append(check_census(bundle, cfg))
    return report
