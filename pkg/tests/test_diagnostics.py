from hypflow.diagnostics import (
    horizontal_asymptoticity,
    leafwise_stable_contraction,
    vertical_separation_times,
)


def test_horizontal_asymptoticity(bundle, rng):
    rep = horizontal_asymptoticity(bundle, rng, n_pairs=40)
    assert rep.min_exponent > 0.9
    assert abs(rep.median_exponent - 1.0) < 0.05


def test_vertical_separation(bundle, rng):
    rep = vertical_separation_times(
        bundle, rng, gaps=[0.04, 0.02, 0.01], eps=0.5, n_pairs=30
    )
    assert rep.all_finite and rep.monotone
    # separation time grows roughly logarithmically in 1/gap
    assert rep.max_times[0] < rep.max_times[-1] <= rep.max_times[0] + 4.0


def test_leafwise_stable_contraction(bundle, rng):
    rep = leafwise_stable_contraction(bundle, rng, n_samples=25)
    assert rep.min_exponent > 0.9
    assert all(0.5 < c < 2.0 for c in rep.prefactors)
