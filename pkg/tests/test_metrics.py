import math

import numpy as np
import pytest

from gompsnr import errors
from gompsnr.metrics import (
    Kind,
    aggregate,
    correlation_component,
    score_pair,
    snr_family,
    snr_family_from_spectra,
    snr_time,
    tf_energies,
)
from gompsnr.omniphase import omni_derivatives
from gompsnr.signal_io import Waveform
from gompsnr.stft import stft
from conftest import speechlike
from oracles import bin_component, naive_derivs, naive_snr_family_db

SR = 22050
KINDS = ("snr", "ompsnr", "gompsnr")


def w(x):
    return Waveform(x, SR)


def test_snr_time_closed_form(rng):
    n = 200_000
    t = np.arange(n)
    ref = np.sqrt(2) * np.sin(2 * np.pi * 50 * t / 10_000)  # unit power, whole periods
    est = ref + 0.1 * rng.standard_normal(n)
    assert snr_time(w(ref), w(est)) == pytest.approx(20.0, abs=0.1)


def test_snr_time_identical(rng):
    x = rng.standard_normal(100)
    assert snr_time(w(x), w(x)) == math.inf


def test_snr_time_matches_two_pass(rng):
    y = rng.standard_normal(4096)
    yh = y + 0.2 * rng.standard_normal(4096)
    num = sum(float(v) * float(v) for v in y)
    den = sum((float(a) - float(b)) ** 2 for a, b in zip(y, yh))
    assert snr_time(w(y), w(yh)) == pytest.approx(10 * math.log10(num / den), abs=1e-9)


def test_snr_time_silent():
    with pytest.raises(errors.SilentReference):
        snr_time(w(np.zeros(10)), w(np.ones(10)))


def test_component_matched_phase(rng):
    my, mh = rng.uniform(0, 2, (2, 4, 5))
    th = rng.uniform(-np.pi, np.pi, (4, 5))
    np.testing.assert_allclose(correlation_component("snr", my, mh, th, th), -2 * my * mh, rtol=1e-15)
    np.testing.assert_allclose(correlation_component("gompsnr", my, mh, th, th), -2 * my * mh, rtol=1e-14)
    np.testing.assert_allclose(correlation_component("ompsnr", my, mh, th, th), -2 * my * mh, rtol=1e-14)


def test_component_maximal_distance():
    d_ref = np.zeros((9, 1, 1))
    d_est = np.full((9, 1, 1), np.pi)
    c = correlation_component("gompsnr", np.ones((1, 1)), np.ones((1, 1)), d_ref, d_est)
    assert c[0, 0] == 0.0


@pytest.mark.parametrize("kind", KINDS)
def test_component_against_scalar_oracle(rng, kind):
    my, mh = rng.uniform(0, 2, (2, 4, 4))
    th, thh = rng.uniform(-np.pi, np.pi, (2, 4, 4))
    c = correlation_component(kind, my, mh, th, thh)
    dy, dh = naive_derivs(th), naive_derivs(thh)
    for l in range(4):
        for k in range(4):
            if kind == "snr":
                ref = bin_component(kind, my[l, k], mh[l, k], th[l, k], thh[l, k])
            else:
                ref = bin_component(kind, my[l, k], mh[l, k], dy[:, l, k], dh[:, l, k])
            assert abs(c[l, k] - ref) <= 1e-12


def test_component_shape_errors(rng):
    with pytest.raises(errors.ShapeMismatch):
        correlation_component("snr", np.ones((2, 2)), np.ones((2, 3)), np.ones((2, 2)), np.ones((2, 3)))
    with pytest.raises(errors.ShapeMismatch):
        correlation_component("gompsnr", np.ones((2, 2)), np.ones((2, 2)), np.ones((9, 2, 2)), np.ones((9, 3, 2)))
    with pytest.raises(ValueError):
        correlation_component("segsnr", np.ones((2, 2)), np.ones((2, 2)), np.ones((2, 2)), np.ones((2, 2)))


@pytest.mark.parametrize("kind", KINDS)
def test_identical_is_inf(rng, kind):
    x = speechlike(rng, 8000)
    assert snr_family(w(x), w(x), kind) == math.inf


def test_gompsnr_invariant_to_2pi_offsets_at_derivative_level(rng):
    my, mh = rng.uniform(0, 2, (2, 6, 8))
    d_ref = omni_derivatives(rng.uniform(-np.pi, np.pi, (6, 8)))
    d_est = omni_derivatives(rng.uniform(-np.pi, np.pi, (6, 8)))
    offsets = 2 * np.pi * rng.integers(-4, 5, d_est.shape)
    for kind in ("ompsnr", "gompsnr"):
        a = tf_energies(my, mh, correlation_component(kind, my, mh, d_ref, d_est))
        b = tf_energies(my, mh, correlation_component(kind, my, mh, d_ref, d_est + offsets))
        assert a[0] == b[0]
        assert b[1] == pytest.approx(a[1], rel=1e-12)


def test_random_pair_matches_naive_assembly(rng):
    ref = rng.standard_normal(SR // 2)
    est = ref + 0.5 * rng.standard_normal(SR // 2)
    oracle = naive_snr_family_db(stft(ref).complex, stft(est).complex)
    for kind in KINDS:
        assert abs(snr_family(w(ref), w(est), kind) - oracle[kind]) <= 1e-6


def test_score_pair_identical(rng):
    x = speechlike(rng, 5000)
    rep = score_pair(w(x), w(x), pair_id="same")
    assert [rep.snr_time_db, rep.snr_tf_db, rep.ompsnr_db, rep.gompsnr_db] == [math.inf] * 4
    assert rep.settings["window_size"] == 1024 and rep.settings["eps"] == 1e-12


def test_score_pair_noisy(rng):
    x = speechlike(rng, 8000)
    rep = score_pair(w(x), w(x + 0.01 * rng.standard_normal(x.size)))
    for v in (rep.snr_time_db, rep.snr_tf_db, rep.ompsnr_db, rep.gompsnr_db):
        assert math.isfinite(v) and v > 0


def test_score_pair_components_agree_with_snr_family(rng):
    x = speechlike(rng, 8000)
    y = x + 0.02 * rng.standard_normal(x.size)
    rep = score_pair(w(x), w(y))
    assert rep.snr_tf_db == snr_family(w(x), w(y), "snr")
    assert rep.ompsnr_db == snr_family(w(x), w(y), "ompsnr")
    assert rep.gompsnr_db == snr_family(w(x), w(y), "gompsnr")
    assert rep.snr_time_db == snr_time(w(x), w(y))


def test_score_pair_silent_reference_carries_id(rng):
    with pytest.raises(errors.SilentReference) as info:
        score_pair(w(np.zeros(4096)), w(rng.standard_normal(4096)), pair_id="utt7")
    assert info.value.pair_id == "utt7"


def test_score_pair_alignment_errors_carry_id(rng):
    with pytest.raises(errors.LengthMismatch) as info:
        score_pair(w(np.ones(4096)), w(np.ones(4000)), pair_id="p")
    assert info.value.pair_id == "p"
    rep = score_pair(w(rng.standard_normal(4096)), w(rng.standard_normal(4000)), align="truncate")
    assert math.isfinite(rep.gompsnr_db)


def test_denominator_bounds_per_bin(rng):
    my, mh = rng.exponential(1.0, (2, 40, 50))
    th, thh = rng.uniform(-np.pi, np.pi, (2, 40, 50))
    lo = (my - mh) ** 2
    for kind, hi in (("ompsnr", (my + mh) ** 2), ("gompsnr", my**2 + mh**2)):
        den = my**2 + mh**2 + correlation_component(kind, my, mh, th, thh)
        assert np.all(den >= lo - 1e-12 * (1 + hi))
        assert np.all(den <= hi + 1e-12 * (1 + hi))


def test_matched_phase_collapse(rng):
    my, mh = rng.exponential(1.0, (2, 10, 12))
    th = rng.uniform(-np.pi, np.pi, (10, 12))
    den = my**2 + mh**2 + correlation_component("gompsnr", my, mh, th, th)
    np.testing.assert_allclose(den, (my - mh) ** 2, atol=1e-12)


def test_scale_invariance(rng):
    x = speechlike(rng, 9000)
    y = x + 0.05 * rng.standard_normal(x.size)
    for kind in KINDS:
        a = snr_family(w(x), w(y), kind)
        b = snr_family(w(3.7 * x), w(3.7 * y), kind)
        assert b == pytest.approx(a, abs=1e-9)


def test_monotone_in_noise_level():
    wins = 0
    for seed in range(20):
        r = np.random.default_rng(seed)
        x = speechlike(r, 11025)
        noise = r.standard_normal(x.size)
        vals = [snr_family(w(x), w(x + s * noise), "gompsnr") for s in (0.001, 0.01, 0.1)]
        wins += vals[0] > vals[1] > vals[2]
    assert wins >= 19


def test_spectra_entry_point_accepts_complex_arrays(rng):
    Y = rng.standard_normal((5, 9)) + 1j * rng.standard_normal((5, 9))
    Yh = Y + 0.1 * (rng.standard_normal((5, 9)) + 1j * rng.standard_normal((5, 9)))
    direct = 10 * math.log10(np.sum(np.abs(Y) ** 2) / np.sum(np.abs(Y - Yh) ** 2))
    assert snr_family_from_spectra(Y, Yh, Kind.SNR) == pytest.approx(direct, abs=1e-9)


def test_aggregate_modes(rng):
    reps = []
    for j in range(3):
        x = speechlike(rng, 6000)
        reps.append(score_pair(w(x), w(x + 0.01 * (j + 1) * rng.standard_normal(x.size)), pair_id=str(j)))
    mean = aggregate(reps, "mean_db")
    assert mean["gompsnr_db"]["value"] == pytest.approx(np.mean([r.gompsnr_db for r in reps]), abs=1e-12)
    pooled = aggregate(reps, "pooled")
    num = sum(r.energies["snr_time_db"][0] for r in reps)
    den = sum(r.energies["snr_time_db"][1] for r in reps)
    assert pooled["snr_time_db"]["value"] == pytest.approx(10 * math.log10(num / den))
    same = [score_pair(w(x), w(x), pair_id="s") for x in [speechlike(rng, 5000)]]
    agg = aggregate(same, "mean_db")
    assert agg["gompsnr_db"] == {"value": None, "n_finite": 0, "n_infinite": 1}
