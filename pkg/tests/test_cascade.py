"""Monte-Carlo cascade sampling: determinism, statistics, log format."""

import math

import numpy as np
import pytest

from polartls.cascade import (
    Trajectory,
    emission_spectrum,
    sample_ensemble,
    sample_trajectory,
    write_trajectory_log,
)
from polartls.ladder import DressedState, allowed_final_indices
from polartls.overlaps import ModelParams
from polartls.rates import total_rate


class TestSampleTrajectory:
    def test_uncoupled_two_level_limit(self):
        p = ModelParams.from_ratios(0.0, 0.5)
        t = sample_trajectory(DressedState("e", 0), p, seed=42)
        assert len(t.jumps) == 1
        time, rec = t.jumps[0]
        assert rec.final == DressedState("g", 0)
        assert time > 0.0
        assert not t.truncated

    def test_dark_start_empty(self):
        p = ModelParams.from_ratios(1.0, 0.5)
        t = sample_trajectory(DressedState("g", 0), p, seed=1)
        assert t.jumps == ()
        assert not t.truncated

    def test_deterministic_given_seed(self):
        p = ModelParams.from_ratios(1.0, 0.45)
        a = sample_trajectory(DressedState("e", 8), p, seed=987)
        b = sample_trajectory(DressedState("e", 8), p, seed=987)
        assert a == b
        c = sample_trajectory(DressedState("e", 8), p, seed=988)
        assert a != c

    def test_times_increase_and_records_chain(self):
        p = ModelParams.from_ratios(1.0, 0.45)
        for seed in range(12):
            t = sample_trajectory(DressedState("e", 9), p, seed=seed)
            times = [time for time, _ in t.jumps]
            assert all(a < b for a, b in zip(times, times[1:]))
            for (_, first), (_, second) in zip(t.jumps, t.jumps[1:]):
                assert second.initial == first.final
            if not t.truncated and t.jumps:
                last = t.jumps[-1][1].final
                assert len(allowed_final_indices(last, p)) == 0

    def test_truncation_flag(self):
        # blue-detuned ground start bounces between ladders indefinitely
        p = ModelParams.from_ratios(2.0, 1.6)
        t = sample_trajectory(DressedState("e", 40), p, seed=5, max_jumps=3)
        assert t.truncated
        assert len(t.jumps) == 3

    def test_seed_validation(self):
        p = ModelParams.from_ratios(0.0, 0.5)
        with pytest.raises(ValueError):
            sample_trajectory(DressedState("e", 0), p, seed=-1)
        with pytest.raises(ValueError):
            sample_trajectory(DressedState("e", 0), p, seed=2**64)
        with pytest.raises(ValueError):
            sample_trajectory(DressedState("e", 0), p, seed=0, max_jumps=0)


class TestSampleEnsemble:
    def test_streams_differ_and_reproduce(self):
        p = ModelParams.from_ratios(1.0, 0.5)
        ens = sample_ensemble(DressedState("e", 5), p, seed=31, n_trajectories=6)
        assert len(ens) == 6
        assert len({t.jumps[0][0] for t in ens}) == 6  # distinct first times
        again = sample_ensemble(DressedState("e", 5), p, seed=31, n_trajectories=6)
        assert ens == again

    def test_thread_count_invisible(self):
        p = ModelParams.from_ratios(1.0, 0.45)
        one = sample_ensemble(
            DressedState("e", 7), p, seed=11, n_trajectories=40, threads=1
        )
        many = sample_ensemble(
            DressedState("e", 7), p, seed=11, n_trajectories=40, threads=8
        )
        assert one == many

    def test_mean_waiting_time(self):
        p = ModelParams.from_ratios(1.0, 0.5)
        start = DressedState("e", 0)
        ens = sample_ensemble(start, p, seed=2024, n_trajectories=20_000, threads=4)
        times = np.array([t.jumps[0][0] for t in ens])
        mu = 1.0 / total_rate(start, p).total_over_gamma0
        sigma = mu / math.sqrt(len(times))
        assert abs(times.mean() - mu) <= 3.0 * sigma


class TestEmissionSpectrum:
    def test_uncoupled_single_line(self):
        p = ModelParams.from_ratios(0.0, 0.5)
        ens = sample_ensemble(DressedState("e", 0), p, seed=3, n_trajectories=200)
        spec = emission_spectrum(ens, bin_width=0.05)
        assert spec.total_photons == 200
        assert np.count_nonzero(spec.weights) == 1
        center = spec.bin_centers[int(np.argmax(spec.weights))]
        assert center == pytest.approx(1.0, abs=0.025)
        assert spec.weights.sum() == pytest.approx(1.0)

    def test_blue_detuned_fundamental_line(self):
        p = ModelParams.from_ratios(0.2, 2.0)
        ens = sample_ensemble(DressedState("g", 1), p, seed=9, n_trajectories=100)
        spec = emission_spectrum(ens, bin_width=0.05)
        # every trajectory's first photon sits at drive - bare = 1.0
        top = spec.bin_centers[int(np.argmax(spec.weights))]
        assert top == pytest.approx(1.0, abs=0.025)

    def test_comb_spacing(self):
        p = ModelParams.from_ratios(1.0, 0.45)
        ens = sample_ensemble(DressedState("e", 9), p, seed=17, n_trajectories=400)
        spec = emission_spectrum(ens, bin_width=0.45)
        populated = spec.bin_centers[spec.weights > 0]
        gaps = np.diff(np.sort(populated))
        # lines live on a lattice with the drive frequency as spacing
        assert np.allclose(gaps / 0.45, np.round(gaps / 0.45), atol=1e-9)

    def test_empty_input(self):
        spec = emission_spectrum([], bin_width=0.1)
        assert spec.total_photons == 0
        assert spec.weights.size == 0

    def test_bad_bin_width(self):
        with pytest.raises(ValueError):
            emission_spectrum([], bin_width=0.0)


class TestTrajectoryLog:
    def test_file_format_and_round_trip(self, tmp_path):
        p = ModelParams.from_ratios(1.0, 0.45)
        ens = sample_ensemble(DressedState("e", 6), p, seed=77, n_trajectories=5)
        path = tmp_path / "log.csv"
        write_trajectory_log(ens, path)
        lines = path.read_text().splitlines()
        assert lines[0].startswith("#")
        header = lines[0].lstrip("# ").split(",")
        assert header == [
            "trajectory_id",
            "jump_index",
            "time",
            "from_branch",
            "from_n",
            "to_branch",
            "to_n",
            "photon_freq",
        ]
        body = [line.split(",") for line in lines[1:]]
        assert len(body) == sum(len(t.jumps) for t in ens)
        # float fields round-trip exactly through repr
        first = body[0]
        tid, jidx = int(first[0]), int(first[1])
        assert float(first[2]) == ens[tid].jumps[jidx][0]
        assert float(first[7]) == ens[tid].jumps[jidx][1].photon_freq

    def test_custom_delimiter(self, tmp_path):
        p = ModelParams.from_ratios(0.0, 0.5)
        ens = sample_ensemble(DressedState("e", 0), p, seed=1, n_trajectories=2)
        path = tmp_path / "log.tsv"
        write_trajectory_log(ens, path, delimiter="\t")
        lines = path.read_text().splitlines()
        assert "\t" in lines[1]
        assert len(lines[1].split("\t")) == 8
