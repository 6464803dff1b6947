"""Grid capacity solves checked against closed forms and basic set rules."""

import math

import numpy as np
import pytest

import gridfreq.geometry as G
from gridfreq import bounds
from gridfreq.errors import ValidationError
from gridfreq.solvers.capacity import capacity


def _point_setup(x0, h=1.0 / 128.0):
    dom = G.interval_domain(0.0, 1.0, h)
    return dom, G.ObstacleSet.from_point(dom, x0)


class TestIntervalClosedForms:
    """One pinned node in (a, b): the discrete minimizer is the two-sided
    linear ramp, whose energy equals the continuum value for every p."""

    def test_midpoint_p2(self):
        dom, obs = _point_setup(0.5)
        rep = capacity(dom, obs, 2.0)
        exact, lower = bounds.interval_point_capacity(2.0, 0.0, 1.0, 0.5)
        assert exact == 4.0 and lower == 4.0
        assert rep.value == pytest.approx(4.0, rel=1e-12)
        assert rep.value >= lower
        assert rep.converged

    def test_offset_point_p2(self):
        dom, obs = _point_setup(0.25)
        rep = capacity(dom, obs, 2.0)
        exact, lower = bounds.interval_point_capacity(2.0, 0.0, 1.0, 0.25)
        assert exact == pytest.approx(16.0 / 3.0, rel=1e-15)
        assert rep.value == pytest.approx(exact, rel=1e-12)
        assert rep.value >= lower

    def test_midpoint_p4(self):
        dom, obs = _point_setup(0.5)
        rep = capacity(dom, obs, 4.0)
        exact, lower = bounds.interval_point_capacity(4.0, 0.0, 1.0, 0.5)
        assert exact == 16.0 and lower == 16.0
        assert rep.value == pytest.approx(16.0, rel=1e-10)
        assert rep.value >= lower

    def test_midpoint_p1(self):
        dom, obs = _point_setup(0.5)
        rep = capacity(dom, obs, 1.0)
        exact, lower = bounds.interval_point_capacity(1.0, 0.0, 1.0, 0.5)
        assert exact == 2.0 and lower == 2.0
        assert rep.value == pytest.approx(2.0, rel=1e-9)
        assert rep.value >= lower

    def test_closed_form_dispatch_matches(self):
        pair = bounds.closed_form_capacities(
            "interval_point", p=4.0, a=0.0, b=1.0, x0=0.5
        )
        assert pair == bounds.interval_point_capacity(4.0, 0.0, 1.0, 0.5)


class TestDiskExamples:
    def test_small_core_in_unit_disk(self):
        # cap_2(B_eps; B_1) = 2 pi / log(1/eps) with eps = 0.01
        dom = G.build_domain(G.DomainSpec.disk(1.0, 1.0 / 256.0))
        obs = G.ObstacleSet.from_disk(dom, (0.0, 0.0), 0.01)
        rep = capacity(dom, obs, 2.0)
        target = bounds.disk_capacity_relative(0.01)
        assert target == pytest.approx(2.0 * math.pi / math.log(100.0), rel=1e-15)
        assert rep.value == pytest.approx(target, rel=0.05)
        assert rep.converged

    def test_p1_perimeter(self):
        # cap_1 of a solid disk is its perimeter; grid anisotropy and the
        # rasterized obstacle radius keep the value a few percent high.
        dom = G.build_domain(G.DomainSpec.disk(1.0, 1.0 / 64.0))
        obs = G.ObstacleSet.from_disk(dom, (0.0, 0.0), 0.4)
        rep = capacity(dom, obs, 1.0)
        target = 2.0 * math.pi * 0.4
        assert rep.value == pytest.approx(target, rel=0.06)
        assert rep.value >= target * 0.98
        assert rep.converged
        vals = rep.field.values
        assert vals.min() >= 0.0 and vals.max() <= 1.0


class TestSetRules:
    def test_monotone_in_obstacle(self):
        dom = G.build_domain(G.DomainSpec.disk(1.0, 1.0 / 64.0))
        small = G.ObstacleSet.from_disk(dom, (0.0, 0.0), 0.1)
        big = G.ObstacleSet.from_disk(dom, (0.0, 0.0), 0.3)
        assert small.count < big.count
        for p in (2.0, 3.0):
            c_small = capacity(dom, small, p).value
            c_big = capacity(dom, big, p).value
            assert c_small <= c_big + 1e-12

    def test_monotone_under_thickening(self):
        dom = G.interval_domain(0.0, 1.0, 1.0 / 64.0)
        x = dom.axis_coordinates(0)
        thin = G.ObstacleSet.from_mask(dom, np.abs(x - 0.5) <= 0.05)
        thick = G.ObstacleSet.from_mask(dom, np.abs(x - 0.5) <= 0.15)
        c_thin = capacity(dom, thin, 2.0).value
        c_thick = capacity(dom, thick, 2.0).value
        assert c_thin <= c_thick + 1e-12

    def test_field_clamped(self):
        dom = G.build_domain(G.DomainSpec.disk(1.0, 1.0 / 32.0))
        obs = G.ObstacleSet.from_disk(dom, (0.0, 0.0), 0.2)
        rep = capacity(dom, obs, 1.5)
        vals = rep.field.values
        assert vals.min() >= 0.0 and vals.max() <= 1.0
        assert np.all(vals[obs.mask()] == 1.0)
        assert np.all(vals[~dom.inside] == 0.0)

    def test_deterministic(self):
        dom = G.build_domain(G.DomainSpec.disk(1.0, 1.0 / 32.0))
        obs = G.ObstacleSet.from_disk(dom, (0.0, 0.0), 0.2)
        a = capacity(dom, obs, 3.0)
        b = capacity(dom, obs, 3.0)
        assert a.value == b.value
        assert np.array_equal(a.field.values, b.field.values)


class TestExtrapolation:
    def test_interval_exact_stays_exact(self):
        dom, obs = _point_setup(0.5)
        rep = capacity(dom, obs, 2.0, extrapolate=True)
        assert rep.extrapolated is not None
        assert rep.extrapolated == pytest.approx(4.0, rel=1e-11)

    def test_disk_smoke(self):
        dom = G.build_domain(G.DomainSpec.disk(1.0, 1.0 / 32.0))
        obs = G.ObstacleSet.from_disk(dom, (0.0, 0.0), 0.1)
        rep = capacity(dom, obs, 2.0, extrapolate=True)
        assert rep.extrapolated is not None
        assert math.isfinite(rep.extrapolated)
        assert rep.extrapolated > 0.0


class TestErrors:
    def test_bad_exponent(self):
        dom, obs = _point_setup(0.5)
        with pytest.raises(ValidationError, match="p >= 1"):
            capacity(dom, obs, 0.5)
        with pytest.raises(ValidationError, match="p >= 1"):
            capacity(dom, obs, math.inf)

    def test_obstacle_outside_inside_mask(self):
        dom = G.build_domain(G.DomainSpec.disk(1.0, 1.0 / 32.0))
        corner = np.argwhere(~dom.inside)[0]
        obs = G.ObstacleSet(dom, corner[None, :])
        with pytest.raises(ValidationError, match="inside the container"):
            capacity(dom, obs, 2.0)

    def test_grid_mismatch(self):
        dom = G.build_domain(G.DomainSpec.disk(1.0, 1.0 / 32.0))
        other = G.build_domain(G.DomainSpec.disk(1.0, 1.0 / 16.0))
        obs = G.ObstacleSet.from_disk(other, (0.0, 0.0), 0.2)
        with pytest.raises(ValidationError, match="match the container"):
            capacity(dom, obs, 2.0)
