"""Free-boundary Poincare constant solver."""

import math

import numpy as np
import pytest

import gridfreq.geometry as G
from gridfreq.bounds import Exponents, mu_lower_bound
from gridfreq.errors import ValidationError
from gridfreq.solvers.neumann import (
    neumann_constant,
    neumann_quotient,
    optimal_shift,
)

# (j'_{1,1})^2: square of the first positive zero of J_1'
DISK_NEUMANN = 3.38995771667
PI_SQ = math.pi**2


class TestLaplacianCases:
    def test_disk(self):
        dom = G.build_domain(G.DomainSpec.disk(1.0, 1.0 / 64.0))
        rep = neumann_constant(dom, Exponents(2, 2.0, 2.0))
        assert rep.value == pytest.approx(DISK_NEUMANN, rel=0.02)
        assert rep.converged
        assert rep.field.convention == "free"

    def test_square_converges_from_above(self):
        # the rasterized square is one cell short per side, so the value
        # overshoots pi^2 by O(h) and improves under refinement
        vals = []
        for n in (32, 64):
            dom = G.build_domain(G.DomainSpec.square(1.0, 1.0 / n))
            vals.append(neumann_constant(dom, Exponents(2, 2.0, 2.0)).value)
        assert vals[0] > PI_SQ and vals[1] > PI_SQ
        assert abs(vals[1] - PI_SQ) < abs(vals[0] - PI_SQ)
        assert vals[1] == pytest.approx(PI_SQ, rel=0.04)


class TestGeneralExponents:
    @pytest.mark.parametrize("p,q", [(2.0, 4.0), (3.0, 4.0), (1.5, 2.0)])
    def test_disk_above_convex_lower_bound(self, p, q):
        dom = G.build_domain(G.DomainSpec.disk(1.0, 1.0 / 16.0))
        rep = neumann_constant(dom, Exponents(2, p, q))
        assert rep.converged
        bound = mu_lower_bound(Exponents(2, p, q), math.pi, 2.0)
        assert rep.value >= bound

    def test_value_matches_reported_field(self):
        dom = G.build_domain(G.DomainSpec.disk(1.0, 1.0 / 16.0))
        rep = neumann_constant(dom, Exponents(2, 2.0, 4.0))
        again = neumann_quotient(rep.field.values, dom, 2.0, 4.0)
        assert rep.value == pytest.approx(again, rel=1e-12)

    def test_deterministic(self):
        dom = G.build_domain(G.DomainSpec.disk(1.0, 1.0 / 16.0))
        a = neumann_constant(dom, Exponents(2, 3.0, 4.0))
        b = neumann_constant(dom, Exponents(2, 3.0, 4.0))
        assert a.value == b.value
        assert np.array_equal(a.field.values, b.field.values)


class TestOptimalShift:
    def test_mean_and_median(self):
        vals = np.array([0.0, 1.0, 5.0])
        assert optimal_shift(vals, 2.0) == pytest.approx(2.0)
        assert optimal_shift(vals, 1.0) == 1.0

    def test_general_q_is_stationary(self):
        rng = np.random.default_rng(3)
        for q in (1.5, 3.0, 6.0):
            vals = rng.normal(size=200)
            t = optimal_shift(vals, q)
            obj = lambda s: np.sum(np.abs(vals - s) ** q)
            assert obj(t) <= obj(t + 1e-6) and obj(t) <= obj(t - 1e-6)

    def test_constant_input(self):
        assert optimal_shift(np.full(5, 3.25), 4.0) == 3.25


class TestDegenerate:
    def test_constant_field_rejected(self):
        dom = G.build_domain(G.DomainSpec.disk(1.0, 1.0 / 16.0))
        with pytest.raises(ValidationError, match="constant"):
            neumann_quotient(np.ones(dom.shape), dom, 2.0, 2.0)

    def test_returned_minimizer_not_constant(self):
        dom = G.build_domain(G.DomainSpec.disk(1.0, 1.0 / 16.0))
        rep = neumann_constant(dom, Exponents(2, 2.0, 4.0))
        inside = rep.field.values[dom.inside]
        assert inside.max() - inside.min() > 0.0


class TestErrors:
    def test_q_infinite(self):
        dom = G.build_domain(G.DomainSpec.disk(1.0, 1.0 / 16.0))
        with pytest.raises(ValidationError, match="q < inf"):
            neumann_constant(dom, Exponents(2, 3.0, math.inf))

    def test_q_below_p(self):
        dom = G.build_domain(G.DomainSpec.disk(1.0, 1.0 / 16.0))
        with pytest.raises(ValidationError, match="q >= p"):
            neumann_constant(dom, Exponents(2, 4.0, 2.0))
