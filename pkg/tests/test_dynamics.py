import pytest
from hypothesis import given, settings, strategies as st

from ivtdds import dynamics
from ivtdds.dynamics import (OrbitStatus, attractor_of, canonical_cycle, classify_collatz_like,
                             enumerate_collatz_like, iterate_orbit, ivt_step)
from ivtdds.errors import DivergedOrbit

COLLATZ_P3 = (0, 1, 2, 6, 7, 8, 9, 10, 11)


class TestOrbit:
    def test_route_16(self):
        o = iterate_orbit(ivt_step(3, 8), 16)
        assert o.transient == (16, 20, 6)
        assert o.cycle == (2, 0)
        assert attractor_of(o).representative == 0

    def test_fixed_point(self):
        o = iterate_orbit(ivt_step(3, 21), 40)
        assert o.transient == () and o.cycle == (40,)

    def test_diverged(self):
        o = iterate_orbit(lambda y: 2 * y + 1, 1, value_cap=1000)
        assert o.status is OrbitStatus.DIVERGED
        with pytest.raises(DivergedOrbit):
            attractor_of(o)

    def test_cap_hit(self):
        o = iterate_orbit(lambda y: y + 1, 0, max_iter=50)
        assert o.status is OrbitStatus.CAP_HIT
        assert len(o.transient) == 51

    def test_bad_max_iter(self):
        with pytest.raises(ValueError):
            iterate_orbit(lambda y: y, 0, max_iter=0)

    def test_canonical_cycle(self):
        assert canonical_cycle((5, 2, 7)) == (2, 7, 5)

    @settings(max_examples=300)
    @given(st.sampled_from([2, 3]).flatmap(lambda p: st.tuples(
        st.just(p), st.integers(0, p**p - 1), st.integers(0, p**5 - 1))))
    def test_eventually_periodic(self, args):
        p, j, start = args
        o = iterate_orbit(ivt_step(p, j), start)
        assert o.converged
        vals = o.values()
        assert len(set(vals)) == len(vals)
        step = ivt_step(p, j)
        assert step(vals[-1]) == o.cycle[0]


class TestClassify:
    @pytest.mark.parametrize("j", range(27))
    def test_p3(self, j):
        v = classify_collatz_like(3, j)
        assert v.is_collatz_like == (j in COLLATZ_P3)
        if not v.is_collatz_like:
            assert v.witness is not None and v.witness_reason

    def test_j7_three_cycle(self):
        v = classify_collatz_like(3, 7)
        assert v.attractor.cycle == (0, 1, 2)
        assert not classify_collatz_like(3, 7, strict=True).is_collatz_like

    def test_second_attractor_witness(self):
        v = classify_collatz_like(3, 21)
        assert (v.witness, v.witness_reason) == (1, "second-attractor")

    def test_scan_floor(self):
        with pytest.raises(ValueError):
            classify_collatz_like(3, 0, scan_limit=8)

    @pytest.mark.parametrize("p", [2, 3])
    def test_horizon_stability(self, p):
        """Verdicts do not change when the scan grows from p^4 to p^5."""
        for j in range(p**p):
            a = classify_collatz_like(p, j, p**4 - 1)
            b = classify_collatz_like(p, j, p**5 - 1)
            assert a.is_collatz_like == b.is_collatz_like
            if a.is_collatz_like:
                assert a.attractor.cycle == b.attractor.cycle


class TestCensus:
    def test_p3(self):
        c = enumerate_collatz_like(3)
        assert c.rules == COLLATZ_P3
        assert c.consistency() == {"p^(p-1)": True, "p^(p-1)-1": False}

    def test_p2(self):
        c = enumerate_collatz_like(2)
        assert c.rules == (0, 1)
        assert c.claimed_count_minus_one == 1 != c.count

    def test_strict_p3(self):
        # a fixed-point attractor needs f(0) = 0, otherwise 0 sits on a longer cycle
        assert enumerate_collatz_like(3, strict=True).rules == (0, 6, 9)

    def test_sweep(self):
        s = dynamics.sweep_basins(ivt_step(3, 21), range(5))
        assert s.cycles == {i: (i,) for i in range(5)}
        s = dynamics.sweep_basins(lambda y: y + 1, [0], max_iter=10)
        assert s.failures == {0: OrbitStatus.CAP_HIT}
