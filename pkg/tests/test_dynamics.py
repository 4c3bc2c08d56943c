"""Orbits, good reduction, canonical heights (both routes), preperiodicity."""

import math
import random
from fractions import Fraction

import pytest

from arithdyn.dynamics import (RationalMap,
                               canonical_height_global,
                               canonical_height_local,
                               commuting_height_agreement, good_reduction_at,
                               iterate, northcott_bound, orbit_gcds,
                               padic_gcd_valuations,
                               preperiodic_points_rational)
from arithdyn.errors import DegenerateMapError, InvalidInputError
from arithdyn.polyforms import BinaryForm
from arithdyn.projective import ProjPointQ


def make_map(u, v):
    d = len(u) - 1
    return RationalMap(BinaryForm(d, u), BinaryForm(d, v))


POWER2 = make_map((1, 0, 0), (0, 0, 1))           # z^2
Z2P1 = make_map((1, 0, 1), (0, 0, 1))             # z^2 + 1
Z2M1 = make_map((1, 0, -1), (0, 0, 1))            # z^2 - 1
CHEB2 = make_map((1, 0, -2), (0, 0, 1))           # z^2 - 2
CHEB3 = make_map((1, 0, -3, 0), (0, 0, 0, 1))     # z^3 - 3z


def random_map(rng, d=2, cmax=9):
    while True:
        u = [rng.randint(-cmax, cmax) for _ in range(d + 1)]
        v = [rng.randint(-cmax, cmax) for _ in range(d + 1)]
        try:
            return make_map(u, v)
        except (InvalidInputError, DegenerateMapError):
            continue


class TestRationalMap:
    def test_joint_content_normalized(self):
        f = make_map((2, 0, 2), (0, 0, 2))
        assert f.U.coeffs == (1, 0, 1) and f.V.coeffs == (0, 0, 1)

    def test_degenerate_rejected(self):
        with pytest.raises(DegenerateMapError):
            make_map((0, 1, 0), (0, 1, 0))

    def test_power_detection(self):
        assert POWER2.is_unit_power_pair()
        assert make_map((0, 0, 1), (1, 0, 0)).is_unit_power_pair()
        assert not Z2P1.is_unit_power_pair()
        assert not make_map((2, 0, 0), (0, 0, 1)).is_unit_power_pair()

    def test_json_round_trip(self):
        f = RationalMap.from_json({"d": 2, "U": [1, 0, 1], "V": [0, 0, 1]})
        assert f.to_json() == {"d": 2, "U": [1, 0, 1], "V": [0, 0, 1]}


class TestGoodReduction:
    def test_power_map_everywhere(self):
        for p in (2, 3, 5, 97):
            assert good_reduction_at(POWER2, p)

    def test_z2_plus_1_everywhere(self):
        assert Z2P1.res == 1
        for p in (2, 3, 5, 7):
            assert good_reduction_at(Z2P1, p)

    def test_bad_prime_matches_resultant(self):
        f = make_map((1, 0, 0), (0, 0, 2))  # Res = 4
        assert abs(f.res) == 4
        assert not good_reduction_at(f, 2)
        assert good_reduction_at(f, 3)
        assert f.bad_primes == (2,)

    def test_random_maps_consistent(self):
        rng = random.Random(31)
        for _ in range(20):
            f = random_map(rng)
            for p in (2, 3, 5, 7, 11):
                assert good_reduction_at(f, p) == (f.res % p != 0)


class TestIterate:
    def test_power_map_cycle(self):
        rec = iterate(POWER2, ProjPointQ((1, -1)))
        assert rec.status == "cycle"
        assert rec.cycle_entry == 1 and rec.cycle_length == 1
        assert [p.coords for p in rec.points[:3]] == [(1, -1), (1, 1), (1, 1)]

    def test_z2_minus_1_two_cycle(self):
        rec = iterate(Z2M1, ProjPointQ((0, 1)))
        assert rec.status == "cycle"
        assert rec.cycle_entry == 0 and rec.cycle_length == 2
        # z = -1 normalizes to [1:-1] (first nonzero coordinate positive)
        assert [p.coords for p in rec.points] == [(0, 1), (1, -1), (0, 1)]

    def test_z2_plus_1_escapes(self):
        rec = iterate(Z2P1, ProjPointQ((0, 1)), height_cap=3.0)
        assert rec.status == "escaping"
        hs = [p.height() for p in rec.points]
        assert hs[1] == pytest.approx(0.0)       # 1
        assert hs[2] == pytest.approx(math.log(2))
        assert hs[3] == pytest.approx(math.log(5))

    def test_orbit_record_invariant(self):
        rng = random.Random(77)
        for _ in range(15):
            f = random_map(rng)
            x = ProjPointQ((rng.randint(-9, 9), rng.randint(1, 9)))
            rec = iterate(f, x, n_max=6, height_cap=80.0)
            for k in range(len(rec.gcds)):
                a, b = rec.points[k].coords
                a2, b2 = rec.points[k + 1].coords
                g = rec.gcds[k]
                # positive gcd; sign normalization may flip both coordinates
                assert (f.U(a, b), f.V(a, b)) in \
                    ((g * a2, g * b2), (-g * a2, -g * b2))
                assert math.gcd(abs(a2), abs(b2)) == 1

    def test_budget_exhausted(self):
        rec = iterate(Z2P1, ProjPointQ((3, 1)), n_max=100, height_cap=1e9,
                      digit_budget=10)
        assert rec.status == "budget-exhausted"


class TestPadicLedger:
    def test_matches_exact_gcds(self):
        rng = random.Random(13)
        checked = 0
        while checked < 12:
            f = random_map(rng)
            if abs(f.res) == 1:
                continue
            x = ProjPointQ((rng.randint(-9, 9), rng.randint(1, 9)))
            rec = iterate(f, x, n_max=7, height_cap=1e9)
            K = len(rec.gcds)
            if K < 3:
                continue
            assert orbit_gcds(f, x, K) == rec.gcds
            checked += 1

    def test_gcd_divides_resultant(self):
        rng = random.Random(14)
        for _ in range(10):
            f = random_map(rng)
            x = ProjPointQ((rng.randint(-20, 20), rng.randint(1, 20)))
            rec = iterate(f, x, n_max=6, height_cap=1e9)
            for g in rec.gcds:
                assert f.res % g == 0

    def test_good_reduction_gives_zeros(self):
        vals = padic_gcd_valuations(Z2P1, ProjPointQ((3, 5)), 7, 20)
        assert vals == [0] * 20


class TestCanonicalHeightGlobal:
    def test_power_map_exact(self):
        x = ProjPointQ((2, 3))
        res = canonical_height_global(POWER2, x, 1e-10)
        assert res.value == x.height() and res.error == 0.0 and res.n_used == 0

    def test_preperiodic_zero(self):
        res = canonical_height_global(Z2M1, ProjPointQ((0, 1)), 1e-10)
        assert res.value == 0.0 and res.error == 0.0

    def test_cross_check_z2p1(self):
        g = canonical_height_global(Z2P1, ProjPointQ((0, 1)), 1e-6)
        l = canonical_height_local(Z2P1, ProjPointQ((0, 1)), 1e-6)
        assert abs(g.value - l.total) <= g.error + l.total_error
        assert g.error <= 1e-6 and l.total_error <= 1e-6

    def test_tolerance_scaling(self):
        g1 = canonical_height_global(Z2P1, ProjPointQ((1, 2)), 1e-4)
        g2 = canonical_height_global(Z2P1, ProjPointQ((1, 2)), 1e-9)
        assert abs(g1.value - g2.value) <= g1.error + g2.error


class TestCanonicalHeightLocal:
    def test_power_map_ledger(self):
        led = canonical_height_local(POWER2, ProjPointQ((2, 3)), 1e-10)
        assert led.finite_places == {}
        assert led.archimedean == (math.log(3), 0.0)
        assert led.total == math.log(3) and led.total_error == 0.0

    def test_preperiodic_total_zero(self):
        led = canonical_height_local(Z2M1, ProjPointQ((1, 1)), 1e-9)
        assert abs(led.total) <= led.total_error + 1e-9

    def test_support_subset_bad_primes(self):
        rng = random.Random(23)
        for _ in range(8):
            f = random_map(rng)
            x = ProjPointQ((rng.randint(-9, 9), rng.randint(1, 9)))
            led = canonical_height_local(f, x, 1e-6)
            assert set(led.finite_places) <= set(f.bad_primes)

    def test_good_reduction_finite_part_zero(self):
        led = canonical_height_local(Z2P1, ProjPointQ((7, 5)), 1e-8)
        assert led.finite_places == {}

    def test_matches_global_random(self):
        rng = random.Random(37)
        for _ in range(10):
            f = random_map(rng, cmax=5)
            x = ProjPointQ((rng.randint(-7, 7), rng.randint(1, 7)))
            g = canonical_height_global(f, x, 1e-7)
            l = canonical_height_local(f, x, 1e-7)
            assert abs(g.value - l.total) <= g.error + l.total_error + 1e-12


class TestIndependentOracles:
    """Pin the interval machinery against raw high-precision iteration and
    pure exact-integer orbits (independent of _iv_eval_form)."""

    def test_escape_rate_against_raw_iteration(self):
        import mpmath as mpm
        from arithdyn.dynamics import escape_rate_exact_pair
        for u, v, a, b in (((1, 0, 1), (0, 0, 1), 3, 5),
                           ((2, -1, 3), (1, 1, 1), 2, 7),
                           ((1, 2, 0), (0, 1, 1), -4, 3)):
            f = make_map(u, v)
            K = 30
            with mpm.workdps(80):
                X, Y = mpm.mpf(a), mpm.mpf(b)
                for _ in range(K):
                    X, Y = f.U(X, Y), f.V(X, Y)
                raw = float(mpm.log(max(abs(X), abs(Y))) / mpm.mpf(2) ** K)
            val, err = escape_rate_exact_pair(f, a, b, 1e-10)
            tail = f.compacity_tail_constant() / 2 ** K
            assert abs(val - raw) <= err + tail + 1e-12

    def test_local_total_against_exact_orbit(self):
        # |hhat - d^-n h(x_n)| <= c_max/(d^n (d-1)) with exact integers only
        f = make_map((2, -1, 3), (1, 1, 1))
        x = ProjPointQ((1, 2))
        n = 16
        rec = iterate(f, x, n_max=n, height_cap=1e9, digit_budget=10 ** 6)
        assert len(rec.points) == n + 1
        approx = rec.points[n].height() / f.degree ** n
        c_up, c_lo = f.functoriality_constants()
        budget = max(c_up, c_lo) / (f.degree ** n * (f.degree - 1))
        led = canonical_height_local(f, x, 1e-10)
        assert abs(led.total - approx) <= budget + led.total_error + 1e-12

    def test_global_interval_continuation_against_exact(self):
        # force the interval phase with a tiny exact-phase allowance and
        # compare against the pure exact value at the same n
        import arithdyn.dynamics as dyn
        f = make_map((1, 0, 1), (0, 0, 1))
        x = ProjPointQ((1, 2))
        g_full = canonical_height_global(f, x, 1e-9)
        old = dyn.EXACT_PHASE_BITS
        dyn.EXACT_PHASE_BITS = 16
        try:
            g_iv = canonical_height_global(f, x, 1e-9)
        finally:
            dyn.EXACT_PHASE_BITS = old
        assert abs(g_full.value - g_iv.value) <= g_full.error + g_iv.error


class TestCanonicalHeightProperties:
    def test_multiplicativity_under_f(self):
        # hhat(f x) = d hhat(x) on a hundred random (map, point) pairs
        rng = random.Random(53)
        for _ in range(25):
            f = random_map(rng, cmax=4)
            for _ in range(4):
                x = ProjPointQ((rng.randint(-6, 6), rng.randint(1, 6)))
                tol = 1e-8
                hx = canonical_height_local(f, x, tol).total
                hfx = canonical_height_local(f, f.apply(x), tol).total
                assert hfx == pytest.approx(f.degree * hx,
                                            abs=2 * (f.degree + 1) * tol)

    def test_nonnegative_and_close_to_naive(self):
        rng = random.Random(59)
        for _ in range(12):
            f = random_map(rng, cmax=6)
            x = ProjPointQ((rng.randint(-20, 20), rng.randint(1, 20)))
            led = canonical_height_local(f, x, 1e-7)
            assert led.total >= -led.total_error - 1e-12
            c_up, c_lo = f.functoriality_constants()
            c = max(c_up, c_lo)
            assert abs(led.total - x.height()) <= c / (f.degree - 1) + 1e-6

    def test_zero_iff_preperiodic_small_sample(self):
        for f in (POWER2, Z2M1, Z2P1, CHEB2):
            for coords in ((0, 1), (1, 1), (1, 0), (2, 1), (1, -2), (3, 2)):
                x = ProjPointQ(coords)
                led = canonical_height_local(f, x, 1e-9)
                rec = iterate(f, x, n_max=500,
                              height_cap=northcott_bound(f) + 5.0)
                if rec.status == "cycle":
                    assert abs(led.total) <= led.total_error + 1e-9
                else:
                    assert led.total > 1e-6


class TestPreperiodic:
    def test_power_map_list(self):
        pts = preperiodic_points_rational(POWER2)
        assert {p.coords for p in pts} == {(0, 1), (1, 0), (1, 1), (1, -1)}

    def test_z2_plus_1_only_infinity(self):
        pts = preperiodic_points_rational(Z2P1)
        assert {p.coords for p in pts} == {(1, 0)}

    def test_z2_minus_1_against_oracle(self):
        pts = {p.coords for p in preperiodic_points_rational(Z2M1)}
        # independent Fraction-arithmetic oracle over the same bound
        bound = northcott_bound(Z2M1)
        hmax = int(math.exp(bound)) + 1
        want = set()
        for den in range(0, hmax + 1):
            for num in range(-hmax, hmax + 1):
                if den == 0:
                    if num != 1:
                        continue
                    want.add((1, 0))  # infinity is fixed
                    continue
                if math.gcd(abs(num), den) != 1:
                    continue
                seen = set()
                z = Fraction(num, den)
                finite = True
                for _ in range(200):
                    if z in seen:
                        break
                    seen.add(z)
                    if max(abs(z.numerator), z.denominator) > 10 ** 9:
                        finite = False
                        break
                    z = z * z - 1
                else:
                    finite = False
                if finite:
                    want.add(ProjPointQ((num, den)).coords)
        assert pts == want


class TestCommuting:
    def test_identical_maps(self):
        rep = commuting_height_agreement(Z2P1, Z2P1, tol=1e-9)
        assert rep.max_gap == 0.0

    def test_power_pair_exact(self):
        f = POWER2
        g = make_map((1, 0, 0, 0), (0, 0, 0, 1))  # z^3
        rep = commuting_height_agreement(f, g, tol=1e-9)
        assert rep.max_gap <= 1e-9

    def test_chebyshev_pair(self):
        rep = commuting_height_agreement(CHEB2, CHEB3, tol=1e-6)
        assert rep.max_gap <= 1e-6

    def test_non_commuting_rejected(self):
        with pytest.raises(InvalidInputError):
            commuting_height_agreement(Z2P1, CHEB3)
