import math

import numpy as np
import pytest

from ccshare.geometry import (
    Layout,
    LogDistanceModel,
    Position,
    PropagationParams,
    Rect,
    Wall,
    four_room_layout,
    open_layout,
    path_gain_db,
    place_ues,
    wall_count,
)

from oracles import wall_count_oracle


class TestWallCount:
    def test_same_room_no_crossing(self, layout):
        assert wall_count(Position(5, 5), Position(20, 20), layout) == 0

    def test_horizontally_adjacent_rooms(self, layout):
        assert wall_count(Position(10, 10), Position(40, 10), layout) == 1

    def test_diagonal_rooms_through_center(self, layout):
        # crosses both partitions where they meet at (25, 25)
        assert wall_count(Position(10, 10), Position(40, 40), layout) == 2

    def test_endpoint_touch_counts_once(self, layout):
        # path ends exactly on the vertical partition
        assert wall_count(Position(10, 10), Position(25, 10), layout) == 1

    def test_matches_parametric_oracle_on_random_pairs(self, layout):
        rng = np.random.default_rng(7)
        for _ in range(10_000):
            a = Position(rng.uniform(0, 50), rng.uniform(0, 50))
            b = Position(rng.uniform(0, 50), rng.uniform(0, 50))
            assert wall_count(a, b, layout) == wall_count_oracle(a, b, layout)

    def test_open_layout_never_crosses(self):
        layout = open_layout()
        assert wall_count(Position(1, 1), Position(49, 49), layout) == 0


class TestPathGain:
    def test_los_closed_form_at_10m(self, params):
        layout = open_layout()
        # 18.7*log10(10) + 46.8 + 20*log10(5/5) = 65.5
        g = path_gain_db(Position(10, 10), Position(20, 10), layout, params)
        assert g == pytest.approx(-65.5, abs=1e-12)

    def test_nlos_with_one_wall_at_10m(self, layout, params):
        # 36.8 + 43.8 + 10 = 90.6 across the vertical partition
        g = path_gain_db(Position(20, 10), Position(30, 10), layout, params)
        assert g == pytest.approx(-90.6, abs=1e-12)

    def test_distance_clamped_to_minimum(self, params):
        layout = open_layout()
        at_min = path_gain_db(Position(5, 5), Position(5 + params.min_distance_m, 5), layout, params)
        closer = path_gain_db(Position(5, 5), Position(5.1, 5), layout, params)
        assert closer == pytest.approx(at_min)

    def test_symmetric(self, layout, params):
        rng = np.random.default_rng(3)
        for _ in range(100):
            a = Position(rng.uniform(0, 50), rng.uniform(0, 50))
            b = Position(rng.uniform(0, 50), rng.uniform(0, 50))
            assert path_gain_db(a, b, layout, params) == path_gain_db(b, a, layout, params)

    def test_monotone_in_distance_fixed_walls(self, params):
        layout = open_layout()
        origin = Position(0, 25)
        gains = [
            path_gain_db(origin, Position(d, 25), layout, params)
            for d in np.linspace(1, 49, 60)
        ]
        assert all(g1 >= g2 for g1, g2 in zip(gains, gains[1:]))

    def test_extra_wall_costs_exactly_its_loss(self, params):
        thin = Layout(50, 50, (Wall(25, 0, 25, 50, 7.5),), ())
        none = open_layout()
        a, b = Position(10, 10), Position(40, 10)
        with_wall = path_gain_db(a, b, thin, params)
        # compare against the same NLOS curve without the wall term
        nlos_only = -(params.nlos.loss_db(a.distance_to(b), params.carrier_freq_ghz))
        assert with_wall == pytest.approx(nlos_only - 7.5, abs=1e-12)

    def test_two_walls_add_both_losses(self, params):
        walls = (Wall(20, 0, 20, 50, 3.0), Wall(30, 0, 30, 50, 4.0))
        layout = Layout(50, 50, walls, ())
        a, b = Position(10, 10), Position(40, 10)
        g = path_gain_db(a, b, layout, params)
        nlos_only = -(params.nlos.loss_db(a.distance_to(b), params.carrier_freq_ghz))
        assert g == pytest.approx(nlos_only - 7.0, abs=1e-12)

    def test_shadowing_draw_shifts_gain(self, params):
        layout = open_layout()
        a, b = Position(5, 5), Position(15, 5)
        base = path_gain_db(a, b, layout, params)
        assert path_gain_db(a, b, layout, params, shadowing_db=2.5) == pytest.approx(base - 2.5)

    def test_frequency_term(self):
        params = PropagationParams(carrier_freq_ghz=2.5)
        layout = open_layout()
        g = path_gain_db(Position(0, 0), Position(10, 0), layout, params)
        expected = -(18.7 + 46.8 + 20 * math.log10(2.5 / 5.0))
        assert g == pytest.approx(expected, abs=1e-12)


class TestPlaceUes:
    def test_zero_count_gives_empty_list(self):
        region = (Rect(0, 0, 50, 50),)
        assert place_ues(0, region, np.random.default_rng(0)) == []

    def test_empty_region_rejected(self):
        with pytest.raises(ValueError):
            place_ues(3, (), np.random.default_rng(0))
        with pytest.raises(ValueError):
            place_ues(3, (Rect(1, 1, 1, 1),), np.random.default_rng(0))

    def test_uniform_mean_within_3_sigma(self):
        # mean of U(0,50) is 25 with sd 50/sqrt(12); 3 sigma of the sample
        # mean over 1000 draws is about 1.37
        region = (Rect(0, 0, 50, 50),)
        pts = place_ues(1000, region, np.random.default_rng(42))
        xs = np.array([p.x for p in pts])
        assert abs(xs.mean() - 25.0) < 1.5

    def test_diagonal_room_region_containment(self, layout):
        region = (layout.room(0), layout.room(3))
        pts = place_ues(500, region, np.random.default_rng(1))
        for p in pts:
            assert layout.room(0).contains(p) or layout.room(3).contains(p)

    def test_reproducible_under_fixed_seed(self):
        region = (Rect(0, 0, 50, 50),)
        a = place_ues(20, region, np.random.default_rng(9))
        b = place_ues(20, region, np.random.default_rng(9))
        assert a == b


class TestLayout:
    def test_default_layout_has_four_congruent_rooms(self, layout):
        assert len(layout.rooms) == 4
        areas = {r.area for r in layout.rooms}
        assert areas == {625.0}

    def test_wall_outside_building_rejected(self):
        with pytest.raises(ValueError):
            Layout(50, 50, (Wall(0, 0, 60, 0),), ())

    def test_negative_wall_loss_rejected(self):
        with pytest.raises(ValueError):
            Wall(0, 0, 10, 0, loss_db=-1.0)

    def test_invalid_propagation_params(self):
        with pytest.raises(ValueError):
            PropagationParams(min_distance_m=0.0)
        with pytest.raises(ValueError):
            PropagationParams(los=LogDistanceModel(-1.0, 46.8))
