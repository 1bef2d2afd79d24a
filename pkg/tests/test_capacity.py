import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cachecap import (
    CharEquation,
    ScenarioError,
    analyze_network,
    char_eq_value,
    effective_catalog,
    equation_for_node,
    network_capacity,
    node_capacity,
    optimal_distribution,
    solve_characteristic,
    solve_characteristic_full,
)
from cachecap.model import FileClass, Link, Network, Node

from conftest import random_terms, scale_times, single_node_network

FIG1_TERMS = ((10, 1.0), (10**7, 10.0))
FIG2_TERMS = ((10, 1.0), (10, 2.0), (10**7, 10.0))
QUAD_TERMS = ((2, 1.0), (1, 2.0))
SQRT2P1 = 1 + math.sqrt(2)


class TestCharEqValue:
    def test_fig1_equation_near_one_at_published_root(self):
        value = char_eq_value(CharEquation(terms=FIG1_TERMS), 10.01)
        assert abs(value - 1.0) < 1e-3

    def test_at_one_equals_total_file_count(self):
        assert char_eq_value(CharEquation(terms=FIG1_TERMS), 1.0) == 10000010.0

    def test_quadratic_root_hits_one(self):
        value = char_eq_value(CharEquation(terms=QUAD_TERMS), SQRT2P1)
        assert abs(value - 1.0) < 1e-12

    def test_below_one_rejected(self):
        with pytest.raises(ValueError, match="x must be >= 1"):
            char_eq_value(CharEquation(terms=QUAD_TERMS), 0.5)

    def test_empty_equation_evaluates_to_zero(self):
        assert char_eq_value(CharEquation(terms=()), 3.0) == 0.0

    def test_huge_argument_does_not_overflow(self):
        value = char_eq_value(CharEquation(terms=FIG1_TERMS), 1e300)
        assert math.isfinite(value) and 0.0 <= value < 1e-200


class TestSolveCharacteristic:
    def test_fig1_root(self):
        assert solve_characteristic(CharEquation(terms=FIG1_TERMS)) == pytest.approx(
            10.01, abs=0.01
        )

    def test_fig2_root(self):
        assert solve_characteristic(CharEquation(terms=FIG2_TERMS)) == pytest.approx(
            2**3.449, abs=0.05
        )

    def test_single_file_root_is_one(self):
        assert solve_characteristic(CharEquation(terms=((1, 5.0),))) == 1.0

    def test_single_class_closed_form(self):
        assert solve_characteristic(CharEquation(terms=((4, 2.0),))) == 2.0

    def test_empty_equation_has_no_root(self):
        assert solve_characteristic(CharEquation(terms=())) is None

    @pytest.mark.parametrize("tol", [0.0, -1e-9, float("nan")])
    def test_invalid_tolerance_rejected(self, tol):
        with pytest.raises(ValueError):
            solve_characteristic(CharEquation(terms=QUAD_TERMS), rel_tol=tol)

    def test_residual_within_bound_on_random_equations(self):
        rng = random.Random(7)
        for _ in range(200):
            terms = tuple(random_terms(rng))
            solve = solve_characteristic_full(CharEquation(terms=terms))
            if solve.x0 is not None and solve.x0 > 1.0:
                assert solve.residual <= 1e-9


class TestNodeCapacity:
    def test_fig1_reader(self, fig1):
        assert node_capacity(fig1, "w2") == pytest.approx(3.324, abs=1e-3)

    def test_fig1_server_cannot_read(self, fig1):
        assert node_capacity(fig1, "w1") == 0.0

    def test_quadratic_catalog(self):
        net, node = single_node_network(QUAD_TERMS)
        assert node_capacity(net, node) == pytest.approx(math.log2(SQRT2P1), abs=1e-5)

    def test_unknown_node_rejected(self, fig1):
        with pytest.raises(ScenarioError):
            node_capacity(fig1, "nope")


class TestNetworkCapacity:
    def test_fig2_total(self, fig2):
        assert network_capacity(fig2) == pytest.approx(6.898, abs=2e-3)

    def test_fig1_total_is_the_single_reader(self, fig1):
        assert network_capacity(fig1) == pytest.approx(3.324, abs=1e-3)

    def test_empty_network(self):
        assert network_capacity(Network(classes=(), nodes=(), links=())) == 0.0

    def test_analyze_network_sums_per_node(self, fig2):
        result = analyze_network(fig2)
        total = sum(nc.capacity_bits_per_time for nc in result.per_node.values())
        assert result.network_capacity == total
        for nc in result.per_node.values():
            if nc.x0 is not None and nc.x0 > 1.0:
                assert nc.capacity_bits_per_time == math.log2(nc.x0)
                assert nc.residual <= 1e-9
            else:
                assert nc.capacity_bits_per_time == 0.0


class TestOptimalDistribution:
    def test_quadratic_per_file_probabilities(self):
        net, node = single_node_network(QUAD_TERMS)
        dist = optimal_distribution(net, node)
        assert dist.file_probability["c0"] == pytest.approx(0.414214, abs=1e-6)
        assert dist.file_probability["c1"] == pytest.approx(0.171573, abs=1e-6)
        # class c0 has two files at the same probability
        assert dist.class_mass["c0"] == pytest.approx(2 * 0.414214, abs=2e-6)

    def test_single_class_is_uniform(self):
        net, node = single_node_network([(4, 2.0)])
        dist = optimal_distribution(net, node)
        assert dist.file_probability["c0"] == pytest.approx(0.25, abs=1e-12)
        assert dist.class_mass["c0"] == pytest.approx(1.0, abs=1e-12)

    def test_fig1_reader_masses(self, fig1):
        dist = optimal_distribution(fig1, "w2")
        assert dist.class_mass["own"] == pytest.approx(0.999001, abs=1e-4)
        assert dist.class_mass["lib"] == pytest.approx(0.000999, abs=1e-4)

    def test_zero_capacity_node_rejected(self, fig1):
        with pytest.raises(ScenarioError, match="zero capacity"):
            optimal_distribution(fig1, "w1")

    def test_masses_sum_to_one_on_random_catalogs(self):
        rng = random.Random(11)
        for _ in range(100):
            net, node = single_node_network(random_terms(rng))
            try:
                dist = optimal_distribution(net, node)
            except ScenarioError:
                continue  # one-file catalogs have no optimum
            assert abs(sum(dist.class_mass.values()) - 1.0) <= 1e-9

    def test_distribution_invariant_under_class_relabeling(self):
        terms = [(3, 1.5), (2, 4.0), (1, 0.5)]
        net, node = single_node_network(terms)
        renamed = Network(
            classes=tuple(FileClass(id="x" + fc.id, count=fc.count) for fc in net.classes),
            nodes=(Node(id=node, stores=frozenset("x" + c for c in net.nodes[0].stores)),),
            links=tuple(
                Link(
                    reader=l.reader,
                    provider=l.provider,
                    time=l.time,
                    classes=frozenset("x" + c for c in l.classes),
                )
                for l in net.links
            ),
        )
        base = optimal_distribution(net, node)
        relabeled = optimal_distribution(renamed, node)
        for cid, mass in base.class_mass.items():
            assert relabeled.class_mass["x" + cid] == mass


class TestStructuralProperties:
    def test_slower_replica_leaves_capacity_unchanged(self):
        base = {
            "classes": [{"id": "c", "count": 3}],
            "nodes": [{"id": "p", "stores": ["c"]}, {"id": "q", "stores": ["c"]}, {"id": "r"}],
            "links": [{"reader": "r", "provider": "p", "time": 5}],
        }
        from cachecap import build_network

        before = node_capacity(build_network(base), "r")
        base["links"].append({"reader": "r", "provider": "q", "time": 7})
        assert node_capacity(build_network(base), "r") == before

    def test_faster_replica_strictly_increases_capacity(self):
        from cachecap import build_network

        base = {
            "classes": [{"id": "c", "count": 3}],
            "nodes": [{"id": "p", "stores": ["c"]}, {"id": "q", "stores": ["c"]}, {"id": "r"}],
            "links": [{"reader": "r", "provider": "p", "time": 5}],
        }
        before = node_capacity(build_network(base), "r")
        base["links"].append({"reader": "r", "provider": "q", "time": 3})
        assert node_capacity(build_network(base), "r") > before

    def test_shared_content_degenerates_to_the_two_node_value(self, fig1, fig2_shared):
        # identical peer content: each peer's equation collapses to the
        # two-node one, so the capacities agree exactly
        expected = node_capacity(fig1, "w2")
        assert node_capacity(fig2_shared, "w2") == expected
        assert node_capacity(fig2_shared, "w3") == expected
        assert node_capacity(fig2_shared, "w2") == pytest.approx(3.324, abs=1e-3)

    def test_time_scaling_rescales_capacity(self, fig1, fig2, three_file):
        rng = random.Random(23)
        nets = [fig1, fig2, three_file]
        for _ in range(20):
            nets.append(single_node_network(random_terms(rng))[0])
        for net in nets:
            base = network_capacity(net)
            for s in (0.5, 2.0, 3.7):
                scaled = network_capacity(scale_times(net, s))
                assert scaled == pytest.approx(base / s, rel=1e-9, abs=1e-12)


@settings(max_examples=80, deadline=None)
@given(
    st.lists(
        st.tuples(st.integers(1, 100), st.floats(0.1, 20.0, allow_nan=False)),
        min_size=1,
        max_size=5,
    ),
    st.floats(1.0, 40.0, allow_nan=False),
    st.floats(0.01, 10.0, allow_nan=False),
)
def test_char_eq_value_strictly_decreasing(terms, x, step):
    eq = CharEquation(terms=tuple(terms))
    assert char_eq_value(eq, x) > char_eq_value(eq, x + step)


def test_equation_for_node_uses_min_times(fig2_shared):
    eq = equation_for_node(fig2_shared, "w2")
    assert sorted(eq.terms) == [(10, 1.0), (10**7, 10.0)]
    catalog = effective_catalog(fig2_shared, "w2")
    assert catalog.min_times() == {"own": 1.0, "lib": 10.0}
