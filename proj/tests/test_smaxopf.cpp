#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "maxopf/errors.hpp"
#include "maxopf/powerflow.hpp"
#include "maxopf/smaxopf.hpp"
#include "support.hpp"

using namespace maxopf;
using namespace maxopf::testing;

namespace {

SimplifiedLimits lossless(std::shared_ptr<const RadialNetwork> net, bool lower = true) {
  return make_limits(std::move(net), {}, LossMode::zero, OperatingLimits{}, lower);
}

std::vector<double> ones(std::size_t n) { return std::vector<double>(n, 1.0); }

}  // namespace

TEST_CASE("loss bound modes") {
  const auto net = share(single_edge(0.01, 0.01, 4.6));
  const PathIndex paths(*net);
  const std::vector<Customer> cs{{1, {0.03, 0.04}, 1, false}};
  CHECK(loss_bounds(*net, paths, cs, LossMode::zero, 0.81).lbar[0] == 0.0);
  CHECK(loss_bounds(*net, paths, cs, LossMode::capacity, 0.81).lbar[0] ==
        doctest::Approx(26.123456790123452).epsilon(1e-14));
  CHECK(loss_bounds(*net, paths, cs, LossMode::aggregate, 0.81).lbar[0] ==
        doctest::Approx(0.00308641975308642).epsilon(1e-14));
  CHECK_THROWS_AS(loss_bounds(*net, paths, cs, LossMode::zero, 0.0), ValueError);
  CHECK(parse_loss_mode("capacity") == LossMode::capacity);
  CHECK(to_string(LossMode::aggregate) == "aggregate");
  CHECK_THROWS_AS(parse_loss_mode("bogus"), ValueError);
}

TEST_CASE("lossless limits") {
  const auto net = share(chain(3, 0.01, 0.02, 0.7));
  const SimplifiedLimits lim = lossless(net);
  for (EdgeIndex e = 0; e < 3; ++e) {
    CHECK(lim.c_hat[e] == 0.7);
    CHECK(lim.v_upper[e] == doctest::Approx(0.095));
    CHECK(lim.v_lower[e] == doctest::Approx(0.5 * (1.0 - 1.21)));
  }
}

TEST_CASE("loss magnitude on a two-edge chain") {
  const auto net = share(chain(2, 0.01, 0.01, 1.0));
  const SimplifiedLimits lim = simplified_limits(net, LossBounds{{1.0, 1.0}}, OperatingLimits{});
  CHECK(lim.l_hat[0] == doctest::Approx(0.0282842712474619).epsilon(1e-12));
  CHECK(lim.c_hat[0] == doctest::Approx(1.0 - 0.0282842712474619).epsilon(1e-12));
  CHECK(lim.l_hat[1] == doctest::Approx(std::abs(Complex(0.01, 0.01))));
  // lower window accumulates |z|^2 l along the root path
  CHECK(lim.v_lower[1] == doctest::Approx(0.5 * (1.0 - 1.21 + 2 * 0.0002)));

  const SimplifiedLimits tight = simplified_limits(net, LossBounds{{1000.0, 1000.0}}, OperatingLimits{});
  CHECK(tight.c_hat[0] == 0.0);
}

TEST_CASE("constraint evaluation examples") {
  const auto net = share(single_edge(0.01, 0.01, 5.0));
  SimplifiedLimits lim = lossless(net);
  lim.check_voltage = false;

  const std::vector<Customer> two{{1, {3, 0}, 1, false}, {1, {4, 0}, 1, false}};
  CHECK(eval_constraints(lim, two, std::vector<double>{0, 0}).feasible);
  const ConstraintEval both = eval_constraints(lim, two, ones(2));
  CHECK_FALSE(both.feasible);
  CHECK(both.flow[0] == Complex(7, 0));

  const auto unit = share(single_edge(1, 1, 100.0));
  SimplifiedLimits vlim = lossless(unit);
  vlim.v_upper.assign(1, 0.5);
  const std::vector<Customer> one{{1, {1, 0}, 1, false}};
  const ConstraintEval ev = eval_constraints(vlim, one, ones(1));
  CHECK(ev.voltage[0] == doctest::Approx(1.0));
  CHECK_FALSE(ev.voltage_ok);
  CHECK_FALSE(ev.feasible);
  CHECK_THROWS_AS(eval_constraints(vlim, one, std::vector<double>{}), ValueError);
}

TEST_CASE("ties count as feasible") {
  const auto net = share(single_edge(0.01, 0.01, 5.0));
  SimplifiedLimits lim = lossless(net);
  lim.check_voltage = false;
  const std::vector<Customer> cs{{1, {3, 0}, 1, false}, {1, {2, 0}, 1, false}};
  CHECK(eval_constraints(lim, cs, ones(2)).feasible);
}

TEST_CASE("leaf edges") {
  const RadialNetwork c = chain(2, 1, 1, 1);
  const auto leaves = leaf_edges(c);
  REQUIRE(leaves.size() == 1);
  CHECK(c.edge(leaves[0]).to == 2);

  const RadialNetwork star({{0, 1, 1, 1, 1}, {1, 2, 1, 1, 1}, {1, 3, 1, 1, 1}, {1, 4, 1, 1, 1}});
  CHECK(leaf_edges(star).size() == 3);
  CHECK(leaf_edges(network38()).size() == 7);
}

TEST_CASE("leaf reduction precondition controls which voltage edges are checked") {
  const auto net = share(chain(3, 0.01, 0.01, 10.0));
  const SimplifiedLimits lim = lossless(net, false);
  const std::vector<Customer> aligned{{2, {0.1, 0.05}, 1, false}};
  CHECK(leaf_reduction_holds(lim, aligned));
  CHECK(eval_constraints(lim, aligned, ones(1)).checked_voltage_edges == lim.leaves);

  const std::vector<Customer> opposed{{2, {0.0, -0.1}, 1, false}};
  CHECK_FALSE(leaf_reduction_holds(lim, opposed));
  CHECK(eval_constraints(lim, opposed, ones(1)).checked_voltage_edges.size() == 3);
}

TEST_CASE("single edge without voltage is the complex knapsack test") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const double cap = rng.uniform(0.5, 3.0);
    const auto net = share(single_edge(0.01, 0.02, cap));
    SimplifiedLimits lim = lossless(net);
    lim.check_voltage = false;
    std::vector<Customer> cs;
    std::vector<double> x;
    Complex sum;
    for (int k = 0; k < 6; ++k) {
      cs.push_back({1, random_demand(rng, 0, 1, deg(80)), 1, false});
      x.push_back(rng.uniform() < 0.5 ? 1.0 : 0.0);
      sum += cs.back().s * x.back();
    }
    CHECK(eval_constraints(lim, cs, x).feasible == (std::abs(sum) <= cap + kConstraintSlack));
  }
}

TEST_CASE("tracker agrees with direct evaluation") {
  Rng rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const auto net = share(random_network(rng, 2 + rng.index(10)));
    std::vector<Customer> cs;
    const std::size_t n = 1 + rng.index(8);
    for (std::size_t k = 0; k < n; ++k) {
      cs.push_back({random_bus(rng, *net), random_demand(rng, 0.05, 0.6, deg(rng.uniform() < 0.5 ? 30 : 150)), 1,
                    false});
    }
    const SimplifiedLimits lim =
        make_limits(net, cs, LossMode::aggregate, OperatingLimits{}, rng.uniform() < 0.5);
    ConstraintTracker tracker(lim, cs);
    std::vector<double> x(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      std::vector<double> next = x;
      next[k] = 1.0;
      const bool fits = tracker.fits(k);
      CHECK(fits == eval_constraints(lim, cs, next).feasible);
      if (fits && rng.uniform() < 0.6) {
        tracker.add(k);
        x[k] = 1.0;
      }
      CHECK(tracker.feasible() == eval_constraints(lim, cs, x).feasible);
    }
    // feasible() sees states that fits() would have refused
    for (std::size_t k = 0; k < n; ++k) {
      if (x[k] == 0.0) {
        tracker.add(k);
        x[k] = 1.0;
      }
    }
    CHECK(tracker.feasible() == eval_constraints(lim, cs, x).feasible);
    tracker.reset(x);
    CHECK(tracker.feasible() == eval_constraints(lim, cs, x).feasible);
  }
}

TEST_CASE("removal keeps feasibility inside a narrow cone") {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const auto net = share(random_network(rng, 2 + rng.index(10)));
    std::vector<Customer> cs;
    const std::size_t n = 2 + rng.index(6);
    for (std::size_t k = 0; k < n; ++k) cs.push_back({random_bus(rng, *net), random_demand(rng, 0.05, 0.5, deg(20)), 1, false});
    const SimplifiedLimits lim = make_limits(net, cs, LossMode::zero, OperatingLimits{}, false);
    std::vector<double> x(n);
    for (double& v : x) v = rng.uniform() < 0.7 ? 1.0 : 0.0;
    if (!eval_constraints(lim, cs, x).feasible) continue;
    for (std::size_t k = 0; k < n; ++k) {
      if (x[k] == 0.0) continue;
      std::vector<double> y = x;
      y[k] = 0.0;
      CHECK(eval_constraints(lim, cs, y).feasible);
    }
  }
}

TEST_CASE("capacity bounds with loss allowance imply exact capacity feasibility") {
  // When the realized losses stay under the bounds, the simplified capacity
  // constraint implies the exact one.
  Rng rng(17);
  int checked = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const auto net = share(random_network(rng, 2 + rng.index(10), {0.001, 0.05, 0.001, 0.05, 0.3, 1.5}));
    std::vector<Customer> cs;
    const std::size_t n = 1 + rng.index(8);
    for (std::size_t k = 0; k < n; ++k) cs.push_back({random_bus(rng, *net), random_demand(rng, 0.01, 0.4, deg(36)), 1, false});
    SimplifiedLimits lim = make_limits(net, cs, LossMode::capacity, OperatingLimits{}, false);
    lim.check_voltage = false;
    std::vector<double> x(n);
    for (double& v : x) v = rng.uniform() < 0.6 ? 1.0 : 0.0;
    if (!eval_constraints(lim, cs, x).feasible) continue;
    const FeasibilityCheck chk = opf_feasible(*net, cs, x, OperatingLimits{});
    if (!chk.state) continue;
    const PathIndex paths(*net);
    const LossBounds lb = loss_bounds(*net, paths, cs, LossMode::capacity, 0.81);
    bool within = true;
    for (EdgeIndex e = 0; e < net->edge_count(); ++e) within = within && chk.state->l[e] <= lb.lbar[e];
    if (!within) continue;
    ++checked;
    CHECK(chk.report.capacity_beta <= 1.0 + 1e-9);
  }
  CHECK(checked > 20);
}

TEST_CASE("reduced capacity limits") {
  const auto net = share(chain(2, 0.01, 0.01, 2.0));
  const SimplifiedLimits base = lossless(net);
  const SimplifiedLimits red = reduced_capacity_limits(base, 0.25);
  CHECK(red.c_hat[0] == doctest::Approx(1.5));
  CHECK(red.v_upper == base.v_upper);
  CHECK_THROWS_AS(reduced_capacity_limits(base, 1.5), ValueError);
}
