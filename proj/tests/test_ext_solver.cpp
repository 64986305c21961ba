#include <gtest/gtest.h>

#include <cmath>

#include "dsqueeze/d_solver.hpp"
#include "dsqueeze/ext_solver.hpp"

using namespace dsq;

namespace {

PairPotential harmonic_pair(double omega_pp = 1.0) {
  PairPotential p;
  p.kind = PotentialKind::harmonic;
  p.omega_pp = omega_pp;
  return p;
}

// Normalized ground state of the separable oscillator in reduced coordinates; the a
// direction counts twice in the cylindrical geometries (x and y).
double gaussian_profile(Transition t, double w, double wpp, double a, double b) {
  const auto geo = geometry_of(t);
  const double free = wpp;
  const double trapped = std::sqrt(w * w + wpp * wpp);
  double Oa = free, Ob = trapped;
  if (geo == ReducedGeometry::cylindrical_trap_perp) std::swap(Oa, Ob);
  const double na = geo == ReducedGeometry::planar_trap_y ? std::pow(Oa / M_PI, 0.25) : std::sqrt(Oa / M_PI);
  return na * std::pow(Ob / M_PI, 0.25) * std::exp(-0.5 * (Oa * a * a + Ob * b * b));
}

}  // namespace

TEST(ExternalHarmonic, ThreeToTwoAtUnitFrequency) {
  const auto sol = solve_relative_ground(harmonic_pair(), TrapConfig::symmetric({3, 2}, 1.0));
  EXPECT_NEAR(sol.E_rel, 1.0 + 0.5 * std::sqrt(2.0), 1e-6);
  EXPECT_NEAR(sol.E_0, 0.5, 1e-14);
  EXPECT_NEAR(sol.E_ext, 0.5 + 0.5 * std::sqrt(2.0), 1e-6);
}

TEST(ExternalHarmonic, MatchesClosedFormEnergyForEveryTransition) {
  for (Transition t : {Transition{3, 2}, Transition{3, 1}, Transition{2, 1}})
    for (double w : {0.1, 0.5, 1.0, 2.0, 5.0})
      for (double wpp : {0.7, 1.3}) {
        const auto trap = TrapConfig::symmetric(t, w);
        const auto sol = solve_relative_ground(harmonic_pair(wpp), trap);
        const double expected = wpp * energy_ext_ho(trap.scenario.omega, wpp, OccupationSet::ground(), 2);
        EXPECT_NEAR(sol.E_ext, expected, 1e-6) << t.label() << " w=" << w << " wpp=" << wpp;
      }
}

TEST(ExternalHarmonic, ProfileMatchesGaussian) {
  for (Transition t : {Transition{3, 2}, Transition{3, 1}, Transition{2, 1}}) {
    const double w = 2.0;
    const auto sol = solve_relative_ground(harmonic_pair(), TrapConfig::symmetric(t, w));
    EXPECT_NEAR(sol.norm(), 1.0, 1e-6) << t.label();
    const auto psi = extract_profile(sol);
    const double sign = psi(0.0, 0.0) > 0.0 ? 1.0 : -1.0;
    for (double a : {0.0, 0.3, 0.9, 1.7})
      for (double b : {0.0, 0.4, 1.1, 2.0})
        EXPECT_NEAR(sign * psi(a, b), gaussian_profile(t, w, 1.0, a, b), 1e-4) << t.label() << " a=" << a << " b=" << b;
  }
}

TEST(ExternalSolution, ProfileIsEven) {
  const auto sol = solve_relative_ground(preset("G-small"), TrapConfig::symmetric({3, 1}, 1.0));
  const auto psi = extract_profile(sol);
  for (double a : {0.1, 0.8})
    for (double b : {0.2, 1.5}) {
      EXPECT_DOUBLE_EQ(psi(-a, b), psi(a, b));
      EXPECT_DOUBLE_EQ(psi(a, -b), psi(a, b));
    }
  EXPECT_NEAR(sol.norm(), 1.0, 1e-6);
}

TEST(ExternalSolution, FreePairApproachesThresholdFromAbove) {
  auto p = preset("G-large");
  p.V0 = 0.0;
  double prev = kInfinity;
  for (double L : {10.0, 20.0, 40.0}) {
    ExtGridSpec g;
    g.extent_a = L;
    g.extent_b = L;
    const auto sol = solve_relative_ground(p, TrapConfig::symmetric({3, 2}, 0.0), g);
    EXPECT_GT(sol.E_ext, 0.0) << L;
    EXPECT_LT(sol.E_ext, prev) << L;
    prev = sol.E_ext;
  }
  EXPECT_LT(prev, 0.01);
}

TEST(ExternalSolution, WeakTrapRecoversThreeDimensionalBinding) {
  const auto p = preset("G-large");
  HyperradialProblem pb;
  pb.N = 2;
  pb.d = 3.0;
  pb.potential = p;
  const double E3 = solve_ground(pb).energy;
  for (Transition t : {Transition{3, 2}, Transition{3, 1}}) {
    const auto sol = solve_relative_ground(p, TrapConfig::symmetric(t, 1e-4));
    EXPECT_NEAR(sol.E_ext, E3, 1e-4) << t.label();
  }
}

TEST(ExternalSolution, EnergyDecreasesWithTrapAndApproachesTargetDimension) {
  const auto p = preset("G-small");
  for (Transition t : {Transition{3, 2}, Transition{2, 1}}) {
    double prev = kInfinity;
    for (double w : {0.05, 0.2, 1.0, 5.0, 40.0}) {
      const auto sol = solve_relative_ground(p, TrapConfig::symmetric(t, w));
      EXPECT_LT(sol.E_ext, prev) << t.label() << " w=" << w;
      prev = sol.E_ext;
    }
    HyperradialProblem pb;
    pb.N = 2;
    pb.d = t.d_fin;
    pb.potential = p;
    const double Efin = solve_ground(pb).energy;
    EXPECT_GT(prev, Efin) << t.label();
  }
}

TEST(ExternalSolution, TinyExplicitBoxRaisesAccuracyError) {
  ExtGridSpec g;
  g.extent_a = 1.5;
  g.extent_b = 1.5;
  EXPECT_THROW(solve_relative_ground(preset("G-small"), TrapConfig::symmetric({3, 2}, 1.0), g), AccuracyError);
}

TEST(SqueezedEnergy, SubtractsActiveZeroPoint) {
  EXPECT_DOUBLE_EQ(squeezed_energy(1.7, TrapConfig::symmetric({3, 2}, 1.0), 2), 1.2);
  EXPECT_DOUBLE_EQ(squeezed_energy(3.0, TrapConfig::symmetric({3, 1}, 2.0), 2), 1.0);
  EXPECT_DOUBLE_EQ(squeezed_energy(-0.5, TrapConfig::symmetric({2, 1}, 0.0), 2), -0.5);
  EXPECT_THROW(squeezed_energy(1.0, TrapConfig::symmetric({3, 2}, 1.0), 3), UnsupportedError);
}

TEST(Geometry, OnlyTwoBodyTransitions) {
  EXPECT_EQ(geometry_of({3, 2}), ReducedGeometry::cylindrical_trap_z);
  EXPECT_EQ(geometry_of({3, 1}), ReducedGeometry::cylindrical_trap_perp);
  EXPECT_EQ(geometry_of({2, 1}), ReducedGeometry::planar_trap_y);
  EXPECT_THROW(geometry_of({3, 0}), UnsupportedError);
}

TEST(TrapConfig, FromLength) {
  const auto trap = TrapConfig::from_bho({3, 2}, 2.0);
  EXPECT_NEAR(trap.omega_ho(), 0.25, 1e-15);
  EXPECT_NEAR(trap.b_ho(), 2.0, 1e-14);
  EXPECT_EQ(TrapConfig::from_bho({3, 2}, kInfinity).omega_ho(), 0.0);
  EXPECT_THROW(TrapConfig::from_bho({3, 2}, 0.0), DomainError);
}
