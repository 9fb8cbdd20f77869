#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "precision.hpp"
#include "tableaus.hpp"

using namespace mpark;

namespace {

double d(Quad q) { return to_double(q); }

const double kGamma = 0.7886751345948129;  // (sqrt(3)+3)/6

}  // namespace

TEST_CASE("imr tableau m=0 is the one-stage midpoint rule") {
  MpTableau t = imr_tableau(0);
  CHECK(t.stages == 1);
  CHECK(d(t.a_eps[0]) == 0.5);
  CHECK(d(t.a[0]) == 0.0);
  CHECK(d(t.b[0]) == 1.0);
  CHECK(d(t.b_eps[0]) == 0.0);
  CHECK(t.structure_error().empty());
}

TEST_CASE("imr tableau m=1 appends one explicit correction stage") {
  MpTableau t = imr_tableau(1);
  CHECK(t.stages == 2);
  CHECK(d(t.at_ae(0, 0)) == 0.5);
  CHECK(d(t.at_ae(0, 1)) == 0.0);
  CHECK(d(t.at_ae(1, 1)) == 0.0);
  CHECK(d(t.at_a(1, 0)) == 0.5);
  CHECK(d(t.b[0]) == 0.0);
  CHECK(d(t.b[1]) == 1.0);
  CHECK(t.structure_error().empty());
}

TEST_CASE("imr corrections never change the scheme residuals") {
  for (int m = 0; m <= 4; ++m) {
    OrderReport rep = order_report(imr_tableau(m));
    // last stage has ctilde = 1/2 exactly, so these are exactly zero
    CHECK(rep.scheme["btilde*e-1"] == 0.0);
    CHECK(rep.scheme["btilde*ctilde-1/2"] == 0.0);
    CHECK(rep.nonsmooth["abs(b_eps)*e"] == 0.0);
  }
}

TEST_CASE("sdirk m=1 matches the two-stage scheme") {
  MpTableau t = sdirk_tableau(1);
  CHECK(t.stages == 2);
  CHECK(t.corrections == 0);
  CHECK(d(t.at_ae(0, 0)) == doctest::Approx(kGamma).epsilon(1e-15));
  CHECK(d(t.at_ae(1, 1)) == doctest::Approx(kGamma).epsilon(1e-15));
  CHECK(d(t.at_a(1, 0)) == doctest::Approx(1.0 - 2.0 * kGamma).epsilon(1e-12));
  CHECK(d(t.b[0]) == 0.5);
  CHECK(d(t.b[1]) == 0.5);
  CHECK(t.structure_error().empty());
}

TEST_CASE("sdirk consistency holds to third order") {
  OrderReport rep = order_report(sdirk_tableau(1));
  CHECK(std::fabs(rep.scheme["btilde*e-1"]) < 1e-14);
  CHECK(std::fabs(rep.scheme["btilde*ctilde-1/2"]) < 1e-14);
  CHECK(std::fabs(rep.scheme["btilde*(ctilde.ctilde)-1/3"]) < 1e-14);
  CHECK(std::fabs(rep.scheme["btilde*Atilde*ctilde-1/6"]) < 1e-14);
}

TEST_CASE("sdirk m=1 keeps the gamma-sized nonsmooth residual") {
  OrderReport rep = order_report(sdirk_tableau(1));
  CHECK(rep.nonsmooth["abs(btilde)*abs(c_eps)"] == doctest::Approx(kGamma).epsilon(1e-15));
  // one correction moves the low-precision stages off the output weights
  OrderReport rep2 = order_report(sdirk_tableau(2));
  CHECK(rep2.nonsmooth["abs(btilde)*abs(c_eps)"] == 0.0);
  OrderReport rep3 = order_report(sdirk_tableau(3));
  CHECK(rep3.nonsmooth["abs(btilde)*abs(c_eps)"] == 0.0);
}

TEST_CASE("sdirk corrections preserve the scheme residuals") {
  OrderReport base = order_report(sdirk_tableau(1));
  for (int m = 2; m <= 4; ++m) {
    OrderReport rep = order_report(sdirk_tableau(m));
    for (const auto& [k, v] : base.scheme) CHECK(std::fabs(rep.scheme.at(k) - v) < 1e-13);
  }
}

TEST_CASE("sdirk m=0 is rejected") {
  CHECK_THROWS_AS(sdirk_tableau(0), std::invalid_argument);
}

TEST_CASE("novela carries the published coefficients") {
  MpTableau t = novel_a_tableau();
  CHECK(t.stages == 4);
  CHECK(d(t.at_ae(0, 0)) == 0.788675134594813);
  CHECK(d(t.at_ae(2, 0)) == 0.051944240459852);
  CHECK(d(t.at_ae(2, 2)) == 0.788675134594813);
  CHECK(d(t.at_a(1, 0)) == 0.211324865405187);
  CHECK(d(t.at_a(3, 2)) == -0.859818194486069);
  CHECK(d(t.b[1]) == 0.5);
  CHECK(d(t.b[3]) == 0.5);
  for (int i = 0; i < 4; ++i) CHECK(d(t.b_eps[i]) == 0.0);
  CHECK(t.structure_error().empty());
}

TEST_CASE("novela order profile: third order scheme, second order nonsmooth") {
  OrderReport rep = order_report(novel_a_tableau());
  CHECK(rep.scheme["btilde*e-1"] == 0.0);
  CHECK(std::fabs(rep.scheme["btilde*ctilde-1/2"]) < 1e-12);
  CHECK(std::fabs(rep.scheme["btilde*(ctilde.ctilde)-1/3"]) < 1e-12);
  CHECK(std::fabs(rep.scheme["btilde*Atilde*ctilde-1/6"]) < 1e-12);

  CHECK(rep.nonsmooth["abs(b_eps)*e"] == 0.0);

  // smooth perturbation rows vanish through eps*dt^3 ...
  for (const char* key : {"b_eps*e", "b_eps*ctilde", "btilde*c_eps", "b_eps*c_eps",
                          "b_eps*Atilde*ctilde", "btilde*A_eps*ctilde", "btilde*Atilde*c_eps",
                          "b_eps*(ctilde.ctilde)", "btilde*(ctilde.c_eps)"})
    CHECK(std::fabs(rep.smooth.at(key)) < 1e-12);

  // ... while the non-smooth eps*dt^3 block does not vanish
  double ns3 = std::fabs(rep.nonsmooth.at("abs(btilde)*abs(Atilde)*abs(c_eps)")) +
               std::fabs(rep.nonsmooth.at("abs(btilde)*abs(A_eps)*abs(ctilde)")) +
               std::fabs(rep.nonsmooth.at("abs(btilde)*(abs(ctilde).abs(c_eps))"));
  CHECK(ns3 > 0.1);
}

TEST_CASE("every generated tableau zeroes the b_eps rows exactly") {
  std::vector<MpTableau> all;
  for (int m = 0; m <= 3; ++m) all.push_back(imr_tableau(m));
  for (int m = 1; m <= 4; ++m) all.push_back(sdirk_tableau(m));
  all.push_back(novel_a_tableau());
  for (const auto& t : all) {
    OrderReport rep = order_report(t);
    for (const auto& [key, value] : rep.nonsmooth)
      if (key.rfind("abs(b_eps)", 0) == 0) CHECK(value == 0.0);
  }
}

TEST_CASE("order report covers exactly the fifteen table rows") {
  OrderReport rep = order_report(novel_a_tableau());
  CHECK(rep.scheme.size() == 4);
  CHECK(rep.nonsmooth.size() == 15);
  CHECK(rep.smooth.size() == 15);
}

TEST_CASE("order report is stable under a consistent stage relabeling") {
  MpTableau t = novel_a_tableau();
  // permute stages (reversal); the result is no longer lower-triangular but
  // the contractions are permutation invariant
  int s = t.stages;
  MpTableau perm = t;
  std::vector<int> p(s);
  for (int i = 0; i < s; ++i) p[i] = s - 1 - i;
  for (int i = 0; i < s; ++i) {
    perm.b[i] = t.b[p[i]];
    perm.b_eps[i] = t.b_eps[p[i]];
    for (int j = 0; j < s; ++j) {
      perm.a[i * s + j] = t.a[p[i] * s + p[j]];
      perm.a_eps[i * s + j] = t.a_eps[p[i] * s + p[j]];
    }
  }
  OrderReport r1 = order_report(t);
  OrderReport r2 = order_report(perm);
  for (const auto& [k, v] : r1.scheme) CHECK(r2.scheme.at(k) == doctest::Approx(v).epsilon(1e-14));
  for (const auto& [k, v] : r1.nonsmooth)
    CHECK(r2.nonsmooth.at(k) == doctest::Approx(v).epsilon(1e-14));
  for (const auto& [k, v] : r1.smooth) CHECK(r2.smooth.at(k) == doctest::Approx(v).epsilon(1e-14));
}

TEST_CASE("make_tableau maps corrections across families") {
  CHECK(make_tableau("imr", 2).stages == 3);
  CHECK(make_tableau("sdirk", 0).stages == 2);   // uncorrected = scheme m=1
  CHECK(make_tableau("sdirk", 2).stages == 6);   // two corrections = scheme m=3
  CHECK(make_tableau("novela", 0).stages == 4);
  CHECK_THROWS_AS(make_tableau("novela", 1), std::invalid_argument);
  CHECK_THROWS_AS(make_tableau("rk4", 0), std::invalid_argument);
}

TEST_CASE("tableau text serialization round-trips") {
  for (const auto& t : {imr_tableau(2), sdirk_tableau(3), novel_a_tableau()}) {
    MpTableau back = tableau_from_text(tableau_to_text(t));
    CHECK(back.name == t.name);
    CHECK(back.stages == t.stages);
    CHECK(back.corrections == t.corrections);
    CHECK(back.design_order == t.design_order);
    for (size_t i = 0; i < t.a.size(); ++i) {
      CHECK(back.a[i] == t.a[i]);
      CHECK(back.a_eps[i] == t.a_eps[i]);
    }
    for (int i = 0; i < t.stages; ++i) CHECK(back.b[i] == t.b[i]);
  }
  CHECK_THROWS_AS(tableau_from_text("name x\nstages nope"), std::invalid_argument);
}
