#include "tableaus.hpp"

#include <quadmath.h>

#include <sstream>
#include <stdexcept>

namespace mpark {

namespace {

std::vector<Quad> mat_abs(const std::vector<Quad>& m) {
  std::vector<Quad> r(m.size());
  for (size_t i = 0; i < m.size(); ++i) r[i] = abs_s(m[i]);
  return r;
}

std::vector<Quad> mat_vec(const std::vector<Quad>& m, const std::vector<Quad>& v) {
  int n = static_cast<int>(v.size());
  std::vector<Quad> r(n, Quad(0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) r[i] += m[static_cast<size_t>(i) * n + j] * v[j];
  return r;
}

Quad dot(const std::vector<Quad>& a, const std::vector<Quad>& b) {
  Quad r = 0;
  for (size_t i = 0; i < a.size(); ++i) r += a[i] * b[i];
  return r;
}

std::vector<Quad> had(const std::vector<Quad>& a, const std::vector<Quad>& b) {
  std::vector<Quad> r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] * b[i];
  return r;
}

Quad parse_quad(const std::string& tok) { return strtoflt128(tok.c_str(), nullptr); }

}  // namespace

std::vector<Quad> MpTableau::a_tilde() const {
  std::vector<Quad> r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + a_eps[i];
  return r;
}

std::vector<Quad> MpTableau::b_tilde() const {
  std::vector<Quad> r(b.size());
  for (size_t i = 0; i < b.size(); ++i) r[i] = b[i] + b_eps[i];
  return r;
}

std::vector<Quad> MpTableau::c_tilde() const {
  std::vector<Quad> ones(stages, Quad(1));
  return mat_vec(a_tilde(), ones);
}

std::vector<Quad> MpTableau::c_eps() const {
  std::vector<Quad> ones(stages, Quad(1));
  return mat_vec(a_eps, ones);
}

std::string MpTableau::structure_error() const {
  for (int i = 0; i < stages; ++i) {
    for (int j = i + 1; j < stages; ++j)
      if (at_a(i, j) != 0 || at_ae(i, j) != 0) return "nonzero entry above the diagonal";
    if (at_a(i, i) != 0 && at_ae(i, i) != 0)
      return "stage " + std::to_string(i + 1) + " implicit in both precisions";
  }
  return {};
}

MpTableau imr_tableau(int corrections) {
  if (corrections < 0) throw std::invalid_argument("imr: corrections must be >= 0");
  int s = corrections + 1;
  MpTableau t;
  t.name = "imr";
  t.stages = s;
  t.corrections = corrections;
  t.design_order = 2;
  t.a.assign(static_cast<size_t>(s) * s, Quad(0));
  t.a_eps.assign(static_cast<size_t>(s) * s, Quad(0));
  t.b.assign(s, Quad(0));
  t.b_eps.assign(s, Quad(0));
  const Quad half = Quad(1) / Quad(2);
  t.a_eps[0] = half;
  for (int k = 1; k < s; ++k) t.a[static_cast<size_t>(k) * s + (k - 1)] = half;
  t.b[s - 1] = 1;
  return t;
}

Quad sdirk_gamma() { return (sqrtq(Quad(3)) + Quad(3)) / Quad(6); }

MpTableau sdirk_tableau(int m) {
  if (m < 1) throw std::invalid_argument("sdirk: m must be >= 1 (m=1 is uncorrected)");
  const Quad g = sdirk_gamma();
  const int s = 2 * m;
  MpTableau t;
  t.name = "sdirk";
  t.stages = s;
  t.corrections = m - 1;
  t.design_order = 3;
  t.a.assign(static_cast<size_t>(s) * s, Quad(0));
  t.a_eps.assign(static_cast<size_t>(s) * s, Quad(0));
  t.b.assign(s, Quad(0));
  t.b_eps.assign(s, Quad(0));
  auto A = [&](int i, int j) -> Quad& { return t.a[static_cast<size_t>(i) * s + j]; };
  auto Ae = [&](int i, int j) -> Quad& { return t.a_eps[static_cast<size_t>(i) * s + j]; };

  Ae(0, 0) = g;                                     // first implicit solve, low precision
  for (int k = 1; k < m; ++k) A(k, k - 1) = g;      // corrections of stage one
  Ae(m, m) = g;                                     // second implicit solve
  A(m, m - 1) = Quad(1) - Quad(2) * g;
  for (int k = m + 1; k < 2 * m; ++k) {             // corrections of stage two
    A(k, m - 1) = Quad(1) - Quad(2) * g;
    A(k, k - 1) = g;
  }
  t.b[m - 1] = Quad(1) / Quad(2);
  t.b[2 * m - 1] = Quad(1) / Quad(2);
  return t;
}

MpTableau novel_a_tableau() {
  MpTableau t;
  t.name = "novela";
  t.stages = 4;
  t.corrections = 0;
  t.design_order = 3;
  t.a.assign(16, Quad(0));
  t.a_eps.assign(16, Quad(0));
  t.b.assign(4, Quad(0));
  t.b_eps.assign(4, Quad(0));
  auto A = [&](int i, int j) -> Quad& { return t.a[static_cast<size_t>(i) * 4 + j]; };
  auto Ae = [&](int i, int j) -> Quad& { return t.a_eps[static_cast<size_t>(i) * 4 + j]; };
  // published literals, kept verbatim
  A(1, 0) = parse_quad("0.211324865405187");
  A(2, 0) = parse_quad("0.709495523817170");
  A(2, 1) = parse_quad("-0.865314250619423");
  A(3, 0) = parse_quad("0.705123240545107");
  A(3, 1) = parse_quad("0.943370088535775");
  A(3, 2) = parse_quad("-0.859818194486069");
  Ae(0, 0) = parse_quad("0.788675134594813");
  Ae(2, 0) = parse_quad("0.051944240459852");
  Ae(2, 2) = parse_quad("0.788675134594813");
  t.b[1] = Quad(1) / Quad(2);
  t.b[3] = Quad(1) / Quad(2);
  return t;
}

MpTableau make_tableau(const std::string& method, int corrections) {
  if (method == "imr") return imr_tableau(corrections);
  if (method == "sdirk") return sdirk_tableau(corrections + 1);
  if (method == "novela") {
    if (corrections != 0)
      throw std::invalid_argument("novela: corrections are not supported (use 0)");
    return novel_a_tableau();
  }
  throw std::invalid_argument("unknown method '" + method + "' (expected imr|sdirk|novela)");
}

OrderReport order_report(const MpTableau& t) {
  OrderReport rep;
  rep.design_order = t.design_order;

  const std::vector<Quad> ones(t.stages, Quad(1));
  const auto bt = t.b_tilde();
  const auto be = t.b_eps;
  const auto at = t.a_tilde();
  const auto ae = t.a_eps;
  const auto ct = t.c_tilde();
  const auto ce = t.c_eps();

  rep.scheme["btilde*e-1"] = to_double(dot(bt, ones) - Quad(1));
  rep.scheme["btilde*ctilde-1/2"] = to_double(dot(bt, ct) - Quad(1) / Quad(2));
  rep.scheme["btilde*(ctilde.ctilde)-1/3"] = to_double(dot(bt, had(ct, ct)) - Quad(1) / Quad(3));
  rep.scheme["btilde*Atilde*ctilde-1/6"] = to_double(dot(bt, mat_vec(at, ct)) - Quad(1) / Quad(6));

  struct Row {
    const char* ns_key;
    const char* sm_key;
  };
  // the fifteen expansion rows, in table order (eps*dt .. eps^3*dt^3)
  static const Row kRows[15] = {
      {"abs(b_eps)*e", "b_eps*e"},
      {"abs(b_eps)*abs(ctilde)", "b_eps*ctilde"},
      {"abs(btilde)*abs(c_eps)", "btilde*c_eps"},
      {"abs(b_eps)*abs(c_eps)", "b_eps*c_eps"},
      {"abs(b_eps)*abs(Atilde)*abs(ctilde)", "b_eps*Atilde*ctilde"},
      {"abs(btilde)*abs(A_eps)*abs(ctilde)", "btilde*A_eps*ctilde"},
      {"abs(btilde)*abs(Atilde)*abs(c_eps)", "btilde*Atilde*c_eps"},
      {"abs(b_eps)*(ctilde.ctilde)", "b_eps*(ctilde.ctilde)"},
      {"abs(btilde)*(abs(ctilde).abs(c_eps))", "btilde*(ctilde.c_eps)"},
      {"abs(b_eps)*abs(A_eps)*abs(ctilde)", "b_eps*A_eps*ctilde"},
      {"abs(b_eps)*abs(Atilde)*abs(c_eps)", "b_eps*Atilde*c_eps"},
      {"abs(btilde)*abs(A_eps)*abs(c_eps)", "btilde*A_eps*c_eps"},
      {"abs(b_eps)*(abs(c_eps).abs(ctilde))", "b_eps*(c_eps.ctilde)"},
      {"abs(b_eps)*abs(A_eps)*abs(c_eps)", "b_eps*A_eps*c_eps"},
      {"abs(b_eps)*(c_eps.c_eps)", "b_eps*(c_eps.c_eps)"},
  };

  auto eval = [&](bool ns) {
    const auto B = ns ? mat_abs(bt) : bt;
    const auto Be = ns ? mat_abs(be) : be;
    const auto At = ns ? mat_abs(at) : at;
    const auto Ae2 = ns ? mat_abs(ae) : ae;
    const auto Ct = ns ? mat_abs(ct) : ct;
    const auto Ce = ns ? mat_abs(ce) : ce;
    std::vector<Quad> vals;
    vals.push_back(dot(Be, ones));
    vals.push_back(dot(Be, Ct));
    vals.push_back(dot(B, Ce));
    vals.push_back(dot(Be, Ce));
    vals.push_back(dot(Be, mat_vec(At, Ct)));
    vals.push_back(dot(B, mat_vec(Ae2, Ct)));
    vals.push_back(dot(B, mat_vec(At, Ce)));
    vals.push_back(dot(Be, had(ct, ct)));  // squares, no abs needed
    vals.push_back(dot(B, had(Ct, Ce)));
    vals.push_back(dot(Be, mat_vec(Ae2, Ct)));
    vals.push_back(dot(Be, mat_vec(At, Ce)));
    vals.push_back(dot(B, mat_vec(Ae2, Ce)));
    vals.push_back(dot(Be, had(Ce, Ct)));
    vals.push_back(dot(Be, mat_vec(Ae2, Ce)));
    vals.push_back(dot(Be, had(ce, ce)));
    return vals;
  };

  const auto ns_vals = eval(true);
  const auto sm_vals = eval(false);
  for (int i = 0; i < 15; ++i) {
    rep.nonsmooth[kRows[i].ns_key] = to_double(ns_vals[i]);
    rep.smooth[kRows[i].sm_key] = to_double(sm_vals[i]);
  }
  return rep;
}

std::string tableau_to_text(const MpTableau& t) {
  std::ostringstream os;
  os << "name " << t.name << "\n";
  os << "stages " << t.stages << "\n";
  os << "corrections " << t.corrections << "\n";
  os << "design_order " << t.design_order << "\n";
  char buf[64];
  auto put = [&](Quad v) {
    quadmath_snprintf(buf, sizeof buf, "%.36Qg", v);
    os << buf;
  };
  auto put_mat = [&](const char* label, const std::vector<Quad>& m, int rows) {
    os << label << "\n";
    int cols = static_cast<int>(m.size()) / rows;
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < cols; ++j) {
        if (j) os << " ";
        put(m[static_cast<size_t>(i) * cols + j]);
      }
      os << "\n";
    }
  };
  put_mat("A", t.a, t.stages);
  put_mat("A_eps", t.a_eps, t.stages);
  put_mat("b", t.b, 1);
  put_mat("b_eps", t.b_eps, 1);
  return os.str();
}

MpTableau tableau_from_text(const std::string& text) {
  std::istringstream is(text);
  MpTableau t;
  std::string key;
  auto need = [&](const std::string& want) {
    if (!(is >> key) || key != want)
      throw std::invalid_argument("tableau text: expected '" + want + "'");
  };
  need("name");
  is >> t.name;
  need("stages");
  is >> t.stages;
  need("corrections");
  is >> t.corrections;
  need("design_order");
  is >> t.design_order;
  if (t.stages < 1 || t.stages > 64) throw std::invalid_argument("tableau text: bad stage count");
  auto read_mat = [&](const char* label, std::vector<Quad>& m, size_t count) {
    need(label);
    m.resize(count);
    std::string tok;
    for (size_t i = 0; i < count; ++i) {
      if (!(is >> tok)) throw std::invalid_argument("tableau text: truncated matrix");
      m[i] = parse_quad(tok);
    }
  };
  size_t s = static_cast<size_t>(t.stages);
  read_mat("A", t.a, s * s);
  read_mat("A_eps", t.a_eps, s * s);
  read_mat("b", t.b, s);
  read_mat("b_eps", t.b_eps, s);
  return t;
}

}  // namespace mpark
