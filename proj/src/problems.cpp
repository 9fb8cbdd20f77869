#include "problems.hpp"

#include <quadmath.h>

#include <cmath>
#include <memory>
#include <stdexcept>

namespace mpark {

namespace {

template <class Kern>
void bind_kernels(OdeProblem& p, const Kern& k) {
  p.k16.rhs = [k](std::span<const Half> y, std::span<Half> f) { k.rhs(y, f); };
  p.k16.jac = [k](std::span<const Half> y, std::span<Half> J) { k.jac(y, J); };
  p.k32.rhs = [k](std::span<const float> y, std::span<float> f) { k.rhs(y, f); };
  p.k32.jac = [k](std::span<const float> y, std::span<float> J) { k.jac(y, J); };
  p.k64.rhs = [k](std::span<const double> y, std::span<double> f) { k.rhs(y, f); };
  p.k64.jac = [k](std::span<const double> y, std::span<double> J) { k.jac(y, J); };
  p.k128.rhs = [k](std::span<const Quad> y, std::span<Quad> f) { k.rhs(y, f); };
  p.k128.jac = [k](std::span<const Quad> y, std::span<Quad> J) { k.jac(y, J); };
}

struct VdpKernel {
  Quad alpha;

  template <class N>
  void rhs(std::span<const N> y, std::span<N> f) const {
    const N a = from_quad<N>(alpha);
    f[0] = y[1];
    f[1] = a * y[1] * (N(1) - y[0] * y[0]) - y[0];
  }

  template <class N>
  void jac(std::span<const N> y, std::span<N> J) const {
    const N a = from_quad<N>(alpha);
    J[0] = N(0);
    J[1] = N(1);
    J[2] = N(0) - N(2) * a * y[0] * y[1] - N(1);
    J[3] = a * (N(1) - y[0] * y[0]);
  }
};

struct BurgersKernel {
  int nx;
  Quad dxq;  // 1/(nx+1) at full precision; each kernel narrows it
  Quad nuq;

  template <class N>
  void rhs(std::span<const N> u, std::span<N> f) const {
    const N dx = from_quad<N>(dxq);
    const N nu = from_quad<N>(nuq);
    const N dx2 = dx * dx;
    const N half = N(0.5);
    const N zero = N(0);
    for (int i = 0; i < nx; ++i) {
      const N ui = u[i];
      const N up = (i + 1 < nx) ? u[i + 1] : zero;
      const N um = (i > 0) ? u[i - 1] : zero;
      const N flux = (half * up * up - half * ui * ui) / dx;
      const N diff = nu * (up - N(2) * ui + um) / dx2;
      f[i] = diff - flux;
    }
  }

  template <class N>
  void jac(std::span<const N> u, std::span<N> J) const {
    const N dx = from_quad<N>(dxq);
    const N nu = from_quad<N>(nuq);
    const N dx2 = dx * dx;
    const N zero = N(0);
    for (size_t i = 0; i < J.size(); ++i) J[i] = zero;
    const N off = nu / dx2;
    for (int i = 0; i < nx; ++i) {
      N* row = J.data() + static_cast<size_t>(i) * nx;
      if (i > 0) row[i - 1] = off;
      row[i] = u[i] / dx - N(2) * off;
      if (i + 1 < nx) row[i + 1] = off - u[i + 1] / dx;
    }
  }
};

struct DahlquistRealKernel {
  Quad lam;

  template <class N>
  void rhs(std::span<const N> y, std::span<N> f) const {
    f[0] = from_quad<N>(lam) * y[0];
  }

  template <class N>
  void jac(std::span<const N>, std::span<N> J) const {
    J[0] = from_quad<N>(lam);
  }
};

struct DahlquistComplexKernel {
  Quad re, im;

  template <class N>
  void rhs(std::span<const N> y, std::span<N> f) const {
    const N a = from_quad<N>(re);
    const N b = from_quad<N>(im);
    f[0] = a * y[0] - b * y[1];
    f[1] = b * y[0] + a * y[1];
  }

  template <class N>
  void jac(std::span<const N>, std::span<N> J) const {
    J[0] = from_quad<N>(re);
    J[1] = N(0) - from_quad<N>(im);
    J[2] = from_quad<N>(im);
    J[3] = from_quad<N>(re);
  }
};

}  // namespace

OdeProblem van_der_pol(double alpha) {
  if (!(alpha > 0)) throw std::invalid_argument("vdp: alpha must be positive");
  OdeProblem p;
  p.label = "vdp";
  p.dim = 2;
  p.t_final = 1.0;
  p.y0 = {Quad(2), Quad(0)};
  bind_kernels(p, VdpKernel{static_cast<Quad>(alpha)});
  return p;
}

OdeProblem viscous_burgers(int nx) {
  if (nx < 3) throw std::invalid_argument("burgers: nx must be >= 3");
  OdeProblem p;
  p.label = "burgers";
  p.dim = nx;
  p.t_final = 1.0;
  const Quad dxq = Quad(1) / Quad(nx + 1);
  p.y0.resize(nx);
  const Quad two_pi = 2 * M_PIq;
  for (int i = 0; i < nx; ++i) p.y0[i] = sinq(two_pi * Quad(i + 1) * dxq);
  bind_kernels(p, BurgersKernel{nx, dxq, Quad(1) / Quad(100)});
  return p;
}

OdeProblem dahlquist(std::complex<double> lambda) {
  OdeProblem p;
  p.label = "dahlquist";
  p.t_final = 1.0;
  if (lambda.imag() == 0.0) {
    p.dim = 1;
    p.y0 = {Quad(1)};
    const Quad lam = static_cast<Quad>(lambda.real());
    bind_kernels(p, DahlquistRealKernel{lam});
    p.exact = [lam](double t) { return std::vector<Quad>{expq(lam * static_cast<Quad>(t))}; };
  } else {
    p.dim = 2;
    p.y0 = {Quad(1), Quad(0)};
    const Quad re = static_cast<Quad>(lambda.real());
    const Quad im = static_cast<Quad>(lambda.imag());
    bind_kernels(p, DahlquistComplexKernel{re, im});
    p.exact = [re, im](double t) {
      const Quad tq = static_cast<Quad>(t);
      const Quad r = expq(re * tq);
      return std::vector<Quad>{r * cosq(im * tq), r * sinq(im * tq)};
    };
  }
  return p;
}

namespace {

// dense constant-matrix right-hand side, used by the heat semi-discretization
struct LinearKernel {
  int n;
  std::shared_ptr<std::vector<double>> matrix;  // row-major n x n

  template <class N>
  void rhs(std::span<const N> y, std::span<N> f) const {
    const auto& m = *matrix;
    for (int i = 0; i < n; ++i) {
      N acc = N(0);
      for (int j = 0; j < n; ++j) acc = acc + from_double<N>(m[static_cast<size_t>(i) * n + j]) * y[j];
      f[i] = acc;
    }
  }

  template <class N>
  void jac(std::span<const N>, std::span<N> J) const {
    const auto& m = *matrix;
    for (size_t i = 0; i < J.size(); ++i) J[i] = from_double<N>(m[i]);
  }
};

}  // namespace

OdeProblem heat_spectral(int nx) {
  HeatOperators ops = heat_operators(nx);
  OdeProblem p;
  p.label = "heat";
  p.dim = nx;
  p.t_final = 1.0;
  p.y0.resize(nx);
  const Quad half = Quad(1) / Quad(2);
  for (int i = 0; i < nx; ++i) p.y0[i] = half * (Quad(1) + sinq(Quad(i) * 2 * M_PIq / Quad(nx)));
  bind_kernels(p, LinearKernel{nx, std::make_shared<std::vector<double>>(std::move(ops.ds))});
  const double dx = ops.dx;
  p.exact = [nx, dx](double t) {
    std::vector<Quad> out(nx);
    const Quad damp = expq(Quad(-t));
    const Quad half2 = Quad(1) / Quad(2);
    for (int i = 0; i < nx; ++i)
      out[i] = half2 + half2 * damp * sinq(Quad(i) * static_cast<Quad>(dx));
    return out;
  };
  return p;
}

namespace {

template <class L>
std::vector<double> eval_low_impl(const OdeProblem& p, std::span<const double> y) {
  std::vector<L> yl(p.dim), fl(p.dim);
  for (int i = 0; i < p.dim; ++i) yl[i] = from_double<L>(y[i]);
  p.kernels<L>().rhs(yl, fl);
  std::vector<double> out(p.dim);
  for (int i = 0; i < p.dim; ++i) out[i] = to_double(fl[i]);
  return out;
}

}  // namespace

std::vector<double> eval_low(const OdeProblem& p, std::span<const double> y, PrecisionLevel level) {
  switch (level) {
    case PrecisionLevel::Half: return eval_low_impl<Half>(p, y);
    case PrecisionLevel::Single: return eval_low_impl<float>(p, y);
    case PrecisionLevel::Double: return eval_low_impl<double>(p, y);
    case PrecisionLevel::Extended: return eval_low_impl<Quad>(p, y);
  }
  return {};
}

double dc_eigenvalue(int nx, int k) {
  const double dx = 2.0 * M_PI / nx;
  return -(2.0 - 2.0 * std::cos(k * dx)) / (dx * dx);
}

double ds_eigenvalue(int, int k) { return -static_cast<double>(k) * k; }

HeatOperators heat_operators(int nx) {
  if (nx < 4 || nx % 2 != 0) throw std::invalid_argument("heat: nx must be even and >= 4");
  HeatOperators ops;
  ops.nx = nx;
  ops.dx = 2.0 * M_PI / nx;
  ops.dc.assign(static_cast<size_t>(nx) * nx, 0.0);
  ops.ds.assign(static_cast<size_t>(nx) * nx, 0.0);

  const double inv_dx2 = 1.0 / (ops.dx * ops.dx);
  for (int i = 0; i < nx; ++i) {
    double* row = ops.dc.data() + static_cast<size_t>(i) * nx;
    row[i] = -2.0 * inv_dx2;
    row[(i + 1) % nx] += inv_dx2;
    row[(i + nx - 1) % nx] += inv_dx2;
  }

  // first circulant column of D_s from its eigenvalues: -k^2 for resolved
  // modes, the Nyquist mode carried once (keeps the matrix real symmetric)
  std::vector<double> col(nx);
  for (int m = 0; m < nx; ++m) {
    double sum = 0.0;
    for (int k = 1; k < nx / 2; ++k)
      sum += 2.0 * ds_eigenvalue(nx, k) * std::cos(2.0 * M_PI * k * m / nx);
    sum += ds_eigenvalue(nx, nx / 2) * ((m % 2 == 0) ? 1.0 : -1.0);
    col[m] = sum / nx;
  }
  for (int i = 0; i < nx; ++i) {
    double* row = ops.ds.data() + static_cast<size_t>(i) * nx;
    for (int j = 0; j < nx; ++j) row[j] = col[(i - j + nx) % nx];
  }
  return ops;
}

}  // namespace mpark
