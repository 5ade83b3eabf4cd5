#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "specshare/numerics.hpp"

namespace specshare {

namespace detail {

// Dense complex Gauss-Jordan inverse with partial pivoting. Sizes here are
// tiny (M <= a few dozen), so an explicit inverse plus infinity-norm
// condition estimate is the simplest reliable route.
inline std::vector<Complex> invert(const std::vector<Complex>& a, std::size_t n,
                                   const char* context) {
  std::vector<Complex> work(a);
  std::vector<Complex> inv(n * n, Complex{0.0, 0.0});
  for (std::size_t i = 0; i < n; ++i) inv[i * n + i] = 1.0;

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    double best = std::abs(work[col * n + col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double mag = std::abs(work[r * n + col]);
      if (mag > best) {
        best = mag;
        pivot = r;
      }
    }
    if (best == 0.0)
      throw std::runtime_error(std::string(context) + ": matrix is singular");
    if (pivot != col) {
      for (std::size_t c = 0; c < n; ++c) {
        std::swap(work[pivot * n + c], work[col * n + c]);
        std::swap(inv[pivot * n + c], inv[col * n + c]);
      }
    }
    const Complex d = work[col * n + col];
    for (std::size_t c = 0; c < n; ++c) {
      work[col * n + c] /= d;
      inv[col * n + c] /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const Complex factor = work[r * n + col];
      if (factor == Complex{0.0, 0.0}) continue;
      for (std::size_t c = 0; c < n; ++c) {
        work[r * n + c] -= factor * work[col * n + c];
        inv[r * n + c] -= factor * inv[col * n + c];
      }
    }
  }
  return inv;
}

inline double norm_inf(const std::vector<Complex>& a, std::size_t n) {
  double best = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    double row = 0.0;
    for (std::size_t c = 0; c < n; ++c) row += std::abs(a[r * n + c]);
    best = std::max(best, row);
  }
  return best;
}

}  // namespace detail

// Reactances (ohms) applied to the parasitic elements; the active port
// carries the fixed 50-ohm source resistance instead.
struct ReactiveLoads {
  std::vector<double> x;

  void validate(std::size_t m) const {
    if (x.size() + 1 != m)
      throw std::invalid_argument("ReactiveLoads: expected m-1 reactances");
    for (double v : x)
      if (!std::isfinite(v)) throw std::invalid_argument("ReactiveLoads: non-finite reactance");
  }
};

// Parasitic-array description: mutual admittance matrix Y (siemens),
// uniform azimuth grid, and the per-element steering samples a_m(theta_g).
struct EsparGeometry {
  std::size_t m = 0;
  std::vector<Complex> admittance;   // row-major m x m
  std::vector<double> angle_grid;    // g points, uniform on [0, 2*pi)
  std::vector<Complex> steering;     // row-major g x m

  std::size_t grid_size() const { return angle_grid.size(); }

  void validate() const {
    const std::size_t g = grid_size();
    if (m < 1) throw std::invalid_argument("EsparGeometry: m must be >= 1");
    if (admittance.size() != m * m)
      throw std::invalid_argument("EsparGeometry: admittance must be m x m");
    if (g < 8 * m)
      throw std::invalid_argument("EsparGeometry: angle grid must have >= 8*m points");
    if (steering.size() != g * m)
      throw std::invalid_argument("EsparGeometry: steering must be g x m");
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i + 1; j < m; ++j)
        if (std::abs(admittance[i * m + j] - admittance[j * m + i]) >
            1e-9 * (1.0 + std::abs(admittance[i * m + j])))
          throw std::invalid_argument("EsparGeometry: admittance must be symmetric");
  }

  // Uniform circular layout: one active element at the center, m-1
  // parasitics on a circle of the given radius (in wavelengths). Steering:
  // a_0 = 1, a_k(theta) = exp(j 2*pi*r cos(theta - psi_k)).
  static EsparGeometry circular(std::size_t m, std::vector<Complex> admittance,
                                std::size_t grid_points = 360,
                                double radius_wavelengths = 0.25) {
    EsparGeometry geo;
    geo.m = m;
    geo.admittance = std::move(admittance);
    geo.angle_grid.resize(grid_points);
    geo.steering.resize(grid_points * m);
    const double two_pi = 6.283185307179586476925286766559;
    for (std::size_t g = 0; g < grid_points; ++g) {
      const double theta = two_pi * static_cast<double>(g) / static_cast<double>(grid_points);
      geo.angle_grid[g] = theta;
      geo.steering[g * m + 0] = 1.0;
      for (std::size_t k = 1; k < m; ++k) {
        const double psi = two_pi * static_cast<double>(k - 1) / static_cast<double>(m - 1);
        geo.steering[g * m + k] =
            std::polar(1.0, two_pi * radius_wavelengths * std::cos(theta - psi));
      }
    }
    geo.validate();
    return geo;
  }
};

// Orthonormal basis patterns Phi (g x m) under the grid inner product
// <f,h> = (2*pi/g) sum f h*, plus the projection vectors q_n stacked as
// columns of an m x m matrix.
struct BasisSet {
  std::size_t m = 0;
  std::vector<Complex> phi;          // row-major g x m, column n = Phi_n samples
  std::vector<Complex> projections;  // row-major m x m, projections[r*m + n] = <a_r, Phi_n>
  std::vector<double> angle_grid;

  std::size_t grid_size() const { return angle_grid.size(); }
  double cell() const {
    return 6.283185307179586476925286766559 / static_cast<double>(grid_size());
  }
};

// Element currents i = v_s (Y^{-1} + X)^{-1} u with X = diag(50, jX_1, ...)
// and u the active-port selector.
inline std::vector<Complex> currents(const EsparGeometry& geo, const ReactiveLoads& loads,
                                     Complex v_s) {
  geo.validate();
  loads.validate(geo.m);
  const std::size_t m = geo.m;
  const std::vector<Complex> y_inv = detail::invert(geo.admittance, m, "currents(Y)");
  std::vector<Complex> system(y_inv);
  system[0] += Complex{50.0, 0.0};
  for (std::size_t k = 1; k < m; ++k) system[k * m + k] += Complex{0.0, loads.x[k - 1]};

  const std::vector<Complex> inv = detail::invert(system, m, "currents(Y^-1+X)");
  const double cond = detail::norm_inf(system, m) * detail::norm_inf(inv, m);
  if (!(cond < 1e12)) {
    std::ostringstream msg;
    msg << "currents: system is ill-conditioned (cond ~ " << cond << ")";
    throw std::runtime_error(msg.str());
  }
  std::vector<Complex> i(m);
  for (std::size_t r = 0; r < m; ++r) i[r] = v_s * inv[r * m + 0];
  return i;
}

// Modified Gram-Schmidt over the steering columns with one
// reorthogonalization pass; orthonormality holds to ~1e-14 on the grids
// used here.
inline BasisSet basis_decompose(const EsparGeometry& geo) {
  geo.validate();
  const std::size_t m = geo.m;
  const std::size_t g = geo.grid_size();
  const double cell = 6.283185307179586476925286766559 / static_cast<double>(g);

  BasisSet basis;
  basis.m = m;
  basis.angle_grid = geo.angle_grid;
  basis.phi.assign(g * m, Complex{0.0, 0.0});
  basis.projections.assign(m * m, Complex{0.0, 0.0});

  const auto inner = [&](const std::vector<Complex>& f, std::size_t fc,
                         const std::vector<Complex>& h, std::size_t hc) {
    Complex acc{0.0, 0.0};
    for (std::size_t row = 0; row < g; ++row)
      acc += f[row * m + fc] * std::conj(h[row * m + hc]);
    return acc * cell;
  };

  std::vector<Complex> work(geo.steering);
  for (std::size_t n = 0; n < m; ++n) {
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t p = 0; p < n; ++p) {
        const Complex proj = inner(work, n, basis.phi, p);
        for (std::size_t row = 0; row < g; ++row)
          work[row * m + n] -= proj * basis.phi[row * m + p];
      }
    }
    const double norm = std::sqrt(std::abs(inner(work, n, work, n)));
    if (norm < 1e-10) {
      std::ostringstream msg;
      msg << "basis_decompose: steering column " << n << " is linearly dependent on the grid";
      throw std::runtime_error(msg.str());
    }
    for (std::size_t row = 0; row < g; ++row) basis.phi[row * m + n] = work[row * m + n] / norm;
  }
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t n = 0; n < m; ++n)
      basis.projections[r * m + n] = inner(geo.steering, r, basis.phi, n);
  return basis;
}

// P(theta_g) = i^T a(theta_g).
inline std::vector<Complex> pattern_from_currents(const EsparGeometry& geo,
                                                  const std::vector<Complex>& i) {
  if (i.size() != geo.m) throw std::invalid_argument("pattern_from_currents: size mismatch");
  const std::size_t g = geo.grid_size();
  std::vector<Complex> p(g, Complex{0.0, 0.0});
  for (std::size_t row = 0; row < g; ++row)
    for (std::size_t c = 0; c < geo.m; ++c) p[row] += i[c] * geo.steering[row * geo.m + c];
  return p;
}

// w_n = i^T q_n.
inline std::vector<Complex> basis_weights(const std::vector<Complex>& i, const BasisSet& basis) {
  if (i.size() != basis.m) throw std::invalid_argument("basis_weights: size mismatch");
  std::vector<Complex> w(basis.m, Complex{0.0, 0.0});
  for (std::size_t n = 0; n < basis.m; ++n)
    for (std::size_t r = 0; r < basis.m; ++r) w[n] += i[r] * basis.projections[r * basis.m + n];
  return w;
}

// P(theta_g) = sum_n w_n Phi_n(theta_g).
inline std::vector<Complex> pattern_from_weights(const std::vector<Complex>& w,
                                                 const BasisSet& basis) {
  if (w.size() != basis.m) throw std::invalid_argument("pattern_from_weights: size mismatch");
  const std::size_t g = basis.grid_size();
  std::vector<Complex> p(g, Complex{0.0, 0.0});
  for (std::size_t row = 0; row < g; ++row)
    for (std::size_t n = 0; n < basis.m; ++n)
      p[row] += w[n] * basis.phi[row * basis.m + n];
  return p;
}

// Geometry config: flat key = value lines plus an admittance block of
// whitespace-separated "re,im" entries, one matrix row per line.
//
//   elements = 5
//   grid_points = 360
//   radius_wavelengths = 0.25
//   admittance_start
//   1.56e-2,-7.5e-3  ...
//   admittance_end
inline EsparGeometry load_geometry(std::istream& in) {
  std::size_t elements = 0, grid_points = 360;
  double radius = 0.25;
  std::vector<Complex> y;
  bool in_matrix = false;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    if (first == "admittance_start") {
      in_matrix = true;
      continue;
    }
    if (first == "admittance_end") {
      in_matrix = false;
      continue;
    }
    if (in_matrix) {
      std::istringstream row(line);
      std::string cellstr;
      while (row >> cellstr) {
        const auto comma = cellstr.find(',');
        if (comma == std::string::npos)
          throw std::invalid_argument("load_geometry: admittance entries must be re,im pairs");
        y.emplace_back(std::stod(cellstr.substr(0, comma)), std::stod(cellstr.substr(comma + 1)));
      }
      continue;
    }
    std::string eq, value;
    if (!(ls >> eq >> value) || eq != "=")
      throw std::invalid_argument("load_geometry: expected 'key = value', got: " + line);
    if (first == "elements")
      elements = static_cast<std::size_t>(std::stoul(value));
    else if (first == "grid_points")
      grid_points = static_cast<std::size_t>(std::stoul(value));
    else if (first == "radius_wavelengths")
      radius = std::stod(value);
    else
      throw std::invalid_argument("load_geometry: unknown key: " + first);
  }
  if (elements == 0) throw std::invalid_argument("load_geometry: missing 'elements'");
  if (y.size() != elements * elements)
    throw std::invalid_argument("load_geometry: admittance block has wrong size");
  return EsparGeometry::circular(elements, std::move(y), grid_points, radius);
}

inline EsparGeometry load_geometry_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("load_geometry_file: cannot open " + path);
  return load_geometry(in);
}

// Shipped 5-element example matrix (siemens); loosely modeled on a
// quarter-wavelength monopole ring, symmetric and well conditioned.
inline EsparGeometry default_five_element_geometry() {
  const Complex self{1.56e-2, -7.5e-3};
  const Complex near{4.1e-3, 2.0e-3};
  const Complex across{-1.9e-3, 1.1e-3};
  const Complex active{3.3e-3, -1.4e-3};
  std::vector<Complex> y(25);
  const auto at = [&](std::size_t r, std::size_t c) -> Complex& { return y[r * 5 + c]; };
  for (std::size_t i = 0; i < 5; ++i) at(i, i) = self;
  for (std::size_t k = 1; k < 5; ++k) {
    at(0, k) = active;
    at(k, 0) = active;
  }
  // Ring neighbors (1-2-3-4 around the circle) and diagonals.
  const std::size_t ring[4] = {1, 2, 3, 4};
  for (std::size_t idx = 0; idx < 4; ++idx) {
    const std::size_t a = ring[idx];
    const std::size_t b = ring[(idx + 1) % 4];
    at(a, b) = near;
    at(b, a) = near;
  }
  at(1, 3) = across;
  at(3, 1) = across;
  at(2, 4) = across;
  at(4, 2) = across;
  return EsparGeometry::circular(5, std::move(y));
}

}  // namespace specshare
