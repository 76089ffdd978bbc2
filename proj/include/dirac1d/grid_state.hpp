#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace dirac1d {

using cplx = std::complex<double>;

/// Uniform cell-centred grid on [z_min, z_max].
///
/// Cells are indexed 0..n_cells-1, boundaries 0..n_cells. Cell i spans
/// [boundary(i), boundary(i+1)] and has its centre at z_min + (i + 1/2) dz.
class Grid1D {
 public:
  Grid1D(double z_min, double z_max, std::size_t n_cells);

  double z_min() const { return z_min_; }
  double z_max() const { return z_max_; }
  std::size_t n_cells() const { return n_cells_; }
  double dz() const { return dz_; }

  // Valid for any integer index, including ones outside the grid.
  double center(std::ptrdiff_t i) const {
    return z_min_ + (static_cast<double>(i) + 0.5) * dz_;
  }
  double boundary(std::ptrdiff_t b) const {
    return z_min_ + static_cast<double>(b) * dz_;
  }

  /// Index of the boundary nearest to z. Throws if z lies outside
  /// [z_min - dz/2, z_max + dz/2].
  std::size_t snap_boundary(double z) const;

  /// Same as snap_boundary but clamps to [0, n_cells] instead of throwing.
  std::size_t clamp_boundary(double z) const;

  bool operator==(const Grid1D&) const = default;

 private:
  double z_min_;
  double z_max_;
  std::size_t n_cells_;
  double dz_;
};

Grid1D make_grid(double z_min, double z_max, std::size_t n_cells);

/// Two-component Dirac spinor (f, h) sampled at cell centres.
struct SpinorField {
  Grid1D grid;
  std::vector<cplx> f;
  std::vector<cplx> h;
  double time = 0.0;

  explicit SpinorField(const Grid1D& g, double t = 0.0);
  SpinorField(const Grid1D& g, std::vector<cplx> f_in, std::vector<cplx> h_in,
              double t = 0.0);

  std::size_t size() const { return f.size(); }

  /// Sum_i (|f_i|^2 + |h_i|^2) dz.
  double norm() const;

  /// Sum_i (conj(f_i) g_i + conj(h_i) k_i) dz.
  cplx inner(const SpinorField& other) const;

  SpinorField& operator+=(const SpinorField& other);
  SpinorField& operator*=(cplx s);
};

SpinorField operator+(SpinorField a, const SpinorField& b);
SpinorField operator*(cplx s, SpinorField a);

enum class PacketKind { gaussian, compact_bump, plane_superposition };

struct PacketSpec {
  PacketKind kind = PacketKind::gaussian;
  double z0 = 0.0;     // centre
  double width = 1.0;  // Delta z
  double k0 = 0.0;     // carrier wavenumber
  double mass = 1.0;
  // plane_superposition only
  double k = 0.0;
  double p = 0.0;

  bool operator==(const PacketSpec&) const = default;
};

/// h/f ratio of a positive-energy plane wave e^{i(kz - Et)} of the
/// two-component equation, E = sqrt(k^2 + m^2). Zero when k = m = 0.
double positive_energy_ratio(double k, double mass);

/// Gaussian packet with j0 proportional to exp(-(z - z0)^2 / width^2),
/// carrier e^{i k0 z} and positive-energy spinor structure.
/// Throws if more than 1e-12 of the continuum mass falls outside the grid.
SpinorField gaussian_packet(const PacketSpec& spec, const Grid1D& grid);

/// Smooth bump exp(-1/(1 - x^2)) on [z_l, z_r] with carrier and spinor
/// structure as gaussian_packet. Cells whose centres are outside
/// (z_l, z_r) hold exact zeros.
SpinorField compact_packet(const PacketSpec& spec, double z_l, double z_r,
                           const Grid1D& grid);

enum class CutSide { left, right };

/// Keep cells with centre below (left) or above (right) the grid boundary
/// nearest to q. The snapped position is grid.boundary(grid.snap_boundary(q)).
SpinorField cut(const SpinorField& state, double q, CutSide side);

}  // namespace dirac1d
