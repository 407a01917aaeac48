// Periodic grid geometry.
//
// A Grid is a cubic periodic box of side `length` sampled on n points per
// axis. Physical coordinates are centered, x_i = -L/2 + i*L/n, and the
// frequency lattice is the symmetric truncation xi = (2*pi/L)*m with
// m in [-n/2, n/2). Storage order is row-major with the last axis fastest
// (FFTW's layout). The grid also precomputes the radial shell structure of
// the frequency lattice: the sorted list of distinct |xi| values and a
// per-point shell id, which radial multipliers evaluate against once per
// shell instead of once per point.
#pragma once

#include <algorithm>
#include <cstddef>
#include <unordered_map>
#include <vector>

#include "eml/core.hpp"

namespace eml {

class Grid {
 public:
  Grid(int n, double length) : n_(n), length_(length) {
    if (n < 8 || (n % 2) != 0) throw GridError("grid: points per axis must be even and >= 8");
    if (!(length > 0.0) || !std::isfinite(length)) throw GridError("grid: box length must be positive and finite");
    coord_1d_.resize(n_);
    freq_index_1d_.resize(n_);
    freq_1d_.resize(n_);
    for (int i = 0; i < n_; ++i) {
      coord_1d_[i] = -0.5 * length_ + (length_ / n_) * i;
      int m = (i < n_ / 2) ? i : i - n_;
      freq_index_1d_[i] = m;
      freq_1d_[i] = (2.0 * kPi / length_) * m;
    }
    build_shells();
  }

  int n() const { return n_; }
  double length() const { return length_; }
  std::size_t size() const {
    return static_cast<std::size_t>(n_) * n_ * n_;
  }
  double dx() const { return length_ / n_; }
  double cell_volume() const { return dx() * dx() * dx(); }
  double volume() const { return length_ * length_ * length_; }

  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * n_ + j) * n_ + k;
  }

  double coord_1d(int i) const { return coord_1d_[i]; }
  double freq_1d(int i) const { return freq_1d_[i]; }
  int freq_index_1d(int i) const { return freq_index_1d_[i]; }

  Vec3 coord(int i, int j, int k) const {
    return {coord_1d_[i], coord_1d_[j], coord_1d_[k]};
  }
  Vec3 freq(int i, int j, int k) const {
    return {freq_1d_[i], freq_1d_[j], freq_1d_[k]};
  }

  // Largest per-axis frequency magnitude, pi*n/L (attained at m = -n/2).
  double nyquist() const { return kPi * n_ / length_; }
  // Largest |xi| on the lattice (the corner mode).
  double max_freq() const { return shell_radii_.back(); }
  // Smallest nonzero |xi|.
  double min_freq() const { return 2.0 * kPi / length_; }
  // Spherical two-thirds dealiasing radius.
  double dealias_radius() const { return (2.0 / 3.0) * nyquist(); }

  // Radial shells: shell_radii()[shell_id(p)] == |xi_p|, radii sorted
  // ascending, shell 0 is the zero mode.
  const std::vector<double>& shell_radii() const { return shell_radii_; }
  const std::vector<std::int32_t>& shell_ids() const { return shell_ids_; }

  bool operator==(const Grid& o) const {
    return n_ == o.n_ && length_ == o.length_;
  }
  bool operator!=(const Grid& o) const { return !(*this == o); }

 private:
  void build_shells() {
    shell_ids_.resize(size());
    std::unordered_map<std::int64_t, std::int32_t> id_of;
    std::vector<std::int64_t> m2_values;
    std::size_t p = 0;
    std::vector<std::int32_t> tmp(size());
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < n_; ++j) {
        for (int k = 0; k < n_; ++k, ++p) {
          std::int64_t mi = freq_index_1d_[i];
          std::int64_t mj = freq_index_1d_[j];
          std::int64_t mk = freq_index_1d_[k];
          std::int64_t m2 = mi * mi + mj * mj + mk * mk;
          auto it = id_of.find(m2);
          std::int32_t id;
          if (it == id_of.end()) {
            id = static_cast<std::int32_t>(m2_values.size());
            id_of.emplace(m2, id);
            m2_values.push_back(m2);
          } else {
            id = it->second;
          }
          tmp[p] = id;
        }
      }
    }
    // Renumber shells so radii are ascending.
    std::vector<std::int32_t> order(m2_values.size());
    for (std::size_t s = 0; s < order.size(); ++s) order[s] = static_cast<std::int32_t>(s);
    std::sort(order.begin(), order.end(), [&](std::int32_t a, std::int32_t b) {
      return m2_values[a] < m2_values[b];
    });
    std::vector<std::int32_t> rank(order.size());
    for (std::size_t s = 0; s < order.size(); ++s) rank[order[s]] = static_cast<std::int32_t>(s);
    shell_radii_.resize(order.size());
    for (std::size_t s = 0; s < order.size(); ++s) {
      shell_radii_[rank[s]] = (2.0 * kPi / length_) * std::sqrt(static_cast<double>(m2_values[s]));
    }
    for (std::size_t q = 0; q < tmp.size(); ++q) shell_ids_[q] = rank[tmp[q]];
  }

  int n_;
  double length_;
  std::vector<double> coord_1d_;
  std::vector<double> freq_1d_;
  std::vector<int> freq_index_1d_;
  std::vector<double> shell_radii_;
  std::vector<std::int32_t> shell_ids_;
};

}  // namespace eml
