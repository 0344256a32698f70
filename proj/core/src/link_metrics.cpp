#include "uavsim/link_metrics.hpp"

#include <algorithm>
#include <cmath>

#include "uavsim/precoding.hpp"

namespace uavsim {

namespace {

double drone_interference(std::span<const cdouble> channels, std::span<const double> powers) {
  double acc = 0.0;
  for (std::size_t j = 0; j < channels.size(); ++j) {
    acc += std::norm(channels[j]) * powers[j];
  }
  return acc;
}

// sum over all columns of v: p_k |h v_k|^2
double stream_leakage(const ComplexMatrix& h, const ComplexMatrix& v,
                      std::span<const double> powers) {
  double acc = 0.0;
  for (std::size_t k = 0; k < v.cols(); ++k) {
    acc += powers[k] * effective_gain(h, v, k);
  }
  return acc;
}

}  // namespace

double sinr_direct_link(double power, const ComplexMatrix& h_row, const ComplexMatrix& v,
                        std::size_t col, std::span<const cdouble> drone_channels,
                        std::span<const double> drone_powers, double noise) {
  const double signal = power * effective_gain(h_row, v, col);
  return signal / (drone_interference(drone_channels, drone_powers) + noise);
}

double sinr_backhaul(double power, const ComplexMatrix& h_row, const ComplexMatrix& v,
                     std::size_t col, std::span<const cdouble> other_drone_channels,
                     std::span<const double> other_drone_powers, double noise) {
  const double signal = power * effective_gain(h_row, v, col);
  return signal / (drone_interference(other_drone_channels, other_drone_powers) + noise);
}

double sinr_access(double power, cdouble h_serving, std::span<const cdouble> other_drone_channels,
                   std::span<const double> other_drone_powers, const ComplexMatrix& h_donor,
                   const ComplexMatrix& v_donor, std::span<const double> donor_stream_powers,
                   double noise) {
  const double signal = power * std::norm(h_serving);
  const double interference = drone_interference(other_drone_channels, other_drone_powers) +
                              stream_leakage(h_donor, v_donor, donor_stream_powers);
  return signal / (interference + noise);
}

double sinr_backhaul_isolated(double power, const ComplexMatrix& h_row, const ComplexMatrix& v,
                              std::size_t col, double noise) {
  return power * effective_gain(h_row, v, col) / noise;
}

double sinr_direct_vs_array(double power, const ComplexMatrix& h_row, const ComplexMatrix& v,
                            std::size_t col, const ComplexMatrix& h_array,
                            const ComplexMatrix& v_array,
                            std::span<const double> array_stream_powers, double noise) {
  const double signal = power * effective_gain(h_row, v, col);
  return signal / (stream_leakage(h_array, v_array, array_stream_powers) + noise);
}

double sinr_access_array(double power, const ComplexMatrix& h_array_row,
                         const ComplexMatrix& v_array, std::size_t col,
                         const ComplexMatrix& h_donor, const ComplexMatrix& v_donor,
                         std::span<const double> donor_stream_powers, double noise) {
  const double signal = power * effective_gain(h_array_row, v_array, col);
  return signal / (stream_leakage(h_donor, v_donor, donor_stream_powers) + noise);
}

void apply_backhaul_gating(SinrReport& report, double eps_backhaul) {
  report.gated.assign(report.backhaul.size(), false);
  for (std::size_t d = 0; d < report.backhaul.size(); ++d) {
    report.gated[d] = report.backhaul[d] < eps_backhaul * (1.0 - kSinrSlack);
  }
}

std::vector<double> resource_shares(const std::vector<int>& association, int num_uavs,
                                    bool array_mode, int num_groups) {
  const std::size_t u_count = association.size();
  std::vector<double> shares(u_count, 0.0);

  int tue_count = 0;
  std::vector<int> per_drone(std::max(num_uavs, 1), 0);
  for (int cell : association) {
    if (cell == kDonorCell) {
      ++tue_count;
    } else {
      ++per_drone[cell];
    }
  }

  for (std::size_t u = 0; u < u_count; ++u) {
    if (association[u] == kDonorCell) {
      shares[u] = 1.0 / tue_count;
    } else if (array_mode) {
      shares[u] = 1.0 / std::max(num_groups, 1);
    } else {
      shares[u] = 1.0 / per_drone[association[u]];
    }
  }
  return shares;
}

std::vector<double> uniform_shares(std::size_t num_users) {
  return std::vector<double>(num_users, 1.0);
}

double sum_rate(const SinrReport& report, std::span<const double> shares) {
  bool any_gated = std::any_of(report.gated.begin(), report.gated.end(), [](bool g) { return g; });
  double acc = 0.0;
  for (std::size_t u = 0; u < report.user.size(); ++u) {
    const int cell = report.association[u];
    if (cell != kDonorCell) {
      if (report.array_mode ? any_gated : report.gated[cell]) continue;
    }
    acc += shares[u] * std::log2(1.0 + report.user[u]);
  }
  return acc;
}

}  // namespace uavsim
