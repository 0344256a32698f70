#pragma once

#include <span>
#include <vector>

#include "uavsim/linalg.hpp"

namespace uavsim {

// Serving-cell id for the donor in association vectors; drones use their
// index 0..D-1. In array mode index 0 stands for the whole drone array.
inline constexpr int kDonorCell = -1;

// Relative slack for threshold comparisons. Power control stops once the
// largest power step falls below an absolute tolerance, and on watt-scale
// feeds that residue shifts interference by up to ~1e-5 of the threshold,
// so comparisons leave that much room. A genuinely capped entity misses its
// threshold by orders of magnitude more.
inline constexpr double kSinrSlack = 1e-4;

// Per-entity linear receive SINRs for one evaluated network state.
struct SinrReport {
  std::vector<double> backhaul;     // per drone (array mode: per element)
  std::vector<double> user;         // per user
  std::vector<int> association;     // serving cell per user
  std::vector<bool> gated;          // per drone, see apply_backhaul_gating
  std::vector<bool> outage;         // per user, set when a user cannot be served at threshold
  bool array_mode = false;
};

// Direct downlink stream from the donor array. Interference comes from drone
// access transmissions: per interfering drone, the scalar channel into this
// receiver and the drone's total radiated access power.
double sinr_direct_link(double power, const ComplexMatrix& h_row, const ComplexMatrix& v,
                        std::size_t col, std::span<const cdouble> drone_channels,
                        std::span<const double> drone_powers, double noise);

// Wireless backhaul stream into one drone, distributed deployment. Same
// interference structure as the direct link.
double sinr_backhaul(double power, const ComplexMatrix& h_row, const ComplexMatrix& v,
                     std::size_t col, std::span<const cdouble> other_drone_channels,
                     std::span<const double> other_drone_powers, double noise);

// Access link from a serving drone to its user, distributed deployment.
// Interference: other drones' access power plus every donor stream (backhaul
// columns and the scheduled direct-link column) leaking through h_donor.
double sinr_access(double power, cdouble h_serving, std::span<const cdouble> other_drone_channels,
                   std::span<const double> other_drone_powers, const ComplexMatrix& h_donor,
                   const ComplexMatrix& v_donor, std::span<const double> donor_stream_powers,
                   double noise);

// Backhaul stream into one array element. The array receives no access-side
// interference, so the denominator is noise only.
double sinr_backhaul_isolated(double power, const ComplexMatrix& h_row, const ComplexMatrix& v,
                              std::size_t col, double noise);

// Direct link while a drone array transmits: the array's group streams leak
// into the direct-link user through its 1 x D composite channel.
double sinr_direct_vs_array(double power, const ComplexMatrix& h_row, const ComplexMatrix& v,
                            std::size_t col, const ComplexMatrix& h_array,
                            const ComplexMatrix& v_array,
                            std::span<const double> array_stream_powers, double noise);

// Access stream from the array to a grouped user; donor streams leak in.
double sinr_access_array(double power, const ComplexMatrix& h_array_row,
                         const ComplexMatrix& v_array, std::size_t col,
                         const ComplexMatrix& h_donor, const ComplexMatrix& v_donor,
                         std::span<const double> donor_stream_powers, double noise);

// Marks drones whose backhaul SINR sits below the threshold. Gated drones
// carry no access traffic; sum_rate zeroes their users. Idempotent.
void apply_backhaul_gating(SinrReport& report, double eps_backhaul);

// Long-run resource share per user. Direct-link users split the donor's
// resource evenly; distributed access users split their serving drone's
// time; array users split across SDMA groups.
std::vector<double> resource_shares(const std::vector<int>& association, int num_uavs,
                                    bool array_mode, int num_groups);

std::vector<double> uniform_shares(std::size_t num_users);

// Network spectral efficiency, bit/s/Hz: sum of share-weighted user rates.
// Users of gated drones (array mode: all array users if any element is
// gated) contribute zero.
double sum_rate(const SinrReport& report, std::span<const double> shares);

}  // namespace uavsim
