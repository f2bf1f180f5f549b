// SPDX-License-Identifier: Apache-2.0
#include "fadecast/estimation.hpp"

#include "fadecast/error.hpp"

namespace fadecast {

ChannelEstimate lmmse(Complex y_p, Complex pilot, double sigma2,
                      std::size_t time_index, EstimateSource source) {
  require(pilot != Complex{0.0, 0.0}, "lmmse: zero pilot");
  require(sigma2 >= 0.0, "lmmse: negative noise variance");
  const double p2 = std::norm(pilot);
  return {y_p * p2 / (pilot * (p2 + sigma2)), source, time_index};
}

double lmmse_target_mse(double sigma2, Complex pilot) {
  require(pilot != Complex{0.0, 0.0}, "lmmse_target_mse: zero pilot");
  return sigma2 / (std::norm(pilot) + sigma2);
}

double mse(std::span<const Complex> pred, std::span<const Complex> truth) {
  require(!pred.empty() && pred.size() == truth.size(), "mse: empty or length mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) acc += std::norm(pred[i] - truth[i]);
  return acc / static_cast<double>(pred.size());
}

double mse(std::span<const double> pred, std::span<const double> truth) {
  require(!pred.empty() && pred.size() == truth.size(), "mse: empty or length mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - truth[i];
    acc += d * d;
  }
  return acc / static_cast<double>(pred.size());
}

std::vector<Complex> PilotLayout::symbols() const {
  std::vector<Complex> out(total_length(), Complex{0.0, 0.0});
  for (std::size_t j = 0; j < n_pilots; ++j) out[j * sequence_length() + taps - 1] = pilot;
  return out;
}

std::vector<std::vector<ChannelEstimate>> estimate_multipath(
    std::span<const Complex> received, const PilotLayout& layout, double sigma2) {
  require(layout.taps >= 1 && layout.n_pilots >= 1, "estimate_multipath: malformed layout");
  require(received.size() >= layout.total_length(),
          "estimate_multipath: received samples do not cover the pilot sequences");
  const std::size_t seq = layout.sequence_length();
  std::vector<std::vector<ChannelEstimate>> out(layout.taps);
  for (std::size_t l = 0; l < layout.taps; ++l) {
    out[l].reserve(layout.n_pilots);
    for (std::size_t j = 0; j < layout.n_pilots; ++j) {
      const std::size_t at = j * seq + layout.taps - 1 + l;
      out[l].push_back(lmmse(received[at], layout.pilot, sigma2, j));
    }
  }
  return out;
}

}  // namespace fadecast
