#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "abc/codes.hpp"
#include "abc/sigmodel.hpp"

namespace abc {

enum class SystemKind { dscdma, wcdma };

// Every knob of a Monte Carlo sweep. Validated up front.
struct ExperimentConfig {
  SystemKind system = SystemKind::dscdma;
  CodeSet::Family code = CodeSet::Family::gold;
  std::size_t gain = 63;
  std::size_t users = 30;
  std::size_t symbols = 1000;
  ChannelProfile channel;
  std::vector<double> snr_db;
  std::vector<std::string> detectors;
  std::size_t trials = 1;
  std::uint64_t base_seed = 1;
  // Blind hyperparameters.
  double mu = 0.001;
  std::size_t taps = 1;
  std::size_t epochs = 10;
  std::size_t pilot = 0;
  // Adaptive-Rake hyperparameters.
  double rake_step = 0.01;
  std::size_t rake_batch = 50;

  void validate() const;
};

struct BerPoint {
  std::string detector;
  double snr_db = 0.0;
  std::size_t users = 0;
  std::size_t symbols = 0;
  std::size_t trials = 0;
  std::size_t failed_trials = 0;
  std::uint64_t bits = 0;
  std::uint64_t bit_errors = 0;
  double ber = 0.0;
  double stderr_ = 0.0;
  std::uint64_t seed = 0;
};

// All known detector ids, in canonical order.
const std::vector<std::string>& detector_ids();
bool is_blind_detector(const std::string& id);

// QPSK hard decision; exact zero ties resolve to bit 0.
std::pair<std::uint8_t, std::uint8_t> hard_decide(cd soft);

// Count bit errors of a soft sequence against user `user` of the frame,
// skipping the first `pilot` symbols.
std::uint64_t count_bit_errors(const std::vector<cd>& soft,
                               const SymbolFrame& frame, std::size_t user,
                               std::size_t pilot);

// One (detector, snr) cell aggregated over cfg.trials independent
// frames. Frame synthesis seeds depend only on (base_seed, snr, trial),
// so different detectors see identical realizations.
BerPoint run_point(const ExperimentConfig& cfg, const std::string& detector,
                   double snr_db);

// Full detectors x SNR-grid cross-product.
std::vector<BerPoint> sweep(const ExperimentConfig& cfg,
                            const std::function<void(const BerPoint&)>&
                                on_point = nullptr);

// CSV with the exact schema
// system,code,G,K,M,L,snr_db,detector,trials,failed_trials,bits,
// bit_errors,ber,stderr,seed
void write_csv(std::ostream& os, const ExperimentConfig& cfg,
               const std::vector<BerPoint>& points);

// Built-in five-path test channel (delays 0..4).
ChannelProfile reference_channel();

}  // namespace abc
