#include "abc/eval.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "abc/detectors_blind.hpp"
#include "abc/detectors_conventional.hpp"
#include "abc/detectors_rake.hpp"
#include "abc/errors.hpp"
#include "abc/preproc.hpp"

namespace abc {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
  return splitmix64(splitmix64(base ^ (a * 0x9e3779b97f4a7c15ULL)) ^ b);
}

int gold_degree_for_gain(std::size_t gain) {
  if (gain == 31) return 5;
  if (gain == 63) return 6;
  std::ostringstream os;
  os << "gold codes support G in {31, 63}; got " << gain;
  throw config_error(os.str());
}

}  // namespace

ChannelProfile reference_channel() {
  ChannelProfile c;
  c.gains = {{0.3684, 0.5364},
             {0.1982, 0.0187},
             {0.0237, 0.5683},
             {0.1112, 0.0835},
             {0.2203, 0.2756}};
  c.delays = {0, 1, 2, 3, 4};
  return c;
}

const std::vector<std::string>& detector_ids() {
  static const std::vector<std::string> ids = {
      "mf",  "rake",     "lmmse",     "lmmse-eig", "ff",
      "fb1", "fb2",      "rake-ica",  "rake-rica", "rake-pca"};
  return ids;
}

bool is_blind_detector(const std::string& id) {
  return id == "ff" || id == "fb1" || id == "fb2";
}

void ExperimentConfig::validate() const {
  if (users < 1 || symbols < 1 || trials < 1)
    throw config_error("config: users, symbols and trials must be >= 1");
  if (users > gain)
    throw config_error("config: more users than spreading gain (AS6)");
  if (code == CodeSet::Family::gold) gold_degree_for_gain(gain);
  if (code == CodeSet::Family::ovsf && (gain & (gain - 1)) != 0)
    throw config_error("config: OVSF gain must be a power of two");
  channel.validate(gain);
  if (snr_db.empty()) throw config_error("config: empty SNR grid");
  for (std::size_t i = 1; i < snr_db.size(); ++i)
    if (!(snr_db[i] > snr_db[i - 1]))
      throw config_error("config: SNR grid must be strictly ascending");
  if (detectors.empty()) throw config_error("config: no detectors selected");
  const auto& known = detector_ids();
  for (const auto& d : detectors)
    if (std::find(known.begin(), known.end(), d) == known.end())
      throw config_error("config: unknown detector '" + d + "'");
  if (pilot >= symbols)
    throw config_error("config: pilot length must be below symbol count");
}

std::pair<std::uint8_t, std::uint8_t> hard_decide(cd soft) {
  return {static_cast<std::uint8_t>(soft.real() < 0.0 ? 1 : 0),
          static_cast<std::uint8_t>(soft.imag() < 0.0 ? 1 : 0)};
}

std::uint64_t count_bit_errors(const std::vector<cd>& soft,
                               const SymbolFrame& frame, std::size_t user,
                               std::size_t pilot) {
  std::uint64_t errors = 0;
  for (std::size_t m = pilot; m < frame.symbols && m < soft.size(); ++m) {
    const auto [b0, b1] = hard_decide(soft[m]);
    errors += (b0 != frame.bit(user, 2 * m)) ? 1 : 0;
    errors += (b1 != frame.bit(user, 2 * m + 1)) ? 1 : 0;
  }
  return errors;
}

namespace {

struct Scenario {
  CodeSet codes;
  ScramblingSequence scramble;
  bool scrambled = false;
  SignaturePair sig;
};

Scenario make_scenario(const ExperimentConfig& cfg) {
  Scenario s;
  if (cfg.code == CodeSet::Family::gold) {
    s.codes = gen_gold(gold_degree_for_gain(cfg.gain), cfg.users,
                       mix_seed(cfg.base_seed, 0xC0DE, 0));
  } else {
    s.codes = gen_ovsf(cfg.gain, cfg.users);
  }
  s.scrambled = cfg.system == SystemKind::wcdma;
  if (s.scrambled) {
    s.scramble = gen_scrambling(cfg.gain, mix_seed(cfg.base_seed, 0x5C4A, 0));
    s.sig = build_signatures(s.codes, cfg.channel, &s.scramble);
  } else {
    s.sig = build_signatures(s.codes, cfg.channel);
  }
  return s;
}

// Soft outputs for every user (K x M each as vector-of-sequences).
std::vector<std::vector<cd>> detect_all_users(
    const ExperimentConfig& cfg, const Scenario& sc, const std::string& det,
    const SymbolFrame& frame, const ReceivedFrame& rx) {
  const ScramblingSequence* scr = sc.scrambled ? &sc.scramble : nullptr;
  const std::size_t k = cfg.users;
  std::vector<std::vector<cd>> soft(k);

  if (det == "mf") {
    for (std::size_t u = 0; u < k; ++u)
      soft[u] = mf_detect(sc.codes, u, rx, scr);
  } else if (det == "rake") {
    for (std::size_t u = 0; u < k; ++u)
      soft[u] = rake_detect(sc.codes, u, cfg.channel, rx, scr);
  } else if (det == "lmmse" || det == "lmmse-eig") {
    const CMatrix r_cov = sample_covariance(rx.blocks);
    if (det == "lmmse") {
      for (std::size_t u = 0; u < k; ++u)
        soft[u] = lmmse_detect(sc.sig, u, r_cov, rx);
    } else {
      const EigResult eig = hermitian_eig(r_cov);
      const std::size_t dim = std::min(2 * k, sc.sig.g1);
      for (std::size_t u = 0; u < k; ++u)
        soft[u] = lmmse_eigen_detect(sc.sig, u, eig, dim, rx);
    }
  } else if (is_blind_detector(det)) {
    const CMatrix cov = sample_covariance(rx.blocks);
    const WhiteningTransform wt = fit_whitening(cov, k, cfg.taps + 1);
    const auto whitened = whiten(wt, rx.blocks);
    BlindConfig bc;
    bc.mu = cfg.mu;
    bc.taps = cfg.taps;
    bc.epochs = cfg.epochs;
    const BlindStructure st = det == "ff"    ? BlindStructure::ff
                              : det == "fb1" ? BlindStructure::fb1
                                             : BlindStructure::fb2;
    BlindOutput out = run_blind(st, whitened, bc);
    // Alignment reference: ground truth (pure simulation) or the pilot
    // prefix in semi-blind mode.
    if (cfg.pilot > 0) {
      CMatrix ref(k, cfg.pilot);
      for (std::size_t u = 0; u < k; ++u)
        for (std::size_t m = 0; m < cfg.pilot; ++m)
          ref(u, m) = frame.values(u, m);
      align_output(out, ref);
    } else {
      align_output(out, frame.values);
    }
    for (std::size_t u = 0; u < k; ++u) {
      soft[u].resize(frame.symbols);
      for (std::size_t m = 0; m < frame.symbols; ++m)
        soft[u][m] = out.aligned(u, m);
    }
  } else {  // adaptive Rake family
    const RakeAdaptKind kind = det == "rake-ica"    ? RakeAdaptKind::fastica
                               : det == "rake-rica" ? RakeAdaptKind::robustica
                                                    : RakeAdaptKind::pca;
    RakeAdaptConfig rc;
    rc.step = cfg.rake_step;
    rc.batch = cfg.rake_batch;
    AdaptiveRakeState state(kind, rx.window, rc);
    soft = rake_adaptive_detect_all(state, sc.codes, cfg.channel, rx, scr);
  }
  return soft;
}

}  // namespace

BerPoint run_point(const ExperimentConfig& cfg, const std::string& detector,
                   double snr_db) {
  cfg.validate();
  const Scenario sc = make_scenario(cfg);

  BerPoint pt;
  pt.detector = detector;
  pt.snr_db = snr_db;
  pt.users = cfg.users;
  pt.symbols = cfg.symbols;
  pt.trials = cfg.trials;
  pt.seed = cfg.base_seed;

  const std::uint64_t snr_key =
      static_cast<std::uint64_t>(std::llround(snr_db * 1000.0));

  for (std::size_t trial = 0; trial < cfg.trials; ++trial) {
    // Seeds depend only on (base, snr, trial): paired realizations.
    const std::uint64_t frame_seed = mix_seed(cfg.base_seed, snr_key, trial);
    const std::uint64_t noise_seed = splitmix64(frame_seed ^ 0xA0A0A0A0ULL);
    const SymbolFrame frame = gen_frame(cfg.users, cfg.symbols, frame_seed);
    const ReceivedFrame rx =
        transmit(frame, sc.sig, cfg.channel, snr_db, noise_seed);
    try {
      const auto soft = detect_all_users(cfg, sc, detector, frame, rx);
      for (std::size_t u = 0; u < cfg.users; ++u) {
        pt.bit_errors += count_bit_errors(soft[u], frame, u, cfg.pilot);
        pt.bits += 2 * (cfg.symbols - cfg.pilot);
      }
    } catch (const divergence_error&) {
      ++pt.failed_trials;
    }
  }
  pt.ber = pt.bits ? static_cast<double>(pt.bit_errors) /
                         static_cast<double>(pt.bits)
                   : 0.0;
  pt.stderr_ = pt.bits ? std::sqrt(std::max(pt.ber * (1.0 - pt.ber), 0.0) /
                                   static_cast<double>(pt.bits))
                       : 0.0;
  return pt;
}

std::vector<BerPoint> sweep(const ExperimentConfig& cfg,
                            const std::function<void(const BerPoint&)>&
                                on_point) {
  cfg.validate();
  std::vector<BerPoint> out;
  for (const auto& det : cfg.detectors) {
    for (double snr : cfg.snr_db) {
      BerPoint pt = run_point(cfg, det, snr);
      if (on_point) on_point(pt);
      out.push_back(std::move(pt));
    }
  }
  return out;
}

void write_csv(std::ostream& os, const ExperimentConfig& cfg,
               const std::vector<BerPoint>& points) {
  os << "system,code,G,K,M,L,snr_db,detector,trials,failed_trials,bits,"
        "bit_errors,ber,stderr,seed\n";
  const char* sys = cfg.system == SystemKind::wcdma ? "wcdma" : "dscdma";
  const char* code = cfg.code == CodeSet::Family::gold ? "gold" : "ovsf";
  for (const auto& p : points) {
    os << sys << ',' << code << ',' << cfg.gain << ',' << p.users << ','
       << p.symbols << ',' << cfg.channel.paths() << ',' << p.snr_db << ','
       << p.detector << ',' << p.trials << ',' << p.failed_trials << ','
       << p.bits << ',' << p.bit_errors << ',' << p.ber << ',' << p.stderr_
       << ',' << p.seed << '\n';
  }
}

}  // namespace abc
