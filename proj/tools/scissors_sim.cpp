// Command-line front end: fidelity and phase sweeps, tomography round
// trips and single-point evaluations, with csv/json output.
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "scissors/homodyne.hpp"
#include "scissors/protocol.hpp"

using namespace scissors;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr double kTwoPi = 2.0 * std::numbers::pi;

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

struct RunConfig {
  std::string command;
  double alpha_start = 0.0;
  double alpha_stop = 2.0;
  double alpha_step = 0.05;
  double alpha_mag = 0.5;
  double alpha_phase = 0.0;
  int phi_steps = 24;
  double eta_one = 0.9;
  double eta_spd = 0.5;
  double eta_hd = 0.54;
  double mode_match = 0.56;
  int cutoff = 0;  // 0 = choose from the largest amplitude in the run
  std::uint64_t seed = 1;
  long samples = 20000;
  int recon_cutoff = 3;
  int hist_bins = 64;
  double tail_bound = 1e-10;
  std::string out;
  std::string format = "csv";

  ProtocolParams params(complexd alpha) const {
    ProtocolParams p;
    p.alpha = alpha;
    p.eta_one = eta_one;
    p.eta_spd = eta_spd;
    p.eta_hd = eta_hd;
    p.mode_match = mode_match;
    return p;
  }
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.15g", v);
  return buf;
}

std::string json_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out.push_back(c);
  }
  return out;
}

int thread_cap() {
  if (const char* env = std::getenv("SCISSORS_SIM_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

/// Runs fn(i) for i in [0, n), chunked over at most thread_cap()
/// threads; results land at their own index, so the merge order is
/// deterministic regardless of scheduling.
template <typename Fn>
void parallel_for(int n, Fn&& fn) {
  const int threads = std::min(thread_cap(), n);
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      for (int i = t; i < n; i += threads) fn(i);
    });
  for (auto& th : pool) th.join();
}

SimOptions make_options(const RunConfig& cfg, double max_alpha) {
  SimOptions opts;
  opts.cutoff = cfg.cutoff > 0 ? cfg.cutoff : suggested_cutoff(max_alpha);
  opts.coherent_tail_bound = cfg.tail_bound;
  // Leave headroom for the extra EPR photon crossing Alice's splitter.
  opts.bs_tail_bound = std::max(1e-9, 10.0 * cfg.tail_bound);
  return opts;
}

void write_meta_csv(std::ostream& os, const RunConfig& cfg, int cutoff) {
  os << "# tool=scissors_sim version=" << kVersion << "\n";
  os << "# command=" << cfg.command << "\n";
  os << "# eta_one=" << fmt(cfg.eta_one) << " eta_spd=" << fmt(cfg.eta_spd)
     << " eta_hd=" << fmt(cfg.eta_hd) << " mode_match=" << fmt(cfg.mode_match) << "\n";
  os << "# cutoff=" << cutoff << " seed=" << cfg.seed << " tail_bound=" << fmt(cfg.tail_bound)
     << "\n";
  os << "# alpha_start=" << fmt(cfg.alpha_start) << " alpha_stop=" << fmt(cfg.alpha_stop)
     << " alpha_step=" << fmt(cfg.alpha_step) << " alpha_mag=" << fmt(cfg.alpha_mag)
     << " alpha_phase=" << fmt(cfg.alpha_phase) << " phi_steps=" << cfg.phi_steps
     << " samples=" << cfg.samples << " recon_cutoff=" << cfg.recon_cutoff
     << " hist_bins=" << cfg.hist_bins << "\n";
}

void write_meta_json(std::ostream& os, const RunConfig& cfg, int cutoff) {
  os << "  \"meta\": {\n"
     << "    \"tool\": \"scissors_sim\", \"version\": \"" << kVersion << "\",\n"
     << "    \"command\": \"" << cfg.command << "\",\n"
     << "    \"eta_one\": " << fmt(cfg.eta_one) << ", \"eta_spd\": " << fmt(cfg.eta_spd)
     << ", \"eta_hd\": " << fmt(cfg.eta_hd) << ", \"mode_match\": " << fmt(cfg.mode_match)
     << ",\n"
     << "    \"cutoff\": " << cutoff << ", \"seed\": " << cfg.seed
     << ", \"tail_bound\": " << fmt(cfg.tail_bound) << ",\n"
     << "    \"alpha_start\": " << fmt(cfg.alpha_start)
     << ", \"alpha_stop\": " << fmt(cfg.alpha_stop)
     << ", \"alpha_step\": " << fmt(cfg.alpha_step) << ", \"alpha_mag\": " << fmt(cfg.alpha_mag)
     << ", \"alpha_phase\": " << fmt(cfg.alpha_phase) << ", \"phi_steps\": " << cfg.phi_steps
     << ", \"samples\": " << cfg.samples << ", \"recon_cutoff\": " << cfg.recon_cutoff
     << ", \"hist_bins\": " << cfg.hist_bins << "\n  }";
}

std::ofstream open_output(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::ios_base::failure("cannot open output file: " + path);
  return os;
}

std::vector<double> alpha_grid(const RunConfig& cfg) {
  if (cfg.alpha_step <= 0.0) throw CLI::ValidationError("alpha-step must be positive");
  if (cfg.alpha_stop < cfg.alpha_start)
    throw CLI::ValidationError("alpha-stop must be >= alpha-start");
  std::vector<double> grid;
  for (double a = cfg.alpha_start; a <= cfg.alpha_stop + 1e-12; a += cfg.alpha_step)
    grid.push_back(a);
  if (grid.empty()) throw CLI::ValidationError("empty alpha grid");
  return grid;
}

int run_fidelity_sweep(const RunConfig& cfg, bool single_shot) {
  std::vector<double> grid =
      single_shot ? std::vector<double>{cfg.alpha_mag} : alpha_grid(cfg);
  const double max_alpha = *std::max_element(grid.begin(), grid.end());
  SimOptions opts = make_options(cfg, std::max(max_alpha, 1e-6));

  std::vector<SweepRecord> records(grid.size());
  parallel_for(static_cast<int>(grid.size()), [&](int i) {
    const complexd alpha = std::polar(grid[i], single_shot ? cfg.alpha_phase : 0.0);
    records[i] = fidelity_vs_alpha(cfg.params(alpha), {alpha}, opts)[0];
  });

  auto os = open_output(cfg.out);
  if (cfg.format == "csv") {
    write_meta_csv(os, cfg, opts.cutoff);
    os << "alpha_mag,alpha_phase,f_mixed,f_ideal,f_semiclassical,p_tel,p_tel_sc,error\n";
    for (const SweepRecord& r : records)
      os << fmt(std::abs(r.alpha)) << ',' << fmt(std::arg(r.alpha)) << ',' << fmt(r.f_mixed)
         << ',' << fmt(r.f_ideal) << ',' << fmt(r.f_semiclassical) << ',' << fmt(r.p_tel) << ','
         << fmt(r.p_tel_sc) << ',' << r.error << "\n";
  } else {
    os << "{\n";
    write_meta_json(os, cfg, opts.cutoff);
    os << ",\n  \"rows\": [\n";
    for (size_t i = 0; i < records.size(); ++i) {
      const SweepRecord& r = records[i];
      os << "    {\"alpha_mag\": " << fmt(std::abs(r.alpha))
         << ", \"alpha_phase\": " << fmt(std::arg(r.alpha)) << ", \"f_mixed\": " << fmt(r.f_mixed)
         << ", \"f_ideal\": " << fmt(r.f_ideal)
         << ", \"f_semiclassical\": " << fmt(r.f_semiclassical) << ", \"p_tel\": " << fmt(r.p_tel)
         << ", \"p_tel_sc\": " << fmt(r.p_tel_sc) << ", \"error\": \"" << json_escape(r.error)
         << "\"}" << (i + 1 < records.size() ? "," : "") << "\n";
    }
    os << "  ]\n}\n";
  }
  return 0;
}

int run_phase_sweep(const RunConfig& cfg) {
  if (cfg.phi_steps <= 0) throw CLI::ValidationError("phi-steps must be positive");
  if (cfg.hist_bins <= 0) throw CLI::ValidationError("hist-bins must be positive");
  SimOptions opts = make_options(cfg, cfg.alpha_mag);

  std::vector<double> phis;
  for (int k = 0; k < cfg.phi_steps; ++k) phis.push_back(kTwoPi * k / cfg.phi_steps);

  std::vector<PhasePoint> points(phis.size());
  parallel_for(static_cast<int>(phis.size()), [&](int i) {
    points[i] = phase_sweep(cfg.params(std::polar(cfg.alpha_mag, 0.0)), {phis[i]}, opts)[0];
  });

  constexpr double x_lo = -6.0, x_hi = 6.0;
  const double bin_w = (x_hi - x_lo) / cfg.hist_bins;
  auto histogram = [&](const DensityMatrix& rho) {
    std::vector<double> h(cfg.hist_bins);
    for (int b = 0; b < cfg.hist_bins; ++b) {
      // Midpoint rule per bin: probability mass at LO phase 0.
      const double xc = x_lo + (b + 0.5) * bin_w;
      h[b] = quadrature_pdf(rho, 0.0, xc) * bin_w;
    }
    return h;
  };

  auto os = open_output(cfg.out);
  if (cfg.format == "csv") {
    write_meta_csv(os, cfg, opts.cutoff);
    os << "phi,mean_x,var_x,second_moment_x";
    for (int b = 0; b < cfg.hist_bins; ++b) os << ",bin_" << b;
    os << "\n";
    for (const PhasePoint& pt : points) {
      const double mean = mean_quadrature(pt.rho_bob, 0.0);
      const double var = variance_quadrature(pt.rho_bob, 0.0);
      // <x^2> is phase-independent for the teleported state; the
      // central variance is not, because the mean itself rotates.
      os << fmt(pt.phi) << ',' << fmt(mean) << ',' << fmt(var) << ','
         << fmt(var + mean * mean);
      for (double h : histogram(pt.rho_bob)) os << ',' << fmt(h);
      os << "\n";
    }
  } else {
    os << "{\n";
    write_meta_json(os, cfg, opts.cutoff);
    os << ",\n  \"rows\": [\n";
    for (size_t i = 0; i < points.size(); ++i) {
      const PhasePoint& pt = points[i];
      const double mean = mean_quadrature(pt.rho_bob, 0.0);
      const double var = variance_quadrature(pt.rho_bob, 0.0);
      os << "    {\"phi\": " << fmt(pt.phi) << ", \"mean_x\": " << fmt(mean)
         << ", \"var_x\": " << fmt(var)
         << ", \"second_moment_x\": " << fmt(var + mean * mean) << ", \"hist\": [";
      auto h = histogram(pt.rho_bob);
      for (size_t b = 0; b < h.size(); ++b) os << fmt(h[b]) << (b + 1 < h.size() ? ", " : "");
      os << "]}" << (i + 1 < points.size() ? "," : "") << "\n";
    }
    os << "  ]\n}\n";
  }
  return 0;
}

int run_tomography_roundtrip(const RunConfig& cfg) {
  if (cfg.samples <= 0) throw CLI::ValidationError("samples must be positive");
  if (cfg.phi_steps <= 0) throw CLI::ValidationError("phi-steps must be positive");
  SimOptions opts = make_options(cfg, cfg.alpha_mag);

  const complexd alpha = std::polar(cfg.alpha_mag, cfg.alpha_phase);
  const DensityMatrix bob = bob_ensemble(cfg.params(alpha), opts).rho;

  std::vector<double> thetas;
  for (int k = 0; k < cfg.phi_steps; ++k)
    thetas.push_back(std::numbers::pi * k / cfg.phi_steps);
  const int per_theta = static_cast<int>(cfg.samples / cfg.phi_steps);
  if (per_theta <= 0) throw CLI::ValidationError("samples fewer than phi-steps");
  QuadratureDataset data = sample_quadratures(bob, thetas, per_theta, cfg.seed);

  ReconstructedState rec = reconstruct(data, cfg.recon_cutoff);
  const ModeLayout rl = rec.rho_hat.layout;
  Mat truth_block = bob.elements.topLeftCorner(rl.dim(), rl.dim());
  DensityMatrix truth(rl, truth_block);

  const double state_fid = fidelity_mixed(rec.rho_hat, truth);
  const double max_err = (rec.rho_hat.elements - truth_block).cwiseAbs().maxCoeff();

  ModeLayout full(1, opts.cutoff);
  FockState target = coherent_state(alpha, full, opts.coherent_tail_bound).state;
  const double f_true = fidelity_pure(bob, target);
  // Same overlap on the reconstructed state, padded back to the
  // simulation cutoff. The reconstruction trace is only statistically 1.
  Mat padded = Mat::Zero(full.dim(), full.dim());
  padded.topLeftCorner(rl.dim(), rl.dim()) = rec.rho_hat.elements;
  const complexd overlap =
      (target.amplitudes.adjoint() * padded * target.amplitudes)(0, 0);
  const double f_recon = overlap.real();

  {
    auto samples_os = open_output(cfg.out + ".samples");
    data.write(samples_os);
  }
  auto os = open_output(cfg.out);
  if (cfg.format == "csv") {
    write_meta_csv(os, cfg, opts.cutoff);
    os << "state_fidelity,max_element_error,f_true,f_reconstructed,delta_f,n_samples\n";
    os << fmt(state_fid) << ',' << fmt(max_err) << ',' << fmt(f_true) << ',' << fmt(f_recon)
       << ',' << fmt(std::abs(f_recon - f_true)) << ',' << data.samples.size() << "\n";
    for (const std::string& w : rec.warnings) os << "# warning: " << w << "\n";
  } else {
    os << "{\n";
    write_meta_json(os, cfg, opts.cutoff);
    os << ",\n  \"state_fidelity\": " << fmt(state_fid)
       << ",\n  \"max_element_error\": " << fmt(max_err) << ",\n  \"f_true\": " << fmt(f_true)
       << ",\n  \"f_reconstructed\": " << fmt(f_recon)
       << ",\n  \"delta_f\": " << fmt(std::abs(f_recon - f_true))
       << ",\n  \"n_samples\": " << data.samples.size() << ",\n  \"warnings\": [";
    for (size_t i = 0; i < rec.warnings.size(); ++i)
      os << "\"" << json_escape(rec.warnings[i]) << "\""
         << (i + 1 < rec.warnings.size() ? ", " : "");
    os << "]\n}\n";
  }
  std::printf("state_fidelity=%s delta_f=%s\n", fmt(state_fid).c_str(),
              fmt(std::abs(f_recon - f_true)).c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  CLI::App app{"quantum-scissors teleportation simulator"};
  app.set_config("--config");
  app.add_option("--command", cfg.command, "fidelity-sweep | phase-sweep | tomography-roundtrip | single-shot")
      ->required()
      ->check(CLI::IsMember({"fidelity-sweep", "phase-sweep", "tomography-roundtrip", "single-shot"}));
  app.add_option("--alpha-start", cfg.alpha_start);
  app.add_option("--alpha-stop", cfg.alpha_stop);
  app.add_option("--alpha-step", cfg.alpha_step);
  app.add_option("--alpha-mag", cfg.alpha_mag);
  app.add_option("--alpha-phase", cfg.alpha_phase);
  app.add_option("--phi-steps", cfg.phi_steps);
  app.add_option("--eta-one", cfg.eta_one)->check(CLI::Range(0.0, 1.0));
  app.add_option("--eta-spd", cfg.eta_spd)->check(CLI::Range(0.0, 1.0));
  app.add_option("--eta-hd", cfg.eta_hd)->check(CLI::Range(0.0, 1.0));
  app.add_option("--mode-match", cfg.mode_match)->check(CLI::Range(0.0, 1.0));
  app.add_option("--cutoff", cfg.cutoff, "per-mode photon cutoff; 0 = automatic");
  app.add_option("--seed", cfg.seed);
  app.add_option("--samples", cfg.samples);
  app.add_option("--recon-cutoff", cfg.recon_cutoff);
  app.add_option("--hist-bins", cfg.hist_bins);
  app.add_option("--tail-bound", cfg.tail_bound);
  app.add_option("--out", cfg.out)->required();
  app.add_option("--format", cfg.format)->check(CLI::IsMember({"csv", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (cfg.command == "fidelity-sweep") return run_fidelity_sweep(cfg, false);
    if (cfg.command == "single-shot") return run_fidelity_sweep(cfg, true);
    if (cfg.command == "phase-sweep") return run_phase_sweep(cfg);
    return run_tomography_roundtrip(cfg);
  } catch (const CLI::ValidationError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kExitNumerical;
  } catch (const std::ios_base::failure& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  }
}
