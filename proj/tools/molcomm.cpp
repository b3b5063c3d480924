// molcomm — scenario-driven front end: channel tables, decision-region
// rasters, error-rate runs, and constellation reports.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure,
// 4 infeasible scenario.
#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "molcomm/molcomm.hpp"

namespace fs = std::filesystem;
using namespace molcomm;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitInfeasible = 4;

std::string read_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::uint64_t resolve_seed(const ScenarioConfig& cfg, std::uint64_t cli_seed,
                           bool cli_seed_set) {
  if (cli_seed_set) return cli_seed;
  if (cfg.seed_explicit) return cfg.seed;
  if (const char* env = std::getenv("MOLCOMM_SEED")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end && *end == '\0') return v;
    throw std::invalid_argument("MOLCOMM_SEED is not an unsigned integer");
  }
  return cfg.seed;
}

void write_sidecar(const fs::path& csv_path, const ScenarioConfig& resolved) {
  fs::path meta = csv_path;
  meta.replace_extension(".meta.scn");
  std::ofstream out(meta);
  out << "# molcomm " << kVersion
      << " metadata; re-run with: molcomm ber --scenario " << meta.filename()
      << "\n"
      << resolved.serialize();
}

std::vector<double> parse_grid_flag(const std::string& spec) {
  if (spec.empty()) return {};
  return molcomm::detail::parse_list(spec, 0);
}

void emit_curve_rows(std::ostream& os, const std::string& x,
                     const ErrorEstimate& e, const std::string& decoder,
                     const std::string& cst) {
  os << x << ',' << format_double(e.value) << ',' << format_double(e.ci_low)
     << ',' << format_double(e.ci_high) << ',' << e.trials << ',' << decoder
     << ',' << cst << '\n';
}

// --------------------------------------------------------------------------
// cir
// --------------------------------------------------------------------------
int run_cir(const std::string& scenario_path, const std::string& receiver_flag,
            const std::string& r_grid_flag, const std::string& t_grid_flag,
            double tb_flag, double taus_flag, const std::string& out_path) {
  ScenarioConfig cfg;
  if (!scenario_path.empty())
    cfg = ScenarioConfig::parse(read_file(scenario_path));
  if (!receiver_flag.empty()) {
    if (receiver_flag == "passive") cfg.receiver = ReceiverType::Passive;
    else if (receiver_flag == "absorbing") cfg.receiver = ReceiverType::Absorbing;
    else throw std::invalid_argument("--receiver must be passive|absorbing");
  }
  if (tb_flag > 0) cfg.channel.t_b = tb_flag;
  if (taus_flag > 0) cfg.channel.tau_s = taus_flag;
  cfg.channel.validate();

  const auto r_grid = parse_grid_flag(r_grid_flag);
  const auto t_grid = parse_grid_flag(t_grid_flag);

  std::ostringstream os;
  os << "# molcomm " << kVersion << " cir receiver=" << to_string(cfg.receiver)
     << " d_inf=" << format_double(cfg.channel.d_inf)
     << " d_tr=" << format_double(cfg.channel.d_tr)
     << " r_rx=" << format_double(cfg.channel.r_rx)
     << " r0=" << format_double(cfg.channel.r0)
     << " tau_s=" << format_double(cfg.channel.tau_s)
     << " t_b=" << format_double(cfg.channel.t_b) << "\n";
  if (!t_grid.empty()) {
    os << "t_s,h\n";
    for (double t : t_grid) {
      const double h = cfg.receiver == ReceiverType::Passive
                           ? mean_passive_cir(t, cfg.channel)
                           : mean_absorbing_cir_approx(t, cfg.channel);
      os << format_double(t) << ',' << format_double(h) << '\n';
    }
  } else {
    os << "r_m,h\n";
    for (double r : r_grid) {
      const double h = cfg.receiver == ReceiverType::Passive
                           ? passive_cir(r, cfg.channel)
                           : absorbing_hit_prob(r, cfg.channel);
      os << format_double(r) << ',' << format_double(h) << '\n';
    }
  }
  if (out_path.empty()) {
    std::cout << os.str();
  } else {
    std::ofstream f(out_path);
    f << os.str();
  }
  return 0;
}

// --------------------------------------------------------------------------
// regions
// --------------------------------------------------------------------------
int run_regions(const std::string& scenario_path, const std::string& out_dir,
                long long grid_flag, int threads) {
  ScenarioConfig cfg = ScenarioConfig::parse(read_file(scenario_path));
  if (grid_flag > 0) cfg.grid_max = grid_flag;
  Scenario s = cfg.schemes.empty() ? cfg.base_scenario()
                                   : cfg.scheme_scenario(cfg.schemes.front());
  if (s.cst.k > 3)
    throw InfeasibleScenario("regions: rasterization needs K = 2 or 3");

  DecodeFn decode;
  if (s.mobile && cfg.raster_t > 0) {
    const auto dec = make_mobile_decoders(s, {cfg.raster_t});
    if (dec.genie)
      throw InfeasibleScenario("regions: genie decoders have no single raster");
    decode = dec.per_slot.front();
  } else {
    decode = make_static_decoder(s, s.static_h());
  }
  const auto raster = raster_regions(decode, s.cst.k, cfg.grid_max, threads);

  fs::create_directories(out_dir);
  const fs::path stem = fs::path(scenario_path).stem();
  const fs::path csv = fs::path(out_dir) / (stem.string() + "_regions.csv");
  std::ofstream f(csv);
  raster.write_csv(f);
  write_sidecar(csv, cfg);
  std::cout << csv.string() << "\n";
  return 0;
}

// --------------------------------------------------------------------------
// ber
// --------------------------------------------------------------------------
int run_ber(const std::string& scenario_path, std::string mode,
            const std::string& out_dir, std::uint64_t trials_flag,
            bool trials_set, std::uint64_t seed_flag, bool seed_set,
            int threads) {
  ScenarioConfig cfg = ScenarioConfig::parse(read_file(scenario_path));
  if (!mode.empty()) cfg.mode = mode;
  if (trials_set) cfg.trials = trials_flag;
  cfg.seed = resolve_seed(cfg, seed_flag, seed_set);
  cfg.seed_explicit = true;
  if (cfg.trials < 1)
    throw std::invalid_argument("ber: trials must be >= 1");
  std::vector<std::string> schemes = cfg.schemes;
  if (schemes.empty()) schemes = {"base"};

  fs::create_directories(out_dir);
  const fs::path stem = fs::path(scenario_path).stem();
  const fs::path csv =
      fs::path(out_dir) / (stem.string() + "_" + cfg.mode + ".csv");
  std::ofstream f(csv);

  if (cfg.mode == "static") {
    std::vector<double> lambdas =
        cfg.lambda_sweep.empty() ? std::vector<double>{cfg.lambda}
                                 : cfg.lambda_sweep;
    f << "lambda,p_e,ci_low,ci_high,trials,decoder,constellation\n";
    for (const auto& name : schemes) {
      for (double lam : lambdas) {
        Scenario s = cfg.scheme_scenario(name);
        s.mobile = false;
        s.reception.lambda = lam;
        const auto est = monte_carlo_static(s, cfg.trials, cfg.seed, threads);
        emit_curve_rows(f, format_double(lam), est,
                        std::string(to_string(s.decoder.kind)), s.cst.label);
      }
    }
  } else if (cfg.mode == "mobile") {
    f << "t_seconds,p_e,ci_low,ci_high,trials,decoder,constellation\n";
    for (const auto& name : schemes) {
      Scenario s = cfg.scheme_scenario(name);
      s.mobile = true;
      const auto res = monte_carlo_mobile(s, cfg.trials, cfg.seed, threads);
      const std::string dec = std::string(to_string(s.decoder.kind)) +
                              (s.decoder_channel ? ":wrong-params" : "");
      for (const auto& pt : res.curve)
        emit_curve_rows(f, format_double(pt.t), pt.est, dec, s.label);
    }
  } else if (cfg.mode == "budget-sweep") {
    if (cfg.c_sweep.empty())
      throw std::invalid_argument("budget-sweep: c_sweep is empty");
    f << "c,p_e,ci_low,ci_high,trials,decoder,constellation\n";
    for (const auto& name : schemes) {
      Scenario s = cfg.scheme_scenario(name);
      s.mobile = true;
      std::function<Constellation(double)> rebuild;
      if (name.rfind("sbrsk", 0) == 0) {
        const double rho0 = cfg.rho0;
        rebuild = [rho0](double c) { return sbrsk(rho0, c); };
      } else if (name.rfind("ook", 0) == 0) {
        rebuild = [](double c) { return ook(2.0 * c); };
      } else {
        throw std::invalid_argument(
            "budget-sweep: scheme must be an sbrsk or ook variant");
      }
      const auto pts = ber_vs_budget(s, cfg.c_sweep, rebuild, cfg.trials,
                                     cfg.seed, threads);
      for (const auto& pt : pts)
        emit_curve_rows(f, format_double(pt.c), pt.est,
                        std::string(to_string(s.decoder.kind)), s.label);
    }
  } else if (cfg.mode == "imperfect-csi") {
    f << "t_seconds,p_e,ci_low,ci_high,trials,decoder,constellation\n";
    for (const auto& name : schemes) {
      Scenario s = cfg.scheme_scenario(name);
      s.mobile = true;
      s.decoder_channel.reset();
      const auto res = imperfect_csi_sweep(s, cfg.wrong_params(), cfg.trials,
                                           cfg.seed, threads);
      const std::string base = to_string(s.decoder.kind);
      for (const auto& pt : res.with_true_params.curve)
        emit_curve_rows(f, format_double(pt.t), pt.est, base + ":true-params",
                        s.label);
      for (const auto& pt : res.with_wrong_params.curve)
        emit_curve_rows(f, format_double(pt.t), pt.est, base + ":wrong-params",
                        s.label);
    }
  } else {
    throw std::invalid_argument("unknown mode '" + cfg.mode + "'");
  }
  f.close();
  write_sidecar(csv, cfg);
  std::cout << csv.string() << "\n";
  const auto clamps = diag::cir_clamp_events.load();
  if (clamps)
    std::cerr << "warning: " << clamps << " CIR evaluations were clamped\n";
  return 0;
}

// --------------------------------------------------------------------------
// constellation
// --------------------------------------------------------------------------
int run_constellation(const std::string& action,
                      const std::string& scenario_path,
                      const std::string& orders_flag, double budget_c) {
  if (action == "budget") {
    std::ostringstream rows;
    rows << "order,bits_per_symbol,sep_multi_axis,sep_single_axis,"
            "per_symbol_budget,per_bit_budget\n";
    for (const auto& tok : molcomm::detail::split(
             orders_flag.empty() ? "4,16,64" : orders_flag, ',')) {
      const long long order = std::stoll(tok);
      const auto plan = normalize_budget(2, order, budget_c);
      rows << order << ',' << plan.bits_per_symbol << ','
           << plan.spacing_multi_axis.times_c() << ','
           << plan.spacing_single_axis.times_c() << ','
           << plan.per_symbol_budget.times_c() << ",c\n";
    }
    std::cout << rows.str();
    return 0;
  }
  if (scenario_path.empty())
    throw std::invalid_argument("constellation " + action +
                                ": --scenario required");
  ScenarioConfig cfg = ScenarioConfig::parse(read_file(scenario_path));
  const Constellation cst = cfg.build_constellation();
  if (action == "check") {
    const auto w = check_channel_free(cst);
    std::cout << "channel-free: " << (w.ok ? "true" : "false") << "\n";
    if (!w.ok) std::cout << "witness: " << w.describe() << "\n";
    return 0;
  }
  if (action == "separation") {
    std::cout << "min_separation: " << format_double(min_symbol_separation(cst))
              << "\n";
    return 0;
  }
  throw std::invalid_argument("unknown action '" + action +
                              "' (check|separation|budget)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"molcomm: diffusive molecular-communication simulator"};
  app.require_subcommand(1);

  std::string scenario_path, out_dir = ".", out_file, mode, receiver_flag;
  std::string r_grid, t_grid, orders, action;
  double tb = 0, taus = 0, budget_c = 1.0;
  long long grid_max = 0;
  std::uint64_t trials = 0, seed = 0;
  int threads = 0;

  auto* cir = app.add_subcommand("cir", "channel gain tables");
  cir->add_option("--scenario", scenario_path);
  cir->add_option("--receiver", receiver_flag, "passive|absorbing");
  cir->add_option("--r-grid", r_grid, "distance grid lo:hi:n or list [m]");
  cir->add_option("--t-grid", t_grid, "time grid for the mean gain [s]");
  cir->add_option("--tb", tb, "bit duration override [s]");
  cir->add_option("--taus", taus, "sampling offset override [s]");
  cir->add_option("--out", out_file, "output CSV (default stdout)");

  auto* regions = app.add_subcommand("regions", "decision-region raster");
  regions->add_option("--scenario", scenario_path)->required();
  regions->add_option("--out", out_dir);
  regions->add_option("--grid-max", grid_max);
  regions->add_option("--threads", threads);

  auto* ber = app.add_subcommand("ber", "error-rate runs");
  ber->add_option("--scenario", scenario_path)->required();
  ber->add_option("--mode", mode, "static|mobile|budget-sweep|imperfect-csi");
  ber->add_option("--out", out_dir);
  auto* trials_opt = ber->add_option("--trials", trials);
  auto* seed_opt = ber->add_option("--seed", seed);
  ber->add_option("--threads", threads);

  auto* cst = app.add_subcommand("constellation", "constellation reports");
  cst->add_option("action", action, "check|separation|budget")->required();
  cst->add_option("--scenario", scenario_path);
  cst->add_option("--orders", orders, "comma list of orders for budget");
  cst->add_option("--c", budget_c, "per-bit budget for budget values");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cir->parsed())
      return run_cir(scenario_path, receiver_flag, r_grid, t_grid, tb, taus,
                     out_file);
    if (regions->parsed())
      return run_regions(scenario_path, out_dir, grid_max, threads);
    if (ber->parsed())
      return run_ber(scenario_path, mode, out_dir, trials,
                     !trials_opt->empty(), seed, !seed_opt->empty(), threads);
    if (cst->parsed())
      return run_constellation(action, scenario_path, orders, budget_c);
  } catch (const InfeasibleScenario& e) {
    std::cerr << "infeasible scenario: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return 0;
}
