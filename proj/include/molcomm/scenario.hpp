#pragma once
// Scenario files: a flat, sectioned key = value text format with SI-unit
// suffixes ("1um", "0.5ms", "5e-9 m2/s"), a literal block for explicit
// constellations, and a canonical serializer used for re-runnable metadata
// sidecars. See docs in the repository README for the grammar.
#include <charconv>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "molcomm/evaluation.hpp"

namespace molcomm {

struct ParseError : std::runtime_error {
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what) {}
};

/// Shortest round-trip decimal rendering; locale independent.
inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, ptr);
}

namespace detail {

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!trim(cur).empty() || !out.empty()) out.push_back(trim(cur));
  return out;
}

/// Number with optional SI-unit suffix. Supported units: m, mm, um, nm, s,
/// ms, us, m2/s, um2/s; bare numbers pass through. "inf" is accepted.
inline double parse_quantity(const std::string& raw, int line) {
  const std::string s = trim(raw);
  if (s.empty()) throw ParseError(line, "empty value");
  if (s == "inf") return std::numeric_limits<double>::infinity();
  const char* begin = s.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin) throw ParseError(line, "not a number: '" + s + "'");
  std::string unit = trim(std::string(end));
  if (unit.empty()) return v;
  static const std::map<std::string, double> kUnits = {
      {"m", 1.0},    {"mm", 1e-3},   {"um", 1e-6},  {"nm", 1e-9},
      {"s", 1.0},    {"ms", 1e-3},   {"us", 1e-6},
      {"m2/s", 1.0}, {"um2/s", 1e-12}};
  const auto it = kUnits.find(unit);
  if (it == kUnits.end())
    throw ParseError(line, "unknown unit '" + unit + "'");
  return v * it->second;
}

/// Value list: either comma-separated quantities or a linear grid lo:hi:n.
inline std::vector<double> parse_list(const std::string& raw, int line) {
  std::vector<double> out;
  const std::string s = trim(raw);
  if (s.find(':') != std::string::npos) {
    const auto parts = split(s, ':');
    if (parts.size() != 3) throw ParseError(line, "grid must be lo:hi:n");
    const double lo = parse_quantity(parts[0], line);
    const double hi = parse_quantity(parts[1], line);
    const long n = std::lround(parse_quantity(parts[2], line));
    if (n < 0) throw ParseError(line, "grid count must be >= 0");
    for (long i = 0; i < n; ++i)
      out.push_back(n == 1 ? lo : lo + (hi - lo) * double(i) / double(n - 1));
    return out;
  }
  for (const auto& tok : split(s, ','))
    if (!tok.empty()) out.push_back(parse_quantity(tok, line));
  return out;
}

inline bool parse_bool(const std::string& raw, int line) {
  const std::string s = trim(raw);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ParseError(line, "expected boolean, got '" + s + "'");
}

}  // namespace detail

inline DecoderKind decoder_kind_from_string(const std::string& s, int line = 0) {
  if (s == "exact-ml") return DecoderKind::ExactML;
  if (s == "poisson-ml") return DecoderKind::PoissonML;
  if (s == "channel-free") return DecoderKind::ChannelFree;
  if (s == "ratio-threshold") return DecoderKind::RatioThreshold;
  if (s == "ook-threshold") return DecoderKind::OokThreshold;
  if (s == "mean-ci") return DecoderKind::MeanCI;
  if (s == "full-csi") return DecoderKind::FullCSI;
  if (s == "expected-log") return DecoderKind::ExpectedLog;
  throw ParseError(line, "unknown decoder kind '" + s + "'");
}

/// Everything a run needs, as read from (or written to) a scenario file.
struct ScenarioConfig {
  // [channel]
  ChannelParams channel = ChannelParams::defaults();
  ReceiverType receiver = ReceiverType::Passive;
  bool mobile = false;

  // [constellation]
  std::string cst_type = "sbrsk";
  double c = 400.0;    ///< per-bit molecular budget
  double rho0 = 0.0;
  double rho1 = 0.8;
  double p33 = 0.4;
  double n_a = 0.0;    ///< OOK molecules for bit 1; 0 means 2c
  int lattice_k = 2;
  int lattice_levels = 2;
  double lattice_spacing = 0.0;  ///< 0 means c
  std::vector<double> pair_ratios;  ///< maxrsk: type-2/type-1 ratios
  std::vector<std::vector<double>> explicit_symbols;

  // [reception]
  double lambda = 0.0;
  ReceptionModel model = ReceptionModel::PoissonApprox;

  // [decoder]
  DecoderKind decoder = DecoderKind::ChannelFree;
  bool genie = false;
  double known_h = 0.0;

  // [run]
  std::string mode = "static";  ///< static | mobile | budget-sweep | imperfect-csi | regions
  int bits = 50;
  std::uint64_t trials = 1000000;
  std::uint64_t seed = 1;
  bool seed_explicit = false;  ///< true when the file pinned the seed
  double raster_t = 0.0;       ///< wall-clock time for mobile region rasters
  SlotSchedule slot = SlotSchedule::BitDuration;
  std::vector<std::string> schemes;
  std::vector<double> lambda_sweep;
  std::vector<double> c_sweep;
  long long grid_max = 100;

  // [imperfect] — channel parameters the decoder wrongly believes
  std::optional<double> wrong_d_inf;
  std::optional<double> wrong_d_tr;

  static ScenarioConfig parse(const std::string& text);
  std::string serialize() const;

  double ook_molecules() const { return n_a > 0 ? n_a : 2.0 * c; }

  ChannelParams wrong_params() const {
    ChannelParams w = channel;
    if (wrong_d_inf) w.d_inf = *wrong_d_inf;
    if (wrong_d_tr) w.d_tr = *wrong_d_tr;
    return w;
  }

  Constellation build_constellation() const {
    if (cst_type == "sbrsk") return sbrsk(rho0, c);
    if (cst_type == "brsk") return brsk(rho0, rho1, c);
    if (cst_type == "smaxrsk33") return smaxrsk33(p33, c);
    if (cst_type == "ook") return ook(ook_molecules());
    if (cst_type == "rectangular")
      return rectangular_lattice(lattice_k, lattice_levels,
                                 lattice_spacing > 0 ? lattice_spacing : c);
    if (cst_type == "maxrsk") {
      std::vector<RatioVector> rv;
      for (double r : pair_ratios) rv.push_back(RatioVector::from_pair_ratio(r));
      return maxrsk(c, rv);
    }
    if (cst_type == "explicit") {
      Constellation out;
      out.symbols = explicit_symbols;
      out.m = static_cast<int>(out.symbols.size());
      out.k = out.symbols.empty() ? 0 : static_cast<int>(out.symbols[0].size());
      out.label = "explicit";
      out.validate();
      return out;
    }
    throw std::invalid_argument("unknown constellation type '" + cst_type + "'");
  }

  /// Scenario exactly as configured (constellation + decoder sections).
  Scenario base_scenario() const {
    Scenario s;
    s.cst = build_constellation();
    s.channel = channel;
    s.receiver = receiver;
    s.mobile = mobile;
    s.reception = {lambda, model};
    s.decoder = {decoder, genie};
    s.bits = bits;
    s.schedule = slot;
    s.known_h = known_h;
    s.label = cst_type;
    return s;
  }

  /// Named comparison scheme; a scheme bundles a constellation family with
  /// the decoder the comparison calls for.
  Scenario scheme_scenario(const std::string& name) const {
    Scenario s = base_scenario();
    s.label = name;
    auto set = [&](Constellation cst, DecoderKind kind, bool g = false) {
      s.cst = std::move(cst);
      s.decoder = {kind, g};
    };
    if (name == "base") {
      s.label = cst_type;
    } else if (name == "sbrsk") {
      set(sbrsk(rho0, c), DecoderKind::ChannelFree);
    } else if (name == "sbrsk-exact" || name == "sbrsk-poisson") {
      set(sbrsk(rho0, c), DecoderKind::ChannelFree);
      s.reception.model = name == "sbrsk-exact" ? ReceptionModel::Exact
                                                : ReceptionModel::PoissonApprox;
    } else if (name == "sbrsk-imperfect") {
      set(sbrsk(rho0, c), DecoderKind::ChannelFree);
      s.decoder_channel = wrong_params();
    } else if (name == "smaxrsk33") {
      set(smaxrsk33(p33, c), DecoderKind::ChannelFree);
    } else if (name == "ook-known-h") {
      set(ook(ook_molecules()), DecoderKind::OokThreshold, mobile);
    } else if (name == "ook-exact" || name == "ook-poisson") {
      set(ook(ook_molecules()), DecoderKind::OokThreshold, mobile);
      s.reception.model = name == "ook-exact" ? ReceptionModel::Exact
                                              : ReceptionModel::PoissonApprox;
    } else if (name == "ook-mean-ci") {
      set(ook(ook_molecules()), DecoderKind::MeanCI);
    } else if (name == "ook-full-csi") {
      set(ook(ook_molecules()), DecoderKind::FullCSI);
    } else if (name == "ook-expected-log") {
      set(ook(ook_molecules()), DecoderKind::ExpectedLog);
    } else if (name == "ook-imperfect-dinf" || name == "ook-imperfect-dtr") {
      set(ook(ook_molecules()), DecoderKind::FullCSI);
      ChannelParams w = channel;
      if (name == "ook-imperfect-dinf")
        w.d_inf = wrong_d_inf ? *wrong_d_inf : w.d_inf;
      else
        w.d_tr = wrong_d_tr ? *wrong_d_tr : w.d_tr;
      s.decoder_channel = w;
    } else {
      throw std::invalid_argument("unknown scheme '" + name + "'");
    }
    return s;
  }
};

inline ScenarioConfig ScenarioConfig::parse(const std::string& text) {
  ScenarioConfig cfg;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  bool in_symbols = false;

  while (std::getline(in, raw)) {
    ++line_no;
    // strip comments
    const auto hash = raw.find('#');
    std::string line = hash == std::string::npos ? raw : raw.substr(0, hash);
    if (detail::trim(line).empty()) continue;

    if (in_symbols && (line[0] == ' ' || line[0] == '\t')) {
      std::istringstream row(line);
      std::vector<double> sym;
      double v;
      while (row >> v) sym.push_back(v);
      if (sym.empty()) throw ParseError(line_no, "empty symbol row");
      if (!cfg.explicit_symbols.empty() &&
          cfg.explicit_symbols.back().size() != sym.size())
        throw ParseError(line_no, "symbol rows have inconsistent dimensions");
      cfg.explicit_symbols.push_back(std::move(sym));
      continue;
    }
    in_symbols = false;

    std::string t = detail::trim(line);
    if (t.front() == '[') {
      if (t.back() != ']') throw ParseError(line_no, "unterminated section");
      section = t.substr(1, t.size() - 2);
      if (section != "channel" && section != "constellation" &&
          section != "reception" && section != "decoder" && section != "run" &&
          section != "imperfect")
        throw ParseError(line_no, "unknown section [" + section + "]");
      continue;
    }

    if (t == "symbols:") {
      if (section != "constellation")
        throw ParseError(line_no, "symbols block outside [constellation]");
      cfg.explicit_symbols.clear();
      in_symbols = true;
      continue;
    }

    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ParseError(line_no, "expected key = value, got '" + t + "'");
    const std::string key = detail::trim(t.substr(0, eq));
    const std::string val = detail::trim(t.substr(eq + 1));
    const int ln = line_no;
    auto q = [&] { return detail::parse_quantity(val, ln); };

    if (section == "channel") {
      if (key == "receiver") {
        if (val == "passive") cfg.receiver = ReceiverType::Passive;
        else if (val == "absorbing") cfg.receiver = ReceiverType::Absorbing;
        else throw ParseError(ln, "receiver must be passive|absorbing");
      } else if (key == "mobile") cfg.mobile = detail::parse_bool(val, ln);
      else if (key == "d_inf") cfg.channel.d_inf = q();
      else if (key == "d_tr") cfg.channel.d_tr = q();
      else if (key == "r_rx") cfg.channel.r_rx = q();
      else if (key == "r0") cfg.channel.r0 = q();
      else if (key == "tau_s") cfg.channel.tau_s = q();
      else if (key == "t_b") cfg.channel.t_b = q();
      else throw ParseError(ln, "unknown [channel] key '" + key + "'");
    } else if (section == "constellation") {
      if (key == "type") cfg.cst_type = val;
      else if (key == "c") cfg.c = q();
      else if (key == "rho0") cfg.rho0 = q();
      else if (key == "rho1") cfg.rho1 = q();
      else if (key == "p") cfg.p33 = q();
      else if (key == "n_a") cfg.n_a = q();
      else if (key == "k") cfg.lattice_k = static_cast<int>(q());
      else if (key == "levels") cfg.lattice_levels = static_cast<int>(q());
      else if (key == "spacing") cfg.lattice_spacing = q();
      else if (key == "ratios") cfg.pair_ratios = detail::parse_list(val, ln);
      else throw ParseError(ln, "unknown [constellation] key '" + key + "'");
    } else if (section == "reception") {
      if (key == "lambda") cfg.lambda = q();
      else if (key == "model") {
        if (val == "exact") cfg.model = ReceptionModel::Exact;
        else if (val == "poisson") cfg.model = ReceptionModel::PoissonApprox;
        else throw ParseError(ln, "model must be exact|poisson");
      } else throw ParseError(ln, "unknown [reception] key '" + key + "'");
    } else if (section == "decoder") {
      if (key == "kind") cfg.decoder = decoder_kind_from_string(val, ln);
      else if (key == "genie") cfg.genie = detail::parse_bool(val, ln);
      else if (key == "h") cfg.known_h = q();
      else throw ParseError(ln, "unknown [decoder] key '" + key + "'");
    } else if (section == "run") {
      if (key == "mode") cfg.mode = val;
      else if (key == "bits") cfg.bits = static_cast<int>(q());
      else if (key == "trials") cfg.trials = static_cast<std::uint64_t>(q());
      else if (key == "seed") {
        cfg.seed = static_cast<std::uint64_t>(q());
        cfg.seed_explicit = true;
      } else if (key == "t") cfg.raster_t = q();
      else if (key == "slot") {
        if (val == "t_b") cfg.slot = SlotSchedule::BitDuration;
        else if (val == "tau_s") cfg.slot = SlotSchedule::SamplingOffset;
        else throw ParseError(ln, "slot must be t_b|tau_s");
      } else if (key == "schemes") cfg.schemes = detail::split(val, ',');
      else if (key == "lambda_sweep") cfg.lambda_sweep = detail::parse_list(val, ln);
      else if (key == "c_sweep") cfg.c_sweep = detail::parse_list(val, ln);
      else if (key == "grid_max") cfg.grid_max = static_cast<long long>(q());
      else throw ParseError(ln, "unknown [run] key '" + key + "'");
    } else if (section == "imperfect") {
      if (key == "d_inf") cfg.wrong_d_inf = q();
      else if (key == "d_tr") cfg.wrong_d_tr = q();
      else throw ParseError(ln, "unknown [imperfect] key '" + key + "'");
    } else {
      throw ParseError(ln, "key outside any section");
    }
  }
  return cfg;
}

inline std::string ScenarioConfig::serialize() const {
  std::ostringstream os;
  auto d = format_double;
  os << "[channel]\n";
  os << "receiver = " << to_string(receiver) << "\n";
  os << "mobile = " << (mobile ? "true" : "false") << "\n";
  os << "d_inf = " << d(channel.d_inf) << "\n";
  os << "d_tr = " << d(channel.d_tr) << "\n";
  os << "r_rx = " << d(channel.r_rx) << "\n";
  os << "r0 = " << d(channel.r0) << "\n";
  os << "tau_s = " << d(channel.tau_s) << "\n";
  os << "t_b = " << d(channel.t_b) << "\n";
  os << "\n[constellation]\n";
  os << "type = " << cst_type << "\n";
  os << "c = " << d(c) << "\n";
  os << "rho0 = " << d(rho0) << "\n";
  os << "rho1 = " << d(rho1) << "\n";
  os << "p = " << d(p33) << "\n";
  if (n_a > 0) os << "n_a = " << d(n_a) << "\n";
  os << "k = " << lattice_k << "\n";
  os << "levels = " << lattice_levels << "\n";
  if (lattice_spacing > 0) os << "spacing = " << d(lattice_spacing) << "\n";
  if (!pair_ratios.empty()) {
    os << "ratios = ";
    for (std::size_t i = 0; i < pair_ratios.size(); ++i)
      os << (i ? ", " : "") << d(pair_ratios[i]);
    os << "\n";
  }
  if (!explicit_symbols.empty()) {
    os << "symbols:\n";
    for (const auto& row : explicit_symbols) {
      os << " ";
      for (double v : row) os << " " << d(v);
      os << "\n";
    }
  }
  os << "\n[reception]\n";
  os << "lambda = " << d(lambda) << "\n";
  os << "model = " << (model == ReceptionModel::Exact ? "exact" : "poisson")
     << "\n";
  os << "\n[decoder]\n";
  os << "kind = " << to_string(decoder) << "\n";
  os << "genie = " << (genie ? "true" : "false") << "\n";
  if (known_h > 0) os << "h = " << d(known_h) << "\n";
  os << "\n[run]\n";
  os << "mode = " << mode << "\n";
  os << "bits = " << bits << "\n";
  os << "trials = " << trials << "\n";
  os << "seed = " << seed << "\n";
  if (raster_t > 0) os << "t = " << d(raster_t) << "\n";
  os << "slot = " << (slot == SlotSchedule::BitDuration ? "t_b" : "tau_s")
     << "\n";
  if (!schemes.empty()) {
    os << "schemes = ";
    for (std::size_t i = 0; i < schemes.size(); ++i)
      os << (i ? ", " : "") << schemes[i];
    os << "\n";
  }
  if (!lambda_sweep.empty()) {
    os << "lambda_sweep = ";
    for (std::size_t i = 0; i < lambda_sweep.size(); ++i)
      os << (i ? ", " : "") << d(lambda_sweep[i]);
    os << "\n";
  }
  if (!c_sweep.empty()) {
    os << "c_sweep = ";
    for (std::size_t i = 0; i < c_sweep.size(); ++i)
      os << (i ? ", " : "") << d(c_sweep[i]);
    os << "\n";
  }
  os << "grid_max = " << grid_max << "\n";
  if (wrong_d_inf || wrong_d_tr) {
    os << "\n[imperfect]\n";
    if (wrong_d_inf) os << "d_inf = " << d(*wrong_d_inf) << "\n";
    if (wrong_d_tr) os << "d_tr = " << d(*wrong_d_tr) << "\n";
  }
  return os.str();
}

}  // namespace molcomm
