#include "spwave/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "spwave/errors.hpp"

namespace spwave {

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"experiment", {"kind", "nu", "alpha", "replicas", "seed"}},
      {"basis", {"length", "modes"}},
      {"noise", {"exponent", "scale", "coefficients"}},
      {"model", {"nonlinearity", "coefficients"}},
      {"initial", {"u0", "u1"}},
      {"time", {"horizon", "steps", "output_count", "output_times"}},
      {"audit", {"profile", "factor", "coefficients"}},
  };
  return keys;
}

const std::set<std::string>& field_presets() {
  static const std::set<std::string> presets{"zero", "mode1", "smooth"};
  return presets;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_list(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ", ";
    out += format_double(values[i]);
  }
  return out;
}

// Collects violations while reading typed values from the tree.
class Reader {
 public:
  Reader(const boost::property_tree::ptree& tree, std::vector<std::string>& problems)
      : tree_(tree), problems_(problems) {}

  const std::string* raw(const std::string& section, const std::string& key) const {
    const auto sec = tree_.find(section);
    if (sec == tree_.not_found()) return nullptr;
    const auto item = sec->second.find(key);
    if (item == sec->second.not_found()) return nullptr;
    return &item->second.data();
  }

  void read(const std::string& section, const std::string& key, double& out) {
    if (const auto* text = raw(section, key)) {
      if (auto v = parse_double(trim(*text))) {
        out = *v;
      } else {
        problems_.push_back(section + "." + key + ": expected a number, got '" + trim(*text) + "'");
      }
    }
  }

  void read(const std::string& section, const std::string& key, std::uint64_t& out) {
    if (const auto* text = raw(section, key)) {
      const std::string t = trim(*text);
      std::uint64_t v = 0;
      const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
      if (ec != std::errc() || end != t.data() + t.size() || t.empty()) {
        problems_.push_back(section + "." + key + ": expected a non-negative integer, got '" + t + "'");
      } else {
        out = v;
      }
    }
  }

  void read(const std::string& section, const std::string& key, std::string& out) {
    if (const auto* text = raw(section, key)) out = trim(*text);
  }

  bool read_list(const std::string& section, const std::string& key, std::vector<double>& out) {
    const auto* text = raw(section, key);
    if (!text) return false;
    std::vector<double> values;
    std::stringstream stream(*text);
    std::string item;
    std::size_t index = 0;
    bool ok = true;
    while (std::getline(stream, item, ',')) {
      ++index;
      const std::string t = trim(item);
      if (auto v = parse_double(t)) {
        values.push_back(*v);
      } else {
        problems_.push_back(section + "." + key + "[" + std::to_string(index) + "]: expected a number, got '" + t +
                            "'");
        ok = false;
      }
    }
    if (ok) out = std::move(values);
    return true;
  }

  void read_field(const std::string& section, const std::string& key, FieldSpec& out) {
    const auto* text = raw(section, key);
    if (!text) return;
    const std::string t = trim(*text);
    if (!t.empty() && (std::isalpha(static_cast<unsigned char>(t.front())) != 0)) {
      out = FieldSpec::named(t);
      return;
    }
    std::vector<double> values;
    read_list(section, key, values);
    out = FieldSpec::explicit_modes(std::move(values));
  }

  static std::optional<double> parse_double(const std::string& t) {
    double v = 0.0;
    const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || end != t.data() + t.size() || t.empty()) return std::nullopt;
    return v;
  }

 private:
  const boost::property_tree::ptree& tree_;
  std::vector<std::string>& problems_;
};

std::optional<ExperimentKind> parse_kind(const std::string& name) {
  for (auto kind : {ExperimentKind::full_vs_heat, ExperimentKind::full_vs_detwave, ExperimentKind::split_audit,
                    ExperimentKind::component_scaling, ExperimentKind::oracle_suite}) {
    if (to_string(kind) == name) return kind;
  }
  return std::nullopt;
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::full_vs_heat: return "full_vs_heat";
    case ExperimentKind::full_vs_detwave: return "full_vs_detwave";
    case ExperimentKind::split_audit: return "split_audit";
    case ExperimentKind::component_scaling: return "component_scaling";
    case ExperimentKind::oracle_suite: return "oracle_suite";
  }
  return "unknown";
}

SpectralField FieldSpec::build(const SpectralBasis& basis) const {
  SpectralField field(basis);
  if (preset.empty()) {
    if (coefficients.size() > basis.modes())
      throw ConfigError("initial field references mode " + std::to_string(coefficients.size()) + " > N");
    for (std::size_t k = 0; k < coefficients.size(); ++k) field[k] = coefficients[k];
  } else if (preset == "mode1") {
    field[0] = 1.0;
  } else if (preset == "smooth") {
    // Odd modes with k^-3 decay: a smooth bump, H^2 uniformly in N.
    for (std::size_t k = 1; k <= basis.modes(); k += 2) field[k - 1] = 0.25 / (static_cast<double>(k * k * k));
  } else if (preset != "zero") {
    throw ConfigError("unknown initial field preset '" + preset + "'");
  }
  return field;
}

SpectralBasis ExperimentConfig::basis() const { return SpectralBasis(length, modes); }

CovarianceSpectrum ExperimentConfig::spectrum() const {
  if (noise_coefficients.empty()) return CovarianceSpectrum::power_law(modes, noise_exponent, noise_scale);
  std::vector<double> b(modes, 0.0);
  std::copy_n(noise_coefficients.begin(), std::min(modes, noise_coefficients.size()), b.begin());
  for (double& v : b) v *= noise_scale;
  return CovarianceSpectrum(std::move(b));
}

Nonlinearity ExperimentConfig::build_nonlinearity() const {
  if (nonlinearity == "zero") return Nonlinearity::zero();
  if (nonlinearity == "polynomial") return Nonlinearity::polynomial(polynomial);
  return Nonlinearity::cubic_default();
}

ModelParams ExperimentConfig::model(double nu_value) const {
  ModelParams p;
  p.nu = nu_value;
  p.alpha = alpha;
  p.horizon = horizon;
  p.steps = steps;
  p.basis = basis();
  p.nonlinearity = build_nonlinearity();
  p.noise = spectrum();
  return p;
}

Sampling ExperimentConfig::sampling() const {
  if (!output_times.empty()) return Sampling::at_times(output_times, horizon, steps);
  return Sampling::uniform(output_count, steps);
}

TestFunction ExperimentConfig::test_function() const {
  const SpectralBasis b = basis();
  SpectralField profile(b);
  for (std::size_t k = 0; k < audit_profile.size() && k < b.modes(); ++k) profile[k] = audit_profile[k];
  if (audit_factor == "trigonometric") {
    const auto c = [&](std::size_t i) { return i < audit_coefficients.size() ? audit_coefficients[i] : 0.0; };
    return {profile, TemporalFactor::trigonometric(c(0), c(1), c(2), c(3))};
  }
  return {profile, TemporalFactor::polynomial(audit_coefficients)};
}

void ExperimentConfig::validate() const {
  std::vector<std::string> problems;
  if (nu.empty()) problems.push_back("experiment.nu: at least one value required");
  for (std::size_t i = 0; i < nu.size(); ++i) {
    if (!(nu[i] > 0.0 && nu[i] <= 1.0))
      problems.push_back("experiment.nu[" + std::to_string(i + 1) + "]: must lie in (0, 1], got " +
                         format_double(nu[i]));
  }
  {
    std::vector<double> sorted = nu;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      problems.push_back("experiment.nu: duplicate values");
  }
  if (!std::isfinite(alpha) || alpha < 0.0) problems.push_back("experiment.alpha: must be finite and >= 0");
  if (alpha == 1.0)
    problems.push_back(
        "experiment.alpha: alpha = 1 is the boundary case between the heat and wave limits; it is deferred to "
        "future work and not supported");
  if (kind == ExperimentKind::full_vs_heat && !(alpha < 1.0))
    problems.push_back("experiment.alpha: full_vs_heat compares against the heat limit, which needs alpha < 1");
  if (kind == ExperimentKind::full_vs_detwave && !(alpha > 1.0))
    problems.push_back(
        "experiment.alpha: full_vs_detwave compares against the deterministic wave limit, which needs alpha > 1");
  if (replicas < 1) problems.push_back("experiment.replicas: must be at least 1");

  if (!(length > 0.0) || !std::isfinite(length)) problems.push_back("basis.length: must be positive");
  if (modes < 1) problems.push_back("basis.modes: must be at least 1");
  if (modes > 4096) problems.push_back("basis.modes: at most 4096 supported");

  if (!std::isfinite(noise_exponent)) problems.push_back("noise.exponent: must be finite");
  if (!(noise_scale >= 0.0) || !std::isfinite(noise_scale)) problems.push_back("noise.scale: must be >= 0");
  if (noise_coefficients.size() > modes)
    problems.push_back("noise.coefficients: references mode " + std::to_string(noise_coefficients.size()) +
                       " > basis.modes = " + std::to_string(modes));
  for (std::size_t i = 0; i < noise_coefficients.size(); ++i) {
    if (!(noise_coefficients[i] >= 0.0) || !std::isfinite(noise_coefficients[i]))
      problems.push_back("noise.coefficients[" + std::to_string(i + 1) + "]: must be finite and >= 0");
  }

  if (nonlinearity != "cubic_default" && nonlinearity != "polynomial" && nonlinearity != "zero")
    problems.push_back("model.nonlinearity: expected cubic_default, polynomial or zero, got '" + nonlinearity + "'");
  for (std::size_t i = 0; i < polynomial.size(); ++i) {
    if (!std::isfinite(polynomial[i]))
      problems.push_back("model.coefficients[" + std::to_string(i + 1) + "]: must be finite");
  }

  for (const auto& [name, spec] : {std::pair{"initial.u0", &u0}, std::pair{"initial.u1", &u1}}) {
    if (!spec->preset.empty()) {
      if (!field_presets().count(spec->preset))
        problems.push_back(std::string(name) + ": unknown preset '" + spec->preset + "' (zero, mode1, smooth)");
    } else {
      if (spec->coefficients.size() > modes)
        problems.push_back(std::string(name) + ": references mode " + std::to_string(spec->coefficients.size()) +
                           " > basis.modes = " + std::to_string(modes));
      for (double v : spec->coefficients)
        if (!std::isfinite(v)) problems.push_back(std::string(name) + ": coefficients must be finite");
    }
  }

  if (!(horizon > 0.0) || !std::isfinite(horizon)) problems.push_back("time.horizon: must be positive");
  if (steps < 1) problems.push_back("time.steps: must be at least 1");
  if (output_times.empty()) {
    if (output_count < 1 || (steps >= 1 && steps % output_count != 0))
      problems.push_back("time.output_count: must be positive and divide time.steps = " + std::to_string(steps));
  } else if (steps >= 1 && horizon > 0.0) {
    try {
      Sampling::at_times(output_times, horizon, steps);
    } catch (const ShapeError& e) {
      problems.push_back(std::string("time.output_times: ") + e.what());
    }
  }

  if (audit_profile.size() > modes)
    problems.push_back("audit.profile: references mode " + std::to_string(audit_profile.size()) +
                       " > basis.modes = " + std::to_string(modes));
  if (audit_factor != "polynomial" && audit_factor != "trigonometric")
    problems.push_back("audit.factor: expected polynomial or trigonometric, got '" + audit_factor + "'");
  if (audit_factor == "trigonometric" && audit_coefficients.size() != 4)
    problems.push_back("audit.coefficients: trigonometric factor takes offset, cos, sin, frequency");

  if (!problems.empty()) throw ConfigError(problems);
}

ExperimentConfig parse_config(std::string_view text) {
  boost::property_tree::ptree tree;
  std::istringstream stream{std::string(text)};
  try {
    boost::property_tree::ini_parser::read_ini(stream, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError("syntax: line " + std::to_string(e.line()) + ": " + e.message());
  }

  std::vector<std::string> problems;
  for (const auto& [section, body] : tree) {
    const auto known = known_keys().find(section);
    if (known == known_keys().end()) {
      problems.push_back(body.empty() && !body.data().empty() ? section + ": key outside any section"
                                                              : section + ": unknown section");
      continue;
    }
    for (const auto& [key, value] : body) {
      if (!known->second.count(key)) problems.push_back(section + "." + key + ": unknown key");
    }
  }

  ExperimentConfig c;
  Reader r(tree, problems);
  std::string kind_name = to_string(c.kind);
  r.read("experiment", "kind", kind_name);
  if (auto kind = parse_kind(kind_name)) {
    c.kind = *kind;
  } else {
    problems.push_back("experiment.kind: unknown kind '" + kind_name + "'");
  }
  r.read_list("experiment", "nu", c.nu);
  r.read("experiment", "alpha", c.alpha);
  r.read("experiment", "replicas", c.replicas);
  r.read("experiment", "seed", c.seed);
  r.read("basis", "length", c.length);
  r.read("basis", "modes", c.modes);
  r.read("noise", "exponent", c.noise_exponent);
  r.read("noise", "scale", c.noise_scale);
  r.read_list("noise", "coefficients", c.noise_coefficients);
  r.read("model", "nonlinearity", c.nonlinearity);
  {
    std::vector<double> poly;
    if (r.read_list("model", "coefficients", poly)) {
      if (poly.size() > 4) {
        problems.push_back("model.coefficients: at most four coefficients (c0..c3)");
      } else {
        c.polynomial = {0.0, 0.0, 0.0, 0.0};
        std::copy(poly.begin(), poly.end(), c.polynomial.begin());
      }
    }
  }
  if (c.nonlinearity != "polynomial") {
    const std::array<double, 4> canonical = c.nonlinearity == "zero" ? std::array<double, 4>{0.0, 0.0, 0.0, 0.0}
                                                                     : std::array<double, 4>{0.0, 1.0, 0.0, -1.0};
    if (r.raw("model", "coefficients") && c.polynomial != canonical)
      problems.push_back("model.coefficients: only allowed with nonlinearity = polynomial");
    c.polynomial = canonical;
  }
  r.read_field("initial", "u0", c.u0);
  r.read_field("initial", "u1", c.u1);
  r.read("time", "horizon", c.horizon);
  r.read("time", "steps", c.steps);
  r.read("time", "output_count", c.output_count);
  r.read_list("time", "output_times", c.output_times);
  r.read_list("audit", "profile", c.audit_profile);
  r.read("audit", "factor", c.audit_factor);
  r.read_list("audit", "coefficients", c.audit_coefficients);

  try {
    c.validate();
  } catch (const ConfigError& e) {
    problems.insert(problems.end(), e.violations().begin(), e.violations().end());
  }
  if (!problems.empty()) throw ConfigError(problems);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open config file");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string to_text(const ExperimentConfig& c) {
  std::ostringstream out;
  const auto field = [](const FieldSpec& f) { return f.preset.empty() ? format_list(f.coefficients) : f.preset; };
  out << "[experiment]\n"
      << "kind = " << to_string(c.kind) << "\n"
      << "nu = " << format_list(c.nu) << "\n"
      << "alpha = " << format_double(c.alpha) << "\n"
      << "replicas = " << c.replicas << "\n"
      << "seed = " << c.seed << "\n\n"
      << "[basis]\n"
      << "length = " << format_double(c.length) << "\n"
      << "modes = " << c.modes << "\n\n"
      << "[noise]\n"
      << "exponent = " << format_double(c.noise_exponent) << "\n"
      << "scale = " << format_double(c.noise_scale) << "\n";
  if (!c.noise_coefficients.empty()) out << "coefficients = " << format_list(c.noise_coefficients) << "\n";
  out << "\n[model]\n"
      << "nonlinearity = " << c.nonlinearity << "\n"
      << "coefficients = " << format_list({c.polynomial.begin(), c.polynomial.end()}) << "\n\n"
      << "[initial]\n"
      << "u0 = " << field(c.u0) << "\n"
      << "u1 = " << field(c.u1) << "\n\n"
      << "[time]\n"
      << "horizon = " << format_double(c.horizon) << "\n"
      << "steps = " << c.steps << "\n"
      << "output_count = " << c.output_count << "\n";
  if (!c.output_times.empty()) out << "output_times = " << format_list(c.output_times) << "\n";
  out << "\n[audit]\n"
      << "profile = " << format_list(c.audit_profile) << "\n"
      << "factor = " << c.audit_factor << "\n"
      << "coefficients = " << format_list(c.audit_coefficients) << "\n";
  return out.str();
}

}  // namespace spwave
