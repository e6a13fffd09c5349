#include "rampflow/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "rampflow/csv.hpp"
#include "rampflow/error.hpp"

namespace rampflow {
namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>, std::less<>> kSchema{
    {"grid", {"x_min", "x_max", "n_cells"}},
    {"initial", {"profile", "value", "amplitude", "center", "width"}},
    {"kernel", {"eta", "delta", "eta_convective"}},
    {"ramp", {"on_interval", "q_on", "off_interval", "q_off", "rate_basis"}},
    {"law", {"name"}},
    {"solver",
     {"cfl", "t_final", "left_boundary", "left_value", "right_boundary", "snapshot_stride"}},
    {"functional", {"a", "b"}},
    {"sweep", {"deltas"}},
    {"stability", {"channel", "epsilons", "bump_center", "bump_width", "c_surrogate"}},
    {"convergence", {"n_cells", "reference_factor"}},
};

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

double to_double(const std::string& text, const std::string& field) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value)) {
    throw ConfigError(field, "expects a finite number, got '" + text + "'");
  }
  return value;
}

int to_int(const std::string& text, const std::string& field) {
  int value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError(field, "expects an integer, got '" + text + "'");
  }
  return value;
}

std::vector<double> to_doubles(const std::string& text, const std::string& field) {
  std::vector<double> values;
  for (const auto& part : split(text, ',')) values.push_back(to_double(part, field));
  return values;
}

Interval to_interval(const std::string& text, const std::string& field) {
  const auto values = to_doubles(text, field);
  if (values.size() != 2) throw ConfigError(field, "expects two numbers 'a, b'");
  return Interval{values[0], values[1]};
}

// "1.2" is a constant rate; "0:1.2, 3:0.5" switches to 0.5 at t = 3.
RateSchedule to_schedule(const std::string& text, const std::string& field) {
  if (text.find(':') == std::string::npos) {
    const double v = to_double(text, field);
    if (v < 0.0) throw ConfigError(field, "must be non-negative");
    return RateSchedule::constant(v);
  }
  std::vector<RateSchedule::Segment> segments;
  for (const auto& part : split(text, ',')) {
    const auto pieces = split(part, ':');
    if (pieces.size() != 2) throw ConfigError(field, "expects 'start:value' pairs");
    segments.push_back({to_double(pieces[0], field), to_double(pieces[1], field)});
  }
  try {
    return RateSchedule(std::move(segments));
  } catch (const ConfigError& e) {
    throw ConfigError(field, "is not a valid schedule (" + std::string(e.what()) + ")");
  }
}

std::string format_schedule(const RateSchedule& schedule) {
  const auto& segs = schedule.segments();
  if (segs.size() == 1) return format_double(segs.front().value);
  std::string out;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    if (i) out += ", ";
    out += format_double(segs[i].start) + ":" + format_double(segs[i].value);
  }
  return out;
}

std::string join(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += format_double(values[i]);
  }
  return out;
}

// Tracks which keys of a section were read so that required keys can be
// enforced and unknown ones rejected.
class SectionReader {
 public:
  SectionReader(const pt::ptree* tree, std::string name) : tree_(tree), name_(std::move(name)) {}

  std::optional<std::string> get(const std::string& key) const {
    if (!tree_) return std::nullopt;
    auto child = tree_->get_child_optional(pt::ptree::path_type(key, '\0'));
    if (!child) return std::nullopt;
    return trim(child->data());
  }

  std::string require(const std::string& key) const {
    auto v = get(key);
    if (!v || v->empty()) throw ConfigError(field(key), "is required");
    return *v;
  }

  std::string field(const std::string& key) const { return name_ + "." + key; }

  double number(const std::string& key, double fallback) const {
    auto v = get(key);
    return v ? to_double(*v, field(key)) : fallback;
  }
  double number(const std::string& key) const { return to_double(require(key), field(key)); }
  int integer(const std::string& key, int fallback) const {
    auto v = get(key);
    return v ? to_int(*v, field(key)) : fallback;
  }
  int integer(const std::string& key) const { return to_int(require(key), field(key)); }
  std::string text(const std::string& key, std::string fallback) const {
    auto v = get(key);
    return v ? *v : fallback;
  }

 private:
  const pt::ptree* tree_;
  std::string name_;
};

RateBasis rate_basis_from_name(const std::string& name) {
  if (name == "per_length") return RateBasis::per_length;
  if (name == "ramp_flow") return RateBasis::ramp_flow;
  throw ConfigError("ramp.rate_basis", "must be per_length or ramp_flow, got '" + name + "'");
}

BoundaryMode boundary_from(const SectionReader& section, const std::string& key,
                           const std::string& fallback) {
  const std::string name = section.text(key, fallback);
  try {
    return boundary_mode_from_name(name);
  } catch (const ConfigError&) {
    throw ConfigError(section.field(key), "must be dirichlet, extrapolation or wall, got '" + name + "'");
  }
}

InitialProfile profile_from_name(const std::string& name) {
  if (name == "constant") return InitialProfile::constant;
  if (name == "gaussian") return InitialProfile::gaussian;
  throw ConfigError("initial.profile", "must be constant or gaussian, got '" + name + "'");
}

ScenarioConfig from_tree(const pt::ptree& root) {
  for (const auto& [section, body] : root) {
    auto schema = kSchema.find(section);
    if (schema == kSchema.end()) {
      if (body.empty()) throw ConfigError(section, "is not inside a section");
      throw ConfigError(section, "is not a known section");
    }
    for (const auto& [key, value] : body) {
      if (!schema->second.contains(key)) throw ConfigError(section + "." + key, "is not a known key");
    }
  }
  auto section = [&root](const std::string& name) {
    auto child = root.get_child_optional(name);
    return SectionReader(child ? &*child : nullptr, name);
  };

  ScenarioConfig c;
  const auto grid = section("grid");
  c.grid.x_min = grid.number("x_min");
  c.grid.x_max = grid.number("x_max");
  c.grid.n_cells = grid.integer("n_cells");

  const auto initial = section("initial");
  c.initial.profile = profile_from_name(initial.text("profile", "constant"));
  c.initial.value = initial.number("value");
  c.initial.amplitude = initial.number("amplitude", 0.0);
  c.initial.center = initial.number("center", 0.0);
  c.initial.width = initial.number("width", 1.0);

  const auto kernel = section("kernel");
  c.kernel.eta = kernel.number("eta");
  c.kernel.delta = kernel.number("delta");
  c.kernel.eta_convective = kernel.number("eta_convective", c.kernel.eta);

  const auto ramp = section("ramp");
  if (auto v = ramp.get("on_interval")) {
    c.ramp.on_interval = to_interval(*v, ramp.field("on_interval"));
    c.ramp.q_on = to_schedule(ramp.require("q_on"), ramp.field("q_on"));
  } else if (ramp.get("q_on")) {
    c.ramp.q_on = to_schedule(*ramp.get("q_on"), ramp.field("q_on"));
  }
  if (auto v = ramp.get("off_interval")) {
    c.ramp.off_interval = to_interval(*v, ramp.field("off_interval"));
    c.ramp.q_off = to_schedule(ramp.require("q_off"), ramp.field("q_off"));
  } else if (ramp.get("q_off")) {
    c.ramp.q_off = to_schedule(*ramp.get("q_off"), ramp.field("q_off"));
  }
  c.ramp.basis = rate_basis_from_name(ramp.text("rate_basis", "per_length"));

  c.law.name = section("law").text("name", "linear");

  const auto solver = section("solver");
  c.solver.cfl = solver.number("cfl", 0.9);
  c.solver.t_final = solver.number("t_final");
  c.solver.left_boundary = boundary_from(solver, "left_boundary", "dirichlet");
  if (auto v = solver.get("left_value")) c.solver.left_value = to_double(*v, solver.field("left_value"));
  c.solver.right_boundary = boundary_from(solver, "right_boundary", "extrapolation");
  c.solver.snapshot_stride = solver.integer("snapshot_stride", 100);

  const auto functional = section("functional");
  c.functional.a = functional.number("a", c.grid.x_min);
  c.functional.b = functional.number("b", c.grid.x_max);

  if (root.get_child_optional("sweep")) {
    const auto sweep = section("sweep");
    c.sweep = ScenarioConfig::SweepBlock{to_doubles(sweep.require("deltas"), sweep.field("deltas"))};
  }
  if (root.get_child_optional("stability")) {
    const auto st = section("stability");
    ScenarioConfig::StabilityBlock block;
    block.channel = perturbation_channel_from_name(st.require("channel"));
    block.epsilons = to_doubles(st.require("epsilons"), st.field("epsilons"));
    block.bump_center = st.number("bump_center", block.bump_center);
    block.bump_width = st.number("bump_width", block.bump_width);
    if (auto v = st.get("c_surrogate")) block.c_surrogate = to_double(*v, st.field("c_surrogate"));
    c.stability = block;
  }
  if (root.get_child_optional("convergence")) {
    const auto cv = section("convergence");
    ScenarioConfig::ConvergenceBlock block;
    for (const auto& part : split(cv.require("n_cells"), ',')) {
      block.n_cells.push_back(to_int(part, cv.field("n_cells")));
    }
    block.reference_factor = cv.integer("reference_factor", 4);
    c.convergence = block;
  }
  validate(c);
  return c;
}

}  // namespace

std::string_view to_string(RateBasis basis) {
  return basis == RateBasis::per_length ? "per_length" : "ramp_flow";
}

std::string_view to_string(InitialProfile profile) {
  return profile == InitialProfile::constant ? "constant" : "gaussian";
}

std::string_view to_string(PerturbationChannel channel) {
  switch (channel) {
    case PerturbationChannel::initial_datum: return "initial_datum";
    case PerturbationChannel::q_on: return "q_on";
    case PerturbationChannel::q_off: return "q_off";
    case PerturbationChannel::kernel_delta: return "kernel_delta";
    case PerturbationChannel::kernel_shape: return "kernel_shape";
  }
  return "kernel_delta";
}

PerturbationChannel perturbation_channel_from_name(std::string_view name) {
  for (auto ch : {PerturbationChannel::initial_datum, PerturbationChannel::q_on,
                  PerturbationChannel::q_off, PerturbationChannel::kernel_delta,
                  PerturbationChannel::kernel_shape}) {
    if (to_string(ch) == name) return ch;
  }
  throw ConfigError("stability.channel", "must be one of initial_datum, q_on, q_off, "
                                         "kernel_delta, kernel_shape; got '" +
                                             std::string(name) + "'");
}

double ScenarioConfig::initial_density(double x) const {
  if (initial.profile == InitialProfile::constant) return initial.value;
  const double z = (x - initial.center) / initial.width;
  return initial.value + initial.amplitude * std::exp(-z * z);
}

double ScenarioConfig::effective_left_value() const {
  return solver.left_value.value_or(initial_density(grid.x_min));
}

void validate(const ScenarioConfig& c) {
  if (!(c.grid.x_min < c.grid.x_max)) throw ConfigError("grid.x_max", "must be larger than grid.x_min");
  if (c.grid.n_cells < 3) throw ConfigError("grid.n_cells", "must be at least 3");

  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!in_unit(c.initial.value)) throw ConfigError("initial.value", "must lie in [0, 1]");
  if (c.initial.profile == InitialProfile::gaussian) {
    if (!(c.initial.width > 0.0)) throw ConfigError("initial.width", "must be positive");
    if (!in_unit(c.initial.value + c.initial.amplitude)) {
      throw ConfigError("initial.amplitude", "must keep value + amplitude in [0, 1]");
    }
  }

  if (!(c.kernel.eta > 0.0)) throw ConfigError("kernel.eta", "must be positive");
  if (!(c.kernel.eta_convective > 0.0)) throw ConfigError("kernel.eta_convective", "must be positive");
  if (!(c.kernel.delta >= -c.kernel.eta && c.kernel.delta <= c.kernel.eta)) {
    throw ConfigError("kernel.delta", "must lie in [-eta, eta]");
  }

  auto check_interval = [&c](const std::optional<Interval>& iv, const char* field) {
    if (!iv) return;
    if (!(iv->a < iv->b)) throw ConfigError(field, "must have positive length");
    if (iv->a < c.grid.x_min || iv->b > c.grid.x_max) throw ConfigError(field, "must lie inside the grid");
  };
  check_interval(c.ramp.on_interval, "ramp.on_interval");
  check_interval(c.ramp.off_interval, "ramp.off_interval");

  VelocityLaw::from_name(c.law.name);

  if (!(c.solver.cfl > 0.0 && c.solver.cfl <= 1.0)) throw ConfigError("solver.cfl", "must lie in (0, 1]");
  if (!(c.solver.t_final >= 0.0)) throw ConfigError("solver.t_final", "must be non-negative");
  if (c.solver.snapshot_stride < 1) throw ConfigError("solver.snapshot_stride", "must be at least 1");
  if (c.solver.right_boundary == BoundaryMode::dirichlet) {
    throw ConfigError("solver.right_boundary", "must be extrapolation or wall");
  }
  if (c.solver.left_value && !in_unit(*c.solver.left_value)) {
    throw ConfigError("solver.left_value", "must lie in [0, 1]");
  }

  if (!(c.functional.a < c.functional.b)) throw ConfigError("functional.a", "must be smaller than functional.b");
  if (c.functional.a < c.grid.x_min || c.functional.b > c.grid.x_max) {
    throw ConfigError("functional.b", "window must lie inside the grid");
  }

  if (c.sweep) {
    if (c.sweep->deltas.size() < 2) throw ConfigError("sweep.deltas", "needs at least 2 values");
    for (double d : c.sweep->deltas) {
      if (!(d >= -c.kernel.eta && d <= c.kernel.eta)) {
        throw ConfigError("sweep.deltas", "values must lie in [-eta, eta]");
      }
    }
  }
  if (c.stability) {
    if (c.stability->epsilons.empty()) throw ConfigError("stability.epsilons", "needs at least one value");
    for (double e : c.stability->epsilons) {
      if (!(e >= 0.0)) throw ConfigError("stability.epsilons", "values must be non-negative");
    }
    if (!(c.stability->bump_width > 0.0)) throw ConfigError("stability.bump_width", "must be positive");
    if (c.stability->c_surrogate && !(*c.stability->c_surrogate > 0.0)) {
      throw ConfigError("stability.c_surrogate", "must be positive");
    }
  }
  if (c.convergence) {
    const auto& n = c.convergence->n_cells;
    if (n.size() < 2) throw ConfigError("convergence.n_cells", "needs at least 2 grids");
    for (std::size_t i = 0; i < n.size(); ++i) {
      if (n[i] < 3) throw ConfigError("convergence.n_cells", "values must be at least 3");
      if (i && n[i] <= n[i - 1]) throw ConfigError("convergence.n_cells", "must be strictly increasing");
    }
    if (c.convergence->reference_factor < 2) {
      throw ConfigError("convergence.reference_factor", "must be at least 2");
    }
  }
}

ScenarioConfig parse_config_text(std::string_view text, std::string_view origin) {
  // Comments start with ';' or '#', also after a value.
  std::string stripped;
  for (const auto& line : split(text, '\n')) {
    stripped += line.substr(0, line.find_first_of(";#"));
    stripped += '\n';
  }
  pt::ptree root;
  std::istringstream in{stripped};
  try {
    pt::ini_parser::read_ini(in, root);
  } catch (const pt::ini_parser_error& e) {
    std::ostringstream msg;
    msg << "cannot parse " << origin << " line " << e.line() << ": " << e.message();
    throw ConfigError("", msg.str());
  }
  return from_tree(root);
}

ScenarioConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str(), path.string());
}

ScenarioConfig load_config(std::string_view name_or_path) {
  if (auto text = bundled_scenario_text(name_or_path)) {
    return parse_config_text(*text, name_or_path);
  }
  const std::filesystem::path path{std::string(name_or_path)};
  if (!std::filesystem::exists(path)) {
    std::string known;
    for (auto name : bundled_scenario_names()) known += (known.empty() ? "" : ", ") + std::string(name);
    throw ConfigError("", "no config file or bundled scenario named '" + std::string(name_or_path) +
                              "' (bundled: " + known + ")");
  }
  return parse_config(path);
}

std::string normalized_config(const ScenarioConfig& c) {
  std::ostringstream out;
  auto num = [](double v) { return format_double(v); };
  out << "[grid]\n"
      << "x_min = " << num(c.grid.x_min) << "\n"
      << "x_max = " << num(c.grid.x_max) << "\n"
      << "n_cells = " << c.grid.n_cells << "\n\n";
  out << "[initial]\n"
      << "profile = " << to_string(c.initial.profile) << "\n"
      << "value = " << num(c.initial.value) << "\n"
      << "amplitude = " << num(c.initial.amplitude) << "\n"
      << "center = " << num(c.initial.center) << "\n"
      << "width = " << num(c.initial.width) << "\n\n";
  out << "[kernel]\n"
      << "eta = " << num(c.kernel.eta) << "\n"
      << "delta = " << num(c.kernel.delta) << "\n"
      << "eta_convective = " << num(c.kernel.eta_convective) << "\n\n";
  out << "[ramp]\n";
  if (c.ramp.on_interval) {
    out << "on_interval = " << num(c.ramp.on_interval->a) << ", " << num(c.ramp.on_interval->b) << "\n";
  }
  out << "q_on = " << format_schedule(c.ramp.q_on) << "\n";
  if (c.ramp.off_interval) {
    out << "off_interval = " << num(c.ramp.off_interval->a) << ", " << num(c.ramp.off_interval->b)
        << "\n";
  }
  out << "q_off = " << format_schedule(c.ramp.q_off) << "\n"
      << "rate_basis = " << to_string(c.ramp.basis) << "\n\n";
  out << "[law]\nname = " << c.law.name << "\n\n";
  out << "[solver]\n"
      << "cfl = " << num(c.solver.cfl) << "\n"
      << "t_final = " << num(c.solver.t_final) << "\n"
      << "left_boundary = " << to_string(c.solver.left_boundary) << "\n"
      << "left_value = " << num(c.effective_left_value()) << "\n"
      << "right_boundary = " << to_string(c.solver.right_boundary) << "\n"
      << "snapshot_stride = " << c.solver.snapshot_stride << "\n\n";
  out << "[functional]\n"
      << "a = " << num(c.functional.a) << "\n"
      << "b = " << num(c.functional.b) << "\n";
  if (c.sweep) out << "\n[sweep]\ndeltas = " << join(c.sweep->deltas) << "\n";
  if (c.stability) {
    out << "\n[stability]\n"
        << "channel = " << to_string(c.stability->channel) << "\n"
        << "epsilons = " << join(c.stability->epsilons) << "\n"
        << "bump_center = " << num(c.stability->bump_center) << "\n"
        << "bump_width = " << num(c.stability->bump_width) << "\n";
    if (c.stability->c_surrogate) out << "c_surrogate = " << num(*c.stability->c_surrogate) << "\n";
  }
  if (c.convergence) {
    out << "\n[convergence]\nn_cells = ";
    for (std::size_t i = 0; i < c.convergence->n_cells.size(); ++i) {
      out << (i ? ", " : "") << c.convergence->n_cells[i];
    }
    out << "\nreference_factor = " << c.convergence->reference_factor << "\n";
  }
  return out.str();
}

}  // namespace rampflow
