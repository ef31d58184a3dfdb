#include "cdmkit/text_io.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

namespace cdmkit {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto end = nl == std::string_view::npos ? text.size() : nl;
    const auto line = trim(text.substr(pos, end - pos));
    if (!line.empty() && line.front() != '#') out.push_back(line);
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return out;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto at = s.find(sep, pos);
    out.push_back(trim(s.substr(pos, at == std::string_view::npos ? std::string_view::npos : at - pos)));
    if (at == std::string_view::npos) break;
    pos = at + 1;
  }
  return out;
}

double parse_real(std::string_view tok) {
  const std::string s(trim(tok));
  if (s.empty()) throw std::invalid_argument("expected a number, got an empty field");
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v)) {
    throw std::invalid_argument("not a finite number: '" + s + "'");
  }
  return v;
}

int parse_int(std::string_view tok) {
  const double v = parse_real(tok);
  if (v != std::floor(v) || std::abs(v) > 1e9) {
    throw std::invalid_argument("not an integer: '" + std::string(tok) + "'");
  }
  return static_cast<int>(v);
}

std::string join_numbers(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += format_number(v[i]);
  }
  return out;
}

std::string opt_number(const std::optional<double>& v) {
  return v ? format_number(*v) : std::string("undefined");
}

void append_kv(std::string& out, const std::string& key, const std::string& value) {
  out += key;
  out += " = ";
  out += value;
  out += '\n';
}

void append_matrix(std::string& out, const Eigen::MatrixXd& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out += ' ';
      out += format_number(m(r, c));
    }
    out += '\n';
  }
}

std::string format_complex(Complex z) {
  if (z.imag() == 0.0) return format_number(z.real());
  return format_number(z.real()) + (z.imag() < 0 ? "-" : "+") + format_number(std::abs(z.imag())) + "i";
}

std::string format_envelope(const MetricEnvelope& e) {
  if (e.count == 0) return "none";
  return format_number(e.min) + " " + format_number(e.max) + " (" + std::to_string(e.count) + ")";
}

}  // namespace

std::string format_number(double v) {
  if (v == 0.0) v = 0.0;  // drop negative zero
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::vector<double> parse_reals(std::string_view line) {
  std::vector<double> out;
  std::istringstream in{std::string(line)};
  std::string tok;
  while (in >> tok) out.push_back(parse_real(tok));
  return out;
}

Polynomial parse_polynomial(std::string_view text) {
  const auto lines = lines_of(text);
  if (lines.empty()) throw std::invalid_argument("polynomial: no coefficient line");
  if (lines.size() > 1) throw std::invalid_argument("polynomial: expected one coefficient line");
  auto c = parse_reals(lines.front());
  if (c.empty()) throw std::invalid_argument("polynomial: no coefficients");
  return Polynomial(std::move(c));
}

std::string format_polynomial(const Polynomial& p) {
  const auto c = p.coeffs();
  return join_numbers(std::vector<double>(c.begin(), c.end())) + "\n";
}

KeyValues parse_key_values(std::string_view text) {
  KeyValues out;
  for (const auto line : lines_of(text)) {
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw std::invalid_argument("expected 'key = value': '" + std::string(line) + "'");
    }
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) throw std::invalid_argument("missing key: '" + std::string(line) + "'");
    out.emplace_back(std::string(key), std::string(trim(line.substr(eq + 1))));
  }
  return out;
}

PlantTF parse_plant(std::string_view text) {
  PlantTF plant;
  bool have_den = false;
  for (const auto& [key, value] : parse_key_values(text)) {
    if (key == "den") {
      plant.den = parse_polynomial(value);
      have_den = true;
    } else if (key.rfind("num.", 0) == 0 && key.size() > 4) {
      plant.nums[key.substr(4)] = parse_polynomial(value);
    } else if (key == "input") {
      plant.input_label = value;
    } else if (key.rfind("unit.", 0) == 0 && key.size() > 5) {
      plant.units[key.substr(5)] = value;
    } else {
      throw std::invalid_argument("plant: unknown key '" + key + "'");
    }
  }
  if (!have_den) throw std::invalid_argument("plant: missing 'den'");
  plant.validate();
  return plant;
}

std::string format_plant(const PlantTF& plant) {
  std::string out;
  append_kv(out, "input", plant.input_label);
  out += "den = " + format_polynomial(plant.den);
  for (const auto& [label, num] : plant.nums) out += "num." + label + " = " + format_polynomial(num);
  for (const auto& [label, unit] : plant.units) append_kv(out, "unit." + label, unit);
  return out;
}

GainStructure parse_gain_structure(std::string_view text) {
  GainStructure s;
  for (const auto& [key, value] : parse_key_values(text)) {
    if (key.rfind("gain.", 0) == 0 && key.size() > 5) {
      auto& terms = s.feedback[key.substr(5)];
      std::istringstream in(value);
      std::string tok;
      while (in >> tok) {
        const auto colon = tok.find(':');
        if (colon == std::string::npos || colon == 0) {
          throw std::invalid_argument("gain structure: term must be name:power, got '" + tok + "'");
        }
        terms.push_back({tok.substr(0, colon), parse_int(std::string_view(tok).substr(colon + 1))});
      }
      if (terms.empty()) throw std::invalid_argument("gain structure: '" + key + "' has no terms");
    } else if (key == "integrator") {
      s.integrator_order = parse_int(value);
    } else if (key == "reference") {
      s.reference = value;
    } else if (key == "reference_channel") {
      s.reference_channel = value;
    } else if (key == "match") {
      s.matched_powers.clear();
      for (double v : parse_reals(value)) s.matched_powers.push_back(parse_int(format_number(v)));
    } else {
      throw std::invalid_argument("gain structure: unknown key '" + key + "'");
    }
  }
  if (s.feedback.empty()) throw std::invalid_argument("gain structure: no gain.<channel> lines");
  return s;
}

std::string format_gain_structure(const GainStructure& s) {
  std::string out;
  for (const auto& [channel, terms] : s.feedback) {
    std::string v;
    for (const auto& t : terms) {
      if (!v.empty()) v += ' ';
      v += t.gain + ":" + std::to_string(t.power);
    }
    append_kv(out, "gain." + channel, v);
  }
  append_kv(out, "integrator", std::to_string(s.integrator_order));
  append_kv(out, "reference", s.reference);
  if (!s.reference_channel.empty()) append_kv(out, "reference_channel", s.reference_channel);
  if (!s.matched_powers.empty()) {
    std::string v;
    for (int p : s.matched_powers) v += (v.empty() ? "" : " ") + std::to_string(p);
    append_kv(out, "match", v);
  }
  return out;
}

std::map<std::string, double> parse_gains(std::string_view text) {
  std::map<std::string, double> out;
  for (const auto& [key, value] : parse_key_values(text)) out[key] = parse_real(value);
  return out;
}

std::string format_gains(const std::map<std::string, double>& gains) {
  std::string out;
  for (const auto& [k, v] : gains) append_kv(out, k, format_number(v));
  return out;
}

Eigen::MatrixXd parse_matrix(std::string_view text) {
  const auto lines = lines_of(text);
  if (lines.empty()) throw std::invalid_argument("matrix: no rows");
  std::vector<std::vector<double>> rows;
  for (const auto line : lines) rows.push_back(parse_reals(line));
  const auto cols = rows.front().size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols) throw std::invalid_argument("matrix: ragged rows");
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
  }
  return m;
}

std::string format_matrix(const Eigen::MatrixXd& m) {
  std::string out;
  append_matrix(out, m);
  return out;
}

StateSpace parse_state_space(std::string_view text) {
  const auto lines = lines_of(text);
  if (lines.empty()) throw std::invalid_argument("state space: missing 'n m p' header");
  const auto header = parse_reals(lines.front());
  if (header.size() != 3) throw std::invalid_argument("state space: header must be 'n m p'");
  const int n = parse_int(format_number(header[0]));
  const int m = parse_int(format_number(header[1]));
  const int p = parse_int(format_number(header[2]));
  if (n < 1 || m < 0 || p < 0) throw std::invalid_argument("state space: bad dimensions");
  if (static_cast<int>(lines.size()) != 1 + 2 * n + 2 * p) {
    throw std::invalid_argument("state space: expected " + std::to_string(2 * n + 2 * p) +
                                " matrix rows after the header");
  }
  std::size_t at = 1;
  auto block = [&](int rows, int cols) {
    Eigen::MatrixXd b(rows, cols);
    for (int r = 0; r < rows; ++r) {
      const auto v = parse_reals(lines[at++]);
      if (static_cast<int>(v.size()) != cols) {
        throw std::invalid_argument("state space: row " + std::to_string(at) + " should have " +
                                    std::to_string(cols) + " entries");
      }
      for (int c = 0; c < cols; ++c) b(r, c) = v[static_cast<std::size_t>(c)];
    }
    return b;
  };
  StateSpace ss;
  ss.A = block(n, n);
  ss.B = block(n, m);
  ss.C = block(p, n);
  ss.D = block(p, m);
  ss.validate();
  return ss;
}

std::string format_state_space(const StateSpace& sys) {
  std::string out = std::to_string(sys.states()) + " " + std::to_string(sys.inputs()) + " " +
                    std::to_string(sys.outputs()) + "\n";
  append_matrix(out, sys.A);
  append_matrix(out, sys.B);
  append_matrix(out, sys.C);
  append_matrix(out, sys.D.size() ? sys.D : Eigen::MatrixXd::Zero(sys.outputs(), sys.inputs()));
  return out;
}

std::string format_profile(const StabilityProfile& profile) {
  std::string out;
  append_kv(out, "order", std::to_string(profile.order));
  append_kv(out, "tau", format_number(profile.tau));
  for (std::size_t k = 0; k < profile.gamma.size(); ++k) {
    append_kv(out, "gamma[" + std::to_string(k + 1) + "]", opt_number(profile.gamma[k]));
  }
  for (std::size_t k = 0; k < profile.gamma_star.size(); ++k) {
    append_kv(out, "gamma_star[" + std::to_string(k + 1) + "]", opt_number(profile.gamma_star[k]));
  }
  for (std::size_t k = 0; k < profile.tau_i.size(); ++k) {
    append_kv(out, "tau_i[" + std::to_string(k + 1) + "]", opt_number(profile.tau_i[k]));
  }
  return out;
}

std::string format_verdict(const StabilityVerdict& v) {
  auto flag = [](bool applicable, bool value) {
    return applicable ? std::string(value ? "yes" : "no") : std::string("n/a");
  };
  std::string out;
  append_kv(out, "sufficiently_stable", flag(v.stable_applicable, v.sufficiently_stable));
  append_kv(out, "sufficiently_unstable", flag(v.unstable_applicable, v.sufficiently_unstable));
  for (std::size_t k = 0; k < v.margins.size(); ++k) {
    append_kv(out, "margin[" + std::to_string(k + 2) + "]", opt_number(v.margins[k]));
  }
  return out;
}

std::string format_hover_formulation(const HoverFormulation& f) {
  std::string out;
  append_kv(out, "nc", std::to_string(f.nc));
  append_kv(out, "np", std::to_string(f.np));
  for (std::size_t i = 0; i < f.qu.size(); ++i) {
    append_kv(out, "qu[" + std::to_string(i) + "]", format_number(f.qu[i]));
  }
  for (std::size_t i = 0; i < f.qy.size(); ++i) {
    append_kv(out, "qy[" + std::to_string(i) + "]", format_number(f.qy[i]));
  }
  append_kv(out, "residual", format_number(f.residual));
  append_kv(out, "q_indefinite", f.q_indefinite ? "yes" : "no");
  for (const auto& w : f.warnings) out += "# warning: " + w + "\n";
  return out;
}

std::string format_gain_solution(const GainSolution& solution) {
  std::string out = format_gains(solution.gains);
  append_kv(out, "# residual_inf", format_number(solution.residual_inf));
  append_kv(out, "# condition", format_number(solution.condition));
  return out;
}

std::string format_controller(const ControllerABF& c) {
  std::string out;
  out += "A = " + format_polynomial(c.a_poly);
  out += "F = " + format_polynomial(c.f_poly);
  for (const auto& [label, b] : c.b_polys) out += "B." + label + " = " + format_polynomial(b);
  return out;
}

std::string format_lq_design(const LqDesign& d) {
  std::string out = "# K\n";
  append_matrix(out, d.K);
  out += "# P\n";
  append_matrix(out, d.P_riccati);
  out += "# closed-loop poles\n";
  for (const Complex p : d.closed_loop_poles) out += format_complex(p) + "\n";
  out += "# residual " + format_number(d.residual) + "\n";
  out += "# newton_iterations " + std::to_string(d.newton_iterations) + "\n";
  return out;
}

std::string format_det_identity(const DetIdentityReport& r) {
  std::string out;
  out += "closed_loop = " + format_polynomial(r.closed_loop);
  out += "pp_from_poles = " + format_polynomial(r.pp_from_poles.in_omega());
  out += "pp_from_H = " + format_polynomial(r.pp_from_H.in_omega());
  append_kv(out, "max_relative_error", format_number(r.max_relative_error));
  append_kv(out, "odd_power_residual", format_number(r.odd_power_residual));
  return out;
}

std::string format_metrics(const SimMetrics& m) {
  std::string out;
  append_kv(out, "steady_state_error", opt_number(m.steady_state_error));
  append_kv(out, "overshoot_fraction", opt_number(m.overshoot_fraction));
  append_kv(out, "settling_time_2pct", opt_number(m.settling_time_2pct));
  append_kv(out, "cost_J", opt_number(m.cost_J));
  return out;
}

std::string format_sweep_report(const SweepReport& r) {
  std::string out;
  append_kv(out, "samples", std::to_string(r.samples.size()));
  append_kv(out, "stable", std::to_string(r.stable_count));
  append_kv(out, "max_pole_real", format_envelope(r.max_pole_real));
  append_kv(out, "steady_state_error", format_envelope(r.steady_state_error));
  append_kv(out, "overshoot_fraction", format_envelope(r.overshoot_fraction));
  append_kv(out, "settling_time_2pct", format_envelope(r.settling_time_2pct));
  for (const auto& s : r.samples) {
    std::string v = std::string(s.stable ? "stable" : "unstable") + " max_re " +
                    format_number(s.max_pole_real) + " seed " + std::to_string(s.seed);
    if (s.metrics.steady_state_error) v += " sse " + format_number(*s.metrics.steady_state_error);
    if (s.error) v += " error " + *s.error;
    append_kv(out, "sample[" + std::to_string(s.index) + "]", v);
  }
  return out;
}

std::string format_diagram_csv(const DiagramData& data) {
  std::string out = "label,index,coefficient,abs_coefficient,sign\n";
  for (const auto& series : data) {
    for (const auto& p : series.points) {
      out += series.label + "," + std::to_string(p.index) + "," + format_number(p.coefficient) +
             "," + format_number(p.abs_coefficient) + "," + std::to_string(p.sign) + "\n";
    }
  }
  return out;
}

std::string format_trace_csv(const SimTrace& tr) {
  std::string out = "time";
  for (const auto* labels : {&tr.state_labels, &tr.output_labels, &tr.input_labels}) {
    for (const auto& l : *labels) out += "," + l;
  }
  out += '\n';
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    out += format_number(tr.times[i]);
    for (const auto* v : {&tr.states[i], &tr.outputs[i], &tr.inputs[i]}) {
      for (Eigen::Index k = 0; k < v->size(); ++k) out += "," + format_number((*v)(k));
    }
    out += '\n';
  }
  return out;
}

SignalSpec parse_signal(std::string_view text) {
  const auto f = split(text, ':');
  if (f.size() < 2 || f.size() > 5) {
    throw std::invalid_argument("signal: expected kind:channel[:amplitude[:start[:width]]], got '" +
                                std::string(text) + "'");
  }
  SignalSpec s;
  if (f[0] == "step") {
    s.kind = SignalKind::step;
  } else if (f[0] == "doublet") {
    s.kind = SignalKind::doublet;
  } else if (f[0] == "impulse") {
    s.kind = SignalKind::impulse;
  } else {
    throw std::invalid_argument("signal: unknown kind '" + std::string(f[0]) + "'");
  }
  std::string channel(f[1]);
  if (channel.rfind("d.", 0) == 0) {
    s.injection = Injection::input_disturbance;
    channel = channel.substr(2);
  } else if (channel.rfind("r.", 0) == 0) {
    channel = channel.substr(2);
  }
  if (channel.empty()) throw std::invalid_argument("signal: empty channel");
  s.channel = channel;
  if (f.size() > 2) s.amplitude = parse_real(f[2]);
  if (f.size() > 3) s.start_time = parse_real(f[3]);
  if (f.size() > 4) s.width = parse_real(f[4]);
  s.validate();
  return s;
}

PerturbationSpec parse_perturbation(std::string_view text) {
  PerturbationSpec spec;
  for (const auto item : split(text, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) {
      throw std::invalid_argument("perturbation: expected target=fraction, got '" + std::string(item) + "'");
    }
    spec[std::string(trim(item.substr(0, eq)))] = parse_real(item.substr(eq + 1));
  }
  if (spec.empty()) throw std::invalid_argument("perturbation: no targets");
  return spec;
}

}  // namespace cdmkit
