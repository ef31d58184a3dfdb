#include "cdmkit/sim.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <stdexcept>
#include <thread>

#include "cdmkit/errors.hpp"

namespace cdmkit {

namespace {

constexpr double kDivergenceNorm = 1e9;
constexpr double kStepSizeFactor = 0.2;
constexpr double kSettlingBand = 0.02;

struct Prepared {
  int steps = 0;
  Eigen::VectorXd x0;
  std::vector<int> signal_inputs;
};

Prepared prepare(const StateSpace& sys, const std::vector<SignalSpec>& signals, double t_end,
                 double dt, const Eigen::VectorXd& x0) {
  if (!(dt > 0.0)) throw std::invalid_argument("simulate: dt must be positive");
  if (!(t_end >= 0.0)) throw std::invalid_argument("simulate: t_end must be non-negative");
  StateSpace copy = sys;
  copy.validate();

  Prepared p;
  p.steps = static_cast<int>(std::ceil(t_end / dt - 1e-9));
  p.x0 = x0.size() == 0 ? Eigen::VectorXd::Zero(sys.states()) : x0;
  if (p.x0.size() != sys.states()) throw std::invalid_argument("simulate: x0 has the wrong size");

  for (const auto& s : signals) {
    s.validate();
    const std::string prefixed =
        (s.injection == Injection::reference ? "r." : "d.") + s.channel;
    int idx = copy.input_index(prefixed);
    if (idx < 0 && s.injection == Injection::reference && copy.input_index("r") >= 0) {
      idx = copy.input_index("r");
    }
    if (idx < 0) idx = copy.input_index(s.channel);
    if (idx < 0) {
      throw std::invalid_argument("simulate: no system input for signal channel '" + s.channel + "'");
    }
    p.signal_inputs.push_back(idx);
  }
  return p;
}

Eigen::VectorXd input_at(const StateSpace& sys, const std::vector<SignalSpec>& signals,
                         const std::vector<int>& idx, double t, double dt) {
  Eigen::VectorXd u = Eigen::VectorXd::Zero(sys.inputs());
  for (std::size_t k = 0; k < signals.size(); ++k) u(idx[k]) += signals[k].value(t, dt);
  return u;
}

SimTrace make_trace(const StateSpace& sys, int steps, double dt) {
  SimTrace tr;
  tr.dt = dt;
  tr.times.reserve(static_cast<std::size_t>(steps) + 1);
  tr.states.reserve(static_cast<std::size_t>(steps) + 1);
  tr.outputs.reserve(static_cast<std::size_t>(steps) + 1);
  tr.inputs.reserve(static_cast<std::size_t>(steps) + 1);
  StateSpace copy = sys;
  copy.validate();
  tr.state_labels = copy.state_labels;
  tr.output_labels = copy.output_labels;
  tr.input_labels = copy.input_labels;
  return tr;
}

void record(SimTrace& tr, const StateSpace& sys, double t, const Eigen::VectorXd& x,
            const Eigen::VectorXd& u) {
  if (!x.allFinite() || x.norm() > kDivergenceNorm) {
    throw DomainError("simulate: state diverged at t = " + std::to_string(t));
  }
  tr.times.push_back(t);
  tr.states.push_back(x);
  tr.outputs.push_back(sys.C * x + sys.D * u);
  tr.inputs.push_back(u);
}

void fill_metrics(SimTrace& tr, const std::vector<SignalSpec>& signals) {
  for (const auto& s : signals) {
    if (s.kind != SignalKind::step || s.injection != Injection::reference) continue;
    auto it = std::find(tr.output_labels.begin(), tr.output_labels.end(), s.channel);
    if (it == tr.output_labels.end() || s.amplitude == 0.0) continue;
    const auto col = static_cast<Eigen::Index>(it - tr.output_labels.begin());
    const double target = s.amplitude;
    const double mag = std::abs(target);

    const double final_value = tr.outputs.back()(col);
    tr.metrics.steady_state_error = std::abs(target - final_value);

    double peak = 0.0;
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
      if (tr.times[i] < s.start_time) continue;
      peak = std::max(peak, (tr.outputs[i](col) - target) * (target > 0 ? 1.0 : -1.0));
    }
    tr.metrics.overshoot_fraction = peak / mag;

    std::optional<double> settle;
    for (std::size_t i = tr.times.size(); i-- > 0;) {
      if (std::abs(tr.outputs[i](col) - target) > kSettlingBand * mag) {
        if (i + 1 < tr.times.size()) settle = tr.times[i + 1] - s.start_time;
        break;
      }
      if (i == 0 || tr.times[i - 1] < s.start_time) {
        settle = 0.0;
        break;
      }
    }
    tr.metrics.settling_time_2pct = settle;
    break;
  }
}

}  // namespace

void SignalSpec::validate() const {
  if (!(start_time >= 0.0)) throw std::invalid_argument("signal: start_time must be >= 0");
  if (kind != SignalKind::step && !(width >= 0.0)) {
    throw std::invalid_argument("signal: width must be >= 0");
  }
  if (kind == SignalKind::doublet && !(width > 0.0)) {
    throw std::invalid_argument("signal: doublet width must be positive");
  }
  if (!std::isfinite(amplitude)) throw std::invalid_argument("signal: amplitude must be finite");
}

double SignalSpec::value(double t, double dt) const {
  switch (kind) {
    case SignalKind::step:
      return t >= start_time ? amplitude : 0.0;
    case SignalKind::doublet:
      if (t >= start_time && t < start_time + width) return amplitude;
      if (t >= start_time + width && t < start_time + 2.0 * width) return -amplitude;
      return 0.0;
    case SignalKind::impulse: {
      const double w = width > 0.0 ? width : dt;
      return (t >= start_time && t < start_time + w) ? amplitude / w : 0.0;
    }
  }
  return 0.0;
}

std::vector<double> SimTrace::output(const std::string& label) const {
  auto it = std::find(output_labels.begin(), output_labels.end(), label);
  if (it == output_labels.end()) throw std::invalid_argument("trace: no output '" + label + "'");
  const auto col = static_cast<Eigen::Index>(it - output_labels.begin());
  std::vector<double> out;
  out.reserve(outputs.size());
  for (const auto& y : outputs) out.push_back(y(col));
  return out;
}

SimTrace simulate(const StateSpace& sys, const std::vector<SignalSpec>& signals, double t_end,
                  double dt, const Eigen::VectorXd& x0) {
  const Prepared prep = prepare(sys, signals, t_end, dt, x0);
  if (sys.states() > 0) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(sys.A, false);
    const double fastest = es.eigenvalues().cwiseAbs().maxCoeff();
    if (fastest > 0.0 && dt > kStepSizeFactor / fastest) {
      throw std::invalid_argument("simulate: dt = " + std::to_string(dt) + " exceeds 0.2/|lambda_max| = " +
                                  std::to_string(kStepSizeFactor / fastest));
    }
  }

  SimTrace tr = make_trace(sys, prep.steps, dt);
  Eigen::VectorXd x = prep.x0;
  for (int i = 0; i <= prep.steps; ++i) {
    const double t = i * dt;
    const Eigen::VectorXd u = input_at(sys, signals, prep.signal_inputs, t + 0.5 * dt, dt);
    record(tr, sys, t, x, u);
    if (i == prep.steps) break;
    const Eigen::VectorXd bu = sys.B * u;
    const Eigen::VectorXd k1 = sys.A * x + bu;
    const Eigen::VectorXd k2 = sys.A * (x + 0.5 * dt * k1) + bu;
    const Eigen::VectorXd k3 = sys.A * (x + 0.5 * dt * k2) + bu;
    const Eigen::VectorXd k4 = sys.A * (x + dt * k3) + bu;
    x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  fill_metrics(tr, signals);
  return tr;
}

SimTrace simulate_exact(const StateSpace& sys, const std::vector<SignalSpec>& signals,
                        double t_end, double dt, const Eigen::VectorXd& x0) {
  const Prepared prep = prepare(sys, signals, t_end, dt, x0);
  const auto n = sys.states();
  const auto m = sys.inputs();
  Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(n + m, n + m);
  aug.topLeftCorner(n, n) = sys.A * dt;
  aug.topRightCorner(n, m) = sys.B * dt;
  const Eigen::MatrixXd expm = aug.exp();
  const Eigen::MatrixXd phi = expm.topLeftCorner(n, n);
  const Eigen::MatrixXd gamma = expm.topRightCorner(n, m);

  SimTrace tr = make_trace(sys, prep.steps, dt);
  Eigen::VectorXd x = prep.x0;
  for (int i = 0; i <= prep.steps; ++i) {
    const double t = i * dt;
    const Eigen::VectorXd u = input_at(sys, signals, prep.signal_inputs, t + 0.5 * dt, dt);
    record(tr, sys, t, x, u);
    if (i == prep.steps) break;
    x = phi * x + gamma * u;
  }
  fill_metrics(tr, signals);
  return tr;
}

double cost_integral(const SimTrace& trace, const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R,
                     const std::vector<std::string>& control_outputs) {
  if (trace.times.empty()) return 0.0;
  const auto n = trace.states.front().size();
  if (Q.rows() != n || Q.cols() != n) throw std::invalid_argument("cost_integral: Q has the wrong size");

  std::vector<Eigen::Index> cols;
  for (const auto& label : control_outputs) {
    auto it = std::find(trace.output_labels.begin(), trace.output_labels.end(), label);
    if (it == trace.output_labels.end()) {
      throw std::invalid_argument("cost_integral: no output '" + label + "'");
    }
    cols.push_back(static_cast<Eigen::Index>(it - trace.output_labels.begin()));
  }
  const auto m = control_outputs.empty() ? trace.inputs.front().size()
                                         : static_cast<Eigen::Index>(cols.size());
  if (R.rows() != m || R.cols() != m) throw std::invalid_argument("cost_integral: R has the wrong size");

  auto integrand = [&](std::size_t i) {
    const Eigen::VectorXd& x = trace.states[i];
    Eigen::VectorXd u(m);
    if (control_outputs.empty()) {
      u = trace.inputs[i];
    } else {
      for (Eigen::Index k = 0; k < m; ++k) u(k) = trace.outputs[i](cols[static_cast<std::size_t>(k)]);
    }
    return x.dot(Q * x) + u.dot(R * u);
  };

  double total = 0.0;
  double prev = integrand(0);
  for (std::size_t i = 1; i < trace.times.size(); ++i) {
    const double cur = integrand(i);
    total += 0.5 * (trace.times[i] - trace.times[i - 1]) * (prev + cur);
    prev = cur;
  }
  return total;
}

std::uint64_t sample_seed(std::uint64_t seed, int index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), 0x5eedu};
  std::mt19937_64 engine(seq);
  return engine();
}

SweepReport robustness_sweep(const PlantTF& nominal, const ControllerABF& controller,
                             const std::string& reference_channel,
                             const PerturbationSpec& perturbation, int n_samples,
                             std::uint64_t seed, const std::vector<SignalSpec>& signals,
                             double t_end, double dt, const SweepOptions& options) {
  if (n_samples < 1) throw std::invalid_argument("robustness_sweep: n_samples must be >= 1");
  // Validate the perturbation targets once so bad targets surface to the caller.
  perturb(nominal, perturbation, seed);

  SweepReport report;
  report.samples.resize(static_cast<std::size_t>(n_samples));

  auto run_one = [&](int i) {
    SweepSample& s = report.samples[static_cast<std::size_t>(i)];
    s.index = i;
    s.seed = sample_seed(seed, i);
    try {
      s.plant = perturb(nominal, perturbation, s.seed);
      s.characteristic = close_loop(controller, s.plant);
      const auto poles = roots(s.characteristic);
      s.max_pole_real = -std::numeric_limits<double>::infinity();
      for (const Complex p : poles) s.max_pole_real = std::max(s.max_pole_real, p.real());
      s.stable = s.max_pole_real < 0.0;
      if (s.stable && !signals.empty()) {
        SimTrace tr = simulate(closed_loop_system(controller, s.plant, reference_channel), signals,
                               t_end, dt);
        s.metrics = tr.metrics;
        if (options.keep_traces) s.trace = std::move(tr);
      }
    } catch (const std::exception& e) {
      s.error = e.what();
    }
  };

  const int threads = std::max(1, std::min(options.threads, n_samples));
  if (threads == 1) {
    for (int i = 0; i < n_samples; ++i) run_one(i);
  } else {
    std::atomic<int> next{0};
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (int i = next++; i < n_samples; i = next++) run_one(i);
      });
    }
  }

  auto accumulate = [](MetricEnvelope& env, double v) {
    if (env.count == 0) {
      env.min = env.max = v;
    } else {
      env.min = std::min(env.min, v);
      env.max = std::max(env.max, v);
    }
    ++env.count;
  };
  for (const auto& s : report.samples) {
    if (s.stable) ++report.stable_count;
    if (!s.error) accumulate(report.max_pole_real, s.max_pole_real);
    if (s.metrics.steady_state_error) accumulate(report.steady_state_error, *s.metrics.steady_state_error);
    if (s.metrics.overshoot_fraction) accumulate(report.overshoot_fraction, *s.metrics.overshoot_fraction);
    if (s.metrics.settling_time_2pct) accumulate(report.settling_time_2pct, *s.metrics.settling_time_2pct);
  }
  return report;
}

}  // namespace cdmkit
