#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cdmkit/plant.hpp"
#include "cdmkit/state_space.hpp"
#include "cdmkit/synthesis.hpp"

namespace cdmkit {

enum class SignalKind { step, doublet, impulse };
enum class Injection { reference, input_disturbance };

/// Exogenous test signal.
///  step:    amplitude for t >= start_time
///  doublet: +amplitude on [start, start + width), -amplitude on the next width
///  impulse: rectangle of area `amplitude` over [start, start + width); a zero
///           width means one integration step
struct SignalSpec {
  SignalKind kind = SignalKind::step;
  double amplitude = 1.0;
  double start_time = 0.0;
  double width = 0.0;
  std::string channel;
  Injection injection = Injection::reference;

  void validate() const;
  double value(double t, double dt) const;
};

struct SimMetrics {
  std::optional<double> steady_state_error;
  std::optional<double> overshoot_fraction;
  std::optional<double> settling_time_2pct;
  std::optional<double> cost_J;
};

/// Fixed-step trace; inputs[i] is the exogenous input held over
/// [times[i], times[i] + dt).
struct SimTrace {
  double dt = 0.0;
  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;
  std::vector<Eigen::VectorXd> outputs;
  std::vector<Eigen::VectorXd> inputs;
  std::vector<std::string> state_labels;
  std::vector<std::string> output_labels;
  std::vector<std::string> input_labels;
  SimMetrics metrics;

  /// Output series by label; throws std::invalid_argument if absent.
  std::vector<double> output(const std::string& label) const;
};

/// Classical RK4 with inputs held constant over each step (sampled at the
/// step midpoint, so rectangle edges on the grid are integrated exactly).
///
/// A signal drives the system input named "r.<channel>" (reference) or
/// "d.<channel>" (input disturbance), falling back to an input named exactly
/// <channel>. Throws std::invalid_argument when dt > 0.2 / max|lambda(A)| and
/// DomainError when the state norm exceeds 1e9.
///
/// Step-response metrics are filled for the first reference step whose
/// channel is also an output.
SimTrace simulate(const StateSpace& sys, const std::vector<SignalSpec>& signals, double t_end,
                  double dt, const Eigen::VectorXd& x0 = Eigen::VectorXd());

/// Same signal handling as simulate, but each step is propagated exactly
/// with exp(A dt) under the zero-order hold. Used as the reference solution.
SimTrace simulate_exact(const StateSpace& sys, const std::vector<SignalSpec>& signals,
                        double t_end, double dt, const Eigen::VectorXd& x0 = Eigen::VectorXd());

/// Trapezoidal integral of x'Qx + u'Ru. u is the trace's exogenous inputs,
/// or the named outputs when `control_outputs` is given (closed loops whose
/// actuator is an output). Throws std::invalid_argument on dimension mismatch.
double cost_integral(const SimTrace& trace, const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R,
                     const std::vector<std::string>& control_outputs = {});

struct SweepSample {
  int index = 0;
  std::uint64_t seed = 0;
  PlantTF plant;
  Polynomial characteristic;
  double max_pole_real = 0.0;
  bool stable = false;
  SimMetrics metrics;
  std::optional<std::string> error;
  std::optional<SimTrace> trace;
};

struct MetricEnvelope {
  double min = 0.0;
  double max = 0.0;
  int count = 0;
};

struct SweepReport {
  std::vector<SweepSample> samples;
  int stable_count = 0;
  MetricEnvelope steady_state_error;
  MetricEnvelope overshoot_fraction;
  MetricEnvelope settling_time_2pct;
  MetricEnvelope max_pole_real;
};

struct SweepOptions {
  int threads = 1;
  bool keep_traces = false;
};

/// Per-sample seed derived from the sweep seed; independent of thread count.
std::uint64_t sample_seed(std::uint64_t seed, int index);

/// Monte Carlo robustness check of a fixed controller: each sample perturbs
/// the nominal plant, re-forms the closed loop, checks its poles and (when
/// stable and signals are given) simulates it. Per-sample failures are
/// recorded in the sample, never thrown. Results are ordered by sample
/// index, so any thread count gives the same report.
SweepReport robustness_sweep(const PlantTF& nominal, const ControllerABF& controller,
                             const std::string& reference_channel,
                             const PerturbationSpec& perturbation, int n_samples,
                             std::uint64_t seed, const std::vector<SignalSpec>& signals,
                             double t_end, double dt, const SweepOptions& options = {});

}  // namespace cdmkit
