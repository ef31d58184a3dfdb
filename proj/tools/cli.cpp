#include "cli.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "cdmkit/errors.hpp"
#include "cdmkit/lqr.hpp"
#include "cdmkit/plant.hpp"
#include "cdmkit/polynomial.hpp"
#include "cdmkit/sim.hpp"
#include "cdmkit/squared.hpp"
#include "cdmkit/stability.hpp"
#include "cdmkit/synthesis.hpp"
#include "cdmkit/text_io.hpp"

namespace cdmkit::cli {

namespace {

namespace fs = std::filesystem;

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw UsageError("cannot write '" + path.string() + "'");
  f << text;
  if (!f) throw UsageError("write failed for '" + path.string() + "'");
}

// Options shared by every subcommand.
struct Common {
  std::string out_path;
  std::string format;
};

void add_common(CLI::App* sub, Common& c, const std::string& default_format) {
  c.format = default_format;
  sub->add_option("--out,-o", c.out_path, "Output file (default: standard output)");
  sub->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "text"}));
}

void require_format(const Common& c, std::initializer_list<const char*> allowed) {
  for (const char* a : allowed) {
    if (c.format == a) return;
  }
  throw UsageError("--format " + c.format + " is not available for this subcommand");
}

void emit(const Common& c, std::ostream& out, const std::string& text) {
  if (c.out_path.empty()) {
    out << text;
  } else {
    write_file(c.out_path, text);
  }
}

struct PlantSource {
  std::string plant_path;
  std::string corpus;
};

void add_plant_options(CLI::App* sub, PlantSource& p) {
  auto* a = sub->add_option("--plant", p.plant_path, "Plant file")->check(CLI::ExistingFile);
  auto* b = sub->add_option("--corpus", p.corpus, "Bundled plant name");
  a->excludes(b);
}

PlantTF load_plant(const PlantSource& p) {
  if (!p.plant_path.empty()) return parse_plant(read_file(p.plant_path));
  if (!p.corpus.empty()) return corpus_load(p.corpus);
  throw UsageError("one of --plant or --corpus is required");
}

GainStructure load_structure(const std::string& spec) {
  if (spec == "speed") return speed_control_structure();
  return parse_gain_structure(read_file(spec));
}

struct ControllerSource {
  PlantSource plant;
  std::string structure = "speed";
  std::string gains_path;
  std::string target_path;
};

void add_controller_options(CLI::App* sub, ControllerSource& c) {
  add_plant_options(sub, c.plant);
  sub->add_option("--structure", c.structure, "Gain structure file, or 'speed' for the built-in one")
      ->capture_default_str();
  auto* g = sub->add_option("--gains", c.gains_path, "Gain values file")->check(CLI::ExistingFile);
  auto* t = sub->add_option("--target", c.target_path, "Target polynomial; gains are solved from it")
                ->check(CLI::ExistingFile);
  g->excludes(t);
}

struct LoadedController {
  PlantTF plant;
  GainStructure structure;
  ControllerABF controller;
};

LoadedController load_controller(const ControllerSource& c) {
  LoadedController lc;
  lc.plant = load_plant(c.plant);
  lc.structure = load_structure(c.structure);
  std::map<std::string, double> gains;
  if (!c.gains_path.empty()) {
    gains = parse_gains(read_file(c.gains_path));
  } else if (!c.target_path.empty()) {
    const Polynomial target = parse_polynomial(read_file(c.target_path));
    gains = solve_gains(build_gain_system(lc.structure, lc.plant, target)).gains;
  } else {
    throw UsageError("one of --gains or --target is required");
  }
  lc.controller = make_controller(lc.structure, gains, lc.plant);
  return lc;
}

std::vector<SignalSpec> parse_signals(const std::vector<std::string>& texts) {
  std::vector<SignalSpec> out;
  for (const auto& t : texts) out.push_back(parse_signal(t));
  return out;
}

std::string indices_csv(const StabilityProfile& p) {
  auto field = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };
  std::string out = "index,gamma,gamma_star,tau_i\n";
  for (std::size_t k = 0; k < p.gamma.size(); ++k) {
    out += std::to_string(k + 1) + "," + field(p.gamma[k]) + "," + field(p.gamma_star[k]) + "," +
           field(p.tau_i[k]) + "\n";
  }
  return out;
}

std::string one_line(std::string s) {
  for (char& ch : s) {
    if (ch == '\n' || ch == '\r') ch = ' ';
  }
  return s;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Coefficient diagram method and s-CDM design tools", "cdmkit"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");

  // indices
  Common c_indices;
  std::string indices_in;
  auto* indices = app.add_subcommand("indices", "Stability indices, time constant and verdict");
  indices->add_option("poly", indices_in, "Polynomial file")->required()->check(CLI::ExistingFile);
  add_common(indices, c_indices, "text");

  // target
  Common c_target;
  int order = 0;
  double tau = 0.0;
  double a0 = 1.0;
  std::vector<double> gammas;
  auto* target = app.add_subcommand("target", "Target polynomial from tau and stability indices");
  target->add_option("--order", order, "Polynomial order")->required()->check(CLI::PositiveNumber);
  target->add_option("--tau", tau, "Equivalent time constant")->required();
  target->add_option("--gamma", gammas, "gamma_1..gamma_{n-1} (default: standard form)")->delimiter(',');
  target->add_option("--a0", a0, "Constant coefficient")->capture_default_str();
  add_common(target, c_target, "text");

  // design
  Common c_design;
  PlantSource design_plant;
  std::string design_structure = "speed";
  std::string design_target;
  std::string design_controller_out;
  std::vector<int> design_match;
  auto* design = app.add_subcommand("design", "Solve controller gains for a target polynomial");
  add_plant_options(design, design_plant);
  design->add_option("--structure", design_structure, "Gain structure file, or 'speed'")->capture_default_str();
  design->add_option("--target", design_target, "Target polynomial file")->required()->check(CLI::ExistingFile);
  design->add_option("--match", design_match, "Matched powers of s")->delimiter(',');
  design->add_option("--controller-out", design_controller_out, "Also write A, F, B polynomials here");
  add_common(design, c_design, "text");

  // square / sqroot
  Common c_square, c_sqroot;
  std::string square_in, sqroot_in;
  auto* square = app.add_subcommand("square", "P(s) -> PP(Omega) = P(-s)P(s)");
  square->add_option("poly", square_in, "Polynomial file in s")->required()->check(CLI::ExistingFile);
  add_common(square, c_square, "text");
  auto* sqroot = app.add_subcommand("sqroot", "PP(Omega) -> stable P(s)");
  sqroot->add_option("poly", sqroot_in, "Polynomial file in Omega")->required()->check(CLI::ExistingFile);
  add_common(sqroot, c_sqroot, "text");

  // lq-weights / lqr (hover formulation)
  struct HoverArgs {
    std::string den;
    std::string target;
    std::string target_sq;
    double b0 = 1.0;
    int nc = 1;
  };
  auto add_hover = [](CLI::App* sub, HoverArgs& h, bool required) {
    auto* d = sub->add_option("--den", h.den, "Plant denominator A_p(s) file")->check(CLI::ExistingFile);
    if (required) d->required();
    auto* t = sub->add_option("--target", h.target, "Closed-loop target P(s) file")->check(CLI::ExistingFile);
    auto* q = sub->add_option("--target-sq", h.target_sq, "Squared target PP(Omega) file")
                  ->check(CLI::ExistingFile);
    t->excludes(q);
    sub->add_option("--b0", h.b0, "Plant numerator constant B_p")->capture_default_str();
    sub->add_option("--nc", h.nc, "Integrators in front of the plant")->capture_default_str();
  };
  auto hover_target = [](const HoverArgs& h) -> SquaredPolynomial {
    if (!h.target.empty()) return square_poly(parse_polynomial(read_file(h.target)));
    if (!h.target_sq.empty()) return SquaredPolynomial(parse_polynomial(read_file(h.target_sq)));
    throw UsageError("one of --target or --target-sq is required");
  };

  Common c_weights;
  HoverArgs weights_args;
  auto* weights = app.add_subcommand("lq-weights", "Recover LQ weights from a target polynomial");
  add_hover(weights, weights_args, true);
  add_common(weights, c_weights, "text");

  Common c_lqr;
  HoverArgs lqr_args;
  std::string lqr_system, lqr_q, lqr_r;
  bool lqr_indefinite = false;
  auto* lqr = app.add_subcommand("lqr", "Riccati solution, LQ gain and determinant identity check");
  add_hover(lqr, lqr_args, false);
  lqr->add_option("--system", lqr_system, "State-space file")->check(CLI::ExistingFile);
  lqr->add_option("--q", lqr_q, "State weight matrix file")->check(CLI::ExistingFile);
  lqr->add_option("--r", lqr_r, "Input weight matrix file")->check(CLI::ExistingFile);
  lqr->add_flag("--allow-indefinite", lqr_indefinite, "Accept a sign-indefinite Q");
  add_common(lqr, c_lqr, "text");

  // simulate
  Common c_sim;
  ControllerSource sim_ctrl;
  std::string sim_system;
  std::vector<std::string> sim_signals;
  std::vector<double> sim_x0;
  double sim_t_end = 0.0;
  double sim_dt = 0.01;
  std::string sim_metrics_out;
  auto* simulate_cmd = app.add_subcommand("simulate", "Time response of a closed loop or a state-space file");
  add_controller_options(simulate_cmd, sim_ctrl);
  simulate_cmd->add_option("--system", sim_system, "State-space file (instead of a plant)")
      ->check(CLI::ExistingFile);
  simulate_cmd->add_option("--signal", sim_signals, "kind:channel[:amplitude[:start[:width]]]");
  simulate_cmd->add_option("--x0", sim_x0, "Initial state")->delimiter(',');
  simulate_cmd->add_option("--t-end", sim_t_end, "Final time, s")->required();
  simulate_cmd->add_option("--dt", sim_dt, "Step, s")->capture_default_str();
  simulate_cmd->add_option("--metrics-out", sim_metrics_out, "Also write the metrics here");
  add_common(simulate_cmd, c_sim, "csv");

  // sweep
  Common c_sweep;
  ControllerSource sweep_ctrl;
  std::string sweep_perturb;
  std::vector<std::string> sweep_signals;
  int sweep_samples = 50;
  std::uint64_t sweep_seed = 1;
  double sweep_t_end = 100.0;
  double sweep_dt = 0.01;
  int sweep_threads = 1;
  std::string sweep_trace_dir;
  auto* sweep = app.add_subcommand("sweep", "Monte Carlo robustness sweep of a fixed controller");
  add_controller_options(sweep, sweep_ctrl);
  sweep->add_option("--perturb", sweep_perturb, "target=fraction,... e.g. den[0]=0.3,den[1]=0.3")->required();
  sweep->add_option("--samples", sweep_samples, "Number of samples")->capture_default_str();
  sweep->add_option("--seed", sweep_seed, "Random seed")->capture_default_str();
  sweep->add_option("--signal", sweep_signals, "Test signals (see simulate; default step on the reference channel)");
  sweep->add_option("--t-end", sweep_t_end, "Final time, s")->capture_default_str();
  sweep->add_option("--dt", sweep_dt, "Step, s")->capture_default_str();
  sweep->add_option("--threads", sweep_threads, "Worker threads")->capture_default_str();
  sweep->add_option("--trace-dir", sweep_trace_dir, "Write one trace CSV per sample here");
  add_common(sweep, c_sweep, "text");

  // diagram
  Common c_diagram;
  std::vector<std::string> diagram_inputs;
  auto* diagram = app.add_subcommand("diagram", "Coefficient diagram data");
  diagram->add_option("polys", diagram_inputs, "[label=]file ...")->required();
  add_common(diagram, c_diagram, "csv");

  // corpus
  Common c_corpus;
  std::string corpus_name;
  std::string corpus_dir;
  auto* corpus = app.add_subcommand("corpus", "List or export the bundled plants");
  corpus->add_option("name", corpus_name, "Plant to export (omit to list)");
  corpus->add_option("--export-dir", corpus_dir, "Write every plant to <dir>/<name>.plant");
  add_common(corpus, c_corpus, "text");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "cdmkit: " << one_line(e.what()) << "\n";
    return 2;
  }

  try {
    if (*indices) {
      require_format(c_indices, {"text", "csv"});
      const Polynomial p = parse_polynomial(read_file(indices_in));
      const StabilityProfile profile = stability_indices(p);
      emit(c_indices, out,
           c_indices.format == "csv" ? indices_csv(profile)
                                     : format_profile(profile) + format_verdict(check_stability(p)));
    } else if (*target) {
      require_format(c_target, {"text"});
      const auto g = gammas.empty() ? standard_gammas(order) : gammas;
      emit(c_target, out, format_polynomial(synth_target(order, tau, g, a0)));
    } else if (*design) {
      require_format(c_design, {"text"});
      const PlantTF plant = load_plant(design_plant);
      const GainStructure structure = load_structure(design_structure);
      const Polynomial tgt = parse_polynomial(read_file(design_target));
      const GainSolution sol = solve_gains(build_gain_system(structure, plant, tgt, design_match));
      if (!design_controller_out.empty()) {
        write_file(design_controller_out, format_controller(make_controller(structure, sol.gains, plant)));
      }
      emit(c_design, out, format_gain_solution(sol));
    } else if (*square) {
      require_format(c_square, {"text"});
      emit(c_square, out, format_polynomial(square_poly(parse_polynomial(read_file(square_in))).in_omega()));
    } else if (*sqroot) {
      require_format(c_sqroot, {"text"});
      const SquaredPolynomial pp(parse_polynomial(read_file(sqroot_in)));
      emit(c_sqroot, out, format_polynomial(square_root_poly(pp)));
    } else if (*weights) {
      require_format(c_weights, {"text"});
      const Polynomial den = parse_polynomial(read_file(weights_args.den));
      const SquaredPolynomial pp = hover_target(weights_args);
      const int np = den.degree();
      const HoverFormulation f =
          recover_weights(pp, square_poly(den), square_poly(Polynomial::constant(weights_args.b0)),
                          weights_args.nc, np);
      for (const auto& w : f.warnings) err << "cdmkit: warning: " << w << "\n";
      emit(c_weights, out,
           format_hover_formulation(f) + "# Q\n" + format_matrix(assemble_Q(f)) + "# R\n" +
               format_number(f.control_weight()) + "\n");
    } else if (*lqr) {
      require_format(c_lqr, {"text"});
      Eigen::MatrixXd A, B, Q, R;
      CareOptions opts;
      opts.allow_indefinite_q = lqr_indefinite;
      if (!lqr_system.empty()) {
        if (lqr_q.empty() || lqr_r.empty()) throw UsageError("--system needs --q and --r");
        const StateSpace ss = parse_state_space(read_file(lqr_system));
        A = ss.A;
        B = ss.B;
        Q = parse_matrix(read_file(lqr_q));
        R = parse_matrix(read_file(lqr_r));
      } else if (!lqr_args.den.empty()) {
        const Polynomial den = parse_polynomial(read_file(lqr_args.den));
        const SquaredPolynomial pp = hover_target(lqr_args);
        const HoverFormulation f =
            recover_weights(pp, square_poly(den), square_poly(Polynomial::constant(lqr_args.b0)),
                            lqr_args.nc, den.degree());
        const StateSpace ss = hover_state_space(den, lqr_args.b0, lqr_args.nc);
        A = ss.A;
        B = ss.B;
        Q = assemble_Q(f);
        R = Eigen::MatrixXd::Constant(1, 1, f.control_weight());
        // Recovered hover weights are routinely indefinite.
        opts.allow_indefinite_q = true;
      } else {
        throw UsageError("lqr needs --system/--q/--r or --den with --target/--target-sq");
      }
      const LqDesign d = solve_care(A, B, Q, R, opts);
      const DetIdentityReport rep = verify_det_identity(A, B, Q, R, opts);
      emit(c_lqr, out, format_lq_design(d) + format_det_identity(rep));
    } else if (*simulate_cmd) {
      require_format(c_sim, {"csv", "text"});
      StateSpace sys;
      if (!sim_system.empty()) {
        sys = parse_state_space(read_file(sim_system));
      } else {
        const LoadedController lc = load_controller(sim_ctrl);
        sys = closed_loop_system(lc.controller, lc.plant, lc.structure.reference_channel);
      }
      Eigen::VectorXd x0;
      if (!sim_x0.empty()) x0 = Eigen::Map<const Eigen::VectorXd>(sim_x0.data(), static_cast<Eigen::Index>(sim_x0.size()));
      const SimTrace tr = simulate(sys, parse_signals(sim_signals), sim_t_end, sim_dt, x0);
      if (!sim_metrics_out.empty()) write_file(sim_metrics_out, format_metrics(tr.metrics));
      emit(c_sim, out, c_sim.format == "csv" ? format_trace_csv(tr) : format_metrics(tr.metrics));
    } else if (*sweep) {
      require_format(c_sweep, {"text"});
      const LoadedController lc = load_controller(sweep_ctrl);
      SweepOptions opts;
      opts.threads = sweep_threads;
      opts.keep_traces = !sweep_trace_dir.empty();
      std::vector<SignalSpec> signals = parse_signals(sweep_signals);
      if (signals.empty()) signals.push_back(parse_signal("step:" + lc.structure.reference_channel));
      const SweepReport rep = robustness_sweep(lc.plant, lc.controller, lc.structure.reference_channel,
                                               parse_perturbation(sweep_perturb), sweep_samples,
                                               sweep_seed, signals, sweep_t_end,
                                               sweep_dt, opts);
      if (!sweep_trace_dir.empty()) {
        fs::create_directories(sweep_trace_dir);
        for (const auto& s : rep.samples) {
          if (!s.trace) continue;
          char name[32];
          std::snprintf(name, sizeof name, "sample_%03d.csv", s.index);
          write_file(fs::path(sweep_trace_dir) / name, format_trace_csv(*s.trace));
        }
      }
      emit(c_sweep, out, format_sweep_report(rep));
    } else if (*diagram) {
      require_format(c_diagram, {"csv", "text"});
      std::map<std::string, Polynomial> polys;
      for (const auto& item : diagram_inputs) {
        const auto eq = item.find('=');
        const std::string label = eq == std::string::npos ? fs::path(item).stem().string() : item.substr(0, eq);
        const std::string path = eq == std::string::npos ? item : item.substr(eq + 1);
        polys[label] = parse_polynomial(read_file(path));
      }
      const DiagramData data = coefficient_diagram(polys);
      if (c_diagram.format == "csv") {
        emit(c_diagram, out, format_diagram_csv(data));
      } else {
        std::string text;
        for (const auto& s : data) {
          text += "# " + s.label + "\n";
          text += s.profile ? format_profile(*s.profile) : std::string("# indices undefined\n");
        }
        emit(c_diagram, out, text);
      }
    } else if (*corpus) {
      require_format(c_corpus, {"text"});
      if (!corpus_dir.empty()) {
        fs::create_directories(corpus_dir);
        for (const auto& n : corpus_names()) {
          write_file(fs::path(corpus_dir) / (n + ".plant"), format_plant(corpus_load(n)));
        }
      }
      if (!corpus_name.empty()) {
        emit(c_corpus, out, format_plant(corpus_load(corpus_name)));
      } else if (corpus_dir.empty()) {
        std::string text;
        for (const auto& n : corpus_names()) text += n + "\n";
        emit(c_corpus, out, text);
      }
    }
  } catch (const DomainError& e) {
    err << "cdmkit: " << one_line(e.what()) << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    err << "cdmkit: " << one_line(e.what()) << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "cdmkit: " << one_line(e.what()) << "\n";
    return 1;
  }
  return 0;
}

}  // namespace cdmkit::cli
