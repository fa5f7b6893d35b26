// dyadic: Haar transforms, norms, paraproducts, commutators and experiment runs from the shell.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "dyadic/experiment.hpp"
#include "dyadic/haar.hpp"
#include "dyadic/io.hpp"
#include "dyadic/norms.hpp"
#include "dyadic/paraproducts.hpp"
#include "dyadic/shifts.hpp"

using namespace dyadic;

namespace {

constexpr int kConfigExit = 2;
constexpr int kNumericExit = 3;

HaarExpansion as_expansion(const io::GridData& d) {
  if (const auto* s = std::get_if<GridSignal>(&d)) return haar_forward(*s);
  return std::get<HaarExpansion>(d);
}

GridSignal as_signal(const io::GridData& d) {
  if (const auto* e = std::get_if<HaarExpansion>(&d)) return haar_inverse(*e);
  return std::get<GridSignal>(d);
}

void emit(const nlohmann::json& j) { std::cout << j.dump(2) << '\n'; }

int transform(const std::string& in, const std::string& out, const std::string& direction) {
  const auto data = io::load_grid(in);
  const bool is_signal = std::holds_alternative<GridSignal>(data);
  if ((direction == "forward" && !is_signal) || (direction == "inverse" && is_signal))
    throw ConfigError("--direction " + direction + " does not match the input kind");
  double before = 0.0, after = 0.0;
  if (is_signal) {
    const auto& s = std::get<GridSignal>(data);
    const auto e = haar_forward(s);
    before = s.norm2_squared();
    after = e.norm2_squared();
    io::save_grid(out, e);
  } else {
    const auto& e = std::get<HaarExpansion>(data);
    const auto s = haar_inverse(e);
    before = e.norm2_squared();
    after = s.norm2_squared();
    io::save_grid(out, s);
  }
  const double dev = std::abs(before - after) / std::max(before, 1e-300);
  std::cout << "parseval " << io::format_double(before) << ' ' << io::format_double(after) << " rel_dev "
            << io::format_double(before == 0.0 ? std::abs(after) : dev) << '\n';
  return 0;
}

int norm(const std::string& in, const std::string& which, std::size_t axis, const std::vector<int>& delta) {
  const auto data = io::load_grid(in);
  NormReport r;
  if (which == "bmo") r = bmo_norm(as_signal(data));
  else if (which == "bmoP") r = product_bmo_norm(as_expansion(data));
  else if (which == "lmo") r = lmo_norm(as_expansion(data));
  else if (which == "lmoAxis") r = lmo_axis_norm(as_expansion(data), axis);
  else if (which == "lmoBeta") r = lmo_beta_norm(as_expansion(data), delta);
  else r = rect_bmo_norm(as_expansion(data));
  auto j = to_json(r);
  j["which"] = which;
  emit(j);
  return 0;
}

int para(const std::string& phi_path, const std::string& b_path, const std::string& out, const std::string& op,
         const std::vector<int>& beta) {
  const auto phi = as_expansion(io::load_grid(phi_path));
  const auto b = as_expansion(io::load_grid(b_path));
  if (op == "nine") {
    nlohmann::json terms = nlohmann::json::array();
    HaarExpansion sum(b.shape());
    for (const auto& t : nine_terms(phi)) {
      const auto y = t.apply(b);
      sum += y;
      terms.push_back({{"name", t.name()}, {"l2_norm", std::sqrt(y.norm2_squared())}});
    }
    io::save_grid(out, sum);
    emit({{"terms", terms}});
    return 0;
  }
  HaarExpansion y;
  if (op == "pi") y = pi_main(phi, b);
  else if (op == "delta") y = delta_form(phi, b);
  else y = pi_beta(phi, b, beta);
  io::save_grid(out, y);
  emit({{"op", op}, {"l2_norm", std::sqrt(y.norm2_squared())}});
  return 0;
}

int commutator(const std::string& phi_path, const std::string& b_path, const std::string& out,
               const std::vector<std::size_t>& axes) {
  const auto phi = as_expansion(io::load_grid(phi_path));
  const auto b = as_expansion(io::load_grid(b_path));
  const auto r = iterated_commutator(phi, b, axes);
  io::save_grid(out, r.output);
  emit({{"truncated", r.truncated},
        {"l2_norm", std::sqrt(r.output.norm2_squared())},
        {"product_bmo", product_bmo_norm(r.output).value}});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dyadic Haar analysis on the multi-parameter torus"};
  app.require_subcommand(1);

  auto* tr = app.add_subcommand("transform", "Forward or inverse Haar transform of a grid file");
  std::string tr_in, tr_out, tr_dir = "forward";
  tr->add_option("input", tr_in, "Grid file")->required()->check(CLI::ExistingFile);
  tr->add_option("-o,--output", tr_out, "Output grid file")->required();
  tr->add_option("--direction", tr_dir, "forward or inverse")->check(CLI::IsMember({"forward", "inverse"}));

  auto* nm = app.add_subcommand("norm", "Oscillation norm of a grid file as JSON");
  std::string nm_in, nm_which = "bmo";
  std::size_t nm_axis = 0;
  std::vector<int> nm_delta;
  nm->add_option("input", nm_in, "Grid file")->required()->check(CLI::ExistingFile);
  nm->add_option("--which", nm_which, "bmo, bmoP, lmo, lmoAxis, lmoBeta or rect")
      ->check(CLI::IsMember({"bmo", "bmoP", "lmo", "lmoAxis", "lmoBeta", "rect"}));
  nm->add_option("--axis", nm_axis, "Axis for lmoAxis");
  nm->add_option("--delta", nm_delta, "0/1 vector for lmoBeta")->delimiter(',');

  auto* pa = app.add_subcommand("para", "Apply a paraproduct with symbol phi to b");
  std::string pa_phi, pa_b, pa_out, pa_op = "pi";
  std::vector<int> pa_beta;
  pa->add_option("--phi", pa_phi, "Symbol grid file")->required()->check(CLI::ExistingFile);
  pa->add_option("--input", pa_b, "Argument grid file")->required()->check(CLI::ExistingFile);
  pa->add_option("-o,--output", pa_out, "Output coefficient file")->required();
  pa->add_option("--op", pa_op, "pi, delta, beta or nine")->check(CLI::IsMember({"pi", "delta", "beta", "nine"}));
  pa->add_option("--beta", pa_beta, "0/1 vector for --op beta")->delimiter(',');

  auto* co = app.add_subcommand("commutator", "Iterated commutator of dyadic shifts with multiplication by phi");
  std::string co_phi, co_b, co_out;
  std::vector<std::size_t> co_axes;
  co->add_option("--phi", co_phi, "Symbol grid file")->required()->check(CLI::ExistingFile);
  co->add_option("--input", co_b, "Argument grid file")->required()->check(CLI::ExistingFile);
  co->add_option("-o,--output", co_out, "Output coefficient file")->required();
  co->add_option("--axes", co_axes, "Shift axes, outermost first")->required()->delimiter(',');

  auto* ex = app.add_subcommand("experiment", "Run an experiment and write CSV and JSON records");
  std::string ex_config, ex_name, ex_out;
  std::size_t ex_n = 0, ex_budget = 0, ex_ensemble = 0, ex_samples = 0;
  std::vector<int> ex_depths;
  std::uint64_t ex_seed = 0;
  ex->add_option("--config", ex_config, "JSON config file")->check(CLI::ExistingFile);
  auto* o_name = ex->add_option("--experiment", ex_name, "equivalence, core, cotlar, growth, commutator or shifts");
  auto* o_n = ex->add_option("--n-params", ex_n, "Number of parameters");
  auto* o_d = ex->add_option("--depth", ex_depths, "Depths, comma separated")->delimiter(',');
  auto* o_seed = ex->add_option("--seed", ex_seed, "Experiment seed");
  auto* o_budget = ex->add_option("--budget", ex_budget, "Lower-bound search budget");
  auto* o_ens = ex->add_option("--ensemble", ex_ensemble, "Symbols per depth");
  auto* o_samples = ex->add_option("--samples", ex_samples, "Samples per depth");
  auto* o_out = ex->add_option("--out", ex_out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kConfigExit;
  }

  try {
    if (tr->parsed()) return transform(tr_in, tr_out, tr_dir);
    if (nm->parsed()) return norm(nm_in, nm_which, nm_axis, nm_delta);
    if (pa->parsed()) return para(pa_phi, pa_b, pa_out, pa_op, pa_beta);
    if (co->parsed()) return commutator(co_phi, co_b, co_out, co_axes);

    nlohmann::json j = ex_config.empty() ? nlohmann::json::object() : load_config(ex_config).to_json();
    if (*o_name) j["experiment"] = ex_name;
    if (*o_n) j["n_params"] = ex_n;
    if (*o_d) j["depths"] = ex_depths;
    if (*o_seed) j["seed"] = ex_seed;
    if (*o_budget) j["budget"] = ex_budget;
    if (*o_ens) j["ensemble"] = ex_ensemble;
    if (*o_samples) j["samples"] = ex_samples;
    if (*o_out) j["out"] = ex_out;
    const auto cfg = ExperimentConfig::from_json(j);
    const auto output = run_experiment(cfg);
    write_experiment(cfg, output);
    std::cout << "wrote " << cfg.out << '/' << cfg.experiment << ".csv (config " << config_hash(cfg) << ")\n";
    return 0;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kNumericExit;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigExit;
  }
}
