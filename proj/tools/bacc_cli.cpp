// Command-line front-end: experiments, diagnostics, toy training and an
// on-disk encode/decode round trip.
//
// Exit status: 0 success, 2 invalid configuration, 3 runtime failure.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "bacc/bacc.hpp"
#include "run_output.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

/// Resolved value of every option of a subcommand, for the manifest.
ordered_json echo_config(const CLI::App& sub) {
  ordered_json out;
  for (const CLI::Option* opt : sub.get_options()) {
    if (opt->get_lnames().empty() || opt->get_lnames().front() == "help") continue;
    const std::string& name = opt->get_lnames().front();
    if (opt->count() > 0) {
      const auto& r = opt->results();
      out[name] = r.size() == 1 ? r.front() : fmt::format("{}", fmt::join(r, ","));
    } else {
      out[name] = opt->get_default_str();
    }
  }
  return out;
}

std::vector<std::size_t> s_sweep(std::size_t s_min, std::size_t s_max, std::size_t step) {
  if (step == 0) throw bacc::error(bacc::errc::invalid_parameter, "--s-step must be positive");
  if (s_min > s_max) throw bacc::error(bacc::errc::invalid_parameter, "--s-min exceeds --s-max");
  std::vector<std::size_t> out;
  for (std::size_t s = s_min; s <= s_max; s += step) out.push_back(s);
  return out;
}

std::string stats_csv(const std::vector<bacc::ErrorStats>& stats) {
  cli::Csv csv({"s", "mean_rel_err", "min_rel_err", "max_rel_err", "n_trials"});
  for (const auto& st : stats) csv.row(st.s, st.mean, st.min, st.max, st.n_trials);
  return csv.text();
}

const cli::Plot kErrorPlot{"s", "mean relative error", true,
                           "'{csv}' using 1:2 with linespoints title 'mean', "
                           "'' using 1:3:4 with filledcurves fs transparent solid 0.2 title 'min-max'"};

bacc::FunctionSpec named_function(const std::string& name, bacc::Application app = bacc::Application::Scalar) {
  bacc::lookup_function(name);
  return {bacc::Named{name}, app};
}

/// Parses "1,5,7" into indices.
std::vector<std::size_t> index_list(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stoull(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw bacc::error(bacc::errc::invalid_parameter, "bad index '" + item + "'");
    }
  }
  return out;
}

/// One matrix per non-empty line, entries row-major, separated by commas or
/// whitespace.
std::vector<bacc::Matrix> read_matrices(const fs::path& path, std::size_t rows, std::size_t cols) {
  std::ifstream in(path);
  if (!in) throw bacc::error(bacc::errc::io_failure, "cannot open " + path.string());
  std::vector<bacc::Matrix> out;
  std::string line;
  while (std::getline(in, line)) {
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    std::vector<double> v;
    double x = 0;
    while (ls >> x) v.push_back(x);
    if (!ls.eof()) throw bacc::error(bacc::errc::invalid_input, "non-numeric entry in " + path.string());
    if (v.empty()) continue;
    if (v.size() != rows * cols)
      throw bacc::error(bacc::errc::shape_mismatch, fmt::format("expected {} entries per line, got {}", rows * cols, v.size()));
    bacc::Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < v.size(); ++i)
      m(static_cast<Eigen::Index>(i / cols), static_cast<Eigen::Index>(i % cols)) = v[i];
    out.push_back(std::move(m));
  }
  return out;
}

std::string share_file(std::size_t worker) { return fmt::format("share_{:05d}.bin", worker); }

/// Splits out `--config FILE` and appends `--key value` for each config
/// entry not given on the command line. Flags win over the file.
std::vector<std::string> apply_config_file(std::vector<std::string> args) {
  std::string path;
  for (auto it = args.begin(); it != args.end();) {
    if (*it == "--config" && it + 1 != args.end()) {
      path = *(it + 1);
      it = args.erase(it, it + 2);
    } else if (it->rfind("--config=", 0) == 0) {
      path = it->substr(9);
      it = args.erase(it);
    } else {
      ++it;
    }
  }
  if (path.empty()) return args;
  std::ifstream in(path);
  if (!in) throw bacc::error(bacc::errc::invalid_parameter, "cannot read config file " + path);
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      if (line.find_first_not_of(" \t\r") != std::string::npos)
        throw bacc::error(bacc::errc::invalid_parameter, "config line without '=': " + line);
      continue;
    }
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const std::string flag = "--" + key;
    const bool given = std::any_of(args.begin(), args.end(), [&](const std::string& a) {
      return a == flag || a.rfind(flag + "=", 0) == 0;
    });
    if (!given) {
      args.push_back(flag);
      args.push_back(value);
    }
  }
  return args;
}

int exit_code_for(bacc::errc code) {
  switch (code) {
    case bacc::errc::io_failure:
    case bacc::errc::worker_failure:
    case bacc::errc::node_coincidence:
    case bacc::errc::empty_survivors:
      return kExitRuntime;
    default:
      return kExitConfig;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Berrut approximated coded computing: experiments and tools"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  std::string out;
  std::uint64_t seed = 42;

  // lebesgue
  auto* leb = app.add_subcommand("lebesgue", "Berrut Lebesgue function on a consecutive-gap survivor set");
  std::size_t leb_N = 0, leb_s = 0, leb_kbar = 0, leb_samples = 64;
  leb->add_option("--N", leb_N, "workers minus one")->required();
  leb->add_option("--s", leb_s, "stragglers");
  leb->add_option("--kbar", leb_kbar, "last survivor before the gap");
  leb->add_option("--samples", leb_samples, "grid samples per inter-node interval");
  leb->add_option("--out", out, "CSV path")->required();

  // poly-exp / nodes-compare share their flags
  bacc::ExperimentConfig exp;
  std::size_t s_min = 0, s_max = 450, s_step = 50;
  std::string draw = "uniform";
  auto add_experiment_flags = [&](CLI::App* sub) {
    sub->add_option("--N", exp.N);
    sub->add_option("--K", exp.K);
    sub->add_option("--deg", exp.deg, "degree of the random polynomials");
    sub->add_option("--s-min", s_min);
    sub->add_option("--s-max", s_max);
    sub->add_option("--s-step", s_step);
    sub->add_option("--trials-f", exp.trials_functions);
    sub->add_option("--trials-s", exp.trials_stragglers);
    sub->add_option("--seed", seed);
    sub->add_option("--draw", draw)->check(CLI::IsMember({"uniform", "consecutive"}));
    sub->add_option("--out", out, "CSV path")->required();
  };
  auto* poly = app.add_subcommand("poly-exp", "random polynomial workloads swept over s");
  add_experiment_flags(poly);
  auto* nodes = app.add_subcommand("nodes-compare", "Chebyshev against equidistant points, paired trials");
  add_experiment_flags(nodes);

  // nonpoly-exp
  auto* nonpoly = app.add_subcommand("nonpoly-exp", "x sin x workloads: pointwise curve or s sweep");
  std::string mode = "curve";
  bacc::CurveConfig curve_cfg;
  bacc::ExperimentConfig sweep;
  sweep.N = 250;
  sweep.K = 20;
  sweep.trials_functions = 1;
  sweep.trials_stragglers = 1000;
  std::size_t np_N = 60, np_K = 20, np_s = 20, np_smin = 0, np_smax = 50, np_step = 5;
  nonpoly->add_option("--mode", mode)->check(CLI::IsMember({"curve", "sweep"}));
  nonpoly->add_option("--N", np_N);
  nonpoly->add_option("--K", np_K);
  nonpoly->add_option("--s", np_s, "stragglers (curve mode)");
  nonpoly->add_option("--s-min", np_smin);
  nonpoly->add_option("--s-max", np_smax);
  nonpoly->add_option("--s-step", np_step);
  nonpoly->add_option("--trials-f", sweep.trials_functions, "input draws (sweep mode)");
  nonpoly->add_option("--trials-s", sweep.trials_stragglers, "straggler draws (sweep mode)");
  nonpoly->add_option("--seed", seed);
  nonpoly->add_option("--out", out, "CSV path")->required();

  // bound
  auto* bound = app.add_subcommand("bound", "approximation-error bound for g = f o u");
  std::size_t b_N = 0, b_s = 0, b_K = 20;
  std::string b_g;
  double b_lo = -12.0, b_hi = 12.0;
  std::optional<double> b_g1, b_g2;
  bound->add_option("--N", b_N)->required();
  bound->add_option("--s", b_s)->required();
  bound->add_option("--g", b_g, "registered function f")->required();
  bound->add_option("--K", b_K, "inputs on an even grid");
  bound->add_option("--grid-lo", b_lo);
  bound->add_option("--grid-hi", b_hi);
  bound->add_option("--norm-g1", b_g1, "use this ||g'|| instead of measuring it");
  bound->add_option("--norm-g2", b_g2, "use this ||g''|| instead of measuring it");
  bound->add_option("--out", out, "optional CSV path");

  // train-toy
  auto* train = app.add_subcommand("train-toy", "one-hidden-layer regression with coded gradients");
  bacc::TrainConfig tcfg;
  tcfg.N = 5;
  tcfg.K = 5;
  tcfg.s = 2;
  std::string scheme = "bacc";
  std::size_t samples = 256;
  train->add_option("--scheme", scheme)->check(CLI::IsMember({"bacc", "replication", "none", "full"}));
  train->add_option("--N", tcfg.N);
  train->add_option("--K", tcfg.K);
  train->add_option("--s", tcfg.s);
  train->add_option("--epochs", tcfg.epochs);
  train->add_option("--eta", tcfg.eta);
  train->add_option("--hidden", tcfg.hidden);
  train->add_option("--samples", samples, "dataset size before rounding down to a multiple of K");
  train->add_option("--seed", seed);
  train->add_option("--out", out, "CSV path")->required();

  // encode / decode
  auto* encode = app.add_subcommand("encode", "write one coded share per worker");
  std::string data_path, dir;
  std::size_t rows = 1, cols = 1, e_N = 0;
  encode->add_option("--data", data_path, "one matrix per line, row-major")->required();
  encode->add_option("--rows", rows);
  encode->add_option("--cols", cols);
  encode->add_option("--N", e_N)->required();
  encode->add_option("--out-dir", dir)->required();

  auto* decode = app.add_subcommand("decode", "decode worker results read from share files");
  std::size_t d_N = 0, d_K = 0;
  std::string d_f = "identity", d_missing;
  decode->add_option("--dir", dir, "directory of result files")->required();
  decode->add_option("--N", d_N)->required();
  decode->add_option("--K", d_K)->required();
  decode->add_option("--f", d_f, "apply this function to each file before decoding");
  decode->add_option("--stragglers", d_missing, "comma-separated workers to ignore");
  decode->add_option("--out", out, "CSV path")->required();

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = apply_config_file(std::move(args));
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  } catch (const bacc::error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (*leb) {
      const auto pattern = bacc::worst_case_pattern(leb_N, leb_s, leb_kbar);
      const auto nodes = bacc::survivor_nodes(pattern);
      const bacc::LebesgueGrid grid{leb_samples};
      const auto xs = bacc::lebesgue_sample_points(nodes, grid);
      const auto w = bacc::resolve_weights(bacc::Berrut{}, nodes);
      cli::Csv csv({"x", "lebesgue"});
      for (double x : xs) csv.row(x, bacc::lebesgue_function(bacc::Berrut{}, nodes, w, x));
      const auto rep = bacc::lebesgue_constant(bacc::Berrut{}, nodes, grid);
      fmt::print("lebesgue_constant {} at x={}\n", cli::num(rep.constant_estimate), cli::num(rep.argmax_x));
      if (leb_s + 2 < leb_N) fmt::print("theoretical_bound {}\n", cli::num(bacc::theoretical_lebesgue_bound(leb_N, leb_s)));
      cli::Run run("lebesgue", echo_config(*leb), 0);
      run.add_csv(out, csv.text(), {"x", "Lebesgue function", false, "'{csv}' using 1:2 with lines title 'Berrut'"});
      run.commit();
    } else if (*poly || *nodes) {
      exp.s_values = s_sweep(s_min, s_max, s_step);
      exp.seed = seed;
      exp.draw = draw == "consecutive" ? bacc::StragglerDraw::Consecutive : bacc::StragglerDraw::Uniform;
      if (*poly) {
        const auto stats = bacc::run_poly_experiment(exp);
        for (const auto& st : stats) fmt::print("s={} mean_rel_err={}\n", st.s, cli::num(st.mean));
        cli::Run run("poly-exp", echo_config(*poly), seed);
        run.add_csv(out, stats_csv(stats), kErrorPlot);
        run.commit();
      } else {
        const auto cmp = bacc::compare_nodesets(exp);
        cli::Csv csv({"node_family", "s", "mean_rel_err", "min_rel_err", "max_rel_err", "n_trials"});
        double log_sum = 0;
        std::size_t used = 0;
        for (const auto* family : {&cmp.chebyshev, &cmp.equidistant}) {
          const auto name = bacc::to_string(family == &cmp.chebyshev ? bacc::NodeFamily::ChebyshevPair
                                                                     : bacc::NodeFamily::Equidistant);
          for (const auto& st : *family) csv.row(name, st.s, st.mean, st.min, st.max, st.n_trials);
        }
        for (std::size_t i = 0; i < cmp.chebyshev.size(); ++i) {
          if (cmp.chebyshev[i].mean < 1e-9 && cmp.equidistant[i].mean < 1e-9) continue;
          log_sum += std::log(cmp.equidistant[i].mean / cmp.chebyshev[i].mean);
          ++used;
        }
        if (used > 0) fmt::print("geometric_mean_ratio equidistant/chebyshev {}\n", cli::num(std::exp(log_sum / used)));
        cli::Run run("nodes-compare", echo_config(*nodes), seed);
        run.add_csv(out, csv.text(),
                    {"s", "mean relative error", true,
                     "'< grep chebyshev {csv}' using 2:3 with linespoints title 'Chebyshev', "
                     "'< grep equidistant {csv}' using 2:3 with linespoints title 'equidistant'"});
        run.commit();
      }
    } else if (*nonpoly) {
      cli::Run run("nonpoly-exp", echo_config(*nonpoly), seed);
      if (mode == "curve") {
        curve_cfg.N = np_N;
        curve_cfg.K = np_K;
        curve_cfg.s = np_s;
        curve_cfg.seed = seed;
        const auto curve = bacc::run_nonpoly_curve(curve_cfg);
        cli::Csv csv({"x", "exact", "decoded", "abs_err"});
        for (std::size_t k = 0; k < curve.inputs.size(); ++k)
          csv.row(curve.inputs[k], curve.exact[k], curve.decoded[k], std::abs(curve.decoded[k] - curve.exact[k]));
        fmt::print("max_abs_err {}\n", cli::num(curve.max_abs_error));
        if (curve.bound) fmt::print("error_bound {}\n", cli::num(*curve.bound));
        run.add_csv(out, csv.text(),
                    {"x", "f(x)", false,
                     "'{csv}' using 1:2 with lines title 'x sin x', '' using 1:3 with points title 'decoded'"});
      } else {
        sweep.N = np_N;
        sweep.K = np_K;
        sweep.s_values = s_sweep(np_smin, np_smax, np_step);
        sweep.seed = seed;
        const auto stats = bacc::run_nonpoly_experiment(sweep);
        for (const auto& st : stats) fmt::print("s={} mean_rel_err={}\n", st.s, cli::num(st.mean));
        run.add_csv(out, stats_csv(stats), kErrorPlot);
      }
      run.commit();
    } else if (*bound) {
      const auto f = named_function(b_g);
      double g1 = 0, g2 = 0;
      if (b_g1 && b_g2) {
        g1 = *b_g1;
        g2 = *b_g2;
      } else {
        if (b_K < 2) throw bacc::error(bacc::errc::invalid_parameter, "--K must be at least 2");
        std::vector<double> inputs;
        for (std::size_t i = 0; i < b_K; ++i) inputs.push_back(b_lo + (b_hi - b_lo) * static_cast<double>(i) / (b_K - 1.0));
        const auto enc = bacc::make_encoder(inputs);
        const auto norms = bacc::derivative_norms([&](double z) { return bacc::apply(f, enc(z)); }, -1.0, 1.0);
        g1 = b_g1.value_or(norms.norm_g1);
        g2 = b_g2.value_or(norms.norm_g2);
      }
      const double value = bacc::error_bound(b_N, b_s, g1, g2);
      fmt::print("{}\n", cli::num(value));
      if (!out.empty()) {
        cli::Csv csv({"N", "s", "norm_g1", "norm_g2", "bound"});
        csv.row(b_N, b_s, g1, g2, value);
        cli::Run run("bound", echo_config(*bound), 0);
        run.add_csv(out, csv.text(), {"s", "bound", true, "'{csv}' using 2:5 with points title 'bound'"});
        run.commit();
      }
    } else if (*train) {
      tcfg.seed = seed;
      tcfg.scheme = scheme == "bacc"          ? bacc::TrainScheme::Bacc
                    : scheme == "replication" ? bacc::TrainScheme::Replication
                    : scheme == "none"        ? bacc::TrainScheme::NoRedundancy
                                              : bacc::TrainScheme::Full;
      if (tcfg.K == 0 || samples < tcfg.K)
        throw bacc::error(bacc::errc::invalid_partition, "need 1 <= K <= --samples");
      const auto data = bacc::make_synthetic(seed, tcfg.K * (samples / tcfg.K));
      const auto traj = bacc::train(tcfg, data);
      cli::Csv csv({"epoch", "scheme", "train_loss"});
      for (std::size_t e = 0; e < traj.size(); ++e) csv.row(e, scheme, traj[e]);
      fmt::print("final_loss {}\n", cli::num(traj.back()));
      cli::Run run("train-toy", echo_config(*train), seed);
      run.add_csv(out, csv.text(), {"epoch", "training loss", true, "'{csv}' using 1:3 with lines title columnhead(2)"});
      run.commit();
    } else if (*encode) {
      const auto data = read_matrices(data_path, rows, cols);
      const auto enc = bacc::make_encoder(data);
      const auto shares = bacc::encode_shares(enc, e_N);
      cli::Csv index({"worker", "z", "file"});
      cli::Run run("encode", echo_config(*encode), 0);
      for (const auto& s : shares) {
        std::ostringstream buf;
        bacc::write_share(buf, s);
        run.add_file(fs::path(dir) / share_file(s.worker), buf.str());
        index.row(s.worker, s.z, share_file(s.worker));
      }
      run.add_csv(fs::path(dir) / "shares.csv", index.text(), {"worker", "z", false, "'{csv}' using 1:2 with points title 'z'"});
      run.commit();
      fmt::print("wrote {} shares for K={}\n", shares.size(), data.size());
    } else if (*decode) {
      const auto f = named_function(d_f, bacc::Application::Entrywise);
      const auto missing = index_list(d_missing);
      bacc::DecodeInput<bacc::Matrix> input;
      input.N = d_N;
      for (std::size_t i = 0; i <= d_N; ++i) {
        if (std::find(missing.begin(), missing.end(), i) != missing.end()) continue;
        const fs::path p = fs::path(dir) / share_file(i);
        if (!fs::exists(p)) continue;
        const auto share = bacc::load_share(p);
        if (share.worker != i) throw bacc::error(bacc::errc::io_failure, "worker index mismatch in " + p.string());
        input.survivors.push_back(i);
        input.results.push_back(bacc::apply(f, share.payload));
      }
      if (d_K == 0) throw bacc::error(bacc::errc::invalid_parameter, "--K must be positive");
      const auto decoded = bacc::decode(input, bacc::chebyshev_first(d_K));
      cli::Csv csv({"j", "row", "col", "value"});
      for (std::size_t j = 0; j < decoded.size(); ++j)
        for (Eigen::Index r = 0; r < decoded[j].rows(); ++r)
          for (Eigen::Index c = 0; c < decoded[j].cols(); ++c)
            csv.row(j, static_cast<std::size_t>(r), static_cast<std::size_t>(c), decoded[j](r, c));
      fmt::print("decoded K={} from {} results\n", d_K, input.survivors.size());
      cli::Run run("decode", echo_config(*decode), 0);
      run.add_csv(out, csv.text(), {"j", "value", false, "'{csv}' using 1:4 with points title 'decoded'"});
      run.commit();
    }
  } catch (const bacc::error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
