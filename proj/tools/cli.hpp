#ifndef QHAAR_TOOLS_CLI_HPP_
#define QHAAR_TOOLS_CLI_HPP_

// qhaar command line. Exit codes: 0 pass, 1 a mathematical check failed,
// 2 usage, I/O or format error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qhaar/qhaar.hpp"

namespace qhaar::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;

/// Bad flags or flag combinations.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string command;
  std::optional<int> s;
  std::optional<std::uint64_t> seed;
  std::optional<double> gamma_const;
  std::string gamma_file;
  std::string alpha_file;
  std::string builtin;
  std::string in_file;
  std::string reference_file;
  std::string out_dir = ".";
  double tolerance = 1e-10;
  std::string format = "json";
  std::optional<int> j_min;
  int t = 1;
  bool allow_large_s = false;
};

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline Json read_json(const std::string& path) {
  try {
    return Json::parse(read_file(path));
  } catch (const Json::parse_error& e) {
    throw FormatError(path + ": " + e.what());
  }
}

class Writer {
 public:
  explicit Writer(const std::string& dir) : dir_(dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw std::runtime_error("cannot create " + dir_.string() + ": " + ec.message());
  }

  std::string text(const std::string& name, const std::string& content) {
    const auto path = dir_ / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out || !(out << content)) throw std::runtime_error("cannot write " + path.string());
    written_.push_back(name);
    return path.string();
  }

  std::string json(const std::string& name, const Json& value) { return text(name, value.dump(2) + "\n"); }

  const std::vector<std::string>& written() const { return written_; }

 private:
  std::filesystem::path dir_;
  std::vector<std::string> written_;
};

inline void check_config(const RunConfig& c) {
  if (!(c.tolerance > 0.0)) throw UsageError("--tolerance must be > 0");
  if (c.s) {
    if (*c.s < 1) throw UsageError("--s must be >= 1");
    if (*c.s > kDefaultMaxS && !c.allow_large_s) {
      throw UsageError("--s " + std::to_string(*c.s) + " exceeds the cap of " + std::to_string(kDefaultMaxS) +
                       " (pass --allow-large-s to override)");
    }
  }
  if (c.format != "json" && c.format != "csv") throw UsageError("--format must be json or csv");
}

inline void check_s_cap(int s, const RunConfig& c) {
  if (s > kDefaultMaxS && !c.allow_large_s) {
    throw UsageError("s = " + std::to_string(s) + " exceeds the cap of " + std::to_string(kDefaultMaxS) +
                     " (pass --allow-large-s to override)");
  }
}

struct GammaSource {
  GammaGrid gamma;
  std::string kind;  // file | constant | seed
};

inline int count_sources(const RunConfig& c, bool with_builtin) {
  return static_cast<int>(!c.gamma_file.empty()) + static_cast<int>(c.gamma_const.has_value()) +
         static_cast<int>(c.seed.has_value()) + static_cast<int>(!c.alpha_file.empty()) +
         static_cast<int>(with_builtin && !c.builtin.empty());
}

/// gamma from --gamma, --gamma-const or --s/--seed; nullopt when none given.
inline std::optional<GammaSource> gamma_source(const RunConfig& c) {
  if (!c.gamma_file.empty()) {
    GammaGrid g = gamma_from_json(read_json(c.gamma_file));
    if (c.s && *c.s != g.s()) throw UsageError("--s disagrees with s in " + c.gamma_file);
    check_s_cap(g.s(), c);
    return GammaSource{std::move(g), "file"};
  }
  if (c.gamma_const) return GammaSource{GammaGrid::constant(c.s.value_or(1), Complex(*c.gamma_const)), "constant"};
  if (c.seed) return GammaSource{random_gamma(c.s.value_or(1), *c.seed), "seed"};
  return std::nullopt;
}

/// Wavelet basis for decompose / reconstruct. Defaults to psi.
inline WaveletBasis basis_from(const RunConfig& c, std::optional<DualPathReport>* dual = nullptr) {
  if (count_sources(c, true) > 1) {
    throw UsageError("give at most one of --builtin, --alpha, --gamma, --gamma-const, --seed");
  }
  if (!c.builtin.empty() && c.builtin != "psi") throw UsageError("--builtin " + c.builtin + " is not a wavelet basis");
  if (!c.alpha_file.empty()) {
    AlphaGrid alpha = alpha_from_json(read_json(c.alpha_file));
    check_s_cap(alpha.s(), c);
    return WaveletBasis(std::move(alpha));
  }
  if (auto src = gamma_source(c)) {
    DualPathReport report = compare_alpha_paths(src->gamma, c.tolerance);
    if (!report.pass()) throw std::runtime_error("neither alpha construction yields a unitary D");
    WaveletBasis basis(report.resolved);
    if (dual) *dual = std::move(report);
    return basis;
  }
  return WaveletBasis::standard(c.s.value_or(1));
}

inline std::string fmt(double x) {
  std::ostringstream out;
  out.precision(6);
  out << std::scientific << x;
  return out.str();
}

// --- commands -------------------------------------------------------------

inline int cmd_generate(const RunConfig& c, std::ostream& out) {
  if (!c.builtin.empty() || !c.alpha_file.empty()) throw UsageError("generate takes --gamma, --gamma-const or --s/--seed");
  if (count_sources(c, false) > 1) throw UsageError("give at most one of --gamma, --gamma-const, --seed");
  RunConfig effective = c;
  if (count_sources(c, false) == 0) effective.seed = 0;
  const GammaSource src = *gamma_source(effective);
  const DualPathReport dual = compare_alpha_paths(src.gamma, c.tolerance);

  Writer w(c.out_dir);
  w.json("gamma.json", to_json(src.gamma));
  w.json("alpha.json", to_json(dual.resolved));
  w.json("wavelet.json", to_json(synthesize_wavelet(dual.resolved)));
  w.json("dual_path.json", to_json(dual));
  if (c.format == "csv") {
    w.text("gamma.csv", to_csv(src.gamma.entries()));
    w.text("alpha.csv", to_csv(dual.resolved.entries()));
  }
  Json manifest{{"command", "generate"},
                {"s", src.gamma.s()},
                {"seed", src.kind == "seed" ? Json(*effective.seed) : Json(nullptr)},
                {"gamma_source", src.kind},
                {"gamma_digest", gamma_digest(src.gamma)},
                {"alpha_digest", alpha_digest(dual.resolved)},
                {"alpha_path", to_string(dual.trusted)},
                {"paths_agree", dual.agree},
                {"tolerance", c.tolerance},
                {"pass", dual.pass()}};
  manifest["files"] = w.written();
  w.json("manifest.json", manifest);

  out << "generate: s=" << src.gamma.s() << " alpha_path=" << to_string(dual.trusted)
      << " paths_agree=" << (dual.agree ? "true" : "false") << " alpha_digest=" << alpha_digest(dual.resolved) << "\n";
  return dual.pass() ? kExitPass : kExitCheckFailed;
}

inline int cmd_verify(const RunConfig& c, std::ostream& out) {
  if (count_sources(c, true) + static_cast<int>(!c.in_file.empty()) > 1) {
    throw UsageError("give at most one of --in, --builtin, --alpha, --gamma, --gamma-const, --seed");
  }
  StepFunction2D candidate;
  std::string source;
  int s = c.s.value_or(1);
  std::optional<DualPathReport> dual;

  if (!c.in_file.empty()) {
    candidate = step_function_from_json<2>(read_json(c.in_file));
    source = "file";
    if (!c.s) s = std::max(1, canonicalize(candidate).support_exp());
  } else if (!c.builtin.empty()) {
    if (c.builtin == "psi") {
      candidate = make_psi();
    } else if (c.builtin == "phi") {
      candidate = make_phi();
    } else {
      throw UsageError("--builtin must be psi or phi");
    }
    source = "builtin:" + c.builtin;
  } else if (!c.alpha_file.empty()) {
    const AlphaGrid alpha = alpha_from_json(read_json(c.alpha_file));
    if (c.s && *c.s != alpha.s()) throw UsageError("--s disagrees with s in " + c.alpha_file);
    s = alpha.s();
    candidate = synthesize_wavelet(alpha);
    source = "alpha";
  } else if (auto src = gamma_source(c)) {
    dual = compare_alpha_paths(src->gamma, c.tolerance);
    s = src->gamma.s();
    candidate = synthesize_wavelet(dual->resolved);
    source = "gamma:" + src->kind;
  } else {
    candidate = make_psi();
    source = "builtin:psi";
  }
  check_s_cap(s, c);

  const WaveletReport report = verify_wavelet(candidate, s, c.tolerance);
  const bool pass = report.pass() && (!dual || dual->pass());
  Json j = to_json(report);
  j["source"] = source;
  j["dual_path"] = dual ? to_json(*dual) : Json(nullptr);
  j["pass"] = pass;
  Writer w(c.out_dir);
  w.json("verify.json", j);
  if (c.format == "csv" && report.gram.size() > 0) w.text("gram.csv", to_csv(report.gram));

  out << "verify: " << (pass ? "pass" : "FAIL");
  for (const auto& name : report.failing_checks()) out << " failed=" << name;
  if (dual && !dual->pass()) out << " failed=dual_path";
  out << "\n";
  return pass ? kExitPass : kExitCheckFailed;
}

inline int cmd_decompose(const RunConfig& c, std::ostream& out) {
  if (c.in_file.empty()) throw UsageError("decompose needs --in");
  const StepFunction2D f = step_function_from_json<2>(read_json(c.in_file));
  const WaveletBasis basis = basis_from(c);
  const int j_min = c.j_min.value_or(default_j_min(f));
  CoefficientSet coefficients;
  try {
    coefficients = analyze(f, basis, j_min);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  ParsevalReport parseval;
  parseval.tolerance = c.tolerance;
  parseval.function_norm_sq = squared_norm(f);
  parseval.coefficient_norm_sq = coefficients.squared_sum();
  parseval.difference = std::abs(parseval.function_norm_sq - parseval.coefficient_norm_sq);
  parseval.pass = parseval.difference < c.tolerance;
  const double residual = norm(synthesize(coefficients, basis) - f);
  const bool pass = parseval.pass && residual < c.tolerance;

  Writer w(c.out_dir);
  w.json("coefficients.json", to_json(coefficients));
  if (c.format == "csv") {
    std::ostringstream csv;
    csv.precision(17);
    csv << "kind,j,a1,a2,re,im\n";
    for (const auto& [a, v] : coefficients.scaling) {
      csv << "scaling," << coefficients.j_min << ',' << a.x1.to_string() << ',' << a.x2.to_string() << ','
          << v.real() << ',' << v.imag() << '\n';
    }
    for (const auto& [key, v] : coefficients.wavelet) {
      csv << "wavelet," << key.first << ',' << key.second.x1.to_string() << ',' << key.second.x2.to_string() << ','
          << v.real() << ',' << v.imag() << '\n';
    }
    w.text("coefficients.csv", csv.str());
  }
  Json report{{"command", "decompose"},
              {"alpha_digest", basis.digest()},
              {"j_min", coefficients.j_min},
              {"j_max", coefficients.j_max},
              {"coefficient_count", coefficients.scaling.size() + coefficients.wavelet.size()},
              {"parseval", to_json(parseval)},
              {"round_trip_residual", residual},
              {"tolerance", c.tolerance},
              {"pass", pass}};
  w.json("decompose.json", report);

  out << "parseval: function_norm_sq=" << fmt(parseval.function_norm_sq)
      << " coefficient_norm_sq=" << fmt(parseval.coefficient_norm_sq) << " gap=" << fmt(parseval.difference)
      << (parseval.pass ? " pass" : " FAIL") << "\n";
  out << "round trip residual: " << fmt(residual) << "\n";
  return pass ? kExitPass : kExitCheckFailed;
}

inline int cmd_reconstruct(const RunConfig& c, std::ostream& out) {
  if (c.in_file.empty()) throw UsageError("reconstruct needs --in");
  const CoefficientSet coefficients = coefficients_from_json(read_json(c.in_file));
  const WaveletBasis basis = basis_from(c);
  if (coefficients.s != basis.s() || (!coefficients.alpha_digest.empty() && coefficients.alpha_digest != basis.digest())) {
    throw UsageError("coefficients were produced with a different wavelet (alpha digest " + coefficients.alpha_digest +
                     ", basis " + basis.digest() + ")");
  }
  CoefficientSet aligned = coefficients;
  aligned.alpha_digest = basis.digest();
  const StepFunction2D f = synthesize(aligned, basis);

  Writer w(c.out_dir);
  w.json("reconstructed.json", to_json(f));
  Json report{{"command", "reconstruct"}, {"alpha_digest", basis.digest()}, {"tolerance", c.tolerance}};
  bool pass = true;
  if (!c.reference_file.empty()) {
    const StepFunction2D reference = step_function_from_json<2>(read_json(c.reference_file));
    const double residual = norm(f - reference);
    pass = residual < c.tolerance;
    report["round_trip_residual"] = residual;
    out << "round trip residual: " << fmt(residual) << (pass ? " pass" : " FAIL") << "\n";
  } else {
    report["round_trip_residual"] = nullptr;
    out << "reconstruct: wrote reconstructed.json\n";
  }
  report["pass"] = pass;
  w.json("reconstruct.json", report);
  return pass ? kExitPass : kExitCheckFailed;
}

inline int cmd_square_root(const RunConfig& c, std::ostream& out) {
  if (c.t < 0) throw UsageError("--t must be >= 0");
  const SquareRootReport report = verify_square_root(c.t, c.tolerance);
  Writer w(c.out_dir);
  w.json("square_root.json", to_json(report));
  out << "square-root: t=" << c.t << " max_residual=" << fmt(report.max_residual)
      << (report.pass ? " pass" : " FAIL " + report.failed_check) << "\n";
  return report.pass ? kExitPass : kExitCheckFailed;
}

inline int cmd_matrices(const RunConfig& c, std::ostream& out) {
  if (!c.builtin.empty()) throw UsageError("matrices does not take --builtin");
  std::optional<DualPathReport> dual;
  const WaveletBasis basis = basis_from(c, &dual);
  const int s = basis.s();
  const MatrixBundle bundle = build_matrices(s);
  const ComplexMatrix d = build_D(basis.alpha(), bundle);
  const IntMatrix d0 = build_D0(bundle);

  Writer w(c.out_dir);
  if (c.format == "csv") {
    w.text("negacyclic.csv", to_csv(bundle.negacyclic));
    w.text("lambda.csv", to_csv(bundle.lambda));
    w.text("omega.csv", to_csv(bundle.omega));
    w.text("C.csv", to_csv(bundle.c));
    w.text("D0.csv", to_csv(d0));
    w.text("D.csv", to_csv(d));
  }
  Json j{{"s", s},
         {"alpha_digest", basis.digest()},
         {"tolerance", c.tolerance},
         {"C_unitarity_deviation", unitarity_deviation(bundle.c)},
         {"D_unitarity_deviation", unitarity_deviation(d)}};
  if (c.format == "json") {
    j["negacyclic"] = int_matrix_to_json(bundle.negacyclic);
    j["lambda"] = int_matrix_to_json(bundle.lambda);
    j["omega"] = int_matrix_to_json(bundle.omega);
    j["C"] = matrix_to_json(bundle.c);
    j["D0"] = int_matrix_to_json(d0);
    j["D"] = matrix_to_json(d);
  }
  const bool pass = unitarity_deviation(d) < c.tolerance;
  j["pass"] = pass;
  w.json("matrices.json", j);
  out << "matrices: s=" << s << " D_unitarity_deviation=" << fmt(unitarity_deviation(d)) << (pass ? " pass" : " FAIL")
      << "\n";
  return pass ? kExitPass : kExitCheckFailed;
}

}  // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  RunConfig config;
  CLI::App app{"Quincunx Haar wavelets on Q_2^2", "qhaar"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  double gamma_const = 0.0;
  int s = 0;
  int j_min = 0;
  const auto common = [&](CLI::App* sub) {
    sub->add_option("--s", s, "Shift-set exponent s");
    sub->add_option("--tolerance", config.tolerance, "Check tolerance (> 0)");
    sub->add_option("--out", config.out_dir, "Output directory");
    sub->add_option("--format", config.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_flag("--allow-large-s", config.allow_large_s, "Permit s above the default cap");
  };
  const auto wavelet_source = [&](CLI::App* sub) {
    sub->add_option("--seed", seed, "Seed for a random gamma grid");
    sub->add_option("--gamma", config.gamma_file, "Gamma grid JSON")->check(CLI::ExistingFile);
    sub->add_option("--gamma-const", gamma_const, "Constant gamma value");
    sub->add_option("--alpha", config.alpha_file, "Alpha grid JSON")->check(CLI::ExistingFile);
  };

  auto* generate = app.add_subcommand("generate", "Build alpha and the wavelet from a gamma grid");
  common(generate);
  wavelet_source(generate);

  auto* verify = app.add_subcommand("verify", "Check a candidate wavelet");
  common(verify);
  wavelet_source(verify);
  verify->add_option("--builtin", config.builtin, "psi or phi");
  verify->add_option("--in", config.in_file, "Candidate step function JSON")->check(CLI::ExistingFile);

  auto* decompose = app.add_subcommand("decompose", "Wavelet coefficients of a step function");
  common(decompose);
  wavelet_source(decompose);
  decompose->add_option("--builtin", config.builtin, "psi");
  decompose->add_option("--in", config.in_file, "Step function JSON")->required()->check(CLI::ExistingFile);
  decompose->add_option("--jmin", j_min, "Coarsest level");

  auto* reconstruct = app.add_subcommand("reconstruct", "Step function from coefficients");
  common(reconstruct);
  wavelet_source(reconstruct);
  reconstruct->add_option("--builtin", config.builtin, "psi");
  reconstruct->add_option("--in", config.in_file, "Coefficient JSON")->required()->check(CLI::ExistingFile);
  reconstruct->add_option("--reference", config.reference_file, "Step function to compare against")
      ->check(CLI::ExistingFile);

  auto* square_root = app.add_subcommand("square-root", "Compare separable and quincunx slices");
  common(square_root);
  square_root->add_option("--t", config.t, "Slice bound: supports in B_t");

  auto* matrices = app.add_subcommand("matrices", "Dump the negacyclic, Lambda, Omega, C and D matrices");
  common(matrices);
  wavelet_source(matrices);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitPass;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    err << "qhaar: " << e.what() << "\n";
    return kExitUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  config.command = sub->get_name();
  const auto given = [sub](const char* name) {
    const CLI::Option* opt = sub->get_option_no_throw(name);
    return opt != nullptr && opt->count() > 0;
  };
  if (given("--s")) config.s = s;
  if (given("--seed")) config.seed = seed;
  if (given("--gamma-const")) config.gamma_const = gamma_const;
  if (given("--jmin")) config.j_min = j_min;

  try {
    detail::check_config(config);
    if (config.command == "generate") return detail::cmd_generate(config, out);
    if (config.command == "verify") return detail::cmd_verify(config, out);
    if (config.command == "decompose") return detail::cmd_decompose(config, out);
    if (config.command == "reconstruct") return detail::cmd_reconstruct(config, out);
    if (config.command == "square-root") return detail::cmd_square_root(config, out);
    if (config.command == "matrices") return detail::cmd_matrices(config, out);
    err << "qhaar: unknown command " << config.command << "\n";
  } catch (const std::exception& e) {
    err << "qhaar " << config.command << ": " << e.what() << "\n";
  }
  return kExitUsage;
}

}  // namespace qhaar::cli

#endif  // QHAAR_TOOLS_CLI_HPP_
