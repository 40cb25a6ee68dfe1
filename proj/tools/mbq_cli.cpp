// Command-line front end over the C API.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mbq/mbq.h"

namespace {

constexpr int kExitError = 1;
constexpr int kExitTolerance = 2;

struct Failure {
  int exit_code;
  std::string message;
};

void check(mbq_status status, const char* what) {
  if (status != MBQ_OK)
    throw Failure{kExitError, std::string(what) + ": " + mbq_status_string(status) + ": " +
                                  mbq_last_error()};
}

template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using ProblemPtr = std::unique_ptr<mbq_problem, Deleter<mbq_problem, mbq_problem_free>>;
using ConfigPtr = std::unique_ptr<mbq_config, Deleter<mbq_config, mbq_config_free>>;
using PricingPtr = std::unique_ptr<mbq_pricing, Deleter<mbq_pricing, mbq_pricing_free>>;
using FactorsPtr = std::unique_ptr<mbq_factors, Deleter<mbq_factors, mbq_factors_free>>;
using ReportPtr = std::unique_ptr<mbq_report, Deleter<mbq_report, mbq_report_free>>;

struct GridFlags {
  double lambda = 0.0;
  std::vector<std::string> nodes;  // "j=M"
  std::size_t keep = 0;
  bool no_cv = false;
  unsigned threads = 0;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--lambda", lambda, "Accuracy coefficient of the node-size rule")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--nodes", nodes, "Node count override for factor j, as j=M")
        ->type_name("J=M");
    cmd->add_option("--keep", keep, "Number of factors kept (N')")->check(CLI::PositiveNumber);
    cmd->add_flag("--no-cv", no_cv, "Report raw quadrature sums without the control variate");
    cmd->add_option("--threads", threads, "Worker threads (0: all cores)");
  }

  ConfigPtr build() const {
    mbq_config* raw = nullptr;
    check(mbq_config_new(&raw), "config");
    ConfigPtr config(raw);
    if (lambda > 0.0) check(mbq_config_set_lambda(raw, lambda), "--lambda");
    for (const std::string& spec : nodes) {
      const auto eq = spec.find('=');
      int j = 0;
      int m = 0;
      try {
        if (eq == std::string::npos) throw std::invalid_argument(spec);
        std::size_t used = 0;
        j = std::stoi(spec.substr(0, eq), &used);
        if (used != eq) throw std::invalid_argument(spec);
        m = std::stoi(spec.substr(eq + 1), &used);
        if (used != spec.size() - eq - 1) throw std::invalid_argument(spec);
      } catch (const std::logic_error&) {
        throw Failure{kExitError, "--nodes expects j=M, got '" + spec + "'"};
      }
      check(mbq_config_set_nodes(raw, j, m), "--nodes");
    }
    if (keep > 0) check(mbq_config_set_keep(raw, keep), "--keep");
    check(mbq_config_set_control_variate(raw, no_cv ? 0 : 1), "--no-cv");
    check(mbq_config_set_threads(raw, threads), "--threads");
    return config;
  }
};

ProblemPtr load_problem(const std::string& path) {
  mbq_problem* raw = nullptr;
  check(mbq_problem_from_file(path.c_str(), &raw), path.c_str());
  return ProblemPtr(raw);
}

// "-" writes to standard output.
void write_file(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw Failure{kExitError, "cannot write '" + path + "'"};
  out << text;
}

std::string fixed(double x, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, x);
  return buf;
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

// Delta columns are shown by default up to this many assets.
constexpr std::size_t kDeltaColumns = 8;

int cmd_price(const std::string& file, const GridFlags& grid, bool forward_value, bool all_deltas,
              std::size_t mc_paths, std::uint64_t seed, int decimals) {
  const ProblemPtr problem = load_problem(file);
  const ConfigPtr config = grid.build();
  mbq_pricing* raw = nullptr;
  check(mbq_price(problem.get(), config.get(), &raw), "price");
  const PricingPtr pricing(raw);

  const std::size_t rows = mbq_pricing_count(raw);
  const std::size_t assets = mbq_pricing_assets(raw);
  const bool show_deltas = all_deltas || assets <= kDeltaColumns;
  std::vector<mbq_mc_row> mc;
  if (mc_paths > 0) {
    mc.resize(rows);
    check(mbq_mc_price(problem.get(), mc_paths, seed, grid.threads, mc.data(), mc.size()),
          "Monte Carlo");
  }

  std::size_t count = 0;
  check(mbq_pricing_grid_sizes(raw, nullptr, 0, &count), "grid");
  std::vector<int> sizes(count);
  if (count) check(mbq_pricing_grid_sizes(raw, sizes.data(), sizes.size(), &count), "grid");
  std::ostringstream header;
  header << (forward_value ? "forward values" : "present values") << ", M_j = (";
  for (std::size_t j = 0; j < sizes.size(); ++j) header << (j ? "," : "") << sizes[j];
  header << ")";

  const std::size_t w = static_cast<std::size_t>(decimals) + 8;
  std::vector<std::string> cols{"K", "call", "put", "binary"};
  if (show_deltas)
    for (std::size_t k = 0; k < assets; ++k) cols.push_back("delta_" + std::to_string(k + 1));
  if (!mc.empty()) {
    cols.push_back("mc_call");
    cols.push_back("mc_stderr");
  }
  std::size_t total = 0;
  std::ostringstream out;
  for (const auto& c : cols) out << pad(c, w);
  out << '\n';
  std::size_t failures = 0;
  for (std::size_t i = 0; i < rows; ++i) {
    mbq_price_row row;
    check(mbq_pricing_row(raw, i, &row), "row");
    total = row.grid_size;
    failures += row.boundary_failures;
    const double scale = forward_value ? 1.0 : row.discount;
    std::vector<double> deltas(assets);
    check(mbq_pricing_deltas(raw, i, deltas.data(), deltas.size()), "deltas");
    out << pad(fixed(row.strike, 4), w) << pad(fixed(scale * row.call, decimals), w)
        << pad(fixed(scale * row.put, decimals), w) << pad(fixed(row.binary, decimals), w);
    if (show_deltas)
      for (double d : deltas) out << pad(fixed(d, decimals), w);
    if (!mc.empty())
      out << pad(fixed(scale * mc[i].call, decimals), w)
          << pad(fixed(scale * mc[i].call_stderr, decimals), w);
    out << '\n';
  }
  std::cout << header.str() << ", M = " << total << '\n' << out.str();
  if (failures) {
    std::cerr << "warning: " << failures << " boundary solves did not converge\n";
    return kExitTolerance;
  }
  return 0;
}

int cmd_factors(const std::string& file, const GridFlags& grid, int decimals) {
  const ProblemPtr problem = load_problem(file);
  const ConfigPtr config = grid.build();
  mbq_factors* raw = nullptr;
  check(mbq_factors_compute(problem.get(), config.get(), &raw), "factors");
  const FactorsPtr factors(raw);
  std::cout << mbq_factors_display(raw, decimals);
  if (mbq_factors_adjusted(raw)) std::cout << "first factor adjusted into the conforming region\n";
  return 0;
}

std::vector<std::string> expand_presets(const std::string& name) {
  if (name == "all") return {"S1", "S2", "B1", "B2", "A1", "A2", "A3"};
  return {name};
}

int cmd_bench(const std::string& preset, const std::string& mode, const std::string& csv_path) {
  bool all_passed = true;
  std::string csv;
  for (const std::string& name : expand_presets(preset)) {
    mbq_report* raw = nullptr;
    check(mbq_bench_run(name.c_str(), mode.c_str(), &raw), name.c_str());
    const ReportPtr report(raw);
    std::cout << mbq_report_text(raw) << '\n';
    std::string part = mbq_report_csv(raw);
    if (!csv.empty()) part = part.substr(part.find('\n') + 1);
    csv += part;
    all_passed = all_passed && mbq_report_passed(raw);
  }
  if (!csv_path.empty()) write_file(csv_path, csv);
  return all_passed ? 0 : kExitTolerance;
}

std::vector<int> parse_grid(const std::string& spec) {
  std::vector<int> sizes;
  std::stringstream in(spec);
  std::string item;
  while (std::getline(in, item, 'x')) {
    try {
      std::size_t used = 0;
      sizes.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw Failure{kExitError, "--grid expects sizes like 3x3, got '" + spec + "'"};
    }
  }
  return sizes;
}

int cmd_sweep(const std::string& preset, const std::vector<double>& lambdas,
              const std::vector<std::string>& grids, bool no_cv, const std::string& csv_path) {
  mbq_report* raw = nullptr;
  if (!grids.empty()) {
    std::vector<int> flat;
    std::size_t dims = 0;
    for (const std::string& g : grids) {
      const std::vector<int> sizes = parse_grid(g);
      if (dims && sizes.size() != dims)
        throw Failure{kExitError, "all --grid settings need the same number of factors"};
      dims = sizes.size();
      flat.insert(flat.end(), sizes.begin(), sizes.end());
    }
    check(mbq_sweep_nodes(preset.c_str(), flat.data(), grids.size(), dims, no_cv ? 0 : 1, &raw),
          "sweep");
  } else {
    const std::vector<double> l = lambdas.empty() ? std::vector<double>{3, 6, 9, 12} : lambdas;
    check(mbq_sweep_lambdas(preset.c_str(), l.data(), l.size(), no_cv ? 0 : 1, &raw), "sweep");
  }
  const ReportPtr report(raw);
  std::cout << mbq_report_text(raw);
  if (!csv_path.empty()) write_file(csv_path, mbq_report_csv(raw));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quadrature pricer for spread, basket and Asian options under correlated GBM"};
  app.require_subcommand(1);

  std::string file;
  GridFlags price_grid;
  bool forward_value = false;
  bool present_value = false;
  bool all_deltas = false;
  std::size_t mc_paths = 0;
  std::uint64_t seed = 20240601;
  int decimals = 7;
  auto* price = app.add_subcommand("price", "Price every strike of a problem file");
  price->add_option("problem", file, "Problem JSON file")->required();
  price_grid.add_to(price);
  auto* pv = price->add_flag("--present-value", present_value, "Discount by exp(-rT) (default)");
  price->add_flag("--forward-value", forward_value, "Report undiscounted forward values")->excludes(pv);
  price->add_flag("--deltas", all_deltas, "Print delta columns for every asset");
  price->add_option("--mc-paths", mc_paths, "Also run the Monte Carlo oracle with this many paths");
  price->add_option("--seed", seed, "Monte Carlo seed");
  price->add_option("--decimals", decimals, "Output decimals")->check(CLI::Range(0, 15));

  GridFlags factor_grid;
  int factor_decimals = 3;
  auto* factors = app.add_subcommand("factors", "Show the factor matrix display");
  factors->add_option("problem", file, "Problem JSON file")->required();
  factor_grid.add_to(factors);
  factors->add_option("--decimals", factor_decimals, "Output decimals")->check(CLI::Range(0, 15));

  std::string preset;
  std::string mode = "converged";
  std::string csv_path;
  auto* bench = app.add_subcommand("bench", "Reproduce a published benchmark table");
  bench->add_option("preset", preset, "S1, S2, B1, B2, A1, A2, A3 or all")->required();
  bench->add_option("--mode", mode, "fast or converged")
      ->check(CLI::IsMember({"fast", "converged"}));
  bench->add_option("--csv", csv_path, "Also write the rows as CSV (- for standard output)");

  std::vector<double> lambdas;
  std::vector<std::string> grids;
  bool sweep_no_cv = false;
  auto* sweep = app.add_subcommand("sweep", "Price a preset over a sequence of grids");
  sweep->add_option("preset", preset, "S1, S2, B1, B2, A1, A2 or A3")->required();
  auto* lambda_opt = sweep->add_option("--lambdas", lambdas, "Node-size rule coefficients")
                         ->delimiter(',');
  sweep->add_option("--grid", grids, "Explicit node counts per setting, e.g. 2 3 4 or 3x3")
      ->excludes(lambda_opt);
  sweep->add_flag("--no-cv", sweep_no_cv, "Disable the control variate");
  sweep->add_option("--csv", csv_path, "Also write the rows as CSV (- for standard output)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*price) return cmd_price(file, price_grid, forward_value, all_deltas, mc_paths, seed, decimals);
    if (*factors) return cmd_factors(file, factor_grid, factor_decimals);
    if (*bench) return cmd_bench(preset, mode, csv_path);
    if (*sweep) return cmd_sweep(preset, lambdas, grids, sweep_no_cv, csv_path);
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << '\n';
    return f.exit_code;
  }
  return 0;
}
