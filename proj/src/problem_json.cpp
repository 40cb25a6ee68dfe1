#include "mbq/problem_json.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mbq/error.hpp"
#include "mbq/products.hpp"

namespace mbq {

namespace {

using nlohmann::json;

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::Schema, path + ": " + what);
}

class Reader {
 public:
  explicit Reader(const json& root) : root_(root) {
    if (!root_.is_object()) schema_error("$", "expected an object");
  }

  bool has(const char* key) const { return root_.contains(key); }

  double number(const char* key) const {
    const std::string path = field(key);
    if (!has(key)) schema_error(path, "missing required field");
    return as_number(root_.at(key), path);
  }

  double number_or(const char* key, double fallback) const {
    return has(key) ? number(key) : fallback;
  }

  Vector vector(const char* key) const {
    const std::string path = field(key);
    if (!has(key)) schema_error(path, "missing required field");
    return as_vector(root_.at(key), path);
  }

  std::optional<Vector> optional_vector(const char* key) const {
    if (!has(key)) return std::nullopt;
    return vector(key);
  }

  std::string string(const char* key) const {
    const std::string path = field(key);
    if (!has(key)) schema_error(path, "missing required field");
    if (!root_.at(key).is_string()) schema_error(path, "expected a string");
    return root_.at(key).get<std::string>();
  }

  // Scalar correlation expands to a uniform matrix.
  Matrix correlation(std::size_t n) const {
    const char* key = "correlation";
    const std::string path = field(key);
    if (!has(key)) {
      if (n == 1) return Matrix(1, 1, 1.0);
      schema_error(path, "missing required field");
    }
    const json& node = root_.at(key);
    if (node.is_number()) {
      const double rho = node.get<double>();
      if (rho < -1.0 || rho > 1.0) schema_error(path, "correlation must lie in [-1, 1]");
      return uniform_correlation(n, rho);
    }
    if (!node.is_array() || node.size() != n)
      schema_error(path, "expected a number or an " + std::to_string(n) + " x " +
                             std::to_string(n) + " matrix");
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::string row_path = path + "[" + std::to_string(i) + "]";
      const Vector row = as_vector(node[i], row_path);
      if (row.size() != n) schema_error(row_path, "expected " + std::to_string(n) + " entries");
      for (std::size_t j = 0; j < n; ++j) m(i, j) = row[j];
    }
    return m;
  }

  void reject_unknown(const std::set<std::string>& allowed) const {
    for (const auto& item : root_.items())
      if (!allowed.count(item.key())) schema_error(field(item.key().c_str()), "unknown field");
  }

  static std::string field(const char* key) { return std::string("$.") + key; }

 private:
  static double as_number(const json& node, const std::string& path) {
    if (!node.is_number()) schema_error(path, "expected a number");
    return node.get<double>();
  }

  static Vector as_vector(const json& node, const std::string& path) {
    if (!node.is_array()) schema_error(path, "expected an array of numbers");
    Vector out;
    for (std::size_t i = 0; i < node.size(); ++i)
      out.push_back(as_number(node[i], path + "[" + std::to_string(i) + "]"));
    return out;
  }

  const json& root_;
};

void require_length(const Vector& v, std::size_t n, const char* key) {
  if (v.size() != n)
    schema_error(Reader::field(key), "expected " + std::to_string(n) + " entries, got " +
                                         std::to_string(v.size()));
}

Vector read_strikes(const Reader& r) {
  if (r.has("strikes") && r.has("strike"))
    schema_error("$.strike", "give either 'strike' or 'strikes', not both");
  if (r.has("strikes")) {
    Vector k = r.vector("strikes");
    if (k.empty()) schema_error("$.strikes", "expected at least one strike");
    return k;
  }
  if (r.has("strike")) return {r.number("strike")};
  schema_error("$.strikes", "missing required field");
}

PricingProblem read_multi_asset(const Reader& r, bool is_spread) {
  const Vector vols = r.vector("vols");
  const std::size_t n = vols.size();
  if (n == 0) schema_error("$.vols", "expected at least one volatility");
  const double rate = r.number_or("rate", 0.0);
  const double expiry = r.number("expiry");

  std::optional<Vector> forwards = r.optional_vector("forwards");
  Vector spots;
  Vector dividends(n, 0.0);
  if (forwards) {
    require_length(*forwards, n, "forwards");
    if (r.has("spots")) schema_error("$.spots", "give either 'spots' or 'forwards', not both");
    if (r.has("dividends")) schema_error("$.dividends", "dividends apply only with 'spots'");
    spots = *forwards;
  } else {
    if (!r.has("spots")) schema_error("$.spots", "missing required field (or give 'forwards')");
    spots = r.vector("spots");
    require_length(spots, n, "spots");
    if (r.has("dividends")) {
      dividends = r.vector("dividends");
      require_length(dividends, n, "dividends");
    }
  }
  const Matrix correlation = r.correlation(n);

  try {
    if (is_spread) {
      if (n != 2) schema_error("$.vols", "a spread needs exactly two assets");
      SpreadInputs in;
      in.spots = {spots[0], spots[1]};
      if (forwards) in.forwards = std::array<double, 2>{(*forwards)[0], (*forwards)[1]};
      in.vols = {vols[0], vols[1]};
      in.correlation = correlation(0, 1);
      if (std::abs(correlation(1, 0) - correlation(0, 1)) > 1e-12)
        schema_error("$.correlation", "matrix must be symmetric");
      in.dividends = {dividends[0], dividends[1]};
      in.rate = rate;
      in.expiry = expiry;
      if (r.has("weights")) {
        const Vector w = r.vector("weights");
        require_length(w, 2, "weights");
        in.weights = {w[0], w[1]};
      }
      in.strikes = read_strikes(r);
      return spread(in);
    }
    BasketInputs in;
    in.weights = r.vector("weights");
    require_length(in.weights, n, "weights");
    in.spots = spots;
    if (forwards) in.forwards = *forwards;
    in.vols = vols;
    in.correlation = correlation;
    in.dividends = dividends;
    in.rate = rate;
    in.expiry = expiry;
    in.strikes = read_strikes(r);
    return basket(in);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Schema) throw;
    schema_error("$", e.what());
  }
}

PricingProblem read_asian(const Reader& r, bool continuous) {
  const double spot = r.number("spot");
  const double vol = r.number("vol");
  const double rate = r.number_or("rate", 0.0);
  const double dividend = r.number_or("dividend", 0.0);
  Vector strikes = read_strikes(r);
  try {
    if (continuous)
      return asian_continuous(spot, vol, dividend, rate, r.number("expiry"), r.number("dt"),
                              std::move(strikes));
    const Vector times = r.vector("times");
    Vector weights;
    if (r.has("weights")) {
      weights = r.vector("weights");
      require_length(weights, times.size(), "weights");
    } else {
      weights.assign(times.size(), times.empty() ? 0.0 : 1.0 / static_cast<double>(times.size()));
      if (!weights.empty()) {
        double head = 0.0;
        for (std::size_t k = 0; k + 1 < weights.size(); ++k) head += weights[k];
        weights.back() = 1.0 - head;
      }
    }
    return asian_discrete(spot, vol, dividend, rate, times, weights, std::move(strikes));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Schema) throw;
    schema_error("$", e.what());
  }
}

}  // namespace

PricingProblem problem_from_json(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::Schema, std::string("$: invalid JSON: ") + e.what());
  }
  const Reader r(root);
  const std::string type = r.string("type");
  PricingProblem p;
  if (type == "spread" || type == "basket") {
    r.reject_unknown({"type", "weights", "spots", "forwards", "dividends", "rate", "vols",
                      "correlation", "expiry", "strikes", "strike", "epsilon"});
    p = read_multi_asset(r, type == "spread");
  } else if (type == "asian_discrete") {
    r.reject_unknown({"type", "spot", "vol", "rate", "dividend", "times", "weights", "strikes",
                      "strike", "epsilon"});
    p = read_asian(r, false);
  } else if (type == "asian_continuous") {
    r.reject_unknown({"type", "spot", "vol", "rate", "dividend", "expiry", "dt", "strikes",
                      "strike", "epsilon"});
    p = read_asian(r, true);
  } else {
    schema_error("$.type", "expected one of spread, basket, asian_discrete, asian_continuous");
  }
  if (r.has("epsilon")) {
    p.epsilon = r.number("epsilon");
    if (!(p.epsilon > 0.0 && p.epsilon <= 0.1)) schema_error("$.epsilon", "must lie in (0, 0.1]");
  }
  return p;
}

PricingProblem problem_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return problem_from_json(text.str());
}

}  // namespace mbq
