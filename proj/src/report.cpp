#include "mbq/report.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace mbq {

namespace {

std::string fixed(double x, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, x);
  return buf;
}

}  // namespace

std::string factor_display(const FactorMatrix& v, const ForwardWeights& weights,
                           const std::vector<int>& sizes, int decimals) {
  const std::size_t n = v.assets();
  const std::size_t cols = v.factors();
  std::vector<std::vector<std::string>> cells;

  std::vector<std::string> header;
  header.push_back(fixed(dot(weights.g, v.v.column(0)), decimals));
  for (std::size_t j = 0; j < cols; ++j) header.push_back(fixed(norm(v.v.column(j)), decimals));
  header.push_back(fixed(frobenius_norm(v.v), decimals));
  cells.push_back(std::move(header));

  for (std::size_t k = 0; k < n; ++k) {
    std::vector<std::string> line;
    line.push_back(fixed(weights.g[k], decimals));
    for (std::size_t j = 0; j < cols; ++j) line.push_back(fixed(v.v(k, j), decimals));
    line.push_back(fixed(norm(v.v.row(k)), decimals));
    cells.push_back(std::move(line));
  }

  std::vector<std::string> footer{"", "."};
  std::size_t total = 1;
  for (std::size_t j = 1; j < cols; ++j) {
    const int m = j - 1 < sizes.size() ? sizes[j - 1] : 1;
    footer.push_back(std::to_string(m));
    total *= static_cast<std::size_t>(m);
  }
  footer.push_back(std::to_string(total));
  cells.push_back(std::move(footer));

  std::vector<std::size_t> width(cols + 2, 0);
  for (const auto& line : cells)
    for (std::size_t c = 0; c < line.size(); ++c) width[c] = std::max(width[c], line[c].size());

  auto render = [&](const std::vector<std::string>& line) {
    std::string s;
    for (std::size_t c = 0; c < line.size(); ++c) {
      if (c == 1 || c == cols + 1) s += " |";
      s += ' ';
      s += std::string(width[c] - line[c].size(), ' ') + line[c];
    }
    return s + '\n';
  };
  auto rule = [&] {
    std::string s;
    for (std::size_t c = 0; c < width.size(); ++c) {
      if (c == 1 || c == cols + 1) s += "-+";
      s += std::string(width[c] + 1, '-');
    }
    return s + '\n';
  };

  std::ostringstream out;
  out << render(cells.front()) << rule();
  for (std::size_t k = 1; k <= n; ++k) out << render(cells[k]);
  out << rule() << render(cells.back());
  return out.str();
}

std::string factor_display(const PricingPlan& plan, int decimals) {
  std::vector<int> sizes = plan.rule_sizes;
  for (std::size_t j = plan.grid.dims(); j < sizes.size(); ++j) sizes[j] = 1;
  return factor_display(plan.full, plan.weights, sizes, decimals);
}

}  // namespace mbq
