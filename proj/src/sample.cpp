#include "pli/sample.hpp"

#include <sstream>

#include "pli/error.hpp"

namespace pli {

Sample::Sample(std::vector<double> inputs_row_major, std::size_t dim, std::vector<double> outputs)
    : inputs_(std::move(inputs_row_major)), dim_(dim), outputs_(std::move(outputs)) {
  if (dim_ == 0 || outputs_.empty() || inputs_.size() != dim_ * outputs_.size()) {
    throw Error(ErrorCode::dimension_mismatch,
                "sample needs N >= 1 rows, d >= 1 columns and N*d input values");
  }
}

std::vector<double> Sample::column(std::size_t i) const {
  std::vector<double> out(size());
  for (std::size_t n = 0; n < size(); ++n) out[n] = input(n, i);
  return out;
}

Sample Sample::subset(std::span<const std::size_t> rows) const {
  std::vector<double> in;
  std::vector<double> out;
  in.reserve(rows.size() * dim_);
  out.reserve(rows.size());
  for (std::size_t n : rows) {
    const auto r = row(n);
    in.insert(in.end(), r.begin(), r.end());
    out.push_back(outputs_[n]);
  }
  return Sample(std::move(in), dim_, std::move(out));
}

Sample Sample::without_row(std::size_t n) const {
  std::vector<double> in(inputs_);
  std::vector<double> out(outputs_);
  in.erase(in.begin() + static_cast<std::ptrdiff_t>(n * dim_),
           in.begin() + static_cast<std::ptrdiff_t>((n + 1) * dim_));
  out.erase(out.begin() + static_cast<std::ptrdiff_t>(n));
  return Sample(std::move(in), dim_, std::move(out));
}

Sample Sample::scaled_outputs(double c) const {
  std::vector<double> out(outputs_);
  for (auto& y : out) y *= c;
  return Sample(inputs_, dim_, std::move(out));
}

void validate_support(const Sample& s, std::span<const Marginal> marginals) {
  if (marginals.size() != s.dim()) {
    throw Error(ErrorCode::dimension_mismatch,
                "sample has " + std::to_string(s.dim()) + " input columns but " +
                    std::to_string(marginals.size()) + " marginals are declared");
  }
  for (std::size_t n = 0; n < s.size(); ++n) {
    for (std::size_t i = 0; i < s.dim(); ++i) {
      const double x = s.input(n, i);
      if (!marginals[i].in_support(x)) {
        std::ostringstream os;
        os.precision(17);
        os << "row " << n + 1 << ", column " << i + 1 << ": value " << x << " outside support of "
           << marginals[i].describe();
        throw Error(ErrorCode::out_of_support, os.str());
      }
    }
  }
}

}  // namespace pli
