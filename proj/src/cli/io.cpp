#include "pli/cli/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "pli/error.hpp"

namespace pli::cli {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_value(std::string_view field, std::size_t line, std::size_t column) {
  double v = 0.0;
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(v)) {
    throw Error(ErrorCode::parse_error, "line " + std::to_string(line) + ", column " +
                                           std::to_string(column) + ": cannot parse \"" +
                                           std::string(field) + "\" as a finite number");
  }
  return v;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io_error, "cannot write " + path.string());
  out << content;
  if (!out) throw Error(ErrorCode::io_error, "write failed for " + path.string());
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

Sample ingest_sample(const std::filesystem::path& path, const StudyConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot read sample " + path.string());

  const std::size_t d = cfg.inputs.size();
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  std::vector<double> inputs;
  std::vector<double> outputs;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (trim(line).empty()) continue;
    const auto fields = split(line);
    if (!have_header) {
      if (fields.size() != d + 1) {
        throw Error(ErrorCode::dimension_mismatch,
                    path.string() + ": header has " + std::to_string(fields.size()) +
                        " columns, config declares " + std::to_string(d) +
                        " inputs plus one output");
      }
      have_header = true;
      continue;
    }
    if (fields.size() != d + 1) {
      throw Error(ErrorCode::parse_error, path.string() + ": line " + std::to_string(line_no) +
                                              " has " + std::to_string(fields.size()) +
                                              " fields, expected " + std::to_string(d + 1));
    }
    for (std::size_t c = 0; c < d; ++c) inputs.push_back(parse_value(fields[c], line_no, c + 1));
    outputs.push_back(parse_value(fields[d], line_no, d + 1));
  }
  if (!have_header) throw Error(ErrorCode::parse_error, path.string() + ": empty file");
  if (outputs.empty()) throw Error(ErrorCode::parse_error, path.string() + ": no data rows");

  Sample s(std::move(inputs), d, std::move(outputs));
  std::vector<Marginal> marginals;
  for (const auto& m : cfg.inputs) marginals.push_back(m.marginal);
  try {
    validate_support(s, marginals);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": data " + e.what());
  }
  return s;
}

std::string format_results(const std::vector<PliCurve>& curves) {
  std::string out = kResultHeader;
  out += '\n';
  for (const auto& curve : curves) {
    for (const auto& p : curve.points) {
      out += csv_field(curve.input_name);
      out += ',' + format_number(p.delta);
      out += ',' + format_number(p.index_value);
      out += ',' + format_number(p.ci_low);
      out += ',' + format_number(p.ci_high);
      out += ',' + format_number(p.nominal);
      out += ',' + format_number(p.perturbed);
      out += ',' + format_number(p.diagnostics.ess);
      out += ',';
      out += p.status ? std::string(to_string(*p.status)) : std::string("ok");
      out += '\n';
    }
  }
  return out;
}

std::string render_svg(const std::vector<PliCurve>& curves) {
  constexpr double kPanelW = 320.0;
  constexpr double kPanelH = 230.0;
  constexpr double kMargin = 42.0;
  const std::size_t cols = std::min<std::size_t>(3, std::max<std::size_t>(curves.size(), 1));
  const std::size_t rows = (curves.size() + cols - 1) / cols;

  std::ostringstream svg;
  svg.precision(6);
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << cols * kPanelW << "\" height=\""
      << std::max<std::size_t>(rows, 1) * kPanelH << "\" font-family=\"sans-serif\" font-size=\"11\">\n";

  for (std::size_t c = 0; c < curves.size(); ++c) {
    const PliCurve& curve = curves[c];
    const double ox = static_cast<double>(c % cols) * kPanelW;
    const double oy = static_cast<double>(c / cols) * kPanelH;

    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = 0.0, ymax = 0.0;
    for (const auto& p : curve.points) {
      xmin = std::min(xmin, p.delta);
      xmax = std::max(xmax, p.delta);
      for (double v : {p.index_value, p.ci_low, p.ci_high}) {
        if (std::isfinite(v)) {
          ymin = std::min(ymin, v);
          ymax = std::max(ymax, v);
        }
      }
    }
    if (!(xmax > xmin)) xmax = xmin + 1.0;
    if (!(ymax > ymin)) ymax = ymin + 1.0;
    const double pad = 0.05 * (ymax - ymin);
    ymin -= pad;
    ymax += pad;

    const double left = ox + kMargin, right = ox + kPanelW - 12.0;
    const double top = oy + 24.0, bottom = oy + kPanelH - 30.0;
    auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * (right - left); };
    auto py = [&](double y) { return bottom - (y - ymin) / (ymax - ymin) * (bottom - top); };

    svg << "<g>\n<text x=\"" << (left + right) / 2 << "\" y=\"" << oy + 16
        << "\" text-anchor=\"middle\">" << xml_escape(curve.input_name) << "</text>\n";
    svg << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << right - left
        << "\" height=\"" << bottom - top << "\" fill=\"none\" stroke=\"#444\"/>\n";
    svg << "<line x1=\"" << left << "\" y1=\"" << py(0.0) << "\" x2=\"" << right << "\" y2=\""
        << py(0.0) << "\" stroke=\"#bbb\"/>\n";
    svg << "<text x=\"" << left << "\" y=\"" << bottom + 14 << "\">" << xmin << "</text>\n";
    svg << "<text x=\"" << right << "\" y=\"" << bottom + 14 << "\" text-anchor=\"end\">" << xmax
        << "</text>\n";
    svg << "<text x=\"" << left - 4 << "\" y=\"" << top + 8 << "\" text-anchor=\"end\">" << ymax
        << "</text>\n";
    svg << "<text x=\"" << left - 4 << "\" y=\"" << bottom << "\" text-anchor=\"end\">" << ymin
        << "</text>\n";

    auto polyline = [&](auto value, const char* style) {
      std::string pts;
      auto flush = [&] {
        if (!pts.empty()) svg << "<polyline fill=\"none\" " << style << " points=\"" << pts << "\"/>\n";
        pts.clear();
      };
      for (const auto& p : curve.points) {
        const double v = value(p);
        if (!std::isfinite(v)) {
          flush();
          continue;
        }
        std::ostringstream xy;
        xy.precision(6);
        xy << px(p.delta) << ',' << py(v) << ' ';
        pts += xy.str();
      }
      flush();
    };
    polyline([](const PliPoint& p) { return p.index_value; }, "stroke=\"#1f4e9c\" stroke-width=\"1.6\"");
    polyline([](const PliPoint& p) { return p.ci_low; },
             "stroke=\"#1f4e9c\" stroke-dasharray=\"4 3\"");
    polyline([](const PliPoint& p) { return p.ci_high; },
             "stroke=\"#1f4e9c\" stroke-dasharray=\"4 3\"");
    svg << "</g>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

void emit_results(const std::vector<PliCurve>& curves, const std::filesystem::path& out_dir,
                  const EmitOptions& options) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::io_error, "cannot create " + out_dir.string() + ": " + ec.message());
  write_file(out_dir / "results.csv", format_results(curves));
  write_file(out_dir / "manifest.json", options.manifest.dump(2) + "\n");
  if (options.svg) write_file(out_dir / "pli.svg", render_svg(curves));
}

}  // namespace pli::cli
