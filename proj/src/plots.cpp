#include "ddrobust/plots.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>

#include "ddrobust/error.hpp"
#include "ddrobust/trajectory_io.hpp"

namespace ddrobust {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 400.0;
constexpr double kMargin = 50.0;

// Maps data coordinates to the SVG canvas.
struct Frame {
  double x0, x1, y0, y1;

  double px(double x) const {
    return kMargin + (x - x0) / std::max(x1 - x0, 1e-300) * (kWidth - 2 * kMargin);
  }
  double py(double y) const {
    return kHeight - kMargin - (y - y0) / std::max(y1 - y0, 1e-300) * (kHeight - 2 * kMargin);
  }
};

Frame padded(double x0, double x1, double y0, double y1) {
  if (y1 <= y0) {
    y0 -= 1.0;
    y1 += 1.0;
  }
  const double pad = 0.05 * (y1 - y0);
  return {x0, std::max(x1, x0 + 1.0), y0 - pad, y1 + pad};
}

void open_svg(std::ostream& out, const Frame& f, const std::string& title,
              const std::string& xlabel, const std::string& ylabel) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\">" << title
      << "</text>\n";
  out << "<line x1=\"" << kMargin << "\" y1=\"" << kHeight - kMargin << "\" x2=\""
      << kWidth - kMargin << "\" y2=\"" << kHeight - kMargin << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << kMargin << "\" y1=\"" << kMargin << "\" x2=\"" << kMargin
      << "\" y2=\"" << kHeight - kMargin << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 12
      << "\" text-anchor=\"middle\">" << xlabel << "</text>\n";
  out << "<text x=\"14\" y=\"" << kHeight / 2 << "\" transform=\"rotate(-90 14 "
      << kHeight / 2 << ")\" text-anchor=\"middle\">" << ylabel << "</text>\n";
  for (double y : {f.y0, 0.5 * (f.y0 + f.y1), f.y1}) {
    out << "<text x=\"" << kMargin - 4 << "\" y=\"" << f.py(y) + 4
        << "\" text-anchor=\"end\">" << format_number(std::round(y * 1e4) / 1e4)
        << "</text>\n";
  }
  for (double x : {f.x0, f.x1}) {
    out << "<text x=\"" << f.px(x) << "\" y=\"" << kHeight - kMargin + 16
        << "\" text-anchor=\"middle\">" << format_number(x) << "</text>\n";
  }
}

std::ofstream open_file(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  return out;
}

void check_written(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw Error(ErrorKind::Io, "failed writing " + path.string());
}

}  // namespace

void write_outputs_csv(std::ostream& out, const std::vector<Vector>& outputs, Index p) {
  out << "realization,k";
  for (Index i = 1; i <= p; ++i) out << ",y_" << i;
  out << '\n';
  for (std::size_t s = 0; s < outputs.size(); ++s) {
    const Vector& y = outputs[s];
    for (Index k = 0; k < y.size() / p; ++k) {
      out << s << ',' << k;
      for (Index i = 0; i < p; ++i) out << ',' << format_number(y(k * p + i));
      out << '\n';
    }
  }
}

void write_costs_csv(std::ostream& out, const std::vector<double>& costs, double gamma_star) {
  out << "realization,cost,gamma_star\n";
  for (std::size_t s = 0; s < costs.size(); ++s) {
    out << s << ',' << format_number(costs[s]) << ',' << format_number(gamma_star) << '\n';
  }
}

void write_receding_horizon_csv(std::ostream& out, const RecedingHorizonLog& log) {
  const Index n = log.initial_state.size();
  const Index m = log.steps.empty() ? 0 : log.steps.front().input.size();
  const Index p = log.initial_output.rows();
  out << "step";
  for (Index i = 1; i <= n; ++i) out << ",x_" << i;
  for (Index i = 1; i <= m; ++i) out << ",u_" << i;
  for (Index i = 1; i <= p; ++i) out << ",y_" << i;
  out << ",gamma_star,alpha_star\n";
  for (const RecedingHorizonStep& s : log.steps) {
    out << s.step;
    for (Index i = 0; i < s.state.size(); ++i) out << ',' << format_number(s.state(i));
    for (Index i = 0; i < s.input.size(); ++i) out << ',' << format_number(s.input(i));
    for (Index i = 0; i < s.output.size(); ++i) out << ',' << format_number(s.output(i));
    out << ',' << format_number(s.gamma_star) << ',' << format_number(s.alpha_star) << '\n';
  }
}

void write_outputs_svg(std::ostream& out, const std::vector<Vector>& outputs, Index p) {
  double lo = 0.0;
  double hi = 0.0;
  Index steps = 1;
  for (const Vector& y : outputs) {
    if (y.size() == 0) continue;
    lo = std::min(lo, y.minCoeff());
    hi = std::max(hi, y.maxCoeff());
    steps = std::max(steps, y.size() / p);
  }
  const Frame f = padded(0.0, static_cast<double>(steps - 1), lo, hi);
  open_svg(out, f, "Output trajectories", "k", "y");
  for (const Vector& y : outputs) {
    for (Index i = 0; i < p; ++i) {
      out << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-opacity=\"0.4\" points=\"";
      for (Index k = 0; k < y.size() / p; ++k) {
        out << f.px(static_cast<double>(k)) << ',' << f.py(y(k * p + i)) << ' ';
      }
      out << "\"/>\n";
    }
  }
  out << "</svg>\n";
}

void write_costs_svg(std::ostream& out, const std::vector<double>& costs, double gamma_star) {
  double lo = std::isfinite(gamma_star) ? gamma_star : 0.0;
  double hi = lo;
  for (double c : costs) {
    lo = std::min(lo, c);
    hi = std::max(hi, c);
  }
  const double last = costs.empty() ? 1.0 : static_cast<double>(costs.size() - 1);
  const Frame f = padded(0.0, last, lo, hi);
  open_svg(out, f, "Realized costs", "realization", "cost");
  for (std::size_t s = 0; s < costs.size(); ++s) {
    out << "<circle cx=\"" << f.px(static_cast<double>(s)) << "\" cy=\"" << f.py(costs[s])
        << "\" r=\"2.5\" fill=\"steelblue\"/>\n";
  }
  if (std::isfinite(gamma_star)) {
    out << "<line x1=\"" << f.px(f.x0) << "\" y1=\"" << f.py(gamma_star) << "\" x2=\""
        << f.px(f.x1) << "\" y2=\"" << f.py(gamma_star)
        << "\" stroke=\"firebrick\" stroke-dasharray=\"6 4\"/>\n";
    out << "<text x=\"" << f.px(f.x1) - 4 << "\" y=\"" << f.py(gamma_star) - 6
        << "\" text-anchor=\"end\" fill=\"firebrick\">gamma*</text>\n";
  }
  out << "</svg>\n";
}

void emit_plots(const ExperimentReport& report, const std::filesystem::path& dir,
                const PlotOptions& options) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create " + dir.string() + ": " + ec.message());

  static const std::vector<Vector> no_outputs;
  static const std::vector<double> no_costs;
  const auto& outputs = report.validation ? report.validation->outputs : no_outputs;
  const auto& costs = report.validation ? report.validation->costs : no_costs;
  const Index p = report.config.system.outputs();
  const double gamma = report.synthesis.gamma_star;

  auto write = [&](const char* name, auto&& body) {
    const auto path = dir / name;
    auto out = open_file(path);
    body(out);
    check_written(out, path);
  };
  write("outputs.csv", [&](std::ostream& o) { write_outputs_csv(o, outputs, p); });
  write("costs.csv", [&](std::ostream& o) { write_costs_csv(o, costs, gamma); });
  if (options.svg) {
    write("outputs.svg", [&](std::ostream& o) { write_outputs_svg(o, outputs, p); });
    write("costs.svg", [&](std::ostream& o) { write_costs_svg(o, costs, gamma); });
  }
}

}  // namespace ddrobust
