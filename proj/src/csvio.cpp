#include "depsvm/csvio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace depsvm {

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string sweep_csv(const ExperimentResult& result) {
  if (result.rows.empty()) throw std::invalid_argument("sweep_csv: empty result");
  std::string out =
      "n,lambda,seed,train_risk,risk_est,risk_ci,future_risk,bayes_risk,"
      "excess_risk,f_norm,norm_bound,solver_residual,iterations\n";
  for (const SweepRow& r : result.rows) {
    out += std::to_string(r.n);
    out += ',';
    out += format_g17(r.lambda);
    out += ',';
    out += std::to_string(r.seed);
    out += ',';
    out += format_g17(r.train_risk);
    out += ',';
    out += format_g17(r.risk_est);
    out += ',';
    out += format_g17(r.risk_ci);
    out += ',';
    out += format_g17(r.future_risk);
    out += ',';
    out += format_g17(r.bayes_risk);
    out += ',';
    out += format_g17(r.excess_risk);
    out += ',';
    out += format_g17(r.f_norm);
    out += ',';
    out += format_g17(r.norm_bound);
    out += ',';
    out += format_g17(r.solver_residual);
    out += ',';
    out += std::to_string(r.iterations);
    out += '\n';
  }
  return out;
}

std::string stability_csv(const StabilityResult& result) {
  if (result.rows.empty()) throw std::invalid_argument("stability_csv: empty result");
  std::string out = "n,seed,lambda,lhs,rhs,h_sup,h_sup_bound,holds\n";
  for (const StabilityRow& r : result.rows) {
    out += std::to_string(r.n);
    out += ',';
    out += std::to_string(r.seed);
    out += ',';
    out += format_g17(r.lambda);
    out += ',';
    out += format_g17(r.lhs);
    out += ',';
    out += format_g17(r.rhs);
    out += ',';
    out += format_g17(r.h_sup);
    out += ',';
    out += format_g17(r.h_sup_bound);
    out += ',';
    out += r.holds ? "1" : "0";
    out += '\n';
  }
  return out;
}

std::string lln_csv(const std::vector<LlnFunctionTable>& tables) {
  if (tables.empty()) throw std::invalid_argument("lln_csv: empty result");
  std::string out = "function,n,seed,deviation,expectation\n";
  for (const LlnFunctionTable& ft : tables) {
    for (const LlnRow& r : ft.table.rows) {
      out += ft.label;
      out += ',';
      out += std::to_string(r.n);
      out += ',';
      out += std::to_string(r.seed);
      out += ',';
      out += format_g17(r.deviation);
      out += ',';
      out += format_g17(ft.table.expectation);
      out += '\n';
    }
  }
  return out;
}

std::string mixing_csv(const std::vector<MixingReport>& reports) {
  if (reports.empty()) throw std::invalid_argument("mixing_csv: empty result");
  std::string out = "lag,alpha,beta,phi_row,phi_col,phi_sym,r2,rio_bound_p2\n";
  for (const MixingReport& r : reports) {
    out += std::to_string(r.lag);
    out += ',';
    out += format_g17(r.alpha);
    out += ',';
    out += format_g17(r.beta);
    out += ',';
    out += format_g17(r.phi_row);
    out += ',';
    out += format_g17(r.phi_col);
    out += ',';
    out += format_g17(r.phi_sym);
    out += ',';
    out += format_g17(r.r2);
    out += ',';
    out += format_g17(r.rio_bound_p2);
    out += '\n';
  }
  return out;
}

std::string path_csv(const TrainingSet& t) {
  if (t.n() == 0) throw std::invalid_argument("path_csv: empty path");
  std::string out = "i";
  for (Eigen::Index j = 0; j < t.xs.cols(); ++j) out += ",x" + std::to_string(j);
  out += ",y\n";
  for (int i = 0; i < t.n(); ++i) {
    out += std::to_string(i + 1);
    for (Eigen::Index j = 0; j < t.xs.cols(); ++j) {
      out += ',';
      out += format_g17(t.xs(i, j));
    }
    out += ',';
    out += format_g17(t.ys(i));
    out += '\n';
  }
  return out;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

std::string sweep_svg(const ExperimentResult& result) {
  if (result.rows.empty()) throw std::invalid_argument("sweep_svg: empty result");
  // log-log axes; non-positive excess values are clamped for display only
  constexpr double kFloor = 1e-6;
  constexpr int w = 640, h = 440, ml = 70, mr = 20, mt = 20, mb = 50;

  double xmin = 1e300, xmax = 0, ymin = 1e300, ymax = 0;
  for (const SweepRow& r : result.rows) {
    const double ex = std::max(r.excess_risk, kFloor);
    xmin = std::min(xmin, static_cast<double>(r.n));
    xmax = std::max(xmax, static_cast<double>(r.n));
    ymin = std::min(ymin, ex);
    ymax = std::max(ymax, ex);
  }
  ymin = std::max(ymin / 2.0, kFloor);
  ymax = ymax * 2.0;
  if (xmin == xmax) xmax = xmin * 2.0;

  auto px = [&](double n) {
    return ml + (std::log(n) - std::log(xmin)) / (std::log(xmax) - std::log(xmin)) *
                    (w - ml - mr);
  };
  auto py = [&](double v) {
    return h - mb - (std::log(v) - std::log(ymin)) / (std::log(ymax) - std::log(ymin)) *
                        (h - mt - mb);
  };

  std::string svg =
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(w) +
      "\" height=\"" + std::to_string(h) + "\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(w) + "\" height=\"" +
         std::to_string(h) + "\" fill=\"white\"/>\n";
  svg += "<line x1=\"" + num(ml) + "\" y1=\"" + num(h - mb) + "\" x2=\"" + num(w - mr) +
         "\" y2=\"" + num(h - mb) + "\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + num(ml) + "\" y1=\"" + num(mt) + "\" x2=\"" + num(ml) +
         "\" y2=\"" + num(h - mb) + "\" stroke=\"black\"/>\n";

  // per-seed scatter
  for (const SweepRow& r : result.rows) {
    const double ex = std::max(r.excess_risk, kFloor);
    svg += "<circle cx=\"" + num(px(r.n)) + "\" cy=\"" + num(py(ex)) +
           "\" r=\"2.5\" fill=\"steelblue\" fill-opacity=\"0.45\"/>\n";
  }

  // median line
  std::string pline;
  for (const auto& [n, med] : result.median_excess) {
    const double ex = std::max(med, kFloor);
    pline += num(px(n)) + "," + num(py(ex)) + " ";
  }
  svg += "<polyline points=\"" + pline +
         "\" fill=\"none\" stroke=\"crimson\" stroke-width=\"2\"/>\n";

  // tick labels at the grid n values and decades on the y axis
  for (const auto& [n, med] : result.median_excess) {
    (void)med;
    svg += "<text x=\"" + num(px(n)) + "\" y=\"" + num(h - mb + 18) +
           "\" font-size=\"11\" text-anchor=\"middle\">" + std::to_string(n) + "</text>\n";
  }
  for (double dec = std::pow(10.0, std::ceil(std::log10(ymin))); dec <= ymax; dec *= 10.0) {
    svg += "<text x=\"" + num(ml - 6) + "\" y=\"" + num(py(dec) + 4) +
           "\" font-size=\"11\" text-anchor=\"end\">" + num(dec) + "</text>\n";
  }
  svg += "<text x=\"" + num((ml + w - mr) / 2.0) + "\" y=\"" + num(h - 12) +
         "\" font-size=\"12\" text-anchor=\"middle\">n</text>\n";
  svg += "<text x=\"16\" y=\"" + num((mt + h - mb) / 2.0) +
         "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
         num((mt + h - mb) / 2.0) + ")\">median excess risk</text>\n";
  svg += "</svg>\n";
  return svg;
}

}  // namespace depsvm
