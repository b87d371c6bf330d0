#include "gb2ss/report.hpp"

#include <algorithm>

#include "gb2ss/errors.hpp"
#include "gb2ss/parallel.hpp"

namespace gb2ss::report {
namespace {

using io::format_double;

std::string interval_cells(const IntervalSummary& s) {
  return format_double(s.mean) + "," + format_double(s.lower) + "," +
         format_double(s.upper) + "," + std::to_string(s.excluded);
}

double component(const Gb2Params& t, char c) {
  switch (c) {
    case 'a': return t.a();
    case 'b': return t.b();
    case 'p': return t.p();
    default: return t.q();
  }
}

Gb2Params with_component(const Gb2Params& t, char c, double v) {
  return Gb2Params(c == 'a' ? v : t.a(), c == 'b' ? v : t.b(),
                   c == 'p' ? v : t.p(), c == 'q' ? v : t.q());
}

}  // namespace

Quantity parse_selector(const std::string& name) {
  if (name == "gb2-params") return Quantity::Gb2Params;
  if (name == "coefficients") return Quantity::Coefficients;
  if (name == "mu") return Quantity::Mu;
  if (name == "gini") return Quantity::Gini;
  throw DataError("unknown selector '" + name +
                  "' (expected gb2-params, coefficients, mu or gini)");
}

std::string selector_name(Quantity q) {
  switch (q) {
    case Quantity::Gb2Params: return "gb2-params";
    case Quantity::Coefficients: return "coefficients";
    case Quantity::Mu: return "mu";
    case Quantity::Gini: return "gini";
  }
  return "gini";
}

std::string summary_csv(const PosteriorSummary& summary) {
  const bool gini = summary.quantity == Quantity::Gini;
  std::string out = gini ? "period,mean,q2.5,q97.5,n_excluded\n"
                         : "period,component,mean,q2.5,q97.5,n_excluded\n";
  for (const SummaryRow& row : summary.rows) {
    out += row.period + ",";
    if (!gini) out += row.component + ",";
    out += interval_cells(row.stats) + "\n";
  }
  return out;
}

std::string interval_csv(const std::vector<std::string>& periods,
                         const std::vector<IntervalSummary>& rows) {
  std::string out = "period,mean,q2.5,q97.5,n_excluded\n";
  for (std::size_t t = 0; t < rows.size(); ++t) {
    out += periods[t] + "," + interval_cells(rows[t]) + "\n";
  }
  return out;
}

DensityGrid density_grid(const Chain& chain, int points,
                         std::optional<double> upper, unsigned threads) {
  if (chain.draws.empty()) throw DataError("density_grid: chain has no draws");
  if (points < 2) throw DataError("density_grid: need at least 2 points");
  const std::size_t T = chain.periods();
  const std::size_t M = chain.draws.size();
  if (!upper) {
    double hi = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
      Vec4 theta = Vec4::Zero();
      for (const ChainDraw& d : chain.draws) theta += d.H[t].h.array().exp().matrix();
      theta /= static_cast<double>(M);
      hi = std::max(hi, quantile(Gb2Params(theta[0], theta[1], theta[2], theta[3]),
                                 0.995));
    }
    upper = hi;
  }
  DensityGrid grid;
  for (int g = 1; g <= points; ++g) {
    grid.income.push_back(*upper * static_cast<double>(g) / points);
  }
  grid.density.assign(T, std::vector<double>(grid.income.size(), 0.0));
  parallel_for(T, threads, [&](std::size_t t) {
    std::vector<double>& row = grid.density[t];
    for (const ChainDraw& d : chain.draws) {
      const auto theta = d.H[t].theta();
      if (!theta) continue;
      for (std::size_t g = 0; g < row.size(); ++g) row[g] += pdf(*theta, grid.income[g]);
    }
    for (double& v : row) v /= static_cast<double>(M);
  });
  return grid;
}

std::string density_csv(const std::vector<std::string>& periods,
                        const DensityGrid& grid) {
  std::string out = "period,income,density\n";
  for (std::size_t t = 0; t < grid.density.size(); ++t) {
    for (std::size_t g = 0; g < grid.income.size(); ++g) {
      out += periods[t] + "," + format_double(grid.income[g]) + "," +
             format_double(grid.density[t][g]) + "\n";
    }
  }
  return out;
}

SweepSpec default_sweep() {
  SweepSpec spec;
  for (char c : {'a', 'b', 'p', 'q'}) {
    SweepLine line;
    line.parameter = c;
    line.values = c == 'b' ? std::vector<double>{1, 2, 3, 4, 5}
                           : std::vector<double>{2, 3, 4, 5};
    spec.lines.push_back(line);
  }
  return spec;
}

SweepSpec sweep_from_json(const io::Json& j) {
  SweepSpec spec;
  if (!j.is_object()) throw DataError("sweep: expected an object");
  for (const auto& [key, _] : j.items()) {
    if (key != "sweeps" && key != "x_max" && key != "x_points") {
      throw DataError("field '" + key + "': unknown key");
    }
  }
  if (!j.contains("sweeps") || !j["sweeps"].is_array() || j["sweeps"].empty()) {
    throw DataError("field 'sweeps': expected a non-empty array");
  }
  if (j.contains("x_max")) {
    if (!j["x_max"].is_number() || !(j["x_max"].get<double>() > 0.0)) {
      throw DataError("field 'x_max': expected a positive number");
    }
    spec.x_max = j["x_max"].get<double>();
  }
  if (j.contains("x_points")) {
    if (!j["x_points"].is_number_integer() || j["x_points"].get<int>() < 2) {
      throw DataError("field 'x_points': expected an integer >= 2");
    }
    spec.x_points = j["x_points"].get<int>();
  }
  for (std::size_t i = 0; i < j["sweeps"].size(); ++i) {
    const io::Json& s = j["sweeps"][i];
    const std::string where = "sweeps[" + std::to_string(i) + "]";
    if (!s.is_object()) throw DataError("field '" + where + "': expected an object");
    SweepLine line;
    for (const auto& [key, _] : s.items()) {
      if (key != "vary" && key != "values" && key != "base") {
        throw DataError("field '" + where + "." + key + "': unknown key");
      }
    }
    const std::string vary = s.value("vary", std::string{});
    if (vary.size() != 1 || std::string("abpq").find(vary[0]) == std::string::npos) {
      throw DataError("field '" + where + ".vary': expected one of a, b, p, q");
    }
    line.parameter = vary[0];
    if (!s.contains("values") || !s["values"].is_array() || s["values"].empty()) {
      throw DataError("field '" + where + ".values': expected a non-empty array");
    }
    for (const auto& v : s["values"]) {
      if (!v.is_number()) {
        throw DataError("field '" + where + ".values': expected numbers");
      }
      line.values.push_back(v.get<double>());
    }
    try {
      if (s.contains("base")) {
        const auto b = s["base"].get<std::vector<double>>();
        if (b.size() != 4) throw DataError("expected [a, b, p, q]");
        line.base = Gb2Params(b[0], b[1], b[2], b[3]);
      }
      for (double v : line.values) with_component(line.base, line.parameter, v);
    } catch (const std::exception& e) {
      throw DataError("field '" + where + "': " + e.what());
    }
    spec.lines.push_back(std::move(line));
  }
  return spec;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
  std::vector<SweepRow> rows;
  for (const SweepLine& line : spec.lines) {
    for (double v : line.values) {
      const Gb2Params theta = with_component(line.base, line.parameter, v);
      rows.push_back({line.parameter, theta, try_gini(theta)});
    }
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "parameter,a,b,p,q,gini,valid\n";
  for (const SweepRow& r : rows) {
    out += std::string(1, r.parameter);
    for (double v : r.theta.as_array()) out += "," + format_double(v);
    out += "," + (r.gini ? format_double(*r.gini) : std::string("nan"));
    out += r.gini ? ",1\n" : ",0\n";
  }
  return out;
}

std::string sweep_pdf_csv(const SweepSpec& spec, const std::vector<SweepRow>& rows) {
  std::string out = "parameter,value,x,pdf\n";
  for (const SweepRow& r : rows) {
    const std::string prefix = std::string(1, r.parameter) + "," +
                               format_double(component(r.theta, r.parameter)) + ",";
    for (int g = 1; g <= spec.x_points; ++g) {
      const double x = spec.x_max * static_cast<double>(g) / spec.x_points;
      out += prefix + format_double(x) + "," + format_double(pdf(r.theta, x)) + "\n";
    }
  }
  return out;
}

}  // namespace gb2ss::report
