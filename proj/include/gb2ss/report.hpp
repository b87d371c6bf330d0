#ifndef GB2SS_REPORT_HPP_
#define GB2SS_REPORT_HPP_

#include <optional>
#include <string>
#include <vector>

#include "gb2ss/counterfactual.hpp"
#include "gb2ss/io.hpp"

namespace gb2ss::report {

// "gb2-params" | "coefficients" | "mu" | "gini"; DataError otherwise.
Quantity parse_selector(const std::string& name);
std::string selector_name(Quantity q);

// Gini: period,mean,q2.5,q97.5,n_excluded. Other selectors add a
// `component` column after `period`.
std::string summary_csv(const PosteriorSummary& summary);
// period,mean,q2.5,q97.5,n_excluded
std::string interval_csv(const std::vector<std::string>& periods,
                         const std::vector<IntervalSummary>& rows);

struct DensityGrid {
  std::vector<double> income;               // ascending grid points
  std::vector<std::vector<double>> density;  // [period][grid point]
};

// Posterior mean of the GB2 pdf on a grid over (0, upper], averaged over
// stored draws. The default upper end is the largest 99.5% quantile of the
// per-period posterior-mean parameters.
DensityGrid density_grid(const Chain& chain, int points,
                         std::optional<double> upper, unsigned threads = 1);
// period,income,density; one row per grid point and period.
std::string density_csv(const std::vector<std::string>& periods,
                        const DensityGrid& grid);

// One comparative-statics line: vary one parameter, hold the rest at base.
struct SweepLine {
  char parameter = 'a';  // a, b, p or q
  std::vector<double> values;
  Gb2Params base{3.0, 3.0, 3.0, 3.0};
};

struct SweepSpec {
  std::vector<SweepLine> lines;
  double x_max = 10.0;  // pdf curve grid (0, x_max]
  int x_points = 200;
};

// a, p, q over {2,...,5} and b over {1,...,5}, others at 3.
SweepSpec default_sweep();
SweepSpec sweep_from_json(const io::Json& j);

struct SweepRow {
  char parameter;
  Gb2Params theta;
  std::optional<double> gini;  // nullopt when a*q <= 1
};

std::vector<SweepRow> run_sweep(const SweepSpec& spec);
// parameter,a,b,p,q,gini,valid
std::string sweep_csv(const std::vector<SweepRow>& rows);
// parameter,value,x,pdf
std::string sweep_pdf_csv(const SweepSpec& spec, const std::vector<SweepRow>& rows);

}  // namespace gb2ss::report

#endif  // GB2SS_REPORT_HPP_
