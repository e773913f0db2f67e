#pragma once

#include <filesystem>
#include <iosfwd>

#include "ddrobust/experiment.hpp"
#include "ddrobust/receding_horizon.hpp"

namespace ddrobust {

/// realization,k,y_1..y_p (one row per realization and time step)
void write_outputs_csv(std::ostream& out, const std::vector<Vector>& outputs, Index p);
/// realization,cost,gamma_star
void write_costs_csv(std::ostream& out, const std::vector<double>& costs, double gamma_star);
/// step,x_1..x_n,u_1..u_m,y_1..y_p,gamma_star,alpha_star
void write_receding_horizon_csv(std::ostream& out, const RecedingHorizonLog& log);

/// Line chart of every realization's outputs.
void write_outputs_svg(std::ostream& out, const std::vector<Vector>& outputs, Index p);
/// Realized costs against the certified bound.
void write_costs_svg(std::ostream& out, const std::vector<double>& costs, double gamma_star);

struct PlotOptions {
  bool svg = true;
};

/// Writes outputs.csv and costs.csv (header only when the report has no
/// validation), plus outputs.svg and costs.svg.
void emit_plots(const ExperimentReport& report, const std::filesystem::path& dir,
                const PlotOptions& options = {});

}  // namespace ddrobust
