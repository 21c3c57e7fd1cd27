#ifndef USCO_IO_HPP
#define USCO_IO_HPP

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "usco/coupling.hpp"
#include "usco/fitting.hpp"
#include "usco/params.hpp"
#include "usco/polaritons.hpp"
#include "usco/response.hpp"
#include "usco/simulate.hpp"
#include "usco/stability.hpp"

namespace usco {

// File conventions: frequencies in Hz, lengths in meters, CSV numbers in
// fixed scientific notation with 12 significant digits.

// SpectrumGrid: header freq_hz,psd,weight; the weight cell is empty when
// the grid carries no weights.
void write_spectrum_csv(std::ostream& os, const SpectrumGrid& grid);
SpectrumGrid read_spectrum_csv(std::istream& is);

// BranchScan: detuning_hz,upper_re_hz,upper_im_hz,lower_re_hz,lower_im_hz,continuous
// (continuous is the per-point jump check, 0 or 1).
void write_branch_scan_csv(std::ostream& os, const BranchScan& scan);

// StabilityMap grid in long form: detuning_hz,g_hz,stable.
void write_stability_grid_csv(std::ostream& os, const StabilityMap& map);
// Boundary polyline: detuning_hz,g_crit_hz.
void write_stability_boundary_csv(std::ostream& os, const StabilityMap& map);

// Displacement curve: z0_m,g_hz,g_over_omega.
void write_displacement_csv(std::ostream& os, const DisplacementCurve& curve,
                            double omega_x);

// TimeTrace CSV: t_s followed by one column per channel.
void write_trace_csv(std::ostream& os, const TimeTrace& trace);

// TimeTrace binary: little-endian header (magic "USCOTRC1", version,
// channel count, sample count, dt, seed, generator id, channel names)
// followed by frame-interleaved float64 samples.
void write_trace(std::ostream& os, const TimeTrace& trace);
TimeTrace read_trace(std::istream& is);

// JSON codecs. Frequencies in Hz on the wire.
nlohmann::json to_json(const ModelParams& p);
ModelParams model_params_from_json(const nlohmann::json& j,
                                   const std::string& path_prefix);

nlohmann::json to_json(const PhysicalSetup& s);
PhysicalSetup physical_setup_from_json(const nlohmann::json& j,
                                       const std::string& path_prefix);

nlohmann::json to_json(const SpectrumGrid& grid);
SpectrumGrid spectrum_from_json(const nlohmann::json& j,
                                const std::string& path_prefix);

nlohmann::json to_json(const CouplingBreakdown& breakdown);
nlohmann::json to_json(const FitResult& result);

// Per-spectrum weighted residual cost: spectrum,residual.
void write_fit_residuals_csv(std::ostream& os, const FitResult& result);

}  // namespace usco

#endif
