// SPDX-License-Identifier: Apache-2.0
//
// Python bindings for the simulation core. The module mirrors the C++ API
// closely: configs and scenarios are plain objects, matrices cross the
// boundary as numpy arrays, and the experiment runner returns its text table
// as a string.
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "cfmimo/activity.hpp"
#include "cfmimo/allocation.hpp"
#include "cfmimo/channel.hpp"
#include "cfmimo/config.hpp"
#include "cfmimo/experiment.hpp"
#include "cfmimo/link.hpp"
#include "cfmimo/pilot.hpp"
#include "cfmimo/powerctl.hpp"
#include "cfmimo/rng.hpp"
#include "cfmimo/scenario.hpp"
#include "cfmimo/simplex.hpp"

namespace py = pybind11;
using namespace cfmimo;

PYBIND11_MODULE(_cfmimo, m) {
  m.doc() = "Uplink crowded cell-free massive MIMO-OFDM simulation core";

  py::class_<SystemConfig>(m, "SystemConfig")
      .def(py::init<>())
      .def_static("table_defaults", &SystemConfig::table_defaults)
      .def_static("desk_scale", &SystemConfig::desk_scale)
      .def_readwrite("num_subcarriers", &SystemConfig::num_subcarriers)
      .def_readwrite("cp_length", &SystemConfig::cp_length)
      .def_readwrite("pilot_symbols", &SystemConfig::pilot_symbols)
      .def_readwrite("slot_symbols", &SystemConfig::slot_symbols)
      .def_readwrite("frame_slots", &SystemConfig::frame_slots)
      .def_readwrite("antennas_per_ula", &SystemConfig::antennas_per_ula)
      .def_readwrite("num_aps", &SystemConfig::num_aps)
      .def_readwrite("num_ues", &SystemConfig::num_ues)
      .def_readwrite("num_clusters", &SystemConfig::num_clusters)
      .def_readwrite("apsp_set_size", &SystemConfig::apsp_set_size)
      .def_readwrite("ap_selection_threshold", &SystemConfig::ap_selection_threshold)
      .def_readwrite("overlap_threshold", &SystemConfig::overlap_threshold)
      .def_readwrite("activation_prob", &SystemConfig::activation_prob)
      .def_readwrite("bandwidth_hz", &SystemConfig::bandwidth_hz)
      .def_readwrite("carrier_freq_mhz", &SystemConfig::carrier_freq_mhz)
      .def_readwrite("sample_duration_s", &SystemConfig::sample_duration_s)
      .def_readwrite("ap_height_m", &SystemConfig::ap_height_m)
      .def_readwrite("ue_height_m", &SystemConfig::ue_height_m)
      .def_readwrite("breakpoint_d0_m", &SystemConfig::breakpoint_d0_m)
      .def_readwrite("breakpoint_d1_m", &SystemConfig::breakpoint_d1_m)
      .def_readwrite("shadow_sigma_db", &SystemConfig::shadow_sigma_db)
      .def_readwrite("tx_power_w", &SystemConfig::tx_power_w)
      .def_readwrite("noise_figure_db", &SystemConfig::noise_figure_db)
      .def_readwrite("angle_spread_rad", &SystemConfig::angle_spread_rad)
      .def_readwrite("delay_spread_s", &SystemConfig::delay_spread_s)
      .def_readwrite("num_taps", &SystemConfig::num_taps)
      .def_readwrite("random_aoa", &SystemConfig::random_aoa)
      .def_readwrite("area_side_m", &SystemConfig::area_side_m)
      .def_readwrite("dinkelbach_tol", &SystemConfig::dinkelbach_tol)
      .def_readwrite("power_control_subcarrier", &SystemConfig::power_control_subcarrier)
      .def_readwrite("mc_samples", &SystemConfig::mc_samples)
      .def_readwrite("rng_seed", &SystemConfig::rng_seed)
      .def("validate", &SystemConfig::validate)
      .def("effective_taps", &SystemConfig::effective_taps)
      .def("total_antennas", &SystemConfig::total_antennas)
      .def("shift_universe_size", &SystemConfig::shift_universe_size)
      .def("noise_power_w", &SystemConfig::noise_power_w)
      .def("normalized_snr", &SystemConfig::normalized_snr)
      .def("prelog_factor", &SystemConfig::prelog_factor);

  m.def("parse_config_file", &parse_config_file, py::arg("path"), py::arg("base"));

  py::class_<Rng>(m, "Rng")
      .def(py::init<uint64_t>())
      .def("derive", &Rng::derive)
      .def("uniform", py::overload_cast<>(&Rng::uniform))
      .def("uniform", py::overload_cast<double, double>(&Rng::uniform),
           py::arg("lo"), py::arg("hi"))
      .def("gaussian", &Rng::gaussian)
      .def("integer", &Rng::integer)
      .def("sample_without_replacement", &Rng::sample_without_replacement,
           py::arg("n"), py::arg("k"));

  py::class_<Scenario>(m, "Scenario")
      .def_readonly("ap_xy", &Scenario::ap_xy)
      .def_readonly("ue_xy", &Scenario::ue_xy)
      .def_readonly("beta", &Scenario::beta)
      .def_readonly("mean_aoa", &Scenario::mean_aoa)
      .def_readonly("serving", &Scenario::serving)
      .def_readonly("mask", &Scenario::mask)
      .def_readonly("rho_p", &Scenario::rho_p)
      .def_readonly("rho_u", &Scenario::rho_u)
      .def_readonly("seed", &Scenario::seed)
      .def("num_ues", &Scenario::num_ues)
      .def("num_aps", &Scenario::num_aps);

  m.def("path_loss_db", &path_loss_db, py::arg("distance_m"), py::arg("cfg"));
  m.def("path_loss_chi_db", &path_loss_chi_db, py::arg("cfg"));
  m.def("select_serving_aps", &select_serving_aps, py::arg("beta_row"),
        py::arg("lambda_share"));
  m.def("build_scenario", &build_scenario, py::arg("cfg"), py::arg("seed"));

  py::class_<TransformPair>(m, "TransformPair")
      .def_readonly("v", &TransformPair::v)
      .def_readonly("f", &TransformPair::f)
      .def_static("build", &TransformPair::build, py::arg("num_antennas"),
                  py::arg("num_subcarriers"), py::arg("cp_length"));

  py::class_<PowerSpectrum>(m, "PowerSpectrum")
      .def("num_ues", &PowerSpectrum::num_ues)
      .def("num_aps", &PowerSpectrum::num_aps)
      .def("num_antennas", &PowerSpectrum::num_antennas)
      .def("cp_length", &PowerSpectrum::cp_length)
      .def("spectrum", &PowerSpectrum::spectrum, py::return_value_policy::copy)
      .def("beta", &PowerSpectrum::beta)
      .def("mask", &PowerSpectrum::mask)
      .def("stacked", &PowerSpectrum::stacked)
      .def("stacked_beta", &PowerSpectrum::stacked_beta)
      .def("stacked_masked", &PowerSpectrum::stacked_masked)
      .def("stacked_masked_beta", &PowerSpectrum::stacked_masked_beta);

  m.def("build_power_spectrum", &build_power_spectrum, py::arg("scenario"),
        py::arg("cfg"));
  m.def("angle_grid", &angle_grid, py::arg("num_antennas"));
  m.def("sample_link", &sample_link, py::arg("variance"), py::arg("rng"));
  m.def("to_space_frequency", &to_space_frequency, py::arg("h"), py::arg("transforms"));
  m.def("from_space_frequency", &from_space_frequency, py::arg("g"),
        py::arg("transforms"));
  m.def("space_frequency_column", &space_frequency_column, py::arg("h"),
        py::arg("transforms"), py::arg("subcarrier"));
  m.def("covariance_from_spectrum", &covariance_from_spectrum,
        py::arg("stacked_spectrum"), py::arg("num_antennas"), py::arg("num_subcarriers"));

  py::class_<PilotPlan>(m, "PilotPlan")
      .def(py::init<>())
      .def_readwrite("num_subcarriers", &PilotPlan::num_subcarriers)
      .def_readwrite("pilot_symbols", &PilotPlan::pilot_symbols)
      .def_readwrite("sets", &PilotPlan::sets)
      .def("universe_size", &PilotPlan::universe_size)
      .def("validate", &PilotPlan::validate);

  m.def("shift_group", &shift_group, py::arg("shift"), py::arg("pilot_symbols"));
  m.def("delay_offset", &delay_offset, py::arg("shift"), py::arg("pilot_symbols"));
  m.def("build_pilot_matrix", &build_pilot_matrix, py::arg("shift"),
        py::arg("num_subcarriers"), py::arg("pilot_symbols"));
  m.def("shift_spectrum", &shift_spectrum, py::arg("spectrum"), py::arg("delay_shift"),
        py::arg("num_subcarriers"));
  m.def("mmse_gain", &mmse_gain, py::arg("ue"), py::arg("ap"), py::arg("spectra"),
        py::arg("shifts"), py::arg("active"), py::arg("num_subcarriers"),
        py::arg("rho_p"), py::arg("pilot_symbols"));
  m.def("mmse_error_spectrum", &mmse_error_spectrum, py::arg("ue"), py::arg("ap"),
        py::arg("spectra"), py::arg("shifts"), py::arg("active"),
        py::arg("num_subcarriers"), py::arg("rho_p"), py::arg("pilot_symbols"));

  m.def("overlap_coefficient", &overlap_coefficient, py::arg("a"), py::arg("b"));
  m.def("kmeans_cluster", &kmeans_cluster, py::arg("beta"), py::arg("num_clusters"),
        py::arg("rng"));

  py::class_<AllocationOutcome>(m, "AllocationOutcome")
      .def_readonly("plan", &AllocationOutcome::plan)
      .def_readonly("clusters", &AllocationOutcome::clusters)
      .def_readonly("expected_mse", &AllocationOutcome::expected_mse)
      .def_readonly("optimal", &AllocationOutcome::optimal);

  m.def("allocate_apsp", &allocate_apsp, py::arg("clusters"), py::arg("spectra"),
        py::arg("cfg"), py::arg("rng"));
  m.def("rpa_psop", &rpa_psop, py::arg("cfg"), py::arg("rng"));
  m.def("rpa_apsp", &rpa_apsp, py::arg("cfg"), py::arg("rng"));
  m.def("averaged_mse", &averaged_mse, py::arg("spectra"), py::arg("shifts"),
        py::arg("active"), py::arg("num_subcarriers"), py::arg("rho_p"),
        py::arg("pilot_symbols"));
  m.def(
      "expected_mse",
      [](const PilotPlan& plan, const PowerSpectrum& spectra, const SystemConfig& cfg,
         uint64_t seed) {
        double se = 0.0;
        double value = expected_mse(plan, spectra, cfg, seed, &se);
        return py::make_tuple(value, se);
      },
      py::arg("plan"), py::arg("spectra"), py::arg("cfg"), py::arg("seed"));
  m.def(
      "expected_mse_given_ka",
      [](const PilotPlan& plan, const PowerSpectrum& spectra, const SystemConfig& cfg,
         int num_active, uint64_t seed) {
        double se = 0.0;
        double value = expected_mse_given_ka(plan, spectra, cfg, num_active, seed, &se);
        return py::make_tuple(value, se);
      },
      py::arg("plan"), py::arg("spectra"), py::arg("cfg"), py::arg("num_active"),
      py::arg("seed"));
  m.def("mse_floor", &mse_floor, py::arg("spectra"), py::arg("num_subcarriers"),
        py::arg("rho_p"), py::arg("pilot_symbols"));
  m.def("mse_lower_bound", &mse_lower_bound, py::arg("spectra"), py::arg("cfg"));

  m.def("sample_activity", &sample_activity, py::arg("num_ues"),
        py::arg("activation_prob"), py::arg("rng"));

  py::class_<HoppingPatterns>(m, "HoppingPatterns")
      .def_readonly("shifts", &HoppingPatterns::shifts)
      .def("num_slots", &HoppingPatterns::num_slots);

  m.def("build_patterns", &build_patterns, py::arg("plan"), py::arg("frame_slots"),
        py::arg("rng"));

  py::class_<LinkStatistics>(m, "LinkStatistics")
      .def_readonly("active", &LinkStatistics::active)
      .def_readonly("subcarrier", &LinkStatistics::subcarrier)
      .def_readonly("trials", &LinkStatistics::trials)
      .def_readonly("rho_u", &LinkStatistics::rho_u)
      .def_readonly("coh", &LinkStatistics::coh)
      .def_readonly("cross", &LinkStatistics::cross)
      .def_readonly("cnorm", &LinkStatistics::cnorm)
      .def_readonly("coh_se", &LinkStatistics::coh_se)
      .def_readonly("cross_se", &LinkStatistics::cross_se)
      .def_readonly("cnorm_se", &LinkStatistics::cnorm_se)
      .def_readonly("zero_combiner_blocks", &LinkStatistics::zero_combiner_blocks)
      .def("num_active", &LinkStatistics::num_active);

  m.def("mrc_combiner", &mrc_combiner, py::arg("ghat"));
  m.def("estimate_link_statistics", &estimate_link_statistics, py::arg("scenario"),
        py::arg("spectra"), py::arg("plan"), py::arg("active"), py::arg("subcarrier"),
        py::arg("trials"), py::arg("seed"));
  m.def("sinr_lb", &sinr_lb, py::arg("eta"), py::arg("stats"));
  m.def("se_lb", &se_lb, py::arg("eta"), py::arg("stats"), py::arg("cfg"));
  m.def("se_genie", &se_genie, py::arg("eta"), py::arg("scenario"), py::arg("spectra"),
        py::arg("plan"), py::arg("active"), py::arg("subcarrier"), py::arg("trials"),
        py::arg("seed"), py::arg("cfg"));

  py::enum_<LpStatus>(m, "LpStatus")
      .value("OPTIMAL", LpStatus::kOptimal)
      .value("INFEASIBLE", LpStatus::kInfeasible)
      .value("UNBOUNDED", LpStatus::kUnbounded);

  py::class_<LpResult>(m, "LpResult")
      .def_readonly("status", &LpResult::status)
      .def_readonly("x", &LpResult::x)
      .def_readonly("objective", &LpResult::objective)
      .def_readonly("iterations", &LpResult::iterations);

  m.def("simplex_solve", &simplex_solve, py::arg("a"), py::arg("b"), py::arg("c"));

  py::class_<PowerSolution>(m, "PowerSolution")
      .def_readonly("eta", &PowerSolution::eta)
      .def_readonly("t_star", &PowerSolution::t_star)
      .def_readonly("w_star", &PowerSolution::w_star)
      .def_readonly("iterations", &PowerSolution::iterations)
      .def_readonly("converged", &PowerSolution::converged)
      .def_readonly("status", &PowerSolution::status)
      .def_readonly("trace", &PowerSolution::trace);

  m.def(
      "lp_solve",
      [](double t_min, const LinkStatistics& stats) {
        auto [eta, w] = lp_solve(t_min, stats);
        return py::make_tuple(eta, w);
      },
      py::arg("t_min"), py::arg("stats"));
  m.def("dinkelbach", &dinkelbach, py::arg("stats"), py::arg("epsilon"),
        py::arg("max_iters") = 200);
  m.def("bisection_oracle", &bisection_oracle, py::arg("stats"), py::arg("tol"));

  py::enum_<ExperimentKind>(m, "ExperimentKind")
      .value("MSE_VS_ACTIVE", ExperimentKind::kMseVsActive)
      .value("MSE_VS_SPREAD", ExperimentKind::kMseVsSpread)
      .value("MSE_CDF", ExperimentKind::kMseCdf)
      .value("SE_CDF", ExperimentKind::kSeCdf)
      .value("DETECT", ExperimentKind::kDetect)
      .value("POWER_CONTROL", ExperimentKind::kPowerControl);

  py::class_<ExperimentSpec>(m, "ExperimentSpec")
      .def(py::init<>())
      .def_readwrite("kind", &ExperimentSpec::kind)
      .def_readwrite("cfg", &ExperimentSpec::cfg)
      .def_readwrite("grid", &ExperimentSpec::grid)
      .def_readwrite("sweep_param", &ExperimentSpec::sweep_param)
      .def_readwrite("seeds", &ExperimentSpec::seeds)
      .def_readwrite("out_path", &ExperimentSpec::out_path)
      .def_readwrite("trials", &ExperimentSpec::trials)
      .def_readwrite("subcarrier", &ExperimentSpec::subcarrier)
      .def_readwrite("epsilon", &ExperimentSpec::epsilon)
      .def_readwrite("max_iters", &ExperimentSpec::max_iters)
      .def_readwrite("genie", &ExperimentSpec::genie)
      .def_readwrite("detect_percentile", &ExperimentSpec::detect_percentile)
      .def("validate", &ExperimentSpec::validate);

  m.def(
      "run_experiment",
      [](const ExperimentSpec& spec) {
        std::ostringstream out;
        run_experiment(spec, out);
        return out.str();
      },
      py::arg("spec"), "Run the experiment and return the result table as text.");
}
