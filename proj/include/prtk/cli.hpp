#pragma once

// Command-line pipeline driver.
//
//   simulate (crystal|toy) --seed N --out DIR [param flags]
//   hio --meas FILE --n N [--beta B --iters K --tau T --real --nonneg] --out DIR
//   sidgp --meas FILE --config FILE --out DIR
//   baseline-ls --meas FILE --n N --iters K --out DIR
//   eval --gt FILE --rec FILE [--json]
//   render --in FILE --out-mag FILE --out-phase FILE
//
// Exit codes: 0 success, 1 validation error, 2 I/O error.

#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "prtk/field.hpp"
#include "prtk/hio.hpp"
#include "prtk/io.hpp"
#include "prtk/metrics.hpp"
#include "prtk/optimize.hpp"
#include "prtk/simulate.hpp"

namespace prtk::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitIo = 2;

namespace detail {

using io::json;
namespace fs = std::filesystem;

inline json metrics_json(const metrics::Alignment& a, double residual) {
  return json{{"rel_error", a.rel_error},   {"shift_row", a.shift_row},
              {"shift_col", a.shift_col},   {"flipped", a.flipped},
              {"phase", a.phase},           {"fourier_residual", residual}};
}

inline json sidgp_config_json(const optim::SidgpConfig& c) {
  return json{{"decoder", io::to_json(c.decoder)}, {"iterations", c.iterations},
              {"lr", c.lr},                        {"rng_seed", c.rng_seed},
              {"restarts", c.restarts},            {"log_every", c.log_every},
              {"beta1", c.beta1},                  {"beta2", c.beta2},
              {"eps", c.eps}};
}

inline optim::SidgpConfig sidgp_config_from_json(const json& j) {
  optim::SidgpConfig c;
  try {
    if (j.contains("decoder")) c.decoder = io::decoder_config_from_json(j.at("decoder"));
    if (j.contains("iterations")) c.iterations = j.at("iterations").get<std::size_t>();
    if (j.contains("lr")) c.lr = j.at("lr").get<double>();
    if (j.contains("rng_seed")) c.rng_seed = j.at("rng_seed").get<std::uint64_t>();
    if (j.contains("restarts")) c.restarts = j.at("restarts").get<std::size_t>();
    if (j.contains("log_every")) c.log_every = j.at("log_every").get<std::size_t>();
    if (j.contains("beta1")) c.beta1 = j.at("beta1").get<double>();
    if (j.contains("beta2")) c.beta2 = j.at("beta2").get<double>();
    if (j.contains("eps")) c.eps = j.at("eps").get<double>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad sidgp config: ") + e.what());
  }
  c.validate();
  return c;
}

/// recovery.prtk, trace.csv and manifest.json for one solver run.
inline void write_solve_outputs(const fs::path& out, const RecoveryResult& res, json config,
                                json seeds, json inputs) {
  fs::create_directories(out);
  io::write_array(out / "recovery.prtk", io::to_array(res.image));
  io::write_text_atomic(out / "trace.csv", io::trace_csv(res.trace));
  json manifest{{"solver", res.solver},
                {"config", std::move(config)},
                {"rng_seeds", std::move(seeds)},
                {"inputs", std::move(inputs)},
                {"outputs",
                 {{"recovery", (out / "recovery.prtk").string()},
                  {"trace", (out / "trace.csv").string()}}},
                {"wall_time_ms", res.wall_time_ms},
                {"metrics",
                 {{"best_loss", res.best_loss}, {"fourier_residual", res.fourier_residual}}}};
  io::write_json(out / "manifest.json", manifest);
}

inline void write_simulation(const fs::path& out, const simulate::SimulatedData& d, json params,
                             double wall_ms) {
  fs::create_directories(out);
  io::write_array(out / "ground_truth.prtk", io::to_array(d.ground_truth));
  io::write_array(out / "measurement.prtk", io::to_array(d.measurement));
  const auto seed = params.at("rng_seed");
  io::write_json(out / "manifest.json",
                 json{{"solver", "simulate"},
                      {"config", std::move(params)},
                      {"rng_seeds", json::array({seed})},
                      {"inputs", json::object()},
                      {"outputs",
                       {{"ground_truth", (out / "ground_truth.prtk").string()},
                        {"measurement", (out / "measurement.prtk").string()}}},
                      {"wall_time_ms", wall_ms},
                      {"metrics", json::object()}});
}

}  // namespace detail

/// Parses and runs one command. Normal output goes to `out`, diagnostics and
/// usage text to `err`.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
  using detail::json;
  namespace fs = std::filesystem;

  CLI::App app{"Phase retrieval toolkit: simulation, HIO, deep-decoder solver, evaluation",
               "prtk"};
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "Generate a ground truth and its measurement");
  sim->require_subcommand(1);
  std::uint64_t sim_seed = 0;
  std::string sim_out;
  simulate::CrystalParams cp;
  std::string shape = "convex";
  auto* crystal = sim->add_subcommand("crystal", "Unit-modulus crystal with defect phase");
  crystal->add_option("--seed", sim_seed, "RNG seed")->required();
  crystal->add_option("--out", sim_out, "Output directory")->required();
  crystal->add_option("--frame", cp.frame, "Frame side")->capture_default_str();
  crystal->add_option("--region", cp.region, "Side of the centred point region")
      ->capture_default_str();
  crystal->add_option("--min-points", cp.min_points)->capture_default_str();
  crystal->add_option("--max-points", cp.max_points)->capture_default_str();
  crystal->add_option("--shape", shape, "convex or concave")
      ->check(CLI::IsMember({"convex", "concave"}))
      ->capture_default_str();
  crystal->add_option("--defects", cp.num_defects)->capture_default_str();
  crystal->add_option("--min-strength", cp.min_strength)->capture_default_str();
  crystal->add_option("--max-strength", cp.max_strength)->capture_default_str();
  crystal->add_option("--q", cp.momentum_transfer, "Momentum-transfer projection")
      ->capture_default_str();
  crystal->add_option("--noise-photons", cp.noise_photons, "Poisson peak count (0 = off)")
      ->capture_default_str();

  simulate::ToyParams tp;
  auto* toy = sim->add_subcommand("toy", "Real toy image with random translation");
  toy->add_option("--seed", sim_seed, "RNG seed")->required();
  toy->add_option("--out", sim_out, "Output directory")->required();
  toy->add_option("--frame", tp.frame)->capture_default_str();
  toy->add_option("--shapes", tp.num_shapes)->capture_default_str();
  toy->add_option("--min-intensity", tp.min_intensity)->capture_default_str();
  toy->add_option("--max-intensity", tp.max_intensity)->capture_default_str();
  toy->add_option("--max-offset", tp.max_offset)->capture_default_str();

  // hio
  auto* hio_cmd = app.add_subcommand("hio", "Plain hybrid input-output");
  std::string meas, out_dir, support_file;
  std::size_t n = 0;
  hio::HioConfig hcfg;
  bool no_support = false;
  hio_cmd->add_option("--meas", meas, "Measurement array")->required();
  hio_cmd->add_option("--n", n, "Object side")->required();
  hio_cmd->add_option("--beta", hcfg.beta)->capture_default_str();
  hio_cmd->add_option("--iters", hcfg.iterations)->capture_default_str();
  hio_cmd->add_option("--tau", hcfg.tau, "Autocorrelation support threshold")
      ->capture_default_str();
  hio_cmd->add_option("--seed", hcfg.rng_seed)->capture_default_str();
  hio_cmd->add_option("--support", support_file, "Explicit m x m support mask array");
  hio_cmd->add_flag("--no-support", no_support, "Disable the support constraint");
  hio_cmd->add_flag("--real", hcfg.constraints.real, "Enforce realness");
  hio_cmd->add_flag("--nonneg", hcfg.constraints.nonneg, "Enforce nonnegativity");
  hio_cmd->add_option("--out", out_dir, "Output directory")->required();

  // sidgp
  auto* sidgp_cmd = app.add_subcommand("sidgp", "Fit an untrained decoder to the measurement");
  std::string config_file;
  sidgp_cmd->add_option("--meas", meas, "Measurement array")->required();
  sidgp_cmd->add_option("--config", config_file, "JSON solver config")->required();
  sidgp_cmd->add_option("--out", out_dir, "Output directory")->required();

  // baseline-ls
  auto* ls_cmd = app.add_subcommand("baseline-ls", "Adam on raw pixels");
  optim::PixelLsConfig lcfg;
  ls_cmd->add_option("--meas", meas, "Measurement array")->required();
  ls_cmd->add_option("--n", lcfg.n, "Object side")->required();
  ls_cmd->add_option("--iters", lcfg.iterations)->required();
  ls_cmd->add_option("--lr", lcfg.lr)->capture_default_str();
  ls_cmd->add_option("--seed", lcfg.rng_seed)->capture_default_str();
  ls_cmd->add_option("--out", out_dir, "Output directory")->required();

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Symmetry-adjusted error of a recovery");
  std::string gt_file, rec_file;
  bool as_json = false;
  eval_cmd->add_option("--gt", gt_file, "Ground-truth array")->required();
  eval_cmd->add_option("--rec", rec_file, "Recovered array")->required();
  eval_cmd->add_option("--meas", meas, "Measurement for the residual (default: 2n from gt)");
  eval_cmd->add_flag("--json", as_json, "Print a JSON record");

  // render
  auto* render_cmd = app.add_subcommand("render", "Magnitude and phase PNGs");
  std::string in_file, mag_file, phase_file;
  render_cmd->add_option("--in", in_file, "Complex image array")->required();
  render_cmd->add_option("--out-mag", mag_file)->required();
  render_cmd->add_option("--out-phase", phase_file)->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitValidation;
  }

  try {
    if (*sim) {
      Stopwatch clock;
      if (*crystal) {
        cp.rng_seed = sim_seed;
        cp.shape = shape == "concave" ? simulate::ShapeKind::concave : simulate::ShapeKind::convex;
        const auto data = simulate::simulate_crystal(cp);
        json params{{"kind", "crystal"},          {"frame", cp.frame},
                    {"region", cp.region},        {"min_points", cp.min_points},
                    {"max_points", cp.max_points}, {"shape", shape},
                    {"num_defects", cp.num_defects}, {"min_strength", cp.min_strength},
                    {"max_strength", cp.max_strength}, {"momentum_transfer", cp.momentum_transfer},
                    {"noise_photons", cp.noise_photons}, {"rng_seed", cp.rng_seed},
                    {"oversampling_side", data.measurement.side()}};
        detail::write_simulation(sim_out, data, std::move(params), clock.elapsed_ms());
      } else {
        tp.rng_seed = sim_seed;
        const auto data = simulate::simulate_toy(tp);
        json params{{"kind", "toy"},
                    {"frame", tp.frame},
                    {"num_shapes", tp.num_shapes},
                    {"min_intensity", tp.min_intensity},
                    {"max_intensity", tp.max_intensity},
                    {"max_offset", tp.max_offset},
                    {"rng_seed", tp.rng_seed},
                    {"oversampling_side", data.measurement.side()}};
        detail::write_simulation(sim_out, data, std::move(params), clock.elapsed_ms());
      }
      return kExitOk;
    }

    if (*hio_cmd) {
      const auto y = io::to_pattern(io::read_array(meas));
      std::optional<SupportMask> mask;
      if (!support_file.empty()) mask = io::to_mask(io::read_array(support_file));
      hcfg.constraints.support = !no_support;
      const auto res = hio::solve_hio(y, n, hcfg, mask);
      json config{{"n", n},
                  {"beta", hcfg.beta},
                  {"iterations", hcfg.iterations},
                  {"tau", hcfg.tau},
                  {"support", hcfg.constraints.support},
                  {"real", hcfg.constraints.real},
                  {"nonneg", hcfg.constraints.nonneg},
                  {"support_file", support_file}};
      detail::write_solve_outputs(out_dir, res, std::move(config), json::array({hcfg.rng_seed}),
                                  json{{"measurement", meas}});
      return kExitOk;
    }

    if (*sidgp_cmd) {
      const auto y = io::to_pattern(io::read_array(meas));
      const auto cfg = detail::sidgp_config_from_json(io::read_json(config_file));
      std::optional<decoder::DecoderInit> model;
      const auto res = optim::solve_sidgp(y, cfg, &model);
      json seeds = json::array();
      for (std::size_t r = 0; r <= cfg.restarts; ++r) seeds.push_back(cfg.rng_seed + r);
      detail::write_solve_outputs(out_dir, res, detail::sidgp_config_json(cfg), std::move(seeds),
                                  json{{"measurement", meas}, {"config", config_file}});
      io::save_decoder(fs::path(out_dir) / "decoder", model->weights, model->seed);
      return kExitOk;
    }

    if (*ls_cmd) {
      const auto y = io::to_pattern(io::read_array(meas));
      const auto res = optim::solve_pixel_least_squares(y, lcfg);
      json config{{"n", lcfg.n}, {"iterations", lcfg.iterations}, {"lr", lcfg.lr},
                  {"log_every", lcfg.log_every}, {"init", "random"}};
      detail::write_solve_outputs(out_dir, res, std::move(config), json::array({lcfg.rng_seed}),
                                  json{{"measurement", meas}});
      return kExitOk;
    }

    if (*eval_cmd) {
      const auto gt = io::to_complex_image(io::read_array(gt_file));
      const auto rec = io::to_complex_image(io::read_array(rec_file));
      const auto y = meas.empty()
                         ? field::forward_intensities(gt, field::default_oversampling(gt.side()))
                         : io::to_pattern(io::read_array(meas));
      const auto align = metrics::best_symmetry_alignment(gt, rec, y.side());
      const double resid = metrics::fourier_residual(y, rec);
      if (as_json) {
        out << detail::metrics_json(align, resid).dump(2) << "\n";
      } else {
        out << "rel_error        " << align.rel_error << "\n"
            << "shift            (" << align.shift_row << ", " << align.shift_col << ")\n"
            << "flipped          " << (align.flipped ? "yes" : "no") << "\n"
            << "phase            " << align.phase << "\n"
            << "fourier_residual " << resid << "\n";
      }
      return kExitOk;
    }

    if (*render_cmd) {
      io::render_png(io::to_complex_image(io::read_array(in_file)), mag_file, phase_file);
      return kExitOk;
    }
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const FormatError& e) {
    err << "format error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitValidation;
}

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args, out, err);
}

}  // namespace prtk::cli
