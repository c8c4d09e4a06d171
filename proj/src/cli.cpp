#include "speckle/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "speckle/prolate.hpp"
#include "speckle/quantum_stats.hpp"

namespace speckle::cli {

namespace {

double parse_number(const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw UsageError("not a number: '" + text + "'");
  }
  if (used != text.size() || !std::isfinite(v)) throw UsageError("not a number: '" + text + "'");
  return v;
}

std::vector<double> expand_range(const std::string& item) {
  std::vector<std::string> parts;
  std::stringstream ss(item);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.size() != 3) throw UsageError("range '" + item + "' must be start:stop:step or start:stop:logN");
  const double start = parse_number(parts[0]);
  const double stop = parse_number(parts[1]);
  std::vector<double> out;
  if (parts[2].rfind("log", 0) == 0) {
    const double count = parse_number(parts[2].substr(3));
    if (count < 2 || count != std::floor(count))
      throw UsageError("log range '" + item + "' needs an integer point count >= 2");
    if (!(start > 0.0 && stop > 0.0)) throw UsageError("log range '" + item + "' needs positive ends");
    const auto n = static_cast<std::size_t>(count);
    const double l0 = std::log(start), l1 = std::log(stop);
    for (std::size_t i = 0; i < n; ++i)
      out.push_back(i == 0 ? start
                    : i + 1 == n ? stop
                                 : std::exp(l0 + (l1 - l0) * static_cast<double>(i) /
                                                     static_cast<double>(n - 1)));
    return out;
  }
  const double step = parse_number(parts[2]);
  if (step == 0.0 || (stop - start) / step < 0.0)
    throw UsageError("range '" + item + "' never reaches its stop value");
  const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
  if (n > 10'000'000) throw UsageError("range '" + item + "' is too long");
  for (std::size_t i = 0; i < n; ++i) out.push_back(start + static_cast<double>(i) * step);
  return out;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_cell(const Cell& cell) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>)
          return format_double(v);
        else if constexpr (std::is_same_v<T, std::string>)
          return v;
        else
          return std::to_string(v);
      },
      cell);
}

// Re-throws module precondition failures as usage errors naming the flag.
template <class F>
void checked(const std::string& flag, F&& f) {
  try {
    f();
  } catch (const UsageError&) {
    throw;
  } catch (const InvalidArgument& e) {
    throw UsageError(flag + ": " + e.what());
  }
}

double single(const std::vector<double>& v, const std::string& flag) {
  if (v.size() != 1) throw UsageError(flag + " takes a single value for this command");
  return v.front();
}

std::size_t fed_modes(const RunConfig& c) { return c.fed_modes == 0 ? c.channels : c.fed_modes; }

SweepSpec sweep_spec(const RunConfig& c) {
  SweepSpec spec;
  spec.axis = c.axis;
  spec.values = c.values;
  spec.disorder = {c.channels, c.s.front()};
  spec.input = SqueezedInput::aligned(c.alpha2, c.g.front(), fed_modes(c));
  spec.loss.loss_rate = c.loss;
  spec.trials = c.trials;
  spec.master_seed = c.seed;
  spec.workers = c.workers;
  spec.formula = c.formula;
  return spec;
}

SuperresSpec superres_spec(const RunConfig& c) {
  SuperresSpec spec;
  spec.g = c.g.front();
  spec.s_values = c.s;
  spec.mean_photons = c.budgets;
  spec.alpha2 = c.alpha2;
  spec.channels = c.channels;
  spec.bandwidth = c.c;
  spec.epsilon = c.epsilon;
  spec.modes = c.modes;
  spec.quad_order = c.quad_order;
  spec.trials = c.trials;
  spec.master_seed = c.seed;
  spec.workers = c.workers;
  return spec;
}

void validate_prolate(const RunConfig& c) {
  if (!(c.c > 0.0)) throw UsageError("--c: bandwidth must be > 0");
  if (c.quad_order < 8 || c.quad_order % 2 != 0)
    throw UsageError("--quad: quadrature order must be even and >= 8");
  if (c.modes > c.quad_order / 4) throw UsageError("--modes: at most quad/4 modes");
}

// Checks every parameter the chosen command consumes.
void validate(RunConfig& c) {
  const std::string& cmd = c.command;
  if (c.workers == 0) throw UsageError("--workers: must be >= 1");
  if (c.trials == 0) throw UsageError("--trials: must be >= 1");

  const bool ensemble_cmd = cmd == "fano-scatter" || cmd == "snr-sweep" || cmd == "nm-sweep" ||
                            cmd == "universal-fano" || cmd == "loss-sweep" || cmd == "superres";
  if (ensemble_cmd) {
    if (cmd != "superres") single(c.s, "--s");
    if (cmd != "loss-sweep") single(c.g, "--g");
    for (double s : c.s) checked("--s", [&] { DisorderParams{c.channels, s}.validate(); });
    checked("--channels", [&] { DisorderParams{c.channels, 2.0}.validate(); });
    if (fed_modes(c) > c.channels) throw UsageError("--fed-modes: N must not exceed M");
    for (double g : c.g)
      checked("--g", [&] { SqueezedInput::aligned(std::max(c.alpha2, 0.0), g, 1).validate(); });
    checked("--alpha2", [&] { SqueezedInput::aligned(c.alpha2, 0.0, 1).validate(); });
    if (!(c.alpha2 >= 0.0)) throw UsageError("--alpha2: must be >= 0");
    checked("--loss", [&] { LossChannel{c.loss}.validate(); });
  }
  if (cmd == "fano-scatter" && fed_modes(c) != c.channels)
    throw UsageError("--fed-modes: fano-scatter uses full filling, N = M");
  if (cmd == "snr-sweep" || cmd == "nm-sweep" || cmd == "universal-fano")
    checked("--values", [&] { sweep_spec(c).validate(); });
  if (cmd == "loss-sweep") {
    if (c.g.empty()) throw UsageError("--g: needs at least one value");
    for (double q : c.loss_grid) checked("--loss-grid", [&] { LossChannel{q}.validate(); });
  }
  if (cmd == "superres") {
    validate_prolate(c);
    if (!(c.epsilon > 0.0 && c.epsilon <= 2.0)) throw UsageError("--eps: must lie in (0, 2]");
    for (double n : c.budgets)
      if (!(n > 0.0)) throw UsageError("--budgets: photon numbers must be positive");
  }
  if (cmd == "psf") {
    validate_prolate(c);
    if (c.q == 0 || c.q > c.quad_order / 4) throw UsageError("--q: must lie in [1, quad/4]");
    if (!(c.step > 0.0)) throw UsageError("--step: must be > 0");
    if (!(c.extent > 0.0)) throw UsageError("--extent: must be > 0");
  }
  if (cmd == "prolate-basis") validate_prolate(c);
  if (cmd == "oracle-check" && c.cases == 0) throw UsageError("--cases: must be >= 1");
  if (cmd == "photon-budget") {
    if (!(c.wavelength > 0.0)) throw UsageError("--wavelength: must be > 0");
    if (!(c.power > 0.0)) throw UsageError("--power: must be > 0");
    if (!(c.duration > 0.0)) throw UsageError("--duration: must be > 0");
    if (!(c.focus_fraction > 0.0 && c.focus_fraction <= 1.0))
      throw UsageError("--fraction: must lie in (0, 1]");
  }
}

std::vector<double> default_values(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::SqueezeG: return parse_values("0:1.5:0.1");
    case SweepAxis::DisorderS: return parse_values("1.5:10:0.5");
    case SweepAxis::ModeFillRatio: return parse_values("0.1:1:0.1");
    case SweepAxis::LossRate: return parse_values("0:1:0.05");
    case SweepAxis::CoherentFraction: return parse_values("0.05:0.95:0.05,0.99");
    case SweepAxis::PhotonBudget: return parse_values("100:100000:log13");
  }
  return {};
}

std::vector<Cell> sweep_cells(const SweepRow& r) {
  return {r.axis_value, r.mean_n, r.fano_ratio, r.snr_ratio, r.stderr_snr,
          static_cast<long long>(r.trials)};
}

std::string fmt_summary(const char* format, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c);
  return buf;
}

}  // namespace

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    item.erase(std::remove_if(item.begin(), item.end(), ::isspace), item.end());
    if (item.empty()) throw UsageError("empty entry in value list '" + text + "'");
    if (item.find(':') != std::string::npos) {
      const auto r = expand_range(item);
      out.insert(out.end(), r.begin(), r.end());
    } else {
      out.push_back(parse_number(item));
    }
  }
  if (out.empty()) throw UsageError("empty value list");
  return out;
}

RunConfig parse_args(int argc, const char* const* argv) {
  RunConfig c;
  std::string s_text, g_text, values_text, loss_grid_text, budgets_text, axis_text = "g";
  std::string format_text = "csv", formula_text = "exact";

  CLI::App app{"Photon statistics of squeezed light focused by a scattering lens"};
  app.name("speckle");
  app.require_subcommand(1, 1);

  auto common = [&](CLI::App* sub) {
    sub->add_option("--seed", c.seed, "master seed (SPECKLE_SEED overrides)");
    sub->add_option("--out,-o", c.out, "output file, '-' for stdout");
    sub->add_option("--format", format_text, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
  };
  auto ensemble_opts = [&](CLI::App* sub) {
    common(sub);
    sub->add_option("--channels,-M", c.channels, "transmission channels M");
    sub->add_option("--s", s_text, "disorder s = L/l");
    sub->add_option("--g", g_text, "squeezing strength g");
    sub->add_option("--alpha2", c.alpha2, "coherent amplitude |alpha|^2 per fed mode");
    sub->add_option("--trials", c.trials, "disorder realizations");
    sub->add_option("--workers,-j", c.workers, "worker threads");
  };
  auto sweep_opts = [&](CLI::App* sub) {
    ensemble_opts(sub);
    sub->add_option("--fed-modes,-N", c.fed_modes, "fed channels N (default M)");
    sub->add_option("--values", values_text, "axis values: list, a:b:step or a:b:logN");
    sub->add_option("--loss", c.loss, "loss rate |q|^2");
    sub->add_option("--formula", formula_text, "exact or large-alpha")
        ->check(CLI::IsMember({"exact", "large-alpha"}));
  };
  auto prolate_opts = [&](CLI::App* sub) {
    sub->add_option("--c", c.c, "bandwidth parameter c");
    sub->add_option("--quad", c.quad_order, "Gauss-Legendre order");
  };

  auto* fano = app.add_subcommand("fano-scatter", "per-trial Fano factors at full filling");
  ensemble_opts(fano);

  auto* snr = app.add_subcommand("snr-sweep", "average SNR ratio along one parameter axis");
  sweep_opts(snr);
  snr->add_option("--axis", axis_text, "g, s, fill, loss, coherent-fraction or alpha2");

  auto* nm = app.add_subcommand("nm-sweep", "average SNR ratio versus N/M");
  sweep_opts(nm);

  auto* univ = app.add_subcommand("universal-fano", "average Fano factor versus coherent fraction");
  sweep_opts(univ);

  auto* loss = app.add_subcommand("loss-sweep", "average SNR ratio versus loss rate");
  ensemble_opts(loss);
  loss->add_option("--loss-grid", loss_grid_text, "loss rates |q|^2");

  auto* sup = app.add_subcommand("superres", "super-resolution factor versus photon number");
  ensemble_opts(sup);
  prolate_opts(sup);
  sup->add_option("--budgets", budgets_text, "mean photon numbers");
  sup->add_option("--eps", c.epsilon, "object width epsilon");
  sup->add_option("--modes", c.modes, "prolate modes K (0 = all resolvable)");

  auto* psf = app.add_subcommand("psf", "classical and reconstruction point spread functions");
  common(psf);
  prolate_opts(psf);
  psf->add_option("--q", c.q, "retained prolate modes Q");
  psf->add_option("--step", c.step, "z spacing");
  psf->add_option("--extent", c.extent, "z range [-extent, extent]");

  auto* basis = app.add_subcommand("prolate-basis", "eigenvalues and sampled eigenfunctions");
  common(basis);
  prolate_opts(basis);
  basis->add_option("--modes", c.modes, "modes K (0 = all resolvable)");

  auto* oracle = app.add_subcommand("oracle-check", "closed forms versus the Gaussian oracle");
  common(oracle);
  oracle->add_option("--cases", c.cases, "random cases");

  auto* budget = app.add_subcommand("photon-budget", "photons delivered to the focus");
  common(budget);
  budget->add_option("--wavelength", c.wavelength, "metres");
  budget->add_option("--power", c.power, "watts");
  budget->add_option("--duration", c.duration, "seconds");
  budget->add_option("--fraction", c.focus_fraction, "share of power in the focus mode");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    c.help = app.help();
    for (auto* sub : app.get_subcommands()) c.help = sub->help();
    return c;
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  c.command = app.get_subcommands().front()->get_name();
  CLI::App* sub = app.get_subcommands().front();

  c.format = format_text == "json" ? Format::Json : Format::Csv;
  c.formula = formula_text == "large-alpha" ? Formula::LargeAlpha : Formula::Exact;

  if (!s_text.empty()) c.s = parse_values(s_text);
  else if (c.command == "superres") c.s = {2.0, 4.0, 6.0, 8.0};
  if (!g_text.empty()) c.g = parse_values(g_text);
  else if (c.command == "loss-sweep") c.g = {0.5, 1.0, 1.5};

  if (c.command == "snr-sweep") checked("--axis", [&] { c.axis = parse_axis(axis_text); });
  if (c.command == "nm-sweep") c.axis = SweepAxis::ModeFillRatio;
  if (c.command == "universal-fano") c.axis = SweepAxis::CoherentFraction;
  if (sub->get_option_no_throw("--values") != nullptr)
    c.values = values_text.empty() ? default_values(c.axis) : parse_values(values_text);
  c.loss_grid = parse_values(loss_grid_text.empty() ? "0:1:0.05" : loss_grid_text);
  c.budgets = parse_values(budgets_text.empty() ? "1e6:3.5e10:log25" : budgets_text);

  if (const char* env = std::getenv("SPECKLE_SEED"); env != nullptr && *env != '\0') {
    std::size_t used = 0;
    try {
      c.seed = std::stoull(env, &used, 0);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || env[used] != '\0')
      throw UsageError(std::string("SPECKLE_SEED: not an unsigned integer: '") + env + "'");
  }
  if (c.out.empty()) c.out = c.command + (c.format == Format::Json ? ".json" : ".csv");

  validate(c);
  return c;
}

Table build_table(const RunConfig& c, std::string* summary, bool* ok) {
  Table t;
  std::string note;
  bool passed = true;
  const std::string& cmd = c.command;

  if (cmd == "fano-scatter") {
    t.columns = {"trial", "seed", "sum_T", "mean_n", "variance", "fano"};
    const auto samples = run_fano_scatter({c.channels, c.s.front()}, c.g.front(), c.alpha2,
                                          c.trials, c.seed, c.workers);
    double sum = 0.0, worst = -INFINITY;
    std::size_t below = 0;
    for (const auto& x : samples) {
      t.rows.push_back({static_cast<long long>(x.trial), static_cast<unsigned long long>(x.seed),
                        x.sum_T, x.moments.mean, x.moments.variance, x.fano});
      sum += x.fano;
      worst = std::max(worst, x.fano);
      below += x.fano < 1.0;
    }
    note = fmt_summary("mean F = %.6g, max F = %.6g, %.0f trials with F < 1",
                       sum / static_cast<double>(samples.size()), worst,
                       static_cast<double>(below));
  } else if (cmd == "snr-sweep" || cmd == "nm-sweep" || cmd == "universal-fano") {
    t.columns = {"axis_value", "mean_n", "fano_ratio", "snr_ratio", "stderr_snr", "trials"};
    const auto rows = run_sweep(sweep_spec(c));
    for (const auto& r : rows) t.rows.push_back(sweep_cells(r));
    note = "axis " + to_string(c.axis) +
           fmt_summary(", snr_ratio %.6g .. %.6g", rows.front().snr_ratio, rows.back().snr_ratio);
  } else if (cmd == "loss-sweep") {
    t.columns = {"g", "loss_rate", "mean_n", "fano_ratio", "snr_ratio", "stderr_snr", "trials"};
    const auto rows = run_loss_sweep(c.g, c.s.front(), c.alpha2, c.loss_grid, c.channels,
                                     c.trials, c.seed, c.workers);
    for (const auto& r : rows) {
      std::vector<Cell> cells{r.g};
      for (auto& cell : sweep_cells(r.row)) cells.push_back(cell);
      t.rows.push_back(std::move(cells));
    }
    note = fmt_summary("%.0f g values", static_cast<double>(c.g.size()));
  } else if (cmd == "superres") {
    t.columns = {"s", "mean_n", "Q", "W", "W_Q", "J"};
    const auto rows = run_superres_sweep(superres_spec(c));
    double best = 0.0;
    for (const auto& r : rows) {
      t.rows.push_back({r.s, r.mean_n, static_cast<long long>(r.q), r.w, r.w_q, r.j});
      best = std::max(best, r.j);
    }
    note = fmt_summary("max J = %.6g", best);
  } else if (cmd == "psf") {
    t.columns = {"z", "classical", "reconstruction"};
    const auto basis = build_basis(c.c, c.q, c.quad_order);
    const auto n = static_cast<long long>(std::floor(c.extent / c.step + 1e-9));
    for (long long i = -n; i <= n; ++i) {
      const double z = static_cast<double>(i) * c.step;
      t.rows.push_back({z, classical_psf(c.c, z), reconstruction_psf(basis, c.q, z)});
    }
    const auto rep = resolution_report(basis, c.q);
    note = fmt_summary("W = %.6g, W_Q = %.6g, J = %.6g", rep.w, rep.w_q, rep.j);
  } else if (cmd == "prolate-basis") {
    const std::size_t modes = c.modes != 0 ? c.modes : resolvable_modes(c.c, c.quad_order);
    const auto basis = build_basis(c.c, modes, c.quad_order);
    t.comment = "c=" + format_double(c.c) + " K=" + std::to_string(basis.size()) + " lambda=";
    t.columns = {"z", "weight"};
    double total = 0.0;
    for (std::size_t k = 0; k < basis.size(); ++k) {
      t.comment += (k ? ";" : "") + format_double(basis.lambda(k));
      t.columns.push_back("phi_" + std::to_string(k));
      total += basis.lambda(k);
    }
    for (std::size_t i = 0; i < basis.nodes().size(); ++i) {
      std::vector<Cell> row{basis.nodes()[i], basis.weights()[i]};
      for (std::size_t k = 0; k < basis.size(); ++k) row.push_back(basis.samples(k)[i]);
      t.rows.push_back(std::move(row));
    }
    note = fmt_summary("%.0f modes, sum lambda = %.12g", static_cast<double>(basis.size()), total);
  } else if (cmd == "oracle-check") {
    t.columns = {"case",         "M",          "N",            "s",           "g",
                 "alpha2",       "mean_analytic", "mean_oracle", "var_analytic", "var_oracle",
                 "rel_err_mean", "rel_err_var"};
    const auto cases = run_oracle_cases(c.cases, c.seed);
    const OracleCase* worst = &cases.front();
    auto err = [](const OracleCase& x) { return std::max(x.rel_err_mean, x.rel_err_var); };
    for (const auto& x : cases) {
      t.rows.push_back({static_cast<long long>(x.index), static_cast<long long>(x.channels),
                        static_cast<long long>(x.fed_modes), x.s, x.g, x.alpha2, x.analytic.mean,
                        x.oracle.mean, x.analytic.variance, x.oracle.variance, x.rel_err_mean,
                        x.rel_err_var});
      if (err(x) > err(*worst)) worst = &x;
    }
    passed = err(*worst) < 1e-10;
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "%s: worst relative error %.3g at case %zu (M=%zu, N=%zu, s=%.4g, g=%.4g, "
                  "alpha2=%.6g)",
                  passed ? "ok" : "FAILED", err(*worst), worst->index, worst->channels,
                  worst->fed_modes, worst->s, worst->g, worst->alpha2);
    note = buf;
  } else if (cmd == "photon-budget") {
    t.columns = {"wavelength_m", "power_w", "duration_s", "focus_fraction", "mean_photons"};
    const double n = photon_budget(c.wavelength, c.power, c.duration, c.focus_fraction);
    t.rows.push_back({c.wavelength, c.power, c.duration, c.focus_fraction, n});
    note = fmt_summary("<n> = %.6g photons", n);
  } else {
    throw UsageError("unknown command '" + cmd + "'");
  }
  if (summary != nullptr) *summary = note;
  if (ok != nullptr) *ok = passed;
  return t;
}

std::string to_csv(const Table& table) {
  std::string out;
  if (!table.comment.empty()) out += "# " + table.comment + "\n";
  for (std::size_t i = 0; i < table.columns.size(); ++i)
    out += (i ? "," : "") + table.columns[i];
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + format_cell(row[i]);
    out += '\n';
  }
  return out;
}

std::string to_json(const Table& table) {
  auto rows = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) {
    nlohmann::ordered_json obj;
    for (std::size_t i = 0; i < row.size(); ++i)
      std::visit([&](const auto& v) { obj[table.columns[i]] = v; }, row[i]);
    rows.push_back(std::move(obj));
  }
  if (table.comment.empty()) return rows.dump(1) + "\n";
  nlohmann::ordered_json doc;
  doc["comment"] = table.comment;
  doc["rows"] = std::move(rows);
  return doc.dump(1) + "\n";
}

int execute(const RunConfig& config) {
  if (!config.help.empty()) {
    std::cout << config.help;
    return 0;
  }
  const auto start = std::chrono::steady_clock::now();
  std::string summary;
  bool ok = true;
  const Table table = build_table(config, &summary, &ok);
  const std::string text = config.format == Format::Json ? to_json(table) : to_csv(table);

  std::ostream* log = &std::cout;
  if (config.out == "-") {
    std::cout << text;
    log = &std::cerr;
  } else {
    std::ofstream file(config.out, std::ios::binary);
    if (!file) throw UsageError("--out: cannot open '" + config.out + "' for writing");
    file << text;
    if (!file.flush()) throw UsageError("--out: write to '" + config.out + "' failed");
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  char head[160];
  std::snprintf(head, sizeof head, "%s: %zu rows -> %s in %.3f s; ", config.command.c_str(),
                table.rows.size(), config.out.c_str(), secs);
  *log << head << summary << '\n';
  return ok ? 0 : 3;
}

int run(int argc, const char* const* argv) {
  try {
    return execute(parse_args(argc, argv));
  } catch (const InvalidArgument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace speckle::cli
