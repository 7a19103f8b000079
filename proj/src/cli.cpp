#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "entsum/harness.hpp"

namespace entsum {

using nlohmann::json;

namespace {

json coords_json(const SymValue& v) {
  json out = json::array();
  for (const std::string& s : coord_strings(v)) out.push_back(s);
  return out;
}

json atoms_json(const Basis& basis, const std::vector<SymValue>& atoms) {
  json out = json::array();
  for (const SymValue& v : atoms) {
    json a;
    a["coords"] = coords_json(v);
    a["display"] = render_sym(basis, v);
    out.push_back(std::move(a));
  }
  return out;
}

json prepartition_json(const Basis& basis, const Prepartition& pp) {
  json out;
  json cells = json::array();
  for (const auto& cell : pp.cells.cells)
    cells.push_back(atoms_json(basis, cell));
  out["cells"] = std::move(cells);
  out["leftover"] = atoms_json(basis, pp.leftover);
  out["singletons"] = pp.singleton_count;
  out["degenerate"] = pp.degenerate;
  return out;
}

json witness_json(const Basis& basis, const Collection& c, const Witness& w) {
  json out;
  out["total"] = w.total.get_str();
  json ca = json::array(), cb = json::array();
  for (const Int& z : w.counts_a) ca.push_back(z.get_str());
  for (const Int& z : w.counts_b) cb.push_back(z.get_str());
  out["counts_a"] = std::move(ca);
  out["counts_b"] = std::move(cb);
  json sa = json::array(), sb = json::array();
  for (const SymValue& v : w.cell_sums_a) sa.push_back(coords_json(v));
  for (const SymValue& v : w.cell_sums_b) sb.push_back(coords_json(v));
  out["cell_sums_a"] = std::move(sa);
  out["cell_sums_b"] = std::move(sb);
  out["replays"] = replay_witness(c, w);
  return out;
}

json incomm_json(const Basis& basis, const Collection& c,
                 const IncommCertificate& cert) {
  json out;
  out["verdict"] = cert.incommensurable;
  out["atoms"] = atoms_json(basis, c.flat_atoms);
  out["atom_cells"] = c.flat_cell;
  json kernel = json::array();
  for (const IntVector& z : cert.kernel) {
    json v = json::array();
    for (Eigen::Index i = 0; i < z.size(); ++i) v.push_back(z(i).get_str());
    kernel.push_back(std::move(v));
  }
  out["kernel_basis"] = std::move(kernel);
  json sums = json::array();
  for (const auto& per_vec : cert.kernel_cell_sums) {
    json v = json::array();
    for (const SymValue& s : per_vec) v.push_back(coords_json(s));
    sums.push_back(std::move(v));
  }
  out["kernel_cell_sums"] = std::move(sums);
  out["witness"] = cert.witness ? witness_json(basis, c, *cert.witness)
                                : json(nullptr);
  return out;
}

json report_json(const BoundReport& r) {
  json out;
  out["name"] = to_string(r.name);
  out["coeff"] = rat_str(r.coeff);
  out["intercept"] = static_cast<double>(r.intercept);
  out["direction"] = to_string(r.direction);
  out["k"] = r.k;
  out["s"] = r.s;
  out["q"] = rat_str(r.q);
  out["lambda"] = static_cast<double>(r.lambda);
  out["asymptotic"] = r.asymptotic;
  return out;
}

struct OutStream {
  std::ofstream file;
  std::ostream* os = &std::cout;
  explicit OutStream(const std::string& path) {
    if (!path.empty()) {
      file.open(path, std::ios::binary);
      if (!file) throw Error("cannot open output file '" + path + "'");
      os = &file;
    }
  }
};

std::vector<long> parse_longs(const std::string& text, std::size_t count,
                              const std::string& what) {
  std::vector<long> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t pos = 0;
      out.push_back(std::stol(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(what + ": '" + item + "' is not an integer");
    }
  }
  if (out.size() != count)
    throw Error(what + ": expected " + std::to_string(count) +
                " comma-separated integers");
  return out;
}

std::vector<long> build_grid(long n_single, const std::string& grid_arg,
                             const std::string& dyadic_arg) {
  const int given = (n_single > 0) + !grid_arg.empty() + !dyadic_arg.empty();
  if (given != 1)
    throw Error("specify exactly one of --n, --grid a,b,step, --dyadic lo,hi");
  if (n_single > 0) return {n_single};
  if (!grid_arg.empty()) {
    const auto v = parse_longs(grid_arg, 3, "--grid");
    const long a = v[0], b = v[1], step = v[2];
    if (a < 1 || step < 1 || b < a) throw Error("--grid: need 1 <= a <= b, step >= 1");
    std::vector<long> grid;
    for (long n = a; n <= b; n += step) grid.push_back(n);
    return grid;
  }
  const auto v = parse_longs(dyadic_arg, 2, "--dyadic");
  const long lo = v[0], hi = v[1];
  if (lo < 1 || hi < lo) throw Error("--dyadic: need 1 <= lo <= hi");
  std::vector<long> grid;
  for (long n = lo; n <= hi; n *= 2) grid.push_back(n);
  return grid;
}

struct GlobalArgs {
  std::size_t max_support = kDefaultMaxSupport;
  std::string log_base = "e";
  std::string out;
  long precision = 80;
  double tolerance = 0.15;
};

void add_globals(CLI::App* cmd, GlobalArgs* g) {
  cmd->add_option("--max-support", g->max_support,
                  "Support-size cap for exact convolution");
  cmd->add_option("--log-base", g->log_base, "Display log base: e or 2")
      ->check(CLI::IsMember({"e", "2"}));
  cmd->add_option("--out", g->out, "Output path (default stdout)");
  cmd->add_option("--precision", g->precision,
                  "Fraction bits carried by entropy summation (>= 64)")
      ->check(CLI::Range(64L, 4096L));
  cmd->add_option("--tolerance", g->tolerance,
                  "Slope tolerance for verify (slope >= r/2 - tolerance)");
}

void emit_error(const std::string& type, const std::string& message) {
  json err;
  err["error"]["type"] = type;
  err["error"]["message"] = message;
  std::cerr << err.dump() << '\n';
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{
      "Exact distributions and Shannon entropy of iid sums over symbolic "
      "real supports, incommensurability decisions and ranks, and "
      "asymptotic entropy bounds"};
  app.require_subcommand(1);
  GlobalArgs g;

  std::string spec_path;
  std::string cells_arg;
  std::string bounds_arg;
  std::string grid_arg, dyadic_arg, fit_window_arg;
  long n_single = 0;
  long n_max = 0;
  bool use_mc = false;
  std::uint64_t samples = 1'000'000;
  std::uint64_t seed = 1;
  std::size_t state_budget = 5'000'000;

  CLI::App* analyze = app.add_subcommand(
      "analyze", "Rank, certificates and bound constants as JSON");
  analyze->add_option("spec", spec_path, "Distribution spec file")->required();
  add_globals(analyze, &g);

  CLI::App* entropy_cmd = app.add_subcommand(
      "entropy", "Exact (or Monte Carlo) entropy of the N-fold sum as CSV");
  entropy_cmd->add_option("spec", spec_path)->required();
  entropy_cmd->add_option("--n", n_single, "Single N");
  entropy_cmd->add_option("--grid", grid_arg, "Arithmetic grid a,b,step");
  entropy_cmd->add_option("--dyadic", dyadic_arg, "Dyadic grid lo,hi");
  entropy_cmd->add_flag("--mc", use_mc, "Monte Carlo instead of exact");
  entropy_cmd->add_option("--samples", samples, "Monte Carlo sample count");
  entropy_cmd->add_option("--seed", seed, "Monte Carlo seed");
  add_globals(entropy_cmd, &g);

  CLI::App* verify = app.add_subcommand(
      "verify",
      "Entropy vs selected bounds over an N grid, with a scaling fit");
  verify->add_option("spec", spec_path)->required();
  verify->add_option("--bounds", bounds_arg,
                     "Comma list from thm1,thm2,thm4,thm7,cor9")
      ->required();
  verify->add_option("--grid", grid_arg, "Arithmetic grid a,b,step");
  verify->add_option("--dyadic", dyadic_arg, "Dyadic grid lo,hi");
  verify->add_option("--fit-window", fit_window_arg,
                     "lo,hi window for the fit (default: top half of grid)");
  verify->add_flag("--mc", use_mc, "Monte Carlo instead of exact");
  verify->add_option("--samples", samples, "Monte Carlo sample count");
  verify->add_option("--seed", seed, "Monte Carlo seed");
  add_globals(verify, &g);

  CLI::App* check = app.add_subcommand(
      "check", "Incommensurability verdict and certificate for given cells");
  check->add_option("spec", spec_path)->required();
  check->add_option("--cells", cells_arg, "Cells, e.g. \"1,2|pi\"")
      ->required();
  add_globals(check, &g);

  CLI::App* falsify = app.add_subcommand(
      "falsify", "Exhaustive witness search up to a total count");
  falsify->add_option("spec", spec_path)->required();
  falsify->add_option("--cells", cells_arg)->required();
  falsify->add_option("--n-max", n_max, "Largest total count to enumerate")
      ->required();
  falsify->add_option("--state-budget", state_budget,
                      "Cap on enumerated count assignments");
  add_globals(falsify, &g);

  CLI::App* mc_cmd =
      app.add_subcommand("mc", "Monte Carlo entropy estimate as JSON");
  mc_cmd->add_option("spec", spec_path)->required();
  mc_cmd->add_option("--n", n_single)->required();
  mc_cmd->add_option("--samples", samples)->required();
  mc_cmd->add_option("--seed", seed)->required();
  add_globals(mc_cmd, &g);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  }

  const int log_base = g.log_base == "2" ? 2 : 0;
  try {
    RunOptions opts;
    opts.max_support = g.max_support;
    opts.use_mc = use_mc;
    opts.samples = samples;
    opts.seed = seed;

    if (*analyze) {
      const ParsedSpec spec = load_spec(spec_path);
      OutStream out(g.out);
      json j;
      j["atom_count"] = spec.dist.size();
      json basis = json::array();
      for (const BasisSymbol& b : spec.basis.symbols)
        basis.push_back({{"symbol", b.name}, {"approx", b.approx}});
      j["basis"] = std::move(basis);
      j["atoms"] = atoms_json(spec.basis, spec.dist.support.atoms);
      const auto lat = detect_lattice(spec.dist.support);
      if (lat) {
        json l;
        l["offset"] = coords_json(lat->offset);
        l["direction"] = coords_json(lat->direction);
        json ic = json::array();
        for (const Int& z : lat->int_coords) ic.push_back(z.get_str());
        l["int_coords"] = std::move(ic);
        j["lattice"] = std::move(l);
      } else {
        j["lattice"] = nullptr;
      }
      const RankResult rr = compute_rank(spec.dist.support);
      j["rank"] = rr.rank;
      j["certificate"] = prepartition_json(spec.basis, rr.certificate);
      if (rr.rank >= 1)
        j["incommensurability"] =
            incomm_json(spec.basis, rr.certificate.cells,
                        is_incommensurable(rr.certificate.cells));
      json reports = json::array();
      if (spec.dist.size() >= 2) {
        if (lat) reports.push_back(report_json(thm1_report(var_over_h2(spec.dist))));
        reports.push_back(report_json(thm2_report(spec.dist.probs)));
        if (rr.rank >= 1 && rr.certificate.leftover.empty())
          for (const BoundReport& r : thm4_report(rr.certificate, spec.dist))
            reports.push_back(report_json(r));
        if (rr.rank >= 1) {
          BoundReport t7 = thm7_report(rr.certificate, spec.dist);
          reports.push_back(report_json(t7));
          t7.name = BoundName::cor9;
          reports.push_back(report_json(t7));
        }
      }
      j["bounds"] = std::move(reports);
      *out.os << j.dump(2) << '\n';
      return 0;
    }

    if (*entropy_cmd || *verify) {
      const ParsedSpec spec = load_spec(spec_path);
      const std::vector<long> grid =
          build_grid(n_single, grid_arg, dyadic_arg);
      std::vector<std::string> bounds;
      if (*verify) {
        std::stringstream ss(bounds_arg);
        std::string item;
        while (std::getline(ss, item, ',')) bounds.push_back(item);
        if (bounds.empty()) throw Error("--bounds: empty selection");
      }
      ConvergenceTable table = run_convergence(spec, grid, bounds, opts);
      OutStream out(g.out);
      write_csv(*out.os, table, log_base);
      if (*entropy_cmd) return 0;

      long w_lo, w_hi;
      if (!fit_window_arg.empty()) {
        const auto v = parse_longs(fit_window_arg, 2, "--fit-window");
        w_lo = v[0];
        w_hi = v[1];
      } else {
        w_lo = grid[grid.size() / 2];
        w_hi = grid.back();
      }
      std::vector<std::pair<long, double>> points;
      for (const ConvergenceRow& row : table.rows)
        if (row.h) points.emplace_back(row.n, *row.h);
      const FitResult fit = fit_scaling(points, w_lo, w_hi);
      int rank = 0;
      if (table.rank) {
        rank = *table.rank;
      } else {
        rank = compute_rank(spec.dist.support).rank;
      }
      const double threshold = 0.5 * rank - g.tolerance;
      const bool slope_ok = fit.slope >= threshold;
      *out.os << "# fit_window," << fit.n_lo << ',' << fit.n_hi << '\n'
              << "# fit_slope," << fmt_sig(fit.slope) << '\n'
              << "# fit_intercept," << fmt_sig(fit.intercept) << '\n'
              << "# fit_max_residual," << fmt_sig(fit.max_residual) << '\n'
              << "# rank," << rank << '\n'
              << "# slope_threshold," << fmt_sig(threshold) << '\n'
              << "# slope_ok," << (slope_ok ? "true" : "false") << '\n';
      for (const std::string& note : table.notes)
        *out.os << "# note," << note << '\n';
      if (!slope_ok) {
        emit_error("slope_check_failed",
                   "fitted slope " + fmt_sig(fit.slope) +
                       " is below threshold " + fmt_sig(threshold) +
                       " (rank " + std::to_string(rank) + ")");
        return 1;
      }
      return 0;
    }

    if (*check || *falsify) {
      const ParsedSpec spec = load_spec(spec_path);
      const Collection cells = parse_cells(spec, cells_arg);
      OutStream out(g.out);
      if (*check) {
        const IncommCertificate cert = is_incommensurable(cells);
        json j = incomm_json(spec.basis, cells, cert);
        *out.os << j.dump(2) << '\n';
        return 0;
      }
      if (n_max < 1) throw Error("--n-max must be at least 1");
      const auto witness =
          falsify_incommensurability(cells, static_cast<int>(n_max),
                                     state_budget);
      json j;
      j["n_max"] = n_max;
      j["witness"] =
          witness ? witness_json(spec.basis, cells, *witness) : json(nullptr);
      *out.os << j.dump(2) << '\n';
      return 0;
    }

    if (*mc_cmd) {
      const ParsedSpec spec = load_spec(spec_path);
      if (n_single < 1) throw Error("--n must be at least 1");
      const EntropyValue ev =
          mc_entropy(spec.dist, n_single, samples, seed);
      OutStream out(g.out);
      const double scale = log_base == 2 ? 1.0 / std::log(2.0) : 1.0;
      json j;
      j["n"] = n_single;
      j["samples"] = samples;
      j["seed"] = seed;
      j["h_mc"] = static_cast<double>(ev.nats) * scale;
      j["error_bound"] = static_cast<double>(ev.error_bound) * scale;
      *out.os << j.dump(2) << '\n';
      return 0;
    }
  } catch (const Error& e) {
    emit_error("computation_failed", e.what());
    return 1;
  } catch (const std::exception& e) {
    emit_error("internal", e.what());
    return 1;
  }
  return 0;
}

}  // namespace entsum
