#include "entsum/harness.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

namespace entsum {

using nlohmann::json;

namespace {

bool valid_identifier(std::string_view s) {
  if (s.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_')
    return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return true;
}

Rat parse_rat_field(const std::string& text, const std::string& field) {
  try {
    return parse_rat(text);
  } catch (const Error& e) {
    throw Error(field + ": " + e.what());
  }
}

}  // namespace

ParsedSpec parse_spec(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(std::string("spec is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error("spec: top level must be a JSON object");
  if (!j.contains("basis") || !j["basis"].is_array() || j["basis"].empty())
    throw Error("basis: must be a nonempty array");
  if (!j.contains("atoms") || !j["atoms"].is_array() || j["atoms"].empty())
    throw Error("atoms: must be a nonempty array");

  Basis basis;
  for (std::size_t i = 0; i < j["basis"].size(); ++i) {
    const json& b = j["basis"][i];
    const std::string field = "basis[" + std::to_string(i) + "]";
    if (!b.is_object() || !b.contains("symbol") || !b["symbol"].is_string() ||
        !b.contains("approx") || !b["approx"].is_string())
      throw Error(field + ": expected {\"symbol\": string, \"approx\": string}");
    BasisSymbol sym{b["symbol"].get<std::string>(),
                    b["approx"].get<std::string>()};
    if (!valid_identifier(sym.name))
      throw Error(field + ".symbol: '" + sym.name + "' is not an identifier");
    if (basis.index_of(sym.name) >= 0)
      throw Error(field + ".symbol: duplicate symbol '" + sym.name + "'");
    char* end = nullptr;
    strtold(sym.approx.c_str(), &end);
    if (sym.approx.empty() || end == nullptr || *end != '\0')
      throw Error(field + ".approx: '" + sym.approx +
                  "' is not a decimal number");
    basis.symbols.push_back(std::move(sym));
  }

  const int dim = basis.dim();
  std::vector<SymValue> atoms;
  std::vector<Rat> probs;
  for (std::size_t i = 0; i < j["atoms"].size(); ++i) {
    const json& a = j["atoms"][i];
    const std::string field = "atoms[" + std::to_string(i) + "]";
    if (!a.is_object() || !a.contains("coords") || !a["coords"].is_array() ||
        !a.contains("prob") || !a["prob"].is_string())
      throw Error(field +
                  ": expected {\"coords\": [rational strings], \"prob\": "
                  "rational string}");
    if (static_cast<int>(a["coords"].size()) != dim)
      throw Error(field + ".coords: expected " + std::to_string(dim) +
                  " coordinates");
    SymValue v = sym_zero(dim);
    for (int t = 0; t < dim; ++t) {
      const json& c = a["coords"][static_cast<std::size_t>(t)];
      const std::string cfield = field + ".coords[" + std::to_string(t) + "]";
      if (!c.is_string()) throw Error(cfield + ": expected a rational string");
      v(t) = parse_rat_field(c.get<std::string>(), cfield);
    }
    const Rat p =
        parse_rat_field(a["prob"].get<std::string>(), field + ".prob");
    if (p <= 0) throw Error(field + ".prob: must be positive");
    for (const SymValue& seen : atoms)
      if (sym_eq(seen, v)) throw Error(field + ": duplicate atom");
    atoms.push_back(std::move(v));
    probs.push_back(p);
  }
  // DiscreteDist reports "probabilities sum to <s>" when they do not sum to 1
  DiscreteDist dist =
      DiscreteDist::make(basis, std::move(atoms), std::move(probs));
  return ParsedSpec{std::move(basis), std::move(dist)};
}

ParsedSpec load_spec(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open spec file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_spec(ss.str());
}

SymValue parse_atom_expr(const Basis& basis, std::string_view text) {
  std::string clean;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) clean.push_back(c);
  if (clean.empty()) throw Error("empty atom expression");
  SymValue v = sym_zero(basis.dim());
  std::size_t i = 0;
  bool first = true;
  while (i < clean.size()) {
    int sign = 1;
    if (clean[i] == '+' || clean[i] == '-') {
      sign = clean[i] == '-' ? -1 : 1;
      ++i;
    } else if (!first) {
      throw Error("atom expression '" + std::string(text) +
                  "': expected '+' or '-' between terms");
    }
    first = false;
    if (i >= clean.size())
      throw Error("atom expression '" + std::string(text) +
                  "': dangling sign");
    Rat coef(1);
    bool have_coef = false;
    if (std::isdigit(static_cast<unsigned char>(clean[i]))) {
      std::size_t j = i;
      while (j < clean.size() &&
             (std::isdigit(static_cast<unsigned char>(clean[j])) ||
              clean[j] == '/'))
        ++j;
      coef = parse_rat_field(clean.substr(i, j - i),
                             "atom expression '" + std::string(text) + "'");
      have_coef = true;
      i = j;
      if (i < clean.size() && clean[i] == '*') ++i;
    }
    std::string name;
    if (i < clean.size() &&
        (std::isalpha(static_cast<unsigned char>(clean[i])) ||
         clean[i] == '_')) {
      std::size_t j = i;
      while (j < clean.size() &&
             (std::isalnum(static_cast<unsigned char>(clean[j])) ||
              clean[j] == '_'))
        ++j;
      name = clean.substr(i, j - i);
      i = j;
    }
    if (sign < 0) coef = -coef;
    if (!name.empty()) {
      const int idx = basis.index_of(name);
      if (idx < 0)
        throw Error("atom expression '" + std::string(text) +
                    "': unknown basis symbol '" + name + "'");
      v(idx) += coef;
      continue;
    }
    if (!have_coef)
      throw Error("atom expression '" + std::string(text) +
                  "': expected a coefficient or symbol");
    if (coef == 0) continue;
    // bare constant: attach to the unique symbol approximating 1
    int unit = -1;
    for (int t = 0; t < basis.dim(); ++t) {
      const char* s = basis.symbols[static_cast<std::size_t>(t)].approx.c_str();
      if (strtold(s, nullptr) == 1.0L) {
        if (unit >= 0)
          throw Error("atom expression '" + std::string(text) +
                      "': bare constant is ambiguous (several unit symbols)");
        unit = t;
      }
    }
    if (unit < 0)
      throw Error("atom expression '" + std::string(text) +
                  "': bare constant needs a basis symbol with approx 1");
    v(unit) += coef;
  }
  return v;
}

Collection parse_cells(const ParsedSpec& spec, const std::string& cell_spec) {
  std::vector<std::vector<SymValue>> cells;
  std::size_t start = 0;
  auto take = [&](std::size_t end) {
    const std::string part = cell_spec.substr(start, end - start);
    std::vector<SymValue> cell;
    std::size_t a = 0;
    while (a <= part.size()) {
      std::size_t b = part.find(',', a);
      if (b == std::string::npos) b = part.size();
      const std::string atom_text = part.substr(a, b - a);
      SymValue v = parse_atom_expr(spec.basis, atom_text);
      if (!spec.dist.support.contains(v))
        throw Error("cell atom '" + atom_text + "' (= " +
                    render_sym(spec.basis, v) + ") is not in the support");
      cell.push_back(std::move(v));
      a = b + 1;
      if (b == part.size()) break;
    }
    cells.push_back(std::move(cell));
  };
  for (std::size_t i = 0; i < cell_spec.size(); ++i) {
    if (cell_spec[i] == '|') {
      take(i);
      start = i + 1;
    }
  }
  take(cell_spec.size());
  return Collection(spec.dist.support, std::move(cells));
}

namespace {

struct BoundColumn {
  std::string name;
  std::optional<BoundReport> report;
};

}  // namespace

ConvergenceTable run_convergence(const ParsedSpec& spec,
                                 const std::vector<long>& grid,
                                 const std::vector<std::string>& bounds,
                                 const RunOptions& opts) {
  if (grid.empty()) throw Error("empty N grid");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < 1) throw Error("grid values must be at least 1");
    if (i > 0 && grid[i] <= grid[i - 1])
      throw Error("grid must be strictly ascending");
  }
  const DiscreteDist& d = spec.dist;
  const bool deterministic = d.size() == 1;

  ConvergenceTable table;
  table.h_column = opts.use_mc ? "H_mc" : "H_exact";
  table.bound_names = bounds;

  std::vector<BoundColumn> columns;
  std::optional<RankResult> rank_result;
  auto need_rank = [&]() -> const RankResult& {
    if (!rank_result)
      rank_result = compute_rank(d.support, opts.rank_node_budget);
    table.rank = rank_result->rank;
    return *rank_result;
  };
  for (const std::string& name : bounds) {
    BoundColumn col{name, std::nullopt};
    if (deterministic) {
      table.notes.push_back(name + ": vacuous for a deterministic variable");
      columns.push_back(std::move(col));
      continue;
    }
    if (name == "thm1") {
      if (!detect_lattice(d.support))
        throw Error("thm1 requires a lattice support");
      col.report = thm1_report(var_over_h2(d));
    } else if (name == "thm2") {
      col.report = thm2_report(d.probs);
    } else if (name == "thm4") {
      const RankResult& rr = need_rank();
      if (!rr.certificate.leftover.empty())
        throw Error(
            "thm4 requires a covering certificate; the rank certificate "
            "leaves atoms uncovered");
      const auto reports = thm4_report(rr.certificate, d);
      col.report = reports.front();  // equality or lower case
    } else if (name == "thm7") {
      col.report = thm7_report(need_rank().certificate, d);
    } else if (name == "cor9") {
      const RankResult& rr = need_rank();
      BoundReport rep = thm7_report(rr.certificate, d);
      rep.name = BoundName::cor9;
      col.report = rep;
    } else {
      throw Error("unknown bound '" + name +
                  "' (expected thm1, thm2, thm4, thm7 or cor9)");
    }
    columns.push_back(std::move(col));
  }

  bool overflowed = false;
  for (long target : grid) {
    ConvergenceRow row;
    row.n = target;
    if (opts.use_mc) {
      const EntropyValue ev = mc_entropy(d, target, opts.samples, opts.seed);
      row.h = static_cast<double>(ev.nats);
      row.h_error_bound = static_cast<double>(ev.error_bound);
    } else if (!overflowed) {
      try {
        const EntropyValue ev =
            entropy(convolve_iid(d, target, opts.max_support));
        row.h = static_cast<double>(ev.nats);
        row.h_error_bound = static_cast<double>(ev.error_bound);
      } catch (const SupportOverflowError& e) {
        // an overflow below this N repeats for every larger N
        overflowed = true;
        table.notes.push_back("support overflow at N=" +
                              std::to_string(e.n_reached) +
                              "; larger rows have no exact entropy");
      }
    }
    for (const BoundColumn& col : columns) {
      std::optional<double> value, gap;
      if (col.report) {
        value = static_cast<double>(col.report->value_at(target));
        if (row.h) gap = *row.h - *value;
      }
      row.bounds.push_back(value);
      row.gaps.push_back(gap);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

FitResult fit_scaling(const std::vector<std::pair<long, double>>& points,
                      long lo, long hi) {
  std::vector<std::pair<long, double>> window;
  for (const auto& p : points)
    if (p.first >= lo && p.first <= hi) window.push_back(p);
  if (window.size() < 3)
    throw Error("degenerate fit window: need at least 3 rows, have " +
                std::to_string(window.size()));
  long double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [n, h] : window) {
    const long double x = std::log(static_cast<long double>(n));
    sx += x;
    sy += h;
    sxx += x * x;
    sxy += x * static_cast<long double>(h);
  }
  const long double m = static_cast<long double>(window.size());
  const long double denom = m * sxx - sx * sx;
  if (denom == 0) throw Error("degenerate fit window: ln N has no spread");
  const long double slope = (m * sxy - sx * sy) / denom;
  const long double intercept = (sy - slope * sx) / m;
  long double max_res = 0;
  for (const auto& [n, h] : window) {
    const long double x = std::log(static_cast<long double>(n));
    const long double r = std::fabs(static_cast<long double>(h) -
                                    (slope * x + intercept));
    if (r > max_res) max_res = r;
  }
  FitResult out;
  out.slope = static_cast<double>(slope);
  out.intercept = static_cast<double>(intercept);
  out.n_lo = window.front().first;
  out.n_hi = window.back().first;
  out.max_residual = static_cast<double>(max_res);
  return out;
}

std::string fmt_sig(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  for (int digits = 1; digits <= 12; ++digits) {
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    if (std::strtod(buf, nullptr) == v) return buf;
  }
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_csv(std::ostream& os, const ConvergenceTable& t, int log_base) {
  const double scale =
      log_base == 2 ? 1.0 / std::numbers::ln2_v<double> : 1.0;
  os << "N," << t.h_column;
  for (const std::string& name : t.bound_names) {
    os << ',' << name << ',';
    os << (t.bound_names.size() == 1 ? std::string("gap") : "gap_" + name);
  }
  os << '\n';
  for (const ConvergenceRow& row : t.rows) {
    os << row.n << ',';
    if (row.h) os << fmt_sig(*row.h * scale);
    for (std::size_t b = 0; b < t.bound_names.size(); ++b) {
      os << ',';
      if (row.bounds[b]) os << fmt_sig(*row.bounds[b] * scale);
      os << ',';
      if (row.gaps[b]) os << fmt_sig(*row.gaps[b] * scale);
    }
    os << '\n';
  }
}

}  // namespace entsum
