#include "fockort/app.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fockort::app {

namespace {

constexpr const char* kVersion = "1.0.0";

std::string join_doubles(std::span<const double> v, char sep) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += sep;
    s += format_double(v[i]);
  }
  return s;
}

Cell opt_param(const std::map<std::string, double>& params, const std::string& key) {
  auto it = params.find(key);
  if (it == params.end()) return std::monostate{};
  return it->second;
}

/// Integer K with K * step == 1, so lattice populations are exact multiples of 1/K.
int lattice_divisions(double step) {
  if (!(step > 0.0 && step <= 0.5)) throw std::invalid_argument("sweep step must lie in (0, 0.5]");
  const double k = std::round(1.0 / step);
  if (std::abs(k * step - 1.0) > 1e-9) throw std::invalid_argument("sweep step must divide 1 evenly");
  return static_cast<int>(k);
}

double lp_value(const FockWindow& w, double delta, const lp::SolveOptions& solver) {
  EstimateOptions eo;
  eo.solver = solver;
  return lp_nonclassicality(FockDiagonalState::trimmed(w), delta, eo);
}

nlohmann::ordered_json to_json(const Cell& c) {
  return std::visit(
      [](const auto& v) -> nlohmann::ordered_json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return nullptr;
        } else if constexpr (std::is_same_v<T, double>) {
          if (!std::isfinite(v)) return nullptr;
          return v;
        } else {
          return v;
        }
      },
      c);
}

std::string csv_field(const Cell& c) {
  std::string raw = std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return "";
        } else if constexpr (std::is_same_v<T, double>) {
          return format_double(v);
        } else if constexpr (std::is_same_v<T, bool>) {
          return v ? "true" : "false";
        } else if constexpr (std::is_same_v<T, long long>) {
          return std::to_string(v);
        } else {
          return v;
        }
      },
      c);
  if (raw.find_first_of(",\"\r\n") == std::string::npos) return raw;
  std::string quoted = "\"";
  for (char ch : raw) {
    if (ch == '"') quoted += '"';
    quoted += ch;
  }
  quoted += '"';
  return quoted;
}

}  // namespace

void RunConfig::validate() const {
  if (!(delta > 0.0 && delta <= 0.5)) throw std::invalid_argument("--delta must lie in (0, 0.5]");
  if (!(sweep_step > 0.0 && sweep_step <= 0.5)) throw std::invalid_argument("--step must lie in (0, 0.5]");
  if (offset_n < 0) throw std::invalid_argument("--n must be nonnegative");
  if (threads < 1) throw std::invalid_argument("--threads must be at least 1");
  if (max_iter < 1) throw std::invalid_argument("--max-iter must be at least 1");
  if (lp_check < 0) throw std::invalid_argument("--lp-check must be nonnegative");
  if (P < 0) throw std::invalid_argument("--expansion-P must be positive");
  if (command == Command::Eval || command == Command::DumpLp) {
    if (populations.empty()) throw std::invalid_argument("--p is required");
    const int M = static_cast<int>(populations.size());
    if (P != 0 && P < std::max(3, M)) throw std::invalid_argument("--expansion-P must be at least max(3, M)");
  }
  if (command == Command::Thermal) {
    if (!(n_th > 0.0)) throw std::invalid_argument("--n-th must be positive");
    if (m_min < 1 || m_max < m_min) throw std::invalid_argument("need 1 <= --m-min <= --m-max");
    if (levels < 1) throw std::invalid_argument("--levels must be at least 1");
  }
  if (command == Command::GridInfo && grid_M < 2) throw std::invalid_argument("--M must be at least 2");
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_csv(std::ostream& os, const Table& table) {
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i) os << ',';
    os << csv_field(table.columns[i]);
  }
  os << "\r\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) os << ',';
      os << csv_field(row[i]);
    }
    os << "\r\n";
  }
}

void write_json(std::ostream& os, const Table& table) {
  nlohmann::ordered_json doc;
  doc["meta"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : table.meta) doc["meta"][k] = to_json(v);
  doc["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) {
    nlohmann::ordered_json r = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < row.size(); ++i) r[table.columns[i]] = to_json(row[i]);
    doc["rows"].push_back(std::move(r));
  }
  os << doc.dump(2) << '\n';
}

void write_table(std::ostream& os, const Table& table, Format format) {
  if (format == Format::Csv)
    write_csv(os, table);
  else
    write_json(os, table);
}

EvalReport evaluate(const FockDiagonalState& state, const EvalOptions& options) {
  EvalReport r(state);
  r.mean_photon = mean_photon(state);
  r.simple_bound = simple_bound(state);
  r.qfi = quadrature_qfi(state);
  if (state.rank() == 1) {
    r.n_lp = r.mean_photon;
    return r;
  }
  EstimateOptions eo;
  eo.solver = options.solver;
  r.estimate = estimate_ort(state, options.delta, eo);
  r.n_lp = r.estimate->n_upper;
  r.lp_iterations = r.estimate->iterations;
  r.warnings = r.estimate->warnings;
  r.classification = r.simple_bound - r.n_lp <= default_classification_tol(options.delta)
                         ? DecompositionClass::SimplyDecomposed
                         : DecompositionClass::CompositelyDecomposed;
  if (state.rank() == 3) r.ansatz = ansatz::classify_rank3(state);
  if (state.rank() == 4) r.ansatz = ansatz::classify_rank4(state);
  const int P = options.P > 0 ? options.P : default_phase_order(state.rank());
  r.decomposition = expand_histogram(state, r.estimate->histogram, P);
  return r;
}

Table eval_table(const EvalReport& r, const EvalOptions& options) {
  Table t;
  t.meta = {{"command", std::string("eval")},
            {"version", std::string(kVersion)},
            {"delta", options.delta},
            {"offset", static_cast<long long>(r.state.offset())}};
  t.columns = {"offset",        "rank",          "populations",  "mean_photon",    "delta",
               "n_lp",          "lp_iterations", "simple_bound", "classification", "ansatz_label",
               "ansatz_value",  "ansatz_upper_bound_only",       "fisher",         "power",
               "support_size",  "support",       "expansion_P",  "decomposition_atoms",
               "weighted_alpha_square_abs",      "warnings"};

  std::string support;
  long long support_size = 0;
  if (r.estimate) {
    const auto& h = r.estimate->histogram;
    support_size = static_cast<long long>(h.support_size());
    for (const auto& [idx, w] : h.weights) {
      if (!support.empty()) support += ';';
      for (int k = 1; k < h.grid->rank(); ++k) {
        if (k > 1) support += ' ';
        support += format_double(h.grid->free_amplitude(idx, k));
      }
      support += ':' + format_double(w);
    }
  }
  std::string warnings;
  for (const auto& w : r.warnings) warnings += (warnings.empty() ? "" : "; ") + w;

  std::vector<Cell> row;
  row.emplace_back(static_cast<long long>(r.state.offset()));
  row.emplace_back(static_cast<long long>(r.state.rank()));
  row.emplace_back(join_doubles(r.state.populations(), ' '));
  row.emplace_back(r.mean_photon);
  row.emplace_back(options.delta);
  row.emplace_back(r.n_lp);
  row.emplace_back(static_cast<long long>(r.lp_iterations));
  row.emplace_back(r.simple_bound);
  row.emplace_back(r.classification ? Cell(to_string(*r.classification)) : Cell());
  row.emplace_back(r.ansatz ? Cell(ansatz::to_string(r.ansatz->label)) : Cell());
  row.emplace_back(r.ansatz ? Cell(r.ansatz->value) : Cell());
  row.emplace_back(r.ansatz ? Cell(r.ansatz->upper_bound_only) : Cell());
  row.emplace_back(r.qfi.fisher);
  row.emplace_back(r.qfi.power);
  row.emplace_back(support_size);
  row.emplace_back(support);
  row.emplace_back(r.decomposition ? Cell(static_cast<long long>(r.decomposition->phase_order)) : Cell());
  row.emplace_back(r.decomposition ? Cell(static_cast<long long>(r.decomposition->atoms.size())) : Cell());
  row.emplace_back(r.decomposition ? Cell(std::abs(r.decomposition->weighted_alpha_square())) : Cell());
  row.emplace_back(warnings);
  t.rows.push_back(std::move(row));
  return t;
}

Table sweep3(const SweepOptions& o) {
  const int K = lattice_divisions(o.step);
  if (o.lp_check > 0 && !(o.delta > 0.0 && o.delta <= 0.5)) throw std::invalid_argument("delta must lie in (0, 0.5]");
  std::vector<std::pair<int, int>> lattice;
  for (int i = 0; i <= K; ++i)
    for (int j = 0; i + j <= K; ++j) lattice.emplace_back(i, j);

  Table t;
  t.meta = {{"command", std::string("sweep3")}, {"version", std::string(kVersion)}, {"n", static_cast<long long>(o.offset_n)},
            {"step", o.step},                    {"delta", o.delta},                 {"lp_check", static_cast<long long>(o.lp_check)}};
  t.columns = {"n", "p2", "p1", "p0", "label", "value", "f", "g", "lp_value", "lp_minus_ansatz"};
  t.rows = parallel_map<std::vector<Cell>>(lattice.size(), o.threads, [&](std::size_t idx) {
    const auto [i, j] = lattice[idx];
    const double p2 = static_cast<double>(i) / K;
    const double p1 = static_cast<double>(j) / K;
    const double p0 = static_cast<double>(K - i - j) / K;
    const FockWindow w(o.offset_n, {p0, p1, p2});
    const auto a = ansatz::classify_rank3(w);
    std::vector<Cell> row{static_cast<long long>(o.offset_n), p2, p1, p0, ansatz::to_string(a.label), a.value,
                          opt_param(a.params, "f"), opt_param(a.params, "g")};
    if (o.lp_check > 0 && idx % static_cast<std::size_t>(o.lp_check) == 0) {
      const double v = lp_value(w, o.delta, o.solver);
      row.emplace_back(v);
      row.emplace_back(v - a.value);
    } else {
      row.emplace_back(std::monostate{});
      row.emplace_back(std::monostate{});
    }
    return row;
  });
  return t;
}

Table sweep4(const SweepOptions& o) {
  const int K = lattice_divisions(o.step);
  struct Node {
    int i, j, l;
  };
  std::vector<Node> lattice;
  for (int i = 0; i <= K; ++i)
    for (int j = 0; i + j <= K; ++j)
      for (int l = 0; i + j + l <= K; ++l) lattice.push_back({i, j, l});

  Table t;
  t.meta = {{"command", std::string("sweep4")}, {"version", std::string(kVersion)}, {"n", static_cast<long long>(o.offset_n)},
            {"step", o.step},                    {"delta", o.delta},                 {"lp_check", static_cast<long long>(o.lp_check)}};
  t.columns = {"n", "p3", "p2", "p1", "p0", "label", "value", "f", "g", "lp_value", "lp_minus_ansatz"};
  t.rows = parallel_map<std::vector<Cell>>(lattice.size(), o.threads, [&](std::size_t idx) {
    const auto [i, j, l] = lattice[idx];
    const double p3 = static_cast<double>(i) / K;
    const double p2 = static_cast<double>(j) / K;
    const double p1 = static_cast<double>(l) / K;
    const double p0 = static_cast<double>(K - i - j - l) / K;
    const FockWindow w(o.offset_n, {p0, p1, p2, p3});
    const auto a = ansatz::classify_rank4(w);
    Cell f = opt_param(a.params, "f");
    for (int k = 0; k < 4; ++k)
      if (auto fk = opt_param(a.params, "f" + std::to_string(k)); !std::holds_alternative<std::monostate>(fk)) f = fk;
    std::vector<Cell> row{static_cast<long long>(o.offset_n), p3, p2, p1, p0, ansatz::to_string(a.label), a.value, f,
                          opt_param(a.params, "g")};
    if (o.lp_check > 0 && idx % static_cast<std::size_t>(o.lp_check) == 0) {
      const double v = lp_value(w, o.delta, o.solver);
      row.emplace_back(v);
      row.emplace_back(v - a.value);
    } else {
      row.emplace_back(std::monostate{});
      row.emplace_back(std::monostate{});
    }
    return row;
  });
  return t;
}

Table thermal(const ThermalOptions& o) {
  Table t;
  t.meta = {{"command", std::string("thermal")}, {"version", std::string(kVersion)}, {"n_th", o.n_th},
            {"delta", o.delta},                   {"levels", static_cast<long long>(o.levels)}};
  t.columns = {"M", "populations", "mean_photon", "n_lp", "ratio", "final_delta", "grid_size", "closed_form"};
  const auto count = static_cast<std::size_t>(o.m_max - o.m_min + 1);
  t.rows = parallel_map<std::vector<Cell>>(count, o.threads, [&](std::size_t idx) {
    const int M = o.m_min + static_cast<int>(idx);
    const auto state = truncated_thermal(o.n_th, M);
    const double n_M = mean_photon(state);
    std::vector<Cell> row{static_cast<long long>(M), join_doubles(state.populations(), ' '), n_M};
    if (state.rank() == 1) {
      row.insert(row.end(), {0.0, std::monostate{}, std::monostate{}, 0LL, 0.0});
      return row;
    }
    EstimateOptions eo;
    eo.solver = o.solver;
    const auto ref = refine(state, o.delta, o.levels, eo);
    const double n = ref.final_estimate.n_upper;
    row.emplace_back(n);
    row.emplace_back(n / n_M);
    row.emplace_back(ref.levels.back().delta);
    row.emplace_back(static_cast<long long>(ref.levels.back().grid_size));
    row.emplace_back(state.rank() == 2 ? Cell(rank2_closed_form(state.offset(), state[1])) : Cell());
    return row;
  });
  return t;
}

Table grid_info(int M, double delta) {
  if (M < 2) throw std::invalid_argument("grid rank must be at least 2");
  if (!(delta > 0.0 && delta <= 0.5)) throw std::invalid_argument("delta must lie in (0, 0.5]");
  const std::size_t points = count_grid_points(M, delta);
  // Constraint matrix, objective and the lattice indices kept by the grid.
  const std::size_t bytes = points * (static_cast<std::size_t>(M) + 1) * sizeof(double) +
                            points * static_cast<std::size_t>(M - 1) * sizeof(int);
  Table t;
  t.meta = {{"command", std::string("grid-info")}, {"version", std::string(kVersion)}};
  t.columns = {"M", "delta", "radius_sq", "points", "lp_bytes"};
  t.rows.push_back({static_cast<long long>(M), delta, lattice_radius_sq(delta), static_cast<long long>(points),
                    static_cast<long long>(bytes)});
  return t;
}

namespace {

FockDiagonalState state_from(const RunConfig& cfg) {
  return FockDiagonalState::trimmed(FockWindow(cfg.offset_n, cfg.populations));
}

void with_output(const std::string& path, std::ostream& fallback, const std::function<void(std::ostream&)>& body) {
  if (path.empty() || path == "-") {
    body(fallback);
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::invalid_argument("cannot open output file " + path);
  body(f);
  if (!f) throw std::runtime_error("failed writing " + path);
}

int execute(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  cfg.validate();
  lp::SolveOptions solver;
  solver.max_iter = cfg.max_iter;
  Table table;
  switch (cfg.command) {
    case Command::Eval: {
      EvalOptions eo{.delta = cfg.delta, .P = cfg.P, .solver = solver};
      const auto state = state_from(cfg);
      const auto report = evaluate(state, eo);
      for (const auto& w : report.warnings) err << "warning: " << w << '\n';
      if (!cfg.histogram_out.empty()) {
        if (!report.estimate) throw std::invalid_argument("rank-1 states have no histogram");
        with_output(cfg.histogram_out, out, [&](std::ostream& os) { write_histogram_csv(os, report.estimate->histogram); });
      }
      if (!cfg.decomposition_out.empty()) {
        if (!report.decomposition) throw std::invalid_argument("rank-1 states have no decomposition");
        with_output(cfg.decomposition_out, out,
                    [&](std::ostream& os) { write_decomposition_json(os, *report.decomposition); });
      }
      table = eval_table(report, eo);
      break;
    }
    case Command::Sweep3:
    case Command::Sweep4: {
      SweepOptions so{.offset_n = cfg.offset_n,
                      .step = cfg.sweep_step,
                      .delta = cfg.delta,
                      .lp_check = cfg.lp_check,
                      .threads = cfg.threads,
                      .solver = solver};
      table = cfg.command == Command::Sweep3 ? sweep3(so) : sweep4(so);
      break;
    }
    case Command::Thermal: {
      ThermalOptions to{.n_th = cfg.n_th,
                        .m_min = cfg.m_min,
                        .m_max = cfg.m_max,
                        .delta = cfg.delta,
                        .levels = cfg.levels,
                        .threads = cfg.threads,
                        .solver = solver};
      table = thermal(to);
      break;
    }
    case Command::GridInfo:
      table = grid_info(cfg.grid_M, cfg.delta);
      break;
    case Command::DumpLp: {
      const auto state = state_from(cfg);
      if (state.rank() < 2) throw std::invalid_argument("dump-lp needs a state of rank >= 2");
      const auto grid = build_grid(state.rank(), cfg.delta);
      const auto problem = assemble_lp(state, grid);
      with_output(cfg.output_path, out, [&](std::ostream& os) { lp::write_dump(os, problem); });
      return 0;
    }
  }
  with_output(cfg.output_path, out, [&](std::ostream& os) { write_table(os, table, cfg.format); });
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  std::string format = "csv";
  bool delta_given = false;

  CLI::App app{"Nonclassicality of Fock-diagonal states via convex-roof linear programming", "fockort"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--out", cfg.output_path, "Output file (default: stdout)");
    sub->add_option("--max-iter", cfg.max_iter, "Simplex iteration limit");
    sub->add_option("--threads", cfg.threads, "Worker threads");
  };
  auto add_delta = [&](CLI::App* sub) {
    sub->add_option_function<double>(
        "--delta",
        [&](double d) {
          cfg.delta = d;
          delta_given = true;
        },
        "Amplitude lattice spacing");
  };

  auto* eval = app.add_subcommand("eval", "Evaluate a single Fock-diagonal state");
  eval->add_option("--p", cfg.populations, "Populations p_n, p_{n+1}, ...")->delimiter(',')->required();
  eval->add_option("--n", cfg.offset_n, "Photon number of the first population");
  eval->add_option("--expansion-P", cfg.P, "Phase order of the roots-of-unity expansion");
  eval->add_option("--histogram-out", cfg.histogram_out, "Write the LP histogram as CSV");
  eval->add_option("--decomposition-out", cfg.decomposition_out, "Write the expanded decomposition as JSON");
  add_delta(eval);
  add_common(eval);

  auto* s3 = app.add_subcommand("sweep3", "Rank-3 phase diagram over p_{n+2} + p_{n+1} <= 1");
  auto* s4 = app.add_subcommand("sweep4", "Rank-4 phase diagram over p_{n+3} + p_{n+2} + p_{n+1} <= 1");
  for (auto* sub : {s3, s4}) {
    sub->add_option("--n", cfg.offset_n, "Photon number of the first population");
    sub->add_option("--step", cfg.sweep_step, "Lattice step in population space");
    sub->add_option("--lp-check", cfg.lp_check, "Run the LP on every k-th lattice point (0 disables)");
    add_delta(sub);
    add_common(sub);
  }

  auto* th = app.add_subcommand("thermal", "Truncated thermal states over a range of M");
  th->add_option("--n-th", cfg.n_th, "Thermal mean photon number");
  th->add_option("--m-min", cfg.m_min, "Smallest truncation M");
  th->add_option("--m-max", cfg.m_max, "Largest truncation M");
  th->add_option("--levels", cfg.levels, "Lattice levels: one base solve plus refinements");
  add_delta(th);
  add_common(th);

  auto* gi = app.add_subcommand("grid-info", "Lattice size and projected LP memory");
  gi->add_option("--M", cfg.grid_M, "Rank of the state")->required();
  add_delta(gi);
  add_common(gi);

  auto* dl = app.add_subcommand("dump-lp", "Write the convex-roof LP in text form");
  dl->add_option("--p", cfg.populations, "Populations p_n, p_{n+1}, ...")->delimiter(',')->required();
  dl->add_option("--n", cfg.offset_n, "Photon number of the first population");
  add_delta(dl);
  add_common(dl);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return 0;
    }
    app.exit(e, out, err);
    return 2;
  }

  if (eval->parsed()) cfg.command = Command::Eval;
  if (s3->parsed()) cfg.command = Command::Sweep3;
  if (s4->parsed()) cfg.command = Command::Sweep4;
  if (th->parsed()) cfg.command = Command::Thermal;
  if (gi->parsed()) cfg.command = Command::GridInfo;
  if (dl->parsed()) cfg.command = Command::DumpLp;
  cfg.format = format == "json" ? Format::Json : Format::Csv;
  if (cfg.command == Command::Thermal && !delta_given) cfg.delta = 0.05;

  try {
    return execute(cfg, out, err);
  } catch (const CapacityError& e) {
    err << "error: " << e.what() << '\n';
    return 4;
  } catch (const SolverError& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace fockort::app
