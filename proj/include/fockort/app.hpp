#pragma once

#include "fockort/ansatz.hpp"
#include "fockort/convex_roof.hpp"
#include "fockort/fock.hpp"
#include "fockort/qfi.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace fockort::app {

enum class Command { Eval, Sweep3, Sweep4, Thermal, GridInfo, DumpLp };
enum class Format { Csv, Json };

struct RunConfig {
  Command command = Command::Eval;
  double delta = 0.01;
  int offset_n = 0;
  std::string output_path;  // empty: stdout
  Format format = Format::Csv;
  int P = 0;                // 0: default_phase_order(M)
  int max_iter = 1'000'000;
  double sweep_step = 0.05;
  int threads = 1;

  std::vector<double> populations;  // eval, dump-lp
  int lp_check = 0;                 // sweeps: LP on every k-th point, 0 = never
  double n_th = 0.5;                // thermal
  int m_min = 1;
  int m_max = 6;
  int levels = 3;                   // thermal: base solve plus refinements
  int grid_M = 4;                   // grid-info
  std::string histogram_out;        // eval sidecar files
  std::string decomposition_out;

  /// Throws std::invalid_argument on out-of-range settings.
  void validate() const;
};

using Cell = std::variant<std::monostate, long long, double, std::string, bool>;

struct Table {
  std::vector<std::pair<std::string, Cell>> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

/// Shortest decimal that round-trips to the same double.
std::string format_double(double v);

/// RFC-4180 CSV: header line then one line per row. Meta is not written.
void write_csv(std::ostream& os, const Table& table);
/// {"meta": {...}, "rows": [{column: value, ...}, ...]}
void write_json(std::ostream& os, const Table& table);
void write_table(std::ostream& os, const Table& table, Format format);

struct EvalOptions {
  double delta = 0.01;
  int P = 0;
  lp::SolveOptions solver;
};

struct EvalReport {
  explicit EvalReport(FockDiagonalState s) : state(std::move(s)) {}

  FockDiagonalState state;
  double mean_photon = 0.0;
  double n_lp = 0.0;
  int lp_iterations = 0;
  double simple_bound = 0.0;
  std::optional<DecompositionClass> classification;
  std::optional<ansatz::AnsatzResult> ansatz;
  QfiReport qfi;
  std::optional<OrtEstimate> estimate;              // rank >= 2
  std::optional<ExplicitDecomposition> decomposition;  // rank >= 2
  std::vector<std::string> warnings;
};

EvalReport evaluate(const FockDiagonalState& state, const EvalOptions& options);
Table eval_table(const EvalReport& report, const EvalOptions& options);

struct SweepOptions {
  int offset_n = 0;
  double step = 0.05;
  double delta = 0.01;
  int lp_check = 0;
  int threads = 1;
  lp::SolveOptions solver;
};

Table sweep3(const SweepOptions& options);
Table sweep4(const SweepOptions& options);

struct ThermalOptions {
  double n_th = 0.5;
  int m_min = 1;
  int m_max = 6;
  double delta = 0.05;
  int levels = 3;
  int threads = 1;
  lp::SolveOptions solver;
};

Table thermal(const ThermalOptions& options);
Table grid_info(int M, double delta);

/// Runs one CLI invocation. Exit codes: 0 success, 2 invalid input,
/// 3 solver failure, 4 capacity.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Evaluates fn(0..count-1) on `threads` workers; results keep index order.
template <class T, class Fn>
std::vector<T> parallel_map(std::size_t count, int threads, Fn fn);

}  // namespace fockort::app

#include "fockort/detail/parallel_map.hpp"
