#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "su11/model.hpp"

namespace su11 {

enum class Quantity {
  delta_phi_ideal,
  delta_phi_lossy,
  qfi_ideal,
  qfi_lossy,
  qcrb,
  qcrb_lossy,
  sql,
  hl,
  n_t,
  oracle_delta_phi_a,
  oracle_delta_phi_b,
  oracle_qfi,
  oracle_n_t,
};

std::string_view to_string(Quantity q) noexcept;
Quantity quantity_from_string(std::string_view name);

/// Linear grid over one parameter. `T` drives internal mode-a loss: it sets
/// both T1 and eta.
struct Axis {
  std::string param = "phi";
  double lo = 0.0;
  double hi = 1.0;
  int points = 2;

  double at(int i) const { return points == 1 ? lo : lo + (hi - lo) * i / (points - 1); }
  bool operator==(const Axis&) const = default;
};

struct SweepSpec {
  std::string name;
  std::vector<Quantity> quantities;
  Axis axis;
  Params fixed;
  std::vector<int> m_list{0};

  void validate() const;
  Params point(int i, int m) const;
  bool operator==(const SweepSpec&) const = default;
};

// Sections of `key = value` lines; '#' starts a comment.
std::vector<SweepSpec> parse_config(std::string_view text);
std::string serialize_config(const std::vector<SweepSpec>& specs);
std::vector<SweepSpec> load_config(const std::string& path);

struct Row {
  std::string series;
  std::string axis;
  double x = 0.0;
  int m = 0;
  Quantity quantity = Quantity::delta_phi_ideal;
  std::optional<double> value;
  std::string error;  // ErrorCode name when value is empty
};

using Table = std::vector<Row>;

// Evaluates one quantity; throws NumericalError for singular points.
double evaluate(Quantity q, const Params& p);

// Worker count from SU11_THREADS, else the hardware concurrency.
int thread_count_from_env();

Table run_sweep(const SweepSpec& spec, int threads = 0);
Table run_sweeps(const std::vector<SweepSpec>& specs, int threads = 0);

std::string format_double(double v);
void write_csv(std::ostream& out, const Table& table);

std::vector<std::string> figure_ids();
std::vector<SweepSpec> figure_specs(std::string_view id);
Table run_figure(std::string_view id, int threads = 0);

}  // namespace su11
