#include "su11/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include "su11/errors.hpp"
#include "su11/fock.hpp"
#include "su11/limits.hpp"
#include "su11/qfi.hpp"
#include "su11/sensitivity.hpp"
#include "parallel.hpp"

namespace su11 {

namespace {

constexpr std::pair<Quantity, std::string_view> kQuantityNames[] = {
    {Quantity::delta_phi_ideal, "delta_phi_ideal"},
    {Quantity::delta_phi_lossy, "delta_phi_lossy"},
    {Quantity::qfi_ideal, "qfi_ideal"},
    {Quantity::qfi_lossy, "qfi_lossy"},
    {Quantity::qcrb, "qcrb"},
    {Quantity::qcrb_lossy, "qcrb_lossy"},
    {Quantity::sql, "sql"},
    {Quantity::hl, "hl"},
    {Quantity::n_t, "n_t"},
    {Quantity::oracle_delta_phi_a, "oracle_delta_phi_a"},
    {Quantity::oracle_delta_phi_b, "oracle_delta_phi_b"},
    {Quantity::oracle_qfi, "oracle_qfi"},
    {Quantity::oracle_n_t, "oracle_n_t"},
};

const std::vector<std::string> kAxisParams = {"g", "beta", "phi", "T1", "T2", "eta", "alpha", "T"};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    out.push_back(trim(s.substr(start, comma == std::string_view::npos ? s.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_double(const std::string& s, const std::string& where) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size() || !std::isfinite(v)) {
    throw ValidationError(where + ": expected a finite number, got '" + s + "'");
  }
  return v;
}

int parse_int(const std::string& s, const std::string& where) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) {
    throw ValidationError(where + ": expected an integer, got '" + s + "'");
  }
  return v;
}

bool uses(const SweepSpec& s, std::initializer_list<Quantity> qs) {
  for (Quantity q : s.quantities) {
    for (Quantity r : qs) {
      if (q == r) return true;
    }
  }
  return false;
}

void set_param(Params& p, const std::string& name, double v) {
  if (name == "g") p.g = v;
  else if (name == "beta") p.beta = v;
  else if (name == "phi") p.phi = v;
  else if (name == "T1") p.T1 = v;
  else if (name == "T2") p.T2 = v;
  else if (name == "eta") p.eta = v;
  else if (name == "alpha") p.alpha = v;
  else if (name == "T") p.T1 = p.eta = v;
  else throw ValidationError("unknown axis parameter '" + name + "'");
}

}  // namespace

std::string_view to_string(Quantity q) noexcept {
  for (const auto& [k, v] : kQuantityNames) {
    if (k == q) return v;
  }
  return "unknown";
}

Quantity quantity_from_string(std::string_view name) {
  for (const auto& [k, v] : kQuantityNames) {
    if (v == name) return k;
  }
  throw ValidationError("unknown quantity '" + std::string(name) + "'");
}

Params SweepSpec::point(int i, int m) const {
  Params p = fixed;
  p.m = m;
  set_param(p, axis.param, axis.at(i));
  return p;
}

void SweepSpec::validate() const {
  const std::string where = "sweep [" + name + "]";
  if (name.empty()) throw ValidationError("sweep without a name");
  if (quantities.empty()) throw ValidationError(where + ": no quantity");
  if (m_list.empty()) throw ValidationError(where + ": empty m list");
  if (std::find(kAxisParams.begin(), kAxisParams.end(), axis.param) == kAxisParams.end()) {
    throw ValidationError(where + ": unknown axis parameter '" + axis.param + "'");
  }
  if (axis.points < 2) throw ValidationError(where + ": an axis needs at least 2 points");
  if (!(axis.lo < axis.hi)) throw ValidationError(where + ": axis needs lo < hi");
  for (int m : m_list) {
    for (int i : {0, axis.points - 1}) {
      try {
        point(i, m).validate();
      } catch (const ValidationError& e) {
        throw ValidationError(where + ": " + e.what());
      }
    }
  }
  if (axis.param == "T" && !(axis.lo > 0.0)) {
    throw ValidationError(where + ": axis T drives eta and must stay above 0");
  }
  const bool touches_T2 = axis.param == "T2";
  if (uses(*this, {Quantity::sql, Quantity::hl, Quantity::n_t, Quantity::oracle_n_t}) &&
      (fixed.T2 != 1.0 || touches_T2)) {
    throw ValidationError(where + ": photon-number limits need T2 = 1");
  }
  const bool lossless = fixed.T1 == 1.0 && fixed.T2 == 1.0 && axis.param != "T1" &&
                        axis.param != "T2" && axis.param != "T";
  if (uses(*this, {Quantity::oracle_qfi}) && !lossless) {
    throw ValidationError(where + ": oracle_qfi needs T1 = T2 = 1");
  }
}

std::vector<SweepSpec> parse_config(std::string_view text) {
  std::vector<SweepSpec> specs;
  std::vector<std::map<std::string, std::string>> seen;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string where = "line " + std::to_string(line_no);
    const auto hash = raw.find('#');
    const std::string line = trim(std::string_view(raw).substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ValidationError(where + ": malformed section header");
      SweepSpec s;
      s.name = trim(std::string_view(line).substr(1, line.size() - 2));
      if (s.name.empty()) throw ValidationError(where + ": empty section name");
      for (const auto& o : specs) {
        if (o.name == s.name) throw ValidationError(where + ": duplicate section [" + s.name + "]");
      }
      specs.push_back(std::move(s));
      seen.emplace_back();
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ValidationError(where + ": expected key = value");
    if (specs.empty()) throw ValidationError(where + ": key outside of a section");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (value.empty()) throw ValidationError(where + ": empty value for '" + key + "'");
    if (!seen.back().emplace(key, value).second) {
      throw ValidationError(where + ": duplicate key '" + key + "'");
    }
    SweepSpec& s = specs.back();
    const std::string ctx = where + " (" + key + ")";
    if (key == "quantity") {
      s.quantities.clear();
      for (const auto& q : split_list(value)) s.quantities.push_back(quantity_from_string(q));
    } else if (key == "axis") {
      s.axis.param = value;
    } else if (key == "lo") {
      s.axis.lo = parse_double(value, ctx);
    } else if (key == "hi") {
      s.axis.hi = parse_double(value, ctx);
    } else if (key == "points") {
      s.axis.points = parse_int(value, ctx);
    } else if (key == "m") {
      s.m_list.clear();
      for (const auto& m : split_list(value)) s.m_list.push_back(parse_int(m, ctx));
    } else if (key == "g") {
      s.fixed.g = parse_double(value, ctx);
    } else if (key == "beta") {
      s.fixed.beta = parse_double(value, ctx);
    } else if (key == "phi") {
      s.fixed.phi = parse_double(value, ctx);
    } else if (key == "T1") {
      s.fixed.T1 = parse_double(value, ctx);
    } else if (key == "T2") {
      s.fixed.T2 = parse_double(value, ctx);
    } else if (key == "eta") {
      s.fixed.eta = parse_double(value, ctx);
    } else if (key == "alpha") {
      s.fixed.alpha = parse_double(value, ctx);
    } else if (key == "nu") {
      s.fixed.nu = parse_int(value, ctx);
    } else {
      throw ValidationError(where + ": unknown key '" + key + "'");
    }
  }
  for (std::size_t i = 0; i < specs.size(); ++i) {
    for (const char* required : {"quantity", "axis", "lo", "hi", "points"}) {
      if (!seen[i].count(required)) {
        throw ValidationError("sweep [" + specs[i].name + "]: missing key '" + required + "'");
      }
    }
    specs[i].validate();
  }
  if (specs.empty()) throw ValidationError("config defines no sweep");
  return specs;
}

std::string serialize_config(const std::vector<SweepSpec>& specs) {
  std::ostringstream out;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const SweepSpec& s = specs[i];
    if (i) out << '\n';
    out << '[' << s.name << "]\n";
    out << "quantity = ";
    for (std::size_t k = 0; k < s.quantities.size(); ++k) out << (k ? ", " : "") << to_string(s.quantities[k]);
    out << "\naxis = " << s.axis.param << '\n';
    out << "lo = " << format_double(s.axis.lo) << '\n';
    out << "hi = " << format_double(s.axis.hi) << '\n';
    out << "points = " << s.axis.points << '\n';
    out << "m = ";
    for (std::size_t k = 0; k < s.m_list.size(); ++k) out << (k ? ", " : "") << s.m_list[k];
    out << '\n';
    const Params& p = s.fixed;
    out << "g = " << format_double(p.g) << '\n';
    out << "beta = " << format_double(p.beta) << '\n';
    out << "phi = " << format_double(p.phi) << '\n';
    out << "T1 = " << format_double(p.T1) << '\n';
    out << "T2 = " << format_double(p.T2) << '\n';
    out << "eta = " << format_double(p.eta) << '\n';
    out << "alpha = " << format_double(p.alpha) << '\n';
    out << "nu = " << p.nu << '\n';
  }
  return out.str();
}

std::vector<SweepSpec> load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ValidationError("cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_config(buf.str());
}

double evaluate(Quantity q, const Params& p) {
  switch (q) {
    case Quantity::delta_phi_ideal: return sensitivity_ideal(p).delta_phi;
    case Quantity::delta_phi_lossy: return sensitivity_lossy(p).delta_phi;
    case Quantity::qfi_ideal: return qfi_ideal(p).F;
    case Quantity::qfi_lossy: return qfi_lossy(p).F;
    case Quantity::qcrb: return qfi_ideal(p).qcrb;
    case Quantity::qcrb_lossy: return qfi_lossy(p).qcrb;
    case Quantity::sql: return limits(p).sql;
    case Quantity::hl: return limits(p).hl;
    case Quantity::n_t: return internal_photon_number(p);
    case Quantity::oracle_delta_phi_a: return numeric_sensitivity(p, Mode::a).delta_phi;
    case Quantity::oracle_delta_phi_b: return numeric_sensitivity(p, Mode::b).delta_phi;
    case Quantity::oracle_qfi: return numeric_qfi_pure(p).value;
    case Quantity::oracle_n_t: return numeric_internal_photon_number(p).value;
  }
  throw ValidationError("unhandled quantity");
}

int thread_count_from_env() {
  if (const char* env = std::getenv("SU11_THREADS"); env && *env) {
    const int n = parse_int(trim(env), "SU11_THREADS");
    if (n < 1) throw ValidationError("SU11_THREADS must be >= 1");
    return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}


Table run_sweeps(const std::vector<SweepSpec>& specs, int threads) {
  struct Task {
    const SweepSpec* spec;
    int m;
    int i;
    std::size_t first_row;
  };
  std::vector<Task> tasks;
  std::size_t rows = 0;
  for (const auto& s : specs) {
    s.validate();
    for (int m : s.m_list) {
      for (int i = 0; i < s.axis.points; ++i) {
        tasks.push_back({&s, m, i, rows});
        rows += s.quantities.size();
      }
    }
  }
  Table table(rows);
  if (threads <= 0) threads = thread_count_from_env();
  detail::parallel_for(static_cast<int>(tasks.size()), threads, [&](int k) {
    const Task& t = tasks[k];
    const Params p = t.spec->point(t.i, t.m);
    for (std::size_t q = 0; q < t.spec->quantities.size(); ++q) {
      Row& r = table[t.first_row + q];
      r.series = t.spec->name;
      r.axis = t.spec->axis.param;
      r.x = t.spec->axis.at(t.i);
      r.m = t.m;
      r.quantity = t.spec->quantities[q];
      try {
        r.value = evaluate(r.quantity, p);
      } catch (const NumericalError& e) {
        r.error = std::string(to_string(e.code()));
      }
    }
  });
  return table;
}

Table run_sweep(const SweepSpec& spec, int threads) { return run_sweeps({spec}, threads); }

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(std::ostream& out, const Table& table) {
  out << "series,axis,x,m,quantity,value,error\n";
  for (const Row& r : table) {
    out << r.series << ',' << r.axis << ',' << format_double(r.x) << ',' << r.m << ','
        << to_string(r.quantity) << ',' << (r.value ? format_double(*r.value) : "") << ','
        << r.error << '\n';
  }
}

namespace {

SweepSpec make(std::string name, std::vector<Quantity> q, Axis axis, Params fixed,
               std::vector<int> ms = {0, 1, 2, 3}) {
  return {std::move(name), std::move(q), std::move(axis), fixed, std::move(ms)};
}

Params base() {
  Params p;
  p.g = 1.0;
  p.beta = 1.0;
  p.phi = 0.4;
  return p;
}

}  // namespace

std::vector<std::string> figure_ids() {
  return {"fig2",  "fig3a",  "fig3b",  "fig5",   "fig7a",  "fig7b",  "fig8a",  "fig8b",
          "fig10", "fig11a", "fig11b", "fig12",  "fig13a", "fig13b", "fig13c", "fig13d"};
}

std::vector<SweepSpec> figure_specs(std::string_view id) {
  using Q = Quantity;
  const Axis beta_axis{"beta", 0.5, 2.0, 61};
  const Axis g_axis{"g", 0.5, 2.0, 61};
  const Axis T_axis{"T", 0.4, 1.0, 61};
  Params lossy = base();
  lossy.eta = 0.7;

  if (id == "fig2") {
    return {make("port_a", {Q::delta_phi_ideal}, {"phi", 0.05, 3.0, 60}, base()),
            make("oracle", {Q::oracle_delta_phi_a, Q::oracle_delta_phi_b}, {"phi", 0.05, 3.0, 30},
                 base())};
  }
  if (id == "fig3a") return {make("beta", {Q::delta_phi_ideal}, beta_axis, base())};
  if (id == "fig3b") return {make("g", {Q::delta_phi_ideal}, g_axis, base())};
  if (id == "fig5") {
    return {make("internal", {Q::delta_phi_lossy}, {"T1", 0.4, 1.0, 61}, base()),
            make("external", {Q::delta_phi_lossy}, {"T2", 0.4, 1.0, 61}, base())};
  }
  if (id == "fig7a") return {make("beta", {Q::qfi_ideal}, beta_axis, base())};
  if (id == "fig7b") return {make("g", {Q::qfi_ideal}, g_axis, base())};
  if (id == "fig8a") return {make("beta", {Q::delta_phi_ideal, Q::qcrb}, beta_axis, base())};
  if (id == "fig8b") return {make("g", {Q::delta_phi_ideal, Q::qcrb}, g_axis, base())};
  if (id == "fig10") return {make("T", {Q::qfi_lossy}, {"T", 0.1, 1.0, 61}, base())};
  if (id == "fig11a") return {make("beta", {Q::qfi_ideal, Q::qfi_lossy}, beta_axis, lossy)};
  if (id == "fig11b") return {make("g", {Q::qfi_ideal, Q::qfi_lossy}, g_axis, lossy)};
  if (id == "fig12") return {make("T", {Q::n_t}, T_axis, base())};
  if (id.size() == 6 && id.substr(0, 5) == "fig13" && id[5] >= 'a' && id[5] <= 'd') {
    const int m = id[5] - 'a';
    return {make("T", {Q::delta_phi_lossy, Q::sql, Q::hl, Q::qcrb_lossy, Q::qcrb}, T_axis, base(),
                 {m})};
  }
  throw ValidationError("unknown figure id '" + std::string(id) + "'");
}

Table run_figure(std::string_view id, int threads) { return run_sweeps(figure_specs(id), threads); }

}  // namespace su11
