#pragma once

// Front-end plumbing shared by the command-line tool and the tests:
// key-value scenario configs, locale-independent CSV serialization
// (doubles at 17 significant digits so reruns are byte-comparable),
// complex matrix files with `a+bj` literals, and the orchestration that
// turns a RunManifest into an ExperimentResult on disk.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

#include "bdris/channel.hpp"
#include "bdris/evaluation.hpp"
#include "bdris/projections.hpp"

namespace bdris {

namespace detail {

inline std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw std::invalid_argument(key + ": cannot parse '" + text + "'");
  }
  return value;
}

}  // namespace detail

// Parses a key-value scenario document.  Entries are `key = value`,
// separated by newlines, commas or semicolons; `#` starts a comment.
// Absent keys keep the reference-scenario defaults; unknown keys are
// rejected.  The assembled config is validated before it is returned.
inline ScenarioConfig parse_config(const std::string& text) {
  ScenarioConfig cfg;
  std::string normalized = text;
  for (char& c : normalized) {
    if (c == ',' || c == ';') c = '\n';
  }
  std::istringstream lines(normalized);
  std::string line;
  while (std::getline(lines, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("malformed entry '" + line +
                                  "' (expected key = value)");
    }
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw std::invalid_argument("malformed entry '" + line +
                                  "' (expected key = value)");
    }

    if (key == "l") cfg.L = detail::parse_number<int>(key, value);
    else if (key == "k") cfg.K = detail::parse_number<int>(key, value);
    else if (key == "n") cfg.N = detail::parse_number<int>(key, value);
    else if (key == "group_size") cfg.group_size = detail::parse_number<int>(key, value);
    else if (key == "d_bu") cfg.d_bu = detail::parse_number<double>(key, value);
    else if (key == "d_br") cfg.d_br = detail::parse_number<double>(key, value);
    else if (key == "d_ru") cfg.d_ru = detail::parse_number<double>(key, value);
    else if (key == "gamma_bu") cfg.gamma_bu = detail::parse_number<double>(key, value);
    else if (key == "gamma_br") cfg.gamma_br = detail::parse_number<double>(key, value);
    else if (key == "gamma_ru") cfg.gamma_ru = detail::parse_number<double>(key, value);
    else if (key == "zeta0_db") cfg.zeta0_db = detail::parse_number<double>(key, value);
    else if (key == "noise_dbm") cfg.noise_dbm = detail::parse_number<double>(key, value);
    else if (key == "snr_db") cfg.snr_db = detail::parse_number<double>(key, value);
    else if (key == "trials") cfg.trials = detail::parse_number<int>(key, value);
    else if (key == "seed") cfg.seed = detail::parse_number<std::uint64_t>(key, value);
    else throw std::invalid_argument("unknown key '" + key + "'");
  }
  cfg.validate();
  return cfg;
}

inline ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open config file '" + path + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

// Doubles serialize at 17 significant digits (round-trip safe), with '.'
// as the decimal separator regardless of locale.
inline std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] =
      std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  if (ec != std::errc()) {
    throw std::runtime_error("format_double: conversion failed");
  }
  return std::string(buf, ptr);
}

inline double parse_double(const std::string& key, const std::string& text) {
  return detail::parse_number<double>(key, text);
}

// Complex literal `a+bj` / `a-bj`; a bare real is accepted on input.
inline std::string format_complex(const Complex& z) {
  const double im = z.imag();
  const bool neg = std::signbit(im) && !std::isnan(im);
  return format_double(z.real()) + (neg ? "-" : "+") +
         format_double(neg ? -im : im) + "j";
}

inline Complex parse_complex(std::string text) {
  text = detail::trim(text);
  if (text.empty()) {
    throw std::invalid_argument("empty complex literal");
  }
  // from_chars rejects an explicit '+', so shed one leading plus here.
  const auto parse_part = [](std::string part) {
    if (!part.empty() && part.front() == '+') part.erase(0, 1);
    return parse_double("complex literal", part);
  };
  if (text.back() != 'j') {
    return Complex(parse_part(text), 0.0);
  }
  const std::string body = text.substr(0, text.size() - 1);
  // The separating sign is the last '+'/'-' that does not follow an
  // exponent marker and is not the leading sign.
  for (size_t i = body.size(); i-- > 1;) {
    const char c = body[i];
    if ((c == '+' || c == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
      const double re = parse_part(body.substr(0, i));
      const double im = parse_part(body.substr(i));
      return Complex(re, im);
    }
  }
  // Pure imaginary, e.g. "1.5j" or "-2j".
  return Complex(0.0, parse_part(body));
}

// Matrix files: one row per line, comma-separated complex literals.
inline CMatrix read_complex_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open matrix file '" + path + "'");
  }
  std::vector<std::vector<Complex>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = detail::trim(line);
    if (line.empty()) continue;
    std::vector<Complex> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      row.push_back(parse_complex(cell));
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw std::invalid_argument("matrix file '" + path + "': line " +
                                  std::to_string(lineno) + " has " +
                                  std::to_string(row.size()) +
                                  " entries, expected " +
                                  std::to_string(rows.front().size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) {
    throw std::invalid_argument("matrix file '" + path + "' is empty");
  }
  CMatrix m(rows.size(), rows.front().size());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      m(i, j) = rows[static_cast<size_t>(i)][static_cast<size_t>(j)];
    }
  }
  return m;
}

inline void write_complex_matrix(const std::string& path, const CMatrix& m) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open output file '" + path + "'");
  }
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_complex(m(i, j));
    }
    out << '\n';
  }
  if (!out.good()) {
    throw std::runtime_error("write failed for '" + path + "'");
  }
}

inline constexpr const char* kCsvHeader =
    "strategy,N,metric,mean,std,mean_time_s,trials";

inline void write_csv(const std::string& path,
                      const ExperimentResult& result) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open output file '" + path + "'");
  }
  out << kCsvHeader << '\n';
  for (const ResultRow& row : result.rows) {
    out << row.strategy << ',' << row.n << ',' << row.metric << ','
        << format_double(row.mean) << ',' << format_double(row.stddev) << ','
        << format_double(row.mean_time_s) << ',' << row.trials << '\n';
  }
  if (!out.good()) {
    throw std::runtime_error("write failed for '" + path + "'");
  }
}

// Everything one invocation needs.  Empty strategy / N lists mean the
// per-subcommand defaults.  CLI flags override config-file values, which
// override the built-in reference scenario.
struct RunManifest {
  std::string subcommand;              // channel-gain | sum-rate | timing | project
  std::string config_path;             // empty: built-in defaults
  std::string output_path;
  std::vector<std::string> strategies;
  std::vector<int> n_list;
  std::optional<std::uint64_t> seed_override;
  std::optional<int> trials_override;
  int poo_n_cap = kDefaultPooNCap;
  std::string timestamp;               // informational, set by the tool

  // project subcommand only.
  std::string input_path;
  std::string op;                      // sym | uni | symuni | group | single
  int group_size = 2;
};

inline std::vector<int> default_n_list() { return {4, 8, 16, 32, 64}; }

inline std::vector<std::string> default_strategies(
    const std::string& subcommand, int group_size) {
  const std::string gc = "GC" + std::to_string(group_size);
  if (subcommand == "channel-gain") {
    return {"NoRIS",    "PoP-FC",   "PoP-" + gc, "PoP-SC",
            "PoO-FC",   "PoO-" + gc, "PoO-SC"};
  }
  if (subcommand == "sum-rate") {
    return {"PoP-FC+FP", "PoP-FC+RZF"};
  }
  if (subcommand == "timing") {
    return {"PoP-FC+FP", "PoP-FC+RZF", "PoO-FC+FP"};
  }
  throw std::invalid_argument("unknown subcommand '" + subcommand + "'");
}

namespace detail {

inline void run_project(const RunManifest& m) {
  const CMatrix z = read_complex_matrix(m.input_path);
  CMatrix out;
  std::vector<std::pair<std::string, double>> residuals;

  if (m.op == "sym") {
    out = sym(z);
    residuals.emplace_back("symmetry", (out - out.transpose()).norm());
  } else if (m.op == "uni") {
    out = uni(z);
    residuals.emplace_back(
        "unitarity",
        (out * out.adjoint() -
         CMatrix::Identity(out.rows(), out.cols())).norm());
  } else {
    ScatteringMatrix sm;
    if (m.op == "symuni") {
      sm = symuni(z);
    } else if (m.op == "group") {
      sm = project_group(z, m.group_size);
    } else if (m.op == "single") {
      sm = project_single(z);
    } else {
      throw std::invalid_argument(
          "unknown op '" + m.op + "' (expected sym, uni, symuni, group or single)");
    }
    out = sm.theta;
    const FeasibilityResiduals r = sm.residuals();
    residuals.emplace_back("symmetry", r.symmetry);
    residuals.emplace_back("unitarity", r.unitarity);
    residuals.emplace_back("structure", r.structure);
  }

  write_complex_matrix(m.output_path, out);
  for (const auto& [name, value] : residuals) {
    std::printf("residual,%s,%s\n", name.c_str(),
                format_double(value).c_str());
  }
}

}  // namespace detail

// Executes a manifest end to end.  Throws on any failure; the tool maps
// exceptions to a nonzero exit status.
inline void run_manifest(const RunManifest& m) {
  if (m.subcommand == "project") {
    detail::run_project(m);
    return;
  }

  ScenarioConfig cfg =
      m.config_path.empty() ? ScenarioConfig{} : load_config(m.config_path);
  if (m.seed_override) cfg.seed = *m.seed_override;
  if (m.trials_override) cfg.trials = *m.trials_override;
  cfg.validate();

  const std::vector<std::string> labels =
      m.strategies.empty() ? default_strategies(m.subcommand, cfg.group_size)
                           : m.strategies;
  std::vector<StrategySpec> specs;
  specs.reserve(labels.size());
  for (const std::string& label : labels) {
    specs.push_back(StrategySpec::parse(label));
  }
  const std::vector<int> n_list =
      m.n_list.empty() ? default_n_list() : m.n_list;

  for (const StrategySpec& s : specs) {
    if (s.passive != PassiveStrategy::PoO) continue;
    for (int n : n_list) {
      if (n > m.poo_n_cap) {
        std::fprintf(stderr,
                     "note: skipping %s at N=%d (PoO cap %d; raise with "
                     "--poo-n-cap)\n",
                     s.label().c_str(), n, m.poo_n_cap);
      }
    }
  }

  ExperimentResult result;
  if (m.subcommand == "channel-gain") {
    result = run_channel_gain(cfg, specs, n_list, m.poo_n_cap);
  } else if (m.subcommand == "sum-rate") {
    result = run_sum_rate(cfg, specs, n_list, m.poo_n_cap);
  } else if (m.subcommand == "timing") {
    result = run_timing(cfg, specs, n_list, m.poo_n_cap);
  } else {
    throw std::invalid_argument("unknown subcommand '" + m.subcommand + "'");
  }
  write_csv(m.output_path, result);
}

}  // namespace bdris
