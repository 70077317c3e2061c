#pragma once

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>
#include <vector>

#include "ucgs/core.hpp"

namespace ucgs {

/// One outer-iteration record. Quantities that a method does not define are
/// stored as NaN (e.g. L_k outside UCGS, certified_gap outside UCGS,
/// true_gap when f* is unknown).
struct TraceRow {
  std::int64_t k = 0;
  double f_y = 0.0;
  double true_gap = std::nan("");
  double certified_gap = std::nan("");
  double L = std::nan("");
  double gamma = std::nan("");
  double beta = std::nan("");
  double eta = std::nan("");
  std::int64_t inner_iters = 0;
  std::int64_t lmo_calls_cum = 0;
  std::int64_t grad_evals_cum = 0;
  std::int64_t grad_evals_with_retries_cum = 0;
  std::int64_t wall_ns = 0;
};

namespace detail {

inline bool same_double(double a, double b) {
  return (std::isnan(a) && std::isnan(b)) || a == b;
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

inline bool operator==(const TraceRow& a, const TraceRow& b) {
  using detail::same_double;
  return a.k == b.k && same_double(a.f_y, b.f_y) && same_double(a.true_gap, b.true_gap) &&
         same_double(a.certified_gap, b.certified_gap) && same_double(a.L, b.L) &&
         same_double(a.gamma, b.gamma) && same_double(a.beta, b.beta) &&
         same_double(a.eta, b.eta) && a.inner_iters == b.inner_iters &&
         a.lmo_calls_cum == b.lmo_calls_cum && a.grad_evals_cum == b.grad_evals_cum &&
         a.grad_evals_with_retries_cum == b.grad_evals_with_retries_cum &&
         a.wall_ns == b.wall_ns;
}

/// Per-iteration trace of one solver run, serializable to CSV with 17
/// significant digits (lossless for doubles) and LF line endings.
struct RunTrace {
  std::vector<TraceRow> rows;

  static constexpr const char* kHeader =
      "k,f_y,true_gap,certified_gap,L_k,gamma_k,beta_k,eta_k,inner_iters,"
      "lmo_calls_cum,grad_evals_cum,grad_evals_with_retries_cum,wall_ns";

  std::string to_csv() const {
    std::string out;
    out.reserve(rows.size() * 160 + 160);
    out += kHeader;
    out += '\n';
    char buf[384];
    for (const TraceRow& r : rows) {
      std::snprintf(buf, sizeof(buf),
                    "%" PRId64 ",%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%" PRId64 ",%" PRId64
                    ",%" PRId64 ",%" PRId64 ",%" PRId64 "\n",
                    r.k, r.f_y, r.true_gap, r.certified_gap, r.L, r.gamma, r.beta, r.eta,
                    r.inner_iters, r.lmo_calls_cum, r.grad_evals_cum,
                    r.grad_evals_with_retries_cum, r.wall_ns);
      out += buf;
    }
    return out;
  }

  static RunTrace from_csv(const std::string& text) {
    RunTrace trace;
    size_t pos = 0;
    auto next_line = [&](std::string& line) {
      if (pos >= text.size()) return false;
      const size_t nl = text.find('\n', pos);
      if (nl == std::string::npos) {
        line = text.substr(pos);
        pos = text.size();
      } else {
        line = text.substr(pos, nl - pos);
        pos = nl + 1;
      }
      return true;
    };
    std::string line;
    require(next_line(line) && line == kHeader, "RunTrace: bad or missing CSV header");
    while (next_line(line)) {
      if (line.empty()) continue;
      std::vector<std::string> fields;
      size_t start = 0;
      while (true) {
        const size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
          fields.push_back(line.substr(start));
          break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
      }
      require(fields.size() == 13, "RunTrace: wrong column count in row");
      auto as_i64 = [](const std::string& s) {
        return static_cast<std::int64_t>(std::strtoll(s.c_str(), nullptr, 10));
      };
      auto as_f64 = [](const std::string& s) { return std::strtod(s.c_str(), nullptr); };
      TraceRow r;
      r.k = as_i64(fields[0]);
      r.f_y = as_f64(fields[1]);
      r.true_gap = as_f64(fields[2]);
      r.certified_gap = as_f64(fields[3]);
      r.L = as_f64(fields[4]);
      r.gamma = as_f64(fields[5]);
      r.beta = as_f64(fields[6]);
      r.eta = as_f64(fields[7]);
      r.inner_iters = as_i64(fields[8]);
      r.lmo_calls_cum = as_i64(fields[9]);
      r.grad_evals_cum = as_i64(fields[10]);
      r.grad_evals_with_retries_cum = as_i64(fields[11]);
      r.wall_ns = as_i64(fields[12]);
      trace.rows.push_back(r);
    }
    return trace;
  }
};

inline bool operator==(const RunTrace& a, const RunTrace& b) { return a.rows == b.rows; }

}  // namespace ucgs
