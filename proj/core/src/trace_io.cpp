#include "semisplit/trace_io.hpp"

#include <cstdio>
#include <fstream>

namespace semisplit {

std::string format_sig17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

void append_component_header(std::string& line, const std::string& name, size_t n) {
  if (n == 1) {
    line += "," + name;
    return;
  }
  for (size_t i = 0; i < n; ++i) line += "," + name + std::to_string(i);
}

void append_vec(std::string& line, const Vec& v) {
  for (double x : v) line += "," + format_sig17(x);
}

}  // namespace

void write_iterate_csv(const IterateTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("write_iterate_csv: cannot open " + path);
  const size_t n = trace.records.empty() ? 1 : trace.records.front().x.size();
  std::string header = "k";
  append_component_header(header, "x", n);
  append_component_header(header, "xbar", n);
  header += ",vbar_norm,alpha,lambda,fejer_gap,shadow_res";
  out << header << "\n";
  for (const auto& r : trace.records) {
    std::string line = std::to_string(r.k);
    append_vec(line, r.x);
    append_vec(line, r.xbar);
    line += "," + format_sig17(r.vbar_norm);
    line += "," + format_sig17(r.alpha);
    line += "," + format_sig17(r.lambda);
    line += "," + format_sig17(r.fejer_gap);
    line += "," + format_sig17(r.shadow_res);
    out << line << "\n";
  }
}

void write_drs_csv(const DRSTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("write_drs_csv: cannot open " + path);
  const size_t n = trace.records.empty() ? 1 : trace.records.front().s.size();
  std::string header = "k";
  append_component_header(header, "s", n);
  append_component_header(header, "u", n);
  append_component_header(header, "v", n);
  append_component_header(header, "ybar", n);
  header += ",residual";
  out << header << "\n";
  for (const auto& r : trace.records) {
    std::string line = std::to_string(r.k);
    append_vec(line, r.s);
    append_vec(line, r.u);
    append_vec(line, r.v);
    append_vec(line, r.ybar);
    line += "," + format_sig17(r.residual);
    out << line << "\n";
  }
}

void write_scan_csv(const std::vector<ScanRow>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("write_scan_csv: cannot open " + path);
  out << "lambda,gamma,spectral_radius,converged_flag\n";
  for (const auto& r : rows) {
    out << format_sig17(r.lambda) << "," << format_sig17(r.gamma) << ","
        << format_sig17(r.spectral_radius) << "," << (r.converged ? 1 : 0) << "\n";
  }
}

}  // namespace semisplit
