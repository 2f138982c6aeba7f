#include "hubergd/csv_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "hubergd/error.hpp"

namespace hubergd {

void write_file_atomic(const std::string& path, const std::string& contents) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
    if (ec) throw Error(ErrorKind::io, "cannot create directory for '" + path + "': " + ec.message());
  }
  const std::string tmp = path + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::io, "cannot open '" + tmp + "' for writing");
    out << contents;
    out.flush();
    if (!out) {
      out.close();
      std::remove(tmp.c_str());
      throw Error(ErrorKind::io, "write to '" + tmp + "' failed");
    }
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw Error(ErrorKind::io, "cannot rename onto '" + path + "'");
  }
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string dataset_to_csv(const Dataset& D) {
  D.check_well_formed();
  std::string out;
  for (std::size_t j = 0; j < D.dim; ++j) out += "x" + std::to_string(j + 1) + ",";
  out += "label";
  if (D.has_clusters()) out += ",cluster";
  out += "\n";
  for (std::size_t s = 0; s < D.size(); ++s) {
    for (double v : D.feature(s)) {
      out += format_double(v);
      out += ',';
    }
    out += D.labels[s] > 0 ? "1" : "-1";
    if (D.has_clusters()) out += "," + std::to_string(D.cluster_of[s]);
    out += "\n";
  }
  return out;
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

[[noreturn]] void fail(const std::string& origin, int line, const std::string& what) {
  throw Error(ErrorKind::parse, origin + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

Dataset dataset_from_csv(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  if (!std::getline(in, line)) fail(origin, 1, "missing header");
  ++lineno;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split(line);
  std::size_t dim = 0;
  while (dim < header.size() && header[dim] == "x" + std::to_string(dim + 1)) ++dim;
  if (dim == 0 || dim >= header.size() || header[dim] != "label") {
    fail(origin, 1, "header must be x1,...,xD,label[,cluster]");
  }
  const bool clusters = header.size() == dim + 2;
  if (header.size() > dim + 2 || (clusters && header[dim + 1] != "cluster")) {
    fail(origin, 1, "header must be x1,...,xD,label[,cluster]");
  }
  Dataset D;
  D.dim = dim;
  std::vector<double> x(dim);
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != header.size()) fail(origin, lineno, "expected " + std::to_string(header.size()) + " fields");
    for (std::size_t j = 0; j < dim; ++j) {
      const char* b = cells[j].c_str();
      char* e = nullptr;
      x[j] = std::strtod(b, &e);
      if (e == b || *e != '\0' || !std::isfinite(x[j])) {
        fail(origin, lineno, "bad feature value '" + cells[j] + "'");
      }
    }
    int label = 0;
    if (cells[dim] == "1") {
      label = 1;
    } else if (cells[dim] == "-1") {
      label = -1;
    } else {
      fail(origin, lineno, "label must be 1 or -1");
    }
    int cluster = 0;
    if (clusters) {
      const std::string& c = cells[dim + 1];
      if (c.size() != 1 || c[0] < '1' || c[0] > '4') fail(origin, lineno, "cluster must be 1..4");
      cluster = c[0] - '0';
    }
    D.push_back(x, label, cluster);
  }
  if (D.empty()) fail(origin, lineno, "no data rows");
  return D;
}

void write_dataset_csv(const std::string& path, const Dataset& D) { write_file_atomic(path, dataset_to_csv(D)); }

Dataset read_dataset_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open dataset '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return dataset_from_csv(ss.str(), path);
}

std::string telemetry_to_csv(const std::vector<IterationRecord>& records) {
  std::string out = "t,loss,grad_norm,param_norm,step_size,alignment,ratio,i1,i2,i3,lemma5\n";
  for (const auto& r : records) {
    out += std::to_string(r.t);
    for (double v : {r.loss, r.grad_norm, r.param_norm, r.step_size, r.alignment, r.ratio}) {
      out += ',';
      out += format_double(v);
    }
    for (Verdict v : {r.flags.i1, r.flags.i2, r.flags.i3, r.flags.lemma5}) {
      out += ',';
      out += to_string(v);
    }
    out += '\n';
  }
  return out;
}

namespace {

// Witnesses may contain commas; quote per RFC 4180 when needed.
std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

}  // namespace

std::string verdicts_to_csv(const std::vector<VerdictRow>& rows) {
  std::string out = "check,scope,passed,worst_value,threshold,witness\n";
  for (const auto& r : rows) {
    out += csv_cell(r.check) + "," + csv_cell(r.scope) + "," + (r.passed ? "1" : "0") + "," +
           format_double(r.worst_value) + "," + format_double(r.threshold) + "," + csv_cell(r.witness) + "\n";
  }
  return out;
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
  std::string out = "param_value,L1,log_inv_L1,final_loss,runtime_s\n";
  for (const auto& r : rows) {
    out += format_double(r.param_value) + "," + format_double(r.L1) + "," + format_double(r.log_inv_L1) +
           "," + format_double(r.final_loss) + "," + format_double(r.runtime_s) + "\n";
  }
  return out;
}

}  // namespace hubergd
